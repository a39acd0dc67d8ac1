"""Error and quality metrics: relative error, RMSE, PSNR, conversion sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .batch import from_binary32_batch, to_binary64_batch
from .formats import FixedPositFormat

PSNR_CAP_DB = 100.0

DISTRIBUTIONS = ("log-uniform", "uniform-real")


class ExcludedSample(Exception):
    """Raised when a sample cannot contribute a relative error (zero or non-finite reference)."""


@dataclass(frozen=True, slots=True)
class ErrorReport:
    """Aggregated error statistics for a sweep or a workload comparison."""

    count: int
    max_rel_err_pct: float
    mean_rel_err_pct: float
    rmse: float
    psnr_db: float | None = None
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "max_rel_err_pct": self.max_rel_err_pct,
            "mean_rel_err_pct": self.mean_rel_err_pct,
            "rmse": self.rmse,
            "psnr_db": self.psnr_db,
            "skipped": self.skipped,
        }


def relative_error_pct(reference: float, approximation: float) -> float:
    """100 * |x - x'| / |x| for a nonzero finite reference x."""
    if reference == 0 or not math.isfinite(reference):
        raise ExcludedSample(f"reference {reference!r} cannot anchor a relative error")
    return 100.0 * abs(reference - approximation) / abs(reference)


def rmse(reference, approximation) -> float:
    """Root mean squared difference of two equal-length sequences."""
    ref = np.asarray(reference, dtype=np.float64)
    approx = np.asarray(approximation, dtype=np.float64)
    if ref.shape != approx.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {approx.shape}")
    if ref.size == 0:
        raise ValueError("need at least one sample")
    return float(np.sqrt(np.mean((ref - approx) ** 2)))


def psnr_db(reference, approximation, peak: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB, capped at 100 for identical inputs."""
    ref = np.asarray(reference, dtype=np.float64)
    approx = np.asarray(approximation, dtype=np.float64)
    if ref.shape != approx.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {approx.shape}")
    if peak <= 0:
        raise ValueError(f"peak must be positive, got {peak}")
    mse = float(np.mean((ref - approx) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * math.log10(peak * peak / mse))


def error_report(reference, approximation, psnr_peak: float | None = None) -> ErrorReport:
    """Elementwise relative-error aggregation over vector outputs.

    Elements whose reference is zero or non-finite are excluded from the
    relative-error statistics and counted in ``skipped``; RMSE still covers
    every element.
    """
    ref = np.asarray(reference, dtype=np.float64).ravel()
    approx = np.asarray(approximation, dtype=np.float64).ravel()
    if ref.shape != approx.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {approx.shape}")
    if ref.size == 0:
        raise ValueError("need at least one sample")
    usable = np.isfinite(ref) & (ref != 0)
    rel = 100.0 * np.abs(ref[usable] - approx[usable]) / np.abs(ref[usable])
    return ErrorReport(
        count=int(ref.size),
        max_rel_err_pct=float(rel.max()) if rel.size else 0.0,
        mean_rel_err_pct=float(rel.mean()) if rel.size else 0.0,
        rmse=rmse(ref, approx),
        psnr_db=psnr_db(ref, approx, psnr_peak) if psnr_peak is not None else None,
        skipped=int(ref.size - rel.size),
    )


def _sample_binary32(
    rng: np.random.Generator, count: int, distribution: str
) -> np.ndarray:
    """Positive binary32 bit patterns drawn from the requested distribution."""
    if distribution == "log-uniform":
        exponents = rng.integers(-126, 128, size=count, dtype=np.int64)
        fractions = rng.integers(0, 1 << 23, size=count, dtype=np.int64)
        return ((exponents + 127) << 23) | fractions
    if distribution == "uniform-real":
        reals = rng.uniform(2.0**-126, 2.0**127, size=count)
        return reals.astype(np.float32).view(np.uint32).astype(np.int64)
    raise ValueError(f"unknown distribution {distribution!r}; pick one of {DISTRIBUTIONS}")


def sweep_conversion_error(
    fmt: FixedPositFormat,
    sample_count: int,
    seed: int,
    distribution: str = "log-uniform",
) -> ErrorReport:
    """Round-trip binary32 samples through ``fmt`` and aggregate the error.

    Samples are drawn once from the seeded generator, converted to the
    format and back to binary64, and compared against the exact sampled
    values.  Aggregation is max/sum based, so chunked or parallel evaluation
    would merge to the same report.
    """
    if sample_count < 1:
        raise ValueError(f"sample_count must be positive, got {sample_count}")
    rng = np.random.default_rng(seed)
    bits = _sample_binary32(rng, sample_count, distribution)
    reference = bits.astype(np.uint32).view(np.float32).astype(np.float64)
    roundtrip = to_binary64_batch(from_binary32_batch(bits, fmt), fmt)
    rel = 100.0 * np.abs(reference - roundtrip) / np.abs(reference)
    return ErrorReport(
        count=sample_count,
        max_rel_err_pct=float(rel.max()),
        mean_rel_err_pct=float(rel.mean()),
        rmse=float(np.sqrt(np.mean((reference - roundtrip) ** 2))),
        psnr_db=None,
        skipped=0,
    )
