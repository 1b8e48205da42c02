"""Sliced-cosine multiset embedding.

A multiset X of vectors in R^d is embedded into R^m by projecting onto m unit
directions, sorting each batch of projections, viewing the sorted values as a
quantile step function on [0, 1), and taking one cosine-transform coefficient
per direction:

    z_i = 2 (1 + xi_i) * integral_0^1 Q_i(t) cos(2 pi xi_i t) dt

where Q_i is the step function with value y_(j) on [(j-1)/n, j/n).  The
integral has a closed form; with h = 2 pi xi / n,

    z = (2 (1 + xi) / (2 pi xi)) * sum_j y_j (sin(j h) - sin((j-1) h))
      = (2 (1 + xi) / (pi xi)) * sin(h / 2) * sum_j y_j cos((j - 1/2) h),

the product form being numerically stable for small frequencies.  At or below
xi = 1e-9 the limit 2 (1 + xi) * mean(y) is used instead.

Multisets are plain arrays of shape (n, d); the order of the rows never
affects the embedding.  The empty multiset maps to the zero vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "XI_EPS",
    "FswParams",
    "sample_params",
    "quantile_cosine_integral",
    "embed_multiset",
]

# Frequencies at or below this threshold use the xi -> 0 limit (the mean rule).
XI_EPS = 1e-9


@dataclass(frozen=True)
class FswParams:
    """Embedding parameters: unit slice directions and nonnegative frequencies.

    ``slices`` has shape (m, d) with unit-norm rows, ``freqs`` shape (m,).
    ``seed`` records how the parameters were drawn.
    """

    slices: np.ndarray
    freqs: np.ndarray
    seed: int

    def __post_init__(self):
        slices = np.asarray(self.slices, dtype=float)
        freqs = np.asarray(self.freqs, dtype=float)
        if slices.ndim != 2 or slices.shape[0] < 1 or slices.shape[1] < 1:
            raise ValueError(f"slices must have shape (m, d), got {slices.shape}")
        if freqs.shape != (slices.shape[0],):
            raise ValueError(
                f"freqs shape {freqs.shape} does not match {slices.shape[0]} slices"
            )
        if not (np.all(np.isfinite(slices)) and np.all(np.isfinite(freqs))):
            raise ValueError("parameters must be finite")
        norms = np.linalg.norm(slices, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("slice directions must have unit norm")
        if np.any(freqs < 0):
            raise ValueError("frequencies must be nonnegative")
        slices = slices.copy()
        freqs = freqs.copy()
        slices.setflags(write=False)
        freqs.setflags(write=False)
        object.__setattr__(self, "slices", slices)
        object.__setattr__(self, "freqs", freqs)

    @property
    def num_slices(self) -> int:
        return self.slices.shape[0]

    @property
    def dim(self) -> int:
        return self.slices.shape[1]


def sample_params(dim: int, num_slices: int, seed: int) -> FswParams:
    """Draw embedding parameters deterministically from a seed.

    Slice directions are iid uniform on the unit sphere (normalized standard
    Gaussians); frequencies are iid Exponential with rate 1.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if num_slices < 1:
        raise ValueError(f"num_slices must be >= 1, got {num_slices}")
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((num_slices, dim))
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    if np.any(norms == 0.0):  # probability zero, but normalize safely
        raise RuntimeError("degenerate zero draw for a slice direction")
    freqs = rng.exponential(1.0, num_slices)
    return FswParams(vecs / norms, freqs, int(seed))


def _cosine_from_sorted(sorted_cols: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Cosine-transform coefficients for pre-sorted projection columns.

    ``sorted_cols`` has shape (n, m): column i holds the ascending projections
    for frequency ``freqs[i]``.  Returns shape (m,).
    """
    n, m = sorted_cols.shape
    out = np.empty(m)
    small = freqs <= XI_EPS
    if np.any(small):
        means = sorted_cols[:, small].sum(axis=0) / n
        out[small] = 2.0 * (1.0 + freqs[small]) * means
    big = ~small
    if np.any(big):
        xi = freqs[big]
        h = 2.0 * np.pi * xi / n
        j = np.arange(1, n + 1)
        weights = np.cos((j[:, None] - 0.5) * h[None, :])
        sums = (sorted_cols[:, big] * weights).sum(axis=0)
        out[big] = (2.0 * (1.0 + xi) / (np.pi * xi)) * np.sin(0.5 * h) * sums
    return out


def quantile_cosine_integral(sorted_values: np.ndarray, freq: float) -> float:
    """Closed-form cosine transform of one sorted value vector.

    ``sorted_values`` must be ascending and nonempty; ``freq`` nonnegative.
    """
    y = np.asarray(sorted_values, dtype=float)
    if y.ndim != 1 or y.size < 1:
        raise ValueError("sorted_values must be a nonempty 1d vector")
    if np.any(np.diff(y) < 0):
        raise ValueError("sorted_values must be ascending")
    if not np.isfinite(freq) or freq < 0:
        raise ValueError(f"freq must be finite and >= 0, got {freq}")
    return float(_cosine_from_sorted(y[:, None], np.array([float(freq)]))[0])


def embed_multiset(points, params: FswParams) -> np.ndarray:
    """Embed a multiset of vectors (array of shape (n, d)) into R^m.

    Row order does not matter; the empty multiset ((0, d) array or empty list)
    maps to the zero vector.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return np.zeros(params.num_slices)
    if pts.ndim != 2:
        raise ValueError(f"points must have shape (n, d), got shape {pts.shape}")
    if pts.shape[1] != params.dim:
        raise ValueError(
            f"point dimension {pts.shape[1]} does not match slices of dimension {params.dim}"
        )
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    # Project one slice at a time with a per-row reduction: the summation
    # order then depends only on d, never on a row's position in the batch,
    # which keeps the embedding invariant to row order at the bit level
    # (BLAS matmul kernels do not guarantee that).
    pts = np.ascontiguousarray(pts)
    proj = np.empty((pts.shape[0], params.num_slices))
    for i in range(params.num_slices):
        proj[:, i] = (pts * params.slices[i]).sum(axis=1)
    proj.sort(axis=0)
    return _cosine_from_sorted(proj, params.freqs)
