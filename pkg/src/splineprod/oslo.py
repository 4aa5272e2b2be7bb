"""Knot insertion: bidiagonal stage matrices and the local de Boor kernel.

One refined coefficient b_i depends only on a window of the coarse data:
the anchor index k of t_i in the coarse knots tau gives the knot window
tau_{k+1-p} .. tau_{k+p} (length 2p), the coefficient window c_{k-p} .. c_k
(length p+1) and the fine window t_{i+1} .. t_{i+p} (length p).  b_i is
the product of the bidiagonal stages applied to the coefficient window,
3p(p+1)/2 flops in total.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import find_span0_many, kernel_many, kernel_single, _stage_factors
from .core import KnotVector, make_open, make_spline, multiplicity

__all__ = [
    "LocalWindow",
    "InsertionMatrix",
    "insertion_matrix",
    "deboor_kernel",
    "oslo_coefficients",
    "discrete_bspline_row",
]


@dataclass(frozen=True)
class LocalWindow:
    """The three arrays one refined coefficient depends on.

    coarse_knots has even length 2p, coarse_coeffs length p+1 and
    fine_knots length p; all three are nondecreasing and the fine knots
    lie inside the coarse window's span.
    """

    coarse_knots: np.ndarray
    coarse_coeffs: np.ndarray
    fine_knots: np.ndarray

    def __post_init__(self):
        coarse = np.array(self.coarse_knots, dtype=float)
        coeffs = np.array(self.coarse_coeffs, dtype=float)
        fine = np.array(self.fine_knots, dtype=float)
        p = coeffs.size - 1
        if p < 1 or coarse.size != 2 * p or fine.size != p:
            raise ValueError(
                "inconsistent window sizes: need 2p coarse knots, p+1 "
                "coefficients and p fine knots"
            )
        if np.any(np.diff(coarse) < 0) or np.any(np.diff(fine) < 0):
            raise ValueError("window knots must be nondecreasing")
        if fine[0] < coarse[0] or fine[-1] > coarse[-1]:
            raise ValueError("fine knots must lie within the coarse window's span")
        for name, arr in (("coarse_knots", coarse), ("coarse_coeffs", coeffs),
                          ("fine_knots", fine)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def degree(self) -> int:
        return self.coarse_coeffs.size - 1


@dataclass(frozen=True)
class InsertionMatrix:
    """Bidiagonal stage R_d: d rows, d+1 columns, two nonzero bands."""

    rows: int
    cols: int
    diagonal: np.ndarray
    superdiagonal: np.ndarray

    def __post_init__(self):
        if self.cols != self.rows + 1:
            raise ValueError("stage matrix must have one more column than rows")
        if self.diagonal.size != self.rows or self.superdiagonal.size != self.rows:
            raise ValueError("band lengths must equal the row count")

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols))
        idx = np.arange(self.rows)
        dense[idx, idx] = self.diagonal
        dense[idx, idx + 1] = self.superdiagonal
        return dense

    def apply(self, v: np.ndarray) -> np.ndarray:
        if v.shape[-1] != self.cols:
            raise ValueError("vector length must equal the column count")
        return self.diagonal * v[..., : self.rows] + self.superdiagonal * v[..., 1:]


def insertion_matrix(coarse: KnotVector, k: int, d: int, t: float) -> InsertionMatrix:
    """Stage matrix R_d^k(t) over the coarse knots, k 1-based.

    Entry l (1-based, l = 1..d) has diagonal (tau_{k+l} - t) / w and
    superdiagonal (t - tau_{k+l-d}) / w with w = tau_{k+l} - tau_{k+l-d};
    when w = 0 the whole fraction vanishes and both entries are 0.
    """
    p = coarse.degree
    n = coarse.dimension
    if not 1 <= d <= p:
        raise IndexError(f"stage d must satisfy 1 <= d <= degree, got {d}")
    if not p + 1 <= k <= n:
        raise IndexError(
            f"anchor k must satisfy degree+1 <= k <= dimension, got {k}"
        )
    k0 = k - 1
    window = coarse.knots[k0 - p + 1 : k0 + p + 1]
    diag, sup = _stage_factors(window, d, p, float(t))
    return InsertionMatrix(rows=d, cols=d + 1, diagonal=diag, superdiagonal=sup)


def deboor_kernel(window: LocalWindow, p: int) -> float:
    """One refined coefficient from a local window.

    Equals the product R_1(t'_1) .. R_p(t'_p) applied to the coefficient
    window; the stages are applied right to left, stage d consuming fine
    knot number d.
    """
    if window.degree != p:
        raise ValueError(
            f"inconsistent window sizes: window has degree {window.degree}, "
            f"kernel called with p = {p}"
        )
    return kernel_single(
        window.coarse_knots, window.coarse_coeffs, window.fine_knots
    )


def kernel_stages(window: LocalWindow) -> list[np.ndarray]:
    """Intermediate coefficient vectors of the kernel, longest first.

    Exposes the shrinking vectors c^(d) for inspection; the last entry
    has length 1 and holds the kernel value.
    """
    stages: list[np.ndarray] = []
    kernel_single(
        window.coarse_knots, window.coarse_coeffs, window.fine_knots, stages
    )
    return stages


def _validate_refinement(coarse: KnotVector, fine: KnotVector) -> None:
    """Fine must locally refine coarse on the fine span."""
    lo, hi = fine.span
    clo, chi = coarse.span
    if lo < clo or hi > chi:
        raise ValueError(
            "not a refinement: fine span must lie within the coarse span"
        )
    for run in coarse.breakpoints():
        if lo < run.value < hi:
            if multiplicity(fine, run.value) < run.multiplicity:
                raise ValueError(
                    "not a refinement: coarse knot "
                    f"{run.value!r} has multiplicity {run.multiplicity} but "
                    f"only {multiplicity(fine, run.value)} in the fine vector"
                )


def oslo_coefficients(
    p: int, coarse: KnotVector, coeffs: np.ndarray, fine: KnotVector
) -> np.ndarray:
    """Coefficients of the same spline on a locally refined knot vector.

    Both knot vectors must have degree p and the fine vector must contain
    every interior coarse knot of its span with at least the coarse
    multiplicity; a fine span strictly inside the coarse span yields the
    coefficients of the restriction.  The coarse side is normalized to an
    open vector first so every anchor has a full coefficient window; the
    returned array has one coefficient per fine B-spline.
    """
    if coarse.degree != p or fine.degree != p:
        raise ValueError("degree mismatch between knot vectors and p")
    src = make_open(make_spline(p, coarse.knots, np.asarray(coeffs, dtype=float)))
    ckv = src.knots
    _validate_refinement(ckv, fine)
    n = fine.dimension
    anchors = fine.knots[:n]
    spans = find_span0_many(ckv.knots, p, ckv.dimension, anchors)
    if p == 0:
        return src.coefficients[spans].copy()
    fine_windows = np.lib.stride_tricks.sliding_window_view(fine.knots[1 : n + p], p)
    out = np.empty(n)
    order = np.argsort(spans, kind="stable")
    boundaries = np.flatnonzero(np.diff(spans[order])) + 1
    for group in np.split(order, boundaries):
        k0 = int(spans[group[0]])
        tau_win = ckv.knots[k0 - p + 1 : k0 + p + 1]
        c_win = src.coefficients[k0 - p : k0 + 1]
        out[group] = kernel_many(tau_win, c_win, fine_windows[group])
    return out


def discrete_bspline_row(
    p: int, coarse: KnotVector, k: int, fine_window: np.ndarray
) -> np.ndarray:
    """Row of discrete B-spline values alpha_{k-p..k} for one fine window.

    Computed as the explicit product of the stage matrices R_1 .. R_p so
    tests can cross-check the kernel; returns p+1 weights, nonnegative
    with sum 1 whenever the fine window lies in the anchor interval.
    """
    n = coarse.dimension
    if not p + 1 <= k <= n:
        raise IndexError(
            f"anchor k must satisfy degree+1 <= k <= dimension, got {k}"
        )
    fine_window = np.asarray(fine_window, dtype=float)
    if fine_window.shape != (p,):
        raise ValueError("fine window must contain exactly p knots")
    if np.any(np.diff(fine_window) < 0):
        raise ValueError("window knots must be nondecreasing")
    if p == 0:
        return np.ones(1)
    row = insertion_matrix(coarse, k, 1, float(fine_window[0])).to_dense()
    for d in range(2, p + 1):
        row = row @ insertion_matrix(coarse, k, d, float(fine_window[d - 1])).to_dense()
    return row[0]
