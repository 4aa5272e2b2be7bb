"""Low-level B-spline kernels on raw arrays.

Everything here works on plain numpy arrays with 0-based indices and no
validation; the public modules wrap these with typed containers, 1-based
index contracts and error checking.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "find_span0",
    "find_span0_many",
    "kernel_single",
    "kernel_many",
    "nonzero_basis_row",
    "nonzero_basis_rows",
]


def find_span0(knots: np.ndarray, degree: int, dimension: int, x: float) -> int:
    """0-based anchor index k0 with knots[k0] <= x < knots[k0+1].

    The right endpoint is closed: x == knots[-1] anchors to the last
    nonempty interval.  The result is clamped into [degree, dimension-1]
    so the coefficient window c[k0-degree .. k0] always exists; when the
    clamped interval is empty the scan moves to the nearest nonempty one
    (left first, matching right-endpoint closure, then right).
    """
    if not (knots[0] <= x <= knots[-1]):
        raise ValueError("evaluation point lies outside the knot span")
    if dimension < degree + 1:
        raise ValueError(
            "knot vector has no interval with full basis support; "
            "normalize with make_open first"
        )
    k0 = int(np.searchsorted(knots, x, side="right")) - 1
    k0 = min(max(k0, degree), dimension - 1)
    j = k0
    while j > degree and knots[j] == knots[j + 1]:
        j -= 1
    if knots[j] == knots[j + 1]:
        j = k0
        while j < dimension - 1 and knots[j] == knots[j + 1]:
            j += 1
        if knots[j] == knots[j + 1]:
            raise ValueError(
                "no nonempty knot interval with full basis support contains "
                "the evaluation point; normalize with make_open first"
            )
    return j


def find_span0_many(
    knots: np.ndarray, degree: int, dimension: int, xs: np.ndarray
) -> np.ndarray:
    """Vectorized find_span0 over a 1-D array of points."""
    if xs.size == 0:
        return np.empty(0, dtype=np.intp)
    if xs.min() < knots[0] or xs.max() > knots[-1]:
        raise ValueError("evaluation point lies outside the knot span")
    if dimension < degree + 1:
        raise ValueError(
            "knot vector has no interval with full basis support; "
            "normalize with make_open first"
        )
    k0 = np.searchsorted(knots, xs, side="right").astype(np.intp) - 1
    np.clip(k0, degree, dimension - 1, out=k0)
    # scan left over empty intervals (right-endpoint closure), then right
    for _ in range(len(knots)):
        mask = (knots[k0] == knots[k0 + 1]) & (k0 > degree)
        if not mask.any():
            break
        k0[mask] -= 1
    for _ in range(len(knots)):
        mask = (knots[k0] == knots[k0 + 1]) & (k0 < dimension - 1)
        if not mask.any():
            break
        k0[mask] += 1
    if np.any(knots[k0] == knots[k0 + 1]):
        raise ValueError(
            "no nonempty knot interval with full basis support contains "
            "the evaluation point; normalize with make_open first"
        )
    return k0


def _stage_factors(
    tau_window: np.ndarray, d: int, p: int, t
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and superdiagonal of the d-th bidiagonal stage.

    `t` may be a scalar or a column of shape (B, 1) for batched use.
    Rows with a zero denominator get both entries set to 0: the whole
    fraction vanishes by convention, it is not an omega/(1-omega) pair.
    """
    hi = tau_window[p : p + d]
    lo = tau_window[p - d : p]
    denom = hi - lo
    ok = denom > 0
    safe = np.where(ok, denom, 1.0)
    diag = np.where(ok, (hi - t) / safe, 0.0)
    sup = np.where(ok, (t - lo) / safe, 0.0)
    return diag, sup


def kernel_single(
    tau_window: np.ndarray,
    coeff_window: np.ndarray,
    fine_knots: np.ndarray,
    stages: list | None = None,
) -> float:
    """One coefficient of the refined spline from a local window.

    tau_window has length 2p (knots tau_{k+1-p} .. tau_{k+p}), coeff_window
    length p+1 (c_{k-p} .. c_k), fine_knots length p (t_{i+1} .. t_{i+p}).
    Applies the bidiagonal stages R_p, .., R_1; stage d uses fine knot
    number d and shrinks the vector from d+1 to d entries.  Cost is
    3p(p+1)/2 flops.  If `stages` is a list, every intermediate
    coefficient vector is appended to it (used by convexity tests).
    """
    p = coeff_window.shape[0] - 1
    v = np.asarray(coeff_window, dtype=float).copy()
    for d in range(p, 0, -1):
        diag, sup = _stage_factors(tau_window, d, p, fine_knots[d - 1])
        v = diag * v[:d] + sup * v[1 : d + 1]
        if stages is not None:
            stages.append(v.copy())
    return float(v[0])


def kernel_many(
    tau_window: np.ndarray,
    coeff_window: np.ndarray,
    fine_rows: np.ndarray,
) -> np.ndarray:
    """kernel_single batched over B rows of fine knots, shape (B, p)."""
    p = coeff_window.shape[0] - 1
    B = fine_rows.shape[0]
    v = np.broadcast_to(np.asarray(coeff_window, dtype=float), (B, p + 1)).copy()
    for d in range(p, 0, -1):
        t = fine_rows[:, d - 1 : d]
        diag, sup = _stage_factors(tau_window, d, p, t)
        v = diag * v[:, :d] + sup * v[:, 1 : d + 1]
    return v[:, 0]


def nonzero_basis_row(
    knots: np.ndarray, degree: int, span0: int, x: float
) -> np.ndarray:
    """Values of the p+1 basis functions B_{span0-p} .. B_{span0} at x."""
    return nonzero_basis_rows(
        knots, degree, np.array([span0], dtype=np.intp), np.array([x])
    )[0]


def nonzero_basis_rows(
    knots: np.ndarray, degree: int, span0s: np.ndarray, xs: np.ndarray
) -> np.ndarray:
    """Triangular evaluation of all nonzero basis values, one row per point.

    Denominators are differences of knots spanning the (nonempty) anchor
    interval, so they never vanish for valid spans.
    """
    p = degree
    m = xs.shape[0]
    N = np.zeros((m, p + 1))
    N[:, 0] = 1.0
    left = np.empty((m, p + 1))
    right = np.empty((m, p + 1))
    for j in range(1, p + 1):
        left[:, j] = xs - knots[span0s + 1 - j]
        right[:, j] = knots[span0s + j] - xs
        saved = np.zeros(m)
        for r in range(j):
            temp = N[:, r] / (right[:, r + 1] + left[:, j - r])
            N[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        N[:, j] = saved
    return N
