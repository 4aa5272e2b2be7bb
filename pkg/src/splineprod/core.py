"""Knot vectors, splines, and the product knot vector.

Index convention: the public find_span returns 1-based indices k with
degree+1 <= k <= dimension, matching the windows c_{k-p..k} used
throughout; helper slices convert to 0-based internally.  Knot equality
is exact floating-point equality everywhere; product_knot_vector takes
an optional tolerance for merging near-coincident breakpoints and it
defaults to 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import find_span0, find_span0_many, kernel_many

__all__ = [
    "KnotVector",
    "Spline",
    "BreakpointRun",
    "make_open",
    "find_span",
    "evaluate",
    "greville_abscissae",
    "product_knot_vector",
    "multiplicity",
    "make_spline",
    "uniform_open_knots",
    "bernstein_knots",
]


@dataclass(frozen=True)
class BreakpointRun:
    """One distinct knot value together with its multiplicity."""

    value: float
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("breakpoint multiplicity must be at least 1")


@dataclass(frozen=True)
class KnotVector:
    """Nondecreasing knot sequence read in the context of a degree.

    Invariants checked on construction: the degree is a nonnegative
    integer, the knots are finite and nondecreasing, no value occurs
    more than degree+1 times, and there are at least degree+2 knots so
    the spline space is nonempty.
    """

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        if (
            isinstance(self.degree, bool)
            or not isinstance(self.degree, (int, np.integer))
            or self.degree < 0
        ):
            raise ValueError("degree must be a nonnegative integer")
        object.__setattr__(self, "degree", int(self.degree))
        knots = np.array(self.knots, dtype=float)
        if knots.ndim != 1:
            raise ValueError("knots must be a one-dimensional array of numbers")
        if not np.all(np.isfinite(knots)):
            raise ValueError("knots must be finite numbers")
        if knots.size < self.degree + 2:
            raise ValueError("knot vector must contain at least degree + 2 knots")
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be nondecreasing")
        values, counts = np.unique(knots, return_counts=True)
        worst = int(np.argmax(counts))
        if counts[worst] > self.degree + 1:
            raise ValueError(
                "knot multiplicity must not exceed degree + 1 "
                f"(value {values[worst]!r} occurs {int(counts[worst])} times)"
            )
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)

    @property
    def dimension(self) -> int:
        """Number of B-splines over this knot vector."""
        return self.knots.size - self.degree - 1

    @property
    def span(self) -> tuple[float, float]:
        return (float(self.knots[0]), float(self.knots[-1]))

    @property
    def is_open(self) -> bool:
        """True when both boundary knots have multiplicity degree + 1."""
        p1 = self.degree + 1
        k = self.knots
        return bool(k.size >= 2 * p1 and k[0] == k[p1 - 1] and k[-p1] == k[-1])

    def breakpoints(self) -> list[BreakpointRun]:
        values, counts = np.unique(self.knots, return_counts=True)
        return [
            BreakpointRun(float(v), int(c)) for v, c in zip(values, counts)
        ]

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnotVector):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(
            self.knots, other.knots
        )


@dataclass(frozen=True)
class Spline:
    """B-spline coefficients over a knot vector."""

    knots: KnotVector
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.ndim != 1:
            raise ValueError("coefficients must be a one-dimensional array of numbers")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite numbers")
        if coeffs.size != self.knots.dimension:
            raise ValueError(
                "coefficient count must equal len(knots) - degree - 1 "
                f"(expected {self.knots.dimension}, got {coeffs.size})"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return self.knots.degree

    def __call__(self, x):
        return evaluate(self, x)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "knots": [float(t) for t in self.knots.knots],
            "coefficients": [float(c) for c in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Spline":
        if not isinstance(data, dict):
            raise ValueError("spline document must be a JSON object")
        for key in ("degree", "knots", "coefficients"):
            if key not in data:
                raise ValueError(f"missing required field '{key}'")
        degree = data["degree"]
        if isinstance(degree, bool) or not isinstance(degree, int):
            raise ValueError("degree must be a nonnegative integer")
        for key in ("knots", "coefficients"):
            seq = data[key]
            if not isinstance(seq, (list, tuple)) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in seq
            ):
                raise ValueError(f"{key} must be an array of numbers")
        return cls(KnotVector(np.asarray(data["knots"], dtype=float), degree),
                   np.asarray(data["coefficients"], dtype=float))


def make_spline(degree: int, knots, coefficients) -> Spline:
    """Convenience constructor from plain sequences."""
    return Spline(
        KnotVector(np.asarray(knots, dtype=float), degree),
        np.asarray(coefficients, dtype=float),
    )


def uniform_open_knots(
    degree: int,
    num_breakpoints: int,
    interior_multiplicity: int = 1,
    start: float = 0.0,
    end: float = 1.0,
) -> KnotVector:
    """Open knot vector on uniform breakpoints.

    Breakpoints are start + (end-start)*j/(num_breakpoints-1), so equal
    parameters produce bitwise-equal knot values across calls.
    """
    if num_breakpoints < 2:
        raise ValueError("need at least 2 breakpoints")
    bps = start + (end - start) * (
        np.arange(num_breakpoints) / (num_breakpoints - 1)
    )
    mults = np.full(num_breakpoints, interior_multiplicity)
    mults[0] = mults[-1] = degree + 1
    return KnotVector(np.repeat(bps, mults), degree)


def bernstein_knots(degree: int, start: float = 0.0, end: float = 1.0) -> KnotVector:
    """Knot vector of a polynomial piece: (start^(p+1), end^(p+1))."""
    return uniform_open_knots(degree, 2, start=start, end=end)


def multiplicity(kv: KnotVector, value: float) -> int:
    """How many times `value` occurs in the knot vector (exact equality)."""
    return int(np.count_nonzero(kv.knots == value))


def make_open(s: Spline) -> Spline:
    """Equivalent spline on an open knot vector.

    Boundary knots are repeated up to multiplicity degree+1 and the new
    coefficients are zero; the spline is unchanged as a function on the
    original span.  Open input is returned unchanged.
    """
    kv = s.knots
    if kv.is_open:
        return s
    p = kv.degree
    pad_left = p + 1 - multiplicity(kv, kv.knots[0])
    pad_right = p + 1 - multiplicity(kv, kv.knots[-1])
    knots = np.concatenate(
        [np.full(pad_left, kv.knots[0]), kv.knots, np.full(pad_right, kv.knots[-1])]
    )
    coeffs = np.concatenate(
        [np.zeros(pad_left), s.coefficients, np.zeros(pad_right)]
    )
    return Spline(KnotVector(knots, p), coeffs)


def find_span(kv: KnotVector, x: float) -> int:
    """1-based index k of the nonempty interval [t_k, t_{k+1}) holding x.

    Satisfies degree+1 <= k <= dimension so the coefficient window
    c_{k-p..k} exists.  The right endpoint of the span is closed; at an
    interior knot the interval starting there is chosen (first nonempty
    interval at or to the right of x).
    """
    return find_span0(kv.knots, kv.degree, kv.dimension, float(x)) + 1


def evaluate(s: Spline, x):
    """Value of the spline at x (scalar or array).

    Implemented with the local de Boor kernel using the constant fine
    window (x, .., x).  Non-open knot vectors are normalized first so
    every point in the span has a full coefficient window.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not s.knots.is_open:
        s = make_open(s)
    kv = s.knots
    p = kv.degree
    lo, hi = kv.span
    if xs.size and (xs.min() < lo or xs.max() > hi):
        raise ValueError("evaluation point lies outside the knot span")
    spans = find_span0_many(kv.knots, p, kv.dimension, xs.ravel())
    flat = xs.ravel()
    out = np.empty(flat.shape)
    if flat.size == 0:
        pass
    elif p == 0:
        out[:] = s.coefficients[spans]
    else:
        order = np.argsort(spans, kind="stable")
        sorted_spans = spans[order]
        boundaries = np.flatnonzero(np.diff(sorted_spans)) + 1
        for group in np.split(order, boundaries):
            k0 = int(spans[group[0]])
            tau_win = kv.knots[k0 - p + 1 : k0 + p + 1]
            c_win = s.coefficients[k0 - p : k0 + 1]
            fine = np.repeat(flat[group][:, None], p, axis=1)
            out[group] = kernel_many(tau_win, c_win, fine)
    out = out.reshape(xs.shape)
    return float(out[0]) if scalar else out


def greville_abscissae(kv: KnotVector) -> np.ndarray:
    """Knot averages x_i = (t_{i+1} + .. + t_{i+p}) / p for i = 1..dimension."""
    p = kv.degree
    if p < 1:
        raise ValueError("degree must be at least 1 for Greville abscissae")
    if not kv.is_open:
        raise ValueError("knot vector must be open")
    n = kv.dimension
    windows = np.lib.stride_tricks.sliding_window_view(kv.knots[1 : n + p], p)
    return windows.mean(axis=1)


def _merge_breakpoints(
    kv1: KnotVector, kv2: KnotVector, tolerance: float
) -> list[tuple[float, int, int]]:
    """Sorted (value, mult in kv1, mult in kv2) with optional merging.

    With tolerance > 0, breakpoints within tolerance of the group start
    collapse onto the group's smallest value; per factor the merged
    multiplicity is the maximum over the group's members.
    """
    runs: dict[float, list[int]] = {}
    for which, kv in enumerate((kv1, kv2)):
        for run in kv.breakpoints():
            entry = runs.setdefault(run.value, [0, 0])
            entry[which] = max(entry[which], run.multiplicity)
    items = sorted(runs.items())
    if tolerance <= 0:
        return [(v, m[0], m[1]) for v, m in items]
    merged: list[tuple[float, int, int]] = []
    i = 0
    while i < len(items):
        v0, (m1, m2) = items[i]
        j = i + 1
        while j < len(items) and items[j][0] - v0 <= tolerance:
            m1 = max(m1, items[j][1][0])
            m2 = max(m2, items[j][1][1])
            j += 1
        merged.append((v0, m1, m2))
        i = j
    return merged


def product_knot_vector(
    kv1: KnotVector, kv2: KnotVector, tolerance: float = 0.0
) -> KnotVector:
    """Knot vector of degree p1+p2 containing all products of the two spaces.

    Breakpoints are the union of the factors' breakpoints.  An interior
    breakpoint appearing in both factors with multiplicities mu1, mu2 > 0
    gets multiplicity max(p1 + mu2, p2 + mu1); one appearing only in
    factor one gets p2 + mu1, only in factor two gets p1 + mu2.  Open
    boundaries come out at multiplicity p1+p2+1.
    """
    p1, p2 = kv1.degree, kv2.degree
    if p1 < 1 or p2 < 1:
        raise ValueError("degree must be at least 1 for product knot vectors")
    if not (kv1.is_open and kv2.is_open):
        raise ValueError("knot vectors must be open; normalize with make_open")
    if kv1.span != kv2.span:
        raise ValueError(
            "knot vectors must share the same span "
            f"(got {kv1.span} and {kv2.span})"
        )
    p = p1 + p2
    values = []
    mults = []
    for v, m1, m2 in _merge_breakpoints(kv1, kv2, tolerance):
        if m1 > 0 and m2 > 0:
            mu = max(p1 + m2, p2 + m1)
        elif m1 > 0:
            mu = p2 + m1
        else:
            mu = p1 + m2
        values.append(v)
        mults.append(min(mu, p + 1))
    knots = np.repeat(np.asarray(values), np.asarray(mults))
    return KnotVector(knots, p)
