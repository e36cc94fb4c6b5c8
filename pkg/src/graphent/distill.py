"""The P1/P2 distillation recurrence and its reduced 4-parameter dynamics.

Diagonal coefficients are indexed x = (muA << n_b) | muB over the two colour
classes.  P1 convolves over the B half, P2 over the A half; both renormalise
to unit sum, which only fixes the overall scale the attractor analysis
ignores anyway.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import fwht

FULL_TABLE_LIMIT = 16
DEFAULT_MAX_ITER = 10**4


def _xor_autocorrelation(row: np.ndarray) -> np.ndarray:
    """c[m] = sum_v row[v] row[v^m] via the Walsh transform."""
    spectrum = fwht(row)
    return fwht(spectrum * spectrum) / row.size


def p1_step(table: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
    """lambda'_{muA,muB} = sum_{nuB} lambda_{muA,nuB} lambda_{muA,nuB^muB}."""
    if n_a + n_b > FULL_TABLE_LIMIT:
        raise ValueError(f"full table limited to n <= {FULL_TABLE_LIMIT}")
    grid = np.asarray(table, dtype=np.float64).reshape(1 << n_a, 1 << n_b)
    out = np.stack([_xor_autocorrelation(row) for row in grid])
    return (out / out.sum()).reshape(-1)


def p2_step(table: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
    """Same convolution over the A half."""
    if n_a + n_b > FULL_TABLE_LIMIT:
        raise ValueError(f"full table limited to n <= {FULL_TABLE_LIMIT}")
    grid = np.asarray(table, dtype=np.float64).reshape(1 << n_a, 1 << n_b)
    out = np.stack([_xor_autocorrelation(col) for col in grid.T], axis=1)
    return (out / out.sum()).reshape(-1)


@dataclass(frozen=True)
class ReducedCoeffs:
    """Structured diagonal: one value each for (0,0), (muA,0), (0,muB) and
    (muA,muB) index classes, normalised to unit total weight."""

    l00: float
    lx0: float
    l0x: float
    lxx: float
    n_a: int
    n_b: int

    def __post_init__(self):
        vals = (self.l00, self.lx0, self.l0x, self.lxx)
        if any(v < -1e-12 for v in vals):
            raise ValueError("coefficients must be nonnegative")
        if self.l00 + 1e-9 < max(vals):
            raise ValueError("l00 must dominate the other coefficients")
        if abs(self.total() - 1.0) > 1e-9:
            raise ValueError(f"normalisation violated: total = {self.total()}")

    def total(self) -> float:
        two_a, two_b = 1 << self.n_a, 1 << self.n_b
        return (
            self.l00
            + (two_a - 1) * self.lx0
            + (two_b - 1) * self.l0x
            + (two_a * two_b - two_a - two_b + 1) * self.lxx
        )

    def to_table(self) -> np.ndarray:
        two_a, two_b = 1 << self.n_a, 1 << self.n_b
        grid = np.full((two_a, two_b), self.lxx)
        grid[0, :] = self.l0x
        grid[:, 0] = self.lx0
        grid[0, 0] = self.l00
        return grid.reshape(-1)

    @classmethod
    def from_table(cls, table: np.ndarray, n_a: int, n_b: int) -> "ReducedCoeffs":
        grid = np.asarray(table, dtype=np.float64).reshape(1 << n_a, 1 << n_b)
        l0x = float(grid[0, 1]) if n_b else 0.0
        lx0 = float(grid[1, 0]) if n_a else 0.0
        lxx = float(grid[1, 1]) if n_a and n_b else 0.0
        if not (
            np.allclose(grid[0, 1:], l0x, atol=1e-10)
            and np.allclose(grid[1:, 0], lx0, atol=1e-10)
            and np.allclose(grid[1:, 1:], lxx, atol=1e-10)
        ):
            raise ValueError("table is not structured")
        return cls(float(grid[0, 0]), lx0, l0x, lxx, n_a, n_b)


def reduced_step(c: ReducedCoeffs) -> ReducedCoeffs:
    """One P1-then-P2 round in closed form, renormalised.

    Derived by composing the two convolutions on a structured table; matches
    p2_step(p1_step(...)) to machine precision.
    """
    two_a, two_b = 1 << c.n_a, 1 << c.n_b
    a1 = c.l00**2 + (two_b - 1) * c.l0x**2
    b1 = 2 * c.l00 * c.l0x + (two_b - 2) * c.l0x**2
    c1 = c.lx0**2 + (two_b - 1) * c.lxx**2
    d1 = 2 * c.lx0 * c.lxx + (two_b - 2) * c.lxx**2
    a2 = a1**2 + (two_a - 1) * c1**2
    b2 = b1**2 + (two_a - 1) * d1**2
    c2 = 2 * a1 * c1 + (two_a - 2) * c1**2
    d2 = 2 * b1 * d1 + (two_a - 2) * d1**2
    norm = (
        a2
        + (two_a - 1) * c2
        + (two_b - 1) * b2
        + (two_a * two_b - two_a - two_b + 1) * d2
    )
    return ReducedCoeffs(a2 / norm, c2 / norm, b2 / norm, d2 / norm, c.n_a, c.n_b)


def global_depolarised_reduced(n_a: int, n_b: int, alpha: float) -> ReducedCoeffs:
    """Initial structured coefficients of (1 + alpha |psi><psi|)/(2^N + alpha)."""
    dim = float(1 << (n_a + n_b))
    background = 1.0 / (dim + alpha)
    return ReducedCoeffs(
        (1.0 + alpha) / (dim + alpha), background, background, background, n_a, n_b
    )


@dataclass(frozen=True)
class AttractorResult:
    kind: str  # "pure" | "mixed" | "undecided"
    iterations: int
    final: ReducedCoeffs


def classify_attractor(
    c: ReducedCoeffs, max_iter: int = DEFAULT_MAX_ITER, tol: float = 1e-9
) -> AttractorResult:
    """Iterate the reduced map until it settles on a fixed point.

    Pure means l00 -> 1; mixed means the table flattens to 1/2^N everywhere.
    Hitting the iteration cap without either is flagged undecided.
    """
    uniform = 1.0 / (1 << (c.n_a + c.n_b))
    for it in range(1, max_iter + 1):
        c = reduced_step(c)
        if c.l00 > 1.0 - tol:
            return AttractorResult("pure", it, c)
        if max(
            abs(c.l00 - uniform),
            abs(c.lx0 - uniform),
            abs(c.l0x - uniform),
            abs(c.lxx - uniform),
        ) < tol:
            return AttractorResult("mixed", it, c)
    return AttractorResult("undecided", max_iter, c)


def verify_distillable(
    n_a: int, n_b: int, alpha: float, max_iter: int = DEFAULT_MAX_ITER
) -> AttractorResult:
    return classify_attractor(global_depolarised_reduced(n_a, n_b, alpha), max_iter)


def distillability_threshold(n_a: int, n_b: int) -> float:
    """alpha above which P1/P2 distils the globally depolarised state: 2^{N/2}."""
    if n_a != n_b:
        raise ValueError("threshold formula requires the balanced split N_A = N/2")
    return float(1 << n_a)


def locate_flip(n_a: int, n_b: int, tol: float = 1e-6) -> float:
    """Bisect the pure/mixed attractor boundary in alpha."""
    lo, hi = 0.0, 4.0 * (1 << (n_a + n_b))
    if verify_distillable(n_a, n_b, hi).kind != "pure":
        raise RuntimeError("upper bracket does not distil")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if verify_distillable(n_a, n_b, mid).kind == "pure":
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
