"""Linear-graph machinery: the f recursion, roots, limits and perturbations."""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ppt import NoThresholdInBracket, critical_s

CRITICAL_LIMIT = 3.0 - 2.0 * math.sqrt(2.0)


class BoundSaturated(ValueError):
    """The Z-field relation has no solution: the prefactor already exceeds
    the unperturbed tanh, so the bound is saturated."""


def _chain_f_raw(n: int, s: float) -> float:
    prev, curr = 1.0, 1.0 - s
    for _ in range(n - 1):
        prev, curr = curr, (1.0 + s) * curr - 2.0 * s * prev
    return curr


def chain_f(n: int, s: float) -> float:
    """f^n(s) by iterating f^n = (1+s) f^{n-1} - 2s f^{n-2}.

    Seeded with f^1 = 1 - s and f^2 = 1 - 2s - s^2.
    """
    if n < 1:
        raise ValueError("chain length must be >= 1")
    if not 0.0 <= s < 1.0:
        raise ValueError("s must be in [0, 1)")
    return _chain_f_raw(n, s)


def chain_roots(s: float) -> tuple[complex, complex]:
    """Roots of r^2 - (1+s) r + 2s = 0; real iff 0 <= s <= 3 - 2*sqrt(2)."""
    if not 0.0 <= s < 1.0:
        raise ValueError("s must be in [0, 1)")
    disc = cmath.sqrt((1.0 + s) ** 2 - 8.0 * s)
    return ((1.0 + s) + disc) / 2.0, ((1.0 + s) - disc) / 2.0


def chain_critical_limit() -> float:
    """Thermodynamic-limit threshold 3 - 2*sqrt(2) (where the roots merge)."""
    return CRITICAL_LIMIT


def chain_critical_s(n: int, tol: float = 1e-12) -> float:
    """Smallest s with f^n(s) = 0; monotone non-increasing in n.

    f^n is positive on [0, 3-2*sqrt(2)] for every n and its first zero sits
    O(1/n^2) above that limit, where the sign oscillates on the same scale; a
    uniform grid over [0, 1] misses it for large n, so the scan is confined
    to a window just above the limit with resolution well under 1/n^2.
    """
    lo = max(0.0, CRITICAL_LIMIT - 1e-9)
    hi = min(1.0, CRITICAL_LIMIT + max(1e-3, 24.0 / n**2))
    return critical_s(lambda s: _chain_f_raw(n, s), bracket=(lo, hi), grid=512, tol=tol)


def chain_f_inhomogeneous(svals) -> float:
    """f(s_1 ... s_N) by the tail recursion

        f(s_k ...) = (1 + s_k) f(s_{k+1} ...) - 2 s_k f(s_{k+2} ...)

    with f() = 1 and f(s_N) = 1 - s_N; equals chain_f when all sites agree.
    """
    svals = list(svals)
    if any(not 0.0 <= s < 1.0 for s in svals):
        raise ValueError("every s must be in [0, 1)")
    after, last = 1.0, 1.0
    for s in reversed(svals):
        after, last = last, (1.0 + s) * last - 2.0 * s * after
    return last


@dataclass(frozen=True)
class PerturbationStats:
    """Critical T/Delta distribution over Gaussian coupling samples."""

    n: int
    sigma: float
    seed: int
    samples: tuple[float, ...]

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def std(self) -> float:
        return float(np.std(self.samples, ddof=1)) if len(self.samples) > 1 else 0.0

    @property
    def min(self) -> float:
        return float(np.min(self.samples))

    @property
    def max(self) -> float:
        return float(np.max(self.samples))


def draw_couplings(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    """Gaussian couplings centred on 1; nonpositive draws are redrawn."""
    deltas = rng.normal(1.0, sigma, size=n)
    while (bad := deltas <= 0).any():
        deltas[bad] = rng.normal(1.0, sigma, size=int(bad.sum()))
    return deltas


def critical_beta_for_couplings(deltas, beta_hi: float = 8.0) -> float:
    """Smallest beta with f(tanh(beta Delta_k / 2)) = 0, shared beta.

    The search bracket expands (up to a factor 64) when the weakest coupling
    pushes the root beyond the initial guess.
    """
    deltas = np.asarray(deltas, dtype=float)

    def evaluator(beta: float) -> float:
        return chain_f_inhomogeneous(np.tanh(beta * deltas / 2.0))

    hi = beta_hi
    while True:
        try:
            return critical_s(evaluator, bracket=(0.0, hi))
        except NoThresholdInBracket:
            hi *= 4.0
            if hi > 64.0 * beta_hi:
                raise


def perturbation_scan(
    n: int, sigma: float, samples: int, seed: int, threads: int = 1
) -> PerturbationStats:
    """Critical T/Delta for `samples` Gaussian draws of the couplings.

    The root is searched in shared-beta space (each site sees its own
    s_k = tanh(beta Delta_k / 2)); the reported temperature uses the
    distribution centre Delta = 1.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    draws = [draw_couplings(rng, n, sigma) for _ in range(samples)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            betas = list(pool.map(critical_beta_for_couplings, draws))
    else:
        betas = [critical_beta_for_couplings(d) for d in draws]
    return PerturbationStats(n, sigma, seed, tuple(1.0 / b for b in betas))


def zfield_effective_beta(
    beta0_delta: float, delta_over_delta: float, tol: float = 1e-12
) -> float:
    """beta_delta solving

        (Delta/sqrt(Delta^2+delta^2)) tanh(beta sqrt(Delta^2+delta^2)/2)
            = tanh(beta_0 Delta / 2)

    by bisection; an upper bound on the true critical beta under a Z field.
    """
    if beta0_delta <= 0:
        raise ValueError("beta_0 Delta must be positive")
    u = math.sqrt(1.0 + delta_over_delta**2)
    target = math.tanh(beta0_delta / 2.0)
    if target >= 1.0 / u:
        raise BoundSaturated(
            f"tanh(beta_0 Delta/2) = {target:.6f} >= 1/sqrt(1+(delta/Delta)^2)"
        )

    def lhs(beta: float) -> float:
        return math.tanh(beta * u / 2.0) / u

    hi = max(beta0_delta, 1.0)
    while lhs(hi) < target:
        hi *= 2.0
        if hi > 1e9:
            raise BoundSaturated("no finite solution found")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lhs(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def zfield_temperature_ratio(delta_over_delta: float) -> float:
    """T_delta / T_0 for the infinite chain (unperturbed threshold 3-2*sqrt(2))."""
    beta0 = 2.0 * math.atanh(CRITICAL_LIMIT)
    return beta0 / zfield_effective_beta(beta0, delta_over_delta)
