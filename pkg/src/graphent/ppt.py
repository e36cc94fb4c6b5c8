"""Partial-transpose spectra, fast evaluators, thresholds and the Ising map.

The central quantity is f_{x,z} = sum_y (-1)^{x.y} s_y (-1)^{ecp(y,z)}; the
actual eigenvalue of rho^PT carries an extra 1/2^N which every function here
deliberately omits.  All reductions run in fixed index order with pairwise
trees so results are bit-identical across runs and thread counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gf2
from .bits import all_indices, fwht, pairwise_sum, parities, popcounts, weight
from .graphs import (
    Graph,
    NotTwoColourable,
    cross_edges,
    drop_same_side_edges,
    two_colouring,
)
from .states import DiagonalState

DIRECT_LIMIT = 30
SPECTRUM_LIMIT = 26
BRUTE_LIMIT = 14
ISING_CHECK_LIMIT = 20
_CHUNK = 1 << 22


class NoThresholdInBracket(ValueError):
    pass


def _validate_bipartition(n: int, z: int):
    if z <= 0 or z >> n or z == (1 << n) - 1:
        raise ValueError(f"bipartition {z:#b} is trivial for n={n}")


def _cross_sign_chunk(g: Graph, z: int, ys: np.ndarray) -> np.ndarray:
    """(-1)^{ecp(y, z)} for a chunk of y values."""
    acc = np.zeros(ys.size, dtype=np.uint64)
    for i, j in cross_edges(g, z):
        acc ^= (ys >> np.uint64(i)) & (ys >> np.uint64(j)) & np.uint64(1)
    return 1.0 - 2.0 * acc.astype(np.float64)


def pt_eigenvalue_from_table(g: Graph, coeff_for, x: int, z: int) -> float:
    """Direct sum over all y in index order, chunked pairwise reduction.

    `coeff_for` maps an index array to s_y values, so callers can evaluate
    models that the DiagonalState validity rules exclude (e.g. s = 1).
    """
    n = g.n
    if n > DIRECT_LIMIT:
        raise ValueError(f"direct evaluator limited to n <= {DIRECT_LIMIT}")
    partials = []
    for start in range(0, 1 << n, _CHUNK):
        ys = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.uint64)
        signs = 1.0 - 2.0 * parities(ys & np.uint64(x))
        terms = coeff_for(ys) * signs * _cross_sign_chunk(g, z, ys)
        partials.append(pairwise_sum(terms))
    return pairwise_sum(np.asarray(partials))


def pt_eigenvalue(st: DiagonalState, x: int, z: int) -> float:
    """f_{x,z} for a nontrivial bipartition (eigenvalue of rho^PT times 2^N)."""
    _validate_bipartition(st.n, z)
    return pt_eigenvalue_from_table(st.graph, st.coefficients_for, x, z)


def pt_spectrum(st: DiagonalState, z: int) -> np.ndarray:
    """All 2^N values f_{x,z} at once via the fast Walsh-Hadamard transform."""
    n = st.n
    if n > SPECTRUM_LIMIT:
        raise ValueError(f"spectrum limited to n <= {SPECTRUM_LIMIT}")
    _validate_bipartition(n, z)
    ys = all_indices(n)
    return fwht(st.coefficients_for(ys) * _cross_sign_chunk(st.graph, z, ys))


@dataclass(frozen=True)
class ColourSplit:
    """Smaller colour class A of a two-colourable graph, with each B vertex's
    neighbourhood re-indexed into A bit positions."""

    n_a: int
    n_b: int
    b_masks: tuple[int, ...]
    colouring: int


def colour_split(g: Graph) -> ColourSplit:
    colouring = two_colouring(g)
    class1 = [v for v in range(g.n) if colouring >> v & 1]
    class0 = [v for v in range(g.n) if not colouring >> v & 1]
    if len(class1) < len(class0):
        side_a, side_b = class1, class0
    else:
        side_a, side_b = class0, class1
    a_pos = {v: i for i, v in enumerate(side_a)}
    b_masks = tuple(
        sum(1 << a_pos[u] for u in range(g.n) if g.adjacency[b] >> u & 1)
        for b in side_b
    )
    return ColourSplit(len(side_a), len(side_b), b_masks, colouring)


def _bipartite_partial(split: ColourSplit, s: float, lo: int, hi: int) -> float:
    xs = np.arange(lo, hi, dtype=np.uint64)
    w_m = np.zeros(xs.size, dtype=np.int64)
    for mask in split.b_masks:
        w_m += parities(xs & np.uint64(mask))
    terms = (
        np.power(-s, popcounts(xs))
        * np.power(1.0 + s, w_m)
        * np.power(1.0 - s, split.n_b - w_m)
    )
    return pairwise_sum(terms)


def evaluate_colour_split(split: ColourSplit, s: float, threads: int = 1) -> float:
    """The bipartite f sum for a prepared colour split."""
    if split.n_a > 30:
        raise ValueError("smaller colour class exceeds 30 vertices")
    size = 1 << split.n_a
    bounds = [(lo, min(lo + _CHUNK, size)) for lo in range(0, size, _CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(lambda b: _bipartite_partial(split, s, *b), bounds))
    else:
        partials = [_bipartite_partial(split, s, lo, hi) for lo, hi in bounds]
    return pairwise_sum(np.asarray(partials))


def fast_bipartite_f(
    g: Graph, s: float, coset_grouping: bool = False, threads: int = 1
) -> float:
    """f(s) for a two-colourable graph by summing over the smaller colour class:

        f(s) = sum_x (-s)^{w_x} (1+s)^{w_{x.A}} (1-s)^{N_B - w_{x.A}}

    with x over {0,1}^{N_A} and w_{x.A} the weight of the mod-2 matrix-vector
    product into the larger class.  Empty graphs give 1.
    """
    if g.n == 0:
        return 1.0
    split = colour_split(g)
    if coset_grouping:
        if split.n_a > 30:
            raise ValueError("smaller colour class exceeds 30 vertices")
        return _coset_grouped_f(split, s)
    return evaluate_colour_split(split, s, threads=threads)


def _coset_grouped_f(split: ColourSplit, s: float) -> float:
    """Group the bipartite sum by cosets of {x : x.A = 0}.

    Within a coset the (1 +/- s) powers are constant, so they are factored out
    and only the (-s)^{w_x} enumerator runs over the coset.  Equivalent to the
    naive sum; kept behind a flag per the evaluation-order contract.
    """
    rows = list(split.b_masks)
    red, _, pivots = gf2.rref(rows, split.n_a)
    basis = gf2.nullspace_from_rref(red, split.n_a, pivots)
    coset_elems = np.zeros(1 << len(basis), dtype=np.uint64)
    for i, vec in enumerate(basis):
        size = 1 << i
        coset_elems[size : 2 * size] = coset_elems[:size] ^ np.uint64(vec)
    partials = []
    for bits in range(1 << len(pivots)):
        rep = 0
        for i, col in enumerate(pivots):
            if bits >> i & 1:
                rep |= 1 << col
        w_m = sum((rep & mask).bit_count() & 1 for mask in split.b_masks)
        xs = coset_elems ^ np.uint64(rep)
        enumerator = pairwise_sum(np.power(-s, popcounts(xs)))
        partials.append(
            (1.0 + s) ** w_m * (1.0 - s) ** (split.n_b - w_m) * enumerator
        )
    return pairwise_sum(np.asarray(partials))


def fast_f_for_bipartition(g: Graph, z: int, s: float) -> float:
    """f_{all-ones, z}(s) for a thermal state on any graph.

    Edges internal to either side of z are dropped first (they never enter the
    crossing parity and local controlled-phases cannot change PT spectra),
    which leaves a graph that is two-colourable with colouring z.
    """
    _validate_bipartition(g.n, z)
    return fast_bipartite_f(drop_same_side_edges(g, z), s)


def critical_s(
    evaluator,
    bracket: tuple[float, float] = (0.0, 1.0),
    grid: int = 256,
    tol: float = 1e-12,
) -> float:
    """Smallest root of `evaluator` in `bracket` via grid scan plus bisection.

    The evaluator must be positive at the lower edge; raises
    NoThresholdInBracket when no sign change is found on the grid.
    """
    lo, hi = bracket
    values = [evaluator(lo + (hi - lo) * k / grid) for k in range(grid + 1)]
    if values[0] <= 0:
        raise NoThresholdInBracket(f"evaluator not positive at s = {lo}")
    pair = next(
        (k for k in range(grid) if values[k] > 0 >= values[k + 1]),
        None,
    )
    if pair is None:
        raise NoThresholdInBracket(f"no threshold in bracket [{lo}, {hi}]")
    a = lo + (hi - lo) * pair / grid
    b = lo + (hi - lo) * (pair + 1) / grid
    while b - a > tol:
        mid = 0.5 * (a + b)
        if evaluator(mid) > 0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


@dataclass(frozen=True)
class WitnessLabels:
    """Optimal (x, z) for a thermal state; unresolved when the graph has an
    odd cycle (no colour-class bipartition exists and no optimum is claimed)."""

    x: int
    z: int | None
    resolved: bool


def optimal_thermal_witness_labels(g: Graph) -> WitnessLabels:
    x = (1 << g.n) - 1
    try:
        return WitnessLabels(x, two_colouring(g), True)
    except NotTwoColourable:
        return WitnessLabels(x, None, resolved=False)


def thermal_threshold(g: Graph, tol: float = 1e-12) -> float:
    """Smallest s > 0 at which some PT eigenvalue of the thermal state hits 0.

    Two-colourable graphs use the proven-optimal labels (all-ones x, colour
    classes z); otherwise every canonical bipartition is scanned through the
    same-side edge reduction.
    """
    try:
        two_colouring(g)
        return critical_s(lambda s: fast_bipartite_f(g, s), tol=tol)
    except NotTwoColourable:
        def min_over_z(s: float) -> float:
            return min(
                fast_f_for_bipartition(g, z, s) for z in canonical_bipartitions(g.n)
            )

        return critical_s(min_over_z, tol=tol)


def canonical_bipartitions(n: int):
    """Nontrivial bipartitions with bit 0 fixed to 0 (complement symmetry)."""
    return range(2, 1 << n, 2)


def _brute_chunk(st: DiagonalState, table: np.ndarray, zs) -> tuple[float, int, int]:
    best = (math.inf, -1, -1)
    ys = all_indices(st.n)
    for z in zs:
        spectrum = fwht(table * _cross_sign_chunk(st.graph, z, ys))
        x = int(np.argmin(spectrum))
        value = float(spectrum[x])
        if value < best[0]:
            best = (value, z, x)
    return best


def brute_min_over_xz(st: DiagonalState, threads: int = 1) -> tuple[int, int, float]:
    """Global minimum of f_{x,z} over canonical z and all x.

    Ties resolve to the smallest canonical z, then the smallest x (scan order).
    Returns (x, z, value).
    """
    n = st.n
    if n > BRUTE_LIMIT:
        raise ValueError(f"brute minimisation limited to n <= {BRUTE_LIMIT}")
    if n < 2:
        raise ValueError("no nontrivial bipartition exists")
    table = st.coefficient_table()
    zs = list(canonical_bipartitions(n))
    if threads > 1:
        chunks = [zs[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _brute_chunk(st, table, c), chunks))
    else:
        results = [_brute_chunk(st, table, zs)]
    value, z, x = min(results, key=lambda r: (r[0], r[1], r[2]))
    return x, z, value


@dataclass(frozen=True)
class IsingParameters:
    """Complex couplings reproducing f(s) as a classical partition function."""

    beta_j: complex
    beta_k: complex
    beta_h: tuple[complex, ...]


def ising_parameters(g: Graph, s: float) -> IsingParameters:
    if s <= 0:
        raise ValueError("s must be positive (ln(-s) taken on the principal branch)")
    log_minus_s = math.log(s) + 1j * math.pi
    beta_j = 1j * math.pi / 4
    beta_k = g.n / 2 * log_minus_s + 1j * math.pi * g.edge_count / 4
    beta_h = tuple(
        0.5 * log_minus_s + 1j * math.pi * g.degree(v) / 4 for v in range(g.n)
    )
    return IsingParameters(beta_j, beta_k, beta_h)


def thermal_f_all_edges(g: Graph, s: float) -> float:
    """f(s) = sum_y (-s)^{w_y} (-1)^{#edges inside supp(y)} for any graph."""
    if g.n > ISING_CHECK_LIMIT:
        raise ValueError(f"enumeration limited to n <= {ISING_CHECK_LIMIT}")
    ys = all_indices(g.n)
    acc = np.zeros(ys.size, dtype=np.uint64)
    for i, j in g.edges:
        acc ^= (ys >> np.uint64(i)) & (ys >> np.uint64(j)) & np.uint64(1)
    signs = 1.0 - 2.0 * acc.astype(np.float64)
    return pairwise_sum(np.power(-s, popcounts(ys)) * signs)


def ising_partition_check(g: Graph, s: float) -> tuple[complex, float]:
    """Brute-force Z over spin configurations, and the matching f(s).

    |Z - f(s)| <= 1e-8 max(1, |f|) is the contract the tests enforce.
    """
    if g.n > ISING_CHECK_LIMIT:
        raise ValueError(f"spin enumeration limited to n <= {ISING_CHECK_LIMIT}")
    params = ising_parameters(g, s)
    ys = all_indices(g.n)
    spins = [
        2.0 * (ys >> np.uint64(v) & np.uint64(1)).astype(np.float64) - 1.0
        for v in range(g.n)
    ]
    exponent = np.full(ys.size, params.beta_k, dtype=complex)
    for v in range(g.n):
        exponent += params.beta_h[v] * spins[v]
    for i, j in g.edges:
        exponent += params.beta_j * spins[i] * spins[j]
    z_value = complex(np.sum(np.exp(exponent)))
    return z_value, thermal_f_all_edges(g, s)
