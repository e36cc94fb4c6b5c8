"""Explicit separable decompositions and their positivity reports.

A decomposition writes 2^N rho as  identity_coefficient * 1  plus terms
coeff * prod_u (1 + sign_u K_u), where the blocks u of one term are mutually
compatible stabilizer supports (they admit a common product eigenbasis), so
every term with a nonnegative coefficient is a separable operator.  The
module provides

  * the closed-form tree construction (coefficient s^{w_y} f(subgraph)),
  * the general bookkeeping construction for any graph-diagonal state on a
    two-colourable graph, driven by Eulerian edge cuts,
  * the star-graph construction and its twisted-basis refinement for the
    three-qubit counterexample family.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import gf2
from .bits import fwht, weight
from .graphs import (
    Graph,
    NotTwoColourable,
    connected_components,
    induced_subgraph,
    is_tree,
    star,
    two_colouring,
)
from .ppt import fast_bipartite_f
from .states import DiagonalState, Explicit, Thermal

DECOMP_LIMIT = 14
TREE_LIMIT = 20
STAR_LIMIT = 16
SQRT2 = math.sqrt(2.0)


class DecompositionSignError(RuntimeError):
    """A block refinement whose factor signs cannot reproduce +K_x; the
    construction is not defined for such sign patterns."""


def basic_blocks(g: Graph, y: int) -> list[int]:
    """Connected components of the induced subgraph on supp(y), as masks.

    These are the unique maximal pairwise-non-adjacent connected pieces; on a
    chain they are the runs of consecutive 1s.
    """
    if y < 0 or y >> g.n:
        raise ValueError("y does not match the graph")
    if y == 0:
        return []
    return connected_components(g, within=y)


def h_sign(g: Graph, x: int) -> int:
    """(-1)^{w_x + #edges inside supp(x)}."""
    edges_inside = sum(1 for i, j in g.edges if x >> i & 1 and x >> j & 1)
    return -1 if (weight(x) + edges_inside) & 1 else 1


def site_operators(g: Graph, u: int) -> tuple[int, int]:
    """(x-part, z-part) masks of K_u: site v carries X^{u_v} Z^{(A.u)_v}."""
    zpart = 0
    for v in range(g.n):
        if (g.adjacency[v] & u).bit_count() & 1:
            zpart |= 1 << v
    return u, zpart


def blocks_compatible(g: Graph, a: int, b: int) -> bool:
    """Sitewise agreement-or-identity between K_a and K_b."""
    xa, za = site_operators(g, a)
    xb, zb = site_operators(g, b)
    both = (xa | za) & (xb | zb)
    return not ((xa ^ xb) & both) and not ((za ^ zb) & both)


def _bit_reversed(y: int, n: int) -> int:
    out = 0
    for i in range(n):
        out |= (y >> i & 1) << (n - 1 - i)
    return out


def eulerian_edge_cut(g: Graph) -> tuple[int, int] | None:
    """Partition (V1, V2) of a connected two-colourable graph with
    |E| + |V| even such that every cross-degree is even; None when the
    preconditions fail.

    The condition is the GF(2) system (A + diag(deg mod 2)) y = 0 on the V2
    indicator y; the all-ones vector always solves it, so a valid cut needs a
    second nullspace dimension, which such graphs always have.  Among all
    valid cuts the lexicographically smallest V2 indicator string is
    returned.
    """
    try:
        two_colouring(g)
    except NotTwoColourable:
        return None
    if (g.n + g.edge_count) & 1 or len(connected_components(g)) != 1:
        return None
    rows = [g.adjacency[v] | (g.degree(v) & 1) << v for v in range(g.n)]
    basis = gf2.nullspace(rows, g.n)
    if len(basis) < 2:
        raise RuntimeError("guaranteed Eulerian edge cut not found")
    elems = np.zeros(1 << len(basis), dtype=np.uint64)
    for i, vec in enumerate(basis):
        size = 1 << i
        elems[size : 2 * size] = elems[:size] ^ np.uint64(vec)
    full = (1 << g.n) - 1
    candidates = [int(v) for v in elems if v not in (0, full)]
    v2 = min(candidates, key=lambda y: _bit_reversed(y, g.n))
    for v in range(g.n):
        cross = g.adjacency[v] & (v2 if not v2 >> v & 1 else full ^ v2)
        if cross.bit_count() & 1:
            raise RuntimeError("cut candidate violates even cross-degree")
    return full ^ v2, v2


def _cut_within(g: Graph, u: int) -> tuple[int, int] | None:
    """Eulerian edge cut of the induced subgraph on u, in original labels."""
    sub, relabel = induced_subgraph(g, u)
    cut = eulerian_edge_cut(sub)
    if cut is None:
        return None
    back = {new: old for old, new in relabel.items()}
    v2 = sum(1 << back[i] for i in range(sub.n) if cut[1] >> i & 1)
    return u ^ v2, v2


def refine_blocks(g: Graph, y: int) -> list[int]:
    """Maximal compatible block set for K_y.

    Starts from the connected components of supp(y) and repeatedly splits a
    block (component split first, then an Eulerian cut when the block is
    connected with h = +1), accepting a split only if the refined set stays
    pairwise compatible.  Deterministic: blocks are kept sorted and the first
    admissible split wins.
    """
    parts = sorted(basic_blocks(g, y))
    splits = 0
    progress = True
    while progress:
        progress = False
        for idx, u in enumerate(parts):
            others = parts[:idx] + parts[idx + 1 :]
            for pair in _split_candidates(g, u):
                trial = [p for p in pair if p]
                if all(
                    blocks_compatible(g, a, b)
                    for k, a in enumerate(trial)
                    for b in trial[k + 1 :] + others
                ):
                    parts = sorted(others + trial)
                    splits += 1
                    if splits > g.n:
                        raise RuntimeError("block refinement exceeded depth n")
                    progress = True
                    break
            if progress:
                break
    return parts


def _split_candidates(g: Graph, u: int):
    comps = connected_components(g, within=u)
    if len(comps) > 1:
        for a in sorted(comps):
            yield a, u ^ a
        return
    if h_sign(g, u) == 1 and weight(u) > 1:
        cut = _cut_within(g, u)
        if cut is not None:
            yield cut[1], cut[0]


@dataclass(frozen=True)
class Term:
    """coefficient * product of factors; factors are ("stab", mask, sign)
    for 1 + sign K_mask, ("dense", matrix), or ("sum", ((coeff, mask), ...))
    for an explicit stabilizer combination."""

    coefficient: float
    factors: tuple
    label: int | None = None


@dataclass(frozen=True)
class Decomposition:
    graph: Graph
    terms: tuple[Term, ...]
    identity_coefficient: float

    def coefficients(self) -> np.ndarray:
        return np.array(
            [self.identity_coefficient] + [t.coefficient for t in self.terms]
        )

    def min_coefficient(self) -> float:
        return float(self.coefficients().min())

    def min_term_coefficient(self) -> float:
        """Smallest non-identity coefficient (inf if there are no terms)."""
        if not self.terms:
            return math.inf
        return float(min(t.coefficient for t in self.terms))

    def positivity_tolerance(self) -> float:
        return 1e-9 * float(np.abs(self.coefficients()).sum())

    def is_separable(self) -> bool:
        """All coefficients nonnegative up to accumulated-rounding tolerance."""
        return self.min_coefficient() >= -self.positivity_tolerance()

    def to_json(self) -> str:
        n = self.graph.n
        items = []
        for t in self.terms:
            entry: dict = {"coefficient": t.coefficient, "blocks": [], "signs": []}
            for f in t.factors:
                if f[0] == "stab":
                    entry["blocks"].append(_mask_str(f[1], n))
                    entry["signs"].append(f[2])
                elif f[0] == "sum":
                    entry["sum"] = [[c, _mask_str(m, n)] for c, m in f[1]]
                else:
                    entry["dense"] = True
            items.append(entry)
        return json.dumps(
            {"identity_coefficient": self.identity_coefficient, "terms": items},
            indent=1,
        )


def _mask_str(mask: int, n: int) -> str:
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def _factor_signs(g: Graph, blocks: list[int]) -> list[int]:
    """Signs sigma_u for the term prod_u (1 + sigma_u K_u) extracting +K_y.

    Writing t_u = sigma_u h_u, the coefficient pushed back onto the identity
    telescopes to h_y exactly when the number of t_u = -1 factors has the
    parity of prod_u h_u (and is nonzero); the same condition makes the K_y
    expansion coefficient +1.  The default sigma_u = -h_u (all t_u = -1)
    satisfies it unless an odd number of blocks carries h = +1, in which case
    the first such block keeps sigma = +1 instead.
    """
    signs = [-h_sign(g, u) for u in blocks]
    top = 1
    for sg in signs:
        top *= sg
    if top != 1:
        flip = next(
            (i for i, u in enumerate(blocks) if h_sign(g, u) == 1), None
        )
        if flip is None:
            raise DecompositionSignError(
                f"no sign assignment extracts +K for blocks {blocks}"
            )
        signs[flip] = 1
    return signs


def diagonal_decomposition(st: DiagonalState) -> Decomposition:
    """Block decomposition of any graph-diagonal state on a two-colourable graph.

    Works from the highest-weight strings down, replacing each K_y with its
    refined block product prod_u (1 + sigma_u K_u) and pushing the expansion
    remainders back into the coefficient pool.  The final identity pool entry
    equals sum_y h_y s_y, which for thermal states is f(s).
    """
    g, n = st.graph, st.n
    if n > DECOMP_LIMIT:
        raise ValueError(f"full bookkeeping limited to n <= {DECOMP_LIMIT}")
    two_colouring(g)  # raises with an odd-cycle witness otherwise
    pool = st.coefficient_table().astype(np.float64).copy()
    terms = []
    for y in sorted(range(1, 1 << n), key=lambda v: (-weight(v), v)):
        blocks = refine_blocks(g, y)
        signs = _factor_signs(g, blocks)
        coeff = float(pool[y])
        # every proper subset S of the blocks contributes coeff * prod(signs_S) K_{xor S}
        for smask in range((1 << len(blocks)) - 1):
            sub, sign = 0, 1
            for i, u in enumerate(blocks):
                if smask >> i & 1:
                    sub ^= u
                    sign *= signs[i]
            pool[sub] -= coeff * sign
        pool[y] = 0.0
        terms.append(
            Term(coeff, tuple(("stab", u, sg) for u, sg in zip(blocks, signs)), y)
        )
    return Decomposition(g, tuple(terms), float(pool[0]))


def _remaining_mask(g: Graph, y: int) -> int:
    """Vertices outside the closed neighbourhood of supp(y)."""
    return ((1 << g.n) - 1) & ~(y | g.neighbours_of_set(y))


def _subgraph_f(g: Graph, mask: int, s: float) -> float:
    if mask == 0:
        return 1.0
    sub, _ = induced_subgraph(g, mask)
    return fast_bipartite_f(sub, s)


def tree_decomposition(g: Graph, s: float) -> Decomposition:
    """Closed-form thermal decomposition of a tree.

    Term y carries the blocks of y with all-plus signs and coefficient
    s^{w_y} f(s) over the graph with the closed neighbourhood of supp(y)
    removed; the y = 0 coefficient is f(s) itself.
    """
    if not is_tree(g):
        raise ValueError("graph is not a tree")
    if g.n > TREE_LIMIT:
        raise ValueError(f"tree enumeration limited to n <= {TREE_LIMIT}")
    if not 0.0 <= s < 1.0:
        raise ValueError("s must be in [0, 1)")
    f_cache: dict[int, float] = {}
    terms = []
    for y in range(1, 1 << g.n):
        rest = _remaining_mask(g, y)
        if rest not in f_cache:
            f_cache[rest] = _subgraph_f(g, rest, s)
        coeff = s ** weight(y) * f_cache[rest]
        terms.append(
            Term(coeff, tuple(("stab", u, 1) for u in basic_blocks(g, y)), y)
        )
    return Decomposition(g, tuple(terms), fast_bipartite_f(g, s))


def two_colourable_decomposition(g: Graph, s: float) -> Decomposition:
    """Thermal-state decomposition for a general two-colourable graph.

    The identity coefficient is checked against f(s) before returning;
    positivity of the other coefficients is reported, not asserted.
    """
    decomp = diagonal_decomposition(DiagonalState(g, Thermal(s)))
    expected = fast_bipartite_f(g, s)
    if abs(decomp.identity_coefficient - expected) > 1e-9 * max(1.0, abs(expected)):
        raise RuntimeError(
            f"identity coefficient {decomp.identity_coefficient} != f(s) {expected}"
        )
    return decomp


@dataclass(frozen=True)
class TreeProfile:
    """Reusable structure for sweeping a tree's coefficients over s.

    The colour split of every distinct residual subgraph is prepared once so
    repeated evaluations (threshold bisections) stay cheap.
    """

    graph: Graph
    weights: np.ndarray
    rest_index: np.ndarray
    rest_splits: tuple


def tree_profile(g: Graph) -> TreeProfile:
    from .ppt import colour_split

    if not is_tree(g):
        raise ValueError("graph is not a tree")
    rests: dict[int, int] = {}
    weights = np.zeros(1 << g.n, dtype=np.int64)
    index = np.zeros(1 << g.n, dtype=np.int64)
    for y in range(1 << g.n):
        weights[y] = weight(y)
        rest = _remaining_mask(g, y)
        index[y] = rests.setdefault(rest, len(rests))
    splits = tuple(
        colour_split(induced_subgraph(g, mask)[0]) if mask else None
        for mask in rests
    )
    return TreeProfile(g, weights, index, splits)


def _profile_f_values(profile: TreeProfile, s: float) -> np.ndarray:
    from .ppt import evaluate_colour_split

    return np.array(
        [
            1.0 if split is None else evaluate_colour_split(split, s)
            for split in profile.rest_splits
        ]
    )


def tree_min_coefficient(profile: TreeProfile, s: float) -> float:
    """Smallest decomposition coefficient (identity included) at dephasing s."""
    f_vals = _profile_f_values(profile, s)
    return float((s ** profile.weights * f_vals[profile.rest_index]).min())


def tree_validity_margin(profile: TreeProfile, s: float) -> float:
    """Smallest residual-subgraph f value at dephasing s.

    Every coefficient is s^{w_y} times one of these, so for s > 0 the margin
    and the minimum coefficient cross zero together; unlike the raw minimum
    this stays at 1 as s -> 0, which keeps root brackets well-posed.
    """
    return float(_profile_f_values(profile, s).min())


CERTIFICATE_LIMIT = 10


def _connected_blocks(g: Graph) -> list[int]:
    return [
        x
        for x in range(1, 1 << g.n)
        if len(connected_components(g, within=x)) == 1
    ]


def _compatible_factor_sets(g: Graph, max_factors: int) -> list[tuple[int, ...]]:
    blocks = _connected_blocks(g)
    sets: list[tuple[int, ...]] = [(b,) for b in blocks]
    frontier = sets
    for _ in range(max_factors - 1):
        grown = []
        for fam in frontier:
            for b in blocks:
                if b <= fam[-1] or (b & sum(fam)):
                    continue
                if all(blocks_compatible(g, b, other) for other in fam):
                    grown.append(fam + (b,))
        sets.extend(grown)
        frontier = grown
        if not frontier:
            break
    return sets


def product_certificate(
    st: DiagonalState, max_factors: int = 3, tol: float = 1e-8
) -> Decomposition | None:
    """Separability certificate by linear programming over product templates.

    Candidate terms are prod_i (1 + sign_i K_{b_i}) for every set of pairwise
    sitewise-compatible connected blocks (up to `max_factors` of them) and
    every sign choice; each is a separable PSD operator, so any nonnegative
    combination reproducing the coefficient table certifies separability.
    Returns the assembled decomposition, or None when the program is
    infeasible.  This reaches strictly further than the fixed block
    bookkeeping on some non-thermal states.
    """
    from scipy.optimize import linprog

    g, n = st.graph, st.n
    if n > CERTIFICATE_LIMIT:
        raise ValueError(f"certificate search limited to n <= {CERTIFICATE_LIMIT}")
    factor_sets = _compatible_factor_sets(g, max_factors)
    columns = []
    specs: list[tuple[tuple[int, int], ...]] = []
    for fam in factor_sets:
        for signs in range(1 << len(fam)):
            spec = tuple(
                (mask, 1 if signs >> i & 1 else -1) for i, mask in enumerate(fam)
            )
            vec = np.zeros(1 << n)
            for bits in range(1 << len(spec)):
                sub, coeff = 0, 1.0
                for i, (mask, sg) in enumerate(spec):
                    if bits >> i & 1:
                        sub ^= mask
                        coeff *= sg
                vec[sub] += coeff
            specs.append(spec)
            columns.append(vec)
    specs.append(())
    identity_col = np.zeros(1 << n)
    identity_col[0] = 1.0
    columns.append(identity_col)
    matrix = np.array(columns).T
    target = st.coefficient_table()
    result = linprog(
        np.zeros(matrix.shape[1]),
        A_eq=matrix,
        b_eq=target,
        bounds=[(0, None)] * matrix.shape[1],
        method="highs",
    )
    if result.status != 0:
        return None
    weights = result.x
    if np.abs(matrix @ weights - target).max() > tol:
        return None
    terms = tuple(
        Term(float(w), tuple(("stab", mask, sg) for mask, sg in spec), None)
        for w, spec in zip(weights, specs[:-1])
        if w > 1e-12
    )
    return Decomposition(g, terms, float(weights[-1]))


def is_star(g: Graph) -> bool:
    return g.n >= 2 and g.edges == tuple((0, v) for v in range(1, g.n))


@dataclass(frozen=True)
class StarReport:
    """Validity data for the star construction.

    margin = min_x sum_y s_{0y} (-1)^{x.y}  -  sum_y |s_{1y}|; nonnegative
    margin certifies separability.  For three vertices the product sign
    condition on the four central coefficients is reported as well.
    """

    leaf_minimum: float
    central_abs_sum: float
    margin: float
    valid: bool
    central_product: float | None
    product_condition: bool | None


def star_decomposition(st: DiagonalState) -> tuple[Decomposition, StarReport]:
    """Three-part separable candidate for any diagonal state on a star.

    Central terms |s_{1y}| (1 + sgn(s_{1y}) K_{1y}) are always separable; the
    leaf group enters as one PSD stabilizer sum; what remains on the identity
    is the validity margin.
    """
    g = st.graph
    if not is_star(g):
        raise ValueError("graph is not a star with vertex 0 central")
    if g.n > STAR_LIMIT:
        raise ValueError(f"star construction limited to n <= {STAR_LIMIT}")
    table = st.coefficient_table()
    leaves = 1 << (g.n - 1)
    s0 = np.array([table[y << 1] for y in range(leaves)])
    s1 = np.array([table[(y << 1) | 1] for y in range(leaves)])
    leaf_min = float(fwht(s0).min())
    central_abs = float(np.abs(s1).sum())
    terms = [
        Term(
            abs(float(s1[y])),
            (("stab", (y << 1) | 1, 1 if s1[y] >= 0 else -1),),
            (y << 1) | 1,
        )
        for y in range(leaves)
    ]
    leaf_sum = tuple(
        [(float(s0[0]) - leaf_min, 0)]
        + [(float(s0[y]), y << 1) for y in range(1, leaves)]
    )
    terms.append(Term(1.0, (("sum", leaf_sum),), None))
    margin = leaf_min - central_abs
    product = condition = None
    if g.n == 3:
        product = float(np.prod(s1))
        condition = bool(product >= 0)
    report = StarReport(
        leaf_min, central_abs, margin, bool(margin >= -1e-9), product, condition
    )
    return Decomposition(g, tuple(terms), margin), report


def counterexample_star_state(alpha: float) -> DiagonalState:
    """The three-qubit family rho prop. prod(1+K_n) - 2 K_0 K_2 + alpha."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    table = np.full(8, 1.0 / (1.0 + alpha))
    table[0] = 1.0
    table[0b101] = -1.0 / (1.0 + alpha)
    return DiagonalState(star(3), Explicit(tuple(table)))


def _twisted_pair() -> tuple[np.ndarray, np.ndarray]:
    from .oracle import X, Y, Z, embed

    def triple(a, b, c):
        return embed(a, 0, 3) @ embed(b, 1, 3) @ embed(c, 2, 3)

    t_plus = 0.5 * triple(X + Y, Z + Y, Z - Y)
    t_minus = 0.5 * triple(X - Y, Z - Y, Z + Y)
    return t_plus, t_minus


@dataclass(frozen=True)
class TwistReport:
    margin: float
    factor_extremes: tuple[float, float]
    factors_psd_after_offset: bool
    valid: bool


def twisted_star_decomposition(alpha: float) -> tuple[Decomposition, TwistReport]:
    """Twisted-basis decomposition of the three-qubit counterexample.

    The central stabilizer content collapses onto two rank-deficient product
    operators with extremal eigenvalues +-sqrt(2); offsetting each by sqrt(2)
    identities leaves alpha - 2 sqrt(2) on the identity, so the construction
    is a valid separable decomposition exactly for alpha >= 2 sqrt(2).
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    t_plus, t_minus = _twisted_pair()
    eye = np.eye(8)
    norm = 1.0 / (1.0 + alpha)
    terms = (
        Term(norm, (("stab", 0b010, 1), ("stab", 0b100, 1)), None),
        Term(norm, (("dense", t_plus + SQRT2 * eye),), None),
        Term(norm, (("dense", t_minus + SQRT2 * eye),), None),
    )
    extremes = tuple(
        float(np.max(np.abs(np.linalg.eigvalsh(t)))) for t in (t_plus, t_minus)
    )
    psd_ok = all(
        float(np.linalg.eigvalsh(t + SQRT2 * eye).min()) >= -1e-12
        for t in (t_plus, t_minus)
    )
    margin = (alpha - 2.0 * SQRT2) * norm
    report = TwistReport(margin, extremes, psd_ok, bool(margin >= -1e-12))
    return (
        Decomposition(star(3), terms, margin),
        report,
    )
