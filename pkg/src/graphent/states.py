"""Noise models: the coefficient function y -> s_y of a graph-diagonal state.

Every model exposes the single coefficient s_y and, for the fast transforms,
the full table over {0,1}^n.  The defining normalisation is s_0 = 1; validity
means all 2^n Walsh-transform components (the graph-basis populations) are
nonnegative.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .bits import all_indices, fwht, parities, popcounts, weight
from .graphs import Graph

VALIDITY_CHECK_LIMIT = 20


@dataclass(frozen=True)
class Thermal:
    """s_y = s^{w_y} with s = tanh(beta*Delta/2)."""

    s: float

    def __post_init__(self):
        if not 0.0 <= self.s < 1.0:
            raise ValueError(f"thermal s must be in [0, 1), got {self.s}")


@dataclass(frozen=True)
class ThermalSites:
    """Per-vertex dephasing strengths: s_y = prod_{n: y_n=1} s_n."""

    svals: tuple[float, ...]

    def __post_init__(self):
        if any(not 0.0 <= s < 1.0 for s in self.svals):
            raise ValueError("every site s must be in [0, 1)")


@dataclass(frozen=True)
class GlobalDepolarised:
    """rho = (1 + alpha |psi><psi|) / (2^N + alpha).

    The trace rule s_y = Tr(rho K_y) gives s_y = (2^N d_{y,0} + alpha)/(2^N + alpha);
    the dense-oracle cross-check in the test suite pins the normalisation down.
    """

    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


@dataclass(frozen=True)
class LocalDepolarised:
    """Single-site depolarising channel of strength p applied at every vertex."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")


@dataclass(frozen=True)
class Explicit:
    """A user-supplied coefficient table over {0,1}^n (already s_0-normalised)."""

    table: tuple[float, ...]


Model = Thermal | ThermalSites | GlobalDepolarised | LocalDepolarised | Explicit


@dataclass(frozen=True)
class DiagonalState:
    graph: Graph
    model: Model

    def __post_init__(self):
        n = self.graph.n
        if isinstance(self.model, ThermalSites) and len(self.model.svals) != n:
            raise ValueError("one s value per vertex required")
        if isinstance(self.model, Explicit):
            if len(self.model.table) != 1 << n:
                raise ValueError(f"explicit table must have 2^{n} entries")
            if abs(self.model.table[0] - 1.0) > 1e-12:
                raise ValueError("explicit table must be normalised to s_0 = 1")

    @property
    def n(self) -> int:
        return self.graph.n

    def coefficient(self, y: int) -> float:
        """s_y for this model."""
        n = self.n
        if y < 0 or y >> n:
            raise ValueError("y does not match the graph size")
        m = self.model
        if isinstance(m, Thermal):
            return m.s ** weight(y)
        if isinstance(m, ThermalSites):
            out = 1.0
            for i, s in enumerate(m.svals):
                if y >> i & 1:
                    out *= s
            return out
        if isinstance(m, GlobalDepolarised):
            dim = float(1 << n)
            return (dim * (y == 0) + m.alpha) / (dim + m.alpha)
        if isinstance(m, LocalDepolarised):
            ay = self._mod2_matvec(y)
            exponent = weight(y) + weight(ay) - weight(y & ay)
            return (1.0 - m.p) ** exponent
        return m.table[y]

    def _mod2_matvec(self, y: int) -> int:
        """A . y mod 2, reduced before any weight or inner product is taken."""
        out = 0
        for v in range(self.n):
            out |= ((self.graph.adjacency[v] & y).bit_count() & 1) << v
        return out

    def coefficients_for(self, ys: np.ndarray) -> np.ndarray:
        """s_y for an arbitrary array of packed indices."""
        ys = np.asarray(ys, dtype=np.uint64)
        m = self.model
        if isinstance(m, Thermal):
            return np.power(m.s, popcounts(ys), dtype=np.float64)
        if isinstance(m, ThermalSites):
            out = np.ones(ys.size)
            for i, s in enumerate(m.svals):
                out[(ys >> np.uint64(i) & np.uint64(1)) == 1] *= s
            return out
        if isinstance(m, GlobalDepolarised):
            dim = float(1 << self.n)
            out = np.full(ys.size, m.alpha / (dim + m.alpha))
            out[ys == 0] = 1.0
            return out
        if isinstance(m, LocalDepolarised):
            w_y = popcounts(ys)
            w_ay = np.zeros(ys.size, dtype=np.int64)
            y_dot_ay = np.zeros(ys.size, dtype=np.int64)
            for v in range(self.n):
                bit = parities(ys & np.uint64(self.graph.adjacency[v]))
                w_ay += bit
                y_dot_ay += bit & (ys >> np.uint64(v) & np.uint64(1)).astype(np.int64)
            return np.power(1.0 - m.p, w_y + w_ay - y_dot_ay, dtype=np.float64)
        return np.asarray(m.table, dtype=np.float64)[ys]

    def coefficient_table(self) -> np.ndarray:
        """s_y for all y in integer order."""
        return self.coefficients_for(all_indices(self.n))

    def graph_basis_populations(self) -> np.ndarray:
        """2^n <psi_x| rho |psi_x> = Walsh transform of the coefficient table."""
        if self.n > VALIDITY_CHECK_LIMIT:
            raise ValueError(f"population check limited to n <= {VALIDITY_CHECK_LIMIT}")
        return fwht(self.coefficient_table())

    def check_valid(self, tol: float = 1e-10) -> bool:
        """True iff every graph-basis population is nonnegative."""
        return bool(self.graph_basis_populations().min() >= -tol * (1 << self.n))


def explicit_from_csv(graph: Graph, path: str) -> DiagonalState:
    """Load an Explicit model from (y-as-binary-string, s_y) rows.

    Missing rows default to 0; the table is divided by s_0 on load.
    """
    table = np.zeros(1 << graph.n)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            text, value = row[0].strip(), float(row[1])
            if len(text) != graph.n or set(text) - {"0", "1"}:
                raise ValueError(f"bad y string {text!r} for n={graph.n}")
            y = sum(1 << i for i, c in enumerate(text) if c == "1")
            table[y] = value
    if table[0] == 0.0:
        raise ValueError("s_0 entry missing or zero; cannot normalise")
    table /= table[0]
    return DiagonalState(graph, Explicit(tuple(table)))


@dataclass(frozen=True)
class Temperature:
    """Mutually consistent (s, beta*Delta, T/Delta) triple, k_B = 1.

    s = 0 corresponds to infinite temperature; the flag records it since
    T/Delta is then not finite.
    """

    s: float
    beta_delta: float
    t_over_delta: float
    infinite: bool = False


def from_s(s: float) -> Temperature:
    if not 0.0 <= s < 1.0:
        raise ValueError(f"s must be in [0, 1), got {s}")
    if s == 0.0:
        return Temperature(0.0, 0.0, math.inf, infinite=True)
    beta_delta = 2.0 * math.atanh(s)
    return Temperature(s, beta_delta, 1.0 / beta_delta)


def from_beta_delta(beta_delta: float) -> Temperature:
    if beta_delta <= 0:
        raise ValueError("beta*Delta must be positive")
    return Temperature(math.tanh(beta_delta / 2.0), beta_delta, 1.0 / beta_delta)


def from_t_over_delta(t_over_delta: float) -> Temperature:
    if t_over_delta <= 0:
        raise ValueError("T/Delta must be positive")
    return from_beta_delta(1.0 / t_over_delta)
