"""Entanglement witnesses, their circuit implementations and sampling costs.

W_{x,z} has expectation f_{x,z}/2^N on any state with the given diagonal
coefficients; a negative value certifies entanglement.  Both circuits are
simulated exactly (no sampling); the Chernoff budget is analytic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import all_indices, pairwise_sum, parities, popcounts
from .graphs import Graph, cross_edges, induced_subgraph
from .oracle import H, cz_edges, embed
from .ppt import fast_f_for_bipartition, pt_eigenvalue
from .states import DiagonalState, Thermal

WITNESS_CIRCUIT_LIMIT = 6
THRESHOLD_CIRCUIT_LIMIT = 12
FULL_DENSITY_LIMIT = 4


@dataclass(frozen=True)
class CircuitResult:
    p0: float
    implied_trace: float  # 2 p0 - 1


def witness_expectation(st: DiagonalState, x: int, z: int) -> float:
    """Tr(W_{x,z} rho) = f_{x,z} / 2^N."""
    return pt_eigenvalue(st, x, z) / (1 << st.n)


def sampling_cost(epsilon: float, fail_prob: float) -> int:
    """Smallest k with 2 exp(-2 k eps^2) <= fail_prob; 0 means degenerate
    (the bound already holds without sampling)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if fail_prob <= 0:
        raise ValueError("failure probability must be positive")
    if fail_prob >= 2.0:
        return 0
    return max(0, math.ceil(math.log(2.0 / fail_prob) / (2.0 * epsilon**2)))


def _phase_mask(g: Graph, x: int, z: int, n: int) -> np.ndarray:
    """(-1)^{x.v + sum_{cross edges} v_n v_m} over computational states v."""
    vs = all_indices(n)
    acc = parities(vs & np.uint64(x))
    for i, j in cross_edges(g, z):
        acc ^= ((vs >> np.uint64(i)) & (vs >> np.uint64(j)) & np.uint64(1)).astype(
            np.int64
        )
    return 1.0 - 2.0 * acc.astype(np.float64)


def simulate_witness_circuit(
    g: Graph, x: int, z: int, rho: np.ndarray, method: str = "basis"
) -> CircuitResult:
    """Hadamard test measuring Tr(W_{x,z} rho) exactly.

    The rho register is unmapped to the computational basis (controlled-phase
    per edge, then transversal Hadamard); the ancilla then controls pairwise
    Z between the registers, Z_x and CP_E^z on the maximally mixed register.

    method="basis" averages the mixed register over computational inputs
    (2^n small simulations); method="dense" simulates all 2n+1 qubits as one
    density matrix and is limited to n <= 4.  Both give identical p0.
    """
    n = g.n
    if n > WITNESS_CIRCUIT_LIMIT:
        raise ValueError(f"witness circuit limited to n <= {WITNESS_CIRCUIT_LIMIT}")
    if rho.shape != (1 << n, 1 << n):
        raise ValueError("rho does not match the graph size")
    if method == "dense":
        return _witness_circuit_dense(g, x, z, rho)
    if method != "basis":
        raise ValueError("method must be 'basis' or 'dense'")
    unmap = _transversal_h(n) @ cz_edges(g)
    rho1 = unmap @ rho @ unmap.conj().T
    chi = _phase_mask(g, x, z, n)
    dim = 1 << n
    h_anc = np.kron(H, np.eye(dim))
    p0_values = []
    for v in range(dim):
        # ancilla-controlled diagonal: |1><1| branch multiplies u by (-1)^{u.v} chi(v)
        couple = (1.0 - 2.0 * parities(all_indices(n) & np.uint64(v))) * chi[v]
        ctrl = np.diag(np.concatenate([np.ones(dim), couple]).astype(complex))
        joint = np.zeros((2 * dim, 2 * dim), dtype=complex)
        joint[:dim, :dim] = rho1
        evolved = h_anc @ ctrl @ h_anc @ joint @ h_anc.conj().T @ ctrl.conj().T @ h_anc.conj().T
        p0_values.append(float(np.trace(evolved[:dim, :dim]).real))
    p0 = pairwise_sum(np.asarray(p0_values)) / dim
    return CircuitResult(p0, 2.0 * p0 - 1.0)


def _transversal_h(n: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for _ in range(n):
        out = np.kron(out, H)
    return out


def _witness_circuit_dense(g: Graph, x: int, z: int, rho: np.ndarray) -> CircuitResult:
    """One density matrix over ancilla + both n-qubit registers."""
    n = g.n
    if n > FULL_DENSITY_LIMIT:
        raise ValueError(f"full-density simulation limited to n <= {FULL_DENSITY_LIMIT}")
    dim = 1 << n
    total = 1 << (2 * n + 1)
    # bit layout: reg2 = bits 0..n-1, reg1 = bits n..2n-1, ancilla = bit 2n
    rho_full = np.kron(
        np.kron(np.diag([1.0, 0.0]).astype(complex), rho), np.eye(dim) / dim
    )
    unmap1 = np.kron(
        np.kron(np.eye(2, dtype=complex), _transversal_h(n) @ cz_edges(g)), np.eye(dim)
    )
    idx = all_indices(2 * n + 1)
    anc = (idx >> np.uint64(2 * n) & np.uint64(1)).astype(np.int64)
    reg1 = (idx >> np.uint64(n)) & np.uint64(dim - 1)
    reg2 = idx & np.uint64(dim - 1)
    pair = parities(reg1 & reg2)
    zx = parities(reg2 & np.uint64(x))
    cpz = np.zeros(total, dtype=np.int64)
    for i, j in cross_edges(g, z):
        cpz ^= ((reg2 >> np.uint64(i)) & (reg2 >> np.uint64(j)) & np.uint64(1)).astype(
            np.int64
        )
    controlled = np.where(anc == 1, 1.0 - 2.0 * ((pair + zx + cpz) % 2), 1.0)
    v_gate = np.diag(controlled.astype(complex))
    h_anc = embed(H, 2 * n, 2 * n + 1)
    circuit = h_anc @ v_gate @ h_anc @ unmap1
    evolved = circuit @ rho_full @ circuit.conj().T
    p0 = float(np.sum(np.diag(evolved).real[anc == 0]))
    return CircuitResult(p0, 2.0 * p0 - 1.0)


def simulate_threshold_circuit(g: Graph, x: int, z: int, s: float) -> CircuitResult:
    """Hadamard test on the product state (|0><0| + s|1><1|)^{x n}/(1+s)^n.

    p0 = (1 + f_{x,z}(s)/(1+s)^n)/2; the implied f is recovered by the caller
    via (2 p0 - 1)(1+s)^n.
    """
    n = g.n
    if n > THRESHOLD_CIRCUIT_LIMIT:
        raise ValueError(f"threshold circuit limited to n <= {THRESHOLD_CIRCUIT_LIMIT}")
    if not 0.0 <= s < 1.0:
        raise ValueError("s must be in [0, 1)")
    chi = _phase_mask(g, x, z, n)
    weights = np.power(s, popcounts(all_indices(n))) / (1.0 + s) ** n
    p0_terms = []
    for v in range(1 << n):
        vec = np.zeros(2 << n, dtype=complex)
        vec[v] = 1.0  # ancilla |0>, register |v>
        vec = _apply_h_on_ancilla(vec, n)
        vec[1 << n :] *= chi  # ancilla-controlled CP_E^z then Z_x (both diagonal)
        vec = _apply_h_on_ancilla(vec, n)
        p0_terms.append(weights[v] * float(np.linalg.norm(vec[: 1 << n]) ** 2))
    p0 = pairwise_sum(np.asarray(p0_terms))
    return CircuitResult(p0, 2.0 * p0 - 1.0)


def _apply_h_on_ancilla(vec: np.ndarray, n: int) -> np.ndarray:
    dim = 1 << n
    lo, hi = vec[:dim].copy(), vec[dim:].copy()
    out = np.empty_like(vec)
    out[:dim] = (lo + hi) / math.sqrt(2.0)
    out[dim:] = (lo - hi) / math.sqrt(2.0)
    return out


def implied_f(result: CircuitResult, n: int, s: float) -> float:
    return result.implied_trace * (1.0 + s) ** n


def boundary_set(g: Graph, z: int) -> int:
    """Vertices with at least one edge crossing the bipartition."""
    mask = 0
    for i, j in cross_edges(g, z):
        mask |= (1 << i) | (1 << j)
    return mask


def partial_witness(st: DiagonalState, z: int) -> tuple[float, int]:
    """Witness expectation over the boundary set S of z, thermal states only.

    Tracing out the qubits outside S sums 2^{|S'|} full-graph PT eigenvalues;
    the result equals f over the induced subgraph on S divided by 2^{|S|}
    because the removed thermal qubits disentangle into single-site states.
    Returns (value, S mask).
    """
    if not isinstance(st.model, Thermal):
        raise ValueError("partial witness supported for thermal states only")
    s_mask = boundary_set(st.graph, z)
    if s_mask == 0:
        return 1.0, 0
    sub, relabel = induced_subgraph(st.graph, s_mask)
    z_sub = sum(1 << new for old, new in relabel.items() if z >> old & 1)
    value = fast_f_for_bipartition(sub, z_sub, st.model.s) / (1 << sub.n)
    return value, s_mask
