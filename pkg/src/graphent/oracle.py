"""Dense ground truth: states, stabilizers, partial transposes and channels.

Everything here is deliberately brute force (full 2^n x 2^n matrices, explicit
operator products) so it can arbitrate the fast bit-parallel paths.  Vertex i
acts on bit i of the computational index.
"""

from __future__ import annotations

import numpy as np

from .bits import all_indices, parities
from .graphs import Graph
from .states import DiagonalState

DENSE_LIMIT = 10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def embed(op: np.ndarray, v: int, n: int) -> np.ndarray:
    """Single-site operator acting on bit v of an n-qubit register."""
    return np.kron(np.kron(np.eye(1 << (n - 1 - v)), op), np.eye(1 << v))


def pauli_string(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    out = np.eye(1 << n, dtype=complex)
    for v, op in ops.items():
        out = out @ embed(op, v, n)
    return out


def z_operator(x: int, n: int) -> np.ndarray:
    """Z_x = prod of Z on the set bits of x (diagonal)."""
    signs = 1.0 - 2.0 * parities(all_indices(n) & np.uint64(x))
    return np.diag(signs.astype(complex))


def cz_edges(g: Graph) -> np.ndarray:
    """Controlled-phase over every edge (diagonal)."""
    b = all_indices(g.n)
    phase = np.zeros(1 << g.n)
    for i, j in g.edges:
        phase += ((b >> np.uint64(i)) & (b >> np.uint64(j)) & np.uint64(1)).astype(float)
    return np.diag(np.where(phase % 2 == 1, -1.0, 1.0).astype(complex))


def graph_basis_unitary(g: Graph) -> np.ndarray:
    """Columns are |psi_x>: each qubit in |+>, controlled-phase per edge,
    with the x-indexed Z rotations supplied by the incoming basis state."""
    hn = np.eye(1, dtype=complex)
    for _ in range(g.n):
        hn = np.kron(hn, H)
    return cz_edges(g) @ hn


def graph_state_vector(g: Graph) -> np.ndarray:
    return graph_basis_unitary(g)[:, 0]


def k_operator(g: Graph, y: int) -> np.ndarray:
    """K_y as an explicit ordered product of the generators K_n."""
    out = np.eye(1 << g.n, dtype=complex)
    for v in range(g.n):
        if y >> v & 1:
            k_v = pauli_string(
                {v: X, **{u: Z for u in range(g.n) if g.adjacency[v] >> u & 1}}, g.n
            )
            out = out @ k_v
    return out


def build_state(st: DiagonalState) -> np.ndarray:
    """Dense rho, built from its graph-basis populations.

    The populations are computed with an explicit sign matrix rather than the
    fast transform so this stays an independent route.
    """
    n = st.n
    if n > DENSE_LIMIT:
        raise ValueError(f"dense construction limited to n <= {DENSE_LIMIT}")
    idx = all_indices(n)
    signs = 1.0 - 2.0 * parities(idx[:, None] & idx[None, :])
    populations = signs @ st.coefficient_table() / (1 << n)
    u = graph_basis_unitary(st.graph)
    return (u * populations) @ u.conj().T


def partial_transpose(rho: np.ndarray, z: int, n: int) -> np.ndarray:
    """Transpose the tensor factors with z_v = 1."""
    if rho.shape != (1 << n, 1 << n):
        raise ValueError("matrix does not match qubit count")
    t = rho.reshape([2] * (2 * n))
    for v in range(n):
        if z >> v & 1:
            axis = n - 1 - v  # bit v is axis n-1-v in row-major reshape
            t = np.swapaxes(t, axis, n + axis)
    return t.reshape(1 << n, 1 << n)


def eigenvalues(mat: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(mat)


def apply_local_depolarising(rho: np.ndarray, p: float, n: int) -> np.ndarray:
    """E_n applied at every site: (1 - 3p/4) rho + (p/4) sum_P P rho P."""
    out = rho
    for v in range(n):
        mixed = sum(
            embed(P, v, n) @ out @ embed(P, v, n) for P in (X, Y, Z)
        )
        out = (1 - 0.75 * p) * out + 0.25 * p * mixed
    return out


def diagonal_projection(rho: np.ndarray, g: Graph) -> np.ndarray:
    """Drop all graph-basis coherences of rho."""
    u = graph_basis_unitary(g)
    populations = np.diag(u.conj().T @ rho @ u).copy()
    return (u * populations) @ u.conj().T


def assemble_decomposition(decomp, g: Graph) -> np.ndarray:
    """Rebuild (1/2^N) [identity_coefficient + sum_terms coeff prod(factors)].

    Factor kinds: ("stab", mask, sign) for 1 + sign*K_mask, ("sum", entries)
    for an explicit combination sum coeff*K_mask, or ("dense", matrix).
    """
    dim = 1 << g.n
    out = decomp.identity_coefficient * np.eye(dim, dtype=complex)
    for term in decomp.terms:
        prod = np.eye(dim, dtype=complex)
        for factor in term.factors:
            if factor[0] == "stab":
                _, mask, sign = factor
                prod = prod @ (np.eye(dim) + sign * k_operator(g, mask))
            elif factor[0] == "sum":
                combo = sum(c * k_operator(g, mask) for c, mask in factor[1])
                prod = prod @ combo
            else:
                prod = prod @ factor[1]
        out = out + term.coefficient * prod
    return out / dim
