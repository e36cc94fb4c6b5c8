"""Bit-string arithmetic shared by every module.

Strings over the vertices of a graph are packed into Python ints (or uint64
numpy arrays): bit i corresponds to vertex i, so the text form "1100" means
vertices 0 and 1 are set.  All enumerations over {0,1}^n use the integer
order 0, 1, ..., 2^n - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BITS = 63  # any y-enumeration index fits one machine word


def weight(x: int) -> int:
    """Hamming weight of a packed bit string."""
    return int(x).bit_count()


def parity(x: int) -> int:
    return int(x).bit_count() & 1


def dot_parity(x: int, y: int) -> int:
    """Inner product x.y over GF(2)."""
    return (int(x) & int(y)).bit_count() & 1


@dataclass(frozen=True)
class BitString:
    """An n-bit word indexing stabilizer products, eigenvectors or bipartitions."""

    value: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_BITS:
            raise ValueError(f"bit length {self.n} outside 1..{MAX_BITS}")
        if self.value < 0 or self.value >> self.n:
            raise ValueError(f"value {self.value:#x} has bits above position {self.n}")

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        """Parse "1100"-style text; character i is vertex i."""
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        value = sum(1 << i for i, c in enumerate(s) if c == "1")
        return cls(value, len(s))

    def to_string(self) -> str:
        return "".join("1" if self.value >> i & 1 else "0" for i in range(self.n))

    @property
    def weight(self) -> int:
        return weight(self.value)

    def __int__(self) -> int:
        return self.value


def popcounts(values: np.ndarray) -> np.ndarray:
    """Per-element Hamming weight of a uint64 array."""
    return np.bitwise_count(values).astype(np.int64)


def parities(values: np.ndarray) -> np.ndarray:
    """Per-element parity (popcount mod 2) of a uint64 array, as 0/1 ints."""
    return (np.bitwise_count(values) & 1).astype(np.int64)


def signs_from_parity(values: np.ndarray) -> np.ndarray:
    """(-1)^parity for a uint64 array."""
    return 1.0 - 2.0 * parities(values)


def pairwise_sum(terms: np.ndarray) -> float:
    """Sum in a fixed pairwise tree over index order.

    Adjacent elements are added level by level, so the reduction tree depends
    only on the array length; results are reproducible regardless of how the
    array was produced.
    """
    a = np.asarray(terms, dtype=np.float64)
    while a.size > 1:
        if a.size & 1:
            a = np.concatenate([a[:-1:2] + a[1::2], a[-1:]])
        else:
            a = a[::2] + a[1::2]
    return float(a[0]) if a.size else 0.0


def fwht(vec: np.ndarray) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform, H[x, y] = (-1)^{x.y}.

    Operates on a copy; the input length must be a power of two.
    """
    a = np.array(vec, dtype=np.float64, copy=True)
    size = a.size
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(-1, 2 * h)
        lo = a[:, :h].copy()
        hi = a[:, h:].copy()
        a[:, :h] = lo + hi
        a[:, h:] = lo - hi
        a = a.reshape(size)
        h *= 2
    return a


def all_indices(n: int) -> np.ndarray:
    """All of {0,1}^n as uint64, in integer order."""
    if n > 26:
        raise ValueError(f"refusing to materialise 2^{n} indices")
    return np.arange(1 << n, dtype=np.uint64)
