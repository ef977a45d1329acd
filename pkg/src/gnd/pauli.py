"""Phase-free Pauli operators and GF(2) linear algebra.

A Pauli operator on ``n`` qubits is stored as two bit-packed Python integers,
``x`` and ``z``; bit ``i`` of each refers to qubit ``i``.  Batches of Paulis
and check matrices use the dense symplectic layout ``[x | z]`` (``uint8``,
one bit per entry), which is what the vectorised samplers and decoders consume.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _LETTERS.items()}


class DimensionError(ValueError):
    """Raised when operands disagree on qubit count or vector length."""


@dataclass(frozen=True)
class PauliOperator:
    """n-qubit Pauli modulo global phase."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("x/z parts exceed qubit count")

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> PauliOperator:
        """Build from a string such as ``"XIZY"`` (character ``i`` is qubit ``i``)."""
        x = z = 0
        for i, ch in enumerate(label.upper()):
            try:
                bx, bz = _BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r}") from None
            x |= bx << i
            z |= bz << i
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        """Single-qubit Pauli ``letter`` acting on ``qubit``."""
        bx, bz = _BITS[letter.upper()]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_bits(cls, x_bits, z_bits) -> PauliOperator:
        x_bits = np.asarray(x_bits, dtype=np.uint8).ravel()
        z_bits = np.asarray(z_bits, dtype=np.uint8).ravel()
        if x_bits.size != z_bits.size:
            raise DimensionError("x and z parts differ in length")
        return cls(x_bits.size, bits_to_int(x_bits), bits_to_int(z_bits))

    @classmethod
    def from_symplectic(cls, vec) -> PauliOperator:
        vec = np.asarray(vec, dtype=np.uint8).ravel()
        if vec.size % 2:
            raise DimensionError("symplectic vector must have even length")
        n = vec.size // 2
        return cls.from_bits(vec[:n], vec[n:])

    @property
    def x_bits(self) -> np.ndarray:
        return int_to_bits(self.x, self.n)

    @property
    def z_bits(self) -> np.ndarray:
        return int_to_bits(self.z, self.n)

    def to_symplectic(self) -> np.ndarray:
        return np.concatenate([self.x_bits, self.z_bits])

    @property
    def weight(self) -> int:
        return pauli_weight(self)

    def label(self) -> str:
        return "".join(
            _LETTERS[((self.x >> i) & 1, (self.z >> i) & 1)] for i in range(self.n)
        )

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return pauli_mul(self, other)

    def __repr__(self) -> str:
        return f"PauliOperator({self.label()!r})"


def _check_same_n(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise DimensionError(f"qubit counts differ: {p.n} != {q.n}")


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    """1 if ``p`` and ``q`` anti-commute, else 0."""
    _check_same_n(p, q)
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) & 1


def pauli_mul(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    _check_same_n(p, q)
    return PauliOperator(p.n, p.x ^ q.x, p.z ^ q.z)


def pauli_weight(p: PauliOperator) -> int:
    return (p.x | p.z).bit_count()


def bits_to_int(bits) -> int:
    """Little-endian: entry ``i`` becomes bit ``i``."""
    out = 0
    for i in np.flatnonzero(np.asarray(bits)):
        out |= 1 << int(i)
    return out


def int_to_bits(value: int, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=np.uint8)
    i = 0
    while value:
        if value & 1:
            out[i] = 1
        value >>= 1
        i += 1
    return out


# ---------------------------------------------------------------------------
# dense symplectic helpers


def symplectic_matrix(paulis) -> np.ndarray:
    """Stack Paulis as rows ``[x | z]``."""
    paulis = list(paulis)
    if not paulis:
        return np.zeros((0, 0), dtype=np.uint8)
    return np.array([p.to_symplectic() for p in paulis], dtype=np.uint8)


def symplectic_dual(mat: np.ndarray) -> np.ndarray:
    """Swap the x and z halves so that ``a @ dual(b).T`` is the symplectic form."""
    mat = np.asarray(mat, dtype=np.uint8)
    n = mat.shape[-1] // 2
    return np.concatenate([mat[..., n:], mat[..., :n]], axis=-1)


def symplectic_products(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise commutation bits between rows of ``a`` and rows of ``b``."""
    a = np.atleast_2d(np.asarray(a, dtype=np.uint8))
    b = np.atleast_2d(np.asarray(b, dtype=np.uint8))
    if a.shape[-1] != b.shape[-1] or a.shape[-1] % 2:
        raise DimensionError(f"incompatible symplectic widths {a.shape[-1]}, {b.shape[-1]}")
    return gf2_matmul(a, symplectic_dual(b).T)


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product mod 2 (float32 BLAS; exact for inner widths below 2**24)."""
    a = np.asarray(a, dtype=np.float32)
    b = np.asarray(b, dtype=np.float32)
    out = (a @ b).astype(np.int64)
    return (out & 1).astype(np.uint8)


# ---------------------------------------------------------------------------
# GF(2) elimination


def gf2_row_reduce(mat) -> tuple[np.ndarray, list[int], int]:
    """Reduced row-echelon form over GF(2).

    Columns are scanned left to right and the lowest-index available row is
    taken as pivot, so the result is deterministic.
    """
    red = np.array(mat, dtype=np.uint8, copy=True) & 1
    if red.ndim != 2:
        raise DimensionError("expected a 2-D matrix")
    rows, cols = red.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(red[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            red[[r, p]] = red[[p, r]]
        others = np.flatnonzero(red[:, c])
        others = others[others != r]
        red[others] ^= red[r]
        pivots.append(c)
        r += 1
    return red, pivots, len(pivots)


def gf2_rank(mat) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    return gf2_row_reduce(mat)[2]


def gf2_solve(mat, b) -> np.ndarray | None:
    """Some ``x`` with ``mat @ x == b`` (mod 2), or ``None`` if inconsistent."""
    mat = np.asarray(mat, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8).ravel()
    if mat.ndim != 2 or b.size != mat.shape[0]:
        raise DimensionError(f"right-hand side length {b.size} != rows {mat.shape[0]}")
    rows, cols = mat.shape
    aug = np.concatenate([mat, b[:, None]], axis=1)
    red, pivots, rank = gf2_row_reduce(aug)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for r, c in enumerate(pivots):
        x[c] = red[r, cols]
    return x


def gf2_nullspace(mat) -> np.ndarray:
    """Basis of the right null space as rows (free columns in ascending order)."""
    mat = np.asarray(mat, dtype=np.uint8)
    cols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(cols, dtype=np.uint8)
    red, pivots, rank = gf2_row_reduce(mat)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, c in enumerate(pivots):
            basis[i, c] = red[r, f]
    return basis


def independent_rows(mat) -> list[int]:
    """Indices of a greedy (first-come) maximal independent subset of rows."""
    mat = np.asarray(mat, dtype=np.uint8)
    kept: list[int] = []
    basis = np.zeros((0, mat.shape[1]), dtype=np.uint8)
    pivots: list[int] = []
    for i, row in enumerate(mat):
        v = row.copy()
        for b, c in zip(basis, pivots):
            if v[c]:
                v ^= b
        nz = np.flatnonzero(v)
        if nz.size == 0:
            continue
        c = int(nz[0])
        # keep basis fully reduced on pivot columns
        hit = basis[:, c] == 1
        basis[hit] ^= v
        basis = np.vstack([basis, v])
        pivots.append(c)
        kept.append(i)
    return kept
