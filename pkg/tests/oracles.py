"""Independent reference computations used by the tests.

Everything here avoids the package's batched frame code: readout bits are
computed from explicit symplectic products against the frame generators.
Table index convention: bit ``i`` of the index is entry ``i`` of the
concatenated ``[gamma, beta]`` string.
"""
from __future__ import annotations

import itertools

import numpy as np


def readout_operators(frame) -> np.ndarray:
    """Rows whose symplectic product with E gives gamma then beta.

    gamma_i pairs with g_i; beta slot 2j with l_j^z and slot 2j+1 with l_j^x.
    """
    rows = [frame.code.stabilizers[i] for i in range(frame.m)]
    for j in range(frame.k):
        rows += [frame.logicals[2 * j + 1], frame.logicals[2 * j]]
    return np.array(rows, dtype=np.uint8).reshape(-1, 2 * frame.n)


def _signatures(frame) -> np.ndarray:
    """(n, 3) integer signatures of X, Z, Y on each qubit."""
    ops = readout_operators(frame)
    n = frame.n
    weights = 1 << np.arange(ops.shape[0], dtype=np.int64)
    # X on qubit q anticommutes with rows having z_q = 1, Z with x_q = 1
    sx = (ops[:, n:].astype(np.int64) * weights[:, None]).sum(0)
    sz = (ops[:, :n].astype(np.int64) * weights[:, None]).sum(0)
    return np.stack([sx, sz, sx ^ sz], axis=1)


def _fwht(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    h = 1
    size = a.size
    while h < size:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1)
        h *= 2
    return a.reshape(size)


def exact_joint_table(frame, p: float) -> np.ndarray:
    """p(gamma, beta) under depolarizing noise via a Walsh-Hadamard transform."""
    nbits = frame.m + 2 * frame.k
    u = np.arange(1 << nbits, dtype=np.uint64)
    char = np.ones(u.size)
    for sx, sz, sy in _signatures(frame):
        acc = np.zeros(u.size)
        for s in (sx, sz, sy):
            acc += 1.0 - 2.0 * (np.bitwise_count(u & np.uint64(s)) & 1)
        char *= (1.0 - p) + p / 3.0 * acc
    return _fwht(char) / u.size


def enumerate_joint_table(frame, p: float) -> np.ndarray:
    """Same table by brute force over all 4^n Paulis (small n only)."""
    n = frame.n
    sig = _signatures(frame)
    nbits = frame.m + 2 * frame.k
    table = np.zeros(1 << nbits)
    probs = np.array([1.0 - p, p / 3, p / 3, p / 3])
    # letters 0..3 = I, X, Z, Y
    letter_sig = np.concatenate([np.zeros((n, 1), np.int64), sig], axis=1)
    idx = np.zeros(1, np.int64)
    pr = np.ones(1)
    for q in range(n):
        idx = (idx[:, None] ^ letter_sig[q][None, :]).reshape(-1)
        pr = (pr[:, None] * probs[None, :]).reshape(-1)
    np.add.at(table, idx, pr)
    return table


def split_table(frame, table: np.ndarray) -> np.ndarray:
    """Reshape to ``(2^m, 4^k)``: rows indexed by gamma, columns by beta."""
    return table.reshape(1 << (2 * frame.k), 1 << frame.m).T


def bits_of(index: int, width: int) -> np.ndarray:
    return np.array([(index >> i) & 1 for i in range(width)], dtype=np.uint8)


def enumerate_cosets(frame, p: float) -> dict[tuple[bytes, bytes], float]:
    """Coset probabilities by enumerating every Pauli with the package-free
    packed representation (n <= 9 or so)."""
    n = frame.n
    ops = readout_operators(frame)
    packed = [(int("".join(map(str, r[:n][::-1])), 2), int("".join(map(str, r[n:][::-1])), 2)) for r in ops]
    probs = {0: 1.0 - p, 1: p / 3}
    out: dict[tuple[bytes, bytes], float] = {}
    for letters in itertools.product(range(4), repeat=n):
        x = sum(1 << q for q, c in enumerate(letters) if c & 1)
        z = sum(1 << q for q, c in enumerate(letters) if c & 2)
        w = sum(1 for c in letters if c)
        bits = [((x & rz).bit_count() + (z & rx).bit_count()) & 1 for rx, rz in packed]
        key = (bytes(bits[: frame.m]), bytes(bits[frame.m:]))
        out[key] = out.get(key, 0.0) + probs[0] ** (n - w) * probs[1] ** w
    return out
