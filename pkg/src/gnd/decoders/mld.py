"""Exact maximum-likelihood decoding by coset summation.

For a syndrome gamma, every sector beta labels a coset ``rep(beta, gamma) * S``
of the stabilizer group.  The decoder sums the error probability over all
``2^m`` coset members for each of the ``4^k`` sectors and keeps the largest.

Two evaluation paths share one tie rule:

* :func:`coset_log_probs` enumerates the stabilizer group explicitly
  (doubling construction, packed 64-bit rows) and accumulates in log space.
* :func:`joint_table` obtains every ``p(gamma, beta)`` at once with a
  Walsh-Hadamard transform of the per-qubit characteristic function.  It is
  used as a fast path; decisions it cannot certify fall back to enumeration.
"""
from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ..codes import ElsFrame
from ..noise import PauliChannel
from ..pauli import DimensionError
from .base import Decoder, syndrome_index

DEFAULT_BUDGET = 1 << 26
TIE_RTOL = 1e-9


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"exact MLD needs 2^m * 4^k = {required} coset terms, budget is {budget}"
        )


def all_sectors(k: int) -> np.ndarray:
    """Every beta in lexicographic order (beta_1 is the most significant bit)."""
    idx = np.arange(1 << (2 * k))
    shifts = np.arange(2 * k - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def _pack(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = rows.shape[1] // 2
    w = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
    x = (rows[:, :n].astype(np.uint64) * w).sum(1, dtype=np.uint64)
    z = (rows[:, n:].astype(np.uint64) * w).sum(1, dtype=np.uint64)
    return x, z


def stabilizer_group(frame: ElsFrame) -> tuple[np.ndarray, np.ndarray]:
    """All ``2^m`` stabilizer group elements as packed (x, z) words."""
    if frame.n > 64:
        raise ValueError("packed enumeration supports n <= 64")
    gx, gz = _pack(frame.code.stabilizers)
    x = np.zeros(1, np.uint64)
    z = np.zeros(1, np.uint64)
    for a, b in zip(gx, gz):
        x = np.concatenate([x, x ^ a])
        z = np.concatenate([z, z ^ b])
    return x, z


def _log_probs_packed(model: PauliChannel, n: int, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    ny = np.bitwise_count(x & z).astype(np.int64)
    nx = np.bitwise_count(x).astype(np.int64) - ny
    nz = np.bitwise_count(z).astype(np.int64) - ny
    counts = (n - nx - nz - ny, nx, nz, ny)
    out = np.zeros(x.shape)
    for c, lp in zip(counts, model.log_probs):
        out += np.where(c > 0, c * lp if np.isfinite(lp) else -np.inf, 0.0)
    return out


def mld_budget(frame: ElsFrame) -> int:
    return (1 << frame.m) * (1 << (2 * frame.k))


def coset_log_probs(frame: ElsFrame, model: PauliChannel, gamma, group=None,
                    budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """``log P(beta, gamma)`` for every sector, in :func:`all_sectors` order."""
    gamma = np.asarray(gamma, dtype=np.uint8)
    if gamma.shape != (frame.m,):
        raise DimensionError(f"syndrome length {gamma.shape} != ({frame.m},)")
    need = mld_budget(frame)
    if need > budget:
        raise BudgetExceeded(need, budget)
    sx, sz = group if group is not None else stabilizer_group(frame)
    betas = all_sectors(frame.k)
    reps = frame.compose_batch(np.zeros((len(betas), frame.m), np.uint8), betas,
                               np.tile(gamma, (len(betas), 1)))
    rx, rz = _pack(reps)
    out = np.empty(len(betas))
    chunk = max(1, (1 << 22) // sx.size)
    for lo in range(0, len(betas), chunk):
        hi = min(lo + chunk, len(betas))
        lp = _log_probs_packed(model, frame.n, rx[lo:hi, None] ^ sx[None, :], rz[lo:hi, None] ^ sz[None, :])
        out[lo:hi] = logsumexp(lp, axis=1)
    return out


def pick_sector(scores: np.ndarray, log_space: bool = True) -> int:
    """Index of the best sector; near-ties go to the smallest index."""
    scores = np.asarray(scores, dtype=float)
    best = scores.max()
    if log_space:
        if not np.isfinite(best):
            return 0
        ok = scores >= best + np.log1p(-TIE_RTOL)
    else:
        ok = scores >= best * (1.0 - TIE_RTOL)
    return int(np.argmax(ok))


def exact_mld_decode(frame: ElsFrame, model: PauliChannel, gamma,
                     budget: int = DEFAULT_BUDGET, group=None) -> np.ndarray:
    lp = coset_log_probs(frame, model, gamma, group=group, budget=budget)
    return all_sectors(frame.k)[pick_sector(lp)]


def _sector_signatures(frame: ElsFrame) -> np.ndarray:
    """Per qubit integer signatures of X, Z, Y in the table's bit layout.

    Bit ``i < m`` is gamma_i; beta slot ``j`` sits at bit ``m + 2k - 1 - j`` so
    that the beta part of an index is the lexicographic sector index.
    """
    m, kk, n = frame.m, 2 * frame.k, frame.n
    rows = np.vstack([frame.code.stabilizers, frame.sector_operators])
    pos = np.concatenate([np.arange(m), m + kk - 1 - np.arange(kk)])
    w = np.left_shift(np.uint64(1), pos.astype(np.uint64))
    # X on qubit q flips the bits of rows with z_q = 1
    sx = (rows[:, n:].astype(np.uint64) * w[:, None]).sum(0, dtype=np.uint64)
    sz = (rows[:, :n].astype(np.uint64) * w[:, None]).sum(0, dtype=np.uint64)
    return np.stack([sx, sz, sx ^ sz], axis=1)


def joint_table(frame: ElsFrame, model: PauliChannel) -> np.ndarray:
    """``(2^m, 4^k)`` array of ``p(gamma, beta)``; rows by syndrome index."""
    nbits = frame.m + 2 * frame.k
    u = np.arange(1 << nbits, dtype=np.uint64)
    char = np.ones(u.size)
    pi, px, pz, py = model.probs
    for sig in _sector_signatures(frame):
        acc = np.full(u.size, pi)
        for s, pr in zip(sig, (px, pz, py)):
            acc += pr * (1.0 - 2.0 * (np.bitwise_count(u & s) & 1))
        char *= acc
    # in-place fast Walsh-Hadamard transform
    h = 1
    while h < char.size:
        v = char.reshape(-1, 2, h)
        a = v[:, 0] + v[:, 1]
        v[:, 1] = v[:, 0] - v[:, 1]
        v[:, 0] = a
        h *= 2
    char /= char.size
    return char.reshape(1 << (2 * frame.k), 1 << frame.m).T


class ExactMldDecoder(Decoder):
    """Exact MLD with per-syndrome caching.

    ``method="table"`` precomputes every decision from :func:`joint_table`
    (when ``m + 2k <= table_bits``); decisions whose margin is within
    round-off are recomputed by enumeration on first use.
    """

    name = "mld"

    def __init__(self, frame: ElsFrame, model: PauliChannel, method: str = "auto",
                 budget: int = DEFAULT_BUDGET, table_bits: int = 24):
        super().__init__(frame.m, 2 * frame.k)
        self.frame, self.model, self.budget = frame, model, budget
        need = mld_budget(frame)
        if method == "auto":
            method = "table" if frame.n_bits <= table_bits else "enumerate"
        if method == "enumerate" and need > budget:
            raise BudgetExceeded(need, budget)
        if method not in ("table", "enumerate"):
            raise ValueError(f"unknown MLD method {method!r}")
        self.method = method
        self._sectors = all_sectors(frame.k)
        self._group = stabilizer_group(frame) if need <= budget else None
        self._cache: dict[int, int] = {}
        self._choice = None
        if method == "table":
            table = joint_table(frame, model)
            self._choice, self._unsure = _table_decisions(table)
            self.syndrome_probs = table.sum(1)

    def _sector_for(self, key: int) -> int:
        if key not in self._cache:
            gamma = ((key >> np.arange(self.frame.m)) & 1).astype(np.uint8)
            lp = coset_log_probs(self.frame, self.model, gamma, group=self._group, budget=self.budget)
            self._cache[key] = pick_sector(lp)
        return self._cache[key]

    def _decode_batch(self, gammas):
        keys = syndrome_index(gammas)
        if self._choice is not None:
            idx = self._choice[keys].copy()
            if self._group is not None:
                for pos in np.flatnonzero(self._unsure[keys]):
                    idx[pos] = self._sector_for(int(keys[pos]))
        else:
            uniq, inv = np.unique(keys, return_inverse=True)
            idx = np.array([self._sector_for(int(u)) for u in uniq], dtype=np.int64)[inv]
        return self._sectors[idx]

    def describe(self):
        return {"decoder": self.name, "method": self.method, "p": self.model.p}


def _table_decisions(table: np.ndarray, floor: float = 1e-11):
    best = table.max(1)
    ok = table >= best[:, None] * (1.0 - TIE_RTOL)
    choice = np.argmax(ok, axis=1)
    # uncertain: tiny syndromes, or a runner-up within round-off but not a tie
    tmp = np.where(ok, -np.inf, table)
    second = tmp.max(1)
    unsure = (best < floor) | ((second > best * (1.0 - 1e-6)) & (second < best * (1.0 - TIE_RTOL)))
    return choice, unsure


def exact_mld_ler(frame: ElsFrame, model: PauliChannel) -> float:
    """Closed-form exact-MLD failure probability ``1 - sum_gamma max_beta p``."""
    table = joint_table(frame, model)
    choice, _ = _table_decisions(table)
    return float(1.0 - table[np.arange(table.shape[0]), choice].sum())
