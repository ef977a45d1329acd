"""Common decoder interface: syndromes in, logical sectors out."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..pauli import DimensionError


@dataclass
class DecodeResult:
    beta_hat: np.ndarray
    conditionals: np.ndarray | None = None
    seconds: float = 0.0


class Decoder:
    """Maps syndromes ``gamma`` (length ``n_syndrome``) to sectors ``beta``.

    Subclasses implement :meth:`_decode_batch` on a 2-D uint8 array.
    """

    name = "decoder"

    def __init__(self, n_syndrome: int, n_logical: int):
        self.n_syndrome = n_syndrome
        self.n_logical = n_logical
        self.decode_seconds = 0.0
        self.decoded = 0

    def _decode_batch(self, gammas: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _prepare(self, gammas) -> np.ndarray:
        gammas = np.asarray(gammas, dtype=np.uint8)
        if gammas.shape[-1] != self.n_syndrome:
            raise DimensionError(
                f"{self.name}: syndrome length {gammas.shape[-1]} != {self.n_syndrome}"
            )
        return np.atleast_2d(gammas)

    def decode_batch(self, gammas) -> np.ndarray:
        gammas = self._prepare(gammas)
        start = time.perf_counter()
        out = self._decode_batch(gammas) if gammas.shape[0] else np.zeros((0, self.n_logical), np.uint8)
        self.decode_seconds += time.perf_counter() - start
        self.decoded += gammas.shape[0]
        return out.astype(np.uint8, copy=False)

    def decode(self, gamma) -> np.ndarray:
        gamma = np.asarray(gamma, dtype=np.uint8)
        if gamma.ndim != 1:
            raise DimensionError("decode takes one syndrome; use decode_batch")
        return self.decode_batch(gamma[None])[0]

    def decode_result(self, gamma) -> DecodeResult:
        start = time.perf_counter()
        beta = self.decode(gamma)
        return DecodeResult(beta, None, time.perf_counter() - start)

    @property
    def mean_latency(self) -> float:
        return self.decode_seconds / self.decoded if self.decoded else float("nan")

    def describe(self) -> dict:
        return {"decoder": self.name}


def syndrome_index(gammas: np.ndarray) -> np.ndarray:
    """Little-endian integer of each syndrome row (bit i = gamma_i)."""
    gammas = np.atleast_2d(gammas)
    if gammas.shape[1] > 62:
        raise ValueError("syndrome too long to index")
    weights = np.left_shift(np.int64(1), np.arange(gammas.shape[1], dtype=np.int64))
    return gammas.astype(np.int64) @ weights
