"""Noise models, samplers and labelled training streams.

Randomness is counter-based: every stream is a Philox generator keyed by
``(seed, stream ids...)`` through :class:`numpy.random.SeedSequence`, so the
draws for a given key never depend on how work is scheduled.
"""
from __future__ import annotations

import hashlib
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .codes import ElsFrame
from .dem import DetectorErrorModel, serialize_dem
from .pauli import DimensionError, PauliOperator

# single-qubit letters are indexed by x + 2 z: I, X, Z, Y
LETTERS = "IXZY"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for ``(seed, *stream)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


class PauliChannel:
    """I.i.d. single-qubit Pauli channel; subclasses set ``probs`` (I, X, Z, Y)."""

    probs: np.ndarray
    p: float

    @property
    def log_probs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.probs)

    def with_p(self, p: float) -> PauliChannel:
        return type(self)(p)

    def describe(self) -> dict:
        return {"model": self.name, "p": self.p}


@dataclass(frozen=True)
class DepolarizingModel(PauliChannel):
    p: float
    name = "depolarizing"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"physical error rate {self.p} outside [0, 1]")

    @property
    def probs(self) -> np.ndarray:
        q = self.p / 3
        return np.array([1.0 - self.p, q, q, q])


@dataclass(frozen=True)
class IndependentXZModel(PauliChannel):
    """X and Z flips each with probability ``p``, independently."""

    p: float
    name = "independent_xz"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"physical error rate {self.p} outside [0, 1]")

    @property
    def probs(self) -> np.ndarray:
        p = self.p
        return np.array([(1 - p) ** 2, p * (1 - p), p * (1 - p), p * p])


NOISE_MODELS = {"depolarizing": DepolarizingModel, "independent_xz": IndependentXZModel}


def noise_model(name: str, p: float) -> PauliChannel:
    try:
        return NOISE_MODELS[name](p)
    except KeyError:
        raise ValueError(f"unknown noise model {name!r}") from None


# ---------------------------------------------------------------------------
# Pauli errors


def sample_errors(model: PauliChannel, n: int, shots: int, rng: np.random.Generator) -> np.ndarray:
    """``(shots, 2n)`` array of ``[x | z]`` rows drawn from ``model``."""
    cdf = np.cumsum(model.probs)[:-1]
    letter = np.searchsorted(cdf, rng.random((shots, n)), side="right")
    x = (letter & 1).astype(np.uint8)
    z = (letter >> 1).astype(np.uint8)
    return np.hstack([x, z])


def sample_depolarizing(model: PauliChannel, n: int, rng: np.random.Generator) -> PauliOperator:
    return PauliOperator.from_symplectic(sample_errors(model, n, 1, rng)[0])


def letter_counts(errors: np.ndarray) -> np.ndarray:
    """Per row counts of (I, X, Z, Y) letters."""
    errors = np.atleast_2d(errors)
    n = errors.shape[-1] // 2
    x, z = errors[:, :n].astype(bool), errors[:, n:].astype(bool)
    nx = (x & ~z).sum(1)
    nz = (z & ~x).sum(1)
    ny = (x & z).sum(1)
    return np.stack([n - nx - nz - ny, nx, nz, ny], axis=1)


def log_prob_batch(model: PauliChannel, errors: np.ndarray) -> np.ndarray:
    counts = letter_counts(errors)
    lp = model.log_probs
    out = np.zeros(counts.shape[0])
    for i in range(4):
        nz = counts[:, i] > 0
        out[nz] += counts[nz, i] * lp[i]
    return out


def error_probability(model: PauliChannel, error: PauliOperator) -> float:
    """Log-probability of ``error``; ``-inf`` when impossible."""
    return float(log_prob_batch(model, error.to_symplectic()[None])[0])


# ---------------------------------------------------------------------------
# labelled samples


@dataclass
class LabeledSample:
    """One configuration (1-D arrays) or a batch of them (2-D, shots first).

    ``alpha`` is ``None`` for detector-error-model samples.
    """

    beta: np.ndarray
    gamma: np.ndarray
    alpha: np.ndarray | None = None

    @property
    def bits(self) -> np.ndarray:
        """Network input ordering: syndrome bits, then logical bits."""
        return np.concatenate([self.gamma, self.beta], axis=-1)

    def __len__(self):
        return 1 if self.gamma.ndim == 1 else self.gamma.shape[0]


def sample_code_capacity(frame: ElsFrame, model: PauliChannel, rng: np.random.Generator,
                         shots: int | None = None) -> LabeledSample:
    errors = sample_errors(model, frame.n, 1 if shots is None else shots, rng)
    alpha, beta, gamma = frame.decompose_batch(errors)
    if shots is None:
        return LabeledSample(beta[0], gamma[0], alpha[0])
    return LabeledSample(beta, gamma, alpha)


def sample_dem(dem: DetectorErrorModel, rng: np.random.Generator,
               shots: int | None = None, chunk: int = 100_000) -> LabeledSample:
    total = 1 if shots is None else shots
    gammas, betas = [], []
    dmat = dem.detector_matrix.astype(np.float32)
    omat = dem.observable_matrix.astype(np.float32)
    for start in range(0, total, chunk):
        size = min(chunk, total - start)
        fired = (rng.random((size, len(dem.mechanisms))) < dem.probabilities).astype(np.float32)
        gammas.append(((fired @ dmat).astype(np.int64) & 1).astype(np.uint8))
        betas.append(((fired @ omat).astype(np.int64) & 1).astype(np.uint8))
    gamma = np.concatenate(gammas) if gammas else np.zeros((0, dem.num_detectors), np.uint8)
    beta = np.concatenate(betas) if betas else np.zeros((0, dem.num_observables), np.uint8)
    if shots is None:
        return LabeledSample(beta[0], gamma[0])
    return LabeledSample(beta, gamma)


class Source:
    """Anything that yields labelled (gamma, beta) batches: a code under a
    Pauli channel, or a detector error model."""

    def __init__(self, frame: ElsFrame | None = None, model: PauliChannel | None = None,
                 dem: DetectorErrorModel | None = None):
        if (dem is None) == (frame is None):
            raise ValueError("give exactly one of frame or dem")
        if frame is not None and model is None:
            raise ValueError("a code source needs a noise model")
        self.frame, self.model, self.dem = frame, model, dem

    @property
    def n_syndrome(self) -> int:
        return self.dem.num_detectors if self.dem else self.frame.m

    @property
    def n_logical(self) -> int:
        return self.dem.num_observables if self.dem else 2 * self.frame.k

    @property
    def n_bits(self) -> int:
        return self.n_syndrome + self.n_logical

    def sample(self, rng: np.random.Generator, shots: int) -> LabeledSample:
        if self.dem is not None:
            return sample_dem(self.dem, rng, shots)
        return sample_code_capacity(self.frame, self.model, rng, shots)

    def with_p(self, p: float) -> Source:
        if self.dem is not None:
            raise ValueError("detector error models carry fixed probabilities")
        return Source(self.frame, self.model.with_p(p))

    def fingerprint(self) -> str:
        if self.dem is not None:
            return "dem-" + hashlib.sha256(serialize_dem(self.dem).encode()).hexdigest()[:16]
        return self.frame.fingerprint()


def sample_stream(source: Source, batch_size: int, seed: int,
                  start: int = 0) -> Iterator[np.ndarray]:
    """Endless ``(batch_size, n_bits)`` batches; batch ``t`` uses stream ``(seed, t)``."""
    t = start
    while True:
        yield source.sample(make_rng(seed, t), batch_size).bits
        t += 1


def check_width(bits: np.ndarray, n_bits: int) -> None:
    if bits.shape[-1] != n_bits:
        raise DimensionError(f"sample width {bits.shape[-1]} != model input {n_bits}")
