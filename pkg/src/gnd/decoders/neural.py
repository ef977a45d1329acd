"""Neural decoders: generative (GND, sequential argmax over a MADE model)
and marginal (MND, independent thresholds from a dense classifier)."""
from __future__ import annotations

import time

import numpy as np

from ..made import FingerprintMismatch, MadeConfig, MadeNetwork, MndNetwork, TrainLog, train
from ..pauli import DimensionError
from .base import DecodeResult, Decoder


def gnd_decode(net: MadeNetwork, gamma, n_syndrome: int | None = None,
               expect_fingerprint: str | None = None) -> DecodeResult:
    """Sequential argmax over the logical bits.

    Works on one syndrome or a batch; either way exactly ``n_in - m`` (= 2k)
    forward passes are made.  ``p == 0.5`` decodes to 0.
    """
    if expect_fingerprint is not None and net.fingerprint != expect_fingerprint:
        raise FingerprintMismatch(
            f"network trained for {net.fingerprint}, decoder expects {expect_fingerprint}"
        )
    gamma = np.asarray(gamma)
    single = gamma.ndim == 1
    gamma = np.atleast_2d(gamma)
    m = gamma.shape[1] if n_syndrome is None else n_syndrome
    if gamma.shape[1] != m or m >= net.n_in:
        raise DimensionError(f"syndrome length {gamma.shape[1]} does not fit a {net.n_in}-input model")
    start = time.perf_counter()
    x = np.zeros((gamma.shape[0], net.n_in), dtype=net.config.dtype)
    x[:, :m] = gamma
    cond = np.empty((gamma.shape[0], net.n_in - m))
    for i in range(m, net.n_in):
        p = net.forward(x)[:, i]
        cond[:, i - m] = p
        x[:, i] = p > 0.5
    beta = x[:, m:].astype(np.uint8)
    seconds = time.perf_counter() - start
    if single:
        return DecodeResult(beta[0], cond[0], seconds)
    return DecodeResult(beta, cond, seconds)


class GndDecoder(Decoder):
    name = "gnd"

    def __init__(self, net: MadeNetwork, n_syndrome: int, expect_fingerprint: str | None = None):
        if expect_fingerprint is not None and net.fingerprint != expect_fingerprint:
            raise FingerprintMismatch(
                f"network trained for {net.fingerprint}, decoder expects {expect_fingerprint}"
            )
        super().__init__(n_syndrome, net.n_in - n_syndrome)
        self.net = net

    def _decode_batch(self, gammas):
        return gnd_decode(self.net, gammas, self.n_syndrome).beta_hat

    def decode_result(self, gamma) -> DecodeResult:
        gamma = self._prepare(gamma)[0]
        return gnd_decode(self.net, gamma, self.n_syndrome)

    def describe(self):
        cfg = self.net.config
        return {"decoder": self.name, "depth": cfg.depth, "width": cfg.width,
                "parameters": self.net.num_parameters()}


def mnd_decode(net: MndNetwork, gamma) -> np.ndarray:
    """Independent thresholding of the logical marginals (ties to 0)."""
    return (net.forward(gamma) > 0.5).astype(np.uint8)


class MndDecoder(Decoder):
    name = "mnd"

    def __init__(self, net: MndNetwork):
        super().__init__(net.n_in, net.n_out)
        self.net = net

    def _decode_batch(self, gammas):
        return mnd_decode(self.net, gammas)

    def describe(self):
        return {"decoder": self.name, "depth": self.net.config.depth,
                "hidden": self.net.config.hidden_size, "parameters": self.net.num_parameters()}


def mnd_parameter_count(n_in: int, n_out: int, depth: int, hidden: int) -> int:
    return n_in * hidden + hidden + (depth - 1) * (hidden * hidden + hidden) + hidden * n_out + n_out


def matched_mnd_config(made: MadeConfig, n_syndrome: int, budget: int | None = None) -> MadeConfig:
    """MND config with the same depth and training schedule as ``made``, and
    the hidden size whose parameter count is closest to ``budget`` (default:
    the MADE network's total weight-tensor size)."""
    n_out = made.n_in - n_syndrome
    if budget is None:
        budget = MadeNetwork(made).num_parameters()
    best = min(range(1, 4 * made.hidden_size + 2),
               key=lambda h: abs(mnd_parameter_count(n_syndrome, n_out, made.depth, h) - budget))
    return MadeConfig(
        n_in=n_syndrome, n_out=n_out, depth=made.depth, width=made.width, hidden=best,
        learning_rate=made.learning_rate, batch_size=made.batch_size,
        train_steps=made.train_steps, seed=made.seed, precision=made.precision,
        log_every=made.log_every,
    )


def mnd_train(config: MadeConfig, sample_stream, fingerprint: str = "",
              callback=None) -> tuple[MndNetwork, TrainLog]:
    """Train the marginal baseline on ``[gamma, beta]`` rows from the stream."""
    net = MndNetwork(config, fingerprint=fingerprint)
    return train(config, sample_stream, net=net, callback=callback)
