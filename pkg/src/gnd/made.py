"""Masked autoregressive density estimation (MADE) in plain numpy.

The model reads the bit string ``(gamma_1 .. gamma_m, beta_1 .. beta_2k)`` and
outputs ``p_i = P(bit_i = 1 | bits_<i)`` at every position.  Gradients are
written out by hand; there is no autodiff dependency.

:class:`MaskedNetwork` is the shared dense machinery (masked affine layers,
ReLU hidden units, sigmoid outputs, BCE loss).  :class:`MadeNetwork` adds the
autoregressive masks; :class:`MndNetwork` uses full masks and maps a syndrome
to independent logical-bit marginals.
"""
from __future__ import annotations

import json
import struct
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .noise import LabeledSample, make_rng
from .pauli import DimensionError

EPS_CLIP = 1e-7
MAGIC = b"GNDCKPT1"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Unreadable, truncated or incompatible checkpoint file."""


class FingerprintMismatch(CheckpointError):
    pass


@dataclass
class MadeConfig:
    n_in: int
    depth: int = 2
    width: int = 8
    learning_rate: float = 1e-3
    batch_size: int = 512
    train_steps: int = 10_000
    seed: int = 0
    precision: str = "double"
    log_every: int = 100
    # overrides used by the marginal baseline; None keeps the MADE defaults
    n_out: int | None = None
    hidden: int | None = None

    def __post_init__(self):
        if self.n_in < 1:
            raise ValueError("n_in must be positive")
        if self.depth < 1 or self.width < 1:
            raise ValueError("depth and width must be >= 1")
        if self.precision not in ("double", "single"):
            raise ValueError(f"precision must be 'double' or 'single', not {self.precision!r}")
        if self.batch_size < 1 or self.train_steps < 0:
            raise ValueError("batch_size must be >= 1 and train_steps >= 0")

    @property
    def hidden_size(self) -> int:
        return self.hidden if self.hidden is not None else self.width * self.n_in

    @property
    def out_size(self) -> int:
        return self.n_out if self.n_out is not None else self.n_in

    @property
    def dtype(self):
        return np.float64 if self.precision == "double" else np.float32

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> MadeConfig:
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


def hidden_degrees(n_in: int, size: int) -> np.ndarray:
    """Cyclic degrees 1 .. n_in-1 (all 1 when n_in < 2)."""
    return np.arange(size) % max(n_in - 1, 1) + 1


def build_masks(config: MadeConfig, rng: np.random.Generator | None = None):
    """Autoregressive masks (shape ``(out, in)``) and per-layer degrees.

    ``rng`` is accepted for interface symmetry; the cyclic assignment is
    deterministic.
    """
    n = config.n_in
    degrees = [np.arange(1, n + 1)]
    masks = []
    for _ in range(config.depth):
        deg = hidden_degrees(n, config.hidden_size)
        # input j has degree j+1, so both layer kinds use deg(h') >= deg(h)
        masks.append((deg[:, None] >= degrees[-1][None, :]).astype(np.uint8))
        degrees.append(deg)
    # 0-based output i sees hidden units of degree <= i, i.e. inputs j < i
    out = np.arange(n)
    masks.append((out[:, None] >= degrees[-1][None, :]).astype(np.uint8))
    return masks, degrees


def full_masks(n_in: int, n_out: int, depth: int, hidden: int) -> list[np.ndarray]:
    sizes = [n_in] + [hidden] * depth + [n_out]
    return [np.ones((b, a), dtype=np.uint8) for a, b in zip(sizes[:-1], sizes[1:])]


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _log_sigmoid(z):
    return -np.logaddexp(0.0, -z)


class MaskedNetwork:
    """Masked MLP: ``depth`` ReLU layers then a sigmoid output layer."""

    kind = "dense"

    def __init__(self, config: MadeConfig, masks, params=None, fingerprint: str = ""):
        self.config = config
        self.masks = [m.astype(config.dtype) for m in masks]
        self.fingerprint = fingerprint
        self.n_forward = 0
        self.n_forward_rows = 0
        if params is None:
            rng = make_rng(config.seed, 0)
            params = []
            for mask in self.masks:
                fan_in = np.maximum(mask.sum(1, keepdims=True), 1)
                bound = 1.0 / np.sqrt(fan_in)
                w = rng.uniform(-1.0, 1.0, mask.shape) * bound * mask
                params += [w, np.zeros(mask.shape[0])]
        self.params = [np.ascontiguousarray(p, dtype=config.dtype) for p in params]
        for w, mask in zip(self.params[::2], self.masks):
            if w.shape != mask.shape:
                raise DimensionError(f"weight shape {w.shape} does not match mask {mask.shape}")

    @property
    def n_in(self) -> int:
        return self.masks[0].shape[1]

    @property
    def n_out(self) -> int:
        return self.masks[-1].shape[0]

    def num_parameters(self, effective: bool = False) -> int:
        """Total tensor size, or only unmasked weights plus biases."""
        if not effective:
            return sum(p.size for p in self.params)
        return sum(int(m.sum()) + m.shape[0] for m in self.masks)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=self.config.dtype)
        if x.shape[-1] != self.n_in:
            raise DimensionError(f"input width {x.shape[-1]} != network input {self.n_in}")
        return x

    def logits(self, x, cache: list | None = None) -> np.ndarray:
        x = self._check(x)
        single = x.ndim == 1
        h = np.atleast_2d(x)
        self.n_forward += 1
        self.n_forward_rows += h.shape[0]
        if cache is not None:
            cache.append(h)
        n_layers = len(self.masks)
        for li in range(n_layers):
            w, b = self.params[2 * li], self.params[2 * li + 1]
            a = h @ (w * self.masks[li]).T + b
            if li < n_layers - 1:
                h = np.maximum(a, 0.0)
                if cache is not None:
                    cache.append(h)
            else:
                h = a
        return h[0] if single else h

    def forward(self, x) -> np.ndarray:
        return _sigmoid(self.logits(x))

    __call__ = forward

    def _targets_inputs(self, batch):
        raise NotImplementedError

    def loss_and_grads(self, batch, need_grads: bool = True):
        """Mean BCE over the batch and its exact gradients."""
        x, y = self._targets_inputs(batch)
        cache: list = []
        z = self.logits(x, cache)
        p = _sigmoid(z)
        pc = np.clip(p, EPS_CLIP, 1.0 - EPS_CLIP)
        bsz = y.shape[0]
        loss = float(-(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)).sum() / bsz)
        if not need_grads:
            return loss, None
        inside = (p > EPS_CLIP) & (p < 1.0 - EPS_CLIP)
        delta = (p - y) * inside / bsz
        grads = [None] * len(self.params)
        for li in range(len(self.masks) - 1, -1, -1):
            h_prev = cache[li]
            mask = self.masks[li]
            grads[2 * li] = (delta.T @ h_prev) * mask
            grads[2 * li + 1] = delta.sum(0)
            if li:
                delta = (delta @ (self.params[2 * li] * mask)) * (cache[li] > 0)
        return loss, grads


class MadeNetwork(MaskedNetwork):
    kind = "made"

    def __init__(self, config: MadeConfig, params=None, fingerprint: str = ""):
        if config.n_out not in (None, config.n_in):
            raise ValueError("a MADE network has as many outputs as inputs")
        masks, degrees = build_masks(config)
        self.degrees = degrees
        super().__init__(config, masks, params, fingerprint)

    def _targets_inputs(self, batch):
        bits = batch.bits if isinstance(batch, LabeledSample) else batch
        bits = np.atleast_2d(self._check(bits))
        if bits.shape[0] == 0:
            raise ValueError("empty batch")
        return bits, bits

    def log_prob(self, bits) -> np.ndarray:
        """``log q(bits)`` per row, with exact log-sigmoids (no clipping)."""
        bits = np.atleast_2d(self._check(bits))
        z = self.logits(bits)
        return (bits * _log_sigmoid(z) + (1.0 - bits) * _log_sigmoid(-z)).sum(1)


class MndNetwork(MaskedNetwork):
    """Dense syndrome -> logical-marginal classifier (inputs gamma, outputs beta)."""

    kind = "mnd"

    def __init__(self, config: MadeConfig, params=None, fingerprint: str = ""):
        if config.n_out is None:
            raise ValueError("MND config needs n_out = 2k")
        masks = full_masks(config.n_in, config.n_out, config.depth, config.hidden_size)
        super().__init__(config, masks, params, fingerprint)

    def _targets_inputs(self, batch):
        if isinstance(batch, LabeledSample):
            return np.atleast_2d(self._check(batch.gamma)), np.atleast_2d(batch.beta).astype(self.config.dtype)
        batch = np.atleast_2d(np.asarray(batch, dtype=self.config.dtype))
        return self._check(batch[:, : self.n_in]), batch[:, self.n_in:]


NETWORK_KINDS = {"made": MadeNetwork, "mnd": MndNetwork}


# ---------------------------------------------------------------------------
# functional interface


def forward(net: MaskedNetwork, bits) -> np.ndarray:
    return net.forward(bits)


def nll_loss(net: MaskedNetwork, batch) -> float:
    return net.loss_and_grads(batch, need_grads=False)[0]


def backward(net: MaskedNetwork, batch) -> list[np.ndarray]:
    return net.loss_and_grads(batch)[1]


def conditional(net: MadeNetwork, prefix_bits, position: int) -> float:
    """``p_i`` with bits at and after ``position`` zero-padded."""
    if not 0 <= position < net.n_in:
        raise IndexError(f"position {position} outside 0..{net.n_in - 1}")
    padded = np.zeros(net.n_in, dtype=net.config.dtype)
    prefix = np.asarray(prefix_bits, dtype=net.config.dtype)[:position]
    padded[: prefix.size] = prefix
    return float(net.forward(padded)[position])


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def like(cls, params) -> AdamState:
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(params, grads, state: AdamState, lr: float):
    """Bias-corrected Adam; updates ``params`` in place and returns them."""
    if len(params) != len(grads) or any(p.shape != g.shape for p, g in zip(params, grads)):
        raise DimensionError("parameter and gradient shapes differ")
    state.t += 1
    c1 = 1.0 - state.beta1 ** state.t
    c2 = 1.0 - state.beta2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params


@dataclass
class TrainLog:
    steps: list = field(default_factory=list)
    losses: list = field(default_factory=list)
    smoothed: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def final(self) -> float:
        return self.smoothed[-1] if self.smoothed else float("nan")


def train(config: MadeConfig, sample_stream: Iterable, net: MaskedNetwork | None = None,
          fingerprint: str = "", ema: float = 0.98, callback=None):
    """Minibatch Adam on fresh batches from ``sample_stream``.

    Returns ``(net, log)``; the log records the raw and exponentially
    smoothed loss every ``config.log_every`` steps (and at the last step).
    """
    if net is None:
        net = MadeNetwork(config, fingerprint=fingerprint)
    state = AdamState.like(net.params)
    log = TrainLog()
    avg = None
    start = time.perf_counter()
    stream = iter(sample_stream)
    for step in range(1, config.train_steps + 1):
        batch = next(stream)
        loss, grads = net.loss_and_grads(batch)
        adam_step(net.params, grads, state, config.learning_rate)
        avg = loss if avg is None else ema * avg + (1.0 - ema) * loss
        if step % config.log_every == 0 or step == config.train_steps or step == 1:
            log.steps.append(step)
            log.losses.append(loss)
            log.smoothed.append(avg)
            if callback is not None:
                callback(step, loss, avg)
    log.seconds = time.perf_counter() - start
    return net, log


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(net: MaskedNetwork, path, extra: dict | None = None) -> None:
    tensors = []
    blobs = []
    for i, p in enumerate(net.params):
        arr = np.ascontiguousarray(p).astype(p.dtype.newbyteorder("<"), copy=False)
        tensors.append({"name": f"p{i}", "shape": list(arr.shape), "dtype": arr.dtype.str})
        blobs.append(arr.tobytes())
    header = {
        "format": FORMAT_VERSION,
        "kind": net.kind,
        "config": net.config.to_dict(),
        "fingerprint": net.fingerprint,
        "tensors": tensors,
        "extra": extra or {},
    }
    raw = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(raw)))
        fh.write(raw)
        for blob in blobs:
            fh.write(blob)


def read_checkpoint_header(path) -> dict:
    return _read(path)[0]


def _read(path):
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    if len(data) < 16:
        raise CheckpointError("corrupt checkpoint: truncated header")
    (hlen,) = struct.unpack("<Q", data[8:16])
    if 16 + hlen > len(data):
        raise CheckpointError("corrupt checkpoint: truncated header")
    try:
        header = json.loads(data[16:16 + hlen])
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"corrupt checkpoint header: {exc}") from None
    if header.get("format") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format {header.get('format')!r}")
    return header, data[16 + hlen:]


def load_checkpoint(path, expect_fingerprint: str | None = None) -> MaskedNetwork:
    header, body = _read(path)
    if expect_fingerprint is not None and header["fingerprint"] != expect_fingerprint:
        raise FingerprintMismatch(
            f"checkpoint was trained for {header['fingerprint']}, not {expect_fingerprint}"
        )
    try:
        cls = NETWORK_KINDS[header["kind"]]
        config = MadeConfig.from_dict(header["config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"corrupt checkpoint header: {exc}") from None
    params = []
    offset = 0
    for t in header["tensors"]:
        dtype = np.dtype(t["dtype"])
        count = int(np.prod(t["shape"], dtype=np.int64))
        size = count * dtype.itemsize
        if offset + size > len(body):
            raise CheckpointError("corrupt checkpoint: truncated tensor data")
        arr = np.frombuffer(body, dtype=dtype, count=count, offset=offset).reshape(t["shape"])
        params.append(arr.astype(dtype.newbyteorder("="), copy=True))
        offset += size
    if offset != len(body):
        raise CheckpointError("corrupt checkpoint: trailing bytes after tensors")
    try:
        return cls(config, params=params, fingerprint=header["fingerprint"])
    except DimensionError as exc:
        raise CheckpointError(f"corrupt checkpoint: {exc}") from None
