"""Detector error models: a flat subset of the Stim ``.dem`` text format.

Supported statements, one per line (``#`` starts a comment)::

    error(<p>) D<i> ... L<j> ...
    detector D<i>
    logical_observable L<j>
    shift_detectors <s>

``^`` separators inside ``error`` targets are accepted and ignored, since
detector flips compose by XOR anyway.  ``repeat`` blocks, coordinate
arguments and tags are rejected.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

MAX_INDEX = 1 << 24


class DemParseError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        self.reason = message
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class ErrorMechanism:
    probability: float
    detectors: tuple[int, ...]
    observables: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.probability < 1.0:
            raise ValueError(f"probability {self.probability} not in (0, 1)")
        for name in ("detectors", "observables"):
            idx = tuple(sorted(int(i) for i in getattr(self, name)))
            if len(set(idx)) != len(idx):
                raise ValueError(f"duplicate {name} in mechanism")
            object.__setattr__(self, name, idx)


class DetectorErrorModel:
    def __init__(self, mechanisms, num_detectors: int | None = None,
                 num_observables: int | None = None):
        self.mechanisms = tuple(mechanisms)
        used_d = max((max(m.detectors, default=-1) for m in self.mechanisms), default=-1) + 1
        used_l = max((max(m.observables, default=-1) for m in self.mechanisms), default=-1) + 1
        self.num_detectors = used_d if num_detectors is None else int(num_detectors)
        self.num_observables = used_l if num_observables is None else int(num_observables)
        if used_d > self.num_detectors or used_l > self.num_observables:
            raise ValueError("mechanism index exceeds declared detector/observable count")

    @property
    def n_bits(self) -> int:
        return self.num_detectors + self.num_observables

    @cached_property
    def probabilities(self) -> np.ndarray:
        return np.array([m.probability for m in self.mechanisms], dtype=np.float64)

    @cached_property
    def detector_matrix(self) -> np.ndarray:
        """``(num_mechanisms, num_detectors)`` incidence matrix."""
        out = np.zeros((len(self.mechanisms), self.num_detectors), dtype=np.uint8)
        for i, m in enumerate(self.mechanisms):
            out[i, list(m.detectors)] = 1
        return out

    @cached_property
    def observable_matrix(self) -> np.ndarray:
        out = np.zeros((len(self.mechanisms), self.num_observables), dtype=np.uint8)
        for i, m in enumerate(self.mechanisms):
            out[i, list(m.observables)] = 1
        return out

    def detector_marginals(self) -> np.ndarray:
        """Exact P(D_i = 1) for independent mechanisms (XOR of Bernoullis)."""
        prod = np.ones(self.num_detectors)
        for m in self.mechanisms:
            prod[list(m.detectors)] *= 1.0 - 2.0 * m.probability
        return 0.5 * (1.0 - prod)

    def __eq__(self, other):
        if not isinstance(other, DetectorErrorModel):
            return NotImplemented
        return (
            self.num_detectors == other.num_detectors
            and self.num_observables == other.num_observables
            and self.mechanisms == other.mechanisms
        )

    def __repr__(self):
        return (f"DetectorErrorModel({len(self.mechanisms)} mechanisms, "
                f"{self.num_detectors} detectors, {self.num_observables} observables)")


_ERROR_RE = re.compile(r"error\(([^()]*)\)")
_TARGET_RE = re.compile(r"([DL])([0-9]+)")


def _index(tok: str, lineno: int) -> int:
    value = int(tok)
    if value >= MAX_INDEX:
        raise DemParseError(f"index overflow: {value}", lineno)
    return value


def parse_dem(text: str | bytes) -> DetectorErrorModel:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DemParseError(f"not valid UTF-8 text ({exc.reason})", 1) from None
    mechanisms = []
    n_det = n_obs = 0
    offset = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head.startswith("error"):
            mt = _ERROR_RE.fullmatch(head)
            if not mt:
                raise DemParseError(f"malformed error statement {head!r}", lineno)
            try:
                p = float(mt.group(1))
            except ValueError:
                raise DemParseError(f"malformed float {mt.group(1)!r}", lineno) from None
            if not 0.0 < p < 1.0:
                raise DemParseError("probability out of range", lineno)
            dets: dict[int, int] = {}
            obs: dict[int, int] = {}
            for tok in rest:
                if tok == "^":
                    continue
                tm = _TARGET_RE.fullmatch(tok)
                if not tm:
                    raise DemParseError(f"bad target {tok!r}", lineno)
                idx = _index(tm.group(2), lineno)
                if tm.group(1) == "D":
                    idx += offset
                    if idx >= MAX_INDEX:
                        raise DemParseError(f"index overflow: {idx}", lineno)
                    dets[idx] = dets.get(idx, 0) ^ 1
                else:
                    obs[idx] = obs.get(idx, 0) ^ 1
            if len(dets) + len(obs) < sum(1 for t in rest if t != "^"):
                warnings.warn(f"line {lineno}: repeated targets cancelled pairwise", stacklevel=2)
            d_set = tuple(sorted(i for i, v in dets.items() if v))
            o_set = tuple(sorted(i for i, v in obs.items() if v))
            if dets:
                n_det = max(n_det, max(dets) + 1)
            if obs:
                n_obs = max(n_obs, max(obs) + 1)
            mechanisms.append(ErrorMechanism(p, d_set, o_set))
        elif head == "detector":
            if len(rest) != 1 or not re.fullmatch(r"D[0-9]+", rest[0]):
                raise DemParseError("expected 'detector D<i>'", lineno)
            idx = _index(rest[0][1:], lineno) + offset
            if idx >= MAX_INDEX:
                raise DemParseError(f"index overflow: {idx}", lineno)
            n_det = max(n_det, idx + 1)
        elif head == "logical_observable":
            if len(rest) != 1 or not re.fullmatch(r"L[0-9]+", rest[0]):
                raise DemParseError("expected 'logical_observable L<j>'", lineno)
            n_obs = max(n_obs, _index(rest[0][1:], lineno) + 1)
        elif head == "shift_detectors":
            if len(rest) != 1 or not re.fullmatch(r"[0-9]+", rest[0]):
                raise DemParseError("expected 'shift_detectors <uint>'", lineno)
            offset += _index(rest[0], lineno)
            if offset >= MAX_INDEX:
                raise DemParseError(f"index overflow: {offset}", lineno)
        else:
            raise DemParseError(f"unsupported statement {head!r}", lineno)
    return DetectorErrorModel(mechanisms, n_det, n_obs)


def serialize_dem(dem: DetectorErrorModel) -> str:
    """Canonical text: absolute indices, every detector/observable declared."""
    lines = [
        f"# {len(dem.mechanisms)} mechanisms, {dem.num_detectors} detectors, "
        f"{dem.num_observables} observables"
    ]
    for m in dem.mechanisms:
        targets = [f"D{i}" for i in m.detectors] + [f"L{j}" for j in m.observables]
        lines.append(" ".join([f"error({m.probability:.17g})"] + targets))
    lines += [f"detector D{i}" for i in range(dem.num_detectors)]
    lines += [f"logical_observable L{j}" for j in range(dem.num_observables)]
    return "\n".join(lines) + "\n"


def load_dem(path) -> DetectorErrorModel:
    return parse_dem(Path(path).read_text())


def bundled_dem_paths() -> list[Path]:
    return sorted((Path(__file__).parent / "data").glob("*.dem"))
