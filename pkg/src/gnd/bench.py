"""Monte Carlo logical-error-rate estimation, sweeps and result files.

Every chunk of shots draws from its own counter-based stream keyed by
``(seed, p, task, chunk)``, so failure counts do not depend on the number of
worker threads, and all decoders evaluated at one error rate see the same
errors.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .decoders import BpOsdDecoder, ExactMldDecoder, GndDecoder, MndDecoder
from .decoders.base import Decoder
from .made import load_checkpoint
from .noise import Source, make_rng
from .pauli import DimensionError

Z95 = 1.959963984540054
CSV_COLUMNS = ["code", "decoder", "p", "shots", "failures", "ler", "ci_lo", "ci_hi", "latency_s"]


def wilson_interval(failures: int, shots: int, z: float = Z95) -> tuple[float, float]:
    if shots <= 0:
        return 0.0, 1.0
    q = failures / shots
    denom = 1.0 + z * z / shots
    centre = (q + z * z / (2 * shots)) / denom
    half = z * math.sqrt(q * (1 - q) / shots + z * z / (4 * shots * shots)) / denom
    lo = 0.0 if failures == 0 else max(0.0, centre - half)
    hi = 1.0 if failures == shots else min(1.0, centre + half)
    return lo, hi


@dataclass
class BenchmarkRow:
    code: str
    decoder: str
    p: float
    shots: int
    failures: int
    ler: float
    ci_lo: float
    ci_hi: float
    latency_s: float
    task_failures: list = field(default_factory=list)
    status: str = "ok"
    message: str = ""

    @property
    def task_std(self) -> float:
        """Spread of the per-task LER estimates."""
        if len(self.task_failures) < 2:
            return float("nan")
        per = self.shots / len(self.task_failures)
        return float(np.std(np.array(self.task_failures) / per, ddof=1))

    def csv_row(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


def _p_key(p: float | None) -> int:
    return 0 if p is None or not np.isfinite(p) else int(round(p * 1e12))


def estimate_ler(source: Source, decoder: Decoder, shots: int, seed: int, p: float | None = None,
                 tasks: int = 1, chunk: int = 10_000, threads: int = 1, code_name: str = "",
                 decoder_name: str | None = None) -> BenchmarkRow:
    """Sample, decode and count sector failures (any mismatching bit).

    ``shots`` is per task.  Latency is decode wall time per shot and excludes
    sampling.
    """
    if shots < 1 or tasks < 1:
        raise ValueError("shots and tasks must be >= 1")
    if decoder.n_syndrome != source.n_syndrome or decoder.n_logical != source.n_logical:
        raise DimensionError(
            f"decoder expects ({decoder.n_syndrome}, {decoder.n_logical}) bits, "
            f"source gives ({source.n_syndrome}, {source.n_logical})"
        )
    if p is not None and source.dem is None:
        source = source.with_p(p)
    jobs = [(t, c, min(chunk, shots - c * chunk)) for t in range(tasks)
            for c in range(math.ceil(shots / chunk))]

    def run(job):
        t, c, size = job
        sample = source.sample(make_rng(seed, _p_key(p), t, c), size)
        start = time.perf_counter()
        beta_hat = decoder.decode_batch(sample.gamma)
        elapsed = time.perf_counter() - start
        return t, int((beta_hat != sample.beta).any(1).sum()), elapsed

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    per_task = [0] * tasks
    seconds = 0.0
    for t, fails, elapsed in results:
        per_task[t] += fails
        seconds += elapsed
    total = shots * tasks
    failures = sum(per_task)
    lo, hi = wilson_interval(failures, total)
    return BenchmarkRow(
        code=code_name, decoder=decoder_name or decoder.name, p=float("nan") if p is None else p,
        shots=total, failures=failures, ler=failures / total, ci_lo=lo, ci_hi=hi,
        latency_s=seconds / total, task_failures=per_task,
    )


@dataclass
class ExperimentConfig:
    code: str | None = None
    dem: str | None = None
    noise: str = "depolarizing"
    error_rates: list = field(default_factory=list)
    decoders: list = field(default_factory=lambda: ["mld"])
    shots: int = 10_000
    tasks: int = 1
    seed: int = 0
    chunk: int = 10_000
    threads: int = 1
    output: str | None = None

    def __post_init__(self):
        if (self.code is None) == (self.dem is None):
            raise ValueError("give exactly one of code or dem")
        if self.shots < 1 or self.tasks < 1:
            raise ValueError("shots and tasks must be >= 1")
        for p in self.error_rates:
            if not 0.0 < float(p) < 1.0:
                raise ValueError(f"error rate {p} outside (0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def decoder_factory(source: Source) -> Callable[[str, float | None], Decoder]:
    """Build decoders from spec strings.

    ``mld`` and ``bposd`` are rebuilt for each error rate; ``gnd:<ckpt>`` and
    ``mnd:<ckpt>`` load a trained network once (checked against the source
    fingerprint) and reuse it at every rate.
    """
    loaded: dict[str, Decoder] = {}

    def make(spec: str, p: float | None) -> Decoder:
        kind, _, arg = spec.partition(":")
        if kind in ("gnd", "mnd"):
            if not arg:
                raise ValueError(f"decoder spec {spec!r} needs a checkpoint path")
            if spec not in loaded:
                net = load_checkpoint(arg, expect_fingerprint=source.fingerprint())
                if kind == "gnd":
                    loaded[spec] = GndDecoder(net, source.n_syndrome)
                else:
                    loaded[spec] = MndDecoder(net)
            return loaded[spec]
        if kind == "bposd":
            if source.dem is not None:
                return BpOsdDecoder.for_dem(source.dem)
            return BpOsdDecoder.for_code(source.frame, source.model.with_p(p))
        if kind == "mld":
            if source.dem is not None:
                raise ValueError("exact MLD is only defined for code-capacity sources")
            return ExactMldDecoder(source.frame, source.model.with_p(p))
        raise ValueError(f"unknown decoder {spec!r}")

    return make


def row_id(decoder: str, p: float | None) -> str:
    label = "".join(ch if ch.isalnum() else "_" for ch in decoder)
    return f"{label}-p{'na' if p is None else format(p, '.6g')}"


def sweep(config: ExperimentConfig, source: Source, make_decoder: Callable[[str, float | None], Decoder],
          run_dir=None, code_name: str = "", log: Callable[[str], None] | None = None) -> list[BenchmarkRow]:
    """Rows for every (error rate, decoder) pair in config order.

    With ``run_dir`` set, finished rows are stored under ``rows/`` and
    skipped on a rerun.  A decoder that raises produces a flagged row and the
    sweep carries on.
    """
    rows = []
    rows_dir = None
    if run_dir is not None:
        rows_dir = Path(run_dir) / "rows"
        rows_dir.mkdir(parents=True, exist_ok=True)
        (Path(run_dir) / "run.json").write_text(json.dumps(config.to_dict(), indent=2))
    rates = list(config.error_rates) if source.dem is None else [None]
    for p in rates:
        for spec in config.decoders:
            rid = row_id(spec, p)
            marker = rows_dir / f"{rid}.json" if rows_dir else None
            if marker is not None and marker.exists():
                data = json.loads(marker.read_text())
                if data.get("status") == "ok":
                    rows.append(BenchmarkRow(**data))
                    continue
            try:
                decoder = make_decoder(spec, p)
                row = estimate_ler(source, decoder, config.shots, config.seed, p=p,
                                   tasks=config.tasks, chunk=config.chunk, threads=config.threads,
                                   code_name=code_name, decoder_name=spec.split(":")[0])
            except Exception as exc:  # keep going; the row records what happened
                row = BenchmarkRow(code_name, spec.split(":")[0], float("nan") if p is None else p,
                                   0, 0, float("nan"), float("nan"), float("nan"), float("nan"),
                                   status="error", message=f"{type(exc).__name__}: {exc}")
            if log is not None:
                log(f"{row.decoder:>8s} p={row.p:<8.4g} ler={row.ler:.5g} "
                    f"[{row.ci_lo:.3g}, {row.ci_hi:.3g}] {row.status}")
            if marker is not None:
                marker.write_text(json.dumps(asdict(row)))
            rows.append(row)
    return rows


def emit_results(rows: list[BenchmarkRow], path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".") or "csv"
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, CSV_COLUMNS)
            writer.writeheader()
            for r in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.csv_row().items()})
    elif fmt == "json":
        path.write_text(json.dumps([asdict(r) for r in rows], indent=2))
    else:
        raise ValueError(f"unknown result format {fmt!r}")


def read_results(path) -> list[BenchmarkRow]:
    path = Path(path)
    if path.suffix == ".json":
        return [BenchmarkRow(**d) for d in json.loads(path.read_text())]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = set(CSV_COLUMNS) - set(reader.fieldnames)
        if missing:
            raise ValueError(f"result file lacks columns {sorted(missing)}")
        out = []
        for rec in reader:
            out.append(BenchmarkRow(
                code=rec["code"], decoder=rec["decoder"], p=float(rec["p"]),
                shots=int(rec["shots"]), failures=int(rec["failures"]), ler=float(rec["ler"]),
                ci_lo=float(rec["ci_lo"]), ci_hi=float(rec["ci_hi"]),
                latency_s=float(rec["latency_s"]),
            ))
    return out


def emit_plot(rows: list[BenchmarkRow], path, title: str | None = None) -> None:
    """Log-log LER curves with Wilson bands, one series per decoder."""
    rows = [r for r in rows if r.status == "ok" and np.isfinite(r.p)]
    if not rows:
        raise ValueError("nothing to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    order = list(dict.fromkeys(r.decoder for r in rows))
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    for name in order:
        series = sorted((r for r in rows if r.decoder == name), key=lambda r: r.p)
        p = np.array([r.p for r in series])
        ler = np.array([r.ler for r in series])
        lo = np.array([r.ci_lo for r in series])
        hi = np.array([r.ci_hi for r in series])
        # zero-failure points cannot sit on a log axis; draw their upper bound
        shown = np.where(ler > 0, ler, hi)
        line, = ax.plot(p, shown, marker="o", ms=4, label=name)
        if len(p) > 1:
            ax.fill_between(p, np.maximum(lo, shown * 1e-3), hi, color=line.get_color(), alpha=0.2, lw=0)
        else:
            yerr = np.clip(np.vstack([shown - np.maximum(lo, shown * 1e-3), hi - shown]), 0, None)
            ax.errorbar(p, shown, yerr=yerr, color=line.get_color(), capsize=3, ls="none")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("physical error rate")
    ax.set_ylabel("logical error rate")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
