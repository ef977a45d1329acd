"""Command-line interface: ``gnd <code|dem|sample|train|decode|bench|plot>``.

Exit status: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from . import bench
from .codes import (
    CodeError,
    CodeFileError,
    bb_code,
    brute_distance,
    build_els_frame,
    defected_surface_code,
    load_code_file,
    named_code,
    parse_monomials,
    rotated_surface_code,
    save_code_file,
    validate_code,
)
from .dem import DemParseError, load_dem
from .made import (
    CheckpointError,
    MadeConfig,
    MadeNetwork,
    load_checkpoint,
    read_checkpoint_header,
    save_checkpoint,
    train,
)
from .noise import NOISE_MODELS, Source, make_rng, noise_model, sample_stream
from .pauli import DimensionError

# flag defaults; JSON config values sit between these and explicit flags
TRAIN_DEFAULTS = {
    "p": 0.189, "noise": "depolarizing", "depth": 4, "width": 20, "steps": 10_000,
    "batch": 512, "lr": 1e-3, "precision": "double", "log_every": 100,
}


class UsageError(Exception):
    pass


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path}: expected a JSON object")
    return data


def _merge(args, config: dict, defaults: dict) -> dict:
    unknown = set(config) - set(defaults)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    out = {**defaults, **config}
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
    return out


def _seed(value) -> int:
    if value is None:
        value = secrets.randbits(32)
        print(f"seed: {value}")
    return int(value)


def _source(code: str | None, dem: str | None, noise: str = "depolarizing", p: float = 0.1):
    """(Source, label) for ``--code`` or ``--dem``."""
    if (code is None) == (dem is None):
        raise UsageError("give exactly one of --code or --dem")
    if dem is not None:
        return Source(dem=load_dem(dem)), Path(dem).stem
    c = _code(code)
    if noise not in NOISE_MODELS:
        raise UsageError(f"unknown noise model {noise!r}")
    return Source(build_els_frame(c), noise_model(noise, p)), c.name or Path(code).stem


def _code(spec: str):
    try:
        return named_code(spec)
    except CodeFileError:
        raise
    except ValueError as exc:
        if str(exc).startswith("unknown code"):
            raise UsageError(f"{exc} (not a built-in name or a file)") from None
        raise


# ---------------------------------------------------------------------------
# code


def cmd_code(args) -> int:
    if args.action == "gen":
        if args.family == "rotated-surface":
            if args.d is None or args.d < 3 or args.d % 2 == 0:
                raise UsageError("rotated-surface needs an odd --d >= 3")
            code = rotated_surface_code(args.d)
        elif args.family == "bb":
            if None in (args.l, args.m, args.a, args.b):
                raise UsageError("bb needs --l, --m, --a and --b")
            try:
                code = bb_code(args.l, args.m, parse_monomials(args.a), parse_monomials(args.b))
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            code.name = f"bb{code.n}"
        else:
            code = defected_surface_code(args.d or 7)
        if args.output:
            save_code_file(code, args.output)
            print(f"wrote {args.output}: {code.params()}")
        else:
            from .codes import dumps_code

            sys.stdout.write(dumps_code(code))
        return 0
    code = _code(args.file) if args.action != "validate" else None
    if args.action == "info":
        print(f"{code.name or args.file} {code.params()} n={code.n} k={code.k} m={code.m} "
              f"css={code.is_css}")
        return 0
    if args.action == "validate":
        try:
            code = load_code_file(args.file)
        except CodeFileError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 1
        except CodeError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 1
        report = validate_code(code)
        print("valid" if report.valid else "\n".join(report.violations))
        return 0 if report.valid else 1
    # distance
    d = brute_distance(code, args.max_weight, kind=args.kind)
    print(f"distance {'> ' + str(args.max_weight) if d is None else d}"
          f"{' (' + args.kind + ')' if args.kind else ''}")
    return 0


# ---------------------------------------------------------------------------
# dem


def cmd_dem(args) -> int:
    dem = load_dem(args.file)
    degrees = dem.detector_matrix.sum(1) if dem.mechanisms else np.zeros(0)
    print(f"mechanisms {len(dem.mechanisms)}")
    print(f"detectors {dem.num_detectors}")
    print(f"observables {dem.num_observables}")
    if dem.mechanisms:
        print(f"probability min {dem.probabilities.min():.6g} max {dem.probabilities.max():.6g}")
        print(f"detectors per mechanism max {int(degrees.max())}")
        print(f"mean detector marginal {dem.detector_marginals().mean():.6g}")
    return 0


# ---------------------------------------------------------------------------
# sample


def cmd_sample(args) -> int:
    seed = _seed(args.seed)
    src, _ = _source(args.code, args.dem, args.noise, args.p)
    bits = src.sample(make_rng(seed, 0), args.shots).bits
    lines = ["".join(map(str, row)) for row in bits]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.shots} samples ({src.n_syndrome} syndrome + {src.n_logical} logical bits)")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# train


def cmd_train(args) -> int:
    cfg = _merge(args, _load_config(args.config), {**TRAIN_DEFAULTS, "code": None, "dem": None,
                                                   "seed": None})
    seed = _seed(cfg["seed"])
    src, label = _source(cfg["code"], cfg["dem"], cfg["noise"], cfg["p"])
    config = MadeConfig(
        n_in=src.n_bits, depth=cfg["depth"], width=cfg["width"], learning_rate=cfg["lr"],
        batch_size=cfg["batch"], train_steps=cfg["steps"], seed=seed,
        precision=cfg["precision"], log_every=cfg["log_every"],
    )
    net = MadeNetwork(config, fingerprint=src.fingerprint())
    print(f"training {label}: n_in={config.n_in} depth={config.depth} width={config.width} "
          f"parameters={net.num_parameters()}", flush=True)

    def progress(step, loss, avg):
        print(f"step {step:>7d} loss {loss:.5f} smoothed {avg:.5f}", flush=True)

    net, log = train(config, sample_stream(src, config.batch_size, seed), net=net, callback=progress)
    out = Path(args.output)
    save_checkpoint(net, out, extra={"source": label, "n_syndrome": src.n_syndrome, "p": cfg["p"] if src.dem is None else None,
                                     "noise": cfg["noise"], "seed": seed})
    with open(out.with_suffix(out.suffix + ".loss.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "loss", "smoothed"])
        writer.writerows(zip(log.steps, log.losses, log.smoothed))
    print(f"wrote {out} ({log.seconds:.1f} s)")
    return 0


# ---------------------------------------------------------------------------
# decode


def parse_syndrome_hex(text: str, m: int) -> np.ndarray:
    """Little-endian: bit ``i`` of the integer is ``gamma_i``."""
    try:
        value = int(text, 16)
    except ValueError:
        raise UsageError(f"not a hex syndrome: {text!r}") from None
    if value < 0 or value >> m:
        raise UsageError(f"syndrome {text} has bits beyond the {m} syndrome positions")
    return np.array([(value >> i) & 1 for i in range(m)], dtype=np.uint8)


def _read_syndrome_file(path, m: int) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if len(line) != m or set(line) - {"0", "1"}:
            raise UsageError(f"{path}:{lineno}: expected {m} bits of 0/1")
        rows.append([int(c) for c in line])
    return np.array(rows, dtype=np.uint8).reshape(-1, m)


def cmd_decode(args) -> int:
    from .decoders import gnd_decode

    net = load_checkpoint(args.ckpt)
    if not isinstance(net, MadeNetwork):
        raise UsageError("decode needs a GND (MADE) checkpoint")
    trained_m = read_checkpoint_header(args.ckpt)["extra"].get("n_syndrome")
    if args.code or args.dem:
        src, _ = _source(args.code, args.dem)
        if src.fingerprint() != net.fingerprint:
            print(f"checkpoint fingerprint {net.fingerprint} does not match {src.fingerprint()}",
                  file=sys.stderr)
            return 1
        m = src.n_syndrome
    elif args.m is not None or trained_m is not None:
        m = args.m if args.m is not None else trained_m
    else:
        raise UsageError("give --code/--dem (or --m) so the syndrome length is known")
    if trained_m is not None and m != trained_m:
        raise DimensionError(f"checkpoint expects {trained_m} syndrome bits, got {m}")
    if (args.syndrome is None) == (args.syndrome_file is None):
        raise UsageError("give exactly one of --syndrome or --syndrome-file")
    gammas = (parse_syndrome_hex(args.syndrome, m)[None] if args.syndrome is not None
              else _read_syndrome_file(args.syndrome_file, m))
    res = gnd_decode(net, gammas, m)
    for beta, cond in zip(res.beta_hat, res.conditionals):
        print("beta " + "".join(map(str, beta)) + "  p " + " ".join(f"{c:.4f}" for c in cond))
    return 0


# ---------------------------------------------------------------------------
# bench / plot


def cmd_bench(args) -> int:
    data = _load_config(args.config)
    for key in ("code", "dem", "noise", "shots", "tasks", "seed", "chunk", "threads"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    if args.p is not None:
        data["error_rates"] = [float(x) for x in args.p.split(",") if x]
    if args.decoders is not None:
        data["decoders"] = [d for d in args.decoders.split(",") if d]
    if args.out is not None:
        data["output"] = args.out
    if data.get("seed") is None:
        data["seed"] = _seed(None)
    try:
        config = bench.ExperimentConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad experiment config: {exc}") from None
    src, label = _source(config.code, config.dem, config.noise,
                         config.error_rates[0] if config.error_rates else 0.1)
    run_dir = Path(config.output or "run")
    rows = bench.sweep(config, src, bench.decoder_factory(src), run_dir=run_dir, code_name=label,
                       log=lambda line: print(line, flush=True))
    bench.emit_results(rows, run_dir / "result.csv")
    bench.emit_results(rows, run_dir / "result.json")
    try:
        bench.emit_plot(rows, run_dir / "plot.svg", title=label)
    except ValueError:
        pass
    failed = [r for r in rows if r.status != "ok"]
    for r in failed:
        print(f"row {r.decoder} p={r.p}: {r.message}", file=sys.stderr)
    print(f"wrote {run_dir}/result.csv ({len(rows)} rows)")
    return 1 if failed else 0


def cmd_plot(args) -> int:
    rows = bench.read_results(args.input)
    if not rows:
        print(f"{args.input}: no rows to plot", file=sys.stderr)
        return 1
    out = args.output or str(Path(args.input).with_suffix(".svg"))
    bench.emit_plot(rows, out, title=args.title)
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gnd", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    code = sub.add_parser("code", help="generate, inspect and check stabilizer codes")
    csub = code.add_subparsers(dest="action", required=True)
    gen = csub.add_parser("gen", help="write a code in QCODE v1 format")
    gen.add_argument("family", choices=["rotated-surface", "bb", "defected-surface"])
    gen.add_argument("--d", type=int)
    gen.add_argument("--l", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--a", help="monomials, e.g. x3,y1,y2")
    gen.add_argument("--b")
    gen.add_argument("-o", "--output")
    for name in ("info", "validate"):
        p = csub.add_parser(name)
        p.add_argument("file", help="QCODE file or built-in name (rsc<d>, bb72, dsc7, bundled stems)")
    dist = csub.add_parser("distance", help="brute-force distance up to --max-weight")
    dist.add_argument("file")
    dist.add_argument("--max-weight", type=int, required=True)
    dist.add_argument("--kind", choices=["X", "Z"])

    dem = sub.add_parser("dem", help="detector error model tools")
    dsub = dem.add_subparsers(dest="action", required=True)
    chk = dsub.add_parser("check", help="parse a .dem file and print statistics")
    chk.add_argument("file")

    def source_flags(p, noise=True):
        p.add_argument("--code")
        p.add_argument("--dem")
        if noise:
            p.add_argument("--noise", choices=sorted(NOISE_MODELS))

    smp = sub.add_parser("sample", help="print labelled [gamma | beta] bit strings")
    source_flags(smp, noise=False)
    smp.add_argument("--noise", choices=sorted(NOISE_MODELS), default="depolarizing")
    smp.add_argument("--p", type=float, default=0.1)
    smp.add_argument("--shots", type=int, default=10)
    smp.add_argument("--seed", type=int)
    smp.add_argument("-o", "--output")

    tr = sub.add_parser("train", help="train a GND model; writes checkpoint and loss CSV")
    source_flags(tr)
    tr.add_argument("--config", help="JSON file with any of the flag names as keys")
    tr.add_argument("--p", type=float)
    tr.add_argument("--depth", type=int)
    tr.add_argument("--width", type=int)
    tr.add_argument("--steps", type=int)
    tr.add_argument("--batch", type=int)
    tr.add_argument("--lr", type=float)
    tr.add_argument("--precision", choices=["double", "single"])
    tr.add_argument("--log-every", dest="log_every", type=int)
    tr.add_argument("--seed", type=int)
    tr.add_argument("-o", "--output", required=True)

    dec = sub.add_parser("decode", help="decode syndromes with a trained GND checkpoint")
    dec.add_argument("--ckpt", required=True)
    source_flags(dec, noise=False)
    dec.add_argument("--m", type=int, help="syndrome length when no code is given "
                     "(defaults to the one recorded at training time)")
    dec.add_argument("--syndrome", help="hex, little-endian: bit i is gamma_i")
    dec.add_argument("--syndrome-file", help="one bit string per line, gamma_0 first")

    bn = sub.add_parser("bench", help="Monte Carlo logical error rates")
    source_flags(bn)
    bn.add_argument("--config", help="JSON experiment config; flags override")
    bn.add_argument("--p", help="comma-separated error rates")
    bn.add_argument("--decoders", help="comma-separated: mld, bposd, gnd:<ckpt>, mnd:<ckpt>")
    bn.add_argument("--shots", type=int)
    bn.add_argument("--tasks", type=int)
    bn.add_argument("--chunk", type=int)
    bn.add_argument("--seed", type=int)
    bn.add_argument("--threads", type=int)
    bn.add_argument("--out", help="run directory (default ./run)")

    pl = sub.add_parser("plot", help="render result.csv as an SVG")
    pl.add_argument("--in", dest="input", required=True)
    pl.add_argument("-o", "--output")
    pl.add_argument("--title")
    return ap


COMMANDS = {"code": cmd_code, "dem": cmd_dem, "sample": cmd_sample, "train": cmd_train,
            "decode": cmd_decode, "bench": cmd_bench, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gnd: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, CodeError, CodeFileError, DemParseError, CheckpointError,
            DimensionError, ValueError) as exc:
        print(f"gnd: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
