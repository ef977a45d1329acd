"""Write the bundled phenomenological Z-memory detector error models.

    python scripts/make_dems.py

Each model covers ``rounds`` noisy syndrome rounds followed by a perfect
data readout.  Data qubits suffer an X flip with probability ``p`` before
every round and measurement outcomes flip with probability ``q``.  Detectors
compare consecutive Z-check outcomes; observables are the Z logicals of the
code.  No circuit simulator is involved, so hook errors and Y correlations
are absent.
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from gnd.codes import defected_surface_code, rotated_surface_code
from gnd.dem import DetectorErrorModel, ErrorMechanism, serialize_dem
from gnd.pauli import gf2_nullspace, gf2_rank

DATA = Path(__file__).resolve().parents[1] / "src" / "gnd" / "data"


def z_logicals(hx: np.ndarray, hz: np.ndarray) -> np.ndarray:
    """Basis of ker(hx) modulo rowspace(hz)."""
    out = []
    base = hz.copy()
    for v in gf2_nullspace(hx):
        trial = np.vstack([base, v])
        if gf2_rank(trial) > gf2_rank(base):
            out.append(v)
            base = trial
    return np.array(out, dtype=np.uint8)


def phenomenological_dem(code, rounds: int, p: float, q: float) -> DetectorErrorModel:
    hz, hx = code.hz, code.hx
    obs = z_logicals(hx, hz)
    mz = hz.shape[0]
    det = lambda r, i: r * mz + i  # noqa: E731
    mechs = []
    # data flips before round r (r = rounds is the final readout)
    for r in range(rounds + 1):
        for q_idx in range(code.n):
            dets = tuple(det(r, i) for i in np.flatnonzero(hz[:, q_idx]))
            # a flip before round r shows up in round r only; later rounds agree
            observables = tuple(int(j) for j in np.flatnonzero(obs[:, q_idx]))
            if dets or observables:
                mechs.append(ErrorMechanism(p, dets, observables))
    for r in range(rounds):
        for i in range(mz):
            mechs.append(ErrorMechanism(q, (det(r, i), det(r + 1, i))))
    return DetectorErrorModel(mechs, (rounds + 1) * mz, obs.shape[0])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=4)
    ap.add_argument("--p", type=float, default=0.01)
    args = ap.parse_args()
    targets = {
        "rsc3_z4": rotated_surface_code(3),
        "dsc7_k4_z4": defected_surface_code(),
    }
    for name, code in targets.items():
        dem = phenomenological_dem(code, args.rounds, args.p, args.p)
        header = (f"# phenomenological Z memory, {code.name} {code.params()}, "
                  f"{args.rounds} rounds, p = q = {args.p}\n")
        (DATA / f"{name}.dem").write_text(header + serialize_dem(dem))
        print(name, dem)


if __name__ == "__main__":
    main()
