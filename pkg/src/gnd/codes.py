"""Stabilizer codes and their {E, L, S} tableau.

An :class:`ElsFrame` completes the stabilizer generators ``g_i`` with pure
errors ``e_i`` and logical pairs ``(l_j^x, l_j^z)`` into a symplectic basis of
the n-qubit Pauli group.  Any Pauli then factorises uniquely as

    E = prod g_i^alpha_i * prod (l_j^x)^beta_{2j} (l_j^z)^beta_{2j+1} * prod e_i^gamma_i

and ``gamma`` is the syndrome.
"""
from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .pauli import (
    DimensionError,
    PauliOperator,
    gf2_matmul,
    gf2_nullspace,
    gf2_rank,
    gf2_row_reduce,
    independent_rows,
    symplectic_dual,
    symplectic_products,
)


class CodeError(ValueError):
    """A stabilizer code violates one of its structural invariants."""


class CodeFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=np.uint8, copy=True)
    arr.setflags(write=False)
    return arr


class StabilizerCode:
    """Stabilizer code given by ``m`` generator rows in ``[x | z]`` layout."""

    def __init__(self, n: int, stabilizers, name: str = "", distance: int | None = None,
                 coords: list | None = None):
        stabilizers = np.asarray(stabilizers, dtype=np.uint8)
        if stabilizers.size == 0:
            stabilizers = np.zeros((0, 2 * n), dtype=np.uint8)
        if stabilizers.ndim != 2 or stabilizers.shape[1] != 2 * n:
            raise DimensionError(f"stabilizer rows must have length 2n = {2 * n}")
        self.n = int(n)
        self.stabilizers = _frozen(stabilizers & 1)
        self.name = name
        self.distance = distance
        # per-generator layout metadata, e.g. ("X", i, j) plaquette positions
        self.coords = list(coords) if coords is not None else None

    @property
    def m(self) -> int:
        return self.stabilizers.shape[0]

    @property
    def k(self) -> int:
        return self.n - self.m

    def generator(self, i: int) -> PauliOperator:
        return PauliOperator.from_symplectic(self.stabilizers[i])

    @property
    def is_css(self) -> bool:
        n = self.n
        xs = self.stabilizers[:, :n].any(1)
        zs = self.stabilizers[:, n:].any(1)
        return not (xs & zs).any()

    @property
    def hx(self) -> np.ndarray:
        n = self.n
        rows = self.stabilizers[:, :n].any(1) & ~self.stabilizers[:, n:].any(1)
        return self.stabilizers[rows, :n]

    @property
    def hz(self) -> np.ndarray:
        n = self.n
        rows = self.stabilizers[:, n:].any(1) & ~self.stabilizers[:, :n].any(1)
        return self.stabilizers[rows, n:]

    def params(self) -> str:
        d = "?" if self.distance is None else str(self.distance)
        return f"[[{self.n},{self.k},{d}]]"

    def __eq__(self, other):
        if not isinstance(other, StabilizerCode):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.stabilizers, other.stabilizers)

    def __hash__(self):
        return hash((self.n, self.stabilizers.tobytes()))

    def __repr__(self):
        return f"StabilizerCode({self.name or 'unnamed'} {self.params()})"


@dataclass
class CodeReport:
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __str__(self):
        return "valid" if self.valid else "\n".join(self.violations)


def validate_code(code: StabilizerCode) -> CodeReport:
    """Check commutation and independence of the generators."""
    report = CodeReport()
    g = code.stabilizers
    if code.m > code.n:
        report.violations.append(f"m = {code.m} exceeds n = {code.n}")
    if code.m:
        comm = symplectic_products(g, g)
        for i, j in zip(*np.nonzero(np.triu(comm))):
            report.violations.append(f"generators {i} and {j} anti-commute")
        if not g.any(1).all():
            for i in np.flatnonzero(~g.any(1)):
                report.violations.append(f"generator {i} is the identity")
        rank = gf2_rank(g)
        if rank < code.m:
            report.violations.append(
                f"generators are dependent: rank {rank} < m = {code.m}"
            )
    return report


# ---------------------------------------------------------------------------
# ELS frame


@dataclass(frozen=True)
class ElsConfig:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __eq__(self, other):
        return (
            np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.beta, other.beta)
            and np.array_equal(self.gamma, other.gamma)
        )


class ElsFrame:
    """Full symplectic tableau built around a code's generators.

    ``logicals`` rows are ordered ``l_1^x, l_1^z, l_2^x, ...``; ``beta`` slot
    ``2j`` is the commutation bit with ``l_j^z`` (i.e. the exponent of
    ``l_j^x``) and slot ``2j+1`` the bit with ``l_j^x``.
    """

    def __init__(self, code: StabilizerCode, logicals, pure_errors):
        self.code = code
        n = code.n
        self.logicals = _frozen(np.asarray(logicals, dtype=np.uint8).reshape(-1, 2 * n))
        self.pure_errors = _frozen(np.asarray(pure_errors, dtype=np.uint8).reshape(-1, 2 * n))
        partners = self.logicals.copy()
        partners[0::2], partners[1::2] = self.logicals[1::2], self.logicals[0::2]
        # compose: cfg @ basis ; decompose: cfg = <E, readout>
        self._basis = np.vstack([code.stabilizers, self.logicals, self.pure_errors])
        self._readout = np.vstack([self.pure_errors, partners, code.stabilizers])
        self._readout_dual_t = np.ascontiguousarray(symplectic_dual(self._readout).T)

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def m(self) -> int:
        return self.code.m

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def n_bits(self) -> int:
        """Length of the (gamma, beta) string modelled by the network."""
        return self.m + 2 * self.k

    @property
    def sector_operators(self) -> np.ndarray:
        """Rows whose commutation bits with an error give beta, slot by slot."""
        return self._readout[self.m:self.m + 2 * self.k]

    def logical(self, j: int, kind: str) -> PauliOperator:
        return PauliOperator.from_symplectic(self.logicals[2 * j + (kind.lower() == "z")])

    def pure_error(self, i: int) -> PauliOperator:
        return PauliOperator.from_symplectic(self.pure_errors[i])

    # vectorised maps ---------------------------------------------------

    def decompose_batch(self, errors: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Rows ``[x | z]`` -> ``(alpha, beta, gamma)`` arrays."""
        errors = np.atleast_2d(np.asarray(errors, dtype=np.uint8))
        if errors.shape[-1] != 2 * self.n:
            raise DimensionError(f"expected width {2 * self.n}, got {errors.shape[-1]}")
        cfg = gf2_matmul(errors, self._readout_dual_t)
        m, kk = self.m, 2 * self.k
        return cfg[:, :m], cfg[:, m:m + kk], cfg[:, m + kk:]

    def syndrome_batch(self, errors: np.ndarray) -> np.ndarray:
        return symplectic_products(errors, self.code.stabilizers)

    def sector_batch(self, errors: np.ndarray) -> np.ndarray:
        m, kk = self.m, 2 * self.k
        return symplectic_products(errors, self._readout[m:m + kk])

    def compose_batch(self, alpha, beta, gamma) -> np.ndarray:
        alpha = np.atleast_2d(np.asarray(alpha, dtype=np.uint8))
        beta = np.atleast_2d(np.asarray(beta, dtype=np.uint8))
        gamma = np.atleast_2d(np.asarray(gamma, dtype=np.uint8))
        if alpha.shape[-1] != self.m or gamma.shape[-1] != self.m or beta.shape[-1] != 2 * self.k:
            raise DimensionError("configuration lengths do not match the frame")
        cfg = np.concatenate([alpha, beta, gamma], axis=-1)
        return gf2_matmul(cfg, self._basis)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"n={self.n};m={self.m};k={self.k};".encode())
        h.update(self.code.stabilizers.tobytes())
        h.update(self.logicals.tobytes())
        return h.hexdigest()[:16]


def decompose_error(frame: ElsFrame, error: PauliOperator) -> ElsConfig:
    if error.n != frame.n:
        raise DimensionError(f"error acts on {error.n} qubits, code has {frame.n}")
    a, b, g = frame.decompose_batch(error.to_symplectic()[None])
    return ElsConfig(a[0], b[0], g[0])


def compose_error(frame: ElsFrame, cfg: ElsConfig) -> PauliOperator:
    row = frame.compose_batch(cfg.alpha, cfg.beta, cfg.gamma)[0]
    return PauliOperator.from_symplectic(row)


def frame_violations(frame: ElsFrame) -> list[str]:
    """Every tableau invariant that fails (empty list when the frame is sound)."""
    out = []
    n, m, k = frame.n, frame.m, frame.k
    g, e, lg = frame.code.stabilizers, frame.pure_errors, frame.logicals
    if e.shape[0] != m:
        out.append(f"expected {m} pure errors, got {e.shape[0]}")
    if lg.shape[0] != 2 * k:
        out.append(f"expected {2 * k} logicals, got {lg.shape[0]}")
    if out:
        return out
    eye_m = np.eye(m, dtype=np.uint8)
    if m and not np.array_equal(symplectic_products(e, g), eye_m):
        out.append("pure errors do not pair one-to-one with stabilizers")
    if m and symplectic_products(e, e).any():
        out.append("pure errors do not commute")
    if k:
        if m and symplectic_products(lg, g).any():
            out.append("a logical anti-commutes with a stabilizer")
        if m and symplectic_products(lg, e).any():
            out.append("a logical anti-commutes with a pure error")
        want = np.kron(np.eye(k, dtype=np.uint8), np.array([[0, 1], [1, 0]], dtype=np.uint8))
        if not np.array_equal(symplectic_products(lg, lg), want):
            out.append("logicals are not in canonical conjugate pairs")
    if gf2_rank(frame._basis) != 2 * n:
        out.append("tableau does not span the symplectic space")
    return out


def build_els_frame(code: StabilizerCode) -> ElsFrame:
    """Complete the generators to a symplectic basis (deterministic)."""
    report = validate_code(code)
    if not report.valid:
        raise CodeError(f"cannot build frame for invalid code: {report}")
    n, m = code.n, code.m
    g = code.stabilizers

    # pure errors: solve <g_j, e_i> = delta_ij in one elimination
    if m:
        aug = np.concatenate([symplectic_dual(g), np.eye(m, dtype=np.uint8)], axis=1)
        red, pivots, rank = gf2_row_reduce(aug)
        e = np.zeros((m, 2 * n), dtype=np.uint8)
        for r, c in enumerate(pivots):
            e[:, c] = red[r, 2 * n:]
        for j in range(m):
            for i in range(j):
                if _sp(e[j], e[i]):
                    e[j] ^= g[i]
    else:
        e = np.zeros((0, 2 * n), dtype=np.uint8)

    # logicals: centraliser of <g, e>, then symplectic Gram-Schmidt
    pool = list(gf2_nullspace(symplectic_dual(np.vstack([g, e]))))
    logicals = []
    while pool:
        v = pool.pop(0)
        j = next((j for j, w in enumerate(pool) if _sp(v, w)), None)
        if j is None:
            raise CodeError("degenerate centraliser; generators are not a valid code")
        w = pool.pop(j)
        logicals += [v, w]
        pool = [u ^ (_sp(u, w) * v) ^ (_sp(u, v) * w) for u in pool]
    logicals = np.array(logicals, dtype=np.uint8).reshape(-1, 2 * n)
    return ElsFrame(code, logicals, e)


def _sp(a: np.ndarray, b: np.ndarray) -> int:
    n = a.size // 2
    return int((a[:n] @ b[n:].astype(np.int64) + a[n:] @ b[:n].astype(np.int64)) & 1)


# ---------------------------------------------------------------------------
# constructors


def css_code(hx, hz, name: str = "", distance: int | None = None) -> StabilizerCode:
    """CSS code from (possibly redundant) X- and Z-check matrices.

    Dependent rows are dropped greedily, keeping the earliest ones, so the
    generators remain original check rows.
    """
    hx = np.atleast_2d(np.asarray(hx, dtype=np.uint8))
    hz = np.atleast_2d(np.asarray(hz, dtype=np.uint8))
    n = max(hx.shape[1], hz.shape[1])
    hx = hx.reshape(-1, n) if hx.size else np.zeros((0, n), dtype=np.uint8)
    hz = hz.reshape(-1, n) if hz.size else np.zeros((0, n), dtype=np.uint8)
    rows = np.vstack([
        np.hstack([hx, np.zeros_like(hx)]),
        np.hstack([np.zeros_like(hz), hz]),
    ])
    keep = independent_rows(rows)
    return StabilizerCode(n, rows[keep], name=name, distance=distance)


def rotated_surface_code(d: int) -> StabilizerCode:
    """Rotated planar code on a d x d grid, qubit ``(r, c)`` at index ``r*d + c``.

    Face ``(i, j)`` covers qubits ``(i-1..i, j-1..j)`` clipped to the grid;
    X faces have ``i + j`` even and keep their top/bottom half-plaquettes,
    Z faces have ``i + j`` odd and keep left/right ones.
    """
    if not isinstance(d, (int, np.integer)) or d < 3 or d % 2 == 0:
        raise ValueError(f"rotated surface code needs odd d >= 3, got {d!r}")
    n = d * d
    rows, coords = [], []
    for kind in ("X", "Z"):
        for i in range(d + 1):
            for j in range(d + 1):
                is_x = (i + j) % 2 == 0
                if is_x != (kind == "X"):
                    continue
                row_edge = i in (0, d)
                col_edge = j in (0, d)
                if row_edge and col_edge:
                    continue
                if kind == "X" and col_edge:
                    continue
                if kind == "Z" and row_edge:
                    continue
                qubits = [
                    r * d + c
                    for r in (i - 1, i)
                    for c in (j - 1, j)
                    if 0 <= r < d and 0 <= c < d
                ]
                vec = np.zeros(2 * n, dtype=np.uint8)
                vec[np.array(qubits) + (0 if kind == "X" else n)] = 1
                rows.append(vec)
                coords.append((kind, i, j))
    return StabilizerCode(n, np.array(rows), name=f"rsc{d}", distance=d, coords=coords)


def _shift(size: int) -> np.ndarray:
    return np.roll(np.eye(size, dtype=np.uint8), 1, axis=1)


def _bivariate(l: int, m: int, terms) -> np.ndarray:
    x = np.kron(_shift(l), np.eye(m, dtype=np.uint8))
    y = np.kron(np.eye(l, dtype=np.uint8), _shift(m))
    out = np.zeros((l * m, l * m), dtype=np.uint8)
    for s, t in terms:
        if not (0 <= s < l and 0 <= t < m):
            raise ValueError(f"monomial x^{s} y^{t} out of range for l={l}, m={m}")
        out ^= (np.linalg.matrix_power(x.astype(np.int64), s)
                @ np.linalg.matrix_power(y.astype(np.int64), t) % 2).astype(np.uint8)
    return out


def parse_monomials(text: str) -> list[tuple[int, int]]:
    """``"x3,y1,x1y2,1"`` -> ``[(3, 0), (0, 1), (1, 2), (0, 0)]``."""
    terms = []
    for tok in text.replace("+", ",").split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        if tok == "1":
            terms.append((0, 0))
            continue
        mt = re.fullmatch(r"(?:x(\d*))?(?:y(\d*))?", tok)
        if not mt or not tok:
            raise ValueError(f"bad monomial {tok!r}")
        sx, sy = mt.groups()
        s = 0 if sx is None else int(sx or 1)
        t = 0 if sy is None else int(sy or 1)
        terms.append((s, t))
    return terms


def bb_code(l: int, m: int, a_terms, b_terms, name: str = "", distance: int | None = None) -> StabilizerCode:
    """Bivariate bicycle code with ``Hx = [A|B]`` and ``Hz = [B^T|A^T]``."""
    if isinstance(a_terms, str):
        a_terms = parse_monomials(a_terms)
    if isinstance(b_terms, str):
        b_terms = parse_monomials(b_terms)
    a = _bivariate(l, m, a_terms)
    b = _bivariate(l, m, b_terms)
    hx = np.hstack([a, b])
    hz = np.hstack([b.T, a.T])
    code = css_code(hx, hz, name=name or f"bb{2 * l * m}", distance=distance)
    code.check_matrices = (hx, hz)
    return code


def remove_stabilizers(code: StabilizerCode, indices) -> StabilizerCode:
    """Drop generators, promoting each to a new logical degree of freedom."""
    indices = [int(i) for i in indices]
    if len(set(indices)) != len(indices):
        raise ValueError("duplicate stabilizer indices")
    for i in indices:
        if not 0 <= i < code.m:
            raise IndexError(f"stabilizer index {i} out of range 0..{code.m - 1}")
    keep = [i for i in range(code.m) if i not in set(indices)]
    coords = [code.coords[i] for i in keep] if code.coords else None
    return StabilizerCode(
        code.n, code.stabilizers[keep], name=f"{code.name}-defect{len(indices)}", coords=coords
    )


# Z plaquettes removed for the bundled distance-7 defected code
DEFECT_FACES_D7 = (("Z", 2, 1), ("Z", 3, 4), ("Z", 5, 2))


def defected_surface_code(d: int = 7, faces=DEFECT_FACES_D7) -> StabilizerCode:
    base = rotated_surface_code(d)
    lookup = {c: i for i, c in enumerate(base.coords)}
    try:
        idx = [lookup[tuple(f)] for f in faces]
    except KeyError as exc:
        raise ValueError(f"no plaquette at {exc.args[0]}") from None
    code = remove_stabilizers(base, idx)
    code.name = f"dsc{d}_k{code.k}"
    return code


# ---------------------------------------------------------------------------
# QCODE v1 text format


def dumps_code(code: StabilizerCode) -> str:
    n = code.n
    lines = ["qcode v1", f"# {code.name}" if code.name else None]
    header = f"n {n} k {code.k}"
    if code.distance is not None:
        header += f" d {code.distance}"
    lines.append(header)
    g = code.stabilizers
    xs, zs = g[:, :n].any(1), g[:, n:].any(1)
    x_only, z_only = xs & ~zs, zs & ~xs
    n_x = int(x_only.sum())
    blocked = (x_only | z_only).all() and x_only[:n_x].all() and z_only[n_x:].all()
    if blocked:
        lines.append("Hx")
        lines += [" ".join(map(str, r[:n])) for r in g[:n_x]]
        lines.append("Hz")
        lines += [" ".join(map(str, r[n:])) for r in g[n_x:]]
    else:
        lines.append("S")
        lines += [" ".join(map(str, r)) for r in g]
    return "\n".join(line for line in lines if line is not None) + "\n"


def save_code_file(code: StabilizerCode, path) -> None:
    Path(path).write_text(dumps_code(code))


def loads_code(text: str, name: str = "") -> StabilizerCode:
    lines = text.splitlines()
    content = []
    for lineno, raw in enumerate(lines, 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            content.append((lineno, body))
    if not content or content[0][1].split() != ["qcode", "v1"]:
        raise CodeFileError("expected header 'qcode v1'", content[0][0] if content else 1)
    if len(content) < 2:
        raise CodeFileError("missing 'n <n> k <k>' line", content[0][0] + 1)
    lineno, body = content[1]
    tok = body.split()
    if len(tok) not in (4, 6) or tok[0] != "n" or tok[2] != "k" or (len(tok) == 6 and tok[4] != "d"):
        raise CodeFileError("expected 'n <n> k <k> [d <d>]'", lineno)
    try:
        n, k = int(tok[1]), int(tok[3])
        d = int(tok[5]) if len(tok) == 6 else None
    except ValueError:
        raise CodeFileError("non-integer code parameter", lineno) from None
    sections = {"Hx": [], "Hz": [], "S": []}
    current = None
    for lineno, body in content[2:]:
        if body in sections:
            current = body
            continue
        if current is None:
            raise CodeFileError(f"row before any section header: {body!r}", lineno)
        width = 2 * n if current == "S" else n
        parts = body.split()
        if len(parts) != width or any(p not in ("0", "1") for p in parts):
            raise CodeFileError(f"{current} row must have {width} bits of 0/1", lineno)
        sections[current].append([int(p) for p in parts])
    hx = np.array(sections["Hx"], dtype=np.uint8).reshape(-1, n)
    hz = np.array(sections["Hz"], dtype=np.uint8).reshape(-1, n)
    s = np.array(sections["S"], dtype=np.uint8).reshape(-1, 2 * n)
    rows = np.vstack([
        np.hstack([hx, np.zeros_like(hx)]),
        np.hstack([np.zeros_like(hz), hz]),
        s,
    ])
    keep = independent_rows(rows) if rows.size else []
    code = StabilizerCode(n, rows[keep], name=name, distance=d)
    report = validate_code(code)
    if not report.valid:
        raise CodeError(f"invalid code {name!r}: {report}")
    if code.k != k:
        raise CodeError(f"declared k = {k} but generators give k = {code.k}")
    return code


def load_code_file(path) -> StabilizerCode:
    path = Path(path)
    return loads_code(path.read_text(), name=path.stem)


BUNDLED_DIR = Path(__file__).parent / "data"


def bundled_code(name: str) -> StabilizerCode:
    """Load one of the shipped QCODE files by stem (e.g. ``"bb18_k4"``)."""
    return load_code_file(BUNDLED_DIR / f"{name}.qcode")


def named_code(spec: str) -> StabilizerCode:
    """Resolve ``rsc<d>``, ``bb72``, ``dsc7`` or a bundled/explicit QCODE path."""
    mt = re.fullmatch(r"rsc(\d+)", spec)
    if mt:
        return rotated_surface_code(int(mt.group(1)))
    if spec == "bb72":
        return bb_code(6, 6, "x3,y1,y2", "y3,x1,x2", name="bb72", distance=6)
    if spec == "dsc7":
        return defected_surface_code()
    if (BUNDLED_DIR / f"{spec}.qcode").exists():
        return bundled_code(spec)
    path = Path(spec)
    if path.exists():
        return load_code_file(path)
    raise ValueError(f"unknown code {spec!r}")


# ---------------------------------------------------------------------------
# brute-force distance


def brute_distance(code: StabilizerCode, max_weight: int, kind: str | None = None,
                   frame: ElsFrame | None = None, chunk: int = 200_000) -> int | None:
    """Minimum weight of a non-trivial logical, searched up to ``max_weight``.

    ``kind`` restricts the search to ``"X"``- or ``"Z"``-type Paulis.
    Returns ``None`` when nothing is found within the bound.
    """
    frame = frame or build_els_frame(code)
    n, m = code.n, code.m
    letters = {"X": [(1, 0)], "Z": [(0, 1)], None: [(1, 0), (0, 1), (1, 1)]}[
        kind.upper() if kind else None
    ]
    # signature of each single-qubit Pauli: syndrome bits then logical bits
    sig = []
    for bx, bz in letters:
        ops = np.zeros((n, 2 * n), dtype=np.uint8)
        ops[np.arange(n), np.arange(n)] = bx
        ops[np.arange(n), n + np.arange(n)] = bz
        _, beta, gamma = frame.decompose_batch(ops)
        sig.append(np.hstack([gamma, beta]))
    sig = np.stack(sig, axis=1)  # (n, letters, m + 2k)
    syn = np.packbits(sig[..., :m], axis=-1) if m else np.zeros((n, len(letters), 0), np.uint8)
    log = np.packbits(sig[..., m:], axis=-1)
    for w in range(1, max_weight + 1):
        combos_iter = itertools.combinations(range(n), w)
        while True:
            combos = np.array(list(itertools.islice(combos_iter, chunk)), dtype=np.intp)
            if combos.size == 0:
                break
            for assign in itertools.product(range(len(letters)), repeat=w):
                s = np.zeros((combos.shape[0], syn.shape[-1]), dtype=np.uint8)
                lg = np.zeros((combos.shape[0], log.shape[-1]), dtype=np.uint8)
                for pos, a in enumerate(assign):
                    s ^= syn[combos[:, pos], a]
                    lg ^= log[combos[:, pos], a]
                if (~s.any(1) & lg.any(1)).any():
                    return w
    return None
