"""Normalised min-sum belief propagation with ordered-statistics post-processing.

The decoding problem is the binary linear system ``H e = gamma``.  For a
stabilizer code ``H`` is the symplectic dual of the generator matrix acting on
the ``2n`` bits ``[x | z]`` of the error; for a detector error model it is the
detector incidence matrix acting on mechanism indicators.  Everything below
is batched across shots.
"""
from __future__ import annotations

import numpy as np

from ..codes import ElsFrame
from ..dem import DetectorErrorModel
from ..noise import PauliChannel, log_prob_batch
from ..pauli import gf2_matmul, gf2_rank, symplectic_dual
from .base import Decoder


class ContractViolation(ValueError):
    """An error estimate that does not reproduce its syndrome."""


class InconsistentSyndrome(ValueError):
    pass


class TannerGraph:
    """Check neighbourhoods of ``H`` padded to the largest check degree.

    Padding slots point at a dummy variable and carry an infinite, positive
    message, so they never win a minimum or flip a sign.
    """

    def __init__(self, h: np.ndarray):
        self.h = np.asarray(h, dtype=np.uint8)
        self.n_checks, self.n_vars = self.h.shape
        # checks touching no variable carry no messages
        self.rows = np.flatnonzero(self.h.any(1))
        sub = self.h[self.rows]
        degree = sub.sum(1)
        self.dmax = int(degree.max()) if sub.size else 0
        nbr = np.full((self.rows.size, self.dmax), self.n_vars, dtype=np.int64)
        for r, row in enumerate(sub):
            idx = np.flatnonzero(row)
            nbr[r, : idx.size] = idx
        self.nbr = nbr
        self.pad = nbr == self.n_vars
        # (checks * dmax, n_vars) map summing check messages into variables
        flat = nbr.reshape(-1)
        gather = np.zeros((flat.size, self.n_vars + 1))
        gather[np.arange(flat.size), flat] = 1.0
        self.gather = gather[:, : self.n_vars]


def bp_min_sum(h, priors, syndromes, max_iter: int = 1000, norm_factor: float = 0.625,
               graph: TannerGraph | None = None):
    """Normalised min-sum BP.

    Returns ``(e_hat, converged, posterior_llr)``; ``e_hat`` is the hard
    decision of the last iteration run for each shot.
    """
    graph = graph or TannerGraph(h)
    syn = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
    shots = syn.shape[0]
    priors = np.clip(np.asarray(priors, dtype=float), 1e-15, 1 - 1e-15)
    prior_llr = np.broadcast_to(np.log((1 - priors) / priors), (graph.n_vars,))
    posterior = np.tile(prior_llr, (shots, 1))
    e_hat = (posterior < 0).astype(np.uint8)
    converged = (gf2_matmul(e_hat, graph.h.T) == syn).all(1)
    if graph.dmax == 0:
        return e_hat, converged, posterior

    ht = graph.h.T.astype(np.float32)
    n_chk, dmax = graph.nbr.shape
    prior_ext = np.append(prior_llr, np.inf)
    pad = graph.pad
    active = np.flatnonzero(~converged)
    v2c = np.tile(prior_ext[graph.nbr], (active.size, 1, 1))
    syn_flip = syn[:, graph.rows].astype(bool)
    nbr_flat = graph.nbr.reshape(-1)
    for _ in range(max_iter):
        if active.size == 0:
            break
        mag = np.abs(v2c)
        neg = v2c < 0
        arg = np.argmin(mag, axis=2)
        min1 = np.take_along_axis(mag, arg[..., None], axis=2)
        np.put_along_axis(mag, arg[..., None], np.inf, axis=2)
        min2 = mag.min(axis=2, keepdims=True)
        is_min = np.zeros_like(neg)
        np.put_along_axis(is_min, arg[..., None], True, axis=2)
        parity = (neg.sum(2) & 1).astype(bool) ^ syn_flip[active]
        sign = np.where(parity[..., None] ^ neg, -norm_factor, norm_factor)
        c2v = sign * np.where(is_min, min2, min1)
        c2v[:, pad] = 0.0
        post = prior_llr + c2v.reshape(active.size, -1) @ graph.gather
        post_ext = np.concatenate([post, np.full((active.size, 1), np.inf)], axis=1)
        v2c = post_ext[:, nbr_flat].reshape(active.size, n_chk, dmax) - c2v
        hard = post < 0
        done = ((hard.astype(np.float32) @ ht).astype(np.int64) & 1 == syn[active]).all(1)
        if done.any():
            fin = active[done]
            e_hat[fin] = hard[done]
            posterior[fin] = post[done]
            converged[fin] = True
            keep = ~done
            active, v2c = active[keep], v2c[keep]
            post, hard = post[keep], hard[keep]
    if active.size:
        posterior[active] = post
        e_hat[active] = hard
    return e_hat, converged, posterior


def _eliminate(h: np.ndarray, syn: np.ndarray, order: np.ndarray, rank: int):
    """Per-shot Gauss-Jordan elimination over the permuted columns.

    Returns pivot positions (``(B, rank)``, indices into ``order``), the
    reduced non-pivot structure and the transformed syndromes.
    """
    shots = syn.shape[0]
    m, nv = h.shape
    aug = np.empty((shots, m, nv + 1), dtype=np.uint8)
    aug[:, :, :nv] = h.T[order].transpose(0, 2, 1)
    aug[:, :, nv] = syn
    filled = np.zeros(shots, dtype=np.int64)
    pivots = np.full((shots, rank), -1, dtype=np.int64)
    rows = np.arange(m)
    for col in range(nv):
        todo = filled < rank
        if not todo.any():
            break
        column = aug[:, :, col].astype(bool) & (rows[None, :] >= filled[:, None]) & todo[:, None]
        has = column.any(1)
        if not has.any():
            continue
        sel = np.flatnonzero(has)
        piv_row = np.argmax(column[sel], axis=1)
        tgt = filled[sel]
        # swap pivot row into position
        a = aug[sel, piv_row].copy()
        aug[sel, piv_row] = aug[sel, tgt]
        aug[sel, tgt] = a
        # clear the column elsewhere
        hit = aug[sel, :, col].astype(bool)
        hit[np.arange(sel.size), tgt] = False
        aug[sel] ^= hit[:, :, None] * a[:, None, :]
        pivots[sel, tgt] = col
        filled[sel] += 1
    return aug, pivots, filled


def osd_postprocess(h, syndromes, posterior_llr, order: int = 10, mode: str = "cs",
                    score=None, rank: int | None = None) -> np.ndarray:
    """Ordered-statistics decoding; every output satisfies ``H e = gamma``.

    Columns are sorted from least to most reliable (most likely flipped
    first).  OSD-0 sets the non-pivot bits to zero.  The combination sweep
    (``mode="cs"``) also tries every single non-pivot flip and every pair
    among the first ``order`` non-pivot positions, keeping the candidate with
    the highest ``score`` (default: the posterior log-likelihood).
    """
    h = np.asarray(h, dtype=np.uint8)
    syn = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
    llr = np.atleast_2d(np.asarray(posterior_llr, dtype=float))
    shots = syn.shape[0]
    m, nv = h.shape
    rank = gf2_rank(h) if rank is None else rank
    if mode not in ("0", "cs"):
        raise ValueError(f"unknown OSD mode {mode!r}")
    col_order = np.argsort(llr, axis=1, kind="stable")
    aug, pivots, filled = _eliminate(h, syn, col_order, rank)
    if (filled < rank).any() or aug[:, rank:, nv].any():
        raise InconsistentSyndrome("syndrome is not in the column space of H")
    s_red = aug[:, :rank, nv]

    if score is None:
        def score(e):
            return -(e * llr[:, None, :]).sum(-1)

    # candidate non-pivot assignments, columns in sorted-position space
    is_piv = np.zeros((shots, nv), dtype=bool)
    np.put_along_axis(is_piv, pivots, True, axis=1)
    nonpiv = np.argsort(is_piv, axis=1, kind="stable")[:, : nv - rank]
    flips = [()]
    if mode == "cs":
        n_free = nv - rank
        flips += [(i,) for i in range(n_free)]
        lam = min(order, n_free)
        flips += [(i, j) for i in range(lam) for j in range(i + 1, lam)]
    n_cand = len(flips)
    cand = np.zeros((shots, n_cand, nv), dtype=np.uint8)
    reduced_cols = np.take_along_axis(aug[:, :rank, :nv], nonpiv[:, None, :].repeat(rank, 1), axis=2)
    for c, f in enumerate(flips):
        x_piv = s_red.copy()
        for i in f:
            x_piv ^= reduced_cols[:, :, i]
            cand[np.arange(shots), c, nonpiv[:, i]] = 1
        np.put_along_axis(cand[:, c, :], pivots, x_piv, axis=1)
    # back to original column order
    inv = np.argsort(col_order, axis=1)
    cand = np.take_along_axis(cand, inv[:, None, :].repeat(n_cand, 1), axis=2)
    best = np.argmax(score(cand), axis=1)
    return cand[np.arange(shots), best]


def decoder_logical_projection(frame: ElsFrame, e_hat, gamma=None) -> np.ndarray:
    """Sector of an error estimate; optionally checks it reproduces ``gamma``."""
    e_hat = np.atleast_2d(np.asarray(e_hat, dtype=np.uint8))
    _, beta, syn = frame.decompose_batch(e_hat)
    if gamma is not None and not np.array_equal(syn, np.atleast_2d(gamma)):
        raise ContractViolation("error estimate does not reproduce the syndrome")
    return beta


class BpOsdDecoder(Decoder):
    """BP+OSD on a code (symplectic system) or a detector error model."""

    name = "bposd"

    def __init__(self, h, priors, readout, max_iter: int = 1000, norm_factor: float = 0.625,
                 osd_order: int = 10, osd_mode: str = "cs", score=None):
        h = np.asarray(h, dtype=np.uint8)
        readout = np.asarray(readout, dtype=np.uint8)
        super().__init__(h.shape[0], readout.shape[0])
        self.h, self.priors, self.readout = h, np.asarray(priors, dtype=float), readout
        self.max_iter, self.norm_factor = max_iter, norm_factor
        self.osd_order, self.osd_mode = osd_order, osd_mode
        self.score = score
        self.graph = TannerGraph(h)
        self.rank = gf2_rank(h)
        self.last_errors: np.ndarray | None = None
        self.bp_failures = 0

    @classmethod
    def for_code(cls, frame: ElsFrame, model: PauliChannel, **kw) -> BpOsdDecoder:
        pi, px, pz, py = model.probs
        n = frame.n
        priors = np.concatenate([np.full(n, px + py), np.full(n, pz + py)])
        h = symplectic_dual(frame.code.stabilizers)
        readout = symplectic_dual(frame.sector_operators)

        def score(cands):
            flat = cands.reshape(-1, cands.shape[-1])
            return log_prob_batch(model, flat).reshape(cands.shape[:2])

        dec = cls(h, priors, readout, score=score, **kw)
        dec.frame = frame
        return dec

    @classmethod
    def for_dem(cls, dem: DetectorErrorModel, **kw) -> BpOsdDecoder:
        p = dem.probabilities
        w = np.log(p / (1 - p))

        def score(cands):
            return cands @ w

        return cls(dem.detector_matrix.T, p, dem.observable_matrix.T, score=score, **kw)

    def estimate_errors(self, gammas) -> tuple[np.ndarray, np.ndarray]:
        gammas = self._prepare(gammas)
        e_hat, conv, post = bp_min_sum(self.h, self.priors, gammas, self.max_iter,
                                       self.norm_factor, graph=self.graph)
        bad = np.flatnonzero(~conv)
        if bad.size:
            e_hat = e_hat.copy()
            for lo in range(0, bad.size, 512):
                idx = bad[lo:lo + 512]
                e_hat[idx] = osd_postprocess(self.h, gammas[idx], post[idx], self.osd_order,
                                             self.osd_mode, score=self.score, rank=self.rank)
        self.bp_failures += bad.size
        return e_hat, conv

    def _decode_batch(self, gammas):
        e_hat, _ = self.estimate_errors(gammas)
        self.last_errors = e_hat
        return gf2_matmul(e_hat, self.readout.T)

    def describe(self):
        return {"decoder": self.name, "max_iter": self.max_iter, "norm_factor": self.norm_factor,
                "osd_mode": self.osd_mode, "osd_order": self.osd_order}
