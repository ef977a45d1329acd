import numpy as np
import pytest
from oracles import bits_of, enumerate_cosets

from gnd.codes import build_els_frame, bundled_code, named_code, rotated_surface_code
from gnd.decoders import (
    BpOsdDecoder,
    BudgetExceeded,
    ContractViolation,
    ExactMldDecoder,
    GndDecoder,
    InconsistentSyndrome,
    MndDecoder,
    bp_min_sum,
    coset_log_probs,
    decoder_logical_projection,
    exact_mld_decode,
    gnd_decode,
    matched_mnd_config,
    osd_postprocess,
)
from gnd.decoders.mld import all_sectors, exact_mld_ler, joint_table, pick_sector
from gnd.dem import bundled_dem_paths, load_dem
from gnd.made import FingerprintMismatch, MadeConfig, MadeNetwork, MndNetwork, train
from gnd.noise import DepolarizingModel, Source, make_rng, sample_code_capacity, sample_stream
from gnd.pauli import DimensionError, gf2_matmul


@pytest.fixture(scope="module")
def rsc3():
    return build_els_frame(rotated_surface_code(3))


@pytest.fixture(scope="module", params=[0.05, 0.1])
def oracle_cosets(request, rsc3):
    return request.param, enumerate_cosets(rsc3, request.param)


def oracle_sector_scores(cosets, gamma, k):
    scores = np.zeros(1 << (2 * k))
    for (g, b), pr in cosets.items():
        if g == bytes(gamma):
            scores[int("".join(map(str, b)), 2)] += pr
    return scores


# ---------------------------------------------------------------------------
# exact MLD


def test_mld_matches_bruteforce_oracle_on_every_syndrome(rsc3, oracle_cosets):
    p, cosets = oracle_cosets
    model = DepolarizingModel(p)
    table_dec = ExactMldDecoder(rsc3, model, method="table")
    gammas = np.array([bits_of(i, rsc3.m) for i in range(1 << rsc3.m)])
    from_table = table_dec.decode_batch(gammas)
    sectors = all_sectors(rsc3.k)
    for i, gamma in enumerate(gammas):
        scores = oracle_sector_scores(cosets, gamma, rsc3.k)
        lp = coset_log_probs(rsc3, model, gamma)
        np.testing.assert_allclose(np.exp(lp), scores, rtol=1e-10, atol=1e-300)
        want = sectors[pick_sector(scores, log_space=False)]
        np.testing.assert_array_equal(exact_mld_decode(rsc3, model, gamma), want)
        np.testing.assert_array_equal(from_table[i], want)


def test_joint_table_sums_to_syndrome_probability(rsc3, oracle_cosets):
    p, cosets = oracle_cosets
    table = joint_table(rsc3, DepolarizingModel(p))
    assert table.sum() == pytest.approx(1.0, abs=1e-12)
    for i in (0, 1, 77, 255):
        gamma = bits_of(i, rsc3.m)
        p_gamma = sum(v for (g, _), v in cosets.items() if g == bytes(gamma))
        assert table[i].sum() == pytest.approx(p_gamma, rel=1e-10)


def test_mld_methods_agree_on_bb18():
    frame = build_els_frame(bundled_code("bb18_k4"))
    model = DepolarizingModel(0.08)
    gammas = sample_code_capacity(frame, model, make_rng(4), 40).gamma
    a = ExactMldDecoder(frame, model, method="table").decode_batch(gammas)
    b = ExactMldDecoder(frame, model, method="enumerate").decode_batch(gammas)
    np.testing.assert_array_equal(a, b)


def test_mld_ler_closed_form_is_monotone(rsc3):
    lers = [exact_mld_ler(rsc3, DepolarizingModel(p)) for p in (0.02, 0.05, 0.1, 0.15)]
    assert np.all(np.diff(lers) > 0)
    assert exact_mld_ler(rsc3, DepolarizingModel(0.0)) == pytest.approx(0.0, abs=1e-12)


def test_mld_budget_exceeded():
    frame = build_els_frame(named_code("bb72"))
    with pytest.raises(BudgetExceeded) as info:
        ExactMldDecoder(frame, DepolarizingModel(0.05), method="enumerate")
    assert info.value.required == 2 ** 60 * 4 ** 12


def test_tie_goes_to_smallest_index():
    assert pick_sector(np.log([0.1, 0.3, 0.3 * (1 - 1e-12), 0.2])) == 1
    assert pick_sector(np.array([0.2, 0.2, 0.1]), log_space=False) == 0
    assert pick_sector(np.full(4, -np.inf)) == 0


def test_decoder_shape_contract(rsc3):
    dec = ExactMldDecoder(rsc3, DepolarizingModel(0.1))
    with pytest.raises(DimensionError):
        dec.decode_batch(np.zeros((3, 5), np.uint8))
    with pytest.raises(DimensionError):
        dec.decode(np.zeros((2, rsc3.m), np.uint8))
    assert dec.decode(np.zeros(rsc3.m, np.uint8)).tolist() == [0, 0]


# ---------------------------------------------------------------------------
# GND


def constant_net(n_syndrome, biases, fingerprint=""):
    n_in = n_syndrome + len(biases)
    net = MadeNetwork(MadeConfig(n_in=n_in, depth=2, width=2), fingerprint=fingerprint)
    for p in net.params:
        p[...] = 0.0
    net.params[-1][n_syndrome:] = biases
    return net


def test_gnd_hand_set_network():
    net = constant_net(3, [4.0, -4.0])
    res = gnd_decode(net, np.array([1, 0, 1], np.uint8))
    assert res.beta_hat.tolist() == [1, 0]
    np.testing.assert_allclose(res.conditionals, 1 / (1 + np.exp([-4.0, 4.0])))


def test_gnd_forward_pass_count():
    net = constant_net(4, [1.0, -1.0, 2.0, -2.0])
    net.n_forward = 0
    gnd_decode(net, np.zeros(4, np.uint8))
    assert net.n_forward == 4
    gnd_decode(net, np.zeros((100, 4), np.uint8))
    assert net.n_forward == 8


def test_gnd_half_probability_decodes_to_zero():
    net = constant_net(2, [0.0, 0.0])
    assert gnd_decode(net, np.zeros(2, np.uint8)).beta_hat.tolist() == [0, 0]


def test_gnd_uses_earlier_logical_bits():
    # beta_2 copies beta_1 through one hidden path: only sequential argmax sees it
    net = constant_net(1, [3.0, -2.0])
    cfg = net.config
    w1, b1, w2, b2, w3, b3 = net.params
    unit = int(np.flatnonzero(net.masks[0][:, 1])[0])
    w1[unit, 1] = 1.0
    nxt = int(np.flatnonzero(net.masks[1][:, unit])[0])
    w2[nxt, unit] = 1.0
    assert net.masks[2][2, nxt] == 1
    w3[2, nxt] = 4.0
    res = gnd_decode(net, np.zeros(1, np.uint8))
    assert res.beta_hat.tolist() == [1, 1]
    assert cfg.n_in == 3


def test_gnd_trained_at_zero_noise_returns_identity(rsc3):
    src = Source(rsc3, DepolarizingModel(0.0))
    cfg = MadeConfig(n_in=src.n_bits, depth=2, width=4, learning_rate=5e-2, batch_size=64,
                     train_steps=200, seed=2)
    net, _ = train(cfg, sample_stream(src, 64, 0), fingerprint=src.fingerprint())
    dec = GndDecoder(net, rsc3.m, expect_fingerprint=src.fingerprint())
    assert dec.decode(np.zeros(rsc3.m, np.uint8)).tolist() == [0, 0]


def test_gnd_fingerprint_mismatch():
    net = constant_net(3, [1.0, 1.0], fingerprint="abc")
    with pytest.raises(FingerprintMismatch):
        GndDecoder(net, 3, expect_fingerprint="def")
    with pytest.raises(FingerprintMismatch):
        gnd_decode(net, np.zeros(3, np.uint8), expect_fingerprint="def")
    with pytest.raises(DimensionError):
        gnd_decode(net, np.zeros(5, np.uint8))


# ---------------------------------------------------------------------------
# MND


def test_mnd_zero_network_decodes_to_zero():
    cfg = MadeConfig(n_in=8, n_out=2, depth=2, width=1, hidden=6)
    net = MndNetwork(cfg)
    for p in net.params:
        p[...] = 0.0
    assert MndDecoder(net).decode_batch(np.ones((5, 8), np.uint8)).tolist() == [[0, 0]] * 5


def test_matched_mnd_parameter_budget():
    made = MadeConfig(n_in=26, depth=2, width=10)
    mnd = matched_mnd_config(made, 18)
    a = MadeNetwork(made).num_parameters()
    b = MndNetwork(mnd).num_parameters()
    assert abs(a - b) / a < 0.02
    assert (mnd.train_steps, mnd.batch_size, mnd.depth) == (made.train_steps, made.batch_size, made.depth)


# ---------------------------------------------------------------------------
# BP+OSD


def test_bp_zero_syndrome_gives_zero(rsc3):
    dec = BpOsdDecoder.for_code(rsc3, DepolarizingModel(0.05))
    e, conv = dec.estimate_errors(np.zeros((3, rsc3.m), np.uint8))
    assert conv.all() and not e.any()


def test_bposd_corrects_every_single_qubit_error(rsc3):
    model = DepolarizingModel(0.05)
    dec = BpOsdDecoder.for_code(rsc3, model)
    n = rsc3.n
    ops = []
    for q in range(n):
        for bx, bz in ((1, 0), (0, 1), (1, 1)):
            e = np.zeros(2 * n, np.uint8)
            e[q], e[n + q] = bx, bz
            ops.append(e)
    ops = np.array(ops)
    _, beta, gamma = rsc3.decompose_batch(ops)
    np.testing.assert_array_equal(dec.decode_batch(gamma), beta)


@pytest.mark.parametrize("mode", ["0", "cs"])
def test_osd_output_satisfies_syndrome(mode):
    frame = build_els_frame(bundled_code("qldpc30_k6"))
    dec = BpOsdDecoder.for_code(frame, DepolarizingModel(0.05))
    rng = np.random.default_rng(1)
    syn = rng.integers(0, 2, (200, frame.m), dtype=np.uint8)
    llr = rng.normal(2.0, 2.0, (200, dec.h.shape[1]))
    e = osd_postprocess(dec.h, syn, llr, mode=mode)
    np.testing.assert_array_equal(gf2_matmul(e, dec.h.T), syn)


def test_osd_inconsistent_syndrome():
    h = np.array([[1, 1, 0], [1, 1, 0]], np.uint8)
    with pytest.raises(InconsistentSyndrome):
        osd_postprocess(h, np.array([[1, 0]], np.uint8), np.zeros((1, 3)))


def test_bp_nonconvergence_is_reported():
    # two identical checks with opposite syndrome bits can never be satisfied
    h = np.array([[1, 1], [1, 1]], np.uint8)
    _, conv, _ = bp_min_sum(h, np.full(2, 0.1), np.array([[1, 0]], np.uint8), max_iter=5)
    assert not conv[0]


def test_logical_projection(rsc3):
    rng = make_rng(3)
    s = sample_code_capacity(rsc3, DepolarizingModel(0.2), rng, 500)
    errs = rsc3.compose_batch(s.alpha, s.beta, s.gamma)
    np.testing.assert_array_equal(decoder_logical_projection(rsc3, errs, s.gamma), s.beta)
    bad = s.gamma.copy()
    bad[:, 0] ^= 1
    with pytest.raises(ContractViolation):
        decoder_logical_projection(rsc3, errs, bad)


def test_bposd_on_bundled_dem_satisfies_detectors():
    dem = load_dem(next(p for p in bundled_dem_paths() if p.name.startswith("rsc3")))
    dec = BpOsdDecoder.for_dem(dem)
    src = Source(dem=dem)
    s = src.sample(make_rng(5), 2000)
    beta = dec.decode_batch(s.gamma)
    np.testing.assert_array_equal(gf2_matmul(dec.last_errors, dec.h.T), s.gamma)
    assert beta.shape == s.beta.shape
    assert (beta != s.beta).any(1).mean() < 0.1
