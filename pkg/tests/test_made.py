import itertools

import numpy as np
import pytest

from gnd.codes import build_els_frame, rotated_surface_code
from gnd.made import (
    AdamState,
    CheckpointError,
    FingerprintMismatch,
    MadeConfig,
    MadeNetwork,
    MndNetwork,
    adam_step,
    backward,
    build_masks,
    conditional,
    forward,
    load_checkpoint,
    nll_loss,
    save_checkpoint,
    train,
)
from gnd.noise import DepolarizingModel, LabeledSample, Source, sample_stream
from gnd.pauli import DimensionError


def random_net(n_in=12, depth=3, width=2, seed=0, bias_scale=0.5):
    net = MadeNetwork(MadeConfig(n_in=n_in, depth=depth, width=width, seed=seed))
    rng = np.random.default_rng(seed)
    for p in net.params[1::2]:
        p += rng.normal(0, bias_scale, p.shape)
    return net


def all_strings(n):
    return np.array(list(itertools.product([0, 1], repeat=n)), dtype=float)


def finite_difference(net, batch, step=1e-5):
    out = []
    for p in net.params:
        fd = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + step
            up = nll_loss(net, batch)
            p[idx] = old - step
            down = nll_loss(net, batch)
            p[idx] = old
            fd[idx] = (up - down) / (2 * step)
        out.append(fd)
    return out


def test_masks_three_inputs():
    cfg = MadeConfig(n_in=3, depth=1, hidden=2)
    masks, degrees = build_masks(cfg)
    assert degrees[1].tolist() == [1, 2]
    assert not masks[-1][0].any()
    # path counting: output i reachable only from inputs j < i
    paths = masks[-1].astype(int)
    for m in masks[-2::-1]:
        paths = paths @ m.astype(int)
    for i, j in itertools.product(range(3), repeat=2):
        assert (paths[i, j] > 0) == (j < i)


@pytest.mark.parametrize("n_in, size", [(10, 80), (7, 13), (2, 5)])
def test_degrees_balanced(n_in, size):
    _, degrees = build_masks(MadeConfig(n_in=n_in, depth=2, hidden=size))
    counts = np.bincount(degrees[1], minlength=n_in)[1:max(n_in, 2)]
    assert counts.max() - counts.min() <= 1


def test_deep_path_causality_matrix():
    masks, _ = build_masks(MadeConfig(n_in=12, depth=3, width=2))
    paths = masks[-1].astype(int)
    for m in masks[-2::-1]:
        paths = paths @ m.astype(int)
    assert not np.triu(paths).any()
    assert (np.tril(paths, -1) > 0).sum() == 12 * 11 // 2


def test_zero_network_is_uniform():
    net = MadeNetwork(MadeConfig(n_in=6, depth=2, width=3))
    for p in net.params:
        p[...] = 0
    bits = np.random.default_rng(0).integers(0, 2, (10, 6))
    assert np.all(forward(net, bits) == 0.5)
    assert nll_loss(net, bits) == pytest.approx(6 * np.log(2))


def test_bias_only_network():
    net = MadeNetwork(MadeConfig(n_in=4, depth=1, width=2))
    for p in net.params:
        p[...] = 0
    net.params[-1][2] = 1.3
    out = forward(net, np.array([1, 0, 1, 1]))
    assert out[2] == pytest.approx(1 / (1 + np.exp(-1.3)))
    assert np.allclose(forward(net, np.zeros(4))[2], out[2])


def test_dimension_mismatch():
    net = MadeNetwork(MadeConfig(n_in=4))
    with pytest.raises(DimensionError):
        forward(net, np.zeros(5))


def test_causality_perturbation():
    net = random_net()
    rng = np.random.default_rng(1)
    x = rng.integers(0, 2, (100, 12)).astype(float)
    base = forward(net, x)
    for j in range(12):
        y = x.copy()
        y[:, j] = 1 - y[:, j]
        diff = forward(net, y) - base
        assert not diff[:, : j + 1].any()


@pytest.mark.parametrize("n_in", [1, 4, 9, 12])
def test_normalization(n_in):
    net = random_net(n_in=n_in, depth=2, width=3, bias_scale=1.0)
    total = np.exp(net.log_prob(all_strings(n_in))).sum()
    assert abs(total - 1.0) < 1e-10


def test_loss_matches_chain_rule_on_toy():
    net = random_net(n_in=4, depth=2, width=3, seed=5)
    strings = all_strings(4)
    q = []
    for s in strings:
        prob = 1.0
        for i in range(4):
            pi = conditional(net, s, i)
            prob *= pi if s[i] else 1 - pi
        q.append(prob)
    q = np.array(q)
    assert q.sum() == pytest.approx(1.0, abs=1e-12)
    for s, qs in zip(strings, q):
        assert nll_loss(net, s[None]) == pytest.approx(-np.log(qs), rel=1e-12)


def test_perfect_predictions_give_zero_loss():
    net = MadeNetwork(MadeConfig(n_in=3, depth=1, width=1))
    for p in net.params:
        p[...] = 0
    net.params[-1][:] = -50.0
    assert nll_loss(net, np.zeros((4, 3))) < 1e-6


def test_gradient_check():
    net = random_net()
    x = np.random.default_rng(2).integers(0, 2, (64, 12)).astype(float)
    analytic = backward(net, x)
    numeric = finite_difference(net, x)
    rel = max(np.abs(a - f).max() / np.abs(a).max() for a, f in zip(analytic, numeric))
    assert rel < 1e-5
    # element-wise, for entries well above finite-difference round-off
    for a, f in zip(analytic, numeric):
        big = np.abs(a) > 1e-3
        assert (np.abs(a - f)[big] / np.abs(a)[big]).max() < 1e-5
    print(f"gradient check: max tensor-relative error {rel:.2e}")


def test_masked_gradients_are_zero_and_bias_identity():
    net = random_net(n_in=6, depth=2, width=2)
    x = np.random.default_rng(3).integers(0, 2, (32, 6)).astype(float)
    grads = backward(net, x)
    for g, m in zip(grads[::2], net.masks):
        assert not g[m == 0].any()
    p = forward(net, x)
    assert np.allclose(grads[-1], (p - x).mean(0))


def test_adam_closed_forms():
    params = [np.array([1.0, -2.0, 3.0])]
    state = AdamState.like(params)
    adam_step(params, [np.array([0.5, -4.0, 0.0])], state, lr=1e-3)
    assert np.allclose(params[0], [1.0 - 1e-3, -2.0 + 1e-3, 3.0], atol=1e-9)
    before = params[0].copy()
    state = AdamState.like(params)
    adam_step(params, [np.zeros(3)], state, lr=1e-3)
    assert np.array_equal(params[0], before)
    with pytest.raises(DimensionError):
        adam_step(params, [np.zeros(2)], state, lr=1e-3)


def _toy_stream(p, batch, seed):
    frame = build_els_frame(rotated_surface_code(3))
    return sample_stream(Source(frame, DepolarizingModel(p)), batch, seed)


def test_training_is_deterministic():
    cfg = MadeConfig(n_in=10, depth=1, width=2, train_steps=20, batch_size=32, seed=4)
    a, _ = train(cfg, _toy_stream(0.1, 32, 1))
    b, _ = train(cfg, _toy_stream(0.1, 32, 1))
    for x, y in zip(a.params, b.params):
        assert np.array_equal(x, y)


def test_training_at_zero_noise_drives_loss_to_zero():
    cfg = MadeConfig(n_in=10, depth=1, width=2, train_steps=2000, batch_size=64, learning_rate=5e-2)
    _, log = train(cfg, _toy_stream(0.0, 64, 0))
    assert log.losses[-1] < 1e-2


def test_training_reduces_loss():
    cfg = MadeConfig(n_in=10, depth=2, width=4, train_steps=400, batch_size=256, learning_rate=3e-3)
    _, log = train(cfg, _toy_stream(0.189, 256, 0))
    assert log.smoothed[-1] < 10 * np.log(2) - 1.0


def test_conditional_hand_computed():
    # 4 inputs, one hidden layer of 3 units with degrees 1, 2, 3
    net = MadeNetwork(MadeConfig(n_in=4, depth=1, hidden=3))
    for p in net.params:
        p[...] = 0
    w1, b1, w2, b2 = net.params
    w1[0, 0] = 2.0      # h0 = relu(2 x0)
    w1[1, 1] = -1.0     # h1 = relu(-x1 + 0.5)
    b1[1] = 0.5
    w2[3, 0] = 1.5      # output 3 sees h0, h1 (deg <= 3)
    w2[3, 1] = -2.0
    b2[3] = 0.25
    x = [1, 0, 1, 0]
    logit = 1.5 * 2.0 - 2.0 * 0.5 + 0.25
    assert conditional(net, x, 3) == pytest.approx(1 / (1 + np.exp(-logit)))
    assert conditional(net, x, 3) == conditional(net, [1, 0, 1, 1], 3)
    assert conditional(net, [1, 0, 1, 1], 2) == conditional(net, [1, 0, 0, 0], 2)
    with pytest.raises(IndexError):
        conditional(net, x, 4)


def test_conditional_equals_padded_forward():
    net = random_net(n_in=8, depth=2)
    rng = np.random.default_rng(9)
    for _ in range(20):
        bits = rng.integers(0, 2, 8)
        i = int(rng.integers(0, 8))
        padded = np.where(np.arange(8) < i, bits, 0)
        assert conditional(net, bits, i) == forward(net, padded)[i]


def test_checkpoint_round_trip(tmp_path):
    net = random_net(n_in=10, depth=2)
    net.fingerprint = "abc123"
    path = tmp_path / "net.ckpt"
    save_checkpoint(net, path)
    back = load_checkpoint(path, expect_fingerprint="abc123")
    for a, b in zip(net.params, back.params):
        assert a.dtype == b.dtype and np.array_equal(a, b)
    x = np.random.default_rng(0).integers(0, 2, (5, 10))
    assert np.array_equal(forward(net, x), forward(back, x))
    assert path.read_bytes()[:8] == b"GNDCKPT1"


def test_checkpoint_single_precision_and_mnd(tmp_path):
    cfg = MadeConfig(n_in=8, n_out=2, depth=2, hidden=16, precision="single")
    net = MndNetwork(cfg)
    save_checkpoint(net, tmp_path / "m.ckpt")
    back = load_checkpoint(tmp_path / "m.ckpt")
    assert isinstance(back, MndNetwork) and back.params[0].dtype == np.float32
    assert np.array_equal(back.params[0], net.params[0])


def test_checkpoint_failures(tmp_path):
    net = random_net(n_in=6, depth=1)
    net.fingerprint = "good"
    path = tmp_path / "n.ckpt"
    save_checkpoint(net, path)
    raw = path.read_bytes()
    (tmp_path / "t.ckpt").write_bytes(raw[:-7])
    with pytest.raises(CheckpointError, match="corrupt"):
        load_checkpoint(tmp_path / "t.ckpt")
    (tmp_path / "h.ckpt").write_bytes(raw[:20])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "h.ckpt")
    (tmp_path / "m.ckpt").write_bytes(b"NOTACKPT" + raw[8:])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "m.ckpt")
    with pytest.raises(FingerprintMismatch):
        load_checkpoint(path, expect_fingerprint="other")
    bad = raw.replace(b'"format": 1', b'"format": 9')
    (tmp_path / "v.ckpt").write_bytes(bad)
    with pytest.raises(CheckpointError, match="format"):
        load_checkpoint(tmp_path / "v.ckpt")


def test_mnd_network_shapes():
    cfg = MadeConfig(n_in=8, n_out=2, depth=2, hidden=10)
    net = MndNetwork(cfg)
    sample = LabeledSample(np.zeros((3, 2)), np.ones((3, 8)))
    loss, grads = net.loss_and_grads(sample)
    assert np.isfinite(loss) and grads[-1].shape == (2,)
    assert forward(net, np.zeros(8)).shape == (2,)
