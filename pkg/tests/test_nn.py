import numpy as np
import pytest

from qarch.nn import (Adam, Mlp, copy_params, selected_loss_and_grad, smooth_l1, smooth_l1_grad,
                      train_step)


def test_identity_layer():
    net = Mlp([3, 3], dropout_p=0.0)
    net.set_params([np.eye(3), np.zeros(3)])
    assert np.array_equal(net.forward([1.0, -2.0, 0.5]), [1.0, -2.0, 0.5])


def test_leaky_relu_slope():
    net = Mlp([1, 1, 1], slope=0.01, dropout_p=0.0)
    net.set_params([np.ones((1, 1)), np.zeros(1), np.ones((1, 1)), np.zeros(1)])
    assert net.forward([-1.0])[0] == pytest.approx(-0.01)
    assert net.forward([2.0])[0] == pytest.approx(2.0)


def test_eval_mode_deterministic_and_dropout_zero_equal(rng):
    net = Mlp([5, 8, 8, 3], dropout_p=0.0, rng=rng)
    x = rng.normal(size=(4, 5))
    eval_out = net.eval().forward(x)
    train_out = net.train().forward(x, rng=np.random.default_rng(1))
    assert np.array_equal(eval_out, train_out)


def test_training_dropout_needs_rng(rng):
    net = Mlp([2, 4, 1], rng=rng).train()
    with pytest.raises(ValueError):
        net.forward([0.0, 1.0])


def test_input_width_checked():
    with pytest.raises(ValueError):
        Mlp([3, 2]).forward([1.0, 2.0])


def test_init_bounds():
    net = Mlp([81, 128, 128, 24], rng=np.random.default_rng(0))
    for W, b in zip(net.weights, net.biases):
        assert np.max(np.abs(W)) <= 1 / np.sqrt(W.shape[0])
        assert not b.any()


def test_smooth_l1_values():
    assert smooth_l1([0.0], [0.0]) == 0.0
    assert smooth_l1([0.5], [0.0]) == 0.125
    assert smooth_l1([2.0], [0.0]) == 1.5
    with pytest.raises(ValueError):
        smooth_l1([1.0, 2.0], [1.0])
    assert np.allclose(smooth_l1_grad([0.5, 3.0, -4.0], [0, 0, 0]), [0.5 / 3, 1 / 3, -1 / 3])


def test_backprop_matches_finite_differences(rng):
    net = Mlp([6, 7, 5, 4], slope=0.01, dropout_p=0.0, rng=rng)
    x = rng.normal(size=(5, 6))
    actions = rng.integers(0, 4, 5)
    targets = rng.normal(scale=2.0, size=5)
    _, grads = selected_loss_and_grad(net, x, actions, targets)
    h = 1e-6
    for p, g in zip(net.params, grads):
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up, _ = selected_loss_and_grad(net, x, actions, targets)
            p[idx] = old - h
            down, _ = selected_loss_and_grad(net, x, actions, targets)
            p[idx] = old
            fd = (up - down) / (2 * h)
            assert abs(fd - g[idx]) <= 1e-4 * max(1.0, abs(fd))


def test_backprop_with_dropout_mask(rng):
    net = Mlp([3, 6, 2], dropout_p=0.5, rng=rng).train()
    x = rng.normal(size=(2, 3))
    seed = 11
    _, grads = selected_loss_and_grad(net, x, [0, 1], [1.0, -1.0], rng=np.random.default_rng(seed))
    h = 1e-6
    W = net.params[0]
    W[0, 0] += h
    up, _ = selected_loss_and_grad(net, x, [0, 1], [1.0, -1.0], rng=np.random.default_rng(seed))
    W[0, 0] -= 2 * h
    down, _ = selected_loss_and_grad(net, x, [0, 1], [1.0, -1.0], rng=np.random.default_rng(seed))
    assert grads[0][0, 0] == pytest.approx((up - down) / (2 * h), abs=1e-6)


def test_zero_loss_step_keeps_params(rng):
    net = Mlp([3, 4, 2], dropout_p=0.0, rng=rng)
    x = rng.normal(size=(3, 3))
    actions = np.array([0, 1, 0])
    targets = net.forward(x)[np.arange(3), actions]
    before = [p.copy() for p in net.params]
    loss = train_step(net, Adam(net.params, lr=1e-2), x, actions, targets)
    assert loss == 0.0
    assert all(np.array_equal(a, b) for a, b in zip(before, net.params))


def test_overfits_tiny_batch(rng):
    net = Mlp([4, 16, 16, 3], dropout_p=0.0, rng=rng)
    opt = Adam(net.params, lr=1e-2)
    x = rng.normal(size=(4, 4))
    actions = np.array([0, 1, 2, 1])
    targets = np.array([1.0, -0.5, 0.25, 2.0])
    losses = [train_step(net, opt, x, actions, targets) for _ in range(500)]
    assert losses[-1] < 1e-4
    assert np.mean(losses[-10:]) < np.mean(losses[:10])


def test_copy_params(rng):
    a = Mlp([3, 4, 2], rng=rng)
    b = Mlp([3, 4, 2], rng=np.random.default_rng(99))
    copy_params(a, b)
    assert all(np.array_equal(x, y) for x, y in zip(a.params, b.params))
    a.params[0][0, 0] += 1.0
    assert b.params[0][0, 0] != a.params[0][0, 0]
    with pytest.raises(ValueError):
        copy_params(a, Mlp([3, 5, 2]))


def test_dropout_preserves_mean():
    net = Mlp([1, 1, 1], slope=1.0, dropout_p=0.1).train()
    net.set_params([np.ones((1, 1)), np.zeros(1), np.ones((1, 1)), np.zeros(1)])
    out = net.forward(np.ones((100000, 1)), rng=np.random.default_rng(0))
    assert abs(out.mean() - 1.0) < 0.02


def test_checkpoint_round_trip(rng):
    net = Mlp([5, 8, 3], slope=0.02, dropout_p=0.2, rng=rng)
    back = Mlp.from_bytes(net.to_bytes())
    assert back.sizes == net.sizes and back.slope == 0.02 and back.dropout_p == 0.2
    x = rng.normal(size=(3, 5))
    assert np.array_equal(back.forward(x), net.forward(x))


def test_checkpoint_version_checked(rng):
    import io
    import json
    net = Mlp([2, 2], rng=rng)
    buf = io.BytesIO()
    np.savez(buf, header=np.array(json.dumps({"version": 99, **net.state()})),
             p0=net.params[0], p1=net.params[1])
    with pytest.raises(ValueError):
        Mlp.from_bytes(buf.getvalue())
