"""Small dense MLP with manual backprop, used as the Q-function.

Hidden layers are affine -> LeakyReLU -> inverted dropout; the output layer
is affine only. Weights are stored as (fan_in, fan_out) matrices.
"""

from __future__ import annotations

import io
import json

import numpy as np

CHECKPOINT_VERSION = 1


class Mlp:
    def __init__(self, sizes, slope: float = 0.01, dropout_p: float = 0.1, rng=None):
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if not 0.0 <= dropout_p < 1.0:
            raise ValueError("dropout_p must be in [0, 1)")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.sizes = [int(s) for s in sizes]
        self.slope = float(slope)
        self.dropout_p = float(dropout_p)
        self.training = False
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self._cache = None

    @property
    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def train(self) -> "Mlp":
        self.training = True
        return self

    def eval(self) -> "Mlp":
        self.training = False
        return self

    def forward(self, x, rng=None) -> np.ndarray:
        """Q-values for a single input vector or a (batch, inputs) array.

        In training mode with dropout_p > 0 a generator must be supplied.
        """
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[1] != self.sizes[0]:
            raise ValueError(f"expected input width {self.sizes[0]}, got {h.shape[1]}")
        drop = self.training and self.dropout_p > 0.0
        if drop and rng is None:
            raise ValueError("training-mode dropout needs an rng")
        cache = [h]
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ W + b
            if i == last:
                h = z
                cache.append((z, None))
                break
            a = np.where(z > 0, z, self.slope * z)
            mask = None
            if drop:
                mask = (rng.random(a.shape) >= self.dropout_p) / (1.0 - self.dropout_p)
                a = a * mask
            cache.append((z, mask))
            h = a
        self._cache = cache
        return h[0] if single else h

    def backward(self, grad_out: np.ndarray) -> list[np.ndarray]:
        """Parameter gradients (same order as ``params``) for the last forward."""
        if self._cache is None:
            raise RuntimeError("backward() called before forward()")
        cache = self._cache
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.weights)
        g = np.atleast_2d(grad_out)
        for i in range(len(self.weights) - 1, -1, -1):
            z, mask = cache[i + 1]
            if i < len(self.weights) - 1:
                if mask is not None:
                    g = g * mask
                g = g * np.where(z > 0, 1.0, self.slope)
            prev = cache[0] if i == 0 else self._activation(i)
            grads_w[i] = prev.T @ g
            grads_b[i] = g.sum(axis=0)
            g = g @ self.weights[i].T
        return [p for pair in zip(grads_w, grads_b) for p in pair]

    def _activation(self, i: int) -> np.ndarray:
        z, mask = self._cache[i]
        a = np.where(z > 0, z, self.slope * z)
        return a * mask if mask is not None else a

    # serialization ---------------------------------------------------------

    def state(self) -> dict:
        return {"sizes": self.sizes, "slope": self.slope, "dropout_p": self.dropout_p}

    def to_bytes(self) -> bytes:
        """Checkpoint: npz archive with a JSON header carrying the format version."""
        buf = io.BytesIO()
        header = json.dumps({"version": CHECKPOINT_VERSION, **self.state()})
        arrays = {f"p{i}": p for i, p in enumerate(self.params)}
        np.savez(buf, header=np.array(header), **arrays)
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Mlp":
        with np.load(io.BytesIO(data)) as archive:
            header = json.loads(str(archive["header"]))
            if header.get("version") != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {header.get('version')}")
            net = cls(header["sizes"], header["slope"], header["dropout_p"])
            params = [archive[f"p{i}"] for i in range(2 * (len(net.sizes) - 1))]
        net.set_params(params)
        return net

    def set_params(self, params) -> None:
        for i in range(len(self.weights)):
            W, b = params[2 * i], params[2 * i + 1]
            if W.shape != self.weights[i].shape or b.shape != self.biases[i].shape:
                raise ValueError("parameter shapes do not match the architecture")
            self.weights[i] = np.array(W, dtype=np.float64)
            self.biases[i] = np.array(b, dtype=np.float64)


def smooth_l1(pred, target) -> float:
    if np.shape(pred) != np.shape(target):
        raise ValueError("pred and target lengths differ")
    d = np.asarray(pred, dtype=np.float64) - np.asarray(target, dtype=np.float64)
    ad = np.abs(d)
    return float(np.mean(np.where(ad < 1.0, 0.5 * d * d, ad - 0.5)))


def smooth_l1_grad(pred, target) -> np.ndarray:
    d = np.asarray(pred, dtype=np.float64) - np.asarray(target, dtype=np.float64)
    return np.clip(d, -1.0, 1.0) / d.size


class Adam:
    def __init__(self, params, lr: float = 1e-4, betas=(0.9, 0.999), eps: float = 1e-8):
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params, grads) -> None:
        """Update ``params`` in place."""
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def selected_loss_and_grad(net: Mlp, inputs, actions, targets, rng=None):
    """Smooth-L1 on Q[b, actions[b]] vs targets[b], and its parameter gradients."""
    q = net.forward(np.atleast_2d(inputs), rng=rng)
    actions = np.asarray(actions, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.float64)
    if q.shape[0] != actions.size or actions.size != targets.size:
        raise ValueError("inputs, actions and targets must have the same batch size")
    rows = np.arange(actions.size)
    chosen = q[rows, actions]
    loss = smooth_l1(chosen, targets)
    grad_q = np.zeros_like(q)
    grad_q[rows, actions] = smooth_l1_grad(chosen, targets)
    return loss, net.backward(grad_q)


def train_step(net: Mlp, optimizer: Adam, inputs, actions, targets, rng=None) -> float:
    """One Adam step on the selected-output Smooth-L1 loss; returns the pre-update loss."""
    loss, grads = selected_loss_and_grad(net, inputs, actions, targets, rng)
    optimizer.step(net.params, grads)
    return loss


def copy_params(src: Mlp, dst: Mlp) -> None:
    if src.sizes != dst.sizes:
        raise ValueError(f"architecture mismatch: {src.sizes} vs {dst.sizes}")
    dst.set_params([p.copy() for p in src.params])
