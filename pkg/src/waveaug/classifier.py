"""A small trainable residual 1-D CNN, written on plain numpy.

Stem conv -> average pool -> two residual blocks (two convs each, batch norm
throughout) -> global average pool -> linear classifier. Activations are kept
channel-last, (batch, length, channels), so convolutions become a single
im2col gather plus one BLAS matrix product with no transposes. Inputs are
standardized per frame (zero mean, unit variance over both rows) before the
stem.

Training is softmax cross-entropy with Adam; analytic gradients are checked
against central finite differences by :func:`grad_check`.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import as_strided


class ClassifierError(ValueError):
    pass


class TrainingDiverged(RuntimeError):
    """Raised when the training loss stops being finite."""


@dataclass
class ModelSpec:
    n_classes: int
    length: int = 1024
    widths: tuple = (16, 32)
    stem_kernel: int = 7
    stem_stride: int = 4
    stem_pool: int = 2
    block_kernel: int = 3
    dtype: str = "float32"


@dataclass
class TrainingConfig:
    epochs: int = 50
    learning_rate: float = 0.07
    decay_epochs: tuple = (20, 40)
    decay_factor: float = 0.1
    batch_size: int = 128
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ClassifierError("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ClassifierError("learning rate must be > 0")

    def to_dict(self):
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "decay_epochs": list(self.decay_epochs),
            "decay_factor": self.decay_factor,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "decay_epochs" in d:
            d["decay_epochs"] = tuple(d["decay_epochs"])
        return cls(**d)


class Conv1d:
    """Channel-last conv; weights live as a (kernel*in_ch, out_ch) matrix."""

    def __init__(self, name, in_ch, out_ch, kernel, stride, rng, dtype):
        self.name = name
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.kernel = kernel
        self.stride = stride
        self.pad = kernel // 2
        scale = math.sqrt(2.0 / (in_ch * kernel))
        self.w = (rng.standard_normal((kernel * in_ch, out_ch)) * scale).astype(dtype)
        self.dw = np.zeros_like(self.w)
        self._cache = None

    def _patches(self, xp, n_out):
        b = xp.shape[0]
        sb, sl, sc = xp.strides
        view = as_strided(
            xp,
            shape=(b, n_out, self.kernel, self.in_ch),
            strides=(sb, self.stride * sl, sl, sc),
        )
        return view.reshape(b * n_out, self.kernel * self.in_ch)

    def forward(self, x, train):
        b, n, _ = x.shape
        xp = np.pad(x, ((0, 0), (self.pad, self.pad), (0, 0)))
        n_out = (n + 2 * self.pad - self.kernel) // self.stride + 1
        mat = self._patches(xp, n_out)
        out = mat @ self.w
        if train:
            self._cache = (mat, n, n_out)
        return out.reshape(b, n_out, self.out_ch)

    def backward(self, dy):
        mat, n, n_out = self._cache
        b = dy.shape[0]
        dmat = dy.reshape(b * n_out, self.out_ch)
        self.dw[...] = mat.T @ dmat
        dp = (dmat @ self.w.T).reshape(b, n_out, self.kernel, self.in_ch)
        dxp = np.zeros((b, n + 2 * self.pad, self.in_ch), dtype=dy.dtype)
        for j in range(self.kernel):
            dxp[:, j:j + self.stride * n_out:self.stride, :] += dp[:, :, j, :]
        return dxp[:, self.pad:self.pad + n, :] if self.pad else dxp

    def params(self):
        return [(self.name + ".w", self.w, self.dw)]


class BatchNorm1d:
    def __init__(self, name, channels, dtype, momentum=0.1, eps=1e-5):
        self.name = name
        self.eps = eps
        self.momentum = momentum
        self.gamma = np.ones(channels, dtype=dtype)
        self.beta = np.zeros(channels, dtype=dtype)
        self.dgamma = np.zeros_like(self.gamma)
        self.dbeta = np.zeros_like(self.beta)
        self.run_mean = np.zeros(channels, dtype=dtype)
        self.run_var = np.ones(channels, dtype=dtype)
        self._cache = None

    def forward(self, x, train):
        if train:
            mean = x.mean(axis=(0, 1))
            var = x.var(axis=(0, 1))
            self.run_mean = ((1 - self.momentum) * self.run_mean
                             + self.momentum * mean).astype(self.run_mean.dtype)
            self.run_var = ((1 - self.momentum) * self.run_var
                            + self.momentum * var).astype(self.run_var.dtype)
            ivar = 1.0 / np.sqrt(var + self.eps)
            xhat = (x - mean) * ivar
            self._cache = (xhat, ivar, x.shape[0] * x.shape[1])
            return self.gamma * xhat + self.beta
        ivar = 1.0 / np.sqrt(self.run_var + self.eps)
        return self.gamma * ((x - self.run_mean) * ivar) + self.beta

    def backward(self, dy):
        xhat, ivar, m = self._cache
        self.dgamma[...] = (dy * xhat).sum(axis=(0, 1))
        self.dbeta[...] = dy.sum(axis=(0, 1))
        dxhat = dy * self.gamma
        s1 = dxhat.sum(axis=(0, 1))
        s2 = (dxhat * xhat).sum(axis=(0, 1))
        return (ivar / m) * (m * dxhat - s1 - xhat * s2)

    def params(self):
        return [
            (self.name + ".gamma", self.gamma, self.dgamma),
            (self.name + ".beta", self.beta, self.dbeta),
        ]


class ReLU:
    def __init__(self):
        self._mask = None

    def forward(self, x, train):
        if train:
            self._mask = x > 0
            return x * self._mask
        return np.maximum(x, 0)

    def backward(self, dy):
        return dy * self._mask


class AvgPool:
    def __init__(self, width):
        self.width = width

    def forward(self, x, train):
        b, n, c = x.shape
        return x.reshape(b, n // self.width, self.width, c).mean(axis=2)

    def backward(self, dy):
        return np.repeat(dy, self.width, axis=1) / self.width


class ResidualBlock:
    """conv-bn-relu-conv-bn plus a (projected) shortcut, then relu."""

    def __init__(self, name, in_ch, out_ch, kernel, stride, rng, dtype):
        self.conv1 = Conv1d(name + ".conv1", in_ch, out_ch, kernel, stride, rng, dtype)
        self.bn1 = BatchNorm1d(name + ".bn1", out_ch, dtype)
        self.relu1 = ReLU()
        self.conv2 = Conv1d(name + ".conv2", out_ch, out_ch, kernel, 1, rng, dtype)
        self.bn2 = BatchNorm1d(name + ".bn2", out_ch, dtype)
        self.relu2 = ReLU()
        self.project = stride != 1 or in_ch != out_ch
        if self.project:
            self.conv_sc = Conv1d(name + ".shortcut", in_ch, out_ch, 1, stride, rng, dtype)
            self.bn_sc = BatchNorm1d(name + ".bn_sc", out_ch, dtype)

    def forward(self, x, train):
        y = self.bn1.forward(self.conv1.forward(x, train), train)
        y = self.relu1.forward(y, train)
        y = self.bn2.forward(self.conv2.forward(y, train), train)
        sc = x
        if self.project:
            sc = self.bn_sc.forward(self.conv_sc.forward(x, train), train)
        return self.relu2.forward(y + sc, train)

    def backward(self, dy):
        dsum = self.relu2.backward(dy)
        dmain = self.conv1.backward(
            self.bn1.backward(self.relu1.backward(
                self.conv2.backward(self.bn2.backward(dsum))))
        )
        if self.project:
            dsc = self.conv_sc.backward(self.bn_sc.backward(dsum))
        else:
            dsc = dsum
        return dmain + dsc

    def params(self):
        out = (self.conv1.params() + self.bn1.params()
               + self.conv2.params() + self.bn2.params())
        if self.project:
            out += self.conv_sc.params() + self.bn_sc.params()
        return out

    def batch_norms(self):
        return [self.bn1, self.bn2] + ([self.bn_sc] if self.project else [])


class GlobalAvgPool:
    def __init__(self):
        self._n = None

    def forward(self, x, train):
        self._n = x.shape[1]
        return x.mean(axis=1)

    def backward(self, dy):
        return np.repeat(dy[:, None, :], self._n, axis=1) / self._n


class Dense:
    def __init__(self, name, in_dim, out_dim, dtype):
        self.name = name
        # zero init: fresh models emit uniform logits
        self.w = np.zeros((in_dim, out_dim), dtype=dtype)
        self.b = np.zeros(out_dim, dtype=dtype)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._x = None

    def forward(self, x, train):
        if train:
            self._x = x
        return x @ self.w + self.b

    def backward(self, dy):
        self.dw[...] = self._x.T @ dy
        self.db[...] = dy.sum(axis=0)
        return dy @ self.w.T

    def params(self):
        return [(self.name + ".w", self.w, self.dw),
                (self.name + ".b", self.b, self.db)]


class IqClassifier:
    def __init__(self, spec, rng=None):
        rng = rng or np.random.default_rng(0)
        self.spec = spec
        dtype = np.dtype(spec.dtype).type
        w1, w2 = spec.widths
        self.stem = Conv1d("stem", 2, w1, spec.stem_kernel, spec.stem_stride, rng, dtype)
        self.stem_bn = BatchNorm1d("stem_bn", w1, dtype)
        self.block1 = ResidualBlock("block1", w1, w1, spec.block_kernel, 2, rng, dtype)
        self.block2 = ResidualBlock("block2", w1, w2, spec.block_kernel, 2, rng, dtype)
        self.head = Dense("head", w2, spec.n_classes, dtype)
        self._layers = [self.stem, self.stem_bn, ReLU(), AvgPool(spec.stem_pool),
                        self.block1, self.block2, GlobalAvgPool(), self.head]

    @staticmethod
    def standardize(x):
        mu = x.mean(axis=(1, 2), keepdims=True)
        sd = x.std(axis=(1, 2), keepdims=True)
        return (x - mu) / (sd + 1e-8)

    def forward(self, x, train=False):
        x = np.asarray(x)
        if not np.all(np.isfinite(x)):
            raise ClassifierError("non-finite values in input batch")
        if x.ndim != 3 or x.shape[1] != 2:
            raise ClassifierError(f"expected (batch, 2, L) input, got {x.shape}")
        x = self.standardize(x.astype(self.spec.dtype))
        x = np.ascontiguousarray(x.transpose(0, 2, 1))  # channel-last
        for layer in self._layers:
            x = layer.forward(x, train)
        return x

    def backward(self, dlogits):
        d = dlogits
        for layer in reversed(self._layers):
            d = layer.backward(d)
        return d

    def params(self):
        out = []
        for layer in (self.stem, self.stem_bn, self.block1, self.block2, self.head):
            out.extend(layer.params())
        return out

    def _batch_norms(self):
        return [self.stem_bn] + self.block1.batch_norms() + self.block2.batch_norms()

    def state_dict(self):
        state = {name: arr.copy() for name, arr, _ in self.params()}
        for bn in self._batch_norms():
            state[bn.name + ".run_mean"] = bn.run_mean.copy()
            state[bn.name + ".run_var"] = bn.run_var.copy()
        return state

    def load_state_dict(self, state):
        for name, arr, _ in self.params():
            arr[...] = state[name]
        for bn in self._batch_norms():
            bn.run_mean[...] = state[bn.name + ".run_mean"]
            bn.run_var[...] = state[bn.name + ".run_var"]


def softmax_cross_entropy(logits, labels):
    b, c = logits.shape
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= c:
        raise ClassifierError(f"label outside 0..{c - 1}")
    z = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(z)
    p = expz / expz.sum(axis=1, keepdims=True)
    loss = float(-np.mean(np.log(p[np.arange(b), labels] + 1e-300)))
    dlogits = p.copy()
    dlogits[np.arange(b), labels] -= 1.0
    return loss, dlogits / b


def loss_and_grads(model, batch, labels):
    """Mean cross-entropy plus the gradient of every parameter."""
    logits = model.forward(batch, train=True)
    loss, dlogits = softmax_cross_entropy(logits, labels)
    model.backward(dlogits.astype(logits.dtype))
    grads = {name: g.copy() for name, _, g in model.params()}
    return loss, grads


class Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for _, p, _ in params]
        self.v = [np.zeros_like(p) for _, p, _ in params]
        self.t = 0

    def step(self):
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for (_, p, g), m, v in zip(self.params, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= (self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)).astype(p.dtype)


def train(model, x, labels, config, rng=None):
    """Run the epoch/decay schedule; returns the per-epoch mean loss history."""
    if len(x) == 0:
        raise ClassifierError("empty training set")
    rng = rng or np.random.default_rng(config.seed)
    opt = Adam(model.params(), config.learning_rate)
    history = []
    for epoch in range(config.epochs):
        lr = config.learning_rate
        for de in config.decay_epochs:
            if epoch >= de:
                lr *= config.decay_factor
        opt.lr = lr
        order = rng.permutation(len(x))
        losses = []
        for start in range(0, len(x), config.batch_size):
            sel = order[start:start + config.batch_size]
            loss, _ = loss_and_grads(model, x[sel], labels[sel])
            if not math.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch} batch {start // config.batch_size}"
                )
            opt.step()
            losses.append(loss)
        history.append(float(np.mean(losses)))
    return history


def predict(model, x, batch_size=256):
    out = []
    for start in range(0, len(x), batch_size):
        logits = model.forward(x[start:start + batch_size], train=False)
        out.append(np.argmax(logits, axis=1))
    return np.concatenate(out)


def save_model(model, path):
    import json

    state = model.state_dict()
    spec = model.spec
    meta = json.dumps({
        "n_classes": spec.n_classes, "length": spec.length,
        "widths": list(spec.widths), "stem_kernel": spec.stem_kernel,
        "stem_stride": spec.stem_stride, "stem_pool": spec.stem_pool,
        "block_kernel": spec.block_kernel, "dtype": spec.dtype,
    })
    np.savez(path, __spec__=np.frombuffer(meta.encode(), dtype=np.uint8), **state)


def load_model(path):
    import json

    with np.load(path) as data:
        meta = json.loads(bytes(data["__spec__"]).decode())
        meta["widths"] = tuple(meta["widths"])
        model = IqClassifier(ModelSpec(**meta))
        model.load_state_dict({k: data[k] for k in data.files if k != "__spec__"})
    return model


def grad_check(spec=None, rng=None, samples_per_tensor=50, h=1e-5):
    """Central finite differences vs analytic gradients, in 64-bit.

    Samples up to ``samples_per_tensor`` entries of every parameter tensor
    (all of them for smaller tensors). Returns the max relative error per
    tensor and the offenders above 1e-4.
    """
    rng = rng or np.random.default_rng(0)
    spec = spec or ModelSpec(n_classes=4, length=64, dtype="float64")
    if spec.dtype != "float64":
        raise ClassifierError("grad_check requires a float64 model spec")
    model = IqClassifier(spec, rng)
    # non-degenerate weights everywhere, including the zero-initialized head
    for _, p, _ in model.params():
        p += rng.standard_normal(p.shape) * 0.05
    batch = rng.standard_normal((4, 2, spec.length))
    labels = rng.integers(0, spec.n_classes, size=4)

    _, grads = loss_and_grads(model, batch, labels)

    def loss_only():
        logits = model.forward(batch, train=True)
        loss, _ = softmax_cross_entropy(logits, labels)
        return loss

    report = {}
    offenders = []
    for name, p, _ in model.params():
        flat = p.reshape(-1)
        n_pick = min(samples_per_tensor, flat.shape[0])
        picks = rng.choice(flat.shape[0], size=n_pick, replace=False)
        worst = 0.0
        for i in picks:
            keep = flat[i]
            flat[i] = keep + h
            lp = loss_only()
            flat[i] = keep - h
            lm = loss_only()
            flat[i] = keep
            numeric = (lp - lm) / (2 * h)
            analytic = grads[name].reshape(-1)[i]
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, rel)
            if rel >= 1e-4:
                offenders.append((name, int(i), float(rel)))
        report[name] = worst
    return {"max_rel_error": max(report.values()), "per_tensor": report,
            "offenders": offenders, "passed": not offenders}
