"""From-scratch 3-m-3 back-propagation network learning tip position -> pressures.

One hidden layer of logistic-sigmoid units, identity output units (a logistic
output mode exists behind a config switch), quadratic loss. Training is plain
gradient descent without momentum, mini-batching tricks, or shuffling: each
epoch sweeps the training set once in fixed dataset order and applies the
per-sample update with step eta immediately. The batch MSE in standardized
units is recorded after every epoch and training stops when it reaches the
configured precision or the epoch budget runs out.

The functional operations (init_weights, forward_pass, gradients, train, ...)
are the primary surface; PressureNet wraps them in an sklearn-style estimator
for pipeline ergonomics and model persistence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import (
    ConstantTargets,
    DegenerateFeature,
    DivergedLoss,
    NoEligibleComponents,
)
from .kinematics import TipPosition

MODEL_FORMAT_VERSION = 1

# Targets with |T| below this (kPa) are excluded from MAPE: the pressure grid
# contains exact zeros where a percentage error is undefined.
MAPE_MIN_ABS_TARGET = 1.0

OUTPUT_ACTIVATIONS = ("identity", "logistic")


def sigmoid(z):
    """Numerically stable logistic sigmoid, elementwise."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class NetworkConfig:
    """Hyperparameters of the 3-m-3 network.

    n and k_out are fixed at 3 for this model. m is the hidden width, eta the
    learning rate, n_t the epoch budget, n_p the MSE stop threshold in
    standardized units, init_half_width the bound of the uniform weight init.
    """

    m: int = 13
    eta: float = 0.01
    n_t: int = 500
    n_p: float = 0.01
    seed: int = 0
    init_half_width: float = 0.5
    output_activation: str = "identity"
    standardize_targets: bool = True
    n: int = 3
    k_out: int = 3

    def __post_init__(self):
        if self.n != 3 or self.k_out != 3:
            raise ValueError("this model is 3-input 3-output: n = k_out = 3")
        if not (isinstance(self.m, int) and 3 <= self.m <= 13):
            raise ValueError(f"hidden width m must be an int in [3, 13], got {self.m!r}")
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError(f"eta must be positive, got {self.eta!r}")
        if not (isinstance(self.n_t, int) and self.n_t >= 1):
            raise ValueError(f"n_t must be an int >= 1, got {self.n_t!r}")
        if not (math.isfinite(self.n_p) and self.n_p > 0):
            raise ValueError(f"n_p must be positive, got {self.n_p!r}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ValueError(f"seed must be a non-negative int, got {self.seed!r}")
        if not (math.isfinite(self.init_half_width) and self.init_half_width >= 0):
            raise ValueError(
                f"init_half_width must be >= 0, got {self.init_half_width!r}"
            )
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(
                f"output_activation must be one of {OUTPUT_ACTIVATIONS}, "
                f"got {self.output_activation!r}"
            )
        if not isinstance(self.standardize_targets, bool):
            raise ValueError("standardize_targets must be a bool")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NetworkWeights:
    """Weight set (or a gradient of one): v (n,m), b (m,), w (m,k), beta (k,)."""

    v: np.ndarray
    b: np.ndarray
    w: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _readonly(self.v))
        object.__setattr__(self, "b", _readonly(self.b))
        object.__setattr__(self, "w", _readonly(self.w))
        object.__setattr__(self, "beta", _readonly(self.beta))
        n, m = self.v.shape
        if self.b.shape != (m,):
            raise ValueError(f"b shape {self.b.shape} does not match v {self.v.shape}")
        if self.w.shape[0] != m or self.w.ndim != 2:
            raise ValueError(f"w shape {self.w.shape} does not match hidden width {m}")
        k = self.w.shape[1]
        if self.beta.shape != (k,):
            raise ValueError(f"beta shape {self.beta.shape} does not match w {self.w.shape}")
        for name in ("v", "b", "w", "beta"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")


@dataclass(frozen=True)
class Standardizer:
    """Per-feature affine map to zero mean and unit standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _readonly(self.mean))
        object.__setattr__(self, "std", _readonly(self.std))
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ValueError("mean and std must be 1-d arrays of equal length")
        if np.any(self.std <= 0):
            raise DegenerateFeature("standardizer std must be positive per feature")

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        std = X.std(axis=0)
        if np.any(std == 0):
            idx = int(np.flatnonzero(std == 0)[0])
            raise DegenerateFeature(f"feature {idx} has zero variance")
        return cls(mean=X.mean(axis=0), std=std)

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(mean=np.zeros(dim), std=np.ones(dim))

    def transform(self, X):
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def inverse_transform(self, X):
        return np.asarray(X, dtype=float) * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(mean=np.asarray(d["mean"]), std=np.asarray(d["std"]))


@dataclass(frozen=True)
class TrainingHistory:
    """Per-epoch MSE trace plus how training ended and the MAC total."""

    mse: tuple
    stop_reason: str  # "threshold" | "max_iterations"
    macs: int


class MapeResult(NamedTuple):
    percent: float
    eligible: int


def candidate_hidden_sizes(n_in: int, n_out: int) -> list[int]:
    """Candidate hidden widths: round-half-up(sqrt(n_in + n_out)) + 1 .. + 11.

    An 11-wide band; for a 3-input 3-output network this is {3, ..., 13}.
    """
    if n_in < 1 or n_out < 1:
        raise ValueError("n_in and n_out must be >= 1")
    base = math.floor(math.sqrt(n_in + n_out) + 0.5)
    return list(range(base + 1, base + 12))


def init_weights(config: NetworkConfig) -> NetworkWeights:
    """Draw all weights i.i.d. uniform on [-init_half_width, +init_half_width].

    Traversal order (fixed, so a seed pins every entry): v row by row, then b,
    then w row by row, then beta.
    """
    rng = np.random.default_rng(config.seed)
    hw = config.init_half_width
    return NetworkWeights(
        v=rng.uniform(-hw, hw, (config.n, config.m)),
        b=rng.uniform(-hw, hw, config.m),
        w=rng.uniform(-hw, hw, (config.m, config.k_out)),
        beta=rng.uniform(-hw, hw, config.k_out),
    )


def _forward_batch(weights: NetworkWeights, X: np.ndarray, output_activation: str):
    H = sigmoid(X @ weights.v + weights.b)
    out = H @ weights.w + weights.beta
    if output_activation == "logistic":
        out = sigmoid(out)
    return out, H


def forward_pass(
    weights: NetworkWeights, x, output_activation: str = "identity"
) -> tuple[np.ndarray, np.ndarray]:
    """One forward evaluation on a standardized input 3-vector.

    Returns (output k-vector, hidden activations m-vector); the hidden
    activations feed the gradient computation.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (weights.v.shape[0],):
        raise ValueError(f"input shape {x.shape} does not match v {weights.v.shape}")
    out, H = _forward_batch(weights, x[None, :], output_activation)
    return out[0], H[0]


def loss(pred, target) -> float:
    """Per-sample quadratic loss E = 0.5 * sum_q (pred_q - target_q)^2."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ValueError("pred and target shapes differ")
    e = pred - target
    return 0.5 * float(e @ e)


def batch_mse(preds, targets) -> float:
    """Mean over samples and output components of the squared error."""
    preds = np.asarray(preds, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if preds.shape != targets.shape:
        raise ValueError("preds and targets shapes differ")
    return float(np.mean((preds - targets) ** 2))


def gradients(
    weights: NetworkWeights,
    inputs,
    targets,
    output_activation: str = "identity",
) -> NetworkWeights:
    """Analytic gradient of the summed per-sample loss over a batch.

    Returns a structure mirroring NetworkWeights. Hidden-unit derivative is
    sigma' = sigma(1 - sigma); output units are identity (or logistic when that
    mode is on). Matches central finite differences to <= 1e-5 relative.
    """
    X = np.asarray(inputs, dtype=float)
    T = np.asarray(targets, dtype=float)
    if X.ndim != 2 or T.shape != (X.shape[0], weights.w.shape[1]):
        raise ValueError("batch shapes are inconsistent with the weights")
    if X.shape[0] == 0:
        raise ValueError("batch must be nonempty")
    out, H = _forward_batch(weights, X, output_activation)
    err = out - T
    if output_activation == "logistic":
        err = err * out * (1.0 - out)
    gw = H.T @ err
    gbeta = err.sum(axis=0)
    delta = (err @ weights.w.T) * H * (1.0 - H)
    gv = X.T @ delta
    gb = delta.sum(axis=0)
    return NetworkWeights(v=gv, b=gb, w=gw, beta=gbeta)


def train(
    config: NetworkConfig, train_inputs, train_targets
) -> tuple[NetworkWeights, tuple[Standardizer, Standardizer], TrainingHistory]:
    """Fit the network on raw (input, target) arrays of shape (N, 3).

    Standardizers are fitted on the training set (targets too unless
    standardize_targets is off). Each epoch sweeps the samples once in dataset
    order, applying the per-sample gradient update with step eta; full-batch
    steps at these learning rates either diverge (summed) or crawl (averaged),
    so the incremental sweep is what actually minimizes the loss within a
    sane epoch budget. After each epoch the standardized-unit batch MSE is
    recorded; training stops at n_t epochs or when MSE <= n_p.

    Raises DegenerateFeature for a zero-variance feature and DivergedLoss if
    the MSE goes non-finite (learning rate too large).
    """
    X = np.asarray(train_inputs, dtype=float)
    T = np.asarray(train_targets, dtype=float)
    if X.ndim != 2 or T.ndim != 2 or X.shape[0] != T.shape[0]:
        raise ValueError("train_inputs and train_targets must be (N, 3) arrays")
    if X.shape[1] != config.n or T.shape[1] != config.k_out:
        raise ValueError(
            f"expected {config.n} input and {config.k_out} target columns, "
            f"got {X.shape[1]} and {T.shape[1]}"
        )
    if X.shape[0] < config.m:
        raise ValueError(
            f"need at least m = {config.m} training samples, got {X.shape[0]}"
        )
    in_std = Standardizer.fit(X)
    if config.standardize_targets:
        t_std = Standardizer.fit(T)
    else:
        t_std = Standardizer.identity(config.k_out)
    Xs = in_std.transform(X)
    Ts = t_std.transform(T)

    w0 = init_weights(config)
    v = np.array(w0.v)
    b = np.array(w0.b)
    w = np.array(w0.w)
    beta = np.array(w0.beta)
    logistic_out = config.output_activation == "logistic"
    eta = config.eta
    n_samples = X.shape[0]

    history: list[float] = []
    stop_reason = "max_iterations"
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for _ in range(config.n_t):
            for i in range(n_samples):
                x = Xs[i]
                h = sigmoid(x @ v + b)
                out = h @ w + beta
                if logistic_out:
                    out = sigmoid(out)
                    err = (out - Ts[i]) * out * (1.0 - out)
                else:
                    err = out - Ts[i]
                gw = np.outer(h, err)
                delta = (w @ err) * h * (1.0 - h)
                v -= eta * np.outer(x, delta)
                b -= eta * delta
                w -= eta * gw
                beta -= eta * err
            H = sigmoid(Xs @ v + b)
            out = H @ w + beta
            if logistic_out:
                out = sigmoid(out)
            mse = float(np.mean((out - Ts) ** 2))
            if not math.isfinite(mse):
                raise DivergedLoss(
                    f"MSE became non-finite after epoch {len(history) + 1}; "
                    f"eta = {eta} is too large"
                )
            history.append(mse)
            if mse <= config.n_p:
                stop_reason = "threshold"
                break

    macs = n_samples * len(history) * (config.n * config.m + config.m * config.k_out)
    weights = NetworkWeights(v=v, b=b, w=w, beta=beta)
    return weights, (in_std, t_std), TrainingHistory(tuple(history), stop_reason, macs)


def predict_pressures(
    weights: NetworkWeights,
    standardizers: tuple[Standardizer, Standardizer],
    tip,
    output_activation: str = "identity",
):
    """Map one tip position (mm) to chamber pressures (kPa) through the network."""
    in_std, t_std = standardizers
    if isinstance(tip, TipPosition):
        tip = tip.as_tuple()
    x = in_std.transform(np.asarray(tip, dtype=float))
    out, _ = forward_pass(weights, x, output_activation)
    return t_std.inverse_transform(out)


def mape(preds, targets, min_abs_target: float = MAPE_MIN_ABS_TARGET) -> MapeResult:
    """Mean absolute percentage error over eligible target components.

    Components with |target| < min_abs_target are excluded (percentage error is
    undefined at zero). Raises NoEligibleComponents when nothing qualifies.
    """
    F = np.asarray(preds, dtype=float)
    T = np.asarray(targets, dtype=float)
    if F.shape != T.shape:
        raise ValueError("preds and targets shapes differ")
    mask = np.abs(T) >= min_abs_target
    n_eligible = int(mask.sum())
    if n_eligible == 0:
        raise NoEligibleComponents(
            f"no target component with |T| >= {min_abs_target} kPa"
        )
    pct = float(np.mean(np.abs(F[mask] - T[mask]) / np.abs(T[mask]))) * 100.0
    return MapeResult(percent=pct, eligible=n_eligible)


def r_squared(preds, targets) -> float:
    """Coefficient of determination pooled over all output components.

    1 - SS_res/SS_tot with per-component target means. Raises ConstantTargets
    when the targets carry no variance.
    """
    F = np.asarray(preds, dtype=float)
    T = np.asarray(targets, dtype=float)
    if F.shape != T.shape:
        raise ValueError("preds and targets shapes differ")
    ss_tot = float(np.sum((T - T.mean(axis=0)) ** 2))
    if ss_tot == 0.0:
        raise ConstantTargets("targets have zero variance; R^2 undefined")
    ss_res = float(np.sum((F - T) ** 2))
    return 1.0 - ss_res / ss_tot


def mac_count(config: NetworkConfig, b: int) -> int:
    """Multiply-accumulate total for b samples over the configured epoch budget.

    Exact integer arithmetic: b * n_t * (n*m + m*k_out).
    """
    return int(b) * int(config.n_t) * (
        config.n * config.m + config.m * config.k_out
    )


@dataclass(frozen=True)
class SweepRow:
    m: int
    seed: int
    final_mse: float
    test_r2: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    selected_m: int


def _cell_seed(seed: int, m: int) -> int:
    # Isolated stream per sweep cell, derived from (seed, m) so results do not
    # depend on execution order.
    return int(np.random.SeedSequence([seed, m]).generate_state(1, np.uint64)[0])


def hidden_sweep(
    base_config: NetworkConfig,
    seeds: Sequence[int],
    train_inputs,
    train_targets,
    test_inputs,
    test_targets,
) -> SweepResult:
    """Trial-and-error search over the candidate hidden widths.

    Trains one network per (m, seed) cell, rows in deterministic (m, seed)
    order. Selects the m with the highest mean test R^2 over seeds, ties going
    to the smaller m. Per-cell failures are recorded in the row's error field
    rather than aborting the sweep.
    """
    if len(seeds) == 0:
        raise ValueError("seeds must be nonempty")
    test_in = np.asarray(test_inputs, dtype=float)
    test_t = np.asarray(test_targets, dtype=float)
    rows = []
    for m in candidate_hidden_sizes(base_config.n, base_config.k_out):
        for seed in seeds:
            cfg = replace(base_config, m=m, seed=_cell_seed(seed, m))
            try:
                weights, (in_std, t_std), history = train(
                    cfg, train_inputs, train_targets
                )
                out, _ = _forward_batch(
                    weights, in_std.transform(test_in), cfg.output_activation
                )
                preds = t_std.inverse_transform(out)
                rows.append(
                    SweepRow(
                        m=m,
                        seed=int(seed),
                        final_mse=history.mse[-1],
                        test_r2=r_squared(preds, test_t),
                    )
                )
            except Exception as exc:  # noqa: BLE001 - cell failures are data
                rows.append(
                    SweepRow(
                        m=m,
                        seed=int(seed),
                        final_mse=float("nan"),
                        test_r2=float("nan"),
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    selected_m = None
    best = -math.inf
    for m in candidate_hidden_sizes(base_config.n, base_config.k_out):
        scores = [r.test_r2 for r in rows if r.m == m and r.error is None]
        if not scores:
            continue
        mean_r2 = sum(scores) / len(scores)
        if mean_r2 > best:
            best = mean_r2
            selected_m = m
    if selected_m is None:
        raise DivergedLoss("every sweep cell failed to train")
    return SweepResult(rows=tuple(rows), selected_m=selected_m)


class PressureNet(RegressorMixin, BaseEstimator):
    """sklearn-style estimator facade over the functional training operations.

    fit(X, y) expects tip positions (N, 3) in mm and chamber pressures (N, 3)
    in kPa; predict returns pressures in kPa. Hyperparameter names mirror
    NetworkConfig.
    """

    def __init__(
        self,
        hidden_size: int = 13,
        eta: float = 0.01,
        n_t: int = 500,
        n_p: float = 0.01,
        seed: int = 0,
        init_half_width: float = 0.5,
        output_activation: str = "identity",
        standardize_targets: bool = True,
    ):
        self.hidden_size = hidden_size
        self.eta = eta
        self.n_t = n_t
        self.n_p = n_p
        self.seed = seed
        self.init_half_width = init_half_width
        self.output_activation = output_activation
        self.standardize_targets = standardize_targets

    def _make_config(self) -> NetworkConfig:
        return NetworkConfig(
            m=self.hidden_size,
            eta=self.eta,
            n_t=self.n_t,
            n_p=self.n_p,
            seed=self.seed,
            init_half_width=self.init_half_width,
            output_activation=self.output_activation,
            standardize_targets=self.standardize_targets,
        )

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = check_array(y, dtype=float)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 input columns, got {X.shape[1]}")
        if y.shape != (X.shape[0], 3):
            raise ValueError(f"expected target shape {(X.shape[0], 3)}, got {y.shape}")
        config = self._make_config()
        weights, (in_std, t_std), history = train(config, X, y)
        self.config_ = config
        self.weights_ = weights
        self.input_scaler_ = in_std
        self.target_scaler_ = t_std
        self.history_ = history
        self._history_summary = {
            "epochs": len(history.mse),
            "final_mse": history.mse[-1],
            "stop_reason": history.stop_reason,
            "macs": history.macs,
        }
        self.n_features_in_ = 3
        return self

    def predict(self, X):
        check_is_fitted(self, "weights_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 input columns, got {X.shape[1]}")
        out, _ = _forward_batch(
            self.weights_,
            self.input_scaler_.transform(X),
            self.config_.output_activation,
        )
        return self.target_scaler_.inverse_transform(out)

    def save(self, path) -> None:
        """Write the fitted model as JSON (lossless float round trip)."""
        check_is_fitted(self, "weights_")
        obj = {
            "format_version": MODEL_FORMAT_VERSION,
            "config": {
                "n": self.config_.n,
                "m": self.config_.m,
                "k_out": self.config_.k_out,
                "eta": self.config_.eta,
                "n_t": self.config_.n_t,
                "n_p": self.config_.n_p,
                "seed": self.config_.seed,
                "init_half_width": self.config_.init_half_width,
                "output_activation": self.config_.output_activation,
                "standardize_targets": self.config_.standardize_targets,
            },
            "standardizers": {
                "input": self.input_scaler_.to_dict(),
                "target": self.target_scaler_.to_dict(),
            },
            "weights": {
                "v": self.weights_.v.tolist(),
                "b": self.weights_.b.tolist(),
                "w": self.weights_.w.tolist(),
                "beta": self.weights_.beta.tolist(),
            },
            "history": self._history_summary,
        }
        with open(path, "w") as fh:
            json.dump(obj, fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "PressureNet":
        with open(path) as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict) or obj.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(
                f"unsupported model file format: {obj.get('format_version')!r}"
                if isinstance(obj, dict)
                else "model file is not a JSON object"
            )
        cfg = obj["config"]
        config = NetworkConfig(
            m=cfg["m"],
            eta=cfg["eta"],
            n_t=cfg["n_t"],
            n_p=cfg["n_p"],
            seed=cfg["seed"],
            init_half_width=cfg["init_half_width"],
            output_activation=cfg["output_activation"],
            standardize_targets=cfg["standardize_targets"],
            n=cfg["n"],
            k_out=cfg["k_out"],
        )
        est = cls(
            hidden_size=config.m,
            eta=config.eta,
            n_t=config.n_t,
            n_p=config.n_p,
            seed=config.seed,
            init_half_width=config.init_half_width,
            output_activation=config.output_activation,
            standardize_targets=config.standardize_targets,
        )
        est.config_ = config
        est.weights_ = NetworkWeights(
            v=np.asarray(obj["weights"]["v"]),
            b=np.asarray(obj["weights"]["b"]),
            w=np.asarray(obj["weights"]["w"]),
            beta=np.asarray(obj["weights"]["beta"]),
        )
        est.input_scaler_ = Standardizer.from_dict(obj["standardizers"]["input"])
        est.target_scaler_ = Standardizer.from_dict(obj["standardizers"]["target"])
        est.history_ = None
        est._history_summary = obj["history"]
        est.n_features_in_ = 3
        return est
