"""RBF-kernel support vector machine trained by sequential minimal
optimization (Platt's algorithm with the second-choice heuristic)."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..errors import ConfigurationError

# Minimum relative alpha movement for a step to count as progress.
_STEP_EPS = 1e-10


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (
        (A * A).sum(axis=1)[:, None]
        + (B * B).sum(axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


class SvmBinary:
    """Soft-margin SVM with labels mapped to {-1, +1} internally.

    gamma defaults to 1 / (n_features * var(X)) computed on the training
    matrix. Scores for ranking are a fixed sigmoid of the decision value,
    which preserves the decision ordering without a separate calibration
    fit.
    """

    def __init__(
        self,
        *,
        C: float = 1000.0,
        tol: float = 1e-3,
        gamma: float | None = None,
        max_passes: int = 10000,
    ):
        if C <= 0:
            raise ConfigurationError("C must be positive")
        if tol <= 0:
            raise ConfigurationError("tol must be positive")
        self.C = C
        self.tol = tol
        self.gamma = gamma
        self.max_passes = max_passes
        self.gamma_: float | None = None
        self.sv_X_: np.ndarray | None = None
        self.sv_alpha_y_: np.ndarray | None = None
        self.b_: float = 0.0

    def _take_step(self, i1: int, i2: int, K, y, alpha, errors) -> bool:
        if i1 == i2:
            return False
        a1, a2 = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1, e2 = errors[i1], errors[i2]
        s = y1 * y2
        if s > 0:
            low, high = max(0.0, a1 + a2 - self.C), min(self.C, a1 + a2)
        else:
            low, high = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        if low >= high:
            return False

        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, low), high)
        else:
            # Flat or concave along the constraint line: compare endpoints.
            f1 = y1 * e1 - a1 * k11 - s * a2 * k12
            f2 = y2 * e2 - s * a1 * k12 - a2 * k22
            l1 = a1 + s * (a2 - low)
            h1 = a1 + s * (a2 - high)
            obj_low = (
                l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11
                + 0.5 * low * low * k22 + s * low * l1 * k12
            )
            obj_high = (
                h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11
                + 0.5 * high * high * k22 + s * high * h1 * k12
            )
            if obj_low < obj_high - _STEP_EPS:
                a2_new = low
            elif obj_low > obj_high + _STEP_EPS:
                a2_new = high
            else:
                a2_new = a2
        if abs(a2_new - a2) < _STEP_EPS * (a2_new + a2 + _STEP_EPS):
            return False

        a1_new = a1 + s * (a2 - a2_new)
        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        b1 = self.b_ - e1 - d1 * k11 - d2 * k12
        b2 = self.b_ - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1_new < self.C:
            b_new = b1
        elif 0.0 < a2_new < self.C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        alpha[i1], alpha[i2] = a1_new, a2_new
        errors += d1 * K[:, i1] + d2 * K[:, i2] + (b_new - self.b_)
        self.b_ = b_new
        return True

    def _examine(self, i2: int, K, y, alpha, errors) -> bool:
        r2 = errors[i2] * y[i2]
        a2 = alpha[i2]
        if not ((r2 < -self.tol and a2 < self.C) or (r2 > self.tol and a2 > 0)):
            return False
        non_bound = np.flatnonzero((alpha > 0) & (alpha < self.C))
        if len(non_bound) > 1:
            i1 = int(non_bound[np.argmax(np.abs(errors[i2] - errors[non_bound]))])
            if self._take_step(i1, i2, K, y, alpha, errors):
                return True
        for i1 in non_bound:
            if self._take_step(int(i1), i2, K, y, alpha, errors):
                return True
        for i1 in range(len(y)):
            if self._take_step(i1, i2, K, y, alpha, errors):
                return True
        return False

    def fit(self, X, y01) -> "SvmBinary":
        X = np.asarray(X, dtype=np.float64)
        y = np.where(np.asarray(y01) > 0.5, 1.0, -1.0)
        n, d = X.shape
        if self.gamma is not None:
            self.gamma_ = float(self.gamma)
        else:
            var = float(X.var())
            self.gamma_ = 1.0 / (d * var) if var > 0 else 1.0

        K = rbf_kernel(X, X, self.gamma_)
        alpha = np.zeros(n)
        self.b_ = 0.0
        # With all alphas at zero the decision value is b, so the error
        # cache starts at -y and is updated incrementally on every step.
        errors = -y.astype(np.float64)

        examine_all = True
        passes = 0
        while passes < self.max_passes:
            passes += 1
            changed = 0
            if examine_all:
                candidates = range(n)
            else:
                candidates = np.flatnonzero((alpha > 0) & (alpha < self.C))
            for i2 in candidates:
                changed += self._examine(int(i2), K, y, alpha, errors)
            if examine_all:
                if changed == 0:
                    break
                examine_all = False
            elif changed == 0:
                examine_all = True

        keep = alpha > 0
        self.sv_X_ = X[keep]
        self.sv_alpha_y_ = alpha[keep] * y[keep]
        return self

    def decision(self, X) -> np.ndarray:
        if self.sv_X_ is None:
            raise ConfigurationError("svm is not fitted")
        X = np.asarray(X, dtype=np.float64)
        if len(self.sv_X_) == 0:
            return np.full(len(X), self.b_)
        K = rbf_kernel(X, self.sv_X_, self.gamma_)
        return K @ self.sv_alpha_y_ + self.b_

    def predict_score(self, X) -> np.ndarray:
        return expit(self.decision(X))

    def to_jsonable(self) -> dict:
        return {
            "C": self.C,
            "tol": self.tol,
            "gamma": self.gamma,
            "max_passes": self.max_passes,
            "gamma_fitted": self.gamma_,
            "b": self.b_,
            "sv_x": self.sv_X_.tolist(),
            "sv_alpha_y": self.sv_alpha_y_.tolist(),
        }

    @classmethod
    def from_jsonable(cls, payload: dict) -> "SvmBinary":
        model = cls(
            C=payload["C"],
            tol=payload["tol"],
            gamma=payload["gamma"],
            max_passes=payload["max_passes"],
        )
        model.gamma_ = payload["gamma_fitted"]
        model.b_ = payload["b"]
        model.sv_X_ = np.asarray(payload["sv_x"], dtype=np.float64)
        model.sv_alpha_y_ = np.asarray(payload["sv_alpha_y"], dtype=np.float64)
        return model
