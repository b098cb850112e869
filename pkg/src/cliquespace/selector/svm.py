"""Binary soft-margin SVM with an RBF kernel, trained from scratch.

The trainer is sequential minimal optimization in its simplified form:
sweep the samples, pick the partner index from a seeded generator, solve
the two-variable subproblem analytically, and repeat until a few sweeps
pass with no update.  Per-sample box constraints C_i implement class
weighting.  Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

_EPS = 1e-7
_STALL_SWEEPS = 3
_MAX_SWEEPS = 200


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||x - x'||^2) for every row pair of a and b."""
    sq = (
        (a**2).sum(axis=1)[:, None]
        + (b**2).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class SvmClassifier:
    support_vectors: np.ndarray  # m x d
    dual_coef: np.ndarray  # m entries alpha_i * y_i
    bias: float
    gamma: float
    hyper_c: float  # training C, kept for provenance

    def decision(self, x: np.ndarray):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        k = rbf_kernel(x, self.support_vectors, self.gamma)
        values = k @ self.dual_coef + self.bias
        return float(values[0]) if values.shape[0] == 1 else values


def train_svm(
    X: np.ndarray,
    y: np.ndarray,
    C: float,
    gamma: float,
    sample_weight: np.ndarray | None = None,
    seed: int = 0,
    tol: float = 1e-3,
) -> SvmClassifier:
    """Fit one binary classifier; y entries must be -1 or +1."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if set(np.unique(y)) - {-1.0, 1.0}:
        raise ValueError("labels must be -1/+1")
    if n < 2 or (y > 0).all() or (y < 0).all():
        raise ValueError("need at least one sample of each class")
    box = C * (np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float))

    K = rbf_kernel(X, X, gamma)
    alphas = np.zeros(n)
    b = 0.0
    rng = random.Random(seed)

    def f(i: int) -> float:
        return float((alphas * y) @ K[:, i] + b)

    stalled = 0
    for _ in range(_MAX_SWEEPS):
        changed = 0
        for i in range(n):
            Ei = f(i) - y[i]
            if not (
                (y[i] * Ei < -tol and alphas[i] < box[i])
                or (y[i] * Ei > tol and alphas[i] > 0.0)
            ):
                continue
            j = rng.randrange(n - 1)
            if j >= i:
                j += 1
            Ej = f(j) - y[j]
            ai_old, aj_old = alphas[i], alphas[j]
            if y[i] != y[j]:
                L = max(0.0, aj_old - ai_old)
                H = min(box[j], box[i] + aj_old - ai_old)
            else:
                L = max(0.0, ai_old + aj_old - box[i])
                H = min(box[j], ai_old + aj_old)
            if L >= H:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0.0:
                continue
            aj_new = aj_old - y[j] * (Ei - Ej) / eta
            aj_new = min(max(aj_new, L), H)
            if abs(aj_new - aj_old) < _EPS * (aj_new + aj_old + _EPS):
                continue
            ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new)
            alphas[i], alphas[j] = ai_new, aj_new
            b1 = (
                b - Ei
                - y[i] * (ai_new - ai_old) * K[i, i]
                - y[j] * (aj_new - aj_old) * K[i, j]
            )
            b2 = (
                b - Ej
                - y[i] * (ai_new - ai_old) * K[i, j]
                - y[j] * (aj_new - aj_old) * K[j, j]
            )
            if 0.0 < ai_new < box[i]:
                b = b1
            elif 0.0 < aj_new < box[j]:
                b = b2
            else:
                b = (b1 + b2) / 2.0
            changed += 1
        stalled = stalled + 1 if changed == 0 else 0
        if stalled >= _STALL_SWEEPS:
            break

    keep = alphas > 1e-8
    if not keep.any():
        # margin never activated; keep one vector so decision() stays defined
        keep[0] = True
    return SvmClassifier(
        support_vectors=X[keep].copy(),
        dual_coef=(alphas * y)[keep].copy(),
        bias=float(b),
        gamma=float(gamma),
        hyper_c=float(C),
    )


def balanced_weights(y: np.ndarray) -> np.ndarray:
    """Inverse-frequency sample weights: each class contributes half the mass."""
    y = np.asarray(y)
    n = y.shape[0]
    n_pos = int((y > 0).sum())
    n_neg = n - n_pos
    w = np.empty(n)
    w[y > 0] = n / (2.0 * n_pos)
    w[y < 0] = n / (2.0 * n_neg)
    return w
