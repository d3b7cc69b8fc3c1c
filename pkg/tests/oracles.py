"""Independent brute-force reference implementations for the test suite.

Everything here is written in the most literal form available (pair
counting, explicit subset enumeration, textbook Jacobi rotations) so a
bug in the production code cannot hide in a shared shortcut.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# --- plain counting metrics -------------------------------------------------

def class_counts(y_true, y_pred, cls) -> tuple[int, int, int]:
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p == cls)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t != cls and p == cls)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p != cls)
    return tp, fp, fn


def precision_of(tp: int, fp: int) -> float:
    return tp / (tp + fp) if tp + fp else 0.0


def recall_of(tp: int, fn: int) -> float:
    return tp / (tp + fn) if tp + fn else 0.0


def f1_of(tp: int, fp: int, fn: int) -> float:
    p = precision_of(tp, fp)
    r = recall_of(tp, fn)
    return 2 * p * r / (p + r) if p + r else 0.0


def balanced_accuracy_of(y_true, y_pred) -> float:
    classes = sorted(set(y_true))
    recalls = []
    for cls in classes:
        tp, _, fn = class_counts(y_true, y_pred, cls)
        recalls.append(recall_of(tp, fn))
    return sum(recalls) / len(recalls)


def weighted_f1_of(y_true, y_pred) -> float:
    classes = sorted(set(y_true))
    total = 0.0
    for cls in classes:
        tp, fp, fn = class_counts(y_true, y_pred, cls)
        support = sum(1 for t in y_true if t == cls)
        total += support * f1_of(tp, fp, fn)
    return total / len(y_true)


def confusion_of(y_true, y_pred, classes) -> np.ndarray:
    m = np.zeros((len(classes), len(classes)), dtype=float)
    index = {c: i for i, c in enumerate(classes)}
    for t, p in zip(y_true, y_pred):
        m[index[t], index[p]] += 1
    return m


# --- ranking metrics --------------------------------------------------------

def mann_whitney_auc(y_true, scores) -> float:
    """Tie-adjusted pair-counting AUC: U / (P * N)."""
    pos = [s for s, t in zip(scores, y_true) if t == 1]
    neg = [s for s, t in zip(scores, y_true) if t == 0]
    if not pos or not neg:
        raise ValueError("need both classes")
    u = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                u += 1.0
            elif p == n:
                u += 0.5
    return u / (len(pos) * len(neg))


def average_precision_of(y_true, scores) -> float:
    """Step-sum AP over thresholds placed at each distinct score."""
    y = np.asarray(y_true)
    s = np.asarray(scores, dtype=float)
    n_pos = int(np.sum(y == 1))
    if n_pos == 0:
        raise ValueError("need a positive example")
    ap = 0.0
    prev_recall = 0.0
    for t in sorted(set(s.tolist()), reverse=True):
        predicted = s >= t
        tp = int(np.sum(predicted & (y == 1)))
        fp = int(np.sum(predicted & (y == 0)))
        ap += (tp / n_pos - prev_recall) * (tp / (tp + fp))
        prev_recall = tp / n_pos
    return ap


# --- symmetric eigenproblem -------------------------------------------------

def jacobi_eigh(matrix, *, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi rotations on a symmetric matrix.

    Returns eigenvalues in descending order and the matching eigenvector
    columns. Slow and simple on purpose.
    """
    A = np.array(matrix, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.sqrt(np.sum(A * A)) or 1.0
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.tril(A, -1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                if theta == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = c
                J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    values = np.diag(A).copy()
    order = np.argsort(values)[::-1]
    return values[order], V[:, order]


# --- Shapley values ---------------------------------------------------------

def coalition_value(f, record, background, coalition) -> float:
    composite = np.array(background, dtype=float, copy=True)
    for j in coalition:
        composite[:, j] = record[j]
    return float(np.mean(np.asarray(f(composite), dtype=float)))


def naive_shapley(f, record, background) -> tuple[np.ndarray, float]:
    """Textbook subset enumeration, one coalition pair at a time."""
    record = np.asarray(record, dtype=float)
    d = record.shape[0]
    phi = np.zeros(d)
    for i in range(d):
        rest = [j for j in range(d) if j != i]
        for size in range(d):
            weight = (
                math.factorial(size) * math.factorial(d - size - 1)
            ) / math.factorial(d)
            for subset in itertools.combinations(rest, size):
                with_i = coalition_value(f, record, background, subset + (i,))
                without = coalition_value(f, record, background, subset)
                phi[i] += weight * (with_i - without)
    return phi, coalition_value(f, record, background, ())
