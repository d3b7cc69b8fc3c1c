"""Principal component analysis of the standardized feature matrix.

Standardization uses the sample (n-1) convention. Components come from an
eigendecomposition of the 12x12 correlation matrix, ordered by decreasing
eigenvalue, with a deterministic sign: the largest-magnitude entry of each
loading vector is made positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataError, DegenerateFeatureError, ShapeError
from .loudness import FEATURE_NAMES


@dataclass(frozen=True)
class PcaModel:
    """Fitted components plus the standardization that produced them."""

    means: np.ndarray
    sds: np.ndarray
    loadings: np.ndarray  # (n_features, k), orthonormal columns
    explained_variance: np.ndarray  # (k,), non-increasing
    explained_variance_fraction: np.ndarray  # (k,)

    def __post_init__(self) -> None:
        for name in ("means", "sds", "loadings", "explained_variance",
                     "explained_variance_fraction"):
            getattr(self, name).setflags(write=False)

    @property
    def n_components(self) -> int:
        return self.loadings.shape[1]


def _column_name(X: np.ndarray, index: int) -> str:
    if X.shape[1] == len(FEATURE_NAMES):
        return FEATURE_NAMES[index]
    return f"column {index}"


def standardize(X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Center each column and scale it to unit sample (n-1) variance.

    Returns (Z, means, sds). A constant column cannot be standardized and
    raises ``DegenerateFeatureError`` naming the column.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got ndim={X.ndim}")
    if X.shape[0] < 2:
        raise DataError("standardization needs at least 2 rows")
    means = X.mean(axis=0)
    sds = X.std(axis=0, ddof=1)
    for i, sd in enumerate(sds):
        if sd == 0.0:
            raise DegenerateFeatureError(
                f"{_column_name(X, i)} has zero variance and cannot be standardized"
            )
    return (X - means) / sds, means, sds


def fit_pca(
    Z,
    k: int,
    means: np.ndarray | None = None,
    sds: np.ndarray | None = None,
) -> PcaModel:
    """Eigendecompose the sample correlation matrix of standardized data.

    ``means``/``sds`` are bookkeeping from ``standardize`` and default to
    0/1 when the caller standardized elsewhere.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got ndim={Z.ndim}")
    n, d = Z.shape
    if not 1 <= k <= d:
        raise ConfigurationError(f"component count must lie in [1, {d}], got {k}")
    if n < 2:
        raise DataError("fitting needs at least 2 rows")
    corr = (Z.T @ Z) / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(corr)
    order = np.argsort(eigenvalues)[::-1]
    values = eigenvalues[order][:k].copy()
    vectors = eigenvectors[:, order][:, :k].copy()
    for j in range(k):
        pivot = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[pivot, j] < 0:
            vectors[:, j] = -vectors[:, j]
    total = float(eigenvalues.sum())
    fractions = values / total
    return PcaModel(
        means=np.zeros(d) if means is None else np.asarray(means, dtype=np.float64).copy(),
        sds=np.ones(d) if sds is None else np.asarray(sds, dtype=np.float64).copy(),
        loadings=vectors,
        explained_variance=values,
        explained_variance_fraction=fractions,
    )


def transform(model: PcaModel, Z) -> np.ndarray:
    """Project standardized rows onto the fitted components."""
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[1] != model.loadings.shape[0]:
        raise ShapeError(
            f"expected shape (n, {model.loadings.shape[0]}), got {Z.shape}"
        )
    return Z @ model.loadings
