"""Estimator-style wrappers for array-in, array-out workflows.

The core API works on vectors in declared spaces; these adapters accept
plain 2-D arrays (one object per row) so the operations compose with
scikit-learn pipelines and grid search.  They are thin: all substance
lives in the underlying operations.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cotype import cotype_ratio
from .errors import InvalidInputError
from .planks import witness_search
from .spaces import Vector, euclidean
from .summability import ScalarSequence, WeightMatrix, transform_values


class RowAverageTransformer(TransformerMixin, BaseEstimator):
    """Apply a weight matrix to each sample row as a scalar sequence.

    Input rows must be long enough to cover the matrix support; output
    has one column per matrix row.
    """

    def __init__(self, matrix: WeightMatrix | None = None):
        self.matrix = matrix

    def fit(self, X, y=None):
        X = check_array(X)
        if self.matrix is None:
            raise InvalidInputError("a weight matrix is required")
        if self.matrix.max_column > X.shape[1]:
            raise InvalidInputError(
                f"matrix references column {self.matrix.max_column}, "
                f"rows have {X.shape[1]} entries"
            )
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInputError(
                f"expected {self.n_features_in_} columns, got {X.shape[1]}"
            )
        out = np.empty((X.shape[0], self.matrix.n_rows))
        for i in range(X.shape[0]):
            out[i] = transform_values(self.matrix, ScalarSequence(X[i]))
        return out


class WitnessSearchEstimator(BaseEstimator):
    """Fit a separating point for the vectors given as rows of X."""

    def __init__(
        self,
        target_margin: float = 0.5,
        budget: int = 10_000,
        restarts: int = 32,
        seed: int = 0,
    ):
        self.target_margin = target_margin
        self.budget = budget
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X)
        space = euclidean(X.shape[1])
        xs = [Vector(space, row) for row in X]
        report = witness_search(
            xs,
            target_margin=self.target_margin,
            budget=self.budget,
            seed=self.seed,
            restarts=self.restarts,
        )
        self.report_ = report
        self.witness_ = report.witness.coords
        self.margins_ = np.array(report.margins)
        self.min_margin_ = report.min_margin
        self.success_ = report.success
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        """Margin |<h, x>| - target for each row of X."""
        check_is_fitted(self, "witness_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInputError(
                f"expected {self.n_features_in_} columns, got {X.shape[1]}"
            )
        return np.abs(X @ np.conj(self.witness_)) - self.target_margin


class SignPatternMaximizer(BaseEstimator):
    """Best sign-combination ratio for the vectors given as rows of X."""

    def __init__(
        self,
        p: float = 2.0,
        sampling: bool = False,
        n_samples: int = 4096,
        seed: int = 0,
    ):
        self.p = p
        self.sampling = sampling
        self.n_samples = n_samples
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X)
        space = euclidean(X.shape[1])
        xs = [Vector(space, row) for row in X]
        report = cotype_ratio(
            space,
            xs,
            self.p,
            sampling=self.sampling,
            n_samples=self.n_samples,
            seed=self.seed,
        )
        self.report_ = report
        self.ratio_ = report.ratio
        self.pattern_ = np.array(report.pattern)
        self.n_features_in_ = X.shape[1]
        return self
