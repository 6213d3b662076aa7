"""scikit-learn adapter around the profile engine.

The transformer is stateless in the sklearn sense: ``fit`` validates the
parameters and input, ``transform`` computes the profile of whatever series
it is given.  This is the common shape for series-to-series feature
extractors and lets the engine sit inside a Pipeline.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .core import RunConfig, validate_series
from .engine import run


class MatrixProfileTransformer(BaseEstimator, TransformerMixin):
    """Transform a univariate series into its matrix profile.

    ``transform`` returns an (n - m + 1, 2) float array whose columns are
    the profile distances and the nearest-neighbor indices (sentinel entries
    are +inf / -1).  The full engine result of the last transform is kept on
    ``result_``, with ``profile_`` and ``index_`` as shortcuts.

    Parameters mirror :class:`tsprofile.RunConfig`.
    """

    def __init__(self, m=32, exclusion=None, precision="double", workers=1,
                 ordering="random", seed=0, budget_diagonals=None,
                 budget_ms=None, batch_width=8):
        self.m = m
        self.exclusion = exclusion
        self.precision = precision
        self.workers = workers
        self.ordering = ordering
        self.seed = seed
        self.budget_diagonals = budget_diagonals
        self.budget_ms = budget_ms
        self.batch_width = batch_width

    def _config(self):
        return RunConfig(
            m=self.m,
            exclusion=self.exclusion,
            precision=self.precision,
            workers=self.workers,
            ordering=self.ordering,
            seed=self.seed,
            budget_diagonals=self.budget_diagonals,
            budget_ms=self.budget_ms,
            batch_width=self.batch_width,
        )

    def _check_series(self, X):
        x = np.asarray(X)
        if x.ndim == 2 and x.shape[1] == 1:
            x = x[:, 0]
        config = self._config()
        x = validate_series(x, dtype=config.dtype)
        config.validate(x.shape[0])
        return x, config

    def fit(self, X, y=None):
        """Validate parameters against the series; no state is learned."""
        x, _ = self._check_series(X)
        self.n_samples_in_ = x.shape[0]
        return self

    def transform(self, X):
        """Compute the matrix profile of ``X``."""
        if not hasattr(self, "n_samples_in_"):
            raise NotFittedError(
                "This MatrixProfileTransformer instance is not fitted yet; "
                "call fit before transform."
            )
        x, config = self._check_series(X)
        result = run(x, config)
        self.result_ = result
        self.profile_ = result.profile.distances
        self.index_ = result.profile.indices
        return np.column_stack(
            (result.profile.distances.astype(np.float64),
             result.profile.indices.astype(np.float64))
        )
