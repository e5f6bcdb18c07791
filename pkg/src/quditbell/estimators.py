"""scikit-learn style wrappers around the functional core.

``BellOptimizer`` fits measurement settings to a single state;
``EntanglementDetector`` maps a stack of density matrices to a feature
matrix of detector values.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .optimizer import NelderMeadConfig, maximize_cglmp, maximize_chsh
from .separability import detect
from .validation import check_density_matrix, check_dims


class BellOptimizer(BaseEstimator):
    """Maximize a Bell score over local measurement settings.

    Parameters
    ----------
    kind : {"cglmp", "chsh"}
        Which inequality to maximize. ``chsh`` needs a two-qubit state.
    restarts, max_iters, seed : int
        Passed to :class:`NelderMeadConfig`.
    reflection, expansion, contraction, shrink : float
        Nelder-Mead coefficients.
    n_jobs : int or None
        Restarts run in parallel when > 1.

    Attributes
    ----------
    best_value_ : float
    settings_ : MeasurementSettings or tuple of four unit vectors
    result_ : OptimizationResult
    """

    def __init__(self, kind="cglmp", restarts=10, max_iters=20000, seed=0,
                 reflection=1.6, expansion=1.6, contraction=0.8, shrink=0.8,
                 n_jobs=None):
        self.kind = kind
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed
        self.reflection = reflection
        self.expansion = expansion
        self.contraction = contraction
        self.shrink = shrink
        self.n_jobs = n_jobs

    def _config(self):
        return NelderMeadConfig(
            reflection=self.reflection, expansion=self.expansion,
            contraction=self.contraction, shrink=self.shrink,
            restarts=self.restarts, max_iters=self.max_iters, seed=self.seed)

    def fit(self, rho, y=None, dims=None):
        rho, dims = check_density_matrix(np.asarray(rho), dims)
        if dims[0] != dims[1]:
            raise ValueError("Bell optimization needs equal local dimensions")
        cfg = self._config()
        if self.kind == "cglmp":
            res = maximize_cglmp(rho, dims[0], cfg, n_jobs=self.n_jobs)
            self.settings_ = res.settings
        elif self.kind == "chsh":
            if dims != (2, 2):
                raise ValueError("CHSH needs a two-qubit state")
            from .optimizer import CHSHObjective
            res = maximize_chsh(rho, cfg, n_jobs=self.n_jobs)
            self.settings_ = tuple(CHSHObjective.vectors(res.best_point))
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        self.result_ = res
        self.best_value_ = res.best_value
        self.dims_ = dims
        return self

    def score(self, rho=None, y=None):
        check_is_fitted(self, "best_value_")
        return self.best_value_


FEATURES = ("ppt_min_eig", "reduction_min_eig_A", "reduction_min_eig_B", "realignment_norm")


class EntanglementDetector(TransformerMixin, BaseEstimator):
    """Detector values for a batch of bipartite states.

    ``transform`` returns an array of shape (n_states, 4) with columns
    ``FEATURES``; ``predict`` returns 1 where any criterion flags
    entanglement.
    """

    def __init__(self, dims=None, tol=1e-10):
        self.dims = dims
        self.tol = tol

    def _stack(self, X):
        X = np.asarray(X)
        if X.ndim == 2:
            X = X[None]
        if X.ndim != 3 or X.shape[1] != X.shape[2]:
            raise ValueError(f"expected a stack of square matrices, got shape {X.shape}")
        return X

    def fit(self, X, y=None):
        X = self._stack(X)
        self.dims_ = check_dims(self.dims, X.shape[1])
        self.n_features_in_ = X.shape[1] * X.shape[2]
        return self

    def transform(self, X):
        check_is_fitted(self, "dims_")
        X = self._stack(X)
        if X.shape[1] != self.dims_[0] * self.dims_[1]:
            raise ValueError("state size differs from the fitted dimensions")
        out = np.empty((X.shape[0], len(FEATURES)))
        for i, rho in enumerate(X):
            r = detect(rho, self.dims_, self.tol)
            out[i] = [getattr(r, f) for f in FEATURES]
        return out

    def predict(self, X):
        F = self.transform(X)
        flagged = (F[:, 0] < -self.tol) | (np.minimum(F[:, 1], F[:, 2]) < -self.tol) | (F[:, 3] > 1 + self.tol)
        return flagged.astype(int)

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURES, dtype=object)
