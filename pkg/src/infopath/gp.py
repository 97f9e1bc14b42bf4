"""Gaussian process beliefs over a fixed, finite set of locations.

The belief is a constant-mean GP conditioned on noisy point measurements,
where every measurement carries its own noise variance so that sensors of
different quality can feed the same posterior. Beliefs are immutable
snapshots: ``add_measurement`` returns a new object and leaves the receiver
untouched, which is what a tree search needs when it branches thousands of
hypothetical futures off a single belief.

Posterior mean and variance over the fixed ``query_set`` are maintained
incrementally. When a new measurement lands on a query point (the common
case: all environment locations are query points), extending the Cholesky
factor of the measurement system reuses the cached whitened cross-covariance,
so an update costs O(m q) instead of the O(m^3 + m^2 q) of a refactorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.spatial.distance import cdist

# Relative jitter added to the measurement-system diagonal; escalated x10 on
# factorization failure up to JITTER_MAX_REL, then the solve errors out.
JITTER_REL = 1e-8
JITTER_MAX_REL = 1e-4

_LOG_2PI = math.log(2.0 * math.pi)


class SingularCovarianceError(RuntimeError):
    """A covariance system stayed non positive definite after jitter escalation."""


@dataclass(frozen=True)
class SquaredExponential:
    """Stationary squared-exponential kernel.

    k(x, x') = signal_variance * exp(-||x - x'||^2 / (2 lengthscale^2)),
    so k(x, x) == signal_variance and the kernel is symmetric by construction.
    Lengthscale is in the same units as the coordinates (grid cells here).
    """

    signal_variance: float = 1.0
    lengthscale: float = 1.5

    kind = "squared-exponential"

    def __post_init__(self):
        if self.signal_variance <= 0:
            raise ValueError("signal_variance must be positive")
        if self.lengthscale <= 0:
            raise ValueError("lengthscale must be positive")

    def matrix(self, a, b) -> np.ndarray:
        """Cross-covariance matrix between two coordinate sets, shapes (n,2),(m,2)."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        b = np.atleast_2d(np.asarray(b, dtype=float))
        d2 = cdist(a, b, "sqeuclidean")
        return self.signal_variance * np.exp(-0.5 * d2 / self.lengthscale**2)


def kernel_eval(x, x_other, spec) -> float:
    """Kernel value for a single pair of coordinates."""
    dx = np.asarray(x, dtype=float) - np.asarray(x_other, dtype=float)
    return float(spec.signal_variance * math.exp(-0.5 * float(dx @ dx) / spec.lengthscale**2))


@dataclass(frozen=True)
class PosteriorSummary:
    """Joint posterior over a target set: mean vector and full covariance."""

    mean: np.ndarray
    covariance: np.ndarray
    dimension: int

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (self.dimension, self.dimension):
            raise ValueError("covariance shape does not match dimension")
        if not np.all(np.abs(cov - cov.T) <= 1e-10):
            raise ValueError("covariance must be symmetric within 1e-10")
        if np.min(np.diagonal(cov)) < -1e-9:
            raise ValueError("covariance diagonal must be >= -1e-9")


def _cholesky_escalating(mat: np.ndarray, scale: float, start_rel: float | None):
    """Cholesky factor with escalating diagonal jitter.

    Tries jitter start_rel*scale (or none, if start_rel is None), escalating
    x10 up to JITTER_MAX_REL*scale before giving up. Returns (L, jitter_used).
    """
    jitters = []
    if start_rel is None:
        jitters.append(0.0)
        rel = JITTER_REL
    else:
        rel = start_rel
    while rel <= JITTER_MAX_REL * (1 + 1e-12):
        jitters.append(rel * scale)
        rel *= 10.0
    for jit in jitters:
        try:
            a = mat if jit == 0.0 else mat + jit * np.eye(mat.shape[0])
            return np.linalg.cholesky(a), jit
        except np.linalg.LinAlgError:
            continue
    raise SingularCovarianceError(
        f"matrix not positive definite after jitter escalation to {JITTER_MAX_REL * scale:g}"
    )


def _cholesky_logdet(cov: np.ndarray) -> float:
    """log|cov| via Cholesky, with jitter escalation only on failure."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(float(np.max(np.abs(np.diagonal(cov)))), 1e-300) if cov.size else 1.0
    chol, _ = _cholesky_escalating(cov, scale, start_rel=None)
    return 2.0 * float(np.sum(np.log(np.diagonal(chol))))


def conditional_entropy(summary: PosteriorSummary) -> float:
    """Differential entropy of the joint Gaussian posterior.

    0.5*log|cov| + (D/2)*(1 + log(2*pi)); raises SingularCovarianceError if
    the covariance is not positive definite after jitter escalation.
    """
    logdet = _cholesky_logdet(summary.covariance)
    return 0.5 * logdet + 0.5 * summary.dimension * (1.0 + _LOG_2PI)


def mutual_information_exact(cov_prev: np.ndarray, cov_new: np.ndarray) -> float:
    """Entropy drop between two posteriors: 0.5*log|cov_prev| - 0.5*log|cov_new|."""
    cov_prev = np.asarray(cov_prev, dtype=float)
    cov_new = np.asarray(cov_new, dtype=float)
    if cov_prev.shape != cov_new.shape:
        raise ValueError("covariance dimensions must match")
    return 0.5 * (_cholesky_logdet(cov_prev) - _cholesky_logdet(cov_new))


def mutual_information_trace(cov_prev: np.ndarray, cov_new: np.ndarray) -> float:
    """Total-variance drop between two posteriors: Tr(cov_prev) - Tr(cov_new).

    Cheap surrogate for the log-determinant form; exact for the purpose of
    ranking variance-reducing actions.
    """
    cov_prev = np.asarray(cov_prev, dtype=float)
    cov_new = np.asarray(cov_new, dtype=float)
    if cov_prev.shape != cov_new.shape:
        raise ValueError("covariance dimensions must match")
    return float(np.trace(cov_prev) - np.trace(cov_new))


class GaussianProcessBelief:
    """Exact GP posterior over a fixed query set, with snapshot updates.

    Parameters
    ----------
    prior_mean : float
        Constant prior mean.
    kernel : SquaredExponential
        Covariance kernel.
    query_set : array-like, shape (q, 2)
        The fixed, non-empty set of locations the belief predicts at. It never
        changes over the belief's lifetime; trace_of_variance and the cached
        query mean/variance refer to it.
    measured_locations, measurements, noise_variances : array-like, optional
        Parallel lists initializing the conditioning set; every noise variance
        must be positive. Duplicate locations are allowed (the per-measurement
        noise keeps the system nonsingular).
    """

    __slots__ = (
        "prior_mean", "kernel", "query_set",
        "_x", "_y", "_nu", "_jitter",
        "_kqq", "_qindex", "_w", "_mean_q", "_var_q", "_trace",
        "_chol", "_alpha",
    )

    def __init__(self, prior_mean, kernel, query_set,
                 measured_locations=None, measurements=None, noise_variances=None):
        self.prior_mean = float(prior_mean)
        self.kernel = kernel
        q = np.array(query_set, dtype=float)
        if q.ndim != 2 or q.shape[1] != 2 or q.shape[0] == 0:
            raise ValueError("query_set must be a non-empty (q, 2) list of coordinates")
        q.setflags(write=False)
        self.query_set = q

        x = np.zeros((0, 2)) if measured_locations is None else \
            np.array(measured_locations, dtype=float).reshape(-1, 2)
        y = np.zeros(0) if measurements is None else np.array(measurements, dtype=float).ravel()
        nu = np.zeros(0) if noise_variances is None else np.array(noise_variances, dtype=float).ravel()
        if not (len(x) == len(y) == len(nu)):
            raise ValueError("measured_locations, measurements and noise_variances must align")
        if np.any(nu <= 0):
            raise ValueError("noise variances must be positive")
        self._x, self._y, self._nu = x, y, nu

        self._kqq = kernel.matrix(q, q)
        self._kqq.setflags(write=False)
        self._qindex = {(float(cx), float(cy)): i for i, (cx, cy) in enumerate(q)}
        self._rebuild(start_rel=JITTER_REL)

    # ------------------------------------------------------------------
    # construction internals

    def _rebuild(self, start_rel: float):
        """Batch-build the factor and the query-set caches from the raw lists."""
        s2 = self.kernel.signal_variance
        m = len(self._y)
        qn = len(self.query_set)
        if m == 0:
            self._jitter = start_rel * s2
            self._chol = np.zeros((0, 0))
            self._alpha = np.zeros(0)
            self._w = np.zeros((0, qn))
        else:
            a = self.kernel.matrix(self._x, self._x)
            a[np.diag_indices_from(a)] += self._nu
            self._chol, self._jitter = _cholesky_escalating(a, s2, start_rel)
            self._alpha = solve_triangular(self._chol, self._y - self.prior_mean,
                                           lower=True, check_finite=False)
            self._w = solve_triangular(self._chol, self.kernel.matrix(self._x, self.query_set),
                                       lower=True, check_finite=False)
        self._mean_q = self.prior_mean + self._w.T @ self._alpha
        self._var_q = s2 - np.einsum("ij,ij->j", self._w, self._w)
        self._trace = float(self._var_q.sum())

    def _ensure_factor(self):
        """Lazily restore the Cholesky factor dropped by fast incremental updates.

        Idempotent cache fill; _alpha lands before _chol so readers gating on
        _chol never observe a half-built pair.
        """
        if self._chol is None:
            a = self.kernel.matrix(self._x, self._x)
            a[np.diag_indices_from(a)] += self._nu + self._jitter
            try:
                chol = np.linalg.cholesky(a)
            except np.linalg.LinAlgError as exc:  # incremental chain already pivoted
                raise SingularCovarianceError("measurement system lost positive definiteness") from exc
            self._alpha = solve_triangular(chol, self._y - self.prior_mean,
                                           lower=True, check_finite=False)
            self._chol = chol

    # ------------------------------------------------------------------
    # read-only views of the conditioning set

    @property
    def measured_locations(self) -> np.ndarray:
        v = self._x.view()
        v.setflags(write=False)
        return v

    @property
    def measurements(self) -> np.ndarray:
        v = self._y.view()
        v.setflags(write=False)
        return v

    @property
    def noise_variances(self) -> np.ndarray:
        v = self._nu.view()
        v.setflags(write=False)
        return v

    @property
    def query_mean(self) -> np.ndarray:
        """Posterior mean at every query point (cached)."""
        v = self._mean_q.view()
        v.setflags(write=False)
        return v

    @property
    def query_variance(self) -> np.ndarray:
        """Posterior variance at every query point (cached)."""
        v = self._var_q.view()
        v.setflags(write=False)
        return v

    def query_index(self, location) -> int | None:
        """Index of ``location`` in the query set, or None if off the set."""
        return self._qindex.get((float(location[0]), float(location[1])))

    def trace_of_variance(self) -> float:
        """Total posterior variance over the query set (trace of the posterior cov)."""
        return self._trace

    # ------------------------------------------------------------------
    # updates

    def add_measurement(self, location, value, noise_variance) -> "GaussianProcessBelief":
        """Return a new belief with one measurement appended; self is unchanged."""
        return self.add_measurements([(location, value, noise_variance)])

    def add_measurements(self, triples) -> "GaussianProcessBelief":
        """Return a new belief with several (location, value, noise_variance) appended.

        Measurements at query points take the O(m q) incremental path; any
        off-query location falls back to a batch rebuild of the factor.
        """
        triples = [(np.asarray(loc, dtype=float).ravel(), float(val), float(nu))
                   for loc, val, nu in triples]
        if not triples:
            return self
        for _, _, nu in triples:
            if nu <= 0:
                raise ValueError("noise variances must be positive")

        k = len(triples)
        m = len(self._y)
        x = np.empty((m + k, 2))
        x[:m] = self._x
        y = np.empty(m + k)
        y[:m] = self._y
        nu_all = np.empty(m + k)
        nu_all[:m] = self._nu
        for i, (loc, val, nu) in enumerate(triples):
            x[m + i] = loc
            y[m + i] = val
            nu_all[m + i] = nu

        idx = [self._qindex.get((float(loc[0]), float(loc[1]))) for loc, _, _ in triples]
        if any(j is None for j in idx):
            return GaussianProcessBelief(self.prior_mean, self.kernel, self.query_set,
                                         x, y, nu_all)

        qn = len(self.query_set)
        w = np.empty((m + k, qn))
        w[:m] = self._w
        mean_q = self._mean_q.copy()
        var_q = self._var_q.copy()
        s2 = self.kernel.signal_variance
        for i, (j, (_, val, nu)) in enumerate(zip(idx, triples)):
            mc = m + i
            d2 = var_q[j] + nu + self._jitter
            if d2 <= 1e-14 * s2:  # pivot collapsed; let the batch path re-escalate jitter
                return GaussianProcessBelief(self.prior_mean, self.kernel, self.query_set,
                                             x, y, nu_all)
            d = math.sqrt(d2)
            row = (self._kqq[j] - w[:mc].T @ w[:mc, j]) / d
            a_new = (val - mean_q[j]) / d
            w[mc] = row
            mean_q += a_new * row
            var_q -= row * row

        new = object.__new__(GaussianProcessBelief)
        new.prior_mean = self.prior_mean
        new.kernel = self.kernel
        new.query_set = self.query_set
        new._kqq = self._kqq
        new._qindex = self._qindex
        new._jitter = self._jitter
        new._x, new._y, new._nu = x, y, nu_all
        new._w = w
        new._mean_q = mean_q
        new._var_q = var_q
        new._trace = float(var_q.sum())
        new._chol = None  # rebuilt on demand by posterior()
        new._alpha = None
        return new

    # ------------------------------------------------------------------
    # posterior queries

    def posterior(self, targets=None) -> PosteriorSummary:
        """Joint posterior (mean and full covariance) at ``targets``.

        Defaults to the query set. With no measurements this is the prior:
        constant mean and the kernel matrix of the targets.
        """
        t = self.query_set if targets is None else np.atleast_2d(np.asarray(targets, dtype=float))
        if t.shape[0] == 0:
            raise ValueError("targets must be non-empty")
        ktt = self._kqq.copy() if targets is None else self.kernel.matrix(t, t)
        if len(self._y) == 0:
            mean = np.full(t.shape[0], self.prior_mean)
            cov = ktt
        else:
            self._ensure_factor()
            v = self._w if targets is None else solve_triangular(
                self._chol, self.kernel.matrix(self._x, t), lower=True, check_finite=False)
            mean = self.prior_mean + v.T @ self._alpha
            cov = ktt - v.T @ v
        cov = 0.5 * (cov + cov.T)
        return PosteriorSummary(mean=mean, covariance=cov, dimension=t.shape[0])
