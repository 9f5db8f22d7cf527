"""Separated-mixture simulator for end-to-end clustering checks."""

from __future__ import annotations

import dataclasses

import numpy as np

_MEAN_LEVELS = (0.0, 3.0, 6.0)
_MAX_VARIANCE = 3.0


@dataclasses.dataclass(frozen=True)
class MixtureSpec:
    """A finite mixture of multivariate Gaussian or t (5 df) components.

    Mean entries are restricted to 0, 3, or 6 and variances are bounded by
    3, which keeps differing coordinates well separated.  ``noise_dims``
    appends that many pure standard-normal columns.  Coordinate-wise
    transforms are declared but not implemented.
    """

    weights: tuple[float, ...]
    means: np.ndarray
    covariances: np.ndarray
    kinds: tuple[str, ...]
    noise_dims: int = 0
    transforms: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        means = np.asarray(self.means, dtype=np.float64)
        covs = np.asarray(self.covariances, dtype=np.float64)
        weights = tuple(float(w) for w in self.weights)
        g = len(weights)
        if means.shape[0] != g or covs.shape[0] != g or len(self.kinds) != g:
            raise ValueError("weights, means, covariances, kinds must agree in length")
        if any(w < 0.0 or w > 1.0 for w in weights):
            raise ValueError("weights must lie in [0, 1]")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if not np.isin(means, _MEAN_LEVELS).all():
            raise ValueError("mean entries must be 0, 3, or 6")
        p = means.shape[1]
        if covs.shape != (g, p, p):
            raise ValueError("covariances must be (g, p, p)")
        if np.any(np.diagonal(covs, axis1=1, axis2=2) > _MAX_VARIANCE + 1e-9):
            raise ValueError("component variances must be bounded by 3")
        if any(kind not in ("gaussian", "t") for kind in self.kinds):
            raise ValueError("component kind must be 'gaussian' or 't'")
        if self.noise_dims < 0:
            raise ValueError("noise_dims must be nonnegative")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariances", covs)
        object.__setattr__(self, "kinds", tuple(self.kinds))

    @property
    def g(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> int:
        return self.means.shape[1] + self.noise_dims


def simulate_mixture(spec: MixtureSpec, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n rows from the mixture; returns (matrix, component labels).

    Deterministic given the seed: component assignment is drawn first, then
    each component's rows in component order, then any noise columns.
    """
    if spec.transforms is not None:
        raise NotImplementedError("coordinate-wise transforms are not implemented")
    if n < 1:
        raise ValueError("need at least one row")
    rng = np.random.Generator(np.random.PCG64(seed))
    labels = rng.choice(spec.g, size=n, p=np.asarray(spec.weights))
    p = spec.means.shape[1]
    matrix = np.empty((n, p + spec.noise_dims))
    for comp in range(spec.g):
        where = np.flatnonzero(labels == comp)
        if where.size == 0:
            continue
        chol = np.linalg.cholesky(spec.covariances[comp])
        z = rng.standard_normal((where.size, p)) @ chol.T
        if spec.kinds[comp] == "t":
            w = rng.chisquare(5, where.size) / 5.0
            z = z / np.sqrt(w)[:, None]
        matrix[where, :p] = spec.means[comp] + z
    if spec.noise_dims:
        matrix[:, p:] = rng.standard_normal((n, spec.noise_dims))
    return matrix, labels


def scenario_one() -> MixtureSpec:
    """The fixed ten-component, twenty-dimensional Gaussian benchmark.

    Component k has mean 6 on coordinates 2k and 2k+1 and 0 elsewhere, so
    every coordinate separates exactly one component from the rest and all
    pairs of components differ in four coordinates.  Weights follow the
    1000/500/250x4/125x4 out of 3000 pattern.  Each component's covariance
    is a random correlation matrix (an orthogonally mixed eigenvalue spread
    normalized to unit diagonal) rescaled by per-coordinate variances drawn
    uniformly below the bound of 3, so some coordinates carry tight signal
    and others diffuse signal.
    """
    g, p = 10, 20
    weights = tuple(w / 3000.0 for w in (1000, 500, 250, 250, 250, 250, 125, 125, 125, 125))
    means = np.zeros((g, p))
    for k in range(g):
        means[k, 2 * k] = 6.0
        means[k, 2 * k + 1] = 6.0
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(20240817)))
    covs = np.empty((g, p, p))
    for k in range(g):
        q, _ = np.linalg.qr(rng.standard_normal((p, p)))
        lam = rng.uniform(1.0, 10.0, size=p)
        mixed = (q * lam) @ q.T
        root_diag = np.sqrt(np.diagonal(mixed))
        corr = mixed / np.outer(root_diag, root_diag)
        sd = np.sqrt(rng.uniform(0.0, 3.0, size=p))
        covs[k] = corr * np.outer(sd, sd)
    return MixtureSpec(
        weights=weights,
        means=means,
        covariances=covs,
        kinds=("gaussian",) * g,
    )
