"""Dense linear algebra, Gaussian sampling, spectral summaries, and
deterministic counter-based random streams.

Everything is float64. All functions are pure: inputs are never mutated.
``RngStream`` is the single stateful object in the package and must not be
shared across concurrent tasks; derive one stream per logical task instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular


class NotPositiveDefinite(ValueError):
    """A matrix that should be SPD has a non-positive (or underflowed) pivot."""


# Cholesky pivots at or below this are treated as zero: the matrix is a
# degenerate posterior covariance, not a tiny-but-valid one.
_PIVOT_FLOOR = 1e-300


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class SpdFactor:
    """Lower-triangular Cholesky factor of an SPD matrix.

    ``cholesky`` is the validating constructor; building an SpdFactor
    directly bypasses the positivity check (used only for the degenerate
    zero-covariance sampling path).
    """

    lower: np.ndarray

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T

    def logdet(self) -> float:
        """log-determinant of the factored matrix (not of the factor)."""
        return float(2.0 * np.sum(np.log(np.diag(self.lower))))

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve (L L^T) x = b."""
        y = solve_triangular(self.lower, b, lower=True)
        return solve_triangular(self.lower.T, y, lower=False)

    def inverse(self) -> np.ndarray:
        return symmetrize(self.solve(np.eye(self.dim)))


def cholesky(a: np.ndarray) -> SpdFactor:
    """Factor an SPD matrix as L L^T with L lower triangular.

    Raises NotPositiveDefinite when the input is indefinite or a pivot
    underflows below 1e-300 (a degenerate covariance).
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"cholesky expects a square matrix, got shape {a.shape}")
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(
            f"{a.shape[0]}x{a.shape[0]} matrix is not positive definite"
        ) from exc
    if np.any(np.diag(lower) ** 2 <= _PIVOT_FLOOR):
        raise NotPositiveDefinite("pivot underflow: matrix is numerically semidefinite")
    return SpdFactor(lower)


def cholesky_with_jitter(a: np.ndarray, jitter: float = 1e-8) -> tuple[SpdFactor, np.ndarray]:
    """Cholesky with a single diagonal-jitter retry.

    Returns (factor, matrix actually factored). Hessians and aggregated
    covariances are SPD in exact arithmetic but can come out marginally
    indefinite in floats; one retry with ``jitter * I`` covers that case.
    """
    a = np.asarray(a, dtype=np.float64)
    try:
        return cholesky(a), a
    except NotPositiveDefinite:
        bumped = a + jitter * np.eye(a.shape[0])
        return cholesky(bumped), bumped


@dataclass(frozen=True)
class SpectralSummary:
    """Smallest eigenvalue and extreme singular values of a matrix.

    ``min_eigenvalue`` is NaN unless the input was square and symmetric.
    """

    min_eigenvalue: float
    min_singular: float
    max_singular: float


def spectral_summary(a: np.ndarray) -> SpectralSummary:
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("spectral_summary requires finite entries")
    s = np.linalg.svd(a, compute_uv=False)
    square_symmetric = a.shape[0] == a.shape[1] and np.allclose(
        a, a.T, rtol=1e-10, atol=1e-12
    )
    if square_symmetric:
        min_eig = float(np.linalg.eigvalsh(a)[0])
    else:
        min_eig = float("nan")
    return SpectralSummary(min_eig, float(s[-1]), float(s[0]))


def logsumexp(v: np.ndarray, axis: int | None = None) -> float | np.ndarray:
    """Shift-stabilized log(sum(exp(v))); exact for constant vectors."""
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        raise ValueError("logsumexp of an empty vector")
    m = np.max(v, axis=axis, keepdims=True)
    out = m + np.log(np.sum(np.exp(v - m), axis=axis, keepdims=True))
    if axis is None:
        return float(out)
    return np.squeeze(out, axis=axis)


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    z = logits - np.max(logits, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    z = logits - np.max(logits, axis=axis, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=axis, keepdims=True))


def sigmoid(x):
    # logaddexp keeps both tails stable
    return np.exp(-np.logaddexp(0.0, -np.asarray(x, dtype=np.float64)))


def softplus(x):
    return np.logaddexp(0.0, np.asarray(x, dtype=np.float64))


def softplus_inverse(y):
    """Inverse of softplus on (0, inf)."""
    y = np.asarray(y, dtype=np.float64)
    return np.log(np.expm1(y))


@dataclass
class RngStream:
    """Counter-based deterministic random stream.

    Every drawing call derives a fresh Philox generator from
    (seed, stream_id, counter) and bumps the counter, so the output of a
    call depends on those three integers only, never on scheduling order
    or on draws made by other streams. Two streams with distinct
    (seed, stream_id) are statistically independent.
    """

    seed: int
    stream_id: int = 0
    counter: int = 0

    def __post_init__(self) -> None:
        if self.seed < 0 or self.stream_id < 0 or self.counter < 0:
            raise ValueError("seed, stream_id, and counter must be non-negative")

    def _next_generator(self) -> np.random.Generator:
        key = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id, self.counter)
        )
        self.counter += 1
        return np.random.Generator(np.random.Philox(key))

    def at(self, counter: int) -> "RngStream":
        """Independent snapshot of this stream positioned at ``counter``."""
        return RngStream(self.seed, self.stream_id, counter)

    def substream(self, stream_id: int) -> "RngStream":
        """Fresh stream under the same seed with a different stream id."""
        return RngStream(self.seed, stream_id)

    def normal(self, size=None) -> np.ndarray:
        return self._next_generator().normal(size=size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None) -> np.ndarray:
        return self._next_generator().uniform(low, high, size=size)

    def integers(self, low: int, high: int | None = None, size=None) -> np.ndarray:
        return self._next_generator().integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._next_generator().permutation(n)


def sample_mvn(
    mean: np.ndarray,
    factor: SpdFactor,
    rng: RngStream,
    size: int | None = None,
) -> np.ndarray:
    """Draw from N(mean, L L^T) given the covariance factor L.

    ``size=None`` returns a single vector, ``size=m`` an (m, p) array.
    A zero factor is allowed and returns the mean exactly.
    """
    mean = np.asarray(mean, dtype=np.float64)
    p = mean.shape[0]
    if factor.dim != p:
        raise ValueError(f"mean has dim {p} but factor has dim {factor.dim}")
    if size is None:
        z = rng.normal(size=p)
        return mean + factor.lower @ z
    z = rng.normal(size=(size, p))
    return mean + z @ factor.lower.T
