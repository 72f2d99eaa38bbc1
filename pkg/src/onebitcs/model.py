"""Domain types and seeded generation of signals, sensing matrices and 1-bit measurements.

The observation model is ``y = sign(A x + w)`` with a dense Gaussian sensing
matrix ``A`` and white Gaussian noise ``w`` of standard deviation ``sigma``.
Everything here is deterministic given an explicit 64-bit seed: signal, matrix
and noise draw from independent sub-streams derived from that seed, so each
piece is reproducible on its own.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = [
    "SparseSignal",
    "SensingEnsemble",
    "BinaryMeasurements",
    "SignalModelConfig",
    "sign_vector",
    "piecewise_signal_values",
    "generate_piecewise_signal",
    "generate_sensing_matrix",
    "measure",
    "save_ensemble",
    "load_ensemble",
]

# Sub-stream indices of the per-seed splittable generator.
_SIGNAL_STREAM = 0
_MATRIX_STREAM = 1
_NOISE_STREAM = 2

UNIT_NORM_TOL = 1e-12

# Amplitude levels of the four consecutive group regimes of the synthetic
# piece-wise smooth signal, in group order.
_GROUP_LEVELS = (10.0, 15.0, -10.0, -15.0)

# Offset of the first group: groups start right after the first 50 samples.
_BLOCK_OFFSET = 50


def _stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Generator for one of the three named sub-streams of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(3)[stream])


def sign_vector(v) -> np.ndarray:
    """Element-wise sign with the fixed convention sign(0) = +1.

    Returns a float64 vector with entries in {-1.0, +1.0}.
    """
    return np.where(np.asarray(v, dtype=np.float64) >= 0.0, 1.0, -1.0)


@dataclass
class SparseSignal:
    """A real signal of length n, optionally flagged as unit ell-2 norm."""

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ConfigError("signal must be a non-empty 1-D vector")
        if self.normalized and abs(self.norm - 1.0) > UNIT_NORM_TOL:
            raise ConfigError(
                f"signal flagged normalized but ||x||_2 = {self.norm!r}"
            )

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def unit_normalized(self) -> "SparseSignal":
        """Copy of this signal projected onto the unit sphere."""
        nrm = self.norm
        if nrm == 0.0:
            raise ConfigError("cannot normalize the zero signal")
        return SparseSignal(self.values / nrm, normalized=True)


@dataclass
class SensingEnsemble:
    """Dense m x n sensing matrix together with the seed that generated it."""

    matrix: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ConfigError("sensing matrix must be 2-D")

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


@dataclass
class BinaryMeasurements:
    """1-bit measurements y in {-1,+1}^m, with an optional ground-truth flip mask.

    ``true_flips`` is -1 exactly where noise changed the sign of the noiseless
    measurement, so ``y = sign(Ax) * true_flips`` element-wise.
    """

    y: np.ndarray
    true_flips: np.ndarray | None = None
    sigma: float = 0.0

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.y.ndim != 1:
            raise ConfigError("measurements must be a 1-D vector")
        if not np.all(np.abs(self.y) == 1.0):
            raise ConfigError("every measurement must be exactly -1 or +1")
        if self.true_flips is not None:
            self.true_flips = np.asarray(self.true_flips, dtype=np.float64)
            if self.true_flips.shape != self.y.shape:
                raise ConfigError("true_flips length must match y")
            if not np.all(np.abs(self.true_flips) == 1.0):
                raise ConfigError("true_flips entries must be exactly -1 or +1")
        if self.sigma < 0.0:
            raise ConfigError("sigma must be nonnegative")

    @property
    def m(self) -> int:
        return self.y.size

    @property
    def flip_count(self) -> int:
        """Number of measurements whose sign was changed by noise."""
        if self.true_flips is None:
            return 0
        return int(np.sum(self.true_flips < 0))


@dataclass(frozen=True)
class SignalModelConfig:
    """Parameters of the synthetic sparse piece-wise smooth signal.

    The K nonzeros split into d groups of K/d consecutive samples; group i
    (1-based) occupies indices 50 + (i-1) n/d + 1 .. 50 + (i-1) n/d + K/d in
    1-based terms. The four consecutive quarters of the groups sit at levels
    10, 15, -10, -15, each perturbed by 0.1 times a standard normal draw.
    """

    n: int
    K: int
    d: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.K < 1 or self.d < 1:
            raise ConfigError("n, K and d must be positive")
        if self.d % 4 != 0:
            raise ConfigError("d must be divisible by 4 (four level regimes)")
        if self.K % self.d != 0:
            raise ConfigError("K must be divisible by d (equal group lengths)")
        if self.n % self.d != 0:
            raise ConfigError("n must be divisible by d (integer block spacing)")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative 64-bit integer")
        spacing = self.n // self.d
        group_len = self.K // self.d
        if group_len > spacing:
            raise ConfigError("groups overlap: K/d exceeds the block spacing n/d")
        last_end = _BLOCK_OFFSET + (self.d - 1) * spacing + group_len
        if last_end > self.n:
            raise ConfigError("last group does not fit inside the signal")

    @property
    def group_length(self) -> int:
        return self.K // self.d

    def group_slices(self) -> list[slice]:
        """0-based slices of the d nonzero groups, in increasing order."""
        spacing = self.n // self.d
        return [
            slice(_BLOCK_OFFSET + i * spacing,
                  _BLOCK_OFFSET + i * spacing + self.group_length)
            for i in range(self.d)
        ]


def piecewise_signal_values(cfg: SignalModelConfig) -> np.ndarray:
    """Pre-normalization amplitude signal (levels +-10/+-15 plus 0.1 N(0,1)).

    The Gaussian perturbations are drawn as one stream of K values assigned to
    the nonzero positions in increasing index order, from the signal sub-stream
    of ``cfg.seed``.
    """
    rng = _stream_rng(cfg.seed, _SIGNAL_STREAM)
    perturbation = 0.1 * rng.standard_normal(cfg.K)
    values = np.zeros(cfg.n)
    quarter = cfg.d // 4
    for i, block in enumerate(cfg.group_slices()):
        level = _GROUP_LEVELS[i // quarter]
        lo = i * cfg.group_length
        values[block] = level + perturbation[lo:lo + cfg.group_length]
    return values


def generate_piecewise_signal(cfg: SignalModelConfig) -> SparseSignal:
    """Unit-norm sparse piece-wise smooth signal drawn from ``cfg``."""
    raw = piecewise_signal_values(cfg)
    return SparseSignal(raw / np.linalg.norm(raw), normalized=True)


def generate_sensing_matrix(m: int, n: int, seed: int) -> SensingEnsemble:
    """m x n matrix of i.i.d. standard normal entries, deterministic per seed."""
    if m < 1 or n < 1:
        raise ConfigError("matrix dimensions must be positive")
    rng = _stream_rng(seed, _MATRIX_STREAM)
    return SensingEnsemble(matrix=rng.standard_normal((m, n)), seed=seed)


def measure(A: SensingEnsemble, x: SparseSignal, sigma: float, seed: int = 0) -> BinaryMeasurements:
    """1-bit measurements y = sign(Ax + w) with w ~ N(0, sigma^2 I).

    sigma = 0 bypasses the noise path entirely, so the result is independent
    of ``seed``. The returned ``true_flips`` mask marks measurements whose
    sign differs from the noiseless sign(Ax).
    """
    if A.n != x.n:
        raise ValueError(f"dimension mismatch: matrix is {A.m}x{A.n}, signal has n={x.n}")
    if sigma < 0.0:
        raise ConfigError("sigma must be nonnegative")
    clean = A.matrix @ x.values
    if sigma == 0.0:
        noisy = clean
    else:
        noisy = clean + sigma * _stream_rng(seed, _NOISE_STREAM).standard_normal(A.m)
    y = sign_vector(noisy)
    true_flips = np.where(y == sign_vector(clean), 1.0, -1.0)
    return BinaryMeasurements(y=y, true_flips=true_flips, sigma=float(sigma))


# On-disk cache format for sensing ensembles: 24-byte header (magic "OBR1",
# little-endian u32 version, u64 m, u64 n) followed by the matrix as
# little-endian float64, row-major.
_CACHE_MAGIC = b"OBR1"
_CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def save_ensemble(A: SensingEnsemble, path) -> None:
    """Write the ensemble's matrix to ``path`` in the OBR1 cache format."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, A.m, A.n))
        fh.write(np.ascontiguousarray(A.matrix, dtype="<f8").tobytes())


def load_ensemble(path, seed: int = 0) -> SensingEnsemble:
    """Read a matrix written by :func:`save_ensemble`.

    ``seed`` is attached to the returned ensemble for provenance; the file
    itself does not record it.
    """
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, m, n = _HEADER.unpack(header)
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != _CACHE_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != m * n:
        raise ValueError(f"{path}: expected {m * n} values, found {data.size}")
    return SensingEnsemble(matrix=data.reshape(m, n).astype(np.float64), seed=seed)
