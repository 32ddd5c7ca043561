"""Seeded samplers and the regularized lower incomplete gamma function.

Every random draw in the package goes through an :class:`RngStream`, a
(seed, stream_id) pair keying numpy's counter-based Philox generator.  Two
equal streams always produce the same sequence, whatever process or thread
consumes them, which is what makes parallel sweeps reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError

_U64 = (1 << 64) - 1

# stream_id layout: purpose tag in the top byte, then theta index, then replicate.
PURPOSE_DATA = 0
PURPOSE_SOLVER_LOC = 1
PURPOSE_EVAL_LOC = 2
PURPOSE_CV_THETA = 3
PURPOSE_CV_DATA = 4


def stream_id(theta_index: int, replicate: int = 0, purpose: int = PURPOSE_DATA) -> int:
    """Pack (purpose, theta index, replicate) into a 64-bit stream id.

    With the default purpose this is ``theta_index * 2**32 + replicate``.
    """
    if not (0 <= replicate < 1 << 32 and 0 <= theta_index < 1 << 24 and 0 <= purpose < 256):
        raise ParameterDomainError("stream coordinates out of range")
    return (purpose << 56) | (theta_index << 32) | replicate


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _U64 and 0 <= self.stream_id <= _U64):
            raise ParameterDomainError("seed and stream_id must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=self.seed | (self.stream_id << 64)))

    def child(self, theta_index: int, replicate: int = 0, purpose: int = PURPOSE_DATA) -> RngStream:
        return RngStream(self.seed, stream_id(theta_index, replicate, purpose))


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def _open_unit(gen: np.random.Generator, size):
    # (0, 1]: keeps log() finite
    return 1.0 - gen.random(size)


def exponential_from_uniform(mean: float, u):
    """Inverse-CDF map of a uniform variate in (0, 1] to an exponential draw."""
    return -mean * np.log(u)


def sample_exponential(mean: float, rng, size=None):
    if not mean > 0:
        raise ParameterDomainError(f"exponential mean must be positive, got {mean}")
    return exponential_from_uniform(mean, _open_unit(_gen(rng), size))


def _marsaglia_tsang(shape: float, gen: np.random.Generator, n: int) -> np.ndarray:
    """Standard Gamma(shape >= 1) draws by squeeze/rejection."""
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        k = n - filled
        x = gen.standard_normal(k)
        u = _open_unit(gen, k)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        logv = np.log(np.where(ok, v, 1.0))
        accept = ok & ((u < 1.0 - 0.0331 * x**4) | (np.log(u) < 0.5 * x * x + d * (1.0 - v + logv)))
        got = d * v[accept]
        out[filled:filled + got.size] = got
        filled += got.size
    return out


def sample_gamma(shape: float, scale: float, rng, size=None):
    """Gamma(shape, scale) draws; mean is shape * scale.

    ``shape == 1`` reuses the exponential sampler, so both consume the stream
    identically and produce the same numbers.
    """
    if not (shape > 0 and scale > 0):
        raise ParameterDomainError(f"gamma parameters must be positive, got shape={shape}, scale={scale}")
    gen = _gen(rng)
    if shape == 1.0:
        return sample_exponential(scale, gen, size)
    n = 1 if size is None else int(np.prod(size))
    if shape >= 1.0:
        z = _marsaglia_tsang(shape, gen, n)
    else:
        z = _marsaglia_tsang(shape + 1.0, gen, n) * _open_unit(gen, n) ** (1.0 / shape)
    z = scale * z
    return float(z[0]) if size is None else z.reshape(size)


def sample_normal(mu: float, sigma: float, rng, size=None):
    if not sigma > 0:
        raise ParameterDomainError(f"normal sigma must be positive, got {sigma}")
    return mu + sigma * _gen(rng).standard_normal(size)


def sample_uniform(a: float, b: float, rng, size=None):
    if not a < b:
        raise ParameterDomainError(f"uniform requires a < b, got [{a}, {b}]")
    return a + (b - a) * _gen(rng).random(size)


_EPS = 1e-14
_MAX_ITER = 500
_TINY = 1e-300


def _series(a: float, x: float) -> float:
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _continued_fraction(a: float, x: float) -> float:
    """Upper regularized Q(a, x) by modified Lentz."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}")


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a)."""
    if not a > 0:
        raise ParameterDomainError(f"reg_lower_gamma requires a > 0, got {a}")
    if x < 0:
        raise ParameterDomainError(f"reg_lower_gamma requires x >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _series(a, x))
    return max(0.0, 1.0 - _continued_fraction(a, x))


_reg_lower_gamma_ufunc = np.frompyfunc(reg_lower_gamma, 2, 1)


def reg_lower_gamma_array(a, x) -> np.ndarray:
    """Elementwise :func:`reg_lower_gamma` over broadcast arrays."""
    return np.asarray(_reg_lower_gamma_ufunc(a, np.asarray(x, dtype=float)), dtype=float)
