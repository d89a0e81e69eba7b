"""
Special functions and the rank-1 SVD

erf/erfc come from a positive-term series near the origin and the Laplace
continued fraction in the tails; the regularized incomplete gamma function
uses the classical series / Lentz continued-fraction split. Everything is
vectorized over numpy arrays and returns a float for scalar input.
"""
import logging
import math
from typing import Union

import numpy as np

from ..errors import DomainError
from ..models.schemas import Rank1SVD

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)
TWO_OVER_SQRT_PI = 2.0 / SQRT_PI

_SERIES_CUTOFF = 3.0  # |x| below: series, above: continued fraction
_CF_DEPTH = 200
_EPS = 1e-17
_MAX_TERMS = 10000
_FPMIN = 1e-300


def _wrap(array: np.ndarray, scalar: bool) -> ArrayLike:
    return float(array.reshape(-1)[0]) if scalar else array


def _erf_series(x: np.ndarray) -> np.ndarray:
    # erf(x) = 2/sqrt(pi) e^{-x^2} sum_k 2^k x^{2k+1} / (2k+1)!!
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for k in range(1, _MAX_TERMS):
        term = term * (2.0 * x2 / (2 * k + 1))
        total += term
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            break
    return TWO_OVER_SQRT_PI * np.exp(-x2) * total


def _erfc_cf(x: np.ndarray) -> np.ndarray:
    # x > 0; erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    t = x.copy()
    for k in range(_CF_DEPTH, 0, -1):
        t = x + (0.5 * k) / t
    with np.errstate(invalid="ignore"):
        out = np.exp(-x * x) / (SQRT_PI * t)
    return np.where(np.isinf(x), 0.0, out)


def erf(x: ArrayLike) -> ArrayLike:
    """Error function, absolute error below 1e-12"""
    arr = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = np.abs(flat) < _SERIES_CUTOFF
    if np.any(small):
        out[small] = _erf_series(flat[small])
    if np.any(~small):
        tail = flat[~small]
        out[~small] = np.sign(tail) * (1.0 - _erfc_cf(np.abs(tail)))
    return _wrap(out.reshape(arr.shape), arr.ndim == 0)


def erfc(x: ArrayLike) -> ArrayLike:
    """Complementary error function, accurate in the upper tail"""
    arr = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = np.abs(flat) < _SERIES_CUTOFF
    upper = flat >= _SERIES_CUTOFF
    lower = flat <= -_SERIES_CUTOFF
    if np.any(small):
        out[small] = 1.0 - _erf_series(flat[small])
    if np.any(upper):
        out[upper] = _erfc_cf(flat[upper])
    if np.any(lower):
        out[lower] = 2.0 - _erfc_cf(-flat[lower])
    return _wrap(out.reshape(arr.shape), arr.ndim == 0)


def norm_cdf(x: ArrayLike) -> ArrayLike:
    """Standard Gaussian CDF Phi(x) = (1 + erf(x/sqrt 2)) / 2"""
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / SQRT2)


def norm_sf(x: ArrayLike) -> ArrayLike:
    """Standard Gaussian upper tail 1 - Phi(x)"""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / SQRT2)


def _initial_inverse(w: float) -> float:
    """Single-precision rational guess for erfinv(y)/y given w = -log((1-y)(1+y))"""
    if w < 5.0:
        w -= 2.5
        p = 2.81022636e-08
        p = 3.43273939e-07 + p * w
        p = -3.5233877e-06 + p * w
        p = -4.39150654e-06 + p * w
        p = 0.00021858087 + p * w
        p = -0.00125372503 + p * w
        p = -0.00417768164 + p * w
        p = 0.246640727 + p * w
        p = 1.50140941 + p * w
    else:
        w = math.sqrt(w) - 3.0
        p = -0.000200214257
        p = 0.000100950558 + p * w
        p = 0.00134934322 + p * w
        p = -0.00367342844 + p * w
        p = 0.00573950773 + p * w
        p = -0.0076224613 + p * w
        p = 0.00943887047 + p * w
        p = 1.00167406 + p * w
        p = 2.83297682 + p * w
    return p


def _positive_inverse(a: float, q: float) -> float:
    """x >= 0 with erf(x) = a, where q = 1 - a is passed exactly"""
    if a == 0.0:
        return 0.0
    x = _initial_inverse(-math.log(q * (2.0 - q))) * a
    for _ in range(100):
        # residual erf(x) - a, taken through erfc in the tail to keep digits
        residual = erf(x) - a if a < 0.5 else q - erfc(x)
        slope = TWO_OVER_SQRT_PI * math.exp(-x * x)
        if slope == 0.0:
            break
        step = residual / slope
        step = step / (1.0 + x * step)  # Halley
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _erfinv_scalar(y: float) -> float:
    if not -1.0 < y < 1.0:
        raise DomainError(f"erfinv is defined on (-1, 1), got {y!r}")
    a = abs(y)
    return math.copysign(_positive_inverse(a, 1.0 - a), y)


def _erfcinv_scalar(q: float) -> float:
    if not 0.0 < q < 2.0:
        raise DomainError(f"erfcinv is defined on (0, 2), got {q!r}")
    if q <= 1.0:
        return _positive_inverse(1.0 - q, q)
    return -_positive_inverse(q - 1.0, 2.0 - q)


def erfinv(y: ArrayLike) -> ArrayLike:
    """Inverse error function on (-1, 1)"""
    arr = np.asarray(y, dtype=np.float64)
    out = np.array([_erfinv_scalar(float(value)) for value in np.atleast_1d(arr).ravel()])
    return _wrap(out.reshape(arr.shape), arr.ndim == 0)


def erfcinv(q: ArrayLike) -> ArrayLike:
    """Inverse complementary error function on (0, 2); keeps digits for tiny q"""
    arr = np.asarray(q, dtype=np.float64)
    out = np.array([_erfcinv_scalar(float(value)) for value in np.atleast_1d(arr).ravel()])
    return _wrap(out.reshape(arr.shape), arr.ndim == 0)


def norm_isf(q: float) -> float:
    """Upper Gaussian quantile: z with 1 - Phi(z) = q"""
    return SQRT2 * _erfcinv_scalar(2.0 * q)


def gammaincc(a: float, x: ArrayLike) -> ArrayLike:
    """Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0"""
    if not a > 0:
        raise DomainError(f"gammaincc needs a > 0, got {a!r}")
    arr = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(arr).ravel()
    if np.any(flat < 0) or np.any(np.isnan(flat)):
        raise DomainError("gammaincc needs x >= 0")
    out = np.empty_like(flat)
    lg = math.lgamma(a)

    zero = flat == 0.0
    infinite = np.isinf(flat)
    out[zero] = 1.0
    out[infinite] = 0.0
    regular = ~(zero | infinite)
    use_series = regular & (flat < a + 1.0)
    use_cf = regular & ~use_series

    if np.any(use_series):
        xs = flat[use_series]
        ap = np.full_like(xs, a)
        delta = np.full_like(xs, 1.0 / a)
        total = delta.copy()
        for _ in range(_MAX_TERMS):
            ap += 1.0
            delta = delta * xs / ap
            total += delta
            if np.all(np.abs(delta) <= np.abs(total) * _EPS):
                break
        lower = total * np.exp(-xs + a * np.log(xs) - lg)
        out[use_series] = np.clip(1.0 - lower, 0.0, 1.0)

    if np.any(use_cf):
        xc = flat[use_cf]
        b = xc + 1.0 - a
        c = np.full_like(xc, 1.0 / _FPMIN)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, _MAX_TERMS):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
            c = b + an / c
            c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if np.all(np.abs(delta - 1.0) <= _EPS * 10):
                break
        out[use_cf] = np.clip(np.exp(-xc + a * np.log(xc) - lg) * h, 0.0, 1.0)

    return _wrap(out.reshape(arr.shape), arr.ndim == 0)


def chi2_sf(x: ArrayLike, dof: int) -> ArrayLike:
    """Survival function P(chi2_dof > x)"""
    if int(dof) != dof or dof < 1:
        raise DomainError(f"chi-square degrees of freedom must be a positive integer, got {dof!r}")
    return gammaincc(0.5 * dof, 0.5 * np.asarray(x, dtype=np.float64))


def rank1_svd(matrix: np.ndarray, tol: float = 1e-10, max_iter: int = 1000,
              seed: int = 0) -> Rank1SVD:
    """
    Top singular triplet by power iteration on the smaller Gram matrix.

    Stops once the Rayleigh quotient changes by at most tol (relative) and the
    eigen-residual is below tol times the quotient, so that
    ||M v - sigma1 u|| <= tol * sigma1. The start vector is all-ones; a
    breakdown (start orthogonal to the range) restarts from a seeded Gaussian.
    Sign convention: the largest-magnitude entry of u_hat is positive.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise DomainError("rank1_svd needs a non-empty two-dimensional matrix")
    if not np.all(np.isfinite(m)):
        raise DomainError("rank1_svd needs a finite matrix")
    rows, cols = m.shape

    if not np.any(m):
        logger.debug("rank1_svd on a zero %dx%d matrix", rows, cols)
        return Rank1SVD(u_hat=np.eye(rows)[0], v_hat=np.eye(cols)[0],
                        sigma1=0.0, iterations=0, degenerate=True)

    transposed = rows > cols
    a = m.T if transposed else m
    gram = a @ a.T
    scale = float(np.trace(gram))
    k = gram.shape[0]

    rng = np.random.default_rng(seed)
    x = np.full(k, 1.0 / math.sqrt(k))
    previous = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = gram @ x
        norm = float(np.linalg.norm(y))
        if norm <= 1e-14 * scale:
            x = rng.standard_normal(k)
            x /= np.linalg.norm(x)
            previous = None
            continue
        rayleigh = float(x @ y)
        residual = float(np.linalg.norm(y - rayleigh * x))
        x = y / norm
        if (previous is not None and abs(rayleigh - previous) <= tol * rayleigh
                and residual <= tol * rayleigh):
            break
        previous = rayleigh
    else:
        logger.debug("rank1_svd hit the iteration cap (%d) on a %dx%d matrix",
                     max_iter, rows, cols)

    w = a.T @ x
    sigma1 = float(np.linalg.norm(w))
    other = w / sigma1
    u_hat, v_hat = (other, x) if transposed else (x, other)

    if u_hat[int(np.argmax(np.abs(u_hat)))] < 0:
        u_hat, v_hat = -u_hat, -v_hat

    return Rank1SVD(u_hat=u_hat, v_hat=v_hat, sigma1=sigma1, iterations=iterations)
