"""Special functions and the distribution tails used by the tests.

Everything here works on plain floats; the ``*_batch`` / array variants take
numpy arrays so the sweep harness can evaluate thousands of replicates of
the same length in one pass.
"""

from __future__ import annotations

import math
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from .errors import DegenerateSample, DomainError

P_FLOOR = 1e-300

_FPMIN = 1e-300
_EPS = 1e-15
_MAXIT = 20000

_STD_NORMAL = NormalDist()


def clamp_p(p):
    """Clamp p-values into [1e-300, 1]."""
    return np.clip(p, P_FLOOR, 1.0) if isinstance(p, np.ndarray) else min(max(p, P_FLOOR), 1.0)


def ln_gamma(x: float) -> float:
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"ln_gamma needs a finite positive argument, got {x!r}")
    return math.lgamma(x)


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile needs p in (0, 1), got {p!r}")
    return _STD_NORMAL.inv_cdf(p)


def normal_sf(z):
    """Upper tail of the standard normal."""
    if isinstance(z, np.ndarray):
        return 0.5 * _erfc_f(z / math.sqrt(2.0))
    return 0.5 * math.erfc(z / math.sqrt(2.0))


_erfc = np.frompyfunc(math.erfc, 1, 1)
_lgamma = np.frompyfunc(math.lgamma, 1, 1)


def _erfc_f(x: np.ndarray) -> np.ndarray:
    return _erfc(x).astype(float)


def _betacf(a, b, x):
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, _MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h = np.where(active, h * d * c, h)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _EPS
        if not active.any():
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def _betainc(a, b, x, y):
    """I_x(a, b) with ``y = 1 - x`` supplied separately to avoid cancellation."""
    a, b, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, x, y)))
    out = np.empty(x.shape)
    lo = x <= 0.0
    hi = y <= 0.0
    out[lo] = 0.0
    out[hi] = 1.0
    mid = ~(lo | hi)
    if mid.any():
        am, bm, xm, ym = a[mid], b[mid], x[mid], y[mid]
        lbeta = (_lgamma(am) + _lgamma(bm) - _lgamma(am + bm)).astype(float)
        front = np.exp(am * np.log(xm) + bm * np.log(ym) - lbeta)
        direct = xm < (am + 1.0) / (am + bm + 2.0)
        res = np.empty(xm.shape)
        if direct.any():
            res[direct] = front[direct] * _betacf(am[direct], bm[direct], xm[direct]) / am[direct]
        swap = ~direct
        if swap.any():
            res[swap] = 1.0 - front[swap] * _betacf(bm[swap], am[swap], ym[swap]) / bm[swap]
        out[mid] = np.clip(res, 0.0, 1.0)
    return out


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    for name, val in (("a", a), ("b", b)):
        if not (math.isfinite(val) and val > 0):
            raise DomainError(f"{name} must be finite and positive, got {val!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    return float(_betainc(a, b, x, 1.0 - x))


def t_two_sided_p(t: float, df: float) -> float:
    """Two-sided p-value of Student's t with ``df`` degrees of freedom."""
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t!r}")
    if not df >= 1:
        raise DomainError(f"df must be >= 1, got {df!r}")
    return float(t_two_sided_p_array(np.asarray([t], dtype=float), df)[0])


def t_two_sided_p_array(t: np.ndarray, df) -> np.ndarray:
    t2 = np.asarray(t, dtype=float) ** 2
    df = np.asarray(df, dtype=float)
    denom = df + t2
    p = _betainc(df / 2.0, 0.5, df / denom, t2 / denom)
    return clamp_p(p)


# -- Shapiro-Wilk (Royston 1995, the AS R94 algorithm) -----------------------

_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)


def _poly(coef, x):
    # ascending powers
    result = 0.0
    for c in reversed(coef):
        result = result * x + c
    return result


@lru_cache(maxsize=None)
def shapiro_weights(n: int) -> np.ndarray:
    """Antisymmetric, unit-norm coefficient vector for ascending order statistics."""
    if not 3 <= n <= 5000:
        raise DomainError(f"Shapiro-Wilk needs 3 <= n <= 5000, got {n}")
    nn2 = n // 2
    half = np.empty(nn2)
    if n == 3:
        half[0] = math.sqrt(0.5)
    else:
        an25 = n + 0.25
        m = np.array([_STD_NORMAL.inv_cdf((i - 0.375) / an25) for i in range(1, nn2 + 1)])
        summ2 = 2.0 * float(np.sum(m * m))
        ssumm2 = math.sqrt(summ2)
        rsn = 1.0 / math.sqrt(n)
        a1 = _poly(_C1, rsn) - m[0] / ssumm2
        if n > 5:
            i1 = 2
            a2 = -m[1] / ssumm2 + _poly(_C2, rsn)
            fac = math.sqrt((summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2) / (1 - 2 * a1 ** 2 - 2 * a2 ** 2))
            half[1] = a2
        else:
            i1 = 1
            fac = math.sqrt((summ2 - 2 * m[0] ** 2) / (1 - 2 * a1 ** 2))
        half[0] = a1
        half[i1:] = -m[i1:] / fac
    full = np.zeros(n)
    full[:nn2] = -half
    full[n - nn2:] = half[::-1]
    full.setflags(write=False)
    return full


def _shapiro_p(w: np.ndarray, w1: np.ndarray, n: int) -> np.ndarray:
    if n == 3:
        p = (6.0 / math.pi) * (np.arcsin(np.sqrt(w)) - math.pi / 3.0)
        return clamp_p(p)
    y = np.log(w1)
    if n <= 11:
        gamma = _poly(_G, n)
        m = _poly(_C3, n)
        s = math.exp(_poly(_C4, n))
        small = y >= gamma
        z = (-np.log(np.where(small, 1.0, gamma - y)) - m) / s
        p = np.where(small, 1e-99, normal_sf(z))
    else:
        xx = math.log(n)
        m = _poly(_C5, xx)
        s = math.exp(_poly(_C6, xx))
        p = normal_sf((y - m) / s)
    return clamp_p(np.asarray(p, dtype=float))


def shapiro_wilk_batch(xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise Shapiro-Wilk W and p; degenerate rows give NaN."""
    xs = np.sort(np.asarray(xs, dtype=float), axis=1)
    n = xs.shape[1]
    a = shapiro_weights(n)
    rng = xs[:, -1] - xs[:, 0]
    scale = np.maximum(np.abs(xs[:, 0]), np.abs(xs[:, -1]))
    degenerate = ~(rng > 1e-13 * scale)
    safe = np.where(degenerate, 1.0, rng)
    z = xs / safe[:, None]
    z = z - z.mean(axis=1, keepdims=True)
    ssx = np.sum(z * z, axis=1)
    ssx = np.where(degenerate, 1.0, ssx)
    sax = z @ a
    root = np.sqrt(ssx)
    w1 = (root - sax) * (root + sax) / ssx
    w1 = np.clip(w1, 0.0, 1.0)
    w = 1.0 - w1
    with np.errstate(divide="ignore", invalid="ignore"):
        p = _shapiro_p(w, np.where(w1 > 0, w1, 1e-300), n)
    w = np.where(degenerate, np.nan, w)
    p = np.where(degenerate, np.nan, p)
    return w, p


def shapiro_wilk(xs) -> tuple[float, float]:
    """Shapiro-Wilk W statistic and p-value for one sample (3 <= n <= 5000)."""
    arr = np.asarray(xs, dtype=float)
    if arr.ndim != 1:
        raise DomainError("shapiro_wilk takes a one-dimensional sample")
    if not 3 <= arr.size <= 5000:
        raise DomainError(f"Shapiro-Wilk needs 3 <= n <= 5000, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sample contains non-finite values")
    w, p = shapiro_wilk_batch(arr[None, :])
    if math.isnan(w[0]):
        raise DegenerateSample("all sample values are identical")
    return float(w[0]), float(p[0])
