# ============================================================================
# SPECIAL FUNCTIONS
# ============================================================================
#
# Bessel functions of the first kind J_nu(t) for real nu >= 0, t >= 0, evaluated
# with numpy so every routine accepts scalars or arrays. Write nu = n + a with
# n = floor(nu) and 0 <= a < 1.
#
#   t <= 8                          power series
#   t >= max(25, 2 nu), t > 2 nu    J_a, J_{a+1} from the Hankel expansion (closed forms for
#                                   half-integer nu), then forward recurrence up to order nu
#   otherwise                       backward recurrence from a high order (Miller), normalized
#                                   with sum_k c_k J_{a+2k}(t) = (t/2)^a

import math
from typing import Tuple, Union

import numpy as np
from scipy.special import gammaln

from models.data_models import BesselOrder
from models.exceptions import DomainError

ArrayLike = Union[float, np.ndarray]

SERIES_MAX = 8.0
ASYMPTOTIC_MIN = 25.0
_MAX_SERIES_TERMS = 600
_MAX_ASYMPTOTIC_TERMS = 80
_RESCALE_ABOVE = 1e150


def series_switch_point(order) -> float:
    """Argument where bessel_j leaves the power series"""
    BesselOrder.coerce(order)
    return SERIES_MAX


def recurrence_switch_point(order) -> float:
    """Argument from which bessel_j recurs forward from the asymptotic pair instead of backward"""
    nu = BesselOrder.coerce(order).nu
    return max(ASYMPTOTIC_MIN, 2.0 * nu)


def _as_argument(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("Bessel argument must be finite")
    if np.any(t < 0):
        raise DomainError("Bessel argument must be >= 0")
    return t


def _restore_shape(result: np.ndarray, like: np.ndarray):
    if like.ndim == 0:
        return float(result.reshape(-1)[0])
    return result.reshape(like.shape)


def _reduced_series(nu: float, t: np.ndarray) -> np.ndarray:
    """sum_k (-1)^k (t/2)^{2k} / (k! Gamma(k + nu + 1)), so J_nu(t) = (t/2)^nu * this"""
    x = -0.25 * t * t
    term = np.full(t.shape, math.exp(-gammaln(nu + 1.0)))
    total = term.copy()
    peak = np.sqrt(np.abs(x))
    for k in range(1, _MAX_SERIES_TERMS):
        term = term * x / (k * (k + nu))
        total = total + term
        if k > np.max(peak, initial=0.0) and np.all(np.abs(term) <= 1e-17 * np.abs(total) + 1e-300):
            break
    return total


def _hankel(nu: float, t: np.ndarray) -> np.ndarray:
    """Large-argument expansion; each point stops adding terms once they start growing"""
    mu = 4.0 * nu * nu
    p = np.ones_like(t)
    q = np.zeros_like(t)
    term = np.ones_like(t)
    previous = np.full_like(t, np.inf)
    active = np.ones(t.shape, dtype=bool)
    for k in range(1, _MAX_ASYMPTOTIC_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * t)
        magnitude = np.abs(term)
        active &= magnitude < previous
        if not np.any(active):
            break
        contribution = np.where(active, term, 0.0)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p = p + sign * contribution
        else:
            q = q + sign * contribution
        previous = magnitude
    chi = t - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * t)) * (p * np.cos(chi) - q * np.sin(chi))


def _half_integer_pair(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """J_{1/2} and J_{3/2} in closed form"""
    scale = np.sqrt(2.0 / (math.pi * t))
    sin_t = np.sin(t)
    return scale * sin_t, scale * (sin_t / t - np.cos(t))


def _split_order(nu: float) -> Tuple[int, float]:
    n = int(math.floor(nu))
    return n, nu - n


def _forward(nu: float, half_integer: bool, t: np.ndarray) -> np.ndarray:
    """Upward recurrence J_{m+1} = (2m / t) J_m - J_{m-1}, stable while the order stays below t"""
    n, a = _split_order(nu)
    if half_integer:
        lower, current = _half_integer_pair(t)
    else:
        lower, current = _hankel(a, t), _hankel(a + 1.0, t)
    if n == 0:
        return lower
    for k in range(1, n):
        lower, current = current, 2.0 * (a + k) / t * current - lower
    return current


def _neumann_weight(a: float, k: int) -> float:
    if k == 0:
        return math.exp(gammaln(a + 1.0))
    return (a + 2.0 * k) * math.exp(gammaln(a + k) - gammaln(k + 1.0))


def _start_order(n: int, t_max: float) -> int:
    top = max(float(n), t_max)
    start = int(math.ceil(top + 20.0 + 16.0 * (0.5 * top) ** (1.0 / 3.0)))
    return start + start % 2


def _miller(nu: float, t: np.ndarray) -> np.ndarray:
    """Backward recurrence from an even order well past max(nu, t), rescaled as it grows"""
    n, a = _split_order(nu)
    start = _start_order(n, float(np.max(t)))
    upper = np.zeros_like(t)
    current = np.ones_like(t)
    total = _neumann_weight(a, start // 2) * current
    target = np.zeros_like(t)
    for k in range(start, 0, -1):
        upper, current = current, 2.0 * (a + k) / t * current - upper
        m = k - 1
        if m == n:
            target = current.copy()
        if m % 2 == 0:
            total = total + _neumann_weight(a, m // 2) * current
        big = np.abs(current) > _RESCALE_ABOVE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE_ABOVE, 1.0)
            upper, current, total, target = upper * scale, current * scale, total * scale, target * scale
    return target * np.power(0.5 * t, a) / total


def _method_masks(nu: float, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    series = t <= SERIES_MAX
    forward = ~series & (t >= ASYMPTOTIC_MIN) & (t > 2.0 * nu)
    return series, forward, ~series & ~forward


def _evaluate(order: BesselOrder, flat: np.ndarray, scaled: bool) -> np.ndarray:
    """J_nu on a flat array; divided by t^nu when scaled"""
    nu = order.nu
    result = np.empty_like(flat)
    series, forward, backward = _method_masks(nu, flat)
    if np.any(series):
        ts = flat[series]
        prefactor = 2.0 ** (-nu) if scaled else np.power(0.5 * ts, nu)
        result[series] = prefactor * _reduced_series(nu, ts)
    for mask, values in ((forward, lambda ts: _forward(nu, order.is_half_integer, ts)),
                         (backward, lambda ts: _miller(nu, ts))):
        if np.any(mask):
            ts = flat[mask]
            result[mask] = values(ts) / np.power(ts, nu) if scaled else values(ts)
    return result


def bessel_j(order, t: ArrayLike) -> ArrayLike:
    """
    J_nu(t) for nu >= 0 and t >= 0.

    order: BesselOrder or a plain nonnegative number
    t: scalar or array of nonnegative reals
    """
    order = BesselOrder.coerce(order)
    t_arr = _as_argument(t)
    flat = np.atleast_1d(t_arr).astype(float).reshape(-1)
    return _restore_shape(_evaluate(order, flat, scaled=False), t_arr)


def normalized_kernel(order, t: ArrayLike) -> ArrayLike:
    """J_nu(t) / t^nu, equal to 1 / (2^nu Gamma(nu + 1)) at t = 0"""
    order = BesselOrder.coerce(order)
    t_arr = _as_argument(t)
    flat = np.atleast_1d(t_arr).astype(float).reshape(-1)
    return _restore_shape(_evaluate(order, flat, scaled=True), t_arr)


def sphere_ft(sphere_dim: int, s: ArrayLike) -> ArrayLike:
    """
    Fourier transform of the normalized surface measure on S^n in R^{n+1}, as a function of |s|.

    sigma_n(s) = Gamma(nu + 1) 2^nu J_nu(2 pi s) / (2 pi s)^nu with nu = (n - 1) / 2,
    the constant being the one that makes sigma_n(0) = 1.
    """
    if int(sphere_dim) != sphere_dim or sphere_dim < 1:
        raise DomainError(f"sphere dimension must be a positive integer, got {sphere_dim}")
    s_arr = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s_arr)) or np.any(s_arr < 0):
        raise DomainError("sphere_ft needs finite s >= 0")
    nu = 0.5 * (sphere_dim - 1)
    constant = math.exp(gammaln(nu + 1.0)) * 2.0**nu
    return constant * normalized_kernel(nu, 2.0 * math.pi * s_arr)
