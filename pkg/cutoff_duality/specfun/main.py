"""
Special functions needed by the cut-off rate formulas: the modified Bessel
function I0, log(xi) - Ei(-xi), the upper incomplete gamma function and the
complete elliptic integral of the first kind.

The fast paths delegate to scipy.special. Each function also has a
definition-integral evaluation, used when ``SpecFunConfig.quad_fallback`` is
set and by the test-suite as an independent oracle.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import special

from cutoff_duality.quadrature.main import (
    DEFAULT_QUAD_SPEC,
    ExponentialEnvelope,
    QuadSpec,
    integrate_halfline,
    integrate_interval,
)
from cutoff_duality.types.error_types import DomainError, ParameterError

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SpecFunConfig:
    """
    Evaluation settings shared by the special functions.

    Attributes:
        rel_tol (float): Relative tolerance of series and quadrature paths.
        max_terms (int): Cap on the number of series terms.
        quad_fallback (bool): Evaluate through the defining integrals instead
            of the library routines.
    """

    rel_tol: float = 1e-12
    max_terms: int = 500
    quad_fallback: bool = False

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ParameterError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ParameterError("max_terms must be at least 1")

    @property
    def quad_spec(self) -> QuadSpec:
        return QuadSpec(abs_tol=1e-13, rel_tol=max(self.rel_tol, 1e-11))


DEFAULT_SPECFUN_CONFIG = SpecFunConfig()


def _unwrap(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def bessel_i0(xi: float, config: SpecFunConfig = DEFAULT_SPECFUN_CONFIG) -> float:
    """
    Modified Bessel function of the first kind and order zero.

    Args:
        xi (float): Argument.
        config (SpecFunConfig): Evaluation settings.

    Returns:
        float: I0(xi); overflows to inf beyond xi ~ 713, use log_bessel_i0 there.

    Raises:
        DomainError: If xi is not finite.
    """
    if not math.isfinite(xi):
        raise DomainError(f"bessel_i0 needs a finite argument, got {xi!r}")
    if config.quad_fallback:
        return bessel_i0_integral(xi, config.quad_spec)
    return float(special.i0(xi))


def log_bessel_i0(xi: ArrayLike) -> ArrayLike:
    """
    log I0(xi) for xi >= 0, computed as log(i0e(xi)) + xi so that it stays
    finite far beyond the overflow point of I0. Accepts arrays.

    Raises:
        DomainError: If any argument is negative or not finite.
    """
    values = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values < 0):
        raise DomainError("log_bessel_i0 needs finite non-negative arguments")
    return _unwrap(np.log(special.i0e(values)) + values)


def bessel_excess(xi: ArrayLike) -> ArrayLike:
    """
    xi - 2 log I0(xi / 2), non-negative and increasing on [0, inf).
    """
    values = np.asarray(xi, dtype=float)
    return _unwrap(values - 2 * np.asarray(log_bessel_i0(values / 2)))


def log_minus_ei(xi: float, config: SpecFunConfig = DEFAULT_SPECFUN_CONFIG) -> float:
    """
    log(xi) - Ei(-xi), extended by continuity to -gamma at xi = 0.

    For xi <= 1 the power series -gamma - sum_k (-xi)^k / (k k!) is summed;
    above that log(xi) + E1(xi) is used.

    Args:
        xi (float): Argument, xi >= 0.
        config (SpecFunConfig): Evaluation settings.

    Returns:
        float: The function value in nats.

    Raises:
        DomainError: If xi is negative or not finite.
    """
    if not math.isfinite(xi) or xi < 0:
        raise DomainError(f"log_minus_ei needs xi >= 0, got {xi!r}")
    if xi == 0:
        return -EULER_GAMMA
    if config.quad_fallback:
        return minus_ei_integral(xi, config.quad_spec)
    if xi > 1:
        return math.log(xi) + float(special.exp1(xi))

    total = 0.0
    term = 1.0
    for k in range(1, config.max_terms + 1):
        term *= -xi / k
        contribution = term / k
        total += contribution
        if abs(contribution) <= config.rel_tol * abs(total):
            break
    return -EULER_GAMMA - total


def inc_gamma(alpha: ArrayLike, xi: ArrayLike) -> ArrayLike:
    """
    Upper incomplete gamma function Gamma(alpha, xi), not regularized.

    Raises:
        DomainError: If alpha <= 0 or xi < 0.
    """
    a, x = _check_gamma_arguments(alpha, xi)
    return _unwrap(special.gammaincc(a, x) * special.gamma(a))


def log_inc_gamma(alpha: ArrayLike, xi: ArrayLike) -> ArrayLike:
    """
    log Gamma(alpha, xi), finite where Gamma(alpha) alone would overflow.
    """
    a, x = _check_gamma_arguments(alpha, xi)
    with np.errstate(divide="ignore"):
        return _unwrap(np.log(special.gammaincc(a, x)) + special.gammaln(a))


def _check_gamma_arguments(alpha: ArrayLike, xi: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(alpha, dtype=float)
    x = np.asarray(xi, dtype=float)
    if np.any(~(a > 0)):
        raise DomainError("incomplete gamma needs alpha > 0")
    if np.any(~(x >= 0)):
        raise DomainError("incomplete gamma needs xi >= 0")
    return a, x


def elliptic_k(k: float, config: SpecFunConfig = DEFAULT_SPECFUN_CONFIG) -> float:
    """
    Complete elliptic integral of the first kind in modulus form,
    K(k) = integral over [0, pi/2] of (1 - k^2 sin^2 t)^(-1/2).

    The complementary parameter (1 - k)(1 + k) is formed first so that K stays
    accurate as k approaches 1.

    Raises:
        DomainError: Unless 0 <= k < 1.
    """
    if not (0 <= k < 1):
        raise DomainError(f"elliptic_k needs 0 <= k < 1, got {k!r}")
    if config.quad_fallback:
        return elliptic_k_integral(k, config.quad_spec)
    return float(special.ellipkm1((1 - k) * (1 + k)))


def elliptic_k_complement(m1: float) -> float:
    """
    K(sqrt(1 - m1)), for callers that know the complementary parameter
    m1 = k'^2 exactly (e.g. m1 = eps^4).
    """
    if not (0 < m1 <= 1):
        raise DomainError(f"complementary parameter must lie in (0, 1], got {m1!r}")
    return float(special.ellipkm1(m1))


def carlson_bounds(k: float) -> Tuple[float, float]:
    """
    Bracket of K(k) by log(4 / k'): K(k) = log(4 / k') / (1 - theta) for some
    0 < theta < k'^2 / 4.

    Returns:
        Tuple[float, float]: Lower and upper bound on K(k).
    """
    if not (0 < k < 1):
        raise DomainError(f"carlson_bounds needs 0 < k < 1, got {k!r}")
    complement_sq = (1 - k) * (1 + k)
    base = math.log(4 / math.sqrt(complement_sq))
    return base, base / (1 - complement_sq / 4)


def bessel_i0_integral(xi: float, spec: QuadSpec = DEFAULT_QUAD_SPEC) -> float:
    """
    I0(xi) = (1/pi) * integral over [0, pi] of exp(xi cos t).
    """
    result = integrate_interval(lambda t: math.exp(xi * math.cos(t)), 0.0, math.pi, spec)
    return result.value / math.pi


def minus_ei_integral(xi: float, spec: QuadSpec = DEFAULT_QUAD_SPEC) -> float:
    """
    log(xi) + integral over [xi, inf) of exp(-t) / t.
    """
    if xi <= 0:
        raise DomainError("the integral form of log(xi) - Ei(-xi) needs xi > 0")
    tail = integrate_halfline(
        lambda t: math.exp(-t) / t,
        spec=spec,
        envelope=ExponentialEnvelope(amplitude=1 / xi, rate=1.0),
        lower=xi,
    )
    return math.log(xi) + tail.value


def inc_gamma_integral(
    alpha: float, xi: float, spec: QuadSpec = DEFAULT_QUAD_SPEC
) -> float:
    """
    Gamma(alpha, xi) as the integral of t^(alpha-1) exp(-t) over [xi, inf).
    """
    _check_gamma_arguments(alpha, xi)

    def integrand(t: float) -> float:
        return t ** (alpha - 1) * math.exp(-t)

    if alpha <= 1:
        envelope = ExponentialEnvelope(amplitude=1.0, rate=1.0)
    else:
        peak = (2 * (alpha - 1) / math.e) ** (alpha - 1)
        envelope = ExponentialEnvelope(amplitude=max(1.0, peak), rate=0.5)

    total = 0.0
    start = xi
    if xi < 1:
        total += integrate_interval(integrand, xi, 1.0, spec).value
        start = 1.0
    tail = integrate_halfline(integrand, spec=spec, envelope=envelope, lower=start)
    return total + tail.value


def elliptic_k_integral(k: float, spec: QuadSpec = DEFAULT_QUAD_SPEC) -> float:
    """
    K(k) by direct quadrature of its defining integral.
    """
    result = integrate_interval(
        lambda t: 1 / math.sqrt(1 - (k * math.sin(t)) ** 2), 0.0, math.pi / 2, spec
    )
    return result.value
