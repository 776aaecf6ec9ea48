"""
Cut-off rate of the non-coherent Ricean fading channel Y = H x + Z, with
H ~ CN(d, 1) and Z ~ CN(0, sigma2), so that given the input x the output is
circularly-symmetric Gaussian with mean d x and variance |x|^2 + sigma2.

The module brackets R0 at finite SNR (a lower bound from a log-uniform input
law, an upper bound from a Gamma-type output density) and evaluates the
second-order constants of its high-SNR expansion.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from scipy import special

from cutoff_duality.quadrature.main import (
    DEFAULT_QUAD_SPEC,
    QuadSpec,
    integrate_halfline,
    integrate_interval,
    integrate_radial_complex,
    integrate_square_diagonal,
)
from cutoff_duality.specfun.main import (
    bessel_excess,
    log_bessel_i0,
    log_inc_gamma,
    log_minus_ei,
)
from cutoff_duality.types.error_types import (
    DomainError,
    ParameterError,
    PreconditionError,
)
from cutoff_duality.types.main import BoundPoint, ExponentCurve
from cutoff_duality.utils.main import check_ascending
from cutoff_duality.utils.typing.custom_typing import (
    AmplitudeLawKind,
    ConstraintKind,
    ConstraintKindEnum,
    FigureOneRow,
    LowerBoundMethod,
    LowerBoundMethodEnum,
)

logger = logging.getLogger(__name__)

LOG_TWO_PI = math.log(2 * math.pi)

DEFAULT_DELTA_GRID = tuple(
    sorted({10.0 ** (-k / 2) for k in range(2, 21)} | {0.2, 0.05, 0.02}, reverse=True)
)
DEFAULT_M1_GRID = tuple(10.0 ** (k / 2) for k in range(0, 17))


@dataclass(frozen=True)
class RiceanParams:
    """
    Channel and power constraint.

    Attributes:
        power (float): Power E > 0 allowed per channel use.
        d (float): Specular component, d >= 0.
        sigma2 (float): Additive noise variance, > 0.
        constraint_kind (ConstraintKind): ``"peak"`` or ``"average"``.
    """

    power: float
    d: float = 0.0
    sigma2: float = 1.0
    constraint_kind: ConstraintKind = "average"

    def __post_init__(self):
        if not (math.isfinite(self.power) and self.power > 0):
            raise ParameterError(f"power must be positive, got {self.power!r}")
        if not (math.isfinite(self.d) and self.d >= 0):
            raise ParameterError(f"specular component d must be >= 0, got {self.d!r}")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ParameterError(f"sigma2 must be positive, got {self.sigma2!r}")
        kinds = [kind.value for kind in ConstraintKindEnum]
        if self.constraint_kind not in kinds:
            raise ParameterError(
                f"constraint_kind must be one of {kinds}, got {self.constraint_kind!r}"
            )

    @property
    def snr(self) -> float:
        return self.power / self.sigma2

    @classmethod
    def from_snr(cls, snr: float, d: float = 0.0, sigma2: float = 1.0, **kwargs) -> "RiceanParams":
        return cls(power=snr * sigma2, d=d, sigma2=sigma2, **kwargs)


@dataclass(frozen=True)
class OutputDensityParams:
    """
    Parameters of the output density
    f_R(y) = (|y|^2 + delta)^(alpha-1) exp(-(|y|^2 + delta)/beta) / (pi beta^alpha Gamma(alpha, delta/beta))
    and the splitting constant m1 used to bound its Bessel integral from below.
    """

    alpha: float
    beta: float
    delta: float
    m1: float

    def __post_init__(self):
        errors = []
        if not self.alpha > 0:
            errors.append(f"alpha must be positive, got {self.alpha!r}")
        if not self.beta > 0:
            errors.append(f"beta must be positive, got {self.beta!r}")
        if not 0 < self.delta < 1:
            errors.append(f"delta must lie in (0, 1), got {self.delta!r}")
        if not self.m1 > 0:
            errors.append(f"m1 must be positive, got {self.m1!r}")
        if errors:
            raise ParameterError("; ".join(errors))

    @classmethod
    def auto(cls, power: float, delta: float, m1: float) -> "OutputDensityParams":
        """
        beta = E log E and alpha = delta / log beta.

        Raises:
            DomainError: If beta <= 1, i.e. the power is too small.
        """
        beta = power * math.log(power) if power > 1 else 0.0
        if beta <= 1:
            raise DomainError(f"power {power!r} too small: beta = E log E must exceed 1")
        return cls(alpha=delta / math.log(beta), beta=beta, delta=delta, m1=m1)


@dataclass(frozen=True, eq=False)
class AmplitudeLaw:
    """
    Circularly-symmetric input law described by the law of its amplitude |X|.

    Either ``kind="log_uniform"``, where log |X|^2 is uniform on
    [log log P, log P] for the parameter ``power`` P, or ``kind="discrete"``
    with a finite set of radii and weights.
    """

    kind: AmplitudeLawKind
    power: Union[float, None] = None
    radii: Union[np.ndarray, None] = None
    weights: Union[np.ndarray, None] = None

    def __post_init__(self):
        if self.kind == "log_uniform":
            if self.power is None or not (math.isfinite(self.power) and self.power > 1):
                raise DomainError(
                    f"log-uniform law needs power > 1 so that log log E is defined, "
                    f"got {self.power!r}"
                )
            if self.power / math.log(self.power) < math.e:
                raise DomainError("log-uniform law needs E / log E >= e")
        elif self.kind == "discrete":
            radii = np.asarray(self.radii, dtype=float)
            weights = np.asarray(self.weights, dtype=float)
            if radii.ndim != 1 or radii.shape != weights.shape or radii.size == 0:
                raise PreconditionError("radii and weights must be vectors of equal length")
            if np.any(radii < 0) or not np.all(np.isfinite(radii)):
                raise PreconditionError("radii must be finite and non-negative")
            if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
                raise PreconditionError("weights must form a probability vector")
            object.__setattr__(self, "radii", radii)
            object.__setattr__(self, "weights", weights)
        else:
            raise PreconditionError(f"unknown amplitude law kind {self.kind!r}")

    @classmethod
    def log_uniform(cls, power: float) -> "AmplitudeLaw":
        return cls(kind="log_uniform", power=power)

    @classmethod
    def discrete(cls, radii: Sequence[float], weights: Sequence[float]) -> "AmplitudeLaw":
        return cls(kind="discrete", radii=radii, weights=weights)

    @property
    def log_range(self) -> Tuple[float, float]:
        """
        Support of log |X|^2 for the log-uniform law.
        """
        return math.log(math.log(self.power)), math.log(self.power)

    @property
    def min_radius(self) -> float:
        if self.kind == "log_uniform":
            return math.sqrt(math.log(self.power))
        return float(np.min(self.radii[self.weights > 0]))

    @property
    def max_radius(self) -> float:
        if self.kind == "log_uniform":
            return math.sqrt(self.power)
        return float(np.max(self.radii[self.weights > 0]))

    @property
    def second_moment(self) -> float:
        if self.kind == "log_uniform":
            low, high = self.log_range
            return (self.power - math.log(self.power)) / (high - low)
        return float(np.dot(self.weights, self.radii**2))

    def satisfies(self, kind: ConstraintKind, power: float) -> bool:
        """
        Whether the law meets a peak or average power constraint ``power``.
        """
        slack = 1 + 1e-12
        if kind == "peak":
            return self.max_radius**2 <= power * slack
        return self.second_moment <= power * slack


def bhattacharyya_kernel(
    x: float, xp: float, params: RiceanParams, phase: float = 0.0
) -> float:
    """
    Bhattacharyya coefficient between the output laws of inputs x and
    xp * exp(i phase):
    2 sqrt(s s') / (s + s') * exp(-d^2 |x - x'|^2 / (2 (s + s'))), s = |x|^2 + sigma2.

    Args:
        x (float): First amplitude, >= 0.
        xp (float): Second amplitude, >= 0.
        params (RiceanParams): Channel.
        phase (float): Relative phase of the second input.

    Returns:
        float: A value in (0, 1], equal to 1 when the inputs coincide.
    """
    if x < 0 or xp < 0:
        raise DomainError("amplitudes must be non-negative")
    s, sp = x * x + params.sigma2, xp * xp + params.sigma2
    distance2 = x * x + xp * xp - 2 * x * xp * math.cos(phase)
    return 2 * math.sqrt(s * sp) / (s + sp) * math.exp(
        -params.d**2 * distance2 / (2 * (s + sp))
    )


def phase_averaged_kernel(x, xp, d: float, sigma2: float):
    """
    Bhattacharyya coefficient averaged over a uniform relative phase,
    2 sqrt(s s') / S * exp(-d^2 (x - x')^2 / (2 S)) * I0e(d^2 x x' / S)
    with S = x^2 + x'^2 + 2 sigma2. ``sigma2 = 0`` gives the noise-free
    kernel, which needs positive amplitudes. Accepts arrays.
    """
    x, xp = np.asarray(x, dtype=float), np.asarray(xp, dtype=float)
    s, sp = x * x + sigma2, xp * xp + sigma2
    total = s + sp
    if np.any(total <= 0):
        raise DomainError("the noise-free kernel needs positive amplitudes")
    value = (
        2
        * np.sqrt(s * sp)
        / total
        * np.exp(-(d**2) * (x - xp) ** 2 / (2 * total))
        * special.i0e(d**2 * x * xp / total)
    )
    return float(value) if value.ndim == 0 else value


def output_density(y: complex, x: complex, params: RiceanParams) -> float:
    """
    w(y|x): circularly-symmetric Gaussian density of mean d x and variance
    |x|^2 + sigma2.
    """
    s = abs(x) ** 2 + params.sigma2
    return math.exp(-abs(y - params.d * x) ** 2 / s) / (math.pi * s)


def bhattacharyya_integral(
    x: float,
    xp: float,
    params: RiceanParams,
    phase: float = 0.0,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> float:
    """
    Integral over the output plane of sqrt(w(y|x) w(y|x')), by quadrature.
    """
    x_c, xp_c = complex(x), xp * complex(math.cos(phase), math.sin(phase))

    def integrand(radius: float, theta: float) -> float:
        y = radius * complex(math.cos(theta), math.sin(theta))
        return math.sqrt(output_density(y, x_c, params) * output_density(y, xp_c, params))

    circular = params.d == 0
    return integrate_radial_complex(integrand, spec, circular=circular).value


def _log_uniform_kernel(v: float, w: float, d: float, sigma2: float) -> float:
    return phase_averaged_kernel(math.exp(v / 2), math.exp(w / 2), d, sigma2)


def _expected_kernel(law: AmplitudeLaw, d: float, sigma2: float, spec: QuadSpec) -> float:
    if law.kind == "discrete":
        kernel = phase_averaged_kernel(law.radii[:, None], law.radii[None, :], d, sigma2)
        return float(law.weights @ kernel @ law.weights)
    low, high = law.log_range
    result = integrate_square_diagonal(
        lambda v, w: _log_uniform_kernel(v, w, d, sigma2), low, high, spec
    )
    return result.value / (high - low) ** 2


def e0_pairwise(
    law: AmplitudeLaw, params: RiceanParams, spec: QuadSpec = DEFAULT_QUAD_SPEC
) -> float:
    """
    E0(1, Q) = -log E[B(X, X')] for X, X' drawn independently from a
    circularly-symmetric law, B being the phase-averaged Bhattacharyya kernel.

    The log-uniform law is integrated in the coordinates v = log |x|^2, where
    it is uniform; a discrete law is summed.

    Raises:
        PreconditionError: If the law violates the power constraint of ``params``.
    """
    if not law.satisfies(params.constraint_kind, params.power):
        raise PreconditionError(
            f"input law violates the {params.constraint_kind} power constraint "
            f"{params.power:.6g}"
        )
    return -math.log(_expected_kernel(law, params.d, params.sigma2, spec))


def e0_pairwise_noise_free(
    law: AmplitudeLaw, d: float = 0.0, spec: QuadSpec = DEFAULT_QUAD_SPEC
) -> float:
    """
    ``e0_pairwise`` of the channel without additive noise.
    """
    if law.min_radius <= 0:
        raise DomainError("the noise-free channel needs amplitudes bounded away from 0")
    return -math.log(_expected_kernel(law, d, 0.0, spec))


def e0_log_uniform_noise_free(
    power: float, d: float = 0.0, spec: QuadSpec = DEFAULT_QUAD_SPEC
) -> float:
    """
    Noise-free E0(1) of the log-uniform law.

    In v = log |x|^2 the noise-free kernel only depends on u = v - v',
    B = exp(-d^2/2) sech(u/2) I0(d^2 sech(u/2) / 2), so the double integral
    over the square of side L reduces to 2 * integral over [0, L] of (L - u) B(u).
    """
    law = AmplitudeLaw.log_uniform(power)
    low, high = law.log_range
    width = high - low

    def integrand(u: float) -> float:
        sech = 1 / math.cosh(u / 2)
        argument = d**2 * sech / 2
        return (width - u) * sech * math.exp(argument - d**2 / 2) * special.i0e(argument)

    result = integrate_interval(integrand, 0.0, width, spec)
    return -math.log(2 * result.value / width**2)


def log_uniform_square_integral(
    power: float, d: float = 0.0, spec: QuadSpec = DEFAULT_QUAD_SPEC
) -> float:
    """
    Integral over [sqrt(log E), sqrt(E)]^2 of I0(d^2 r r' / (r^2 + r'^2)) / (r^2 + r'^2),
    computed as a 2-D quadrature in log-squared coordinates.
    """
    low, high = AmplitudeLaw.log_uniform(power).log_range

    def integrand(v: float, w: float) -> float:
        sech = 1 / math.cosh((v - w) / 2)
        argument = d**2 * sech / 2
        return sech / 8 * math.exp(argument) * special.i0e(argument)

    return integrate_square_diagonal(integrand, low, high, spec).value


def log_uniform_square_bound(power: float, d: float = 0.0) -> float:
    """
    (pi/2) I0^2(d^2/4) log sqrt(E / log E), an upper bound on
    ``log_uniform_square_integral`` obtained by widening the integration region.
    """
    low, high = AmplitudeLaw.log_uniform(power).log_range
    return math.pi / 4 * math.exp(2 * log_bessel_i0(d**2 / 4)) * (high - low)


def noise_gap_bound(x_min: float, params: RiceanParams) -> float:
    """
    Largest loss in E0(1) caused by the additive noise for inputs of amplitude
    at least x_min: log(1 + sigma2 / x_min^2) + d^2 sigma2 / (x_min^2 + sigma2).

    Raises:
        DomainError: If x_min <= 0.
    """
    if not x_min > 0:
        raise DomainError(f"x_min must be positive, got {x_min!r}")
    x2 = x_min * x_min
    return math.log1p(params.sigma2 / x2) + params.d**2 * params.sigma2 / (x2 + params.sigma2)


def asymptotic_constant_no_si(d: float) -> float:
    """
    Second-order term of R0 at high SNR without side information,
    d^2/2 - log(2 pi) - 2 log I0(d^2/4).
    """
    if not (math.isfinite(d) and d >= 0):
        raise DomainError(f"d must be >= 0, got {d!r}")
    return bessel_excess(d * d / 2) - LOG_TWO_PI


def capacity_constant(d: float, eps2: float = 1.0) -> float:
    """
    Second-order term of the capacity at high SNR,
    log(d^2) - Ei(-d^2) - 1 + log(1/eps2), with -gamma for the first two terms
    at d = 0.
    """
    if not (math.isfinite(d) and d >= 0):
        raise DomainError(f"d must be >= 0, got {d!r}")
    if not 0 < eps2 <= 1:
        raise DomainError(f"eps2 must lie in (0, 1], got {eps2!r}")
    return log_minus_ei(d * d) - 1 - math.log(eps2)


def lower_bound_closed_form(params: RiceanParams) -> float:
    """
    Closed-form lower bound on R0 from the log-uniform law:
    log log(E/log E) + d^2/2 - log 2 pi - 2 log I0(d^2/4) - noise_gap_bound(sqrt(log E)).
    """
    law = AmplitudeLaw.log_uniform(params.power)
    low, high = law.log_range
    return (
        math.log(high - low)
        + asymptotic_constant_no_si(params.d)
        - noise_gap_bound(law.min_radius, params)
    )


def lower_bound_r0(
    params: RiceanParams,
    method: LowerBoundMethod = "best",
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> float:
    """
    Lower bound on R0 at power E from the log-uniform input law, which meets
    both the peak and the average constraint.

    Args:
        params (RiceanParams): Channel and power.
        method (LowerBoundMethod): ``"closed_form"`` evaluates the analytic
            chain, ``"numerical"`` integrates E0(1) of the law with the noise
            in place, ``"best"`` returns the larger of the two.
        spec (QuadSpec): Tolerances of the numerical path.

    Returns:
        float: The bound in nats.

    Raises:
        DomainError: If E is too small for the log-uniform law.
    """
    methods = [item.value for item in LowerBoundMethodEnum]
    if method not in methods:
        raise PreconditionError(f"method must be one of {methods}, got {method!r}")
    if method == "closed_form":
        return lower_bound_closed_form(params)
    law = AmplitudeLaw.log_uniform(params.power)
    numerical = e0_pairwise(law, params, spec)
    if method == "numerical":
        return numerical
    closed = lower_bound_closed_form(params)
    logger.debug("lower bounds at E=%.6g: closed %.9f numerical %.9f", params.power, closed, numerical)
    return max(closed, numerical)


def _log_dominance_factor(alpha, beta, delta, m1, d: float, sigma2: float) -> np.ndarray:
    """
    log a(alpha, beta, delta, m1) on arrays; nan where a <= 0.
    """
    alpha, beta, delta, m1 = np.broadcast_arrays(*map(np.asarray, (alpha, beta, delta, m1)))
    root = np.sqrt(m1 * delta)
    sigma = math.sqrt(sigma2)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ratio = root * special.i0(d * root / (2 * sigma)) / np.sqrt(
            math.pi * beta * sigma2 / (2 * (beta + sigma2))
        )
        inner = 1 - ratio
        value = (
            alpha / 2 * np.log(delta)
            + 0.5 * np.log(m1 / (m1 + 1))
            + np.where(inner > 0, np.log(np.where(inner > 0, inner, 1.0)), np.nan)
        )
    return value


def dominance_factor(odp: OutputDensityParams, params: RiceanParams) -> float:
    """
    a(alpha, beta, delta, m1) = delta^(alpha/2) sqrt(m1/(m1+1))
    (1 - sqrt(m1 delta) I0(d sqrt(m1 delta) / (2 sigma)) / sqrt(pi beta sigma2 / (2 (beta + sigma2)))),
    the factor by which l(x; alpha, beta, delta) dominates l(x; 0, beta, 0).

    Raises:
        ParameterError: If a <= 0, which makes the bound vacuous.
    """
    log_a = float(
        _log_dominance_factor(odp.alpha, odp.beta, odp.delta, odp.m1, params.d, params.sigma2)
    )
    if math.isnan(log_a):
        raise ParameterError(
            f"delta={odp.delta:.6g}, m1={odp.m1:.6g} violate "
            f"sqrt(m1 delta) I0(d sqrt(m1 delta)/(2 sigma)) < sqrt(pi beta sigma2/(2(beta+sigma2)))"
        )
    return math.exp(log_a)


def ell_closed_form(x: float, beta: float, params: RiceanParams) -> float:
    """
    l(x; alpha=0, beta, delta=0)
    = sqrt(pi/2) sqrt(beta s / (beta + s)) exp(z) I0(z), z = beta d^2 x^2 / (4 s (beta + s)).
    """
    s = x * x + params.sigma2
    z = beta * params.d**2 * x * x / (4 * s * (beta + s))
    return math.sqrt(math.pi / 2 * beta * s / (beta + s)) * math.exp(2 * z) * special.i0e(z)


def ell_integral(
    x: float,
    alpha: float,
    beta: float,
    delta: float,
    params: RiceanParams,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> float:
    """
    l(x; alpha, beta, delta) = integral over [0, inf) of
    exp(-r^2 (beta + s) / (2 beta s)) r (r^2 + delta)^((alpha-1)/2) I0(d x r / s) dr,
    by quadrature, for alpha >= 0 and delta >= 0.
    """
    if alpha < 0 or delta < 0 or beta <= 0:
        raise ParameterError("ell_integral needs alpha >= 0, delta >= 0 and beta > 0")
    s = x * x + params.sigma2
    curvature = (beta + s) / (2 * beta * s)
    slope = params.d * x / s

    def integrand(r: float) -> float:
        if r == 0:
            return 1.0 if alpha == 0 and delta == 0 else 0.0
        weight = r * (r * r + delta) ** ((alpha - 1) / 2)
        return math.exp(-curvature * r * r + slope * r) * weight * special.i0e(slope * r)

    return integrate_halfline(integrand, spec).value


def _psi_prefactor(x: float, odp: OutputDensityParams, params: RiceanParams) -> float:
    s = x * x + params.sigma2
    log_value = (
        math.log(2)
        - odp.delta / (2 * odp.beta)
        - params.d**2 * x * x / (2 * s)
        - 0.5 * log_inc_gamma(odp.alpha, odp.delta / odp.beta)
        - odp.alpha / 2 * math.log(odp.beta)
        - 0.5 * math.log(s)
    )
    return math.exp(log_value)


def ell_lower(x: float, odp: OutputDensityParams, params: RiceanParams) -> float:
    """
    a(alpha, beta, delta, m1) * l(x; 0, beta, 0), a lower bound on
    l(x; alpha, beta, delta).
    """
    return dominance_factor(odp, params) * ell_closed_form(x, odp.beta, params)


def psi(x: float, odp: OutputDensityParams, params: RiceanParams) -> float:
    """
    Certified lower bound on psi(x), the integral of sqrt(w(y|x) f_R(y)) over
    the output plane.
    """
    return _psi_prefactor(x, odp, params) * ell_lower(x, odp, params)


def psi_direct(
    x: float,
    odp: OutputDensityParams,
    params: RiceanParams,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> float:
    """
    psi(x) with l evaluated by quadrature instead of bounded.
    """
    return _psi_prefactor(x, odp, params) * ell_integral(
        x, odp.alpha, odp.beta, odp.delta, params, spec
    )


def output_density_r(y_abs2: float, odp: OutputDensityParams) -> float:
    """
    f_R(y) as a function of |y|^2.
    """
    shifted = y_abs2 + odp.delta
    log_value = (
        (odp.alpha - 1) * math.log(shifted)
        - shifted / odp.beta
        - math.log(math.pi)
        - odp.alpha * math.log(odp.beta)
        - log_inc_gamma(odp.alpha, odp.delta / odp.beta)
    )
    return math.exp(log_value)


def psi_integral(
    x: float,
    odp: OutputDensityParams,
    params: RiceanParams,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> float:
    """
    psi(x) from its definition, integrating sqrt(w(y|x) f_R(y)) over the
    output plane.
    """

    def integrand(radius: float, theta: float) -> float:
        y = radius * complex(math.cos(theta), math.sin(theta))
        return math.sqrt(output_density(y, complex(x), params) * output_density_r(radius**2, odp))

    circular = params.d == 0 or x == 0
    return integrate_radial_complex(integrand, spec, circular=circular).value


def _upper_bound_values(params: RiceanParams, alpha, beta, delta, m1) -> np.ndarray:
    power, sigma2, d = params.power, params.sigma2, params.d
    alpha, beta, delta, m1 = np.broadcast_arrays(*map(np.asarray, (alpha, beta, delta, m1)))
    log_a = _log_dominance_factor(alpha, beta, delta, m1, d, sigma2)
    return (
        delta / beta
        - 2 * log_a
        + alpha * np.log(beta)
        + log_inc_gamma(alpha, delta / beta)
        + np.log1p((power + sigma2) / beta)
        + (1 - beta / (beta + power + sigma2)) * d * d
        + asymptotic_constant_no_si(d)
    )


class UpperBoundChoice(NamedTuple):
    value: float
    output_density: OutputDensityParams


def optimize_upper_bound(
    params: RiceanParams,
    delta_grid: Iterable[float] = DEFAULT_DELTA_GRID,
    m1_grid: Iterable[float] = DEFAULT_M1_GRID,
) -> UpperBoundChoice:
    """
    Minimizes the closed-form upper bound on R0 over a (delta, m1) grid,
    with beta = E log E and alpha = delta / log beta.

    Raises:
        ParameterError: If no grid point satisfies a > 0.
    """
    deltas = np.asarray(list(delta_grid), dtype=float)
    m1s = np.asarray(list(m1_grid), dtype=float)
    if deltas.size == 0 or m1s.size == 0:
        raise ParameterError("the (delta, m1) grid is empty")
    if np.any(~((deltas > 0) & (deltas < 1))) or np.any(~(m1s > 0)):
        raise ParameterError("grid needs 0 < delta < 1 and m1 > 0")
    template = OutputDensityParams.auto(params.power, float(deltas[0]), float(m1s[0]))
    delta_mesh, m1_mesh = np.meshgrid(deltas, m1s, indexing="ij")
    alpha_mesh = delta_mesh / math.log(template.beta)
    values = _upper_bound_values(params, alpha_mesh, template.beta, delta_mesh, m1_mesh)
    if np.all(np.isnan(values)):
        raise ParameterError(
            "no (delta, m1) on the grid satisfies "
            "sqrt(m1 delta) I0(d sqrt(m1 delta)/(2 sigma)) < sqrt(pi beta sigma2/(2(beta+sigma2)))"
        )
    skipped = int(np.isnan(values).sum())
    if skipped:
        logger.debug("skipped %d infeasible (delta, m1) pairs", skipped)
    i, j = np.unravel_index(np.nanargmin(values), values.shape)
    chosen = OutputDensityParams.auto(params.power, float(deltas[i]), float(m1s[j]))
    return UpperBoundChoice(float(values[i, j]), chosen)


def upper_bound_r0(
    params: RiceanParams,
    output_density: Union[OutputDensityParams, None] = None,
    delta: Union[float, None] = None,
    m1: Union[float, None] = None,
) -> float:
    """
    Upper bound on R0 under the average power constraint E (and therefore
    under the peak constraint too).

    With ``output_density`` the bound is evaluated at those parameters; with
    ``delta`` and ``m1`` at beta = E log E, alpha = delta / log beta; with
    neither, the bound is minimized over the default (delta, m1) grid.

    Raises:
        ParameterError: If the chosen parameters make a(alpha, beta, delta, m1) <= 0.
    """
    if output_density is None and delta is None and m1 is None:
        return optimize_upper_bound(params).value
    if output_density is None:
        if delta is None or m1 is None:
            raise PreconditionError("delta and m1 must be given together")
        output_density = OutputDensityParams.auto(params.power, delta, m1)
    dominance_factor(output_density, params)
    odp = output_density
    return float(_upper_bound_values(params, odp.alpha, odp.beta, odp.delta, odp.m1))


def upper_bound_limit(d: float, sigma2: float, delta: float, m1: float) -> float:
    """
    Limit of upper_bound_r0 - log log(E/sigma2) as E grows with delta and m1
    held fixed:
    log((m1+1)/m1) - 2 log(1 - sqrt(m1 delta) I0(d sqrt(m1 delta)/(2 sigma)) / sqrt(pi sigma2/2))
    + delta + log((1 - exp(-delta))/delta) + asymptotic_constant_no_si(d).
    """
    if not (0 < delta < 1 and m1 > 0 and sigma2 > 0):
        raise ParameterError("upper_bound_limit needs 0 < delta < 1, m1 > 0 and sigma2 > 0")
    root = math.sqrt(m1 * delta)
    ratio = root * float(special.i0(d * root / (2 * math.sqrt(sigma2)))) / math.sqrt(
        math.pi * sigma2 / 2
    )
    if not ratio < 1:
        raise ParameterError(
            f"delta={delta:.6g}, m1={m1:.6g} violate sqrt(m1 delta) I0(.) < sqrt(pi sigma2/2)"
        )
    return (
        math.log((m1 + 1) / m1)
        - 2 * math.log1p(-ratio)
        + delta
        + math.log(-math.expm1(-delta) / delta)
        + asymptotic_constant_no_si(d)
    )


def bracket_curve(
    snr_grid: Sequence[float],
    d: float = 0.0,
    sigma2: float = 1.0,
    constraint_kind: ConstraintKind = "average",
    method: LowerBoundMethod = "best",
    delta: Union[float, None] = None,
    m1: Union[float, None] = None,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> ExponentCurve:
    """
    Lower bound, upper bound and high-SNR asymptote of R0 along an SNR grid.

    Args:
        snr_grid (Sequence[float]): Strictly ascending SNR values E / sigma2.
        d (float): Specular component.
        sigma2 (float): Noise variance.
        constraint_kind (ConstraintKind): Recorded with the run; both bounds
            hold for either kind.
        method (LowerBoundMethod): Lower-bound path, see ``lower_bound_r0``.
        delta (float, optional): Fixed delta of the upper bound.
        m1 (float, optional): Fixed m1 of the upper bound.
        spec (QuadSpec): Quadrature tolerances.

    Returns:
        ExponentCurve: One row per SNR point, in grid order.
    """
    points = []
    for snr in check_ascending(snr_grid, "SNR grid"):
        params = RiceanParams.from_snr(snr, d=d, sigma2=sigma2, constraint_kind=constraint_kind)
        lower = lower_bound_r0(params, method, spec)
        if delta is None and m1 is None:
            upper, chosen = optimize_upper_bound(params)
        else:
            upper = upper_bound_r0(params, delta=delta, m1=m1)
            chosen = OutputDensityParams.auto(params.power, delta, m1)
        asymptote = math.log(math.log(snr)) + asymptotic_constant_no_si(d)
        points.append(
            BoundPoint(
                snr=snr,
                lower_bound=lower,
                upper_bound=upper,
                asymptote=asymptote,
                d=d,
                sigma2=sigma2,
                delta=chosen.delta,
                m1=chosen.m1,
            )
        )
        logger.debug("snr %.6g: lower %.9f upper %.9f", snr, lower, upper)
    logger.info("computed R0 bracket on %d SNR points", len(points))
    return ExponentCurve.from_points(
        points,
        metadata={"constraint_kind": constraint_kind, "lower_bound_method": method},
    )


def figure_one_rows(d_grid: Sequence[float]) -> List[FigureOneRow]:
    """
    Second-order terms of capacity and cut-off rate versus d, and their gap.
    """
    rows = []
    for d in d_grid:
        capacity = capacity_constant(d)
        cutoff = asymptotic_constant_no_si(d)
        rows.append(
            FigureOneRow(
                d=float(d),
                capacity_constant_nats=capacity,
                cutoff_constant_nats=cutoff,
                gap_nats=capacity - cutoff,
            )
        )
    return rows
