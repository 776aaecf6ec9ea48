"""
Gallager's E0 function for discrete memoryless channels in its primal form
(maximization over input laws Q) and its dual form (minimization over output
laws R), with and without an average cost constraint, plus the random-coding
and sphere-packing exponents built on it.

All logarithms are natural; values are in nats.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, special

from cutoff_duality.types.error_types import (
    ConvergenceError,
    PreconditionError,
    SizeError,
    ValidationError,
)
from cutoff_duality.types.main import DualityReport
from cutoff_duality.utils.typing.custom_typing import DualityTrialRow

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-12
BUDGET_TOL = 1e-9
ORACLE_SIZE_CAP = 64

ProbVec = np.ndarray
ConditionalLaw = np.ndarray


def stochastic_row_errors(matrix: np.ndarray, field: str = "row") -> List[str]:
    """
    Lists every violation of row-stochasticity in ``matrix``.

    Args:
        matrix (np.ndarray): Candidate transition matrix.
        field (str): Word used to name a row in the messages.

    Returns:
        List[str]: Messages such as ``"row 1 sums to 0.97"``; empty if valid.
    """
    if matrix.ndim != 2 or 0 in matrix.shape:
        return ["transition must be a non-empty 2-D matrix"]
    if not np.all(np.isfinite(matrix)):
        return ["entries must be finite"]
    errors = [f"entry ({i}, {j}) is negative" for i, j in zip(*np.nonzero(matrix < 0))]
    for i, total in enumerate(matrix.sum(axis=1)):
        if abs(total - 1) > STOCHASTIC_TOL:
            errors.append(f"{field} {i} sums to {total:.6g}")
    return errors


def _as_float_array(values, field: str) -> np.ndarray:
    try:
        return np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError.from_errors(
            {field: [f"{field} must be a rectangular array of numbers"]}
        )


@dataclass(frozen=True, eq=False)
class Dmc:
    """
    Discrete memoryless channel given by its N x M transition matrix W(y|x).

    Attributes:
        transition (np.ndarray): Row-stochastic matrix, rows indexed by inputs.
    """

    transition: np.ndarray

    def __post_init__(self):
        """
        Validates the matrix and freezes a private copy of it.
        """
        matrix = _as_float_array(self.transition, "transition")
        errors = stochastic_row_errors(matrix)
        if errors:
            raise ValidationError.from_errors({"transition": errors})
        matrix.setflags(write=False)
        object.__setattr__(self, "transition", matrix)

    @property
    def num_inputs(self) -> int:
        return self.transition.shape[0]

    @property
    def num_outputs(self) -> int:
        return self.transition.shape[1]


@dataclass(frozen=True, eq=False)
class CostSpec:
    """
    Per-input cost g(x) >= 0 and average budget Upsilon >= 0.
    """

    cost: np.ndarray
    budget: float

    def __post_init__(self):
        cost = _as_float_array(self.cost, "cost")
        errors = {"cost": [], "budget": []}
        if cost.ndim != 1 or cost.size == 0:
            errors["cost"].append("cost must be a non-empty vector")
        elif not np.all(np.isfinite(cost)) or np.any(cost < 0):
            errors["cost"].append("costs must be finite and non-negative")
        if not (math.isfinite(self.budget) and self.budget >= 0):
            errors["budget"].append(f"budget must be non-negative, got {self.budget!r}")
        if errors["cost"] or errors["budget"]:
            raise ValidationError.from_errors(errors)
        cost.setflags(write=False)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "budget", float(self.budget))

    def check(self, w: Dmc):
        if self.cost.size != w.num_inputs:
            raise PreconditionError(
                f"cost has {self.cost.size} entries but the channel has "
                f"{w.num_inputs} inputs"
            )

    def expected_cost(self, q: ProbVec) -> float:
        return float(np.dot(q, self.cost))

    def offsets(self, tilt: float) -> np.ndarray:
        return tilt * (self.cost - self.budget)


@dataclass(frozen=True)
class IterationConfig:
    """
    Stopping rules of the fixed-point iterations.

    Attributes:
        value_tol (float): Slack allowed when checking that a step does not
            lose objective value.
        gap_tol (float): Duality gap at which an optimization is certified.
        max_iterations (int): Iteration cap.
        inner_tol (float): Certified gap for inner minimizations over R.
    """

    value_tol: float = 1e-12
    gap_tol: float = 1e-9
    max_iterations: int = 100_000
    inner_tol: float = 1e-11

    def __post_init__(self):
        if min(self.value_tol, self.gap_tol, self.inner_tol) <= 0:
            raise PreconditionError("iteration tolerances must be positive")
        if self.max_iterations < 1:
            raise PreconditionError("max_iterations must be at least 1")


DEFAULT_ITERATION_CONFIG = IterationConfig()


@dataclass
class E0Result:
    """
    Optimized E0 value with its witnesses.

    Attributes:
        value (float): E0 in nats.
        optimizing_input (ProbVec): Input law reaching ``value``.
        optimizing_output (ProbVec): Output law certifying ``value`` from above.
        tilt_r (float): Cost tilt r >= 0, zero without an active constraint.
        iterations (int): Iterations of the final fixed-point run.
        converged (bool): Whether the duality gap closed below tolerance.
        gap (float): Dual bound minus primal value.
    """

    value: float
    optimizing_input: ProbVec
    optimizing_output: ProbVec
    tilt_r: float = 0.0
    iterations: int = 0
    converged: bool = True
    gap: float = 0.0


@dataclass
class EckResult:
    """
    Value of the inner minimization over output laws, its minimizer and the
    Frank-Wolfe gap certifying it.
    """

    value: float
    output_law: ProbVec
    gap: float
    iterations: int
    converged: bool

    @property
    def lower_bound(self) -> float:
        return self.value - self.gap


class TiltedValue(NamedTuple):
    value: float
    tilt_r: float


@dataclass
class ExponentResult:
    value: float
    rho: float
    infinite: bool = False


def prob_vec(weights: Sequence[float], size: int, name: str = "q") -> ProbVec:
    """
    Validates a probability vector over an alphabet of ``size`` letters.

    Raises:
        PreconditionError: On a length mismatch.
        ValidationError: If entries are negative or do not sum to one.
    """
    vector = _as_float_array(weights, name)
    if vector.ndim != 1 or vector.size != size:
        raise PreconditionError(
            f"{name} must have {size} entries, got shape {vector.shape}"
        )
    errors = stochastic_row_errors(vector[None, :], field=name)
    if errors:
        raise ValidationError.from_errors({name: errors})
    return vector


def _check_rho(rho: float, positive: bool = False):
    if not math.isfinite(rho) or rho < 0 or (positive and rho == 0):
        bound = "> 0" if positive else ">= 0"
        raise PreconditionError(f"rho must be {bound}, got {rho!r}")


def _log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def _logsumexp(values: np.ndarray, axis: Union[int, None] = None) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return special.logsumexp(values, axis=axis)


def _log_kernel(rho: float, w: Dmc) -> np.ndarray:
    return _log(w.transition) / (1 + rho)


def _offsets(w: Dmc, cost: Union[CostSpec, None], tilt: float) -> np.ndarray:
    if cost is None:
        return np.zeros(w.num_inputs)
    cost.check(w)
    return cost.offsets(tilt)


def _log_alpha(rho: float, log_q: np.ndarray, w: Dmc, offsets: np.ndarray) -> np.ndarray:
    return _logsumexp((log_q + offsets)[:, None] + _log_kernel(rho, w), axis=0)


def _e0_from_log_alpha(rho: float, log_alpha: np.ndarray) -> float:
    return float(-_logsumexp((1 + rho) * log_alpha))


def eg0(rho: float, q: Sequence[float], w: Dmc) -> float:
    """
    Gallager's function -log sum_y (sum_x Q(x) W(y|x)^(1/(1+rho)))^(1+rho).

    Args:
        rho (float): rho >= 0.
        q (Sequence[float]): Input law.
        w (Dmc): Channel.

    Returns:
        float: E0(rho, Q) in nats.
    """
    _check_rho(rho)
    q = prob_vec(q, w.num_inputs)
    return _e0_from_log_alpha(rho, _log_alpha(rho, _log(q), w, np.zeros(w.num_inputs)))


def e0_tilted(
    rho: float, q: Sequence[float], r: float, w: Dmc, cost: CostSpec
) -> float:
    """
    E0 with every input weighted by exp(r (g(x) - Upsilon)); equals ``eg0`` at
    r = 0.
    """
    _check_rho(rho)
    if not (math.isfinite(r) and r >= 0):
        raise PreconditionError(f"tilt r must be >= 0, got {r!r}")
    q = prob_vec(q, w.num_inputs)
    return _e0_from_log_alpha(rho, _log_alpha(rho, _log(q), w, _offsets(w, cost, r)))


def _maximize_concave(
    objective: Callable[[float], float],
    lower: float = 0.0,
    step: float = 1.0,
    max_doublings: int = 60,
    xatol: float = 1e-10,
) -> Tuple[float, float, bool]:
    """
    Maximizes a concave function on [lower, inf): the upper end of the
    bracket is doubled until the objective stops increasing, then bounded
    Brent search runs inside the bracket.

    Returns:
        Tuple[float, float, bool]: Maximizer, maximum, and False when the
        objective was still increasing after ``max_doublings`` doublings.
    """
    a, fa = lower, objective(lower)
    b, fb = lower + step, objective(lower + step)
    evaluated = [(a, fa), (b, fb)]
    bracket = (a, b)
    if fb > fa:
        for _ in range(max_doublings):
            c = lower + 2 * (b - lower)
            fc = objective(c)
            evaluated.append((c, fc))
            if fc <= fb:
                bracket = (a, c)
                break
            a, fa, b, fb = b, fb, c, fc
        else:
            return b, fb, False
    result = optimize.minimize_scalar(
        lambda x: -objective(x),
        bounds=bracket,
        method="bounded",
        options={"xatol": xatol},
    )
    evaluated.append((float(result.x), float(-result.fun)))
    best = max(evaluated, key=lambda pair: pair[1])
    return best[0], best[1], True


def eg0_modified(
    rho: float,
    q: Sequence[float],
    w: Dmc,
    cost: CostSpec,
    tol: float = BUDGET_TOL,
) -> TiltedValue:
    """
    Cost-aware E0 of a fixed input law: E0(rho, Q) when the law spends less
    than the budget, and the supremum over r >= 0 of the tilted E0 when it
    spends exactly the budget.

    Raises:
        PreconditionError: If the law exceeds the budget.
    """
    _check_rho(rho)
    q = prob_vec(q, w.num_inputs)
    cost.check(w)
    spent = cost.expected_cost(q)
    if spent > cost.budget + tol:
        raise PreconditionError(
            f"input law spends {spent:.6g} which exceeds the budget {cost.budget:.6g}"
        )
    if spent < cost.budget - tol:
        return TiltedValue(eg0(rho, q, w), 0.0)
    tilt, value, _ = _maximize_concave(lambda r: e0_tilted(rho, q, r, w, cost))
    return TiltedValue(value, tilt)


def eck0_dual(
    rho: float,
    q: Sequence[float],
    w: Dmc,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
    initial_output_law: Union[Sequence[float], None] = None,
    strict: bool = False,
) -> EckResult:
    """
    Minimizes -(1+rho) sum_x Q(x) log sum_y W(y|x)^(1/(1+rho)) R(y)^(rho/(1+rho))
    over output laws R.

    Each step maps R to sum_x Q(x) P_x, where P_x is W(.|x)^(1/(1+rho)) R^(rho/(1+rho))
    normalized; this is the minimizer of a majorizer of the objective, so the
    objective never increases. The Frank-Wolfe gap rho * (max_y R'(y)/R(y) - 1)
    bounds the distance to the minimum and is the stopping rule. R is kept on
    the outputs reachable with positive Q-mass.

    Args:
        rho (float): rho > 0.
        q (Sequence[float]): Input law.
        w (Dmc): Channel.
        config (IterationConfig): Stopping rules, ``inner_tol`` applies.
        initial_output_law (Sequence[float], optional): Warm start.
        strict (bool): Raise ConvergenceError at the iteration cap.

    Returns:
        EckResult: Value, minimizing R, certified gap.
    """
    _check_rho(rho, positive=True)
    q = prob_vec(q, w.num_inputs)
    active = q > 0
    weights = q[active]
    kernel = np.power(w.transition[active], 1 / (1 + rho))
    support = weights @ w.transition[active] > 0
    kernel = kernel[:, support]
    share = rho / (1 + rho)

    r = np.full(int(support.sum()), 1 / support.sum())
    if initial_output_law is not None:
        start = np.asarray(initial_output_law, dtype=float)[support]
        if np.all(start > 0):
            r = start / start.sum()

    converged = False
    value, gap, iteration = math.inf, math.inf, 0
    for iteration in range(1, config.max_iterations + 1):
        powered = np.power(r, share)
        sums = kernel @ powered
        value = float(-(1 + rho) * np.dot(weights, np.log(sums)))
        update = powered * ((weights / sums) @ kernel)
        gap = max(float(rho * (np.max(update / r) - 1)), 0.0)
        if gap <= config.inner_tol:
            converged = True
            break
        r = update / update.sum()

    if not converged:
        logger.warning(
            "output-law minimization stopped after %d iterations with gap %.3g",
            iteration,
            gap,
        )
        if strict:
            raise ConvergenceError("output-law minimization did not converge", value, gap)
    output = np.zeros(w.num_outputs)
    output[support] = r
    return EckResult(value, output, gap, iteration, converged)


def primal_ck_objective(
    rho: float, q: Sequence[float], w: Dmc, v: ConditionalLaw
) -> float:
    """
    D(V || W | Q) + rho I(Q, V) for a conditional law V.
    """
    q = prob_vec(q, w.num_inputs)
    v = np.asarray(v, dtype=float)
    active = q > 0
    weights, v_active = q[active], v[active]
    output = weights @ v_active
    divergence = special.rel_entr(v_active, w.transition[active]).sum(axis=1)
    information = special.rel_entr(v_active, output[None, :]).sum(axis=1)
    return float(np.dot(weights, divergence + rho * information))


def eck0_primal_oracle(
    rho: float,
    q: Sequence[float],
    w: Dmc,
    starts: int = 32,
    seed: int = 0,
    step: float = 1.0,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
) -> float:
    """
    Brute-force minimization of D(V || W | Q) + rho I(Q, V) over conditional
    laws V, for cross-checking ``eck0_dual`` on small alphabets.

    Each start draws V at random on the support of W and runs
    exponentiated-gradient descent on every row, row normalization being the
    entropic projection onto the simplex. ``step`` in (0, 1] scales the
    mirror step; 1 is the largest stable one.

    Raises:
        SizeError: If N * M exceeds 64.
    """
    _check_rho(rho)
    if w.num_inputs * w.num_outputs > ORACLE_SIZE_CAP:
        raise SizeError(
            f"oracle handles N*M <= {ORACLE_SIZE_CAP}, got "
            f"{w.num_inputs}x{w.num_outputs}"
        )
    if not 0 < step <= 1:
        raise PreconditionError("step must lie in (0, 1]")
    q = prob_vec(q, w.num_inputs)
    active = q > 0
    log_w = _log(w.transition)
    mask = w.transition > 0
    rng = np.random.default_rng(seed)

    best = primal_ck_objective(rho, q, w, w.transition)
    for _ in range(starts):
        v = rng.dirichlet(np.ones(w.num_outputs), size=w.num_inputs) * mask
        v /= v.sum(axis=1, keepdims=True)
        v[~active] = w.transition[~active]
        value = primal_ck_objective(rho, q, w, v)
        for _ in range(config.max_iterations):
            output = q[active] @ v[active]
            target = (log_w + rho * _log(output)[None, :]) / (1 + rho)
            log_v = (1 - step) * _log(v) + step * target
            log_v = np.where(mask, log_v, -np.inf)
            candidate = np.exp(log_v - _logsumexp(log_v, axis=1)[:, None])
            candidate[~active] = w.transition[~active]
            candidate_value = primal_ck_objective(rho, q, w, candidate)
            improvement = value - candidate_value
            v, value = candidate, min(value, candidate_value)
            if improvement <= config.value_tol * 1e-3:
                break
        best = min(best, value)
    return best


def dual_letter_exponents(
    rho: float,
    r_out: Sequence[float],
    w: Dmc,
    cost: Union[CostSpec, None] = None,
    tilt: float = 0.0,
) -> np.ndarray:
    """
    Per-input dual exponents
    -(1+rho) [r (g(x) - Upsilon) + log sum_y W(y|x)^(1/(1+rho)) R(y)^(rho/(1+rho))].
    """
    _check_rho(rho)
    r_out = prob_vec(r_out, w.num_outputs, name="r_out")
    sums = np.power(w.transition, 1 / (1 + rho)) @ np.power(r_out, rho / (1 + rho))
    return -(1 + rho) * (_offsets(w, cost, tilt) + _log(sums))


def dual_upper_bound(
    rho: float,
    r_out: Sequence[float],
    w: Dmc,
    cost: Union[CostSpec, None] = None,
    tilt: float = 0.0,
) -> float:
    """
    Maximum over inputs of the per-letter dual exponent. Any output law gives
    an upper bound on E0(rho), and on the cost-constrained E0 for any tilt
    r >= 0; the bound is tight at the optimal output law.

    Args:
        rho (float): rho >= 0.
        r_out (Sequence[float]): Output law R.
        w (Dmc): Channel.
        cost (CostSpec, optional): Cost constraint for the tilted form.
        tilt (float): Tilt r >= 0.

    Returns:
        float: The bound in nats (first maximizing input on ties).
    """
    if tilt < 0:
        raise PreconditionError(f"tilt must be >= 0, got {tilt!r}")
    exponents = dual_letter_exponents(rho, r_out, w, cost, tilt)
    return float(exponents[int(np.argmax(exponents))])


def optimal_output_law(
    rho: float,
    q: Sequence[float],
    w: Dmc,
    cost: Union[CostSpec, None] = None,
    tilt: float = 0.0,
) -> ProbVec:
    """
    R(y) proportional to alpha(y)^(1+rho), with
    alpha(y) = sum_x Q(x) exp(r (g(x) - Upsilon)) W(y|x)^(1/(1+rho)).
    """
    _check_rho(rho)
    q = prob_vec(q, w.num_inputs)
    scaled = (1 + rho) * _log_alpha(rho, _log(q), w, _offsets(w, cost, tilt))
    return np.exp(scaled - _logsumexp(scaled))


def kuhn_tucker_slack(
    rho: float,
    q: Sequence[float],
    w: Dmc,
    cost: Union[CostSpec, None] = None,
    tilt: float = 0.0,
) -> np.ndarray:
    """
    Per-input slack sum_y alpha^rho e^(r(g(x)-Upsilon)) W^(1/(1+rho)) - sum_y alpha^(1+rho);
    non-negative for every input, and zero on the support, at the optimum.
    """
    _check_rho(rho)
    q = prob_vec(q, w.num_inputs)
    offsets = _offsets(w, cost, tilt)
    alpha = np.exp(_log_alpha(rho, _log(q), w, offsets))
    kernel = np.exp(offsets)[:, None] * np.power(w.transition, 1 / (1 + rho))
    return kernel @ np.power(alpha, rho) - np.sum(np.power(alpha, 1 + rho))


class _ArimotoState(NamedTuple):
    log_q: np.ndarray
    value: float
    gap: float
    iterations: int
    converged: bool


def _arimoto(
    rho: float,
    w: Dmc,
    offsets: np.ndarray,
    log_q: Union[np.ndarray, None],
    config: IterationConfig,
) -> _ArimotoState:
    """
    Maximizes the (tilted) E0 over input laws with the multiplicative update
    Q(x) <- Q(x) c(x)^(-1/rho), c(x) = sum_y alpha(y)^rho b(x, y), where b is
    the tilted kernel. The gap (1+rho) log(sum_y alpha^(1+rho) / min_x c(x))
    is the distance between the primal value and the dual bound at R*.
    A step that would lose value is halved until it does not.
    """
    log_b = _log_kernel(rho, w) + offsets[:, None]
    if log_q is None:
        log_q = np.full(w.num_inputs, -math.log(w.num_inputs))

    def evaluate(log_q: np.ndarray) -> Tuple[float, np.ndarray, float]:
        log_alpha = _logsumexp(log_q[:, None] + log_b, axis=0)
        log_j = float(_logsumexp((1 + rho) * log_alpha))
        log_c = _logsumexp(rho * log_alpha[None, :] + log_b, axis=1)
        return -log_j, log_c, log_j

    value, log_c, log_j = evaluate(log_q)
    gap, iteration = math.inf, 0
    for iteration in range(1, config.max_iterations + 1):
        gap = max((1 + rho) * (log_j - float(np.min(log_c))), 0.0)
        if gap <= config.gap_tol:
            return _ArimotoState(log_q, value, gap, iteration, True)
        step = 1 / rho
        while True:
            candidate = log_q - step * log_c
            candidate = candidate - _logsumexp(candidate)
            candidate_value, candidate_c, candidate_j = evaluate(candidate)
            if candidate_value >= value - config.value_tol or step < 1e-12:
                break
            step /= 2
        log_q, value, log_c, log_j = candidate, candidate_value, candidate_c, candidate_j
    return _ArimotoState(log_q, value, gap, iteration, False)


def _finish(
    rho: float,
    w: Dmc,
    cost: Union[CostSpec, None],
    tilt: float,
    state: _ArimotoState,
    strict: bool,
) -> E0Result:
    q = np.exp(state.log_q)
    q /= q.sum()
    output = optimal_output_law(rho, q, w, cost, tilt)
    gap = max(dual_upper_bound(rho, output, w, cost, tilt) - state.value, 0.0)
    if not state.converged:
        logger.warning(
            "E0 optimization at rho=%g stopped after %d iterations with gap %.3g",
            rho,
            state.iterations,
            gap,
        )
        if strict:
            raise ConvergenceError("E0 optimization did not converge", state.value, gap)
    return E0Result(
        value=state.value,
        optimizing_input=q,
        optimizing_output=output,
        tilt_r=tilt,
        iterations=state.iterations,
        converged=state.converged,
        gap=gap,
    )


def optimize_e0(
    rho: float,
    w: Dmc,
    cost: Union[CostSpec, None] = None,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
    strict: bool = False,
) -> E0Result:
    """
    Maximizes E0(rho, Q) over input laws, optionally under an average cost
    constraint.

    Without a cost, or when the unconstrained optimizer already meets the
    budget, the multiplicative update runs once. Otherwise the constraint is
    active and the value is min over r >= 0 of max_Q E0(rho, Q, r); that
    function of r is convex, its slope being (1+rho)(Upsilon - E_Q[g]) at the
    inner optimizer, so the bracket [0, r_hi] is widened until the inner
    optimizer meets the budget and bounded Brent search finishes.

    Args:
        rho (float): rho >= 0.
        w (Dmc): Channel.
        cost (CostSpec, optional): Cost constraint.
        config (IterationConfig): Stopping rules.
        strict (bool): Raise ConvergenceError at the iteration cap.

    Returns:
        E0Result: Certified value with Q, R* and r.

    Raises:
        PreconditionError: If the budget is below the cheapest input cost.
    """
    _check_rho(rho)
    if rho == 0:
        q = np.full(w.num_inputs, 1 / w.num_inputs)
        return E0Result(0.0, q, q @ w.transition)
    zeros = np.zeros(w.num_inputs)
    free = _arimoto(rho, w, zeros, None, config)
    if cost is None:
        return _finish(rho, w, None, 0.0, free, strict)

    cost.check(w)
    if cost.budget < float(np.min(cost.cost)) - BUDGET_TOL:
        raise PreconditionError(
            f"budget {cost.budget:.6g} is below the cheapest input cost "
            f"{float(np.min(cost.cost)):.6g}"
        )
    if cost.expected_cost(np.exp(free.log_q)) <= cost.budget + BUDGET_TOL:
        logger.debug("cost constraint inactive at rho=%g", rho)
        return _finish(rho, w, cost, 0.0, free, strict)

    warm = {"log_q": free.log_q}

    def solve(tilt: float) -> _ArimotoState:
        state = _arimoto(rho, w, cost.offsets(tilt), warm["log_q"], config)
        warm["log_q"] = state.log_q
        return state

    def excess(state: _ArimotoState) -> float:
        return cost.expected_cost(np.exp(state.log_q)) - cost.budget

    low, high = 0.0, 1.0
    for _ in range(60):
        if excess(solve(high)) <= 0:
            break
        low, high = high, 2 * high
    result = optimize.minimize_scalar(
        lambda tilt: solve(tilt).value,
        bounds=(low, high),
        method="bounded",
        options={"xatol": 1e-10 * high},
    )
    tilt = float(result.x)
    logger.debug("cost constraint active at rho=%g, tilt r=%.6g", rho, tilt)
    return _finish(rho, w, cost, tilt, solve(tilt), strict)


def cutoff_rate(
    w: Dmc,
    cost: Union[CostSpec, None] = None,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
) -> float:
    """
    Cut-off rate R0 = E0(1), in nats.
    """
    return optimize_e0(1.0, w, cost, config).value


def random_coding_exponent(
    rate: float,
    w: Dmc,
    cost: Union[CostSpec, None] = None,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
) -> ExponentResult:
    """
    E_r(R) = max over 0 <= rho <= 1 of E0(rho) - rho R.
    """
    if not (math.isfinite(rate) and rate >= 0):
        raise PreconditionError(f"rate must be >= 0, got {rate!r}")

    def objective(rho: float) -> float:
        return optimize_e0(rho, w, cost, config).value - rho * rate

    result = optimize.minimize_scalar(
        lambda rho: -objective(rho),
        bounds=(0.0, 1.0),
        method="bounded",
        options={"xatol": 1e-8},
    )
    candidates = [(0.0, 0.0), (1.0, objective(1.0)), (float(result.x), float(-result.fun))]
    rho, value = max(candidates, key=lambda pair: pair[1])
    return ExponentResult(value, rho)


def zero_error_rate_limit(w: Dmc) -> float:
    """
    lim E0(rho) / rho as rho -> infinity, i.e. -log of
    min over Q of max over y of Q({x: W(y|x) > 0}), solved as a linear program.
    The sphere-packing exponent is infinite below this rate.
    """
    reach = (w.transition > 0).astype(float)
    n, m = reach.shape
    objective = np.zeros(n + 1)
    objective[-1] = 1.0
    result = optimize.linprog(
        objective,
        A_ub=np.hstack([reach.T, -np.ones((m, 1))]),
        b_ub=np.zeros(m),
        A_eq=np.hstack([np.ones((1, n)), np.zeros((1, 1))]),
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
        method="highs",
    )
    if not result.success:
        raise ConvergenceError(f"linear program failed: {result.message}", math.nan)
    return -math.log(result.fun)


def sphere_packing_exponent(
    rate: float,
    w: Dmc,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
    max_doublings: int = 30,
) -> ExponentResult:
    """
    E_sp(R) = sup over rho >= 0 of E0(rho) - rho R.

    Returns:
        ExponentResult: With ``infinite=True`` (and value inf) when R lies
        below lim E0(rho)/rho, or when the objective keeps growing through
        ``max_doublings`` doublings of the rho bracket.
    """
    if not (math.isfinite(rate) and rate > 0):
        raise PreconditionError(f"rate must be > 0, got {rate!r}")
    if rate < zero_error_rate_limit(w) - 1e-12:
        return ExponentResult(math.inf, math.inf, infinite=True)
    rho, value, bounded = _maximize_concave(
        lambda rho: optimize_e0(rho, w, config=config).value - rho * rate,
        max_doublings=max_doublings,
    )
    if not bounded:
        logger.info("sphere-packing objective unbounded at rate %g", rate)
        return ExponentResult(math.inf, math.inf, infinite=True)
    if value <= 0:
        return ExponentResult(0.0, 0.0)
    return ExponentResult(value, rho)


def eck0_max(
    rho: float,
    w: Dmc,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
    strict: bool = False,
) -> E0Result:
    """
    Maximizes the dual-form E0 over input laws. The input law is re-weighted
    by exp(D(x) / (rho (1+rho))), D being the per-letter dual exponents at the
    inner minimizer, halving the step whenever the value would drop.
    max_x D(x) bounds the maximum from above, which gives the stopping gap.
    """
    _check_rho(rho, positive=True)
    base_step = 1 / (rho * (1 + rho))
    log_q = np.full(w.num_inputs, -math.log(w.num_inputs))
    inner = eck0_dual(rho, np.exp(log_q), w, config)
    gap, iteration, converged = math.inf, 0, False
    for iteration in range(1, config.max_iterations + 1):
        letters = dual_letter_exponents(rho, inner.output_law, w)
        gap = max(float(np.max(letters)) - inner.value, 0.0) + inner.gap
        if gap <= config.gap_tol:
            converged = True
            break
        step = base_step
        while True:
            candidate = log_q + step * letters
            candidate = candidate - _logsumexp(candidate)
            trial = eck0_dual(
                rho, np.exp(candidate), w, config, initial_output_law=inner.output_law
            )
            if trial.value >= inner.value - config.value_tol or step < 1e-12:
                break
            step /= 2
        log_q, inner = candidate, trial

    q = np.exp(log_q)
    q /= q.sum()
    if not converged:
        logger.warning("dual E0 maximization stopped with gap %.3g", gap)
        if strict:
            raise ConvergenceError("dual E0 maximization did not converge", inner.value, gap)
    return E0Result(inner.value, q, inner.output_law, 0.0, iteration, converged, gap)


def _constrained_segment(cost: CostSpec) -> List[np.ndarray]:
    g, budget = cost.cost, cost.budget
    n = g.size
    points = []
    for i in range(n):
        if abs(g[i] - budget) <= BUDGET_TOL:
            vertex = np.zeros(n)
            vertex[i] = 1.0
            points.append(vertex)
        for j in range(i + 1, n):
            if g[i] != g[j] and (g[i] - budget) * (g[j] - budget) < 0:
                point = np.zeros(n)
                point[i] = (budget - g[j]) / (g[i] - g[j])
                point[j] = 1 - point[i]
                points.append(point)
    return points


def eck0_constrained_max(
    rho: float,
    w: Dmc,
    cost: CostSpec,
    grid_points: int = 1001,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
) -> float:
    """
    Grid oracle for max of the dual-form E0 over {Q : E_Q[g] = Upsilon}, for
    channels with at most three inputs (the feasible set is then a point or
    a segment).
    """
    cost.check(w)
    if w.num_inputs > 3:
        raise SizeError("the constrained grid oracle handles at most 3 inputs")
    points = _constrained_segment(cost)
    if not points:
        raise PreconditionError("no input law spends exactly the budget")
    ends = max(
        ((p, s) for p in points for s in points),
        key=lambda pair: float(np.linalg.norm(pair[0] - pair[1])),
    )
    if np.allclose(ends[0], ends[1]):
        grid = [ends[0]]
    else:
        grid = [(1 - t) * ends[0] + t * ends[1] for t in np.linspace(0, 1, grid_points)]
    return max(eck0_dual(rho, law / law.sum(), w, config).value for law in grid)


def verify_lagrange_duality(
    rho: float = 1.0,
    trials: int = 20,
    num_inputs: int = 3,
    num_outputs: int = 4,
    seed: int = 0,
    tolerance: float = 1e-5,
    channels: Union[Sequence[Dmc], None] = None,
    pointwise_samples: int = 5,
    config: IterationConfig = DEFAULT_ITERATION_CONFIG,
) -> DualityReport:
    """
    Checks numerically that max_Q of the primal E0 equals max_Q of the dual
    form, on seeded random channels (or on ``channels``), and spot-checks the
    pointwise inequality dual >= primal on random input laws.

    Args:
        rho (float): rho > 0.
        trials (int): Number of random channels when ``channels`` is None.
        num_inputs (int): Input alphabet size of the random channels.
        num_outputs (int): Output alphabet size of the random channels.
        seed (int): Seed of the random generator.
        tolerance (float): Largest acceptable gap.
        channels (Sequence[Dmc], optional): Channels to check instead.
        pointwise_samples (int): Random input laws per channel.
        config (IterationConfig): Stopping rules.

    Returns:
        DualityReport: Per-trial values and gaps.
    """
    _check_rho(rho, positive=True)
    rng = np.random.default_rng(seed)
    if channels is None:
        if trials < 1:
            raise PreconditionError(f"trials must be at least 1, got {trials}")
        channels = [random_channel(num_inputs, num_outputs, rng) for _ in range(trials)]

    report = DualityReport(rho=rho, tolerance=tolerance)
    for index, w in enumerate(channels):
        primal = optimize_e0(rho, w, config=config).value
        dual = eck0_max(rho, w, config).value
        laws = rng.dirichlet(np.ones(w.num_inputs), size=pointwise_samples)
        slack = min(eck0_dual(rho, q, w, config).value - eg0(rho, q, w) for q in laws)
        report.trials.append(
            DualityTrialRow(
                trial=index,
                primal_nats=primal,
                dual_nats=dual,
                gap=abs(primal - dual),
                pointwise_min_slack=slack,
            )
        )
        logger.debug("trial %d: primal %.12f dual %.12f", index, primal, dual)
    logger.info(
        "duality check at rho=%g: %d trials, max gap %.3g",
        rho,
        len(report.trials),
        report.max_gap,
    )
    return report


def bsc(p: float) -> Dmc:
    """
    Binary symmetric channel with crossover probability p.
    """
    if not 0 <= p <= 1:
        raise PreconditionError(f"crossover probability must lie in [0, 1], got {p!r}")
    return Dmc(np.array([[1 - p, p], [p, 1 - p]]))


def bec(erasure: float) -> Dmc:
    if not 0 <= erasure <= 1:
        raise PreconditionError(f"erasure probability must lie in [0, 1], got {erasure!r}")
    return Dmc(np.array([[1 - erasure, erasure, 0.0], [0.0, erasure, 1 - erasure]]))


def z_channel(p: float) -> Dmc:
    if not 0 <= p <= 1:
        raise PreconditionError(f"flip probability must lie in [0, 1], got {p!r}")
    return Dmc(np.array([[1.0, 0.0], [p, 1 - p]]))


def noiseless(size: int = 2) -> Dmc:
    if size < 1:
        raise PreconditionError("alphabet size must be at least 1")
    return Dmc(np.eye(size))


def matrix_channel(rows: Sequence[Sequence[float]]) -> Dmc:
    """
    Channel from an explicit row-stochastic transition matrix.
    """
    try:
        matrix = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        raise PreconditionError(f"transition matrix must be a rectangular table, got {rows!r}")
    if matrix.ndim != 2:
        raise PreconditionError(f"transition matrix must have two axes, got {matrix.ndim}")
    return Dmc(matrix)


def random_channel(
    num_inputs: int, num_outputs: int, rng: np.random.Generator
) -> Dmc:
    """
    Channel whose rows are independent uniform draws from the simplex.
    """
    return Dmc(rng.dirichlet(np.ones(num_outputs), size=num_inputs))
