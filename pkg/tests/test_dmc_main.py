import math

import numpy as np
import pytest

from cutoff_duality.dmc.main import (
    CostSpec,
    Dmc,
    IterationConfig,
    bec,
    bsc,
    cutoff_rate,
    dual_letter_exponents,
    dual_upper_bound,
    e0_tilted,
    eck0_constrained_max,
    eck0_dual,
    eck0_max,
    eck0_primal_oracle,
    eg0,
    eg0_modified,
    kuhn_tucker_slack,
    noiseless,
    optimal_output_law,
    optimize_e0,
    primal_ck_objective,
    prob_vec,
    random_channel,
    random_coding_exponent,
    sphere_packing_exponent,
    verify_lagrange_duality,
    z_channel,
    zero_error_rate_limit,
)
from cutoff_duality.types.error_types import (
    ConvergenceError,
    PreconditionError,
    SizeError,
    ValidationError,
)

BSC_R0 = 0.2231435513142097


def bsc_e0(rho, p):
    a = 1 / (1 + rho)
    return rho * math.log(2) - (1 + rho) * math.log(p**a + (1 - p) ** a)


@pytest.fixture
def channel():
    return bsc(0.1)


@pytest.fixture
def asymmetric():
    return Dmc(np.array([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6], [0.25, 0.5, 0.25]]))


@pytest.fixture
def cost():
    return CostSpec(np.array([0.0, 1.0]), 0.25)


def test_dmc_rejects_non_stochastic_rows():
    with pytest.raises(ValidationError) as exc_info:
        Dmc(np.array([[0.5, 0.5], [0.5, 0.47]]))
    assert exc_info.value.errors["transition"] == ["row 1 sums to 0.97"]


def test_dmc_keeps_read_only_copy():
    matrix = np.array([[1.0, 0.0], [0.0, 1.0]])
    w = Dmc(matrix)
    matrix[0, 0] = 0.5
    assert w.transition[0, 0] == 1.0, "Channel shares the caller's array"
    with pytest.raises(ValueError):
        w.transition[0, 0] = 0.0


def test_cost_spec_validation():
    with pytest.raises(ValidationError) as exc_info:
        CostSpec(np.array([-1.0, 1.0]), -0.5)
    assert set(exc_info.value.errors) == {"cost", "budget"}


def test_prob_vec_checks():
    with pytest.raises(PreconditionError):
        prob_vec([0.5, 0.5], 3)
    with pytest.raises(ValidationError) as exc_info:
        prob_vec([0.6, 0.3], 2)
    assert "q 0 sums to 0.9" in str(exc_info.value)


@pytest.mark.parametrize("rho", [0.0, 0.5, 1.0, 3.0])
def test_eg0_bsc_closed_form(channel, rho):
    assert eg0(rho, [0.5, 0.5], channel) == pytest.approx(bsc_e0(rho, 0.1), abs=1e-13)


def test_eg0_rejects_negative_rho(channel):
    with pytest.raises(PreconditionError) as exc_info:
        eg0(-0.5, [0.5, 0.5], channel)
    assert "rho must be >= 0" in str(exc_info.value)


@pytest.mark.parametrize("p", [0.05, 0.1, 0.2])
def test_optimize_e0_bsc_cutoff_rate(p):
    w = bsc(p)
    expected = math.log(2) - math.log(1 + 2 * math.sqrt(p * (1 - p)))
    result = optimize_e0(1.0, w)
    assert result.value == pytest.approx(expected, abs=1e-10)
    assert result.value == pytest.approx(bsc_e0(1.0, p), abs=1e-10)
    assert result.optimizing_input == pytest.approx([0.5, 0.5], abs=1e-6)
    assert result.converged
    assert result.gap <= 1e-8
    assert cutoff_rate(w) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize(
    "w, rho, expected",
    [
        (bec(0.5), 1.0, math.log(4 / 3)),
        (bec(0.2), 2.0, -math.log(0.2 + 0.8 / 4)),
        (noiseless(3), 2.0, 2 * math.log(3)),
        (bsc(0.5), 1.0, 0.0),
    ],
)
def test_optimize_e0_known_channels(w, rho, expected):
    assert optimize_e0(rho, w).value == pytest.approx(expected, abs=1e-9)


def test_optimize_e0_at_zero_rho(asymmetric):
    result = optimize_e0(0.0, asymmetric)
    assert result.value == 0.0
    assert result.optimizing_input.sum() == pytest.approx(1.0)


def test_optimize_e0_increasing_in_rho(asymmetric):
    values = [optimize_e0(rho, asymmetric).value for rho in (0.25, 0.5, 1.0, 2.0)]
    assert all(b > a for a, b in zip(values, values[1:])), f"E0 not increasing: {values}"


def test_weak_duality_for_any_output_law(asymmetric):
    best = optimize_e0(1.0, asymmetric).value
    rng = np.random.default_rng(3)
    for r_out in rng.dirichlet(np.ones(3), size=10):
        assert dual_upper_bound(1.0, r_out, asymmetric) >= best - 1e-12


@pytest.fixture
def seeded_channels():
    rng = np.random.default_rng(17)
    return [random_channel(3, 4, rng) for _ in range(10)]


@pytest.fixture
def priced():
    return CostSpec(np.array([0.0, 1.0, 2.0]), 0.5)


@pytest.mark.parametrize("rho", [0.5, 1.0])
def test_dual_bound_tight_at_optimal_output(seeded_channels, rho):
    for index, w in enumerate(seeded_channels):
        result = optimize_e0(rho, w)
        bound = dual_upper_bound(rho, result.optimizing_output, w)
        assert bound == pytest.approx(result.value, abs=1e-8), f"Loose bound on channel {index}"


@pytest.mark.parametrize("w", [bsc(0.1), z_channel(0.3)])
def test_dual_bound_tight_under_active_cost(w, cost):
    result = optimize_e0(1.0, w, cost)
    assert result.tilt_r > 0
    bound = dual_upper_bound(1.0, result.optimizing_output, w, cost, tilt=result.tilt_r)
    assert bound == pytest.approx(result.value, abs=1e-8)


def test_dual_bound_tight_with_three_priced_inputs(asymmetric, priced):
    result = optimize_e0(1.0, asymmetric, priced)
    bound = dual_upper_bound(
        1.0, result.optimizing_output, asymmetric, priced, tilt=result.tilt_r
    )
    assert bound == pytest.approx(result.value, abs=1e-8)
    assert result.optimizing_input @ priced.cost <= priced.budget + 1e-3


def test_optimal_output_law_is_a_law(asymmetric):
    law = optimal_output_law(0.5, [0.2, 0.3, 0.5], asymmetric)
    assert law.sum() == pytest.approx(1.0)
    assert np.all(law > 0)


def assert_kuhn_tucker(slack, q):
    assert np.all(slack >= -1e-9), f"Optimality conditions violated: {slack}"
    # the slack averages to zero under q, so q(x) * slack(x) is small everywhere
    assert np.all(q * slack <= 1e-9)
    support = q > 1e-3
    assert np.allclose(slack[support], 0.0, atol=1e-6)


@pytest.mark.parametrize("rho", [0.5, 1.0])
def test_kuhn_tucker_conditions_at_optimum(seeded_channels, rho):
    for w in seeded_channels:
        result = optimize_e0(rho, w)
        q = result.optimizing_input
        assert_kuhn_tucker(kuhn_tucker_slack(rho, q, w), q)


def test_kuhn_tucker_conditions_under_active_cost(channel, cost):
    result = optimize_e0(1.0, channel, cost)
    q = result.optimizing_input
    assert_kuhn_tucker(kuhn_tucker_slack(1.0, q, channel, cost, tilt=result.tilt_r), q)


def test_kuhn_tucker_conditions_with_three_priced_inputs(asymmetric, priced):
    result = optimize_e0(1.0, asymmetric, priced)
    q = result.optimizing_input
    assert_kuhn_tucker(kuhn_tucker_slack(1.0, q, asymmetric, priced, tilt=result.tilt_r), q)


def test_dual_letter_exponents_rejects_bad_law(channel):
    with pytest.raises(PreconditionError):
        dual_letter_exponents(1.0, [1.0], channel)


def test_dual_upper_bound_rejects_negative_tilt(channel, cost):
    with pytest.raises(PreconditionError):
        dual_upper_bound(1.0, [0.5, 0.5], channel, cost, tilt=-1.0)


def test_eck0_dual_matches_gallager_on_symmetric_channel(channel):
    result = eck0_dual(1.0, [0.5, 0.5], channel)
    assert result.converged
    assert result.value == pytest.approx(BSC_R0, abs=1e-9)
    assert result.output_law == pytest.approx([0.5, 0.5], abs=1e-6)


def test_eck0_dual_dominates_gallager_pointwise(asymmetric):
    rng = np.random.default_rng(11)
    for q in rng.dirichlet(np.ones(3), size=5):
        assert eck0_dual(1.0, q, asymmetric).value >= eg0(1.0, q, asymmetric) - 1e-10


def test_eck0_dual_restricts_to_reachable_outputs():
    w = Dmc(np.array([[0.5, 0.5, 0.0], [0.0, 0.0, 1.0]]))
    result = eck0_dual(1.0, [1.0, 0.0], w)
    assert result.output_law[2] == 0.0
    assert result.value == pytest.approx(0.0, abs=1e-10)


def test_eck0_dual_strict_raises_at_iteration_cap(asymmetric):
    config = IterationConfig(max_iterations=1, inner_tol=1e-15)
    with pytest.raises(ConvergenceError) as exc_info:
        eck0_dual(1.0, [0.2, 0.3, 0.5], asymmetric, config, strict=True)
    assert exc_info.value.gap > 0


def test_eck0_dual_matches_primal_oracle(asymmetric):
    q = [0.2, 0.3, 0.5]
    dual = eck0_dual(0.7, q, asymmetric).value
    primal = eck0_primal_oracle(0.7, q, asymmetric, starts=4, seed=1)
    assert primal == pytest.approx(dual, abs=1e-7), "Dual form disagrees with primal oracle"


def test_primal_objective_at_true_channel_is_information(channel):
    value = primal_ck_objective(1.0, [0.5, 0.5], channel, channel.transition)
    capacity = math.log(2) - (-(0.1 * math.log(0.1) + 0.9 * math.log(0.9)))
    assert value == pytest.approx(capacity, abs=1e-12)


def test_primal_oracle_size_cap():
    w = Dmc(np.full((8, 9), 1 / 9))
    with pytest.raises(SizeError):
        eck0_primal_oracle(1.0, np.full(8, 1 / 8), w)


def test_eck0_max_matches_optimize_e0(asymmetric):
    dual = eck0_max(1.0, asymmetric)
    assert dual.value == pytest.approx(optimize_e0(1.0, asymmetric).value, abs=1e-7)


def test_e0_tilted_at_zero_tilt(channel, cost):
    q = [0.75, 0.25]
    assert e0_tilted(1.0, q, 0.0, channel, cost) == pytest.approx(eg0(1.0, q, channel))


def test_eg0_modified(channel, cost):
    with pytest.raises(PreconditionError) as exc_info:
        eg0_modified(1.0, [0.5, 0.5], channel, cost)
    assert "exceeds the budget" in str(exc_info.value)
    inside = eg0_modified(1.0, [0.9, 0.1], channel, cost)
    assert inside.tilt_r == 0.0
    on_budget = eg0_modified(1.0, [0.75, 0.25], channel, cost)
    assert on_budget.value >= eg0(1.0, [0.75, 0.25], channel) - 1e-12
    assert on_budget.tilt_r >= 0.0


def test_optimize_e0_inactive_cost(channel):
    loose = CostSpec(np.array([0.0, 1.0]), 1.0)
    result = optimize_e0(1.0, channel, loose)
    assert result.tilt_r == 0.0
    assert result.value == pytest.approx(BSC_R0, abs=1e-10)


def test_optimize_e0_active_cost(channel, cost):
    result = optimize_e0(1.0, channel, cost)
    assert result.tilt_r > 0, "Constraint should be active"
    assert result.value < BSC_R0
    assert result.value >= eg0(1.0, [0.75, 0.25], channel) - 1e-8
    assert result.optimizing_input @ cost.cost == pytest.approx(cost.budget, abs=1e-3)


def test_optimize_e0_active_cost_matches_min_max_grid(channel, cost):
    result = optimize_e0(1.0, channel, cost)
    tilts = np.linspace(0.0, 2 * result.tilt_r + 1.0, 1001)
    q1 = np.linspace(0.0, 1.0, 1001)
    laws = np.stack([1 - q1, q1], axis=1)
    weights = np.exp(np.outer(tilts, cost.cost - cost.budget))
    alpha = np.einsum("qx,rx,xy->rqy", laws, weights, np.sqrt(channel.transition))
    tilted = -np.log(np.sum(alpha**2, axis=2))
    oracle = tilted.max(axis=1).min()
    assert result.value == pytest.approx(oracle, abs=1e-5)
    on_budget = eg0_modified(1.0, [0.75, 0.25], channel, cost)
    assert on_budget.value == pytest.approx(result.value, abs=1e-7)


def test_constrained_duality(channel, cost):
    gallager = optimize_e0(1.0, channel, cost).value
    dual = eck0_constrained_max(1.0, channel, cost)
    assert gallager == pytest.approx(dual, abs=1e-6)


def test_optimize_e0_infeasible_budget(channel):
    with pytest.raises(PreconditionError) as exc_info:
        optimize_e0(1.0, channel, CostSpec(np.array([1.0, 2.0]), 0.5))
    assert "below the cheapest input cost" in str(exc_info.value)


def test_cost_length_mismatch(asymmetric, cost):
    with pytest.raises(PreconditionError) as exc_info:
        optimize_e0(1.0, asymmetric, cost)
    assert "3 inputs" in str(exc_info.value)


def test_constrained_oracle_size_cap():
    with pytest.raises(SizeError):
        eck0_constrained_max(1.0, noiseless(4), CostSpec(np.arange(4.0), 1.0))


def test_random_coding_exponent(channel):
    assert random_coding_exponent(0.0, channel).value == pytest.approx(BSC_R0, abs=1e-9)
    # below the critical rate (about 0.1308 nats) the maximizing rho is 1
    low = random_coding_exponent(0.05, channel)
    assert low.rho == pytest.approx(1.0, abs=1e-6)
    assert low.value == pytest.approx(BSC_R0 - 0.05, abs=1e-9)
    assert random_coding_exponent(0.5, channel).value == pytest.approx(0.0, abs=1e-9)


def test_sphere_packing_dominates_random_coding(channel):
    for rate in (0.05, 0.15, 0.3):
        sphere = sphere_packing_exponent(rate, channel)
        assert not sphere.infinite
        assert sphere.value >= random_coding_exponent(rate, channel).value - 1e-7


def test_sphere_packing_above_capacity(channel):
    result = sphere_packing_exponent(0.5, channel)
    assert result.value == 0.0
    assert result.rho == 0.0


def test_sphere_packing_infinite_below_zero_error_limit():
    result = sphere_packing_exponent(0.5, noiseless(2))
    assert result.infinite
    assert math.isinf(result.value)


@pytest.mark.parametrize(
    "w, expected",
    [
        (bsc(0.1), 0.0),
        (z_channel(0.2), 0.0),
        (noiseless(4), math.log(4)),
        (Dmc(np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])), math.log(1.5)),
    ],
)
def test_zero_error_rate_limit(w, expected):
    assert zero_error_rate_limit(w) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("rho", [0.5, 1.0])
def test_verify_lagrange_duality(rho):
    report = verify_lagrange_duality(
        rho=rho, trials=20, num_inputs=3, num_outputs=4, seed=5, tolerance=1e-4
    )
    assert len(report.trials) == 20
    assert report.passed, f"Duality gap too large: {report.max_gap}"
    assert report.max_gap <= 1e-4
    assert report.min_pointwise_slack >= -1e-10


def test_verify_lagrange_duality_on_given_channel(channel):
    report = verify_lagrange_duality(channels=[channel], tolerance=1e-6)
    assert report.trials[0]["primal_nats"] == pytest.approx(BSC_R0, abs=1e-9)
    assert report.passed


def test_verify_lagrange_duality_needs_trials():
    with pytest.raises(PreconditionError) as exc_info:
        verify_lagrange_duality(trials=0)
    assert "trials must be at least 1" in str(exc_info.value)


def test_random_channel_is_reproducible():
    first = random_channel(3, 4, np.random.default_rng(0))
    second = random_channel(3, 4, np.random.default_rng(0))
    assert np.array_equal(first.transition, second.transition)
