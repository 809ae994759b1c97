"""Link-level simulator tests.

The decoder is checked against a hand-rolled per-trial nearest-point
search on the single-user channel, where the constellation is a scaled
integer grid and every quantity can be recomputed in a few lines.
"""

import math

import numpy as np
import pytest

from iadof.alignment import build_transmit_directions, truncate_plan, TransmitPlan
from iadof.channel import SystemConfig, generate_channel
from iadof.directions import DirectionSet, direction
from iadof.simulate import (
    DecodeBudgetError,
    InconsistentPlanError,
    MessageMatrix,
    SimConfig,
    SimResult,
    amplitude_scale,
    antenna_model,
    draw_messages,
    encode,
    min_distance,
    plan_coordinates,
    propagate,
    run_link_sim,
    separation_exponent,
    separation_floor,
    simulate_plan,
    stream_mean_power,
    symbol_variance,
)

SNR3 = (1e2, 1e4, 1e6)


def make(K, M=1, N=1, gamma=1, Q=2, seed=0, cap=None):
    config = SystemConfig(K=K, M=M, N=N, gamma=gamma, Q=Q, seed=seed)
    h = generate_channel(config)
    plan = build_transmit_directions(config)
    if cap is not None:
        plan = truncate_plan(plan, cap)
    return config, h, plan


# ------------------------------------------------------------------ symbols


def test_symbol_variance_matches_uniform_grid():
    for Q in (2, 3, 4, 8):
        grid = np.arange(-(Q - 1), Q)
        assert symbol_variance(Q) == pytest.approx(grid.var())


def test_draw_messages_deterministic_and_in_range():
    _, _, plan = make(2, Q=4, seed=9)
    a = draw_messages(plan, seed=3)
    b = draw_messages(plan, seed=3)
    c = draw_messages(plan, seed=4)
    assert a.symbols == b.symbols
    assert a.symbols != c.symbols
    assert set(a.symbols) == set(plan_coordinates(plan))
    assert all(abs(u) <= 3 for u in a.symbols.values())


def test_message_matrix_rejects_out_of_range():
    config = SystemConfig(K=1, Q=2)
    with pytest.raises(ValueError):
        MessageMatrix(config, {(1, 1, 1, 0): 2})


# ------------------------------------------------------------------- encode


def test_encode_single_direction_is_direct_gain():
    config, h, plan = make(1, seed=5)
    msgs = MessageMatrix(config, {(1, 1, 1, 0): 1})
    X = encode(plan, h, msgs, amplitude=1.0)
    assert X[(1, 1)] == pytest.approx(h.coefficient(1, 1, 1, 1), rel=1e-15)


def test_encode_linearity():
    config, h, plan = make(2, gamma=2, Q=4, seed=1)
    coords = plan_coordinates(plan)
    a = MessageMatrix(config, {c: (i * 7) % 3 - 1 for i, c in enumerate(coords)})
    b = MessageMatrix(config, {c: (i * 5) % 3 - 1 for i, c in enumerate(coords)})
    both = MessageMatrix(config, {c: a.symbols[c] + b.symbols[c] for c in coords})
    Xa = encode(plan, h, a, 1.0)
    Xb = encode(plan, h, b, 1.0)
    Xboth = encode(plan, h, both, 1.0)
    for key in Xa:
        assert Xboth[key] == pytest.approx(Xa[key] + Xb[key], rel=1e-10, abs=1e-12)
    # amplitude scaling is exactly linear too
    X2 = encode(plan, h, a, 2.0)
    for key in Xa:
        assert X2[key] == pytest.approx(2 * Xa[key], rel=1e-12)


def test_encode_zero_messages():
    config, h, plan = make(2, seed=0)
    zero = MessageMatrix(config, {c: 0 for c in plan_coordinates(plan)})
    X = encode(plan, h, zero, amplitude=3.0)
    assert all(v == 0.0 for v in X.values())


def test_encode_rejects_wrong_index_set():
    config, h, plan = make(2, seed=0)
    msgs = MessageMatrix(config, {(1, 1, 1, 0): 1})
    with pytest.raises(InconsistentPlanError):
        encode(plan, h, msgs, 1.0)


# ---------------------------------------------------------------- propagate


def test_propagate_noiseless_single_user():
    config, h, plan = make(1, seed=5)
    msgs = MessageMatrix(config, {(1, 1, 1, 0): 1})
    X = encode(plan, h, msgs, 1.0)
    Y = propagate(h, X)
    H = h.coefficient(1, 1, 1, 1)
    assert Y[(1, 1)] == pytest.approx(H * H, rel=1e-15)


def test_propagate_zero_in_zero_out():
    config, h, _ = make(3, seed=2)
    X = {(k, 1): 0.0 for k in range(1, 4)}
    Y = propagate(h, X)
    assert all(v == 0.0 for v in Y.values())


def test_propagate_noise_statistics():
    config = SystemConfig(K=8, N=8, seed=0)
    h = generate_channel(config)
    X = {(k, 1): 0.0 for k in range(1, 9)}
    draws = []
    for s in range(300):
        Y = propagate(h, X, noise_seed=s)
        draws.extend(Y.values())
    z = np.array(draws)
    assert z.shape[0] == 300 * 64
    assert abs(z.mean()) < 0.05
    assert abs(z.var() - 1.0) < 0.1


def test_propagate_noise_deterministic():
    config, h, plan = make(2, seed=1)
    X = {(1, 1): 0.5, (2, 1): -0.25}
    assert propagate(h, X, noise_seed=7) == propagate(h, X, noise_seed=7)
    assert propagate(h, X, noise_seed=7) != propagate(h, X, noise_seed=8)


# -------------------------------------------------------------------- power


def test_stream_mean_power_exact_identity():
    from iadof.directions import mono_eval

    config, h, plan = make(2, gamma=2, Q=4, seed=3)
    for k in (1, 2):
        got = stream_mean_power(plan, h, k, 1, amplitude=0.7)
        want = (
            0.7**2
            * symbol_variance(4)
            * sum(
                h.coefficient(k, k, n, 1) ** 2
                * sum(mono_eval(d, h) ** 2 for d in plan.streams[(k, 1, n)])
                for n in (1,)
            )
        )
        assert got == pytest.approx(want, rel=1e-12)


def test_stream_mean_power_matches_monte_carlo():
    config, h, plan = make(2, seed=4, cap=2, gamma=2)
    target = stream_mean_power(plan, h, 1, 1, amplitude=1.0)
    acc = 0.0
    n = 4000
    for s in range(n):
        X = encode(plan, h, draw_messages(plan, seed=s), 1.0)
        acc += X[(1, 1)] ** 2
    assert acc / n == pytest.approx(target, rel=0.1)


def test_amplitude_scale_binding():
    config, h, plan = make(3, seed=1, cap=1)
    rho = 100.0
    A = amplitude_scale(plan, h, rho)
    cap = rho / (config.K * config.M)
    powers = [stream_mean_power(plan, h, k, 1, A) for k in (1, 2, 3)]
    assert max(powers) == pytest.approx(cap, rel=1e-12)
    assert all(p <= cap * (1 + 1e-9) for p in powers)


def test_amplitude_scale_rejects_bad_rho():
    config, h, plan = make(2, seed=0)
    with pytest.raises(ValueError):
        amplitude_scale(plan, h, 0.0)


# ----------------------------------------------------------------- distance


def test_min_distance_single_user_is_squared_gain():
    config, h, plan = make(1, seed=5)
    H = h.coefficient(1, 1, 1, 1)
    d = min_distance(plan, h, 1, 1, Q=2, amplitude=1.0)
    assert d == H * H
    assert d == pytest.approx(1.7030326309839905, rel=1e-12)
    assert min_distance(plan, h, 1, 1, Q=2, amplitude=2.5) == pytest.approx(
        2.5 * d, rel=1e-12
    )


def test_min_distance_positive_across_seeds():
    for seed in range(30):
        config, h, plan = make(3, seed=seed, cap=1)
        for Q in (2, 4):
            d = min_distance(plan, h, 1, 1, Q=Q, amplitude=1.0)
            assert d > 1e-9


def test_min_distance_rejects_large_direction_count():
    config, h, plan = make(3, seed=0)  # untruncated: 16 + 28 directions
    with pytest.raises(DecodeBudgetError) as exc:
        min_distance(plan, h, 1, 1)
    assert exc.value.required == 44
    assert exc.value.budget == 12


def test_min_distance_budget():
    config, h, plan = make(3, seed=0, cap=1)
    with pytest.raises(DecodeBudgetError):
        min_distance(plan, h, 1, 1, Q=2, budget=10)


def test_min_distance_rejects_small_q():
    config, h, plan = make(1, seed=0)
    with pytest.raises(ValueError):
        min_distance(plan, h, 1, 1, Q=1)


# --------------------------------------------------------------- separation


def test_separation_exponent_frozen_and_deterministic():
    config, h, plan = make(3, seed=1, cap=1)
    s1 = separation_exponent(plan, h, 1, 1, (2, 4, 8, 16))
    s2 = separation_exponent(plan, h, 1, 1, (2, 4, 8, 16))
    assert s1 == s2
    assert s1 == pytest.approx(-1.9371274729698718, rel=1e-9)


def test_separation_exponent_needs_four_points():
    config, h, plan = make(3, seed=0, cap=1)
    with pytest.raises(ValueError):
        separation_exponent(plan, h, 1, 1, (2, 4, 8))


def test_separation_floor_counts_directions():
    config, h, plan = make(3, seed=0, cap=1)
    # one squared direct-gain desired direction plus two cross aggregates
    assert separation_floor(plan, 1, 1, 0.1) == -3.1


def test_separation_slope_near_floor():
    # the floor is the large-Q limit; a 4-point fit can undershoot it on
    # unlucky channels, so the per-seed check carries one unit of slack
    # and the floor itself is required only for most seeds
    hits = 0
    for seed in range(20):
        config, h, plan = make(3, seed=seed, cap=1)
        slope = separation_exponent(plan, h, 1, 1, (2, 4, 8, 16))
        floor = separation_floor(plan, 1, 1, 0.1)
        assert floor == -3.1
        assert slope >= floor - 1.0
        if slope >= floor:
            hits += 1
    assert hits >= 15


# ------------------------------------------------------------ inconsistency


def test_antenna_model_rejects_overlapping_plan():
    config = SystemConfig(K=2, seed=0)
    h = generate_channel(config)
    overlap = direction({(2, 2, 1, 1): 1, (1, 2, 1, 1): 1})
    fake = TransmitPlan(
        config=config,
        streams={
            (1, 1, 1): DirectionSet([overlap]),
            (2, 1, 1): DirectionSet([direction({(1, 1, 1, 1): 2})]),
        },
        truncation_cap=None,
    )
    with pytest.raises(InconsistentPlanError):
        antenna_model(fake, h, 1, 1)


def test_encode_rejects_mismatched_channel():
    config, h, plan = make(2, seed=0)
    other = generate_channel(SystemConfig(K=3, seed=0))
    msgs = draw_messages(plan)
    with pytest.raises(ValueError):
        encode(plan, other, msgs, 1.0)


# ------------------------------------------------------------------ end to end


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(snr_points=())
    with pytest.raises(ValueError):
        SimConfig(snr_points=(0.0,))
    with pytest.raises(ValueError):
        SimConfig(snr_points=(1e2,), trials=0)
    with pytest.raises(ValueError):
        SimConfig(snr_points=(1e2,), epsilon=0.0)
    with pytest.raises(ValueError):
        SimConfig(snr_points=(1e2,), amplitude=-1.0)


def test_sim_result_validation():
    with pytest.raises(ValueError):
        SimResult(
            q=2, cap=1, trials=10, d_min=-1.0, ser={1e2: 0.1},
            separation_slope=-1.0, separation_floor=-3.1,
            decoded_rate=0.0, amplitudes={1e2: 1.0},
        )
    with pytest.raises(ValueError):
        SimResult(
            q=2, cap=1, trials=10, d_min=0.5, ser={1e2: 1.5},
            separation_slope=-1.0, separation_floor=-3.1,
            decoded_rate=0.0, amplitudes={1e2: 1.0},
        )


def test_noiseless_run_is_error_free():
    config = SystemConfig(K=3, seed=1)
    result = run_link_sim(config, SimConfig(snr_points=SNR3, noiseless=True), cap=1)
    assert all(s == 0.0 for s in result.ser.values())
    assert result.d_min == pytest.approx(0.14100875690158676, rel=1e-12)
    assert result.separation_slope == pytest.approx(-1.9371274729698718, rel=1e-9)
    assert result.separation_floor == -3.1
    assert result.decoded_rate == pytest.approx(math.log2(3), rel=1e-12)


def test_noisy_run_frozen_values():
    config = SystemConfig(K=3, seed=1)
    result = run_link_sim(config, SimConfig(snr_points=SNR3), cap=1)
    assert result.ser[1e2] == pytest.approx(0.408, abs=1e-12)
    assert result.ser[1e4] == pytest.approx(0.011666666666666667, abs=1e-12)
    assert result.ser[1e6] == 0.0
    assert result.decoded_rate > 0


def test_run_determinism():
    config = SystemConfig(K=3, seed=2)
    sim = SimConfig(snr_points=SNR3, trials=500)
    a = run_link_sim(config, sim, cap=1)
    b = run_link_sim(config, sim, cap=1)
    assert a.to_json_dict() == b.to_json_dict()
    assert a.to_csv() == b.to_csv()


def test_ser_decays_with_snr():
    hits = 0
    for seed in range(20):
        config = SystemConfig(K=3, seed=seed)
        r = run_link_sim(config, SimConfig(snr_points=(1e2, 1e6), trials=500), cap=1)
        if r.ser[1e6] < r.ser[1e2]:
            hits += 1
    assert hits >= 18


def test_larger_amplitude_never_hurts():
    config = SystemConfig(K=3, seed=3)
    base = run_link_sim(config, SimConfig(snr_points=(1e3,), trials=800), cap=1)
    a0 = base.amplitudes[1e3]
    boosted = run_link_sim(
        config, SimConfig(snr_points=(1e3,), trials=800, amplitude=2 * a0), cap=1
    )
    # same messages and noise, twice the signal scale
    assert boosted.ser[1e3] <= base.ser[1e3]


def test_decoded_rate_zero_when_noisy_everywhere():
    config = SystemConfig(K=3, seed=1)
    r = run_link_sim(config, SimConfig(snr_points=(10.0,), trials=200), cap=1)
    assert r.ser[10.0] >= 1e-3
    assert r.decoded_rate == 0.0


def test_simulate_budget_error_bubbles_up():
    config = SystemConfig(K=3, seed=0)
    with pytest.raises(DecodeBudgetError):
        run_link_sim(config, SimConfig(snr_points=(1e2,)), cap=16)


def test_run_link_sim_rejects_bad_cap():
    with pytest.raises(ValueError):
        run_link_sim(SystemConfig(K=2), SimConfig(snr_points=(1e2,)), cap=0)


def test_decoder_matches_manual_search_single_user():
    # independent oracle: on the single-user channel the constellation is
    # c * H^2 for c in -(Q-1)..Q-1 and decoding is a 1-d nearest search
    config = SystemConfig(K=1, Q=4, seed=6)
    h = generate_channel(config)
    plan = build_transmit_directions(config)
    A = 0.8
    trials = 400
    result = simulate_plan(
        plan, h, SimConfig(snr_points=(123.0,), trials=trials, amplitude=A)
    )
    H2 = h.coefficient(1, 1, 1, 1) ** 2
    U = np.random.default_rng((config.seed, 0xA1)).integers(-3, 4, size=(trials, 1))
    Z = np.random.default_rng((config.seed, 0xB2)).standard_normal((trials, 1))
    wrong = 0
    grid = np.arange(-3, 4)
    for t in range(trials):
        y = U[t, 0] * H2 + Z[t, 0] / A
        guess = grid[int(np.argmin(np.abs(y - grid * H2)))]
        if guess != U[t, 0]:
            wrong += 1
    assert result.ser[123.0] == pytest.approx(wrong / trials, abs=1e-15)
