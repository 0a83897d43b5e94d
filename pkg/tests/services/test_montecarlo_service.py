import math

import numpy as np
import pytest
from numpy.random import PCG64, Generator
from scipy import stats

from app.config import PathKind, YKind
from app.schemas.amplitude import AmplitudeTerm
from app.schemas.curves import Curve
from app.schemas.events import CoincidenceSummary, EventStream
from app.schemas.setup import ExperimentSetup, ModelParams
from app.services.fit_service import fit_fringe
from app.services.model_service import build_amplitude_terms
from app.services.montecarlo_service import (
    PairSampler,
    analytic_singles_rate,
    coincidence_probability,
    count_coincidences,
    expected_coincidences,
    generate_events,
    match_window,
    sample_pair_times,
    singles_rates,
    sort_events,
)
from app.utils.errors import InvalidArgumentError, SamplingError, UnsortedStreamError
from app.utils.scenario import parse_config
from app.utils.serialization import write_events_csv


def make_setup(*overrides: str) -> ExperimentSetup:
    return parse_config("", overrides)


def make_stream(*events: tuple[int, int, float]) -> EventStream:
    frames, detectors, stamps = zip(*events) if events else ((), (), ())
    return EventStream(
        frame=np.array(frames, dtype=np.int64),
        detector=np.array(detectors, dtype=np.int8),
        timestamp=np.array(stamps, dtype=np.float64),
    )


def run(
    setup: ExperimentSetup, n_frames: int, seed: int
) -> tuple[EventStream, CoincidenceSummary]:
    stream = generate_events(setup, n_frames, seed)
    summary = count_coincidences(
        stream, setup.detectors.coincidence_window, n_frames=n_frames
    )
    return stream, summary


def test_single_term_samples_follow_the_term_envelope() -> None:
    model = ModelParams(sigma_plus=59.45, sigma_minus=90.7)
    term = AmplitudeTerm(
        weight=complex(0.5),
        mu_plus=120.0,
        mu_12=-40.0,
        phase=0.7,
        pulse_index=0,
        path=PathKind.TT,
    )
    sampler = PairSampler([term], model)

    t_plus, t_12 = sampler.sample(Generator(PCG64(3)), 10_000)

    assert stats.kstest(t_plus, "norm", args=(120.0, 59.45)).pvalue > 0.01
    assert stats.kstest(t_12, "norm", args=(-40.0, 90.7)).pvalue > 0.01
    assert sampler.bound == 1
    assert sampler.acceptance_rate == pytest.approx(1.0)


@pytest.mark.parametrize("path_nm, expected", [(0.0, 1 / 8), (200.0, 3 / 8)])
def test_acceptance_rate_is_rate_over_bound(path_nm: float, expected: float) -> None:
    setup = make_setup(f"pump.extra_phase_path={path_nm}nm")
    sampler = PairSampler(build_amplitude_terms(setup), setup.model)

    sampler.sample(Generator(PCG64(9)), 5_000)

    # 채택률은 R / (M·Σ|w|²) 이고 여기서 Σ|w|² = 1, M = 4 입니다.
    assert sampler.bound == 4
    assert sampler.acceptance_rate == pytest.approx(expected, abs=0.01)


def test_sample_pair_times_maps_to_detection_times() -> None:
    model = ModelParams(sigma_plus=1e-3, sigma_minus=1e-3)
    term = AmplitudeTerm(
        weight=complex(1.0),
        mu_plus=100.0,
        mu_12=50.0,
        phase=0.0,
        pulse_index=0,
        path=PathKind.RR,
    )

    t1, t2 = sample_pair_times([term], model, Generator(PCG64(1)), tau=30.0)

    assert t1 == pytest.approx(100.0 + 30.0 + 10.0, abs=0.05)
    assert t2 == pytest.approx(100.0 + 30.0 - 10.0, abs=0.05)


def test_sampler_rejects_zero_weight() -> None:
    model = ModelParams(sigma_plus=1.0, sigma_minus=1.0)
    term = AmplitudeTerm(
        weight=complex(0.0),
        mu_plus=0.0,
        mu_12=0.0,
        phase=0.0,
        pulse_index=0,
        path=PathKind.TT,
    )

    with pytest.raises(InvalidArgumentError):
        sample_pair_times([term], model, Generator(PCG64(1)))


def test_sampler_gives_up_on_a_vanishing_density() -> None:
    model = ModelParams(sigma_plus=50.0, sigma_minus=50.0)
    terms = [
        AmplitudeTerm(
            weight=complex(sign * 0.5),
            mu_plus=0.0,
            mu_12=0.0,
            phase=0.0,
            pulse_index=0,
            path=path,
        )
        for sign, path in ((1, PathKind.TT), (-1, PathKind.RR))
    ]
    sampler = PairSampler(terms, model)

    with pytest.raises(SamplingError):
        sampler.sample(Generator(PCG64(5)), 1)

    t_plus, t_12 = sampler.propose(Generator(PCG64(5)), 100)
    assert t_plus.shape == t_12.shape == (100,)


def test_cancelling_setup_produces_only_lone_clicks() -> None:
    n_frames = 20_000
    setup = make_setup(
        "pump.n_pulses=1",
        "interferometer.tau=0fs",
        "interferometer.tau1=0fs",
        "detectors.pair_probability=0.05",
    )

    _, summary = run(setup, n_frames, seed=11)

    assert coincidence_probability(setup) == pytest.approx(0.0, abs=1e-12)
    assert summary.coincidences == 0
    expected = analytic_singles_rate(setup)
    sigma = math.sqrt(expected * (1 - expected) / n_frames)
    for rate in singles_rates(summary):
        assert abs(rate - expected) <= 4 * sigma


def test_coincidence_probability_tracks_the_fringe(
    default_setup: ExperimentSetup,
) -> None:
    constructive = make_setup("pump.extra_phase_path=200nm")

    assert coincidence_probability(default_setup) == pytest.approx(1 / 16, rel=1e-5)
    assert coincidence_probability(constructive) == pytest.approx(3 / 16, rel=1e-5)


def test_pair_count_follows_pair_probability() -> None:
    n_frames = 20_000
    setup = make_setup("detectors.pair_probability=0.05")

    stream = generate_events(setup, n_frames, seed=42)

    # 검출이 있는 프레임 = 쌍이 생기고 두 검출기 모두 놓치지 않은 프레임
    p_visible = 0.05 * (1 - coincidence_probability(setup))
    expected = n_frames * p_visible
    sigma = math.sqrt(expected * (1 - p_visible))
    assert abs(np.unique(stream.frame).size - expected) <= 4 * sigma


def test_zero_pair_probability_gives_empty_stream() -> None:
    stream = generate_events(make_setup("detectors.pair_probability=0"), 1000, seed=1)

    assert len(stream) == 0


def test_timestamps_stay_inside_their_frame() -> None:
    setup = make_setup("detectors.jitter=0ps", "detectors.pair_probability=0.05")
    model, pump, delays = setup.model, setup.pump, setup.delays
    spread = 6 * (model.sigma_plus + model.sigma_minus)

    stream = generate_events(setup, 20_000, seed=3)

    offset = stream.timestamp - stream.frame * pump.rep_period * 1e3
    # D2 는 첫 펄스보다 최대 τ 만큼 앞설 수 있습니다.
    low = (-delays.tau - spread) * 1e-3
    last = (pump.n_pulses - 1) * pump.inter_pulse_delay
    high = (last + max(delays.tau, delays.tau1) + spread) * 1e-3
    assert len(stream) > 0
    assert offset.min() >= low
    assert offset.max() <= high


def test_generation_is_deterministic_and_independent_of_workers() -> None:
    setup = make_setup("detectors.pair_probability=0.05")

    first = generate_events(setup, 10_000, seed=2024, workers=1)
    second = generate_events(setup, 10_000, seed=2024, workers=4)
    other = generate_events(setup, 10_000, seed=2025, workers=1)

    assert write_events_csv(first) == write_events_csv(second)
    assert write_events_csv(first) != write_events_csv(other)
    assert first.is_sorted()


@pytest.mark.parametrize("n_frames, seed", [(0, 1), (10, -1)])
def test_generate_events_rejects_bad_arguments(n_frames: int, seed: int) -> None:
    with pytest.raises(InvalidArgumentError):
        generate_events(make_setup(), n_frames, seed)


def test_clicks_in_adjacent_frames_never_coincide() -> None:
    stream = make_stream((0, 0, 0.0), (1, 1, 11_000.0))

    summary = count_coincidences(stream, window=3.0)

    assert summary.coincidences == 0
    assert (summary.singles_d1, summary.singles_d2) == (1, 1)


def test_close_clicks_on_different_detectors_coincide() -> None:
    stream = make_stream((0, 0, 100.0), (0, 1, 101.0))

    summary = count_coincidences(stream, window=3.0, histogram_bins=6)

    assert summary.coincidences == 1
    assert sum(count for _, count in summary.dt_histogram) == 1
    assert summary.dt_histogram[3][1] == 1


def test_each_click_is_used_at_most_once() -> None:
    stream = make_stream((0, 0, 0.0), (0, 0, 10.0), (0, 1, 20.0), (0, 1, 30.0))

    summary = count_coincidences(stream, window=3.0)

    assert summary.coincidences == 2
    # 먼저 온 D1 클릭이 먼저 온 D2 클릭과 짝지어지므로 두 Δt 모두 20 ps 입니다.
    dts = [dt for dt, count in summary.dt_histogram if count]
    assert len(dts) == 1
    assert abs(dts[0] - 20.0) <= 50.0


def test_coincidence_count_grows_with_window() -> None:
    stream = make_stream(
        (0, 0, 0.0), (0, 1, 1500.0), (1, 1, 11_000.0), (1, 0, 13_500.0)
    )

    counts = [
        count_coincidences(stream, window=w).coincidences for w in (1.0, 2.0, 3.0)
    ]

    assert counts == sorted(counts)
    assert counts == [0, 1, 2]


def test_lone_clicks_are_dropped_once_outside_the_window() -> None:
    n_clicks = 10_000
    stream = make_stream(
        *[(i, 0, i * 1000.0) for i in range(n_clicks)],
        (n_clicks - 1, 1, (n_clicks - 1) * 1000.0 + 500.0),
    )

    match = match_window(stream, window_ps=3000.0)

    assert match.peak_pending <= 4
    # 시간창 안에 남은 가장 이른 D1 클릭과 짝지어집니다.
    assert match.dts == [pytest.approx(2500.0)]


def test_unsorted_stream_is_rejected() -> None:
    stream = make_stream((0, 1, 5.0), (0, 0, 1.0))

    with pytest.raises(UnsortedStreamError):
        count_coincidences(stream, window=3.0)
    assert count_coincidences(sort_events(stream), window=3.0).coincidences == 1


def test_count_coincidences_rejects_bad_window() -> None:
    with pytest.raises(InvalidArgumentError):
        count_coincidences(make_stream(), window=0.0)


def test_coincidence_ratio_matches_fringe_extremes() -> None:
    n_frames = 200_000
    destructive = make_setup("detectors.pair_probability=0.05")
    constructive = make_setup(
        "detectors.pair_probability=0.05", "pump.extra_phase_path=200nm"
    )

    _, low = run(destructive, n_frames, 1)
    _, high = run(constructive, n_frames, 2)

    for setup, summary in ((destructive, low), (constructive, high)):
        expected = expected_coincidences(setup, n_frames)
        assert abs(summary.coincidences - expected) <= 4 * math.sqrt(expected)
    ratio = high.coincidences / low.coincidences
    sigma = ratio * math.sqrt(1 / high.coincidences + 1 / low.coincidences)
    assert abs(ratio - 3.0) <= 4 * sigma


@pytest.mark.parametrize("theta1_deg", [0, 30, 45, 90, 135])
def test_singles_rates_do_not_depend_on_theta1(theta1_deg: int) -> None:
    n_frames = 100_000
    setup = make_setup(
        "detectors.pair_probability=0.05", f"analyzers.theta1={theta1_deg}deg"
    )

    _, summary = run(setup, n_frames, seed=theta1_deg + 1)

    expected = analytic_singles_rate(setup)
    sigma = math.sqrt(expected * (1 - expected) / n_frames)
    for rate in singles_rates(summary):
        assert abs(rate - expected) <= 4 * sigma


def test_detector_efficiency_thins_singles() -> None:
    n_frames = 100_000
    full = make_setup("detectors.pair_probability=0.05")
    half = make_setup("detectors.pair_probability=0.05", "detectors.efficiency=0.5")

    _, full_summary = run(full, n_frames, seed=8)
    _, half_summary = run(half, n_frames, seed=8)

    assert analytic_singles_rate(half) == pytest.approx(analytic_singles_rate(full) / 2)
    for setup, summary in ((full, full_summary), (half, half_summary)):
        expected = analytic_singles_rate(setup)
        sigma = math.sqrt(expected * (1 - expected) / n_frames)
        for rate in singles_rates(summary):
            assert abs(rate - expected) <= 4 * sigma


def test_singles_rates_need_frames() -> None:
    summary = count_coincidences(make_stream(), window=3.0, n_frames=0)

    with pytest.raises(InvalidArgumentError):
        singles_rates(summary)


def test_monte_carlo_fringe_matches_analytic_fringe() -> None:
    n_frames = 50_000
    paths = np.linspace(0.0, 1600.0, 41)
    observed, expected = [], []
    for index, path in enumerate(paths):
        setup = make_setup(
            "detectors.pair_probability=0.05", f"pump.extra_phase_path={path}nm"
        )
        _, summary = run(setup, n_frames, seed=100 + index)
        observed.append(summary.coincidences)
        expected.append(expected_coincidences(setup, n_frames))

    observed_arr, expected_arr = np.array(observed), np.array(expected)
    chi2 = float(np.sum((observed_arr - expected_arr) ** 2 / expected_arr))
    assert chi2 / paths.size < 2.0

    counts = Curve(
        parameter_name="pump_phase_path",
        x_unit="nm",
        y_kind=YKind.COUNTS,
        points=[(float(x), float(y)) for x, y in zip(paths, observed)],
    )
    sigma = np.sqrt(observed_arr).tolist()
    fit = fit_fringe(counts, expected_period=400.0, sigma=sigma)
    assert fit.period == pytest.approx(400.0, abs=4.0)
