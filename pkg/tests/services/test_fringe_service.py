import math

import pytest

from app.services.fringe_service import polarization_visibility, predicted_fringe
from app.utils.errors import InvalidArgumentError


def test_matched_two_pulse_fringe_has_half_visibility() -> None:
    fringe = predicted_fringe(math.pi / 4, math.pi / 4, 1.0, 2, 1)

    assert fringe.mean == pytest.approx(1.0)
    assert fringe.amplitude == pytest.approx(0.5)
    assert fringe.visibility == pytest.approx(0.5)


def test_theta1_sweep_at_locked_phase_gives_one_third() -> None:
    assert polarization_visibility(math.pi / 4, 1.0, 2, 1) == pytest.approx(1 / 3)
    fringe = predicted_fringe(math.pi / 4, math.pi / 4, 1.0, 2, 1)
    assert fringe.polarization_visibility == pytest.approx(1 / 3)


def test_zero_eta_flattens_the_fringe() -> None:
    fringe = predicted_fringe(math.pi / 4, math.pi / 4, 0.0, 2, 1)

    assert fringe.amplitude == 0.0
    assert fringe.visibility == 0.0
    assert fringe.polarization_visibility == 0.0


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_fringe_visibility_follows_pulse_count(n: int) -> None:
    fringe = predicted_fringe(math.pi / 4, math.pi / 4, 1.0, n, 1)

    assert fringe.visibility == pytest.approx((n - 1) / n)


def test_orthogonal_analyzers_have_no_mean_level() -> None:
    fringe = predicted_fringe(0.0, 0.0, 1.0, 2, 1)

    assert fringe.mean == 0.0
    assert fringe.visibility == 0.0


@pytest.mark.parametrize(
    "eta, n, delta_m",
    [(-0.1, 2, 1), (1.5, 2, 1), (0.5, 2, 0), (0.5, 2, 3)],
)
def test_predicted_fringe_rejects_bad_arguments(
    eta: float, n: int, delta_m: int
) -> None:
    with pytest.raises(InvalidArgumentError):
        predicted_fringe(math.pi / 4, math.pi / 4, eta, n, delta_m)


def test_predicted_fringe_rejects_non_finite_angles() -> None:
    with pytest.raises(InvalidArgumentError):
        predicted_fringe(math.nan, math.pi / 4, 1.0, 2, 1)
