import math

import pytest

from app.config import ScanParameter, Unit
from app.utils.errors import ParseError, SetupValidationError
from app.utils.scenario import (
    DEFAULT_CONFIG,
    parse_config,
    parse_quantity,
    parse_scan_value,
    render_config,
)


def test_empty_source_gives_default_setup() -> None:
    setup = parse_config("")

    assert setup.pump.n_pulses == 2
    assert setup.pump.wavelength == 400.0
    assert setup.pump.rep_period == 11.0
    assert setup.pump.inter_pulse_delay == pytest.approx(657.1, abs=0.01)
    assert setup.delays.tau == pytest.approx(657.1, abs=0.01)
    assert setup.delays.tau1 == pytest.approx(1314.2, abs=0.01)
    assert setup.analyzers.theta1 == pytest.approx(math.pi / 4)
    assert setup.detectors.jitter == 300.0
    assert setup.detectors.coincidence_window == 3.0
    assert setup.crystal.thickness == 100_000.0


def test_default_config_text_parses_to_the_same_setup() -> None:
    assert parse_config(DEFAULT_CONFIG) == parse_config("")


def test_model_widths_are_derived_unless_given() -> None:
    derived = parse_config("")
    explicit = parse_config("[model]\nsigma_plus = 0.05 ps\nsigma_minus = 80 fs\n")

    assert derived.model.sigma_plus == pytest.approx(59.45, abs=0.01)
    assert explicit.model.sigma_plus == pytest.approx(50.0)
    assert explicit.model.sigma_minus == 80.0


@pytest.mark.parametrize(
    "override, section, field, expected",
    [
        ("detectors.jitter=0.3ns", "detectors", "jitter", 300.0),
        ("detectors.coincidence_window=3000ps", "detectors", "coincidence_window", 3.0),
        ("pump.rep_period=11000000fs", "pump", "rep_period", 11.0),
        ("model.sigma_plus=0.05ps", "model", "sigma_plus", 50.0),
    ],
)
def test_time_values_are_converted_to_the_field_unit(
    override: str, section: str, field: str, expected: float
) -> None:
    setup = parse_config("", [override])

    assert getattr(getattr(setup, section), field) == pytest.approx(expected)


def test_comments_and_blank_lines_are_ignored() -> None:
    source = "# 장치 설정\n\n[pump]   # 펌프\nn_pulses = 3  # 세 펄스\n"

    assert parse_config(source).pump.n_pulses == 3


def test_wrong_unit_reports_line_and_column() -> None:
    source = "[interferometer]\ntau = 197 kg\n"

    with pytest.raises(ParseError) as exc_info:
        parse_config(source)

    err = exc_info.value
    assert (err.line, err.column) == (2, 11)
    assert "kg" in err.message
    assert err.snippet == "tau = 197 kg"
    assert "^" in err.render()


@pytest.mark.parametrize(
    "source, line",
    [
        ("[laser]\npower = 1\n", 1),
        ("[pump]\ncolor = 3\n", 2),
        ("[pump]\nn_pulses = 2\nn_pulses = 3\n", 3),
        ("n_pulses = 2\n", 1),
        ("[pump]\nn_pulses\n", 2),
        ("[pump]\nn_pulses = 2.5\n", 2),
        ("[pump]\nwavelength = 400 fs\n", 2),
        ("[pump]\nwavelength = four hundred nm\n", 2),
        ("[detectors]\nefficiency = 0.5 ns\n", 2),
        ("[pump]\nwavelength =\n", 2),
    ],
)
def test_lexical_errors_carry_their_line(source: str, line: int) -> None:
    with pytest.raises(ParseError) as exc_info:
        parse_config(source)

    assert exc_info.value.line == line


def test_invariant_violations_are_all_reported() -> None:
    source = "[interferometer]\ntau = -5 fs\n\n[detectors]\nefficiency = 2\n"

    with pytest.raises(SetupValidationError) as exc_info:
        parse_config(source)

    errors = exc_info.value.errors
    assert len(errors) == 2
    assert any(e.startswith("interferometer.tau") for e in errors)
    assert any(e.startswith("detectors.efficiency") for e in errors)


def test_pulse_train_must_fit_inside_the_repetition_period() -> None:
    with pytest.raises(SetupValidationError, match="rep_period"):
        parse_config("[pump]\nrep_period = 1 ps\n")


def test_filter_bandwidth_must_be_below_center() -> None:
    with pytest.raises(SetupValidationError, match="fwhm"):
        parse_config("[filter]\nfwhm = 900 nm\n")


def test_overrides_replace_values_before_validation() -> None:
    setup = parse_config(
        "[pump]\nn_pulses = 3\n",
        ["pump.n_pulses=1", "interferometer.tau=657fs", "analyzers.theta1=0deg"],
    )

    assert setup.pump.n_pulses == 1
    assert setup.delays.tau == 657.0
    assert setup.analyzers.theta1 == 0.0


@pytest.mark.parametrize("override", ["pump", "pump.n_pulses", "laser.power=1"])
def test_malformed_overrides_are_rejected(override: str) -> None:
    with pytest.raises(ParseError):
        parse_config("", [override])


@pytest.mark.parametrize(
    "overrides",
    [
        (),
        ("pump.n_pulses=5", "pump.extra_phase_path=123.456nm"),
        ("analyzers.theta2=17.3deg", "model.normalization=2.5"),
    ],
)
def test_rendered_config_parses_back_to_the_same_setup(
    overrides: tuple[str, ...],
) -> None:
    setup = parse_config("", overrides)

    assert parse_config(render_config(setup)) == setup


def test_parse_quantity() -> None:
    assert parse_quantity("197 um").value == 197.0
    assert parse_quantity("197um").unit == Unit.UM
    assert parse_quantity("-1.5e2 fs").value == -150.0
    assert parse_quantity("0.25").unit == Unit.DIMENSIONLESS


@pytest.mark.parametrize("token", ["", "fs", "1.2.3 fs", "5 parsecs"])
def test_parse_quantity_rejects_malformed_tokens(token: str) -> None:
    with pytest.raises(ParseError):
        parse_quantity(token)


def test_overflowing_number_in_config_is_a_parse_error() -> None:
    with pytest.raises(ParseError) as exc_info:
        parse_config("[interferometer]\ntau = 1e999 fs\n")

    assert (exc_info.value.line, exc_info.value.column) == (2, 7)
    assert "out of range" in exc_info.value.message


@pytest.mark.parametrize(
    "override",
    [
        "interferometer.tau=1e999fs",
        "detectors.efficiency=-1e400",
        "pump.rep_period=1e308ns",
    ],
)
def test_overflowing_override_is_a_parse_error(override: str) -> None:
    with pytest.raises(ParseError, match="out of range"):
        parse_config("", [override])


def test_parse_quantity_rejects_infinite_values() -> None:
    with pytest.raises(ParseError, match="out of range"):
        parse_quantity("1e999 fs")


def test_parse_scan_value_converts_to_internal_units() -> None:
    def value(parameter: ScanParameter, token: str) -> float:
        return parse_scan_value(parameter, token)

    assert value(ScanParameter.INTER_PULSE_DELAY, "533fs") == 533.0
    assert value(ScanParameter.TAU, "197um") == pytest.approx(657.1, abs=0.01)
    assert value(ScanParameter.PUMP_PHASE_PATH, "1.6um") == pytest.approx(1600.0)
    assert value(ScanParameter.THETA1, "90deg") == pytest.approx(math.pi / 2)


@pytest.mark.parametrize(
    "parameter, token",
    [(ScanParameter.TAU, "533"), (ScanParameter.THETA1, "90 nm")],
)
def test_parse_scan_value_requires_a_matching_unit(
    parameter: ScanParameter, token: str
) -> None:
    with pytest.raises(ParseError):
        parse_scan_value(parameter, token)
