"""실험 장치 설정 파일(INI 형식) 파서와 렌더러입니다.

문법:
    [section]
    key = <real><공백?><unit>   # 주석

알 수 없는 섹션/키는 오류이며, 생략된 키는 DEFAULT_CONFIG 값으로 채워집니다.
model 섹션의 sigma_plus, sigma_minus를 생략하면 펌프 펄스 폭과 필터 대역폭에서
유도합니다.
"""

import math
import re
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

from pydantic import BaseModel, ValidationError

from app.config import ScanParameter, Unit, logger
from app.schemas.quantity import Quantity
from app.schemas.setup import (
    AnalyzerSpec,
    CrystalSpec,
    DelaySpec,
    DetectorSpec,
    ExperimentSetup,
    FilterSpec,
    ModelParams,
    PumpSpec,
)
from app.services.model_service import default_model_params
from app.utils.errors import ParseError, SetupValidationError
from app.utils.units import (
    ANGLE_UNITS,
    LENGTH_UNITS,
    TIME_UNITS,
    angle_to_rad,
    delay_to_fs,
    length_to_nm,
    time_to_fs,
)

DEFAULT_CONFIG = """\
[pump]
wavelength = 400 nm
pulse_fwhm = 140 fs
rep_period = 11 ns
n_pulses = 2
inter_pulse_delay = 197 um
extra_phase_path = 0 nm

[crystal]
type = type-II
thickness = 100 um

[filter]
center = 800 nm
fwhm = 10 nm

[interferometer]
tau = 197 um
tau1 = 394 um

[analyzers]
theta1 = 45 deg
theta2 = 45 deg

[detectors]
jitter = 300 ps
coincidence_window = 3 ns
pair_probability = 0.001
efficiency = 1.0
"""

_QUANTITY_RE = re.compile(
    r"^(?P<number>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)\s*(?P<unit>\S*)$"
)
_SECTION_RE = re.compile(r"^\[\s*(?P<name>[A-Za-z_][\w-]*)\s*\]$")
_KEY_RE = re.compile(r"^[A-Za-z_]\w*$")


@dataclass(frozen=True)
class _Field:
    """설정 키 하나의 값 종류와 대상 위치입니다."""

    kind: str
    target: str
    unit: Unit = Unit.DIMENSIONLESS


# (섹션, 키) → 필드 정의. kind: time, length, delay, angle, count, real, text, micrometers
SCHEMA: dict[str, dict[str, _Field]] = {
    "pump": {
        "wavelength": _Field("length", "wavelength", Unit.NM),
        "pulse_fwhm": _Field("time", "pulse_fwhm", Unit.FS),
        "rep_period": _Field("time", "rep_period", Unit.NS),
        "n_pulses": _Field("count", "n_pulses"),
        "inter_pulse_delay": _Field("delay", "inter_pulse_delay", Unit.FS),
        "extra_phase_path": _Field("length", "extra_phase_path", Unit.NM),
    },
    "crystal": {
        "type": _Field("text", "type"),
        "thickness": _Field("length", "thickness", Unit.NM),
        "thickness_um": _Field("micrometers", "thickness", Unit.NM),
    },
    "filter": {
        "center": _Field("length", "center", Unit.NM),
        "fwhm": _Field("length", "fwhm", Unit.NM),
    },
    "interferometer": {
        "tau": _Field("delay", "tau", Unit.FS),
        "tau1": _Field("delay", "tau1", Unit.FS),
    },
    "analyzers": {
        "theta1": _Field("angle", "theta1", Unit.RAD),
        "theta2": _Field("angle", "theta2", Unit.RAD),
    },
    "detectors": {
        "jitter": _Field("time", "jitter", Unit.PS),
        "coincidence_window": _Field("time", "coincidence_window", Unit.NS),
        "pair_probability": _Field("real", "pair_probability"),
        "efficiency": _Field("real", "efficiency"),
    },
    "model": {
        "sigma_plus": _Field("time", "sigma_plus", Unit.FS),
        "sigma_minus": _Field("time", "sigma_minus", Unit.FS),
        "normalization": _Field("real", "normalization"),
    },
}

_SECTION_MODELS: dict[str, type[BaseModel]] = {
    "pump": PumpSpec,
    "crystal": CrystalSpec,
    "filter": FilterSpec,
    "interferometer": DelaySpec,
    "analyzers": AnalyzerSpec,
    "detectors": DetectorSpec,
}


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int
    source_line: str

    def error(self, message: str, offset: int = 0) -> ParseError:
        return ParseError(message, self.line, self.column + offset, self.source_line)


def parse_quantity(token: str) -> Quantity:
    """`<real><공백?><unit>` 토큰을 Quantity로 파싱합니다.

    단위가 없으면 dimensionless 입니다.

    Raises:
        ParseError: 실수 형식이 잘못되었거나 알 수 없는 단위인 경우
    """
    return _parse_quantity(_Token(token.strip(), 1, 1, token))


def _parse_number(token: _Token, text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise token.error(f"number out of range {text!r}; expected a finite real")
    return value


def _parse_quantity(token: _Token) -> Quantity:
    match = _QUANTITY_RE.match(token.text)
    if match is None:
        raise token.error(f"malformed quantity {token.text!r}; expected <real> <unit>")
    value = _parse_number(token, match.group("number"))
    unit_text = match.group("unit")
    if not unit_text:
        return Quantity(value=value, unit=Unit.DIMENSIONLESS)
    try:
        unit = Unit(unit_text)
    except ValueError:
        allowed = ", ".join(u.value for u in Unit if u != Unit.DIMENSIONLESS)
        raise token.error(
            f"unknown unit {unit_text!r}; expected one of: {allowed}",
            offset=match.start("unit"),
        ) from None
    return Quantity(value=value, unit=unit)


def _convert_time(quantity: Quantity, target: Unit) -> float:
    if quantity.unit == target:
        return quantity.value
    return time_to_fs(quantity.value, quantity.unit) / time_to_fs(1.0, target)


def _require_unit(token: _Token, quantity: Quantity, allowed: frozenset[Unit], what: str) -> None:
    if quantity.unit not in allowed:
        names = ", ".join(sorted(u.value for u in allowed))
        raise token.error(
            f"expected a {what} ({names}), got unit {quantity.unit.value!r}"
        )


def _convert(token: _Token, spec: _Field) -> Any:
    """토큰을 필드 종류에 맞는 내부 단위 값으로 바꿉니다."""
    if spec.kind == "text":
        return token.text
    if spec.kind == "count":
        if not re.fullmatch(r"[+-]?\d+", token.text):
            raise token.error(f"expected an integer, got {token.text!r}")
        return int(token.text)

    value = _quantity_value(token, _parse_quantity(token), spec)
    if not math.isfinite(value):
        raise token.error(f"number out of range {token.text!r} after unit conversion")
    return value


def _quantity_value(token: _Token, quantity: Quantity, spec: _Field) -> float:
    if spec.kind in ("real", "micrometers"):
        if quantity.unit != Unit.DIMENSIONLESS:
            raise token.error(f"expected a bare number, got unit {quantity.unit.value!r}")
        return quantity.value * 1e3 if spec.kind == "micrometers" else quantity.value

    if spec.kind == "time":
        _require_unit(token, quantity, TIME_UNITS, "time")
        return _convert_time(quantity, spec.unit)
    if spec.kind == "length":
        _require_unit(token, quantity, LENGTH_UNITS, "length")
        return length_to_nm(quantity.value, quantity.unit)
    if spec.kind == "delay":
        _require_unit(token, quantity, TIME_UNITS | LENGTH_UNITS, "time or length")
        if quantity.unit == Unit.FS:
            return quantity.value
        return delay_to_fs(quantity.value, quantity.unit)
    _require_unit(token, quantity, ANGLE_UNITS, "angle")
    return angle_to_rad(quantity.value, quantity.unit)


def _strip_comment(line: str) -> str:
    index = line.find("#")
    return line if index < 0 else line[:index]


def _assign(
    values: dict[str, dict[str, Any]],
    seen: set[tuple[str, str]] | None,
    section: str,
    key_token: _Token,
    value_token: _Token,
) -> None:
    fields = SCHEMA[section]
    if key_token.text not in fields:
        allowed = ", ".join(fields)
        raise key_token.error(
            f"unknown key {key_token.text!r} in [{section}]; expected one of: {allowed}"
        )
    if seen is not None:
        if (section, key_token.text) in seen:
            raise key_token.error(f"duplicate key {key_token.text!r} in [{section}]")
        seen.add((section, key_token.text))
    if not value_token.text:
        raise value_token.error(f"missing value for {section}.{key_token.text}")
    spec = fields[key_token.text]
    values.setdefault(section, {})[spec.target] = _convert(value_token, spec)


def _split_assignment(raw: str, line_no: int, start: int) -> tuple[_Token, _Token]:
    """`key = value` 한 줄을 키/값 토큰으로 나눕니다. start는 raw 안의 시작 위치입니다."""
    body = _strip_comment(raw)
    eq = body.find("=", start)
    if eq < 0:
        column = len(body) - len(body.lstrip()) + 1
        raise ParseError("expected 'key = value'", line_no, column, raw)
    key_text = body[start:eq].strip()
    key_col = body.index(key_text, start) + 1 if key_text else start + 1
    if not _KEY_RE.match(key_text):
        raise ParseError(f"invalid key {key_text!r}", line_no, key_col, raw)
    value_text = body[eq + 1 :].strip()
    value_col = (
        body.index(value_text, eq + 1) + 1 if value_text else len(body.rstrip()) + 1
    )
    return (
        _Token(key_text, line_no, key_col, raw),
        _Token(value_text, line_no, value_col, raw),
    )


def _parse_lines(source: str, values: dict[str, dict[str, Any]]) -> None:
    section: str | None = None
    seen: set[tuple[str, str]] = set()
    for line_no, raw in enumerate(source.splitlines(), start=1):
        stripped = _strip_comment(raw).strip()
        if not stripped:
            continue
        column = len(raw) - len(raw.lstrip()) + 1
        if stripped.startswith("["):
            match = _SECTION_RE.match(stripped)
            if match is None:
                raise ParseError("malformed section header", line_no, column, raw)
            name = match.group("name")
            if name not in SCHEMA:
                raise ParseError(
                    f"unknown section [{name}]; expected one of: "
                    + ", ".join(f"[{s}]" for s in SCHEMA),
                    line_no,
                    column + 1,
                    raw,
                )
            section = name
            continue
        if section is None:
            raise ParseError("key outside of any [section]", line_no, column, raw)
        key_token, value_token = _split_assignment(raw, line_no, column - 1)
        _assign(values, seen, section, key_token, value_token)


def _apply_override(text: str, values: dict[str, dict[str, Any]]) -> None:
    """`section.key=value` 형식의 덮어쓰기 하나를 적용합니다."""
    dot = text.find(".")
    eq = text.find("=")
    if dot < 0 or eq < 0 or dot > eq:
        raise ParseError("override must look like section.key=value", 1, 1, text)
    section = text[:dot].strip()
    if section not in SCHEMA:
        raise ParseError(f"unknown section {section!r} in override", 1, 1, text)
    key_token, value_token = _split_assignment(text, 1, dot + 1)
    _assign(values, None, section, key_token, value_token)


def _collect_errors(section: str, exc: ValidationError) -> list[str]:
    messages = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"])
        prefix = f"{section}.{location}" if location else section
        messages.append(f"{prefix}: {error['msg']}")
    return messages


def _build(values: dict[str, dict[str, Any]]) -> ExperimentSetup:
    errors: list[str] = []
    parts: dict[str, Any] = {}
    for section, model in _SECTION_MODELS.items():
        try:
            parts[section] = model.model_validate(values.get(section, {}))
        except ValidationError as exc:
            errors.extend(_collect_errors(section, exc))

    model_values = dict(values.get("model", {}))
    if "pump" in parts and "filter" in parts:
        defaults = default_model_params(parts["pump"], parts["filter"])
        model_values.setdefault("sigma_plus", defaults.sigma_plus)
        model_values.setdefault("sigma_minus", defaults.sigma_minus)
    try:
        parts["model"] = ModelParams.model_validate(model_values)
    except ValidationError as exc:
        errors.extend(_collect_errors("model", exc))

    if errors:
        raise SetupValidationError(errors)
    return ExperimentSetup(
        pump=parts["pump"],
        crystal=parts["crystal"],
        filter=parts["filter"],
        delays=parts["interferometer"],
        analyzers=parts["analyzers"],
        detectors=parts["detectors"],
        model=parts["model"],
    )


def parse_config(source: str, overrides: Iterable[str] = ()) -> ExperimentSetup:
    """설정 텍스트를 ExperimentSetup으로 파싱합니다.

    Args:
        source (str): INI 형식 설정 텍스트 (빈 문자열이면 기본 구성)
        overrides (Iterable[str]): 검증 전에 적용할 `section.key=value` 목록

    Returns:
        ExperimentSetup: 검증된 실험 구성

    Raises:
        ParseError: 어휘/문법 오류 (줄/열 포함)
        SetupValidationError: 위반된 모든 불변식 목록
    """
    values: dict[str, dict[str, Any]] = {}
    _parse_lines(DEFAULT_CONFIG, values)
    _parse_lines(source, values)
    for override in overrides:
        _apply_override(override, values)
    setup = _build(values)
    logger.debug("설정 파싱 완료: %s", setup.model_dump())
    return setup


def _fmt(value: float) -> str:
    return format(value, ".17g")


def render_config(setup: ExperimentSetup) -> str:
    """구성을 내부 단위(fs, nm, rad, 17자리)의 정규 설정 텍스트로 렌더링합니다.

    parse_config(render_config(s)) == s 가 성립합니다.
    """
    sections: dict[str, BaseModel] = {
        "pump": setup.pump,
        "crystal": setup.crystal,
        "filter": setup.filter,
        "interferometer": setup.delays,
        "analyzers": setup.analyzers,
        "detectors": setup.detectors,
        "model": setup.model,
    }
    lines: list[str] = []
    for section, part in sections.items():
        if lines:
            lines.append("")
        lines.append(f"[{section}]")
        for key, spec in SCHEMA[section].items():
            if spec.kind == "micrometers":
                continue
            value = getattr(part, spec.target)
            text = str(value) if spec.kind in ("count", "text") else _fmt(value)
            unit = "" if spec.unit == Unit.DIMENSIONLESS else f" {spec.unit.value}"
            lines.append(f"{key} = {text}{unit}")
    return "\n".join(lines) + "\n"


# 스캔 파라미터별 값 종류
_SCAN_FIELDS: dict[ScanParameter, _Field] = {
    ScanParameter.INTER_PULSE_DELAY: _Field("delay", "inter_pulse_delay", Unit.FS),
    ScanParameter.PUMP_PHASE_PATH: _Field("length", "extra_phase_path", Unit.NM),
    ScanParameter.THETA1: _Field("angle", "theta1", Unit.RAD),
    ScanParameter.TAU: _Field("delay", "tau", Unit.FS),
    ScanParameter.TAU1: _Field("delay", "tau1", Unit.FS),
}


def parse_scan_value(parameter: ScanParameter, token: str) -> float:
    """`--from 533fs` 같은 단위 토큰을 스캔 파라미터의 내부 단위 값으로 바꿉니다.

    지연 파라미터는 길이 단위도 받으며 delay_from_length로 변환합니다.

    Raises:
        ParseError: 단위가 없거나 파라미터와 맞지 않는 경우
    """
    return float(_convert(_Token(token.strip(), 1, 1, token), _SCAN_FIELDS[parameter]))
