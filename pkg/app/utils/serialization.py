"""Curve, 이벤트 스트림, 동시계수 요약의 CSV/JSON 직렬화 유틸 함수입니다."""

import json
import re

import numpy as np
from pydantic import ValidationError

from app.config import CurveFormat, Unit, YKind
from app.schemas.curves import Curve
from app.schemas.events import CoincidenceSummary, EventStream
from app.utils.errors import ParseError

EVENTS_HEADER = "frame,detector,timestamp_ps"
_CURVE_HEADER_RE = re.compile(
    r"^# parameter=(?P<parameter>\S+) y_kind=(?P<y_kind>\S+)(?: x_unit=(?P<x_unit>\S+))?$"
)


def _fmt(value: float) -> str:
    return format(value, ".17g")


def display_curve(curve: Curve) -> Curve:
    """CLI/HTTP 출력용 Curve를 반환합니다. rad 단위 x 값은 deg로 바꿉니다."""
    if curve.x_unit != Unit.RAD.value:
        return curve
    xs = np.degrees(np.asarray(curve.xs, dtype=np.float64))
    return curve.model_copy(
        update={
            "x_unit": Unit.DEG.value,
            "points": [(float(x), y) for x, y in zip(xs, curve.ys)],
        }
    )


def write_curve(curve: Curve, fmt: CurveFormat | str = CurveFormat.CSV) -> str:
    """Curve를 CSV 또는 JSON 텍스트로 직렬화합니다.

    CSV는 `# parameter=<name> y_kind=<kind> x_unit=<unit>` 헤더 뒤에 `x,y` 행이
    이어지고, 숫자는 17자리 유효숫자, 줄바꿈은 LF 입니다.
    """
    if CurveFormat(fmt) == CurveFormat.JSON:
        payload = {
            "parameter": curve.parameter_name,
            "y_kind": curve.y_kind.value,
            "x_unit": curve.x_unit,
            "points": [[x, y] for x, y in curve.points],
        }
        return json.dumps(payload, indent=2) + "\n"

    lines = [
        f"# parameter={curve.parameter_name} y_kind={curve.y_kind.value} x_unit={curve.x_unit}"
    ]
    lines.extend(f"{_fmt(x)},{_fmt(y)}" for x, y in curve.points)
    return "\n".join(lines) + "\n"


def _read_curve_csv(text: str) -> Curve:
    lines = text.splitlines()
    header = _CURVE_HEADER_RE.match(lines[0].strip()) if lines else None
    if header is None:
        raise ParseError("curve CSV must start with '# parameter=<name> y_kind=<kind>'")
    points = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 2:  # noqa: PLR2004
            raise ParseError("expected 'x,y'", line_no, 1, line)
        try:
            points.append((float(cells[0]), float(cells[1])))
        except ValueError:
            raise ParseError("malformed number", line_no, 1, line) from None
    return Curve(
        parameter_name=header.group("parameter"),
        x_unit=header.group("x_unit") or "",
        y_kind=YKind(header.group("y_kind")),
        points=points,
    )


def read_curve(text: str) -> Curve:
    """write_curve가 만든 CSV 또는 JSON 텍스트를 Curve로 읽습니다.

    Raises:
        ParseError: 형식이 잘못되었거나 Curve 불변식을 위반한 경우
    """
    try:
        if text.lstrip().startswith("{"):
            payload = json.loads(text)
            return Curve(
                parameter_name=payload["parameter"],
                x_unit=payload.get("x_unit", ""),
                y_kind=YKind(payload["y_kind"]),
                points=[(float(x), float(y)) for x, y in payload["points"]],
            )
        return _read_curve_csv(text)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ParseError(f"invalid curve text: {exc}") from exc


def write_events_csv(stream: EventStream) -> str:
    """이벤트 스트림을 `frame,detector,timestamp_ps` CSV로 직렬화합니다."""
    lines = [EVENTS_HEADER]
    for record in stream:
        lines.append(f"{record.frame_index},{record.detector.value},{record.timestamp:.3f}")
    return "\n".join(lines) + "\n"


def summary_payload(summary: CoincidenceSummary) -> dict[str, object]:
    """동시계수 요약의 JSON 본문 dict를 만듭니다."""
    return {
        "n_frames": summary.n_frames,
        "window_ns": summary.window,
        "singles_d1": summary.singles_d1,
        "singles_d2": summary.singles_d2,
        "coincidences": summary.coincidences,
        "histogram": [[dt, count] for dt, count in summary.dt_histogram],
    }


def write_summary_json(summary: CoincidenceSummary) -> str:
    """동시계수 요약을 JSON 텍스트로 직렬화합니다."""
    return json.dumps(summary_payload(summary), indent=2) + "\n"
