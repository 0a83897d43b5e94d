"""시뮬레이터 명령행 인터페이스입니다.

하위 명령: check, rate, scan, events, oracle, serve.
기계가 읽는 결과(CSV/JSON)는 stdout에만, 진단 메시지는 stderr에만 씁니다.
종료 코드는 0 성공, 1 실행/검증 실패, 2 사용법 오류 입니다.
"""

import argparse
import json
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn

from app.config import Config, CurveFormat, ReduceMode, ScanParameter, logger
from app.schemas.curves import MIN_GRID_STEPS
from app.schemas.setup import ExperimentSetup
from app.services.montecarlo_service import count_coincidences, generate_events
from app.services.report_service import check_report, oracle_report, rate_report
from app.services.scan_service import scan
from app.utils.errors import ParseError, SimulationError
from app.utils.scenario import parse_config, parse_scan_value
from app.utils.serialization import (
    display_curve,
    summary_payload,
    write_curve,
    write_events_csv,
    write_summary_json,
)


@dataclass(frozen=True)
class CommandOutcome:
    """명령 실행 결과입니다.

    Attributes:
        exit_code (int): 0 성공, 1 실행/검증 실패, 2 사용법 오류
        stdout_payload (str): 기계가 읽는 출력
        stderr_diagnostics (str): 사람이 읽는 진단
    """

    exit_code: int
    stdout_payload: str = ""
    stderr_diagnostics: str = ""


class UsageError(Exception):
    """명령행 인자가 잘못된 경우의 예외입니다."""

    def __init__(self, message: str, usage: str = ""):
        """UsageError 객체를 초기화합니다."""
        super().__init__(message)
        self.message = message
        self.usage = usage


class _ArgumentParser(argparse.ArgumentParser):
    """종료 대신 UsageError를 던지는 ArgumentParser 입니다."""

    def error(self, message: str) -> NoReturn:
        """argparse 오류를 UsageError로 바꿉니다."""
        raise UsageError(message, self.format_usage())


def _int_at_least(minimum: int):
    def convert(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return convert


def build_parser() -> argparse.ArgumentParser:
    """하위 명령과 공통 플래그를 가진 인자 파서를 만듭니다."""
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI 설정 파일 (생략 시 기본 구성)")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="검증 전에 적용할 설정 덮어쓰기 (반복 가능)",
    )
    common.add_argument(
        "--format", choices=[f.value for f in CurveFormat], default=None, help="출력 형식"
    )

    parser = _ArgumentParser(prog="two-pulse-interference", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    commands.add_parser("check", parents=[common], help="간섭 조건 보고서")
    commands.add_parser("rate", parents=[common], help="닫힌 형식 계수율")

    scan_parser = commands.add_parser("scan", parents=[common], help="파라미터 스캔")
    scan_parser.add_argument(
        "--param", required=True, choices=[p.value for p in ScanParameter]
    )
    scan_parser.add_argument("--from", dest="start", required=True, help="예: 533fs")
    scan_parser.add_argument("--to", dest="stop", required=True, help="예: 933fs")
    scan_parser.add_argument("--steps", type=_int_at_least(2), required=True)
    scan_parser.add_argument(
        "--reduce", choices=[r.value for r in ReduceMode], default=ReduceMode.RATE.value
    )

    events_parser = commands.add_parser("events", parents=[common], help="몬테카를로 이벤트")
    events_parser.add_argument("--frames", type=_int_at_least(1), required=True)
    events_parser.add_argument("--seed", type=_int_at_least(0), default=0)
    events_parser.add_argument("--out-events", type=Path, default=None)
    events_parser.add_argument("--out-summary", type=Path, default=None)
    events_parser.add_argument("--bins", type=_int_at_least(1), default=60)

    oracle_parser = commands.add_parser("oracle", parents=[common], help="격자 적분 검증")
    oracle_parser.add_argument(
        "--steps-per-axis",
        type=_int_at_least(MIN_GRID_STEPS),
        default=Config.DEFAULT_GRID_STEPS,
    )

    serve_parser = commands.add_parser("serve", help="HTTP 서버 실행")
    serve_parser.add_argument("--host", default=Config.HOST)
    serve_parser.add_argument("--port", type=int, default=Config.PORT)
    return parser


def _load_setup(args: argparse.Namespace) -> ExperimentSetup:
    if args.config is None:
        source = ""
    else:
        try:
            source = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise SimulationError(f"cannot read config {args.config}: {exc.strerror}") from exc
    return parse_config(source, args.overrides)


def _render_payload(payload: dict[str, Any], fmt: str | None) -> str:
    if fmt == CurveFormat.CSV.value:
        return "key,value\n" + "".join(f"{k},{v}\n" for k, v in payload.items())
    return json.dumps(payload, indent=2) + "\n"


def cmd_check(args: argparse.Namespace) -> str:
    """간섭 조건 보고서를 출력합니다."""
    return _render_payload(check_report(_load_setup(args)), args.format)


def cmd_rate(args: argparse.Namespace) -> str:
    """닫힌 형식 계수율 보고서를 출력합니다."""
    return _render_payload(rate_report(_load_setup(args)), args.format)


def cmd_scan(args: argparse.Namespace) -> str:
    """스캔 Curve를 요청 형식으로 출력합니다."""
    setup = _load_setup(args)
    parameter = ScanParameter(args.param)
    try:
        start = parse_scan_value(parameter, args.start)
        stop = parse_scan_value(parameter, args.stop)
    except ParseError as exc:
        raise UsageError(f"--from/--to: {exc.message}") from exc
    curve = scan(setup, parameter, (start, stop), args.steps, args.reduce)
    return write_curve(display_curve(curve), args.format or CurveFormat.CSV.value)


def cmd_events(args: argparse.Namespace) -> str:
    """이벤트를 생성하고 파일로 쓴 뒤 요약을 출력합니다."""
    setup = _load_setup(args)
    stream = generate_events(setup, args.frames, args.seed)
    summary = count_coincidences(
        stream, setup.detectors.coincidence_window, args.bins, n_frames=args.frames
    )
    try:
        if args.out_events is not None:
            args.out_events.write_text(write_events_csv(stream), encoding="utf-8", newline="\n")
        if args.out_summary is not None:
            args.out_summary.write_text(
                write_summary_json(summary), encoding="utf-8", newline="\n"
            )
    except OSError as exc:
        raise SimulationError(f"cannot write output: {exc}") from exc
    logger.info(
        "이벤트 요약: singles=(%d, %d), coincidences=%d",
        summary.singles_d1,
        summary.singles_d2,
        summary.coincidences,
    )
    return json.dumps(summary_payload(summary), indent=2) + "\n"


def cmd_oracle(args: argparse.Namespace) -> str:
    """닫힌 형식과 격자 적분 계수율을 비교해 출력합니다."""
    return _render_payload(oracle_report(_load_setup(args), args.steps_per_axis), args.format)


def cmd_serve(args: argparse.Namespace) -> str:
    """uvicorn으로 HTTP 서버를 실행합니다."""
    import uvicorn

    logger.info("HTTP 서버 시작: %s:%d", args.host, args.port)
    uvicorn.run("main:app", host=args.host, port=args.port)
    return ""


COMMANDS = {
    "check": cmd_check,
    "rate": cmd_rate,
    "scan": cmd_scan,
    "events": cmd_events,
    "oracle": cmd_oracle,
    "serve": cmd_serve,
}


def execute(argv: Sequence[str]) -> CommandOutcome:
    """명령을 실행하고 종료 코드와 출력을 CommandOutcome으로 반환합니다."""
    try:
        args = build_parser().parse_args(list(argv))
        return CommandOutcome(Config.ExitCode.OK, COMMANDS[args.command](args))
    except UsageError as exc:
        return CommandOutcome(
            Config.ExitCode.USAGE, "", f"{exc.usage}error: {exc.message}\n"
        )
    except SimulationError as exc:
        return CommandOutcome(Config.ExitCode.FAILURE, "", exc.render() + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    """명령을 실행하고 출력을 stdout/stderr로 보낸 뒤 종료 코드를 반환합니다."""
    outcome = execute(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(outcome.stdout_payload)
    sys.stderr.write(outcome.stderr_diagnostics)
    return outcome.exit_code


__all__ = ["CommandOutcome", "build_parser", "execute", "main"]
