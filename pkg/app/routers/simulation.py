"""간섭 조건 확인, 계수율, 파라미터 스캔을 제공하는 HTTP 라우터입니다.

같은 요청 본문에 대한 결과는 LRU 캐시에 보관합니다.
"""

import json
from collections.abc import Callable
from threading import Lock
from typing import Any

from cachetools import LRUCache
from fastapi import APIRouter
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from app.config import Config, CurveFormat, logger
from app.schemas.api import ScanRequest, SimulationRequest
from app.services.report_service import check_report, rate_report
from app.services.scan_service import scan
from app.utils.scenario import parse_config, parse_scan_value
from app.utils.serialization import display_curve, write_curve

simulation_router = APIRouter(prefix="/simulation", tags=["simulation"])

_RESULT_CACHE: LRUCache[str, Any] = LRUCache(maxsize=max(Config.RESULT_CACHE_SIZE, 1))
_CACHE_LOCK = Lock()


def _cached(kind: str, request: SimulationRequest, compute: Callable[[], Any]) -> Any:
    """요청 본문을 키로 결과를 캐시합니다. RESULT_CACHE_SIZE가 0이면 매번 계산합니다."""
    if Config.RESULT_CACHE_SIZE == 0:
        return compute()
    key = kind + ":" + json.dumps(request.model_dump(mode="json"), sort_keys=True)
    with _CACHE_LOCK:
        if key in _RESULT_CACHE:
            logger.debug("결과 캐시 적중: %s", kind)
            return _RESULT_CACHE[key]
    result = compute()
    with _CACHE_LOCK:
        _RESULT_CACHE[key] = result
    return result


def clear_result_cache() -> None:
    """결과 캐시를 비웁니다."""
    with _CACHE_LOCK:
        _RESULT_CACHE.clear()


@simulation_router.post("/check")
def check(request: SimulationRequest) -> JSONResponse:
    """간섭 조건 T = τ, τ₁ = 2τ 의 잔차와 예측 가시도를 반환합니다."""
    payload = _cached(
        "check",
        request,
        lambda: check_report(parse_config(request.config, request.overrides)),
    )
    return JSONResponse(payload)


@simulation_router.post("/rate")
def rate(request: SimulationRequest) -> JSONResponse:
    """닫힌 형식 동시계수율과 단일 계수율을 반환합니다."""
    payload = _cached(
        "rate",
        request,
        lambda: rate_report(parse_config(request.config, request.overrides)),
    )
    return JSONResponse(payload)


@simulation_router.post("/scan")
def scan_curve(request: ScanRequest) -> Response:
    """파라미터 스캔 결과 Curve를 JSON 또는 CSV로 반환합니다."""

    def compute() -> str:
        setup = parse_config(request.config, request.overrides)
        start = parse_scan_value(request.parameter, request.start)
        stop = parse_scan_value(request.parameter, request.stop)
        curve = scan(setup, request.parameter, (start, stop), request.steps, request.reduce)
        return write_curve(display_curve(curve), request.format)

    text = _cached("scan", request, compute)
    if request.format == CurveFormat.CSV:
        return PlainTextResponse(text, media_type="text/csv")
    return Response(text, media_type="application/json")
