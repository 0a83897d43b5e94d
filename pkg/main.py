"""두 펄스 SPDC 간섭 시뮬레이터의 메인 애플리케이션 파일입니다.

`python main.py <command>` 로 CLI를 실행하고, `python main.py serve` 또는
`uvicorn main:app` 으로 HTTP 서버를 실행합니다.
"""

from contextlib import asynccontextmanager
import sys
import traceback

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.cli import main as cli_main
from app.config import Config, logger
from app.routers import simulation_router
from app.utils.errors import (
    FitError,
    GridCoverageError,
    SimulationError,
)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """FastAPI의 lifespan 이벤트 핸들러."""
    logger.info("🚀 서비스 시작")
    logger.debug(
        "Config 정보 로드 %s",
        {
            "debug": Config.debug,
            "scan_workers": Config.SCAN_WORKERS,
            "result_cache_size": Config.RESULT_CACHE_SIZE,
            "default_grid_steps": Config.DEFAULT_GRID_STEPS,
        },
    )

    yield  # FastAPI가 실행 중인 동안 유지됨

    logger.info("🛑 서비스 종료: 정리 작업 완료")


app = FastAPI(lifespan=lifespan, title="two-pulse-interference")
app.include_router(simulation_router)


def _status_for(exc: SimulationError) -> int:
    """도메인 예외에 대응하는 HTTP 상태 코드를 반환합니다."""
    if isinstance(exc, (FitError, GridCoverageError)):
        return Config.HttpStatus.UNPROCESSABLE_ENTITY
    return Config.HttpStatus.BAD_REQUEST


@app.exception_handler(SimulationError)
async def simulation_error_handler(request: Request, exc: SimulationError) -> JSONResponse:
    """SimulationError를 JSON 오류 응답으로 변환합니다."""
    logger.warning("%s %s 실패: %s", request.method, request.url.path, exc.message)
    return JSONResponse(status_code=_status_for(exc), content=exc.to_dict())


@app.exception_handler(Exception)
async def unhandled_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    """처리되지 않은 예외를 기록하고 500 응답을 반환합니다.

    Args:
        request (Request): 요청 객체
        exc (Exception): 발생한 예외

    Returns:
        JSONResponse: {"detail": "Internal Server Error"}
    """
    logger.error(
        "Exception occurred: %s\n%s",
        exc,
        "".join(traceback.format_tb(exc.__traceback__)),
    )
    return JSONResponse(
        status_code=Config.HttpStatus.INTERNAL_SERVER_ERROR,
        content={"detail": "Internal Server Error"},
    )


@app.get("/health", tags=["internal"])
async def health_check():
    """Health check 엔드포인트입니다."""
    return JSONResponse({"status": "ok"})


if __name__ == "__main__":
    sys.exit(cli_main())
