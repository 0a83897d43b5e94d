"""시뮬레이터의 실행 환경 설정을 정의하는 모듈입니다.

이 모듈은 환경 변수를 로드하고, 로깅을 설정하며, 실행 자원(스캔 워커 수, 캐시 크기,
적분 격자 기본값 등)을 관리하는 Config 클래스를 제공합니다.
물리 파라미터는 환경 변수가 아니라 시나리오 설정 파일(INI)에서 읽습니다.
"""

import os
import logging
from dotenv import load_dotenv


# 환경 변수 로딩
load_dotenv()

# 로깅 설정
logger = logging.getLogger("two_pulse_interference")
logger.setLevel(logging.DEBUG)  # 모든 로그 기록

# stdout은 CLI의 CSV/JSON 출력 전용이므로 로그는 stderr로만 보냅니다.
console_handler = logging.StreamHandler()
if os.getenv("DEBUG", "False").lower() == "true":
    console_handler.setLevel(logging.DEBUG)  # DEBUG 이상 출력
else:
    # DEBUG 모드가 아닐 때는 INFO 이상만 출력
    console_handler.setLevel(logging.INFO)  # INFO 이상만 출력
console_formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")
console_handler.setFormatter(console_formatter)

logger.addHandler(console_handler)


class Config:
    """시뮬레이터 실행 설정 값을 관리하는 클래스입니다.

    이 클래스는 환경 변수에서 설정 값을 로드하고, 기본 값을 제공합니다.
    """

    debug = os.getenv("DEBUG", "False").lower() == "true"

    # 스캔 포인트 병렬 평가에 사용할 스레드 수
    SCAN_WORKERS = int(os.getenv("SCAN_WORKERS", "4"))
    # HTTP 결과 LRU 캐시 크기 (0이면 캐시 사용 안 함)
    RESULT_CACHE_SIZE = int(os.getenv("RESULT_CACHE_SIZE", "128"))

    DEFAULT_GRID_STEPS = int(os.getenv("DEFAULT_GRID_STEPS", "512"))
    FIT_MAX_ITERATIONS = int(os.getenv("FIT_MAX_ITERATIONS", "200"))

    HOST = os.getenv("HOST", "0.0.0.0")  # noqa: S104
    PORT = int(os.getenv("PORT", "5600"))

    @classmethod
    def _validate(cls) -> None:
        if cls.SCAN_WORKERS < 1:
            raise RuntimeError("SCAN_WORKERS environment variable must be >= 1.")
        if cls.RESULT_CACHE_SIZE < 0:
            raise RuntimeError("RESULT_CACHE_SIZE environment variable must be >= 0.")
        if cls.DEFAULT_GRID_STEPS < 64:  # noqa: PLR2004
            raise RuntimeError("DEFAULT_GRID_STEPS environment variable must be >= 64.")
        if cls.FIT_MAX_ITERATIONS < 1:
            raise RuntimeError("FIT_MAX_ITERATIONS environment variable must be >= 1.")

    class ExitCode:
        """CLI 종료 코드를 정의하는 클래스입니다."""

        OK = 0
        FAILURE = 1
        USAGE = 2

    class HttpStatus:
        """HTTP 상태 코드를 정의하는 클래스입니다."""

        OK = 200
        BAD_REQUEST = 400
        UNPROCESSABLE_ENTITY = 422
        INTERNAL_SERVER_ERROR = 500


Config._validate()
