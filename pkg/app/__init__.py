"""두 펄스 SPDC 간섭 시뮬레이터를 구성하는 모듈들입니다."""

from app import config, routers, services, schemas, utils

__all__ = [
    "config",
    "routers",
    "services",
    "schemas",
    "utils",
]
