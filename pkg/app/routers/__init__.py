"""라우터 패키지의 공개 엔트리 포인트입니다."""

from app.routers.simulation import simulation_router

__all__ = ["simulation_router"]
