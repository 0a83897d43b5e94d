"""기본 스키마 정의 모듈 입니다."""

from pydantic import BaseModel, ConfigDict


class FrozenModel(BaseModel):
    """생성 후 변경할 수 없는 도메인 값 객체의 기반 클래스입니다.

    모든 연산은 입력 값의 순수 함수이므로, 값 객체는 스레드 간에 안전하게 공유됩니다.
    정의되지 않은 필드와 NaN/무한대 값은 거부합니다.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
