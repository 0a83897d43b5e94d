"""단위가 붙은 수치 스키마입니다."""

from app.config import Unit
from app.schemas.base import FrozenModel


class Quantity(FrozenModel):
    """단위 태그가 붙은 실수 값입니다.

    Attributes:
        value (float): 수치
        unit (Unit): 단위, 단위가 없으면 dimensionless
    """

    value: float
    unit: Unit = Unit.DIMENSIONLESS
