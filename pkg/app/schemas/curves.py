"""스캔 결과 곡선, 적분 격자, 프린지 피팅 결과 스키마를 정의합니다."""

from pydantic import Field, field_validator, model_validator

from app.config import YKind
from app.schemas.base import FrozenModel

MIN_GRID_STEPS = 64


class GridSpec(FrozenModel):
    """격자 적분 오라클의 (t₊, t₁₂) 영역입니다.

    Attributes:
        t_plus_range (tuple[float, float]): t₊ 범위 (fs)
        t_12_range (tuple[float, float]): t₁₂ 범위 (fs)
        steps_per_axis (int): 축당 격자 수, 64 이상
    """

    t_plus_range: tuple[float, float]
    t_12_range: tuple[float, float]
    steps_per_axis: int = Field(ge=MIN_GRID_STEPS)

    @field_validator("t_plus_range", "t_12_range")
    @classmethod
    def validate_range(cls, value: tuple[float, float]) -> tuple[float, float]:
        """범위의 최소값이 최대값보다 작은지 확인합니다."""
        if value[0] >= value[1]:
            raise ValueError(f"range must satisfy min < max, got {value}")
        return value


class Curve(FrozenModel):
    """파라미터 스캔 결과입니다.

    Attributes:
        parameter_name (str): 스캔 파라미터 이름
        x_unit (str): x 값 단위 (fs, nm, rad)
        y_kind (YKind): RATE, VISIBILITY, COUNTS
        points (list[tuple[float, float]]): x가 엄격히 증가하는 (x, y) 목록
    """

    parameter_name: str
    x_unit: str
    y_kind: YKind
    points: list[tuple[float, float]]

    @model_validator(mode="after")
    def check_points(self) -> "Curve":
        """x 단조 증가와 y 값 범위를 확인합니다."""
        xs = [x for x, _ in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("curve x values must be strictly increasing")
        ys = [y for _, y in self.points]
        if any(y < 0 for y in ys):
            raise ValueError(f"{self.y_kind.value} curve values must be >= 0")
        if self.y_kind == YKind.VISIBILITY and any(y > 1 for y in ys):
            raise ValueError("visibility values must lie in [0, 1]")
        return self

    @property
    def xs(self) -> list[float]:
        """x 값 목록."""
        return [x for x, _ in self.points]

    @property
    def ys(self) -> list[float]:
        """y 값 목록."""
        return [y for _, y in self.points]


class FringePrediction(FrozenModel):
    """닫힌 형식 프린지 mean - amplitude·cos(Ω_p φ + const) 입니다.

    Attributes:
        mean (float): 평균 수준
        amplitude (float): 진폭
        visibility (float): amplitude / mean
        polarization_visibility (float): θ₁ ∈ [0, π/2] 스윕 가시도 (위상 고정)
    """

    mean: float = Field(ge=0)
    amplitude: float = Field(ge=0)
    visibility: float = Field(ge=0, le=1)
    polarization_visibility: float = Field(ge=0, le=1)


class FringeFit(FrozenModel):
    """y = mean - amplitude·cos(2πx/period + phase) 최소제곱 피팅 결과입니다."""

    mean_level: float = Field(ge=0)
    amplitude: float = Field(ge=0)
    period: float
    phase_offset: float
    visibility: float = Field(ge=0, le=1)
    rms_residual: float = Field(ge=0)
    iterations: int = 0
