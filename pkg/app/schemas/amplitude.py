"""이광자 진폭 항과 간섭 조건 보고서 스키마를 정의합니다."""

from pydantic import Field, field_validator

from app.config import PathKind
from app.schemas.base import FrozenModel

# 삼각함수 곱의 반올림 오차 허용치
WEIGHT_TOLERANCE = 1e-12


class AmplitudeTerm(FrozenModel):
    """하나의 Feynman 경로에 해당하는 biphoton 파속입니다.

    포락선은 단위 L2 노름의 인수분해된 가우시안
    G(t₊, t₁₂) = (2π σ₊ σ₋)^(-1/2) exp(-(t₊-μ₊)²/4σ₊²) exp(-(t₁₂-μ₁₂)²/4σ₋²) 입니다.

    Attributes:
        weight (complex): 편광 투영 계수, |weight| <= 1
        mu_plus (float): t₊ 방향 포락선 중심 (fs)
        mu_12 (float): t₁₂ 방향 포락선 중심 (fs)
        phase (float): 총 반송파 위상 (rad)
        pulse_index (int): 펌프 펄스 번호 m
        path (PathKind): TT 또는 RR
    """

    weight: complex
    mu_plus: float
    mu_12: float
    phase: float
    pulse_index: int = Field(ge=0)
    path: PathKind

    @field_validator("weight")
    @classmethod
    def validate_weight(cls, value: complex) -> complex:
        """편광 투영 계수의 크기가 1 이하인지 확인합니다."""
        if abs(value) > 1 + WEIGHT_TOLERANCE:
            raise ValueError(f"|weight| must be <= 1, got {abs(value):.6g}")
        return value

    @property
    def sort_key(self) -> tuple[int, int]:
        """(pulse_index, TT < RR) 정렬 키."""
        return self.pulse_index, 0 if self.path == PathKind.TT else 1


class ConditionReport(FrozenModel):
    """T = τ, τ₁ = 2τ 간섭 조건의 잔차와 예측 구별 가능성입니다.

    Attributes:
        residual_T (float): T - τ (fs)
        residual_tau1 (float): τ₁ - 2τ (fs)
        tolerance (float): 잔차 허용 오차 (fs)
        max_cross_overlap (float): 서로 다른 펄스의 (TT, RR) 쌍 중 최대 |overlap|
        best_delta_m (int): 최대 overlap을 주는 펄스 번호 차 (없으면 0)
        predicted_spacetime_visibility (float): 45°/45°에서 펌프 위상 프린지 가시도
        predicted_polarization_visibility (float): θ₂ 고정, θ₁ 한 lobe 스윕 가시도
        satisfied (bool): 두 잔차가 모두 허용 오차 미만인지 여부
    """

    residual_T: float  # noqa: N815
    residual_tau1: float
    tolerance: float
    max_cross_overlap: float = Field(ge=0, le=1)
    best_delta_m: int = Field(ge=0)
    predicted_spacetime_visibility: float = Field(ge=0, le=1)
    predicted_polarization_visibility: float = Field(ge=0, le=1)
    satisfied: bool
