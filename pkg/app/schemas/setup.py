"""실험 장치 구성(펌프, 필터, 간섭계, 분석기, 검출기, 모델) 스키마를 정의합니다.

단위 규약: 시간 fs (rep_period는 ns, jitter는 ps, coincidence_window는 ns),
길이 nm, 각도 rad.
"""

import math

from pydantic import Field, model_validator

from app.schemas.base import FrozenModel
from app.utils.units import C_NM_PER_FS, path_to_time_fs

# 단일 쌍 영역을 보장하기 위한 프레임당 쌍 생성 확률 상한
MAX_PAIR_PROBABILITY = 0.05


class PumpSpec(FrozenModel):
    """펌프 펄스열을 나타내는 클래스입니다.

    Attributes:
        wavelength (float): 중심 파장 (nm)
        pulse_fwhm (float): 세기 FWHM (fs)
        rep_period (float): 반복 주기 (ns)
        n_pulses (int): 프레임당 펄스 수 N
        inter_pulse_delay (float): 인접 펄스 간 지연 T (fs)
        extra_phase_path (float): 펌프 위상 조절 광학 경로 (nm)
    """

    wavelength: float = Field(gt=0)
    pulse_fwhm: float = Field(gt=0)
    rep_period: float = Field(gt=0)
    n_pulses: int = Field(ge=1)
    inter_pulse_delay: float = Field(ge=0)
    extra_phase_path: float = 0.0

    @model_validator(mode="after")
    def check_frames_do_not_overlap(self) -> "PumpSpec":
        """프레임 안의 펄스열이 다음 프레임과 겹치지 않는지 확인합니다."""
        span_fs = self.n_pulses * self.inter_pulse_delay + 10 * self.pulse_fwhm
        if self.rep_period * 1e6 <= span_fs:
            raise ValueError(
                f"rep_period ({self.rep_period} ns) must exceed "
                f"n_pulses*inter_pulse_delay + 10*pulse_fwhm ({span_fs} fs)"
            )
        return self

    @property
    def omega(self) -> float:
        """펌프 반송파 각주파수 Ω_p (rad/fs)."""
        return 2 * math.pi * C_NM_PER_FS / self.wavelength

    @property
    def phase_knob(self) -> float:
        """펌프 위상 조절값 φ_p를 시간(fs)으로 나타낸 값."""
        return path_to_time_fs(self.extra_phase_path)


class CrystalSpec(FrozenModel):
    """비선형 결정 정보입니다. 계산에는 쓰이지 않는 메타데이터입니다.

    Attributes:
        type (str): SPDC 종류 (예: type-II)
        thickness (float): 결정 두께 (nm)
    """

    type: str = "type-II"
    thickness: float = Field(default=100_000.0, gt=0)


class FilterSpec(FrozenModel):
    """검출기 앞 간섭 필터를 나타내는 클래스입니다.

    Attributes:
        center (float): 중심 파장 (nm), 축퇴 조건에서 펌프 파장의 2배
        fwhm (float): 대역폭 Δλ (nm)
    """

    center: float = Field(gt=0)
    fwhm: float = Field(gt=0)

    @model_validator(mode="after")
    def check_bandwidth(self) -> "FilterSpec":
        """대역폭이 중심 파장보다 작은지 확인합니다."""
        if self.fwhm >= self.center:
            raise ValueError(f"fwhm ({self.fwhm} nm) must be < center ({self.center} nm)")
        return self


class DelaySpec(FrozenModel):
    """간섭계 지연 τ, τ₁ (fs)."""

    tau: float = Field(ge=0)
    tau1: float = Field(ge=0)


class AnalyzerSpec(FrozenModel):
    """검출기 앞 편광 분석기 각도 θ₁, θ₂ (rad)."""

    theta1: float
    theta2: float


class DetectorSpec(FrozenModel):
    """검출기 패키지와 동시계수 회로를 나타내는 클래스입니다.

    Attributes:
        jitter (float): 클릭당 가우시안 RMS 지터 (ps)
        coincidence_window (float): 동시계수 시간창 (ns)
        pair_probability (float): 프레임당 쌍 생성 확률, 0.05 이하
        efficiency (float): 광자당 검출 효율 (0, 1]
    """

    jitter: float = Field(ge=0)
    coincidence_window: float = Field(gt=0)
    pair_probability: float = Field(ge=0, le=MAX_PAIR_PROBABILITY)
    efficiency: float = Field(gt=0, le=1)


class ModelParams(FrozenModel):
    """진폭 포락선 모델 파라미터입니다.

    Attributes:
        sigma_plus (float): t₊ 방향 RMS 폭 (fs)
        sigma_minus (float): t₁₂ 방향 RMS 폭 (fs)
        normalization (float): 임의 단위 계수율 스케일
    """

    sigma_plus: float = Field(gt=0)
    sigma_minus: float = Field(gt=0)
    normalization: float = Field(default=1.0, gt=0)


class ExperimentSetup(FrozenModel):
    """파싱이 끝난 전체 실험 구성입니다."""

    pump: PumpSpec
    crystal: CrystalSpec = CrystalSpec()
    filter: FilterSpec
    delays: DelaySpec
    analyzers: AnalyzerSpec
    detectors: DetectorSpec
    model: ModelParams
