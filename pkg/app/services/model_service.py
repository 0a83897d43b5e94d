"""Biphoton 진폭 항 구성과 겹침/간섭 조건 계산을 담당하는 핵심 모델 서비스입니다.

N개의 펌프 펄스 각각에 대해 동시계수를 만드는 두 경로(TT, RR)의 파속을 만들고,
파속 사이의 겹침, T = τ / τ₁ = 2τ 간섭 조건, 이론 가시도를 계산합니다.
시간 fs, 길이 nm, 각도 rad 단위를 사용합니다.
"""

import cmath
import math
from typing import NamedTuple

import numpy as np

from app.config import PathKind, logger
from app.schemas.amplitude import AmplitudeTerm, ConditionReport
from app.schemas.setup import ExperimentSetup, FilterSpec, ModelParams, PumpSpec
from app.services.fringe_service import predicted_fringe
from app.utils.errors import InvalidArgumentError
from app.utils.units import delay_from_length

__all__ = [
    "TermArrays",
    "build_amplitude_terms",
    "build_term_arrays",
    "coherence_length_from_filter",
    "coherence_time_from_filter",
    "condition_tolerance",
    "cross_pair_overlaps",
    "default_model_params",
    "delay_from_length",
    "interference_condition",
    "overlap",
    "overlap_matrix",
    "terms_to_arrays",
    "theoretical_visibility",
]

# 가우시안 FWHM = 2√(2 ln 2)·σ
FWHM_PER_SIGMA = 2 * math.sqrt(2 * math.log(2))


class TermArrays(NamedTuple):
    """진폭 항 목록의 열 단위 numpy 표현입니다."""

    weight: np.ndarray
    mu_plus: np.ndarray
    mu_12: np.ndarray
    phase: np.ndarray
    pulse_index: np.ndarray
    is_rr: np.ndarray


def coherence_length_from_filter(filter_spec: FilterSpec) -> float:
    """필터가 정하는 결맞음 길이 l_coh = λ²/Δλ 를 nm 단위로 반환합니다."""
    if filter_spec.fwhm <= 0:
        raise InvalidArgumentError(f"filter fwhm must be > 0, got {filter_spec.fwhm}.")
    return filter_spec.center**2 / filter_spec.fwhm


def coherence_time_from_filter(filter_spec: FilterSpec) -> float:
    """결맞음 시간 τ_c = λ²/(Δλ·c) 를 fs 단위로 반환합니다."""
    return delay_from_length(coherence_length_from_filter(filter_spec) * 1e-3)


def default_model_params(
    pump: PumpSpec, filter_spec: FilterSpec, normalization: float = 1.0
) -> ModelParams:
    """펌프 펄스 폭과 필터 대역폭으로부터 기본 포락선 폭을 유도합니다.

    σ₊ = 펌프 세기 FWHM / 2√(2 ln 2), σ₋ = τ_c / 2√(2 ln 2) 입니다.
    """
    return ModelParams(
        sigma_plus=pump.pulse_fwhm / FWHM_PER_SIGMA,
        sigma_minus=coherence_time_from_filter(filter_spec) / FWHM_PER_SIGMA,
        normalization=normalization,
    )


def build_term_arrays(setup: ExperimentSetup) -> TermArrays:
    """build_amplitude_terms와 같은 항을 numpy 배열로 구성합니다.

    펄스 m의 방출 시각은 t₀ = m·T, 펌프 위상 조절값은 펄스마다 m·φ_p 로 누적됩니다.
    순서는 (pulse_index, TT < RR) 입니다.
    """
    pump, delays, analyzers = setup.pump, setup.delays, setup.analyzers
    omega = pump.omega
    tau, tau1 = delays.tau, delays.tau1
    n = pump.n_pulses

    w_tt = -math.sin(analyzers.theta1) * math.cos(analyzers.theta2)
    w_rr = math.cos(analyzers.theta1) * math.sin(analyzers.theta2)

    m = np.repeat(np.arange(n, dtype=np.int64), 2)
    is_rr = np.tile(np.array([False, True]), n)
    t0 = m * pump.inter_pulse_delay
    knob = m * pump.phase_knob

    weight = np.where(is_rr, w_rr, w_tt).astype(np.complex128)
    mu_plus = np.where(is_rr, t0 - tau / 2, t0 + (tau1 - tau) / 2)
    mu_12 = np.where(is_rr, 2 * tau, tau1).astype(np.float64)
    # 축퇴 광자 각각 Ω_p/2 에서 경로 지연만큼 위상을 얻습니다.
    path_delay = np.where(is_rr, tau, tau1 + tau)
    phase = omega * (t0 + knob) + (omega / 2) * path_delay
    return TermArrays(weight, mu_plus, mu_12, phase, m, is_rr)


def build_amplitude_terms(setup: ExperimentSetup) -> list[AmplitudeTerm]:
    """N 펄스 펌프와 두 간섭계 경로에 대한 2N개의 진폭 항을 만듭니다.

    Args:
        setup (ExperimentSetup): 실험 구성

    Returns:
        list[AmplitudeTerm]: (pulse_index, TT < RR) 순으로 정렬된 항 목록
    """
    arrays = build_term_arrays(setup)
    terms = [
        AmplitudeTerm(
            weight=complex(arrays.weight[i]),
            mu_plus=float(arrays.mu_plus[i]),
            mu_12=float(arrays.mu_12[i]),
            phase=float(arrays.phase[i]),
            pulse_index=int(arrays.pulse_index[i]),
            path=PathKind.RR if arrays.is_rr[i] else PathKind.TT,
        )
        for i in range(len(arrays.weight))
    ]
    logger.debug("진폭 항 생성: n_terms=%d", len(terms))
    return terms


def terms_to_arrays(terms: list[AmplitudeTerm]) -> TermArrays:
    """AmplitudeTerm 목록을 TermArrays로 변환합니다."""
    return TermArrays(
        weight=np.array([t.weight for t in terms], dtype=np.complex128),
        mu_plus=np.array([t.mu_plus for t in terms], dtype=np.float64),
        mu_12=np.array([t.mu_12 for t in terms], dtype=np.float64),
        phase=np.array([t.phase for t in terms], dtype=np.float64),
        pulse_index=np.array([t.pulse_index for t in terms], dtype=np.int64),
        is_rr=np.array([t.path == PathKind.RR for t in terms], dtype=bool),
    )


def overlap(a: AmplitudeTerm, b: AmplitudeTerm, model: ModelParams) -> complex:
    """두 진폭 항의 겹침 적분 ∬ G_a G_b* · e^{i(φ_a - φ_b)} 를 반환합니다.

    Returns:
        complex: |값| ∈ [0, 1], 자기 자신과의 겹침은 1
    """
    d_plus = a.mu_plus - b.mu_plus
    d_12 = a.mu_12 - b.mu_12
    magnitude = math.exp(
        -(d_plus**2) / (8 * model.sigma_plus**2) - d_12**2 / (8 * model.sigma_minus**2)
    )
    return magnitude * cmath.exp(1j * (a.phase - b.phase))


def overlap_matrix(arrays: TermArrays, model: ModelParams) -> np.ndarray:
    """실수 포락선 겹침 행렬 M_ij = ∬ G_i G_j 를 반환합니다."""
    d_plus = arrays.mu_plus[:, None] - arrays.mu_plus[None, :]
    d_12 = arrays.mu_12[:, None] - arrays.mu_12[None, :]
    return np.exp(
        -(d_plus**2) / (8 * model.sigma_plus**2) - d_12**2 / (8 * model.sigma_minus**2)
    )


def cross_pair_overlaps(setup: ExperimentSetup) -> dict[int, float]:
    """서로 다른 펄스의 (TT, RR) 쌍 |overlap| 최대값을 펄스 번호 차 Δm 별로 반환합니다."""
    arrays = build_term_arrays(setup)
    envelope = overlap_matrix(arrays, setup.model)
    best: dict[int, float] = {}
    tt_idx = np.flatnonzero(~arrays.is_rr)
    rr_idx = np.flatnonzero(arrays.is_rr)
    for i in tt_idx:
        for j in rr_idx:
            delta_m = abs(int(arrays.pulse_index[i]) - int(arrays.pulse_index[j]))
            if delta_m == 0:
                continue
            best[delta_m] = max(best.get(delta_m, 0.0), float(envelope[i, j]))
    return best


def condition_tolerance(model: ModelParams) -> float:
    """간섭 조건 잔차 허용 오차 max(1 fs, σ₊/50)."""
    return max(1.0, model.sigma_plus / 50)


def interference_condition(setup: ExperimentSetup) -> ConditionReport:
    """T = τ, τ₁ = 2τ 간섭 조건의 잔차와 예측 가시도를 보고합니다.

    두 번째 펄스가 없으면(N = 1) 잔차와 무관하게 조건은 만족되지 않습니다.
    """
    pump, delays, model = setup.pump, setup.delays, setup.model
    residual_t = pump.inter_pulse_delay - delays.tau
    residual_tau1 = delays.tau1 - 2 * delays.tau
    tolerance = condition_tolerance(model)

    overlaps = cross_pair_overlaps(setup)
    if overlaps:
        # 가장 겹침이 큰 Δm, 같으면 작은 Δm
        best_delta_m = min(overlaps, key=lambda dm: (-overlaps[dm], dm))
        max_cross = overlaps[best_delta_m]
        fringe = predicted_fringe(
            math.pi / 4, math.pi / 4, max_cross, pump.n_pulses, best_delta_m
        )
        spacetime = fringe.visibility
        polarization = fringe.polarization_visibility
    else:
        best_delta_m, max_cross, spacetime, polarization = 0, 0.0, 0.0, 0.0

    satisfied = (
        pump.n_pulses >= 2
        and abs(residual_t) < tolerance
        and abs(residual_tau1) < tolerance
    )
    logger.debug(
        "간섭 조건 평가: residual_T=%.3f, residual_tau1=%.3f, max_cross=%.3e, satisfied=%s",
        residual_t,
        residual_tau1,
        max_cross,
        satisfied,
    )
    return ConditionReport(
        residual_T=residual_t,
        residual_tau1=residual_tau1,
        tolerance=tolerance,
        max_cross_overlap=min(max_cross, 1.0),
        best_delta_m=best_delta_m,
        predicted_spacetime_visibility=spacetime,
        predicted_polarization_visibility=polarization,
        satisfied=satisfied,
    )


def theoretical_visibility(delta_m: int, n: int) -> float:
    """N 펄스 펌프에서 펄스 번호 차 Δm 진폭 간 가시도 (N - Δm)/N 를 반환합니다.

    Args:
        delta_m (int): 간섭에 참여하는 두 펄스의 번호 차 (1 <= delta_m <= n)
        n (int): 프레임당 펄스 수

    Raises:
        InvalidArgumentError: delta_m이 [1, n] 범위를 벗어난 경우
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}.")
    if delta_m < 1 or delta_m > n:
        raise InvalidArgumentError(f"delta_m must lie in [1, {n}], got {delta_m}.")
    return (n - delta_m) / n

