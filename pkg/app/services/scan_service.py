"""파라미터 스캔 서비스입니다.

스캔 포인트마다 실험 구성을 다시 만들고 계수율, 펌프 위상 프린지 가시도,
또는 θ₁ 편광 간섭 가시도를 기록합니다. 포인트들은 서로 독립이므로 병렬로
평가하되 결과는 항상 인덱스 순서로 조립합니다.
"""

import math
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ValidationError

from app.config import Config, ReduceMode, ScanParameter, Unit, YKind, logger
from app.schemas.curves import Curve
from app.schemas.setup import ExperimentSetup
from app.services.fringe_service import POLARIZATION_THETA1_GRID
from app.services.model_service import (
    TermArrays,
    build_term_arrays,
    overlap_matrix,
)
from app.services.rate_service import batch_rates, setup_rate
from app.utils.errors import InvalidArgumentError
from app.utils.parallel import ordered_map
from app.utils.units import C_NM_PER_FS
from app.validators.numbers import require_int_at_least

# 스캔 파라미터 → (구성 섹션, 필드, x 단위)
SCAN_TARGETS: dict[ScanParameter, tuple[str, str, Unit]] = {
    ScanParameter.INTER_PULSE_DELAY: ("pump", "inter_pulse_delay", Unit.FS),
    ScanParameter.PUMP_PHASE_PATH: ("pump", "extra_phase_path", Unit.NM),
    ScanParameter.THETA1: ("analyzers", "theta1", Unit.RAD),
    ScanParameter.TAU: ("delays", "tau", Unit.FS),
    ScanParameter.TAU1: ("delays", "tau1", Unit.FS),
}

# 펌프 위상 내부 스윕: 한 프린지 주기당 샘플 수, 스윕 길이(펌프 파장 단위)
PHASE_SAMPLES_PER_PERIOD = 32
PHASE_SWEEP_WAVELENGTHS = 2


class PhaseLock(NamedTuple):
    """가장 많이 겹치는 교차 쌍의 프린지를 극값에 고정하는 펌프 위상 경로입니다.

    Attributes:
        path (float): 교차 쌍의 위상차를 0으로 만드는 extra_phase_path (nm)
        delta_m (int): 교차 쌍의 펄스 번호 차 (교차 쌍이 없으면 1)
    """

    path: float
    delta_m: int


def resolve_parameter(parameter: ScanParameter | str) -> ScanParameter:
    """문자열이나 열거형 값을 ScanParameter로 변환합니다."""
    try:
        return ScanParameter(parameter)
    except ValueError as exc:
        allowed = ", ".join(p.value for p in ScanParameter)
        raise InvalidArgumentError(
            f"unknown scan parameter {parameter!r}; expected one of: {allowed}."
        ) from exc


def resolve_reduce(reduce: ReduceMode | str) -> ReduceMode:
    """문자열이나 열거형 값을 ReduceMode로 변환합니다."""
    try:
        return ReduceMode(reduce)
    except ValueError as exc:
        allowed = ", ".join(r.value for r in ReduceMode)
        raise InvalidArgumentError(
            f"unknown reduce mode {reduce!r}; expected one of: {allowed}."
        ) from exc


def with_parameter(
    setup: ExperimentSetup, parameter: ScanParameter, value: float
) -> ExperimentSetup:
    """한 파라미터만 바꾼 새 구성을 만들고 불변식을 다시 검증합니다."""
    section, field, _ = SCAN_TARGETS[parameter]
    part: BaseModel = getattr(setup, section)
    try:
        updated = type(part).model_validate({**part.model_dump(), field: value})
    except ValidationError as exc:
        raise InvalidArgumentError(
            f"{section}.{field}={value!r} violates the setup invariants: "
            f"{exc.errors()[0]['msg']}"
        ) from exc
    return setup.model_copy(update={section: updated})


def phase_lock(setup: ExperimentSetup, arrays: TermArrays | None = None) -> PhaseLock:
    """교차 쌍 위상차가 0이 되는 펌프 위상 경로를 찾습니다.

    arrays는 extra_phase_path = 0 으로 만든 항이어야 합니다.
    """
    if arrays is None:
        arrays = build_term_arrays(with_parameter(setup, ScanParameter.PUMP_PHASE_PATH, 0.0))
    envelope = overlap_matrix(arrays, setup.model)
    cross = (
        (~arrays.is_rr)[:, None]
        & arrays.is_rr[None, :]
        & (arrays.pulse_index[:, None] != arrays.pulse_index[None, :])
    )
    if not cross.any():
        return PhaseLock(path=0.0, delta_m=1)

    # 포락선 겹침 최대, 같으면 앞쪽 쌍
    i, j = np.unravel_index(np.argmax(np.where(cross, envelope, -1.0)), envelope.shape)
    pulse_gap = int(arrays.pulse_index[i]) - int(arrays.pulse_index[j])
    # 위상차 φ_i - φ_j 는 조절값 k(fs)에 대해 Ω_p·pulse_gap·k 만큼 변합니다.
    difference = float(arrays.phase[i] - arrays.phase[j])
    knob = -difference / (setup.pump.omega * pulse_gap)
    return PhaseLock(path=knob * C_NM_PER_FS, delta_m=abs(pulse_gap))


def _visibility(rates: np.ndarray) -> float:
    top, bottom = float(rates.max()), float(rates.min())
    if top + bottom <= 0:
        return 0.0
    return min(max((top - bottom) / (top + bottom), 0.0), 1.0)


def phase_sweep_rates(setup: ExperimentSetup) -> np.ndarray:
    """펌프 위상 경로를 두 펌프 파장에 걸쳐 스윕한 계수율을 반환합니다.

    스윕은 위상 고정점에서 시작하고 가장 강한 프린지 한 주기당 32개 샘플을 둡니다.
    """
    base = with_parameter(setup, ScanParameter.PUMP_PHASE_PATH, 0.0)
    arrays = build_term_arrays(base)
    lock = phase_lock(base, arrays)
    wavelength = setup.pump.wavelength
    step = wavelength / (PHASE_SAMPLES_PER_PERIOD * lock.delta_m)
    n_samples = PHASE_SWEEP_WAVELENGTHS * PHASE_SAMPLES_PER_PERIOD * lock.delta_m + 1
    paths = lock.path + step * np.arange(n_samples)
    knobs = paths / C_NM_PER_FS
    phase = arrays.phase[None, :] + setup.pump.omega * np.outer(knobs, arrays.pulse_index)
    envelope = overlap_matrix(arrays, setup.model)
    return batch_rates(arrays.weight, phase, envelope, setup.model.normalization)


def phase_visibility(setup: ExperimentSetup) -> float:
    """펌프 위상 스윕으로 얻은 (max - min)/(max + min) 입니다."""
    return _visibility(phase_sweep_rates(setup))


def polarization_sweep_visibility(setup: ExperimentSetup) -> float:
    """θ₂ 고정, θ₁ ∈ [0, π/2] 스윕의 편광 간섭 가시도를 반환합니다.

    펌프 위상은 두 극값(고정점, 반 주기 이동)에 고정하고 큰 쪽을 택합니다.
    """
    base = with_parameter(setup, ScanParameter.PUMP_PHASE_PATH, 0.0)
    arrays = build_term_arrays(base)
    lock = phase_lock(base, arrays)
    envelope = overlap_matrix(arrays, setup.model)

    theta2 = setup.analyzers.theta2
    w_tt = -np.sin(POLARIZATION_THETA1_GRID) * math.cos(theta2)
    w_rr = np.cos(POLARIZATION_THETA1_GRID) * math.sin(theta2)
    weight = np.where(arrays.is_rr[None, :], w_rr[:, None], w_tt[:, None])

    best = 0.0
    half_period = setup.pump.wavelength / (2 * lock.delta_m)
    for path in (lock.path, lock.path + half_period):
        phase = arrays.phase + setup.pump.omega * arrays.pulse_index * (path / C_NM_PER_FS)
        rates = batch_rates(weight, phase, envelope, setup.model.normalization)
        best = max(best, _visibility(rates))
    return best


def evaluate_point(setup: ExperimentSetup, reduce: ReduceMode) -> float:
    """스캔 포인트 하나의 y 값을 계산합니다."""
    if reduce == ReduceMode.RATE:
        return setup_rate(setup)
    if reduce == ReduceMode.VISIBILITY:
        return phase_visibility(setup)
    return polarization_sweep_visibility(setup)


def scan(
    setup: ExperimentSetup,
    parameter: ScanParameter | str,
    value_range: tuple[float, float],
    steps: int,
    reduce: ReduceMode | str = ReduceMode.RATE,
    workers: int | None = None,
) -> Curve:
    """한 파라미터를 등간격으로 스캔한 Curve를 반환합니다.

    Args:
        setup (ExperimentSetup): 기준 구성
        parameter (ScanParameter | str): 스캔할 파라미터
        value_range (tuple[float, float]): (시작, 끝), 내부 단위 (fs, nm, rad)
        steps (int): 포인트 수, 2 이상
        reduce (ReduceMode | str): 포인트마다 기록할 값
        workers (int | None): 병렬 스레드 수, None이면 Config.SCAN_WORKERS

    Returns:
        Curve: x가 증가하는 스캔 결과

    Raises:
        InvalidArgumentError: 알 수 없는 파라미터, 2 미만의 steps, 비정상 범위
    """
    parameter = resolve_parameter(parameter)
    reduce = resolve_reduce(reduce)
    steps = require_int_at_least("steps", steps, 2)
    start, stop = float(value_range[0]), float(value_range[1])
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise InvalidArgumentError(f"scan range must be finite, got {value_range}.")
    if start >= stop:
        raise InvalidArgumentError(
            f"scan range must satisfy start < stop, got ({start}, {stop})."
        )

    xs = np.linspace(start, stop, steps)
    points_setups = [with_parameter(setup, parameter, float(x)) for x in xs]
    logger.info(
        "스캔 시작: parameter=%s, range=(%g, %g), steps=%d, reduce=%s",
        parameter.value,
        start,
        stop,
        steps,
        reduce.value,
    )
    ys = ordered_map(
        lambda point: evaluate_point(point, reduce),
        points_setups,
        workers=Config.SCAN_WORKERS if workers is None else workers,
    )
    y_kind = YKind.RATE if reduce == ReduceMode.RATE else YKind.VISIBILITY
    return Curve(
        parameter_name=parameter.value,
        x_unit=SCAN_TARGETS[parameter][2].value,
        y_kind=y_kind,
        points=[(float(x), float(y)) for x, y in zip(xs, ys)],
    )
