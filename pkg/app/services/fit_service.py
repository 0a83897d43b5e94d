"""프린지 가시도 추출과 최소제곱 피팅 서비스입니다."""

import math

import numpy as np
from scipy.optimize import least_squares

from app.config import Config, YKind, logger
from app.schemas.curves import Curve, FringeFit
from app.utils.errors import FitError, InvalidArgumentError
from app.validators.numbers import require_positive

# 피팅 전 요구되는 주기당 최소 샘플 수
MIN_POINTS_PER_PERIOD = 8
MIN_VISIBILITY_POINTS = 3
# y = mean - amplitude·cos(2πx/period + phase) 의 파라미터 수
N_FIT_PARAMETERS = 4


def visibility_from_curve(curve: Curve) -> float:
    """곡선의 (max y - min y)/(max y + min y) 를 반환합니다.

    Raises:
        InvalidArgumentError: 점이 3개 미만이거나 계수율 곡선이 아닌 경우
    """
    if curve.y_kind not in (YKind.RATE, YKind.COUNTS):
        raise InvalidArgumentError(
            f"visibility_from_curve needs a RATE or COUNTS curve, got {curve.y_kind.value}."
        )
    if len(curve.points) < MIN_VISIBILITY_POINTS:
        raise InvalidArgumentError(
            f"visibility_from_curve needs >= 3 points, got {len(curve.points)}."
        )
    ys = np.asarray(curve.ys)
    top, bottom = float(ys.max()), float(ys.min())
    if top + bottom == 0:
        return 0.0
    return (top - bottom) / (top + bottom)


def _fringe(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    mean, amplitude, period, phase = params
    return mean - amplitude * np.cos(2 * math.pi * x / period + phase)


def _initial_guess(x: np.ndarray, y: np.ndarray, period: float) -> np.ndarray:
    """주기를 고정한 선형 최소제곱으로 mean, amplitude, phase를 추정합니다."""
    angle = 2 * math.pi * x / period
    design = np.column_stack([np.ones_like(x), np.cos(angle), np.sin(angle)])
    (mean, b, c), *_ = np.linalg.lstsq(design, y, rcond=None)
    # b·cos + c·sin = -A·cos(angle + φ)
    return np.array([mean, math.hypot(b, c), period, math.atan2(c, -b)])


def _to_fit(params: np.ndarray, residual: np.ndarray, iterations: int) -> FringeFit:
    mean, amplitude, period, phase = (float(p) for p in params)
    if amplitude < 0:
        amplitude, phase = -amplitude, phase + math.pi
    if period < 0:
        period, phase = -period, -phase
    phase = math.remainder(phase, 2 * math.pi)
    if mean < 0:
        raise FitError(f"fit converged to a negative mean level {mean:.6g}.")
    if amplitude > mean * (1 + 1e-9):
        raise FitError(
            f"fit amplitude {amplitude:.6g} exceeds the mean level {mean:.6g}; "
            "visibility would exceed 1."
        )
    return FringeFit(
        mean_level=mean,
        amplitude=amplitude,
        period=period,
        phase_offset=phase,
        visibility=min(1.0, amplitude / mean) if mean > 0 else 0.0,
        rms_residual=float(np.sqrt(np.mean(residual**2))),
        iterations=iterations,
    )


def fit_fringe(
    curve: Curve,
    expected_period: float,
    sigma: list[float] | None = None,
    max_iterations: int | None = None,
) -> FringeFit:
    """y = mean - amplitude·cos(2πx/period + phase) 를 최소제곱 피팅합니다.

    주기는 expected_period에서 시작해 함께 정밀화되고, 나머지 초기값은 주기를
    고정한 선형 최소제곱으로 정합니다. 최적화는 유한차분 야코비안을 쓰는
    Levenberg-Marquardt 입니다.

    Args:
        curve (Curve): 피팅할 곡선
        expected_period (float): x 단위의 예상 주기
        sigma (list[float] | None): 점별 표준편차, 주어지면 가중 잔차를 사용
        max_iterations (int | None): 최대 반복 수, None이면 Config.FIT_MAX_ITERATIONS

    Returns:
        FringeFit: 피팅 결과. rms_residual은 가중치 없는 잔차의 RMS 입니다.

    Raises:
        InvalidArgumentError: 점이 부족하거나 주기당 샘플이 8개 미만인 경우
        FitError: 반복 한도 안에 수렴하지 못한 경우 (best에 최선 반복값)
    """
    expected_period = require_positive("expected_period", expected_period)
    x = np.asarray(curve.xs, dtype=np.float64)
    y = np.asarray(curve.ys, dtype=np.float64)
    if x.size <= N_FIT_PARAMETERS:
        raise InvalidArgumentError(f"fit_fringe needs > 4 points, got {x.size}.")
    spacing = (x[-1] - x[0]) / (x.size - 1)
    if spacing > expected_period / MIN_POINTS_PER_PERIOD * (1 + 1e-9):
        raise InvalidArgumentError(
            f"fit_fringe needs >= {MIN_POINTS_PER_PERIOD} points per period; "
            f"spacing {spacing:.6g} exceeds {expected_period / MIN_POINTS_PER_PERIOD:.6g}."
        )
    weights = np.ones_like(y) if sigma is None else 1.0 / np.asarray(sigma, dtype=float)
    if weights.shape != y.shape or not np.all(np.isfinite(weights)):
        raise InvalidArgumentError("sigma must give one finite, nonzero value per point.")

    iterations = Config.FIT_MAX_ITERATIONS if max_iterations is None else max_iterations
    start = _initial_guess(x, y, expected_period)

    def residuals(params: np.ndarray) -> np.ndarray:
        return (_fringe(params, x) - y) * weights

    result = least_squares(
        residuals,
        start,
        method="lm",
        ftol=1e-12,
        xtol=1e-12,
        gtol=1e-12,
        max_nfev=iterations * (N_FIT_PARAMETERS + 1),
    )
    best = _to_fit(result.x, _fringe(result.x, x) - y, int(result.nfev))
    if result.status <= 0:
        logger.warning("프린지 피팅 실패: %s", result.message)
        raise FitError(f"fringe fit did not converge: {result.message}", best=best)

    logger.debug(
        "프린지 피팅 완료: period=%.6g, visibility=%.6g, nfev=%d",
        best.period,
        best.visibility,
        result.nfev,
    )
    return best
