"""닫힌 형식 프린지 예측 서비스입니다.

R(φ) = mean - amplitude·cos(Ω_p φ + const) 형태의 펌프 위상 프린지와,
θ₂ 고정 상태에서 θ₁ 한 lobe를 스윕했을 때의 편광 간섭 가시도를 계산합니다.
"""

import math

import numpy as np

from app.schemas.curves import FringePrediction
from app.utils.errors import InvalidArgumentError
from app.validators.numbers import require_finite

# θ₁ ∈ [0, π/2] 스윕 격자, 0.125° 간격 (π/4가 격자점에 포함됨)
POLARIZATION_THETA1_GRID = np.linspace(0.0, math.pi / 2, 721)


def _rate_envelope(
    theta1: np.ndarray | float, theta2: float, eta: float, n: int, delta_m: int
) -> tuple[np.ndarray, np.ndarray]:
    s1, c1 = np.sin(theta1), np.cos(theta1)
    s2, c2 = math.sin(theta2), math.cos(theta2)
    mean = n * (s1**2 * c2**2 + c1**2 * s2**2)
    # 부호를 유지한 교차항 계수; 위상 고정 상태에서 cos = ±1
    cross = 2 * (n - delta_m) * s1 * c2 * c1 * s2 * eta
    return np.asarray(mean), np.asarray(cross)


def polarization_visibility(theta2: float, eta: float, n: int, delta_m: int) -> float:
    """θ₂ 고정, 펌프 위상 고정 상태에서 θ₁ ∈ [0, π/2] 스윕의 가시도를 반환합니다.

    두 극값 위상(cos = +1, -1) 중 큰 쪽을 선택합니다.
    """
    mean, cross = _rate_envelope(POLARIZATION_THETA1_GRID, theta2, eta, n, delta_m)
    best = 0.0
    for sign in (1.0, -1.0):
        rate = np.clip(mean - sign * cross, 0.0, None)
        top, bottom = float(rate.max()), float(rate.min())
        if top + bottom > 0:
            best = max(best, (top - bottom) / (top + bottom))
    return best


def predicted_fringe(
    theta1: float, theta2: float, eta: float, n: int, delta_m: int
) -> FringePrediction:
    """닫힌 형식 프린지 파라미터를 계산합니다.

    mean = n(sin²θ₁cos²θ₂ + cos²θ₁sin²θ₂),
    amplitude = 2(n - Δm)|sinθ₁cosθ₂cosθ₁sinθ₂|·η 입니다.

    Args:
        theta1 (float): 분석기 1 각도 (rad)
        theta2 (float): 분석기 2 각도 (rad)
        eta (float): 포락선 겹침 계수 [0, 1]
        n (int): 펄스 수
        delta_m (int): 펄스 번호 차

    Returns:
        FringePrediction: mean, amplitude, visibility, polarization_visibility
    """
    theta1 = require_finite("theta1", theta1)
    theta2 = require_finite("theta2", theta2)
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgumentError(f"eta must lie in [0, 1], got {eta}.")
    if n < 1 or delta_m < 1 or delta_m > n:
        raise InvalidArgumentError(f"need 1 <= delta_m <= n, got delta_m={delta_m}, n={n}.")

    mean, cross = _rate_envelope(theta1, theta2, eta, n, delta_m)
    mean_value = float(mean)
    amplitude = abs(float(cross))
    visibility = amplitude / mean_value if mean_value > 0 else 0.0
    return FringePrediction(
        mean=mean_value,
        amplitude=amplitude,
        visibility=min(visibility, 1.0),
        polarization_visibility=polarization_visibility(theta2, eta, n, delta_m),
    )
