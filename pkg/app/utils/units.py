"""단위 변환과 광속 관련 유틸 함수들을 제공합니다.

내부 표현은 시간 fs, 길이 nm, 각도 rad 입니다.
"""

import math

from scipy.constants import c as SPEED_OF_LIGHT  # m/s, 정의값 299 792 458

from app.config import Unit
from app.validators.numbers import require_finite

# nm/fs 단위의 광속 (299.792458)
C_NM_PER_FS = SPEED_OF_LIGHT * 1e-6

TIME_UNITS = frozenset({Unit.FS, Unit.PS, Unit.NS})
LENGTH_UNITS = frozenset({Unit.NM, Unit.UM})
ANGLE_UNITS = frozenset({Unit.DEG, Unit.RAD})

_TIME_TO_FS = {Unit.FS: 1.0, Unit.PS: 1e3, Unit.NS: 1e6}
_LENGTH_TO_NM = {Unit.NM: 1.0, Unit.UM: 1e3}


def delay_from_length(length_um: float) -> float:
    """광학 경로 길이(μm)를 지연 시간(fs)으로 변환합니다.

    Args:
        length_um (float): 광학 경로 길이 (μm). 부호는 유지됩니다.

    Returns:
        float: L/c (fs)

    Raises:
        InvalidArgumentError: 유한하지 않은 값이 전달된 경우
    """
    length = require_finite("length", length_um)
    return length * 1e-6 / SPEED_OF_LIGHT * 1e15


def time_to_fs(value: float, unit: Unit) -> float:
    """시간 단위 값을 fs로 변환합니다."""
    return value * _TIME_TO_FS[unit]


def length_to_nm(value: float, unit: Unit) -> float:
    """길이 단위 값을 nm로 변환합니다."""
    return value * _LENGTH_TO_NM[unit]


def delay_to_fs(value: float, unit: Unit) -> float:
    """지연 값을 fs로 변환합니다. 길이 단위는 delay_from_length를 거칩니다."""
    if unit in LENGTH_UNITS:
        return delay_from_length(length_to_nm(value, unit) * 1e-3)
    return time_to_fs(value, unit)


def angle_to_rad(value: float, unit: Unit) -> float:
    """각도 값을 rad로 변환합니다."""
    if unit == Unit.DEG:
        return math.radians(value)
    return value


def path_to_time_fs(path_nm: float) -> float:
    """펌프 위상 조절용 광학 경로(nm)를 시간 지연(fs)으로 바꿉니다."""
    return path_nm / C_NM_PER_FS
