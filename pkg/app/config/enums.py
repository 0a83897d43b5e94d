"""도메인 전반에서 사용하는 열거형 상수들을 정의합니다."""

from enum import Enum


class Unit(str, Enum):
    """설정 파일과 CLI에서 허용하는 단위 토큰입니다."""

    NM = "nm"
    UM = "um"
    FS = "fs"
    PS = "ps"
    NS = "ns"
    DEG = "deg"
    RAD = "rad"
    DIMENSIONLESS = "dimensionless"


class PathKind(str, Enum):
    """동시계수를 만드는 두 빔스플리터 경로입니다.

    TT는 signal/idler가 모두 투과, RR은 모두 반사된 경우입니다.
    정렬 순서는 TT < RR 입니다.
    """

    TT = "TT"
    RR = "RR"


class Detector(str, Enum):
    """검출기 식별자입니다."""

    D1 = "D1"
    D2 = "D2"


class ScanParameter(str, Enum):
    """스캔 가능한 파라미터 목록입니다."""

    INTER_PULSE_DELAY = "inter_pulse_delay"
    PUMP_PHASE_PATH = "pump_phase_path"
    THETA1 = "theta1"
    TAU = "tau"
    TAU1 = "tau1"


class ReduceMode(str, Enum):
    """스캔 포인트마다 기록할 값의 종류입니다.

    Attributes:
        RATE: 동시계수율 그대로 기록
        VISIBILITY: 펌프 위상을 내부에서 스윕한 가시도
        POLARIZATION_VISIBILITY: theta1을 한 lobe([0, π/2]) 스윕한 편광 간섭 가시도
    """

    RATE = "rate"
    VISIBILITY = "visibility"
    POLARIZATION_VISIBILITY = "polarization"


class YKind(str, Enum):
    """Curve의 y 값 종류입니다."""

    RATE = "RATE"
    VISIBILITY = "VISIBILITY"
    COUNTS = "COUNTS"


class CurveFormat(str, Enum):
    """Curve 직렬화 형식입니다."""

    CSV = "csv"
    JSON = "json"
