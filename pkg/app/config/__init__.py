"""애플리케이션 설정/상수의 공개 re-export 모듈입니다."""

from .config import Config, logger
from .enums import (
    CurveFormat,
    Detector,
    PathKind,
    ReduceMode,
    ScanParameter,
    Unit,
    YKind,
)
