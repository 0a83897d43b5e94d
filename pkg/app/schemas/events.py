"""몬테카를로 검출 이벤트와 동시계수 요약 스키마를 정의합니다."""

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from pydantic import Field, model_validator

from app.config import Detector
from app.schemas.base import FrozenModel


class EventRecord(FrozenModel):
    """검출기 클릭 하나의 기록입니다.

    Attributes:
        detector (Detector): D1 또는 D2
        timestamp (float): 절대 실험실 시간 (ps)
        frame_index (int): 펌프 반복 프레임 번호
    """

    detector: Detector
    timestamp: float
    frame_index: int = Field(ge=0)


@dataclass(frozen=True)
class EventStream:
    """열 단위 numpy 배열로 보관한 이벤트 스트림입니다.

    detector 배열은 D1=0, D2=1 로 인코딩합니다.
    """

    frame: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    detector: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    timestamp: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.float64))

    def __len__(self) -> int:
        """이벤트 수."""
        return int(self.timestamp.shape[0])

    def __iter__(self) -> Iterator[EventRecord]:
        """EventRecord를 순서대로 생성합니다."""
        for frame, det, stamp in zip(self.frame, self.detector, self.timestamp):
            yield EventRecord(
                detector=Detector.D1 if det == 0 else Detector.D2,
                timestamp=float(stamp),
                frame_index=int(frame),
            )

    @classmethod
    def from_records(cls, records: list[EventRecord]) -> "EventStream":
        """EventRecord 목록으로부터 스트림을 만듭니다."""
        return cls(
            frame=np.array([r.frame_index for r in records], dtype=np.int64),
            detector=np.array(
                [0 if r.detector == Detector.D1 else 1 for r in records], dtype=np.int8
            ),
            timestamp=np.array([r.timestamp for r in records], dtype=np.float64),
        )

    def is_sorted(self) -> bool:
        """타임스탬프 기준 비내림차순 여부."""
        return bool(np.all(np.diff(self.timestamp) >= 0))


class CoincidenceSummary(FrozenModel):
    """동시계수 회로가 보고하는 요약입니다.

    Attributes:
        n_frames (int): 펌프 프레임 수
        window (float): 동시계수 시간창 (ns)
        singles_d1 (int): D1 단일 계수
        singles_d2 (int): D2 단일 계수
        coincidences (int): 동시계수
        dt_histogram (list[tuple[float, int]]): (t_D2 - t_D1 bin 중심 ps, count)
    """

    n_frames: int = Field(ge=0)
    window: float = Field(gt=0)
    singles_d1: int = Field(ge=0)
    singles_d2: int = Field(ge=0)
    coincidences: int = Field(ge=0)
    dt_histogram: list[tuple[float, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_counts(self) -> "CoincidenceSummary":
        """동시계수는 단일 계수를 넘을 수 없고, 히스토그램 합과 같아야 합니다."""
        if self.coincidences > min(self.singles_d1, self.singles_d2):
            raise ValueError("coincidences must not exceed either singles count")
        if self.dt_histogram and sum(c for _, c in self.dt_histogram) != self.coincidences:
            raise ValueError("histogram counts must sum to coincidences")
        return self
