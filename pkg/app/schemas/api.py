"""HTTP 시뮬레이션 엔드포인트의 요청 스키마를 정의합니다."""

from pydantic import BaseModel, Field

from app.config import CurveFormat, ReduceMode, ScanParameter


class SimulationRequest(BaseModel):
    """설정 텍스트와 덮어쓰기를 담는 기본 요청입니다.

    Attributes:
        config (str): INI 형식 설정 텍스트, 비어 있으면 기본 구성
        overrides (list[str]): `section.key=value` 덮어쓰기 목록
    """

    config: str = ""
    overrides: list[str] = Field(default_factory=list)


class ScanRequest(SimulationRequest):
    """파라미터 스캔 요청입니다.

    Attributes:
        parameter (ScanParameter): 스캔할 파라미터
        start (str): 시작 값 (단위 포함, 예: "533 fs")
        stop (str): 끝 값 (단위 포함)
        steps (int): 포인트 수
        reduce (ReduceMode): 포인트마다 기록할 값
        format (CurveFormat): 응답 형식
    """

    parameter: ScanParameter
    start: str
    stop: str
    steps: int = Field(ge=2, le=10_000)
    reduce: ReduceMode = ReduceMode.RATE
    format: CurveFormat = CurveFormat.JSON
