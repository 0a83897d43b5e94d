"""시뮬레이터 전반에서 사용하는 예외 클래스들을 정의합니다.

모든 예외는 SimulationError를 상속하며, CLI와 HTTP 계층은 이 기반 클래스를 잡아
종료 코드 1 또는 JSON 오류 응답으로 변환합니다.
"""

from typing import Any, Optional


class SimulationError(Exception):
    """시뮬레이터 관련 에러를 나타내는 기반 예외 클래스입니다."""

    def __init__(self, message: str):
        """SimulationError 객체를 초기화합니다.

        Args:
            message (str): 에러 메시지
        """
        super().__init__(message)
        self.message = message

    def render(self) -> str:
        """사람이 읽을 수 있는 진단 메시지를 반환합니다."""
        return self.message

    def to_dict(self) -> dict[str, Any]:
        """JSON 응답 본문으로 사용할 dict를 반환합니다."""
        return {"error": type(self).__name__, "detail": self.message}


class InvalidArgumentError(SimulationError, ValueError):
    """연산의 사전조건을 위반한 인자가 전달된 경우 발생하는 에러입니다."""


class ParseError(SimulationError):
    """설정 텍스트나 단위 토큰의 어휘/문법 오류입니다.

    Attributes:
        line (int): 1부터 시작하는 줄 번호
        column (int): 1부터 시작하는 열 번호
        snippet (str): 오류가 발생한 원본 줄
    """

    def __init__(self, message: str, line: int = 1, column: int = 1, snippet: str = ""):
        """ParseError 객체를 초기화합니다."""
        super().__init__(message)
        self.line = max(1, line)
        self.column = max(1, column)
        self.snippet = snippet

    def render(self) -> str:
        """줄/열 위치와 캐럿을 포함한 진단 메시지를 반환합니다."""
        text = f"line {self.line}, column {self.column}: {self.message}"
        if self.snippet:
            caret = " " * (self.column - 1) + "^"
            text += f"\n    {self.snippet}\n    {caret}"
        return text

    def to_dict(self) -> dict[str, Any]:
        """위치 정보를 포함한 JSON 본문을 반환합니다."""
        return {
            "error": "ParseError",
            "detail": self.message,
            "line": self.line,
            "column": self.column,
            "snippet": self.snippet,
        }


class SetupValidationError(SimulationError):
    """파싱된 값이 도메인 불변식을 위반한 경우 발생하는 에러입니다.

    첫 번째 위반만이 아니라 모든 위반 항목을 errors에 담습니다.
    """

    def __init__(self, errors: list[str]):
        """SetupValidationError 객체를 초기화합니다.

        Args:
            errors (list[str]): 위반된 불변식 설명 목록
        """
        super().__init__(
            f"{len(errors)} invariant violation(s): " + "; ".join(errors)
        )
        self.errors = list(errors)

    def render(self) -> str:
        """위반 항목을 줄 단위로 나열합니다."""
        return "invalid setup:\n" + "\n".join(f"  - {err}" for err in self.errors)

    def to_dict(self) -> dict[str, Any]:
        """위반 항목 목록을 포함한 JSON 본문을 반환합니다."""
        return {"error": "SetupValidationError", "detail": self.errors}


class GridCoverageError(SimulationError):
    """적분 격자가 진폭 항의 지지 영역을 덮지 못할 때 발생하는 에러입니다."""


class FitError(SimulationError):
    """프린지 피팅이 제한된 반복 안에 수렴하지 못했을 때 발생하는 에러입니다.

    Attributes:
        best (Optional[Any]): 지금까지 얻은 최선의 반복값 (FringeFit)
    """

    def __init__(self, message: str, best: Optional[Any] = None):
        """FitError 객체를 초기화합니다."""
        super().__init__(message)
        self.best = best


class UnsortedStreamError(SimulationError):
    """동시계수 계산에 시간순으로 정렬되지 않은 이벤트가 전달된 경우의 에러입니다."""


class SamplingError(SimulationError):
    """기각 샘플링이 제한된 제안 횟수 안에 필요한 표본을 얻지 못한 경우의 에러입니다."""
