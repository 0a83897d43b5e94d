"""입력 순서를 보존하는 병렬 map 유틸 함수입니다."""

from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from app.config import Config, logger

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], workers: int | None = None
) -> list[R]:
    """items의 각 원소에 func를 적용하고 입력 순서대로 결과를 반환합니다.

    결과는 워커 수와 무관하게 항상 같은 순서로 조립됩니다.

    Args:
        func (Callable[[T], R]): 부작용 없는 함수
        items (Iterable[T]): 입력 값
        workers (int | None): 스레드 수. None이면 Config.SCAN_WORKERS

    Returns:
        list[R]: 입력 순서와 같은 결과 목록
    """
    values = list(items)
    workers = Config.SCAN_WORKERS if workers is None else workers
    if workers <= 1 or len(values) <= 1:
        return [func(value) for value in values]

    logger.debug("병렬 평가 시작: items=%d, workers=%d", len(values), workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, values))
