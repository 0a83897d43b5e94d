import threading
import time

import pytest

from app.utils.parallel import ordered_map


def slow_square(value: int) -> int:
    # 뒤쪽 입력이 먼저 끝나도록 지연을 줍니다.
    time.sleep(0.001 * (10 - value))
    return value * value


@pytest.mark.parametrize("workers", [None, 1, 2, 8])
def test_ordered_map_keeps_input_order(workers: int | None) -> None:
    assert ordered_map(slow_square, range(10), workers=workers) == [
        v * v for v in range(10)
    ]


def test_ordered_map_runs_serially_with_one_worker() -> None:
    seen: set[int] = set()

    def record(value: int) -> int:
        seen.add(threading.get_ident())
        return value

    ordered_map(record, range(5), workers=1)

    assert seen == {threading.get_ident()}


def test_ordered_map_handles_empty_input() -> None:
    assert ordered_map(slow_square, [], workers=4) == []
