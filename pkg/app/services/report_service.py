"""CLI와 HTTP 계층이 공유하는 JSON 보고서를 만드는 서비스입니다."""

import math
from typing import Any

from app.config import Config
from app.schemas.setup import ExperimentSetup
from app.services.model_service import build_amplitude_terms, interference_condition
from app.services.montecarlo_service import analytic_singles_rate, coincidence_probability
from app.services.rate_service import (
    coincidence_rate,
    covering_grid,
    grid_rate_oracle,
    incoherent_rate,
)


def check_report(setup: ExperimentSetup) -> dict[str, Any]:
    """간섭 조건 보고서와 분석기 각도(도 단위)를 담은 dict를 반환합니다."""
    report = interference_condition(setup)
    return {
        **report.model_dump(),
        "theta1_deg": math.degrees(setup.analyzers.theta1),
        "theta2_deg": math.degrees(setup.analyzers.theta2),
    }


def rate_report(setup: ExperimentSetup) -> dict[str, Any]:
    """닫힌 형식 계수율, 비간섭 수준, 검출기별 단일 계수율을 반환합니다."""
    terms = build_amplitude_terms(setup)
    return {
        "coincidence_rate": coincidence_rate(terms, setup.model),
        "incoherent_rate": incoherent_rate(terms, setup.model),
        "coincidence_probability": coincidence_probability(setup),
        "singles_rate_per_frame": analytic_singles_rate(setup),
        "n_terms": len(terms),
    }


def oracle_report(setup: ExperimentSetup, steps_per_axis: int | None = None) -> dict[str, Any]:
    """닫힌 형식 계수율과 격자 적분 계수율의 차이를 반환합니다.

    Raises:
        GridCoverageError: 격자가 진폭 항을 덮지 못하는 경우
    """
    steps = Config.DEFAULT_GRID_STEPS if steps_per_axis is None else steps_per_axis
    terms = build_amplitude_terms(setup)
    closed_form = coincidence_rate(terms, setup.model)
    grid = covering_grid(terms, setup.model, steps)
    numeric = grid_rate_oracle(terms, setup.model, grid)
    difference = abs(numeric - closed_form)
    return {
        "steps_per_axis": steps,
        "closed_form_rate": closed_form,
        "grid_rate": numeric,
        "absolute_difference": difference,
        "relative_difference": difference / closed_form if closed_form > 0 else difference,
    }
