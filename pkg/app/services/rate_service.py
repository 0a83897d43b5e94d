"""동시계수율 계산 서비스입니다.

가우시안 겹침 행렬을 이용한 닫힌 형식 계수율과, (t₊, t₁₂) 평면의 중점 규칙
격자 적분으로 같은 값을 직접 계산하는 검증용 오라클을 제공합니다.
모든 계수율은 단위 가중치 파속 하나가 1로 적분되는 임의 단위입니다.
"""

import math

import numpy as np

from app.config import logger
from app.schemas.amplitude import AmplitudeTerm
from app.schemas.curves import GridSpec
from app.schemas.setup import ExperimentSetup, ModelParams
from app.services.model_service import (
    TermArrays,
    build_amplitude_terms,
    cross_pair_overlaps,
    overlap_matrix,
    terms_to_arrays,
)
from app.utils.errors import GridCoverageError, InvalidArgumentError

# 격자가 덮어야 하는 포락선 폭 배수
COVERAGE_WIDTHS = 6.0
# covering_grid가 잡는 여유 폭 배수
GRID_PADDING_WIDTHS = 8.0


def batch_rates(
    weight: np.ndarray,
    phase: np.ndarray,
    envelope: np.ndarray,
    normalization: float = 1.0,
) -> np.ndarray:
    """가중치/위상 행 묶음에 대한 계수율 norm·Re(c M c̄) 를 한 번에 계산합니다.

    Args:
        weight (np.ndarray): (K, n) 또는 (n,) 가중치
        phase (np.ndarray): (K, n) 또는 (n,) 위상 (rad)
        envelope (np.ndarray): (n, n) 실수 포락선 겹침 행렬
        normalization (float): 계수율 스케일

    Returns:
        np.ndarray: (K,) 계수율, 반올림 오차로 생긴 음수는 0으로 자릅니다.
    """
    amplitude = np.atleast_2d(weight * np.exp(1j * phase))
    rates = np.einsum("ki,ij,kj->k", amplitude, envelope, amplitude.conj()).real
    return np.clip(normalization * rates, 0.0, None)


def _rate_from_arrays(arrays: TermArrays, model: ModelParams) -> float:
    envelope = overlap_matrix(arrays, model)
    return float(batch_rates(arrays.weight, arrays.phase, envelope, model.normalization)[0])


def coincidence_rate(terms: list[AmplitudeTerm], model: ModelParams) -> float:
    """닫힌 형식 동시계수율 norm·[Σ|wᵢ|² + 2 Re Σ_{i<j} wᵢ w̄ⱼ overlap(i, j)] 입니다.

    Args:
        terms (list[AmplitudeTerm]): 진폭 항 목록 (비어 있으면 안 됨)
        model (ModelParams): 포락선 모델

    Returns:
        float: 0 이상의 계수율

    Raises:
        InvalidArgumentError: 항 목록이 비어 있는 경우
    """
    if not terms:
        raise InvalidArgumentError("coincidence_rate needs at least one amplitude term.")
    return _rate_from_arrays(terms_to_arrays(terms), model)


def incoherent_rate(terms: list[AmplitudeTerm], model: ModelParams) -> float:
    """간섭항을 뺀 계수율 norm·Σ|wᵢ|² 를 반환합니다."""
    return model.normalization * float(sum(abs(t.weight) ** 2 for t in terms))


def setup_rate(setup: ExperimentSetup) -> float:
    """실험 구성에서 바로 닫힌 형식 계수율을 계산합니다."""
    return coincidence_rate(build_amplitude_terms(setup), setup.model)


def eta(setup: ExperimentSetup) -> float:
    """인접 펄스 (TT, RR) 쌍의 최대 |overlap| η(T) 를 반환합니다.

    Raises:
        InvalidArgumentError: 펄스가 2개 미만인 경우
    """
    if setup.pump.n_pulses < 2:
        raise InvalidArgumentError(
            f"eta needs at least two pump pulses, got n_pulses={setup.pump.n_pulses}."
        )
    return min(cross_pair_overlaps(setup).get(1, 0.0), 1.0)


def _check_coverage(arrays: TermArrays, model: ModelParams, grid: GridSpec) -> None:
    reach_plus = COVERAGE_WIDTHS * model.sigma_plus
    reach_12 = COVERAGE_WIDTHS * model.sigma_minus
    missing = []
    if arrays.mu_plus.min() - reach_plus < grid.t_plus_range[0] or (
        arrays.mu_plus.max() + reach_plus > grid.t_plus_range[1]
    ):
        missing.append(
            f"t_plus needs [{arrays.mu_plus.min() - reach_plus:.6g}, "
            f"{arrays.mu_plus.max() + reach_plus:.6g}] fs, grid has {grid.t_plus_range}"
        )
    if arrays.mu_12.min() - reach_12 < grid.t_12_range[0] or (
        arrays.mu_12.max() + reach_12 > grid.t_12_range[1]
    ):
        missing.append(
            f"t_12 needs [{arrays.mu_12.min() - reach_12:.6g}, "
            f"{arrays.mu_12.max() + reach_12:.6g}] fs, grid has {grid.t_12_range}"
        )
    if missing:
        raise GridCoverageError("grid does not cover the term supports: " + "; ".join(missing))


def covering_grid(
    terms: list[AmplitudeTerm], model: ModelParams, steps_per_axis: int
) -> GridSpec:
    """모든 항의 중심 ± 8폭을 덮는 격자를 만듭니다."""
    if not terms:
        raise InvalidArgumentError("covering_grid needs at least one amplitude term.")
    arrays = terms_to_arrays(terms)
    pad_plus = GRID_PADDING_WIDTHS * model.sigma_plus
    pad_12 = GRID_PADDING_WIDTHS * model.sigma_minus
    return GridSpec(
        t_plus_range=(
            float(arrays.mu_plus.min() - pad_plus),
            float(arrays.mu_plus.max() + pad_plus),
        ),
        t_12_range=(
            float(arrays.mu_12.min() - pad_12),
            float(arrays.mu_12.max() + pad_12),
        ),
        steps_per_axis=steps_per_axis,
    )


def _midpoints(bounds: tuple[float, float], steps: int) -> tuple[np.ndarray, float]:
    step = (bounds[1] - bounds[0]) / steps
    return bounds[0] + (np.arange(steps) + 0.5) * step, step


def grid_rate_oracle(
    terms: list[AmplitudeTerm], model: ModelParams, grid: GridSpec
) -> float:
    """|Σ 진폭|² 을 (t₊, t₁₂) 격자에서 중점 규칙으로 직접 적분합니다.

    (t₁, t₂) → (t₊, t₁₂) 변환의 야코비안은 1 입니다.

    Args:
        terms (list[AmplitudeTerm]): 진폭 항 목록
        model (ModelParams): 포락선 모델
        grid (GridSpec): 적분 영역과 격자 수

    Returns:
        float: 0 이상의 격자 적분 계수율

    Raises:
        GridCoverageError: 격자가 어떤 항의 중심 ± 6폭을 덮지 못하는 경우
    """
    if not terms:
        raise InvalidArgumentError("grid_rate_oracle needs at least one amplitude term.")
    arrays = terms_to_arrays(terms)
    _check_coverage(arrays, model, grid)

    t_plus, h_plus = _midpoints(grid.t_plus_range, grid.steps_per_axis)
    t_12, h_12 = _midpoints(grid.t_12_range, grid.steps_per_axis)
    scale = (2 * math.pi * model.sigma_plus * model.sigma_minus) ** -0.5
    # 포락선이 두 축으로 인수분해되므로 field = Σ cᵢ gᵢ(t₊) ⊗ hᵢ(t₁₂)
    g_plus = np.exp(
        -((t_plus[None, :] - arrays.mu_plus[:, None]) ** 2) / (4 * model.sigma_plus**2)
    )
    g_12 = np.exp(
        -((t_12[None, :] - arrays.mu_12[:, None]) ** 2) / (4 * model.sigma_minus**2)
    )
    coefficient = scale * arrays.weight * np.exp(1j * arrays.phase)
    field = (g_plus.T * coefficient) @ g_12
    total = float(np.sum(np.abs(field) ** 2)) * h_plus * h_12
    logger.debug(
        "격자 적분: steps=%d, h_plus=%.4g fs, h_12=%.4g fs",
        grid.steps_per_axis,
        h_plus,
        h_12,
    )
    return model.normalization * total
