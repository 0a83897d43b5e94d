"""몬테카를로 검출 이벤트 생성과 동시계수 계산 서비스입니다.

프레임마다 확률 pair_probability로 광자쌍이 생기고, 동시계수를 만드는 경우의
검출 시각은 biphoton 결합 밀도 |Σ wᵢGᵢe^{iφᵢ}|² 에서 기각 샘플링으로 뽑습니다.
프레임은 4096개 단위 블록으로 묶고, 블록 b는 SeedSequence(seed, spawn_key=(b,))
부분 스트림을 사용하므로 블록 평가 순서와 병렬도에 관계없이 결과가 같습니다.
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

from app.config import logger
from app.schemas.amplitude import AmplitudeTerm
from app.schemas.events import CoincidenceSummary, EventStream
from app.schemas.setup import ExperimentSetup, ModelParams
from app.services.model_service import build_amplitude_terms, terms_to_arrays
from app.services.rate_service import coincidence_rate
from app.utils.errors import InvalidArgumentError, SamplingError, UnsortedStreamError
from app.utils.parallel import ordered_map
from app.validators.numbers import require_int_at_least

FRAMES_PER_BLOCK = 4096
# 타임스탬프 반올림 자릿수 (ps 단위 소수점 아래, 즉 1 fs)
TIMESTAMP_DECIMALS = 3
DEFAULT_HISTOGRAM_BINS = 60
# 기각 샘플링 한 번에 제안하는 최소 후보 수
MIN_PROPOSAL_BATCH = 256
# sample 한 번에 허용하는 제안 라운드 수
MAX_PROPOSAL_ROUNDS = 1000

_D1, _D2 = 0, 1


@dataclass
class PairSampler:
    """biphoton 결합 밀도에서 (t₊, t₁₂)를 뽑는 기각 샘플러입니다.

    제안 분포는 q ∝ Σ|wᵢ|²|Gᵢ|² 이고, Cauchy-Schwarz에 의해
    |Σ cᵢgᵢ|² <= M·Σ|cᵢ|²|gᵢ|² (M = 0이 아닌 가중치 수) 이므로 M이 상한입니다.

    Attributes:
        terms (list[AmplitudeTerm]): 진폭 항 목록
        model (ModelParams): 포락선 폭
        proposed (int): 지금까지 제안한 후보 수
        accepted (int): 지금까지 채택한 후보 수
    """

    terms: list[AmplitudeTerm]
    model: ModelParams
    proposed: int = 0
    accepted: int = 0

    def __post_init__(self) -> None:
        """제안 분포와 상한을 준비합니다."""
        if not self.terms:
            raise InvalidArgumentError("sampling needs at least one amplitude term.")
        arrays = terms_to_arrays(self.terms)
        power = np.abs(arrays.weight) ** 2
        total = float(power.sum())
        if total <= 0:
            raise InvalidArgumentError("cannot sample pair times: total weight is zero.")
        self._mu_plus = arrays.mu_plus
        self._mu_12 = arrays.mu_12
        self._coefficient = arrays.weight * np.exp(1j * arrays.phase)
        self._probability = power / total
        self._bound = int(np.count_nonzero(power))

    @property
    def bound(self) -> int:
        """기각 샘플링 상한 M."""
        return self._bound

    @property
    def acceptance_rate(self) -> float:
        """지금까지의 채택률 (제안이 없으면 0)."""
        return self.accepted / self.proposed if self.proposed else 0.0

    def _envelopes(self, t_plus: np.ndarray, t_12: np.ndarray) -> np.ndarray:
        # 정규화 상수는 목표/제안 비에서 약분됩니다.
        return np.exp(
            -((t_plus[:, None] - self._mu_plus[None, :]) ** 2)
            / (4 * self.model.sigma_plus**2)
            - (t_12[:, None] - self._mu_12[None, :]) ** 2
            / (4 * self.model.sigma_minus**2)
        )

    def propose(self, rng: Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        """제안 분포 q ∝ Σ|wᵢ|²|Gᵢ|² 에서 size개의 (t₊, t₁₂)를 기각 없이 뽑습니다.

        한쪽 검출기만 클릭하는 경우처럼 경로 간 간섭이 없는 시각 분포에 사용합니다.
        """
        component = rng.choice(self._probability.size, size=size, p=self._probability)
        t_plus = rng.normal(self._mu_plus[component], self.model.sigma_plus)
        t_12 = rng.normal(self._mu_12[component], self.model.sigma_minus)
        return t_plus, t_12

    def sample(self, rng: Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        """size개의 (t₊, t₁₂) 표본을 fs 단위로 반환합니다.

        Raises:
            SamplingError: MAX_PROPOSAL_ROUNDS 라운드 안에 표본이 모이지 않은 경우
                (결합 밀도가 0이거나 거의 상쇄되는 구성)
        """
        plus_parts: list[np.ndarray] = []
        diff_parts: list[np.ndarray] = []
        needed = size
        rounds = 0
        while needed > 0:
            if rounds == MAX_PROPOSAL_ROUNDS:
                raise SamplingError(
                    f"rejection sampling accepted {size - needed}/{size} samples "
                    f"after {self.proposed} proposals; "
                    "the coincidence density is (nearly) zero."
                )
            rounds += 1
            batch = max(MIN_PROPOSAL_BATCH, 2 * self._bound * needed)
            t_plus, t_12 = self.propose(rng, batch)
            u = rng.random(batch)

            g = self._envelopes(t_plus, t_12)
            target = np.abs(g @ self._coefficient) ** 2
            proposal = (g**2) @ (np.abs(self._coefficient) ** 2)
            keep = u * self._bound * proposal < target

            self.proposed += batch
            self.accepted += int(keep.sum())
            plus_parts.append(t_plus[keep][:needed])
            diff_parts.append(t_12[keep][:needed])
            needed -= plus_parts[-1].size
        return np.concatenate(plus_parts), np.concatenate(diff_parts)


def detection_times(
    t_plus: np.ndarray, t_12: np.ndarray, tau: float
) -> tuple[np.ndarray, np.ndarray]:
    """(t₊, t₁₂) 를 검출 시각 t₁ = t₊ + τ + (t₁₂-τ)/2, t₂ = t₊ + τ - (t₁₂-τ)/2 로 바꿉니다."""
    half = (t_12 - tau) / 2
    return t_plus + tau + half, t_plus + tau - half


def sample_pair_times(
    terms: list[AmplitudeTerm],
    model: ModelParams,
    rng: Generator,
    tau: float = 0.0,
) -> tuple[float, float]:
    """결합 밀도에서 검출 시각 쌍 (t₁, t₂) 하나를 fs 단위로 뽑습니다.

    Raises:
        InvalidArgumentError: 항이 없거나 가중치 합이 0인 경우
    """
    t_plus, t_12 = PairSampler(terms, model).sample(rng, 1)
    t1, t2 = detection_times(t_plus, t_12, tau)
    return float(t1[0]), float(t2[0])


def coincidence_probability(setup: ExperimentSetup) -> float:
    """쌍 하나가 두 검출기 모두에 도달할 확률 P_c = R/(4N·norm) 입니다.

    45°/45° 단일 펄스에서 1/8 (빔스플리터 경로 2개 × 1/4 × 분석기 1/4) 입니다.
    """
    rate = coincidence_rate(build_amplitude_terms(setup), setup.model)
    probability = rate / (4 * setup.pump.n_pulses * setup.model.normalization)
    return min(probability, 0.5)


def analytic_singles_rate(setup: ExperimentSetup) -> float:
    """검출기당 프레임당 단일 계수율 pair_probability·efficiency/2 입니다."""
    detectors = setup.detectors
    return detectors.pair_probability * detectors.efficiency / 2


def expected_coincidences(setup: ExperimentSetup, n_frames: int) -> float:
    """n_frames 동안 기대되는 동시계수 n·p·P_c·efficiency² 입니다."""
    detectors = setup.detectors
    return (
        n_frames
        * detectors.pair_probability
        * coincidence_probability(setup)
        * detectors.efficiency**2
    )


def block_generator(seed: int, block: int) -> Generator:
    """블록 번호에 대응하는 독립 부분 스트림 생성기를 만듭니다."""
    return Generator(PCG64(SeedSequence(seed, spawn_key=(block,))))


def _generate_block(
    setup: ExperimentSetup,
    sampler_terms: list[AmplitudeTerm],
    p_coincidence: float,
    seed: int,
    block: int,
    n_frames: int,
) -> EventStream:
    detectors = setup.detectors
    rng = block_generator(seed, block)
    first = block * FRAMES_PER_BLOCK
    count = min(FRAMES_PER_BLOCK, n_frames - first)

    frames = first + np.flatnonzero(rng.random(count) < detectors.pair_probability)
    # 0: 동시계수, 1: D1만, 2: D2만, 3: 검출 없음
    u = rng.random(frames.size)
    fate = np.searchsorted(
        np.array([p_coincidence, 0.5, 1.0 - p_coincidence]), u, side="right"
    )
    frames, fate = frames[fate < 3], fate[fate < 3]  # noqa: PLR2004
    if frames.size == 0:
        return EventStream()

    # 동시계수 쌍만 결합 밀도에서 뽑고, 단독 클릭은 제안 분포에서 뽑습니다.
    sampler = PairSampler(sampler_terms, setup.model)
    paired = fate == 0
    t_plus = np.empty(frames.size)
    t_12 = np.empty(frames.size)
    if paired.any():
        t_plus[paired], t_12[paired] = sampler.sample(rng, int(paired.sum()))
    if not paired.all():
        t_plus[~paired], t_12[~paired] = sampler.propose(rng, int((~paired).sum()))
    t1, t2 = detection_times(t_plus, t_12, setup.delays.tau)
    jitter_fs = detectors.jitter * 1e3
    t1 = t1 + rng.normal(0.0, 1.0, frames.size) * jitter_fs
    t2 = t2 + rng.normal(0.0, 1.0, frames.size) * jitter_fs
    survive = rng.random((frames.size, 2)) < detectors.efficiency

    emit_d1 = (fate != 2) & survive[:, 0]  # noqa: PLR2004
    emit_d2 = (fate != 1) & survive[:, 1]
    offset_ps = frames * (setup.pump.rep_period * 1e3)
    frame = np.concatenate([frames[emit_d1], frames[emit_d2]])
    detector = np.concatenate(
        [
            np.full(int(emit_d1.sum()), _D1, dtype=np.int8),
            np.full(int(emit_d2.sum()), _D2, dtype=np.int8),
        ]
    )
    stamp = np.concatenate(
        [offset_ps[emit_d1] + t1[emit_d1] * 1e-3, offset_ps[emit_d2] + t2[emit_d2] * 1e-3]
    )
    return EventStream(
        frame=frame.astype(np.int64),
        detector=detector,
        timestamp=np.round(stamp, TIMESTAMP_DECIMALS),
    )


def sort_events(stream: EventStream) -> EventStream:
    """(timestamp, detector, frame) 순으로 안정 정렬한 스트림을 반환합니다."""
    order = np.lexsort((stream.frame, stream.detector, stream.timestamp))
    return EventStream(
        frame=stream.frame[order],
        detector=stream.detector[order],
        timestamp=stream.timestamp[order],
    )


def generate_events(
    setup: ExperimentSetup, n_frames: int, seed: int, workers: int | None = None
) -> EventStream:
    """n_frames 프레임 동안의 검출 이벤트를 시간순 스트림으로 생성합니다.

    같은 (setup, n_frames, seed)는 항상 같은 스트림을 만듭니다.

    Args:
        setup (ExperimentSetup): 실험 구성
        n_frames (int): 펌프 프레임 수, 1 이상
        seed (int): 64비트 시드
        workers (int | None): 블록 병렬 생성 스레드 수

    Returns:
        EventStream: 타임스탬프 순으로 정렬된 이벤트

    Raises:
        InvalidArgumentError: n_frames < 1 또는 음수 시드
    """
    n_frames = require_int_at_least("n_frames", n_frames, 1)
    seed = require_int_at_least("seed", seed, 0)
    if setup.detectors.pair_probability == 0:
        return EventStream()

    terms = build_amplitude_terms(setup)
    p_coincidence = coincidence_probability(setup)
    n_blocks = math.ceil(n_frames / FRAMES_PER_BLOCK)
    logger.info(
        "이벤트 생성 시작: frames=%d, blocks=%d, P_c=%.6g",
        n_frames,
        n_blocks,
        p_coincidence,
    )
    blocks = ordered_map(
        lambda block: _generate_block(setup, terms, p_coincidence, seed, block, n_frames),
        range(n_blocks),
        workers=workers,
    )
    merged = EventStream(
        frame=np.concatenate([b.frame for b in blocks]),
        detector=np.concatenate([b.detector for b in blocks]),
        timestamp=np.concatenate([b.timestamp for b in blocks]),
    )
    return sort_events(merged)


@dataclass
class WindowMatch:
    """시간창 짝짓기 결과입니다.

    Attributes:
        dts (list[float]): 짝지어진 클릭의 Δt = t_D2 - t_D1 (ps)
        peak_pending (int): 대기열에 동시에 남아 있던 최대 클릭 수
    """

    dts: list[float]
    peak_pending: int


def match_window(stream: EventStream, window_ps: float) -> WindowMatch:
    """정렬된 스트림의 D1/D2 클릭을 먼저 온 것부터 window_ps 안에서 짝짓습니다.

    대기 중인 클릭은 window_ps 보다 오래되면 양쪽 대기열 모두에서 버려지므로
    대기열 크기는 시간창 안의 클릭 수로 제한됩니다.
    """
    pending: dict[int, deque[float]] = {_D1: deque(), _D2: deque()}
    dts: list[float] = []
    peak = 0
    for det, stamp in zip(stream.detector.tolist(), stream.timestamp.tolist()):
        other = pending[_D2 if det == _D1 else _D1]
        while other and stamp - other[0] > window_ps:
            other.popleft()
        if other:
            partner = other.popleft()
            dts.append(stamp - partner if det == _D2 else partner - stamp)
            continue
        own = pending[det]
        while own and stamp - own[0] > window_ps:
            own.popleft()
        own.append(stamp)
        peak = max(peak, len(pending[_D1]) + len(pending[_D2]))
    return WindowMatch(dts=dts, peak_pending=peak)


def count_coincidences(
    stream: EventStream,
    window: float,
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS,
    n_frames: int | None = None,
) -> CoincidenceSummary:
    """시간창 안의 D1/D2 클릭을 먼저 온 것부터 짝지어 동시계수를 셉니다.

    각 클릭은 한 번만 쓰이며, Δt = t_D2 - t_D1 히스토그램을 [-window, window]에 채웁니다.

    Args:
        stream (EventStream): 타임스탬프로 정렬된 이벤트
        window (float): 동시계수 시간창 (ns)
        histogram_bins (int): 히스토그램 구간 수
        n_frames (int | None): 프레임 수, None이면 마지막 프레임 번호 + 1

    Raises:
        UnsortedStreamError: 스트림이 정렬되지 않은 경우
        InvalidArgumentError: window <= 0 또는 histogram_bins < 1
    """
    if not (math.isfinite(window) and window > 0):
        raise InvalidArgumentError(f"window must be > 0 ns, got {window}.")
    if histogram_bins < 1:
        raise InvalidArgumentError(f"histogram_bins must be >= 1, got {histogram_bins}.")
    if not stream.is_sorted():
        raise UnsortedStreamError("event stream must be sorted by timestamp; use sort_events.")

    window_ps = window * 1e3
    dts = match_window(stream, window_ps).dts
    counts, edges = np.histogram(dts, bins=histogram_bins, range=(-window_ps, window_ps))
    centers = (edges[:-1] + edges[1:]) / 2
    if n_frames is None:
        n_frames = int(stream.frame.max()) + 1 if len(stream) else 0
    return CoincidenceSummary(
        n_frames=n_frames,
        window=window,
        singles_d1=int(np.count_nonzero(stream.detector == _D1)),
        singles_d2=int(np.count_nonzero(stream.detector == _D2)),
        coincidences=len(dts),
        dt_histogram=[(float(c), int(n)) for c, n in zip(centers, counts)],
    )


def singles_rates(summary: CoincidenceSummary) -> tuple[float, float]:
    """검출기별 프레임당 단일 계수율을 반환합니다.

    Raises:
        InvalidArgumentError: n_frames가 0인 경우
    """
    if summary.n_frames <= 0:
        raise InvalidArgumentError("singles_rates needs n_frames > 0.")
    return summary.singles_d1 / summary.n_frames, summary.singles_d2 / summary.n_frames
