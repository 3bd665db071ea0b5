"""Generation engine: spread a requested sample count evenly over the atomic
configurations, drive concurrent backend calls with retry and backoff, and
stream finished samples to a dataset sink.

A run targets exactly one label; multi-label campaigns are sequences of runs.
Runs are asyncio-based: requests overlap up to ``max_concurrency`` and the
sink is written from a single consumer in completion order, which makes mock
runs fully deterministic (and byte-identical when a seed is given).
"""

from __future__ import annotations

import asyncio
import hashlib
import random
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum

from .backends import CompletionBackend, PermanentBackendError, TransientBackendError
from .dataset import DatasetWriter, SyntheticSample
from .feature_model import (
    Configuration,
    FeatureModel,
    SynthlineError,
    expand_atomic_configurations,
)
from .prompts import LabelSpec, render_prompt, snake_case

_DETERMINISTIC_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

# Feature names with engine-level meaning when present in a configuration.
SUBSET_SIZE_FEATURE = "SubsetSize"
TEMPERATURE_FEATURE = "Temperature"
TOP_P_FEATURE = "TopP"
MODEL_FEATURE = "LLM"


class GenerationError(SynthlineError):
    pass


@dataclass(frozen=True)
class GenerationParams:
    model_name: str
    temperature: float = 1.0
    top_p: float = 1.0
    max_concurrency: int = 8
    retry_limit: int = 3

    def __post_init__(self):
        if self.temperature < 0:
            raise GenerationError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise GenerationError("top_p must be in (0, 1]")
        if self.max_concurrency < 1:
            raise GenerationError("max_concurrency must be positive")
        if self.retry_limit < 0:
            raise GenerationError("retry_limit must be >= 0")


@dataclass(frozen=True)
class RetryPolicy:
    """Exponential backoff with full jitter; attempt 1 waits up to `base`."""

    base: float = 1.0
    factor: float = 2.0
    jitter: bool = True
    max_delay: float = 30.0

    def delay(self, attempt: int, rng: random.Random) -> float:
        cap = min(self.base * self.factor ** (attempt - 1), self.max_delay)
        return rng.uniform(0.0, cap) if self.jitter else cap


class RunStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"
    CANCELLED = "cancelled"


_TERMINAL = {RunStatus.COMPLETED, RunStatus.FAILED, RunStatus.CANCELLED}


@dataclass(frozen=True)
class FailureRecord:
    atomic_index: int
    attempt: int
    reason: str

    def to_dict(self) -> dict:
        return {"atomic_index": self.atomic_index, "attempt": self.attempt, "reason": self.reason}


class GenerationRun:
    """Observable state of one launched generation job.

    Mutated only by the engine; other threads may take `snapshot()`s and
    request cancellation at any time. Status transitions are monotone: a
    terminal state is never re-opened.
    """

    def __init__(self, config_snapshot: Configuration, label: str = "", run_id: str | None = None):
        self.id = run_id or uuid.uuid4().hex[:12]
        self.config_snapshot = config_snapshot
        self.label = label
        self.allocation: tuple[tuple[int, int], ...] = ()
        self.status = RunStatus.PENDING
        self.produced = 0
        self.failures: list[FailureRecord] = []
        self.error: str | None = None
        self.created_at = _utc_now_rfc3339()
        self.finished_at: str | None = None
        self._lock = threading.Lock()
        self._cancel = threading.Event()

    @property
    def total(self) -> int:
        return sum(count for _, count in self.allocation)

    def cancel(self) -> None:
        self._cancel.set()

    @property
    def cancel_requested(self) -> bool:
        return self._cancel.is_set()

    def _transition(self, status: RunStatus) -> None:
        with self._lock:
            if self.status in _TERMINAL:
                raise GenerationError(f"run {self.id} is already {self.status.value}")
            self.status = status
            if status in _TERMINAL:
                self.finished_at = _utc_now_rfc3339()

    def _record_failure(self, atomic_index: int, attempt: int, reason: str) -> None:
        with self._lock:
            self.failures.append(FailureRecord(atomic_index, attempt, reason))

    def _record_produced(self) -> None:
        with self._lock:
            if self.produced + 1 > self.total:
                raise GenerationError("produced more samples than allocated")
            self.produced += 1

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "id": self.id,
                "label": self.label,
                "status": self.status.value,
                "produced": self.produced,
                "total": self.total,
                "allocation": [[i, c] for i, c in self.allocation],
                "failures": [f.to_dict() for f in self.failures],
                "error": self.error,
                "created_at": self.created_at,
                "finished_at": self.finished_at,
            }


def allocate_samples(atomic_count: int, subset_size: int) -> list[int]:
    """Spread `subset_size` samples over `atomic_count` configurations as
    evenly as possible; when division is not exact the lowest-indexed
    configurations receive the extra sample."""
    if atomic_count < 1:
        raise GenerationError("atomic_count must be positive")
    if subset_size < 1:
        raise GenerationError("subset_size must be positive")
    base, remainder = divmod(subset_size, atomic_count)
    return [base + 1 if i < remainder else base for i in range(atomic_count)]


def subset_size_from(config: Configuration) -> int | None:
    vals = config.values.get(SUBSET_SIZE_FEATURE)
    return int(float(vals[0])) if vals else None


def params_from_configuration(
    config: Configuration,
    model_name: str | None = None,
    max_concurrency: int = 8,
    retry_limit: int = 3,
) -> GenerationParams:
    """Build params from the configuration's Temperature/TopP/LLM values,
    with explicit arguments taking precedence for the model name."""

    def first(feature: str, default):
        vals = config.values.get(feature)
        return float(vals[0]) if vals else default

    llm_vals = config.values.get(MODEL_FEATURE)
    return GenerationParams(
        model_name=model_name or (str(llm_vals[0]) if llm_vals else "default"),
        temperature=first(TEMPERATURE_FEATURE, 1.0),
        top_p=first(TOP_P_FEATURE, 1.0),
        max_concurrency=max_concurrency,
        retry_limit=retry_limit,
    )


def _utc_now_rfc3339() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def derive_run_id(seed: int, label: str) -> str:
    digest = hashlib.sha256(f"{seed}\x00{label}".encode("utf-8")).hexdigest()
    return f"r{digest[:11]}"


class _Clock:
    """Sample timestamps: real UTC, or a fixed start plus one second per
    sample when runs must be reproducible."""

    def __init__(self, deterministic: bool):
        self.deterministic = deterministic
        self._tick = 0

    def next(self) -> str:
        if not self.deterministic:
            return _utc_now_rfc3339()
        stamp = _DETERMINISTIC_EPOCH + timedelta(seconds=self._tick)
        self._tick += 1
        return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")


async def run_generation(
    model: FeatureModel,
    config: Configuration,
    label_spec: LabelSpec,
    params: GenerationParams,
    backend: CompletionBackend,
    sink: DatasetWriter,
    count: int | None = None,
    seed: int | None = None,
    retry_policy: RetryPolicy | None = None,
    run: GenerationRun | None = None,
) -> GenerationRun:
    """Generate `count` samples (default: the configuration's SubsetSize)
    for one label, writing each finished sample to `sink`.

    Transient backend failures are retried up to `params.retry_limit` with
    exponential backoff; a prompt that exhausts its retries marks the run
    `failed` but already-produced samples are kept. Permanent backend errors
    abort the run. With `seed` set, the run id, backoff jitter, and sample
    timestamps are all derived from it, so mock reruns are byte-identical.
    """
    if run is None:
        run_id = derive_run_id(seed, label_spec.label) if seed is not None else None
        run = GenerationRun(config, label=label_spec.label, run_id=run_id)
    run.label = label_spec.label
    policy = retry_policy or RetryPolicy()
    rng = random.Random(seed)
    clock = _Clock(deterministic=seed is not None)

    try:
        atomics = expand_atomic_configurations(model, config)
        n = count if count is not None else subset_size_from(config)
        if n is None:
            raise GenerationError(
                f"configuration has no {SUBSET_SIZE_FEATURE} value and no count was given"
            )
        counts = allocate_samples(len(atomics), n)
        run.allocation = tuple((i, c) for i, c in enumerate(counts))
        prompts = [render_prompt(a, label_spec) for a in atomics]
    except SynthlineError as e:
        run.error = str(e)
        run._transition(RunStatus.FAILED)
        raise

    run._transition(RunStatus.RUNNING)
    semaphore = asyncio.Semaphore(params.max_concurrency)
    state = {"permanent": None, "exhausted": False}

    async def one_request(atomic_index: int) -> tuple[int, str] | None:
        async with semaphore:
            for attempt in range(1, params.retry_limit + 2):
                if run.cancel_requested or state["permanent"] is not None:
                    return None
                try:
                    text = await backend.complete(prompts[atomic_index].text, params)
                    return atomic_index, text
                except TransientBackendError as e:
                    run._record_failure(atomic_index, attempt, str(e))
                    if attempt == params.retry_limit + 1:
                        state["exhausted"] = True
                        return None
                    await asyncio.sleep(policy.delay(attempt, rng))
                except PermanentBackendError as e:
                    run._record_failure(atomic_index, attempt, str(e))
                    state["permanent"] = str(e)
                    return None
        return None

    tasks = [
        asyncio.create_task(one_request(i))
        for i, c in run.allocation
        for _ in range(c)
    ]

    axis_fields = (
        "requirement_type",
        "specification_level",
        "requirement_source",
        "specification_format",
        "language",
        "domain",
    )
    seq = 0
    for future in asyncio.as_completed(tasks):
        result = await future
        if result is None:
            continue
        atomic_index, text = result
        snake_axes = {snake_case(k): str(v) for k, v in atomics[atomic_index].axes.items()}
        sample = SyntheticSample(
            id=f"{run.id}-{seq:06d}",
            text=text,
            label=label_spec.label,
            label_description=label_spec.description,
            llm=params.model_name,
            temperature=params.temperature,
            top_p=params.top_p,
            run_id=run.id,
            created_at=clock.next(),
            **{name: snake_axes.get(name, "") for name in axis_fields},
        )
        sink.write(sample)
        run._record_produced()
        seq += 1

    if run.cancel_requested:
        run._transition(RunStatus.CANCELLED)
    elif state["permanent"] is not None:
        run.error = state["permanent"]
        run._transition(RunStatus.FAILED)
    elif state["exhausted"]:
        run.error = "one or more prompts exhausted their retries"
        run._transition(RunStatus.FAILED)
    else:
        run._transition(RunStatus.COMPLETED)
    return run


def run_generation_sync(*args, **kwargs) -> GenerationRun:
    """Blocking wrapper around :func:`run_generation`."""
    return asyncio.run(run_generation(*args, **kwargs))
