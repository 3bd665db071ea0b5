"""HTTP backend for the configurator UI: serves the feature model, validates
configurations live, previews expansions, launches and monitors generation
runs, and computes diversity reports.

Run state lives in memory with output files on disk; restarting the service
loses in-flight runs but not completed data files.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .backends import make_backend
from .dataset import Dataset, SyntheticSample, open_dataset_writer, read_dataset, write_dataset
from .embedding import make_embedder
from .feature_model import (
    Configuration,
    FeatureModel,
    SynthlineError,
    configuration_axes,
    expand_atomic_configurations,
    validate_configuration,
)
from .generation import (
    GenerationRun,
    RunStatus,
    allocate_samples,
    params_from_configuration,
    run_generation_sync,
    subset_size_from,
)
from .metrics import DEFAULT_BIN_COUNT, DEFAULT_NGRAM_SIZES, diversity_report
from .prompts import LabelSpec, shipped_label_specs

_TERMINAL = {RunStatus.COMPLETED.value, RunStatus.FAILED.value, RunStatus.CANCELLED.value}


class ApiError(Exception):
    """4xx for client faults, 5xx otherwise; rendered as JSON."""

    def __init__(self, status: int, code: str, message: str, extra: dict | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.extra = extra or {}
        super().__init__(message)

    def to_response(self) -> JSONResponse:
        body = {"status": self.status, "code": self.code, "message": self.message}
        body.update(self.extra)
        return JSONResponse(status_code=self.status, content=body)


class LabelBody(BaseModel):
    label: str
    description: str


class ExpandBody(BaseModel):
    configuration: dict
    subset_size: int | None = None


class RunBody(BaseModel):
    configuration: dict
    label: LabelBody
    backend: str = "mock"
    format: str = "csv"
    seed: int | None = None
    count: int | None = None
    model_name: str | None = None
    max_concurrency: int = Field(default=8, ge=1)
    retry_limit: int = Field(default=3, ge=0)


class MetricsBody(BaseModel):
    run_id: str | None = None
    samples: list[dict] | None = None
    embedder: str = "hash"
    ngrams: list[int] = Field(default_factory=lambda: list(DEFAULT_NGRAM_SIZES))
    bins: int = DEFAULT_BIN_COUNT


class _RunEntry:
    def __init__(self, run: GenerationRun, path: Path, format: str):
        self.run = run
        self.path = path
        self.format = format


def _default_static_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def create_app(
    model: FeatureModel,
    runs_dir: str | Path = "synthline-runs",
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="synthline", version="0.1.0")
    runs_dir = Path(runs_dir)
    registry: dict[str, _RunEntry] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return exc.to_response()

    @app.exception_handler(SynthlineError)
    async def _domain_error(_request: Request, exc: SynthlineError):
        return ApiError(400, "bad-request", str(exc)).to_response()

    def parse_configuration(data: dict) -> Configuration:
        try:
            return Configuration.from_dict(data)
        except (TypeError, ValueError, KeyError) as e:
            raise ApiError(400, "bad-configuration", f"malformed configuration: {e}") from None

    def require_valid(config: Configuration) -> None:
        report = validate_configuration(model, config)
        if not report.valid:
            raise ApiError(
                422, "invalid-configuration", "configuration is invalid",
                extra={"report": report.to_dict()},
            )

    def get_entry(run_id: str) -> _RunEntry:
        with registry_lock:
            entry = registry.get(run_id)
        if entry is None:
            raise ApiError(404, "unknown-run", f"no run with id '{run_id}'")
        return entry

    @app.get("/api/model")
    async def get_model():
        return model.to_dict()

    @app.get("/api/labels")
    async def get_labels():
        return [{"label": s.label, "description": s.description} for s in shipped_label_specs()]

    @app.post("/api/validate")
    async def post_validate(body: dict):
        config = parse_configuration(body)
        return validate_configuration(model, config).to_dict()

    @app.post("/api/expand")
    async def post_expand(body: ExpandBody):
        config = parse_configuration(body.configuration)
        require_valid(config)
        axes = configuration_axes(model, config)
        count = 1
        for _, vals in axes:
            count *= len(vals)
        atomics = expand_atomic_configurations(model, config)
        n = body.subset_size if body.subset_size is not None else subset_size_from(config)
        allocation = None
        if n is not None and n >= 1:
            counts = allocate_samples(count, n)
            allocation = {
                "subset_size": n,
                "min": min(counts),
                "max": max(counts),
                "first": counts[:10],
            }
        return {
            "count": count,
            "axes": [{"name": name, "values": vals} for name, vals in axes],
            "sample": [a.to_dict() for a in atomics[:10]],
            "allocation": allocation,
        }

    @app.post("/api/runs")
    async def post_run(body: RunBody):
        config = parse_configuration(body.configuration)
        require_valid(config)
        if body.format not in ("csv", "json"):
            raise ApiError(400, "bad-format", f"unknown format '{body.format}'")
        label_spec = LabelSpec(body.label.label, body.label.description)
        params = params_from_configuration(
            config,
            model_name=body.model_name,
            max_concurrency=body.max_concurrency,
            retry_limit=body.retry_limit,
        )
        backend = make_backend(body.backend)
        run = GenerationRun(config, label=label_spec.label)
        runs_dir.mkdir(parents=True, exist_ok=True)
        path = runs_dir / f"{run.id}.{body.format}"
        entry = _RunEntry(run, path, body.format)
        with registry_lock:
            registry[run.id] = entry

        def execute():
            try:
                with open_dataset_writer(path, body.format) as sink:
                    run_generation_sync(
                        model, config, label_spec, params, backend, sink,
                        count=body.count, seed=body.seed, run=run,
                    )
            except Exception as e:  # keep the registry consistent on any failure
                if run.status.value not in _TERMINAL:
                    run.error = str(e)
                    run._transition(RunStatus.FAILED)

        threading.Thread(target=execute, daemon=True).start()
        return {"run_id": run.id}

    @app.get("/api/runs/{run_id}")
    async def get_run(run_id: str):
        return get_entry(run_id).run.snapshot()

    @app.get("/api/runs/{run_id}/data")
    async def get_run_data(run_id: str, format: str = "csv"):
        entry = get_entry(run_id)
        snapshot = entry.run.snapshot()
        if snapshot["status"] not in _TERMINAL:
            raise ApiError(409, "run-not-finished", f"run is {snapshot['status']}")
        if format not in ("csv", "json"):
            raise ApiError(400, "bad-format", f"unknown format '{format}'")
        if not entry.path.exists():
            raise ApiError(404, "no-data", "run produced no data file")
        if format == entry.format:
            content = entry.path.read_bytes()
        else:
            dataset = read_dataset(entry.path, format=entry.format)
            tmp = entry.path.with_suffix(f".convert.{format}")
            write_dataset(dataset, format, tmp)
            content = tmp.read_bytes()
            tmp.unlink()
        media = "text/csv" if format == "csv" else "application/json"
        return Response(
            content=content,
            media_type=media,
            headers={"Content-Disposition": f'attachment; filename="{run_id}.{format}"'},
        )

    @app.post("/api/metrics")
    async def post_metrics(body: MetricsBody):
        if (body.run_id is None) == (body.samples is None):
            raise ApiError(400, "bad-request", "provide exactly one of run_id or samples")
        if body.run_id is not None:
            entry = get_entry(body.run_id)
            if entry.run.snapshot()["status"] not in _TERMINAL:
                raise ApiError(409, "run-not-finished", "run has not finished")
            dataset = read_dataset(entry.path, format=entry.format)
        else:
            try:
                samples = tuple(
                    SyntheticSample(
                        id=str(row.get("id", f"s-{i:06d}")),
                        text=str(row.get("text", "")),
                        label=str(row.get("label", "")),
                    )
                    for i, row in enumerate(body.samples)
                )
                dataset = Dataset(samples)
            except SynthlineError as e:
                raise ApiError(400, "bad-samples", str(e)) from None
        try:
            report = diversity_report(
                dataset, make_embedder(body.embedder), n_sizes=body.ngrams, bin_count=body.bins
            )
        except SynthlineError as e:
            raise ApiError(400, "metrics-error", str(e)) from None
        return json.loads(report.to_json())

    static = Path(static_dir) if static_dir is not None else _default_static_dir()
    if static is not None and static.is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        async def index():
            return (
                "<html><body><h1>synthline</h1>"
                "<p>API is running. Build the configurator UI "
                "(<code>cd frontend && npm install && npm run build</code>) "
                "and restart to serve it here.</p></body></html>"
            )

    return app
