"""HTTP service: model CRUD, incremental judgments, solving, what-if.

Persistence is one canonical .anp.json per model under the storage root,
written via tempfile plus atomic rename, with a sidecar revision counter.
The files are exactly what the CLI consumes, so there is no second source
of truth. Mutation of a model is serialized behind a per-model lock and
guarded by optimistic revision checks; solve and whatif work on immutable
snapshots and never bump revisions.
"""

import os
import re
import tempfile
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .errors import (
    ConsistencyRejection,
    ConvergenceFailure,
    IncompleteModel,
    InvalidScaleValue,
    SchemaError,
    SlotShapeMismatch,
    UnknownSlot,
    UnsupportedVersion,
)
from .judgments import (
    ConsistencyPolicy,
    build_matrix,
    principal_eigenvector,
    screen_consistency,
)
from .model_io import (
    ModelDocument,
    build_network,
    document_to_object,
    loads,
    loads_result,
    missing_pairs,
    parse_document,
    result_to_object,
    saves,
    saves_result,
    solve_document,
    with_judgment,
)
from .network import find_slot, validate as validate_network
from .supermatrix import whatif as whatif_network

MODEL_ID = re.compile(r"^[0-9a-f]{32}$")


class StoreEntry:
    __slots__ = ("lock",)

    def __init__(self):
        self.lock = threading.Lock()


class ModelStore:
    """Filesystem-backed store: {id}.anp.json, {id}.rev, {id}.result.json."""

    def __init__(self, root: str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._entries: dict[str, StoreEntry] = {}
        self._guard = threading.Lock()

    def _entry(self, model_id: str) -> StoreEntry:
        with self._guard:
            return self._entries.setdefault(model_id, StoreEntry())

    def _model_path(self, model_id: str) -> Path:
        return self.root / f"{model_id}.anp.json"

    def _rev_path(self, model_id: str) -> Path:
        return self.root / f"{model_id}.rev"

    def _result_path(self, model_id: str) -> Path:
        return self.root / f"{model_id}.result.json"

    def _write_atomic(self, path: Path, data: bytes) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _exists(self, model_id: str) -> bool:
        return MODEL_ID.match(model_id) is not None and self._model_path(model_id).exists()

    def create(self, doc: ModelDocument) -> tuple[str, int]:
        model_id = uuid.uuid4().hex
        with self._entry(model_id).lock:
            self._write_atomic(self._model_path(model_id), saves(doc))
            self._write_atomic(self._rev_path(model_id), b"1\n")
        return model_id, 1

    def ids(self) -> list[str]:
        return sorted(
            p.name[: -len(".anp.json")]
            for p in self.root.glob("*.anp.json")
            if MODEL_ID.match(p.name[: -len(".anp.json")])
        )

    def get(self, model_id: str) -> tuple[ModelDocument, int]:
        if not self._exists(model_id):
            raise KeyError(model_id)
        doc = loads(self._model_path(model_id).read_bytes())
        revision = int(self._rev_path(model_id).read_text().strip())
        return doc, revision

    def update(self, model_id: str, expected_revision: int, mutate) -> tuple[ModelDocument, int]:
        """Apply mutate(doc) -> doc under the model lock; bump the revision.

        Raises KeyError for unknown ids and RevisionConflict when the caller's
        expected revision is stale. Nothing is written on failure.
        """
        with self._entry(model_id).lock:
            doc, revision = self.get(model_id)
            if expected_revision != revision:
                raise RevisionConflict(revision)
            doc = mutate(doc)
            revision += 1
            self._write_atomic(self._model_path(model_id), saves(doc))
            self._write_atomic(self._rev_path(model_id), f"{revision}\n".encode())
            return doc, revision

    def put_result(self, model_id: str, result) -> None:
        with self._entry(model_id).lock:
            self._write_atomic(self._result_path(model_id), saves_result(result))

    def get_result(self, model_id: str):
        if not self._exists(model_id) or not self._result_path(model_id).exists():
            raise KeyError(model_id)
        return loads_result(self._result_path(model_id).read_bytes())


class RevisionConflict(Exception):
    def __init__(self, current: int):
        super().__init__(f"stale revision; current is {current}")
        self.current = current


# ---------------------------------------------------------------------------
# request/response models


class CreatedResponse(BaseModel):
    id: str
    revision: int


class HealthResponse(BaseModel):
    status: str
    engine_version: str


class ModelSummary(BaseModel):
    id: str
    revision: int
    title: str | None = None
    complete: bool


class JudgmentPut(BaseModel):
    value: str
    revision: int


class SolveRequest(BaseModel):
    policy: str | None = None
    strict: bool | None = None
    tolerance: float | None = None
    max_power: int | None = Field(default=None, ge=2)


class WhatIfOverride(BaseModel):
    slot: str
    pair: str
    value: str


class WhatIfRequest(BaseModel):
    overrides: list[WhatIfOverride] = Field(default_factory=list)
    policy: str | None = None
    tolerance: float | None = None
    max_power: int | None = Field(default=None, ge=2)


def _fail(status: int, message: str, **extra) -> HTTPException:
    return HTTPException(status_code=status, detail={"message": message, **extra})


_PLACEHOLDER_PAGE = """<!doctype html>
<meta charset="utf-8">
<title>anp service</title>
<h1>anp service</h1>
<p>The web UI bundle is not installed. The JSON API lives under
<code>/api</code>; see <code>GET /api/health</code>.</p>
"""


def create_app(
    store_dir: str = ".",
    policy: "ConsistencyPolicy | None" = None,
    strict: "bool | None" = None,
    static_dir: "str | None" = None,
) -> FastAPI:
    """Build the service. policy/strict given here override document options;
    request-level parameters override both."""
    store = ModelStore(store_dir)
    server_policy = None if policy is None else ConsistencyPolicy.parse(policy)
    if static_dir is None:
        static_dir = os.environ.get("ANP_STATIC_DIR")

    app = FastAPI(title="anp", version=__version__)
    app.state.store = store

    def get_or_404(model_id: str) -> tuple[ModelDocument, int]:
        try:
            return store.get(model_id)
        except KeyError:
            raise _fail(404, f"unknown model {model_id!r}") from None

    def effective(doc: ModelDocument, request_policy=None, request_strict=None):
        pol = request_policy if request_policy is not None else server_policy
        stc = request_strict if request_strict is not None else strict
        return pol, stc

    @app.get("/", response_class=HTMLResponse)
    def index() -> str:
        if static_dir:
            page = Path(static_dir) / "index.html"
            if page.exists():
                return page.read_text(encoding="utf-8")
        return _PLACEHOLDER_PAGE

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", engine_version=__version__)

    @app.post("/api/models", status_code=201, response_model=CreatedResponse)
    def create_model(body: dict) -> CreatedResponse:
        try:
            doc = parse_document(body)
        except SchemaError as exc:
            raise _fail(400, str(exc), path=exc.path) from exc
        except UnsupportedVersion as exc:
            raise _fail(400, str(exc)) from exc
        report = validate_network(doc.network)
        if not report.ok:
            raise _fail(400, "network validation failed", violations=report.lines())
        model_id, revision = store.create(doc)
        return CreatedResponse(id=model_id, revision=revision)

    @app.get("/api/models")
    def list_models() -> dict:
        summaries = []
        for model_id in store.ids():
            doc, revision = store.get(model_id)
            title = doc.metadata.get("title")
            summaries.append(
                ModelSummary(
                    id=model_id,
                    revision=revision,
                    title=title if isinstance(title, str) else None,
                    complete=not missing_pairs(doc),
                ).model_dump()
            )
        return {"models": summaries}

    @app.get("/api/models/{model_id}")
    def get_model(model_id: str) -> dict:
        doc, revision = get_or_404(model_id)
        return {
            "id": model_id,
            "revision": revision,
            "missing": missing_pairs(doc),
            "document": document_to_object(doc),
        }

    @app.put("/api/models/{model_id}/judgments/{slot_key}/{pair}")
    def put_judgment(model_id: str, slot_key: str, pair: str, body: JudgmentPut) -> dict:
        get_or_404(model_id)

        def mutate(doc: ModelDocument) -> ModelDocument:
            return with_judgment(doc, slot_key, pair, body.value, on_scale=True)

        try:
            doc, revision = store.update(model_id, body.revision, mutate)
        except KeyError:
            raise _fail(404, f"unknown model {model_id!r}") from None
        except RevisionConflict as exc:
            raise _fail(409, str(exc), revision=exc.current) from exc
        except UnknownSlot as exc:
            raise _fail(404, str(exc)) from exc
        except InvalidScaleValue as exc:
            raise _fail(422, str(exc)) from exc
        return _snapshot(doc, slot_key, revision)

    def _snapshot(doc: ModelDocument, slot_key: str, revision: int) -> dict:
        slot = find_slot(doc.network, slot_key)
        stored = doc.judgments.get(slot_key, {})
        wanted = slot.pairs()
        missing = [f"{a},{b}" for (a, b) in wanted if (a, b) not in stored]
        snapshot = {
            "slot": slot_key,
            "revision": revision,
            "total": len(wanted),
            "filled": len(wanted) - len(missing),
            "missing": missing,
            "complete": not missing,
        }
        if not missing:
            index = {e: i for i, e in enumerate(slot.elements)}
            matrix = build_matrix(
                slot.order,
                [(index[a], index[b], stored[(a, b)]) for (a, b) in wanted],
                labels=slot.elements,
            )
            pv = principal_eigenvector(matrix, rci=doc.options.rci())
            pol, _ = effective(doc)
            verdict = screen_consistency(
                pv.cr, slot.order, pol if pol is not None else doc.options.policy
            )
            snapshot.update(
                {
                    "weights": {e: float(w) for e, w in zip(slot.elements, pv.weights)},
                    "lambda_max": pv.lambda_max,
                    "cr": pv.cr,
                    "verdict": verdict.status.value,
                    "threshold": verdict.threshold,
                }
            )
        return snapshot

    def _require_complete(doc: ModelDocument) -> None:
        gaps = missing_pairs(doc)
        if gaps:
            raise _fail(
                409,
                "model is incomplete",
                missing={key: pairs for key, pairs in gaps.items()},
            )

    @app.post("/api/models/{model_id}/solve")
    def solve_model(model_id: str, body: "SolveRequest | None" = None) -> JSONResponse:
        doc, _ = get_or_404(model_id)
        body = body or SolveRequest()
        _require_complete(doc)
        pol, stc = effective(doc, body.policy, body.strict)
        try:
            result = solve_document(
                doc,
                policy=pol,
                strict=stc,
                tolerance=body.tolerance,
                max_power=body.max_power,
            )
        except ConsistencyRejection as exc:
            raise _fail(
                422,
                str(exc),
                failures=[{"slot": key, "cr": cr} for key, cr in exc.failures],
            ) from exc
        except ConvergenceFailure as exc:
            raise _fail(422, str(exc)) from exc
        store.put_result(model_id, result)
        return JSONResponse(result_to_object(result))

    @app.get("/api/models/{model_id}/result")
    def get_result(model_id: str) -> JSONResponse:
        get_or_404(model_id)
        try:
            result = store.get_result(model_id)
        except KeyError:
            raise _fail(404, f"model {model_id!r} has no stored result") from None
        return JSONResponse(result_to_object(result))

    @app.post("/api/models/{model_id}/whatif")
    def whatif_model(model_id: str, body: WhatIfRequest) -> dict:
        doc, _ = get_or_404(model_id)
        _require_complete(doc)
        net = build_network(doc)
        pol, _ = effective(doc, body.policy)
        settings = doc.options.merged(
            policy=pol, tolerance=body.tolerance, max_power=body.max_power
        )
        overrides = [(o.slot, tuple(o.pair.split(",")), o.value) for o in body.overrides]
        try:
            report = whatif_network(
                net,
                overrides,
                rci=settings.rci(),
                policy=settings.policy,
                options=settings.convergence_options(),
            )
        except (UnknownSlot, SlotShapeMismatch, InvalidScaleValue, IncompleteModel) as exc:
            raise _fail(422, f"invalid override: {exc}") from exc
        except ConvergenceFailure as exc:
            raise _fail(422, str(exc)) from exc

        def ranking_obj(r) -> dict:
            return {
                "alternatives": {k: float(v) for k, v in r.alternative_weights.items()},
                "order": list(r.order),
                "renormalized": {k: float(v) for k, v in r.renormalized.items()},
            }

        return {
            "baseline": ranking_obj(report.baseline),
            "perturbed": ranking_obj(report.perturbed),
            "delta": {k: float(v) for k, v in report.delta.items()},
        }

    # asset fallback for the web client; registered last so /api wins
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True))

    return app
