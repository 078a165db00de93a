"""JSON-over-HTTP service exposing the same computations as the CLI.

Endpoints return exactly the canonical JSON text the CLI emits for the
equivalent request (single code path through :mod:`fdem1d.reporting`).
Forward modelling and diagnostics respond synchronously; inversions run
as jobs pollable at ``GET /jobs/{id}``.
"""

from __future__ import annotations

import math
import threading
import uuid

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import devicedb, diagnostics, forward, inversion, reporting
from .earthmodel import (GeometryElement, ModelError, geometry_from_dict,
                         model_from_dict)
from .forward import DeviceScale
from .hankel import QuadratureError


def _json_response(payload) -> Response:
    return Response(content=reporting.canonical_json(payload),
                    media_type="application/json")


class JobStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict = {}

    def submit(self, fn) -> str:
        job_id = uuid.uuid4().hex
        with self._lock:
            self._jobs[job_id] = {"status": "running", "result": None,
                                  "error": None}

        def run():
            try:
                result = fn()
                with self._lock:
                    self._jobs[job_id].update(status="done", result=result)
            except Exception as exc:  # surfaced through the job status
                with self._lock:
                    self._jobs[job_id].update(status="error",
                                              error=str(exc))

        thread = threading.Thread(target=run, daemon=True)
        thread.start()
        return job_id

    def get(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self._jobs:
                raise KeyError(job_id)
            return dict(self._jobs[job_id])


def _require(body: dict, key: str):
    if key not in body:
        raise HTTPException(status_code=400,
                            detail=f"missing field {key!r}")
    return body[key]


def _model_of(body: dict):
    try:
        return model_from_dict(_require(body, "model"))
    except ModelError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _elements_of(body: dict, catalog):
    try:
        if "device" in body and body["device"]:
            entry = catalog.lookup(body["device"])
            heights = body.get("heights")
            if heights is None and "height" in body:
                heights = [body["height"]]
            if heights is None:
                raise HTTPException(status_code=400,
                                    detail="height or heights required")
            freqs = body.get("frequencies")
            return entry.elements(tuple(heights), frequencies=freqs), \
                entry.scale
        if "geometry" in body:
            return geometry_from_dict(body["geometry"]).elements(), \
                DeviceScale()
    except (devicedb.DeviceError, ModelError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    raise HTTPException(status_code=400,
                        detail="device or geometry required")


async def _body_of(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception as exc:
        raise HTTPException(status_code=400,
                            detail="request body must be JSON") from exc
    if not isinstance(body, dict):
        raise HTTPException(status_code=400,
                            detail="request body must be a JSON object")
    return body


def create_app(catalog: devicedb.DeviceCatalog | None = None) -> FastAPI:
    app = FastAPI(title="fdem1d service", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    catalog = catalog or devicedb.DeviceCatalog()
    jobs = JobStore()

    @app.exception_handler(QuadratureError)
    async def _quad_error(request, exc):  # pragma: no cover - defensive
        return Response(content=reporting.canonical_json(
            {"error": {"type": "QuadratureError", "message": str(exc)}}),
            status_code=500, media_type="application/json")

    def _response_out(body, elements, values, scale) -> Response:
        if body.get("format") == "csv":
            return Response(
                content=reporting.response_csv(elements, values, scale),
                media_type="text/csv")
        return _json_response(
            reporting.response_payload(elements, values, scale))

    @app.post("/forward")
    async def post_forward(request: Request):
        body = await _body_of(request)
        model = _model_of(body)
        elements, scale = _elements_of(body, catalog)
        values = [forward.response_element(model, el).m_value
                  for el in elements]
        return _response_out(body, elements, values, scale)

    @app.post("/sweep")
    async def post_sweep(request: Request):
        body = await _body_of(request)
        model = _model_of(body)
        elements, scale = _elements_of(body, catalog)
        axis = _require(body, "axis")
        if axis == "height":
            start = float(_require(body, "start"))
            stop = float(_require(body, "stop"))
            step = float(_require(body, "step"))
            if step <= 0 or stop <= start:
                raise HTTPException(status_code=400,
                                    detail="empty sweep range")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            grid = np.round(start + step * np.arange(n), 12)
            swept = []
            for h in grid:
                swept.extend(el._replace(height=float(h))
                             for el in elements)
        elif axis == "frequency":
            start = float(_require(body, "start"))
            stop = float(_require(body, "stop"))
            points = int(body.get("points", 61))
            if start <= 0 or stop <= start or points < 2:
                raise HTTPException(status_code=400,
                                    detail="empty sweep range")
            grid = np.logspace(math.log10(start), math.log10(stop), points)
            grid[0], grid[-1] = start, stop
            swept = []
            for el in elements:
                swept.extend(el._replace(frequency=float(f)) for f in grid)
        else:
            raise HTTPException(status_code=400,
                                detail=f"unknown sweep axis {axis!r}")
        elements = tuple(dict.fromkeys(swept))
        values = [forward.response_element(model, el).m_value
                  for el in elements]
        return _response_out(body, elements, values, scale)

    @app.post("/diagnostics")
    async def post_diagnostics(request: Request):
        body = await _body_of(request)
        model = _model_of(body)
        if "sensitivity" in body:
            req = body["sensitivity"]
            try:
                el = GeometryElement(
                    req["orientation"], float(req["spacing_m"]),
                    float(req["frequency_Hz"]), float(req["height_m"]))
            except (KeyError, TypeError) as exc:
                raise HTTPException(
                    status_code=400,
                    detail=f"bad sensitivity element: {exc}") from exc
            grid = diagnostics.DepthGrid(req.get("dz", 0.1),
                                         req.get("z_max", 15.0))
            profile = diagnostics.sensitivity_analytic(model, el, grid)
            rows = reporting.sensitivity_rows(profile)
            return _json_response({
                "columns": list(reporting.SENSITIVITY_HEADER),
                "rows": [[float(x) for x in r] for r in rows],
            })
        if "frequency" in body and "device" not in body \
                and "geometry" not in body:
            try:
                payload = reporting.skin_depth_payload(
                    model, float(body["frequency"]))
            except diagnostics.DiagnosticsError as exc:
                raise HTTPException(status_code=422,
                                    detail=str(exc)) from exc
            return _json_response(payload)
        elements, _ = _elements_of(body, catalog)
        try:
            payload = reporting.skin_beta_payload(model, elements)
        except diagnostics.DiagnosticsError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return _json_response(payload)

    @app.post("/doi")
    async def post_doi(request: Request):
        body = await _body_of(request)
        model = _model_of(body)
        elements, _ = _elements_of(body, catalog)
        tau = float(body.get("tau", diagnostics.DOI_TAU))
        grid = diagnostics.DepthGrid(body.get("dz", 0.1),
                                     body.get("z_max", 15.0))
        estimates = [diagnostics.depth_of_investigation(model, el, tau, grid)
                     for el in elements]
        return _json_response(reporting.doi_payload(
            estimates, include_curves=bool(body.get("curves"))))

    @app.post("/invert")
    async def post_invert(request: Request):
        body = await _body_of(request)
        rows = _require(body, "data")
        try:
            elements = tuple(GeometryElement(
                r["orientation"], float(r["spacing_m"]),
                float(r["frequency_Hz"]), float(r["height_m"]))
                for r in rows)
            values = np.array([complex(float(r["P_raw"]), float(r["Q_raw"]))
                               for r in rows])
        except (KeyError, TypeError) as exc:
            raise HTTPException(status_code=400,
                                detail=f"bad data rows: {exc}") from exc
        try:
            grid_model = model_from_dict(_require(body, "grid"))
        except ModelError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        o = body.get("options", {})
        try:
            opts = inversion.InversionOptions(
                method=o.get("method", "GN"),
                component=o.get("component", "complex"),
                mode=o.get("mode", "sigma"),
                regularizer=inversion.Regularizer(
                    o.get("regularizer", "identity")),
                rank=o.get("rank"),
                noise_level=float(o.get("noise_level", 0.0)),
                max_iterations=int(o.get("max_iterations", 30)),
                x_bar=o.get("x_bar"),
            )
            problem = inversion.InversionProblem(elements, values,
                                                 grid_model, opts)
        except inversion.InversionError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        x0 = np.array(grid_model.sigma if opts.mode == "sigma"
                      else grid_model.mu_r, dtype=float) \
            if body.get("use_grid_values") else None

        def run():
            result = inversion.iterate(problem, x0)
            return reporting.inversion_report(result, problem, grid_model)

        job_id = jobs.submit(run)
        return _json_response({"job_id": job_id})

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str):
        try:
            job = jobs.get(job_id)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"no job {job_id!r}") from None
        return _json_response(job)

    @app.get("/devices")
    async def get_devices():
        return _json_response({"devices": [devicedb.entry_to_dict(e)
                                           for e in catalog.list()]})

    @app.put("/devices")
    async def put_devices(request: Request):
        body = await _body_of(request)
        try:
            entry = devicedb.entry_from_dict(body)
        except devicedb.DeviceError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        catalog.upsert(entry)
        return _json_response({"added": entry.name})

    return app
