"""Localhost HTTP service exposing the dataset, the MCSG, and edit mutations.

REST over JSON (images as PNG); one dataset session per process. Reads hit
immutable snapshots and are safe under concurrency; mutations (edit, undo,
redo, import) funnel through a single lock, so each response reflects a fully
applied state. Expansion is per-client view state: the graph view endpoint
derives hybrid edges from the expansion set passed in the query, the server
keeps none of it.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, replace

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .build import BuildConfig, build_mcsg
from .communities import Mcsg, compute_view
from .dataset import MsiDataset
from .editing import (EditCommand, EditSession, export_document, export_json,
                      import_document, merge_command, reassign_command, split_command)
from .errors import (EditError, EditNoOpWarning, EmptyRegionError, ImportDocumentError,
                     InsufficientDataError, McsgError, NotFoundError, PolygonError)
from .projection import compute_projection
from .qgp import QgpThresholds, compute_qgp, rank_nodes
from .rendering import (render_aggregate_png, render_channel_png,
                        render_optical_png, render_projection_png)
from .roi import select_roi
from .similarity import nodetrix_matrix

_STATUS = {
    NotFoundError: 404,
    EditError: 422,
    PolygonError: 422,
    EmptyRegionError: 422,
    ImportDocumentError: 422,
    InsufficientDataError: 422,
    ValueError: 422,
}


@dataclass
class SessionState:
    """One dataset session: immutable dataset, current graph, edit history."""

    dataset: MsiDataset
    config: BuildConfig
    session: EditSession
    qgp_thresholds: QgpThresholds = QgpThresholds()

    @property
    def graph(self) -> Mcsg:
        return self.session.graph


def create_session(dataset: MsiDataset, config: BuildConfig = BuildConfig(),
                   imported: Mcsg | None = None) -> SessionState:
    mcsg = imported if imported is not None else build_mcsg(dataset, config)
    return SessionState(dataset=dataset, config=config, session=EditSession(mcsg))


class RoiRequest(BaseModel):
    polygon: list[tuple[float, float]] = Field(min_length=3)
    mu: float = Field(ge=0.0, le=1.0)
    sigma: float = Field(ge=0.0, le=1.0)


class EditRequest(BaseModel):
    kind: str
    targets: list[str] | None = None       # merge
    target: str | None = None              # split
    parts: list[list[str]] | None = None   # split
    node: str | None = None                # reassign
    destination: str | None = None         # reassign

    def to_command(self) -> EditCommand:
        if self.kind == "merge":
            if not self.targets or len(self.targets) < 2:
                raise EditError("merge needs a 'targets' list of at least two community ids")
            return merge_command(self.targets)
        if self.kind == "split":
            if self.target is None or self.parts is None or len(self.parts) != 2:
                raise EditError("split needs 'target' and exactly two 'parts'")
            return split_command(self.target, self.parts[0], self.parts[1])
        if self.kind == "reassign":
            if self.node is None or self.destination is None:
                raise EditError("reassign needs 'node' and 'destination'")
            return reassign_command(self.node, self.destination)
        raise EditError(f"unknown edit kind {self.kind!r}")


class ImportRequest(BaseModel):
    document: dict


def _csv_ids(raw: str) -> list[str]:
    ids = [part for part in (raw or "").split(",") if part]
    if not ids:
        raise ValueError("expected a comma-separated list of node ids")
    return ids


def create_app(state: SessionState) -> FastAPI:
    app = FastAPI(title="mcsg", description="mass channel similarity graph service")
    # localhost tool: the browser client runs on the dev-server origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    write_lock = threading.Lock()
    projection_cache: dict[str, object] = {}

    @app.exception_handler(McsgError)
    async def mcsg_error_handler(request, exc: McsgError):
        status = next((code for kind, code in _STATUS.items() if isinstance(exc, kind)), 422)
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error_handler(request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    def _projection():
        if "projection" not in projection_cache:
            projection_cache["projection"] = compute_projection(state.dataset)
        return projection_cache["projection"]

    @app.get("/dataset/meta")
    def dataset_meta():
        ds = state.dataset
        cfg = state.config
        return {
            "name": ds.name,
            "width": ds.grid.width,
            "height": ds.grid.height,
            "valid_pixels": ds.grid.n_valid,
            "channels": [{"id": ch.channel_id, "mz": ch.mz} for ch in ds.channels],
            "optical_images": sorted(ds.optical_images),
            "config": {
                "similarity": cfg.measure,
                "tau": cfg.tau,
                "seed": cfg.seed,
                "max_depth": cfg.max_depth,
                "min_split_size": cfg.min_split_size,
                "epsilon": cfg.epsilon,
            },
        }

    @app.get("/graph")
    def get_graph():
        return export_document(state.graph)

    @app.get("/graph/view")
    def get_graph_view(level: int = 0, expanded: str = ""):
        ids = [part for part in expanded.split(",") if part]
        view = compute_view(state.graph, expanded=set(ids), level=level)
        return {
            "level": view.level,
            "expanded": list(view.expanded),
            "visible_channels": list(view.visible_channels),
            "collapsed_communities": list(view.collapsed_communities),
            "channel_edges": [{"source": a, "target": b, "weight": w}
                              for a, b, w in view.channel_edges],
            "community_edges": [{"source": a, "target": b, "weight": w}
                                for a, b, w in view.community_edges],
            "hybrid_edges": [{"source": a, "target": b, "weight": w}
                             for a, b, w in view.hybrid_edges],
        }

    @app.get("/graph/nodetrix")
    def get_nodetrix(nodes: str):
        matrix = nodetrix_matrix(state.graph.graph, _csv_ids(nodes))
        return {"order": list(matrix.node_order), "cells": matrix.cells.tolist()}

    @app.get("/qgp")
    def get_qgp(format: str = "json", sort_by: str | None = None, descending: bool = True,
                hub_z: float | None = None, singleton_degree_percentile: float | None = None,
                singleton_weight_margin: float | None = None, misassigned_ratio: float | None = None,
                bridge_betweenness_percentile: float | None = None,
                bridge_participation: float | None = None):
        overrides = {name: value for name, value in (
            ("hub_z", hub_z),
            ("singleton_degree_percentile", singleton_degree_percentile),
            ("singleton_weight_margin", singleton_weight_margin),
            ("misassigned_ratio", misassigned_ratio),
            ("bridge_betweenness_percentile", bridge_betweenness_percentile),
            ("bridge_participation", bridge_participation),
        ) if value is not None}
        thresholds = replace(state.qgp_thresholds, **overrides) if overrides \
            else state.qgp_thresholds
        report = compute_qgp(state.graph, tau=state.config.tau, thresholds=thresholds)
        if format == "csv":
            return Response(content=report.to_csv(), media_type="text/csv")
        if format != "json":
            raise ValueError(f"unknown format {format!r}; expected 'json' or 'csv'")
        order = rank_nodes(report, sort_by, descending) if sort_by else list(report.nodes)
        return {
            "tau": report.tau,
            "nodes": [
                {
                    "node_id": nid,
                    "weighted_degree": report.nodes[nid].weighted_degree,
                    "within_community_degree_z": report.nodes[nid].within_community_degree_z,
                    "participation_coefficient": report.nodes[nid].participation_coefficient,
                    "betweenness": report.nodes[nid].betweenness,
                    "local_clustering_coefficient": report.nodes[nid].local_clustering_coefficient,
                    "flags": sorted(report.nodes[nid].flags),
                }
                for nid in order
            ],
        }

    @app.get("/image/channel/{channel_id}")
    def get_channel_image(channel_id: str, colormap: str = "viridis"):
        return Response(content=render_channel_png(state.dataset, channel_id, colormap),
                        media_type="image/png")

    @app.get("/image/aggregate")
    def get_aggregate_image(nodes: str, colormap: str = "viridis"):
        return Response(content=render_aggregate_png(state.dataset, _csv_ids(nodes), colormap),
                        media_type="image/png")

    @app.get("/image/projection")
    def get_projection_image():
        return Response(content=render_projection_png(state.dataset, _projection()),
                        media_type="image/png")

    @app.get("/image/optical/{name}")
    def get_optical_image(name: str):
        return Response(content=render_optical_png(state.dataset, name), media_type="image/png")

    @app.post("/roi")
    def post_roi(request: RoiRequest):
        selection = select_roi(state.dataset, request.polygon, request.mu, request.sigma)
        return {
            "matched_nodes": sorted(selection.matched_nodes),
            "region_size": int(selection.region.size),
            "mu": selection.mu,
            "sigma": selection.sigma,
        }

    @app.post("/edit")
    def post_edit(request: EditRequest):
        cmd = request.to_command()
        with write_lock:
            before = state.graph
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", EditNoOpWarning)
                state.session.apply(cmd)
            applied = state.graph is not before
            notes = [str(w.message) for w in caught if issubclass(w.category, EditNoOpWarning)]
            return {"applied": applied, "warnings": notes, "graph": export_document(state.graph)}

    @app.post("/undo")
    def post_undo():
        with write_lock:
            applied = state.session.undo()
            return {"applied": applied, "graph": export_document(state.graph)}

    @app.post("/redo")
    def post_redo():
        with write_lock:
            applied = state.session.redo()
            return {"applied": applied, "graph": export_document(state.graph)}

    @app.get("/export")
    def get_export():
        return Response(
            content=export_json(state.graph),
            media_type="application/json",
            headers={"Content-Disposition": 'attachment; filename="mcsg.json"'},
        )

    @app.post("/import")
    def post_import(request: ImportRequest):
        mcsg = import_document(request.document)
        unknown = set(mcsg.channel_ids) - set(state.dataset.channel_ids)
        if unknown:
            raise ImportDocumentError(
                f"document references channel {sorted(unknown)[0]!r} missing from the loaded dataset")
        mcsg = replace(mcsg, epsilon=state.config.epsilon)
        with write_lock:
            state.session.replace(mcsg)
            return {"applied": True, "graph": export_document(state.graph)}

    return app
