"""HTTP surface: endpoint wiring, validation mapping, mutation semantics."""

import json

import pytest
from fastapi.testclient import TestClient

from mcsg import (BuildConfig, compute_view, export_document, export_json,
                  generate_synthetic_dataset, import_document, select_roi)
from mcsg.service import create_app, create_session


@pytest.fixture(scope="module")
def served():
    ds, truth = generate_synthetic_dataset(n_patterns=3, channels_per_pattern=5,
                                           noise_channels=2, width=16, height=16, seed=13)
    config = BuildConfig(tau=0.6, seed=1)
    state = create_session(ds, config)
    client = TestClient(create_app(state))
    return client, state, ds, truth


def fresh_client():
    ds, truth = generate_synthetic_dataset(n_patterns=2, channels_per_pattern=4,
                                           width=16, height=16, seed=23)
    state = create_session(ds, BuildConfig(tau=0.6, seed=2))
    return TestClient(create_app(state)), state, ds, truth


class TestReads:
    def test_graph_is_schema_valid(self, served):
        client, state, *_ = served
        payload = client.get("/graph").json()
        rebuilt = import_document(payload)  # validation is the schema check
        assert rebuilt.channel_ids == tuple(sorted(state.graph.channel_ids))
        assert payload == export_document(state.graph)

    def test_dataset_meta(self, served):
        client, state, ds, _ = served
        meta = client.get("/dataset/meta").json()
        assert meta["name"] == ds.name
        assert meta["width"] == 16 and meta["height"] == 16
        assert len(meta["channels"]) == ds.n_channels
        assert meta["config"]["tau"] == 0.6
        assert meta["optical_images"] == ["he"]

    def test_nodetrix_matches_library(self, served):
        client, state, ds, _ = served
        ids = list(ds.channel_ids[:4])
        payload = client.get("/graph/nodetrix", params={"nodes": ",".join(ids)}).json()
        from mcsg import nodetrix_matrix
        expected = nodetrix_matrix(state.graph.graph, ids)
        assert tuple(payload["order"]) == expected.node_order
        assert payload["cells"] == expected.cells.tolist()

    def test_graph_view_matches_compute_view(self, served):
        client, state, *_ = served
        cid = state.graph.hierarchy.levels[0][0]
        payload = client.get("/graph/view", params={"expanded": cid}).json()
        view = compute_view(state.graph, expanded={cid}, level=0)
        assert payload["visible_channels"] == list(view.visible_channels)
        assert payload["hybrid_edges"] == [
            {"source": a, "target": b, "weight": w} for a, b, w in view.hybrid_edges]

    def test_qgp_json_and_csv(self, served):
        client, state, *_ = served
        payload = client.get("/qgp").json()
        assert payload["tau"] == 0.6
        assert {entry["node_id"] for entry in payload["nodes"]} == set(state.graph.channel_ids)
        ranked = client.get("/qgp", params={"sort_by": "betweenness"}).json()["nodes"]
        values = [entry["betweenness"] for entry in ranked]
        assert values == sorted(values, reverse=True)
        csv_text = client.get("/qgp", params={"format": "csv"}).text
        assert csv_text.startswith("node_id,weighted_degree")

    def test_images_served_as_png(self, served):
        client, state, ds, _ = served
        for url in (f"/image/channel/{ds.channel_ids[0]}",
                    "/image/aggregate?nodes=" + ",".join(ds.channel_ids[:2]),
                    "/image/projection",
                    "/image/optical/he"):
            response = client.get(url)
            assert response.status_code == 200
            assert response.headers["content-type"] == "image/png"
            assert response.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_unknown_channel_image_is_404(self, served):
        client, *_ = served
        assert client.get("/image/channel/ghost").status_code == 404
        assert client.get("/image/optical/ghost").status_code == 404

    def test_repeated_reads_leave_export_unchanged(self, served):
        client, *_ = served
        before = client.get("/export").text
        for _ in range(2):
            client.get("/graph")
            client.get("/qgp")
            client.get("/dataset/meta")
        assert client.get("/export").text == before


class TestRoi:
    def test_matches_direct_library_call(self, served):
        client, state, ds, truth = served
        pattern = truth.patterns[0]
        body = {"polygon": pattern.polygon(), "mu": 0.5, "sigma": 0.6}
        payload = client.post("/roi", json=body).json()
        direct = select_roi(ds, pattern.polygon(), 0.5, 0.6)
        assert payload["matched_nodes"] == sorted(direct.matched_nodes)
        assert payload["region_size"] == direct.region.size

    def test_empty_region_is_422(self, served):
        client, *_ = served
        body = {"polygon": [(100.0, 100.0), (105.0, 100.0), (105.0, 105.0)],
                "mu": 0.2, "sigma": 0.2}
        response = client.post("/roi", json=body)
        assert response.status_code == 422
        assert "masked pixel" in response.json()["detail"]

    def test_self_intersecting_polygon_is_422(self, served):
        client, *_ = served
        body = {"polygon": [(0, 0), (4, 4), (4, 0), (0, 4)], "mu": 0.1, "sigma": 0.1}
        response = client.post("/roi", json=body)
        assert response.status_code == 422


class TestMutations:
    def test_edit_undo_redo_cycle(self):
        client, state, *_ = fresh_client()
        level0 = list(state.graph.hierarchy.levels[0])
        before = export_json(state.graph)
        response = client.post("/edit", json={"kind": "merge", "targets": level0[:2]})
        assert response.status_code == 200
        assert response.json()["applied"] is True
        merged = export_json(state.graph)
        assert merged != before
        assert client.post("/undo").json()["applied"] is True
        assert export_json(state.graph) == before
        assert client.post("/redo").json()["applied"] is True
        assert export_json(state.graph) == merged
        assert client.post("/redo").json()["applied"] is False

    def test_invalid_split_is_422_with_message(self):
        client, state, *_ = fresh_client()
        target = state.graph.hierarchy.levels[0][0]
        members = sorted(state.graph.hierarchy.communities[target].members)
        response = client.post("/edit", json={
            "kind": "split", "target": target,
            "parts": [members[:1], members[:1]]})
        assert response.status_code == 422
        assert "overlap" in response.json()["detail"]

    def test_noop_reassign_reports_warning(self):
        client, state, *_ = fresh_client()
        membership = state.graph.finest_membership()
        node, community = next(iter(membership.items()))
        response = client.post("/edit", json={
            "kind": "reassign", "node": node, "destination": community})
        payload = response.json()
        assert payload["applied"] is False
        assert any("no-op" in note for note in payload["warnings"])

    def test_export_import_cycle(self):
        client, state, *_ = fresh_client()
        level0 = list(state.graph.hierarchy.levels[0])
        client.post("/edit", json={"kind": "merge", "targets": level0[:2]})
        exported = client.get("/export")
        assert exported.headers["content-disposition"].startswith("attachment")
        document = json.loads(exported.text)
        client.post("/undo")
        response = client.post("/import", json={"document": document})
        assert response.status_code == 200
        assert export_document(state.graph) == document

    def test_import_rejects_foreign_channels(self):
        client, state, *_ = fresh_client()
        document = export_document(state.graph)
        document["nodes"].insert(0, {"id": "alien", "kind": "channel", "mz": 9.0})
        response = client.post("/import", json={"document": document})
        assert response.status_code == 422
        assert "alien" in response.json()["detail"]

    def test_edit_http_replay_equals_command_log(self):
        client, state, *_ = fresh_client()
        pristine = state.graph
        level0 = list(pristine.hierarchy.levels[0])
        client.post("/edit", json={"kind": "merge", "targets": level0[:2]})
        merged_id = next(cid for cid in state.graph.hierarchy.levels[0]
                         if cid not in level0)
        members = sorted(state.graph.hierarchy.communities[merged_id].members)
        client.post("/edit", json={"kind": "split", "target": merged_id,
                                   "parts": [members[:2], members[2:]]})
        from mcsg import replay_log
        assert export_json(replay_log(pristine, state.graph.edit_log)) \
            == export_json(state.graph)


class TestQgpThresholdOverrides:
    def test_threshold_params_map_to_library_call(self, served):
        client, state, *_ = served
        from mcsg.qgp import QgpThresholds
        from mcsg import compute_qgp
        payload = client.get("/qgp", params={"hub_z": 0.1, "bridge_participation": 0.0}).json()
        report = compute_qgp(state.graph, tau=state.config.tau,
                             thresholds=QgpThresholds(hub_z=0.1, bridge_participation=0.0))
        for entry in payload["nodes"]:
            assert entry["flags"] == sorted(report.nodes[entry["node_id"]].flags)
        default = client.get("/qgp").json()
        assert any(d["flags"] != e["flags"]
                   for d, e in zip(default["nodes"], payload["nodes"]))
