import os
import pathlib

import pytest

import procaware

DATA = pathlib.Path(os.environ.get("PROCAWARE_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))
MICRO = DATA / "micro" / "pipeline.json"


def test_micro_topology_and_events():
    result = procaware.run(MICRO)
    top = result["topology"][0]
    assert top["sensor_id"] == "S2"
    assert top["wsr_sum_exact"] == "7"
    assert top["occurrences"] == 3
    assert top["importance_exact"] == "7/3"
    assert [e["timestamp"] for e in result["events"]] == [2, 4, 5]
    assert [e["lifecycle"] for e in result["events"]] == ["start", "unknown", "complete"]
    assert result["cases"] == ["case-1"]


def test_depth_override_adds_events():
    shallow = {e["timestamp"] for e in procaware.run(MICRO, depth=1)["events"]}
    deep = {e["timestamp"] for e in procaware.run(MICRO, depth=3)["events"]}
    assert shallow <= deep
    assert deep == {2, 3, 4, 5, 6}


def test_simulated_factory_chain(tmp_path):
    assert procaware.simulate(tmp_path, parts=3, seed=7) == 12
    result = procaware.run(tmp_path / "pipeline.json", output_dir=tmp_path / "out")
    assert len(result["cases"]) == 3
    edges = {(e["from"], e["to"]): e["count"] for e in result["dfg"]["edges"]}
    assert edges == {("move part", "grab part"): 3, ("grab part", "burn part"): 3, ("burn part", "store part"): 3}
    assert (tmp_path / "out" / "log.xes").read_text() == result["xes"]
    assert procaware.xes_roundtrip(result["xes"]) == result["xes"]


def test_joint_changes_and_sax():
    streams = {
        "S2": [(t, c) for t, c in enumerate([0, 0, 1, 1, 0, 1, 1])],
        "S3": [(t, c) for t, c in enumerate([0, 0, 2, 1, 2, 0, 2])],
        "S4": [(t, c) for t, c in enumerate([0, 0, 0, 0, 0, 3, 1])],
    }
    assert procaware.joint_changes(streams) == [
        (2, ["S2", "S3"]),
        (3, ["S3"]),
        (4, ["S2", "S3"]),
        (5, ["S2", "S3", "S4"]),
        (6, ["S3", "S4"]),
    ]
    ramp = [float(i) for i in range(100)]
    assert procaware.sax(ramp, 2, 50) == [0, 1]
    assert procaware.sax([3.0 * v - 7.0 for v in ramp], 4, 25) == procaware.sax(ramp, 4, 25)


def test_errors_carry_their_kind(tmp_path):
    with pytest.raises(procaware.ProcawareError) as info:
        procaware.sax([1.0, 2.0], 1, 1)
    assert info.value.kind == "InvalidSaxConfig"

    config = tmp_path / "pipeline.json"
    config.write_text(MICRO.read_text().replace('"annotations.json"', '"missing.json"'))
    for name in ("streams.csv", "manifest.json", "grouping.json"):
        (tmp_path / name).write_text((DATA / "micro" / name).read_text())
    with pytest.raises(procaware.ProcawareError) as info:
        procaware.run(config)
    assert info.value.stage == "annotate"
    assert info.value.kind == "MissingAnnotation"
    assert str(info.value).startswith("annotate: MissingAnnotation")


def test_session_service():
    service = procaware.Service(MICRO)
    status, created = service.request("POST", "/sessions")
    assert status == 201
    sid = created["session_id"]
    assert service.request("GET", f"/sessions/{sid}/dfg")[0] == 409
    abstraction = {"depth": 1, "labels": [{"group": "B", "label": "grab part"}]}
    status, body = service.request("POST", f"/sessions/{sid}/abstraction", abstraction)
    assert status == 200
    assert [e["timestamp"] for e in body["events"]] == [2, 4, 5]
    status, _ = service.request("POST", f"/sessions/{sid}/correlation", {"strategy": "single_case"})
    assert status == 200
    status, body = service.request("GET", f"/sessions/{sid}/dfg", lifecycle="all")
    assert status == 200
    assert body["dfg"]["activities"] == [{"label": "grab part", "frequency": 3}]
    status, xml = service.request("GET", f"/sessions/{sid}/export/xes", format="xml")
    assert status == 200 and xml.startswith("<?xml")
