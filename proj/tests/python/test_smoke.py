import json
import os
from pathlib import Path

import pytest

import ddlpb

SOURCE_DIR = Path(os.environ.get("DDLPB_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FRAMES = SOURCE_DIR / "data" / "frames"
AVITO_DDL = SOURCE_DIR / "data" / "ddl" / "rel-avito.sql"


@pytest.fixture(scope="module")
def index():
    return ddlpb.FrameIndex.load(FRAMES)


def test_frame_queries(index):
    assert len(index) > 0
    hits = index.search_by_lemma("order", max_results=3)
    assert 0 < len(hits) <= 3
    ids = [h["sense_id"] for h in hits]
    assert ids == sorted(ids)
    assert "order.02" in index
    detail = index.search_by_sense_id("order.02", include_examples=False)
    assert [r["label"] for r in detail["roles"]][:1] == ["ARG0"]
    assert index.search_by_lemma("zzxqv") == []
    with pytest.raises(ddlpb.NotFoundError):
        index.search_by_sense_id("order.99")
    with pytest.raises(KeyError):
        index.search_by_sense_id("order.99")


def test_parse_ddl_round_trip():
    schema = ddlpb.parse_ddl(AVITO_DDL.read_text(), "rel-avito.sql")
    assert len(schema) == 8
    assert schema.source_name == "rel-avito.sql"
    assert ddlpb.parse_ddl(ddlpb.canonical_ddl(schema), "rel-avito.sql") == schema
    ctx = ddlpb.table_context(schema, "Ads")
    assert ctx["table"]["name"] == "Ads"
    with pytest.raises(ddlpb.ParseError):
        ddlpb.parse_ddl("CREATE TABLE (")
    with pytest.raises(ddlpb.NotFoundError):
        ddlpb.table_context(schema, "Nope")


def test_mapping_serialization():
    doc = {
        "table_name": "Orders",
        "mappings": [
            {
                "sense_id": "order.02",
                "lemma": "order",
                "definition": "request goods",
                "roles": {"ARG1": "product_id", "ARG0": "customer_id"},
                "confidence": 0.75,
            }
        ],
    }
    text = ddlpb.serialize_mapping(doc)
    assert ddlpb.deserialize_mapping(text) == ddlpb.deserialize_mapping(json.dumps(doc))
    assert list(json.loads(text)["mappings"][0]["roles"]) == ["ARG0", "ARG1"]
    doc["mappings"][0]["confidence"] = 1.5
    with pytest.raises(ddlpb.ValidationError):
        ddlpb.serialize_mapping(doc)


def test_pipeline_is_resumable(index, tmp_path):
    report = ddlpb.run(AVITO_DDL, "rel-avito", tmp_path, index)
    schema = ddlpb.parse_ddl(AVITO_DDL.read_text())
    status = ddlpb.coordinate(schema, tmp_path, "rel-avito")
    assert status["todo"] == []
    assert {s["status"] for s in status["statuses"]} == {"VALID"}
    before = {p: p.read_bytes() for p in tmp_path.rglob("*.json")}
    again = ddlpb.run(AVITO_DDL, "rel-avito", tmp_path, index)
    assert {p: p.read_bytes() for p in tmp_path.rglob("*.json")} == before
    assert report["db_name"] == again["db_name"] == "rel-avito"
    assert ddlpb.classify_mapping_file(tmp_path, "rel-avito", "Ads")[0] == "VALID"


def test_propbank_server(index):
    server = ddlpb.PropBankServer(index)
    init = server.handle(
        {"jsonrpc": "2.0", "id": 1, "method": "initialize",
         "params": {"protocolVersion": ddlpb.PROTOCOL_VERSION, "capabilities": {}}}
    )
    assert init["result"]["protocolVersion"] == ddlpb.PROTOCOL_VERSION
    assert server.handle({"jsonrpc": "2.0", "method": "notifications/initialized"}) is None
    tools = server.handle({"jsonrpc": "2.0", "id": 2, "method": "tools/list"})["result"]["tools"]
    assert {t["name"] for t in tools} == {"search_by_lemma", "search_by_sense_id"}
    result = server.call_tool("search_by_lemma", {"lemma": "order", "max_results": 2})
    assert result["isError"] is False
    bad = json.loads(server.handle_text("{not json"))
    assert bad["error"]["code"] == -32700


def test_fs_server_sandbox(tmp_path):
    box = tmp_path / "box"
    box.mkdir()
    (tmp_path / "secret.txt").write_text("outside")
    server = ddlpb.FsServer([box])
    assert server.call_tool("write_file", {"path": str(box / "a.txt"), "content": "héllo"})["isError"] is False
    read = server.call_tool("read_text_file", {"path": str(box / "a.txt")})
    assert read["content"][0]["text"] == "héllo"
    assert server.call_tool("read_text_file", {"path": str(box / ".." / "secret.txt")})["isError"] is True
    ro = ddlpb.FsServer([box], read_only=True)
    assert ro.call_tool("write_file", {"path": str(box / "b.txt"), "content": "x"})["isError"] is True
    with pytest.raises(ddlpb.ValidationError):
        ddlpb.FsServer([tmp_path / "missing"])
