import json
import struct
import warnings

import numpy as np
import pytest

from pathrank.errors import ParseError, SchemaError
from pathrank.graph import build_graph
from pathrank.io import (
    FORMAT_VERSION,
    MAGIC,
    bibliographic_schema,
    dump_bundle,
    generate_records,
    ingest,
    load_bundle,
    parse_edges,
    parse_nodes,
    write_bundle,
    write_network_files,
)


@pytest.fixture
def files(tmp_path):
    schema = bibliographic_schema()
    nodes, edges = generate_records(schema, {"A": 6, "P": 8, "C": 2}, 0.3, seed=3)
    return write_network_files(tmp_path / "net", schema, nodes, edges), (schema, nodes, edges)


def test_parse_nodes_attributes():
    recs, lines = parse_nodes("# header\nA\ta1\n\nP\tp1\tL=DM;L=IR;Y=2001\n")
    assert lines == [2, 4]
    assert recs[1] == ("P", "p1", {"L": {"DM", "IR"}, "Y": {"2001"}})


@pytest.mark.parametrize("text,line", [
    ("A\ta1\nA\n", 2),
    ("A\ta1\nA\ta2\tL\n", 2),
    ("\n\nA\ta1\tx=1\tjunk\n", 3),
])
def test_parse_nodes_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_nodes(text)
    assert exc.value.line == line


def test_parse_edges_error_line():
    with pytest.raises(ParseError) as exc:
        parse_edges("AP\ta1\tp1\nAP\ta1\n")
    assert exc.value.line == 2


@pytest.mark.parametrize("kind,line,expect_file", [
    ("dangling", 3, "edges"),
    ("relation", 2, "edges"),
    ("type", 2, "nodes"),
    ("duplicate", 3, "nodes"),
])
def test_schema_violations_carry_line(tmp_path, kind, line, expect_file):
    nodes = "A\ta1\nP\tp1\tL=DM\n"
    edges = "AP\ta1\tp1\nPC\tp1\tc1\n"
    if kind == "dangling":
        nodes += "C\tc1\n"
        edges = "AP\ta1\tp1\nPC\tp1\tc1\nAP\ta9\tp1\n"
    elif kind == "relation":
        nodes += "C\tc1\n"
        edges = "AP\ta1\tp1\nXY\tp1\tc1\n"
    elif kind == "type":
        nodes = "A\ta1\nQ\tq1\nC\tc1\n"
        edges = ""
    else:
        nodes = "A\ta1\nC\tc1\nA\ta1\n"
        edges = ""
    (tmp_path / "s.json").write_text(json.dumps(bibliographic_schema().to_dict()))
    (tmp_path / "n.tsv").write_text(nodes)
    (tmp_path / "e.tsv").write_text(edges)
    with pytest.raises(SchemaError) as exc:
        ingest(tmp_path / "s.json", tmp_path / "n.tsv", tmp_path / "e.tsv")
    assert exc.value.line == line
    assert f"{expect_file[0]}.tsv" in str(exc.value)


def test_bad_schema_json(tmp_path):
    (tmp_path / "s.json").write_text('{"types": [\n')
    (tmp_path / "n.tsv").write_text("")
    (tmp_path / "e.tsv").write_text("")
    with pytest.raises(ParseError):
        ingest(tmp_path / "s.json", tmp_path / "n.tsv", tmp_path / "e.tsv")


def test_reingest_is_byte_identical(files):
    paths, _ = files
    a = dump_bundle(ingest(paths["schema"], paths["nodes"], paths["edges"]))
    b = dump_bundle(ingest(paths["schema"], paths["nodes"], paths["edges"]))
    assert a == b


def test_source_date_epoch(files, monkeypatch):
    paths, _ = files
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1234")
    b = ingest(paths["schema"], paths["nodes"], paths["edges"])
    assert b.provenance["ingested_at"] == 1234


def test_load_matches_in_memory(files, tmp_path):
    paths, (schema, nodes, edges) = files
    write_bundle(ingest(paths["schema"], paths["nodes"], paths["edges"]), tmp_path / "b.bin")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        loaded = load_bundle(tmp_path / "b.bin", sources=paths)
    assert loaded.graph == build_graph(schema, nodes, edges)
    assert loaded.format_version == FORMAT_VERSION
    np.testing.assert_array_equal(
        loaded.graph.adjacency("AP").toarray(),
        build_graph(schema, nodes, edges).adjacency("AP").toarray(),
    )


def test_multi_edges_survive(tmp_path):
    (tmp_path / "s.json").write_text(json.dumps(bibliographic_schema().to_dict()))
    (tmp_path / "n.tsv").write_text("A\ta1\nP\tp1\nC\tc1\n")
    (tmp_path / "e.tsv").write_text("AP\ta1\tp1\nAP\ta1\tp1\nPC\tp1\tc1\n")
    write_bundle(ingest(tmp_path / "s.json", tmp_path / "n.tsv", tmp_path / "e.tsv"), tmp_path / "b")
    assert load_bundle(tmp_path / "b").graph.adjacency("AP").toarray().tolist() == [[2]]


def test_rejects_bad_magic_and_version(files, tmp_path):
    paths, _ = files
    raw = dump_bundle(ingest(paths["schema"], paths["nodes"], paths["edges"]))
    assert raw.startswith(MAGIC)
    (tmp_path / "m").write_bytes(b"NOTABUND" + raw[8:])
    with pytest.raises(ParseError):
        load_bundle(tmp_path / "m")
    (tmp_path / "v").write_bytes(raw[:8] + struct.pack("<I", FORMAT_VERSION + 1) + raw[12:])
    with pytest.raises(ParseError):
        load_bundle(tmp_path / "v")
    (tmp_path / "t").write_bytes(raw[:5])
    with pytest.raises(ParseError):
        load_bundle(tmp_path / "t")


def test_warns_on_changed_source_and_payload(files, tmp_path):
    paths, _ = files
    raw = dump_bundle(ingest(paths["schema"], paths["nodes"], paths["edges"]))
    (tmp_path / "b").write_bytes(raw)
    paths["nodes"].write_text(paths["nodes"].read_text() + "A\textra\n")
    with pytest.warns(UserWarning, match="changed since ingestion"):
        load_bundle(tmp_path / "b", sources=paths)
    # flip one count in the payload; the edge still exists with count 2
    tail = bytearray(raw)
    tail[-8] ^= 0x03
    (tmp_path / "c").write_bytes(bytes(tail))
    with pytest.warns(UserWarning, match="payload hash"):
        load_bundle(tmp_path / "c")


def test_generator_deterministic_and_covering():
    schema = bibliographic_schema()
    a = generate_records(schema, 20, 0.05, seed=9)
    assert a == generate_records(schema, 20, 0.05, seed=9)
    g = build_graph(schema, *a)
    for rel in ("AP", "PC"):
        w = g.adjacency(rel)
        assert (np.diff(w.indptr) > 0).all() and (w.getnnz(axis=0) > 0).all()
