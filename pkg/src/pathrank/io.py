"""Text ingestion, the binary network bundle and synthetic networks.

Text formats (UTF-8, ``#`` comments and blank lines ignored):

* schema: JSON ``{"types": [...], "relations": [{"name", "source", "target"}]}``
* nodes: ``type<TAB>id<TAB>attr=value;attr=value`` (third column optional;
  repeating an attribute gives it several values)
* edges: ``relation<TAB>source_id<TAB>target_id``

Bundle layout, all integers little-endian::

    b"PATHRANK" | u32 format version | u32 reserved | u64 header length
    header: UTF-8 JSON (schema, nodes, provenance, edge counts)
    per relation in schema order: src, tgt, count arrays as int64
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError
from .graph import Schema, TypedGraph, build_graph

MAGIC = b"PATHRANK"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sIIQ")


def bibliographic_schema() -> Schema:
    """Author-paper-conference schema shipped with the package."""
    text = resources.files("pathrank").joinpath("data/bibliographic.json").read_text("utf-8")
    return Schema.from_json(text)


def read_schema(path) -> Schema:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid schema JSON: {exc.msg}", line=exc.lineno) from exc
    return Schema.from_dict(data)


def _data_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip() and not line.lstrip().startswith("#"):
            yield lineno, line


def parse_nodes(text: str) -> tuple[list, list[int]]:
    """Node records plus the source line of each."""
    records, lines = [], []
    for lineno, line in _data_lines(text):
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 2 or 3 tab-separated fields, got {len(parts)}", line=lineno)
        otype, nid = parts[0], parts[1]
        if not otype or not nid:
            raise ParseError("empty type or id", line=lineno)
        attrs: dict[str, set] = {}
        if len(parts) == 3 and parts[2]:
            for item in parts[2].split(";"):
                if not item:
                    continue
                key, sep, value = item.partition("=")
                if not sep or not key:
                    raise ParseError(f"malformed attribute {item!r}", line=lineno)
                attrs.setdefault(key, set()).add(value)
        records.append((otype, nid, attrs))
        lines.append(lineno)
    return records, lines


def parse_edges(text: str) -> tuple[list, list[int]]:
    records, lines = [], []
    for lineno, line in _data_lines(text):
        parts = line.split("\t")
        if len(parts) != 3 or not all(parts):
            raise ParseError("expected relation<TAB>source_id<TAB>target_id", line=lineno)
        records.append(tuple(parts))
        lines.append(lineno)
    return records, lines


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True, eq=False)
class NetworkBundle:
    graph: TypedGraph
    provenance: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION


def ingest(schema_file, nodes_file, edges_file) -> NetworkBundle:
    """Read the three text files into a bundle.

    Raises :class:`ParseError` for malformed lines and :class:`SchemaError`
    for records that break the schema; both carry the offending line and
    the file name in their message.
    """
    schema = read_schema(schema_file)
    node_text = Path(nodes_file).read_text(encoding="utf-8")
    edge_text = Path(edges_file).read_text(encoding="utf-8")
    try:
        nodes, node_lines = parse_nodes(node_text)
    except ParseError as exc:
        raise ParseError(f"{nodes_file}: {exc}", line=exc.line) from None
    try:
        edges, edge_lines = parse_edges(edge_text)
    except ParseError as exc:
        raise ParseError(f"{edges_file}: {exc}", line=exc.line) from None
    try:
        graph = build_graph(schema, nodes, edges)
    except SchemaError as exc:
        kind, pos = getattr(exc, "record", (None, None))
        if kind is None:
            raise
        fname, lines = (nodes_file, node_lines) if kind == "node" else (edges_file, edge_lines)
        err = SchemaError(f"{fname}: {exc}", line=lines[pos - 1])
        raise err from None

    files = {"schema": schema_file, "nodes": nodes_file, "edges": edges_file}
    if "SOURCE_DATE_EPOCH" in os.environ:
        stamp = int(os.environ["SOURCE_DATE_EPOCH"])
    else:
        stamp = max(int(Path(f).stat().st_mtime) for f in files.values())
    provenance = {
        "sources": {k: _sha256(f) for k, f in files.items()},
        "ingested_at": stamp,
    }
    return NetworkBundle(graph, provenance)


def _payload(graph: TypedGraph) -> bytes:
    chunks = []
    for rel in graph.schema.relations:
        for arr in graph.edges[rel.name]:
            chunks.append(np.ascontiguousarray(arr, dtype="<i8").tobytes())
    return b"".join(chunks)


def dump_bundle(bundle: NetworkBundle) -> bytes:
    g = bundle.graph
    payload = _payload(g)
    header = {
        "format_version": FORMAT_VERSION,
        "schema": g.schema.to_dict(),
        "nodes": {
            t: [
                [nid, {a: sorted(v) for a, v in sorted(attrs.items())}]
                for nid, attrs in zip(g.node_ids[t], g.node_attrs[t])
            ]
            for t in g.schema.object_types
        },
        "edges": {r.name: int(len(g.edges[r.name][0])) for r in g.schema.relations},
        "provenance": bundle.provenance,
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, 0, len(hbytes)) + hbytes + payload


def write_bundle(bundle: NetworkBundle, path) -> None:
    Path(path).write_bytes(dump_bundle(bundle))


def load_bundle(path, sources: dict | None = None) -> NetworkBundle:
    """Read a bundle written by :func:`write_bundle`.

    Warns when the stored payload hash does not match, or when ``sources``
    (``{"schema": path, ...}``) point at files whose hashes changed since
    ingestion.
    """
    data = Path(path).read_bytes()
    if len(data) < _PREFIX.size:
        raise ParseError(f"{path}: truncated bundle")
    magic, version, _, hlen = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise ParseError(f"{path}: not a network bundle")
    if version != FORMAT_VERSION:
        raise ParseError(f"{path}: bundle format {version}, expected {FORMAT_VERSION}")
    header = json.loads(data[_PREFIX.size : _PREFIX.size + hlen].decode("utf-8"))
    payload = data[_PREFIX.size + hlen :]
    if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
        warnings.warn(f"{path}: payload hash mismatch", stacklevel=2)

    schema = Schema.from_dict(header["schema"])
    node_records = [
        (t, nid, attrs) for t in schema.object_types for nid, attrs in header["nodes"][t]
    ]
    arrays = np.frombuffer(payload, dtype="<i8")
    edge_records = []
    offset = 0
    for rel in schema.relations:
        nnz = header["edges"][rel.name]
        src, tgt, cnt = (arrays[offset + q * nnz : offset + (q + 1) * nnz] for q in range(3))
        offset += 3 * nnz
        ids_s, ids_t = header["nodes"][rel.source], header["nodes"][rel.target]
        for a, b, c in zip(src.tolist(), tgt.tolist(), cnt.tolist()):
            edge_records.extend([(rel.name, ids_s[a][0], ids_t[b][0])] * c)
    graph = build_graph(schema, node_records, edge_records)

    provenance = header.get("provenance", {})
    for key, f in (sources or {}).items():
        stored = provenance.get("sources", {}).get(key)
        if stored is not None and stored != _sha256(f):
            warnings.warn(f"{path}: source {key} ({f}) changed since ingestion", stacklevel=2)
    return NetworkBundle(graph, provenance, version)


def generate_records(
    schema: Schema,
    nodes_per_type,
    density: float,
    labels=("DM", "IR", "DB"),
    seed: int = 42,
    label_attr: str = "L",
):
    """Random node and edge records for ``schema``.

    ``nodes_per_type`` is an int or a ``{type: count}`` mapping. Every node
    gets one label drawn uniformly from ``labels``. Each relation links
    every (source, target) pair independently with probability
    ``density``; afterwards every source node gets at least one outgoing
    edge and every target node at least one incoming edge.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    if isinstance(nodes_per_type, int):
        nodes_per_type = {t: nodes_per_type for t in schema.object_types}
    ids = {t: [f"{t}{i}" for i in range(nodes_per_type[t])] for t in schema.object_types}
    labels = list(labels)
    nodes = []
    for t in schema.object_types:
        picks = rng.integers(len(labels), size=len(ids[t])) if labels else []
        for nid, lab in zip(ids[t], picks if labels else [None] * len(ids[t])):
            nodes.append((t, nid, {label_attr: {labels[lab]}} if labels else {}))
    edges = []
    for rel in schema.relations:
        m, n = len(ids[rel.source]), len(ids[rel.target])
        if not m or not n:
            continue
        adj = rng.random((m, n)) < density
        for s in np.flatnonzero(~adj.any(axis=1)):
            adj[s, rng.integers(n)] = True
        for t in np.flatnonzero(~adj.any(axis=0)):
            adj[rng.integers(m), t] = True
        for s, t in zip(*np.nonzero(adj)):
            edges.append((rel.name, ids[rel.source][s], ids[rel.target][t]))
    return nodes, edges


def generate_network(schema: Schema, nodes_per_type, density: float, **kwargs) -> TypedGraph:
    nodes, edges = generate_records(schema, nodes_per_type, density, **kwargs)
    return build_graph(schema, nodes, edges)


def write_network_files(out_dir, schema: Schema, nodes, edges) -> dict[str, Path]:
    """Write ``schema.json``, ``nodes.tsv`` and ``edges.tsv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {k: out / f for k, f in
             (("schema", "schema.json"), ("nodes", "nodes.tsv"), ("edges", "edges.tsv"))}
    paths["schema"].write_text(json.dumps(schema.to_dict(), indent=2) + "\n", encoding="utf-8")
    with open(paths["nodes"], "w", encoding="utf-8") as fh:
        for t, nid, attrs in nodes:
            cells = ";".join(f"{a}={v}" for a in sorted(attrs) for v in sorted(attrs[a]))
            fh.write(f"{t}\t{nid}\t{cells}\n")
    with open(paths["edges"], "w", encoding="utf-8") as fh:
        for rname, s, t in edges:
            fh.write(f"{rname}\t{s}\t{t}\n")
    return paths
