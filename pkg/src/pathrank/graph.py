"""Typed heterogeneous graph: schema, nodes with attributes, counted edges."""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
import scipy.sparse as sp

from .errors import SchemaError


@dataclass(frozen=True, order=True)
class Relation:
    """A directed relation between two object types.

    Relations taken from a path may be ``inverted``; the inverse of
    ``AP: A -> P`` is ``AP^-1: P -> A`` and shares its adjacency (transposed).
    """

    name: str
    source: str
    target: str
    inverted: bool = False

    def inverse(self) -> Relation:
        return Relation(self.name, self.target, self.source, not self.inverted)

    @property
    def label(self) -> str:
        return f"{self.name}^-1" if self.inverted else self.name


@dataclass(frozen=True)
class Schema:
    object_types: tuple[str, ...]
    relations: tuple[Relation, ...]

    def __post_init__(self):
        object.__setattr__(self, "object_types", tuple(self.object_types))
        object.__setattr__(self, "relations", tuple(self.relations))
        if len(set(self.object_types)) != len(self.object_types):
            raise SchemaError("duplicate object type in schema")
        names = set()
        for r in self.relations:
            if r.inverted:
                raise SchemaError(f"schema relation {r.name!r} must be declared forward")
            if r.name in names:
                raise SchemaError(f"duplicate relation name {r.name!r}")
            names.add(r.name)
            for t in (r.source, r.target):
                if t not in self.object_types:
                    raise SchemaError(f"relation {r.name!r} references undeclared type {t!r}")

    @classmethod
    def from_dict(cls, data: Mapping) -> Schema:
        try:
            types = list(data["types"])
            rels = [Relation(r["name"], r["source"], r["target"]) for r in data["relations"]]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema object: {exc}") from exc
        return cls(tuple(types), tuple(rels))

    @classmethod
    def from_json(cls, text: str) -> Schema:
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "types": list(self.object_types),
            "relations": [
                {"name": r.name, "source": r.source, "target": r.target} for r in self.relations
            ],
        }

    def relation(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise SchemaError(f"unknown relation {name!r}")

    def relations_between(self, source: str, target: str) -> list[Relation]:
        """Oriented relations leading from ``source`` to ``target``.

        Forward relations come first, then inverses of relations declared the
        other way round.
        """
        fwd = [r for r in self.relations if r.source == source and r.target == target]
        inv = [
            r.inverse()
            for r in self.relations
            if r.source == target and r.target == source and not (source == target)
        ]
        return fwd + inv


def _freeze_attrs(attrs) -> Mapping[str, frozenset]:
    out = {}
    for key, value in dict(attrs or {}).items():
        if isinstance(value, str):
            out[key] = frozenset([value])
        else:
            out[key] = frozenset(value)
    return MappingProxyType(out)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TypedGraph:
    """Immutable multi-typed graph.

    Nodes of each type are indexed densely ``0..n_t-1`` in insertion order.
    Edges of each relation are stored as sorted unique ``(src, tgt)`` pairs
    plus a multiplicity count.
    """

    schema: Schema
    node_ids: Mapping[str, tuple[str, ...]]
    node_attrs: Mapping[str, tuple[Mapping[str, frozenset], ...]]
    edges: Mapping[str, tuple[np.ndarray, np.ndarray, np.ndarray]]
    _index: Mapping[str, Mapping[str, int]] = field(repr=False)
    _adjacency: Mapping[str, sp.csr_matrix] = field(repr=False)

    def n_nodes(self, object_type: str) -> int:
        self._check_type(object_type)
        return len(self.node_ids[object_type])

    def node_counts(self) -> dict[str, int]:
        return {t: len(self.node_ids[t]) for t in self.schema.object_types}

    def edge_counts(self) -> dict[str, int]:
        """Total edge multiplicity per relation."""
        return {name: int(e[2].sum()) for name, e in self.edges.items()}

    def index_of(self, object_type: str, node_id: str) -> int:
        self._check_type(object_type)
        try:
            return self._index[object_type][node_id]
        except KeyError:
            raise SchemaError(f"unknown {object_type} node {node_id!r}") from None

    def adjacency(self, relation: Relation | str) -> sp.csr_matrix:
        """Counted adjacency ``W`` of a relation, transposed for inverses."""
        if isinstance(relation, str):
            relation = self.schema.relation(relation)
        w = self._adjacency[relation.name]
        return w.T.tocsr() if relation.inverted else w

    def _check_type(self, object_type):
        if object_type not in self.node_ids:
            raise SchemaError(f"unknown object type {object_type!r}")

    def __eq__(self, other):
        if not isinstance(other, TypedGraph):
            return NotImplemented
        if self.schema != other.schema or dict(self.node_ids) != dict(other.node_ids):
            return False
        for t in self.schema.object_types:
            if [dict(a) for a in self.node_attrs[t]] != [dict(a) for a in other.node_attrs[t]]:
                return False
        for name, (s, t, c) in self.edges.items():
            s2, t2, c2 = other.edges[name]
            if not (np.array_equal(s, s2) and np.array_equal(t, t2) and np.array_equal(c, c2)):
                return False
        return True

    __hash__ = None


def build_graph(
    schema: Schema,
    node_records: Iterable = (),
    edge_records: Iterable = (),
) -> TypedGraph:
    """Index node and edge records into a :class:`TypedGraph`.

    ``node_records`` yields ``(type, id)`` or ``(type, id, attrs)`` where
    ``attrs`` maps attribute names to a string or an iterable of strings.
    ``edge_records`` yields ``(relation_name, source_id, target_id)``.
    Repeated edge records add up to the edge's multiplicity.

    A :class:`SchemaError` raised here carries ``record = (kind, position)``
    with ``position`` counted from 1 within its record stream.
    """
    ids: dict[str, list[str]] = {t: [] for t in schema.object_types}
    attrs: dict[str, list] = {t: [] for t in schema.object_types}
    index: dict[str, dict[str, int]] = {t: {} for t in schema.object_types}

    for pos, rec in enumerate(node_records, 1):
        try:
            otype, nid = rec[0], rec[1]
            nattrs = rec[2] if len(rec) > 2 else None
            if otype not in index:
                raise SchemaError(f"unknown object type {otype!r}")
            if nid in index[otype]:
                raise SchemaError(f"duplicate {otype} node id {nid!r}")
        except SchemaError as exc:
            exc.record = ("node", pos)
            raise
        index[otype][nid] = len(ids[otype])
        ids[otype].append(nid)
        attrs[otype].append(_freeze_attrs(nattrs))

    pairs: dict[str, tuple[list[int], list[int]]] = {r.name: ([], []) for r in schema.relations}
    rel_by_name = {r.name: r for r in schema.relations}
    for pos, rec in enumerate(edge_records, 1):
        try:
            rname, src, tgt = rec
            rel = rel_by_name.get(rname)
            if rel is None:
                raise SchemaError(f"unknown relation {rname!r}")
            try:
                i = index[rel.source][src]
            except KeyError:
                raise SchemaError(f"dangling {rel.source} endpoint {src!r} on {rname}") from None
            try:
                j = index[rel.target][tgt]
            except KeyError:
                raise SchemaError(f"dangling {rel.target} endpoint {tgt!r} on {rname}") from None
        except SchemaError as exc:
            exc.record = ("edge", pos)
            raise
        pairs[rname][0].append(i)
        pairs[rname][1].append(j)

    edges = {}
    adjacency = {}
    for rel in schema.relations:
        shape = (len(ids[rel.source]), len(ids[rel.target]))
        src = np.asarray(pairs[rel.name][0], dtype=np.int64)
        tgt = np.asarray(pairs[rel.name][1], dtype=np.int64)
        w = sp.coo_matrix((np.ones(len(src)), (src, tgt)), shape=shape).tocsr()
        w.sum_duplicates()
        w.sort_indices()
        coo = w.tocoo()
        edges[rel.name] = (
            _readonly(coo.row.astype(np.int64)),
            _readonly(coo.col.astype(np.int64)),
            _readonly(coo.data.astype(np.int64)),
        )
        adjacency[rel.name] = w

    return TypedGraph(
        schema=schema,
        node_ids=MappingProxyType({t: tuple(v) for t, v in ids.items()}),
        node_attrs=MappingProxyType({t: tuple(v) for t, v in attrs.items()}),
        edges=MappingProxyType(edges),
        _index=MappingProxyType({t: MappingProxyType(v) for t, v in index.items()}),
        _adjacency=MappingProxyType(adjacency),
    )
