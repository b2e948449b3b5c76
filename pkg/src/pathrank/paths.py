"""Constrained meta paths and their text form.

A path expression lists object types joined by ``-`` and optionally a
constraint section after ``|``::

    A-P-A | P.L=DM
    A-P-C-P-A | P.L="data mining" && C=CIKM
    A-P-C-P-A | P[2].L=DM

``T.attr=value`` keeps objects of type ``T`` whose attribute holds ``value``;
``T=value`` keeps the single object of type ``T`` with that id. Without an
``[k]`` occurrence index a constraint applies to every occurrence of ``T``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import PathError, PathSyntaxError
from .graph import Relation, Schema

_NAME = re.compile(r"\w+")
_INT = re.compile(r"[0-9]+")
_BARE_VALUE = re.compile(r"[^\s&|\"]+")


@dataclass(frozen=True, order=True)
class Constraint:
    """Predicate on the objects of one type along a path.

    ``attr`` None means identity equality: the object's external id must be
    ``value``. ``position`` is a 1-based occurrence index of ``subject``
    within the path, or None for all occurrences.
    """

    subject: str
    position: int | None = None
    attr: str | None = None
    value: str = ""

    def _key(self):
        return (self.subject, self.position or 0, self.attr or "", self.value)

    def __str__(self):
        s = self.subject
        if self.position is not None:
            s += f"[{self.position}]"
        if self.attr is not None:
            s += f".{self.attr}"
        return f"{s}={_quote(self.value)}"


def _quote(value: str) -> str:
    if value and _BARE_VALUE.fullmatch(value):
        return value
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class ConstrainedMetaPath:
    node_types: tuple[str, ...]
    relations: tuple[Relation, ...]
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "node_types", tuple(self.node_types))
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(
            self, "constraints", tuple(sorted(set(self.constraints), key=Constraint._key))
        )
        if len(self.node_types) < 2 or len(self.relations) != len(self.node_types) - 1:
            raise PathError("a path needs at least one relation and one more type than relations")
        for i, r in enumerate(self.relations):
            if r.source != self.node_types[i] or r.target != self.node_types[i + 1]:
                raise PathError(
                    f"relation {r.label} ({r.source}->{r.target}) does not join "
                    f"{self.node_types[i]} and {self.node_types[i + 1]}"
                )
        for c in self.constraints:
            n = self.node_types.count(c.subject)
            if n == 0:
                raise PathError(f"constraint subject {c.subject!r} is not on the path")
            if c.position is not None and not 1 <= c.position <= n:
                raise PathError(
                    f"{c.subject} occurs {n} time(s) on the path; occurrence {c.position} is invalid"
                )

    @property
    def length(self) -> int:
        return len(self.relations)

    @property
    def source_type(self) -> str:
        return self.node_types[0]

    @property
    def target_type(self) -> str:
        return self.node_types[-1]

    def bound_positions(self, c: Constraint) -> list[int]:
        """0-based node positions a constraint applies to."""
        occ = [i for i, t in enumerate(self.node_types) if t == c.subject]
        return occ if c.position is None else [occ[c.position - 1]]

    def constraints_at(self, position: int) -> list[Constraint]:
        return [c for c in self.constraints if position in self.bound_positions(c)]

    @property
    def is_symmetric(self) -> bool:
        return self == reverse_path(self)

    def __str__(self):
        s = "-".join(self.node_types)
        if self.constraints:
            s += " | " + " && ".join(str(c) for c in self.constraints)
        return s


def reverse_path(p: ConstrainedMetaPath) -> ConstrainedMetaPath:
    """Path walked backwards; indexed constraints move to the mirrored occurrence."""
    mirrored = []
    for c in p.constraints:
        if c.position is None:
            mirrored.append(c)
        else:
            n = p.node_types.count(c.subject)
            mirrored.append(Constraint(c.subject, n + 1 - c.position, c.attr, c.value))
    return ConstrainedMetaPath(
        p.node_types[::-1],
        tuple(r.inverse() for r in reversed(p.relations)),
        tuple(mirrored),
    )


def repeat_path(p: ConstrainedMetaPath, times: int) -> ConstrainedMetaPath:
    """Concatenate ``times`` copies of a path whose endpoints share a type.

    ``repeat_path(A-P-A, 3)`` is ``A-P-A-P-A-P-A``.
    """
    if times < 1:
        raise ValueError("times must be >= 1")
    if times == 1:
        return p
    if p.source_type != p.target_type:
        raise PathError(f"cannot repeat {p}: endpoint types differ")
    types = list(p.node_types)
    for _ in range(times - 1):
        types.extend(p.node_types[1:])
    constraints = []
    for c in p.constraints:
        if c.position is None:
            constraints.append(c)
            continue
        pos = p.bound_positions(c)[0]
        occ = [i for i, t in enumerate(types) if t == c.subject]
        for r in range(times):
            constraints.append(
                Constraint(c.subject, occ.index(pos + r * p.length) + 1, c.attr, c.value)
            )
    return ConstrainedMetaPath(tuple(types), p.relations * times, tuple(constraints))


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        pos = self.pos if pos is None else pos
        offset = len(self.text[:pos].encode("utf-8"))
        return PathSyntaxError(f"{message} in path {self.text!r}", offset=offset)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at(self, token):
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def expect(self, token):
        if not self.at(token):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def match(self, pattern, what):
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group(), m.start()

    def value(self):
        self.skip_ws()
        if self.at('"'):
            start = self.pos
            self.pos += 1
            out = []
            while self.pos < len(self.text):
                ch = self.text[self.pos]
                if ch == "\\" and self.pos + 1 < len(self.text):
                    out.append(self.text[self.pos + 1])
                    self.pos += 2
                elif ch == '"':
                    self.pos += 1
                    return "".join(out)
                else:
                    out.append(ch)
                    self.pos += 1
            raise self.error("unterminated quoted value", start)
        return self.match(_BARE_VALUE, "a value")[0]

    def done(self):
        self.skip_ws()
        return self.pos >= len(self.text)


def parse_path(expr: str, schema: Schema) -> ConstrainedMetaPath:
    """Parse and validate a path expression against ``schema``.

    Each adjacent type pair must be joined by exactly one relation in the
    schema, taken forward if declared that way, otherwise as an inverse.
    """
    sc = _Scanner(expr)
    types = []
    starts = []
    name, at = sc.match(_NAME, "an object type")
    types.append(name)
    starts.append(at)
    while sc.at("-"):
        sc.expect("-")
        name, at = sc.match(_NAME, "an object type")
        types.append(name)
        starts.append(at)
    if len(types) < 2:
        raise sc.error("expected '-'")

    raw_constraints = []
    if sc.at("|"):
        sc.expect("|")
        while True:
            subject, at = sc.match(_NAME, "a constraint subject")
            position = attr = None
            if sc.at("["):
                sc.expect("[")
                position = int(sc.match(_INT, "an occurrence index")[0])
                sc.expect("]")
            if sc.at("."):
                sc.expect(".")
                attr = sc.match(_NAME, "an attribute name")[0]
            sc.expect("=")
            raw_constraints.append((Constraint(subject, position, attr, sc.value()), at))
            if not sc.at("&&"):
                break
            sc.expect("&&")
    if not sc.done():
        raise sc.error("unexpected trailing input")

    for t, at in zip(types, starts):
        if t not in schema.object_types:
            raise PathError(f"unknown object type {t!r} at offset {at} in {expr!r}")
    relations = []
    for a, b in zip(types, types[1:]):
        candidates = schema.relations_between(a, b)
        forward = [r for r in candidates if not r.inverted]
        pick = forward or candidates
        if not pick:
            raise PathError(f"no relation joins {a} and {b} in the schema")
        if len(pick) > 1:
            names = ", ".join(r.label for r in pick)
            raise PathError(f"ambiguous step {a}-{b}: candidates {names}")
        relations.append(pick[0])

    for c, at in raw_constraints:
        if c.subject not in types:
            raise PathError(f"constraint subject {c.subject!r} (offset {at}) is not on the path")
    return ConstrainedMetaPath(tuple(types), tuple(relations), tuple(c for c, _ in raw_constraints))
