"""Shape documents: constraint trees, target declarations, property paths.

A document is an ordered set of named shapes.  A shape is a node shape
(path is None) or a property shape (path set); constraints are conjunctions
of the atoms below.  Constraints that scope over the values of the path
(MinCount, AllValues, ...) are only legal inside property shapes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .rdf import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    SH_NS,
    Graph,
    Iri,
    Literal,
    Term,
    XSD_BOOLEAN,
    term_key,
)

FRESH_NS = "urn:sclkit:fresh:"


def sh(local: str) -> Iri:
    return Iri(SH_NS + local)


class NameMint:
    """Deterministic fresh-IRI supply that never collides with seen names."""

    def __init__(self, taken: set[Iri] = frozenset(), namespace: str = FRESH_NS):
        self.namespace = namespace
        self._next = 0
        for name in taken:
            if name.value.startswith(namespace):
                tail = name.value[len(namespace):]
                if tail.isdigit():
                    self._next = max(self._next, int(tail) + 1)

    def fresh(self) -> Iri:
        name = Iri(f"{self.namespace}{self._next}")
        self._next += 1
        return name


# --- target declarations ----------------------------------------------------

@dataclass(frozen=True)
class NodeTarget:
    node: Term


@dataclass(frozen=True)
class ClassTarget:
    cls: Term


@dataclass(frozen=True)
class SubjectsOfTarget:
    rel: Iri


@dataclass(frozen=True)
class ObjectsOfTarget:
    rel: Iri


TargetDecl = NodeTarget | ClassTarget | SubjectsOfTarget | ObjectsOfTarget


# --- property paths ---------------------------------------------------------

@dataclass(frozen=True)
class PredPath:
    iri: Iri


@dataclass(frozen=True)
class InversePath:
    iri: Iri


@dataclass(frozen=True)
class SeqPath:
    parts: tuple


@dataclass(frozen=True)
class AltPath:
    parts: tuple


@dataclass(frozen=True)
class ZeroOrMorePath:
    inner: "PathExpr"


@dataclass(frozen=True)
class OneOrMorePath:
    inner: "PathExpr"


@dataclass(frozen=True)
class ZeroOrOnePath:
    inner: "PathExpr"


PathExpr = PredPath | InversePath | SeqPath | AltPath | ZeroOrMorePath | OneOrMorePath | ZeroOrOnePath


def path_relation_names(p: PathExpr) -> set[Iri]:
    if isinstance(p, (PredPath, InversePath)):
        return {p.iri}
    if isinstance(p, (SeqPath, AltPath)):
        out: set[Iri] = set()
        for q in p.parts:
            out |= path_relation_names(q)
        return out
    return path_relation_names(p.inner)


# --- constraints -------------------------------------------------------------

@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class HasValue:
    value: Term


@dataclass(frozen=True)
class InSet:
    values: tuple


@dataclass(frozen=True)
class ClassConstraint:
    cls: Term


@dataclass(frozen=True)
class DatatypeConstraint:
    datatype: Iri


@dataclass(frozen=True)
class NodeKindConstraint:
    # one of IRI, Literal, BlankNode, BlankNodeOrIRI, BlankNodeOrLiteral, IRIOrLiteral
    kind: str


@dataclass(frozen=True)
class MinExclusive:
    limit: Literal


@dataclass(frozen=True)
class MinInclusive:
    limit: Literal


@dataclass(frozen=True)
class MaxExclusive:
    limit: Literal


@dataclass(frozen=True)
class MaxInclusive:
    limit: Literal


@dataclass(frozen=True)
class MinLengthConstraint:
    length: int


@dataclass(frozen=True)
class MaxLengthConstraint:
    length: int


@dataclass(frozen=True)
class PatternConstraint:
    regex: str


@dataclass(frozen=True)
class LanguageIn:
    tags: tuple


@dataclass(frozen=True)
class Not:
    inner: "Constraint"


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Xone:
    # exclusive-or over shape references; eliminated before translation
    names: tuple


@dataclass(frozen=True)
class Ref:
    name: Iri


@dataclass(frozen=True)
class MinCount:
    n: int


@dataclass(frozen=True)
class MaxCount:
    n: int


@dataclass(frozen=True)
class UniqueLang:
    pass


@dataclass(frozen=True)
class EqualsRel:
    rel: Iri


@dataclass(frozen=True)
class DisjointRel:
    rel: Iri


@dataclass(frozen=True)
class LessThanRel:
    rel: Iri


@dataclass(frozen=True)
class LessThanOrEqualsRel:
    rel: Iri


@dataclass(frozen=True)
class QualifiedValue:
    ref: Iri
    min_count: Optional[int] = None
    max_count: Optional[int] = None
    siblings: tuple = ()


@dataclass(frozen=True)
class Closed:
    ignored: tuple = ()


@dataclass(frozen=True)
class AllValues:
    """Every value reachable over the shape's path satisfies `inner`."""

    inner: "Constraint"


@dataclass(frozen=True)
class SomeValues:
    """Some value reachable over the shape's path satisfies `inner`."""

    inner: "Constraint"


Constraint = (
    Top | HasValue | InSet | ClassConstraint | DatatypeConstraint | NodeKindConstraint
    | MinExclusive | MinInclusive | MaxExclusive | MaxInclusive
    | MinLengthConstraint | MaxLengthConstraint | PatternConstraint | LanguageIn
    | Not | And | Or | Xone | Ref
    | MinCount | MaxCount | UniqueLang
    | EqualsRel | DisjointRel | LessThanRel | LessThanOrEqualsRel
    | QualifiedValue | Closed | AllValues | SomeValues
)

_PROPERTY_ONLY = (MinCount, MaxCount, UniqueLang, EqualsRel, DisjointRel, LessThanRel,
                  LessThanOrEqualsRel, QualifiedValue, AllValues, SomeValues)


def walk(c: Constraint) -> Iterator[Constraint]:
    yield c
    if isinstance(c, (Not, AllValues, SomeValues)):
        yield from walk(c.inner)
    elif isinstance(c, (And, Or)):
        for item in c.items:
            yield from walk(item)


def referenced_names(c: Constraint) -> set[Iri]:
    """Shape names occurring in a constraint (direct references)."""
    names: set[Iri] = set()
    for node in walk(c):
        if isinstance(node, Ref):
            names.add(node.name)
        elif isinstance(node, QualifiedValue):
            names.add(node.ref)
            names.update(node.siblings)
        elif isinstance(node, Xone):
            names.update(node.names)
    return names


@dataclass(frozen=True)
class Shape:
    name: Iri
    targets: tuple = ()
    path: Optional[PathExpr] = None
    constraint: Constraint = Top()

    @property
    def is_property_shape(self) -> bool:
        return self.path is not None


class DocumentError(ValueError):
    pass


@dataclass(frozen=True)
class Document:
    shapes: tuple = ()

    def __post_init__(self) -> None:
        seen = set()
        for s in self.shapes:
            if s.name in seen:
                raise DocumentError(f"duplicate shape name {s.name!r}")
            seen.add(s.name)
        by_name = {s.name: s for s in self.shapes}
        object.__setattr__(self, "_by_name", by_name)
        for s in self.shapes:
            for ref in referenced_names(s.constraint):
                if ref not in by_name:
                    raise DocumentError(f"dangling shape reference {ref!r} in {s.name!r}")
            if s.path is None:
                for node in walk(s.constraint):
                    if isinstance(node, _PROPERTY_ONLY):
                        raise DocumentError(
                            f"node shape {s.name!r} carries property-scoped constraint "
                            f"{type(node).__name__}"
                        )

    def __iter__(self) -> Iterator[Shape]:
        return iter(self.shapes)

    def names(self) -> list[Iri]:
        return [s.name for s in self.shapes]

    def shape(self, name: Iri) -> Shape:
        try:
            return self._by_name[name]
        except KeyError:
            raise DocumentError(f"unknown shape {name!r}") from None

    def has_shape(self, name: Iri) -> bool:
        return name in self._by_name

    def with_shape(self, shape: Shape) -> "Document":
        return Document(self.shapes + (shape,))


def referenced_shapes_closure(m: Document, name: Iri) -> set[Iri]:
    """Least fixpoint of the directly-referenced-shapes expansion."""
    start = m.shape(name)
    seen: set[Iri] = set()
    frontier = list(referenced_names(start.constraint))
    while frontier:
        n = frontier.pop()
        if n in seen:
            continue
        seen.add(n)
        frontier.extend(referenced_names(m.shape(n).constraint))
    return seen


def is_recursive(m: Document) -> bool:
    return any(s.name in referenced_shapes_closure(m, s.name) for s in m.shapes)


def strip_targets(m: Document) -> Document:
    return Document(tuple(
        Shape(s.name, (), s.path, s.constraint) for s in m.shapes
    ))


def eliminate_xone(m: Document) -> Document:
    """Fold n-ary xone into fresh binary xones, then expand each binary xone
    to (a and not b) or (not a and b).  Validation behaviour is unchanged."""
    if not any(isinstance(node, Xone) for s in m.shapes for node in walk(s.constraint)):
        return m
    mint = NameMint(set(m.names()))
    extra: list[Shape] = []

    def expand(names: tuple) -> Constraint:
        if len(names) == 0:
            return Not(Top())
        if len(names) == 1:
            return Ref(names[0])
        if len(names) == 2:
            a, b = names
            return Or((And((Ref(a), Not(Ref(b)))), And((Not(Ref(a)), Ref(b)))))
        head = mint.fresh()
        extra.append(Shape(head, (), None, expand(names[:-1])))
        return expand((head, names[-1]))

    def rewrite(c: Constraint) -> Constraint:
        if isinstance(c, Xone):
            return expand(c.names)
        if isinstance(c, Not):
            return Not(rewrite(c.inner))
        if isinstance(c, And):
            return And(tuple(rewrite(i) for i in c.items))
        if isinstance(c, Or):
            return Or(tuple(rewrite(i) for i in c.items))
        if isinstance(c, AllValues):
            return AllValues(rewrite(c.inner))
        if isinstance(c, SomeValues):
            return SomeValues(rewrite(c.inner))
        return c

    shapes = [Shape(s.name, s.targets, s.path, rewrite(s.constraint)) for s in m.shapes]
    return Document(tuple(shapes + extra))


# --- reading a document from its triple encoding -----------------------------

_NODE_ONLY_PREDICATES = {
    "hasValue", "in", "class", "datatype", "nodeKind", "minExclusive", "minInclusive",
    "maxExclusive", "maxInclusive", "minLength", "maxLength", "pattern", "languageIn",
    "not", "and", "or", "xone", "node", "property",
}

_PROPERTY_ONLY_PREDICATES = {
    "minCount", "maxCount", "uniqueLang", "equals", "disjoint", "lessThan",
    "lessThanOrEquals", "qualifiedValueShape", "qualifiedMinCount", "qualifiedMaxCount",
    "qualifiedValueShapesDisjoint",
}


def _read_list(g: Graph, head: Term) -> list[Term]:
    items: list[Term] = []
    seen = set()
    while head != RDF_NIL:
        if head in seen:
            raise DocumentError("cyclic RDF list")
        seen.add(head)
        first = g.one_object(head, RDF_FIRST)
        if first is None:
            raise DocumentError(f"malformed RDF list at {head!r}")
        items.append(first)
        head = g.one_object(head, RDF_REST) or RDF_NIL
    return items


def _int_value(t: Term, what: str) -> int:
    if isinstance(t, Literal):
        try:
            return int(t.lexical)
        except ValueError:
            pass
    raise DocumentError(f"{what} expects an integer, got {t!r}")


class _DocumentReader:
    def __init__(self, g: Graph):
        self.g = g
        self.shape_nodes = self._discover()
        taken = {n for n in self.shape_nodes if isinstance(n, Iri)}
        self.mint = NameMint(taken)
        # blank shape nodes get fresh IRIs (standardisation rule 1)
        self.names: dict[Term, Iri] = {}
        for n in sorted(self.shape_nodes, key=self._discovery_key):
            self.names[n] = n if isinstance(n, Iri) else self.mint.fresh()

    def _discovery_key(self, n: Term):
        return term_key(n)

    def _discover(self) -> set[Term]:
        g = self.g
        nodes: set[Term] = set()
        nodes |= g.subjects(RDF_TYPE, sh("NodeShape"))
        nodes |= g.subjects(RDF_TYPE, sh("PropertyShape"))
        for local in ("targetNode", "targetClass", "targetSubjectsOf", "targetObjectsOf", "path"):
            nodes |= g.subjects_of(sh(local))
        for local in _NODE_ONLY_PREDICATES | _PROPERTY_ONLY_PREDICATES | {"closed", "ignoredProperties"}:
            nodes |= g.subjects_of(sh(local))
        # referenced shapes
        frontier = list(nodes)
        while frontier:
            n = frontier.pop()
            for local in ("node", "property", "not", "qualifiedValueShape"):
                for o in g.objects(n, sh(local)):
                    if o not in nodes:
                        nodes.add(o)
                        frontier.append(o)
            for local in ("and", "or", "xone"):
                for head in g.objects(n, sh(local)):
                    for o in _read_list(g, head):
                        if o not in nodes:
                            nodes.add(o)
                            frontier.append(o)
        # list/path helper blanks are not shapes
        return {n for n in nodes if not self._is_structural(n)}

    def _is_structural(self, n: Term) -> bool:
        if self.g.objects(n, RDF_FIRST):
            return True
        for local in ("inversePath", "alternativePath", "zeroOrMorePath", "oneOrMorePath", "zeroOrOnePath"):
            if self.g.objects(n, sh(local)):
                return True
        return False

    def ref_name(self, node: Term) -> Iri:
        if node not in self.names:
            raise DocumentError(f"dangling shape reference {node!r}")
        return self.names[node]

    def read(self) -> Document:
        shapes = [self.read_shape(n) for n in sorted(self.shape_nodes, key=self._discovery_key)]
        return Document(tuple(shapes))

    def read_shape(self, node: Term) -> Shape:
        g = self.g
        targets: list[TargetDecl] = []
        for o in sorted(g.objects(node, sh("targetNode")), key=self._discovery_key):
            targets.append(NodeTarget(o))
        for o in sorted(g.objects(node, sh("targetClass")), key=self._discovery_key):
            targets.append(ClassTarget(o))
        for o in sorted(g.objects(node, sh("targetSubjectsOf")), key=self._discovery_key):
            if not isinstance(o, Iri):
                raise DocumentError("sh:targetSubjectsOf expects an IRI")
            targets.append(SubjectsOfTarget(o))
        for o in sorted(g.objects(node, sh("targetObjectsOf")), key=self._discovery_key):
            if not isinstance(o, Iri):
                raise DocumentError("sh:targetObjectsOf expects an IRI")
            targets.append(ObjectsOfTarget(o))

        paths = g.objects(node, sh("path"))
        if len(paths) > 1:
            raise DocumentError(f"shape {node!r} has two sh:path values")
        path = self.read_path(next(iter(paths))) if paths else None

        atoms: list[Constraint] = []
        for local, obj in sorted(
            ((p.value[len(SH_NS):], o)
             for p in g._fwd
             if isinstance(p, Iri) and p.value.startswith(SH_NS)
             for o in g.objects(node, p)),
            key=lambda po: (po[0], self._discovery_key(po[1])),
        ):
            atom = self.read_atom(node, local, obj, path is not None)
            if atom is not None:
                atoms.append(atom)
        constraint: Constraint
        if not atoms:
            constraint = Top()
        elif len(atoms) == 1:
            constraint = atoms[0]
        else:
            constraint = And(tuple(atoms))
        return Shape(self.names[node], tuple(targets), path, constraint)

    def read_atom(self, node: Term, local: str, obj: Term, in_property: bool) -> Optional[Constraint]:
        g = self.g
        if local in ("path", "targetNode", "targetClass", "targetSubjectsOf", "targetObjectsOf",
                     "qualifiedMinCount", "qualifiedMaxCount", "qualifiedValueShapesDisjoint",
                     "ignoredProperties"):
            return None
        if local in _PROPERTY_ONLY_PREDICATES and not in_property:
            raise DocumentError(f"node shape {node!r} carries property-only sh:{local}")
        atom = self._atom_of(node, local, obj)
        if atom is None:
            return None
        if in_property and local in _NODE_ONLY_PREDICATES:
            # standardisation rule 3: node-scoped constraints on a property
            # shape range over the path values
            if local == "hasValue":
                return SomeValues(atom)
            return AllValues(atom)
        return atom

    def _atom_of(self, node: Term, local: str, obj: Term) -> Optional[Constraint]:
        g = self.g
        if local == "hasValue":
            return HasValue(obj)
        if local == "in":
            return InSet(tuple(_read_list(g, obj)))
        if local == "class":
            return ClassConstraint(obj)
        if local == "datatype":
            if not isinstance(obj, Iri):
                raise DocumentError("sh:datatype expects an IRI")
            return DatatypeConstraint(obj)
        if local == "nodeKind":
            if not isinstance(obj, Iri) or not obj.value.startswith(SH_NS):
                raise DocumentError(f"unknown sh:nodeKind {obj!r}")
            return NodeKindConstraint(obj.value[len(SH_NS):])
        if local == "minExclusive":
            return MinExclusive(self._limit(obj))
        if local == "minInclusive":
            return MinInclusive(self._limit(obj))
        if local == "maxExclusive":
            return MaxExclusive(self._limit(obj))
        if local == "maxInclusive":
            return MaxInclusive(self._limit(obj))
        if local == "minLength":
            return MinLengthConstraint(_int_value(obj, "sh:minLength"))
        if local == "maxLength":
            return MaxLengthConstraint(_int_value(obj, "sh:maxLength"))
        if local == "pattern":
            if not isinstance(obj, Literal):
                raise DocumentError("sh:pattern expects a string literal")
            try:
                re.compile(obj.lexical)
            except re.error as exc:
                raise DocumentError(f"malformed sh:pattern {obj.lexical!r}: {exc}") from None
            return PatternConstraint(obj.lexical)
        if local == "languageIn":
            tags = _read_list(g, obj)
            if not all(isinstance(t, Literal) for t in tags):
                raise DocumentError("sh:languageIn expects string literals")
            return LanguageIn(tuple(t.lexical.lower() for t in tags))
        if local == "not":
            return Not(Ref(self.ref_name(obj)))
        if local == "and":
            return And(tuple(Ref(self.ref_name(n)) for n in _read_list(g, obj)))
        if local == "or":
            return Or(tuple(Ref(self.ref_name(n)) for n in _read_list(g, obj)))
        if local == "xone":
            return Xone(tuple(self.ref_name(n) for n in _read_list(g, obj)))
        if local in ("node", "property"):
            return Ref(self.ref_name(obj))
        if local == "minCount":
            return MinCount(_int_value(obj, "sh:minCount"))
        if local == "maxCount":
            return MaxCount(_int_value(obj, "sh:maxCount"))
        if local == "uniqueLang":
            if obj != Literal("true", XSD_BOOLEAN):
                return None
            return UniqueLang()
        if local == "equals":
            return EqualsRel(self._rel(obj, "sh:equals"))
        if local == "disjoint":
            return DisjointRel(self._rel(obj, "sh:disjoint"))
        if local == "lessThan":
            return LessThanRel(self._rel(obj, "sh:lessThan"))
        if local == "lessThanOrEquals":
            return LessThanOrEqualsRel(self._rel(obj, "sh:lessThanOrEquals"))
        if local == "qualifiedValueShape":
            mn = g.one_object(node, sh("qualifiedMinCount"))
            mx = g.one_object(node, sh("qualifiedMaxCount"))
            disjoint = g.one_object(node, sh("qualifiedValueShapesDisjoint")) == Literal("true", XSD_BOOLEAN)
            return QualifiedValue(
                ref=self.ref_name(obj),
                min_count=_int_value(mn, "sh:qualifiedMinCount") if mn is not None else None,
                max_count=_int_value(mx, "sh:qualifiedMaxCount") if mx is not None else None,
                siblings=self._siblings(node) if disjoint else (),
            )
        if local == "closed":
            if obj != Literal("true", XSD_BOOLEAN):
                return None
            ignored = g.one_object(node, sh("ignoredProperties"))
            props = _read_list(g, ignored) if ignored is not None else []
            if not all(isinstance(p, Iri) for p in props):
                raise DocumentError("sh:ignoredProperties expects IRIs")
            return Closed(tuple(sorted(props, key=lambda i: i.value)))
        raise DocumentError(f"unsupported vocabulary term sh:{local} on triple ({node!r}, sh:{local}, {obj!r})")

    def _limit(self, obj: Term) -> Literal:
        if not isinstance(obj, Literal):
            raise DocumentError(f"order-comparison constraint expects a literal, got {obj!r}")
        return obj

    def _rel(self, obj: Term, what: str) -> Iri:
        if not isinstance(obj, Iri):
            raise DocumentError(f"{what} expects an IRI")
        return obj

    def _siblings(self, node: Term) -> tuple:
        """Qualified value shapes of sibling property shapes under shared parents."""
        g = self.g
        parents = g.subjects(sh("property"), node)
        sibs: set[Iri] = set()
        for parent in parents:
            for other in g.objects(parent, sh("property")):
                if other == node:
                    continue
                for q in g.objects(other, sh("qualifiedValueShape")):
                    sibs.add(self.ref_name(q))
        return tuple(sorted(sibs, key=lambda i: i.value))

    def read_path(self, node: Term) -> PathExpr:
        g = self.g
        if isinstance(node, Iri):
            return PredPath(node)
        inv = g.one_object(node, sh("inversePath"))
        if inv is not None:
            if not isinstance(inv, Iri):
                raise DocumentError("sh:inversePath applies only to a plain IRI")
            return InversePath(inv)
        alt = g.one_object(node, sh("alternativePath"))
        if alt is not None:
            return AltPath(tuple(self.read_path(p) for p in _read_list(g, alt)))
        for local, cls in (("zeroOrMorePath", ZeroOrMorePath),
                           ("oneOrMorePath", OneOrMorePath),
                           ("zeroOrOnePath", ZeroOrOnePath)):
            inner = g.one_object(node, sh(local))
            if inner is not None:
                return cls(self.read_path(inner))
        if g.objects(node, RDF_FIRST):
            return SeqPath(tuple(self.read_path(p) for p in _read_list(g, node)))
        raise DocumentError(f"unsupported sh:path value {node!r}")


def document_from_graph(g: Graph) -> Document:
    """Build the shape-document object model from its triple encoding."""
    return _DocumentReader(g).read()


def document_constants(m: Document) -> set[Term]:
    """All constants a document mentions (targets, values, classes)."""
    out: set[Term] = set()
    for s in m.shapes:
        for t in s.targets:
            if isinstance(t, NodeTarget):
                out.add(t.node)
            elif isinstance(t, ClassTarget):
                out.add(t.cls)
        for node in walk(s.constraint):
            if isinstance(node, HasValue):
                out.add(node.value)
            elif isinstance(node, InSet):
                out.update(node.values)
            elif isinstance(node, ClassConstraint):
                out.add(node.cls)
    return out


def document_relation_names(m: Document) -> set[Iri]:
    """Data-graph relation names the document constrains (isA included when
    class targets or class constraints occur)."""
    out: set[Iri] = set()
    for s in m.shapes:
        if s.path is not None:
            out |= path_relation_names(s.path)
        for t in s.targets:
            if isinstance(t, (SubjectsOfTarget, ObjectsOfTarget)):
                out.add(t.rel)
            elif isinstance(t, ClassTarget):
                out.add(RDF_TYPE)
        for node in walk(s.constraint):
            if isinstance(node, (EqualsRel, DisjointRel, LessThanRel, LessThanOrEqualsRel)):
                out.add(node.rel)
            elif isinstance(node, ClassConstraint):
                out.add(RDF_TYPE)
            elif isinstance(node, Closed):
                out.update(node.ignored)
    return out


def document_language_tags(m: Document) -> set[str]:
    tags: set[str] = set()
    for s in m.shapes:
        for node in walk(s.constraint):
            if isinstance(node, LanguageIn):
                tags.update(node.tags)
    return tags


def document_to_graph(m: Document) -> Graph:
    """Triple encoding of a document (inverse of document_from_graph)."""
    from .rdf import Blank, Literal as Lit, Triple, XSD_BOOLEAN as BOOL, XSD_INTEGER as INT

    triples: list = []
    counter = [0]

    def blank() -> Blank:
        counter[0] += 1
        return Blank(f"s{counter[0]}")

    def emit_list(items) -> Term:
        head: Term = RDF_NIL
        for item in reversed(list(items)):
            node = blank()
            triples.append(Triple(node, RDF_FIRST, item))
            triples.append(Triple(node, RDF_REST, head))
            head = node
        return head

    def emit_path(p: PathExpr) -> Term:
        if isinstance(p, PredPath):
            return p.iri
        if isinstance(p, SeqPath):
            return emit_list([emit_path(q) for q in p.parts])
        node = blank()
        if isinstance(p, InversePath):
            triples.append(Triple(node, sh("inversePath"), p.iri))
        elif isinstance(p, AltPath):
            triples.append(Triple(node, sh("alternativePath"),
                                  emit_list([emit_path(q) for q in p.parts])))
        elif isinstance(p, ZeroOrMorePath):
            triples.append(Triple(node, sh("zeroOrMorePath"), emit_path(p.inner)))
        elif isinstance(p, OneOrMorePath):
            triples.append(Triple(node, sh("oneOrMorePath"), emit_path(p.inner)))
        else:
            triples.append(Triple(node, sh("zeroOrOnePath"), emit_path(p.inner)))
        return node

    def intlit(n: int) -> Lit:
        return Lit(str(n), INT)

    true = Lit("true", BOOL)
    mint = NameMint(set(m.names()))
    pending: list[Shape] = []

    def ref_of(c: Constraint) -> Iri:
        """Name of a shape holding the constraint, minting one if needed."""
        if isinstance(c, Ref):
            return c.name
        if any(isinstance(n, _PROPERTY_ONLY) for n in walk(c)):
            # a reference from sh:not / sh:or ranges over the focus node, so a
            # property-scoped operand has no faithful triple encoding
            raise DocumentError(
                f"no triple encoding for {type(c).__name__} over property-scoped constraints"
            )
        name = mint.fresh()
        pending.append(Shape(name, (), None, c))
        return name

    def emit_constraint(subject: Term, c: Constraint, path: Optional[PathExpr] = None) -> None:
        if isinstance(c, Top):
            return
        simple = {
            HasValue: lambda: (sh("hasValue"), c.value),
            InSet: lambda: (sh("in"), emit_list(c.values)),
            ClassConstraint: lambda: (sh("class"), c.cls),
            DatatypeConstraint: lambda: (sh("datatype"), c.datatype),
            NodeKindConstraint: lambda: (sh("nodeKind"), sh(c.kind)),
            MinExclusive: lambda: (sh("minExclusive"), c.limit),
            MinInclusive: lambda: (sh("minInclusive"), c.limit),
            MaxExclusive: lambda: (sh("maxExclusive"), c.limit),
            MaxInclusive: lambda: (sh("maxInclusive"), c.limit),
            MinLengthConstraint: lambda: (sh("minLength"), intlit(c.length)),
            MaxLengthConstraint: lambda: (sh("maxLength"), intlit(c.length)),
            PatternConstraint: lambda: (sh("pattern"), Lit(c.regex)),
            LanguageIn: lambda: (sh("languageIn"), emit_list([Lit(t) for t in c.tags])),
            MinCount: lambda: (sh("minCount"), intlit(c.n)),
            MaxCount: lambda: (sh("maxCount"), intlit(c.n)),
            UniqueLang: lambda: (sh("uniqueLang"), true),
            EqualsRel: lambda: (sh("equals"), c.rel),
            DisjointRel: lambda: (sh("disjoint"), c.rel),
            LessThanRel: lambda: (sh("lessThan"), c.rel),
            LessThanOrEqualsRel: lambda: (sh("lessThanOrEquals"), c.rel),
            Ref: lambda: (sh("node"), c.name),
        }
        if type(c) in simple:
            p, o = simple[type(c)]()
            triples.append(Triple(subject, p, o))
            return
        if isinstance(c, And):
            for item in c.items:
                emit_constraint(subject, item, path)
            return
        if isinstance(c, Not):
            triples.append(Triple(subject, sh("not"), ref_of(c.inner)))
            return
        if isinstance(c, Or):
            triples.append(Triple(subject, sh("or"),
                                  emit_list([ref_of(i) for i in c.items])))
            return
        if isinstance(c, Xone):
            triples.append(Triple(subject, sh("xone"), emit_list(c.names)))
            return
        if isinstance(c, QualifiedValue):
            triples.append(Triple(subject, sh("qualifiedValueShape"), c.ref))
            if c.min_count is not None:
                triples.append(Triple(subject, sh("qualifiedMinCount"), intlit(c.min_count)))
            if c.max_count is not None:
                triples.append(Triple(subject, sh("qualifiedMaxCount"), intlit(c.max_count)))
            if c.siblings:
                triples.append(Triple(subject, sh("qualifiedValueShapesDisjoint"), true))
            return
        if isinstance(c, Closed):
            triples.append(Triple(subject, sh("closed"), true))
            if c.ignored:
                triples.append(Triple(subject, sh("ignoredProperties"), emit_list(c.ignored)))
            return
        if isinstance(c, AllValues):
            emit_constraint(subject, c.inner, None)
            return
        if isinstance(c, SomeValues):
            if isinstance(c.inner, HasValue):
                triples.append(Triple(subject, sh("hasValue"), c.inner.value))
            else:
                triples.append(Triple(subject, sh("qualifiedValueShape"), ref_of(c.inner)))
                triples.append(Triple(subject, sh("qualifiedMinCount"), intlit(1)))
            return
        raise DocumentError(f"cannot serialize constraint {type(c).__name__}")

    def emit_shape(shape: Shape) -> None:
        kind = "PropertyShape" if shape.path is not None else "NodeShape"
        triples.append(Triple(shape.name, RDF_TYPE, sh(kind)))
        if shape.path is not None:
            triples.append(Triple(shape.name, sh("path"), emit_path(shape.path)))
        for t in shape.targets:
            if isinstance(t, NodeTarget):
                triples.append(Triple(shape.name, sh("targetNode"), t.node))
            elif isinstance(t, ClassTarget):
                triples.append(Triple(shape.name, sh("targetClass"), t.cls))
            elif isinstance(t, SubjectsOfTarget):
                triples.append(Triple(shape.name, sh("targetSubjectsOf"), t.rel))
            else:
                triples.append(Triple(shape.name, sh("targetObjectsOf"), t.rel))
        emit_constraint(shape.name, shape.constraint, shape.path)

    for shape in m.shapes:
        emit_shape(shape)
    while pending:
        emit_shape(pending.pop(0))
    return Graph(triples)
