"""Three-valued constraint evaluation, faithful assignments, the four
validation semantics, the stratified fast path for non-recursive documents,
and the partial-to-total document transformation.

Constraints are evaluated through their logic translation: one strong-Kleene
evaluator over unary formulae covers every constraint kind.  Shape atoms are
the only source of the undefined value; everything else is two-valued.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional

from .rdf import Graph, Iri, RDF_TYPE, Term, nodes_of, term_key
from . import shacl as sh
from .filters import comparison_value, eval_filter
from .scl import (
    Pi,
    PiAlt,
    PiSeq,
    PiZeroOrOne,
    Psi,
    PsiAnd,
    PsiCount,
    PsiDisjoint,
    PsiEq,
    PsiEquals,
    PsiExists,
    PsiFilter,
    PsiNot,
    PsiShape,
    PsiTop,
    RelAtom,
    RelStep,
    walk_psi,
)
from .translate import shape_bodies


class Truth(Enum):
    FALSE = 0
    UNDEF = 1
    TRUE = 2


TRUE, FALSE, UNDEF = Truth.TRUE, Truth.FALSE, Truth.UNDEF


def kleene_not(v: Truth) -> Truth:
    return Truth(2 - v.value)


def kleene_and(a: Truth, b: Truth) -> Truth:
    return a if a.value <= b.value else b


class SemanticsMode(Enum):
    BRAVE_PARTIAL = "brave-partial"
    BRAVE_TOTAL = "brave-total"
    CAUTIOUS_PARTIAL = "cautious-partial"
    CAUTIOUS_TOTAL = "cautious-total"

    @property
    def brave(self) -> bool:
        return self in (SemanticsMode.BRAVE_PARTIAL, SemanticsMode.BRAVE_TOTAL)

    @property
    def total(self) -> bool:
        return self in (SemanticsMode.BRAVE_TOTAL, SemanticsMode.CAUTIOUS_TOTAL)


ALL_MODES = tuple(SemanticsMode)


class Assignment:
    """Signed shape literals per node over a fixed (nodes, shapes) scope."""

    __slots__ = ("nodes", "shapes", "signs", "_hash")

    def __init__(self, nodes, shapes, signs):
        self.nodes = tuple(sorted(set(nodes), key=term_key))
        self.shapes = tuple(sorted(set(shapes), key=lambda i: i.value))
        clean = {}
        node_set, shape_set = set(self.nodes), set(self.shapes)
        for (node, name), sign in dict(signs).items():
            if node not in node_set or name not in shape_set:
                raise ValueError(f"assignment entry ({node!r}, {name!r}) outside scope")
            clean[(node, name)] = bool(sign)
        self.signs = clean
        self._hash = hash((self.nodes, self.shapes, frozenset(clean.items())))

    def sign(self, node: Term, name: Iri) -> Optional[bool]:
        return self.signs.get((node, name))

    def positive(self, node: Term) -> frozenset:
        return frozenset(n for (nd, n), s in self.signs.items() if nd == node and s)

    def negative(self, node: Term) -> frozenset:
        return frozenset(n for (nd, n), s in self.signs.items() if nd == node and not s)

    def is_total(self) -> bool:
        return len(self.signs) == len(self.nodes) * len(self.shapes)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Assignment) and self.nodes == other.nodes
                and self.shapes == other.shapes and self.signs == other.signs)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Assignment({len(self.signs)} signs over {len(self.nodes)}x{len(self.shapes)})"

    def to_json(self) -> dict:
        out: dict = {}
        for node in self.nodes:
            labels = sorted(
                [f"+{n.value}" for n in self.positive(node)]
                + [f"-{n.value}" for n in self.negative(node)]
            )
            out[repr(node)] = labels
        return out


class SemanticsError(ValueError):
    pass


@lru_cache(maxsize=128)
def compile_document(m: sh.Document):
    """Per-shape formula bodies plus the sigma-independent subformula set."""
    for shape in m.shapes:
        for node in sh.walk(shape.constraint):
            if isinstance(node, sh.Xone):
                raise SemanticsError("eliminate xone before evaluation")
    bodies = shape_bodies(m)
    ground: set[int] = set()
    for body in bodies.values():
        for node in walk_psi(body):
            if not any(isinstance(x, PsiShape) for x in walk_psi(node)):
                ground.add(id(node))
    return _Compiled(m, bodies, frozenset(ground))


@dataclass(frozen=True)
class _Compiled:
    document: sh.Document
    bodies: dict
    ground: frozenset

    def __hash__(self):  # keep the lru entry alive and unique per document
        return hash(self.document)

    def __eq__(self, other):
        return isinstance(other, _Compiled) and self.document == other.document


def target_holds(g: Graph, t: sh.TargetDecl, node: Term) -> bool:
    if isinstance(t, sh.NodeTarget):
        return node == t.node
    if isinstance(t, sh.ClassTarget):
        return g.has(node, RDF_TYPE, t.cls)
    if isinstance(t, sh.SubjectsOfTarget):
        return bool(g.objects(node, t.rel))
    return bool(g.subjects(t.rel, node))


class EvalContext:
    """Evaluator over one graph; path results and ground subformula values
    are cached, shape atoms are read through a mutable sign lookup."""

    def __init__(self, g: Graph, compiled: _Compiled, filter_eval=eval_filter):
        self.g = g
        self.compiled = compiled
        self.filter_eval = filter_eval
        self.sign = {}  # (Term, Iri) -> bool, mutated by the search
        self._paths: dict = {}
        self._ground_vals: dict = {}

    def rel_values(self, node: Term, rel: RelAtom) -> frozenset:
        if rel.inverted:
            return frozenset(self.g.subjects(rel.name, node))
        return frozenset(self.g.objects(node, rel.name))

    def eval_path(self, pi: Pi, node: Term) -> frozenset:
        key = (id(pi), node)
        got = self._paths.get(key)
        if got is not None:
            return got
        if isinstance(pi, RelStep):
            out = self.rel_values(node, pi.rel)
        elif isinstance(pi, PiSeq):
            out = frozenset(
                y for mid in self.eval_path(pi.left, node) for y in self.eval_path(pi.right, mid)
            )
        elif isinstance(pi, PiZeroOrOne):
            out = self.eval_path(pi.inner, node) | {node}
        elif isinstance(pi, PiAlt):
            out = self.eval_path(pi.left, node) | self.eval_path(pi.right, node)
        else:  # reflexive-transitive closure
            seen = {node}
            frontier = [node]
            while frontier:
                cur = frontier.pop()
                for nxt in self.eval_path(pi.inner, cur):
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
            out = frozenset(seen)
        self._paths[key] = out
        return out

    def eval(self, psi: Psi, node: Term) -> Truth:
        ground = id(psi) in self.compiled.ground
        if ground:
            got = self._ground_vals.get((id(psi), node))
            if got is not None:
                return got
        v = self._eval(psi, node)
        if ground:
            self._ground_vals[(id(psi), node)] = v
        return v

    def _eval(self, psi: Psi, node: Term) -> Truth:
        if isinstance(psi, PsiTop):
            return TRUE
        if isinstance(psi, PsiNot):
            return kleene_not(self.eval(psi.inner, node))
        if isinstance(psi, PsiAnd):
            left = self.eval(psi.left, node)
            if left is FALSE:
                return FALSE
            return kleene_and(left, self.eval(psi.right, node))
        if isinstance(psi, PsiEq):
            return TRUE if node == psi.constant else FALSE
        if isinstance(psi, PsiFilter):
            return TRUE if self.filter_eval(psi.atom, node) else FALSE
        if isinstance(psi, PsiShape):
            s = self.sign.get((node, psi.rel.name))
            if s is None:
                return UNDEF
            return TRUE if s else FALSE
        if isinstance(psi, PsiExists):
            best = FALSE
            for y in self.eval_path(psi.path, node):
                v = self.eval(psi.body, y)
                if v is TRUE:
                    return TRUE
                if v is UNDEF:
                    best = UNDEF
            return best
        if isinstance(psi, PsiCount):
            true_n = undef_n = 0
            for y in self.eval_path(psi.path, node):
                v = self.eval(psi.body, y)
                if v is TRUE:
                    true_n += 1
                elif v is UNDEF:
                    undef_n += 1
            if true_n >= psi.n:
                return TRUE
            if true_n + undef_n < psi.n:
                return FALSE
            return UNDEF
        if isinstance(psi, PsiDisjoint):
            shared = self.eval_path(psi.path, node) & self.rel_values(node, psi.rel)
            return FALSE if shared else TRUE
        if isinstance(psi, PsiEquals):
            same = self.eval_path(psi.path, node) == self.rel_values(node, psi.rel)
            return TRUE if same else FALSE
        # property-pair order: every (path value, relation value) pair must
        # compare within one partition; incomparable pairs fail the atom
        ys = self.eval_path(psi.path, node)
        zs = self.rel_values(node, psi.rel)
        for y in ys:
            yv = comparison_value(y)
            for z in zs:
                zv = comparison_value(z)
                if yv is None or zv is None or yv[0] != zv[0]:
                    return FALSE
                a, b = yv[1], zv[1]
                ok = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[psi.op]
                if not ok:
                    return FALSE
        return TRUE


def eval_path(pi: Pi, node: Term, g: Graph) -> frozenset:
    """The set of terms the path formula reaches from a node."""
    ctx = EvalContext(g, _EMPTY_COMPILED)
    return ctx.eval_path(pi, node)


def eval_psi(psi: Psi, node: Term, g: Graph, sigma: Assignment) -> Truth:
    """Strong-Kleene value of a formula at a node under an assignment."""
    ctx = EvalContext(g, _EMPTY_COMPILED)
    ctx.sign = dict(sigma.signs)
    return ctx.eval(psi, node)


_EMPTY_COMPILED = _Compiled(sh.Document(()), {}, frozenset())


def is_faithful(g: Graph, sigma: Assignment, m: sh.Document) -> bool:
    """Signs match the constraint evaluations everywhere, and every targeted
    node carries the positive literal of its shape."""
    compiled = compile_document(m)
    scope_nodes = nodes_of(g, m)
    if set(sigma.nodes) != set(scope_nodes) or set(sigma.shapes) != set(m.names()):
        raise SemanticsError("assignment scope does not match (nodes(G,M), shapes(M))")
    ctx = EvalContext(g, compiled)
    ctx.sign = dict(sigma.signs)
    for shape in m.shapes:
        body = compiled.bodies[shape.name]
        for node in sigma.nodes:
            v = ctx.eval(body, node)
            s = sigma.sign(node, shape.name)
            if (s is True) != (v is TRUE):
                return False
            if (s is False) != (v is FALSE):
                return False
        for t in shape.targets:
            for node in sigma.nodes:
                if target_holds(g, t, node) and sigma.sign(node, shape.name) is not True:
                    return False
    return True


def stratified_assignment(g: Graph, m: sh.Document) -> Assignment:
    """The unique total assignment faithful for the target-free document,
    computed stratum by stratum; rejects recursive input."""
    if sh.is_recursive(m):
        raise SemanticsError("stratified evaluation needs a non-recursive document")
    compiled = compile_document(m)
    order: list[Iri] = []
    placed: set[Iri] = set()
    remaining = {s.name: sh.referenced_names(s.constraint) for s in m.shapes}
    while remaining:
        ready = sorted([n for n, deps in remaining.items() if deps <= placed],
                       key=lambda i: i.value)
        if not ready:
            raise SemanticsError("dependency cycle in a non-recursive document")
        for n in ready:
            order.append(n)
            placed.add(n)
            del remaining[n]
    nodes = sorted(nodes_of(g, m), key=term_key)
    ctx = EvalContext(g, compiled)
    for name in order:
        body = compiled.bodies[name]
        for node in nodes:
            v = ctx.eval(body, node)
            if v is UNDEF:
                raise SemanticsError(f"undefined evaluation in stratum of {name!r}")
            ctx.sign[(node, name)] = v is TRUE
    return Assignment(nodes, m.names(), ctx.sign)


# --- faithful-assignment search ------------------------------------------------

_UNSET_FINAL = "undef"


class _Search:
    """Backtracking enumeration of faithful assignments with constraint
    propagation; deterministic, lexicographically least solution first."""

    def __init__(self, g: Graph, m: sh.Document, total: bool, extra_nodes=()):
        self.m = m
        self.total = total
        self.compiled = compile_document(m)
        self.ctx = EvalContext(g, self.compiled)
        self.nodes = sorted(nodes_of(g, m) | frozenset(extra_nodes), key=term_key)
        self.shapes = sorted(m.names(), key=lambda i: i.value)
        self.pairs = [(n, s) for n in self.nodes for s in self.shapes]
        self.g = g
        self.targeted = set()
        for shape in m.shapes:
            for t in shape.targets:
                for node in self.nodes:
                    if target_holds(g, t, node):
                        self.targeted.add((node, shape.name))

    def value(self, pair) -> Truth:
        node, name = pair
        return self.ctx.eval(self.compiled.bodies[name], node)

    def propagate(self, state: dict) -> bool:
        """Force signs implied by the current information; false on conflict."""
        changed = True
        while changed:
            changed = False
            for pair in self.pairs:
                cur = state.get(pair)
                v = self.value(pair)
                if cur is None:
                    if v is TRUE:
                        state[pair] = True
                        self.ctx.sign[pair] = True
                        changed = True
                    elif v is FALSE:
                        if pair in self.targeted:
                            return False
                        state[pair] = False
                        self.ctx.sign[pair] = False
                        changed = True
                elif cur is True and v is FALSE:
                    return False
                elif cur is False and v is TRUE:
                    return False
                elif cur == _UNSET_FINAL and v is not UNDEF:
                    return False
                if pair in self.targeted and state.get(pair) in (False, _UNSET_FINAL):
                    return False
        return True

    def verify(self, state: dict) -> bool:
        for pair in self.pairs:
            v = self.value(pair)
            cur = state.get(pair)
            if cur is True and v is not TRUE:
                return False
            if cur is False and v is not FALSE:
                return False
            if cur == _UNSET_FINAL and v is not UNDEF:
                return False
            if pair in self.targeted and cur is not True:
                return False
        return True

    def solutions(self) -> Iterator[Assignment]:
        yield from self._solve({})

    def _solve(self, state: dict) -> Iterator[Assignment]:
        state = dict(state)
        self._load(state)
        if not self.propagate(state):
            return
        unassigned = [p for p in self.pairs if p not in state]
        if not unassigned:
            if self.verify(state):
                yield Assignment(self.nodes, self.shapes,
                                 {p: v for p, v in state.items() if isinstance(v, bool)})
            return
        pair = unassigned[0]
        choices = (True, False) if self.total else (True, False, _UNSET_FINAL)
        for choice in choices:
            if pair in self.targeted and choice is not True:
                continue
            child = dict(state)
            child[pair] = choice
            yield from self._solve(child)

    def _load(self, state: dict) -> None:
        self.ctx.sign = {p: v for p, v in state.items() if isinstance(v, bool)}


def iter_faithful(g: Graph, m: sh.Document, total: bool,
                  extra_nodes=()) -> Iterator[Assignment]:
    """All assignments faithful for (g, m), targets included; partial or
    total per the flag.  Deterministic order.  `extra_nodes` widens the node
    scope (used when assignments must cover another document's targets)."""
    yield from _Search(g, sh.eliminate_xone(m), total, extra_nodes).solutions()


def _targets_satisfied(g: Graph, m: sh.Document, sigma: Assignment) -> bool:
    for shape in m.shapes:
        for t in shape.targets:
            for node in sigma.nodes:
                if target_holds(g, t, node) and sigma.sign(node, shape.name) is not True:
                    return False
    return True


def validate(g: Graph, m: sh.Document, mode: SemanticsMode, use_fast_path: bool = True) -> bool:
    """Validity of the graph under one of the four extended semantics."""
    m = sh.eliminate_xone(m)
    if use_fast_path and not sh.is_recursive(m):
        rho = stratified_assignment(g, m)
        return _targets_satisfied(g, m, rho)
    exists_faithful = next(iter_faithful(g, m, mode.total), None) is not None
    if mode.brave:
        return exists_faithful
    if not exists_faithful:
        return False
    # the universally quantified assignments are scoped to (G, M): they cover
    # the node-target constants even though the checked document drops targets
    base = sh.strip_targets(m)
    return all(
        _targets_satisfied(g, m, sigma)
        for sigma in iter_faithful(g, base, mode.total, extra_nodes=nodes_of(g, m))
    )


def sentence_holds(phi, g: Graph, sigma: Assignment) -> bool:
    """Truth of a sentence over the structure induced by a graph and a total
    assignment: quantifiers range over the structure's domain (the
    assignment's node scope), constants outside it denote nothing."""
    from .scl import (AtMostAxiom, ConstraintAxiom, SclSentence, TargetClassAxiom,
                      TargetNodeAxiom, TargetObjectsAxiom, TargetSubjectsAxiom)

    if not sigma.is_total():
        raise SemanticsError("sentence evaluation needs a total assignment")
    ctx = EvalContext(g, _EMPTY_COMPILED)
    ctx.sign = dict(sigma.signs)
    known_shapes = set(sigma.shapes)

    def shape_sign(node: Term, name: Iri) -> bool:
        # relations the assignment does not cover hold nowhere
        return bool(ctx.sign.get((node, name)))

    def holds(v: Truth) -> bool:
        if v is UNDEF:
            raise SemanticsError("undefined truth value over a total structure")
        return v is TRUE

    domain = sigma.nodes
    for axiom in phi.axioms:
        if isinstance(axiom, TargetNodeAxiom):
            if axiom.constant not in set(domain) or not shape_sign(axiom.constant, axiom.shape.name):
                return False
        elif isinstance(axiom, TargetClassAxiom):
            for n in domain:
                if g.has(n, RDF_TYPE, axiom.cls) and not shape_sign(n, axiom.shape.name):
                    return False
        elif isinstance(axiom, TargetSubjectsAxiom):
            for n in domain:
                if g.objects(n, axiom.rel) and not shape_sign(n, axiom.shape.name):
                    return False
        elif isinstance(axiom, TargetObjectsAxiom):
            for n in domain:
                if g.subjects(axiom.rel, n) and not shape_sign(n, axiom.shape.name):
                    return False
        elif isinstance(axiom, ConstraintAxiom):
            if axiom.shape.name not in known_shapes:
                raise SemanticsError(f"assignment does not cover {axiom.shape.name!r}")
            for n in domain:
                v = holds(ctx.eval(axiom.body, n))
                if v != shape_sign(n, axiom.shape.name):
                    return False
        elif isinstance(axiom, AtMostAxiom):
            count = sum(1 for n in domain if holds(ctx.eval(axiom.body, n)))
            if count > axiom.n:
                return False
    return True


# --- partial-to-total transformation ---------------------------------------------

GAMMA_POS_NS = "urn:sclkit:gamma:pos:"
GAMMA_NEG_NS = "urn:sclkit:gamma:neg:"
GAMMA_AUX_NS = "urn:sclkit:gamma:aux:"


def gamma_pos_name(name: Iri) -> Iri:
    return Iri(GAMMA_POS_NS + name.value)


def gamma_neg_name(name: Iri) -> Iri:
    return Iri(GAMMA_NEG_NS + name.value)


class _GammaRewriter:
    def __init__(self):
        self.aux: dict = {}
        self.aux_shapes: list = []

    def _aux_for(self, ref: Iri, siblings: tuple) -> Iri:
        key = (ref, siblings)
        if key in self.aux:
            return self.aux[key]
        name = Iri(f"{GAMMA_AUX_NS}{len(self.aux)}")
        parts = [sh.And((sh.Ref(gamma_pos_name(ref)), sh.Not(sh.Ref(gamma_neg_name(ref)))))]
        for sib in siblings:
            parts.append(sh.And((sh.Not(sh.Ref(gamma_pos_name(sib))), sh.Ref(gamma_neg_name(sib)))))
        constraint = parts[0] if len(parts) == 1 else sh.And(tuple(parts))
        self.aux[key] = name
        self.aux_shapes.append(sh.Shape(name, (), None, constraint))
        return name

    def pos(self, c: sh.Constraint) -> sh.Constraint:
        if isinstance(c, sh.Ref):
            return sh.And((sh.Ref(gamma_pos_name(c.name)), sh.Not(sh.Ref(gamma_neg_name(c.name)))))
        if isinstance(c, sh.Not):
            return self.neg(c.inner)
        if isinstance(c, sh.And):
            return sh.And(tuple(self.pos(i) for i in c.items))
        if isinstance(c, sh.Or):
            return sh.Or(tuple(self.pos(i) for i in c.items))
        if isinstance(c, sh.AllValues):
            return sh.AllValues(self.pos(c.inner))
        if isinstance(c, sh.SomeValues):
            return sh.SomeValues(self.pos(c.inner))
        if isinstance(c, sh.QualifiedValue):
            return sh.QualifiedValue(self._aux_for(c.ref, c.siblings), c.min_count, c.max_count, ())
        if isinstance(c, sh.Xone):
            raise SemanticsError("eliminate xone before the partial-to-total rewrite")
        return c

    def neg(self, c: sh.Constraint) -> sh.Constraint:
        if isinstance(c, sh.Ref):
            return sh.And((sh.Not(sh.Ref(gamma_pos_name(c.name))), sh.Ref(gamma_neg_name(c.name))))
        if isinstance(c, sh.Not):
            return self.pos(c.inner)
        if isinstance(c, sh.And):
            return sh.Or(tuple(self.neg(i) for i in c.items))
        if isinstance(c, sh.Or):
            return sh.And(tuple(self.neg(i) for i in c.items))
        if isinstance(c, sh.AllValues):
            return sh.SomeValues(self.neg(c.inner))
        if isinstance(c, sh.SomeValues):
            return sh.AllValues(self.neg(c.inner))
        if isinstance(c, sh.QualifiedValue):
            aux = self._aux_for(c.ref, c.siblings)
            parts = []
            if c.min_count is not None and c.min_count >= 1:
                parts.append(sh.Not(sh.QualifiedValue(aux, c.min_count, None, ())))
            if c.max_count is not None:
                parts.append(sh.QualifiedValue(aux, c.max_count + 1, None, ()))
            if not parts:
                return sh.Not(sh.Top())
            return parts[0] if len(parts) == 1 else sh.Or(tuple(parts))
        if isinstance(c, sh.Xone):
            raise SemanticsError("eliminate xone before the partial-to-total rewrite")
        return sh.Not(c)


def gamma_transform(m: sh.Document) -> sh.Document:
    """Split each shape into a positive and a negative half so that validity
    under partial semantics becomes validity under total semantics.  The
    negative half carries no targets: targets demand conformance, which the
    positive half models."""
    m = sh.eliminate_xone(m)
    rw = _GammaRewriter()
    shapes = []
    for shape in m.shapes:
        shapes.append(sh.Shape(gamma_pos_name(shape.name), shape.targets, shape.path,
                               rw.pos(shape.constraint)))
        shapes.append(sh.Shape(gamma_neg_name(shape.name), (), shape.path,
                               rw.neg(shape.constraint)))
    return sh.Document(tuple(shapes) + tuple(rw.aux_shapes))


def gamma_assignment(sigma: Assignment) -> Assignment:
    """The total assignment over the split shape names: conformance maps to
    (+pos, -neg), violation to (-pos, +neg), undefined to (-pos, -neg)."""
    shapes = []
    for name in sigma.shapes:
        shapes.extend((gamma_pos_name(name), gamma_neg_name(name)))
    signs = {}
    for node in sigma.nodes:
        for name in sigma.shapes:
            s = sigma.sign(node, name)
            signs[(node, gamma_pos_name(name))] = s is True
            signs[(node, gamma_neg_name(name))] = s is False
    return Assignment(sigma.nodes, shapes, signs)


def complete_gamma_assignment(sigma_gamma: Assignment, gm: sh.Document, g: Graph) -> Assignment:
    """Extend a split assignment over the auxiliary shapes of the transformed
    document; their constraints are two-valued given the split signs."""
    aux_names = [n for n in gm.names() if n.value.startswith(GAMMA_AUX_NS)]
    if not aux_names:
        return sigma_gamma
    compiled = compile_document(gm)
    ctx = EvalContext(g, compiled)
    ctx.sign = dict(sigma_gamma.signs)
    signs = dict(sigma_gamma.signs)
    for name in aux_names:
        for node in sigma_gamma.nodes:
            v = ctx.eval(compiled.bodies[name], node)
            if v is UNDEF:
                raise SemanticsError("auxiliary shape evaluation must be two-valued")
            signs[(node, name)] = v is TRUE
    return Assignment(sigma_gamma.nodes, list(sigma_gamma.shapes) + aux_names, signs)
