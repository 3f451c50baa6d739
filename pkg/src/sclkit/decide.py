"""Fragment classification, desk-scale satisfiability and containment by
bounded model search, and first-order encodings for external provers.

Two search routines live here: a graph-level search that enumerates candidate
data graphs and runs the validator, and an uninterpreted-model search that
grounds sentences over a bounded domain into CNF and runs a small DPLL
solver (filters become free monadic predicates there).
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .rdf import Graph, Iri, Literal, RDF_TYPE, Term, Triple, XSD_BOOLEAN, XSD_DECIMAL, XSD_INTEGER, XSD_STRING, term_key, triple_key
from . import shacl as sh
from .filters import (
    FilterAtom,
    FilterCombination,
    OrderCmp,
    Pos,
    bounded_axiomatisation,
    combo_witnesses,
    eval_filter,
)
from .scl import (
    AtMostAxiom,
    Axiom,
    ConstraintAxiom,
    FeatureSet,
    Pi,
    PiAlt,
    PiSeq,
    PiStar,
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
    PsiOrder,
    PsiShape,
    PsiTop,
    RelAtom,
    RelStep,
    SclSentence,
    ShapeRel,
    TargetAxiom,
    TargetClassAxiom,
    TargetNodeAxiom,
    TargetObjectsAxiom,
    TargetSubjectsAxiom,
    constants_of,
    features_of,
    walk_psi,
)
from .semantics import Assignment, SemanticsMode, validate
from .translate import tau


class DecisionError(ValueError):
    pass


# --- fragment classification ---------------------------------------------------

DECIDABLE = "Decidable"
UNDECIDABLE = "Undecidable"
UNKNOWN = "Unknown"

EXPTIME_COMPLETE = "ExpTime-complete"
NEXPTIME = "NExpTime"
NEXPTIME_COMPLETE = "NExpTime-complete"
TWO_EXPTIME = "2ExpTime"

FMP_YES = "Yes"
FMP_NO = "No"
FMP_UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    decidability: str
    complexity: Optional[str]
    fmp: str
    witnesses: tuple
    features: FeatureSet

    def to_json(self) -> dict:
        return {
            "features": sorted(self.features.flags),
            "recursive": self.features.recursive,
            "decidability": self.decidability,
            "complexity": self.complexity,
            "fmp": self.fmp,
            "witnesses": list(self.witnesses),
            "semantics": "total",
        }


_DECIDABLE_FRAGMENTS = (
    # (fragment letters, complexity label); first inclusion wins
    (frozenset("SZA"), EXPTIME_COMPLETE),
    (frozenset({"Z", "A", "D", "E"}), NEXPTIME),
    (frozenset({"Z", "A", "D", "E", "C"}), NEXPTIME_COMPLETE),
    (frozenset({"S", "Z", "A", "T", "D"}), TWO_EXPTIME),
)

_UNDECIDABLE_CORES = (
    frozenset({"S", "O"}),
    frozenset({"S", "A", "C"}),
    frozenset({"S", "E"}),
    frozenset({"S", "E", "C"}),
    frozenset({"S", "E", "O'"}),
    frozenset({"S", "Z", "A", "E"}),
)

_NO_FMP_CORES = (
    frozenset({"C"}),
    frozenset({"S", "T", "D"}),
    frozenset({"O"}),
    frozenset({"E", "O'"}),
)

_FMP_FRAGMENTS = (
    frozenset({"S", "Z", "A", "D"}),
    frozenset({"Z", "A", "D", "E"}),
)


def _letters(flags: Iterable[str]) -> str:
    order = "SZATDOEC"
    out = "".join(l for l in order if l in flags)
    if "O'" in flags:
        out += "O'"
    return out or "base"


def classify(phi: SclSentence) -> Verdict:
    """Decidability/complexity verdict of the sentence's feature fragment."""
    fs = features_of(phi)
    flags = set(fs.flags)
    witnesses: list[str] = []

    fmp = FMP_UNKNOWN
    for frag in _FMP_FRAGMENTS:
        if flags <= frag:
            fmp = FMP_YES
            witnesses.append(f"finite-models:within-{_letters(frag)}")
            break
    if fmp is FMP_UNKNOWN:
        for core in _NO_FMP_CORES:
            if core <= flags:
                fmp = FMP_NO
                witnesses.append(f"no-finite-models:contains-{_letters(core)}")
                break

    for core in _UNDECIDABLE_CORES:
        if core <= flags:
            witnesses.append(f"undecidable:contains-{_letters(core)}")
            return Verdict(UNDECIDABLE, None, fmp, tuple(witnesses), fs)
    for frag, label in _DECIDABLE_FRAGMENTS:
        if flags <= frag:
            witnesses.append(f"decidable:within-{_letters(frag)}")
            return Verdict(DECIDABLE, label, fmp, tuple(witnesses), fs)
    witnesses.append("no-known-result")
    return Verdict(UNKNOWN, None, fmp, tuple(witnesses), fs)


# --- budgets and results ---------------------------------------------------------

@dataclass(frozen=True)
class SearchBudget:
    max_fresh: int = 2
    max_triples: int = 8
    max_seconds: float = 30.0

    def __post_init__(self) -> None:
        if self.max_fresh < 0 or self.max_triples < 0 or self.max_seconds < 0:
            raise ValueError("search budget bounds must be non-negative")


@dataclass(frozen=True)
class SatResult:
    status: str  # "sat" | "unsat" | "unknown"
    witness_graph: Optional[Graph] = None
    witness_assignment: Optional[Assignment] = None
    witness_node: Optional[Term] = None
    exhaustive: bool = False
    approximate: bool = False
    reason: Optional[str] = None
    encoding: Optional[str] = None  # prover encoding, when requested

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    def to_json(self) -> dict:
        from .rdf import serialize_turtle

        out: dict = {"result": self.status, "approximate": self.approximate}
        if self.exhaustive:
            out["exhaustive"] = True
        if self.reason:
            out["reason"] = self.reason
        if self.witness_graph is not None:
            out["witness_graph"] = serialize_turtle(self.witness_graph)
        if self.witness_assignment is not None:
            out["witness_assignment"] = self.witness_assignment.to_json()
        if self.witness_node is not None:
            out["witness_node"] = repr(self.witness_node)
        return out


class _Deadline:
    def __init__(self, seconds: float):
        self.t_end = time.monotonic() + seconds

    def expired(self) -> bool:
        return time.monotonic() > self.t_end


# --- graph-level bounded search ---------------------------------------------------

def _filter_sample_terms(m: sh.Document) -> list[Term]:
    """Deterministic candidate literals that satisfy the document's filter
    constraints, so graph search can build filter-conforming witnesses."""
    atoms: list[FilterAtom] = []
    per_shape: list[list[FilterAtom]] = []
    bodies = tau(m)
    for axiom in bodies.constraint_axioms():
        shape_atoms = [n.atom for n in walk_psi(axiom.body) if isinstance(n, PsiFilter)]
        if shape_atoms:
            per_shape.append(shape_atoms)
            atoms.extend(shape_atoms)
    if not atoms:
        return []
    pool: list[Term] = [
        Literal("0", XSD_INTEGER), Literal("1", XSD_INTEGER), Literal("2", XSD_INTEGER),
        Literal("0.5", XSD_DECIMAL),
        Literal("true", XSD_BOOLEAN), Literal("false", XSD_BOOLEAN),
        Literal("", XSD_STRING), Literal("a", XSD_STRING),
        Literal("a", language="en"),
    ]
    from .filters import DatatypeAtom, LanguageTagAtom

    for atom in atoms:
        if isinstance(atom, OrderCmp):
            pool.append(atom.limit)
        elif isinstance(atom, DatatypeAtom):
            pool.extend(Literal(form, atom.datatype) for form in ("0", "1", "a"))
        elif isinstance(atom, LanguageTagAtom):
            pool.append(Literal("a", language=atom.tag))
    samples: list[Term] = []
    for group in per_shape:
        combo = FilterCombination.of([Pos(a) for a in group])
        wits = combo_witnesses(combo, (), limit=4)
        if wits:
            samples.extend(wits[:2])
        for a in group:
            wits = combo_witnesses(FilterCombination.of([Pos(a)]), (), limit=4)
            if wits:
                samples.extend(wits[:2])
            else:
                samples.extend(t for t in pool if eval_filter(a, t))
    seen = []
    for t in sorted(samples, key=term_key):
        if t not in seen:
            seen.append(t)
    return seen[:6]


def _fresh_usage_canonical(triples: tuple, fresh: list[Term]) -> bool:
    """Interchangeable fresh elements: keep only first-appearance-ordered uses."""
    order = {f: i for i, f in enumerate(fresh)}
    next_expected = 0
    for t in triples:
        for term in (t.subject, t.predicate, t.object):
            i = order.get(term)
            if i is None:
                continue
            if i > next_expected:
                return False
            if i == next_expected:
                next_expected += 1
    return True


def candidate_graphs(m: sh.Document, budget: SearchBudget,
                     extra_constants: Iterable[Term] = (),
                     extra_relations: Iterable[Iri] = ()) -> Iterator[Graph]:
    """Ascending enumeration of graphs over the document's vocabulary."""
    consts = sorted(set(sh.document_constants(m)) | set(extra_constants), key=term_key)
    consts += [t for t in _filter_sample_terms(m) if t not in set(consts)]
    rels = sorted(set(sh.document_relation_names(m)) | set(extra_relations),
                  key=lambda i: i.value)
    uses_closed = any(isinstance(node, sh.Closed) for s in m.shapes for node in sh.walk(s.constraint))
    if uses_closed:
        from .translate import CLOSED_RELATION

        rels = sorted(set(rels) | {CLOSED_RELATION}, key=lambda i: i.value)
    fresh = [Iri(f"urn:sclkit:model:n{i}") for i in range(budget.max_fresh)]
    domain = consts + fresh
    if not rels or not domain:
        yield Graph(())
        return
    universe = sorted(
        (Triple(s, p, o) for p in rels for s in domain for o in domain), key=triple_key
    )
    max_k = min(budget.max_triples, len(universe))
    for k in range(0, max_k + 1):
        for combo in itertools.combinations(universe, k):
            if _fresh_usage_canonical(combo, fresh):
                yield Graph(combo)


def bounded_sat(m: sh.Document, mode: SemanticsMode, budget: SearchBudget,
                complete_size: Optional[int] = None) -> SatResult:
    """Search for a graph the document validates; first witness in the
    deterministic enumeration order wins."""
    deadline = _Deadline(budget.max_seconds)
    m = sh.eliminate_xone(m)
    for g in candidate_graphs(m, budget):
        if deadline.expired():
            return SatResult("unknown", reason="time budget exhausted")
        if validate(g, m, mode):
            from .semantics import iter_faithful

            sigma = next(iter_faithful(g, m, mode.total), None)
            return SatResult("sat", witness_graph=g, witness_assignment=sigma)
    if complete_size is not None and budget.max_triples >= complete_size:
        verdict = classify(tau(m))
        if verdict.fmp == FMP_YES:
            return SatResult("unsat", exhaustive=True)
    return SatResult("unknown", reason="no model within budget", exhaustive=False)


def check_satisfiability(m: sh.Document, mode: SemanticsMode, budget: SearchBudget,
                         complete_size: Optional[int] = None,
                         encoding: Optional[str] = None) -> SatResult:
    """Document satisfiability at desk scale: brave modes reduce to plain
    sentence satisfiability, cautious modes run the full assignment check
    inside the validator.  For the brave modes of a transitive-closure-free
    document an external-prover encoding can be attached on request."""
    result = bounded_sat(m, mode, budget, complete_size)
    if encoding is not None:
        if not mode.brave:
            raise DecisionError("prover encodings cover the brave modes only")
        phi = tau(sh.eliminate_xone(m))
        text = emit_smtlib(phi) if encoding == "smtlib2" else emit_tptp(phi)
        result = SatResult(result.status, result.witness_graph, result.witness_assignment,
                           result.witness_node, result.exhaustive, result.approximate,
                           result.reason, encoding=text)
    return result


def _rename_apart(m: sh.Document, taken: set, suffix: str) -> sh.Document:
    mapping = {name: Iri(name.value + suffix) for name in m.names() if name in taken}
    if not mapping:
        return m

    def rn(name: Iri) -> Iri:
        return mapping.get(name, name)

    def rewrite(c: sh.Constraint) -> sh.Constraint:
        if isinstance(c, sh.Ref):
            return sh.Ref(rn(c.name))
        if isinstance(c, sh.Not):
            return sh.Not(rewrite(c.inner))
        if isinstance(c, (sh.And, sh.Or)):
            return type(c)(tuple(rewrite(i) for i in c.items))
        if isinstance(c, sh.Xone):
            return sh.Xone(tuple(rn(n) for n in c.names))
        if isinstance(c, (sh.AllValues, sh.SomeValues)):
            return type(c)(rewrite(c.inner))
        if isinstance(c, sh.QualifiedValue):
            return sh.QualifiedValue(rn(c.ref), c.min_count, c.max_count,
                                     tuple(rn(s) for s in c.siblings))
        return c

    return sh.Document(tuple(
        sh.Shape(rn(s.name), s.targets, s.path, rewrite(s.constraint)) for s in m.shapes
    ))


def containment_sentence(m1: sh.Document, m2: sh.Document):
    """The single existential sentence whose satisfiability refutes
    containment of non-recursive documents: the first document's sentence
    conjoined with the second's target-free sentence and the negation of the
    second's target axioms."""
    m2 = _rename_apart(m2, set(m1.names()), "#rhs")
    phi1 = tau(m1, extra_documents=(m2,))
    phi2_base = tau(sh.strip_targets(m2), extra_documents=(m1,))
    phi2_full = tau(m2, extra_documents=(m1,))
    negated_targets = tuple(a for a in phi2_full.axioms if isinstance(a, TargetAxiom))
    return phi1.conjoin(phi2_base), negated_targets


def check_containment(m1: sh.Document, m2: sh.Document, mode: SemanticsMode,
                      budget: SearchBudget, encoding: Optional[str] = None) -> SatResult:
    """Counterexample search: sat means NOT contained, with the separating
    graph as witness.  For non-recursive pairs the single refutation
    sentence (first document holds, some target axiom of the second fails)
    can be attached as a prover encoding."""
    deadline = _Deadline(budget.max_seconds)
    m1 = sh.eliminate_xone(m1)
    m2 = sh.eliminate_xone(m2)
    encoded = None
    if encoding is not None:
        if sh.is_recursive(m1) or sh.is_recursive(m2):
            raise DecisionError("the containment sentence exists for non-recursive pairs only")
        phi, negated = containment_sentence(m1, m2)
        emit = emit_smtlib if encoding == "smtlib2" else emit_tptp
        encoded = emit(phi, negated_target_disjunction=negated)
    consts = sh.document_constants(m2)
    rels = sh.document_relation_names(m2)
    for g in candidate_graphs(m1, budget, extra_constants=consts, extra_relations=rels):
        if deadline.expired():
            return SatResult("unknown", reason="time budget exhausted", encoding=encoded)
        if validate(g, m1, mode) and not validate(g, m2, mode):
            return SatResult("sat", witness_graph=g, encoding=encoded)
    return SatResult("unknown", reason="no counterexample within budget", encoding=encoded)


def template_sat(m: sh.Document, name: Iri, constraint: sh.Constraint,
                 budget: SearchBudget, mode: SemanticsMode = SemanticsMode.BRAVE_TOTAL,
                 path: Optional[sh.PathExpr] = None) -> SatResult:
    """Is there a node that can be forced to conform to a fresh shape?

    Reduced to uninterpreted-model search over the translated document plus
    its bounded filter axiomatisation: the fresh target constant ranges over
    the sentence's constants plus one unknown, which symmetry makes generic.
    """
    if m.has_shape(name):
        raise DecisionError(f"template shape name {name!r} already occurs in the document")
    for ref in sh.referenced_names(constraint):
        if not m.has_shape(ref) and ref != name:
            raise DecisionError(f"template constraint references unknown shape {ref!r}")
    if mode not in (SemanticsMode.BRAVE_PARTIAL, SemanticsMode.BRAVE_TOTAL):
        raise DecisionError("template satisfiability is defined for the brave modes")
    doc = sh.eliminate_xone(m.with_shape(sh.Shape(name, (), path, constraint)))
    probe = ShapeRel(name)
    if mode is SemanticsMode.BRAVE_PARTIAL:
        from .semantics import gamma_pos_name, gamma_transform

        doc = gamma_transform(doc)
        probe = ShapeRel(gamma_pos_name(name))
    phi = tau(doc)
    ax = bounded_axiomatisation(phi)
    base = phi.conjoin(ax.sentence)
    candidates = sorted(constants_of(base), key=term_key)
    candidates.append(Iri("urn:sclkit:model:probe"))
    deadline = _Deadline(budget.max_seconds)
    for f in candidates:
        probe_sentence = base.conjoin(SclSentence((TargetNodeAxiom(probe, f),)))
        result = scl_bounded_sat(probe_sentence, budget, deadline=deadline)
        if result.is_sat:
            return SatResult("sat", witness_graph=result.witness_graph,
                             witness_assignment=result.witness_assignment,
                             witness_node=f, approximate=ax.approximate)
        if result.reason == "time budget exhausted":
            return result
    return SatResult("unknown", reason="no model within budget", approximate=ax.approximate)


def shape_containment(m: sh.Document, s: Iri, s_prime: Iri, mode: SemanticsMode,
                      budget: SearchBudget) -> SatResult:
    """Sat means s is NOT contained in s_prime: some node can conform to s
    while violating s_prime in a faithful assignment."""
    m.shape(s)
    m.shape(s_prime)
    mint = sh.NameMint(set(m.names()))
    star = mint.fresh()
    counterexample = sh.And((sh.Ref(s), sh.Not(sh.Ref(s_prime))))
    return template_sat(m, star, counterexample, budget, mode)


def constraint_satisfiability(m: sh.Document, constraint: sh.Constraint,
                              mode: SemanticsMode, budget: SearchBudget,
                              path: Optional[sh.PathExpr] = None) -> SatResult:
    mint = sh.NameMint(set(m.names()))
    return template_sat(m, mint.fresh(), constraint, budget, mode, path)


# --- uninterpreted bounded model search -------------------------------------------

class _Cnf:
    def __init__(self):
        self.n_vars = 1  # var 1 is the constant-true literal
        self.clauses: list[tuple] = [(1,)]
        self.TRUE = 1
        self.FALSE = -1
        self._and_memo: dict = {}

    def new_var(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def add(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))

    def and_(self, lits: Iterable[int]) -> int:
        lits = sorted(set(lits))
        if -self.TRUE in lits:
            return self.FALSE
        lits = [l for l in lits if l != self.TRUE]
        if any(-l in lits for l in lits):
            return self.FALSE
        if not lits:
            return self.TRUE
        if len(lits) == 1:
            return lits[0]
        key = tuple(lits)
        if key in self._and_memo:
            return self._and_memo[key]
        g = self.new_var()
        for l in lits:
            self.add(-g, l)
        self.add(g, *(-l for l in lits))
        self._and_memo[key] = g
        return g

    def or_(self, lits: Iterable[int]) -> int:
        return -self.and_([-l for l in lits])

    def iff(self, a: int, b: int) -> int:
        return self.and_([self.or_([-a, b]), self.or_([a, -b])])

    def at_least(self, n: int, lits: list) -> int:
        if n <= 0:
            return self.TRUE
        if n > len(lits):
            return self.FALSE
        if n == 1:
            return self.or_(lits)
        return self.or_([self.and_(sub) for sub in itertools.combinations(lits, n)])

    def assert_at_most(self, n: int, lits: list) -> None:
        for sub in itertools.combinations(lits, n + 1):
            self.add(*(-l for l in sub))


def _dpll(n_vars: int, clauses: list) -> Optional[list]:
    """Small iterative DPLL with occurrence-list unit propagation; returns a
    model (index-by-var booleans) or None."""
    assign: list = [None] * (n_vars + 1)
    occurs: dict = {}
    for ci, clause in enumerate(clauses):
        if not clause:
            return None
        for lit in clause:
            occurs.setdefault(-lit, []).append(ci)

    trail: list = []
    queue: list = []

    def value(lit: int):
        v = assign[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def enqueue(lit: int) -> bool:
        v = value(lit)
        if v is False:
            return False
        if v is None:
            assign[abs(lit)] = lit > 0
            trail.append(abs(lit))
            queue.append(lit)
        return True

    def propagate() -> bool:
        while queue:
            lit = queue.pop()
            for ci in occurs.get(lit, ()):
                clause = clauses[ci]
                unit = None
                satisfied = False
                for l in clause:
                    v = value(l)
                    if v is True:
                        satisfied = True
                        break
                    if v is None:
                        if unit is not None:
                            unit = 0  # two unassigned: nothing to do
                            break
                        unit = l
                if satisfied or unit == 0:
                    continue
                if unit is None:
                    return False
                if not enqueue(unit):
                    return False
        return True

    for clause in clauses:
        if len(clause) == 1 and not enqueue(clause[0]):
            return None
    if not propagate():
        return None

    def backtrack(mark: int) -> None:
        while len(trail) > mark:
            assign[trail.pop()] = None

    decisions: list = []
    while True:
        var = next((v for v in range(1, n_vars + 1) if assign[v] is None), None)
        if var is None:
            assert all(any(value(l) for l in c) for c in clauses)
            return assign
        decisions.append((var, False, len(trail)))
        queue.clear()
        enqueue(-var)
        while not propagate():
            queue.clear()
            while decisions:
                var, tried_true, mark = decisions.pop()
                backtrack(mark)
                if not tried_true:
                    decisions.append((var, True, mark))
                    enqueue(var)
                    break
            else:
                return None


@dataclass
class _Grounder:
    cnf: _Cnf
    domain: list
    const_index: dict
    rel_vars: dict = field(default_factory=dict)
    filt_vars: dict = field(default_factory=dict)
    shape_vars: dict = field(default_factory=dict)
    ord_vars: dict = field(default_factory=dict)
    psi_memo: dict = field(default_factory=dict)
    pi_memo: dict = field(default_factory=dict)

    def rel(self, name: Term, i: int, j: int) -> int:
        key = (name, i, j)
        if key not in self.rel_vars:
            self.rel_vars[key] = self.cnf.new_var()
        return self.rel_vars[key]

    def filt(self, atom: FilterAtom, i: int) -> int:
        key = (atom, i)
        if key not in self.filt_vars:
            self.filt_vars[key] = self.cnf.new_var()
        return self.filt_vars[key]

    def shape(self, name: Iri, i: int) -> int:
        key = (name, i)
        if key not in self.shape_vars:
            self.shape_vars[key] = self.cnf.new_var()
        return self.shape_vars[key]

    def order(self, op: str, j: int, k: int) -> int:
        # uninterpreted binary order relations lt / le
        if op in (">", ">="):
            return self.order({"<": ">", ">": "<", "<=": ">=", ">=": "<="}[op], k, j)
        key = (op, j, k)
        if key not in self.ord_vars:
            self.ord_vars[key] = self.cnf.new_var()
        return self.ord_vars[key]

    def rel_atom(self, rel: RelAtom, i: int, j: int) -> int:
        if rel.inverted:
            return self.rel(rel.name, j, i)
        return self.rel(rel.name, i, j)

    def pi(self, pi: Pi, i: int, j: int) -> int:
        key = (id(pi), i, j)
        if key in self.pi_memo:
            return self.pi_memo[key]
        if isinstance(pi, RelStep):
            out = self.rel_atom(pi.rel, i, j)
        elif isinstance(pi, PiSeq):
            out = self.cnf.or_([
                self.cnf.and_([self.pi(pi.left, i, k), self.pi(pi.right, k, j)])
                for k in range(len(self.domain))
            ])
        elif isinstance(pi, PiZeroOrOne):
            out = self.cnf.TRUE if i == j else self.pi(pi.inner, i, j)
        elif isinstance(pi, PiAlt):
            out = self.cnf.or_([self.pi(pi.left, i, j), self.pi(pi.right, i, j)])
        else:
            out = self._star(pi, i, j)
        self.pi_memo[key] = out
        return out

    def _star(self, pi: PiStar, i: int, j: int) -> int:
        d = len(self.domain)
        levels = max(1, d.bit_length())
        key0 = ("star", id(pi), 0)
        if key0 not in self.pi_memo:
            for a in range(d):
                for b in range(d):
                    base = self.cnf.TRUE if a == b else self.pi(pi.inner, a, b)
                    self.pi_memo[("starv", id(pi), 0, a, b)] = base
            self.pi_memo[key0] = True
            for level in range(1, levels + 1):
                for a in range(d):
                    for b in range(d):
                        prev = self.pi_memo[("starv", id(pi), level - 1, a, b)]
                        hops = [
                            self.cnf.and_([
                                self.pi_memo[("starv", id(pi), level - 1, a, k)],
                                self.pi_memo[("starv", id(pi), level - 1, k, b)],
                            ])
                            for k in range(d)
                        ]
                        self.pi_memo[("starv", id(pi), level, a, b)] = self.cnf.or_([prev] + hops)
        levels = max(1, len(self.domain).bit_length())
        return self.pi_memo[("starv", id(pi), levels, i, j)]

    def psi(self, psi: Psi, i: int) -> int:
        key = (id(psi), i)
        if key in self.psi_memo:
            return self.psi_memo[key]
        out = self._psi(psi, i)
        self.psi_memo[key] = out
        return out

    def _psi(self, psi: Psi, i: int) -> int:
        cnf = self.cnf
        d = len(self.domain)
        if isinstance(psi, PsiTop):
            return cnf.TRUE
        if isinstance(psi, PsiNot):
            return -self.psi(psi.inner, i)
        if isinstance(psi, PsiAnd):
            return cnf.and_([self.psi(psi.left, i), self.psi(psi.right, i)])
        if isinstance(psi, PsiEq):
            j = self.const_index.get(psi.constant)
            return cnf.TRUE if j == i else cnf.FALSE
        if isinstance(psi, PsiFilter):
            return self.filt(psi.atom, i)
        if isinstance(psi, PsiShape):
            return self.shape(psi.rel.name, i)
        if isinstance(psi, PsiExists):
            return cnf.or_([
                cnf.and_([self.pi(psi.path, i, j), self.psi(psi.body, j)]) for j in range(d)
            ])
        if isinstance(psi, PsiCount):
            lits = [cnf.and_([self.pi(psi.path, i, j), self.psi(psi.body, j)]) for j in range(d)]
            return cnf.at_least(psi.n, lits)
        if isinstance(psi, PsiDisjoint):
            return cnf.and_([
                -cnf.and_([self.pi(psi.path, i, j), self.rel_atom(psi.rel, i, j)])
                for j in range(d)
            ])
        if isinstance(psi, PsiEquals):
            return cnf.and_([
                cnf.iff(self.pi(psi.path, i, j), self.rel_atom(psi.rel, i, j)) for j in range(d)
            ])
        if isinstance(psi, PsiOrder):
            parts = []
            for j in range(d):
                for k in range(d):
                    pair = cnf.and_([self.pi(psi.path, i, j), self.rel_atom(psi.rel, i, k)])
                    parts.append(cnf.or_([-pair, self.order(psi.op, j, k)]))
            return cnf.and_(parts)
        raise DecisionError(f"cannot ground {type(psi).__name__}")

    def axiom(self, axiom: Axiom) -> int:
        cnf = self.cnf
        d = len(self.domain)
        if isinstance(axiom, TargetNodeAxiom):
            j = self.const_index.get(axiom.constant)
            return cnf.FALSE if j is None else self.shape(axiom.shape.name, j)
        if isinstance(axiom, TargetClassAxiom):
            j = self.const_index.get(axiom.cls)
            if j is None:
                return cnf.TRUE
            return cnf.and_([
                cnf.or_([-self.rel(RDF_TYPE, i, j), self.shape(axiom.shape.name, i)])
                for i in range(d)
            ])
        if isinstance(axiom, TargetSubjectsAxiom):
            return cnf.and_([
                cnf.or_([-self.rel(axiom.rel, i, j), self.shape(axiom.shape.name, i)])
                for i in range(d) for j in range(d)
            ])
        if isinstance(axiom, TargetObjectsAxiom):
            return cnf.and_([
                cnf.or_([-self.rel(axiom.rel, j, i), self.shape(axiom.shape.name, i)])
                for i in range(d) for j in range(d)
            ])
        if isinstance(axiom, ConstraintAxiom):
            return cnf.and_([
                cnf.iff(self.shape(axiom.shape.name, i), self.psi(axiom.body, i))
                for i in range(d)
            ])
        raise DecisionError("counting conjuncts must be asserted, not reified")


def _ground_problem(sentence: SclSentence, domain: list, const_index: dict,
                    negated_target_disjunction: Optional[tuple] = None) -> tuple:
    cnf = _Cnf()
    gr = _Grounder(cnf, domain, const_index)
    for axiom in sentence.axioms:
        if isinstance(axiom, AtMostAxiom):
            lits = [gr.psi(axiom.body, i) for i in range(len(domain))]
            cnf.assert_at_most(axiom.n, lits)
        else:
            cnf.add(gr.axiom(axiom))
    if negated_target_disjunction is not None:
        # at least one target axiom of the right-hand document must fail
        cnf.add(*(-gr.axiom(a) for a in negated_target_disjunction))
    return cnf, gr


def _model_to_witness(model: list, gr: _Grounder, domain: list) -> tuple:
    triples = []
    for (name, i, j), var in gr.rel_vars.items():
        if model[var]:
            triples.append(Triple(domain[i], name, domain[j]))
    g = Graph(triples)
    signs = {}
    shape_names = {name for (name, _i) in gr.shape_vars}
    for (name, i), var in gr.shape_vars.items():
        signs[(domain[i], name)] = bool(model[var])
    sigma = Assignment(nodes=domain, shapes=sorted(shape_names, key=lambda n: n.value),
                       signs=signs)
    return g, sigma


def scl_bounded_sat(sentence: SclSentence, budget: SearchBudget,
                    negated_target_disjunction: Optional[tuple] = None,
                    deadline: Optional[_Deadline] = None) -> SatResult:
    """Bounded uninterpreted-model search: ground over domains of increasing
    size (the constants plus up to max_fresh anonymous elements) and solve
    with DPLL.  Unknown when every size is unsatisfiable, since larger models
    may exist."""
    deadline = deadline or _Deadline(budget.max_seconds)
    consts = sorted(constants_of(sentence), key=term_key)
    for extra in range(0, budget.max_fresh + 1):
        if deadline.expired():
            return SatResult("unknown", reason="time budget exhausted")
        domain = consts + [Iri(f"urn:sclkit:model:e{i}") for i in range(extra)]
        if not domain:
            domain = [Iri("urn:sclkit:model:e0")]
        const_index = {c: i for i, c in enumerate(consts)}
        cnf, gr = _ground_problem(sentence, domain, const_index, negated_target_disjunction)
        model = _dpll(cnf.n_vars, cnf.clauses)
        if model is not None:
            g, sigma = _model_to_witness(model, gr, domain)
            return SatResult("sat", witness_graph=g, witness_assignment=sigma)
    return SatResult("unknown", reason="no model within budget")


# --- prover encodings ----------------------------------------------------------

_COUNT_CAP = 64


class _SymbolTable:
    def __init__(self, quote: bool):
        self.quote = quote
        self.names: dict = {}
        self.used: set = set()

    def of(self, kind: str, key, hint: str) -> str:
        full = (kind, key)
        if full in self.names:
            return self.names[full]
        if self.quote:
            name = f"|{kind}:{hint}|".replace("\\", "_")
        else:
            base = "".join(ch if ch.isalnum() else "_" for ch in hint).lower().strip("_") or "x"
            name = f"{kind}_{base}"
            k = 2
            while name in self.used:
                name = f"{kind}_{base}_{k}"
                k += 1
        self.used.add(name)
        self.names[full] = name
        return name


def _check_emittable(sentence: SclSentence) -> None:
    for axiom in sentence.axioms:
        if isinstance(axiom, (ConstraintAxiom, AtMostAxiom)):
            for node in walk_psi(axiom.body):
                if isinstance(node, (PsiExists, PsiCount, PsiDisjoint, PsiEquals, PsiOrder)):
                    from .scl import walk_pi

                    for step in walk_pi(node.path):
                        if isinstance(step, PiStar):
                            raise DecisionError(
                                "transitive closure is not first-order expressible; "
                                "refusing to emit"
                            )
                if isinstance(node, PsiCount) and node.n > _COUNT_CAP:
                    raise DecisionError(f"counting bound {node.n} exceeds the emission cap {_COUNT_CAP}")
        if isinstance(axiom, AtMostAxiom) and axiom.n > _COUNT_CAP:
            raise DecisionError(f"counting bound {axiom.n} exceeds the emission cap {_COUNT_CAP}")


class _SmtEmitter:
    def __init__(self, sentence: SclSentence):
        self.sentence = sentence
        self.sym = _SymbolTable(quote=True)
        self.fresh = 0

    def var(self) -> str:
        self.fresh += 1
        return f"x{self.fresh}"

    def const(self, t: Term) -> str:
        return self.sym.of("c", t, repr(t))

    def shape(self, name: Iri) -> str:
        return self.sym.of("sh", name, name.value)

    def filt(self, atom) -> str:
        return self.sym.of("f", atom, atom.describe())

    def rel(self, name: Term) -> str:
        return self.sym.of("r", name, name.value if isinstance(name, Iri) else repr(name))

    def rel_atom(self, rel: RelAtom, x: str, y: str) -> str:
        if rel.inverted:
            x, y = y, x
        return f"({self.rel(rel.name)} {x} {y})"

    def pi(self, pi: Pi, x: str, y: str) -> str:
        if isinstance(pi, RelStep):
            return self.rel_atom(pi.rel, x, y)
        if isinstance(pi, PiSeq):
            z = self.var()
            return f"(exists (({z} T)) (and {self.pi(pi.left, x, z)} {self.pi(pi.right, z, y)}))"
        if isinstance(pi, PiZeroOrOne):
            return f"(or (= {x} {y}) {self.pi(pi.inner, x, y)})"
        if isinstance(pi, PiAlt):
            return f"(or {self.pi(pi.left, x, y)} {self.pi(pi.right, x, y)})"
        raise DecisionError("transitive closure reached the emitter")

    def psi(self, psi: Psi, x: str) -> str:
        if isinstance(psi, PsiTop):
            return "true"
        if isinstance(psi, PsiNot):
            return f"(not {self.psi(psi.inner, x)})"
        if isinstance(psi, PsiAnd):
            return f"(and {self.psi(psi.left, x)} {self.psi(psi.right, x)})"
        if isinstance(psi, PsiEq):
            return f"(= {x} {self.const(psi.constant)})"
        if isinstance(psi, PsiFilter):
            return f"({self.filt(psi.atom)} {x})"
        if isinstance(psi, PsiShape):
            return f"({self.shape(psi.rel.name)} {x})"
        if isinstance(psi, PsiExists):
            y = self.var()
            return f"(exists (({y} T)) (and {self.pi(psi.path, x, y)} {self.psi(psi.body, y)}))"
        if isinstance(psi, PsiCount):
            ys = [self.var() for _ in range(psi.n)]
            binds = " ".join(f"({y} T)" for y in ys)
            distinct = f"(distinct {' '.join(ys)}) " if len(ys) > 1 else ""
            body = " ".join(f"(and {self.pi(psi.path, x, y)} {self.psi(psi.body, y)})" for y in ys)
            return f"(exists ({binds}) (and {distinct}{body}))"
        if isinstance(psi, PsiDisjoint):
            y = self.var()
            return (f"(not (exists (({y} T)) (and {self.pi(psi.path, x, y)} "
                    f"{self.rel_atom(psi.rel, x, y)})))")
        if isinstance(psi, PsiEquals):
            y = self.var()
            return (f"(forall (({y} T)) (= {self.pi(psi.path, x, y)} "
                    f"{self.rel_atom(psi.rel, x, y)}))")
        y, z = self.var(), self.var()
        cmp_sym = {"<": "lt", "<=": "le", ">": "lt", ">=": "le"}[psi.op]
        a, b = (y, z) if psi.op in ("<", "<=") else (z, y)
        return (f"(forall (({y} T) ({z} T)) (=> (and {self.pi(psi.path, x, y)} "
                f"{self.rel_atom(psi.rel, x, z)}) ({cmp_sym} {a} {b})))")

    def axiom(self, axiom: Axiom) -> str:
        if isinstance(axiom, TargetNodeAxiom):
            return f"({self.shape(axiom.shape.name)} {self.const(axiom.constant)})"
        if isinstance(axiom, TargetClassAxiom):
            x = self.var()
            return (f"(forall (({x} T)) (=> ({self.rel(RDF_TYPE)} {x} {self.const(axiom.cls)}) "
                    f"({self.shape(axiom.shape.name)} {x})))")
        if isinstance(axiom, TargetSubjectsAxiom):
            x, y = self.var(), self.var()
            return (f"(forall (({x} T) ({y} T)) (=> ({self.rel(axiom.rel)} {x} {y}) "
                    f"({self.shape(axiom.shape.name)} {x})))")
        if isinstance(axiom, TargetObjectsAxiom):
            x, y = self.var(), self.var()
            return (f"(forall (({x} T) ({y} T)) (=> ({self.rel(axiom.rel)} {y} {x}) "
                    f"({self.shape(axiom.shape.name)} {x})))")
        if isinstance(axiom, ConstraintAxiom):
            x = self.var()
            return (f"(forall (({x} T)) (= ({self.shape(axiom.shape.name)} {x}) "
                    f"{self.psi(axiom.body, x)}))")
        ys = [self.var() for _ in range(axiom.n + 1)]
        binds = " ".join(f"({y} T)" for y in ys)
        bodies = " ".join(self.psi(axiom.body, y) for y in ys)
        pairs = " ".join(f"(= {a} {b})" for a, b in itertools.combinations(ys, 2))
        return f"(forall ({binds}) (=> (and {bodies}) (or {pairs})))"


def emit_smtlib(phi: SclSentence, axiomatisation: Optional[SclSentence] = None,
                negated_target_disjunction: Optional[tuple] = None) -> str:
    """SMT-LIB 2 encoding over one uninterpreted sort, ready for check-sat.

    `negated_target_disjunction` adds the containment-refutation disjunct:
    at least one of the given target axioms must fail.
    """
    sentence = phi.conjoin(axiomatisation) if axiomatisation is not None else phi
    _check_emittable(sentence)
    em = _SmtEmitter(sentence)
    asserts = [em.axiom(a) for a in sentence.axioms]
    if negated_target_disjunction is not None:
        negated = " ".join(f"(not {em.axiom(a)})" for a in negated_target_disjunction)
        asserts.append(f"(or {negated})" if negated else "false")
    lines = ["(set-logic UF)", "(declare-sort T 0)"]
    consts = [em.const(c) for c in sorted(constants_of(sentence), key=term_key)]
    decls = []
    for (kind, _key), name in sorted(em.sym.names.items(), key=lambda kv: kv[1]):
        if kind == "c":
            decls.append(f"(declare-fun {name} () T)")
        elif kind in ("sh", "f"):
            decls.append(f"(declare-fun {name} (T) Bool)")
        else:
            decls.append(f"(declare-fun {name} (T T) Bool)")
    if any(isinstance(n, PsiOrder) for a in sentence.axioms if hasattr(a, "body")
           for n in walk_psi(a.body)):
        decls.append("(declare-fun lt (T T) Bool)")
        decls.append("(declare-fun le (T T) Bool)")
    lines.extend(decls)
    if len(consts) > 1:
        lines.append(f"(assert (distinct {' '.join(consts)}))")
    lines.extend(f"(assert {a})" for a in asserts)
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


class _TptpEmitter(_SmtEmitter):
    def __init__(self, sentence: SclSentence):
        super().__init__(sentence)
        self.sym = _SymbolTable(quote=False)

    def var(self) -> str:
        self.fresh += 1
        return f"X{self.fresh}"

    def rel_atom(self, rel: RelAtom, x: str, y: str) -> str:
        if rel.inverted:
            x, y = y, x
        return f"{self.rel(rel.name)}({x},{y})"

    def pi(self, pi: Pi, x: str, y: str) -> str:
        if isinstance(pi, RelStep):
            return self.rel_atom(pi.rel, x, y)
        if isinstance(pi, PiSeq):
            z = self.var()
            return f"(? [{z}] : ({self.pi(pi.left, x, z)} & {self.pi(pi.right, z, y)}))"
        if isinstance(pi, PiZeroOrOne):
            return f"(({x} = {y}) | {self.pi(pi.inner, x, y)})"
        if isinstance(pi, PiAlt):
            return f"({self.pi(pi.left, x, y)} | {self.pi(pi.right, x, y)})"
        raise DecisionError("transitive closure reached the emitter")

    def psi(self, psi: Psi, x: str) -> str:
        if isinstance(psi, PsiTop):
            return "$true"
        if isinstance(psi, PsiNot):
            return f"~({self.psi(psi.inner, x)})"
        if isinstance(psi, PsiAnd):
            return f"({self.psi(psi.left, x)} & {self.psi(psi.right, x)})"
        if isinstance(psi, PsiEq):
            return f"({x} = {self.const(psi.constant)})"
        if isinstance(psi, PsiFilter):
            return f"{self.filt(psi.atom)}({x})"
        if isinstance(psi, PsiShape):
            return f"{self.shape(psi.rel.name)}({x})"
        if isinstance(psi, PsiExists):
            y = self.var()
            return f"(? [{y}] : ({self.pi(psi.path, x, y)} & {self.psi(psi.body, y)}))"
        if isinstance(psi, PsiCount):
            ys = [self.var() for _ in range(psi.n)]
            distinct = " & ".join(f"({a} != {b})" for a, b in itertools.combinations(ys, 2))
            body = " & ".join(f"({self.pi(psi.path, x, y)} & {self.psi(psi.body, y)})" for y in ys)
            inner = f"{distinct} & {body}" if distinct else body
            return f"(? [{','.join(ys)}] : ({inner}))"
        if isinstance(psi, PsiDisjoint):
            y = self.var()
            return f"~(? [{y}] : ({self.pi(psi.path, x, y)} & {self.rel_atom(psi.rel, x, y)}))"
        if isinstance(psi, PsiEquals):
            y = self.var()
            return f"(! [{y}] : ({self.pi(psi.path, x, y)} <=> {self.rel_atom(psi.rel, x, y)}))"
        y, z = self.var(), self.var()
        cmp_sym = {"<": "lt", "<=": "le", ">": "lt", ">=": "le"}[psi.op]
        a, b = (y, z) if psi.op in ("<", "<=") else (z, y)
        return (f"(! [{y},{z}] : (({self.pi(psi.path, x, y)} & {self.rel_atom(psi.rel, x, z)}) "
                f"=> {cmp_sym}({a},{b})))")

    def axiom(self, axiom: Axiom) -> str:
        if isinstance(axiom, TargetNodeAxiom):
            return f"{self.shape(axiom.shape.name)}({self.const(axiom.constant)})"
        if isinstance(axiom, TargetClassAxiom):
            x = self.var()
            return (f"(! [{x}] : ({self.rel(RDF_TYPE)}({x},{self.const(axiom.cls)}) "
                    f"=> {self.shape(axiom.shape.name)}({x})))")
        if isinstance(axiom, TargetSubjectsAxiom):
            x, y = self.var(), self.var()
            return (f"(! [{x},{y}] : ({self.rel(axiom.rel)}({x},{y}) "
                    f"=> {self.shape(axiom.shape.name)}({x})))")
        if isinstance(axiom, TargetObjectsAxiom):
            x, y = self.var(), self.var()
            return (f"(! [{x},{y}] : ({self.rel(axiom.rel)}({y},{x}) "
                    f"=> {self.shape(axiom.shape.name)}({x})))")
        if isinstance(axiom, ConstraintAxiom):
            x = self.var()
            return (f"(! [{x}] : ({self.shape(axiom.shape.name)}({x}) "
                    f"<=> {self.psi(axiom.body, x)}))")
        ys = [self.var() for _ in range(axiom.n + 1)]
        bodies = " & ".join(self.psi(axiom.body, y) for y in ys)
        pairs = " | ".join(f"({a} = {b})" for a, b in itertools.combinations(ys, 2))
        return f"(! [{','.join(ys)}] : (({bodies}) => ({pairs})))"


def emit_tptp(phi: SclSentence, axiomatisation: Optional[SclSentence] = None,
              negated_target_disjunction: Optional[tuple] = None) -> str:
    """TPTP FOF encoding of the sentence (and optional filter axiomatisation)."""
    sentence = phi.conjoin(axiomatisation) if axiomatisation is not None else phi
    _check_emittable(sentence)
    em = _TptpEmitter(sentence)
    formulas = [em.axiom(a) for a in sentence.axioms]
    if negated_target_disjunction is not None:
        negated = " | ".join(f"~({em.axiom(a)})" for a in negated_target_disjunction)
        formulas.append(f"({negated})" if negated else "$false")
    lines = ["% shapes-constraint-logic sentence in FOF"]
    consts = [em.const(c) for c in sorted(constants_of(sentence), key=term_key)]
    if len(consts) > 1:
        distinct = " & ".join(f"({a} != {b})" for a, b in itertools.combinations(consts, 2))
        lines.append(f"fof(distinct_constants, axiom, ({distinct})).")
    for i, f in enumerate(formulas):
        lines.append(f"fof(ax{i}, axiom, {f}).")
    return "\n".join(lines) + "\n"
