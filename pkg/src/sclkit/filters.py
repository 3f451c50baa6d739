"""Canonical filter semantics, filter combinations, the exact-cardinality
function over the RDF-term domain, and the naive and bounded axiomatisations
that let uninterpreted models stand in for canonical ones.

The canonical domain: IRIs and blank nodes are unconstrained string-named
spaces; literals are (lexical form, datatype[, language tag]) with exact
value spaces for xsd:integer / xsd:int (the mathematical integers),
xsd:decimal (finite-fraction rationals), xsd:boolean, xsd:string, and
rdf:langString; every other datatype is uninterpreted.  Order comparisons
live inside the comparison-type partition (numeric, string, boolean);
comparisons across partitions are false.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .automata import ALPHABET_SIZE, UnsupportedPattern, compile_pattern, length_window_dfa
from .rdf import (
    Iri,
    Blank,
    Literal,
    RDF_LANGSTRING,
    Term,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INT,
    XSD_INTEGER,
    XSD_STRING,
    term_key,
)

HUGE_THRESHOLD = 2 ** 20
WITNESS_LIMIT = 256
_ENUM_LIMIT = 4096

INTEGER_DATATYPES = (XSD_INTEGER, XSD_INT)
NUMERIC_DATATYPES = INTEGER_DATATYPES + (XSD_DECIMAL,)


class FilterAxiomError(ValueError):
    pass


# --- filter atoms -------------------------------------------------------------

@dataclass(frozen=True)
class KindAtom:
    kind: str  # "IRI" | "Literal" | "BlankNode"

    def describe(self) -> str:
        return f"F_is{self.kind}"


@dataclass(frozen=True)
class DatatypeAtom:
    datatype: Iri

    def describe(self) -> str:
        return f"F_dt=<{self.datatype.value}>"


@dataclass(frozen=True)
class LanguageTagAtom:
    tag: str

    def describe(self) -> str:
        return f"F_lang={self.tag}"


@dataclass(frozen=True)
class MinLengthAtom:
    length: int

    def describe(self) -> str:
        return f"F_len≥{self.length}"


@dataclass(frozen=True)
class MaxLengthAtom:
    length: int

    def describe(self) -> str:
        return f"F_len≤{self.length}"


@dataclass(frozen=True)
class PatternAtom:
    regex: str

    def describe(self) -> str:
        return f"F_re({self.regex})"


@dataclass(frozen=True)
class OrderCmp:
    op: str  # "<" | "<=" | ">" | ">="
    limit: Literal

    def describe(self) -> str:
        return f"F{self.op}{self.limit.lexical}"


FilterAtom = Union[KindAtom, DatatypeAtom, LanguageTagAtom, MinLengthAtom,
                   MaxLengthAtom, PatternAtom, OrderCmp]


def string_repr(t: Term) -> Optional[str]:
    """The string a length/pattern filter inspects; none for blank nodes."""
    if isinstance(t, Iri):
        return t.value
    if isinstance(t, Literal):
        return t.lexical
    return None


def comparison_value(t: Term):
    """(partition, value) of a term under the order partition, or None."""
    if not isinstance(t, Literal):
        return None
    if t.datatype in INTEGER_DATATYPES:
        try:
            return ("num", Fraction(int(t.lexical)))
        except ValueError:
            return None
    if t.datatype == XSD_DECIMAL:
        try:
            return ("num", Fraction(t.lexical))
        except ValueError:
            return None
    if t.datatype == XSD_BOOLEAN:
        if t.lexical in ("true", "1"):
            return ("bool", 1)
        if t.lexical in ("false", "0"):
            return ("bool", 0)
        return None
    if t.datatype == XSD_STRING:
        return ("str", t.lexical)
    return None


_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_filter(atom: FilterAtom, t: Term) -> bool:
    """Canonical truth value of a monadic filter on a term."""
    if isinstance(atom, KindAtom):
        return {"IRI": Iri, "Literal": Literal, "BlankNode": Blank}[atom.kind] is type(t)
    if isinstance(atom, DatatypeAtom):
        return isinstance(t, Literal) and t.datatype == atom.datatype
    if isinstance(atom, LanguageTagAtom):
        return isinstance(t, Literal) and t.language == atom.tag.lower()
    if isinstance(atom, MinLengthAtom):
        s = string_repr(t)
        return s is not None and len(s) >= atom.length
    if isinstance(atom, MaxLengthAtom):
        s = string_repr(t)
        return s is not None and len(s) <= atom.length
    if isinstance(atom, PatternAtom):
        s = string_repr(t)
        return s is not None and re.search(atom.regex, s) is not None
    tv = comparison_value(t)
    lv = comparison_value(atom.limit)
    if tv is None or lv is None or tv[0] != lv[0]:
        return False
    return _OPS[atom.op](tv[1], lv[1])


# --- filter combinations --------------------------------------------------------

@dataclass(frozen=True)
class Eq:
    constant: Term


@dataclass(frozen=True)
class NotEq:
    constant: Term


@dataclass(frozen=True)
class Nu:
    """The "none of the known constants" shape atom."""


@dataclass(frozen=True)
class Pos:
    atom: FilterAtom


@dataclass(frozen=True)
class Neg:
    atom: FilterAtom


Conjunct = Union[Eq, NotEq, Nu, Pos, Neg]


def _atom_type(atom: FilterAtom) -> str:
    if isinstance(atom, KindAtom):
        return "nodekind"
    if isinstance(atom, DatatypeAtom):
        return "datatype"
    if isinstance(atom, LanguageTagAtom):
        return "language"
    if isinstance(atom, (MinLengthAtom, MaxLengthAtom)):
        return "length"
    if isinstance(atom, PatternAtom):
        return "pattern"
    return "order"


def conjunct_type(c: Conjunct) -> str:
    if isinstance(c, (Eq, NotEq, Nu)):
        return "equality"
    return _atom_type(c.atom)


# per-type maximum non-redundant capacity; pattern has none
MNRC_CAPS = {"datatype": 2, "language": 2, "order": 2, "length": 2, "nodekind": 3, "equality": 1}


def _describe_conjunct(c: Conjunct) -> str:
    if isinstance(c, Eq):
        return f"x={c.constant!r}"
    if isinstance(c, NotEq):
        return f"x≠{c.constant!r}"
    if isinstance(c, Nu):
        return "ν(x)"
    if isinstance(c, Pos):
        return f"{c.atom.describe()}(x)"
    return f"¬{c.atom.describe()}(x)"


def _conjunct_key(c: Conjunct) -> tuple:
    if isinstance(c, Eq):
        return (0, term_key(c.constant))
    if isinstance(c, NotEq):
        return (1, term_key(c.constant))
    if isinstance(c, Nu):
        return (2, ())
    sign = 3 if isinstance(c, Pos) else 4
    return (sign, (c.atom.describe(),))


@dataclass(frozen=True)
class FilterCombination:
    conjuncts: tuple

    @staticmethod
    def of(conjuncts: Iterable[Conjunct]) -> "FilterCombination":
        return FilterCombination(tuple(sorted(set(conjuncts), key=_conjunct_key)))

    def without(self, c: Conjunct) -> "FilterCombination":
        return FilterCombination(tuple(x for x in self.conjuncts if x != c))

    def type_counts(self) -> dict:
        counts: dict = {}
        for c in self.conjuncts:
            t = conjunct_type(c)
            counts[t] = counts.get(t, 0) + 1
        return counts

    def describe(self) -> str:
        return " ∧ ".join(_describe_conjunct(c) for c in self.conjuncts) or "⊤"


# --- cardinality bounds ----------------------------------------------------------

@dataclass(frozen=True)
class Finite:
    n: int


@dataclass(frozen=True)
class Infinite:
    pass


@dataclass(frozen=True)
class Huge:
    """Finite, but above the counting threshold."""


CardinalityBound = Union[Finite, Infinite, Huge]


def bound_le(a: CardinalityBound, b: CardinalityBound) -> bool:
    rank = {Finite: 0, Huge: 1, Infinite: 2}
    if isinstance(a, Finite) and isinstance(b, Finite):
        return a.n <= b.n
    return rank[type(a)] <= rank[type(b)]


class _Count:
    """Exact count plus (optionally) the witness terms, with saturation."""

    __slots__ = ("kind", "n", "witnesses")

    def __init__(self, kind: str, n: int = 0, witnesses=None):
        self.kind = kind  # "finite" | "infinite"
        self.n = n
        self.witnesses = witnesses  # list[Term] | None when not enumerable

    @staticmethod
    def zero() -> "_Count":
        return _Count("finite", 0, [])

    @staticmethod
    def infinite() -> "_Count":
        return _Count("infinite")

    @staticmethod
    def exactly(witnesses: list) -> "_Count":
        return _Count("finite", len(witnesses), list(witnesses))

    @staticmethod
    def counted(n: int) -> "_Count":
        return _Count("finite", n, None)

    def add(self, other: "_Count") -> "_Count":
        if self.kind == "infinite" or other.kind == "infinite":
            return _Count.infinite()
        wit = None
        if self.witnesses is not None and other.witnesses is not None:
            wit = self.witnesses + other.witnesses
            if len(wit) > _ENUM_LIMIT:
                wit = None
        return _Count("finite", self.n + other.n, wit)


def _decimal_canonical(v: Fraction) -> Optional[str]:
    """Minimal decimal string of a fraction, None when not a finite decimal."""
    den = v.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    scaled = abs(int(v * 10 ** digits))
    s = str(scaled).rjust(digits + 1, "0")
    sign = "-" if v < 0 else ""
    if digits == 0:
        return sign + s
    head, tail = s[:-digits], s[-digits:]
    tail = tail.rstrip("0")
    return sign + head + ("." + tail if tail else "")


_INT_CANONICAL = "^(0|-?[1-9][0-9]*)$"
_DEC_CANONICAL = "^(0|-?[1-9][0-9]*)(\\.[0-9]*[1-9])?$"


@dataclass
class _Atoms:
    """Structured view of the positive/negative filter atoms of a combination."""

    pos_kinds: list
    neg_kinds: list
    pos_dts: list
    neg_dts: list
    pos_tags: list
    neg_tags: list
    min_len: int
    max_len: Optional[int]
    orders: list  # (op, limit, positive)
    pos_patterns: list
    neg_patterns: list
    all_conjuncts: list

    @staticmethod
    def of(pos: list, neg: list) -> "_Atoms":
        a = _Atoms([], [], [], [], [], [], 0, None, [], [], [],
                   [Pos(x) for x in pos] + [Neg(x) for x in neg])
        for atom in pos:
            if isinstance(atom, KindAtom):
                a.pos_kinds.append(atom.kind)
            elif isinstance(atom, DatatypeAtom):
                a.pos_dts.append(atom.datatype)
            elif isinstance(atom, LanguageTagAtom):
                a.pos_tags.append(atom.tag.lower())
            elif isinstance(atom, MinLengthAtom):
                a.min_len = max(a.min_len, atom.length)
            elif isinstance(atom, MaxLengthAtom):
                a.max_len = atom.length if a.max_len is None else min(a.max_len, atom.length)
            elif isinstance(atom, PatternAtom):
                a.pos_patterns.append(atom.regex)
            else:
                a.orders.append((atom.op, atom.limit, True))
        for atom in neg:
            if isinstance(atom, KindAtom):
                a.neg_kinds.append(atom.kind)
            elif isinstance(atom, DatatypeAtom):
                a.neg_dts.append(atom.datatype)
            elif isinstance(atom, LanguageTagAtom):
                a.neg_tags.append(atom.tag.lower())
            elif isinstance(atom, MinLengthAtom):
                # not(length >= n): length <= n - 1
                a.max_len = atom.length - 1 if a.max_len is None else min(a.max_len, atom.length - 1)
            elif isinstance(atom, MaxLengthAtom):
                a.min_len = max(a.min_len, atom.length + 1)
            elif isinstance(atom, PatternAtom):
                a.neg_patterns.append(atom.regex)
            else:
                a.orders.append((atom.op, atom.limit, False))
        return a

    def kind_allows(self, kind: str) -> bool:
        if any(k != kind for k in self.pos_kinds):
            return False
        return kind not in self.neg_kinds

    def has_patterns(self) -> bool:
        return bool(self.pos_patterns or self.neg_patterns)

    def has_positive_order(self) -> bool:
        return any(positive for _, _, positive in self.orders)


def _satisfies(term: Term, conjuncts: list) -> bool:
    for c in conjuncts:
        if isinstance(c, Pos):
            if not eval_filter(c.atom, term):
                return False
        elif isinstance(c, Neg):
            if eval_filter(c.atom, term):
                return False
    return True


def _candidates(terms: Iterable[Term], conjuncts: list) -> _Count:
    return _Count.exactly([t for t in terms if _satisfies(t, conjuncts)])


def _closed_form_lengths(min_len: int, max_len: Optional[int]) -> _Count:
    if max_len is not None and max_len < min_len:
        return _Count.zero()
    if max_len is None:
        return _Count.infinite()
    total = sum(ALPHABET_SIZE ** l for l in range(min_len, max_len + 1))
    if total <= 1:
        return _Count.exactly([""] * total)
    return _Count.counted(total)


def _count_forms(atoms: _Atoms) -> _Count:
    """Strings satisfying the length window and the pattern atoms."""
    if atoms.max_len is not None and atoms.max_len < atoms.min_len:
        return _Count.zero()
    if not atoms.has_patterns():
        return _closed_form_lengths(atoms.min_len, atoms.max_len)
    dfa = length_window_dfa(atoms.min_len, atoms.max_len)
    for p in atoms.pos_patterns:
        dfa = dfa.intersect(compile_pattern(p))
    for p in atoms.neg_patterns:
        dfa = dfa.intersect(compile_pattern(p).complement())
    if dfa.is_empty():
        return _Count.zero()
    n = dfa.count_words(HUGE_THRESHOLD)
    if n is None:
        return _Count.counted(HUGE_THRESHOLD + 1) if dfa.is_finite() else _Count.infinite()
    if n <= _ENUM_LIMIT:
        return _Count.exactly(dfa.enumerate_words(n))
    return _Count.counted(n)


def _pattern_value_forms(atoms: _Atoms, canonical: str) -> _Count:
    """Canonical value strings compatible with patterns and length window."""
    dfa = compile_pattern(canonical).intersect(length_window_dfa(atoms.min_len, atoms.max_len))
    for p in atoms.pos_patterns:
        dfa = dfa.intersect(compile_pattern(p))
    for p in atoms.neg_patterns:
        dfa = dfa.intersect(compile_pattern(p).complement())
    if dfa.is_empty():
        return _Count.zero()
    n = dfa.count_words(HUGE_THRESHOLD)
    if n is None:
        return _Count.counted(HUGE_THRESHOLD + 1) if dfa.is_finite() else _Count.infinite()
    if n <= _ENUM_LIMIT:
        return _Count.exactly(dfa.enumerate_words(n))
    return _Count.counted(n)


class _Interval:
    """A one-dimensional interval with open/closed ends over a total order."""

    def __init__(self):
        self.lo = None
        self.lo_strict = False
        self.hi = None
        self.hi_strict = False
        self.empty = False

    def add(self, op: str, value, positive: bool) -> None:
        # a negated comparison flips into the complementary bound
        if not positive:
            op = {">": "<=", ">=": "<", "<": ">=", "<=": ">"}[op]
        if op in (">", ">="):
            strict = op == ">"
            if self.lo is None or value > self.lo or (value == self.lo and strict and not self.lo_strict):
                self.lo, self.lo_strict = value, strict
        else:
            strict = op == "<"
            if self.hi is None or value < self.hi or (value == self.hi and strict and not self.hi_strict):
                self.hi, self.hi_strict = value, strict

    def finish(self) -> "_Interval":
        if self.lo is not None and self.hi is not None:
            if self.lo > self.hi or (self.lo == self.hi and (self.lo_strict or self.hi_strict)):
                self.empty = True
        return self

    def is_unconstrained(self) -> bool:
        return self.lo is None and self.hi is None

    def contains(self, v) -> bool:
        if self.lo is not None and (v < self.lo or (v == self.lo and self.lo_strict)):
            return False
        if self.hi is not None and (v > self.hi or (v == self.hi and self.hi_strict)):
            return False
        return True


def _order_interval(atoms: _Atoms, partition: str) -> Optional[_Interval]:
    """Interval over one partition; None when a positive atom cannot hold."""
    iv = _Interval()
    for op, limit, positive in atoms.orders:
        lv = comparison_value(limit)
        if lv is None or lv[0] != partition:
            if positive:
                return None  # cross-partition positive comparison never holds
            continue  # negation of a false comparison constrains nothing
        iv.add(op, lv[1], positive)
    return iv.finish()


def _int_lower(iv: _Interval) -> Optional[int]:
    if iv.lo is None:
        return None
    if iv.lo.denominator == 1:
        return int(iv.lo) + (1 if iv.lo_strict else 0)
    return math.floor(iv.lo) + 1


def _int_upper(iv: _Interval) -> Optional[int]:
    if iv.hi is None:
        return None
    if iv.hi.denominator == 1:
        return int(iv.hi) - (1 if iv.hi_strict else 0)
    return math.floor(iv.hi)


# --- per-branch counting ---------------------------------------------------------

def _blank_branch(atoms: _Atoms) -> _Count:
    """All blank nodes behave identically under every filter."""
    if atoms.kind_allows("BlankNode") and _satisfies(Blank("probe"), atoms.all_conjuncts):
        return _Count.infinite()
    return _Count.zero()


def _iri_branch(atoms: _Atoms) -> _Count:
    if not atoms.kind_allows("IRI"):
        return _Count.zero()
    if atoms.pos_dts or atoms.pos_tags or atoms.has_positive_order():
        return _Count.zero()
    count = _count_forms(atoms)
    if count.witnesses is not None:
        return _Count.exactly([Iri(w) for w in count.witnesses])
    return count


def _digit_length_count(atoms: _Atoms, lo: Optional[int], hi: Optional[int], dt: Iri) -> _Count:
    """Integers within the interval whose canonical form fits the length
    window, counted per digit length in closed form."""
    max_len = atoms.max_len
    total = 0
    witnesses: Optional[list] = []
    for length in range(max(1, atoms.min_len), (max_len or 0) + 1):
        ranges = [(0, 9)] if length == 1 else [(10 ** (length - 1), 10 ** length - 1)]
        neg_digits = length - 1  # a sign character occupies one slot
        if neg_digits == 1:
            ranges.append((-9, -1))
        elif neg_digits > 1:
            ranges.append((-(10 ** neg_digits - 1), -(10 ** (neg_digits - 1))))
        for a, b in ranges:
            if lo is not None:
                a = max(a, lo)
            if hi is not None:
                b = min(b, hi)
            if b < a:
                continue
            width = b - a + 1
            if witnesses is not None and total + width <= _ENUM_LIMIT:
                witnesses.extend(Literal(str(v), dt) for v in range(a, b + 1))
            else:
                witnesses = None
            total += width
    if witnesses is not None:
        return _Count.exactly(witnesses)
    return _Count.counted(total)


def _integer_branch(atoms: _Atoms, dt: Iri) -> _Count:
    iv = _order_interval(atoms, "num")
    if iv is None or iv.empty:
        return _Count.zero()
    lo, hi = _int_lower(iv), _int_upper(iv)

    def lit(v: int) -> Literal:
        return Literal(str(v), dt)

    if lo is not None and hi is not None:
        if hi < lo:
            return _Count.zero()
        width = hi - lo + 1
        if width <= _ENUM_LIMIT:
            return _candidates((lit(v) for v in range(lo, hi + 1)), atoms.all_conjuncts)
        if atoms.has_patterns():
            forms = _pattern_value_forms(atoms, _INT_CANONICAL)
            if forms.witnesses is not None:
                return _candidates((lit(int(w)) for w in forms.witnesses
                                    if lo <= int(w) <= hi), atoms.all_conjuncts)
            return _Count.counted(HUGE_THRESHOLD + 1)  # finite via the interval
        if atoms.max_len is not None or atoms.min_len > 0:
            return _digit_length_count(atoms, lo, hi, dt)
        return _Count.counted(width)

    # at least one open side
    if atoms.has_patterns():
        forms = _pattern_value_forms(atoms, _INT_CANONICAL)
        if forms.witnesses is not None:
            kept = (lit(int(w)) for w in forms.witnesses
                    if (lo is None or int(w) >= lo) and (hi is None or int(w) <= hi))
            return _candidates(kept, atoms.all_conjuncts)
        if forms.kind == "infinite":
            return _Count.infinite()
        # finitely many matching values, interval membership unresolved
        return forms if iv.is_unconstrained() else _Count.counted(HUGE_THRESHOLD + 1)
    if atoms.max_len is not None:
        return _digit_length_count(atoms, lo, hi, dt)
    return _Count.infinite()


def _decimal_branch(atoms: _Atoms) -> _Count:
    iv = _order_interval(atoms, "num")
    if iv is None or iv.empty:
        return _Count.zero()
    if iv.lo is not None and iv.lo == iv.hi:
        form = _decimal_canonical(iv.lo)
        if form is None:
            return _Count.zero()
        return _candidates([Literal(form, XSD_DECIMAL)], atoms.all_conjuncts)
    if atoms.has_patterns():
        forms = _pattern_value_forms(atoms, _DEC_CANONICAL)
        if forms.witnesses is not None:
            kept = (Literal(w, XSD_DECIMAL) for w in forms.witnesses if iv.contains(Fraction(w)))
            return _candidates(kept, atoms.all_conjuncts)
        if forms.kind == "finite":
            return _Count.counted(HUGE_THRESHOLD + 1)
        # infinitely many matching forms; a non-degenerate interval keeps
        # infinitely many of them only in general position (over-approximated)
        return _Count.infinite()
    if atoms.max_len is not None:
        return _Count.counted(HUGE_THRESHOLD + 1)  # finitely many short forms
    return _Count.infinite()


def _boolean_branch(atoms: _Atoms) -> _Count:
    return _candidates(
        [Literal("false", XSD_BOOLEAN), Literal("true", XSD_BOOLEAN)], atoms.all_conjuncts
    )


def _string_interval_candidates(iv: _Interval) -> Optional[list]:
    """Finite member list of a string interval, or None when infinite."""
    if iv.empty:
        return []
    if iv.lo is not None and iv.hi is not None:
        if iv.lo == iv.hi:
            return [] if (iv.lo_strict or iv.hi_strict) else [iv.lo]
        # (w, w + "\x00"*k) contains exactly the null-padded extensions of w
        if iv.hi.startswith(iv.lo) and set(iv.hi[len(iv.lo):]) == {"\x00"}:
            pad = len(iv.hi) - len(iv.lo)
            out = [iv.lo + "\x00" * i for i in range(0, pad + 1)]
            if iv.lo_strict:
                out = out[1:]
            if iv.hi_strict:
                out = out[:-1]
            return out
    return None


def _string_branch(atoms: _Atoms) -> _Count:
    iv = _order_interval(atoms, "str")
    if iv is None or iv.empty:
        return _Count.zero()
    members = _string_interval_candidates(iv)
    if members is not None:
        return _candidates((Literal(w, XSD_STRING) for w in members), atoms.all_conjuncts)
    count = _count_forms(atoms)
    if count.kind == "infinite":
        # a non-degenerate string interval always keeps infinitely many
        # unconstrained forms (extend below the upper bound)
        return _Count.infinite()
    if count.witnesses is not None:
        return _Count.exactly([Literal(w, XSD_STRING) for w in count.witnesses if iv.contains(w)])
    if iv.is_unconstrained():
        return count
    return _Count.counted(HUGE_THRESHOLD + 1)  # finite via the length bound


def _langstring_branch(atoms: _Atoms, tag: Optional[str]) -> _Count:
    if atoms.has_positive_order():
        return _Count.zero()
    if tag is None:
        # tags range over an infinite space; negated tags remove finitely many
        count = _count_forms(atoms)
        if count.kind == "finite" and count.n == 0:
            return _Count.zero()
        return _Count.infinite()
    if tag in atoms.neg_tags:
        return _Count.zero()
    count = _count_forms(atoms)
    if count.witnesses is not None:
        return _Count.exactly([Literal(w, language=tag) for w in count.witnesses])
    return count


def _plain_datatype_branch(atoms: _Atoms, dt: Iri) -> _Count:
    """A datatype with an uninterpreted value space: any lexical form."""
    if atoms.has_positive_order() or atoms.pos_tags:
        return _Count.zero()
    count = _count_forms(atoms)
    if count.witnesses is not None:
        return _Count.exactly([Literal(w, dt) for w in count.witnesses])
    return count


def _fresh_datatype_branch(atoms: _Atoms) -> _Count:
    """Literals of the infinitely many datatypes nothing interprets."""
    if atoms.has_positive_order() or atoms.pos_tags:
        return _Count.zero()
    count = _count_forms(atoms)
    if count.kind == "finite" and count.n == 0:
        return _Count.zero()
    return _Count.infinite()


def _literal_branches(atoms: _Atoms) -> _Count:
    if not atoms.kind_allows("Literal"):
        return _Count.zero()
    if len(set(atoms.pos_tags)) > 1 or len(set(atoms.pos_dts)) > 1:
        return _Count.zero()
    if atoms.pos_tags:
        if atoms.pos_dts and atoms.pos_dts[0] != RDF_LANGSTRING:
            return _Count.zero()
        if RDF_LANGSTRING in atoms.neg_dts:
            return _Count.zero()
        return _langstring_branch(atoms, atoms.pos_tags[0])
    if atoms.pos_dts:
        dt = atoms.pos_dts[0]
        if dt in atoms.neg_dts:
            return _Count.zero()
        if dt in INTEGER_DATATYPES:
            return _integer_branch(atoms, dt)
        if dt == XSD_DECIMAL:
            return _decimal_branch(atoms)
        if dt == XSD_BOOLEAN:
            return _boolean_branch(atoms)
        if dt == XSD_STRING:
            return _string_branch(atoms)
        if dt == RDF_LANGSTRING:
            return _langstring_branch(atoms, None)
        return _plain_datatype_branch(atoms, dt)
    # no positive datatype: sum the interpreted universe, the open-tag
    # space, and the fresh uninterpreted datatypes
    total = _Count.zero()
    for dt in INTEGER_DATATYPES:
        if dt not in atoms.neg_dts:
            total = total.add(_integer_branch(atoms, dt))
    if XSD_DECIMAL not in atoms.neg_dts:
        total = total.add(_decimal_branch(atoms))
    if XSD_BOOLEAN not in atoms.neg_dts:
        total = total.add(_boolean_branch(atoms))
    if XSD_STRING not in atoms.neg_dts:
        total = total.add(_string_branch(atoms))
    if RDF_LANGSTRING not in atoms.neg_dts:
        total = total.add(_langstring_branch(atoms, None))
    return total.add(_fresh_datatype_branch(atoms))


def _combo_count(combo: FilterCombination, known_constants: frozenset) -> _Count:
    eqs = [c.constant for c in combo.conjuncts if isinstance(c, Eq)]
    noteqs = {c.constant for c in combo.conjuncts if isinstance(c, NotEq)}
    has_nu = any(isinstance(c, Nu) for c in combo.conjuncts)
    filter_conjuncts = [c for c in combo.conjuncts if isinstance(c, (Pos, Neg))]

    if eqs:
        if len(set(eqs)) > 1:
            return _Count.zero()
        c = eqs[0]
        if c in noteqs or (has_nu and c in known_constants):
            return _Count.zero()
        return _candidates([c], filter_conjuncts)

    excluded = set(noteqs)
    if has_nu:
        excluded |= set(known_constants)
    pos = [c.atom for c in filter_conjuncts if isinstance(c, Pos)]
    neg = [c.atom for c in filter_conjuncts if isinstance(c, Neg)]
    atoms = _Atoms.of(pos, neg)
    total = _blank_branch(atoms).add(_iri_branch(atoms)).add(_literal_branches(atoms))
    if total.kind == "infinite":
        return total  # removing finitely many members keeps it infinite
    members_excluded = sum(1 for e in excluded if _satisfies(e, filter_conjuncts))
    if total.witnesses is not None:
        return _Count.exactly([t for t in total.witnesses if t not in excluded])
    return _Count.counted(total.n - members_excluded)


def combo_cardinality(combo: FilterCombination, known_constants: Iterable[Term] = ()) -> CardinalityBound:
    """|γ(F)|: the exact size of the canonical satisfying set, Infinite when
    provably infinite, Huge when finite but above the counting threshold."""
    count = _combo_count(combo, frozenset(known_constants))
    if count.kind == "infinite":
        return Infinite()
    if count.n > HUGE_THRESHOLD:
        return Huge()
    return Finite(count.n)


def combo_witnesses(combo: FilterCombination, known_constants: Iterable[Term] = (),
                    limit: int = WITNESS_LIMIT) -> Optional[list]:
    """The satisfying terms when finite and enumerable, else None."""
    count = _combo_count(combo, frozenset(known_constants))
    if count.kind != "finite" or count.witnesses is None or count.n > limit:
        return None
    return sorted(count.witnesses, key=term_key)


def truncate_combination(combo: FilterCombination, known_constants: Iterable[Term] = ()) -> FilterCombination:
    """Drop conjuncts beyond each type's capacity without changing |γ|.

    The capacity lemmas guarantee some conjunct of an over-full type whose
    removal preserves the cardinality; raises if none exists.
    """
    known = frozenset(known_constants)
    current = combo
    while True:
        counts = current.type_counts()
        over = sorted(t for t, n in counts.items() if t in MNRC_CAPS and n > MNRC_CAPS[t])
        if not over:
            return current
        reference = combo_cardinality(current, known)
        for c in current.conjuncts:
            if conjunct_type(c) != over[0]:
                continue
            candidate = current.without(c)
            if combo_cardinality(candidate, known) == reference:
                current = candidate
                break
        else:
            raise FilterAxiomError(
                f"no capacity-preserving truncation for {current.describe()} (type {over[0]})"
            )


# --- axiomatisations ------------------------------------------------------------

NU_NAME = Iri("urn:sclkit:nu")
_MAX_NAIVE_ATOMS = 10


@dataclass(frozen=True)
class AxiomatisationResult:
    sentence: object  # SclSentence
    approximate: bool
    skipped: tuple = ()


def _combo_psi(combo: FilterCombination, nu_rel):
    from .scl import PsiEq, PsiFilter, PsiNot, PsiShape, psi_and_all

    parts = []
    for c in combo.conjuncts:
        if isinstance(c, Eq):
            parts.append(PsiEq(c.constant))
        elif isinstance(c, NotEq):
            parts.append(PsiNot(PsiEq(c.constant)))
        elif isinstance(c, Nu):
            parts.append(PsiShape(nu_rel))
        elif isinstance(c, Pos):
            parts.append(PsiFilter(c.atom))
        else:
            parts.append(PsiNot(PsiFilter(c.atom)))
    return psi_and_all(parts)


def _gather(phi) -> tuple:
    from .scl import as_mscl, constants_of, filter_atoms_of, shape_rels_of

    constants: set = set()
    atoms: set = set()
    taken: set = set()
    for sentence in as_mscl(phi).scl_sentences():
        constants |= constants_of(sentence)
        atoms |= filter_atoms_of(sentence)
        taken |= {rel.name for rel in shape_rels_of(sentence)}
    return (sorted(constants, key=term_key),
            sorted(atoms, key=lambda a: a.describe()),
            taken)


def naive_axiomatisation(phi) -> AxiomatisationResult:
    """One fresh shape per filter combination with a non-infinite satisfying
    set, defined both by the combination and by the enumeration of its
    witnesses (bottom when empty).  Exponential in the filter/constant count."""
    from .scl import ConstraintAxiom, PsiEq, PsiNot, PsiTop, SclSentence, ShapeRel, psi_or_all
    from .shacl import NameMint

    constants, atoms, taken = _gather(phi)
    for atom in atoms:
        if isinstance(atom, PatternAtom):
            compile_pattern(atom.regex)  # raises UnsupportedPattern on non-regular input
    if len(constants) + len(atoms) > _MAX_NAIVE_ATOMS:
        raise FilterAxiomError(
            f"naive axiomatisation over {len(constants)} constants and {len(atoms)} filters "
            f"is too large (cap {_MAX_NAIVE_ATOMS} atoms total)"
        )
    mint = NameMint(taken)
    known = frozenset(constants)
    axioms = []
    approximate = False
    skipped = []
    options: list[list] = [[None, Eq(c), NotEq(c)] for c in constants]
    options += [[None, Pos(a), Neg(a)] for a in atoms]

    def expand(i: int, acc: list) -> None:
        nonlocal approximate
        if i == len(options):
            if not acc:
                return
            combo = FilterCombination.of(acc)
            bound = combo_cardinality(combo, known)
            if isinstance(bound, Infinite):
                return
            wit = combo_witnesses(combo, known)
            if wit is None:
                approximate = True
                skipped.append(combo)
                return
            rel = ShapeRel(mint.fresh())
            enumeration = psi_or_all([PsiEq(w) for w in wit]) if wit else PsiNot(PsiTop())
            axioms.append(ConstraintAxiom(rel, _combo_psi(combo, None)))
            axioms.append(ConstraintAxiom(rel, enumeration))
            return
        for choice in options[i]:
            expand(i + 1, acc + ([choice] if choice is not None else []))

    expand(0, [])
    return AxiomatisationResult(SclSentence(tuple(axioms)), approximate, tuple(skipped))


def _bounded_combos(constants: list, atoms: list) -> list:
    by_type: dict = {}
    for a in atoms:
        by_type.setdefault(_atom_type(a), []).append(a)

    def signed_subsets(items: list, cap: int) -> list:
        out: list[tuple] = [()]
        for a in items:
            extended = [prev + (s,) for prev in out if len(prev) < cap for s in (Pos(a), Neg(a))]
            out = out + extended
        return out

    combos: list[tuple] = [()]
    for t in sorted(by_type):
        group = signed_subsets(by_type[t], MNRC_CAPS[t])
        combos = [prev + g for prev in combos for g in group]
    equality_options: list = [(), *([Eq(c)] for c in constants), (Nu(),)]
    equality_options = [tuple(e) for e in equality_options]
    combos = [prev + e for prev in combos for e in equality_options]
    return [FilterCombination.of(c) for c in combos if c]


def bounded_axiomatisation(phi) -> AxiomatisationResult:
    """Nu's defining axiom plus one counting conjunct per bounded filter
    combination with a finite satisfying set; polynomial in the input."""
    from .scl import (AtMostAxiom, ConstraintAxiom, PsiEq, PsiNot, PsiOrder, SclSentence,
                      ShapeRel, as_mscl, psi_and_all, walk_psi)
    from .shacl import NameMint

    constants, atoms, taken = _gather(phi)
    for atom in atoms:
        if isinstance(atom, PatternAtom):
            raise FilterAxiomError("bounded axiomatisation excludes sh:pattern filters")
    for sentence in as_mscl(phi).scl_sentences():
        for axiom in sentence.axioms:
            if hasattr(axiom, "body"):
                for node in walk_psi(axiom.body):
                    if isinstance(node, PsiOrder):
                        raise FilterAxiomError(
                            "bounded axiomatisation excludes property-pair order atoms"
                        )

    nu_name = NU_NAME if NU_NAME not in taken else NameMint(taken, NU_NAME.value + ":").fresh()
    nu_rel = ShapeRel(nu_name)
    known = frozenset(constants)
    axioms = [ConstraintAxiom(nu_rel, psi_and_all([PsiNot(PsiEq(c)) for c in constants]))]
    approximate = False
    skipped = []
    for combo in sorted(_bounded_combos(constants, atoms), key=lambda c: c.describe()):
        bound = combo_cardinality(combo, known)
        if isinstance(bound, Infinite):
            continue
        if isinstance(bound, Huge):
            approximate = True
            skipped.append(combo)
            continue
        axioms.append(AtMostAxiom(bound.n, _combo_psi(combo, nu_rel)))
    return AxiomatisationResult(SclSentence(tuple(axioms)), approximate, tuple(skipped))
