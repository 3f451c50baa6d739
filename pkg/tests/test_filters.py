import random

import pytest
from hypothesis import given, settings, strategies as st

from sclkit.rdf import Blank, Iri, Literal, RDF_LANGSTRING, XSD_BOOLEAN, XSD_DECIMAL, XSD_INT, XSD_INTEGER, XSD_STRING
from sclkit.filters import (
    DatatypeAtom,
    Eq,
    FilterAxiomError,
    FilterCombination,
    Finite,
    Huge,
    Infinite,
    KindAtom,
    LanguageTagAtom,
    MaxLengthAtom,
    MinLengthAtom,
    MNRC_CAPS,
    NotEq,
    Nu,
    OrderCmp,
    PatternAtom,
    Pos,
    bound_le,
    bounded_axiomatisation,
    combo_cardinality,
    combo_witnesses,
    eval_filter,
    naive_axiomatisation,
    truncate_combination,
)
from sclkit.corpus import random_filter_combination, corpus_seed

EX = "http://ex/"


def ilit(n):
    return Literal(str(n), XSD_INT)


F_POS = OrderCmp(">", ilit(0))
F_LE5 = OrderCmp("<=", ilit(5))
F_INT = DatatypeAtom(XSD_INT)


def combo(*conjuncts):
    return FilterCombination.of(conjuncts)


def test_eval_filter_examples():
    assert eval_filter(KindAtom("IRI"), Iri(EX + "Alex"))
    assert not eval_filter(KindAtom("IRI"), Blank("b"))
    assert eval_filter(DatatypeAtom(XSD_INT), Literal("3", XSD_INT))
    assert not eval_filter(DatatypeAtom(XSD_INT), Literal("3", XSD_INTEGER))
    assert not eval_filter(OrderCmp(">", ilit(0)), Literal("abc"))  # cross-partition
    assert eval_filter(OrderCmp(">", ilit(0)), Literal("0.5", XSD_DECIMAL))
    assert eval_filter(OrderCmp(">", Literal("false", XSD_BOOLEAN)), Literal("true", XSD_BOOLEAN))
    assert eval_filter(LanguageTagAtom("EN"), Literal("hi", language="en"))
    assert eval_filter(MinLengthAtom(3), Iri("abc"))
    assert not eval_filter(MinLengthAtom(1), Blank("x"))
    assert eval_filter(PatternAtom("^a.c$"), Literal("abc"))
    assert eval_filter(PatternAtom("b"), Literal("abc"))  # search semantics


def test_cardinality_paper_examples():
    assert combo_cardinality(combo(Pos(F_POS), Pos(F_LE5), Pos(F_INT))) == Finite(5)
    c = combo(Pos(F_POS), Pos(F_LE5), Pos(F_INT), NotEq(ilit(2)), NotEq(ilit(3)))
    assert combo_cardinality(c) == Finite(3)
    assert combo_witnesses(c) == [ilit(1), ilit(4), ilit(5)]
    assert combo_cardinality(combo(Pos(KindAtom("IRI")), Pos(KindAtom("Literal")))) == Finite(0)
    assert combo_cardinality(combo(Pos(DatatypeAtom(XSD_BOOLEAN)))) == Finite(2)


def test_cardinality_infinite_and_huge():
    assert combo_cardinality(combo(Pos(F_INT))) == Infinite()
    assert combo_cardinality(combo(Pos(F_POS))) == Infinite()
    assert combo_cardinality(combo(Pos(DatatypeAtom(XSD_DECIMAL)), Pos(F_POS), Pos(F_LE5))) == Infinite()
    big = combo(Pos(F_INT), Pos(OrderCmp(">=", ilit(0))), Pos(OrderCmp("<=", ilit(2 ** 21))))
    assert combo_cardinality(big) == Huge()
    point = combo(Pos(DatatypeAtom(XSD_DECIMAL)), Pos(OrderCmp(">=", Literal("2.5", XSD_DECIMAL))),
                  Pos(OrderCmp("<=", Literal("2.5", XSD_DECIMAL))))
    assert combo_cardinality(point) == Finite(1)
    assert combo_witnesses(point) == [Literal("2.5", XSD_DECIMAL)]


def test_cardinality_with_nu_and_equality():
    known = [ilit(2), ilit(3), Iri(EX + "e")]
    base = (Pos(F_POS), Pos(F_LE5), Pos(F_INT))
    assert combo_cardinality(combo(*base, Nu()), known) == Finite(3)
    assert combo_cardinality(combo(*base, Eq(Iri(EX + "e"))), known) == Finite(0)
    assert combo_cardinality(combo(*base, Eq(ilit(2))), known) == Finite(1)
    assert combo_cardinality(combo(Eq(ilit(2)), NotEq(ilit(2)))) == Finite(0)
    assert combo_cardinality(combo(Eq(ilit(2)), Eq(ilit(3)))) == Finite(0)


def test_cardinality_language_tags_and_strings():
    assert combo_cardinality(combo(Pos(LanguageTagAtom("en")))) == Infinite()
    assert combo_cardinality(combo(Pos(LanguageTagAtom("en")), Pos(LanguageTagAtom("fr")))) == Finite(0)
    assert combo_cardinality(combo(Pos(LanguageTagAtom("en")), Pos(F_INT))) == Finite(0)
    assert combo_cardinality(
        combo(Pos(LanguageTagAtom("en")), Pos(DatatypeAtom(RDF_LANGSTRING)), Pos(MaxLengthAtom(0)))
    ) == Finite(1)
    assert combo_cardinality(combo(Pos(DatatypeAtom(XSD_STRING)), Pos(MaxLengthAtom(0)))) == Finite(1)
    exact = combo(Pos(DatatypeAtom(XSD_STRING)), Pos(OrderCmp(">=", Literal("ab"))),
                  Pos(OrderCmp("<=", Literal("ab"))))
    assert combo_cardinality(exact) == Finite(1)
    assert combo_cardinality(combo(Pos(DatatypeAtom(XSD_STRING)), Pos(OrderCmp(">", Literal("ab"))),
                                   Pos(OrderCmp("<", Literal("ab"))))) == Finite(0)


def test_cardinality_patterns():
    c = combo(Pos(PatternAtom("^b[aeiou]b$")), Pos(DatatypeAtom(XSD_STRING)))
    assert combo_cardinality(c) == Finite(5)
    assert combo_witnesses(c) == [Literal(w, XSD_STRING) for w in ("bab", "beb", "bib", "bob", "bub")]
    ints = combo(Pos(PatternAtom("^[0-9]$")), Pos(F_INT))
    assert combo_cardinality(ints) == Finite(10)
    unanchored = combo(Pos(PatternAtom("b")), Pos(DatatypeAtom(XSD_STRING)))
    assert combo_cardinality(unanchored) == Infinite()
    iris = combo(Pos(PatternAtom("^urn:x[01]$")), Pos(KindAtom("IRI")))
    assert combo_cardinality(iris) == Finite(2)


def test_antitone_in_positive_conjuncts():
    rng = random.Random(corpus_seed())
    for _ in range(300):
        c = random_filter_combination(rng)
        extra = Pos(rng.choice([F_POS, F_LE5, F_INT, KindAtom("Literal"), MinLengthAtom(2)]))
        bigger = FilterCombination.of(c.conjuncts + (extra,))
        assert bound_le(combo_cardinality(bigger, _KNOWN), combo_cardinality(c, _KNOWN))


_KNOWN = (ilit(1), ilit(3), Literal("true", XSD_BOOLEAN), Literal("b", XSD_STRING), Iri(EX + "k0"))


def test_truncation_respects_caps_and_preserves_cardinality():
    rng = random.Random(corpus_seed() + 1)
    for _ in range(500):
        c = random_filter_combination(rng)
        reduced = truncate_combination(c, _KNOWN)
        counts = reduced.type_counts()
        for t, cap in MNRC_CAPS.items():
            assert counts.get(t, 0) <= cap
        assert combo_cardinality(reduced, _KNOWN) == combo_cardinality(c, _KNOWN)


@given(st.integers(min_value=-6, max_value=6), st.integers(min_value=-6, max_value=6),
       st.booleans(), st.booleans())
@settings(max_examples=60, deadline=None)
def test_integer_interval_counting_matches_enumeration(lo, hi, lo_strict, hi_strict):
    atoms = [Pos(F_INT),
             Pos(OrderCmp(">" if lo_strict else ">=", ilit(lo))),
             Pos(OrderCmp("<" if hi_strict else "<=", ilit(hi)))]
    expected = [v for v in range(-10, 11)
                if (v > lo if lo_strict else v >= lo) and (v < hi if hi_strict else v <= hi)]
    got = combo_cardinality(FilterCombination.of(atoms))
    assert got == Finite(len(expected))


# --- axiomatisations ---------------------------------------------------------------

def _phi_star():
    from sclkit.scl import (ConstraintAxiom, PsiCount, PsiEq, PsiFilter, PsiNot, RelAtom,
                            RelStep, SclSentence, ShapeRel, TargetNodeAxiom, psi_and_all)

    s = ShapeRel(Iri(EX + "s"))
    body = PsiCount(4, RelStep(RelAtom(Iri(EX + "R"))), psi_and_all([
        PsiFilter(F_POS), PsiFilter(F_LE5), PsiFilter(F_INT),
        PsiNot(PsiEq(ilit(2))), PsiNot(PsiEq(ilit(3))),
    ]))
    return SclSentence((TargetNodeAxiom(s, Iri(EX + "e")), ConstraintAxiom(s, body)))


def test_naive_axiomatisation_contains_witness_enumeration():
    from sclkit.scl import ConstraintAxiom, PsiEq, pretty

    result = naive_axiomatisation(_phi_star())
    assert not result.approximate
    # the main combination's enumeration block x=1 or x=4 or x=5 appears
    rendered = pretty(result.sentence)
    assert "x = \"1\"" in rendered and "x = \"4\"" in rendered and "x = \"5\"" in rendered
    # each fresh shape is defined twice (combination and enumeration)
    from collections import Counter

    counts = Counter(a.shape for a in result.sentence.constraint_axioms())
    assert counts and all(v == 2 for v in counts.values())


def test_naive_axiomatisation_empty_and_unsat_cases():
    from sclkit.scl import ConstraintAxiom, PsiNot, PsiTop, SclSentence, ShapeRel

    empty = SclSentence((ConstraintAxiom(ShapeRel(Iri(EX + "s")), PsiTop()),))
    result = naive_axiomatisation(empty)
    assert result.sentence.axioms == ()
    from sclkit.scl import PsiAnd, PsiFilter

    contradictory = SclSentence((ConstraintAxiom(
        ShapeRel(Iri(EX + "s")),
        PsiAnd(PsiFilter(KindAtom("IRI")), PsiFilter(KindAtom("Literal"))),
    ),))
    res2 = naive_axiomatisation(contradictory)
    bottoms = [a for a in res2.sentence.constraint_axioms()
               if isinstance(a.body, PsiNot) and isinstance(a.body.inner, PsiTop)]
    assert bottoms  # the unsatisfiable combination maps to bottom


def test_bounded_axiomatisation_structure():
    from sclkit.scl import AtMostAxiom, ConstraintAxiom

    result = bounded_axiomatisation(_phi_star())
    assert not result.approximate
    nu_axioms = [a for a in result.sentence.axioms if isinstance(a, ConstraintAxiom)]
    assert len(nu_axioms) == 1  # the nu definition
    at_most = [a for a in result.sentence.axioms if isinstance(a, AtMostAxiom)]
    bounds = {a.n for a in at_most}
    assert {0, 3, 5} <= bounds  # the three displayed conjuncts of the example
    sizes = {len(list(__import__("sclkit.scl", fromlist=["walk_psi"]).walk_psi(a.body)))
             for a in at_most}
    assert at_most and max(a.n for a in at_most) <= 2 ** 20


def test_bounded_axiomatisation_rejects_patterns_and_orders():
    from sclkit.scl import ConstraintAxiom, PsiFilter, PsiOrder, RelAtom, RelStep, SclSentence, ShapeRel

    pat = SclSentence((ConstraintAxiom(ShapeRel(Iri(EX + "s")), PsiFilter(PatternAtom("^a$"))),))
    with pytest.raises(FilterAxiomError, match="pattern"):
        bounded_axiomatisation(pat)
    order = SclSentence((ConstraintAxiom(
        ShapeRel(Iri(EX + "s")), PsiOrder(RelStep(RelAtom(Iri(EX + "r"))), RelAtom(Iri(EX + "q")), "<"),
    ),))
    with pytest.raises(FilterAxiomError, match="order"):
        bounded_axiomatisation(order)


def test_bounded_axiomatisation_filter_free_is_just_nu():
    from sclkit.scl import ConstraintAxiom, PsiTop, SclSentence, ShapeRel

    phi = SclSentence((ConstraintAxiom(ShapeRel(Iri(EX + "s")), PsiTop()),))
    result = bounded_axiomatisation(phi)
    assert len(result.sentence.axioms) == 1
    nu = result.sentence.axioms[0]
    assert isinstance(nu, ConstraintAxiom)
    assert isinstance(nu.body, PsiTop)  # no constants: empty conjunction


def test_naive_axiomatisation_equisatisfiability_suite():
    # canonical satisfiability equals uninterpreted satisfiability of the
    # sentence conjoined with its naive axiomatisation, on a curated suite
    from sclkit.decide import SearchBudget, scl_bounded_sat
    from sclkit.scl import (ConstraintAxiom, PsiCount, PsiEq, PsiExists, PsiFilter, PsiNot,
                            RelAtom, RelStep, SclSentence, ShapeRel, TargetNodeAxiom,
                            psi_and_all)

    s = __import__("sclkit.scl", fromlist=["ShapeRel"]).ShapeRel(Iri(EX + "s"))
    e, R = Iri(EX + "e"), Iri(EX + "R")
    budget = SearchBudget(max_fresh=4, max_triples=99, max_seconds=30)

    def sentence(body):
        return SclSentence((TargetNodeAxiom(s, e), ConstraintAxiom(s, body)))

    cases = [
        # (sentence, canonically satisfiable?)
        (sentence(PsiFilter(KindAtom("IRI"))), True),
        (sentence(psi_and_all([PsiFilter(KindAtom("IRI")), PsiFilter(KindAtom("Literal"))])), False),
        (sentence(PsiCount(3, RelStep(RelAtom(R)),
                           PsiFilter(DatatypeAtom(XSD_BOOLEAN)))), False),  # only two booleans
        (sentence(PsiCount(2, RelStep(RelAtom(R)),
                           PsiFilter(DatatypeAtom(XSD_BOOLEAN)))), True),
        (sentence(PsiExists(RelStep(RelAtom(R)), psi_and_all(
            [PsiFilter(F_POS), PsiFilter(OrderCmp("<", ilit(1))), PsiFilter(F_INT)]))), False),
        (sentence(psi_and_all([PsiFilter(F_INT), PsiEq(Iri(EX + "e"))])), False),  # an IRI is no int
    ]
    for phi, canonical_sat in cases:
        ax = naive_axiomatisation(phi)
        got = scl_bounded_sat(phi.conjoin(ax.sentence), budget)
        if canonical_sat:
            assert got.is_sat
        else:
            assert not got.is_sat


def test_bounded_axiomatisation_huge_combination_raises_flag():
    from sclkit.scl import (ConstraintAxiom, PsiCount, PsiFilter, RelAtom, RelStep,
                            SclSentence, ShapeRel, psi_and_all)

    wide = [PsiFilter(OrderCmp(">=", ilit(0))), PsiFilter(OrderCmp("<=", ilit(2 ** 21))),
            PsiFilter(DatatypeAtom(XSD_INT))]
    phi = SclSentence((ConstraintAxiom(
        ShapeRel(Iri(EX + "s")),
        PsiCount(2, RelStep(RelAtom(Iri(EX + "R"))), psi_and_all(wide)),
    ),))
    result = bounded_axiomatisation(phi)
    assert result.approximate
    assert result.skipped  # the huge window's counting conjunct is omitted
    from sclkit.scl import AtMostAxiom

    bounds = {a.n for a in result.sentence.axioms if isinstance(a, AtMostAxiom)}
    assert all(n <= 2 ** 20 for n in bounds)
