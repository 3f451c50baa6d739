"""Differential fuzzing of the internal engines: the CNF solver against
truth-table enumeration, the regex automata against the stdlib matcher, and
the two satisfiability searches against each other."""
import itertools
import random
import re

from sclkit.automata import compile_pattern
from sclkit.decide import SearchBudget, _Cnf, _dpll, bounded_sat, scl_bounded_sat
from sclkit.filters import bounded_axiomatisation
from sclkit.semantics import SemanticsMode
from sclkit.translate import tau
from sclkit.corpus import random_document


def _truth_table_sat(n_vars, clauses):
    for bits in itertools.product((False, True), repeat=n_vars):
        assign = (None,) + bits
        if all(any(assign[abs(l)] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def test_dpll_agrees_with_truth_tables():
    rng = random.Random(101)
    for _ in range(400):
        n = rng.randint(1, 7)
        clauses = []
        for _ in range(rng.randint(1, 14)):
            width = rng.randint(1, 3)
            clause = tuple(rng.choice([-1, 1]) * rng.randint(1, n) for _ in range(width))
            clauses.append(clause)
        model = _dpll(n, clauses)
        expected = _truth_table_sat(n, clauses)
        assert (model is not None) == expected
        if model is not None:
            assert all(any((model[abs(l)]) == (l > 0) for l in c) for c in clauses)


def test_cnf_helpers_reify_correctly():
    rng = random.Random(103)
    for _ in range(120):
        cnf = _Cnf()
        a, b, c = cnf.new_var(), cnf.new_var(), cnf.new_var()
        g_and = cnf.and_([a, -b])
        g_or = cnf.or_([g_and, c])
        pick = rng.choice([g_or, -g_or, cnf.iff(a, c), cnf.at_least(2, [a, b, c])])
        cnf.add(pick)
        model = _dpll(cnf.n_vars, cnf.clauses)
        if model is None:
            continue
        va, vb, vc = model[a], model[b], model[c]
        val_and = va and not vb
        val_or = val_and or vc
        expected = {
            g_or: val_or, -g_or: not val_or,
        }.get(pick)
        if pick == cnf.iff(a, c):
            expected = va == vc
        elif isinstance(pick, int) and pick == cnf.at_least(2, [a, b, c]):
            expected = sum((va, vb, vc)) >= 2
        assert expected is True


_REGEX_POOL = [
    "^a*b$", "^(ab|cd)+$", "^a{2,4}$", "^[a-c]x?$", "^[^ab]c$", "a+b",
    "^(a|b)(c|d)$", "^x(yz)*$", "^ab?c{1,2}$", "c.d", "^$", "^a..d$",
    "^\\d{2}$", "^[a-d]{1,3}$", "(ab)|(ba)",
]


def test_automata_agree_with_stdlib_matcher():
    rng = random.Random(107)
    alphabet = "abcdx1"
    for pattern in _REGEX_POOL:
        dfa = compile_pattern(pattern)
        for _ in range(250):
            word = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 6)))
            assert dfa.accepts(word) == (re.search(pattern, word) is not None), (pattern, word)


def test_automata_counting_matches_enumeration():
    rng = random.Random(109)
    alphabet = "abcd"
    finite_patterns = ["^a{1,3}$", "^(ab|cd)$", "^[a-c]{2}$", "^x?$", "^(a|b)(a|b)$"]
    for pattern in finite_patterns:
        dfa = compile_pattern(pattern)
        words = [w for n in range(0, 5) for w in
                 ("".join(t) for t in itertools.product(alphabet + "x", repeat=n))
                 if re.search(pattern, "".join(w))]
        n = dfa.count_words(10 ** 6)
        assert n == len(set(words)), pattern
        assert sorted(dfa.enumerate_words(n)) == sorted(set(words))


def test_canonical_sat_implies_axiomatised_uninterpreted_sat():
    # one direction of the bounded-axiomatisation equisatisfiability, checked
    # on filter-bearing documents where the graph search finds a witness
    rng = random.Random(113)
    from sclkit import shacl as sh
    from sclkit.rdf import Iri, Literal, XSD_INT

    budget = SearchBudget(max_fresh=2, max_triples=3, max_seconds=30)
    checked = 0
    for k in range(12):
        limit = Literal(str(rng.randint(0, 3)), XSD_INT)
        atoms = [sh.DatatypeConstraint(XSD_INT),
                 rng.choice([sh.MinInclusive(limit), sh.MaxInclusive(limit)])]
        m = sh.Document((
            sh.Shape(Iri(f"http://ex/s{k}"), (sh.NodeTarget(Iri("http://ex/n")),),
                     sh.PredPath(Iri("http://ex/r")),
                     sh.And((sh.MinCount(rng.randint(1, 2)), sh.AllValues(sh.And(tuple(atoms)))))),
        ))
        graph_level = bounded_sat(m, SemanticsMode.BRAVE_TOTAL, budget)
        if not graph_level.is_sat:
            continue
        phi = tau(m)
        ax = bounded_axiomatisation(phi)
        assert scl_bounded_sat(phi.conjoin(ax.sentence), budget).is_sat
        checked += 1
    assert checked >= 6
