import random

import pytest
from hypothesis import given, settings, strategies as st

from tesagents.analysis import check_closure
from tesagents.tes import Part, kappa_from_comp
from tesagents.analysis import check_product_laws

from suites import (dead_end_tts, exchange_law, closure_cases, product_law_suite, make_comp, random_relation,
                    random_triple)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_product_laws_random_triples(seed):
    ts, c = random_triple(random.Random(seed))
    rep = check_product_laws(*ts, kappa_from_comp(c), 5)
    assert rep.passed, rep


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.data())
def test_generated_comp_is_symmetric_with_exchange_law(seed, data):
    c = make_comp(*random_relation(random.Random(seed)))
    parts = [Part(frozenset({a}), frozenset(data.draw(st.sets(st.sampled_from([f"{a.lower()}0", f"{a.lower()}1"])))))
             for a in "ABC"]
    x, y, z = parts
    assert c(x, y) == c(y, x)
    assert exchange_law(c, x, y, z)


def test_product_law_suite_seeded():
    assert all(r.passed for r in product_law_suite(n=10, depth=4, seed=7))


@pytest.mark.parametrize("tag,T", closure_cases(), ids=lambda v: v if isinstance(v, str) else "")
def test_closure_case_study(tag, T):
    rep = check_closure(T, 4)
    assert rep.passed, rep


def test_non_productive_flagged():
    rep = check_closure(dead_end_tts(), 5)
    assert not rep.passed and "not productive" in rep.detail
