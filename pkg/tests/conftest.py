import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from carnot_jets.algebra import catalog
from carnot_jets.exact import MPoly

# st.fractions is slow to draw; small ratios of integers are enough here
rats = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 4))
positive = st.builds(Fraction, st.integers(1, 12), st.integers(1, 4))

settings.register_profile("fast", max_examples=25, deadline=None)
settings.load_profile("fast")

_ALGS = {}


def alg(name):
    """Catalog algebras are shared so their caches are reused across tests."""
    if name not in _ALGS:
        _ALGS[name] = catalog(name)
    return _ALGS[name]


@pytest.fixture
def heis():
    return alg("heisenberg(1)")


def rand_rat(rng, lo=-5, hi=5, den=3):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_vec(rng, n, **kw):
    return [rand_rat(rng, **kw) for _ in range(n)]


def rand_poly(rng, vars, terms=4, max_exp=2):
    t = {}
    for _ in range(terms):
        e = tuple(rng.randint(0, max_exp) if rng.random() < 0.5 else 0 for _ in vars)
        t[e] = t.get(e, 0) + Fraction(rng.randint(-4, 4))
    return MPoly(vars, t)


def unit(n, i):
    return [1 if k == i else 0 for k in range(n)]


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE = []


def verdict(n, ok, what):
    """Record and print one pass/fail line for an acceptance criterion."""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {what}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
