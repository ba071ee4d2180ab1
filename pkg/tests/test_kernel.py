import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from dialg import _kernel_py as P
from dialg.cas import ExactField, LaurentPoly, Mono, PointField, PSeries, RatFun, ratfun_equals
from dialg.checks import kernel_equality_agreement, kernel_ring_axioms, kernel_series_inverse

try:
    from dialg import _kernel_c as C
except ImportError:  # pragma: no cover
    C = None

NAMES = ("v", "z", "w", "u", "z1")

exps = st.dictionaries(st.sampled_from(NAMES), st.integers(-4, 4), max_size=3)
coefs = st.fractions(min_value=-20, max_value=20, max_denominator=9).filter(lambda c: c != 0)
polys = st.lists(st.tuples(exps, coefs), max_size=5).map(
    lambda ts: sum((LaurentPoly.monomial(e, c) for e, c in ts), LaurentPoly.zero()))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a).is_zero()
    assert a * LaurentPoly.one() == a


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_ratfun_field_laws(a, b):
    if b.is_zero():
        return
    x = RatFun(a) / RatFun(b)
    assert x * RatFun(b) == RatFun(a)
    assert (x - x).is_zero()


def test_kernel_checks():
    assert kernel_ring_axioms()["ok"]
    assert kernel_series_inverse()["ok"]
    assert kernel_equality_agreement()["ok"]


def test_ratfun_equality_strategies():
    z = LaurentPoly.var("z")
    one = LaurentPoly.one()
    a = RatFun(one - z * z) / RatFun(one - z)
    assert ratfun_equals(a, RatFun(one + z))[0]
    assert ratfun_equals(a, RatFun(one + z), "prob")[0]
    ok, wit = ratfun_equals(a, RatFun(one - z), "prob")
    assert not ok and wit


def test_series_inverse_and_exp():
    F = ExactField()
    z = F.mono(Mono.var("z"))
    s = PSeries(F, [F.const(2), z, F.const(3)])
    assert (s * s.invert() - 1).is_zero()
    t = PSeries(F, [F.const(0), F.const(1), F.const(0), F.const(0)])
    e = t.exp()
    # exp(p) = 1 + p + p^2/2 + p^3/6
    assert [e.c[k] for k in range(4)] == [F.const(c) for c in (1, 1, Fraction(1, 2), Fraction(1, 6))]


def test_pointfield_deterministic():
    a, b = PointField(7, 3), PointField(7, 3)
    assert a.value("z") == b.value("z")
    assert a.value("z") != PointField(7, 4).value("z")
    assert a.retry().value("z") != a.value("z")


def _rand_poly(rng, n=6):
    out = {}
    for _ in range(n):
        k = sum(rng.randint(-3, 3) << (P.SHIFT * pos) for pos in range(4))
        out[k] = out.get(k, mpq(0)) + mpq(rng.randint(-9, 9), rng.randint(1, 4))
    return {k: c for k, c in out.items() if c}


@pytest.mark.skipif(C is None, reason="compiled kernel not built")
def test_backends_agree():
    rng = random.Random(11)
    for _ in range(300):
        a, b = _rand_poly(rng), _rand_poly(rng)
        assert C.poly_mul(a, b) == P.poly_mul(a, b)
        assert C.poly_add(a, b, -1) == P.poly_add(a, b, -1)
        key = rng.randint(-2, 2) << P.SHIFT
        assert C.poly_scale(a, mpq(3, 2), key) == P.poly_scale(a, mpq(3, 2), key)
        pos = rng.randint(0, 3)
        img = rng.randint(-2, 2) << (P.SHIFT * rng.randint(0, 3))
        assert C.poly_subst(a, pos, mpq(2), img) == P.poly_subst(a, pos, mpq(2), img)
        vals = [mpq(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(4)]
        assert C.poly_eval(a, vals) == P.poly_eval(a, vals)
        assert C.decode(img) == P.decode(img)
    sa = [mpq(k) for k in range(5)]
    sb = [mpq(k, 3) for k in range(1, 6)]
    assert C.series_mul(sa, sb, 4) == P.series_mul(sa, sb, 4)


def _machine(env):
    cmd = [sys.executable, "-m", "dialg.cli", "--type", "A2", "--check",
           "strange.2q,taut.a2,serre-equiv,hopf.delta.e.f,hopf.antipode.e1",
           "--p-order", "2", "--trials", "3", "--report", "machine"]
    return subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout


def test_pure_backend_same_report(pure_env):
    code = "import dialg; print(dialg.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=pure_env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    assert _machine(pure_env) == _machine(dict(os.environ, DIALG_PURE="0"))
