"""Check registry: every verification exposed by the modules, as named
records the CLI can select, run and report on.

A selector matches an id when it equals it or is a prefix ending at a
``.`` or ``[`` boundary, so ``serre-equiv`` picks every ``serre-equiv[..]``.
"""
from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .cas import CASError, ExactField, LaurentPoly, PointField, RatFun, ratfun_equals
from .rootdata import RootType, cartan_data, serre_pairs

STRATEGIES = ("exact", "prob")


@dataclass(frozen=True)
class CheckPlan:
    rtype: str
    convention: str | None = None
    mode: str = "theta"
    N: int = 4
    strategy: str = "prob"
    seed: int = 0xD1A
    trials: int = 24
    checks: tuple = ("all",)

    def __post_init__(self):
        RootType.parse(self.rtype)
        if self.mode not in ("theta", "generic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 1 <= self.N <= 8:
            raise ValueError("p-order must lie in [1, 8]")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown equality strategy {self.strategy!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def as_dict(self):
        d = asdict(self)
        d["checks"] = list(self.checks)
        d["seed"] = hex(self.seed)
        d["convention"] = self.cd.convention
        return d

    @property
    def cd(self):
        return cartan_data(self.rtype, self.convention)

    def tag(self):
        if self.strategy == "exact":
            return "exact"
        return f"probabilistic(seed={self.seed:#x},trials={self.trials})"


@dataclass
class Check:
    id: str
    run: object  # plan -> result dict
    theta_only: bool = False
    tags: tuple = field(default_factory=tuple)


class _Ctx:
    """Per-plan lazy objects shared by the checks of one run."""

    def __init__(self, plan: CheckPlan):
        self.plan = plan
        self._env = None

    @property
    def cd(self):
        return self.plan.cd

    @property
    def env(self):
        if self._env is None:
            from .currents import Env
            from .structfn import StructureFunctionSet
            self._env = Env(StructureFunctionSet(self.cd, self.plan.mode, self.plan.N))
        return self._env

    def kw(self):
        p = self.plan
        return {"strategy": p.strategy, "trials": p.trials, "seed": p.seed}


# ------------------------------------------------------------- kernel checks

def kernel_ring_axioms(seed=0xD1A, samples=30) -> dict:
    """Associativity, commutativity, distributivity and units on seeded
    random Laurent polynomials; inverse laws on Laurent monomials."""
    rng = random.Random(seed)
    names = ("v", "z", "w", "u")

    def rnd():
        p = LaurentPoly.zero()
        for _ in range(rng.randint(0, 4)):
            exps = {n: rng.randint(-3, 3) for n in rng.sample(names, rng.randint(1, 3))}
            p = p + LaurentPoly.monomial(exps, Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
        return p

    one, zero = LaurentPoly.one(), LaurentPoly.zero()
    for n in range(samples):
        a, b, c = rnd(), rnd(), rnd()
        laws = {
            "add-assoc": (a + b) + c == a + (b + c),
            "mul-assoc": (a * b) * c == a * (b * c),
            "add-comm": a + b == b + a,
            "mul-comm": a * b == b * a,
            "distrib": a * (b + c) == a * b + a * c,
            "units": a * one == a and a + zero == a and (a - a).is_zero(),
        }
        for name, ok in laws.items():
            if not ok:
                return {"ok": False, "witness": {"law": name, "sample": n}}
        m = LaurentPoly.monomial({"z": rng.randint(-3, 3), "v": rng.randint(-3, 3)}, rng.randint(1, 9))
        if not (RatFun(m) * RatFun(m).inv() == RatFun(one)):
            return {"ok": False, "witness": {"law": "inverse", "sample": n}}
    return {"ok": True}


def kernel_series_inverse(seed=0xD1A, samples=20, N=6) -> dict:
    """s * s^-1 = 1 to order N for seeded series with invertible constant term,
    in the exact field and at sample points."""
    from .cas import PSeries
    rng = random.Random(seed)
    for n in range(samples):
        for F in (ExactField(), PointField(seed, n)):
            coeffs = [F.poly(LaurentPoly.monomial({"z": rng.randint(-2, 2)}, rng.randint(1, 7)))]
            for _ in range(N):
                coeffs.append(F.poly(LaurentPoly.monomial({"v": rng.randint(-3, 3)}, rng.randint(-5, 5))))
            s = PSeries(F, coeffs)
            if not (s * s.invert() - 1).is_zero():
                return {"ok": False, "witness": {"sample": n, "field": F.describe()}}
    return {"ok": True}


def kernel_equality_agreement(seed=0xD1A, pairs=100) -> dict:
    """Exact and probabilistic equality agree on seeded pairs, half of them
    equal by construction (a rewritten over a random common factor) and
    half perturbed by one monomial."""
    rng = random.Random(seed)
    names = ("v", "z", "w")

    def rnd(k=3):
        p = LaurentPoly.const(rng.randint(1, 5))
        for _ in range(k):
            p = p + LaurentPoly.monomial({rng.choice(names): rng.randint(-2, 2)}, rng.randint(-4, 4))
        return p if not p.is_zero() else LaurentPoly.one()

    disagreements = []
    for n in range(pairs):
        num, den, c = rnd(), rnd(), rnd(2)
        a = RatFun.from_fraction(num, den)
        b = RatFun.from_fraction(num * c, den * c)
        if n % 2:
            b = b + RatFun(LaurentPoly.monomial({"z": rng.randint(1, 3)}, 1))
        ex, _ = ratfun_equals(a, b, "exact")
        pr, _ = ratfun_equals(a, b, "prob", trials=4, seed=seed + n)
        if ex != pr or ex != (n % 2 == 0):
            disagreements.append(n)
    return {"ok": not disagreements, "witness": {"pairs": disagreements[:5]} if disagreements else None}


def rootdata_check(cd) -> dict:
    """A = D B with B symmetric, a_ii = 2, d_i > 0."""
    for i in cd.nodes:
        if cd.a(i, i) != 2 or cd.d(i) <= 0:
            return {"ok": False, "witness": {"node": i}}
        for j in cd.nodes:
            if cd.b(i, j) != cd.b(j, i) or cd.b(i, j) != cd.d(i) * cd.a(i, j):
                return {"ok": False, "witness": {"pair": [i, j]}}
    return {"ok": True}


# ------------------------------------------------------------------ registry

def _wrap(fn):
    """Normalize structfn-style results to {"ok", "witness"}."""
    def run(*a, **k):
        r = fn(*a, **k)
        if r.get("ok"):
            return {"ok": True}
        w = {k: v for k, v in r.items() if k != "ok"}
        return {"ok": False, "witness": w.get("witness", w)}
    return run


def build_registry(plan: CheckPlan) -> list:
    """All checks for the plan's root type, in a fixed order."""
    from . import currents as C
    from . import hopf as H
    from . import serre as S
    from . import structfn as SF

    ctx = _Ctx(plan)
    cd = ctx.cd
    t = str(RootType.parse(plan.rtype))
    out = []
    add = out.append

    add(Check("rootdata.symmetrization", lambda p: rootdata_check(ctx.cd)))
    add(Check("kernel.ring", lambda p: kernel_ring_axioms(p.seed)))
    add(Check("kernel.series-inverse", lambda p: kernel_series_inverse(p.seed)))
    add(Check("kernel.equality", lambda p: kernel_equality_agreement(p.seed)))

    # structure functions
    add(Check("di.cond", lambda p: _wrap(SF.check_di_condition)(
        SF.StructureFunctionSet(ctx.cd, "theta", p.N)), theta_only=True))
    pairs = [(i, j) for i in cd.nodes for j in cd.nodes]
    for name, fn in (("pef", SF.lemma_pef), ("pp", SF.lemma_pp), ("ee", SF.lemma_ee)):
        add(Check(f"lemma.{name}", lambda p, fn=fn: _all_pairs(fn, ctx.cd, pairs, min(p.N, 4)),
                  theta_only=True))

    # h-functions
    for cid, thunk in S.strange_checks((Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(3))):
        add(Check(cid, lambda p, th=thunk: th(p.strategy, p.trials, p.seed)))
    add(Check("taut.a2", lambda p: S.tautology_a2()))
    add(Check("taut.a3", lambda p: S.tautology_a3()))
    add(Check("constraint.a4", lambda p: S.constraint_a4(p.strategy, p.trials, p.seed)))
    for cid, thunk in S.corollary_checks(t, plan.convention):
        add(Check(cid, lambda p, th=thunk: th(p.strategy, p.trials, p.seed), theta_only=True))

    # current algebra
    for i, j, _, _ in serre_pairs(t):
        for v in ("e", "f"):
            add(Check(f"serre.crit[{i},{j}].{v}", lambda p, i=i, j=j, v=v: H.expr_zero(
                C.serre_expression(ctx.cd, i, j, v), ctx.env, **ctx.kw())))
            add(Check(f"serre-equiv[{i},{j}].{v}", lambda p, i=i, j=j, v=v: _serre_equiv(
                ctx, i, j, v), theta_only=True))
    add(Check("confluence", lambda p: _confluence(ctx)))

    # Hopf algebroid
    add(Check("hopf.moment", lambda p: H.moment_map_check(ctx.cd)))
    add(Check("hopf.moment-axioms", lambda p: H.moment_map_axioms(ctx.cd)))
    add(Check("hopf.bigrade", lambda p: H.bigrade_additivity(ctx.cd, seed=p.seed)))
    add(Check("hopf.tensor", lambda p: H.tensor_checks(ctx.cd, seed=p.seed)))
    for rel in H.quadratic_relations(cd):
        add(Check(f"hopf.delta.{rel[0]}", lambda p, r=rel: H.delta_on_relation(r, ctx.env, **ctx.kw())))
    for i, j, _, _ in serre_pairs(t):
        for v in ("e", "f"):
            add(Check(f"hopf.delta.serre[{i},{j}].{v}", lambda p, i=i, j=j, v=v: H.expr_zero(
                H.coproduct(C.serre_expression(ctx.cd, i, j, v)), ctx.env, **ctx.kw())))
    add(Check("hopf.delta.rule", lambda p: H.delta_commutator_check(ctx.cd, ctx.env, **ctx.kw())))
    for gid, L in H.generators(cd):
        add(Check(f"hopf.coassoc.{gid}", lambda p, L=L: H.coassociativity(L, ctx.env, **ctx.kw())))
        add(Check(f"hopf.counit.{gid}", lambda p, L=L: H.counit_axioms(L, ctx.env, **ctx.kw())))
        add(Check(f"hopf.antipode.{gid}", lambda p, L=L: H.antipode_laws(L, ctx.env, **ctx.kw())))
    for rel in H.quadratic_relations(cd):
        add(Check(f"hopf.antihom.{rel[0]}", lambda p, r=rel: H.antipode_on_relation(
            r, ctx.env, **ctx.kw())))
    add(Check("hopf.p0", lambda p: H.p_zero_hopf_limit(ctx.cd, ctx.env, **ctx.kw())))
    return out


def _all_pairs(fn, cd, pairs, N):
    for i, j in pairs:
        r = fn(cd, i, j, N=N)
        if not r["ok"]:
            return {"ok": False, "witness": {k: v for k, v in r.items() if k != "ok"}}
    return {"ok": True}


def _serre_equiv(ctx, i, j, v):
    from .currents import (compare_combinations, elliptic_serre_expression, premultiplier,
                           render_key, serre_expression)
    x = serre_expression(ctx.cd, i, j, v)
    y = elliptic_serre_expression(ctx.cd, i, j, v)
    pre = premultiplier(ctx.cd, i, j, v)
    fields = [ExactField()] if ctx.plan.strategy == "exact" else \
        (PointField(ctx.plan.seed, t) for t in range(ctx.plan.trials))
    for F in fields:
        for _ in range(8):
            try:
                r = compare_combinations(x, y, pre, F, ctx.env)
                break
            except ZeroDivisionError:
                if F.exact:
                    raise
                F = F.retry()
        else:
            raise CASError("evaluation point hits a pole after max retries")
        if r is not None:
            w = {"word": render_key(r[0]), "order": r[1].first_nonzero()}
            if not F.exact:
                w["point"] = F.describe()
            return {"ok": False, "witness": w}
    return {"ok": True}


def _confluence(ctx, samples=400):
    """Seeded sample of length <= 4 words (the exhaustive run is in the tests)."""
    from .currents import confluence_check, confluence_words
    words = list(confluence_words(ctx.cd, 4))
    rng = random.Random(ctx.plan.seed)
    pick = rng.sample(words, min(samples, len(words)))
    r = confluence_check(ctx.cd, ctx.env, pick, PointField(ctx.plan.seed, 0))
    out = {"ok": r["ok"]}
    if not r["ok"]:
        out["witness"] = r["witness"]
    return out


# ---------------------------------------------------------------- selection

def matches(selector: str, cid: str) -> bool:
    if selector == "all" or selector == cid:
        return True
    return cid.startswith(selector) and cid[len(selector)] in ".["


def select(registry, selectors):
    picked = [c for c in registry if any(matches(s, c.id) for s in selectors)]
    unknown = [s for s in selectors if not any(matches(s, c.id) for c in registry)]
    return picked, unknown


def run_check(check: Check, plan: CheckPlan) -> dict:
    rec = {"id": check.id, "strategy": plan.tag()}
    if check.theta_only and plan.mode != "theta":
        rec.update(status="skipped", elapsed=0.0, witness={"reason": "theta-only check in generic mode"})
        return rec
    t0 = time.perf_counter()
    try:
        r = check.run(plan)
    except CASError as exc:
        r = {"ok": False, "witness": {"error": str(exc)}}
    rec["elapsed"] = time.perf_counter() - t0
    rec["status"] = "pass" if r["ok"] else "fail"
    rec["witness"] = r.get("witness") if not r["ok"] else None
    return rec
