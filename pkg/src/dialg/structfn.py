"""Structure functions g_ij(x; p): theta specialization, generic symbols,
the Ding-Iohara condition and the exchange-scalar series identities.

All series are realized inside a field (exact or point) and cached on it.
A nome argument ``m`` (a Mono in the u-variables, or None) selects
g_ij(x; p*m); ``None`` selects the p -> 0 limit.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .cas import CASError, ExactField, Mono, PSeries
from .rootdata import CartanData

ONE = Mono()


def qmono(x) -> Mono:
    """q^x as a Mono in v = q^{1/6}."""
    e = Fraction(x) * 6
    if e.denominator != 1:
        raise CASError(f"q^{x} is off the (1/6)Z lattice")
    return Mono.var("v", int(e))


def ustar(u: str = "u") -> Mono:
    """p*/p = q^{-2c} = u^{-4}."""
    return Mono.var(u, -4)


def _linear(F, a, k, N):
    """1 - a p^k as a PSeries (a a field element)."""
    c = [F.zero] * (N + 1)
    c[0] = F.one
    if k == 0:
        c[0] = F.one - a
    elif k <= N:
        c[k] = -a
    return PSeries(F, c)


def qpoch(F, x: Mono, N: int, start: int = 0) -> PSeries:
    """(x p^start; p)_inf truncated at p^N."""
    xv = F.mono(x)
    out = PSeries.one(F, N)
    for k in range(start, N + 1):
        out = out * _linear(F, xv, k, N)
    return out


def theta_series(F, x: Mono, N: int) -> PSeries:
    """theta(x; p) = (x; p)_inf (p/x; p)_inf."""
    key = ("theta", x, N)
    hit = F.cache.get(key)
    if hit is None:
        hit = qpoch(F, x, N) * qpoch(F, x.inv(), N, start=1)
        F.cache[key] = hit
    return hit


def gamma_series(F, x: Mono, qpow, N: int) -> PSeries:
    """gamma(x; q^qpow, p) = (q^qpow x; p)_inf / (p q^-qpow x; p)_inf."""
    Q = qmono(qpow)
    return qpoch(F, Q * x, N) * qpoch(F, Q.inv() * x, N, start=1).invert()


def wtgamma_series(F, x: Mono, qpow, N: int, nome: Mono | None = None) -> PSeries:
    """gamma~(x; q^qpow, p) = (p q x; p)_inf / (p q^-1 x; p)_inf, optionally at p*nome."""
    key = ("wtg", x, Fraction(qpow), N)
    s = F.cache.get(key)
    if s is None:
        Q = qmono(qpow)
        s = qpoch(F, Q * x, N, start=1) * qpoch(F, Q.inv() * x, N, start=1).invert()
        F.cache[key] = s
    if nome is not None and not nome.is_one():
        s = s.nome_scale(F.mono(nome))
    return s


# ------------------------------------------------------------ structure set

@dataclass
class StructureFunctionSet:
    cd: CartanData
    mode: str = "theta"  # or "generic"
    N: int = 4

    def __post_init__(self):
        if self.mode not in ("theta", "generic"):
            raise CASError(f"unknown structure mode {self.mode!r}")
        if not 0 <= self.N <= 8:
            raise CASError("truncation order must lie in [0, 8]")

    # -- theta data
    def G_plus(self, F, i, j, x: Mono) -> PSeries:
        b = self.cd.b(i, j)
        return theta_series(F, qmono(b) * x, self.N) * F.mono(qmono(-b))

    def G_minus(self, F, i, j, x: Mono) -> PSeries:
        return theta_series(F, qmono(-self.cd.b(i, j)) * x, self.N)

    # -- generic data
    @staticmethod
    def _canonical(i, j, x: Mono):
        """Orientation representative under g_ji(1/x) = 1/g_ij(x)."""
        xi = x.inv()
        if (i, j, x.sort_key()) <= (j, i, xi.sort_key()):
            return (i, j, x), False
        return (j, i, xi), True

    @staticmethod
    def _gname(i, j, x: Mono, tag: str) -> str:
        return f"g{i}.{j}[{x!r}]{tag}"

    def _generic(self, F, i, j, x: Mono) -> PSeries:
        if i == j and x.is_one():
            # unitarity forces g_ii(1)^2 = 1; the theta value is -1
            return PSeries.const(F, -F.one, self.N)
        (ci, cj, cx), flip = self._canonical(i, j, x)
        key = ("gen", ci, cj, cx, self.N)
        s = F.cache.get(key)
        if s is None:
            gbar = F.symbol(self._gname(ci, cj, cx, "bar"))
            c = [gbar] + [gbar * F.symbol(self._gname(ci, cj, cx, f"c{k}")) for k in range(1, self.N + 1)]
            s = PSeries(F, c)
            F.cache[key] = s
        if flip:
            fkey = ("geninv", ci, cj, cx, self.N)
            t = F.cache.get(fkey)
            if t is None:
                t = s.invert()
                F.cache[fkey] = t
            return t
        return s

    def g_base(self, F, i, j, x: Mono) -> PSeries:
        """g_ij(x; p)."""
        key = ("g", self.mode, self.cd.convention, self.cd.rtype, i, j, x, self.N)
        s = F.cache.get(key)
        if s is None:
            if self.mode == "theta":
                s = self.G_plus(F, i, j, x) * self.G_minus(F, i, j, x).invert()
            else:
                s = self._generic(F, i, j, x)
            F.cache[key] = s
        return s

    def g(self, F, i, j, x: Mono, nome: Mono | None = ONE) -> PSeries:
        """g_ij(x; p*nome); nome None gives the constant series gbar_ij(x)."""
        base = self.g_base(F, i, j, x)
        if nome is None:
            return PSeries.const(F, base.c[0], self.N)
        if nome.is_one():
            return base
        key = ("gn", self.mode, self.cd.convention, self.cd.rtype, i, j, x, nome, self.N)
        s = F.cache.get(key)
        if s is None:
            s = base.nome_scale(F.mono(nome))
            F.cache[key] = s
        return s

    def gbar(self, F, i, j, x: Mono):
        return self.g_base(F, i, j, x).c[0]

    def gstar(self, F, i, j, x: Mono, u: str = "u") -> PSeries:
        return self.g(F, i, j, x, ustar(u))

    def gtilde(self, F, i, j, x: Mono, nome: Mono = ONE) -> PSeries:
        """g~_ij = g / gbar at nome p*nome."""
        return self.g(F, i, j, x, nome) * F.inv(self.gbar(F, i, j, x))

    def gtilde_star(self, F, i, j, x: Mono, u: str = "u", nome: Mono = ONE) -> PSeries:
        """g~*_ij = gbar / g*."""
        return self.g(F, i, j, x, nome * ustar(u)).invert() * self.gbar(F, i, j, x)


def gtilde_factors(s: StructureFunctionSet, F, i, j, x: Mono):
    return s.gtilde(F, i, j, x), s.gtilde_star(F, i, j, x)


# ------------------------------------------------------------------ checks

def check_di_condition(s: StructureFunctionSet, F=None, N=None, pairs=None) -> dict:
    """g_ij(z^-1) g_ji(z) = 1 + O(p^{N+1}) for every pair."""
    F = F or ExactField()
    z = Mono.var("z")
    for i in s.cd.nodes:
        for j in s.cd.nodes:
            if pairs is not None and (i, j) not in pairs:
                continue
            prod = s.g(F, i, j, z.inv()) * s.g(F, j, i, z) - 1
            k = prod.first_nonzero()
            if k is not None:
                return {"ok": False, "pair": [i, j], "order": k, "residual": repr(prod.c[k])}
    return {"ok": True}


class _Bi:
    """Truncated series in p and x, Laurent in x with the negative powers
    controlled by the p-degree.  Only used to check the exchange-scalar
    computation, where an x-expansion of both sides is unavoidable."""

    def __init__(self, F, N, M, terms=None):
        self.F, self.N, self.M = F, N, M
        self.t = terms or {}

    def keep(self, k, n):
        return k <= self.N and n <= self.M + (self.N - k)

    def __add__(self, o):
        out = dict(self.t)
        for key, c in o.t.items():
            out[key] = out[key] + c if key in out else c
        return _Bi(self.F, self.N, self.M, out)

    def __mul__(self, o):
        if not isinstance(o, _Bi):
            return _Bi(self.F, self.N, self.M, {k: c * o for k, c in self.t.items()})
        out = {}
        for (k1, n1), c1 in self.t.items():
            for (k2, n2), c2 in o.t.items():
                k, n = k1 + k2, n1 + n2
                if self.keep(k, n):
                    c = c1 * c2
                    out[(k, n)] = out[(k, n)] + c if (k, n) in out else c
        return _Bi(self.F, self.N, self.M, out)

    def exp(self):
        F = self.F
        out = _Bi(F, self.N, self.M, {(0, 0): F.one})
        term = out
        for m in range(1, 2 * self.N + self.M + 2):
            term = term * self * F.const(mpq(1, m))
            if not term.t:
                break
            out = out + term
        return out

    def inverse(self):
        """1/(1 - T) with T = 1 - self; requires the (0,0) term to be 1."""
        F = self.F
        T = {k: -c for k, c in self.t.items() if k != (0, 0)}
        c0 = self.t.get((0, 0), F.zero)
        if not F.is_zero(c0 - F.one):
            raise CASError("bi-series inverse needs a unit constant term")
        T = _Bi(F, self.N, self.M, T)
        out = _Bi(F, self.N, self.M, {(0, 0): F.one})
        term = out
        for _ in range(2 * self.N + self.M + 2):
            term = term * T
            if not term.t:
                break
            out = out + term
        return out

    def equal_upto(self, o):
        F = self.F
        keys = set(self.t) | set(o.t)
        for key in sorted(keys):
            if key[1] > self.M:
                continue
            a = self.t.get(key, F.zero)
            b = o.t.get(key, F.zero)
            if not F.is_zero(a - b):
                return key
        return None


def _bi_linear(F, N, M, coef, k, n):
    """1 - coef p^k x^n."""
    t = {(0, 0): F.one}
    key = (k, n)
    t[key] = t[key] - coef if key in t else -coef
    return _Bi(F, N, M, t)


def _bi_theta(F, N, M, a: Mono, nome: Mono):
    """theta(a x; p*nome) as a bi-series in (p, x); a has no x."""
    out = _Bi(F, N, M, {(0, 0): F.one})
    for k in range(0, N + 1):
        out = out * _bi_linear(F, N, M, F.mono(a * nome ** k), k, 1)
    for k in range(1, N + 1):
        out = out * _bi_linear(F, N, M, F.mono(a.inv() * nome ** k), k, -1)
    return out


def _geo(F, base, step, N, n):
    """sum_k base^k p^{k*n} as PSeries (1/(1-base p^n))."""
    c = [F.zero] * (N + 1)
    k = 0
    while k * n <= N:
        c[k * n] = F.mono(base ** k)
        k += 1
    return PSeries(F, c)


def lemma_pef(cd: CartanData, i, j, N=4, M=4, F=None) -> dict:
    """C(x) from the exponential formula equals g*_ij(q^{-c/2} x).

    C(x) = q^{-b} exp[-sum 1/n (q^{bn}-q^{-bn})/(1-p*^n) (q^{-c/2}x)^n]
                  exp[ sum 1/n (q^{bn}-q^{-bn})/(1-p*^n) (p* q^{c/2}/x)^n].
    Both sides are expanded in x up to x^M at every p-order <= N.
    """
    F = F or ExactField()
    b = cd.b(i, j)
    pst = ustar()
    u = Mono.var("u")
    S = {}
    for n in range(1, M + N + 1):
        qn = (F.mono(qmono(b * n)) - F.mono(qmono(-b * n))) * F.const(mpq(1, n))
        for k in range(0, N // 1 + 1):  # 1/(1-p*^n) = sum p^{nk} u^{-4nk}
            if n * k > N:
                break
            geo = F.mono(pst ** (n * k))
            # first exponent: x^n, p^{nk}
            key = (n * k, n)
            if n <= M + N:
                val = -(qn * geo * F.mono(u.inv() ** n))
                S[key] = S[key] + val if key in S else val
            # second exponent: p^{n + nk} x^{-n}
            key2 = (n + n * k, -n)
            if key2[0] <= N:
                val2 = qn * geo * F.mono(pst ** n * u ** n)
                S[key2] = S[key2] + val2 if key2 in S else val2
    Sb = _Bi(F, N, M, {k: c for k, c in S.items() if k[0] <= N and k[1] <= M + N - k[0]})
    C = Sb.exp() * F.mono(qmono(-b))
    # g*(u^{-1} x) = q^{-b} theta(q^b u^{-1} x; p*) / theta(q^{-b} u^{-1} x; p*)
    Gp = _bi_theta(F, N, M, qmono(b) * u.inv(), pst) * F.mono(qmono(-b))
    Gm = _bi_theta(F, N, M, qmono(-b) * u.inv(), pst)
    rhs = Gp * Gm.inverse()
    bad = C.equal_upto(rhs)
    return {"ok": bad is None, "pair": [i, j], **({} if bad is None else {"first_failure": list(bad)})}


def _C_pp(F, b, x: Mono, N):
    """C_ji(x) of the psi-psi exchange as an honest p-series."""
    pst = ustar()
    S = PSeries.zero(F, N)
    for n in range(1, N + 1):
        qn = (F.mono(qmono(b * n)) - F.mono(qmono(-b * n))) * F.const(mpq(1, n))
        cn = qn * (F.one - F.mono(pst ** n)) * F.mono(x ** n)
        t = [F.zero] * (N + 1)
        t[n] = cn
        S = S + PSeries(F, t) * _geo(F, Mono(), None, N, n) * _geo(F, pst ** n, None, N, n)
    return S.exp()


def lemma_pp(cd: CartanData, i, j, N=4, F=None) -> dict:
    """C_ji(x) C_ij(x^-1)^-1 = g*_ij(x)/g_ij(x)."""
    F = F or ExactField()
    s = StructureFunctionSet(cd, "theta", N)
    x = Mono.var("z")
    lhs = _C_pp(F, cd.b(j, i), x, N) * _C_pp(F, cd.b(i, j), x.inv(), N).invert()
    rhs = s.gstar(F, i, j, x) * s.g(F, i, j, x).invert()
    d = lhs - rhs
    k = d.first_nonzero()
    return {"ok": k is None, "pair": [i, j], **({} if k is None else {"first_failure": k})}


def lemma_ee(cd: CartanData, i, j, N=4, F=None, literal=False) -> dict:
    """-x G+*(x^-1) = G-*(x), the step turning the theta form of the e-e
    relation into the G-quotient form.

    ``literal=True`` tests the printed variant x^-1 G+*(x^-1) = G-*(x)
    instead, which already fails at p^0 (theta(1/y) = -theta(y)/y).
    """
    F = F or ExactField()
    s = StructureFunctionSet(cd, "theta", N)
    x = Mono.var("z")
    pst = F.mono(ustar())
    gp = s.G_plus(F, i, j, x.inv()).nome_scale(pst)
    lhs = gp * F.mono(x.inv()) if literal else -(gp * F.mono(x))
    rhs = s.G_minus(F, i, j, x).nome_scale(pst)
    k = (lhs - rhs).first_nonzero()
    return {"ok": k is None, "pair": [i, j], **({} if k is None else {"first_failure": k})}


def verify_exchange_scalars(cd: CartanData, N=4, pairs=None, F=None) -> dict:
    F = F or ExactField()
    pairs = pairs or [(i, j) for i in cd.nodes for j in cd.nodes]
    out = {}
    for name, fn in (("pef", lambda i, j: lemma_pef(cd, i, j, N, N, F)),
                     ("pp", lambda i, j: lemma_pp(cd, i, j, N, F)),
                     ("ee", lambda i, j: lemma_ee(cd, i, j, N, F))):
        for i, j in pairs:
            r = fn(i, j)
            if not r["ok"]:
                out[name] = r
                break
        else:
            out[name] = {"ok": True}
    return out
