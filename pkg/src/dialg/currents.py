"""Words in the generating currents, exchange sorting, Serre-type relations
and the formal delta calculus of the e-f commutator.

Coefficients stay symbolic while words are rearranged: every exchange
scalar, h-function and gamma~ factor is an *atom* of a :class:`Coef`, and
atoms are only realized as p-series inside a field at the very end.  That
keeps sorting independent of the field and lets one expression be checked
at many sample points.

A term of an :class:`Expr` is ``(coef, delta, legs)``: ``legs`` is a tuple
of words (one word for the algebra itself, two or three for tensor
powers) and ``delta`` is either None or the normalized argument X of a
formal delta function delta(X).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from gmpy2 import mpq

from .cas import CASError, LaurentPoly, Mono, PSeries, UNIVERSE, decode
from .rootdata import CartanData, q_binomial
from .serre import HFunction, group_elements, h_function, sym
from .structfn import StructureFunctionSet, qmono, wtgamma_series

LABELS = ("z", "z1", "z2", "z3", "z4", "w")
KINDS = ("K+", "K-", "psi+", "psi-", "e", "f")
KIND_RANK = {k: r for r, k in enumerate(KINDS)}
ONE = Mono()


class ExchangeError(CASError):
    pass


def msubst(m: Mono, mapping: dict) -> Mono:
    """Simultaneous substitution of unit monomials into a Mono."""
    out, extra = m, Mono()
    for name, img in mapping.items():
        e = m.degree_in(name)
        if e:
            out = out * Mono.var(name, -e)
            extra = extra * img ** e
    return out * extra


def var(name: str, e: int = 1) -> Mono:
    return Mono.var(name, e)


# ------------------------------------------------------------------ letters

@dataclass(frozen=True)
class Letter:
    kind: str
    node: int
    arg: Mono = ONE
    power: int = 1

    def __post_init__(self):
        if self.kind not in KIND_RANK:
            raise CASError(f"unknown current kind {self.kind!r}")
        if self.kind in ("e", "f") and self.power != 1:
            raise CASError("e and f currents are not invertible")

    @property
    def label(self):
        """(label index, exponent) of the variable the argument runs over."""
        for idx, name in enumerate(LABELS):
            e = self.arg.degree_in(name)
            if e:
                return idx, e
        return -1, 0

    def sort_key(self):
        idx, e = self.label
        shift = self.arg * Mono.var(LABELS[idx], -e) if idx >= 0 else self.arg
        return (KIND_RANK[self.kind], self.node, -idx, e, shift.sort_key())

    def inv(self) -> "Letter":
        return Letter(self.kind, self.node, self.arg, -self.power)

    def subst(self, mapping: dict) -> "Letter":
        return Letter(self.kind, self.node, msubst(self.arg, mapping), self.power)

    def __repr__(self):
        arg = "" if self.kind.startswith("K") else f"({self.arg!r})"
        pw = "" if self.power == 1 else "^-1"
        return f"{self.kind}{self.node}{arg}{pw}"


def e(i, x): return Letter("e", i, x)
def f(i, x): return Letter("f", i, x)
def psi(sign, i, x, power=1): return Letter("psi" + sign, i, x, power)
def K(sign, i, power=1): return Letter("K" + sign, i, ONE, power)


def render_word(word) -> str:
    return " ".join(map(repr, word)) or "1"


# ------------------------------------------------------------ coefficients

def _subst_atom(atom, mapping):
    tag = atom[0]
    if tag == "g":
        _, i, j, x, nome = atom
        return ("g", i, j, msubst(x, mapping), None if nome is None else msubst(nome, mapping))
    if tag == "wtg":
        _, x, qp, nome = atom
        return ("wtg", msubst(x, mapping), qp, msubst(nome, mapping))
    if tag == "h":
        _, kind, i, j, xs = atom
        return ("h", kind, i, j, tuple(msubst(x, mapping) for x in xs))
    if tag == "poly":
        return ("poly", atom[1].subst_many(mapping))
    raise CASError(f"bad atom {atom!r}")


def _atom_order(item):
    return repr(item[0])


class Coef:
    """mono * prod(atom ** power); immutable."""

    __slots__ = ("mono", "atoms")

    def __init__(self, mono: Mono = ONE, atoms=None):
        self.mono = mono
        self.atoms = atoms or {}

    @classmethod
    def atom(cls, atom, power=1) -> "Coef":
        return cls(ONE, {atom: power})

    @classmethod
    def const(cls, c) -> "Coef":
        return cls(Mono(mpq(c)))

    def __mul__(self, other):
        if isinstance(other, Mono):
            return Coef(self.mono * other, self.atoms)
        if not isinstance(other, Coef):
            return Coef(self.mono * mpq(other), self.atoms)
        if not other.atoms:
            return Coef(self.mono * other.mono, self.atoms)
        atoms = dict(self.atoms)
        for a, p in other.atoms.items():
            q = atoms.get(a, 0) + p
            if q:
                atoms[a] = q
            else:
                atoms.pop(a, None)
        return Coef(self.mono * other.mono, atoms)

    __rmul__ = __mul__

    def __neg__(self):
        return Coef(self.mono * -1, self.atoms)

    def __pow__(self, n: int):
        if n == 1:
            return self
        return Coef(self.mono ** n, {a: p * n for a, p in self.atoms.items()})

    def inv(self):
        return self ** -1

    def subst(self, mapping: dict) -> "Coef":
        out = Coef(msubst(self.mono, mapping))
        for a, p in self.atoms.items():
            out = out * Coef.atom(_subst_atom(a, mapping), p)
        return out

    def map_nomes(self, fn) -> "Coef":
        """Apply fn to every nome of g / gamma~ atoms (None stays None)."""
        atoms = {}
        for a, p in self.atoms.items():
            if a[0] == "g" and a[4] is not None:
                a = a[:4] + (fn(a[4]),)
            elif a[0] == "wtg":
                a = a[:3] + (fn(a[3]),)
            atoms[a] = atoms.get(a, 0) + p
        return Coef(self.mono, {a: p for a, p in atoms.items() if p})

    def p_zero(self) -> "Coef":
        """The p -> 0 limit: g -> gbar, gamma~ -> 1."""
        atoms = {}
        for a, p in self.atoms.items():
            if a[0] == "wtg":
                continue
            if a[0] == "g":
                a = a[:4] + (None,)
            atoms[a] = atoms.get(a, 0) + p
        return Coef(self.mono, {a: p for a, p in atoms.items() if p})

    def realize(self, F, env: "Env") -> PSeries:
        out = PSeries.const(F, F.mono(self.mono), env.N)
        for a, p in sorted(self.atoms.items(), key=_atom_order):
            out = out * env.atom_series(F, a, p)
        return out

    def __repr__(self):
        parts = [repr(self.mono)] if not self.mono.is_one() or not self.atoms else []
        for a, p in sorted(self.atoms.items(), key=_atom_order):
            parts.append(_render_atom(a) + ("" if p == 1 else f"^{p}"))
        return "*".join(parts)


def _render_atom(a):
    if a[0] == "g":
        _, i, j, x, nome = a
        if nome is None:
            return f"gbar{i}{j}({x!r})"
        return f"g{i}{j}({x!r};p*{nome!r})" if not nome.is_one() else f"g{i}{j}({x!r})"
    if a[0] == "wtg":
        _, x, qp, nome = a
        return f"wtgamma({x!r};q^{qp},p*{nome!r})"
    if a[0] == "h":
        return f"{a[1]}_{a[2]}{a[3]}"
    return f"({a[1]!r})"


def g_atom(i, j, x, nome=ONE, power=1) -> Coef:
    return Coef.atom(("g", i, j, x, nome), power)


def gtilde_star(i, j, x, u="u", nome=ONE) -> Coef:
    """gbar / g* with g* at nome * u^-4."""
    return g_atom(i, j, x, None) * g_atom(i, j, x, nome * var(u, -4), -1)


def gtilde(i, j, x, nome=ONE) -> Coef:
    """g / gbar."""
    return g_atom(i, j, x, nome) * g_atom(i, j, x, None, -1)


def wtg_atom(x, qpow, nome=ONE, power=1) -> Coef:
    return Coef.atom(("wtg", x, Fraction(qpow), nome), power)


def poly_atom(p: LaurentPoly, power=1) -> Coef:
    if len(p.t) == 1:
        (k, c), = p.t.items()
        return Coef(Mono(c, k) ** power)
    return Coef.atom(("poly", p), power)


# --------------------------------------------------------------- environment

class Env:
    """Structure functions plus h-functions: everything atoms refer to."""

    def __init__(self, s: StructureFunctionSet, h: dict | None = None):
        self.s = s
        self.cd: CartanData = s.cd
        self.N = s.N
        self.h = {k: h_function(k) for k in ("h2", "h3", "h41", "h42")}
        if h:
            self.h.update(h)
        self.tag = (s.mode, s.cd.convention, s.cd.rtype, s.N,
                    tuple((k, id(v)) for k, v in sorted(self.h.items())))

    def atom_series(self, F, a, p) -> PSeries:
        key = ("atom", self.tag, a, p)
        hit = F.cache.get(key)
        if hit is not None:
            return hit
        if p != 1 and p != -1:
            out = self.atom_series(F, a, 1) ** p
        elif p == -1:
            out = self.atom_series(F, a, 1).invert()
        else:
            out = self._atom(F, a)
        F.cache[key] = out
        return out

    def _atom(self, F, a) -> PSeries:
        tag = a[0]
        if tag == "g":
            _, i, j, x, nome = a
            return self.s.g(F, i, j, x, nome)
        if tag == "wtg":
            _, x, qp, nome = a
            return wtgamma_series(F, x, qp, self.N, nome)
        if tag == "h":
            return PSeries.const(F, self.h_value(F, *a[1:]), self.N)
        if tag == "poly":
            return PSeries.const(F, F.poly(a[1]), self.N)
        raise CASError(f"bad atom {a!r}")

    def h_value(self, F, kind, i, j, xs):
        """h evaluated with g^m_n = gbar_ii(x_m/x_n), g^m_0 = gbar_ij(x_m/x_0)."""
        hf: HFunction = self.h[kind]
        a = hf.arity
        z = xs[a]
        vals = {}
        for m in range(1, a + 1):
            for n in range(m + 1, a + 1):
                vals[sym(m, n)] = self.s.gbar(F, i, i, xs[m - 1] / xs[n - 1])
            vals[sym(m, 0)] = self.s.gbar(F, i, j, xs[m - 1] / z)
        num = _eval_symbols(hf.num, F, vals)
        den = _eval_symbols(hf.den, F, vals)
        out = num * F.inv(den)
        if hf.j_offset:
            out = out + _eval_symbols(hf.j_offset, F, vals)
        return out


def _eval_symbols(poly: LaurentPoly, F, vals: dict):
    names = UNIVERSE.names
    out = F.zero
    for key, c in poly.t.items():
        term = F.const(c)
        for pos, ex in decode(key):
            x = vals[names[pos]]
            term = term * (x ** ex if ex > 0 else F.inv(x) ** (-ex))
        out = out + term
    return out


# ------------------------------------------------------------- expressions

class Expr:
    """A formal combination of (delta-weighted) tensor words."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        self.terms = list(terms)

    @classmethod
    def word(cls, *letters, coef=None, legs=None) -> "Expr":
        if legs is not None:
            return cls([(coef or Coef(), None, tuple(tuple(w) for w in legs))])
        return cls([(coef or Coef(), None, (tuple(letters),))])

    @property
    def nlegs(self):
        return len(self.terms[0][2]) if self.terms else 0

    def __add__(self, other):
        return Expr(self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scale(Coef.const(-1))

    def scale(self, c) -> "Expr":
        return Expr([(c * k, d, w) for k, d, w in self.terms])

    def __mul__(self, other: "Expr") -> "Expr":
        out = []
        for c1, d1, w1 in self.terms:
            for c2, d2, w2 in other.terms:
                if d1 is not None and d2 is not None:
                    raise CASError("a product of two delta functions is not supported")
                out.append((c1 * c2, d1 if d1 is not None else d2,
                            tuple(a + b for a, b in zip(w1, w2))))
        return Expr(out)

    def subst(self, mapping: dict) -> "Expr":
        return Expr([(c.subst(mapping), _dsubst(d, mapping),
                      tuple(tuple(x.subst(mapping) for x in w) for w in legs))
                     for c, d, legs in self.terms])

    def p_zero(self) -> "Expr":
        return Expr([(c.p_zero(), d, w) for c, d, w in self.terms])

    def map_coefs(self, fn) -> "Expr":
        return Expr([(fn(c), d, w) for c, d, w in self.terms])

    def __len__(self):
        return len(self.terms)

    def keys(self):
        return {(d, w) for _, d, w in self.terms}

    def render(self, limit=None) -> str:
        lines = []
        for c, d, legs in self.terms[:limit]:
            body = " (x) ".join(render_word(w) for w in legs)
            dl = f"delta({d[1]!r}) " if d is not None else ""
            lines.append(f"{c!r} : {dl}{body}")
        return "\n".join(lines)


def _dsubst(d, mapping):
    if d is None:
        return None
    if isinstance(d, tuple):
        return ("delta", msubst(d[1], mapping))
    return msubst(d, mapping)


# ----------------------------------------------------- exchange relations

def exchange_scalar(A: Letter, B: Letter, cd: CartanData, u: Mono, m: Mono) -> Coef:
    """c with A B = c B A, in a leg with central charge u = q^{c/2} and nome p*m."""
    ra, rb = KIND_RANK[A.kind], KIND_RANK[B.kind]
    if {A.kind, B.kind} == {"e", "f"}:
        raise ExchangeError(f"{A!r} {B!r}: the e-f relation is not a scalar exchange")
    if ra > rb:
        return exchange_scalar(B, A, cd, u, m).inv()
    base = _forward(A.kind, B.kind, A.node, B.node, A.arg / B.arg, cd, u, m)
    return base ** (A.power * B.power)


def _forward(ka, kb, i, j, x, cd, u, m):
    ms = m * u ** -4
    if ka.startswith("K"):
        sign = 1 if ka == "K+" else -1
        if kb == "e":
            return Coef(qmono(-sign * cd.b(i, j)))
        if kb == "f":
            return Coef(qmono(sign * cd.b(i, j)))
        return Coef()
    if ka == kb and ka in ("psi+", "psi-"):
        return g_atom(i, j, x, ms) * g_atom(i, j, x, m, -1)
    if (ka, kb) == ("psi+", "psi-"):
        return g_atom(i, j, x * u ** -2, ms) * g_atom(i, j, x * u ** 2, m, -1)
    if (ka, kb) == ("psi+", "e"):
        return g_atom(i, j, x * u.inv(), ms)
    if (ka, kb) == ("psi+", "f"):
        return g_atom(i, j, x * u, m, -1)
    if (ka, kb) == ("psi-", "e"):
        return g_atom(i, j, x * u, ms)
    if (ka, kb) == ("psi-", "f"):
        return g_atom(i, j, x * u.inv(), m, -1)
    if (ka, kb) == ("e", "e"):
        return g_atom(i, j, x, ms)
    if (ka, kb) == ("f", "f"):
        return g_atom(i, j, x, m, -1)
    raise ExchangeError(f"no exchange rule for {ka}, {kb}")


def leg_contexts(n: int):
    """(u_k, nome_k) per leg: leg k sees p * prod_{l>k} u_l^-4."""
    if n == 1:
        return [(var("u"), ONE)]
    us = [var(f"u{k + 1}") for k in range(n)]
    out = []
    for k in range(n):
        m = ONE
        for l in range(k + 1, n):
            m = m * us[l] ** -4
        out.append((us[k], m))
    return out


def _cancels(A: Letter, B: Letter) -> bool:
    return A.kind == B.kind and A.node == B.node and A.arg == B.arg and A.power == -B.power


def _candidates(w):
    """Indices i where w[i], w[i+1] cancel or are out of order."""
    out = []
    for i in range(len(w) - 1):
        A, B = w[i], w[i + 1]
        if _cancels(A, B) or A.sort_key() > B.sort_key():
            out.append(i)
    return out


def _schedule(kind, seed=0):
    if kind == "first":
        return lambda c: c[0]
    if kind == "last":
        return lambda c: c[-1]
    rng = random.Random(seed)
    return lambda c: rng.choice(c)


def qdiff_inv() -> Coef:
    """1/(q - q^-1), the normalization of the e-f commutator."""
    return poly_atom(qmono(1).poly() - qmono(-1).poly(), -1)


def sort_leg(word, cd, u, m, allow_ef=False, schedule="first", seed=0):
    """Sort one leg; returns a list of (coef, delta, word)."""
    pick = _schedule(schedule, seed)
    stack = [(Coef(), None, list(word))]
    done = []
    while stack:
        c, dl, w = stack.pop()
        cand = _candidates(w)
        if not cand:
            done.append((c, dl, tuple(w)))
            continue
        i = pick(cand)
        A, B = w[i], w[i + 1]
        if _cancels(A, B):
            stack.append((c, dl, w[:i] + w[i + 2:]))
            continue
        swapped = w[:i] + [B, A] + w[i + 2:]
        if A.kind == "f" and B.kind == "e":
            if not allow_ef:
                raise ExchangeError(f"{A!r} {B!r}: the e-f relation is not a scalar exchange")
            stack.append((c, dl, swapped))
            if A.node == B.node:
                # f(y) e(x) = e(x) f(y) - [e(x), f(y)]
                if dl is not None:
                    raise CASError("a second delta function would appear")
                k = qdiff_inv()
                x, y = B.arg, A.arg
                stack.append((-(c * k), x * u ** -2 / y,
                              w[:i] + [psi("-", A.node, u * y)] + w[i + 2:]))
                stack.append((c * k, x * u ** 2 / y,
                              w[:i] + [psi("+", A.node, u * x)] + w[i + 2:]))
            continue
        stack.append((c * exchange_scalar(A, B, cd, u, m), dl, swapped))
    return done


def exchange_sort(x: Expr, cd: CartanData, allow_ef=False, schedule="first", seed=0) -> Expr:
    """Sort every leg of every term to canonical order, leg by leg."""
    out = []
    for c0, d0, legs in x.terms:
        ctx = leg_contexts(len(legs))
        partial = [(c0, d0, ())]
        for k, w in enumerate(legs):
            u, m = ctx[k]
            nxt = []
            for c, d, done in partial:
                for c2, d2, w2 in sort_leg(w, cd, u, m, allow_ef, schedule, seed):
                    if d is not None and d2 is not None:
                        raise CASError("a second delta function would appear")
                    nxt.append((c * c2, d if d2 is None else d2, done + (w2,)))
            partial = nxt
        out.extend(partial)
    return normalize_deltas(Expr(out), cd, allow_ef, schedule, seed)


def normalize_deltas(x: Expr, cd, allow_ef=False, schedule="first", seed=0) -> Expr:
    """delta(X) F(z, w) = delta(X) F(z(w), w): solve X = 1 for its first
    label, substitute, and re-sort.  Normalized deltas are ("delta", X)."""
    out = []
    for c, d, legs in x.terms:
        if d is None or isinstance(d, tuple):
            out.append((c, d, legs))
            continue
        name, sign = _delta_pivot(d)
        X = d if sign > 0 else d.inv()
        mapping = {name: (X * var(name, -1)).inv()}
        sub = Expr([(c.subst(mapping), None, tuple(tuple(l.subst(mapping) for l in w) for w in legs))])
        for c2, d2, l2 in exchange_sort(sub, cd, allow_ef, schedule, seed).terms:
            if d2 is not None:
                raise CASError("a second delta function would appear")
            out.append((c2, ("delta", X), l2))
    return Expr(out)


def _delta_pivot(d: Mono):
    for name in LABELS:
        ex = d.degree_in(name)
        if ex in (1, -1):
            return name, ex
    raise CASError(f"delta argument {d!r} has no unit label exponent")


# --------------------------------------------------------------- realization

def collect(x: Expr, F, env: Env) -> dict:
    """key -> PSeries: coefficient sums per sorted word."""
    out = {}
    for c, d, legs in x.terms:
        key = (d, legs)
        s = c.realize(F, env)
        prev = out.get(key)
        out[key] = s if prev is None else prev + s
    return out


def zero_residual(x: Expr, F, env: Env):
    """None when every collected coefficient vanishes, else (key, series)."""
    for key, s in sorted(collect(x, F, env).items(), key=lambda kv: _key_order(kv[0])):
        if not s.is_zero():
            return key, s
    return None


def _key_order(key):
    d, legs = key
    return (repr(d), tuple(tuple(l.sort_key() for l in w) for w in legs))


def render_key(key) -> str:
    d, legs = key
    body = " (x) ".join(render_word(w) for w in legs)
    return (f"delta({_dshow(d)}) " if d is not None else "") + body


def _dshow(d):
    return repr(d[1]) if isinstance(d, tuple) else repr(d)


# ----------------------------------------------------------- Serre relations

def _zs(a):
    return [var(f"z{m}") for m in range(1, a + 1)]


def h_kinds(a: int) -> list:
    """Coefficient kind for each s = 0..a (None means 1)."""
    if a == 2:
        return [None, "h2", None]
    if a == 3:
        return [None, "h3", "h3", None]
    if a == 4:
        return [None, "h41", "h42", "h41", None]
    raise CASError(f"no Serre relation of arity {a}")


def _phi(variant, i, j, a, mirrored):
    """The seed function Phi (e) or Psi (f) of slot arguments xs."""
    kinds = h_kinds(a)
    z = var("z")

    def factor(x):
        if variant == "e":
            return gtilde_star(i, j, x)
        if mirrored:
            return g_atom(i, j, x, None) * g_atom(i, j, x, ONE, -1)  # gbar / g
        return gtilde(i, j, x)

    def phi(xs):
        terms = []
        for s in range(a + 1):
            c = Coef.const((-1) ** s)
            if kinds[s]:
                c = c * Coef.atom(("h", kinds[s], i, j, tuple(xs) + (z,)))
            for mm in range(s, a):
                c = c * factor(xs[mm] / z)
            L = e if variant == "e" else f
            if variant == "f" and mirrored:
                word = [L(i, x) for x in xs[:s]] + [L(j, z)] + [L(i, x) for x in xs[s:]]
            else:
                word = ([L(i, x) for x in reversed(xs[s:])] + [L(j, z)]
                        + [L(i, x) for x in reversed(xs[:s])])
            terms.append((c, None, (tuple(word),)))
        return terms

    return phi


def _twist_factor(variant, i, mirrored):
    if variant == "e":
        return lambda x, y: gtilde_star(i, i, x / y)
    if mirrored:
        return lambda x, y: g_atom(i, i, x / y, None) * g_atom(i, i, x / y, ONE, -1)
    return lambda x, y: gtilde(i, i, x / y)


def _twisted(word, phi, xs, fac):
    if not word:
        return phi(xs)
    r = word[0]
    ys = list(xs)
    ys[r - 1], ys[r] = ys[r], ys[r - 1]
    c = fac(xs[r - 1], xs[r])
    return [(c * k, d, w) for k, d, w in _twisted(word[1:], phi, ys, fac)]


def serre_expression(cd: CartanData, i: int, j: int, variant: str = "e") -> Expr:
    """The algebroid Serre-type relation sum_sigma sigma(Phi) (or Psi).

    The e form and the arity-2 f form put e_j after the last s slots read
    right to left; the arity 3 and 4 f forms are mirrored and twisted by
    gbar/g."""
    a = 1 - cd.a(i, j)
    if a < 2:
        raise CASError(f"({i},{j}) is not a Serre pair")
    mirrored = variant == "f" and a >= 3
    phi = _phi(variant, i, j, a, mirrored)
    fac = _twist_factor(variant, i, mirrored)
    xs = _zs(a)
    terms = []
    for word, _perm, _cocycle in group_elements(a):
        terms.extend(_twisted(word, phi, xs, fac))
    return Expr(terms)


def elliptic_serre_expression(cd: CartanData, i: int, j: int, variant: str = "e") -> Expr:
    """The elliptic Serre-type relation: a double sum over S_a and s = 0..a
    with gamma~ coefficients (at p* for e, at p for f)."""
    a = 1 - cd.a(i, j)
    if a < 2:
        raise CASError(f"({i},{j}) is not a Serre pair")
    sign = 1 if variant == "e" else -1
    nome = var("u", -4) if variant == "e" else ONE
    bii, bij = cd.b(i, i), cd.b(i, j)
    zs, w = _zs(a), var("z")
    L = e if variant == "e" else f
    terms = []
    for perm in permutations(range(a)):
        zp = [zs[k] for k in perm]
        base = Coef()
        for m in range(a):
            for n in range(m + 1, a):
                base = base * wtg_atom(zp[n] / zp[m], sign * bii, nome)
        for s in range(a + 1):
            c = base * Coef.const((-1) ** s) * poly_atom(q_binomial(a, s, cd.d(i)))
            for m in range(s):
                c = c * wtg_atom(w / zp[m], sign * bij, nome)
            for m in range(s, a):
                c = c * wtg_atom(zp[m] / w, sign * bij, nome)
            word = [L(i, x) for x in zp[:s]] + [L(j, w)] + [L(i, x) for x in zp[s:]]
            terms.append((c, None, (tuple(word),)))
    return Expr(terms)


def premultiplier(cd: CartanData, i: int, j: int, variant: str = "e") -> Coef:
    """gamma~ factor P with P * (algebroid relation) = (elliptic relation)
    word by word in the free algebra.

    P is the product of the gamma~ denominators that appear when each gtilde
    factor is written as a gamma~ quotient: gamma~(z_m/z_n; q^b_ii) and
    gamma~(z_m/z; q^b_ij) at p* for e.  The mirrored f forms of arity 3 and
    4 use the inverted arguments.  The arity-3 e form carries a sign -1."""
    a = 1 - cd.a(i, j)
    sign = 1 if variant == "e" else -1
    nome = var("u", -4) if variant == "e" else ONE
    flip = variant == "f" and a >= 3
    bii, bij = cd.b(i, i), cd.b(i, j)
    zs, w = _zs(a), var("z")
    c = Coef.const(-1 if (variant == "e" and a == 3) else 1)
    for m in range(a):
        for n in range(m + 1, a):
            r = zs[m] / zs[n]
            c = c * wtg_atom(r.inv() if flip else r, sign * bii, nome)
        r = zs[m] / w
        c = c * wtg_atom(r.inv() if flip else r, sign * bij, nome)
    return c


def compare_combinations(x: Expr, y: Expr, pre: Coef, F, env: Env, ratio=None, sort=False):
    """Decide pre * x == ratio * y word by word (ratio a field constant, 1
    by default); returns None or (first mismatching key, difference).

    Words are compared as given, in the free algebra, unless ``sort``."""
    if sort:
        x, y = exchange_sort(x, env.cd), exchange_sort(y, env.cd)
    cx, cy = collect(x, F, env), collect(y, F, env)
    P = pre.realize(F, env)
    r = F.one if ratio is None else ratio
    for key in sorted(set(cx) | set(cy), key=_key_order):
        lhs = P * cx[key] if key in cx else PSeries.zero(F, env.N)
        rhs = cy[key] * r if key in cy else PSeries.zero(F, env.N)
        if not (lhs - rhs).is_zero():
            return key, lhs - rhs
    return None


# h-functions are ratios of two invariants of the same twisted action, hence
# symmetric in their slot arguments (the trailing argument is the pivot).
SYMMETRIC_H = ("h2", "h3", "h41", "h42")


def _canon_atom(atom):
    if atom[0] == "h" and atom[1] in SYMMETRIC_H:
        _, kind, i, j, xs = atom
        return ("h", kind, i, j, tuple(sorted(xs[:-1], key=repr)) + xs[-1:])
    return atom


def symbolic_form(x: Expr) -> dict:
    """Canonical form of x with coefficients kept as formal atom products:
    (key, monomial key, atoms) -> rational coefficient, zeros dropped."""
    out = {}
    for c, d, legs in x.terms:
        atoms = {}
        for a, pw in c.atoms.items():
            a = _canon_atom(a)
            atoms[a] = atoms.get(a, 0) + pw
        k = (d, legs, c.mono.key, frozenset((a, pw) for a, pw in atoms.items() if pw))
        out[k] = out.get(k, 0) + c.mono.coef
    return {k: v for k, v in out.items() if v}


def symbolically_equal(x: Expr, y: Expr, ratio=1) -> bool:
    """x == ratio * y term by term as formal expressions.  A True answer is
    a proof of equality; False only means the atoms differ syntactically."""
    return symbolic_form(x) == symbolic_form(y.scale(Coef.const(ratio)))


def critical_scalar(x: Expr, env: Env, F):
    """Coefficients of the sorted relation per word: the Serre relation is a
    tautology of the quadratic relations iff all of them vanish."""
    return collect(exchange_sort(x, env.cd), F, env)


# --------------------------------------------------------------- confluence

def confluence_words(cd: CartanData, max_len: int = 4, nodes=None):
    """Every word of length <= max_len over e, f, psi+, psi-, K+ on the given
    nodes, position k carrying label z_k."""
    from itertools import product
    nodes = tuple(nodes or cd.nodes)[:2]
    labs = [var(n) for n in ("z1", "z2", "z3", "z4")]
    for n in range(1, max_len + 1):
        pools = []
        for pos in range(n):
            x = labs[pos]
            pools.append([L for i in nodes for L in
                          (e(i, x), f(i, x), psi("+", i, x), psi("-", i, x), K("+", i))])
        yield from product(*pools)


def confluence_check(cd: CartanData, env: Env, words, F, schedules=(("last", 0), ("random", 1))):
    """Normal forms agree across rewriting schedules.  Words whose e-f
    rewriting would stack two delta functions are counted, not compared."""
    checked = skipped = 0
    for w in words:
        try:
            base = collect(exchange_sort(Expr.word(*w), cd, allow_ef=True), F, env)
        except CASError:
            skipped += 1
            continue
        for sch, sd in schedules:
            other = collect(exchange_sort(Expr.word(*w), cd, allow_ef=True, schedule=sch, seed=sd), F, env)
            for key in set(base) | set(other):
                zero = PSeries.zero(F, env.N)
                if not (base.get(key, zero) - other.get(key, zero)).is_zero():
                    return {"ok": False, "witness": {"word": render_word(w), "term": render_key(key),
                                                     "schedule": sch}, "checked": checked,
                            "skipped": skipped}
        checked += 1
    return {"ok": True, "checked": checked, "skipped": skipped}
