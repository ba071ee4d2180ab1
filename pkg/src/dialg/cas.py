"""Exact scalar tower: rationals, Laurent polynomials, rational functions,
truncated p-series, and the two evaluation fields every check runs in.

Variables live in one process-wide, append-only :class:`VarUniverse`.  The
reserved names come first so their packed keys are short; generic symbols
are appended on demand.

Two conventions matter everywhere downstream:

* ``v`` is q^{1/6}, so every q-power used by the finite types is integral
  in ``v``;
* ``u`` (and the leg copies ``u1``, ``u2``, ``u3``) is q^{c/2}, not q^c.
  Arguments such as q^{-c/2} z / w then stay integral as well, and
  p* = p q^{-2c} becomes p u^{-4}.
"""
from __future__ import annotations

import hashlib
import random
from collections import Counter

from gmpy2 import mpq

from ._backend import kernel
from ._kernel_py import SHIFT, decode, field_of

V_DENOM = 6
RESERVED = ("v", "u", "z", "z1", "z2", "z3", "z4", "w", "u1", "u2", "u3")
MAX_ORDER = 8

_ZERO = mpq(0)
_ONE = mpq(1)


class CASError(ValueError):
    pass


class NonInvertible(ZeroDivisionError):
    pass


class VarUniverse:
    """Ordered variable names; position k owns bit field k of a packed key."""

    def __init__(self, names=RESERVED):
        self.names = []
        self.index = {}
        for n in names:
            self.add(n)

    def add(self, name: str) -> int:
        idx = self.index.get(name)
        if idx is None:
            idx = len(self.names)
            self.names.append(name)
            self.index[name] = idx
        return idx

    def unit(self, name: str) -> int:
        return 1 << (SHIFT * self.add(name))

    def key(self, exps: dict) -> int:
        k = 0
        for name, e in exps.items():
            if e:
                k += e * self.unit(name)
        return k

    def exps(self, key: int) -> dict:
        return {self.names[p]: e for p, e in decode(key)}

    def __len__(self):
        return len(self.names)


UNIVERSE = VarUniverse()


def vkey(name: str, e: int = 1) -> int:
    return e * UNIVERSE.unit(name)


def exponent(key: int, name: str) -> int:
    return field_of(key, UNIVERSE.add(name))


def render_key(key: int) -> str:
    parts = []
    for p, e in decode(key):
        n = UNIVERSE.names[p]
        parts.append(n if e == 1 else f"{n}^{e}")
    return "*".join(parts)


def _q(x) -> mpq:
    return x if type(x) is type(_ONE) else mpq(x)


class Mono:
    """A unit monomial ``coef * x^key``; used for current arguments."""

    __slots__ = ("coef", "key")

    def __init__(self, coef=1, key: int = 0):
        self.coef = _q(coef)
        self.key = key

    @classmethod
    def of(cls, coef=1, **exps) -> "Mono":
        return cls(coef, UNIVERSE.key(exps))

    @classmethod
    def var(cls, name: str, e: int = 1) -> "Mono":
        return cls(1, vkey(name, e))

    def __mul__(self, other):
        if isinstance(other, Mono):
            return Mono(self.coef * other.coef, self.key + other.key)
        return Mono(self.coef * _q(other), self.key)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * other.inv()

    def inv(self) -> "Mono":
        if not self.coef:
            raise NonInvertible("zero monomial")
        return Mono(1 / self.coef, -self.key)

    def __pow__(self, e: int):
        return Mono(self.coef ** e, self.key * e)

    def __eq__(self, other):
        return isinstance(other, Mono) and self.key == other.key and self.coef == other.coef

    def __hash__(self):
        return hash((self.key, self.coef))

    def sort_key(self):
        return (self.key, self.coef)

    def exps(self) -> dict:
        return UNIVERSE.exps(self.key)

    def degree_in(self, name: str) -> int:
        return exponent(self.key, name)

    def subst(self, name: str, img: "Mono") -> "Mono":
        pos = UNIVERSE.add(name)
        e = field_of(self.key, pos)
        if not e:
            return self
        return Mono(self.coef * img.coef ** e, self.key - e * (1 << (SHIFT * pos)) + e * img.key)

    def subst_many(self, mapping: dict) -> "Mono":
        out = self
        for name, img in mapping.items():
            out = out.subst(name, img)
        return out

    def is_one(self) -> bool:
        return self.key == 0 and self.coef == 1

    def poly(self) -> "LaurentPoly":
        return LaurentPoly({self.key: self.coef}) if self.coef else LaurentPoly.zero()

    def __repr__(self):
        body = render_key(self.key)
        if self.coef == 1:
            return body or "1"
        c = str(self.coef)
        return f"{c}*{body}" if body else c


class LaurentPoly:
    """Sparse Laurent polynomial with mpq coefficients; immutable."""

    __slots__ = ("t", "_h")

    def __init__(self, terms=None):
        self.t = terms if terms is not None else {}
        self._h = None

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def one(cls):
        return cls({0: _ONE})

    @classmethod
    def const(cls, c):
        c = _q(c)
        return cls({0: c} if c else {})

    @classmethod
    def monomial(cls, exps: dict, coef=1):
        return cls({UNIVERSE.key(exps): _q(coef)})

    @classmethod
    def var(cls, name: str, e: int = 1):
        return cls({vkey(name, e): _ONE})

    @classmethod
    def lift(cls, x):
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, Mono):
            return x.poly()
        return cls.const(x)

    def __add__(self, other):
        other = LaurentPoly.lift(other)
        return LaurentPoly(kernel.poly_add(self.t, other.t, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = LaurentPoly.lift(other)
        return LaurentPoly(kernel.poly_add(self.t, other.t, -1))

    def __rsub__(self, other):
        return LaurentPoly.lift(other) - self

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self.t.items()})

    def __mul__(self, other):
        if isinstance(other, Mono):
            return LaurentPoly(kernel.poly_scale(self.t, other.coef, other.key)) if other.coef else LaurentPoly()
        if not isinstance(other, LaurentPoly):
            c = _q(other)
            return LaurentPoly({k: v * c for k, v in self.t.items()}) if c else LaurentPoly()
        return LaurentPoly(kernel.poly_mul(self.t, other.t))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            m = self.as_mono()
            if m is None:
                raise NonInvertible("negative power of a non-monomial")
            return (m ** e).poly()
        out, base = LaurentPoly.one(), self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            try:
                other = LaurentPoly.lift(other)
            except TypeError:
                return NotImplemented
        return self.t == other.t

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self.t.items()))
        return self._h

    def __bool__(self):
        return bool(self.t)

    def is_zero(self) -> bool:
        return not self.t

    def __len__(self):
        return len(self.t)

    def as_mono(self):
        if len(self.t) != 1:
            return None
        (k, c), = self.t.items()
        return Mono(c, k)

    def const_value(self):
        if not self.t:
            return _ZERO
        if len(self.t) == 1 and 0 in self.t:
            return self.t[0]
        return None

    def subst(self, name: str, img) -> "LaurentPoly":
        img = img if isinstance(img, Mono) else Mono(1, img)
        pos = UNIVERSE.add(name)
        return LaurentPoly(kernel.poly_subst(self.t, pos, img.coef, img.key))

    def subst_many(self, mapping: dict) -> "LaurentPoly":
        """Simultaneous substitution of unit monomials."""
        if not mapping:
            return self
        # rename to fresh placeholders first so images may mention sources
        tmp = {}
        out = self
        for i, name in enumerate(mapping):
            ph = f"_s{i}"
            tmp[ph] = mapping[name]
            out = out.subst(name, Mono.var(ph))
        for ph, img in tmp.items():
            out = out.subst(ph, img)
        return out

    def eval(self, values: list):
        return kernel.poly_eval(self.t, values)

    def pivot(self) -> Mono:
        k = min(self.t)
        return Mono(self.t[k], k)

    def normalized(self):
        """(unit, atom) with self = unit * atom and atom's pivot term equal to 1."""
        u = self.pivot()
        inv = u.inv()
        return u, LaurentPoly(kernel.poly_scale(self.t, inv.coef, inv.key))

    def __repr__(self):
        if not self.t:
            return "0"
        parts = []
        for k in sorted(self.t):
            c = self.t[k]
            body = render_key(k)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


class RatFun:
    """num / prod(atom^mult); atoms are normalized polynomials.

    Never reduced by gcd: equality is decided by subtracting and testing
    the numerator for zero.  Monomial factors are units and are folded
    into the numerator immediately.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den=None):
        self.num = num
        self.den = den if den is not None else {}

    @classmethod
    def lift(cls, x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        return cls(LaurentPoly.lift(x))

    @classmethod
    def from_fraction(cls, num, den) -> "RatFun":
        return cls.lift(num) / cls.lift(den)

    def _common(self, other):
        L = dict(self.den)
        for a, m in other.den.items():
            if m > L.get(a, 0):
                L[a] = m
        return L

    @staticmethod
    def _fill(num, have, L):
        for a, m in L.items():
            d = m - have.get(a, 0)
            if d:
                num = num * (a ** d)
        return num

    def _addsub(self, other, sign):
        other = RatFun.lift(other)
        if self.den == other.den:
            n = self.num + other.num if sign > 0 else self.num - other.num
            return RatFun(n, dict(self.den)) if n else RatFun(n)
        L = self._common(other)
        a = self._fill(self.num, self.den, L)
        b = self._fill(other.num, other.den, L)
        n = a + b if sign > 0 else a - b
        return RatFun(n, L) if n else RatFun(n)

    def __add__(self, other):
        return self._addsub(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._addsub(other, -1)

    def __rsub__(self, other):
        return RatFun.lift(other)._addsub(self, -1)

    def __neg__(self):
        return RatFun(-self.num, dict(self.den))

    def __mul__(self, other):
        other = RatFun.lift(other)
        n = self.num * other.num
        if not n:
            return RatFun(n)
        d = Counter(self.den)
        d.update(other.den)
        return RatFun(n, dict(d))

    __rmul__ = __mul__

    def inv(self) -> "RatFun":
        if not self.num:
            raise NonInvertible("inverse of zero rational function")
        unit, atom = self.num.normalized()
        num = unit.inv().poly()
        for a, m in self.den.items():
            num = num * (a ** m)
        if len(atom) == 1:
            return RatFun(num)
        return RatFun(num, {atom: 1})

    def __truediv__(self, other):
        other = RatFun.lift(other)
        if not other.num:
            raise NonInvertible("division by zero rational function")
        u, atom = other.num.normalized()
        num = self.num * u.inv()
        for a, m in other.den.items():
            num = num * (a ** m)
        den = dict(self.den)
        if len(atom) > 1:
            if num:
                nu, natom = num.normalized()
                if natom == atom:
                    return RatFun(nu.poly(), den)
            den[atom] = den.get(atom, 0) + 1
        return RatFun(num, den) if num else RatFun(num)

    def __rtruediv__(self, other):
        return RatFun.lift(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = RatFun.lift(1)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        try:
            return (self - RatFun.lift(other)).is_zero()
        except TypeError:
            return NotImplemented

    __hash__ = None

    def subst(self, name: str, img: Mono) -> "RatFun":
        out = RatFun(self.num.subst(name, img))
        for a, m in self.den.items():
            out = out / (RatFun(a.subst(name, img)) ** m)
        return out

    def subst_many(self, mapping: dict) -> "RatFun":
        out = RatFun(self.num.subst_many(mapping))
        for a, m in self.den.items():
            out = out / (RatFun(a.subst_many(mapping)) ** m)
        return out

    def eval(self, values: list):
        n = self.num.eval(values)
        if not n:
            return n
        d = _ONE
        for a, m in self.den.items():
            d = d * a.eval(values) ** m
        if not d:
            raise ZeroDivisionError("pole")
        return n / d

    def den_poly(self) -> LaurentPoly:
        d = LaurentPoly.one()
        for a, m in self.den.items():
            d = d * (a ** m)
        return d

    def __repr__(self):
        if not self.den:
            return repr(self.num)
        den = "*".join(f"({a})" + (f"^{m}" if m != 1 else "") for a, m in self.den.items())
        return f"({self.num})/{den}"


def ratfun_equals(a, b, strategy="exact", trials=24, seed=0xD1A):
    """Decide a == b.  Returns (equal, witness) where witness is a point
    assignment (probabilistic) or the nonzero difference (exact)."""
    a, b = RatFun.lift(a), RatFun.lift(b)
    if strategy == "exact":
        d = a - b
        return (d.is_zero(), None if d.is_zero() else d)
    for t in range(trials):
        F = PointField(seed, t)
        for _ in range(8):
            try:
                va, vb = F.ratfun(a), F.ratfun(b)
                break
            except ZeroDivisionError:
                F = F.retry()
        else:
            raise CASError("evaluation point hits a pole after max retries")
        if va != vb:
            return False, F.witness()
    return True, None


# ---------------------------------------------------------------- fields

class ExactField:
    """Elements are RatFun over the global universe."""

    exact = True
    name = "exact"

    def __init__(self):
        self.zero = RatFun(LaurentPoly.zero())
        self.one = RatFun(LaurentPoly.one())
        self.cache = {}

    def const(self, c):
        return RatFun(LaurentPoly.const(c))

    def mono(self, m: Mono):
        return RatFun(m.poly())

    def poly(self, p: LaurentPoly):
        return RatFun(p)

    def ratfun(self, r: RatFun):
        return r

    def symbol(self, name: str):
        return RatFun(LaurentPoly.var(name))

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def inv(self, x):
        return x.inv()

    def describe(self):
        return {"strategy": "exact"}


def _rational_from(tag: str, lo=2, hi=97):
    h = hashlib.sha256(tag.encode()).digest()
    rng = random.Random(h)
    while True:
        n = rng.randint(lo, hi) * rng.choice((-1, 1))
        d = rng.randint(lo, hi)
        r = mpq(n, d)
        if r not in (0, 1, -1):
            return r


class PointField:
    """Elements are mpq: every variable and generic symbol is replaced by a
    seeded pseudo-random rational, so a zero test is a Schwartz-Zippel
    trial carried out in exact arithmetic."""

    exact = False
    name = "point"

    def __init__(self, seed=0xD1A, trial=0, attempt=0):
        self.seed, self.trial, self.attempt = seed, trial, attempt
        self.zero = _ZERO
        self.one = _ONE
        self.cache = {}
        self._vals = []

    def retry(self) -> "PointField":
        return PointField(self.seed, self.trial, self.attempt + 1)

    def value(self, name: str):
        return _rational_from(f"{self.seed}:{self.trial}:{self.attempt}:{name}")

    def _values(self):
        n = len(UNIVERSE)
        while len(self._vals) < n:
            self._vals.append(self.value(UNIVERSE.names[len(self._vals)]))
        return self._vals

    def const(self, c):
        return _q(c)

    def mono(self, m: Mono):
        if not m.key:
            return m.coef
        return m.coef * kernel.poly_eval({m.key: _ONE}, self._values())

    def poly(self, p: LaurentPoly):
        return p.eval(self._values())

    def ratfun(self, r: RatFun):
        return r.eval(self._values())

    def symbol(self, name: str):
        v = self.cache.get(("sym", name))
        if v is None:
            v = self.value(name)
            self.cache[("sym", name)] = v
        return v

    def is_zero(self, x) -> bool:
        return not x

    def inv(self, x):
        if not x:
            raise NonInvertible("zero at sample point")
        return 1 / x

    def witness(self):
        vals = self._values()
        return {n: str(vals[i]) for i, n in enumerate(UNIVERSE.names) if not n.startswith("_")}

    def describe(self):
        return {"strategy": "probabilistic", "seed": self.seed, "trial": self.trial}


# --------------------------------------------------------------- p-series

class PSeries:
    """Truncated power series in p with coefficients in a field's elements."""

    __slots__ = ("F", "c")

    def __init__(self, F, coeffs):
        self.F = F
        self.c = list(coeffs)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def const(cls, F, x, N):
        return cls(F, [x] + [F.zero] * N)

    @classmethod
    def one(cls, F, N):
        return cls.const(F, F.one, N)

    @classmethod
    def zero(cls, F, N):
        return cls(F, [F.zero] * (N + 1))

    def _lift(self, other):
        if isinstance(other, PSeries):
            return other
        return PSeries.const(self.F, other, self.order)

    def __add__(self, other):
        other = self._lift(other)
        n = min(self.order, other.order)
        return PSeries(self.F, [self.c[k] + other.c[k] for k in range(n + 1)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        n = min(self.order, other.order)
        return PSeries(self.F, [self.c[k] - other.c[k] for k in range(n + 1)])

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return PSeries(self.F, [-x for x in self.c])

    def __mul__(self, other):
        if not isinstance(other, PSeries):
            return PSeries(self.F, [x * other for x in self.c])
        n = min(self.order, other.order)
        return PSeries(self.F, kernel.series_mul(self.c[: n + 1], other.c[: n + 1], n))

    __rmul__ = __mul__

    def invert(self) -> "PSeries":
        F = self.F
        try:
            a0i = F.inv(self.c[0])
        except ZeroDivisionError as exc:
            raise NonInvertible("p^0 coefficient is not invertible") from exc
        out = [a0i]
        for k in range(1, self.order + 1):
            acc = F.zero
            for i in range(1, k + 1):
                acc = acc + self.c[i] * out[k - i]
            out.append(-(acc * a0i))
        return PSeries(F, out)

    def __truediv__(self, other):
        if isinstance(other, PSeries):
            return self * other.invert()
        return self * self.F.inv(other)

    def __pow__(self, e: int):
        if e < 0:
            return self.invert() ** (-e)
        out = PSeries.one(self.F, self.order)
        for _ in range(e):
            out = out * self
        return out

    def truncate(self, N: int) -> "PSeries":
        if N > self.order:
            raise CASError("cannot extend a truncated series")
        return PSeries(self.F, self.c[: N + 1])

    def p_limit(self):
        return self.c[0]

    def nome_scale(self, m):
        """f(p) -> f(p*m) for a field element m."""
        out, pw = [], self.F.one
        for k, x in enumerate(self.c):
            out.append(x * pw if k else x)
            pw = pw * m
        return PSeries(self.F, out)

    def exp(self) -> "PSeries":
        """exp of a series with zero constant term (f' = g' f recursion)."""
        F = self.F
        if not F.is_zero(self.c[0]):
            raise CASError("exp needs a vanishing p^0 coefficient")
        out = [F.one]
        for k in range(1, self.order + 1):
            acc = F.zero
            for j in range(1, k + 1):
                acc = acc + self.c[j] * out[k - j] * j
            out.append(acc * F.const(mpq(1, k)))
        return PSeries(F, out)

    def is_zero(self) -> bool:
        return all(self.F.is_zero(x) for x in self.c)

    def first_nonzero(self):
        for k, x in enumerate(self.c):
            if not self.F.is_zero(x):
                return k
        return None

    def __repr__(self):
        return " + ".join(f"({x})*p^{k}" for k, x in enumerate(self.c))


def pstar_substitute(s: PSeries, F=None, u: str = "u") -> PSeries:
    """f(p) -> f(p*) with p* = p q^{-2c} = p u^{-4}."""
    F = F or s.F
    return s.nome_scale(F.mono(Mono.var(u, -4)))
