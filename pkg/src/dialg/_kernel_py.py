"""Pure-Python polynomial kernels.

A polynomial is a dict mapping packed exponent keys to nonzero gmpy2.mpq.
A key packs signed exponents in 20-bit balanced fields, so monomial
multiplication is integer addition.  See ``_kernel_c.pyx`` for the
compiled twin; both must agree term for term.
"""
from gmpy2 import mpq

SHIFT = 20
MASK = (1 << SHIFT) - 1
HALF = 1 << (SHIFT - 1)
FULL = 1 << SHIFT

_ZERO = mpq(0)


def poly_mul(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            out[k] = get(k, _ZERO) + ca * cb
    return {k: c for k, c in out.items() if c}


def poly_add(a, b, sign=1):
    out = dict(a)
    get = out.get
    if sign == 1:
        for k, c in b.items():
            out[k] = get(k, _ZERO) + c
    else:
        for k, c in b.items():
            out[k] = get(k, _ZERO) - c
    return {k: c for k, c in out.items() if c}


def poly_scale(a, coef, key):
    """Multiply every term by ``coef * x^key``."""
    return {k + key: c * coef for k, c in a.items()}


def field_of(key, pos):
    """Signed exponent stored in field ``pos``."""
    if pos:
        lowmod = 1 << (SHIFT * pos)
        r = key & (lowmod - 1)
        if r >= lowmod >> 1:
            r -= lowmod
        key = (key - r) >> (SHIFT * pos)
    e = key & MASK
    return e - FULL if e >= HALF else e


def decode(key):
    """List of (position, exponent) for the nonzero fields of ``key``."""
    out = []
    pos = 0
    while key:
        e = key & MASK
        if e >= HALF:
            e -= FULL
        if e:
            out.append((pos, e))
        key = (key - e) >> SHIFT
        pos += 1
    return out


def poly_subst(a, pos, img_coef, img_key):
    """Substitute variable ``pos`` by ``img_coef * x^img_key``."""
    unit = 1 << (SHIFT * pos)
    out = {}
    get = out.get
    for k, c in a.items():
        e = field_of(k, pos)
        if e:
            k = k - e * unit + e * img_key
            c = c * img_coef ** e
        out[k] = get(k, _ZERO) + c
    return {k: c for k, c in out.items() if c}


def poly_eval(a, values):
    """Evaluate at ``values[pos]`` (mpq); raises ZeroDivisionError on 0^-n."""
    total = _ZERO
    cache = {}
    for k, c in a.items():
        t = c
        for pos, e in decode(k):
            p = cache.get((pos, e))
            if p is None:
                p = values[pos] ** e
                cache[(pos, e)] = p
            t = t * p
        total += t
    return total


def series_mul(a, b, n):
    """Truncated product of two coefficient lists (any ring elements)."""
    out = []
    for k in range(n + 1):
        acc = None
        for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
            t = a[i] * b[k - i]
            acc = t if acc is None else acc + t
        out.append(acc)
    return out
