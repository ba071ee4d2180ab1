# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled polynomial kernels; same contract as ``_kernel_py``.

Coefficients are gmpy2.mpq.  The inner loops multiply-accumulate directly
into freshly allocated mpq objects through the GMP C API, which avoids one
temporary Python object per term product.
"""
from cpython.dict cimport PyDict_Next, PyDict_GetItem, PyDict_SetItem
from cpython.object cimport PyObject
from gmpy2 cimport import_gmpy2, mpq, GMPy_MPQ_New, MPQ_Check

cdef extern from "gmp.h":
    ctypedef struct __mpq_struct:
        pass
    ctypedef __mpq_struct *mpq_ptr
    ctypedef const __mpq_struct *mpq_srcptr
    void mpq_mul(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_add(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_sub(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_set(mpq_ptr, mpq_srcptr)
    void mpq_init(mpq_ptr)
    void mpq_clear(mpq_ptr)
    int mpq_sgn(mpq_srcptr)

import_gmpy2()

from gmpy2 import mpq as _mpq

DEF SHIFT = 20
cdef object MASK = (1 << SHIFT) - 1
cdef object HALF = 1 << (SHIFT - 1)
cdef object FULL = 1 << SHIFT


cdef inline mpq_ptr _q(object x):
    return <mpq_ptr>(&(<mpq>x).q[0])


cdef dict _prune(dict out):
    cdef dict res = {}
    cdef Py_ssize_t pos = 0
    cdef PyObject *k
    cdef PyObject *v
    while PyDict_Next(out, &pos, &k, &v):
        if mpq_sgn(_q(<object>v)) != 0:
            res[<object>k] = <object>v
    return res


def poly_mul(dict a, dict b):
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    cdef Py_ssize_t pa = 0, pb
    cdef PyObject *ka
    cdef PyObject *ca
    cdef PyObject *kb
    cdef PyObject *cb
    cdef PyObject *slot
    cdef object k
    cdef mpq acc
    cdef __mpq_struct tmp[1]
    mpq_init(tmp)
    try:
        while PyDict_Next(a, &pa, &ka, &ca):
            pb = 0
            while PyDict_Next(b, &pb, &kb, &cb):
                k = (<object>ka) + (<object>kb)
                mpq_mul(tmp, _q(<object>ca), _q(<object>cb))
                slot = PyDict_GetItem(out, k)
                if slot == NULL:
                    acc = GMPy_MPQ_New(NULL)
                    mpq_set(_q(acc), tmp)
                    out[k] = acc
                else:
                    mpq_add(_q(<object>slot), _q(<object>slot), tmp)
    finally:
        mpq_clear(tmp)
    return _prune(out)


def poly_add(dict a, dict b, int sign=1):
    cdef dict out = {}
    cdef Py_ssize_t p = 0
    cdef PyObject *k
    cdef PyObject *c
    cdef PyObject *slot
    cdef mpq acc
    while PyDict_Next(a, &p, &k, &c):
        acc = GMPy_MPQ_New(NULL)
        mpq_set(_q(acc), _q(<object>c))
        out[<object>k] = acc
    p = 0
    while PyDict_Next(b, &p, &k, &c):
        slot = PyDict_GetItem(out, <object>k)
        if slot == NULL:
            acc = GMPy_MPQ_New(NULL)
            if sign == 1:
                mpq_set(_q(acc), _q(<object>c))
            else:
                mpq_sub(_q(acc), _q(acc), _q(<object>c))
            out[<object>k] = acc
        elif sign == 1:
            mpq_add(_q(<object>slot), _q(<object>slot), _q(<object>c))
        else:
            mpq_sub(_q(<object>slot), _q(<object>slot), _q(<object>c))
    return _prune(out)


def poly_scale(dict a, coef, key):
    cdef dict out = {}
    cdef Py_ssize_t p = 0
    cdef PyObject *k
    cdef PyObject *c
    cdef mpq r
    if not MPQ_Check(coef):
        coef = _mpq(coef)
    while PyDict_Next(a, &p, &k, &c):
        r = GMPy_MPQ_New(NULL)
        mpq_mul(_q(r), _q(<object>c), _q(coef))
        out[(<object>k) + key] = r
    return out


def field_of(key, int pos):
    cdef object lowmod, r, e
    if pos:
        lowmod = (<object>1) << (SHIFT * pos)
        r = key & (lowmod - 1)
        if r >= (lowmod >> 1):
            r -= lowmod
        key = (key - r) >> (<object>(SHIFT * pos))
    e = key & MASK
    return e - FULL if e >= HALF else e


def decode(key):
    cdef list out = []
    cdef int pos = 0
    cdef object e
    while key:
        e = key & MASK
        if e >= HALF:
            e -= FULL
        if e:
            out.append((pos, e))
        key = (key - e) >> SHIFT
        pos += 1
    return out


def poly_subst(dict a, int pos, img_coef, img_key):
    cdef object unit = (<object>1) << (SHIFT * pos)
    cdef dict out = {}
    cdef dict pw = {}
    cdef Py_ssize_t p = 0
    cdef PyObject *kp
    cdef PyObject *c
    cdef PyObject *slot
    cdef object k, e, f
    cdef mpq acc
    while PyDict_Next(a, &p, &kp, &c):
        k = <object>kp
        e = field_of(k, pos)
        acc = GMPy_MPQ_New(NULL)
        if e:
            k = k - e * unit + e * img_key
            f = pw.get(e)
            if f is None:
                f = img_coef ** e
                pw[e] = f
            mpq_mul(_q(acc), _q(<object>c), _q(f))
        else:
            mpq_set(_q(acc), _q(<object>c))
        slot = PyDict_GetItem(out, k)
        if slot == NULL:
            out[k] = acc
        else:
            mpq_add(_q(<object>slot), _q(<object>slot), _q(acc))
    return _prune(out)


def poly_eval(dict a, list values):
    cdef mpq total = GMPy_MPQ_New(NULL)
    cdef mpq t = GMPy_MPQ_New(NULL)
    cdef dict cache = {}
    cdef Py_ssize_t p = 0
    cdef PyObject *kp
    cdef PyObject *c
    cdef object key, e, pw
    cdef int vpos
    while PyDict_Next(a, &p, &kp, &c):
        mpq_set(_q(t), _q(<object>c))
        key = <object>kp
        vpos = 0
        while key:
            e = key & MASK
            if e >= HALF:
                e -= FULL
            if e:
                pw = cache.get((vpos, e))
                if pw is None:
                    pw = values[vpos] ** e
                    cache[(vpos, e)] = pw
                mpq_mul(_q(t), _q(t), _q(pw))
            key = (key - e) >> SHIFT
            vpos += 1
        mpq_add(_q(total), _q(total), _q(t))
    return total


def series_mul(list a, list b, int n):
    cdef list out = []
    cdef int k, i, lo, hi
    cdef object acc, t
    for k in range(n + 1):
        acc = None
        lo = k - len(b) + 1
        if lo < 0:
            lo = 0
        hi = k if k < len(a) - 1 else len(a) - 1
        for i in range(lo, hi + 1):
            t = a[i] * b[k - i]
            acc = t if acc is None else acc + t
        out.append(acc)
    return out
