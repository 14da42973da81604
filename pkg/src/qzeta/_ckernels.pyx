# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""GMP-backed dense integer polynomial kernels.

Same contract as :mod:`qzeta._pykernels`: lists of Python ints, lowest
degree first, no trailing zeros.
"""

from libc.stdlib cimport malloc, free

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    ctypedef __mpz_struct* mpz_ptr

    void mpz_init(mpz_ptr)
    void mpz_clear(mpz_ptr)
    void mpz_set(mpz_ptr, mpz_ptr)
    void mpz_set_si(mpz_ptr, long)
    long mpz_get_si(mpz_ptr)
    int mpz_fits_slong_p(mpz_ptr)
    int mpz_sgn(mpz_ptr)
    void mpz_neg(mpz_ptr, mpz_ptr)
    void mpz_abs(mpz_ptr, mpz_ptr)
    void mpz_add(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_sub(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_mul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_addmul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_submul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_fdiv_qr(mpz_ptr, mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_gcd(mpz_ptr, mpz_ptr, mpz_ptr)
    int mpz_cmp_ui(mpz_ptr, unsigned long)
    void mpz_mul_2exp(mpz_ptr, mpz_ptr, unsigned long)
    void mpz_tdiv_q_2exp(mpz_ptr, mpz_ptr, unsigned long)
    void mpz_fdiv_r_2exp(mpz_ptr, mpz_ptr, unsigned long)
    int mpz_tstbit(mpz_ptr, unsigned long)
    void mpz_sub_ui(mpz_ptr, mpz_ptr, unsigned long)
    size_t mpz_sizeinbase(mpz_ptr, int)
    void mpz_import(mpz_ptr, size_t, int, size_t, int, size_t, const void*)
    void* mpz_export(void*, size_t*, int, size_t, int, size_t, mpz_ptr)

BACKEND = "cython-gmp"

cdef Py_ssize_t KRONECKER_MIN = 48


cdef void _from_py(mpz_ptr z, object x) except *:
    cdef bytes buf
    if -0x3FFFFFFFFFFFFFFF <= x <= 0x3FFFFFFFFFFFFFFF:
        mpz_set_si(z, <long>x)
        return
    ax = -x if x < 0 else x
    nbytes = (ax.bit_length() + 7) // 8
    buf = ax.to_bytes(nbytes, "little")
    mpz_import(z, nbytes, -1, 1, 0, 0, <const char*>buf)
    if x < 0:
        mpz_neg(z, z)


cdef object _to_py(mpz_ptr z):
    cdef size_t count = 0
    cdef size_t nbytes
    cdef bytearray buf
    if mpz_fits_slong_p(z):
        return mpz_get_si(z)
    nbytes = (mpz_sizeinbase(z, 2) + 7) // 8
    buf = bytearray(nbytes)
    mpz_export(<char*>buf, &count, -1, 1, 0, 0, z)
    v = int.from_bytes(buf[:count], "little")
    return -v if mpz_sgn(z) < 0 else v


cdef class _Vec:
    """Owned array of initialised mpz values."""
    cdef __mpz_struct* data
    cdef Py_ssize_t n

    def __cinit__(self, Py_ssize_t n):
        cdef Py_ssize_t i
        self.n = n
        self.data = <__mpz_struct*>malloc(max(n, 1) * sizeof(__mpz_struct))
        if self.data == NULL:
            raise MemoryError()
        for i in range(n):
            mpz_init(&self.data[i])

    def __dealloc__(self):
        cdef Py_ssize_t i
        if self.data != NULL:
            for i in range(self.n):
                mpz_clear(&self.data[i])
            free(self.data)

    cdef void load(self, list a) except *:
        cdef Py_ssize_t i
        for i in range(len(a)):
            _from_py(&self.data[i], a[i])

    cdef list dump(self, Py_ssize_t n):
        cdef Py_ssize_t i
        cdef list out = [_to_py(&self.data[i]) for i in range(n)]
        cdef Py_ssize_t m = n
        while m and out[m - 1] == 0:
            m -= 1
        return out[:m]


def strip(a):
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return a[:n] if n != len(a) else a


cdef size_t _vec_maxbits(_Vec v):
    cdef size_t m = 0, b
    cdef Py_ssize_t i
    for i in range(v.n):
        if mpz_sgn(&v.data[i]) != 0:
            b = mpz_sizeinbase(&v.data[i], 2)
            if b > m:
                m = b
    return m


cdef void _pack(mpz_ptr x, _Vec v, unsigned long bits):
    cdef Py_ssize_t i
    mpz_set_si(x, 0)
    for i in range(v.n - 1, -1, -1):
        mpz_mul_2exp(x, x, bits)
        mpz_add(x, x, &v.data[i])


def mul(list a, list b):
    cdef Py_ssize_t na = len(a), nb = len(b), i, j
    cdef _Vec va, vb, out
    cdef mpz_t x, y, r
    cdef unsigned long bits
    if na == 0 or nb == 0:
        return []
    va = _Vec(na)
    vb = _Vec(nb)
    va.load(a)
    vb.load(b)
    out = _Vec(na + nb - 1)
    if na < KRONECKER_MIN or nb < KRONECKER_MIN:
        for i in range(na):
            if mpz_sgn(&va.data[i]) == 0:
                continue
            for j in range(nb):
                mpz_addmul(&out.data[i + j], &va.data[i], &vb.data[j])
        return out.dump(na + nb - 1)
    bits = _vec_maxbits(va) + _vec_maxbits(vb) + (<size_t>min(na, nb)).bit_length() + 2
    mpz_init(x)
    mpz_init(y)
    mpz_init(r)
    _pack(x, va, bits)
    _pack(y, vb, bits)
    mpz_mul(x, x, y)
    for i in range(na + nb - 1):
        # balanced digit extraction
        mpz_fdiv_r_2exp(r, x, bits)
        if mpz_tstbit(r, bits - 1):
            mpz_set_si(y, 1)
            mpz_mul_2exp(y, y, bits)
            mpz_sub(r, r, y)
        mpz_set(&out.data[i], r)
        mpz_sub(x, x, r)
        mpz_tdiv_q_2exp(x, x, bits)
    mpz_clear(x)
    mpz_clear(y)
    mpz_clear(r)
    return out.dump(na + nb - 1)


def divmod_exact(a, b):
    """``(quotient, remainder)`` of ``a / b`` over Z, or ``None``."""
    cdef Py_ssize_t na = len(a), nb = len(b), i, k, base
    cdef _Vec va, vb, quot
    cdef mpz_t qc, rc
    if na < nb:
        return [], strip(list(a))
    va = _Vec(na)
    vb = _Vec(nb)
    va.load(list(a))
    vb.load(list(b))
    quot = _Vec(na - nb + 1)
    mpz_init(qc)
    mpz_init(rc)
    try:
        for i in range(na - 1, nb - 2, -1):
            if mpz_sgn(&va.data[i]) == 0:
                continue
            mpz_fdiv_qr(qc, rc, &va.data[i], &vb.data[nb - 1])
            if mpz_sgn(rc) != 0:
                return None
            base = i - nb + 1
            mpz_set(&quot.data[base], qc)
            for k in range(nb):
                mpz_submul(&va.data[base + k], qc, &vb.data[k])
        return quot.dump(na - nb + 1), va.dump(nb - 1)
    finally:
        mpz_clear(qc)
        mpz_clear(rc)


def evaluate(a, x):
    cdef Py_ssize_t i
    cdef mpz_t acc, vx, c
    mpz_init(acc)
    mpz_init(vx)
    mpz_init(c)
    try:
        _from_py(vx, x)
        for i in range(len(a) - 1, -1, -1):
            _from_py(c, a[i])
            mpz_mul(acc, acc, vx)
            mpz_add(acc, acc, c)
        return _to_py(acc)
    finally:
        mpz_clear(acc)
        mpz_clear(vx)
        mpz_clear(c)


def content(a):
    cdef Py_ssize_t i
    cdef mpz_t g, c
    mpz_init(g)
    mpz_init(c)
    try:
        for i in range(len(a)):
            _from_py(c, a[i])
            mpz_gcd(g, g, c)
            if mpz_cmp_ui(g, 1) == 0:
                break
        return _to_py(g)
    finally:
        mpz_clear(g)
        mpz_clear(c)
