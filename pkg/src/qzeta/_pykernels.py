"""Pure-Python dense integer polynomial kernels.

Polynomials are lists of Python ints, lowest degree first, with no
trailing zeros (the zero polynomial is ``[]``).  This module is the
fallback for :mod:`qzeta._ckernels` and must keep the same signatures.
"""

from math import gcd

BACKEND = "python"

# Below this length schoolbook multiplication beats Kronecker packing.
_KRONECKER_MIN = 48


def strip(a):
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return a[:n] if n != len(a) else a


def _maxbits(a):
    return max(abs(c).bit_length() for c in a)


def _pack(a, bits):
    # divide and conquer keeps packing O(M log n) instead of quadratic
    n = len(a)
    if n <= 16:
        x = 0
        for c in reversed(a):
            x = (x << bits) + c
        return x
    mid = n // 2
    return _pack(a[:mid], bits) + (_pack(a[mid:], bits) << (bits * mid))


def _unpack(x, bits, n):
    """Balanced base-2**bits digits of ``x``, exactly ``n`` of them."""
    if n <= 16:
        out = []
        half = 1 << (bits - 1)
        full = 1 << bits
        mask = full - 1
        for _ in range(n):
            r = x & mask
            if r >= half:
                r -= full
            out.append(r)
            x = (x - r) >> bits
        return out
    mid = n // 2
    shift = bits * mid
    lo = x & ((1 << shift) - 1)
    if lo >= 1 << (shift - 1):
        lo -= 1 << shift
    return _unpack(lo, bits, mid) + _unpack((x - lo) >> shift, bits, n - mid)


def mul(a, b):
    if not a or not b:
        return []
    if len(a) < _KRONECKER_MIN or len(b) < _KRONECKER_MIN:
        if len(a) < len(b):
            a, b = b, a
        out = [0] * (len(a) + len(b) - 1)
        for j, bj in enumerate(b):
            if bj:
                for i, ai in enumerate(a):
                    out[i + j] += ai * bj
        return strip(out)
    bits = _maxbits(a) + _maxbits(b) + min(len(a), len(b)).bit_length() + 2
    prod = _pack(a, bits) * _pack(b, bits)
    return strip(_unpack(prod, bits, len(a) + len(b) - 1))


def divmod_exact(a, b):
    """Divide ``a`` by ``b`` over the integers.

    Returns ``(quotient, remainder)`` when every quotient coefficient is an
    integer, else ``None``.  ``b`` must be non-zero.
    """
    a = list(a)
    db = len(b) - 1
    lc = b[-1]
    if len(a) <= db:
        return [], strip(a)
    quot = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if not c:
            continue
        qc, rc = divmod(c, lc)
        if rc:
            return None
        quot[i - db] = qc
        base = i - db
        for k in range(db + 1):
            a[base + k] -= qc * b[k]
    return strip(quot), strip(a[:db])


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def content(a):
    g = 0
    for c in a:
        g = gcd(g, c)
        if g == 1:
            break
    return g
