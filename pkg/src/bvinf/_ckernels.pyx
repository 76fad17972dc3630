# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; same contract as ``_pykernels``."""


cpdef tuple mono_mul(tuple a, tuple b, tuple odd, tuple caps):
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t j
    cdef long aj, bj, e, cap
    cdef long parity = 0
    cdef long odd_after = 0
    if len(b) != n or len(odd) != n or len(caps) != n:
        raise ValueError("exponent vectors of different lengths")
    out = [0] * n
    for j in range(n - 1, -1, -1):
        aj = a[j]
        bj = b[j]
        if odd[j]:
            if aj and bj:
                return 0, None
            if bj:
                parity += odd_after
            if aj:
                odd_after += 1
        e = aj + bj
        cap = caps[j]
        if cap and e > cap:
            return 0, None
        out[j] = e
    return (-1 if parity & 1 else 1), tuple(out)


def mul_terms(dict ta, dict tb, tuple odd, tuple caps, int nparams, long max_udeg, long hcap):
    cdef dict out = {}
    cdef set dropped = set()
    cdef list ua = []
    cdef list ub = []
    cdef long ka, kb, k, da, db, d, s
    cdef Py_ssize_t i, ia, ib, na, nb
    cdef tuple ea, eb, key, r
    for key, c in ta.items():
        ea = key[1]
        d = 0
        for i in range(nparams):
            d += <long>ea[i]
        ua.append((key[0], ea, c, d))
    for key, c in tb.items():
        eb = key[1]
        d = 0
        for i in range(nparams):
            d += <long>eb[i]
        ub.append((key[0], eb, c, d))
    na = len(ua)
    nb = len(ub)
    for ia in range(na):
        ka, ea, ca, da = ua[ia]
        for ib in range(nb):
            kb, eb, cb, db = ub[ib]
            d = da + db
            if d > max_udeg:
                continue
            k = ka + kb
            if k > hcap:
                dropped.add(d)
                continue
            r = mono_mul(ea, eb, odd, caps)
            s = r[0]
            if s == 0:
                continue
            key = (k, r[1])
            v = ca * cb
            if s < 0:
                v = -v
            if key in out:
                out[key] = out[key] + v
            else:
                out[key] = v
    return {kk: vv for kk, vv in out.items() if vv}, dropped


def koszul_sign(perm, parities):
    cdef Py_ssize_t n = len(perm)
    cdef Py_ssize_t i, j
    cdef long s = 0
    cdef long pi, pj
    if n != len(parities):
        raise ValueError("permutation and degree list differ in length")
    for i in range(n):
        pi = perm[i]
        if not (<long>parities[pi] & 1):
            continue
        for j in range(i + 1, n):
            pj = perm[j]
            if pj < pi and (<long>parities[pj] & 1):
                s += 1
    return -1 if s & 1 else 1


def set_partitions(int n):
    if n == 0:
        return [()]
    cdef list out = []
    cdef list rgs = [0] * n
    cdef list maxes = [0] * n
    cdef int i = 1
    cdef int nb, idx
    # iterative restricted-growth enumeration
    for i in range(1, n):
        rgs[i] = 0
        maxes[i] = 0
    while True:
        nb = maxes[n - 1] + 1
        blocks = [[] for _ in range(nb)]
        for idx in range(n):
            blocks[rgs[idx]].append(idx)
        out.append(tuple(tuple(b) for b in blocks))
        i = n - 1
        while i > 0 and rgs[i] == maxes[i - 1] + 1:
            i -= 1
        if i == 0:
            break
        rgs[i] += 1
        maxes[i] = max(maxes[i - 1], rgs[i])
        for idx in range(i + 1, n):
            rgs[idx] = 0
            maxes[idx] = maxes[i]
    return out
