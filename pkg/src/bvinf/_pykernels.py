"""Pure-Python kernels.  Mirrors ``_ckernels.pyx`` function for function."""


def mono_mul(a, b, odd, caps):
    """Multiply two exponent vectors in a graded-commutative monomial basis.

    Returns ``(sign, exps)``; ``sign == 0`` means the product vanishes.
    """
    n = len(a)
    if len(b) != n or len(odd) != n or len(caps) != n:
        raise ValueError("exponent vectors of different lengths")
    out = [0] * n
    parity = 0
    odd_after = 0
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
        if caps[j] and e > caps[j]:
            return 0, None
        out[j] = e
    return (-1 if parity & 1 else 1), tuple(out)


def mul_terms(ta, tb, odd, caps, nparams, max_udeg, hcap):
    """Product of two term tables keyed by ``(hbar_power, exps)``.

    Terms whose parameter degree exceeds ``max_udeg`` are discarded (exact
    u-adic truncation).  Terms whose hbar power exceeds ``hcap`` are
    discarded and their parameter degree is reported in the returned set.
    """
    out = {}
    dropped = set()
    ua = [(k, e, c, sum(e[:nparams])) for (k, e), c in ta.items()]
    ub = [(k, e, c, sum(e[:nparams])) for (k, e), c in tb.items()]
    for ka, ea, ca, da in ua:
        for kb, eb, cb, db in ub:
            d = da + db
            if d > max_udeg:
                continue
            k = ka + kb
            if k > hcap:
                dropped.add(d)
                continue
            s, e = mono_mul(ea, eb, odd, caps)
            if not s:
                continue
            key = (k, e)
            v = ca * cb
            if s < 0:
                v = -v
            if key in out:
                out[key] += v
            else:
                out[key] = v
    return {key: v for key, v in out.items() if v}, dropped


def koszul_sign(perm, parities):
    """Sign of reordering items with the given parities into ``perm`` order."""
    if len(perm) != len(parities):
        raise ValueError("permutation and degree list differ in length")
    s = 0
    n = len(perm)
    for i in range(n):
        pi = parities[perm[i]] & 1
        if not pi:
            continue
        for j in range(i + 1, n):
            if perm[j] < perm[i] and parities[perm[j]] & 1:
                s += 1
    return -1 if s & 1 else 1


def set_partitions(n):
    """All set partitions of ``range(n)`` as tuples of blocks.

    Enumerated by restricted-growth strings; blocks are sorted and listed in
    order of their least element.
    """
    if n == 0:
        return [()]
    out = []
    rgs = [0] * n
    maxes = [0] * n

    def rec(i):
        if i == n:
            nb = max(rgs) + 1
            blocks = [[] for _ in range(nb)]
            for idx, b in enumerate(rgs):
                blocks[b].append(idx)
            out.append(tuple(tuple(b) for b in blocks))
            return
        top = maxes[i - 1] + 1
        for v in range(top + 1):
            rgs[i] = v
            maxes[i] = max(maxes[i - 1], v)
            rec(i + 1)

    rgs[0] = 0
    maxes[0] = 0
    rec(1)
    return out
