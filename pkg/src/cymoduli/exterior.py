"""Exact exterior algebra on a finite set of generators.

Forms are dicts {bitmask: coefficient} over Gaussian rationals; bit i set
means generator i is present, and coefficients are stored for the generator
order of increasing bit index.  Used for the constant-form cohomology of the
torus fixture (generators dz^1..dz^3, dzbar^1..dzbar^3).
"""

from __future__ import annotations

from .scalars import QQi, is_zero


Form = dict  # {int bitmask: QQi}


def form(*terms) -> Form:
    """Build a form from (indices, coeff) pairs, e.g. form(((0,1,2), 1))."""
    out = {}
    for indices, coeff in terms:
        mask, sign = _sorted_mask(tuple(indices))
        if mask is None:
            continue
        c = QQi.of(coeff) * sign
        if mask in out:
            c = out[mask] + c
        if is_zero(c):
            out.pop(mask, None)
        else:
            out[mask] = c
    return out


def _sorted_mask(indices: tuple) -> tuple:
    """(bitmask, permutation sign) for a generator tuple; None if repeated."""
    mask = 0
    for i in indices:
        if mask >> i & 1:
            return None, 0
        mask |= 1 << i
    # sign of the permutation sorting `indices`
    sign = 1
    lst = list(indices)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                sign = -sign
    return mask, sign


def add(a: Form, b: Form) -> Form:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m)
        s = c if s is None else s + c
        if is_zero(s):
            out.pop(m, None)
        else:
            out[m] = s
    return out


def scale(a: Form, c) -> Form:
    c = QQi.of(c)
    if is_zero(c):
        return {}
    return {m: v * c for m, v in a.items()}


def _mask_sign(m1: int, m2: int) -> int:
    """Sign of merging two disjoint sorted masks (count of transpositions)."""
    sign = 1
    while m2:
        low = m2 & -m2
        # generators of m1 strictly above `low` must jump over it
        higher = m1 >> (low.bit_length())
        if bin(higher).count("1") % 2:
            sign = -sign
        m2 ^= low
    return sign


def wedge(a: Form, b: Form) -> Form:
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            if m1 & m2:
                continue
            s = _mask_sign(m1, m2)
            c = c1 * c2 * s
            m = m1 | m2
            acc = out.get(m)
            acc = c if acc is None else acc + c
            if is_zero(acc):
                out.pop(m, None)
            else:
                out[m] = acc
    return out


def contract(gen: int, a: Form) -> Form:
    """Interior product by the vector dual to generator `gen`."""
    out = {}
    bit = 1 << gen
    for m, c in a.items():
        if not m & bit:
            continue
        below = bin(m & (bit - 1)).count("1")
        sign = -1 if below % 2 else 1
        out[m ^ bit] = c * sign
    return out


def conj_form(a: Form, swap: dict) -> Form:
    """Complex conjugation: conjugate coefficients, swap generators per map."""
    out = {}
    for m, c in a.items():
        indices = tuple(swap[i] for i in range(m.bit_length()) if m >> i & 1)
        mask, sign = _sorted_mask(indices)
        out_c = c.conjugate() * sign
        acc = out.get(mask)
        acc = out_c if acc is None else acc + out_c
        if is_zero(acc):
            out.pop(mask, None)
        else:
            out[mask] = acc
    return out


def top_coefficient(a: Form, n_gen: int) -> QQi:
    """Coefficient of the full top form e_0 ^ ... ^ e_{n-1}."""
    full = (1 << n_gen) - 1
    return a.get(full, QQi(0))


def forms_equal(a: Form, b: Form) -> bool:
    return add(a, scale(b, QQi(-1))) == {}
