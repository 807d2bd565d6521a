"""Finite-field message layer.

Messages live in Z_p[j] with p prime and p = 3 (mod 4), which makes Z_p[j] a
field of order p^2.  The transmitter pre-inverts the integer coefficient
matrix A there (W' = inv(A) W mod p) so that the integer combination each
receiver decodes, a_i W' mod p, is exactly its own message row.  All
arithmetic is exact on int64 component arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussint import IntegerCoeffMatrix


class NotInvertibleModPError(ValueError):
    """Coefficient matrix has zero determinant modulo p."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class ModPField:
    """Z_p[j] for prime p = 3 (mod 4)."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.p % 4 != 3:
            raise ValueError(f"p = {self.p} must be congruent to 3 mod 4")


@dataclass(frozen=True)
class MessageMatrix:
    """Matrix over Z_p[j]; component arrays are kept reduced mod p."""

    field: ModPField
    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = np.asarray(self.re, dtype=np.int64) % self.field.p
        im = np.asarray(self.im, dtype=np.int64) % self.field.p
        if re.shape != im.shape or re.ndim != 2:
            raise ValueError("message matrix components must be matching 2-D arrays")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @property
    def shape(self):
        return self.re.shape

    @classmethod
    def random(cls, field: ModPField, rows: int, cols: int, rng) -> "MessageMatrix":
        return cls(
            field,
            rng.integers(0, field.p, size=(rows, cols)),
            rng.integers(0, field.p, size=(rows, cols)),
        )

    def row(self, i: int) -> "MessageMatrix":
        return MessageMatrix(self.field, self.re[i : i + 1], self.im[i : i + 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MessageMatrix):
            return NotImplemented
        return (
            self.field.p == other.field.p
            and np.array_equal(self.re, other.re)
            and np.array_equal(self.im, other.im)
        )

    def __add__(self, other: "MessageMatrix") -> "MessageMatrix":
        if self.field.p != other.field.p:
            raise ValueError("fields differ")
        return MessageMatrix(self.field, self.re + other.re, self.im + other.im)


def _scalar_mul(ar, ai, br, bi, p):
    return (ar * br - ai * bi) % p, (ar * bi + ai * br) % p


def _scalar_pow(ar: int, ai: int, e: int, p: int):
    # Square-and-multiply in the field of order p^2.
    rr, ri = 1, 0
    br, bi = ar % p, ai % p
    while e:
        if e & 1:
            rr, ri = _scalar_mul(rr, ri, br, bi, p)
        br, bi = _scalar_mul(br, bi, br, bi, p)
        e >>= 1
    return rr, ri


def _scalar_inv(ar: int, ai: int, p: int):
    # x^(p^2 - 2) = x^(-1) in the multiplicative group of order p^2 - 1.
    if ar % p == 0 and ai % p == 0:
        raise ZeroDivisionError("zero has no inverse in Z_p[j]")
    return _scalar_pow(ar, ai, p * p - 2, p)


def _matmul_modp(ar, ai, br, bi, p):
    return (ar @ br - ai @ bi) % p, (ar @ bi + ai @ br) % p


def _reduce_coeffs(a: IntegerCoeffMatrix, field: ModPField):
    return a.re % field.p, a.im % field.p


def modp_invertible(a: IntegerCoeffMatrix, field: ModPField) -> bool:
    """True iff det(A) mod p is a nonzero element of Z_p[j]."""
    d = a.det_exact()
    return d.re % field.p != 0 or d.im % field.p != 0


def modp_inverse(a: IntegerCoeffMatrix, field: ModPField) -> MessageMatrix:
    """K x K matrix over Z_p[j] with A @ result = I mod p (Gauss-Jordan)."""
    p = field.p
    k = a.k
    mr, mi = _reduce_coeffs(a, field)
    mr = mr.astype(np.int64).copy()
    mi = mi.astype(np.int64).copy()
    xr = np.eye(k, dtype=np.int64)
    xi = np.zeros((k, k), dtype=np.int64)
    for col in range(k):
        piv = next(
            (r for r in range(col, k) if mr[r, col] != 0 or mi[r, col] != 0), None
        )
        if piv is None:
            raise NotInvertibleModPError(f"matrix not invertible mod {p}")
        if piv != col:
            mr[[col, piv]], mi[[col, piv]] = mr[[piv, col]].copy(), mi[[piv, col]].copy()
            xr[[col, piv]], xi[[col, piv]] = xr[[piv, col]].copy(), xi[[piv, col]].copy()
        invr, invi = _scalar_inv(int(mr[col, col]), int(mi[col, col]), p)
        for arr_r, arr_i in ((mr, mi), (xr, xi)):
            arr_r[col], arr_i[col] = _scalar_mul(arr_r[col], arr_i[col], invr, invi, p)
        for r in range(k):
            if r == col or (mr[r, col] == 0 and mi[r, col] == 0):
                continue
            fr, fi = int(mr[r, col]), int(mi[r, col])
            for arr_r, arr_i in ((mr, mi), (xr, xi)):
                tr, ti = _scalar_mul(arr_r[col], arr_i[col], fr, fi, p)
                arr_r[r] = (arr_r[r] - tr) % p
                arr_i[r] = (arr_i[r] - ti) % p
    return MessageMatrix(field, xr, xi)


def precode_messages(w: MessageMatrix, a: IntegerCoeffMatrix) -> MessageMatrix:
    """W' = inv(A) W mod p."""
    atr = modp_inverse(a, w.field)
    wr, wi = _matmul_modp(atr.re, atr.im, w.re, w.im, w.field.p)
    return MessageMatrix(w.field, wr, wi)


def recover_message(i: int, w_prime: MessageMatrix, a: IntegerCoeffMatrix) -> MessageMatrix:
    """Row a_i times W' mod p: the i-th receiver's decoded combination.

    Equals row i of the original message matrix whenever W' came from
    precode_messages with the same (A, p).
    """
    if not modp_invertible(a, w_prime.field):
        raise NotInvertibleModPError("coefficient matrix not invertible mod p")
    p = w_prime.field.p
    ar = a.re[i : i + 1] % p
    ai = a.im[i : i + 1] % p
    rr, ri = _matmul_modp(ar, ai, w_prime.re, w_prime.im, p)
    return MessageMatrix(w_prime.field, rr, ri)
