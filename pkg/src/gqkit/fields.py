"""Small finite fields GF(p^k) with elements encoded as integers.

An element is the integer whose base-p digits are the coefficients of its
polynomial representative, lowest degree first.  The modulus is the
lexicographically least monic irreducible polynomial of degree k, so the
encoding of every element is reproducible across runs.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NotPrime, TooLarge

MAX_ORDER = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power(q: int):
    """(p, k) with q = p**k, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            return (p, k) if r == 1 else None
    return None


def _digits(a: int, p: int, k: int) -> list:
    out = []
    for _ in range(k):
        out.append(a % p)
        a //= p
    return out


def _undigits(ds, p: int) -> int:
    a = 0
    for d in reversed(ds):
        a = a * p + d
    return a


def _polymulmod(a, b, mod, p):
    """Multiply digit lists a, b modulo the monic digit list ``mod`` (length k+1)."""
    k = len(mod) - 1
    prod = [0] * (2 * k)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * mod[i]) % p
    return prod[:k]


def _has_root_or_factor(mod, p):
    """True when the monic polynomial ``mod`` over F_p is reducible (brute force by trial division)."""
    k = len(mod) - 1
    # trial divide by every monic polynomial of degree 1..k//2
    for d in range(1, k // 2 + 1):
        for code in range(p ** d):
            div = _digits(code, p, d) + [1]
            rem = list(mod)
            for top in range(k, d - 1, -1):
                c = rem[top]
                if c:
                    for i in range(d + 1):
                        rem[top - d + i] = (rem[top - d + i] - c * div[i]) % p
            if not any(rem[:d]):
                return True
    return False


def least_irreducible(p: int, k: int) -> list:
    """Coefficient list (lowest first, monic) of the lexicographically least irreducible of degree k."""
    if k == 1:
        return [0, 1]
    for code in range(p ** k):
        mod = _digits(code, p, k) + [1]
        if mod[0] == 0:
            continue
        if not _has_root_or_factor(mod, p):
            return mod
    raise AssertionError("no irreducible polynomial found")


class Fq:
    """The field with q = p**k elements, encoded as ints 0..q-1."""

    def __init__(self, p: int, k: int):
        self.p, self.k, self.q = p, k, p ** k
        self.modulus = least_irreducible(p, k)
        q = self.q
        self.digits = [_digits(a, p, k) for a in range(q)]
        # find a primitive element and build log / antilog tables
        for g in range(1, q):
            exp = [1]
            x = self.digits[1]
            gd = self.digits[g]
            ok = True
            for _ in range(1, q - 1):
                x = _polymulmod(x, gd, self.modulus, p)
                v = _undigits(x, p)
                if v == 1:
                    ok = False
                    break
                exp.append(v)
            if ok and (q == 2 or len(set(exp)) == q - 1):
                break
        self.prim = g
        self.exp = exp + exp
        self.log = [0] * q
        for i, v in enumerate(exp):
            self.log[v] = i
        self._add_t = None
        self._mul_t = None

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, Fq) and other.q == self.q

    def __hash__(self):
        return hash(("Fq", self.q))

    @property
    def elements(self):
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % self.p
        da, db = self.digits[a], self.digits[b]
        return _undigits([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.k == 1:
            return (-a) % self.p
        return _undigits([(-x) % self.p for x in self.digits[a]], self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self.exp[(self.log[a] * e) % (self.q - 1)]

    def frob(self, a: int, times: int = 1) -> int:
        """Frobenius x -> x^(p^times)."""
        return self.pow(a, self.p ** times)

    def sum(self, values) -> int:
        s = 0
        for v in values:
            s = self.add(s, v)
        return s

    def from_int(self, n: int) -> int:
        """Image of an ordinary integer in the prime field."""
        return n % self.p

    # vectorized tables
    def add_table(self) -> np.ndarray:
        if self._add_t is None:
            q = self.q
            t = np.zeros((q, q), dtype=np.int32)
            for a in range(q):
                for b in range(q):
                    t[a, b] = self.add(a, b)
            self._add_t = t
        return self._add_t

    def mul_table(self) -> np.ndarray:
        if self._mul_t is None:
            q = self.q
            t = np.zeros((q, q), dtype=np.int32)
            for a in range(1, q):
                for b in range(1, q):
                    t[a, b] = self.mul(a, b)
            self._mul_t = t
        return self._mul_t

    # polynomial helpers used by constructions
    def roots(self, coeffs) -> list:
        """Roots in this field of the polynomial with given coefficients (lowest first)."""
        out = []
        for x in self.elements:
            acc = 0
            for c in reversed(coeffs):
                acc = self.add(self.mul(acc, x), c)
            if acc == 0:
                out.append(x)
        return out

    def is_square(self, a: int) -> bool:
        return a == 0 or any(self.mul(x, x) == a for x in self.elements)


@lru_cache(maxsize=None)
def gf(p: int, k: int = 1) -> Fq:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise TooLarge(f"degree must be positive, got {k}")
    if p ** k > MAX_ORDER:
        raise TooLarge(f"{p}^{k} exceeds the field bound {MAX_ORDER}")
    return Fq(p, k)


def field_of_order(q: int) -> Fq:
    pk = prime_power(q)
    if pk is None:
        raise NotPrime(f"{q} is not a prime power")
    return gf(*pk)


@lru_cache(maxsize=None)
def embedding(small: Fq, big: Fq) -> tuple:
    """Field inclusion small -> big as a lookup tuple.

    The generator x of ``small`` (root of its modulus) is sent to the least
    root of that modulus inside ``big``.
    """
    if small.p != big.p or big.k % small.k:
        raise ValueError(f"{small} is not a subfield of {big}")
    if small.k == 1:
        return tuple(range(small.q))
    # integer coefficients of the small modulus live in the prime field of big
    r = min(big.roots(small.modulus))
    powers = [1]
    for _ in range(1, small.k):
        powers.append(big.mul(powers[-1], r))
    out = []
    for a in small.elements:
        acc = 0
        for c, pw in zip(small.digits[a], powers):
            if c:
                acc = big.add(acc, big.mul(c, pw))
        out.append(acc)
    return tuple(out)
