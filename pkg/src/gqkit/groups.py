"""Permutation groups given by generators, with a deterministic Schreier-Sims
stabilizer chain.

A permutation is a tuple ``g`` with ``g[x]`` the image of ``x``.  Products are
read left to right: ``mul(a, b)`` applies ``a`` first.
"""
from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import product as iproduct
from math import prod


@lru_cache(maxsize=64)
def identity(n: int) -> tuple:
    return tuple(range(n))


def mul(a, b) -> tuple:
    return tuple(map(b.__getitem__, a))


def inverse(a) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def is_identity(a) -> bool:
    return tuple(a) == identity(len(a))


def cycle_type(a) -> tuple:
    seen = [False] * len(a)
    lens = []
    for i in range(len(a)):
        if not seen[i]:
            k, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = a[j]
                k += 1
            lens.append(k)
    return tuple(sorted(lens))


class StabChain:
    """Base, strong generators per level, and transversals (point -> coset representative)."""

    def __init__(self, n: int, gens, base_prefix=()):
        self.n = n
        self.base = list(base_prefix)
        self.levels = [[] for _ in self.base]
        self.trans = []
        gens = [tuple(g) for g in gens if not is_identity(g)]
        for g in gens:
            if all(g[b] == b for b in self.base):
                self._new_base_point(g)
            for i in range(len(self.base)):
                if all(g[b] == b for b in self.base[:i]):
                    self.levels[i].append(g)
        self._run()

    def _new_base_point(self, g):
        for x in range(self.n):
            if g[x] != x:
                self.base.append(x)
                self.levels.append([])
                return
        raise AssertionError("identity cannot extend the base")

    def _transversal(self, i) -> dict:
        b = self.base[i]
        t = {b: identity(self.n)}
        queue = [b]
        for x in queue:
            ux = t[x]
            for s in self.levels[i]:
                y = s[x]
                if y not in t:
                    t[y] = mul(ux, s)
                    queue.append(y)
        return t

    def _inv(self, l, beta):
        c = self.tinv[l]
        if beta not in c:
            c[beta] = inverse(self.trans[l][beta])
        return c[beta]

    def _strip(self, g, start):
        for l in range(start, len(self.base)):
            beta = g[self.base[l]]
            if beta not in self.trans[l]:
                return g, l
            g = mul(g, self._inv(l, beta))
        return g, len(self.base)

    def _set_trans(self, i):
        self.trans[i] = self._transversal(i)
        self.tinv[i] = {}

    def _run(self):
        self.trans = [None] * len(self.base)
        self.tinv = [None] * len(self.base)
        for i in range(len(self.base)):
            self._set_trans(i)
        i = len(self.base) - 1
        while i >= 0:
            self._set_trans(i)
            again = False
            t = self.trans[i]
            for beta, ub in list(t.items()):
                for s in self.levels[i]:
                    sch = mul(mul(ub, s), self._inv(i, s[beta]))
                    if is_identity(sch):
                        continue
                    h, j = self._strip(sch, i + 1)
                    if j < len(self.base) or not is_identity(h):
                        if j == len(self.base):
                            self._new_base_point(h)
                            self.trans.append(None)
                            self.tinv.append(None)
                        for l in range(i + 1, j + 1):
                            self.levels[l].append(h)
                        for l in range(i + 1, j + 1):
                            self._set_trans(l)
                        i = j
                        again = True
                        break
                if again:
                    break
            if not again:
                i -= 1

    def order(self) -> int:
        return prod(len(t) for t in self.trans)

    def contains(self, g) -> bool:
        h, j = self._strip(tuple(g), 0)
        return j == len(self.base) and is_identity(h)


class PermGroup:
    """Finite permutation group on 0..degree-1."""

    def __init__(self, degree: int, gens=()):
        self.degree = degree
        self.gens = tuple(tuple(g) for g in gens if not is_identity(g))
        for g in self.gens:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ValueError("generator is not a permutation of the degree set")
        self._chain = None
        self._order = None

    def __repr__(self):
        return f"<PermGroup degree={self.degree} gens={len(self.gens)}>"

    @property
    def chain(self) -> StabChain:
        if self._chain is None:
            self._chain = StabChain(self.degree, self.gens)
        return self._chain

    def order(self) -> int:
        if self._order is None:
            self._order = self.chain.order() if self.gens else 1
        return self._order

    def contains(self, g) -> bool:
        if is_identity(g):
            return True
        if not self.gens:
            return False
        return self.chain.contains(g)

    def orbit(self, x: int) -> list:
        seen = {x}
        queue = [x]
        for y in queue:
            for g in self.gens:
                z = g[y]
                if z not in seen:
                    seen.add(z)
                    queue.append(z)
        return sorted(seen)

    def orbits(self) -> list:
        seen = set()
        out = []
        for x in range(self.degree):
            if x not in seen:
                o = self.orbit(x)
                seen.update(o)
                out.append(o)
        return out

    def orbit_lengths(self) -> tuple:
        return tuple(sorted(len(o) for o in self.orbits()))

    def is_transitive_on(self, subset) -> bool:
        subset = sorted(subset)
        if not subset:
            return True
        return set(self.orbit(subset[0])) >= set(subset) and \
            all(g[x] in set(subset) for g in self.gens for x in subset)

    def stabilizer(self, points) -> "PermGroup":
        """Pointwise stabilizer of the given sequence of points."""
        points = list(points)
        if not self.gens:
            return PermGroup(self.degree)
        ch = StabChain(self.degree, self.gens, points)
        k = len(points)
        gens = ch.levels[k] if k < len(ch.levels) else []
        return PermGroup(self.degree, gens)

    def restrict(self, domain) -> "PermGroup":
        """Action on an invariant subset, relabelled 0..len(domain)-1 in the given order."""
        domain = list(domain)
        idx = {x: i for i, x in enumerate(domain)}
        gens = []
        for g in self.gens:
            try:
                gens.append(tuple(idx[g[x]] for x in domain))
            except KeyError:
                raise ValueError("domain is not invariant under the group") from None
        return PermGroup(len(domain), gens)

    def conjugate(self, bij) -> "PermGroup":
        """Group bij^-1 G bij, i.e. relabel points x -> bij[x]."""
        inv = inverse(bij)
        return PermGroup(self.degree, [tuple(bij[g[inv[y]]] for y in range(self.degree))
                                       for g in self.gens])

    def elements(self, limit: int = 200000):
        """All elements, enumerated from the stabilizer chain (only for small groups)."""
        if self.order() > limit:
            raise ValueError("group too large to enumerate")
        if not self.gens:
            yield identity(self.degree)
            return
        reps = [list(t.values()) for t in self.chain.trans]
        for combo in iproduct(*reversed(reps)):
            g = identity(self.degree)
            for u in combo:
                g = mul(g, u)
            yield g

    def cycle_type_counts(self, limit: int = 50000):
        """Multiset of cycle types, or None when the group is too large to enumerate."""
        if self.order() > limit:
            return None
        return Counter(cycle_type(g) for g in self.elements(limit))

    def same_as(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and self.order() == other.order() and \
            all(self.contains(g) for g in other.gens)
