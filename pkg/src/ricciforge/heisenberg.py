"""Heisenberg groups, their action on the nilmanifold Nil^3_k, and abelian subgroups.

Elements are triples ``(a, b, c)`` standing for the unipotent matrix with
``a, c`` on the first row and ``b`` on the second, so
``(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')``.  With
``X = (1,0,0)``, ``Y = (0,1,0)``, ``Z = (0,0,1)`` every element is
``Z^c Y^b X^a``, and the defining relations are ``[X, Y] = Z`` with ``Z``
central.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ModulusMismatch, TooLarge

# ---------------------------------------------------------------------------
# group elements


@dataclass(frozen=True)
class HeisenbergElement:
    """Element of H3(Z/kZ); ``k = 0`` gives the integer Heisenberg group."""

    a: int
    b: int
    c: int
    k: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("modulus must be non-negative")
        if self.k:
            object.__setattr__(self, "a", self.a % self.k)
            object.__setattr__(self, "b", self.b % self.k)
            object.__setattr__(self, "c", self.c % self.k)

    @classmethod
    def identity(cls, k: int = 0) -> "HeisenbergElement":
        return cls(0, 0, 0, k)

    def _check(self, other: "HeisenbergElement"):
        if self.k != other.k:
            raise ModulusMismatch(f"moduli differ: {self.k} and {other.k}")

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        self._check(other)
        return HeisenbergElement(self.a + other.a, self.b + other.b, self.c + other.c + self.a * other.b, self.k)

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.a, -self.b, -self.c + self.a * self.b, self.k)

    def __pow__(self, n: int) -> "HeisenbergElement":
        base = self if n >= 0 else self.inverse()
        out = HeisenbergElement.identity(self.k)
        for _ in range(abs(n)):
            out = out * base
        return out

    def matrix(self) -> np.ndarray:
        return np.array([[1, self.a, self.c], [0, 1, self.b], [0, 0, 1]], dtype=np.int64)

    @property
    def is_identity(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0


def multiply(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return g * h


def inverse(g: HeisenbergElement) -> HeisenbergElement:
    return g.inverse()


def commutator(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    """``g h g^{-1} h^{-1}``."""
    return g * h * g.inverse() * h.inverse()


def generators(k: int = 0) -> tuple[HeisenbergElement, HeisenbergElement, HeisenbergElement]:
    """The standard generators X, Y, Z."""
    return (HeisenbergElement(1, 0, 0, k), HeisenbergElement(0, 1, 0, k), HeisenbergElement(0, 0, 1, k))


def elements(k: int) -> list[HeisenbergElement]:
    if k < 1:
        raise ValueError("finite group needs k >= 1")
    return [HeisenbergElement(a, b, c, k) for a in range(k) for b in range(k) for c in range(k)]


def center(k: int) -> list[HeisenbergElement]:
    """Center by brute force."""
    els = elements(k)
    return [z for z in els if all(z * g == g * z for g in els)]


def degree_two_extension_order(k: int) -> int:
    """Order ``2 k^3`` of a degree-two extension of H3(Z/kZ)."""
    if k < 1:
        raise ValueError("k must be positive")
    return 2 * k**3


# ---------------------------------------------------------------------------
# subgroups


def _index(a, b, c, k):
    return (a * k + b) * k + c


def multiplication_table(k: int) -> np.ndarray:
    """``table[i, j]`` is the index of ``e_i e_j`` with ``e = (a, b, c) -> (a k + b) k + c``."""
    r = np.arange(k)
    a, b, c = np.meshgrid(r, r, r, indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    A = (a[:, None] + a[None, :]) % k
    B = (b[:, None] + b[None, :]) % k
    C = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % k
    return _index(A, B, C, k)


def _closure(table: np.ndarray, gens) -> frozenset:
    """Subgroup generated by ``gens`` (finite group, so products suffice)."""
    group = {0} | set(gens)
    frontier = list(group)
    gens = list(gens)
    while frontier:
        new = []
        for h in frontier:
            for g in gens:
                p = int(table[h, g])
                if p not in group:
                    group.add(p)
                    new.append(p)
        frontier = new
    return frozenset(group)


MAX_EXHAUSTIVE_K = 6


def abelian_subgroups(k: int) -> set[frozenset]:
    """Every abelian subgroup of H3(Z/kZ), as frozensets of element indices.

    An abelian subgroup ``A`` and an element ``g`` commuting with all of ``A``
    generate the abelian subgroup ``<A, g>``; every abelian subgroup arises by
    such steps from the trivial one, so a breadth-first search over these
    joins is exhaustive.
    """
    if not 1 <= k <= MAX_EXHAUSTIVE_K:
        raise TooLarge(f"exhaustive enumeration is limited to k <= {MAX_EXHAUSTIVE_K}")
    T = multiplication_table(k)
    commutes = T == T.T
    found = {frozenset({0})}
    frontier = list(found)
    while frontier:
        nxt = []
        for A in frontier:
            members = np.fromiter(A, dtype=int)
            central = np.nonzero(commutes[:, members].all(axis=1))[0]
            for g in central:
                if int(g) in A:
                    continue
                B = _closure(T, list(A) + [int(g)])
                if B not in found:
                    found.add(B)
                    nxt.append(B)
        frontier = nxt
    return found


def all_subgroups(k: int) -> set[frozenset]:
    """Every subgroup, by joining subgroups with cyclic ones until nothing new appears.

    Slow; meant as an independent cross-check for k <= 4.
    """
    if not 1 <= k <= 4:
        raise TooLarge("full subgroup enumeration is limited to k <= 4")
    T = multiplication_table(k)
    n = T.shape[0]
    found = {frozenset({0})}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            for g in range(n):
                if g in H:
                    continue
                J = _closure(T, list(H) + [g])
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return found


def is_abelian(table: np.ndarray, subgroup) -> bool:
    idx = np.fromiter(subgroup, dtype=int)
    sub = table[np.ix_(idx, idx)]
    return bool(np.array_equal(sub, sub.T))


def min_abelian_index(k: int) -> int:
    """Smallest index ``k^3 / |A|`` over abelian subgroups A of H3(Z/kZ), for 2 <= k <= 6."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > MAX_EXHAUSTIVE_K:
        raise TooLarge(f"exhaustive enumeration is limited to k <= {MAX_EXHAUSTIVE_K}")
    best = max(len(A) for A in abelian_subgroups(k))
    return k**3 // best


# ---------------------------------------------------------------------------
# the nilmanifold


@dataclass(frozen=True)
class NilPoint:
    """Point of Nil^3_k in the canonical representative ``x, y in [0, 1)``.

    The lattice Z^2 acts by ``(a, b).(x, y, z) = (x + a, y + b, exp(-2 pi i k a y) z)``.
    """

    x: float
    y: float
    z: complex
    k: int

    @classmethod
    def make(cls, x: float, y: float, z: complex, k: int) -> "NilPoint":
        if k < 1:
            raise ValueError("k must be positive")
        a = -np.floor(x)
        x, z = x + a, z * np.exp(-2j * np.pi * k * a * y)
        b = -np.floor(y)
        y = y + b
        # floating point can land exactly on 1.0
        if x >= 1.0:
            x, z = x - 1.0, z * np.exp(2j * np.pi * k * y)
        if y >= 1.0:
            y -= 1.0
        return cls(float(x), float(y), complex(z), k)

    def shifted(self, a: int, b: int) -> tuple[float, float, complex]:
        """Another representative of the same point, not normalized."""
        return self.x + a, self.y + b, self.z * np.exp(-2j * np.pi * self.k * a * self.y)


def lattice_act(a: int, b: int, x: float, y: float, z: complex, k: int) -> tuple[float, float, complex]:
    return x + a, y + b, z * np.exp(-2j * np.pi * k * a * y)


def nil_equal(p: NilPoint, q: NilPoint, tol: float = 1e-12) -> bool:
    """Equality in the quotient, robust to representatives straddling x or y = 0."""
    if p.k != q.k:
        return False
    for a, b in itertools.product((-1, 0, 1), repeat=2):
        x, y, z = p.shifted(a, b)
        if abs(x - q.x) <= tol and abs(y - q.y) <= tol and abs(z - q.z) <= tol:
            return True
    return False


def nil_act_raw(g: HeisenbergElement, x: float, y: float, z: complex, k: int) -> tuple[float, float, complex]:
    """``(a, b, c).[x, y, z] = [x + a/k, y + b/k, exp(-2 pi i (a y + c/k)) z]`` on representatives."""
    return x + g.a / k, y + g.b / k, z * np.exp(-2j * np.pi * (g.a * y + g.c / k))


def nil_act(g: HeisenbergElement, p: NilPoint, k: int | None = None) -> NilPoint:
    k = p.k if k is None else k
    if g.k != k or p.k != k:
        raise ModulusMismatch("group modulus and nilmanifold degree differ")
    return NilPoint.make(*nil_act_raw(g, p.x, p.y, p.z, k), k)


def fiber_rotate(p: NilPoint, theta: float) -> NilPoint:
    """The free circle action on the fibres."""
    return NilPoint(p.x, p.y, p.z * np.exp(1j * theta), p.k)


def projection_t2(p: NilPoint) -> tuple[float, float]:
    """Bundle projection to the torus R^2 / Z^2."""
    return p.x % 1.0, p.y % 1.0


def torus_equal(u, v, tol: float = 1e-12) -> bool:
    d = (np.asarray(u) - np.asarray(v) + 0.5) % 1.0 - 0.5
    return bool(np.all(np.abs(d) <= tol))


def random_nil_points(count: int, k: int, seed: int = 0) -> list[NilPoint]:
    rng = np.random.default_rng(seed)
    xs, ys, th = rng.random(count), rng.random(count), rng.random(count) * 2 * np.pi
    return [NilPoint.make(x, y, np.exp(1j * t), k) for x, y, t in zip(xs, ys, th)]
