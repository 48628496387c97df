"""Finite groups as multiplication tables, plus subgroup machinery and G-sets.

Elements are indices 0..n-1 with index 0 reserved for the identity where a
constructor controls the labeling.  All constructors validate the group
axioms exhaustively at build time; the order cap keeps that cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InvalidParameterError

# Construction cap: the largest instance the acceptance surface needs is
# the symmetric group on 5 points (order 120).  Subgroup *enumeration*
# stays capped at 64, where exhaustive closure search is trivially fast.
MAX_ORDER = 120
MAX_SUBGROUP_ENUMERATION_ORDER = 64


class FiniteGroup:
    """A finite group given by its full multiplication table."""

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        element_names: Optional[Sequence[str]] = None,
        spec: str = "",
        generator_indices: Optional[Dict[str, int]] = None,
        point_action: Optional[List[Tuple[int, ...]]] = None,
    ):
        n = len(table)
        if n == 0:
            raise InvalidParameterError("group order must be positive")
        if n > MAX_ORDER:
            raise InvalidParameterError(f"group order {n} exceeds cap {MAX_ORDER}")
        self.order = n
        self.table = [list(map(int, row)) for row in table]
        for row in self.table:
            if len(row) != n or any(not (0 <= x < n) for x in row):
                raise InvalidParameterError("multiplication table is not closed")
        self.identity = self._find_identity()
        self.inverses = self._find_inverses()
        self._check_associativity()
        self.element_names = list(element_names) if element_names else [f"g{i}" for i in range(n)]
        if len(self.element_names) != n:
            raise InvalidParameterError("element_names length mismatch")
        self.spec = spec or f"table:{n}"
        self.generator_indices = dict(generator_indices or {})
        self.point_action = point_action
        self._subgroups_cache: Optional[List["Subgroup"]] = None
        self._conjugacy_reps_cache: Optional[List["Subgroup"]] = None
        self._as_group_cache: Dict[Tuple[int, ...], Tuple["FiniteGroup", List[int]]] = {}

    # -- construction-time validation ---------------------------------------

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.order)):
                return e
        raise InvalidParameterError("no identity element in table")

    def _find_inverses(self) -> List[int]:
        inv = [-1] * self.order
        e = self.identity
        for x in range(self.order):
            for y in range(self.order):
                if self.table[x][y] == e and self.table[y][x] == e:
                    inv[x] = y
                    break
            if inv[x] < 0:
                raise InvalidParameterError(f"element {x} has no inverse")
        return inv

    def _check_associativity(self) -> None:
        t = self.table
        for a in range(self.order):
            ta = t[a]
            for b in range(self.order):
                if t[ta[b]] != [ta[x] for x in t[b]]:
                    raise InvalidParameterError(f"associativity fails at elements ({a}, {b})")

    # -- basic operations ----------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def conjugate(self, g: int, h: int) -> int:
        """g h g^{-1}."""
        return self.table[self.table[g][h]][self.inverses[g]]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            return self.power(self.inverses[a], -k)
        out = self.identity
        for _ in range(k):
            out = self.table[out][a]
        return out

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.table[x][a]
            n += 1
        return n

    def elements(self) -> range:
        return range(self.order)

    def name_of(self, a: int) -> str:
        return self.element_names[a]

    def is_abelian(self) -> bool:
        return all(
            self.table[a][b] == self.table[b][a]
            for a in range(self.order)
            for b in range(a + 1, self.order)
        )

    def center(self) -> Tuple[int, ...]:
        return tuple(
            g
            for g in range(self.order)
            if all(self.table[g][h] == self.table[h][g] for h in range(self.order))
        )

    def closure(self, seed: Sequence[int]) -> Tuple[int, ...]:
        """Sorted subgroup generated by the seed elements."""
        els = {self.identity} | {int(x) for x in seed}
        changed = True
        while changed:
            changed = False
            cur = sorted(els)
            for a in cur:
                row = self.table[a]
                for b in cur:
                    c = row[b]
                    if c not in els:
                        els.add(c)
                        changed = True
        return tuple(sorted(els))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.spec}, order={self.order})"


@dataclass(frozen=True)
class Subgroup:
    """A subgroup recorded as a sorted element-index set of its parent."""

    parent: FiniteGroup
    elements: Tuple[int, ...]

    def __post_init__(self):
        els = set(self.elements)
        G = self.parent
        if G.identity not in els:
            raise InvalidParameterError("subgroup misses the identity")
        for a in self.elements:
            if G.inverses[a] not in els:
                raise InvalidParameterError("subgroup not closed under inverses")
            for b in self.elements:
                if G.table[a][b] not in els:
                    raise InvalidParameterError("subgroup not closed under multiplication")
        if G.order % len(self.elements) != 0:
            raise InvalidParameterError("subgroup size does not divide group order")

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self) -> int:
        return self.parent.order // self.order

    def contains(self, g: int) -> bool:
        return g in set(self.elements)

    def generators(self) -> Tuple[int, ...]:
        """Deterministic generating set: greedily add smallest missing element."""
        G = self.parent
        gens: List[int] = []
        have = (G.identity,)
        target = set(self.elements)
        while set(have) != target:
            nxt = min(x for x in self.elements if x not in set(have))
            gens.append(nxt)
            have = G.closure(gens)
        return tuple(gens)

    def is_cyclic(self) -> bool:
        return self.cyclic_generator() is not None

    def cyclic_generator(self) -> Optional[int]:
        for g in self.elements:
            if self.parent.element_order(g) == self.order:
                return g
        return None

    def conjugate_by(self, g: int) -> "Subgroup":
        G = self.parent
        return Subgroup(G, tuple(sorted(G.conjugate(g, h) for h in self.elements)))

    def as_group(self) -> Tuple[FiniteGroup, List[int]]:
        """The subgroup as a standalone group plus the element embedding.

        Cached on the parent so repeated calls return the same object,
        letting lattices over the subgroup compare by group identity.
        """
        G = self.parent
        cached = G._as_group_cache.get(self.elements)
        if cached is not None:
            return cached[0], list(cached[1])
        embed = list(self.elements)
        pos = {g: i for i, g in enumerate(embed)}
        table = [[pos[G.table[a][b]] for b in embed] for a in embed]
        names = [G.element_names[g] for g in embed]
        H = FiniteGroup(table, element_names=names, spec=f"{G.spec}|sub{embed}")
        G._as_group_cache[self.elements] = (H, embed)
        return H, list(embed)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, elements={self.elements})"


def whole_group(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)))


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (G.identity,))


def subgroup_from_generators(G: FiniteGroup, gens: Sequence[int]) -> Subgroup:
    return Subgroup(G, G.closure(gens))


# -- constructors ------------------------------------------------------------


def _power_name(sym: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return sym
    return f"{sym}{k}"


def cyclic(n: int) -> FiniteGroup:
    """Cyclic group of order n with generator s."""
    if n < 1:
        raise InvalidParameterError(f"cyclic group order must be >= 1, got {n}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    names = ["e"] + [_power_name("s", i) for i in range(1, n)]
    gens = {"s": 1 % n}
    return FiniteGroup(table, element_names=names, spec=f"C:{n}", generator_indices=gens)


def semidirect(n: int, m: int, r: int) -> FiniteGroup:
    """The group <s, t | s^n = t^m = e, t^-1 s t = s^r>.

    Elements are labeled s^i t^j with index i*m + j.  Requires
    r^m == 1 (mod n); the constructor permits any gcd(n, m).
    """
    if n < 1 or m < 1:
        raise InvalidParameterError("semidirect orders must be positive")
    r = r % n if n > 1 else 0
    if pow(r, m, n) != 1 % n:
        raise InvalidParameterError(
            f"invalid twist: r^m = {r}^{m} is not congruent to 1 modulo {n}"
        )
    if gcd(r, n) != 1:
        raise InvalidParameterError(f"twist r={r} is not invertible modulo {n}")
    rinv = pow(r, -1, n) if n > 1 else 0

    def idx(i: int, j: int) -> int:
        return (i % n) * m + (j % m)

    table = []
    for i1 in range(n):
        for j1 in range(m):
            row = []
            shift = pow(rinv, j1, n) if n > 1 else 0
            for i2 in range(n):
                for j2 in range(m):
                    row.append(idx(i1 + i2 * shift, j1 + j2))
            table.append(row)
    names = []
    for i in range(n):
        for j in range(m):
            nm = _power_name("s", i) + _power_name("t", j)
            names.append(nm or "e")
    gens = {"s": idx(1, 0), "t": idx(0, 1)}
    return FiniteGroup(
        table, element_names=names, spec=f"SD:{n},{m},{r}", generator_indices=gens
    )


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n (t s t^-1 = s^-1)."""
    if n < 1:
        raise InvalidParameterError("dihedral parameter must be >= 1")
    G = semidirect(n, 2, (n - 1) % n if n > 1 else 0)
    G.spec = f"D:{n}"
    return G


def symmetric(n: int) -> FiniteGroup:
    """Symmetric group on n points (n <= 5), with the natural point action."""
    if not 1 <= n <= 5:
        raise InvalidParameterError(f"symmetric group supported for 1 <= n <= 5, got {n}")
    perms = sorted(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms]
    names = [_cycle_name(p) for p in perms]
    return FiniteGroup(
        table,
        element_names=names,
        spec=f"S:{n}",
        point_action=[tuple(p) for p in perms],
    )


def _cycle_name(perm: Tuple[int, ...]) -> str:
    seen = [False] * len(perm)
    parts = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = perm[x]
        parts.append("(" + "".join(str(i + 1) for i in cyc) + ")")
    return "".join(parts) or "e"


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Direct product with index (a, b) -> a*|H| + b."""
    n, m = G.order, H.order
    if n * m > MAX_ORDER:
        raise InvalidParameterError(f"product order {n * m} exceeds cap {MAX_ORDER}")
    table = []
    for a in range(n):
        for b in range(m):
            row = []
            for c in range(n):
                for d in range(m):
                    row.append(G.table[a][c] * m + H.table[b][d])
            table.append(row)
    names = [
        f"({G.element_names[a]}|{H.element_names[b]})" for a in range(n) for b in range(m)
    ]
    return FiniteGroup(table, element_names=names, spec=f"X({G.spec},{H.spec})")


# -- subgroup enumeration -----------------------------------------------------


def all_subgroups(G: FiniteGroup) -> List[Subgroup]:
    """Every subgroup, found by closing known subgroups with one new element.

    Complete: any subgroup arises by adjoining its generators one at a time.
    """
    if G._subgroups_cache is not None:
        return list(G._subgroups_cache)
    if G.order > MAX_SUBGROUP_ENUMERATION_ORDER:
        raise InvalidParameterError(
            f"subgroup enumeration capped at order {MAX_SUBGROUP_ENUMERATION_ORDER}"
        )
    triv = (G.identity,)
    known = {triv}
    frontier = [triv]
    while frontier:
        base = frontier.pop()
        base_set = set(base)
        for g in range(G.order):
            if g not in base_set:
                new = G.closure(base + (g,))
                if new not in known:
                    known.add(new)
                    frontier.append(new)
    ordered = sorted(known, key=lambda els: (len(els), els))
    subs = [Subgroup(G, els) for els in ordered]
    G._subgroups_cache = subs
    return list(subs)


def subgroup_conjugacy_reps(G: FiniteGroup) -> List[Subgroup]:
    """One representative per conjugacy class of subgroups (deterministic)."""
    if G._conjugacy_reps_cache is not None:
        return list(G._conjugacy_reps_cache)
    subs = all_subgroups(G)
    seen = set()
    reps = []
    for sub in subs:  # already sorted by (order, elements)
        if sub.elements in seen:
            continue
        orbit = {tuple(sorted(G.conjugate(g, h) for h in sub.elements)) for g in range(G.order)}
        seen.update(orbit)
        reps.append(sub)
    G._conjugacy_reps_cache = reps
    return list(reps)


def _prime_factors(n: int) -> List[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def sylow(G: FiniteGroup, p: int) -> Subgroup:
    """One p-Sylow subgroup (the first in canonical subgroup order)."""
    if p < 2 or any(p % q == 0 for q in range(2, p) if q * q <= p):
        raise InvalidParameterError(f"{p} is not prime")
    if G.order % p != 0:
        raise InvalidParameterError(f"{p} does not divide the group order {G.order}")
    pk = 1
    while G.order % (pk * p) == 0:
        pk *= p
    for sub in all_subgroups(G):
        if sub.order == pk:
            return sub
    raise AssertionError("Sylow subgroup must exist")  # unreachable


def is_z_group(G: FiniteGroup) -> bool:
    """True when every Sylow subgroup (all primes) is cyclic."""
    return all(sylow(G, p).is_cyclic() for p in _prime_factors(G.order))


# -- G-sets -------------------------------------------------------------------


class GSet:
    """A finite left G-set: one point permutation per group element."""

    def __init__(
        self,
        group: FiniteGroup,
        action: Sequence[Sequence[int]],
        point_names: Optional[Sequence[str]] = None,
    ):
        self.group = group
        self.action = [tuple(map(int, perm)) for perm in action]
        if len(self.action) != group.order:
            raise InvalidParameterError("need one permutation per group element")
        self.size = len(self.action[0]) if self.action else 0
        for perm in self.action:
            if sorted(perm) != list(range(self.size)):
                raise InvalidParameterError("invalid-gset: action values are not permutations")
        e = group.identity
        if self.action[e] != tuple(range(self.size)):
            raise InvalidParameterError("invalid-gset: identity does not act trivially")
        for g in range(group.order):
            pg = self.action[g]
            for h in range(group.order):
                ph = self.action[h]
                gh = group.table[g][h]
                if self.action[gh] != tuple(pg[ph[x]] for x in range(self.size)):
                    raise InvalidParameterError(
                        f"invalid-gset: action incompatible at elements ({g}, {h})"
                    )
        self.point_names = (
            list(point_names) if point_names else [f"p{i}" for i in range(self.size)]
        )

    def apply(self, g: int, x: int) -> int:
        return self.action[g][x]

    def orbits(self) -> List[Tuple[int, ...]]:
        seen = [False] * self.size
        out = []
        for x in range(self.size):
            if seen[x]:
                continue
            orbit = sorted({self.action[g][x] for g in range(self.group.order)})
            for y in orbit:
                seen[y] = True
            out.append(tuple(orbit))
        return out

    def stabilizer(self, x: int) -> Subgroup:
        els = tuple(sorted(g for g in range(self.group.order) if self.action[g][x] == x))
        return Subgroup(self.group, els)

    def is_free(self) -> bool:
        return all(
            all(self.action[g][x] != x for x in range(self.size))
            for g in range(self.group.order)
            if g != self.group.identity
        )

    def disjoint_union(self, other: "GSet") -> "GSet":
        if other.group is not self.group:
            raise InvalidParameterError("G-set union needs a common group")
        k = self.size
        action = [
            tuple(self.action[g]) + tuple(x + k for x in other.action[g])
            for g in range(self.group.order)
        ]
        return GSet(self.group, action, self.point_names + other.point_names)

    def __repr__(self) -> str:
        return f"GSet(group={self.group.spec}, size={self.size})"


def regular_gset(G: FiniteGroup) -> GSet:
    """G acting on itself by left translation."""
    action = [tuple(G.table[g][x] for x in range(G.order)) for g in range(G.order)]
    return GSet(G, action, list(G.element_names))


def coset_gset(G: FiniteGroup, H: Subgroup) -> GSet:
    """Left cosets gH under left translation; points sorted by minimal element."""
    if H.parent is not G:
        raise InvalidParameterError("subgroup belongs to a different group")
    hset = set(H.elements)
    coset_of = {}
    reps = []
    for g in range(G.order):
        if g in coset_of:
            continue
        members = sorted(G.table[g][h] for h in hset)
        for x in members:
            coset_of[x] = len(reps)
        reps.append(members[0])
    action = []
    for g in range(G.order):
        action.append(tuple(coset_of[G.table[g][rep]] for rep in reps))
    names = [f"{G.element_names[rep]}H" for rep in reps]
    return GSet(G, action, names)


def trivial_gset(G: FiniteGroup, points: int = 1) -> GSet:
    return GSet(G, [tuple(range(points))] * G.order, [f"p{i}" for i in range(points)])


def natural_gset(G: FiniteGroup) -> GSet:
    """The defining point action (symmetric groups only)."""
    if G.point_action is None:
        raise InvalidParameterError(f"group {G.spec} carries no natural point action")
    return GSet(G, G.point_action, [str(i + 1) for i in range(len(G.point_action[0]))])


def left_coset_reps(G: FiniteGroup, H: Subgroup) -> List[int]:
    """Minimal-index representative of each left coset gH, sorted."""
    hset = set(H.elements)
    reps = []
    seen = set()
    for g in range(G.order):
        if g in seen:
            continue
        members = {G.table[g][h] for h in hset}
        seen |= members
        reps.append(min(members))
    return sorted(reps)
