"""Tate cohomology in degrees -1, 0, 1; flasque/coflasque predicates;
resolution constructors; split finding; permutation and invertibility
certificates.

Degree 1 is computed through duality (reducing it to norm and
augmentation kernels); the cyclic-subgroup direct formula is kept as an
independent cross-check oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidParameterError
from .gmod import (
    EquivariantMap,
    GLattice,
    ShortExactSequence,
    check_exact,
    coset_lattice,
    direct_sum,
    direct_sum_many,
    dual,
    fixed_sublattice,
    lattices_equal,
    norm_matrix,
    sublattice_with_action,
    tensor,
)
from .groups import FiniteGroup, GSet, Subgroup, subgroup_conjugacy_reps, sylow, whole_group
from .intlinalg import (
    BasisSolver,
    IntMatrix,
    bezout_coefficients,
    cokernel_invariants,
    kernel_basis,
    smith,
    solve,
    solve_matrix,
)


@dataclass(frozen=True)
class TateGroup:
    """A finite abelian group as a divisibility chain of invariant factors."""

    invariant_factors: Tuple[int, ...] = ()

    def __post_init__(self):
        fs = self.invariant_factors
        if any(d <= 1 for d in fs):
            raise InvalidParameterError("invariant factors must exceed 1")
        if any(fs[i + 1] % fs[i] for i in range(len(fs) - 1)):
            raise InvalidParameterError("invariant factors must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


def _quotient_in_lattice(span_basis: IntMatrix, generators: IntMatrix) -> TateGroup:
    """Invariant factors of span(span_basis) / span(generators).

    The generators must lie inside the (saturated) span; the quotient must
    be finite, which is asserted.
    """
    if span_basis.cols == 0:
        return TateGroup(())
    solver = BasisSolver(span_basis)
    cols = []
    seen = set()
    for j in range(generators.cols):
        col = generators.col_list(j)
        key = tuple(col)
        if key in seen or all(x == 0 for x in col):
            continue
        seen.add(key)
        coords = solver.express(col)
        if coords is None:
            raise InvalidParameterError("generator escapes the ambient sublattice")
        cols.append(coords)
    coord_matrix = IntMatrix.from_columns(cols, rows=span_basis.cols)
    factors, free = cokernel_invariants(coord_matrix)
    assert free == 0, "Tate quotients of lattices are finite"
    return TateGroup(tuple(factors))


def tate(M: GLattice, H: Subgroup, degree: int) -> TateGroup:
    """Tate cohomology of the subgroup H with coefficients in M.

    Degree 0 is fixed points modulo norms, degree -1 is the norm kernel
    modulo the augmentation submodule, and degree +1 dualizes to -1.
    """
    if H.parent is not M.group:
        raise InvalidParameterError("subgroup belongs to a different group")
    if degree not in (-1, 0, 1):
        raise InvalidParameterError("degree must be -1, 0 or 1")
    if degree == 1:
        return tate(dual(M), H, -1)
    if degree == 0:
        fixed = fixed_sublattice(M, H)
        return _quotient_in_lattice(fixed, norm_matrix(M, H))
    norm_ker = kernel_basis(norm_matrix(M, H))
    eye = IntMatrix.identity(M.rank)
    blocks = [M.action[h] - eye for h in H.elements if h != M.group.identity]
    gens = blocks[0] if blocks else IntMatrix.zeros(M.rank, 0)
    for b in blocks[1:]:
        gens = gens.hstack(b)
    return _quotient_in_lattice(norm_ker, gens)


def tate1_cyclic_direct(M: GLattice, H: Subgroup) -> TateGroup:
    """Independent oracle for degree 1 over a cyclic subgroup.

    Uses the periodicity of cyclic cohomology: ker(norm) / image(h - 1)
    for a generator h.
    """
    if H.parent is not M.group:
        raise InvalidParameterError("subgroup belongs to a different group")
    gen = H.cyclic_generator()
    if gen is None:
        raise InvalidParameterError("subgroup is not cyclic")
    norm_ker = kernel_basis(norm_matrix(M, H))
    image = M.action[gen] - IntMatrix.identity(M.rank)
    return _quotient_in_lattice(norm_ker, image)


@dataclass
class VanishingReport:
    """Result of a flasque/coflasque scan over subgroup representatives."""

    ok: bool
    degree: int
    failing_subgroup: Optional[Subgroup] = None
    failing_group: Optional[TateGroup] = None

    def __bool__(self) -> bool:
        return self.ok


def _vanishes_for_all_subgroups(M: GLattice, degree: int) -> VanishingReport:
    # cohomology is conjugation-invariant, so representatives suffice
    for H in subgroup_conjugacy_reps(M.group):
        t = tate(M, H, degree)
        if not t.is_trivial:
            return VanishingReport(False, degree, H, t)
    return VanishingReport(True, degree)


def is_flasque(M: GLattice) -> VanishingReport:
    """Vanishing of degree -1 Tate cohomology for every subgroup."""
    return _vanishes_for_all_subgroups(M, -1)


def is_coflasque(M: GLattice) -> VanishingReport:
    """Vanishing of degree +1 Tate cohomology for every subgroup."""
    return _vanishes_for_all_subgroups(M, 1)


# -- resolutions ---------------------------------------------------------------


@dataclass
class ResolutionCertificate:
    """A checked (co)flasque resolution with its permutation middle term."""

    sequence: ShortExactSequence
    kind: str  # "coflasque" or "flasque"
    permutation_witness: Optional[GSet]

    def validate(self) -> "ResolutionCertificate":
        report = check_exact(self.sequence)
        if not report.ok:
            raise InvalidParameterError(f"resolution is not exact: {report.failures}")
        if not self.sequence.B.is_permutation_action():
            raise InvalidParameterError("middle term is not a permutation lattice")
        if self.kind == "coflasque":
            verdict = is_coflasque(self.sequence.A)
            if not verdict:
                raise InvalidParameterError(
                    f"kernel fails coflasqueness at subgroup {verdict.failing_subgroup}"
                )
        elif self.kind == "flasque":
            verdict = is_flasque(self.sequence.C)
            if not verdict:
                raise InvalidParameterError(
                    f"cokernel fails flasqueness at subgroup {verdict.failing_subgroup}"
                )
        else:
            raise InvalidParameterError(f"unknown resolution kind {self.kind!r}")
        return self


def coflasque_resolution(
    M: GLattice, rep_order: Optional[Sequence[int]] = None
) -> ResolutionCertificate:
    """0 -> C -> P -> M -> 0 with P permutation and C coflasque.

    P carries one copy of Z[G/H] per basis vector of the H-fixed
    sublattice, over every subgroup conjugacy representative H; the copy
    maps gH to g applied to the fixed vector.  This makes P^H -> M^H
    surjective for all H, which forces the kernel coflasque (verified).
    """
    G = M.group
    reps = subgroup_conjugacy_reps(G)
    if rep_order is not None:
        if sorted(rep_order) != list(range(len(reps))):
            raise InvalidParameterError("rep_order must permute the representatives")
        reps = [reps[i] for i in rep_order]
    summands: List[GLattice] = []
    col_blocks: List[List[List[int]]] = []
    for H in reps:
        fixed = fixed_sublattice(M, H)
        if fixed.cols == 0:
            continue
        lat = coset_lattice(G, H)
        points = lat.gset
        # g_p with g_p(basepoint) = p, for the orbit of the identity coset
        g_for_point = []
        for p in range(points.size):
            g_for_point.append(min(g for g in G.elements() if points.apply(g, 0) == p))
        for j in range(fixed.cols):
            v = fixed.col_list(j)
            summands.append(lat)
            col_blocks.append(
                [M.action[g_for_point[p]].mul_vector(v) for p in range(points.size)]
            )
    if not summands:
        raise InvalidParameterError("lattice admits no fixed vectors; rank 0 unsupported")
    P = direct_sum_many(summands)
    pi_cols: List[List[int]] = []
    for block in col_blocks:
        pi_cols.extend(block)
    pi = EquivariantMap(P, M, IntMatrix.from_columns(pi_cols, rows=M.rank))
    kernel = kernel_basis(pi.matrix)
    C, incl = sublattice_with_action(P, kernel, name="coflasque kernel")
    cert = ResolutionCertificate(
        sequence=ShortExactSequence(incl, pi),
        kind="coflasque",
        permutation_witness=P.gset,
    )
    return cert.validate()


def flasque_resolution(M: GLattice) -> ResolutionCertificate:
    """0 -> M -> P -> F -> 0 obtained by dualizing a coflasque resolution.

    Permutation lattices are self dual, so the middle term keeps its
    point structure on the nose.
    """
    co = coflasque_resolution(dual(M))
    P = co.sequence.B  # self-dual: identical matrices
    C = co.sequence.A
    F = dual(C)
    left = EquivariantMap(M, P, co.sequence.right.matrix.T)
    right = EquivariantMap(P, F, co.sequence.left.matrix.T)
    cert = ResolutionCertificate(
        sequence=ShortExactSequence(left, right),
        kind="flasque",
        permutation_witness=co.permutation_witness,
    )
    return cert.validate()


def pullback(
    f: EquivariantMap, g: EquivariantMap
) -> Tuple[GLattice, EquivariantMap, EquivariantMap, EquivariantMap]:
    """Fibre product {(x, y): f(x) = g(y)}.

    Returns the pullback lattice, its two projections, and the inclusion
    into the ambient direct sum of the sources.
    """
    if not lattices_equal(f.target, g.target):
        raise InvalidParameterError("pullback legs must share the target")
    big = f.matrix.hstack(-g.matrix)
    K = kernel_basis(big)
    ambient = direct_sum(f.source, g.source)
    Q, incl = sublattice_with_action(ambient, K, name="pullback")
    b1 = f.source.rank
    p1 = EquivariantMap(Q, f.source, K.take_rows(range(b1)))
    p2 = EquivariantMap(Q, g.source, K.take_rows(range(b1, ambient.rank)))
    return Q, p1, p2, incl


# -- equivariant hom spaces -----------------------------------------------------


def _orbit_transversal(points: GSet) -> List[Tuple[int, List[int]]]:
    """Per orbit: (basepoint, g_p for each point with g_p(basepoint) = point)."""
    out = []
    for orbit in points.orbits():
        base = orbit[0]
        reach: Dict[int, int] = {}
        for g in range(points.group.order):
            p = points.apply(g, base)
            if p not in reach:
                reach[p] = g
        out.append((base, [(p, reach[p]) for p in orbit]))
    return out


def hom_basis(C: GLattice, A: GLattice) -> List[IntMatrix]:
    """Z-basis of the saturated lattice of equivariant maps C -> A."""
    if C.gset is not None and C.is_permutation_action():
        return _hom_basis_from_permutation_source(C, A)
    return _hom_basis_generic(C, A)


def _hom_basis_from_permutation_source(C: GLattice, A: GLattice) -> List[IntMatrix]:
    # Hom_G(Z[G/H], A) = A^H: send the basepoint to a fixed vector.
    out = []
    for base, transversal in _orbit_transversal(C.gset):
        stab = C.gset.stabilizer(base)
        fixed = fixed_sublattice(A, stab)
        for j in range(fixed.cols):
            v = fixed.col_list(j)
            m = IntMatrix.zeros(A.rank, C.rank)
            for p, g in transversal:
                col = A.action[g].mul_vector(v)
                for i in range(A.rank):
                    m.a[i, p] = col[i]
            out.append(m)
    return out


def hom_basis_into_permutation(C: GLattice, B: GLattice) -> List[IntMatrix]:
    """Z-basis of Hom_G(C, B) for a permutation target with point structure.

    Hom_G(C, Z[G/H]) corresponds to H-fixed functionals on C: the
    coordinate of the point g(basepoint) is the functional twisted by g.
    """
    if B.gset is None or not B.is_permutation_action():
        raise InvalidParameterError("target needs permutation point structure")
    Cd = dual(C)
    out = []
    for base, transversal in _orbit_transversal(B.gset):
        stab = B.gset.stabilizer(base)
        fixed = fixed_sublattice(Cd, stab)
        for j in range(fixed.cols):
            f = fixed.col_list(j)
            m = IntMatrix.zeros(B.rank, C.rank)
            for p, g in transversal:
                row = C.action[C.group.inverses[g]].T.mul_vector(f)
                for i in range(C.rank):
                    m.a[p, i] = row[i]
            out.append(m)
    return out


def _hom_basis_generic(C: GLattice, A: GLattice) -> List[IntMatrix]:
    # kernel of T -> (rho_A(g) T - T rho_C(g)) over generators, vectorized
    gens = whole_group(C.group).generators()
    a, c = A.rank, C.rank
    if a == 0 or c == 0:
        return []
    eye_a, eye_c = IntMatrix.identity(a), IntMatrix.identity(c)
    stacked = None
    for g in gens:
        op = eye_c.kron(A.action[g]) - C.action[g].T.kron(eye_a)
        stacked = op if stacked is None else stacked.vstack(op)
    if stacked is None:  # trivial group
        stacked = IntMatrix.zeros(0, a * c)
    K = kernel_basis(stacked)
    out = []
    for j in range(K.cols):
        v = K.col_list(j)
        m = IntMatrix.zeros(a, c)
        for col in range(c):
            for row in range(a):
                m.a[row, col] = v[col * a + row]
        out.append(m)
    return out


# -- section finding -------------------------------------------------------------


def _solve_mod_prime_power(
    H: List[List[int]], b: List[int], p: int, e: int
) -> Optional[List[int]]:
    """One solution of H x = b over Z/p^e (free variables pinned to 0).

    Pivots are chosen by minimal p-valuation, so when a pivot of
    valuation v is selected every remaining entry is divisible by p^v;
    elimination touches only unreduced rows, and pivots are solved by
    back-substitution in reverse selection order.  Solvability then
    reduces to per-pivot divisibility, independent of the free variables.
    """
    q = p ** e
    rows = len(H)
    cols = len(H[0]) if rows else 0
    m = [[H[i][j] % q for j in range(cols)] + [b[i] % q] for i in range(rows)]

    def valuation(x: int) -> int:
        if x == 0:
            return e
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        return v

    order: List[Tuple[int, int, int]] = []  # (row, col, valuation)
    used: set = set()
    free_cols = list(range(cols))
    while True:
        best = None
        for i in range(rows):
            if i in used:
                continue
            for j in free_cols:
                x = m[i][j]
                if x % q == 0:
                    continue
                v = valuation(x)
                if best is None or v < best[0]:
                    best = (v, i, j)
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, pi, pj = best
        unit = m[pi][pj] // (p ** v)
        m[pi] = [(x * pow(unit, -1, q)) % q for x in m[pi]]
        for i in range(rows):
            if i not in used and i != pi and m[i][pj] % q:
                factor = m[i][pj] // (p ** v)  # exact: valuation >= v
                m[i] = [(x - factor * y) % q for x, y in zip(m[i], m[pi])]
        used.add(pi)
        order.append((pi, pj, v))
        free_cols.remove(pj)
    for i in range(rows):
        if i not in used and m[i][cols] % q:
            return None
    x = [0] * cols
    for pi, pj, v in reversed(order):
        rhs = m[pi][cols] - sum(m[pi][j] * x[j] for j in range(cols) if j != pj)
        rhs %= q
        if rhs % (p ** v):
            return None
        x[pj] = rhs // (p ** v)
    return x


def _solve_mod(H: List[List[int]], b: List[int], n: int) -> Optional[List[int]]:
    """Integer x with H x = b (mod n), via prime powers and CRT."""
    cols = len(H[0]) if H else 0
    if n == 1:
        return [0] * cols
    parts = []
    rest = n
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            parts.append((p, e))
        p += 1
    if rest > 1:
        parts.append((rest, 1))
    solutions = []
    for p, e in parts:
        sol = _solve_mod_prime_power(H, b, p, e)
        if sol is None:
            return None
        solutions.append((p ** e, sol))
    x = [0] * cols
    for j in range(cols):
        residue, modulus = 0, 1
        for q, sol in solutions:
            # CRT combine residue (mod modulus) with sol[j] (mod q)
            g, u, v = _xgcd(modulus, q)
            residue = (residue * v * q + sol[j] * u * modulus) % (modulus * q)
            modulus *= q
        x[j] = residue
    return x


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    g, r = a, b
    while r:
        qq = g // r
        g, r = r, g - qq * r
        x0, x1 = x1, x0 - qq * x1
        y0, y1 = y1, y0 - qq * y1
    return g, x0, y0


def _find_section_orbitwise(seq: ShortExactSequence) -> Optional[EquivariantMap]:
    """Section search when the quotient is a permutation lattice.

    A section is exactly a choice, per orbit, of a stabilizer-fixed
    preimage of the basepoint; each orbit is one integer solve, and an
    unsolvable orbit rules the section out.
    """
    B, C = seq.B, seq.C
    pi = seq.right.matrix
    cols: Dict[int, List[int]] = {}
    fixed_cache: Dict[Tuple[int, ...], IntMatrix] = {}
    for base, transversal in _orbit_transversal(C.gset):
        stab = C.gset.stabilizer(base)
        target = [0] * C.rank
        target[base] = 1
        if stab.order == 1:
            b = solve(pi, target)
            if b is None:
                return None
        else:
            F = fixed_cache.get(stab.elements)
            if F is None:
                F = fixed_sublattice(B, stab)
                fixed_cache[stab.elements] = F
            y = solve(pi @ F, target)
            if y is None:
                return None
            b = F.mul_vector(y)
        for p, g in transversal:
            cols[p] = B.action[g].mul_vector(b)
    matrix = IntMatrix.from_columns([cols[p] for p in range(C.rank)], rows=B.rank)
    section = EquivariantMap(C, B, matrix)
    section.validate(elements=whole_group(B.group).generators())
    assert (pi @ matrix).is_identity()
    return section


def find_section(seq: ShortExactSequence) -> Optional[EquivariantMap]:
    """An equivariant s: C -> B with right . s = id, or None when none exists.

    Permutation quotients split orbit by orbit.  Otherwise a rational
    equivariant section always exists (group averaging); an integral one
    exists exactly when the averaged section can be corrected by an
    equivariant map into the kernel, which is a solvable-or-not congruence
    modulo |G|.  The answer is therefore decisive both ways.
    """
    report = check_exact(seq)
    if not report.ok:
        raise InvalidParameterError(f"sequence is not exact: {report.failures}")
    B, C = seq.B, seq.C
    G = B.group
    n = G.order
    pi = seq.right.matrix
    if C.gset is not None and C.is_permutation_action():
        return _find_section_orbitwise(seq)
    s0 = solve_matrix(pi, IntMatrix.identity(C.rank))
    assert s0 is not None, "surjective maps admit integer right inverses"
    # averaged section: integral matrix t with t/n equivariant
    t = IntMatrix.zeros(B.rank, C.rank)
    for g in range(n):
        t = t + (B.action[g] @ s0 @ C.action[G.inverses[g]])
    # equivariant corrections: maps C -> ker(pi)
    if B.gset is not None and B.is_permutation_action():
        candidates = hom_basis_into_permutation(C, B)
        pi_comp = [pi @ m for m in candidates]
        flat_pi = IntMatrix.from_rows(
            [
                [int(m[i, j]) for m in pi_comp]
                for i in range(C.rank)
                for j in range(C.rank)
            ],
            cols=len(candidates),
        )
        coeff_kernel = kernel_basis(flat_pi)
        corrections = []
        for k in range(coeff_kernel.cols):
            coeffs = coeff_kernel.col_list(k)
            m = IntMatrix.zeros(B.rank, C.rank)
            for cf, cand in zip(coeffs, candidates):
                if cf:
                    m = m + cand.scale(cf)
            corrections.append(m)
    else:
        corrections = [seq.left.matrix @ h for h in hom_basis(C, seq.A)]
    # solve sum x_k corrections_k = -t (mod n)
    flat_h = [
        [int(m[i, j]) for m in corrections]
        for i in range(B.rank)
        for j in range(C.rank)
    ]
    flat_b = [-int(t[i, j]) for i in range(B.rank) for j in range(C.rank)]
    x = _solve_mod(flat_h, flat_b, n)
    if x is None:
        return None
    total = t
    for xi, m in zip(x, corrections):
        if xi:
            total = total + m.scale(xi)
    s_matrix = IntMatrix.zeros(B.rank, C.rank)
    for i in range(B.rank):
        for j in range(C.rank):
            num = int(total[i, j])
            assert num % n == 0
            s_matrix.a[i, j] = num // n
    section = EquivariantMap(C, B, s_matrix)
    section.validate()
    assert (pi @ s_matrix).is_identity()
    return section


def split_iso_from_section(
    seq: ShortExactSequence, section: EquivariantMap
) -> EquivariantMap:
    """The unimodular iso A + C -> B assembled from inclusion and section.

    Its inverse is constructed explicitly, which certifies unimodularity.
    """
    A, B, C = seq.A, seq.B, seq.C
    fwd_matrix = seq.left.matrix.hstack(section.matrix)
    fwd = EquivariantMap(direct_sum(A, C), B, fwd_matrix)
    back_top = BasisSolver(seq.left.matrix).express_matrix(
        IntMatrix.identity(B.rank) - section.matrix @ seq.right.matrix
    )
    assert back_top is not None
    back = back_top.vstack(seq.right.matrix)
    assert (fwd_matrix @ back).is_identity()
    assert (back @ fwd_matrix).is_identity()
    fwd.validate(elements=whole_group(B.group).generators())
    return fwd


# -- bounded permutation-basis search -------------------------------------------


@dataclass
class PermutationSearchOutcome:
    """Witness of a G-stable basis, or an explicit bounded-search marker."""

    witness: Optional[IntMatrix]
    orbits: List[List[int]] = field(default_factory=list)
    bound: int = 0
    reason: str = ""

    def __bool__(self) -> bool:
        return self.witness is not None


ENUMERATION_CAP = 1_000_000
SEARCH_NODE_BUDGET = 20_000


def _coinvariant_projection(M: GLattice) -> IntMatrix:
    """Projection onto the free part of M / span{(g-1)M} (orbit images).

    Every member of a G-orbit has the same image, and the images of the
    orbits of any G-stable basis form a basis of the free quotient.
    """
    gens = whole_group(M.group).generators()
    eye = IntMatrix.identity(M.rank)
    stacked = None
    for g in gens:
        block = M.action[g] - eye
        stacked = block if stacked is None else stacked.hstack(block)
    if stacked is None:
        return eye
    dec = smith(stacked)
    nonzero = dec.rank()
    return dec.U.take_rows(range(nonzero, M.rank))


def _subgroup_class_lookup(G: FiniteGroup) -> Dict[Tuple[int, ...], int]:
    """Map each subgroup's canonical conjugate to its representative index."""
    lookup: Dict[Tuple[int, ...], int] = {}
    for idx, rep in enumerate(subgroup_conjugacy_reps(G)):
        for g in G.elements():
            lookup[tuple(sorted(G.conjugate(g, h) for h in rep.elements))] = idx
    return lookup


def _orbit_count_solutions(M: GLattice) -> Optional[List[Tuple[int, ...]]]:
    """Candidate per-class orbit counts for a stable basis of M.

    A stable basis with n_H orbits of stabilizer class H satisfies
    rank M^K = sum_H n_H * #(K-orbits on G/H) for every subgroup class K.
    Returns [] when the system is unsolvable in nonnegative integers
    (so no stable basis exists at all), None when the solution set is
    too large to enumerate, and otherwise the finite candidate list in a
    deterministic order.
    """
    from fractions import Fraction
    from .groups import coset_gset

    G = M.group
    reps = subgroup_conjugacy_reps(G)
    k = len(reps)
    table = []
    for K in reps:
        row = []
        for H in reps:
            pts = coset_gset(G, H)
            seen = set()
            orbits = 0
            for x in range(pts.size):
                if x in seen:
                    continue
                orbits += 1
                seen.update(pts.apply(g, x) for g in K.elements)
            row.append(orbits)
        table.append(row)
    rhs = [fixed_sublattice(M, K).cols for K in reps]
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(table)]
    pivots: List[Tuple[int, int]] = []  # (row, col)
    row = 0
    for col in range(k):
        piv = next((i for i in range(row, k) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        for i in range(k):
            if i != row and a[i][col] != 0:
                f = a[i][col] / a[row][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        pivots.append((row, col))
        row += 1
    for i in range(row, k):
        if a[i][k] != 0:
            return []  # inconsistent: no stable basis exists
    pivot_cols = {c for _, c in pivots}
    free_cols = [c for c in range(k) if c not in pivot_cols]
    particular = [Fraction(0)] * k
    for r, c in pivots:
        particular[c] = a[r][k] / a[r][c]
    if not free_cols:
        if all(v.denominator == 1 and v >= 0 for v in particular):
            return [tuple(int(v) for v in particular)]
        return []
    if len(free_cols) > 2:
        return None
    null_dirs = []
    for fc in free_cols:
        direction = [Fraction(0)] * k
        direction[fc] = Fraction(1)
        for r, c in pivots:
            direction[c] = -a[r][fc] / a[r][c]
        null_dirs.append(direction)
    bound = M.rank + 1
    found = set()
    for ts in itertools.product(range(-bound, bound + 1), repeat=len(free_cols)):
        cand = [
            particular[i] + sum(t * d[i] for t, d in zip(ts, null_dirs))
            for i in range(k)
        ]
        if all(v.denominator == 1 and 0 <= v <= M.rank for v in cand):
            found.add(tuple(int(v) for v in cand))
        if len(found) > 60:
            return None
    return sorted(found)


def is_permutation_bounded(M: GLattice, bound: int = 2) -> PermutationSearchOutcome:
    """Search for a G-stable basis among vectors with entries in [-B, B].

    Complete within the bound: a stable basis is a disjoint union of full
    orbits of box vectors, so orbits are enumerated and combined by
    backtracking.  Pruning uses only necessary conditions (orbit counts
    per stabilizer class, saturation of partial spans, orbit images in
    the coinvariant quotient), so a failed search is reported as
    exhausted, never as a disproof.
    """
    if bound < 1:
        raise InvalidParameterError("bound must be >= 1")
    r = M.rank
    if r == 0:
        return PermutationSearchOutcome(IntMatrix.zeros(0, 0), [], bound)
    if M.is_permutation_action():
        eye = IntMatrix.identity(r)
        orbits = _orbits_of_columns(M, eye)
        return PermutationSearchOutcome(eye, orbits, bound, "standard basis is stable")
    box = 2 * bound + 1
    if box ** r > ENUMERATION_CAP:
        return PermutationSearchOutcome(
            None, [], bound, f"search space {box}^{r} exceeds enumeration cap"
        )

    options = _orbit_count_solutions(M)
    if options == []:
        return PermutationSearchOutcome(
            None, [], bound, "orbit-count obstruction: fixed ranks admit no solution"
        )
    G = M.group
    reps = subgroup_conjugacy_reps(G)
    class_lookup = _subgroup_class_lookup(G)
    coinv = _coinvariant_projection(M)
    if options is not None:
        options = [c for c in options if sum(c) == coinv.rows]
        if not options:
            return PermutationSearchOutcome(
                None, [], bound, "coinvariant rank does not match any orbit count"
            )

    # enumerate primitive box vectors whose whole orbit stays in the box
    actions = [np.array(M.action[g].to_lists(), dtype=np.int64) for g in G.elements()]
    vectors = np.array(
        list(itertools.product(range(-bound, bound + 1), repeat=r)), dtype=np.int64
    )
    keep = ~(vectors == 0).all(axis=1)
    for mat in actions:
        keep &= (np.abs(vectors @ mat.T) <= bound).all(axis=1)
    from math import gcd as _gcd

    pool_set = set()
    for v in vectors[keep]:
        tup = tuple(int(x) for x in v)
        g = 0
        for x in tup:
            g = _gcd(g, abs(x))
        if g == 1:
            pool_set.add(tup)

    def saturated_cols(cols: List[Sequence[int]]) -> bool:
        m = IntMatrix.from_columns([list(c) for c in cols], rows=len(cols[0]))
        dec = smith(m)
        diag = dec.diagonal()
        return dec.rank() == m.cols and all(d == 1 for d in diag[: m.cols])

    # orbits, bucketed by stabilizer conjugacy class
    relevant = (
        None if options is None else [any(c[i] for c in options) for i in range(len(reps))]
    )
    per_class: List[List[dict]] = [[] for _ in reps]
    seen = set()
    for tup in sorted(pool_set, key=lambda v: (max(abs(x) for x in v), v)):
        if tup in seen:
            continue
        arr = np.array(tup, dtype=np.int64)
        stab = tuple(
            g for g in G.elements() if tuple(int(x) for x in actions[g] @ arr) == tup
        )
        orbit = sorted({tuple(int(x) for x in mat @ arr) for mat in actions})
        seen.update(orbit)
        if any(v not in pool_set for v in orbit):
            continue
        cls = class_lookup.get(stab)
        if cls is None or (relevant is not None and not relevant[cls]):
            continue
        if not saturated_cols(list(orbit)):
            continue
        image = coinv.mul_vector(list(tup))
        g = 0
        for x in image:
            g = _gcd(g, abs(x))
        if g != 1:
            continue
        per_class[cls].append({"orbit": orbit, "image": image})

    budget = [SEARCH_NODE_BUDGET]
    chosen: List[dict] = []

    def extendable() -> bool:
        cols = [v for item in chosen for v in item["orbit"]]
        if not saturated_cols(cols):
            return False
        images = [item["image"] for item in chosen]
        return saturated_cols(images)

    def search_with_counts(counts: Sequence[int]) -> bool:
        if any(len(per_class[c]) < counts[c] for c in range(len(reps))):
            return False
        class_order = sorted(
            (c for c in range(len(reps)) if counts[c]),
            key=lambda c: (-reps[c].order, c),
        )

        def backtrack(ci: int, start: int, remaining: int) -> bool:
            if budget[0] <= 0:
                return False
            if remaining == 0:
                if ci + 1 == len(class_order):
                    return True
                return backtrack(ci + 1, 0, counts[class_order[ci + 1]])
            pool = per_class[class_order[ci]]
            for k in range(start, len(pool)):
                budget[0] -= 1
                if budget[0] <= 0:
                    return False
                chosen.append(pool[k])
                if extendable() and backtrack(ci, k + 1, remaining - 1):
                    return True
                chosen.pop()
            return False

        if not class_order:
            return coinv.rows == 0
        return backtrack(0, 0, counts[class_order[0]])

    def search_unconstrained() -> bool:
        # unknown per-class counts: one flat pool, still orbit-structured
        pool = sorted(
            (item for cls_pool in per_class for item in cls_pool),
            key=lambda it: (len(it["orbit"]), it["orbit"]),
        )

        def backtrack(start: int, size: int) -> bool:
            if size == r:
                return True
            if budget[0] <= 0:
                return False
            for k in range(start, len(pool)):
                if size + len(pool[k]["orbit"]) > r:
                    continue
                budget[0] -= 1
                if budget[0] <= 0:
                    return False
                chosen.append(pool[k])
                if extendable() and backtrack(k + 1, size + len(pool[k]["orbit"])):
                    return True
                chosen.pop()
            return False

        return backtrack(0, 0)

    ok = False
    if options is None:
        ok = search_unconstrained()
    else:
        for counts in options:
            chosen.clear()
            if search_with_counts(counts):
                ok = True
                break
            if budget[0] <= 0:
                break
    if not ok:
        reason = (
            "node budget exhausted" if budget[0] <= 0 else "no stable basis within bound"
        )
        return PermutationSearchOutcome(None, [], bound, reason)
    cols = []
    orbits_out = []
    for item in chosen:
        first = len(cols)
        cols.extend(list(v) for v in item["orbit"])
        orbits_out.append(list(range(first, len(cols))))
    witness = IntMatrix.from_columns(cols, rows=r)
    if not saturated_cols([list(c) for c in zip(*witness.to_lists())]):
        raise AssertionError("witness must be unimodular")
    return PermutationSearchOutcome(witness, orbits_out, bound)


def _orbits_of_columns(M: GLattice, basis: IntMatrix) -> List[List[int]]:
    cols = {tuple(basis.col_list(j)): j for j in range(basis.cols)}
    seen = set()
    orbits = []
    for tup, j in sorted(cols.items(), key=lambda kv: kv[1]):
        if j in seen:
            continue
        orbit = sorted(
            cols[tuple(M.action[g].mul_vector(list(tup)))] for g in M.group.elements()
        )
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


# -- invertibility certificates ---------------------------------------------------


@dataclass
class InvertibilityCertificate:
    """M as an explicit direct summand of a permutation-induced sum."""

    subgroups: List[Subgroup]
    restriction_witnesses: List[PermutationSearchOutcome]
    embedding: EquivariantMap
    retraction: EquivariantMap


def invertibility_certificate(
    M: GLattice,
    subgroups: Optional[List[Subgroup]] = None,
    bounds: Tuple[int, ...] = (2, 3),
) -> Optional[InvertibilityCertificate]:
    """Certify M invertible via subgroups of coprime indices, or None.

    Each restriction must earn a bounded permutation witness; the split
    embedding into the sum of coset-lattice tensors is emitted with its
    retraction.  Absence of a certificate is never a disproof.
    """
    from .gmod import restrict

    G = M.group
    if subgroups is None:
        primes = []
        x = G.order
        p = 2
        while p * p <= x:
            if x % p == 0:
                primes.append(p)
                while x % p == 0:
                    x //= p
            p += 1
        if x > 1:
            primes.append(x)
        subgroups = [sylow(G, p) for p in primes] if primes else [whole_group(G)]
    indices = [H.index() for H in subgroups]
    acc = 0
    for i in indices:
        acc = gcd(acc, i)
    if acc != 1:
        raise InvalidParameterError(f"subgroup indices {indices} are not coprime")

    witnesses = []
    for H in subgroups:
        R = restrict(M, H)
        outcome = None
        for b in bounds:
            outcome = is_permutation_bounded(R, b)
            if outcome:
                break
        witnesses.append(outcome)
        if not outcome:
            return None

    coeffs = bezout_coefficients(indices)
    blocks = [tensor(coset_lattice(G, H), M) for H in subgroups]
    target = direct_sum_many(blocks)
    emb = IntMatrix.zeros(target.rank, M.rank)
    offset = 0
    for a_i, H, blk in zip(coeffs, subgroups, blocks):
        k = H.index()
        for c in range(k):
            for j in range(M.rank):
                emb.a[offset + c * M.rank + j, j] = a_i
        offset += blk.rank
    retr = IntMatrix.zeros(M.rank, target.rank)
    offset = 0
    for H, blk in zip(subgroups, blocks):
        k = H.index()
        for c in range(k):
            for j in range(M.rank):
                retr.a[j, offset + c * M.rank + j] = 1
        offset += blk.rank
    embedding = EquivariantMap(M, target, emb).validate()
    retraction = EquivariantMap(target, M, retr).validate()
    assert (retr @ emb).is_identity()
    return InvertibilityCertificate(
        subgroups=list(subgroups),
        restriction_witnesses=witnesses,
        embedding=embedding,
        retraction=retraction,
    )
