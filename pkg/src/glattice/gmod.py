"""G-lattices: duals, sums, tensors, restriction/induction, fixed points,
norm maps, equivariant homomorphisms and short exact sequences.

A lattice never claims an isomorphism from numerical coincidences: every
identification is carried by an explicit unimodular equivariant map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import InvalidParameterError
from .groups import FiniteGroup, GSet, Subgroup, coset_gset, left_coset_reps, regular_gset
from .intlinalg import (
    BasisSolver,
    IntMatrix,
    cokernel_invariants,
    column_span_canonical,
    kernel_basis,
    solve_matrix,
)

# Full pairwise action validation is O(|G|^2 rank^3); run it automatically
# only below this budget.  Tests invoke validate() explicitly elsewhere.
AUTO_VALIDATE_BUDGET = 1_500_000


class GLattice:
    """A free Z-module of finite rank with a unimodular G-action."""

    def __init__(
        self,
        group: FiniteGroup,
        action: Sequence[IntMatrix],
        gset: Optional[GSet] = None,
        name: str = "",
    ):
        if len(action) != group.order:
            raise InvalidParameterError("need one action matrix per group element")
        self.group = group
        self.action = list(action)
        self.rank = action[0].rows if action else 0
        for m in self.action:
            if m.rows != self.rank or m.cols != self.rank:
                raise InvalidParameterError("action matrices must be square of equal rank")
        if not self.action[group.identity].is_identity():
            raise InvalidParameterError("identity element must act as the identity matrix")
        self.gset = gset
        self.name = name
        if group.order ** 2 * max(self.rank, 1) ** 3 <= AUTO_VALIDATE_BUDGET:
            self.validate()

    def act(self, g: int) -> IntMatrix:
        return self.action[g]

    def validate(self) -> None:
        """Exhaustive invariant check: homomorphism property and unimodularity."""
        G = self.group
        for g in range(G.order):
            for h in range(G.order):
                if self.action[G.table[g][h]] != self.action[g] @ self.action[h]:
                    raise InvalidParameterError(
                        f"action is not a homomorphism at elements ({g}, {h})"
                    )
        for g in range(G.order):
            if abs(self.action[g].det()) != 1:
                raise InvalidParameterError(f"action of element {g} is not unimodular")

    def is_permutation_action(self) -> bool:
        for m in self.action:
            for i in range(self.rank):
                col = m.col_list(i)
                if sorted(col) != [0] * (self.rank - 1) + [1]:
                    return False
        return True

    def __repr__(self) -> str:
        label = self.name or "lattice"
        return f"GLattice({label}, group={self.group.spec}, rank={self.rank})"


def lattices_equal(M: GLattice, N: GLattice) -> bool:
    """Exact equality: same group object, same rank, same action matrices."""
    return (
        M.group is N.group
        and M.rank == N.rank
        and all(M.action[g] == N.action[g] for g in range(M.group.order))
    )


@dataclass
class EquivariantMap:
    """A G-map between lattices, stored as a target.rank x source.rank matrix."""

    source: GLattice
    target: GLattice
    matrix: IntMatrix

    def __post_init__(self):
        if self.source.group is not self.target.group:
            raise InvalidParameterError("equivariant map needs a common group")
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise InvalidParameterError(
                f"matrix shape {self.matrix.shape} does not match "
                f"({self.target.rank}, {self.source.rank})"
            )

    def equivariance_failure(self, elements: Optional[Sequence[int]] = None) -> Optional[int]:
        """First group element where target_action @ F != F @ source_action.

        Checking a generating set suffices when both actions are genuine
        homomorphisms (commutation propagates along products); the default
        checks every element.
        """
        todo = range(self.source.group.order) if elements is None else elements
        for g in todo:
            if self.target.action[g] @ self.matrix != self.matrix @ self.source.action[g]:
                return g
        return None

    def validate(self, elements: Optional[Sequence[int]] = None) -> "EquivariantMap":
        g = self.equivariance_failure(elements)
        if g is not None:
            raise InvalidParameterError(f"map is not equivariant at element {g}")
        return self

    def compose(self, inner: "EquivariantMap") -> "EquivariantMap":
        """self after inner (source of self must equal target of inner)."""
        if not lattices_equal(self.source, inner.target):
            raise InvalidParameterError("composition mismatch")
        return EquivariantMap(inner.source, self.target, self.matrix @ inner.matrix)

    def is_unimodular(self) -> bool:
        return self.matrix.rows == self.matrix.cols and abs(self.matrix.det()) == 1

    def inverse(self) -> "EquivariantMap":
        if self.matrix.rows != self.matrix.cols:
            raise InvalidParameterError("only square maps can be inverted")
        inv = solve_matrix(self.matrix, IntMatrix.identity(self.matrix.rows))
        if inv is None:
            raise InvalidParameterError("map is not invertible over the integers")
        return EquivariantMap(self.target, self.source, inv)

    def apply(self, vec: Sequence[int]) -> list:
        return self.matrix.mul_vector(vec)


def identity_map(M: GLattice) -> EquivariantMap:
    return EquivariantMap(M, M, IntMatrix.identity(M.rank))


def direct_sum_maps(f: EquivariantMap, g: EquivariantMap) -> EquivariantMap:
    src = direct_sum(f.source, g.source)
    tgt = direct_sum(f.target, g.target)
    m = IntMatrix.zeros(tgt.rank, src.rank)
    m.a[: f.target.rank, : f.source.rank] = f.matrix.a
    m.a[f.target.rank :, f.source.rank :] = g.matrix.a
    return EquivariantMap(src, tgt, m)


@dataclass
class ShortExactSequence:
    """0 -> A -> B -> C -> 0 carried by two equivariant maps."""

    left: EquivariantMap   # A -> B
    right: EquivariantMap  # B -> C

    def __post_init__(self):
        if not lattices_equal(self.left.target, self.right.source):
            raise InvalidParameterError("sequence maps do not share the middle lattice")

    @property
    def A(self) -> GLattice:
        return self.left.source

    @property
    def B(self) -> GLattice:
        return self.left.target

    @property
    def C(self) -> GLattice:
        return self.right.target


@dataclass
class ExactnessReport:
    ok: bool
    failures: List[str]

    def __bool__(self) -> bool:
        return self.ok


def check_exact(seq: ShortExactSequence) -> ExactnessReport:
    """Verify all short-exact-sequence invariants; name the first failures."""
    failures = []
    if seq.A.rank + seq.C.rank != seq.B.rank:
        failures.append(
            f"rank mismatch: {seq.A.rank} + {seq.C.rank} != {seq.B.rank}"
        )
    if kernel_basis(seq.left.matrix).cols != 0:
        failures.append("left map is not injective")
    factors, free = cokernel_invariants(seq.right.matrix)
    if factors or free:
        failures.append(
            f"right map is not surjective (cokernel factors={factors}, free rank={free})"
        )
    image = column_span_canonical(seq.left.matrix)
    kernel = kernel_basis(seq.right.matrix)
    if image != kernel:
        failures.append("image of left map differs from kernel of right map")
    for label, m in (("left", seq.left), ("right", seq.right)):
        g = m.equivariance_failure()
        if g is not None:
            failures.append(f"{label} map not equivariant at element {g}")
    return ExactnessReport(not failures, failures)


# -- permutation-type constructors -------------------------------------------


def permutation_lattice(G: FiniteGroup, gset: GSet) -> GLattice:
    """Z-basis indexed by the G-set points, permuted by the action."""
    if gset.group is not G:
        raise InvalidParameterError("invalid-gset: G-set belongs to a different group")
    action = []
    for g in range(G.order):
        m = IntMatrix.zeros(gset.size, gset.size)
        for x in range(gset.size):
            m.a[gset.apply(g, x), x] = 1
        action.append(m)
    return GLattice(G, action, gset=gset, name=f"Z[{gset.size} points]")


def regular(G: FiniteGroup) -> GLattice:
    return permutation_lattice(G, regular_gset(G))


def coset_lattice(G: FiniteGroup, H: Subgroup) -> GLattice:
    return permutation_lattice(G, coset_gset(G, H))


def trivial(G: FiniteGroup) -> GLattice:
    return GLattice(G, [IntMatrix.identity(1)] * G.order, name="Z")


# -- functorial operations -----------------------------------------------------


def dual(M: GLattice) -> GLattice:
    """Dual lattice: action of g becomes the transpose of the action of g^-1."""
    G = M.group
    action = [M.action[G.inverses[g]].T for g in range(G.order)]
    return GLattice(G, action, name=f"dual({M.name})" if M.name else "")


def direct_sum(M: GLattice, N: GLattice) -> GLattice:
    if M.group is not N.group:
        raise InvalidParameterError("direct sum needs a common group")
    action = []
    for g in range(M.group.order):
        m = IntMatrix.zeros(M.rank + N.rank, M.rank + N.rank)
        m.a[: M.rank, : M.rank] = M.action[g].a
        m.a[M.rank :, M.rank :] = N.action[g].a
        action.append(m)
    gset = None
    if M.gset is not None and N.gset is not None and M.is_permutation_action() and N.is_permutation_action():
        gset = M.gset.disjoint_union(N.gset)
    return GLattice(M.group, action, gset=gset)


def direct_sum_many(lattices: Sequence[GLattice]) -> GLattice:
    if not lattices:
        raise InvalidParameterError("empty direct sum")
    out = lattices[0]
    for M in lattices[1:]:
        out = direct_sum(out, M)
    return out


def tensor(M: GLattice, N: GLattice) -> GLattice:
    """Tensor over Z with the diagonal action; row-major index (i, j) -> i*rank(N)+j."""
    if M.group is not N.group:
        raise InvalidParameterError("tensor needs a common group")
    action = [M.action[g].kron(N.action[g]) for g in range(M.group.order)]
    return GLattice(M.group, action)


def restrict(M: GLattice, H: Subgroup) -> GLattice:
    """The same module seen as a lattice over the subgroup."""
    if H.parent is not M.group:
        raise InvalidParameterError("subgroup belongs to a different group")
    Hgrp, embed = H.as_group()
    return GLattice(Hgrp, [M.action[g] for g in embed], name=f"res({M.name})" if M.name else "")


def induce(G: FiniteGroup, H: Subgroup, N: GLattice) -> GLattice:
    """Induced lattice ZG tensor_H N with basis (coset rep r_i) x (N basis)."""
    if H.parent is not G:
        raise InvalidParameterError("subgroup belongs to a different group")
    Hgrp, embed = H.as_group()
    if N.group is not Hgrp:
        raise InvalidParameterError("lattice to induce must live over the subgroup")
    reps = left_coset_reps(G, H)
    pos_in_H = {g: i for i, g in enumerate(embed)}
    coset_index = {}
    for i, r in enumerate(reps):
        for h in embed:
            coset_index[G.table[r][h]] = i
    k, r_n = len(reps), N.rank
    action = []
    for g in range(G.order):
        m = IntMatrix.zeros(k * r_n, k * r_n)
        for i, r in enumerate(reps):
            gr = G.table[g][r]
            k_i = coset_index[gr]
            h = G.table[G.inverses[reps[k_i]]][gr]
            block = N.action[pos_in_H[h]]
            m.a[k_i * r_n : (k_i + 1) * r_n, i * r_n : (i + 1) * r_n] = block.a
        action.append(m)
    return GLattice(G, action)


def fixed_sublattice(M: GLattice, H: Subgroup) -> IntMatrix:
    """Saturated column basis of the H-fixed vectors of M."""
    if H.parent is not M.group:
        raise InvalidParameterError("subgroup belongs to a different group")
    gens = H.generators()
    if not gens:
        return IntMatrix.identity(M.rank)
    stacked = None
    eye = IntMatrix.identity(M.rank)
    for h in gens:
        block = M.action[h] - eye
        stacked = block if stacked is None else stacked.vstack(block)
    return kernel_basis(stacked)


def norm_matrix(M: GLattice, H: Subgroup) -> IntMatrix:
    """Sum of the action matrices over the subgroup."""
    if H.parent is not M.group:
        raise InvalidParameterError("subgroup belongs to a different group")
    total = IntMatrix.zeros(M.rank, M.rank)
    for h in H.elements:
        total = total + M.action[h]
    return total


def sublattice_with_action(
    M: GLattice, basis: IntMatrix, name: str = ""
) -> Tuple[GLattice, EquivariantMap]:
    """Induced lattice structure on an invariant saturated column span.

    Returns the abstract lattice in the given basis together with the
    inclusion map into M.  Raises when the span is not G-invariant.
    """
    solver = BasisSolver(basis)
    action = []
    for g in range(M.group.order):
        moved = M.action[g] @ basis
        coords = solver.express_matrix(moved)
        if coords is None:
            raise InvalidParameterError(
                f"column span is not invariant under element {g}"
            )
        action.append(coords)
    sub = GLattice(M.group, action, name=name)
    return sub, EquivariantMap(sub, M, basis)


def augmentation_map(P: GLattice) -> EquivariantMap:
    """Sum-of-coordinates map from a permutation lattice onto Z."""
    if not P.is_permutation_action():
        raise InvalidParameterError("augmentation needs a permutation lattice")
    ones = IntMatrix.from_rows([[1] * P.rank])
    return EquivariantMap(P, trivial(P.group), ones)


def augmentation_kernel(P: GLattice) -> Tuple[GLattice, EquivariantMap]:
    """The augmentation-zero sublattice with its inclusion map."""
    eps = augmentation_map(P)
    basis = kernel_basis(eps.matrix)
    return sublattice_with_action(P, basis, name="I")


def augmentation_sequence(P: GLattice) -> ShortExactSequence:
    """0 -> I -> ZX -> Z -> 0 for a permutation lattice ZX."""
    I, incl = augmentation_kernel(P)
    return ShortExactSequence(left=incl, right=augmentation_map(P))


def move_to_subgroup_iso(G: FiniteGroup, H: Subgroup, M: GLattice) -> EquivariantMap:
    """The unimodular map Z[G/H] tensor M -> ZG tensor_H M_H, gH tensor a -> g tensor g^-1 a.

    In the aligned coset-rep bases this is block-diagonal with blocks
    given by the action of the rep inverses.
    """
    if M.group is not G:
        raise InvalidParameterError("lattice must live over G")
    src = tensor(coset_lattice(G, H), M)
    tgt = induce(G, H, restrict(M, H))
    reps = left_coset_reps(G, H)
    r = M.rank
    m = IntMatrix.zeros(len(reps) * r, len(reps) * r)
    for i, rep in enumerate(reps):
        block = M.action[G.inverses[rep]]
        m.a[i * r : (i + 1) * r, i * r : (i + 1) * r] = block.a
    return EquivariantMap(src, tgt, m)
