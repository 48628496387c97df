"""Named structural checks over flow lattices, producing machine-readable
pass/fail reports.

Every check is deterministic and idempotent; a report lists one outcome
per sub-assertion so a failure names exactly what broke.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from math import gcd
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import InvalidParameterError
from .gflows import (
    GGraph,
    boundary_matrix,
    cayley_graph,
    complete_edges,
    flow_lattice,
    remove_edges_decomposition,
    restrict_graph_group,
    spanning_tree_basis,
    subgraph,
)
from .gmod import (
    EquivariantMap,
    GLattice,
    ShortExactSequence,
    augmentation_kernel,
    check_exact,
    coset_lattice,
    direct_sum_many,
    regular,
    sublattice_with_action,
)
from .groups import (
    FiniteGroup,
    Subgroup,
    coset_gset,
    cyclic,
    natural_gset,
    semidirect,
    subgroup_from_generators,
    symmetric,
)
from .cohom import (
    ResolutionCertificate,
    coflasque_resolution,
    find_section,
    is_coflasque,
    is_flasque,
    pullback,
    split_iso_from_section,
)
from .intlinalg import (
    BasisSolver,
    IntMatrix,
    cokernel_invariants,
    kernel_basis,
    same_column_span,
    saturation,
)


@dataclass
class CheckReport:
    """Outcome of one named check, reproducible modulo elapsed time."""

    check_id: str
    group_spec: str
    parameters: Dict[str, object]
    status: str  # "pass" | "fail" | "skipped"
    details: List[Dict[str, str]]
    elapsed_ms: float

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "check_id": self.check_id,
            "group": self.group_spec,
            "parameters": dict(self.parameters),
            "status": self.status,
            "assertions": [dict(d) for d in self.details],
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


class _Checker:
    """Accumulates named sub-assertions for one report."""

    def __init__(self, check_id: str, group_spec: str, parameters: Dict[str, object]):
        self.check_id = check_id
        self.group_spec = group_spec
        self.parameters = parameters
        self.details: List[Dict[str, str]] = []
        self.start = time.perf_counter()

    def record(self, name: str, ok: bool, detail: str = "") -> bool:
        self.details.append(
            {"name": name, "status": "pass" if ok else "fail", "detail": detail}
        )
        return ok

    def run(self, name: str, fn: Callable[[], Tuple[bool, str]]) -> bool:
        try:
            ok, detail = fn()
        except Exception as exc:  # recorded, not raised: reports stay comparable
            return self.record(name, False, f"{type(exc).__name__}: {exc}")
        return self.record(name, ok, detail)

    def finish(self, skipped_reason: Optional[str] = None) -> CheckReport:
        if skipped_reason is not None:
            status = f"skipped({skipped_reason})"
        else:
            status = "pass" if all(d["status"] == "pass" for d in self.details) else "fail"
        return CheckReport(
            check_id=self.check_id,
            group_spec=self.group_spec,
            parameters=self.parameters,
            status=status,
            details=self.details,
            elapsed_ms=(time.perf_counter() - self.start) * 1000.0,
        )


def _edge_vector(X: GGraph, steps: Sequence[Tuple[int, int, int]]) -> List[int]:
    """Edge vector from (source, target, coefficient) triples."""
    idx = X.edge_index()
    vec = [0] * X.n_edges
    for s, t, c in steps:
        vec[idx[(s, t)]] += c
    return vec


# -- cyclic decomposition ---------------------------------------------------------


def check_cyclic_flows(n: int, gens: Sequence[int]) -> CheckReport:
    """Cay(C_n, S) flows split as the cycle flow plus free summands."""
    G = cyclic(n)
    sigma = G.generator_indices["s"]
    gens = [g % n for g in gens]
    if sigma not in gens:
        raise InvalidParameterError("generating set must contain the rotation s")
    ck = _Checker(
        "cyclic-flows", f"C:{n}", {"n": n, "gens": sorted(set(gens))}
    )
    X = cayley_graph(G, gens)
    Xc = cayley_graph(G, [sigma])
    iso = remove_edges_decomposition(X, Xc)
    m = (X.n_edges - Xc.n_edges) // G.order
    ck.record("free rank", iso.source.rank == 1 + m * n, f"m={m}")
    ck.run("unimodular", lambda: (iso.is_unimodular(), ""))
    ck.run("equivariant", lambda: (iso.equivariance_failure() is None, ""))
    ck.record(
        "trivial action on the cycle summand",
        all(int(iso.source.action[g][0, 0]) == 1 for g in G.elements()),
    )

    def free_complement():
        for g in G.elements():
            if g == G.identity:
                continue
            block = iso.source.action[g]
            for i in range(1, iso.source.rank):
                col = block.col_list(i)
                if sorted(col) != [0] * (iso.source.rank - 1) + [1]:
                    return False, f"column {i} of element {g} is not a unit vector"
                if col[i] == 1:
                    return False, f"element {g} fixes complement basis vector {i}"
        return True, f"free stable basis of rank {m * n}"

    ck.run("complement is a freely permuted basis", free_complement)
    return ck.finish()


# -- flow lattices are coflasque ----------------------------------------------------


def check_flow_coflasque(G: FiniteGroup, gens: Sequence[int]) -> CheckReport:
    """Fl(Cay(G, S)) is coflasque and resolves the augmentation sublattice."""
    if G.closure(gens) != tuple(range(G.order)):
        raise InvalidParameterError("generating set does not generate the group")
    ck = _Checker(
        "flow-coflasque",
        G.spec,
        {"gens": [G.element_names[g] for g in dict.fromkeys(int(g) for g in gens)]},
    )
    X = cayley_graph(G, gens)
    fl = flow_lattice(X)
    verdict = is_coflasque(fl.glattice)
    ck.record(
        "flow lattice coflasque",
        bool(verdict),
        "" if verdict else f"fails at subgroup {verdict.failing_subgroup}",
    )
    bd = boundary_matrix(X)
    I_lat, I_incl = augmentation_kernel(bd.target)
    coords = BasisSolver(I_incl.matrix).express_matrix(bd.matrix)
    ck.record("boundary lands in the augmentation sublattice", coords is not None)
    if coords is not None:
        seq = ShortExactSequence(
            EquivariantMap(fl.glattice, bd.source, fl.basis),
            EquivariantMap(bd.source, I_lat, coords),
        )
        report = check_exact(seq)
        ck.record("boundary sequence exact", report.ok, "; ".join(report.failures))
        ck.record("middle term is permutation", bd.source.is_permutation_action())
        ck.record(
            "certificate kind",
            bool(verdict),
            "coflasque resolution of the augmentation sublattice",
        )
    return ck.finish()


# -- bar basis and the cocycle identity ----------------------------------------------


def _bar_flow(X: GGraph, G: FiniteGroup, g: int, h: int) -> Tuple[int, ...]:
    """d(g, h) = (e -> g -> gh) - (e -> gh) with loops dropped as zero."""
    e = G.identity
    if g == e or h == e:
        return tuple([0] * X.n_edges)
    gh = G.mul(g, h)
    steps = []
    if g != e:
        steps.append((e, g, 1))
    if g != gh:
        steps.append((g, gh, 1))
    if gh != e:
        steps.append((e, gh, -1))
    return tuple(_edge_vector(X, steps))


def check_bar_cocycle(G: FiniteGroup) -> CheckReport:
    """The translated two-step flows form a basis obeying the cocycle law."""
    if G.order < 2:
        raise InvalidParameterError("group must have at least two elements")
    ck = _Checker("bar-cocycle", G.spec, {"order": G.order})
    e = G.identity
    nonid = [g for g in G.elements() if g != e]
    X = cayley_graph(G, nonid)
    idx = X.edge_index()
    star_tree = [idx[(e, g)] for g in nonid]
    non_tree = [k for k in range(X.n_edges) if k not in set(star_tree)]
    candidates = []
    for k in non_tree:
        u, v = X.edges[k]
        candidates.append(list(_bar_flow(X, G, u, G.mul(G.inverses[u], v))))
    try:
        fl = spanning_tree_basis(X, star_tree, candidates)
        ck.record("basis certified by the star tree", True, f"rank {fl.rank}")
    except Exception as exc:
        ck.record("basis certified by the star tree", False, str(exc))
        return ck.finish()

    d: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    for g in G.elements():
        for h in G.elements():
            d[(g, h)] = _bar_flow(X, G, g, h)
    moved: Dict[Tuple[int, Tuple[int, int]], Tuple[int, ...]] = {}

    def act(g: int, vec: Tuple[int, ...]) -> Tuple[int, ...]:
        perm = X.edge_action[g]
        out = [0] * len(vec)
        for k, c in enumerate(vec):
            if c:
                out[perm[k]] = c
        return tuple(out)

    triples = 0
    failures = 0
    for g1 in G.elements():
        for g2 in G.elements():
            for g3 in G.elements():
                lhs = tuple(
                    a + b for a, b in zip(d[(g1, g2)], d[(G.mul(g1, g2), g3)])
                )
                key = (g1, (g2, g3))
                if key not in moved:
                    moved[key] = act(g1, d[(g2, g3)])
                rhs = tuple(
                    a + b for a, b in zip(d[(g1, G.mul(g2, g3))], moved[key])
                )
                triples += 1
                if lhs != rhs:
                    failures += 1
    ck.record("two cocycle condition", failures == 0, f"{triples} triples")

    def edge_unit(g: int) -> Tuple[int, ...]:
        vec = [0] * X.n_edges
        if g != e:
            vec[idx[(e, g)]] = 1
        return tuple(vec)

    bad = 0
    for h in G.elements():
        for g in G.elements():
            lhs = d[(h, g)]
            rhs = tuple(
                a + b - c
                for a, b, c in zip(edge_unit(h), act(h, edge_unit(g)), edge_unit(G.mul(h, g)))
            )
            if lhs != rhs:
                bad += 1
    ck.record("tree-edge recursion at the edge level", bad == 0, f"{G.order ** 2} pairs")
    return ck.finish()


# -- closed walks span the flows -------------------------------------------------------


def check_center_walks(G: FiniteGroup, max_len: Optional[int] = None) -> CheckReport:
    """Closed walks from the identity span the full flow lattice of Cay(G, G)."""
    if max_len is None:
        max_len = G.order + 1
    if max_len < G.order + 1:
        raise InvalidParameterError("max_len must be at least |G| + 1")
    ck = _Checker("center-walks", G.spec, {"max_len": max_len})
    n = G.order
    X = cayley_graph(G, list(range(n)))  # includes the identity: loops
    fl = flow_lattice(X)
    ck.record("rank formula", fl.rank == X.n_edges - n + 1, f"rank {fl.rank}")
    idx = X.edge_index()
    edge_of = [[idx[(v, G.table[v][s])] for s in range(n)] for v in range(n)]
    flows = set()
    spanned = False
    level_reached = 0
    walks_used = 0
    for length in range(1, max_len + 1):
        for prefix in itertools.product(range(n), repeat=length - 1):
            v = G.identity
            vec = [0] * X.n_edges
            acc = G.identity
            for s in prefix:
                vec[edge_of[v][s]] += 1
                v = G.table[v][s]
                acc = G.table[acc][s]
            last = G.inverses[acc]
            vec[edge_of[v][last]] += 1
            flows.add(tuple(vec))
        level_reached = length
        walks_used = len(flows)
        W = IntMatrix.from_columns([list(f) for f in sorted(flows)], rows=X.n_edges)
        if saturation(W) == fl.basis:
            spanned = True
            break
    ck.record(
        "saturated walk span equals the flow lattice",
        spanned,
        f"walk length {level_reached}, {walks_used} distinct flows",
    )
    return ck.finish()


# -- symmetric group restrictions --------------------------------------------------------


def check_sn_restrictions(n: int) -> CheckReport:
    """Point-graph flows restrict to permutation lattices on both key subgroups."""
    if not 3 <= n <= 5:
        raise InvalidParameterError("n must be between 3 and 5")
    G = symmetric(n)
    ck = _Checker("sn-restrictions", G.spec, {"n": n})
    V = natural_gset(G)
    X = complete_edges(V, loops=False)
    fl = flow_lattice(X)
    ck.record(
        "rank formula", fl.rank == n * (n - 1) - n + 1, f"rank {fl.rank}"
    )

    # full cycle subgroup: reduce to the directed cycle plus free orbits
    cycle_perm = tuple((i + 1) % n for i in range(n))
    cyc = G.point_action.index(cycle_perm)
    H1 = subgroup_from_generators(G, [cyc])
    XH1 = restrict_graph_group(X, H1)
    idx = X.edge_index()
    cycle_edges = [idx[(i, (i + 1) % n)] for i in range(n)]
    iso1 = remove_edges_decomposition(XH1, subgraph(XH1, cycle_edges))
    ck.record(
        "cycle-subgroup restriction has a stable basis",
        iso1.source.is_permutation_action() and iso1.is_unimodular(),
        f"Z + ZC{n}^{(iso1.source.rank - 1) // n}",
    )

    # point stabilizer: the star-tree fundamental flows are a stable basis
    H2 = V.stabilizer(n - 1)
    ck.record("point stabilizer order", H2.order == G.order // n, f"order {H2.order}")
    star = [idx[(i, n - 1)] for i in range(n - 1)]
    non_tree = [k for k in range(X.n_edges) if k not in set(star)]
    candidates = []
    for k in non_tree:
        u, v = X.edges[k]
        steps = [(u, v, 1)]
        if v != n - 1:
            steps.append((v, n - 1, 1))
        if u != n - 1:
            steps.append((u, n - 1, -1))
        candidates.append(_edge_vector(X, steps))
    fl2 = spanning_tree_basis(X, star, candidates)
    ck.record("star-tree flows form a basis", True, f"rank {fl2.rank}")
    stable = True
    cand_set = {tuple(c) for c in candidates}
    for h in H2.elements:
        perm = X.edge_action[h]
        for c in candidates:
            moved = [0] * X.n_edges
            for k, val in enumerate(c):
                if val:
                    moved[perm[k]] = val
            if tuple(moved) not in cand_set:
                stable = False
                break
        if not stable:
            break
    ck.record("star-tree basis is stabilizer-stable", stable)
    return ck.finish()


# -- kernel presentation for split metacyclic groups ----------------------------------------


@dataclass
class _MetacyclicData:
    G: FiniteGroup
    n: int
    m: int
    r: int
    X: GGraph
    fl: object
    B: GLattice
    pi: EquivariantMap
    K: GLattice
    K_incl: EquivariantMap
    kernel_matrix: IntMatrix
    Hs: Subgroup
    Ht: Subgroup
    u_vectors: IntMatrix
    v_vectors: IntMatrix
    sigma: int
    tau: int


def _metacyclic_presentation(n: int, m: int, r: int) -> _MetacyclicData:
    """Build the presentation map for <s, t | s^n = t^m, t^-1 s t = s^r>."""
    if gcd(n, m) != 1:
        raise InvalidParameterError(f"orders n={n}, m={m} must be coprime")
    G = semidirect(n, m, r)
    r = r % n
    if r == 1:
        raise InvalidParameterError("twist must move s (r != 1 mod n)")
    s, t = G.generator_indices["s"], G.generator_indices["t"]
    X = cayley_graph(G, [s, t])
    fl = flow_lattice(X)
    Hs = subgroup_from_generators(G, [s])
    Ht = subgroup_from_generators(G, [t])
    Ls, Lt, LG = coset_lattice(G, Hs), coset_lattice(G, Ht), regular(G)
    B = direct_sum_many([Ls, Lt, LG])

    def cycle_flow(gen: int, length: int) -> List[int]:
        steps = []
        v = G.identity
        for _ in range(length):
            steps.append((v, G.table[v][gen], 1))
            v = G.table[v][gen]
        return _edge_vector(X, steps)

    s_flow = fl.flow_coordinates(cycle_flow(s, n))
    t_flow = fl.flow_coordinates(cycle_flow(t, m))
    # A = (e -> s -> s t) - (e -> t -> t s -> ... -> t s^r)
    steps = [(G.identity, s, 1), (s, G.mul(s, t), 1), (G.identity, t, -1)]
    v = t
    for _ in range(r):
        steps.append((v, G.table[v][s], -1))
        v = G.table[v][s]
    assert v == G.mul(s, t), "the two paths must end at s t"
    a_flow = fl.flow_coordinates(_edge_vector(X, steps))
    assert s_flow is not None and t_flow is not None and a_flow is not None

    rho = fl.glattice.action
    s_vec = IntMatrix.column(s_flow)
    t_vec = IntMatrix.column(t_flow)
    assert rho[s] @ s_vec == s_vec, "cycle flow must be s-invariant"
    assert rho[t] @ t_vec == t_vec, "cycle flow must be t-invariant"

    cols: List[List[int]] = []
    for H, base in ((Hs, s_flow), (Ht, t_flow)):
        points = coset_gset(G, H)
        for p in range(points.size):
            g_p = min(g for g in G.elements() if points.apply(g, 0) == p)
            cols.append(rho[g_p].mul_vector(base))
    for g in G.elements():
        cols.append(rho[g].mul_vector(a_flow))
    pi = EquivariantMap(B, fl.glattice, IntMatrix.from_columns(cols, rows=fl.rank))
    pi.validate()

    kernel = kernel_basis(pi.matrix)
    K, K_incl = sublattice_with_action(B, kernel, name="ker(pi)")

    # the listed kernel elements, in the coordinates of B
    off_s, off_t, off_g = 0, m, m + n
    s_hat = [0] * B.rank
    s_hat[off_s] = 1
    t_hat = [0] * B.rank
    t_hat[off_t] = 1
    a_hat = [0] * B.rank
    a_hat[off_g + G.identity] = 1

    def act_B(g: int, vec: List[int]) -> List[int]:
        return B.action[g].mul_vector(vec)

    def add(u: List[int], v: List[int], c: int = 1) -> List[int]:
        return [a + c * b for a, b in zip(u, v)]

    norm_s_a = [0] * B.rank
    for i in range(n):
        norm_s_a = add(norm_s_a, act_B(G.power(s, i), a_hat))
    u_e = add(add(norm_s_a, s_hat, -1), act_B(t, s_hat), r)
    u_cols = [act_B(G.power(t, j), u_e) for j in range(m)]

    coeff, rem = divmod(r ** m - 1, n)
    assert rem == 0, "the twist congruence forces an integer coefficient"
    v_sum = [0] * B.rank
    for j in range(m):
        inner = [0] * B.rank
        for i in range(r ** j):
            inner = add(inner, act_B(G.power(s, i % n), a_hat))
        v_sum = add(v_sum, act_B(G.power(t, j), inner))
    v_e = add(add(add(v_sum, s_hat, coeff), t_hat), act_B(s, t_hat), -1)
    v_cols = [act_B(g, v_e) for g in G.elements()]

    return _MetacyclicData(
        G=G, n=n, m=m, r=r, X=X, fl=fl, B=B, pi=pi, K=K, K_incl=K_incl,
        kernel_matrix=kernel, Hs=Hs, Ht=Ht,
        u_vectors=IntMatrix.from_columns(u_cols, rows=B.rank),
        v_vectors=IntMatrix.from_columns(v_cols, rows=B.rank),
        sigma=s, tau=t,
    )


def check_kernel_generators(n: int, m: int, r: int) -> CheckReport:
    """The listed flows present the kernel of the metacyclic surjection."""
    data = _metacyclic_presentation(n, m, r)
    G = data.G
    ck = _Checker("kernel-generators", G.spec, {"n": n, "m": m, "r": r % n})

    factors, free = cokernel_invariants(data.pi.matrix)
    ck.record("pi surjective", factors == [] and free == 0)

    W = data.v_vectors.hstack(data.u_vectors)
    ck.record("listed elements lie in the kernel", (data.pi.matrix @ W).is_zero())
    ck.record(
        "listed elements span the kernel saturated",
        same_column_span(W, data.kernel_matrix),
        f"{W.cols} generators",
    )
    ck.record(
        "kernel rank n+m-1",
        data.kernel_matrix.cols == n + m - 1,
        f"rank {data.kernel_matrix.cols}",
    )

    solver = BasisSolver(data.kernel_matrix)
    u_in_K = solver.express_matrix(data.u_vectors)
    ck.record("norm-type elements generate a submodule", u_in_K is not None)
    M0, M0_incl = sublattice_with_action(data.K, u_in_K, name="M0")
    iso = EquivariantMap(coset_lattice(G, data.Hs), M0, IntMatrix.identity(m))
    ck.run(
        "M0 is the s-coset lattice via the basepoint map",
        lambda: (iso.equivariance_failure() is None, ""),
    )

    # quotient: project kernel onto the t-coset block and land in its
    # augmentation sublattice
    off_t = m
    Lt = coset_lattice(G, data.Ht)
    I_lat, I_incl = augmentation_kernel(Lt)
    block = data.kernel_matrix.take_rows(range(off_t, off_t + n))
    phi_cols = BasisSolver(I_incl.matrix).express_matrix(block)
    ck.record("kernel projects into the augmentation sublattice", phi_cols is not None)
    if phi_cols is not None:
        phi = EquivariantMap(data.K, I_lat, phi_cols)
        ck.run("projection equivariant", lambda: (phi.equivariance_failure() is None, ""))
        f2, free2 = cokernel_invariants(phi.matrix)
        ck.record("projection surjective", f2 == [] and free2 == 0)
        ck.record(
            "kernel of projection is exactly M0",
            same_column_span(kernel_basis(phi.matrix), u_in_K),
        )
        f3, free3 = cokernel_invariants(u_in_K)
        ck.record(
            "quotient by M0 is free of rank n-1",
            f3 == [] and free3 == n - 1,
            f"factors {f3}, free {free3}",
        )

    verdict = is_coflasque(data.K)
    ck.record(
        "kernel coflasque",
        bool(verdict),
        "" if verdict else f"fails at {verdict.failing_subgroup}",
    )

    seq = ShortExactSequence(data.K_incl, data.pi)
    section = find_section(seq)
    ck.record("presentation sequence splits", section is not None)
    if section is not None:
        split = split_iso_from_section(seq, section)
        ck.record(
            "ker(pi) + M = Z[G/s] + Z[G/t] + ZG",
            split.is_unimodular() and split.equivariance_failure() is None,
        )
    return ck.finish()


def check_faithful_transfer(n: int, m: int, r: int) -> CheckReport:
    """Flasque-class transfer from the group graph to the coset graph."""
    data = _metacyclic_presentation(n, m, r)
    G = data.G
    ck = _Checker("faithful-transfer", G.spec, {"n": n, "m": m, "r": r % n})

    # phi: ker(pi) ->> I on the t-cosets, kernel M0 (checked elsewhere)
    Lt = coset_lattice(G, data.Ht)
    I_lat, I_incl = augmentation_kernel(Lt)
    off_t = m
    block = data.kernel_matrix.take_rows(range(off_t, off_t + n))
    phi_cols = BasisSolver(I_incl.matrix).express_matrix(block)
    assert phi_cols is not None
    phi = EquivariantMap(data.K, I_lat, phi_cols)

    # psi: the boundary of the complete graph on the t-cosets
    Vt = coset_gset(G, data.Ht)
    Xt = complete_edges(Vt, loops=False)
    bd = boundary_matrix(Xt)
    psi_cols = BasisSolver(I_incl.matrix).express_matrix(bd.matrix)
    assert psi_cols is not None
    P = bd.source
    psi = EquivariantMap(P, I_lat, psi_cols)
    f0, free0 = cokernel_invariants(psi.matrix)
    ck.record("coset boundary surjects onto the augmentation sublattice",
              f0 == [] and free0 == 0)

    Q, p_ker, p_P, q_incl = pullback(phi, psi)
    ck.record("pullback rank", Q.rank == data.K.rank + P.rank - I_lat.rank,
              f"rank {Q.rank}")
    q_solver = BasisSolver(q_incl.matrix)

    # middle row 0 -> Z[G/s] -> Q -> P -> 0 splits
    u_in_K = BasisSolver(data.kernel_matrix).express_matrix(data.u_vectors)
    assert u_in_K is not None
    Ls = coset_lattice(G, data.Hs)
    amb = IntMatrix.zeros(data.K.rank + P.rank, m)
    amb.a[: data.K.rank, :] = u_in_K.a
    left_cols = q_solver.express_matrix(amb)
    ck.record("s-coset lattice embeds into the pullback", left_cols is not None)
    if left_cols is None:
        return ck.finish()
    row_seq = ShortExactSequence(
        EquivariantMap(Ls, Q, left_cols), p_P
    )
    row_report = check_exact(row_seq)
    ck.record("middle row exact", row_report.ok, "; ".join(row_report.failures))
    section = find_section(row_seq)
    ck.record("middle row splits", section is not None)
    if section is None:
        return ck.finish()
    q_iso = split_iso_from_section(row_seq, section)  # Ls + P -> Q
    ck.record(
        "pullback is permutation",
        q_iso.source.is_permutation_action() and q_iso.is_unimodular(),
    )

    # middle column 0 -> ker(psi) -> Q -> ker(pi) -> 0
    flt = flow_lattice(Xt)
    col_amb = IntMatrix.zeros(data.K.rank + P.rank, flt.rank)
    col_amb.a[data.K.rank :, :] = flt.basis.a
    col_left = q_solver.express_matrix(col_amb)
    ck.record("coset flows embed into the pullback", col_left is not None)
    if col_left is None:
        return ck.finish()
    col_seq = ShortExactSequence(
        EquivariantMap(flt.glattice, Q, col_left), p_ker
    )
    col_report = check_exact(col_seq)
    ck.record("middle column exact", col_report.ok, "; ".join(col_report.failures))

    # the shared flasque cokernel: one flasque resolution of the flow
    # lattice from the split presentation, one of the coset flows from
    # the permutation pullback
    pres = ShortExactSequence(data.K_incl, data.pi)
    pres_section = find_section(pres)
    ck.record("presentation splits", pres_section is not None)
    if pres_section is None:
        return ck.finish()
    u = split_iso_from_section(pres, pres_section)  # K + M -> B
    top = u.inverse().matrix.take_rows(range(data.K.rank))
    res1 = ShortExactSequence(
        EquivariantMap(data.fl.glattice, data.B, pres_section.matrix),
        EquivariantMap(data.B, data.K, top),
    )
    res1_report = check_exact(res1)
    ck.record("flasque resolution of the flow lattice", res1_report.ok,
              "; ".join(res1_report.failures))

    q_inv = q_iso.inverse()
    res2 = ShortExactSequence(
        EquivariantMap(flt.glattice, q_iso.source, q_inv.matrix @ col_left),
        EquivariantMap(q_iso.source, data.K, p_ker.matrix @ q_iso.matrix),
    )
    res2_report = check_exact(res2)
    ck.record("flasque resolution of the coset flows", res2_report.ok,
              "; ".join(res2_report.failures))
    ck.record(
        "resolutions share permutation middles",
        data.B.is_permutation_action() and q_iso.source.is_permutation_action(),
    )
    verdict = is_flasque(data.K)
    ck.record(
        "shared cokernel flasque",
        bool(verdict),
        "" if verdict else f"fails at {verdict.failing_subgroup}",
    )
    return ck.finish()


# -- Schanuel uniqueness -------------------------------------------------------------------


def check_schanuel(M: GLattice, group_spec: str, lattice_spec: str) -> CheckReport:
    """Two independent coflasque resolutions have matching complements."""
    from .groups import subgroup_conjugacy_reps

    ck = _Checker("schanuel", group_spec, {"lattice": lattice_spec})
    k = len(subgroup_conjugacy_reps(M.group))
    r1 = coflasque_resolution(M)
    r2 = coflasque_resolution(M, rep_order=list(reversed(range(k))))
    ck.record("two resolutions built", True,
              f"middles of rank {r1.sequence.B.rank} and {r2.sequence.B.rank}")
    Q, p1, p2, q_incl = pullback(r1.sequence.right, r2.sequence.right)
    q_solver = BasisSolver(q_incl.matrix)
    b1 = r1.sequence.B.rank

    def embed(cert: ResolutionCertificate, into_first: bool) -> EquivariantMap:
        C = cert.sequence.A
        incl = cert.sequence.left.matrix
        amb = IntMatrix.zeros(b1 + r2.sequence.B.rank, C.rank)
        if into_first:
            amb.a[:b1, :] = incl.a
        else:
            amb.a[b1:, :] = incl.a
        coords = q_solver.express_matrix(amb)
        assert coords is not None
        return EquivariantMap(C, Q, coords)

    seq1 = ShortExactSequence(embed(r2, into_first=False), p1)
    seq2 = ShortExactSequence(embed(r1, into_first=True), p2)
    rep1, rep2 = check_exact(seq1), check_exact(seq2)
    ck.record("first projection exact", rep1.ok, "; ".join(rep1.failures))
    ck.record("second projection exact", rep2.ok, "; ".join(rep2.failures))
    s1 = find_section(seq1)
    s2 = find_section(seq2)
    ck.record("both projections split", s1 is not None and s2 is not None)
    if s1 is None or s2 is None:
        return ck.finish()
    iso1 = split_iso_from_section(seq1, s1)  # C2 + P1 -> Q
    iso2 = split_iso_from_section(seq2, s2)  # C1 + P2 -> Q
    final = iso1.inverse().compose(iso2)
    ck.record(
        "C1 + P2 = C2 + P1 via an explicit unimodular map",
        final.is_unimodular() and final.equivariance_failure() is None,
    )
    return ck.finish()


# -- rank formula over a graph collection -----------------------------------------------------


def check_rank_formula(graphs: Sequence[Tuple[str, GGraph]]) -> CheckReport:
    """rank Fl = |E| - |V| + 1 on every listed connected graph."""
    ck = _Checker("rank-formula", "various", {"graphs": len(graphs)})
    for label, X in graphs:
        fl = flow_lattice(X)
        expected = X.n_edges - X.n_vertices + 1
        ck.record(label, fl.rank == expected, f"rank {fl.rank} = {expected}")
    return ck.finish()


def skipped_report(
    check_id: str, group_spec: str, parameters: Dict[str, object], reason: str
) -> CheckReport:
    """A report marking a gated check that was not run."""
    return _Checker(check_id, group_spec, parameters).finish(skipped_reason=reason)


def quick_suite_graphs() -> List[Tuple[str, GGraph]]:
    """The pinned collection of connected G-graphs for the rank criterion."""
    from .groups import dihedral, direct_product, regular_gset

    out: List[Tuple[str, GGraph]] = []
    for n in (2, 3, 4, 5, 6):
        G = cyclic(n)
        out.append((f"cayley(C:{n};s)", cayley_graph(G, [G.generator_indices["s"]])))
    G = cyclic(12)
    s = G.generator_indices["s"]
    out.append(("cayley(C:12;s,s2)", cayley_graph(G, [s, G.power(s, 2)])))
    G = cyclic(8)
    s = G.generator_indices["s"]
    out.append(("cayley(C:8;s,s3)", cayley_graph(G, [s, G.power(s, 3)])))
    for n in (3, 4, 6):
        G = dihedral(n)
        out.append(
            (f"cayley(D:{n};s,t)",
             cayley_graph(G, [G.generator_indices["s"], G.generator_indices["t"]]))
        )
    for (n, m, r) in ((3, 2, 2), (5, 2, 4), (5, 4, 2), (7, 3, 2)):
        G = semidirect(n, m, r)
        out.append(
            (f"cayley(SD:{n},{m},{r};s,t)",
             cayley_graph(G, [G.generator_indices["s"], G.generator_indices["t"]]))
        )
    K4 = direct_product(cyclic(2), cyclic(2))
    out.append(
        ("cayley(X(C:2,C:2);all)",
         cayley_graph(K4, [g for g in K4.elements() if g != K4.identity]))
    )
    out.append(("complete(regular X(C:2,C:2))", complete_edges(regular_gset(K4))))
    S3 = symmetric(3)
    out.append(("complete(natural S:3)", complete_edges(natural_gset(S3))))
    out.append(
        ("complete(regular S:3; loops)", complete_edges(regular_gset(S3), loops=True))
    )
    t = next(g for g in S3.elements() if S3.element_order(g) == 2)
    out.append(
        ("complete(cosets S:3/<t>)",
         complete_edges(coset_gset(S3, subgroup_from_generators(S3, [t]))))
    )
    S4 = symmetric(4)
    swap = S4.point_action.index((1, 0, 2, 3))
    four = S4.point_action.index((1, 2, 3, 0))
    out.append(("cayley(S:4;(12),(1234))", cayley_graph(S4, [swap, four])))
    out.append(("complete(natural S:4)", complete_edges(natural_gset(S4))))
    return out
