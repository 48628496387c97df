"""Command-line front end: parse group/graph/lattice specs, run
computations and check suites, emit text or JSON reports.

Spec grammars
    group     C:<n> | D:<n> | SD:<n>,<m>,<r> | S:<n> | X(<spec>,<spec>)
    generator e | s | s<k> | t<k> | s<k>t<j> | #<index> | * (all nonidentity)
              and cycle notation like (12) or (123)(45) for S:<n>
    gset      regular(<group>) | natural(<group>) | cosets(<group>;<gens>)
    graph     cayley(<group>;<gens>) | complete(<gset>;loops=0|1)
              | cosets(<group>;<gens>)
    lattice   flows:<graph> | flows:cayley | regular | trivial | sign
    subgroup  whole | trivial | sylow<p> | gen:<gens>

Exit codes: 0 success / all checks pass, 1 a check failed (reports are
still emitted), 2 usage or spec error (with the failing token).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InvalidParameterError, SpecParseError
from .gflows import GGraph, cayley_graph, complete_edges, flow_lattice
from .gmod import GLattice, regular as regular_lattice, trivial as trivial_lattice
from .groups import (
    FiniteGroup,
    GSet,
    Subgroup,
    coset_gset,
    cyclic,
    dihedral,
    direct_product,
    natural_gset,
    regular_gset,
    semidirect,
    subgroup_from_generators,
    sylow,
    symmetric,
    trivial_subgroup,
    whole_group,
)
from .intlinalg import IntMatrix
from . import checks
from .cohom import (
    coflasque_resolution,
    flasque_resolution,
    invertibility_certificate,
    is_permutation_bounded,
    tate,
)


@dataclass
class RunConfig:
    """One parsed invocation: a command plus its spec strings."""

    command: str
    output: str = "text"
    options: Dict[str, object] = field(default_factory=dict)


# -- spec parsing ------------------------------------------------------------------


def parse_group_spec(spec: str) -> FiniteGroup:
    spec = spec.strip()
    group, rest = _parse_group_prefix(spec, 0)
    if rest != len(spec):
        raise SpecParseError(
            f"trailing characters in group spec {spec!r}", spec[rest:], rest
        )
    return group


def _parse_group_prefix(spec: str, pos: int) -> Tuple[FiniteGroup, int]:
    m = re.match(r"C:(\d+)", spec[pos:])
    if m:
        return cyclic(int(m.group(1))), pos + m.end()
    m = re.match(r"D:(\d+)", spec[pos:])
    if m:
        return dihedral(int(m.group(1))), pos + m.end()
    m = re.match(r"SD:(\d+),(\d+),(\d+)", spec[pos:])
    if m:
        return semidirect(int(m.group(1)), int(m.group(2)), int(m.group(3))), pos + m.end()
    m = re.match(r"S:(\d+)", spec[pos:])
    if m:
        return symmetric(int(m.group(1))), pos + m.end()
    if spec[pos:].startswith("X("):
        left, p = _parse_group_prefix(spec, pos + 2)
        if p >= len(spec) or spec[p] != ",":
            raise SpecParseError("expected ',' in product spec", spec[p : p + 1], p)
        right, p = _parse_group_prefix(spec, p + 1)
        if p >= len(spec) or spec[p] != ")":
            raise SpecParseError("expected ')' in product spec", spec[p : p + 1], p)
        return direct_product(left, right), p + 1
    raise SpecParseError(
        f"unrecognized group spec at position {pos}", spec[pos : pos + 8], pos
    )


def parse_generator_token(G: FiniteGroup, token: str) -> int:
    token = token.strip()
    if token == "e":
        return G.identity
    if token.startswith("#"):
        idx = int(token[1:])
        if not 0 <= idx < G.order:
            raise SpecParseError(f"element index {idx} out of range", token, 0)
        return idx
    m = re.fullmatch(r"\(([\d)(]*\d)\)", token)
    if m or (token.startswith("(") and token.endswith(")")):
        if G.point_action is None:
            raise SpecParseError(
                "cycle notation needs a symmetric group", token, 0
            )
        n = len(G.point_action[0])
        perm = list(range(n))
        for cyc in re.findall(r"\(([0-9]+)\)", token):
            pts = [int(c) - 1 for c in cyc]
            if any(not 0 <= p < n for p in pts) or len(set(pts)) != len(pts):
                raise SpecParseError(f"bad cycle {cyc!r}", token, 0)
            for i, p in enumerate(pts):
                perm[p] = pts[(i + 1) % len(pts)]
        try:
            return G.point_action.index(tuple(perm))
        except ValueError:
            raise SpecParseError(f"cycle {token!r} is not a group element", token, 0)
    m = re.fullmatch(r"(?:s(\d*))?(?:t(\d*))?", token)
    if m and token:
        si = G.generator_indices.get("s")
        ti = G.generator_indices.get("t")
        out = G.identity
        if m.group(1) is not None:
            if si is None:
                raise SpecParseError("group has no generator s", token, 0)
            out = G.mul(out, G.power(si, int(m.group(1) or 1)))
        if m.group(2) is not None:
            if ti is None:
                raise SpecParseError("group has no generator t", token, 0)
            out = G.mul(out, G.power(ti, int(m.group(2) or 1)))
        return out
    raise SpecParseError(f"unrecognized generator token {token!r}", token, 0)


def parse_generators(G: FiniteGroup, csv: str) -> List[int]:
    csv = csv.strip()
    if csv == "*":
        return [g for g in G.elements() if g != G.identity]
    tokens = [t for t in csv.split(",") if t.strip()]
    if not tokens:
        raise SpecParseError("empty generator list", csv, 0)
    return [parse_generator_token(G, t) for t in tokens]


def parse_gset_spec(spec: str) -> GSet:
    spec = spec.strip()
    m = re.fullmatch(r"regular\((.*)\)", spec)
    if m:
        return regular_gset(parse_group_spec(m.group(1)))
    m = re.fullmatch(r"natural\((.*)\)", spec)
    if m:
        return natural_gset(parse_group_spec(m.group(1)))
    m = re.fullmatch(r"cosets\((.*);(.*)\)", spec)
    if m:
        G = parse_group_spec(m.group(1))
        H = subgroup_from_generators(G, parse_generators(G, m.group(2)))
        return coset_gset(G, H)
    raise SpecParseError(f"unrecognized gset spec {spec!r}", spec[:12], 0)


def parse_graph_spec(spec: str) -> GGraph:
    spec = spec.strip()
    m = re.fullmatch(r"cayley\((.*);(.*)\)", spec)
    if m:
        G = parse_group_spec(m.group(1))
        return cayley_graph(G, parse_generators(G, m.group(2)))
    m = re.fullmatch(r"complete\((.*);loops=([01])\)", spec)
    if m:
        return complete_edges(parse_gset_spec(m.group(1)), loops=m.group(2) == "1")
    m = re.fullmatch(r"cosets\((.*);(.*)\)", spec)
    if m:
        G = parse_group_spec(m.group(1))
        H = subgroup_from_generators(G, parse_generators(G, m.group(2)))
        return complete_edges(coset_gset(G, H), loops=False)
    raise SpecParseError(f"unrecognized graph spec {spec!r}", spec[:12], 0)


def parse_lattice_spec(G: FiniteGroup, spec: str) -> GLattice:
    spec = spec.strip()
    if spec == "regular":
        return regular_lattice(G)
    if spec == "trivial":
        return trivial_lattice(G)
    if spec == "sign":
        if G.order != 2:
            raise SpecParseError("sign lattice is defined for C:2", spec, 0)
        return GLattice(G, [IntMatrix.identity(1), IntMatrix.from_rows([[-1]])])
    if spec == "flows:cayley":
        gens = [G.generator_indices[k] for k in ("s", "t") if k in G.generator_indices]
        if not gens or G.closure(gens) != tuple(range(G.order)):
            raise SpecParseError(
                "flows:cayley needs distinguished generators; use flows:cayley(...)",
                spec, 0,
            )
        return flow_lattice(cayley_graph(G, gens)).glattice
    if spec.startswith("flows:"):
        graph = parse_graph_spec(spec[len("flows:"):])
        if graph.group.spec != G.spec:
            raise SpecParseError("lattice graph group differs from --group", spec, 0)
        return flow_lattice(graph).glattice
    raise SpecParseError(f"unrecognized lattice spec {spec!r}", spec[:12], 0)


def parse_subgroup_spec(G: FiniteGroup, spec: str) -> Subgroup:
    spec = spec.strip()
    if spec == "whole":
        return whole_group(G)
    if spec == "trivial":
        return trivial_subgroup(G)
    m = re.fullmatch(r"sylow(\d+)", spec)
    if m:
        return sylow(G, int(m.group(1)))
    m = re.fullmatch(r"gen:(.*)", spec)
    if m:
        return subgroup_from_generators(G, parse_generators(G, m.group(1)))
    raise SpecParseError(f"unrecognized subgroup spec {spec!r}", spec[:12], 0)


# -- check dispatch ------------------------------------------------------------------


def run_check(check_id: str, params: Dict[str, object]) -> checks.CheckReport:
    """Run one named check from CLI-level parameters."""
    if check_id == "cyclic-flows":
        G = cyclic(int(params["n"]))
        gens = parse_generators(G, str(params["gens"]))
        return checks.check_cyclic_flows(int(params["n"]), gens)
    if check_id == "kernel-generators":
        return checks.check_kernel_generators(
            int(params["n"]), int(params["m"]), int(params["r"])
        )
    if check_id == "faithful-transfer":
        return checks.check_faithful_transfer(
            int(params["n"]), int(params["m"]), int(params["r"])
        )
    if check_id == "flow-coflasque":
        G = parse_group_spec(str(params["group"]))
        gens = parse_generators(G, str(params["gens"]))
        return checks.check_flow_coflasque(G, gens)
    if check_id == "bar-cocycle":
        return checks.check_bar_cocycle(parse_group_spec(str(params["group"])))
    if check_id == "center-walks":
        G = parse_group_spec(str(params["group"]))
        max_len = params.get("max_len")
        return checks.check_center_walks(
            G, int(max_len) if max_len is not None else None
        )
    if check_id == "sn-restrictions":
        return checks.check_sn_restrictions(int(params["n"]))
    if check_id == "schanuel":
        G = parse_group_spec(str(params["group"]))
        M = parse_lattice_spec(G, str(params["lattice"]))
        return checks.check_schanuel(M, G.spec, str(params["lattice"]))
    if check_id == "rank-formula":
        return checks.check_rank_formula(checks.quick_suite_graphs())
    raise SpecParseError(f"unknown check id {check_id!r}", check_id, 0)


CHECK_IDS = [
    "rank-formula",
    "cyclic-flows",
    "flow-coflasque",
    "kernel-generators",
    "faithful-transfer",
    "bar-cocycle",
    "center-walks",
    "sn-restrictions",
    "schanuel",
]


def suite_definition(name: str, with_s5: bool = False) -> List[Tuple[str, Dict[str, object]]]:
    """Declarative check lists: quick covers order <= 12, full order <= 24."""
    if name not in ("quick", "full"):
        raise SpecParseError(f"unknown suite {name!r}", name, 0)
    checks: List[Tuple[str, Dict[str, object]]] = [("rank-formula", {})]
    for n in range(2, 13):
        checks.append(("cyclic-flows", {"n": n, "gens": "s"}))
        second = "s,s2" if n > 2 else "s,e"
        checks.append(("cyclic-flows", {"n": n, "gens": second}))
    for group, gens in (
        ("C:6", "s"),
        ("C:12", "s,s5"),
        ("X(C:2,C:2)", "*"),
        ("SD:3,2,2", "s,t"),
        ("D:4", "s,t"),
        ("SD:5,2,4", "s,t"),
        ("D:6", "s,t"),
    ):
        checks.append(("flow-coflasque", {"group": group, "gens": gens}))
    checks.append(("kernel-generators", {"n": 3, "m": 2, "r": 2}))
    checks.append(("kernel-generators", {"n": 5, "m": 2, "r": 4}))
    checks.append(("faithful-transfer", {"n": 3, "m": 2, "r": 2}))
    checks.append(("faithful-transfer", {"n": 5, "m": 2, "r": 4}))
    for group in ("C:2", "C:4", "SD:3,2,2", "D:4"):
        checks.append(("bar-cocycle", {"group": group}))
    for group in ("C:2", "C:3", "SD:3,2,2"):
        checks.append(("center-walks", {"group": group}))
    checks.append(("sn-restrictions", {"n": 3}))
    checks.append(("schanuel", {"group": "C:2", "lattice": "trivial"}))
    checks.append(("schanuel", {"group": "C:2", "lattice": "sign"}))
    checks.append(("schanuel", {"group": "SD:3,2,2", "lattice": "flows:cayley"}))
    if name == "full":
        for (n, m, r) in ((7, 3, 2), (5, 4, 2), (5, 4, 3)):
            checks.append(("kernel-generators", {"n": n, "m": m, "r": r}))
        checks.append(("faithful-transfer", {"n": 7, "m": 3, "r": 2}))
        for group, gens in (
            ("SD:5,4,2", "s,t"),
            ("SD:7,3,2", "s,t"),
            ("D:12", "s,t"),
            ("S:4", "(12),(1234)"),
        ):
            checks.append(("flow-coflasque", {"group": group, "gens": gens}))
        checks.append(("sn-restrictions", {"n": 4}))
        checks.append(("sn-restrictions", {"n": 5, "gated": True}))
    out = []
    for cid, params in checks:
        if params.pop("gated", False) and not with_s5:
            out.append((cid, {**params, "skipped": "pass --with-s5 to enable"}))
        else:
            out.append((cid, params))
    return out


def run_suite(name: str, with_s5: bool = False) -> List[checks.CheckReport]:
    reports = []
    for cid, params in suite_definition(name, with_s5):
        skip = params.pop("skipped", None)
        if skip is not None:
            label = str(params.get("group") or "")
            if cid == "sn-restrictions":
                label = f"S:{params['n']}"
            reports.append(checks.skipped_report(cid, label, params, skip))
        else:
            reports.append(run_check(cid, params))
    reports.sort(key=lambda r: (r.check_id, r.group_spec, json.dumps(r.parameters, sort_keys=True)))
    return reports


# -- output helpers -------------------------------------------------------------------


def _print_report(report: checks.CheckReport, output: str, out) -> None:
    if output == "json":
        print(json.dumps(report.to_json_dict(), indent=2), file=out)
        return
    print(f"[{report.status.upper():6s}] {report.check_id} {report.group_spec} "
          f"{json.dumps(report.parameters, sort_keys=True)}", file=out)
    for d in report.details:
        mark = "ok " if d["status"] == "pass" else "FAIL"
        detail = f"  ({d['detail']})" if d["detail"] else ""
        print(f"    {mark} {d['name']}{detail}", file=out)


def _suite_payload(name: str, reports: List[checks.CheckReport]) -> Dict[str, object]:
    status = "pass"
    if any(r.status == "fail" for r in reports):
        status = "fail"
    return {
        "suite": name,
        "status": status,
        "checks": [r.to_json_dict() for r in reports],
    }


# -- command implementations --------------------------------------------------------------


def _cmd_group_info(cfg: RunConfig, out) -> int:
    G = parse_group_spec(str(cfg.options["group"]))
    from .groups import all_subgroups, is_z_group, _prime_factors

    info: Dict[str, object] = {
        "spec": G.spec,
        "order": G.order,
        "abelian": G.is_abelian(),
        "center_order": len(G.center()),
        "element_names": list(G.element_names),
    }
    if G.order <= 64:
        subs = all_subgroups(G)
        info["subgroup_count"] = len(subs)
        info["subgroup_orders"] = sorted(s.order for s in subs)
        info["z_group"] = is_z_group(G)
        info["sylow_orders"] = {
            str(p): sylow(G, p).order for p in _prime_factors(G.order)
        }
    if cfg.output == "json":
        print(json.dumps(info, indent=2), file=out)
    else:
        for k, v in info.items():
            print(f"{k}: {v}", file=out)
    return 0


def _cmd_flows(cfg: RunConfig, out) -> int:
    X = parse_graph_spec(str(cfg.options["graph"]))
    payload: Dict[str, object] = {
        "graph": str(cfg.options["graph"]),
        "group": X.group.spec,
        "vertices": X.n_vertices,
        "edges": X.n_edges,
        "connected": X.is_connected(),
    }
    if X.is_connected():
        fl = flow_lattice(X)
        payload["rank"] = fl.rank
        payload["edge_orbits"] = [len(o) for o in X.edge_orbits()]
    else:
        payload["components"] = [list(c) for c in X.components()]
    if cfg.output == "json":
        print(json.dumps(payload, indent=2), file=out)
    else:
        for k, v in payload.items():
            print(f"{k}: {v}", file=out)
    return 0


def _cmd_tate(cfg: RunConfig, out) -> int:
    G = parse_group_spec(str(cfg.options["group"]))
    M = parse_lattice_spec(G, str(cfg.options["lattice"]))
    H = parse_subgroup_spec(G, str(cfg.options["subgroup"]))
    degree = int(cfg.options["degree"])
    result = tate(M, H, degree)
    payload = {
        "group": G.spec,
        "lattice": str(cfg.options["lattice"]),
        "subgroup": str(cfg.options["subgroup"]),
        "degree": degree,
        "invariant_factors": list(result.invariant_factors),
        "tate_group": str(result),
    }
    if cfg.output == "json":
        print(json.dumps(payload, indent=2), file=out)
    else:
        print(str(result), file=out)
    return 0


def _cmd_resolve(cfg: RunConfig, out) -> int:
    G = parse_group_spec(str(cfg.options["group"]))
    M = parse_lattice_spec(G, str(cfg.options["lattice"]))
    kind = str(cfg.options["kind"])
    cert = coflasque_resolution(M) if kind == "coflasque" else flasque_resolution(M)
    payload = {
        "group": G.spec,
        "lattice": str(cfg.options["lattice"]),
        "kind": cert.kind,
        "ranks": {
            "left": cert.sequence.A.rank,
            "middle": cert.sequence.B.rank,
            "right": cert.sequence.C.rank,
        },
        "middle_orbit_sizes": sorted(len(o) for o in cert.permutation_witness.orbits())
        if cert.permutation_witness is not None
        else None,
        "certified": True,
    }
    if cfg.output == "json":
        print(json.dumps(payload, indent=2), file=out)
    else:
        for k, v in payload.items():
            print(f"{k}: {v}", file=out)
    return 0


def _cmd_certify(cfg: RunConfig, out) -> int:
    G = parse_group_spec(str(cfg.options["group"]))
    M = parse_lattice_spec(G, str(cfg.options["lattice"]))
    kind = str(cfg.options["kind"])
    if kind == "permutation":
        outcome = is_permutation_bounded(M, int(cfg.options.get("bound") or 2))
        payload = {
            "group": G.spec,
            "lattice": str(cfg.options["lattice"]),
            "kind": "permutation",
            "witness_found": bool(outcome),
            "bound": outcome.bound,
            "orbit_sizes": [len(o) for o in outcome.orbits] if outcome else None,
            "reason": outcome.reason,
        }
    else:
        cert = invertibility_certificate(M)
        payload = {
            "group": G.spec,
            "lattice": str(cfg.options["lattice"]),
            "kind": "invertible",
            "certified": cert is not None,
        }
        if cert is not None:
            payload["subgroups"] = [list(H.elements) for H in cert.subgroups]
            payload["indices"] = [H.index() for H in cert.subgroups]
            payload["witness_orbit_sizes"] = [
                [len(o) for o in w.orbits] for w in cert.restriction_witnesses
            ]
        else:
            payload["status"] = "unknown"
    if cfg.output == "json":
        print(json.dumps(payload, indent=2), file=out)
    else:
        for k, v in payload.items():
            print(f"{k}: {v}", file=out)
    return 0


def _cmd_check(cfg: RunConfig, out) -> int:
    check_id = str(cfg.options["check_id"])
    params = {
        k: v
        for k, v in cfg.options.items()
        if k not in ("check_id",) and v is not None
    }
    report = run_check(check_id, params)
    _print_report(report, cfg.output, out)
    return 0 if report.status.startswith(("pass", "skipped")) else 1


def _cmd_suite(cfg: RunConfig, out) -> int:
    name = str(cfg.options["name"])
    reports = run_suite(name, bool(cfg.options.get("with_s5")))
    if cfg.output == "json":
        print(json.dumps(_suite_payload(name, reports), indent=2), file=out)
    else:
        for r in reports:
            _print_report(r, "text", out)
        passed = sum(1 for r in reports if r.status == "pass")
        print(f"suite {name}: {passed}/{len(reports)} passed", file=out)
    return 0 if all(r.status != "fail" for r in reports) else 1


# -- argument parsing -----------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glattice",
        description="Exact computations with finite-group lattices and graph flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_group = sub.add_parser("group", help="group utilities")
    group_sub = p_group.add_subparsers(dest="group_command", required=True)
    p_info = group_sub.add_parser("info", help="orders, subgroups, Sylow data")
    p_info.add_argument("--group", required=True)
    p_info.add_argument("--output", choices=("text", "json"), default="text")

    p_flows = sub.add_parser("flows", help="flow lattice of a graph spec")
    p_flows.add_argument("--graph", required=True)
    p_flows.add_argument("--output", choices=("text", "json"), default="text")

    p_tate = sub.add_parser("tate", help="Tate cohomology in degrees -1, 0, 1")
    p_tate.add_argument("--group", required=True)
    p_tate.add_argument("--lattice", required=True)
    p_tate.add_argument("--subgroup", required=True)
    p_tate.add_argument("--degree", type=int, required=True, choices=(-1, 0, 1))
    p_tate.add_argument("--output", choices=("text", "json"), default="text")

    p_res = sub.add_parser("resolve", help="coflasque/flasque resolution")
    p_res.add_argument("--group", required=True)
    p_res.add_argument("--lattice", required=True)
    p_res.add_argument("--kind", choices=("coflasque", "flasque"), default="coflasque")
    p_res.add_argument("--output", choices=("text", "json"), default="text")

    p_cert = sub.add_parser("certify", help="permutation/invertibility certificates")
    p_cert.add_argument("--group", required=True)
    p_cert.add_argument("--lattice", required=True)
    p_cert.add_argument("--kind", choices=("invertible", "permutation"), default="invertible")
    p_cert.add_argument("--bound", type=int, default=None)
    p_cert.add_argument("--output", choices=("text", "json"), default="text")

    p_check = sub.add_parser("check", help="run one named check")
    p_check.add_argument("check_id", choices=CHECK_IDS)
    p_check.add_argument("--n", type=int)
    p_check.add_argument("--m", type=int)
    p_check.add_argument("--r", type=int)
    p_check.add_argument("--group")
    p_check.add_argument("--gens")
    p_check.add_argument("--lattice")
    p_check.add_argument("--max-len", dest="max_len", type=int)
    p_check.add_argument("--output", choices=("text", "json"), default="json")

    p_suite = sub.add_parser("suite", help="run the quick or full check suite")
    p_suite.add_argument("name", choices=("quick", "full"))
    p_suite.add_argument("--with-s5", dest="with_s5", action="store_true")
    p_suite.add_argument("--output", choices=("text", "json"), default="text")
    return parser


def main(argv: Optional[Sequence[int]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ns = vars(args)
    command = ns.pop("command")
    if command == "group":
        command = f"group-{ns.pop('group_command')}"
    output = ns.pop("output", "text")
    cfg = RunConfig(command=command, output=output, options=ns)
    handlers = {
        "group-info": _cmd_group_info,
        "flows": _cmd_flows,
        "tate": _cmd_tate,
        "resolve": _cmd_resolve,
        "certify": _cmd_certify,
        "check": _cmd_check,
        "suite": _cmd_suite,
    }
    if command == "check":
        ns["check_id"] = ns.get("check_id")
    try:
        return handlers[command](cfg, out)
    except SpecParseError as exc:
        print(
            f"spec error: {exc} (token {exc.token!r}, position {exc.position})",
            file=sys.stderr,
        )
        return 2
    except (InvalidParameterError, KeyError, TypeError, ValueError) as exc:
        print(f"invalid invocation: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())
