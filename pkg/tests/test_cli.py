"""CLI surface: spec grammars, exit codes, JSON output, determinism."""

import io
import json

import pytest

from glattice.cli import (
    main,
    parse_generators,
    parse_graph_spec,
    parse_group_spec,
    parse_lattice_spec,
    parse_subgroup_spec,
)
from glattice.errors import SpecParseError


def run_cli(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


class TestSpecParsing:
    def test_group_specs(self):
        assert parse_group_spec("C:6").order == 6
        assert parse_group_spec("D:4").order == 8
        assert parse_group_spec("SD:3,2,2").order == 6
        assert parse_group_spec("S:4").order == 24
        assert parse_group_spec("X(C:2,C:3)").order == 6
        assert parse_group_spec("X(C:2,X(C:2,C:2))").order == 8

    def test_group_spec_errors_carry_position(self):
        with pytest.raises(SpecParseError) as err:
            parse_group_spec("Q:8")
        assert err.value.position == 0
        with pytest.raises(SpecParseError):
            parse_group_spec("C:3junk")

    def test_generator_tokens(self):
        G = parse_group_spec("SD:3,2,2")
        assert parse_generators(G, "s,t") == [
            G.generator_indices["s"], G.generator_indices["t"]
        ]
        assert parse_generators(G, "s2t") == [
            G.mul(G.power(G.generator_indices["s"], 2), G.generator_indices["t"])
        ]
        assert parse_generators(G, "e")[0] == G.identity
        assert parse_generators(G, "#4") == [4]
        assert len(parse_generators(G, "*")) == 5

    def test_cycle_tokens(self):
        G = parse_group_spec("S:4")
        (idx,) = parse_generators(G, "(1234)")
        assert G.point_action[idx] == (1, 2, 3, 0)
        (swap,) = parse_generators(G, "(12)")
        assert G.point_action[swap] == (1, 0, 2, 3)

    def test_graph_specs(self):
        X = parse_graph_spec("cayley(C:5;s)")
        assert (X.n_vertices, X.n_edges) == (5, 5)
        X = parse_graph_spec("complete(regular(C:3);loops=1)")
        assert X.n_edges == 9
        X = parse_graph_spec("cosets(SD:3,2,2;t)")
        assert X.n_vertices == 3

    def test_lattice_specs(self):
        G = parse_group_spec("SD:3,2,2")
        assert parse_lattice_spec(G, "regular").rank == 6
        assert parse_lattice_spec(G, "trivial").rank == 1
        assert parse_lattice_spec(G, "flows:cayley").rank == 7
        C2 = parse_group_spec("C:2")
        assert parse_lattice_spec(C2, "sign").rank == 1
        with pytest.raises(SpecParseError):
            parse_lattice_spec(G, "sign")

    def test_subgroup_specs(self):
        G = parse_group_spec("SD:3,2,2")
        assert parse_subgroup_spec(G, "sylow2").order == 2
        assert parse_subgroup_spec(G, "sylow3").order == 3
        assert parse_subgroup_spec(G, "whole").order == 6
        assert parse_subgroup_spec(G, "trivial").order == 1
        assert parse_subgroup_spec(G, "gen:s").order == 3


class TestExitCodes:
    def test_invalid_group_order_is_usage_error(self):
        code, _ = run_cli(["group", "info", "--group", "C:0"])
        assert code == 2

    def test_unknown_flag_rejected(self):
        code, _ = run_cli(["group", "info", "--group", "C:2", "--frobnicate"])
        assert code == 2

    def test_bad_spec_token(self):
        code, _ = run_cli(["flows", "--graph", "cayley(Q:8;s)"])
        assert code == 2

    def test_passing_check_exits_zero(self):
        code, _ = run_cli(["check", "cyclic-flows", "--n", "6", "--gens", "s1,s2"])
        assert code == 0

    def test_missing_check_params(self):
        code, _ = run_cli(["check", "kernel-generators"])
        assert code == 2


class TestCommands:
    def test_group_info_json(self):
        code, text = run_cli(["group", "info", "--group", "SD:3,2,2", "--output", "json"])
        assert code == 0
        info = json.loads(text)
        assert info["order"] == 6
        assert info["z_group"] is True
        assert info["sylow_orders"] == {"2": 2, "3": 3}

    def test_tate_prints_invariant_factors(self):
        code, text = run_cli([
            "tate", "--group", "SD:3,2,2", "--lattice", "trivial",
            "--subgroup", "sylow3", "--degree", "0", "--output", "json",
        ])
        assert code == 0
        assert json.loads(text)["invariant_factors"] == [3]

    def test_tate_duality_route(self):
        code, text = run_cli([
            "tate", "--group", "SD:3,2,2", "--lattice", "flows:cayley",
            "--subgroup", "sylow2", "--degree", "1",
        ])
        assert code == 0
        assert text.strip() == "0"

    def test_flows_disconnected(self):
        code, text = run_cli(["flows", "--graph", "cayley(C:4;s2)", "--output", "json"])
        assert code == 0
        payload = json.loads(text)
        assert payload["connected"] is False
        assert payload["components"] == [[0, 2], [1, 3]]

    def test_resolve(self):
        code, text = run_cli([
            "resolve", "--group", "C:2", "--lattice", "sign",
            "--kind", "coflasque", "--output", "json",
        ])
        assert code == 0
        payload = json.loads(text)
        assert payload["certified"] is True
        assert payload["ranks"]["middle"] == 2

    def test_certify_permutation(self):
        code, text = run_cli([
            "certify", "--group", "C:3", "--lattice", "regular",
            "--kind", "permutation", "--output", "json",
        ])
        assert code == 0
        assert json.loads(text)["witness_found"] is True

    def test_check_json_report(self):
        code, text = run_cli([
            "check", "bar-cocycle", "--group", "C:2", "--output", "json",
        ])
        assert code == 0
        report = json.loads(text)
        assert report["status"] == "pass"
        assert report["check_id"] == "bar-cocycle"

    def test_check_deterministic_modulo_elapsed(self):
        argv = ["check", "center-walks", "--group", "C:3", "--output", "json"]
        _, a = run_cli(argv)
        _, b = run_cli(argv)
        ja, jb = json.loads(a), json.loads(b)
        ja.pop("elapsed_ms"), jb.pop("elapsed_ms")
        assert ja == jb

    @pytest.mark.parametrize(
        "argv",
        [
            ["check", "rank-formula"],
            ["check", "cyclic-flows", "--n", "3", "--gens", "s"],
            ["check", "flow-coflasque", "--group", "C:4", "--gens", "s"],
            ["check", "kernel-generators", "--n", "3", "--m", "2", "--r", "2"],
            ["check", "faithful-transfer", "--n", "3", "--m", "2", "--r", "2"],
            ["check", "bar-cocycle", "--group", "C:2"],
            ["check", "center-walks", "--group", "C:2"],
            ["check", "sn-restrictions", "--n", "3"],
            ["check", "schanuel", "--group", "C:2", "--lattice", "trivial"],
        ],
        ids=lambda argv: argv[1],
    )
    def test_every_check_id_is_addressable(self, argv):
        code, text = run_cli(argv)
        assert code == 0
        assert json.loads(text)["status"] == "pass"
