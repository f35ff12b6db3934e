import json

import pytest
from hypothesis import given

from cold.cli import main
from cold.fixtures import FIXTURES, GRAPHS, expected_table_dump
from cold.graph import MixedGraph, arc, line
from cold.io import GraphFormatError, dumps_json, dumps_text, format_edges, load, parse_json, parse_text
from conftest import uccgs


class TestParsing:
    def test_labels_remapped_numerically(self):
        lg = parse_text("v10 -- v2\nv2 -> v3\n")
        assert lg.labels == ["v2", "v3", "v10"]
        assert lg.graph.edges == {line(0, 2), arc(0, 1)}
        assert lg.lookup("3") == 1 and lg.lookup("v10") == 2

    def test_reverse_arrow_comments_and_isolated(self):
        lg = parse_text("# header\n1 <- 2   # trailing\n\n5\n")
        assert lg.graph.edges == {arc(1, 0)}
        assert lg.graph.vertices == {0, 1, 2}
        assert lg.label(2) == "5"

    @pytest.mark.parametrize(
        "text",
        ["a -- b\n", "v1 -- v1\n", "v1 -- v2\nv2 -> v1\n", "v1 v2 v3\n", "v1 -- v2\n1 -- v3\n", "v1 => v2\n"],
    )
    def test_errors(self, text):
        with pytest.raises(GraphFormatError):
            parse_text(text)

    def test_error_names_line(self):
        with pytest.raises(GraphFormatError, match="g.txt:2"):
            parse_text("v1 -- v2\nv2 -- v2\n", "g.txt")

    def test_unknown_lookup(self, chain):
        with pytest.raises(KeyError):
            chain.lookup("v9")

    @given(uccgs(1, 10))
    def test_text_round_trip(self, g):
        assert parse_text(dumps_text(g, header="x")).graph == g

    def test_json_round_trip(self):
        g = MixedGraph(4, [arc(0, 1), line(1, 2)])
        lg = parse_json(dumps_json(g, {"seed": 3}, ["a", "b", "c", "d"]))
        assert lg.graph == g and lg.metadata == {"seed": 3} and lg.labels == ["a", "b", "c", "d"]

    @pytest.mark.parametrize("doc", ["{", '{"edges": []}', '{"n": 2, "edges": [[0, 5, true]]}', '{"n": 2, "edges": [], "labels": ["a"]}'])
    def test_json_errors(self, doc):
        with pytest.raises(GraphFormatError):
            parse_json(doc)

    def test_load(self, tmp_path):
        (tmp_path / "g.json").write_text(dumps_json(MixedGraph.undirected(2, [(0, 1)])))
        assert load(tmp_path / "g.json").graph.edges == {line(0, 1)}
        with pytest.raises(GraphFormatError):
            load(tmp_path / "missing.txt")

    def test_format_edges_sorted(self):
        assert format_edges([arc(2, 0), line(0, 1)]) == "0 -- 1\n2 -> 0\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCli:
    def test_fixtures(self, capsys):
        code, out, _ = run(capsys, "fixtures")
        assert code == 0
        assert out.splitlines() == [f"PASS {f.name}" for f in FIXTURES]

    def test_fixtures_write(self, capsys, tmp_path):
        code, out, _ = run(capsys, "fixtures", "--write", str(tmp_path))
        assert code == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == sorted(GRAPHS)

    def test_close(self, capsys, graph_files):
        code, out, _ = run(capsys, "close", str(graph_files["chain.txt"]), "--rules", "1")
        assert code == 0 and out == "v1 -> v2\nv2 -> v3\nv3 -> v4\n"
        code, out, _ = run(capsys, "close", str(graph_files["chain.txt"]), "--rules", "1", "--forbidden", "v2--v3")
        assert out == "v1 -> v2\nv2 -- v3\nv3 -- v4\n"
        code2, out2, _ = run(capsys, "close", str(graph_files["chain.txt"]), "--rules", "1", "--naive")
        assert out2 == "v1 -> v2\nv2 -> v3\nv3 -> v4\n"

    def test_intervene_both_routes(self, capsys, graph_files):
        f = str(graph_files["five.txt"])
        _, a, _ = run(capsys, "intervene", f, "--node", "v3", "--ingoing", "v4")
        _, b, _ = run(capsys, "intervene", f, "--node", "v3", "--ingoing", "v4", "--conventional")
        assert a == b
        assert set(a.splitlines()) == {"v3 -> v2", "v4 -> v1", "v2 -> v1", "v1 -> v5", "v4 -> v3", "v4 -> v2"}

    def test_table(self, capsys, graph_files):
        code, out, _ = run(capsys, "table", str(graph_files["five.txt"]))
        assert code == 0 and out == expected_table_dump()

    def test_mecsize(self, capsys, graph_files):
        for flags in ([], ["--no-closed-forms"], ["--conventional-root"], ["--brute-force"]):
            code, out, _ = run(capsys, "mecsize", str(graph_files["five.txt"]), *flags)
            assert code == 0 and out.splitlines()[0] == "size: 12"
        _, out, _ = run(capsys, "mecsize", str(graph_files["k4.txt"]))
        assert "size: 24" in out and "memo_hits:" in out

    def test_design(self, capsys, graph_files):
        outs = []
        for obj in ("minmax", "minmaxpt", "lb"):
            code, out, _ = run(capsys, "design", str(graph_files["five.txt"]), "--objective", obj)
            assert code == 0
            label, score = out.split()
            assert label.startswith("v") and int(score) > 0
            outs.append(out)
        assert outs[0] == outs[1]

    def test_essential(self, capsys, tmp_path):
        f = tmp_path / "m.txt"
        f.write_text("v0 -> v2\nv1 -> v2\nv2 -- v3\n")
        _, a, _ = run(capsys, "essential", str(f))
        _, b, _ = run(capsys, "essential", str(f), "--conventional")
        assert a == b == "v0 -> v2\nv1 -> v2\nv2 -> v3\n"

    def test_check(self, capsys, tmp_path):
        good = tmp_path / "good.txt"
        good.write_text("v1 -> v2\nv2 -- v3\n")
        code, out, _ = run(capsys, "check", str(good))
        assert code == 0 and out == "consistent\nwitness:\nv1 -> v2\nv2 -> v3\n"
        bad = tmp_path / "bad.txt"
        bad.write_text("v1 -> v2\nv3 -> v2\n")
        code, out, _ = run(capsys, "check", str(bad))
        assert code == 2 and out.startswith("inconsistent\npair: ")
        cyc = tmp_path / "cyc.txt"
        cyc.write_text("v1 -> v2\nv2 -> v3\nv3 -> v1\n")
        code, out, _ = run(capsys, "check", str(cyc))
        assert code == 2 and "cycle: " in out
        square = tmp_path / "sq.txt"
        square.write_text("v1 -- v2\nv2 -- v3\nv3 -- v4\nv4 -- v1\n")
        assert run(capsys, "check", str(square))[0] == 1

    def test_active_sim(self, capsys):
        code, out, _ = run(capsys, "active-sim", "--n", "6", "--runs", "3", "--policy", "minmax", "--policy", "RandomNaive")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "seed,policy,steps,oriented_per_step"
        assert len(lines) == 7
        assert {ln.split(",")[1] for ln in lines[1:]} == {"MinMax", "RandomNaive"}
        assert run(capsys, "active-sim", "--n", "6", "--runs", "3", "--policy", "minmax", "--policy", "RandomNaive")[1] == out

    def test_active_sim_on_file(self, capsys, graph_files):
        code, out, _ = run(capsys, "active-sim", str(graph_files["five.txt"]), "--runs", "2")
        assert code == 0 and len(out.splitlines()) == 3

    def test_gen_formats(self, capsys, tmp_path):
        code, out, _ = run(capsys, "gen", "--n", "8", "--m", "12", "--seed", "2")
        assert code == 0 and out.startswith("# generator=chordal")
        assert parse_text(out).graph.num_edges == 12
        f = tmp_path / "g.json"
        run(capsys, "gen", "--n", "8", "--m", "10", "--kind", "mpdag", "--format", "json", "-o", str(f))
        doc = json.loads(f.read_text())
        assert doc["metadata"]["generator"] == "mpdag" and len(doc["edges"]) == 10
        code, out, _ = run(capsys, "gen", "--n", "6", "--m", "7", "--kind", "dag")
        assert code == 0 and parse_text(out).graph.is_fully_directed()

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["nope"],
            ["close"],
            ["design", "GRAPH", "--objective", "max"],
            ["intervene", "GRAPH", "--node", "v9"],
            ["intervene", "GRAPH", "--node", "v2", "--ingoing", "v1,v3"],
            ["close", "GRAPH", "--rules", "7"],
            ["close", "GRAPH", "--forbidden", "v1v2"],
            ["active-sim", "--policy", "Greedy"],
            ["active-sim", "--runs", "0"],
            ["mecsize", "missing.txt"],
            ["gen", "--n", "3", "--m", "9"],
        ],
    )
    def test_usage_errors_exit_1(self, capsys, graph_files, argv):
        argv = [str(graph_files["five.txt"]) if a == "GRAPH" else a for a in argv]
        code, _, err = run(capsys, *argv)
        assert code == 1 and err

    def test_directed_input_rejected_where_undirected_needed(self, capsys, graph_files):
        code, _, err = run(capsys, "mecsize", str(graph_files["chain.txt"]))
        assert code == 1 and "undirected" in err
