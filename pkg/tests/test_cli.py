"""Command-line surface: exit codes, row formats, round-trips, determinism
and the figure artifacts."""

import json
import math
from pathlib import Path

import pytest

from doublezeta.cli import main
from doublezeta.report import parse_mean_square_csv


def write_cfg(tmp_path: Path, name: str, obj: dict) -> str:
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return str(p)


def run(argv) -> int:
    return main(argv)


class TestEval:
    def test_direct_row(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json",
                        {"target": "av2-direct", "s1": 2, "s2": 2, "s3": 2,
                         "eps": 1e-10})
        assert run(["eval", "--config", cfg]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "value_re,value_im,error_bound,rigor,route,elapsed_ms"
        cells = out[1].split(",")
        assert float(cells[2]) <= 1e-10
        assert cells[3] == "rigorous"
        assert cells[4] == "av2-direct"

    def test_second_formula_precondition_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json",
                        {"target": "av2-second", "s1": 2, "s2": 2, "s3": [2, 1]})
        assert run(["eval", "--config", cfg]) == 2
        assert "t3 >= 2" in capsys.readouterr().err

    def test_zeta_pole_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", {"target": "zeta", "s": 1})
        assert run(["eval", "--config", cfg]) == 2
        assert "pole" in capsys.readouterr().err

    def test_unknown_target_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", {"target": "nonsense"})
        assert run(["eval", "--config", cfg]) == 2

    def test_json_format_roundtrips(self, tmp_path):
        cfg = write_cfg(tmp_path, "c.json",
                        {"target": "mt2-direct", "s1": 2, "s2": 2, "s3": 2,
                         "eps": 1e-9})
        out = tmp_path / "row.json"
        assert run(["eval", "--config", cfg, "--format", "json",
                    "--out", str(out)]) == 0
        row = json.loads(out.read_text())[0]
        assert row["rigor"] == "rigorous"
        assert row["value_im"] == 0.0

    def test_sq_and_first_targets(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "sq.json",
                        {"target": "av2-sq", "s1": 2, "s2": 2, "sigma3": 4,
                         "eps": 1e-10})
        assert run(["eval", "--config", cfg]) == 0
        capsys.readouterr()
        cfg = write_cfg(tmp_path, "first.json",
                        {"target": "av2-first", "s1": 2, "s2": 2, "s3": [2, 2],
                         "x": 10, "y": 10, "C": 4 * math.pi / 3})
        assert run(["eval", "--config", cfg]) == 0


class TestRegime:
    def test_prints_theorem_and_margins(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "r.json",
                        {"target": "AV", "s1": 0.3, "s2": 0.8, "sigma3": 0.6})
        assert run(["regime", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "theorem: T1_3_b" in out
        assert "error_exponent: 0.79999999" in out
        assert "margins" in out

    def test_none_row(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "r.json",
                        {"target": "AV", "s1": 0.1, "s2": 0.1, "sigma3": 0.1})
        assert run(["regime", "--config", cfg]) == 0
        assert "theorem: none" in capsys.readouterr().out

    def test_absolute_region_anchor(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "r.json",
                        {"target": "AV", "s1": 2, "s2": 2, "sigma3": 2})
        assert run(["regime", "--config", cfg]) == 0
        assert "theorem: T1_1" in capsys.readouterr().out


class TestRelationCheck:
    def test_pass_rows(self, tmp_path):
        cfg = write_cfg(tmp_path, "rel.json",
                        {"points": [{"s1": 2, "s2": 2, "s3": 2},
                                    {"s1": 3, "s2": 3, "s3": 3}],
                         "route": "direct", "eps": 1e-10})
        out = tmp_path / "rel.csv"
        assert run(["relation-check", "--config", cfg, "--out", str(out),
                    "--no-plot"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("s1_re,")
        for ln in lines[1:]:
            cells = ln.split(",")
            assert cells[-1] == "1"                # pass column
            assert float(cells[-3]) <= 1e-8        # residual_abs

    def test_figure_rendered(self, tmp_path):
        cfg = write_cfg(tmp_path, "rel.json",
                        {"points": [{"s1": 2, "s2": 2, "s3": 2}], "eps": 1e-9})
        out = tmp_path / "rel.csv"
        assert run(["relation-check", "--config", cfg, "--out", str(out)]) == 0
        assert (tmp_path / "rel.png").exists()


class TestMvTest:
    def test_single_term_row_is_exact(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "mv.json",
                        {"T": 100, "polys": [[[1, 1, 0]]]})
        assert run(["mv-test", "--config", cfg]) == 0
        out = capsys.readouterr().out.splitlines()
        cells = out[1].split(",")
        assert cells[2] == "98"         # lhs exactly T - 2
        assert cells[-1] == "1"

    def test_empty_poly_zero_row(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "mv.json", {"T": 100, "polys": [[]]})
        assert run(["mv-test", "--config", cfg]) == 0
        out = capsys.readouterr().out.splitlines()
        cells = out[1].split(",")
        assert cells[2] == "0" and cells[3] == "0" and cells[-1] == "1"

    def test_random_block(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "mv.json",
                        {"T": 60, "random": {"count": 8, "n_max": 16, "seed": 3}})
        assert run(["mv-test", "--config", cfg]) == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 9
        assert all(ln.split(",")[-1] == "1" for ln in out[1:])


class TestMeanSquareCommand:
    CFG = {"target": "AV", "s1": 2, "s2": 2, "sigma3": 2,
           "T_samples": [10, 20], "evaluator": "direct", "eps": 1e-8}

    def test_outputs_and_sidecar(self, tmp_path):
        cfg = write_cfg(tmp_path, "ms.json", self.CFG)
        out = tmp_path / "ms.csv"
        assert run(["mean-square", "--config", cfg, "--out", str(out)]) == 0
        text = out.read_text(encoding="utf-8")
        rows = parse_mean_square_csv(text)
        assert text.splitlines()[0] == "T,I,I_over_T,zeta_sq_ref,residual"
        assert [r["T"] for r in rows] == [10.0, 20.0]
        for r in rows:
            assert r["I_over_T"] == pytest.approx(r["I"] / r["T"])
            assert r["residual"] == pytest.approx(r["I"] - r["zeta_sq_ref"] * r["T"])
        meta = json.loads((tmp_path / "ms.csv.meta.json").read_text())
        assert meta["regime"]["theorem"] == "T1_1"
        assert meta["manifest"]["T_samples"] == [10.0, 20.0]
        assert (tmp_path / "ms.png").exists()

    def test_requires_out(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "ms.json", self.CFG)
        assert run(["mean-square", "--config", cfg]) == 2

    def test_degenerate_range_single_zero_row(self, tmp_path):
        cfg = write_cfg(tmp_path, "ms.json",
                        {"target": "AV", "s1": 2, "s2": 2, "sigma3": 2,
                         "T_samples": [2]})
        out = tmp_path / "z.csv"
        assert run(["mean-square", "--config", cfg, "--out", str(out),
                    "--no-plot"]) == 0
        rows = parse_mean_square_csv(out.read_text())
        assert len(rows) == 1 and rows[0]["I"] == 0.0

    def test_reruns_byte_identical_across_threads(self, tmp_path):
        cfg = write_cfg(tmp_path, "ms.json", self.CFG)
        outs = []
        for name, threads in (("a.csv", "1"), ("b.csv", "4"), ("c.csv", "2")):
            out = tmp_path / name
            assert run(["mean-square", "--config", cfg, "--out", str(out),
                        "--threads", threads, "--no-plot"]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_sidecar_roundtrip(self, tmp_path):
        cfg = write_cfg(tmp_path, "ms.json", self.CFG)
        out = tmp_path / "ms.csv"
        assert run(["mean-square", "--config", cfg, "--out", str(out),
                    "--no-plot"]) == 0
        meta_path = tmp_path / "ms.csv.meta.json"
        parsed = json.loads(meta_path.read_text())
        # re-serialize: byte-identical (sorted keys, fixed float rendering)
        from doublezeta.report import render_json
        assert render_json(parsed) == meta_path.read_text()

    def test_path_failure_exit_2(self, tmp_path, capsys):
        bad = dict(self.CFG)
        bad.update({"s1": 0.2, "s2": 0.2, "sigma3": 0.2})
        cfg = write_cfg(tmp_path, "ms.json", bad)
        assert run(["mean-square", "--config", cfg, "--out",
                    str(tmp_path / "x.csv")]) == 2
        assert "sigma" in capsys.readouterr().err


class TestConfigErrors:
    def test_missing_config(self, capsys):
        assert run(["eval"]) == 2
        assert "--config" in capsys.readouterr().err

    def test_missing_key(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json", {"target": "av2-direct", "s1": 2})
        assert run(["eval", "--config", cfg]) == 2
        assert "s2" in capsys.readouterr().err

    def test_bad_complex(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "c.json",
                        {"target": "av2-direct", "s1": "two", "s2": 2, "s3": 2})
        assert run(["eval", "--config", cfg]) == 2

    def test_constants_override(self, tmp_path, capsys):
        consts = tmp_path / "k.json"
        consts.write_text(json.dumps({"hyperplane_standoff": 5.0}))
        cfg = write_cfg(tmp_path, "c.json",
                        {"target": "av2-second", "s1": 1.2, "s2": 1.3,
                         "s3": [1.1, 2]})
        assert run(["eval", "--config", cfg, "--constants", str(consts)]) == 2
        assert "hyperplane" in capsys.readouterr().err

    def test_unknown_constants_key(self, tmp_path, capsys):
        consts = tmp_path / "k.json"
        consts.write_text(json.dumps({"bogus": 1.0}))
        cfg = write_cfg(tmp_path, "c.json",
                        {"target": "av2-direct", "s1": 2, "s2": 2, "s3": 2})
        assert run(["eval", "--config", cfg, "--constants", str(consts)]) == 2
