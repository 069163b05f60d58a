"""Acceptance gate: every criterion at its pre-registered tolerance.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them
as they complete).  Tolerances and grids are fixed here, not tuned at run
time; the heuristic constants they rely on are the frozen ones in
``doublezeta.constants``.
"""

import json
import math
import time

import numpy as np

from doublezeta.cli import main as cli_main
from doublezeta.constants import DEFAULT_CONSTANTS
from doublezeta.continuation import av2_approx_second, functional_relation_residual
from doublezeta.kernel import QuadratureSpec, mellin_barnes_binomial, recip_pow
from doublezeta.meansquare import (DirichletPoly, MeanSquarePlan, mean_square,
                                   mv_check)
from doublezeta.series import DiagonalSeries, ZetaArgs, av2_direct, mt2_direct

from oracles import av2_brute, mt2_brute


def report(num: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {num:2d}: {name}" + (f"  ({detail})" if detail else ""))
    assert ok, f"criterion {num} failed: {name} {detail}"


# ---------------------------------------------------------------------------

class TestAcceptance:
    def test_criterion_01_oracle_equivalence(self):
        cases = [
            ("av2", ZetaArgs(2, 2, 2), 1e-10, 20000),
            ("av2", ZetaArgs(1.5, 1.5, 1.5), 4e-10, 65000),
            ("mt2", ZetaArgs(2, 2, 2), 1e-10, 2500),
            ("mt2", ZetaArgs(1.5, 1.5, 1.5), 3e-10, 75000),
        ]
        worst_diff, worst_time = 0.0, 0.0
        for kind, args, eps, M_brute in cases:
            t0 = time.perf_counter()
            if kind == "av2":
                val = av2_direct(args, eps).value
                brute = av2_brute(args.s1, args.s2, args.s3, M_brute)
            else:
                val = mt2_direct(args, eps).value
                brute = mt2_brute(args.s1, args.s2, args.s3, M_brute)
            dt = time.perf_counter() - t0
            worst_diff = max(worst_diff, abs(val - brute))
            worst_time = max(worst_time, dt)
        report(1, "direct series match naive brute force to 1e-9",
               worst_diff <= 1e-9 and worst_time < 5.0,
               f"max |diff| = {worst_diff:.2e}, slowest case {worst_time:.2f}s")

    def test_criterion_02_functional_relation(self):
        points = [
            (2, 2, 2), (3, 3, 3), (1.5, 1.5, 1.5),
            (1.1, 1.9, 1.9), (1.9 + 1j, 1.1, 1.9),
            (2 + 3j, 2 + 1j, 2), (1.5 + 10j, 1.5, 1.5 + 5j),
            (1.3 + 2j, 1.7 + 7j, 1.7), (2.5 + 4j, 1.4 + 6j, 1.6 + 10j),
            (1.2 + 5j, 1.8 + 3j, 1.8 + 2j),
        ]
        t0 = time.perf_counter()
        worst = 0.0
        for s in points:
            args = ZetaArgs(*[complex(v) for v in s])
            r = functional_relation_residual(args, 2e-9)
            worst = max(worst, abs(r.residual))
        dt = time.perf_counter() - t0
        report(2, "three-term relation residual <= 1e-8 at 10 points",
               worst <= 1e-8 and dt < 30.0,
               f"max |residual| = {worst:.2e}, total {dt:.1f}s")

    def test_criterion_03_overlap_consistency(self):
        K = DEFAULT_CONSTANTS.overlap_k_av_second
        rng = np.random.default_rng(424242)   # held out from the training sweep
        t0 = time.perf_counter()
        worst_ratio = 0.0
        for _ in range(10):
            sg1, sg3 = rng.uniform(1.05, 1.5, size=2)
            sg2 = rng.uniform(1.15, 1.5)
            t3 = rng.uniform(2.0, 50.0)
            args = ZetaArgs(sg1, sg2, complex(sg3, t3))
            power = t3 ** (1.5 - (sg1 + sg2 + sg3))
            approx = av2_approx_second(args)
            direct = av2_direct(args, max(power / 10.0, 1e-9))
            worst_ratio = max(worst_ratio, abs(approx.value - direct.value) / power)
        dt = time.perf_counter() - t0
        report(3, f"second formula within frozen K = {K:g} of direct on held-out grid",
               worst_ratio <= K and dt < 120.0,
               f"max ratio = {worst_ratio:.3f}, total {dt:.1f}s")

    CRIT4_PLAN = MeanSquarePlan(target="AV", s1=2, s2=2, sigma3=2,
                                T_samples=(50.0, 100.0, 200.0, 400.0),
                                evaluator="direct", eps=1e-8)

    def test_criterion_04_absolute_region_mean_square(self):
        t0 = time.perf_counter()
        rep = mean_square(self.CRIT4_PLAN)
        dt = time.perf_counter() - t0
        coeff_ok = abs(rep.coefficient_estimates[-1] / rep.zeta_sq_ref - 1.0) <= 0.05
        r100 = abs(rep.residuals[1])
        r_late = max(abs(rep.residuals[2]), abs(rep.residuals[3]))
        flat_ok = r_late <= 2.0 * r100
        report(4, "leading coefficient within 5% and residuals flat (bounded-error regime)",
               coeff_ok and flat_ok and dt < 600.0,
               f"I/T vs ref: {(rep.coefficient_estimates[-1]/rep.zeta_sq_ref-1)*100:+.2f}%, "
               f"|R| 100->400 factor {r_late/r100:.2f}, {dt:.1f}s")

    def test_criterion_05_half_window_regime(self):
        t0 = time.perf_counter()
        plan = MeanSquarePlan(target="AV", s1=0.5, s2=1.6, sigma3=0.4,
                              T_samples=(50.0, 100.0, 200.0, 400.0),
                              evaluator="second_approx", eps=1e-8)
        rep = mean_square(plan)
        dt = time.perf_counter() - t0
        assert rep.regime.theorem == "T1_2_b"
        ok = rep.fitted_exponent <= 0.5 + 0.2
        report(5, "fitted residual exponent <= 0.7 in the T^(1/2) regime",
               ok and dt < 1800.0,
               f"fitted = {rep.fitted_exponent:.3f} (predicted 0.5), {dt:.1f}s")
        self.__class__.crit5_elapsed = dt

    def test_criterion_06_mt_domain_regime(self):
        t0 = time.perf_counter()
        plan = MeanSquarePlan(target="MT", s1=0.55, s2=0.55, sigma3=0.45,
                              T_samples=(50.0, 100.0, 200.0, 400.0),
                              evaluator="second_approx", eps=1e-8)
        rep = mean_square(plan)
        dt = time.perf_counter() - t0
        assert rep.regime.theorem == "T1_4_a"
        ok = rep.fitted_exponent <= 0.95 + 0.2
        report(6, "fitted residual exponent <= 1.15 in the T^0.95 regime",
               ok and dt < 1800.0,
               f"fitted = {rep.fitted_exponent:.3f} (predicted 0.95), {dt:.1f}s")

    def test_criterion_07_dirichlet_mean_value(self):
        t0 = time.perf_counter()
        quad = QuadratureSpec()
        kappa = DEFAULT_CONSTANTS.mv_kappa
        lhs, main, budget = mv_check(DirichletPoly(((1, 1.0 + 0j),)), 100.0, quad)
        exact_ok = (lhs == 98.0) and abs(lhs - main) <= kappa * budget
        rng = np.random.default_rng(99173)
        worst = 0.0
        for _ in range(50):
            k = int(rng.integers(1, 33))
            ns = np.sort(rng.choice(np.arange(1, 33), size=k, replace=False))
            amps = rng.uniform(-1, 1, size=(k, 2)) / math.sqrt(2.0)
            poly = DirichletPoly(tuple(
                (int(n), complex(a, b)) for n, (a, b) in zip(ns, amps)))
            T = float(rng.uniform(10.0, 300.0))
            lhs, main, budget = mv_check(poly, T, quad)
            worst = max(worst, abs(lhs - main) / budget)
        dt = time.perf_counter() - t0
        report(7, f"50 random polynomials within frozen kappa = {kappa:g}",
               exact_ok and worst <= kappa and dt < 60.0,
               f"worst ratio = {worst:.3f}, total {dt:.1f}s")

    def test_criterion_08_contour_identity(self):
        t0 = time.perf_counter()
        quad = QuadratureSpec(abs_tol=1e-9)
        worst = 0.0
        for s in (1 + 0j, 2 + 0j, 1 + 1j):
            for lam in (0.5, 1.0, 2.0):
                for c in (-0.25, -0.5):
                    v = mellin_barnes_binomial(s, lam, c, quad)
                    exact = (1.0 + lam) ** -s if s.imag == 0 else \
                        recip_pow(1.0 + lam, s)
                    worst = max(worst, abs(v - exact))
        dt = time.perf_counter() - t0
        report(8, "contour identity on the 18-point grid at 1e-8",
               worst <= 1e-8 and dt < 30.0,
               f"max error = {worst:.2e}, total {dt:.1f}s")

    def test_criterion_09_determinism(self, tmp_path):
        cfg = tmp_path / "c4.json"
        cfg.write_text(json.dumps({
            "target": "AV", "s1": 2, "s2": 2, "sigma3": 2,
            "T_samples": [50, 100, 200, 400], "evaluator": "direct",
            "eps": 1e-8}))
        outputs = []
        for name, threads in (("r1.csv", "1"), ("r2.csv", "4"), ("r3.csv", "2")):
            out = tmp_path / name
            code = cli_main(["mean-square", "--config", str(cfg), "--out",
                             str(out), "--threads", threads, "--no-plot"])
            assert code == 0
            outputs.append(out.read_bytes())
        ok = outputs[0] == outputs[1] == outputs[2]
        report(9, "identical config gives byte-identical CSV for any --threads",
               ok, f"{len(outputs[0])} bytes compared")

    def test_criterion_10_performance(self):
        args = ZetaArgs(0.5, 1.6, complex(0.4, 400.0))
        times = []
        for _ in range(7):
            t0 = time.perf_counter()
            av2_approx_second(args, threads=1)
            times.append(time.perf_counter() - t0)
        single_ms = sorted(times)[len(times) // 2] * 1e3
        n_terms_single = 400 * 399 // 2

        # sweep throughput: the half-window ladder evaluated on its own
        # quadrature grid; nominal terms = sum over nodes of the pair count
        spacing = math.pi / (4.0 * (1.0 + math.log(800.0)))
        nodes = np.arange(2.0, 400.0, spacing)
        ds = DiagonalSeries("av", 0.5, 1.6)
        t0 = time.perf_counter()
        total_terms = 0
        for t3 in nodes:
            M = int(t3)
            ds.value(complex(0.4, t3), M=max(M, 2))
            total_terms += M * (M - 1) // 2
        sweep_dt = time.perf_counter() - t0
        rate = total_terms / sweep_dt
        ok = single_ms < 5.0 and rate >= 1e7
        report(10, "single 80k-term evaluation < 5 ms; sweep >= 1e7 terms/s/core",
               ok, f"single = {single_ms:.2f} ms ({n_terms_single} terms), "
                   f"sweep = {rate:.2e} terms/s over {total_terms:.2e} terms")
