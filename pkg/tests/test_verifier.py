from __future__ import annotations

import json
import tempfile
import threading
import unittest
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from relchar_lab.config import CharConfig, GridConfig, JobConfig, build_pair
from relchar_lab.exceptions import ConfigError, PreconditionError
from relchar_lab.verifier.main import (
    GridRunner,
    build_grid,
    cmd_sweep,
    cmd_verify_factors,
    cmd_verify_main,
    cmd_verify_opcalc,
    main,
    run_command,
    suite_gauss,
    suite_tate_twist,
)

THIRD = Fraction(1, 3)


def listed(*taus, N=(1,)) -> JobConfig:
    return replace(JobConfig(), grid=GridConfig(N=N, policy="list", taus=tuple(taus)))


class GridRunnerTest(unittest.TestCase):
    def test_results_follow_task_order(self) -> None:
        seen = []
        lock = threading.Lock()

        def task(i: int):
            def run() -> int:
                with lock:
                    seen.append(i)
                return i * i

            return run

        tasks = [task(i) for i in range(20)]
        self.assertEqual(GridRunner(4).run(tasks), [i * i for i in range(20)])
        self.assertEqual(sorted(seen), list(range(20)))
        self.assertEqual(GridRunner(1).run(tasks), GridRunner(3).run(tasks))

    def test_first_error_wins(self) -> None:
        def fail(msg: str):
            def run() -> None:
                raise PreconditionError(msg)

            return run

        tasks = [lambda: 1, fail("primeiro"), fail("segundo")]
        with self.assertRaisesRegex(PreconditionError, "primeiro"):
            GridRunner(3).run(tasks)


class GridTest(unittest.TestCase):
    def test_full_policy(self) -> None:
        cfg = JobConfig()
        _pi, _chi, pd = build_pair(cfg)
        packets = build_grid(cfg, pd, 1)
        self.assertEqual(len(packets), 27)
        center = Fraction(0)
        self.assertEqual([a.tau.x for a in packets[::9]], [2 * THIRD, center, THIRD])
        self.assertLessEqual(max(max(a.r, a.s) for a in packets), pd.r_max)

    def test_origin_and_list(self) -> None:
        _pi, _chi, pd = build_pair(JobConfig())
        origin = replace(JobConfig(), grid=GridConfig(policy="origin"))
        self.assertEqual(len(build_grid(origin, pd, 2)), 1)
        cfg = listed((Fraction(0), THIRD, Fraction(0)))
        self.assertEqual([a.tau.y for a in build_grid(cfg, pd, 1)], [THIRD])


class CommandTest(unittest.TestCase):
    def test_verify_main_small_grid(self) -> None:
        cfg = listed((Fraction(0), Fraction(0), Fraction(0)), (Fraction(0), THIRD, 2 * THIRD), N=(1, 2))
        report = cmd_verify_main(cfg)
        self.assertEqual(len(report.records), 5)
        self.assertTrue(report.passed)
        summary = report.records[-1].to_json()
        self.assertEqual(summary["kind"], "summary")
        self.assertTrue(summary["detail"]["ratio_constant"])

    def test_out_of_regime_points_are_skipped(self) -> None:
        cfg = listed((Fraction(0), Fraction(1, 9), Fraction(0)), (Fraction(0), Fraction(0), Fraction(0)), N=(2,))
        report = cmd_verify_main(cfg)
        self.assertEqual(len(report.records), 2)

    def test_sweep_skips_non_generic_characters(self) -> None:
        base = listed((Fraction(0), Fraction(0), Fraction(0)), N=(2,))
        cfg = replace(base, chi=CharConfig(m=2, exp=1), sweep_exps=(1, 2))
        report = cmd_sweep(cfg)
        self.assertEqual(len(report.records), 2)

    def test_empty_factor_set(self) -> None:
        report = cmd_verify_factors(replace(JobConfig(), factors_max_conductor=0))
        self.assertEqual(report.records, [])
        self.assertTrue(report.passed)

    def test_factor_suites_pass(self) -> None:
        report = cmd_verify_factors(replace(JobConfig(), factors_max_conductor=1))
        self.assertTrue(report.passed)
        suites = {r.suite for r in report.records[:-1]}
        self.assertTrue({"epsilon-unitarity", "gauss-magnitude", "gl1-fe", "twist-shift"} <= suites)

    def test_opcalc_checks_microlocalization_at_every_level(self) -> None:
        cfg = listed((Fraction(0), Fraction(0), THIRD), (Fraction(0), THIRD, Fraction(0)), N=(2,))
        records = [r for r in cmd_verify_opcalc(cfg).records if getattr(r, "suite", "") == "microlocal-sign"]
        self.assertEqual([(r.detail["r"], r.detail["sign"]) for r in records], [(0, 1), (1, -1)])
        self.assertTrue(all(r.passed for r in records))

    def test_default_factor_ranges(self) -> None:
        self.assertEqual(JobConfig().factors_max_conductor, 4)
        twist = suite_tate_twist(3, JobConfig().factors_max_conductor)
        self.assertEqual({r.params["c"] for r in twist}, {2, 4})
        self.assertTrue(all(r.passed for r in twist))
        gauss = suite_gauss(3, 3)
        self.assertIn(3, {r.params["c"] for r in gauss})
        self.assertTrue(all(r.passed for r in gauss))

    def test_unknown_command(self) -> None:
        with self.assertRaises(ConfigError):
            run_command("verify-everything", JobConfig())


class ExitCodeTest(unittest.TestCase):
    def test_codes(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            out = str(Path(tmp) / "factors.ndjson")
            self.assertEqual(main(["verify-factors", "--p", "2", "--out", out]), 2)
            job = Path(tmp) / "job.json"
            job.write_text(json.dumps({"factors_max_conductor": 1}), encoding="utf-8")
            self.assertEqual(main(["verify-factors", "--config", str(job), "--out", out]), 0)
            self.assertTrue(Path(out).with_suffix(".csv").is_file())

    def test_main_job_and_bad_scale(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            job = Path(tmp) / "job.json"
            job.write_text(json.dumps({"grid": {"N": [2], "policy": "origin"}, "tol": 1e-8}), encoding="utf-8")
            out = str(Path(tmp) / "main.ndjson")
            self.assertEqual(main(["verify-main", "--config", str(job), "--out", out]), 0)
            self.assertEqual(main(["verify-main", "--config", str(job), "--N", "0", "--out", out]), 2)


if __name__ == "__main__":
    unittest.main()
