from __future__ import annotations

import json
import os
import tempfile
import unittest
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from unittest import mock

from relchar_lab.config import (
    CharConfig,
    GridConfig,
    JobConfig,
    RepConfig,
    apply_overrides,
    build_pair,
    build_rep,
    load_config,
    parse_config,
    validate_basic,
)
from relchar_lab.exceptions import ConfigError, NonGenericPairError
from relchar_lab.local_factors import PrincipalSeries, Supercuspidal


class ParseTest(unittest.TestCase):
    def test_full_document(self) -> None:
        cfg = parse_config(
            {
                "p": 5,
                "case": "sc",
                "rep": {"ext": "ramified", "xi_conductor": 2},
                "chi": {"m": 2, "exp": 3},
                "grid": {"N": [1, 2], "policy": "list", "taus": [[0, "1/5", 0]]},
                "tol": 1e-6,
                "workers": 3,
            }
        )
        self.assertEqual(cfg.p, 5)
        self.assertEqual(cfg.case, "sc")
        self.assertEqual(cfg.rep.xi_conductor, 2)
        self.assertEqual(cfg.chi, CharConfig(2, 3))
        self.assertEqual(cfg.grid.N, (1, 2))
        self.assertEqual(cfg.grid.taus, ((Fraction(0), Fraction(1, 5), Fraction(0)),))
        self.assertEqual(cfg.workers, 3)

    def test_defaults(self) -> None:
        cfg = parse_config({})
        self.assertEqual(cfg, JobConfig())
        self.assertIsNone(load_config(None).out)

    def test_bad_values(self) -> None:
        for raw in ({"p": "x"}, {"grid": {"N": "1"}}, {"grid": {"taus": [[0, 1]]}}, {"rep": []}, []):
            with self.subTest(raw=raw):
                with self.assertRaises(ConfigError):
                    parse_config(raw)  # type: ignore[arg-type]

    def test_files(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "job.json"
            path.write_text(json.dumps({"p": 7}), encoding="utf-8")
            self.assertEqual(load_config(str(path)).p, 7)
            path.write_text("{p: 7", encoding="utf-8")
            with self.assertRaises(ConfigError):
                load_config(str(path))
            with self.assertRaises(ConfigError):
                load_config(str(Path(tmp) / "missing.json"))


class OverrideTest(unittest.TestCase):
    def test_flags(self) -> None:
        with mock.patch.dict(os.environ, {}, clear=True):
            cfg = apply_overrides(JobConfig(), p=5, N=3, case="sc", tol=1e-4, out="x.ndjson")
        self.assertEqual((cfg.p, cfg.grid.N, cfg.case, cfg.tol, cfg.out), (5, (3,), "sc", 1e-4, "x.ndjson"))

    def test_workers_from_environment(self) -> None:
        with mock.patch.dict(os.environ, {"RELCHAR_WORKERS": "4"}):
            self.assertEqual(apply_overrides(JobConfig()).workers, 4)
        with mock.patch.dict(os.environ, {"RELCHAR_WORKERS": "muitos"}):
            with self.assertRaises(ConfigError):
                apply_overrides(JobConfig())


class ValidationTest(unittest.TestCase):
    def test_structural_errors(self) -> None:
        bad = [
            replace(JobConfig(), p=2),
            replace(JobConfig(), p=9),
            replace(JobConfig(), rep=RepConfig(kind="gl3")),
            replace(JobConfig(), grid=GridConfig(policy="list")),
            replace(JobConfig(), grid=GridConfig(N=(0,))),
            replace(JobConfig(), tol=0.0),
            replace(JobConfig(), workers=0),
        ]
        for cfg in bad:
            with self.subTest(cfg=cfg):
                with self.assertRaises(ConfigError):
                    validate_basic(cfg)

    def test_even_prime_message(self) -> None:
        with self.assertRaisesRegex(ConfigError, "p = 2"):
            validate_basic(replace(JobConfig(), p=2))

    def test_default_pair(self) -> None:
        pi, chi, pd = build_pair(JobConfig())
        self.assertIsInstance(pi, PrincipalSeries)
        self.assertEqual(pd.c_pair, 4)
        self.assertEqual(chi.exps, (1,))

    def test_scale_below_character_conductor(self) -> None:
        cfg = replace(JobConfig(), chi=CharConfig(m=3, exp=1), grid=GridConfig(N=(1,)))
        with self.assertRaisesRegex(ConfigError, "N ≥ c\\(χ\\)/2"):
            build_pair(cfg)

    def test_non_generic_pair_keeps_cause(self) -> None:
        cfg = replace(JobConfig(), rep=RepConfig(chi0_m=1, chi0_exp=1))
        with self.assertRaises(ConfigError) as ctx:
            build_pair(cfg)
        self.assertIsInstance(ctx.exception.__cause__, NonGenericPairError)

    def test_supercuspidal_data(self) -> None:
        pi = build_rep(replace(JobConfig(), rep=RepConfig(kind="sc", xi_conductor=2)))
        self.assertIsInstance(pi, Supercuspidal)
        galois_invariant = RepConfig(kind="sc", xi_conductor=1, xi_exps=(0,))
        with self.assertRaises(ConfigError):
            build_rep(replace(JobConfig(), rep=galois_invariant))
        with self.assertRaises(ConfigError):
            build_rep(replace(JobConfig(), rep=RepConfig(kind="sc", u=1)))


if __name__ == "__main__":
    unittest.main()
