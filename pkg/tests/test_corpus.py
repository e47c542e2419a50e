from __future__ import annotations

import json
import tempfile
import unittest
from pathlib import Path

from relchar_lab.corpus import compare, corpus_run, discover, load_case
from relchar_lab.exceptions import CorpusError
from relchar_lab.report import Report, SuiteRecord, SummaryRecord
from relchar_lab.verifier.main import run_command

CASES = Path(__file__).resolve().parents[1] / "cases"


def small_report() -> Report:
    report = Report("verify-factors")
    report.add(SuiteRecord("gauss-magnitude", {"c": 1}, 0.0, True))
    report.add(SummaryRecord(records=1, failed=0))
    return report


SUITE_LINE = '{"detail": {}, "kind": "suite", "params": {"c": 1}, "pass": true, "residual": 0.0, "suite": "gauss-magnitude"}'
SUMMARY_LINE = '{"detail": {}, "failed": 0, "kind": "summary", "pass": true, "records": 1}'


class CompareTest(unittest.TestCase):
    def test_whole_lines_match(self) -> None:
        expected = f"{SUITE_LINE}\n{SUMMARY_LINE}\n"
        self.assertEqual(compare(small_report(), expected), (True, ""))

    def test_missing_key_is_a_difference(self) -> None:
        partial = '{"kind": "suite", "pass": true}'
        passed, message = compare(small_report(), f"{partial}\n{SUMMARY_LINE}\n")
        self.assertFalse(passed)
        self.assertTrue(message.startswith("linha 1"))
        self.assertIn("residual", message)

    def test_first_differing_line(self) -> None:
        wrong = SUMMARY_LINE.replace('"records": 1', '"records": 2')
        expected = f"{SUITE_LINE}\n{wrong}\n"
        passed, message = compare(small_report(), expected)
        self.assertFalse(passed)
        self.assertTrue(message.startswith("linha 2"))

    def test_length_mismatch(self) -> None:
        passed, message = compare(small_report(), f"{SUITE_LINE}\n")
        self.assertFalse(passed)
        self.assertIn("linha 2", message)
        passed, _ = compare(small_report(), f"{SUITE_LINE}\n{SUMMARY_LINE}\n{SUMMARY_LINE}\n")
        self.assertFalse(passed)


class LoadTest(unittest.TestCase):
    def test_missing_files(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            case = Path(tmp) / "broken"
            case.mkdir()
            (case / "config.json").write_text("{}", encoding="utf-8")
            with self.assertRaises(CorpusError):
                load_case(case)
            with self.assertRaises(CorpusError):
                discover(Path(tmp) / "nowhere")

    def test_command_defaults_to_main(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            case = Path(tmp) / "plain"
            case.mkdir()
            (case / "config.json").write_text(json.dumps({"p": 3}), encoding="utf-8")
            (case / "expected.ndjson").write_text("", encoding="utf-8")
            self.assertEqual(load_case(case).command, "verify-main")


class RegressionCorpusTest(unittest.TestCase):
    def test_cases_are_documented(self) -> None:
        cases = discover(CASES)
        self.assertGreaterEqual(len(cases), 5)
        for case in cases:
            with self.subTest(case=case.name):
                self.assertTrue(case.provenance)

    def test_corpus_regenerates(self) -> None:
        for result in corpus_run(CASES, run_command):
            with self.subTest(case=result.name):
                self.assertTrue(result.passed, result.message)


if __name__ == "__main__":
    unittest.main()
