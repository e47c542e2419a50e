"""Corpus de regressão em ``cases/<nome>/``.

Cada caso tem ``config.json`` (um job; as chaves opcionais ``command`` e
``provenance`` escolhem o subcomando e descrevem a origem dos valores) e
``expected.ndjson``. Cada linha do relatório regenerado é comparada inteira
com a linha esperada, ambas na forma canônica (``json.dumps`` com chaves
ordenadas); uma chave a mais ou a menos já é divergência.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Union

from .config import JobConfig, load_config
from .exceptions import CorpusError
from .report import Report, dump_line

logger = logging.getLogger(__name__)

CONFIG_NAME = "config.json"
EXPECTED_NAME = "expected.ndjson"
DEFAULT_COMMAND = "verify-main"

Runner = Callable[[str, JobConfig], Report]


@dataclass(frozen=True)
class CorpusCase:
    name: str
    config_path: Path
    expected_path: Path
    command: str
    provenance: str


@dataclass(frozen=True)
class CorpusResult:
    name: str
    passed: bool
    message: str = ""


def load_case(directory: Path) -> CorpusCase:
    config_path = directory / CONFIG_NAME
    expected_path = directory / EXPECTED_NAME
    for path in (config_path, expected_path):
        if not path.is_file():
            raise CorpusError(f"[CORPUS] arquivo ausente: {path}")
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"[CORPUS] JSON inválido em {config_path}: {exc}") from exc
    return CorpusCase(
        name=directory.name,
        config_path=config_path,
        expected_path=expected_path,
        command=str(raw.get("command", DEFAULT_COMMAND)),
        provenance=str(raw.get("provenance", "")),
    )


def discover(root: Union[str, Path]) -> list[CorpusCase]:
    base = Path(root)
    if not base.is_dir():
        raise CorpusError(f"[CORPUS] diretório do corpus não encontrado: {base}")
    return [load_case(d) for d in sorted(base.iterdir()) if d.is_dir()]


def compare(report: Report, expected_text: str) -> tuple[bool, str]:
    """Compara linha a linha; a mensagem aponta a primeira linha divergente."""
    expected_lines = [line for line in expected_text.splitlines() if line.strip()]
    actual = [record.to_json() for record in report.records]
    for number, line in enumerate(expected_lines, start=1):
        want = json.loads(line)
        if number > len(actual):
            return False, f"linha {number}: relatório terminou antes do esperado ({len(actual)} linhas)"
        got = dump_line(actual[number - 1])
        if got != dump_line(want):
            return False, f"linha {number}: esperado {dump_line(want)}, obtido {got}"
    if len(actual) != len(expected_lines):
        return False, f"linha {len(expected_lines) + 1}: relatório tem {len(actual)} linhas, esperado {len(expected_lines)}"
    return True, ""


def run_case(case: CorpusCase, run: Runner) -> CorpusResult:
    cfg = replace(load_config(str(case.config_path)), out=None)
    report = run(case.command, cfg)
    try:
        passed, message = compare(report, case.expected_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"[CORPUS] linha inválida em {case.expected_path}: {exc}") from exc
    return CorpusResult(case.name, passed, message)


def corpus_run(root: Union[str, Path], run: Runner) -> list[CorpusResult]:
    """Regenera todos os casos de ``root`` com ``run`` e compara com o esperado."""
    cases = discover(root)
    logger.info("Corpus: %d casos em %s", len(cases), root)
    return [run_case(case, run) for case in cases]
