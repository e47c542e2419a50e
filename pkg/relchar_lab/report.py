"""Registros de verificação e escrita dos relatórios NDJSON/CSV.

Os relatórios não têm carimbo de tempo e os floats saem arredondados em 10
casas, então a mesma configuração produz o mesmo arquivo.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

logger = logging.getLogger(__name__)

FLOAT_DIGITS = 10

Record = Union["VerifyRecord", "SuiteRecord", "SummaryRecord"]


def fmt_float(x: float) -> float:
    # + 0.0 normaliza −0.0
    return round(float(x), FLOAT_DIGITS) + 0.0


def fmt_complex(z: Optional[complex]) -> Optional[list[float]]:
    if z is None:
        return None
    return [fmt_float(z.real), fmt_float(z.imag)]


def fmt_fraction(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else str(x)


@dataclass(frozen=True)
class VerifyRecord:
    """Um ponto da grade: força bruta, tabela, hipérbole fechada e em reticulado."""

    params: dict
    N: int
    tau: tuple[str, str, str]
    r: int
    s: int
    lhs_bruteforce: complex
    lhs_table: complex
    table_exact: Fraction
    rhs_closed: Fraction
    rhs_lattice: Fraction
    ratio: Optional[complex]
    stable: bool
    passed: bool

    def to_json(self) -> dict:
        return {
            "kind": "point",
            "params": self.params,
            "N": self.N,
            "tau": list(self.tau),
            "r": self.r,
            "s": self.s,
            "lhs_bruteforce": fmt_complex(self.lhs_bruteforce),
            "lhs_table": fmt_complex(self.lhs_table),
            "table_exact": fmt_fraction(self.table_exact),
            "rhs_closed": fmt_fraction(self.rhs_closed),
            "rhs_lattice": fmt_fraction(self.rhs_lattice),
            "ratio": fmt_complex(self.ratio),
            "stable": self.stable,
            "pass": self.passed,
        }

    def csv_row(self) -> list[Any]:
        return [
            "point",
            self.N,
            "|".join(self.tau),
            self.r,
            self.s,
            fmt_float(abs(self.lhs_bruteforce)),
            fmt_fraction(self.rhs_closed),
            "" if self.ratio is None else fmt_float(abs(self.ratio)),
            self.passed,
        ]


@dataclass(frozen=True)
class SuiteRecord:
    """Resultado de um caso das suítes de fatores e de cálculo Op."""

    suite: str
    params: dict
    residual: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": "suite",
            "suite": self.suite,
            "params": self.params,
            "residual": fmt_float(self.residual),
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
            "pass": self.passed,
        }

    def csv_row(self) -> list[Any]:
        return [self.suite, "", "", "", "", fmt_float(self.residual), "", json.dumps(self.params, sort_keys=True), self.passed]


@dataclass(frozen=True)
class SummaryRecord:
    records: int
    failed: int
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failed == 0 and all(v is not False for v in self.detail.values())

    def to_json(self) -> dict:
        return {
            "kind": "summary",
            "records": self.records,
            "failed": self.failed,
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
            "pass": self.passed,
        }

    def csv_row(self) -> list[Any]:
        return ["summary", "", "", "", "", self.records, self.failed, "", self.passed]


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return fmt_complex(value)
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def dump_line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False)


CSV_HEADER = ["kind", "N", "tau", "r", "s", "value", "reference", "extra", "pass"]


@dataclass
class Report:
    """Lista ordenada de registros; ``passed`` é falso se algum registro falha."""

    command: str
    records: list[Record] = field(default_factory=list)

    def add(self, record: Record) -> None:
        self.records.append(record)

    def extend(self, records: list[Record]) -> None:
        self.records.extend(records)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.records if not r.passed)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def ndjson(self) -> str:
        return "".join(dump_line(r.to_json()) + "\n" for r in self.records)

    def csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in self.records:
            writer.writerow(record.csv_row())
        return buffer.getvalue()

    def write(self, out: Optional[str]) -> Optional[Path]:
        """Grava ``out`` (NDJSON) e o resumo CSV ao lado; sem ``out`` imprime o NDJSON."""
        if out is None:
            print(self.ndjson(), end="")
            return None
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.ndjson(), encoding="utf-8")
        summary = path.with_suffix(".csv")
        summary.write_text(self.csv(), encoding="utf-8")
        logger.info("Relatório gravado em %s (resumo em %s)", path, summary)
        return path
