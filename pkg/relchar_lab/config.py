"""Configuração de jobs: arquivo JSON, sobrescritas por flag e validação.

Exemplo mínimo::

    {
      "p": 3,
      "case": "ps",
      "rep": {"chi0_m": 2, "chi0_exp": 1},
      "chi": {"m": 1, "exp": 1},
      "grid": {"N": [1, 2], "policy": "full", "depth": 0},
      "tol": 1e-8
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from sympy import isprime

from .characters import MulChar, base_char, conductor
from .exceptions import ConfigError, LabError
from .local_factors import (
    PrincipalSeries,
    RepGL2,
    Supercuspidal,
    find_admissible_xi,
    sc_frame,
    xi_admissible,
)
from .relative_character import PairData, make_pair_data
from .residue import ResidueRingCfg, least_non_residue

CASES = ("ps", "sc")
EXTENSIONS = ("unramified", "ramified")
POLICIES = ("full", "origin", "list")

DEFAULT_TOL = 1e-8
DEFAULT_FACTORS_MAX_CONDUCTOR = 4


@dataclass(frozen=True)
class RepConfig:
    """Dados de π: χ₀ para série principal, (E, ξ) para supercuspidal."""

    kind: str = "ps"
    chi0_m: int = 2
    chi0_exp: int = 1
    ext: str = "unramified"
    u: Optional[int] = None
    xi_conductor: int = 1
    xi_exps: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class CharConfig:
    m: int = 1
    exp: int = 1


@dataclass(frozen=True)
class GridConfig:
    N: tuple[int, ...] = (1,)
    policy: str = "full"
    depth: int = 0
    taus: tuple[tuple[Fraction, Fraction, Fraction], ...] = ()


@dataclass(frozen=True)
class JobConfig:
    p: int = 3
    rep: RepConfig = field(default_factory=RepConfig)
    chi: CharConfig = field(default_factory=CharConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    tol: float = DEFAULT_TOL
    out: Optional[str] = None
    factors_max_conductor: int = DEFAULT_FACTORS_MAX_CONDUCTOR
    workers: int = 1
    sweep_exps: tuple[int, ...] = ()

    @property
    def case(self) -> str:
        return self.rep.kind


def _int_tuple(value: Any, name: str) -> tuple[int, ...]:
    if isinstance(value, int):
        return (value,)
    if isinstance(value, list) and all(isinstance(v, int) for v in value):
        return tuple(value)
    raise ConfigError(f"[CONFIG] '{name}' deve ser inteiro ou lista de inteiros")


def _tau_list(value: Any) -> tuple[tuple[Fraction, Fraction, Fraction], ...]:
    """Lista de τ = [x, y, z] com racionais em texto ("1/3") ou inteiros."""
    if not isinstance(value, list):
        raise ConfigError("[CONFIG] 'grid.taus' deve ser uma lista")
    out = []
    for item in value:
        if not isinstance(item, list) or len(item) != 3:
            raise ConfigError(f"[CONFIG] τ inválido: {item!r} (esperado [x, y, z])")
        out.append(tuple(Fraction(str(c)) for c in item))
    return tuple(out)


def _section(raw: dict, name: str) -> dict:
    section = raw.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[CONFIG] seção '{name}' deve ser um objeto")
    return section


def parse_config(raw: dict) -> JobConfig:
    """Converte o dicionário JSON em ``JobConfig`` (sem validar hipóteses)."""
    if not isinstance(raw, dict):
        raise ConfigError("[CONFIG] o arquivo deve conter um objeto JSON")
    try:
        rep_raw = _section(raw, "rep")
        rep = RepConfig(
            kind=str(raw.get("case", rep_raw.get("kind", "ps"))),
            chi0_m=int(rep_raw.get("chi0_m", 2)),
            chi0_exp=int(rep_raw.get("chi0_exp", 1)),
            ext=str(rep_raw.get("ext", "unramified")),
            u=rep_raw.get("u"),
            xi_conductor=int(rep_raw.get("xi_conductor", 1)),
            xi_exps=_int_tuple(rep_raw["xi_exps"], "xi_exps") if "xi_exps" in rep_raw else None,
        )
        chi_raw = _section(raw, "chi")
        chi = CharConfig(m=int(chi_raw.get("m", 1)), exp=int(chi_raw.get("exp", 1)))
        grid_raw = _section(raw, "grid")
        grid = GridConfig(
            N=_int_tuple(grid_raw.get("N", 1), "grid.N"),
            policy=str(grid_raw.get("policy", "full")),
            depth=int(grid_raw.get("depth", 0)),
            taus=_tau_list(grid_raw.get("taus", [])),
        )
        return JobConfig(
            p=int(raw.get("p", 3)),
            rep=rep,
            chi=chi,
            grid=grid,
            tol=float(raw.get("tol", DEFAULT_TOL)),
            out=raw.get("out"),
            factors_max_conductor=int(raw.get("factors_max_conductor", DEFAULT_FACTORS_MAX_CONDUCTOR)),
            workers=int(raw.get("workers", 1)),
            sweep_exps=_int_tuple(raw.get("sweep_exps", []), "sweep_exps"),
        )
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"[CONFIG] valor inválido: {exc}") from exc


def load_config(path: Optional[str]) -> JobConfig:
    if path is None:
        return JobConfig()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"[CONFIG] arquivo não encontrado: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"[CONFIG] JSON inválido em {path}: {exc}") from exc
    return parse_config(raw)


def apply_overrides(
    cfg: JobConfig,
    p: Optional[int] = None,
    N: Optional[int] = None,
    case: Optional[str] = None,
    tol: Optional[float] = None,
    out: Optional[str] = None,
) -> JobConfig:
    """Aplica as flags --p --N --case --tol --out."""
    if p is not None:
        cfg = replace(cfg, p=p)
    if N is not None:
        cfg = replace(cfg, grid=replace(cfg.grid, N=(N,)))
    if case is not None:
        cfg = replace(cfg, rep=replace(cfg.rep, kind=case))
    if tol is not None:
        cfg = replace(cfg, tol=tol)
    if out is not None:
        cfg = replace(cfg, out=out)
    env_workers = os.environ.get("RELCHAR_WORKERS")
    if env_workers:
        try:
            cfg = replace(cfg, workers=int(env_workers))
        except ValueError as exc:
            raise ConfigError(f"[CONFIG] RELCHAR_WORKERS inválido: {env_workers}") from exc
    return cfg


def validate_basic(cfg: JobConfig) -> None:
    """Validação estrutural; as hipóteses do teorema ficam em ``build_pair``."""
    if cfg.p == 2:
        raise ConfigError("[CONFIG] p = 2 não suportado: o primo deve ser ímpar")
    if cfg.p < 2 or not isprime(cfg.p):
        raise ConfigError(f"[CONFIG] p = {cfg.p} não é primo")
    if cfg.rep.kind not in CASES:
        raise ConfigError(f"[CONFIG] case deve ser um de {CASES}, veio '{cfg.rep.kind}'")
    if cfg.rep.kind == "sc" and cfg.rep.ext not in EXTENSIONS:
        raise ConfigError(f"[CONFIG] ext deve ser um de {EXTENSIONS}")
    if cfg.grid.policy not in POLICIES:
        raise ConfigError(f"[CONFIG] policy deve ser uma de {POLICIES}")
    if cfg.grid.policy == "list" and not cfg.grid.taus:
        raise ConfigError("[CONFIG] policy 'list' exige grid.taus não vazio")
    if cfg.grid.depth < 0:
        raise ConfigError("[CONFIG] grid.depth deve ser ≥ 0")
    if cfg.chi.m < 1 or cfg.rep.chi0_m < 1:
        raise ConfigError("[CONFIG] precisões m devem ser ≥ 1")
    if not cfg.tol > 0:
        raise ConfigError("[CONFIG] tol deve ser positivo")
    if cfg.workers < 1:
        raise ConfigError("[CONFIG] workers deve ser ≥ 1")
    if any(n < 1 for n in cfg.grid.N):
        raise ConfigError("[CONFIG] hipótese violada: N ≥ 1")


def build_rep(cfg: JobConfig) -> RepGL2:
    """Constrói π a partir da seção ``rep``."""
    validate_basic(cfg)
    p = cfg.p
    if cfg.rep.kind == "ps":
        return PrincipalSeries(base_char(p, cfg.rep.chi0_m, cfg.rep.chi0_exp))
    u = cfg.rep.u if cfg.rep.u is not None else (least_non_residue(p) if cfg.rep.ext == "unramified" else 0)
    try:
        ext = ResidueRingCfg(p, 1, cfg.rep.ext, u)
        if cfg.rep.xi_exps is None:
            xi = find_admissible_xi(ext, cfg.rep.xi_conductor)
        else:
            xi_cfg, wpi = sc_frame(ext, cfg.rep.xi_conductor)
            xi = MulChar(xi_cfg, cfg.rep.xi_exps, wpi)
            if not xi_admissible(ext, xi):
                raise ConfigError("[CONFIG] hipótese violada: ξ admissível (ξ|F^× = η, ξ ≠ ξ^σ)")
    except LabError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[CONFIG] dado supercuspidal inválido: {exc}") from exc
    return Supercuspidal(ext.with_precision(xi.cfg.m), xi)


def build_pair(cfg: JobConfig) -> tuple[RepGL2, MulChar, PairData]:
    """Constrói (π, χ, PairData) e valida as hipóteses que dependem deles."""
    pi = build_rep(cfg)
    chi = base_char(cfg.p, cfg.chi.m, cfg.chi.exp)
    c_chi = conductor(chi)
    for N in cfg.grid.N:
        if 2 * N < c_chi:
            raise ConfigError(f"[CONFIG] hipótese violada: N ≥ c(χ)/2 (N = {N}, c(χ) = {c_chi})")
    try:
        pd = make_pair_data(pi, chi)
    except LabError as exc:
        raise ConfigError(f"[CONFIG] par (π, χ) inválido: {exc}") from exc
    return pi, chi, pd
