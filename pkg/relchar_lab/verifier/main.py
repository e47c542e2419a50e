"""Linha de comando do laboratório: verify-main, verify-factors, verify-opcalc, sweep e corpus.

Cada ponto da grade vira uma tarefa para um conjunto de threads; os
resultados voltam para a posição do ponto, de modo que o relatório não
depende do número de workers. Códigos de saída: 0 tudo passou, 1 alguma
falha, 2 erro de configuração.

Uso::

    python -m relchar_lab verify-main --config cases/ps_p3_cells/config.json
    python -m relchar_lab verify-factors --p 5 --out out/factors.ndjson
"""

from __future__ import annotations

import argparse
import cmath
import itertools
import logging
import queue
import threading
from dataclasses import replace
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Optional, Sequence, TypeVar

import numpy as np

from ..characters import MulChar, base_char, conductor, enumerate_X
from ..config import JobConfig, apply_overrides, build_pair, build_rep, load_config, validate_basic
from ..corpus import corpus_run
from ..exceptions import (
    ConfigError,
    LabError,
    LFactorPresentError,
    NonGenericPairError,
    OutOfRegimeError,
    PreconditionError,
)
from ..kirillov import shell_vector, v_chi_R, weyl, weyl_contour_oracle, weyl_on_shell
from ..local_factors import (
    QuasiChar,
    TestFunction,
    epsilon_gl1,
    gamma_gl2,
    gamma_value,
    gauss_sum,
    tate_twist_residuals,
    verify_gl1_fe,
)
from ..local_field import LieCoords, frac_of_fraction
from ..logs import configure_logging
from ..op_calculus import (
    Wavepacket,
    check_star_character,
    lattice_sample,
    microlocal_residual,
    microlocal_shifts,
    microlocal_sign,
    op_full,
    orderings_spread,
    tau_grid,
    wavepacket_decompose,
    wavepacket_fourier,
)
from ..phase_space import HyperbolaSpec, hyp_integral_closed, hyp_integral_lattice
from ..relative_character import (
    PairData,
    check_hypotheses,
    relchar_bruteforce,
    relchar_table,
    uncertainty_holds,
)
from ..report import Report, SuiteRecord, SummaryRecord, VerifyRecord

logger = logging.getLogger(__name__)

T = TypeVar("T")

FACTOR_TOL = 1e-9
UNITARY_TOL = 1e-10
GAUSS_ZERO_TOL = 1e-12
OPCALC_TOL = 1e-9

FE_EXPONENTS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
TWIST_SAMPLES = 8
RNG_SEED = 20240917
RECONSTRUCTION_COSETS = 27


class GridRunner:
    """Executa tarefas em ``workers`` threads alimentadas por uma fila."""

    def __init__(self, workers: int = 1) -> None:
        self.workers = max(1, workers)
        self._lock = threading.Lock()

    def run(self, tasks: Sequence[Callable[[], T]]) -> list[T]:
        results: list[Optional[T]] = [None] * len(tasks)
        errors: dict[int, BaseException] = {}
        pending: queue.Queue[int] = queue.Queue()
        for index in range(len(tasks)):
            pending.put(index)

        def worker() -> None:
            while True:
                try:
                    index = pending.get_nowait()
                except queue.Empty:
                    return
                try:
                    value = tasks[index]()
                except BaseException as exc:  # repassado na ordem da grade
                    with self._lock:
                        errors[index] = exc
                else:
                    with self._lock:
                        results[index] = value

        count = min(self.workers, len(tasks))
        if count <= 1:
            worker()
        else:
            threads = [threading.Thread(target=worker, daemon=True) for _ in range(count)]
            for thread in threads:
                thread.start()
            for thread in threads:
                thread.join()
        if errors:
            raise errors[min(errors)]
        return results  # type: ignore[return-value]


# --- verify-main -----------------------------------------------------------


def _level_reps(p: int, r: int) -> list[Fraction]:
    """u/p^r com u percorrendo as unidades mod p^r; r = 0 dá só 0."""
    if r == 0:
        return [Fraction(0)]
    return [Fraction(u, p**r) for u in range(1, p**r) if u % p]


def build_grid(cfg: JobConfig, pd: PairData, N: int) -> list[Wavepacket]:
    """Pontos τ da política ``cfg.grid.policy`` na escala N."""
    p = pd.p
    policy = cfg.grid.policy
    if policy == "origin":
        return [Wavepacket(p, N, LieCoords.of(0, 0, 0))]
    if policy == "list":
        return [Wavepacket(p, N, LieCoords(*tau)) for tau in cfg.grid.taus]
    center = frac_of_fraction(-pd.alpha_chi.alpha * Fraction(p) ** N, p)
    step = Fraction(1, p)
    # borda da janela e um passo de cada lado
    xs = dict.fromkeys(frac_of_fraction(center + k * step, p) for k in (-1, 0, 1))
    top = min(pd.r_max, N)
    packets = []
    for tx in xs:
        for r, s in itertools.product(range(top + 1), repeat=2):
            for ty in _level_reps(p, r):
                for tz in _level_reps(p, s):
                    packets.append(Wavepacket(p, N, LieCoords(tx, ty, tz)))
    return packets


def _admissible_points(cfg: JobConfig, pd: PairData) -> list[Wavepacket]:
    points = []
    for N in cfg.grid.N:
        for a in build_grid(cfg, pd, N):
            try:
                check_hypotheses(pd, a)
            except OutOfRegimeError as exc:
                logger.warning("Ponto τ=%s ignorado: %s", a.tau, exc)
                continue
            except PreconditionError as exc:
                raise ConfigError(f"[CONFIG] {exc}") from exc
            points.append(a)
    return points


def evaluate_point(pd: PairData, a: Wavepacket, tol: float, depth: int, params: dict) -> VerifyRecord:
    """Compara força bruta, tabela, hipérbole fechada e soma em reticulado num ponto."""
    bf = relchar_bruteforce(pd, a)
    table = relchar_table(pd, a)
    hs = HyperbolaSpec(pd)
    closed = hyp_integral_closed(hs, a)
    lattice = hyp_integral_lattice(hs, a, max(depth, a.r, a.s, 1)).value

    ratio = bf.value / table.value if table.exact else None
    checks = (
        bf.stable,
        abs(bf.value - table.value) <= tol * max(1.0, abs(table.value)),
        abs(abs(bf.value) - float(closed)) <= tol * max(1.0, float(closed)),
        closed == lattice,
        ratio is None or abs(abs(ratio) - 1) <= tol,
        uncertainty_holds(pd, a, bf.value, tol),
    )
    record = VerifyRecord(
        params=params,
        N=a.N,
        tau=bf.tau,
        r=a.r,
        s=a.s,
        lhs_bruteforce=bf.value,
        lhs_table=table.value,
        table_exact=table.exact,
        rhs_closed=closed,
        rhs_lattice=lattice,
        ratio=ratio,
        stable=bf.stable,
        passed=all(checks),
    )
    if record.passed:
        logger.debug("Ponto N=%d τ=%s ok: %s", a.N, bf.tau, closed)
    else:
        logger.error("Ponto N=%d τ=%s falhou: H=%s, tabela=%s, hipérbole=%s/%s", a.N, bf.tau, bf.value, table.exact, closed, lattice)
    return record


def _main_summary(records: Sequence[VerifyRecord], tol: float) -> SummaryRecord:
    ratios = [r.ratio for r in records if r.ratio is not None]
    constant = all(abs(z - ratios[0]) <= tol for z in ratios)
    return SummaryRecord(
        records=len(records),
        failed=sum(1 for r in records if not r.passed),
        detail={"ratio_constant": constant},
    )


def _job_params(cfg: JobConfig) -> dict:
    return {"case": cfg.case, "p": cfg.p, "chi_m": cfg.chi.m, "chi_exp": cfg.chi.exp}


def _main_records(cfg: JobConfig, pd: PairData) -> list[VerifyRecord]:
    points = _admissible_points(cfg, pd)
    params = _job_params(cfg)
    tasks = [partial(evaluate_point, pd, a, cfg.tol, cfg.grid.depth, params) for a in points]
    return GridRunner(cfg.workers).run(tasks)


def cmd_verify_main(cfg: JobConfig) -> Report:
    """Um registro por ponto da grade mais um resumo com a constância da razão."""
    _pi, _chi, pd = build_pair(cfg)
    logger.info("[RELCHAR] par %s: c(π,χ)=%d, α=%s, r_max=%d", cfg.case, pd.c_pair, pd.alpha_pair, pd.r_max)
    report = Report("verify-main")
    records = _main_records(cfg, pd)
    report.extend(records)
    report.add(_main_summary(records, cfg.tol))
    logger.info("verify-main: %d pontos, %d falhas", len(records), report.failed)
    return report


def cmd_sweep(cfg: JobConfig) -> Report:
    """verify-main para cada expoente de χ em ``sweep_exps`` (pares inválidos são pulados)."""
    exps = cfg.sweep_exps or (cfg.chi.exp,)
    report = Report("sweep")
    records: list[VerifyRecord] = []
    for exp in exps:
        job = replace(cfg, chi=replace(cfg.chi, exp=exp))
        try:
            _pi, _chi, pd = build_pair(job)
        except ConfigError as exc:
            if not isinstance(exc.__cause__, (NonGenericPairError, LFactorPresentError)):
                raise
            logger.warning("χ com expoente %d ignorado: %s", exp, exc)
            continue
        batch = _main_records(job, pd)
        logger.info("sweep χ_exp=%d: %d pontos", exp, len(batch))
        records.extend(batch)
    report.extend(records)
    report.add(_main_summary(records, cfg.tol))
    return report


# --- verify-factors --------------------------------------------------------


def _characters_of_conductor(p: int, c: int) -> list[MulChar]:
    return [chi for chi in enumerate_X(c, p) if conductor(chi) == c]


def suite_epsilon_unitarity(p: int, top: int) -> list[SuiteRecord]:
    out = []
    for c in range(1, top + 1):
        for chi in _characters_of_conductor(p, c):
            residual = abs(abs(epsilon_gl1(chi)) ** 2 - 1)
            out.append(SuiteRecord("epsilon-unitarity", {"c": c, "exp": chi.exps[0]}, residual, residual <= UNITARY_TOL))
    return out


def suite_gauss(p: int, top: int) -> list[SuiteRecord]:
    """|g(χ, ψ_{ϖ^{-c}})| = q^{-c/2} e g(χ, ψ_{ϖ^{-k}}) = 0 para k ≠ c, k ≥ 1."""
    out = []
    for c in range(1, top + 1):
        for chi in _characters_of_conductor(p, c):
            params = {"c": c, "exp": chi.exps[0]}
            residual = abs(abs(gauss_sum(chi, Fraction(1, p**c))) - p ** (-c / 2))
            out.append(SuiteRecord("gauss-magnitude", params, residual, residual <= FACTOR_TOL))
            for k in (c - 1, c + 1):
                if k < 1:
                    continue
                g = gauss_sum(chi, Fraction(1, p**k))
                out.append(SuiteRecord("gauss-vanishing", {**params, "k": k}, abs(g), abs(g) <= GAUSS_ZERO_TOL))
    return out


def suite_tate_twist(p: int, top: int) -> list[SuiteRecord]:
    """ε(1/2, χω) = ω(α_χ)⁻¹ε(1/2, χ) para c(χ) par e c(ω) ≤ c(χ)/2; a orientação direta vai no detalhe."""
    out = []
    for c in range(2, top + 1, 2):
        for chi in _characters_of_conductor(p, c):
            for omega in enumerate_X(c // 2, p):
                res = tate_twist_residuals(chi, omega)
                params = {"c": c, "exp": chi.exps[0], "omega_exp": omega.exps[0], "omega_m": omega.cfg.m}
                out.append(
                    SuiteRecord("tate-twist", params, res.inverse_law, res.inverse_law <= FACTOR_TOL, {"direct_law": res.direct_law})
                )
    return out


def _fe_test_functions(p: int) -> list[tuple[str, TestFunction]]:
    return [
        ("ball", TestFunction.coset(0, 0)),
        ("ball_p", TestFunction.coset(0, 1)),
        ("coset_1", TestFunction.coset(1, 1)),
        ("coset_inv_p", TestFunction.coset(Fraction(1, p), 0)),
        ("shell_0", TestFunction.shell(0)),
    ]


def suite_gl1_fe(p: int, top: int) -> list[SuiteRecord]:
    """Z(f,χ)ε(χ)/L(χ) = Z(f̂,χ^∨)/L(χ^∨) para cosets, bolas e cascas."""
    etas = [("trivial", base_char(p, 1, 0)), ("unram_-1", base_char(p, 1, 0, -1 + 0j))]
    for c in range(1, top + 1):
        etas.extend((f"c{c}_e{chi.exps[0]}", chi) for chi in _characters_of_conductor(p, c))
    out = []
    for (eta_name, eta), (f_name, f) in itertools.product(etas, _fe_test_functions(p)):
        worst = max(verify_gl1_fe(f, QuasiChar(eta, s)) for s in FE_EXPONENTS)
        out.append(SuiteRecord("gl1-fe", {"eta": eta_name, "f": f_name}, worst, worst <= FACTOR_TOL))
    return out


def suite_twist_shift(cfg: JobConfig, top: int) -> list[SuiteRecord]:
    """γ(π ⊗ ν|·|^s) = c·z^k: torções não ramificadas deslocam o monômio."""
    pi = build_rep(cfg)
    zs = [cmath.exp(2j * cmath.pi * t / TWIST_SAMPLES) for t in range(TWIST_SAMPLES)]
    out = []
    for c in range(1, top + 1):
        for nu in _characters_of_conductor(cfg.p, c):
            try:
                mono = gamma_gl2(pi, nu)
            except LFactorPresentError:
                continue
            worst = max(abs(gamma_value(pi, nu.twist(z)) - mono.at(z)) for z in zs)
            out.append(SuiteRecord("twist-shift", {"c": c, "exp": nu.exps[0], "k": mono.k}, worst, worst <= FACTOR_TOL))
    return out


def cmd_verify_factors(cfg: JobConfig) -> Report:
    """Unitariedade de ε, somas de Gauss, torção de Tate, EF de GL₁ e deslocamento por torção."""
    validate_basic(cfg)
    p, top = cfg.p, cfg.factors_max_conductor
    report = Report("verify-factors")
    if top < 1:
        logger.info("verify-factors: conjunto de caracteres vazio")
        return report
    suites: list[Callable[[], list[SuiteRecord]]] = [
        partial(suite_epsilon_unitarity, p, top),
        partial(suite_gauss, p, top),
        partial(suite_tate_twist, p, top),
        partial(suite_gl1_fe, p, top),
        partial(suite_twist_shift, cfg, top),
    ]
    for batch in GridRunner(cfg.workers).run(suites):
        report.extend(batch)
    report.add(SummaryRecord(records=len(report.records), failed=report.failed))
    logger.info("verify-factors: %d casos, %d falhas", len(report.records) - 1, report.failed)
    return report


# --- verify-opcalc ---------------------------------------------------------


def _suite_orderings(pd: PairData, points: Sequence[Wavepacket]) -> list[SuiteRecord]:
    out = []
    for a in points:
        R = a.N + pd.c_pair + max(a.r, a.s) + 1
        v = v_chi_R(pd.chi, R, pd.unit_precision(a.r, a.s))
        spread = orderings_spread(a, v, pd.pi)
        out.append(SuiteRecord("orderings", {"N": a.N, "tau": _tau_str(a)}, spread, spread <= OPCALC_TOL))
    return out


def _suite_origin_projection(pd: PairData, N: int) -> SuiteRecord:
    """Op(a_0) é um projetor."""
    a = Wavepacket(pd.p, N, LieCoords.of(0, 0, 0))
    v = v_chi_R(pd.chi, N + pd.c_pair + 1, pd.unit_precision())
    once = op_full(a, v, pd.pi)
    twice = op_full(a, once, pd.pi)
    residual = twice.distance(once)
    return SuiteRecord("origin-projection", {"N": N}, residual, residual <= OPCALC_TOL)


def _suite_star_character(p: int, N: int, rng: np.random.Generator) -> SuiteRecord:
    m = 2 * N
    xi = LieCoords.of(Fraction(1, p**m), Fraction(2, p**m), Fraction(-1, p**m))
    sample = lattice_sample(p, N)
    if len(sample) > RECONSTRUCTION_COSETS:
        picks = rng.choice(len(sample), size=RECONSTRUCTION_COSETS, replace=False)
        sample = [sample[int(i)] for i in sorted(picks)]
    failures = check_star_character(p, N, m, xi, sample)
    return SuiteRecord("star-character", {"N": N, "m": m, "pairs": len(sample) ** 2}, float(failures), failures == 0)


def _suite_reconstruction(p: int, N: int, rng: np.random.Generator) -> SuiteRecord:
    """Amostras aleatórias em 27 classes τ e reconstrução exata pela soma de pacotes."""
    taus = list(tau_grid(p, 1))
    if len(taus) > RECONSTRUCTION_COSETS:
        picks = rng.choice(len(taus), size=RECONSTRUCTION_COSETS, replace=False)
        taus = [taus[int(i)] for i in sorted(picks)]
    values = rng.normal(size=len(taus)) + 1j * rng.normal(size=len(taus))
    samples = {tau: complex(z) for tau, z in zip(taus, values)}
    packets = wavepacket_decompose(samples, N, p)
    T = Fraction(1) / Fraction(p) ** N
    residual = max(abs(packets(tau.scale(T)) - z) for tau, z in samples.items())
    return SuiteRecord("reconstruction", {"N": N, "cosets": len(taus)}, residual, residual <= OPCALC_TOL)


def _suite_fourier(points: Sequence[Wavepacket]) -> list[SuiteRecord]:
    """A soma de Fourier de a_τ recupera a indicadora da bola Tτ + T·O³."""
    out = []
    for a in points:
        inside = a.tau.scale(a.T)
        outside = inside + LieCoords.of(Fraction(1, a.p ** (a.N + 1)), 0, 0)
        residual = max(abs(wavepacket_fourier(a, inside) - 1), abs(wavepacket_fourier(a, outside)))
        out.append(SuiteRecord("fourier-indicator", {"N": a.N, "tau": _tau_str(a)}, residual, residual <= OPCALC_TOL))
    return out


def _suite_weyl(pd: PairData, n: int = 0) -> list[SuiteRecord]:
    """π(w)² = 1, unitariedade de π(w) e o oráculo de contorno, casca a casca."""
    p, M = pd.p, pd.unit_precision()
    out = []
    for omega in enumerate_X(M, p):
        try:
            direct = weyl_on_shell(pd.pi, n, omega, M)
        except LFactorPresentError:
            continue
        shell = shell_vector(p, M, n, omega)
        params = {"n": n, "omega_exp": omega.exps[0]}
        involution = weyl(pd.pi, weyl(pd.pi, shell)).distance(shell)
        unitarity = abs(direct.norm() - shell.norm())
        contour = weyl_contour_oracle(pd.pi, n, omega, M).distance(direct)
        out.append(SuiteRecord("weyl-involution", params, involution, involution <= OPCALC_TOL))
        out.append(SuiteRecord("weyl-unitarity", params, unitarity, unitarity <= UNITARY_TOL))
        out.append(SuiteRecord("contour-oracle", params, contour, contour <= OPCALC_TOL))
    return out


def _suite_microlocal(pd: PairData, points: Sequence[Wavepacket]) -> list[SuiteRecord]:
    """Imagens W' = Op(a_τ)v são autovetores de π(n(x)), x ∈ p^N, com ψ(−x·Tτ_y)."""
    out = []
    for a in points:
        v = v_chi_R(pd.chi, a.N + pd.c_pair + max(a.r, a.s) + 1, pd.unit_precision(a.r, a.s))
        image = op_full(a, v, pd.pi)
        residual = microlocal_residual(a, image, -1, microlocal_shifts(a))
        detail = {"sign": microlocal_sign(a, image), "r": a.r, "s": a.s}
        out.append(SuiteRecord("microlocal-sign", {"N": a.N, "tau": _tau_str(a)}, residual, residual <= OPCALC_TOL, detail))
    return out


def _tau_str(a: Wavepacket) -> list[str]:
    return [str(a.tau.x), str(a.tau.y), str(a.tau.z)]


def cmd_verify_opcalc(cfg: JobConfig) -> Report:
    """Comutatividade, projeção em τ = 0, caráter ⋆, reconstrução, Fourier, Weyl e sinal microlocal."""
    _pi, _chi, pd = build_pair(cfg)
    points = _admissible_points(cfg, pd)
    rng = np.random.default_rng(RNG_SEED)
    report = Report("verify-opcalc")
    tasks: list[Callable[[], Any]] = [partial(_suite_orderings, pd, points)]
    for N in cfg.grid.N:
        tasks.append(partial(_suite_origin_projection, pd, N))
    # rng consumido aqui, em ordem fixa
    for N in cfg.grid.N:
        star = _suite_star_character(pd.p, N, rng)
        recon = _suite_reconstruction(pd.p, N, rng)
        tasks.append(partial(list, (star, recon)))
    tasks.append(partial(_suite_fourier, points))
    tasks.append(partial(_suite_weyl, pd))
    tasks.append(partial(_suite_microlocal, pd, points))
    for batch in GridRunner(cfg.workers).run(tasks):
        report.extend(batch if isinstance(batch, list) else [batch])
    report.add(SummaryRecord(records=len(report.records), failed=report.failed))
    logger.info("verify-opcalc: %d casos, %d falhas", len(report.records) - 1, report.failed)
    return report


COMMANDS: dict[str, Callable[[JobConfig], Report]] = {
    "verify-main": cmd_verify_main,
    "verify-factors": cmd_verify_factors,
    "verify-opcalc": cmd_verify_opcalc,
    "sweep": cmd_sweep,
}


def run_command(command: str, cfg: JobConfig) -> Report:
    try:
        handler = COMMANDS[command]
    except KeyError as exc:
        raise ConfigError(f"[CONFIG] comando desconhecido: {command}") from exc
    return handler(cfg)


# --- CLI -------------------------------------------------------------------


def _add_job_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="arquivo JSON do job")
    parser.add_argument("--p", type=int, help="primo ímpar")
    parser.add_argument("--N", type=int, help="escala |T| = q^N")
    parser.add_argument("--case", choices=("ps", "sc"), help="série principal ou supercuspidal")
    parser.add_argument("--tol", type=float, help="tolerância relativa")
    parser.add_argument("--out", help="arquivo NDJSON de saída (CSV ao lado)")
    parser.add_argument("--verbose", action="store_true", help="logs em nível DEBUG")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relchar_lab", description="Verificação de caracteres relativos (PGL₂, GL₁)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_job_flags(sub.add_parser(name))
    corpus = sub.add_parser("corpus", help="regenera os casos de cases/ e compara com o esperado")
    corpus.add_argument("--root", default="cases", help="diretório do corpus")
    corpus.add_argument("--verbose", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        if args.command == "corpus":
            results = corpus_run(args.root, run_command)
            for result in results:
                if result.passed:
                    logger.info("Caso %s ok", result.name)
                else:
                    logger.error("Caso %s divergiu: %s", result.name, result.message)
            return 0 if all(r.passed for r in results) else 1
        cfg = apply_overrides(load_config(args.config), args.p, args.N, args.case, args.tol, args.out)
        report = run_command(args.command, cfg)
        report.write(cfg.out)
    except ConfigError as exc:
        logger.error("%s", exc)
        return 2
    except LabError as exc:
        logger.error("%s", exc)
        return 1
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
