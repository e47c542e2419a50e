"""H_{π,χ}(1_τ^T) por força bruta no modelo de Kirillov e pela tabela de quatro casos.

A força bruta aplica Op(a_τ) a v_χ^R e pareia com v_χ^R, com
R = N + c(π,χ) + max(r, s) + 1 e checagem de estabilidade em R + 2. A tabela
usa a medida de Haar discreta (cada casca com volume 1), então a casa (0,0)
conta as 2N − c + 1 cascas entre −N e N − c.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .characters import (
    AlphaDatum,
    MulChar,
    alpha_of,
    alpha_pair,
    chi_flat_sharp,
    conductor,
    x_count,
)
from .exceptions import NonGenericPairError, OutOfRegimeError, PreconditionError
from .kirillov import shell_vector, v_chi_R
from .local_factors import PrincipalSeries, RepGL2, Supercuspidal, gamma_gl2
from .local_field import reduce_integral, vp
from .op_calculus import Wavepacket, op_full, op_zero
from .residue import RAMIFIED

logger = logging.getLogger(__name__)

STABILITY_TOL = 1e-9
STABILITY_STEP = 2


@dataclass(frozen=True)
class PairData:
    """Dados do par (π, χ): condutor, α_{π,χ}, γ(π⊗χ̄) e α_χ."""

    pi: RepGL2
    chi: MulChar
    c_pair: int
    alpha_pair: Fraction
    gamma: complex
    alpha_chi: AlphaDatum
    c_chi: int
    r_max: int

    @property
    def p(self) -> int:
        return self.chi.p

    def unit_precision(self, r: int = 0, s: int = 0) -> int:
        """Precisão M das cascas: cobre χ, os cosets de Op± e as torções."""
        c_rep = conductor(self.pi.chi0) if isinstance(self.pi, PrincipalSeries) else 0
        return max(self.c_chi, c_rep, r, s, 1) + 1

    def describe(self) -> dict:
        return {
            "pi": self.pi.describe(),
            "chi": self.chi.describe(),
            "c_pair": self.c_pair,
            "c_chi": self.c_chi,
            "alpha_pair": str(self.alpha_pair),
            "alpha_chi": str(self.alpha_chi.alpha),
            "r_max": self.r_max,
        }


def admissible_radius(pi: RepGL2, chi: MulChar) -> int:
    """Maior r com a torção de nível r estável no fator ε."""
    if isinstance(pi, PrincipalSeries):
        flat, sharp = chi_flat_sharp(pi.chi0, chi)
        return min(conductor(flat), conductor(sharp)) // 2
    c_e = conductor(pi.twisted_xi(chi.inverse()))
    if pi.ext.ext == RAMIFIED:
        # c(ω∘Nm) = 2c(ω) − 1 sobre E ramificado
        return (c_e // 2 + 1) // 2
    return c_e // 2


def make_pair_data(pi: RepGL2, chi: MulChar) -> PairData:
    if chi.cfg.is_extension:
        raise PreconditionError("[RELCHAR] χ precisa ser caráter de F^×")
    c_chi = conductor(chi)
    if c_chi == 0:
        raise PreconditionError("[RELCHAR] α_χ exige χ ramificado")
    if isinstance(pi, PrincipalSeries):
        flat, sharp = chi_flat_sharp(pi.chi0, chi)
        if conductor(flat) == 0 or conductor(sharp) == 0:
            raise NonGenericPairError("[RELCHAR] par não genérico: χ_♭ ou χ_♯ não ramificado")
    mono = gamma_gl2(pi, chi.inverse())
    alpha = alpha_pair(pi, chi)
    v = vp(alpha, chi.p)
    if v != -mono.k:
        raise PreconditionError(f"[RELCHAR] v(α_{{π,χ}}) = {v} difere de −c(π,χ) = {-mono.k}")
    return PairData(
        pi=pi,
        chi=chi,
        c_pair=mono.k,
        alpha_pair=alpha,
        gamma=mono.c,
        alpha_chi=alpha_of(chi),
        c_chi=c_chi,
        r_max=admissible_radius(pi, chi),
    )


def check_hypotheses(pd: PairData, a: Wavepacket) -> None:
    """Hipóteses do teorema principal, com a hipótese violada na mensagem."""
    N = a.N
    if a.p != pd.p:
        raise PreconditionError(f"[RELCHAR] pacote em p = {a.p}, par em p = {pd.p}")
    if N < 1:
        raise PreconditionError("[RELCHAR] hipótese violada: N ≥ 1")
    if 2 * N < pd.c_chi:
        raise PreconditionError(f"[RELCHAR] hipótese violada: N ≥ c(χ)/2 (N = {N}, c(χ) = {pd.c_chi})")
    if not a.within_scale():
        raise PreconditionError("[RELCHAR] hipótese violada: |Tτ| ≤ q^{2N}")
    for name, radius in (("r", a.r), ("s", a.s)):
        if radius > pd.r_max:
            raise OutOfRegimeError(
                f"[RELCHAR] hipótese violada: {name} = {radius} > {pd.r_max} (torção não estável)"
            )


@dataclass(frozen=True)
class RelCharResult:
    value: complex
    method: str
    N: int
    tau: tuple[str, str, str]
    r: int
    s: int
    R: Optional[int] = None
    R_check: Optional[int] = None
    exact: Optional[Fraction] = None
    stable: bool = True


def _tau_echo(a: Wavepacket) -> tuple[str, str, str]:
    return (str(a.tau.x), str(a.tau.y), str(a.tau.z))


def pairing_at_radius(pd: PairData, a: Wavepacket, R: int) -> complex:
    M = pd.unit_precision(a.r, a.s)
    v = v_chi_R(pd.chi, R, M)
    return op_full(a, v, pd.pi).inner(v)


def relchar_bruteforce(pd: PairData, a: Wavepacket) -> RelCharResult:
    """⟨Op(a_τ)v_χ^R, v_χ^R⟩ com checagem de estabilidade em R + 2."""
    check_hypotheses(pd, a)
    R = a.N + pd.c_pair + max(a.r, a.s) + 1
    value = pairing_at_radius(pd, a, R)
    R_check = R + STABILITY_STEP
    again = pairing_at_radius(pd, a, R_check)
    stable = abs(value - again) <= STABILITY_TOL
    if not stable:
        logger.warning("[RELCHAR] valor instável em R = %d: |Δ| = %.3e", R, abs(value - again))
    logger.debug("[RELCHAR] força bruta N=%d τ=%s → %s", a.N, _tau_echo(a), value)
    return RelCharResult(value, "bruteforce", a.N, _tau_echo(a), a.r, a.s, R=R, R_check=R_check, stable=stable)


def window_indicator(pd: PairData, a: Wavepacket) -> bool:
    """1_O(τ_x + T⁻¹α_χ)."""
    shifted = a.tau.x + pd.alpha_chi.alpha * Fraction(pd.p) ** a.N
    v = vp(shifted, pd.p)
    return v is None or v >= 0


def window_sign(pd: PairData, N: int) -> int:
    """Sinal s tal que Op⁰ preserva χ-vetores em τ_x = s·T⁻¹α_χ.

    Mede o escalar de Op⁰ num vetor [0, χ]; quando os dois sinais servem
    (N ≥ c(χ)) devolve +1.
    """
    M = pd.unit_precision()
    shell = shell_vector(pd.p, M, 0, pd.chi)
    base = pd.alpha_chi.alpha * Fraction(pd.p) ** N
    for sign in (1, -1):
        image = op_zero(sign * base, shell, N, pd.chi)
        if abs(image.inner(shell) - 1) < STABILITY_TOL:
            return sign
    raise PreconditionError(f"[RELCHAR] nenhum sinal de janela serve em N = {N}")


def unit_indicator(value: Fraction, p: int, level: int) -> bool:
    """1_{U(level)}(value); U(0) = O^×."""
    if vp(value, p) != 0:
        return False
    if level == 0:
        return True
    return reduce_integral(value, p, level) == 1


def table_value(pd: PairData, a: Wavepacket) -> Fraction:
    """Valor exato da tabela de quatro casos (sem o fator de janela em τ_x)."""
    N, r, s, c = a.N, a.r, a.s, pd.c_pair
    q = pd.p
    if r == 0 and s == 0:
        return Fraction(max(0, 2 * N - c + 1))
    if s == 0:
        return Fraction(1, x_count(r, q)) if 2 * N + r >= c else Fraction(0)
    if r == 0:
        return Fraction(1, x_count(s, q)) if 2 * N + s >= c else Fraction(0)
    ratio = pd.alpha_pair / (a.T * a.tau.y * a.T * a.tau.z)
    if not unit_indicator(ratio, q, min(r, s)):
        return Fraction(0)
    return Fraction(1, x_count(max(r, s), q))


def relchar_table(pd: PairData, a: Wavepacket) -> RelCharResult:
    check_hypotheses(pd, a)
    exact = table_value(pd, a) if window_indicator(pd, a) else Fraction(0)
    value = a.coeff * float(exact)
    return RelCharResult(complex(value), "table", a.N, _tau_echo(a), a.r, a.s, exact=exact)


def uncertainty_holds(pd: PairData, a: Wavepacket, value: complex, tol: float = 1e-8) -> bool:
    """Na quarta casa, valor não nulo só com N ≥ (condutor relevante)/2."""
    if a.r == 0 or a.s == 0 or abs(value) <= tol:
        return True
    pi = pd.pi
    if isinstance(pi, PrincipalSeries):
        flat, sharp = chi_flat_sharp(pi.chi0, pd.chi)
        return 2 * a.N >= max(conductor(flat), conductor(sharp))
    assert isinstance(pi, Supercuspidal)
    return 2 * a.N >= conductor(pi.twisted_xi(pd.chi.inverse()))
