"""Integrais de pacotes de onda sobre a hipérbole Hyp(π, χ).

Hyp(π, χ) = {(x, y, z): x = ±α_χ, yz = α_{π,χ}}, parametrizada por ξ_y com a
medida multiplicativa d^×ξ_y (vol(O^×) = 1) e z = α_{π,χ}/ξ_y. O sinal de x
segue o sinal de janela detectado em Op⁰.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .characters import x_count
from .local_field import vp
from .op_calculus import Wavepacket, WavepacketSum
from .relative_character import PairData, unit_indicator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HyperbolaSpec:
    pd: PairData
    x_sign: int = -1

    def __post_init__(self) -> None:
        if self.x_sign not in (1, -1):
            raise ValueError(f"x_sign deve ser ±1, veio {self.x_sign}")

    @property
    def x(self) -> Fraction:
        return self.x_sign * self.pd.alpha_chi.alpha


@dataclass(frozen=True)
class LatticeResult:
    value: Fraction
    final: bool


def _in_ball(value: Fraction, center: Fraction, N: int, p: int) -> bool:
    """value ∈ center + p^{-N}O."""
    v = vp(value - center, p)
    return v is None or v >= -N


def x_slice(hs: HyperbolaSpec, a: Wavepacket) -> bool:
    return _in_ball(hs.x, a.T * a.tau.x, a.N, a.p)


def _center_unit(center: Fraction, N: int, r: int, p: int) -> Fraction:
    """Parte unitária de Tτ, com v(Tτ) = −N − r."""
    return center * Fraction(p) ** (N + r)


def hyp_integral_closed(hs: HyperbolaSpec, a: Wavepacket) -> Fraction:
    """∫_{Hyp} 1_τ^T pelas valuações admissíveis de ξ_y, sem o coeficiente do pacote.

    Com r = 0 a condição em ξ_y é v(ξ_y) ≥ −N; com r ≥ 1 é v(ξ_y) = −N − r e
    unidade fixa módulo p^r, de medida 1/|X_r|. O mesmo vale para z = α/ξ_y
    com s, e v(z) = −c − v(ξ_y).
    """
    if not x_slice(hs, a):
        return Fraction(0)
    pd = hs.pd
    p, N, r, s = a.p, a.N, a.r, a.s
    c = -vp(pd.alpha_pair, p)
    if r == 0 and s == 0:
        # v(ξ_y) ∈ [−N, N − c]
        shells = range(-N, N - c + 1)
        return Fraction(len(shells))
    if s == 0:
        v_z = -c + N + r
        return Fraction(1, x_count(r, p)) if v_z >= -N else Fraction(0)
    if r == 0:
        v_y = -c + N + s
        return Fraction(1, x_count(s, p)) if v_y >= -N else Fraction(0)
    if -c + N + r != -N - s:
        return Fraction(0)
    u_y = _center_unit(a.T * a.tau.y, N, r, p)
    u_z = _center_unit(a.T * a.tau.z, N, s, p)
    u_alpha = pd.alpha_pair * Fraction(p) ** c
    # u_y ∈ t_y·U(r) e u_alpha/u_y ∈ t_z·U(s) se cruzam numa classe de U(max(r, s))
    if not unit_indicator(u_alpha / (u_y * u_z), p, min(r, s)):
        return Fraction(0)
    return Fraction(1, x_count(max(r, s), p))


def hyp_integral_lattice(hs: HyperbolaSpec, a: Wavepacket, depth: int) -> LatticeResult:
    """Soma em cascas v ∈ [−N − c − depth, N + depth] e classes de unidades mod p^depth."""
    if depth < 1:
        raise ValueError("depth deve ser ≥ 1")
    final = depth >= max(a.r, a.s)
    if not x_slice(hs, a):
        return LatticeResult(Fraction(0), final)
    p, N, c = a.p, a.N, hs.pd.c_pair
    modulus = p**depth
    weight = Fraction(1, x_count(depth, p))
    center_y = a.T * a.tau.y
    center_z = a.T * a.tau.z
    total = Fraction(0)
    for v in range(-N - c - depth, N + depth + 1):
        scale = Fraction(p) ** v
        for u in range(1, modulus):
            if u % p == 0:
                continue
            xi_y = scale * u
            if not _in_ball(xi_y, center_y, N, p):
                continue
            if _in_ball(hs.pd.alpha_pair / xi_y, center_z, N, p):
                total += weight
    return LatticeResult(total, final)


def hyp_integral_sum(
    hs: HyperbolaSpec, packets: Union[Wavepacket, WavepacketSum], depth: int = 0
) -> complex:
    """Linearidade: Σ c_τ·∫ 1_τ^T; ``depth`` > 0 usa a soma em reticulado."""
    items = packets.packets if isinstance(packets, WavepacketSum) else (packets,)
    total = 0j
    for a in items:
        value = hyp_integral_lattice(hs, a, depth).value if depth else hyp_integral_closed(hs, a)
        total += a.coeff * float(value)
    return total
