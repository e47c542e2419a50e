"""Caracteres multiplicativos de F^× e E^×, condutores, X_n e o dado α_χ.

Um ``MulChar`` é dado por expoentes contra os geradores do grupo de unidades
do anel residual e pelo valor unitário em ϖ (ou ϖ_E). A fase em uma unidade
é Σ e_i·dlog_i/o_i mod 1, mantida como ``Fraction``.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator, Optional

from .exceptions import NoSolutionError, NonGenericPairError, PreconditionError
from .local_field import (
    ExtElt,
    LocalElt,
    Number,
    frac_of_fraction,
    reduce_integral,
    uniformizer_power,
    unit_residue,
    vp,
)
from .residue import (
    RAMIFIED,
    ResidueElt,
    ResidueRingCfg,
    UnitGroupStructure,
    canonical_generator,
    ring_make,
    unit_group,
)

if TYPE_CHECKING:
    from .local_factors import RepGL2

logger = logging.getLogger(__name__)


def _root(phase: Fraction) -> complex:
    return cmath.exp(2j * cmath.pi * float(phase))


@dataclass(frozen=True)
class MulChar:
    """Caráter unitário: expoentes nas unidades e valor em ϖ."""

    cfg: ResidueRingCfg
    exps: tuple[int, ...]
    wpi: complex = 1 + 0j

    @property
    def group(self) -> UnitGroupStructure:
        return unit_group(ring_make(self.cfg))

    @property
    def p(self) -> int:
        return self.cfg.p

    def phase(self, u: ResidueElt) -> Fraction:
        """Fase de χ(u) em Q/Z; ``u`` pode vir de um anel de precisão maior."""
        if u.cfg != self.cfg:
            u = ring_make(u.cfg).reduce(u, self.cfg.m)
        group = self.group
        total = Fraction(0)
        for e, d, o in zip(self.exps, group.dlog(u), group.orders):
            total += Fraction(e * d, o)
        return total - (total.numerator // total.denominator)

    def __call__(self, u: ResidueElt) -> complex:
        return _root(self.phase(u))

    def at_unit_int(self, a: int) -> complex:
        """χ(a) para um inteiro a primo com p (caráter do corpo base)."""
        return self(ring_make(self.cfg).elt(a))

    def value_at(self, x: Number) -> complex:
        """χ(x) para x ∈ F^× racional: wpi^{v(x)}·χ(unidade)."""
        v = vp(x, self.p)
        if v is None:
            raise PreconditionError("[CHAR] caráter avaliado em zero")
        return self.wpi**v * self.at_unit_int(unit_residue(x, self.p, self.cfg.m))

    def __mul__(self, other: "MulChar") -> "MulChar":
        m = max(self.cfg.m, other.cfg.m)
        a, b = self.at_precision(m), other.at_precision(m)
        orders = a.group.orders
        exps = tuple((x + y) % o for x, y, o in zip(a.exps, b.exps, orders))
        return MulChar(a.cfg, exps, a.wpi * b.wpi)

    def inverse(self) -> "MulChar":
        orders = self.group.orders
        return MulChar(self.cfg, tuple((-e) % o for e, o in zip(self.exps, orders)), self.wpi.conjugate())

    def twist(self, z: complex) -> "MulChar":
        """Torção não ramificada: multiplica o valor em ϖ por z."""
        return MulChar(self.cfg, self.exps, self.wpi * z)

    def with_wpi(self, wpi: complex) -> "MulChar":
        return MulChar(self.cfg, self.exps, wpi)

    def at_precision(self, m: int) -> "MulChar":
        """Mesmo caráter sobre o anel de precisão m (m ≥ condutor, em unidades de p)."""
        if m == self.cfg.m:
            return self
        target_cfg = self.cfg.with_precision(m)
        target = ring_make(target_cfg)
        group = unit_group(target)
        exps = []
        for g, o in zip(group.generators, group.orders):
            phase = self.phase(ring_make(self.cfg).elt(*g.coords)) if m < self.cfg.m else self.phase(g)
            scaled = phase * o
            if scaled.denominator != 1:
                raise PreconditionError(f"[CHAR] caráter não é definido na precisão {m}")
            exps.append(int(scaled) % o)
        return MulChar(target_cfg, tuple(exps), self.wpi)

    def is_trivial_on_units(self) -> bool:
        return all(e == 0 for e in self.exps)

    def key(self) -> tuple:
        return (self.cfg, self.exps, round(self.wpi.real, 12), round(self.wpi.imag, 12))

    def describe(self) -> dict:
        """Serialização (p, m, extensão, expoentes, fase de χ(ϖ))."""
        return {
            "p": self.cfg.p,
            "m": self.cfg.m,
            "ext": self.cfg.ext,
            "exps": list(self.exps),
            "wpi_phase": round(cmath.phase(self.wpi) / (2 * cmath.pi) % 1.0, 12),
        }


def base_char(p: int, m: int, exp: int, wpi: complex = 1 + 0j) -> MulChar:
    """Caráter de (Z/p^m)^× com χ(g) = e^{2πi·exp/φ(p^m)} no gerador canônico."""
    cfg = ResidueRingCfg(p, m)
    order = unit_group(ring_make(cfg)).orders[0]
    return MulChar(cfg, (exp % order,), wpi)


def trivial_char(cfg: ResidueRingCfg) -> MulChar:
    group = unit_group(ring_make(cfg))
    return MulChar(cfg, tuple(0 for _ in group.orders))


def _principal_generators(cfg: ResidueRingCfg, n: int) -> Iterator[ResidueElt]:
    """Geradores de U(n) = 1 + ϖ^n O no anel ``cfg`` (n em unidades de ϖ do anel)."""
    ring = ring_make(cfg)
    p = cfg.p
    top = cfg.m * cfg.ram_index
    if cfg.ext == RAMIFIED:
        residues = [(c, 0) for c in range(1, p)]
    elif cfg.is_extension:
        residues = [(c, d) for c in range(p) for d in range(p) if c or d]
    else:
        residues = [(c, 0) for c in range(1, p)]
    for j in range(max(n, 1), top):
        if cfg.ext == RAMIFIED:
            half, odd = divmod(j, 2)
            for c, _ in residues:
                coord = c * p**half
                yield ring.elt(1, coord) if odd else ring.elt(1 + coord, 0)
        else:
            for c, d in residues:
                scale = p**j
                yield ring.elt(1 + c * scale, d * scale) if cfg.is_extension else ring.elt(1 + c * scale)


def conductor(chi: MulChar) -> int:
    """Menor n ≥ 0 com χ trivial em U(n); em unidades de ϖ_E para caracteres de E."""
    cfg = chi.cfg
    if not cfg.is_extension:
        p, m = cfg.p, cfg.m
        e = chi.exps[0]
        phi_m = p ** (m - 1) * (p - 1)
        if e % phi_m == 0:
            return 0
        for n in range(1, m + 1):
            if e * p ** (n - 1) * (p - 1) % phi_m == 0:
                return n
        return m
    if chi.is_trivial_on_units():
        return 0
    top = cfg.m * cfg.ram_index
    for n in range(1, top + 1):
        if all(chi.phase(g) == 0 for g in _principal_generators(cfg, n)):
            return n
    return top


def enumerate_X(n: int, p: int) -> list[MulChar]:
    """Os caracteres de (O/p^n)^×, com wpi = 1, em ordem de expoente."""
    if n < 0:
        raise PreconditionError(f"[CHAR] n = {n} negativo")
    if n == 0:
        return [base_char(p, 1, 0)]
    order = p ** (n - 1) * (p - 1)
    return [base_char(p, n, e) for e in range(order)]


def x_count(n: int, q: int) -> int:
    """|X_n| = q^{n−1}(q−1) para n ≥ 1 e 1 para n = 0."""
    return 1 if n == 0 else q ** (n - 1) * (q - 1)


@dataclass(frozen=True)
class AlphaDatum:
    """α com χ(1+x) = ψ(αx) para todo x ∈ p^domain (ou ϖ_E^domain)."""

    alpha: Fraction
    domain: int
    unit_precision: int
    elt: Optional[ExtElt] = None

    def local(self, p: int) -> LocalElt:
        return LocalElt.from_fraction(self.alpha, p, max(self.unit_precision, 1))


def alpha_of(chi: MulChar) -> AlphaDatum:
    """Resolve χ(1+x) = ψ(α_χ x) em p^{⌈n/2⌉} por busca exaustiva."""
    n = conductor(chi)
    if n == 0:
        raise PreconditionError("[CHAR] α_χ exige caráter ramificado")
    if chi.cfg.is_extension:
        return _alpha_extension(chi, n)

    p = chi.p
    d = (n + 1) // 2
    width = n - d
    modulus = p**width
    chi_n = chi.at_precision(max(n, 1)) if chi.cfg.m > n else chi
    targets = [(y, chi_n.phase(ring_make(chi_n.cfg).elt(1 + p**d * y))) for y in range(modulus)]

    g = canonical_generator(p)
    count = 1 if width == 0 else modulus // p * (p - 1)
    for k in range(count):
        a = pow(g, k, modulus) if width else 1
        alpha = Fraction(a, p**n)
        if all(frac_of_fraction(alpha * p**d * y, p) == phase for y, phase in targets):
            return AlphaDatum(alpha, d, width)
    raise NoSolutionError(f"[CHAR] sem α para {chi.describe()}")


def _psi_level(cfg: ResidueRingCfg) -> int:
    """Expoente do condutor de ψ_E = ψ∘Tr: 1 no caso ramificado (diferente), 0 caso contrário."""
    return 1 if cfg.ext == RAMIFIED else 0


def _ext_from_coords(coords: tuple[int, ...], disc: int) -> ExtElt:
    return ExtElt.of(coords[0], coords[1] if len(coords) > 1 else 0, disc)


def _alpha_extension(chi: MulChar, n: int) -> AlphaDatum:
    cfg = chi.cfg
    p = cfg.p
    e = cfg.ram_index
    ramified = cfg.ext == RAMIFIED
    disc = cfg.disc
    delta = _psi_level(cfg)
    d = (n + 1) // 2
    width = n - d

    ring = ring_make(cfg)
    step = uniformizer_power(d, disc, ramified, p)
    coarse_m = max(1, -(-width // e))
    coarse = ring_make(cfg.with_precision(coarse_m))

    targets = []
    for y in coarse.elements():
        yv = _ext_from_coords(y.coords, disc)
        x = step * yv
        point = ring.elt(1 + reduce_integral(x.a, p, cfg.m), reduce_integral(x.b, p, cfg.m))
        targets.append((yv, chi.phase(point)))

    shift = uniformizer_power(-(n + delta), disc, ramified, p)
    candidates = [ring_make(cfg.with_precision(coarse_m)).one] if width == 0 else sorted(
        coarse.units(), key=lambda u: unit_group(coarse).dlog(u)
    )
    for cand in candidates:
        alpha = shift * _ext_from_coords(cand.coords, disc)
        if all(frac_of_fraction((alpha * step * yv).trace(), p) == phase for yv, phase in targets):
            return AlphaDatum(alpha.norm(), d, width, alpha)
    raise NoSolutionError(f"[CHAR] sem α_E para {chi.describe()}")


def compose_norm(nu: MulChar, ext_cfg: ResidueRingCfg) -> MulChar:
    """ν_E = ν∘Nm como caráter de E^× na precisão de ``ext_cfg``."""
    ring = ring_make(ext_cfg)
    group = unit_group(ring)
    nu_b = nu.at_precision(ext_cfg.m)
    base = ring_make(nu_b.cfg)
    exps = []
    for g, o in zip(group.generators, group.orders):
        scaled = nu_b.phase(base.elt(ring.norm_int(g))) * o
        if scaled.denominator != 1:
            raise PreconditionError("[CHAR] ν∘Nm não é definido nesta precisão")
        exps.append(int(scaled) % o)
    if ext_cfg.ext == RAMIFIED:
        wpi = nu.wpi * nu.at_unit_int(-1)
    else:
        wpi = nu.wpi**2
    return MulChar(ext_cfg, tuple(exps), wpi)


def chi_flat_sharp(chi0: MulChar, chi: MulChar) -> tuple[MulChar, MulChar]:
    """(χ_♭, χ_♯) = (χ₀χ⁻¹, χ₀⁻¹χ⁻¹)."""
    inv = chi.inverse()
    return chi0 * inv, chi0.inverse() * inv


def alpha_pair(pi: "RepGL2", chi: MulChar) -> Fraction:
    """α_{π,χ}: α_{χ♭}α_{χ♯} (série principal) ou Nm(α_{ξχ_E⁻¹}) (supercuspidal)."""
    from .local_factors import PrincipalSeries

    if isinstance(pi, PrincipalSeries):
        flat, sharp = chi_flat_sharp(pi.chi0, chi)
        if conductor(flat) == 0 or conductor(sharp) == 0:
            raise NonGenericPairError("[CHAR] par não genérico: χ_♭ ou χ_♯ não ramificado")
        return alpha_of(flat).alpha * alpha_of(sharp).alpha
    twisted = pi.twisted_xi(chi.inverse())
    return alpha_of(twisted).alpha

