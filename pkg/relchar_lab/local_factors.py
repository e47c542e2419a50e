"""Somas de Gauss, integrais zeta de GL₁ e fatores ε e γ.

As somas de Gauss usam a medida aditiva (vol(O, du) = 1):

    g(ν, ψ_t) = q^{-L} Σ_{x ∈ (O/p^L)^×} ν(x) ψ(t x),

com L grande o bastante para ν e para ψ_t. O fator ε segue a fórmula
ε(1/2, χ, ψ) = q^{c/2} χ(ϖ^{c+d}) g(χ⁻¹, ψ(ϖ^{-(c+d)}·)), onde d é o expoente
do condutor do caráter aditivo (d = 1 para ψ_E = ψ∘Tr sobre E ramificado).
"""

from __future__ import annotations

import cmath
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from sympy import legendre_symbol

from .characters import MulChar, alpha_of, compose_norm, conductor
from .exceptions import (
    LFactorPresentError,
    PreconditionError,
    UnsupportedTestFunctionError,
)
from .local_field import (
    ExtElt,
    Number,
    frac_of_fraction,
    reduce_integral,
    uniformizer_power,
    vp,
)
from .residue import RAMIFIED, UNRAMIFIED, ResidueRingCfg, ring_make, unit_group

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * cmath.pi


@dataclass(frozen=True)
class GammaMonomial:
    """γ(π ⊗ ν|·|^s) = c·z^k com z = q^{-s}."""

    c: complex
    k: int

    def at(self, z: complex) -> complex:
        return self.c * z**self.k


@dataclass(frozen=True)
class PrincipalSeries:
    """π = χ₀ ⊞ χ₀⁻¹."""

    chi0: MulChar

    kind = "ps"

    def key(self) -> tuple:
        return ("ps",) + self.chi0.key()

    def describe(self) -> dict:
        return {"kind": "ps", "chi0": self.chi0.describe()}


@dataclass(frozen=True)
class Supercuspidal:
    """π associada a ρ = Ind_{E/F} ξ, com ξ|_{F^×} = η_{E/F}."""

    ext: ResidueRingCfg
    xi: MulChar

    kind = "sc"

    @property
    def f(self) -> int:
        return self.ext.inertia_degree

    @property
    def delta(self) -> int:
        return 1 if self.ext.ext == RAMIFIED else 0

    def twisted_xi(self, nu: MulChar) -> MulChar:
        """ξ·ν_E numa precisão que comporta ξ e ν∘Nm."""
        m = max(self.xi.cfg.m, conductor(nu), 1)
        ext_cfg = self.ext.with_precision(m)
        return self.xi.at_precision(m) * compose_norm(nu, ext_cfg)

    def key(self) -> tuple:
        return ("sc", self.ext) + self.xi.key()

    def describe(self) -> dict:
        return {"kind": "sc", "ext": self.ext.ext, "u": self.ext.u, "xi": self.xi.describe()}


RepGL2 = Union[PrincipalSeries, Supercuspidal]


def _level_ring_precision(cfg: ResidueRingCfg, level: int) -> int:
    """Precisão (em dígitos de p) de um anel que enxerga ϖ^level."""
    return max(1, -(-level // cfg.ram_index))


def _unit_sum(nu: MulChar, t: Union[Fraction, ExtElt], level: int) -> complex:
    """q^{-K} Σ_{x ∈ (O/ϖ^K)^×} ν(x) ψ(Tr(t x)), K ≥ level em unidades de ϖ."""
    cfg = nu.cfg
    m = _level_ring_precision(cfg, level)
    ring = ring_make(cfg.with_precision(m))
    nu_m = nu.at_precision(m)
    group = unit_group(ring)
    p = cfg.p

    total = 0j
    if not cfg.is_extension:
        g = group.generators[0].a
        order = group.orders[0]
        e = nu_m.exps[0]
        x = 1
        for k in range(order):
            phase = Fraction(e * k, order) + frac_of_fraction(t * x, p)
            total += cmath.exp(TWO_PI_I * float(phase))
            x = x * g % ring.modulus
        return total / ring.modulus

    for u in ring.units():
        xe = ExtElt.of(u.a, u.b, cfg.disc)
        phase = nu_m.phase(u) + frac_of_fraction((t * xe).trace(), p)
        total += cmath.exp(TWO_PI_I * float(phase))
    return total / (cfg.residue_size ** (m * cfg.ram_index))


def gauss_sum(nu: MulChar, t: Number) -> complex:
    """g(ν, ψ_t) sobre F com medida aditiva."""
    v = vp(t, nu.p)
    depth = 0 if v is None else max(0, -v)
    level = max(conductor(nu), depth, 1)
    return _unit_sum(nu, Fraction(t), level)


def gauss_sum_ext(nu: MulChar, t: ExtElt) -> complex:
    """g(ν, ψ_E(t·)) sobre E, com ψ_E = ψ∘Tr."""
    cfg = nu.cfg
    ramified = cfg.ext == RAMIFIED
    delta = 1 if ramified else 0
    v = _ext_valuation(t, cfg)
    depth = 0 if v is None else max(0, -v - delta)
    level = max(conductor(nu), depth, 1)
    return _unit_sum(nu, t, level)


def _ext_valuation(t: ExtElt, cfg: ResidueRingCfg) -> Union[int, None]:
    p = cfg.p
    va, vb = vp(t.a, p), vp(t.b, p)
    e = cfg.ram_index
    vals = []
    if va is not None:
        vals.append(e * va)
    if vb is not None:
        vals.append(e * vb + (1 if cfg.ext == RAMIFIED else 0))
    return min(vals) if vals else None


def epsilon_factor(chi: MulChar) -> complex:
    """ε(1/2, χ, ψ_F) ou ε(1/2, χ, ψ_E) conforme o anel do caráter."""
    cfg = chi.cfg
    delta = 1 if cfg.ext == RAMIFIED else 0
    c = conductor(chi)
    if c == 0:
        return chi.wpi ** (-delta) if delta else 1 + 0j
    a = c + delta
    q_e = cfg.residue_size
    inv = chi.inverse()
    if cfg.is_extension:
        t = uniformizer_power(-a, cfg.disc, cfg.ext == RAMIFIED, cfg.p)
        g = gauss_sum_ext(inv, t)
    else:
        g = gauss_sum(inv, Fraction(1, cfg.p**a))
    return q_e ** (c / 2) * chi.wpi**a * g


def epsilon_gl1(chi: MulChar) -> complex:
    """ε(1/2, χ, ψ) para caráter do corpo base."""
    if chi.cfg.is_extension:
        raise PreconditionError("[FACTORS] epsilon_gl1 espera caráter de F^×")
    return epsilon_factor(chi)


def epsilon_at(chi: MulChar, s: complex) -> complex:
    """ε(s, χ, ψ) = q^{c(1/2 − s)} ε(1/2, χ, ψ)."""
    c = conductor(chi)
    return chi.p ** (c * (0.5 - s)) * epsilon_gl1(chi)


def quadratic_character(ext: ResidueRingCfg) -> MulChar:
    """η_{E/F} como caráter de F^×."""
    p = ext.p
    base_cfg = ResidueRingCfg(p, 1)
    if ext.ext == UNRAMIFIED:
        return MulChar(base_cfg, (0,), -1 + 0j)
    return MulChar(base_cfg, ((p - 1) // 2,), complex(legendre_symbol(p - 1, p)))


def weil_constant(ext: ResidueRingCfg) -> complex:
    """λ(E/F, ψ) = ε(1/2, η_{E/F}, ψ) para ψ não ramificado."""
    if ext.ext == UNRAMIFIED:
        return 1 + 0j
    return epsilon_gl1(quadratic_character(ext))


def is_galois_invariant(xi: MulChar) -> bool:
    """ξ = ξ^σ, testado nos geradores e em ϖ_E."""
    ring = ring_make(xi.cfg)
    group = unit_group(ring)
    for g in group.generators:
        if xi.phase(ring.conj(g)) != xi.phase(g):
            return False
    if xi.cfg.ext == RAMIFIED and xi.phase(ring.elt(-1)) != 0:
        return False
    return True


def xi_admissible(ext: ResidueRingCfg, xi: MulChar) -> bool:
    """ξ|_{F^×} = η_{E/F} e ξ ≠ ξ^σ."""
    p = ext.p
    eta = quadratic_character(ext)
    ring = ring_make(xi.cfg)
    for a in range(1, p ** xi.cfg.m):
        if a % p == 0:
            continue
        if abs(xi(ring.elt(a)) - eta.at_unit_int(a)) > 1e-12:
            return False
    eta_p = eta.value_at(p)
    xi_p = xi.wpi if ext.ext == UNRAMIFIED else xi.wpi**2
    if abs(xi_p - eta_p) > 1e-12:
        return False
    return not is_galois_invariant(xi)


def sc_frame(ext: ResidueRingCfg, cond: int) -> tuple[ResidueRingCfg, complex]:
    """Anel de precisão mínima para condutor ``cond`` e o valor ξ(ϖ_E) forçado por η."""
    m = max(1, -(-cond // ext.ram_index))
    if ext.ext == UNRAMIFIED:
        return ext.with_precision(m), -1 + 0j
    return ext.with_precision(m), (1 + 0j if legendre_symbol(ext.p - 1, ext.p) == 1 else 1j)


def find_admissible_xi(ext: ResidueRingCfg, cond: int) -> MulChar:
    """Primeiro ξ admissível (ordem lexicográfica de expoentes) com condutor ``cond``."""
    cfg, wpi = sc_frame(ext, cond)
    group = unit_group(ring_make(cfg))
    for exps in _exponent_vectors(group.orders):
        xi = MulChar(cfg, exps, wpi)
        if conductor(xi) == cond and xi_admissible(ext, xi):
            return xi
    raise PreconditionError(f"[FACTORS] nenhum ξ admissível com condutor {cond} sobre {ext}")


def _exponent_vectors(orders: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    if not orders:
        yield ()
        return
    for head in range(orders[0]):
        for tail in _exponent_vectors(orders[1:]):
            yield (head,) + tail


_GAMMA_CACHE: dict[tuple, GammaMonomial] = {}
_GAMMA_LOCK = threading.Lock()


def gamma_gl2(pi: RepGL2, nu: MulChar) -> GammaMonomial:
    """γ(π ⊗ ν|·|^s) como monômio em z; erro se algum fator L aparece."""
    key = pi.key() + nu.key()
    cached = _GAMMA_CACHE.get(key)
    if cached is not None:
        return cached

    if isinstance(pi, PrincipalSeries):
        first = pi.chi0 * nu
        second = pi.chi0.inverse() * nu
        f1, f2 = conductor(first), conductor(second)
        if f1 == 0 or f2 == 0:
            raise LFactorPresentError("[FACTORS] χ₀^{±1}ν não ramificado: γ não é monômio")
        result = GammaMonomial(epsilon_gl1(first) * epsilon_gl1(second), f1 + f2)
    else:
        twisted = pi.twisted_xi(nu)
        c_e = conductor(twisted)
        if c_e == 0:
            raise LFactorPresentError("[FACTORS] ξν_E não ramificado: γ não é monômio")
        value = weil_constant(pi.ext) * epsilon_factor(twisted)
        result = GammaMonomial(value, pi.f * (c_e + pi.delta))

    with _GAMMA_LOCK:
        _GAMMA_CACHE[key] = result
    return result


def gamma_value(pi: RepGL2, nu: MulChar) -> complex:
    """γ(1/2, π ⊗ ν) avaliado diretamente pelos fatores ε, sem passar pelo monômio.

    ``nu`` pode carregar um valor arbitrário em ϖ (torção não ramificada).
    """
    if isinstance(pi, PrincipalSeries):
        return epsilon_gl1(pi.chi0 * nu) * epsilon_gl1(pi.chi0.inverse() * nu)
    return weil_constant(pi.ext) * epsilon_factor(pi.twisted_xi(nu))


# --- integrais zeta de GL₁ ------------------------------------------------


@dataclass(frozen=True)
class CosetIndicator:
    """1_{center + p^level}."""

    center: Fraction
    level: int


@dataclass(frozen=True)
class PhasedBall:
    """scale·ψ(phase·y)·1_{p^level}(y): transformada de Fourier de um coset."""

    phase: Fraction
    level: int
    scale: Fraction


@dataclass(frozen=True)
class TestFunction:
    """Combinação linear finita de indicadores de cosets."""

    terms: tuple[tuple[complex, CosetIndicator], ...]

    __test__ = False

    @classmethod
    def coset(cls, center: Number, level: int) -> "TestFunction":
        return cls(((1 + 0j, CosetIndicator(Fraction(center), level)),))

    @classmethod
    def shell(cls, k: int) -> "TestFunction":
        """1_{ϖ^k O^×} = 1_{p^k} − 1_{p^{k+1}}."""
        return cls(((1 + 0j, CosetIndicator(Fraction(0), k)), (-1 + 0j, CosetIndicator(Fraction(0), k + 1))))


def fourier(f: TestFunction, q: int) -> tuple[tuple[complex, PhasedBall], ...]:
    """f̂(y) = ∫ f(x)ψ(xy)dx, exata para cosets."""
    if not isinstance(f, TestFunction):
        raise UnsupportedTestFunctionError(f"[FACTORS] função teste não suportada: {f!r}")
    out = []
    for coeff, term in f.terms:
        out.append((coeff, PhasedBall(term.center, -term.level, Fraction(1) / Fraction(q) ** term.level)))
    return tuple(out)


@dataclass(frozen=True)
class QuasiChar:
    """χ = η|·|^s com η unitário."""

    eta: MulChar
    s: complex

    @property
    def x(self) -> complex:
        """η(ϖ)q^{-s}."""
        return self.eta.wpi * self.eta.p ** (-self.s)

    def dual(self) -> "QuasiChar":
        return QuasiChar(self.eta.inverse(), 1 - self.s)


def l_factor(chi: QuasiChar) -> complex:
    if conductor(chi.eta) > 0:
        return 1 + 0j
    return 1 / (1 - chi.x)


def epsilon_quasi(chi: QuasiChar) -> complex:
    return epsilon_at(chi.eta, chi.s)


def _shell_sum(chi: QuasiChar, j: int, phase: Fraction, center_unit: Union[int, None], width: int) -> complex:
    """∫_{ϖ^j O^×} ψ(phase·y) 1_{coset}(y) χ(y) d^×y.

    ``center_unit``/``width`` restringem a unidade a center_unit + p^width.
    """
    eta = chi.eta
    p = eta.p
    depth = max(0, -((vp(phase, p) if phase else 10**9) + j))
    level = max(conductor(eta), depth, width, 1)
    ring = ring_make(ResidueRingCfg(p, level))
    eta_l = eta.at_precision(level)
    scale = Fraction(p) ** j
    modulus = p**width
    total = 0j
    for x in range(1, ring.modulus):
        if x % p == 0:
            continue
        if center_unit is not None and (x - center_unit) % modulus:
            continue
        ph = eta_l.phase(ring.elt(x)) + frac_of_fraction(phase * scale * x, p)
        total += cmath.exp(TWO_PI_I * float(ph))
    unit_measure = Fraction(p, p - 1) / Fraction(ring.modulus)
    return complex(chi.x**j) * total * float(unit_measure)


def _tail(chi: QuasiChar, start: int) -> complex:
    """Σ_{j ≥ start} ∫_{ϖ^j O^×} χ d^×y (ψ já trivial)."""
    if conductor(chi.eta) > 0:
        return 0j
    x = chi.x
    if abs(x) >= 1:
        raise PreconditionError("[FACTORS] série geométrica divergente: exige Re(s) > 0")
    return x**start / (1 - x)


def _zeta_coset(term: CosetIndicator, chi: QuasiChar) -> complex:
    p = chi.eta.p
    v = vp(term.center, p)
    if v is None or v >= term.level:
        return _tail(chi, term.level)
    unit = (term.center / Fraction(p) ** v)
    unit_int = reduce_integral(unit, p, term.level - v)
    return _shell_sum(chi, v, Fraction(0), unit_int, term.level - v)


def _zeta_phased(term: PhasedBall, chi: QuasiChar) -> complex:
    p = chi.eta.p
    vb = vp(term.phase, p)
    stop = term.level if vb is None else max(term.level, -vb)
    total = 0j
    for j in range(term.level, stop):
        total += _shell_sum(chi, j, term.phase, None, 0)
    total += _tail(chi, stop)
    return complex(term.scale) * total


def zeta_Z(f: Union[TestFunction, tuple], chi: QuasiChar) -> complex:
    """Z(f, χ) = ∫ f(x)χ(x) d^×x para a família de cosets ou suas transformadas."""
    if isinstance(f, TestFunction):
        return sum((c * _zeta_coset(t, chi) for c, t in f.terms), 0j)
    if isinstance(f, tuple) and all(isinstance(t, PhasedBall) for _, t in f):
        return sum((c * _zeta_phased(t, chi) for c, t in f), 0j)
    raise UnsupportedTestFunctionError(f"[FACTORS] função teste não suportada: {f!r}")


def verify_gl1_fe(f: TestFunction, chi: QuasiChar) -> float:
    """|Z(f,χ)ε(χ)/L(χ) − Z(f̂,χ^∨)/L(χ^∨)|."""
    lhs = zeta_Z(f, chi) * epsilon_quasi(chi) / l_factor(chi)
    dual = chi.dual()
    rhs = zeta_Z(fourier(f, chi.eta.p), dual) / l_factor(dual)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class TwistResidual:
    """Resíduos das duas orientações da lei de torção."""

    inverse_law: float
    direct_law: float


def tate_twist_residuals(chi: MulChar, omega: MulChar) -> TwistResidual:
    n = conductor(chi)
    if n == 0 or n % 2:
        raise PreconditionError(f"[FACTORS] lei de torção exige c(χ) par e positivo, veio {n}")
    if 2 * conductor(omega) > n:
        raise PreconditionError("[FACTORS] lei de torção exige c(ω) ≤ c(χ)/2")
    alpha = alpha_of(chi).alpha
    eps_twisted = epsilon_gl1(chi * omega)
    eps = epsilon_gl1(chi)
    w = omega.value_at(alpha)
    return TwistResidual(abs(eps_twisted - eps / w), abs(eps_twisted - w * eps))


def verify_tate_twist(chi: MulChar, omega: MulChar) -> float:
    """Resíduo de ε(1/2, χω) = ω(α_χ)⁻¹ ε(1/2, χ) (ψ(x) = e^{2πi·frac(x)})."""
    return tate_twist_residuals(chi, omega).inverse_law

