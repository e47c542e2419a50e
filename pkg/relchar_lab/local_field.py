"""Elementos truncados de F = Q_p, o caráter aditivo ψ e volumes de Haar.

Um ``LocalElt`` guarda a valuação e a unidade em precisão relativa ``prec``.
Para as contas exatas (produto ⋆, somas em reticulados, janelas de τ) os
elementos também podem ser manipulados como ``Fraction`` cujo denominador é
uma potência de p vezes um inteiro primo com p.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exceptions import PrecisionError, PreconditionError
from .residue import ResidueElt, ResidueRingCfg, ring_make

Number = Union[int, Fraction]


def vp(value: Number, p: int) -> Optional[int]:
    """Valuação p-ádica de um racional; ``None`` para zero."""
    r = Fraction(value)
    if r == 0:
        return None
    num, den = r.numerator, r.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def frac_of_fraction(value: Number, p: int) -> Fraction:
    """Parte fracionária p-ádica, em [0, 1) com denominador potência de p."""
    r = Fraction(value)
    num, den = r.numerator, r.denominator
    e = 0
    while den % p == 0:
        den //= p
        e += 1
    if e == 0:
        return Fraction(0)
    modulus = p**e
    top = num * pow(den, -1, modulus) % modulus
    return Fraction(top, modulus)


def psi_fraction(value: Number, p: int) -> complex:
    """ψ(x) = e^{2πi·frac(x)} para x racional."""
    return cmath.exp(2j * cmath.pi * float(frac_of_fraction(value, p)))


def unit_residue(value: Number, p: int, m: int) -> int:
    """Classe mod p^m da parte unitária de um racional não nulo."""
    r = Fraction(value)
    v = vp(r, p)
    if v is None:
        raise PreconditionError("[FIELD] zero não possui parte unitária")
    unit = r / Fraction(p) ** v
    modulus = p**m
    return unit.numerator * pow(unit.denominator, -1, modulus) % modulus


def reduce_integral(value: Number, p: int, m: int) -> int:
    """Classe mod p^m de um racional p-integral."""
    r = Fraction(value)
    v = vp(r, p)
    if v is not None and v < 0:
        raise PreconditionError(f"[FIELD] {r} não é inteiro p-ádico")
    modulus = p**m
    return r.numerator * pow(r.denominator, -1, modulus) % modulus


@dataclass(frozen=True)
class LocalElt:
    """Número p-ádico truncado: ϖ^v·u com u unidade mod p^prec."""

    p: int
    v: Optional[int]
    u: Optional[ResidueElt] = None

    @classmethod
    def zero(cls, p: int) -> "LocalElt":
        return cls(p, None, None)

    @classmethod
    def make(cls, p: int, v: int, unit: int, prec: int) -> "LocalElt":
        if unit % p == 0:
            raise PreconditionError(f"[FIELD] {unit} não é unidade mod {p}")
        ring = ring_make(ResidueRingCfg(p, prec))
        return cls(p, v, ring.elt(unit))

    @classmethod
    def from_fraction(cls, value: Number, p: int, prec: int) -> "LocalElt":
        v = vp(value, p)
        if v is None:
            return cls.zero(p)
        return cls.make(p, v, unit_residue(value, p, prec), prec)

    @property
    def is_zero(self) -> bool:
        return self.v is None

    @property
    def prec(self) -> int:
        return self.u.cfg.m if self.u is not None else 0

    @property
    def unit(self) -> int:
        if self.u is None:
            raise PreconditionError("[FIELD] zero não possui parte unitária")
        return self.u.a

    def abs(self) -> Fraction:
        if self.v is None:
            return Fraction(0)
        return Fraction(1, self.p**self.v) if self.v >= 0 else Fraction(self.p ** (-self.v))

    def to_fraction(self) -> Fraction:
        if self.v is None:
            return Fraction(0)
        return self.unit * Fraction(self.p) ** self.v

    def __mul__(self, other: "LocalElt") -> "LocalElt":
        if self.is_zero or other.is_zero:
            return LocalElt.zero(self.p)
        prec = min(self.prec, other.prec)
        return LocalElt.make(self.p, self.v + other.v, self.unit * other.unit, prec)

    def __neg__(self) -> "LocalElt":
        if self.is_zero:
            return self
        return LocalElt.make(self.p, self.v, -self.unit, self.prec)

    def __add__(self, other: "LocalElt") -> "LocalElt":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        # Precisão absoluta da soma é a menor das duas.
        absolute = min(self.v + self.prec, other.v + other.prec)
        total = self.to_fraction() + other.to_fraction()
        v = vp(total, self.p)
        if v is None or v >= absolute:
            return LocalElt.zero(self.p)
        return LocalElt.from_fraction(total, self.p, absolute - v)

    def __sub__(self, other: "LocalElt") -> "LocalElt":
        return self + (-other)

    def inverse(self) -> "LocalElt":
        if self.is_zero:
            raise PreconditionError("[FIELD] inversão do zero")
        return LocalElt.make(self.p, -self.v, pow(self.unit, -1, self.p**self.prec), self.prec)

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        return f"ϖ^{self.v}·{self.unit} (mod p^{self.prec})"


def frac_part(x: LocalElt) -> Fraction:
    """Parte fracionária de x; exige que a unidade seja conhecida mod p^{-v}."""
    if x.is_zero or x.v >= 0:
        return Fraction(0)
    depth = -x.v
    if depth > x.prec:
        raise PrecisionError(f"[FIELD] valuação {x.v} além da precisão {x.prec}")
    modulus = x.p**depth
    return Fraction(x.unit % modulus, modulus)


def psi(x: LocalElt) -> complex:
    return cmath.exp(2j * cmath.pi * float(frac_part(x)))


def psi_eval(t: LocalElt, x: LocalElt) -> complex:
    """ψ_t(x) = ψ(t·x)."""
    return psi(t * x)


@dataclass(frozen=True)
class Ball:
    """Bola aditiva p^k."""

    k: int


@dataclass(frozen=True)
class Shell:
    """Conjunto ϖ^k·U(n); n = 0 é a casca ϖ^k O^× inteira."""

    k: int
    n: int = 0


def haar_volume(region: Union[Ball, Shell], q: int, multiplicative: bool = False) -> Fraction:
    """Volume com vol(O, du) = 1 e vol(O^×, d^×u) = 1."""
    if isinstance(region, Ball):
        if multiplicative:
            raise PreconditionError("[FIELD] bola com 0 tem volume multiplicativo infinito")
        return Fraction(1, 1) / Fraction(q) ** region.k
    if isinstance(region, Shell):
        if region.n < 0:
            raise PreconditionError(f"[FIELD] U({region.n}) não definido")
        if multiplicative:
            if region.n == 0:
                return Fraction(1)
            return Fraction(q, q - 1) / Fraction(q) ** region.n
        scale = Fraction(1) / Fraction(q) ** region.k
        if region.n == 0:
            return scale * Fraction(q - 1, q)
        return scale / Fraction(q) ** region.n
    raise PreconditionError(f"[FIELD] região não suportada: {region!r}")


@dataclass(frozen=True)
class LieCoords:
    """Coordenadas (x, y, z) em g ou g*.

    Em g a matriz é [[x, y], [z, −x]]; em g* é [[ξ_x, ξ_z], [ξ_y, −ξ_x]], com
    y e z trocados para que o pareamento do traço seja diagonal.
    """

    x: Fraction
    y: Fraction
    z: Fraction

    @classmethod
    def of(cls, x: Number = 0, y: Number = 0, z: Number = 0) -> "LieCoords":
        return cls(Fraction(x), Fraction(y), Fraction(z))

    def __add__(self, other: "LieCoords") -> "LieCoords":
        return LieCoords(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "LieCoords") -> "LieCoords":
        return LieCoords(self.x - other.x, self.y - other.y, self.z - other.z)

    def scale(self, c: Number) -> "LieCoords":
        return LieCoords(self.x * c, self.y * c, self.z * c)

    def as_matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """Matriz de um elemento de g."""
        return ((self.x, self.y), (self.z, -self.x))

    def as_dual_matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """Matriz de um elemento de g*."""
        return ((self.x, self.z), (self.y, -self.x))

    def min_valuation(self, p: int) -> Optional[int]:
        vals = [v for v in (vp(c, p) for c in (self.x, self.y, self.z)) if v is not None]
        return min(vals) if vals else None


def trace_phase(pv: LieCoords, xi: LieCoords) -> Fraction:
    """Tr(pv·ξ) = 2p_xξ_x + p_yξ_y + p_zξ_z."""
    return 2 * pv.x * xi.x + pv.y * xi.y + pv.z * xi.z


def trace_pair(pv: LieCoords, xi: LieCoords, p: int) -> complex:
    """⟨pv, ξ⟩ = ψ(Tr(pv·ξ))."""
    return psi_fraction(trace_phase(pv, xi), p)


@dataclass(frozen=True)
class LatticeBox:
    """k(N) = g ∩ p^N Mat₂(O) e seu dual ϖ^{-N}k(0)^⊥ = p^{-N}O³."""

    N: int
    p: int

    def contains_k(self, pv: LieCoords) -> bool:
        v = pv.min_valuation(self.p)
        return v is None or v >= self.N

    def contains_dual(self, xi: LieCoords) -> bool:
        v = xi.min_valuation(self.p)
        return v is None or v >= -self.N

    def volume(self) -> Fraction:
        """Volume aditivo de k(N) com vol(k(0)) = 1."""
        return Fraction(1) / Fraction(self.p) ** (3 * self.N)


@dataclass(frozen=True)
class ExtElt:
    """Elemento a + bθ de E = F(θ), θ² = disc, com coordenadas racionais."""

    a: Fraction
    b: Fraction
    disc: int

    @classmethod
    def of(cls, a: Number, b: Number, disc: int) -> "ExtElt":
        return cls(Fraction(a), Fraction(b), disc)

    def __mul__(self, other: "ExtElt") -> "ExtElt":
        return ExtElt(
            self.a * other.a + self.disc * self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.disc,
        )

    def __add__(self, other: "ExtElt") -> "ExtElt":
        return ExtElt(self.a + other.a, self.b + other.b, self.disc)

    def scale(self, c: Number) -> "ExtElt":
        return ExtElt(self.a * c, self.b * c, self.disc)

    def trace(self) -> Fraction:
        return 2 * self.a

    def norm(self) -> Fraction:
        return self.a * self.a - self.disc * self.b * self.b


def uniformizer_power(k: int, disc: int, ramified: bool, p: int) -> ExtElt:
    """ϖ_E^k: p^k no caso não ramificado, θ^k = θ^{k mod 2}·p^{⌊k/2⌋} no ramificado."""
    if not ramified:
        return ExtElt.of(Fraction(p) ** k, 0, disc)
    half, odd = divmod(k, 2)
    scale = Fraction(p) ** half
    return ExtElt.of(0, scale, disc) if odd else ExtElt.of(scale, 0, disc)
