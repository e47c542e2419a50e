"""Pacotes de onda 1_τ^T e o cálculo Op no modelo de Kirillov.

Com T = ϖ^{-N}, o pacote 1_τ^T é a indicadora da bola Tτ + T·O³ em g*. A
fatoração de Iwahori de K(N) separa Op(a_τ) em três operadores de uma
variável:

    Op⁺(τ_y) = ∫_O ψ(uτ_y) π(n(ϖ^N u)) du           (multiplica por 1_O(τ_y + ϖ^N h))
    Op⁰(τ_x) = ∫_O ψ(uτ_x) π(a(exp(ϖ^N u))) du
    Op⁻(τ_z) = π(w) Op⁺(τ_z) π(w)

e Op(a_τ) = Op⁻ Op⁰ Op⁺ (Op⁺ aplicado primeiro). Com τ ∈ p^{-N}O³ os três
comutam.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .characters import MulChar, conductor
from .exceptions import PrecisionError, PreconditionError
from .kirillov import (
    KirillovVec,
    act_unipotent,
    character_coefficients,
    from_coefficients,
    weyl,
)
from .local_factors import RepGL2
from .local_field import (
    LatticeBox,
    LieCoords,
    Number,
    frac_of_fraction,
    psi_fraction,
    reduce_integral,
    trace_phase,
    unit_residue,
    vp,
)
from .residue import ResidueRingCfg, ring_make, unit_group

logger = logging.getLogger(__name__)

Matrix = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

PLUS, ZERO, MINUS = "plus", "zero", "minus"
DEFAULT_ORDER = (PLUS, ZERO, MINUS)


@dataclass(frozen=True)
class Wavepacket:
    """c·1_τ^T, com τ representante módulo O³ e T = ϖ^{-N}."""

    p: int
    N: int
    tau: LieCoords
    coeff: complex = 1 + 0j

    @property
    def T(self) -> Fraction:
        return Fraction(1) / Fraction(self.p) ** self.N

    @property
    def r(self) -> int:
        v = vp(self.tau.y, self.p)
        return 0 if v is None else max(0, -v)

    @property
    def s(self) -> int:
        v = vp(self.tau.z, self.p)
        return 0 if v is None else max(0, -v)

    def contains(self, xi: LieCoords) -> bool:
        """ξ ∈ Tτ + T·O³."""
        box = LatticeBox(self.N, self.p)
        return box.contains_dual(xi - self.tau.scale(self.T))

    def __call__(self, xi: LieCoords) -> complex:
        return self.coeff if self.contains(xi) else 0j

    def within_scale(self) -> bool:
        """|Tτ| ≤ q^{2N}."""
        v = self.tau.min_valuation(self.p)
        return v is None or v >= -self.N


@dataclass(frozen=True)
class WavepacketSum:
    """Σ_τ a(τ)1_τ^T com N comum."""

    packets: tuple[Wavepacket, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        levels = {(a.p, a.N) for a in self.packets}
        if len(levels) > 1:
            raise PreconditionError(f"[OP] pacotes com (p, N) distintos: {sorted(levels)}")

    def __call__(self, xi: LieCoords) -> complex:
        return sum((a(xi) for a in self.packets), 0j)

    def __len__(self) -> int:
        return len(self.packets)


def tau_grid(p: int, depth: int) -> Iterable[LieCoords]:
    """Representantes de p^{-depth}O³ / O³."""
    step = Fraction(1, p**depth)
    reps = [k * step for k in range(p**depth)]
    for x, y, z in itertools.product(reps, repeat=3):
        yield LieCoords(x, y, z)


def wavepacket_decompose(samples: Mapping[LieCoords, complex], N: int, p: int) -> WavepacketSum:
    """Um pacote por classe τ com amostra não nula."""
    seen: dict[tuple[Fraction, Fraction, Fraction], complex] = {}
    for tau, value in samples.items():
        key = tuple(frac_of_fraction(c, p) for c in (tau.x, tau.y, tau.z))
        if key in seen and seen[key] != value:
            raise PreconditionError(f"[OP] amostras não constantes na classe {tau}")
        seen[key] = value
    packets = tuple(
        Wavepacket(p, N, LieCoords(*key), complex(value)) for key, value in seen.items() if value != 0
    )
    return WavepacketSum(packets)


def padic_exp(y: Fraction, p: int, prec: int) -> int:
    """exp(y) mod p^prec para y ∈ pO."""
    v = vp(y, p)
    if v is None:
        return 1
    if v < 1:
        raise PreconditionError(f"[OP] exp(y) exige v(y) ≥ 1, veio {v}")
    total = Fraction(1)
    term = Fraction(1)
    k = 0
    # v(y^k/k!) ≥ k·v − (k − 1)/(p − 1), crescente em k
    while (k + 1) * v - k / (p - 1) < prec:
        k += 1
        term = term * y / k
        total += term
    return reduce_integral(total, p, prec)


def op_plus(tau_y: Number, W: KirillovVec, N: int) -> KirillovVec:
    """Multiplica W(h) por 1_O(τ_y + ϖ^N h)."""
    p, M = W.p, W.M
    ty = Fraction(tau_y)
    vt = vp(ty, p)
    integral = vt is None or vt >= 0
    units = W.basis.units
    shells = {}
    for n, arr in W.shells.items():
        e = N + n
        if e >= 0:
            if integral:
                shells[n] = arr.copy()
            continue
        if integral or vt != e:
            continue
        r = -e
        if r > M:
            raise PrecisionError(f"[OP] coset de Op⁺ em p^{r} além de M = {M}")
        modulus = p**r
        t = unit_residue(ty, p, r)
        mask = (units + t) % modulus == 0
        if mask.any():
            shells[n] = np.where(mask, arr, 0)
    return W.like(shells)


def _op_zero_multiplier(tau_x: Number, p: int, M: int, N: int) -> np.ndarray:
    """Σ_u w_u ω_j(exp(ϖ^N u)) para cada caráter ω_j, j = 0..φ − 1."""
    tx = Fraction(tau_x)
    v = vp(tx, p)
    L = max(M - N, 0 if v is None else -v, 0)
    ring = ring_make(ResidueRingCfg(p, M))
    group = unit_group(ring)
    phi = group.order
    weights = np.zeros(phi, dtype=np.complex128)
    base = Fraction(p) ** N
    for u in range(p**L):
        d = group.dlog(ring.elt(padic_exp(base * u, p, M)))[0]
        weights[d] += psi_fraction(tx * u, p)
    weights /= p**L
    return np.fft.ifft(weights) * phi


def op_zero(tau_x: Number, W: KirillovVec, N: int, chi: Optional[MulChar] = None) -> KirillovVec:
    """Média da ação diagonal por a(exp(ϖ^N u)) com peso ψ(uτ_x)."""
    if N < 1:
        raise PreconditionError("[OP] Op⁰ exige N ≥ 1")
    if chi is not None and 2 * N < conductor(chi):
        raise PreconditionError(f"[OP] Op⁰ exige 2N ≥ c(χ) (N = {N}, c = {conductor(chi)})")
    mult = _op_zero_multiplier(tau_x, W.p, W.M, N)
    return W.like({n: from_coefficients(character_coefficients(arr) * mult) for n, arr in W.shells.items()})


def op_minus(tau_z: Number, W: KirillovVec, pi: RepGL2, N: int) -> KirillovVec:
    return weyl(pi, op_plus(tau_z, weyl(pi, W), N))


def _apply(step: str, a: Wavepacket, W: KirillovVec, pi: RepGL2) -> KirillovVec:
    if step == PLUS:
        return op_plus(a.tau.y, W, a.N)
    if step == ZERO:
        return op_zero(a.tau.x, W, a.N)
    if step == MINUS:
        return op_minus(a.tau.z, W, pi, a.N)
    raise PreconditionError(f"[OP] operador desconhecido: {step}")


def op_full(a: Wavepacket, W: KirillovVec, pi: RepGL2, order: Sequence[str] = DEFAULT_ORDER) -> KirillovVec:
    """Op(a_τ)W; ``order`` é a ordem de aplicação dos três fatores."""
    if sorted(order) != sorted(DEFAULT_ORDER):
        raise PreconditionError(f"[OP] ordem inválida: {order}")
    if not a.within_scale():
        raise PreconditionError("[OP] Op(a_τ) exige |Tτ| ≤ q^{2N}")
    out = W
    for step in order:
        out = _apply(step, a, out, pi)
    return out.scale(a.coeff)


def op_full_orderings(a: Wavepacket, W: KirillovVec, pi: RepGL2) -> dict[tuple[str, ...], KirillovVec]:
    return {order: op_full(a, W, pi, order) for order in itertools.permutations(DEFAULT_ORDER)}


def orderings_spread(a: Wavepacket, W: KirillovVec, pi: RepGL2) -> float:
    """Maior distância entre as seis ordens de aplicação."""
    images = list(op_full_orderings(a, W, pi).values())
    return max((x.distance(y) for x, y in itertools.combinations(images, 2)), default=0.0)


def microlocal_residual(a: Wavepacket, W: KirillovVec, sign: int, xs: Iterable[Fraction]) -> float:
    """max_x ‖π(n(x))W − ψ(sign·x·Tτ_y)W‖."""
    W = W.pruned()
    ty = a.T * a.tau.y
    worst = 0.0
    for x in xs:
        moved = act_unipotent(x, W)
        worst = max(worst, moved.distance(W.scale(psi_fraction(sign * x * ty, a.p))))
    return worst


def microlocal_shifts(a: Wavepacket) -> list[Fraction]:
    """Pontos x = k·p^N com 1 ≤ k < p^{r+1}."""
    return [Fraction(a.p**a.N * k) for k in range(1, a.p ** (a.r + 1))]


def microlocal_sign(a: Wavepacket, W: KirillovVec, tol: float = 1e-9) -> int:
    """Sinal s com π(n(x))W = ψ(s·x·Tτ_y)W para x ∈ p^N; 0 se nenhum serve.

    Com τ_y ∈ O os dois sinais servem e o resultado é +1.
    """
    xs = microlocal_shifts(a)
    for sign in (1, -1):
        if microlocal_residual(a, W, sign, xs) < tol:
            return sign
    return 0


# --- produto ⋆ ----------------------------------------------------------


def _mat_mul(A: Matrix, B: Matrix) -> Matrix:
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def _mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))  # type: ignore[return-value]


def _mat_scale(A: Matrix, c: Fraction) -> Matrix:
    return tuple(tuple(a * c for a in row) for row in A)  # type: ignore[return-value]


def _mat_valuation(A: Matrix, p: int) -> Optional[int]:
    vals = [v for v in (vp(a, p) for row in A for a in row) if v is not None]
    return min(vals) if vals else None


def _mat_reduce(A: Matrix, p: int, prec: int) -> Matrix:
    return tuple(tuple(Fraction(reduce_integral(a, p, prec)) for a in row) for row in A)  # type: ignore[return-value]


IDENTITY: Matrix = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def _exp_done(k: int, v: int, p: int, prec: int) -> bool:
    """v(X^j/j!) ≥ j·v − (j − 1)/(p − 1) ≥ prec para todo j > k."""
    return (k + 1) * v - k / (p - 1) >= prec


def _log_done(k: int, v: int, p: int, prec: int) -> bool:
    """v(D^j/j) ≥ j·v − log_p(j) ≥ prec para todo j > k."""
    return (k + 1) * v - math.log(k + 1, p) >= prec


def mat_exp(X: Matrix, p: int, prec: int) -> Matrix:
    """exp(X) mod p^prec para X ∈ p·Mat₂(O)."""
    v = _mat_valuation(X, p)
    if v is None:
        return IDENTITY
    if v < 1:
        raise PreconditionError("[OP] exp exige entradas em p")
    total, term, k = IDENTITY, IDENTITY, 0
    while True:
        k += 1
        term = _mat_scale(_mat_mul(term, X), Fraction(1, k))
        total = _mat_add(total, term)
        if _exp_done(k, v, p, prec):
            return _mat_reduce(total, p, prec)


def mat_log(Y: Matrix, p: int, prec: int) -> Matrix:
    """log(Y) mod p^prec para Y ∈ 1 + p·Mat₂(O)."""
    D = _mat_add(Y, _mat_scale(IDENTITY, Fraction(-1)))
    v = _mat_valuation(D, p)
    if v is None:
        return ((Fraction(0), Fraction(0)), (Fraction(0), Fraction(0)))
    if v < 1:
        raise PreconditionError("[OP] log exige Y ≡ 1 mod p")
    total = ((Fraction(0), Fraction(0)), (Fraction(0), Fraction(0)))
    power, k = IDENTITY, 0
    while True:
        k += 1
        power = _mat_mul(power, D)
        sign = 1 if k % 2 else -1
        total = _mat_add(total, _mat_scale(power, Fraction(sign, k)))
        if _log_done(k, v, p, prec):
            return _mat_reduce(total, p, prec)


def star_product(x: LieCoords, y: LieCoords, p: int, prec: int) -> LieCoords:
    """x ⋆ y com e^x e^y = e^{x⋆y}, mod p^prec."""
    product = _mat_mul(mat_exp(x.as_matrix(), p, prec), mat_exp(y.as_matrix(), p, prec))
    L = mat_log(product, p, prec)
    return LieCoords(L[0][0], L[0][1], L[1][0])


def lattice_sample(p: int, N: int, width: int = 1) -> list[LieCoords]:
    """Representantes de k(N)/k(N + width)."""
    scale = p**N
    reps = range(p**width)
    return [LieCoords.of(a * scale, b * scale, c * scale) for a, b, c in itertools.product(reps, repeat=3)]


def check_star_character(p: int, N: int, m: int, xi: LieCoords, xs: Optional[Sequence[LieCoords]] = None) -> int:
    """Número de pares (x, y) em k(N) com ⟨x,ξ⟩⟨y,ξ⟩ ≠ ⟨x⋆y, ξ⟩; exige 2N ≥ m e ξ ∈ k(−m)."""
    if 2 * N < m:
        raise PreconditionError(f"[OP] caráter ⋆ exige N ≥ m/2 (N = {N}, m = {m})")
    if not LatticeBox(m, p).contains_dual(xi):
        raise PreconditionError("[OP] ξ fora de k(−m)")
    sample = list(xs) if xs is not None else lattice_sample(p, N)
    prec = m + 1
    failures = 0
    for x, y in itertools.product(sample, repeat=2):
        lhs = frac_of_fraction(trace_phase(x, xi) + trace_phase(y, xi), p)
        rhs = frac_of_fraction(trace_phase(star_product(x, y, p, prec), xi), p)
        if lhs != rhs:
            failures += 1
    return failures


def wavepacket_fourier(a: Wavepacket, xi: LieCoords, L: int = 1) -> complex:
    """∫_{k(N)} vol(k(N))⁻¹ ⟨x, Tτ⟩⟨x, ξ⟩⁻¹ dx por soma finita em k(N)/k(N+L).

    Exige ξ ∈ p^{-(N+L)}O³ para o integrando ser constante nas classes.
    """
    if not LatticeBox(a.N + L, a.p).contains_dual(a.tau.scale(a.T) - xi):
        raise PrecisionError("[OP] ξ exige L maior na soma de Fourier")
    diff = a.tau.scale(a.T) - xi
    total = 0j
    sample = lattice_sample(a.p, a.N, L)
    for x in sample:
        total += psi_fraction(trace_phase(x, diff), a.p)
    return a.coeff * total / len(sample)
