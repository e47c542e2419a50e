"""Modelo de Kirillov finito de π.

Um vetor é uma função de suporte finito em F^×, guardada por cascas: para cada
valuação n, um ``numpy.ndarray`` indexado por k, que representa o valor em
ϖ^n·g^k, com g o gerador canônico de (O/p^M)^×. Os caracteres de O^× na
precisão M são ω_j(g^k) = e^{2πi·jk/φ}, de modo que a decomposição de uma casca
em caracteres é uma FFT.

A medida é d^×y com vol(O^×) = 1, ou seja, a integral numa casca é a média do
vetor correspondente.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .characters import MulChar, base_char, conductor
from .exceptions import LFactorPresentError, PrecisionError, PreconditionError
from .local_factors import RepGL2, gamma_gl2, gamma_value
from .local_field import LocalElt, Number, reduce_integral, unit_residue, vp
from .residue import ResidueRingCfg, canonical_generator, ring_make, unit_group

logger = logging.getLogger(__name__)

# Componentes de caracteres abaixo disso são ruído de ponto flutuante.
COEFF_TOL = 1e-11


@dataclass(frozen=True)
class ShellBasis:
    """Unidades g^k mod p^M na ordem do índice das cascas."""

    p: int
    M: int
    units: np.ndarray

    @property
    def phi(self) -> int:
        return len(self.units)

    @property
    def modulus(self) -> int:
        return self.p**self.M


_BASES: dict[tuple[int, int], ShellBasis] = {}
_BASES_LOCK = threading.Lock()


def shell_basis(p: int, M: int) -> ShellBasis:
    key = (p, M)
    with _BASES_LOCK:
        basis = _BASES.get(key)
        if basis is None:
            modulus = p**M
            phi = modulus // p * (p - 1)
            g = canonical_generator(p)
            units = np.empty(phi, dtype=np.int64)
            x = 1
            for k in range(phi):
                units[k] = x
                x = x * g % modulus
            basis = ShellBasis(p, M, units)
            _BASES[key] = basis
    return basis


class KirillovVec:
    """Vetor do modelo de Kirillov com suporte num número finito de cascas."""

    def __init__(self, p: int, M: int, shells: Optional[dict[int, np.ndarray]] = None) -> None:
        if M < 1:
            raise PreconditionError(f"[KIRILLOV] precisão de unidades M = {M} inválida")
        self.p = p
        self.M = M
        self.basis = shell_basis(p, M)
        self.shells: dict[int, np.ndarray] = {}
        for n, values in (shells or {}).items():
            arr = np.asarray(values, dtype=np.complex128)
            if arr.shape != (self.basis.phi,):
                raise PreconditionError(f"[KIRILLOV] casca {n} com formato {arr.shape}")
            self.shells[n] = arr

    @classmethod
    def zero(cls, p: int, M: int) -> "KirillovVec":
        return cls(p, M)

    def like(self, shells: dict[int, np.ndarray]) -> "KirillovVec":
        return KirillovVec(self.p, self.M, shells)

    def support(self) -> list[int]:
        return sorted(self.shells)

    def shell(self, n: int) -> np.ndarray:
        arr = self.shells.get(n)
        return arr if arr is not None else np.zeros(self.basis.phi, dtype=np.complex128)

    def _check_compatible(self, other: "KirillovVec") -> None:
        if (self.p, self.M) != (other.p, other.M):
            raise PreconditionError("[KIRILLOV] vetores em modelos finitos diferentes")

    def __add__(self, other: "KirillovVec") -> "KirillovVec":
        self._check_compatible(other)
        shells = {n: arr.copy() for n, arr in self.shells.items()}
        for n, arr in other.shells.items():
            shells[n] = shells[n] + arr if n in shells else arr.copy()
        return self.like(shells)

    def __sub__(self, other: "KirillovVec") -> "KirillovVec":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "KirillovVec":
        return self.like({n: c * arr for n, arr in self.shells.items()})

    def pruned(self, tol: float = COEFF_TOL) -> "KirillovVec":
        """Remove cascas numericamente nulas."""
        return self.like({n: arr for n, arr in self.shells.items() if np.max(np.abs(arr)) > tol})

    def inner(self, other: "KirillovVec") -> complex:
        """⟨W₁, W₂⟩ = Σ_n ∫_{O^×} W₁(ϖ^n u) conj(W₂(ϖ^n u)) d^×u."""
        self._check_compatible(other)
        total = 0j
        for n, arr in self.shells.items():
            if n in other.shells:
                total += np.vdot(other.shells[n], arr) / self.basis.phi
        return complex(total)

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))

    def distance(self, other: "KirillovVec") -> float:
        return (self - other).norm()

    def __repr__(self) -> str:
        return f"KirillovVec(p={self.p}, M={self.M}, cascas={self.support()})"


def unit_values(chi: MulChar, M: int) -> np.ndarray:
    """χ(g^k) para k = 0..φ(p^M) − 1, χ caráter de F^×."""
    if chi.cfg.is_extension:
        raise PreconditionError("[KIRILLOV] o modelo usa caracteres de F^×")
    if chi.cfg.m > M:
        if conductor(chi) > M:
            raise PrecisionError(f"[KIRILLOV] caráter de condutor {conductor(chi)} não cabe em M = {M}")
        chi = chi.at_precision(M)
    order = unit_group(ring_make(chi.cfg)).orders[0]
    k = np.arange(shell_basis(chi.p, M).phi)
    return np.exp(2j * np.pi * ((chi.exps[0] * k) % order) / order)


def shell_vector(p: int, M: int, n: int, omega: MulChar) -> KirillovVec:
    """[n, ω] = 1_{ϖ^n O^×}·ω."""
    return KirillovVec(p, M, {n: unit_values(omega, M)})


@dataclass(frozen=True)
class VChiR:
    """v_χ^R(h) = χ(h)·1_{[−R, R]}(v(h))."""

    chi: MulChar
    R: int

    def materialize(self, M: int) -> KirillovVec:
        values = unit_values(self.chi, M)
        shells = {n: self.chi.wpi**n * values for n in range(-self.R, self.R + 1)}
        return KirillovVec(self.chi.p, M, shells)


def v_chi_R(chi: MulChar, R: int, M: int) -> KirillovVec:
    if R < 0:
        raise PreconditionError(f"[KIRILLOV] raio R = {R} negativo")
    return VChiR(chi, R).materialize(M)


def _as_fraction(x: Union[Number, LocalElt]) -> Fraction:
    return x.to_fraction() if isinstance(x, LocalElt) else Fraction(x)


def act_unipotent(x: Union[Number, LocalElt], W: KirillovVec) -> KirillovVec:
    """(π(n(x))W)(y) = ψ(xy)W(y)."""
    xf = _as_fraction(x)
    p, basis = W.p, W.basis
    shells = {}
    for n, arr in W.shells.items():
        z = xf * Fraction(p) ** n
        v = vp(z, p)
        if v is None or v >= 0:
            shells[n] = arr.copy()
            continue
        depth = -v
        if depth > W.M:
            raise PrecisionError(f"[KIRILLOV] ψ(xy) na casca {n} exige precisão {depth} > M = {W.M}")
        modulus = p**depth
        a = reduce_integral(z * modulus, p, depth)
        phases = (a * (basis.units % modulus)) % modulus
        shells[n] = arr * np.exp(2j * np.pi * phases / modulus)
    return W.like(shells)


def act_diag(t: Union[Number, LocalElt], W: KirillovVec) -> KirillovVec:
    """(π(a(t))W)(y) = W(ty)."""
    tf = _as_fraction(t)
    p = W.p
    v = vp(tf, p)
    if v is None:
        raise PreconditionError("[KIRILLOV] a(t) exige t invertível")
    ring = ring_make(ResidueRingCfg(p, W.M))
    d = unit_group(ring).dlog(ring.elt(unit_residue(tf, p, W.M)))[0]
    return W.like({n - v: np.roll(arr, -d) for n, arr in W.shells.items()})


def character_coefficients(values: np.ndarray) -> np.ndarray:
    """a_j com f = Σ_j a_j ω_j."""
    return np.fft.fft(values) / len(values)


def from_coefficients(coeffs: np.ndarray) -> np.ndarray:
    return np.fft.ifft(coeffs) * len(coeffs)


def weyl_on_shell(pi: RepGL2, n: int, omega: MulChar, M: int) -> KirillovVec:
    """π(w)[n, ω] = c·[−n − k, ω⁻¹], com (c, k) = γ(π ⊗ ω⁻¹)."""
    omega = omega.with_wpi(1 + 0j)
    mono = gamma_gl2(pi, omega.inverse())
    return shell_vector(omega.p, M, -n - mono.k, omega.inverse()).scale(mono.c)


def weyl(pi: RepGL2, W: KirillovVec) -> KirillovVec:
    """π(w)W, decompondo cada casca em caracteres de O^×."""
    p, M, phi = W.p, W.M, W.basis.phi
    out: dict[int, np.ndarray] = {}
    for n, arr in W.shells.items():
        coeffs = character_coefficients(arr)
        for j in np.flatnonzero(np.abs(coeffs) > COEFF_TOL):
            j = int(j)
            omega = base_char(p, M, j)
            try:
                mono = gamma_gl2(pi, omega.inverse())
            except LFactorPresentError as exc:
                raise LFactorPresentError(
                    f"[KIRILLOV] componente ω_{j} da casca {n} cai no regime com fator L"
                ) from exc
            target = out.setdefault(-n - mono.k, np.zeros(phi, dtype=np.complex128))
            target[(-j) % phi] += coeffs[j] * mono.c
    return W.like({m: from_coefficients(b) for m, b in out.items()})


def ell_chi(chi: MulChar, W: KirillovVec) -> complex:
    """ℓ_χ(W) = ∫ W(y) conj(χ(y)) d^×y."""
    values = unit_values(chi, W.M)
    total = 0j
    for n, arr in W.shells.items():
        total += np.conj(chi.wpi**n) * np.vdot(values, arr) / W.basis.phi
    return complex(total)


def weyl_contour_oracle(pi: RepGL2, n: int, omega: MulChar, M: int, samples: int = 32) -> KirillovVec:
    """π(w)[n, ω] pela integral de contorno.

    γ(π ⊗ ω⁻¹|·|^s) é amostrado em z = e^{2πit/S} por torções não ramificadas
    genuínas de ω⁻¹ e os coeficientes de Laurent saem de ``numpy.fft``. O grau
    do monômio precisa ser menor que ``samples``.
    """
    omega = omega.with_wpi(1 + 0j)
    inv = omega.inverse()
    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    values = np.array([gamma_value(pi, inv.twist(complex(z))) for z in zs])
    laurent = np.fft.fft(values) / samples
    shells = {}
    base = unit_values(inv, M)
    for k in np.flatnonzero(np.abs(laurent) > COEFF_TOL):
        shells[-n - int(k)] = laurent[k] * base
    return KirillovVec(omega.p, M, shells)

