"""Aritmética exata em O/p^m e em anéis residuais de extensões quadráticas.

O anel base é Z/p^m. A extensão não ramificada é Z/p^m[√u] com ``u`` não
resíduo quadrático; a ramificada é Z/p^m[θ] com θ² = p, de modo que a precisão
em potências de ϖ_E = θ é 2m. Elementos de extensão usam a base {1, θ}.

O grupo de unidades do anel base é cíclico e gerado pela menor raiz primitiva
mod p², que continua geradora em toda precisão. Isso torna os logaritmos
discretos compatíveis entre precisões diferentes.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Iterator, Optional

from sympy import factorint, isprime, legendre_symbol, primitive_root
from sympy.ntheory import discrete_log

from .exceptions import (
    EvenPrimeError,
    LabError,
    NotNonResidueError,
    NotPrimeError,
    PrecisionError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

DLOG_TABLE_LIMIT = 100_000

NONE = "none"
UNRAMIFIED = "unramified"
RAMIFIED = "ramified"


@dataclass(frozen=True)
class ResidueRingCfg:
    """Parâmetros de um anel residual: primo, expoente de precisão e extensão."""

    p: int
    m: int
    ext: str = NONE
    u: int = 0

    @property
    def is_extension(self) -> bool:
        return self.ext != NONE

    @property
    def modulus(self) -> int:
        return self.p**self.m

    @property
    def disc(self) -> int:
        """Quadrado do gerador θ da extensão."""
        if self.ext == UNRAMIFIED:
            return self.u
        if self.ext == RAMIFIED:
            return self.p
        raise PreconditionError("[RING] anel base não possui gerador quadrático")

    @property
    def residue_size(self) -> int:
        return self.p * self.p if self.ext == UNRAMIFIED else self.p

    @property
    def ram_index(self) -> int:
        return 2 if self.ext == RAMIFIED else 1

    @property
    def inertia_degree(self) -> int:
        return 2 if self.ext == UNRAMIFIED else 1

    def with_precision(self, m: int) -> "ResidueRingCfg":
        return ResidueRingCfg(self.p, m, self.ext, self.u)

    def base(self) -> "ResidueRingCfg":
        return ResidueRingCfg(self.p, self.m)


@dataclass(frozen=True)
class ResidueElt:
    """Elemento de um anel residual com coordenadas canônicas em [0, p^m)."""

    cfg: ResidueRingCfg
    coords: tuple[int, ...]

    @property
    def a(self) -> int:
        return self.coords[0]

    @property
    def b(self) -> int:
        return self.coords[1] if len(self.coords) > 1 else 0

    def _ring(self) -> "ResidueRing":
        return ring_make(self.cfg)

    def __add__(self, other: "ResidueElt") -> "ResidueElt":
        return self._ring().add(self, other)

    def __sub__(self, other: "ResidueElt") -> "ResidueElt":
        return self._ring().add(self, -other)

    def __neg__(self) -> "ResidueElt":
        return self._ring().neg(self)

    def __mul__(self, other: "ResidueElt") -> "ResidueElt":
        return self._ring().mul(self, other)

    def __pow__(self, exponent: int) -> "ResidueElt":
        return self._ring().pow(self, exponent)

    def inverse(self) -> "ResidueElt":
        return self._ring().inv(self)

    def is_unit(self) -> bool:
        return self._ring().is_unit(self)

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0

    def __repr__(self) -> str:
        if not self.cfg.is_extension:
            return f"{self.a} mod {self.cfg.p}^{self.cfg.m}"
        return f"({self.a} + {self.b}θ) mod {self.cfg.p}^{self.cfg.m}"


class ResidueRing:
    """Anel residual com operações exatas e redução canônica."""

    def __init__(self, cfg: ResidueRingCfg) -> None:
        self.cfg = cfg
        self.p = cfg.p
        self.m = cfg.m
        self.modulus = cfg.modulus
        self._disc = cfg.disc if cfg.is_extension else 0

    def elt(self, a: int, b: int = 0) -> ResidueElt:
        n = self.modulus
        if self.cfg.is_extension:
            return ResidueElt(self.cfg, (a % n, b % n))
        if b:
            raise PreconditionError("[RING] anel base não possui segunda coordenada")
        return ResidueElt(self.cfg, (a % n,))

    @property
    def zero(self) -> ResidueElt:
        return self.elt(0)

    @property
    def one(self) -> ResidueElt:
        return self.elt(1)

    @property
    def theta(self) -> ResidueElt:
        """Gerador √u (não ramificado) ou ϖ_E (ramificado)."""
        return self.elt(0, 1)

    def add(self, x: ResidueElt, y: ResidueElt) -> ResidueElt:
        return self.elt(x.a + y.a, x.b + y.b)

    def neg(self, x: ResidueElt) -> ResidueElt:
        return self.elt(-x.a, -x.b)

    def mul(self, x: ResidueElt, y: ResidueElt) -> ResidueElt:
        if not self.cfg.is_extension:
            return self.elt(x.a * y.a)
        return self.elt(x.a * y.a + self._disc * x.b * y.b, x.a * y.b + x.b * y.a)

    def pow(self, x: ResidueElt, exponent: int) -> ResidueElt:
        if exponent < 0:
            return self.pow(self.inv(x), -exponent)
        if not self.cfg.is_extension:
            return self.elt(pow(x.a, exponent, self.modulus))
        result = self.one
        base = x
        while exponent:
            if exponent & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            exponent >>= 1
        return result

    def conj(self, x: ResidueElt) -> ResidueElt:
        return self.elt(x.a, -x.b)

    def norm_int(self, x: ResidueElt) -> int:
        if not self.cfg.is_extension:
            return x.a
        return (x.a * x.a - self._disc * x.b * x.b) % self.modulus

    def is_unit(self, x: ResidueElt) -> bool:
        return self.norm_int(x) % self.p != 0

    def inv(self, x: ResidueElt) -> ResidueElt:
        nm = self.norm_int(x)
        if nm % self.p == 0:
            raise PreconditionError(f"[RING] {x!r} não é unidade")
        nm_inv = pow(nm, -1, self.modulus)
        if not self.cfg.is_extension:
            return self.elt(nm_inv)
        c = self.conj(x)
        return self.elt(c.a * nm_inv, c.b * nm_inv)

    def valuation(self, x: ResidueElt) -> Optional[int]:
        """Valuação em potências de ϖ_E; ``None`` para o zero do anel."""
        vals = []
        for idx, coord in enumerate(x.coords):
            if coord == 0:
                continue
            v = 0
            while coord % self.p == 0:
                coord //= self.p
                v += 1
            vals.append(self.cfg.ram_index * v + (idx if self.cfg.ext == RAMIFIED else 0))
        return min(vals) if vals else None

    def reduce(self, x: ResidueElt, m: int) -> ResidueElt:
        if m > self.m:
            raise PrecisionError(f"[RING] precisão {m} acima da disponível {self.m}")
        target = ring_make(self.cfg.with_precision(m))
        return target.elt(*x.coords)

    def elements(self) -> Iterator[ResidueElt]:
        n = self.modulus
        if not self.cfg.is_extension:
            for a in range(n):
                yield ResidueElt(self.cfg, (a,))
            return
        for a in range(n):
            for b in range(n):
                yield ResidueElt(self.cfg, (a, b))

    def units(self) -> Iterator[ResidueElt]:
        return (x for x in self.elements() if self.is_unit(x))

    def unit_count(self) -> int:
        p, m = self.p, self.m
        if self.cfg.ext == UNRAMIFIED:
            return p ** (2 * (m - 1)) * (p * p - 1)
        if self.cfg.ext == RAMIFIED:
            return p ** (2 * m - 1) * (p - 1)
        return p ** (m - 1) * (p - 1)


_RING_CACHE: dict[ResidueRingCfg, ResidueRing] = {}
_GROUP_CACHE: dict[ResidueRingCfg, "UnitGroupStructure"] = {}
_CACHE_LOCK = threading.Lock()


def ring_make(cfg: ResidueRingCfg) -> ResidueRing:
    """Valida ``cfg`` e devolve o anel correspondente (memorizado)."""
    ring = _RING_CACHE.get(cfg)
    if ring is not None:
        return ring

    if cfg.p == 2:
        raise EvenPrimeError("[RING] p = 2 não é suportado (característica residual par)")
    if cfg.p < 2 or not isprime(cfg.p):
        raise NotPrimeError(f"[RING] {cfg.p} não é primo")
    if cfg.m < 1:
        raise PreconditionError(f"[RING] precisão m = {cfg.m} deve ser ≥ 1")
    if cfg.ext == UNRAMIFIED and legendre_symbol(cfg.u % cfg.p, cfg.p) != -1:
        raise NotNonResidueError(f"[RING] u = {cfg.u} não é não resíduo mod {cfg.p}")
    if cfg.ext not in (NONE, UNRAMIFIED, RAMIFIED):
        raise PreconditionError(f"[RING] extensão desconhecida: {cfg.ext}")

    ring = ResidueRing(cfg)
    with _CACHE_LOCK:
        _RING_CACHE.setdefault(cfg, ring)
    return _RING_CACHE[cfg]


def least_non_residue(p: int) -> int:
    for u in range(2, p):
        if legendre_symbol(u, p) == -1:
            return u
    raise NotPrimeError(f"[RING] {p} não possui não resíduos")


def canonical_generator(p: int) -> int:
    """Menor raiz primitiva mod p², geradora de (Z/p^m)^× para todo m."""
    return int(primitive_root(p * p))


class UnitGroupStructure:
    """Base do grupo de unidades: geradores independentes, ordens e dlog."""

    def __init__(self, ring: ResidueRing, generators: tuple[ResidueElt, ...], orders: tuple[int, ...]) -> None:
        self.ring = ring
        self.cfg = ring.cfg
        self.generators = generators
        self.orders = orders
        self._table: dict[ResidueElt, tuple[int, ...]] = {}
        self._residue_table: dict[tuple[int, int], int] = {}
        self._pgroup_table: dict[ResidueElt, tuple[int, ...]] = {}

    @property
    def order(self) -> int:
        total = 1
        for o in self.orders:
            total *= o
        return total

    def element(self, exps: tuple[int, ...]) -> ResidueElt:
        result = self.ring.one
        for g, e in zip(self.generators, exps):
            result = self.ring.mul(result, self.ring.pow(g, e))
        return result

    def dlog(self, x: ResidueElt) -> tuple[int, ...]:
        if not self.ring.is_unit(x):
            raise PreconditionError(f"[RING] dlog de não unidade {x!r}")
        if not self.cfg.is_extension:
            return (self._dlog_cyclic(x.a),)
        return self._dlog_extension(x)

    def _dlog_cyclic(self, a: int) -> int:
        if self._table:
            return self._table[ResidueElt(self.cfg, (a,))][0]
        g = self.generators[0].a
        return int(discrete_log(self.ring.modulus, a, g))

    def _dlog_extension(self, x: ResidueElt) -> tuple[int, ...]:
        p = self.ring.p
        key = (x.a % p, x.b % p if self.cfg.ext == UNRAMIFIED else 0)
        k = self._residue_table[key]
        y = self.ring.mul(x, self.ring.pow(self.generators[0], -k))
        return (k,) + self._pgroup_table[y]


def unit_group(ring: ResidueRing) -> UnitGroupStructure:
    """Calcula (uma vez por anel) a estrutura do grupo de unidades."""
    cached = _GROUP_CACHE.get(ring.cfg)
    if cached is not None:
        return cached

    if ring.cfg.is_extension:
        group = _extension_unit_group(ring)
    else:
        group = _cyclic_unit_group(ring)

    if group.order != ring.unit_count():
        raise LabError(f"[RING] ordem {group.order} difere de |unidades| = {ring.unit_count()}")

    with _CACHE_LOCK:
        _GROUP_CACHE.setdefault(ring.cfg, group)
    logger.debug("Grupo de unidades de %s: ordens %s", ring.cfg, group.orders)
    return _GROUP_CACHE[ring.cfg]


def _cyclic_unit_group(ring: ResidueRing) -> UnitGroupStructure:
    g = ring.elt(canonical_generator(ring.p))
    order = ring.unit_count()
    group = UnitGroupStructure(ring, (g,), (order,))
    if order < DLOG_TABLE_LIMIT:
        value = 1
        for k in range(order):
            group._table[ResidueElt(ring.cfg, (value,))] = (k,)
            value = value * g.a % ring.modulus
    return group


def _element_order(ring: ResidueRing, x: ResidueElt, group_order: int) -> int:
    order = group_order
    for prime in factorint(group_order):
        while order % prime == 0 and ring.pow(x, order // prime).is_one():
            order //= prime
    return order


def _extension_unit_group(ring: ResidueRing) -> UnitGroupStructure:
    cfg = ring.cfg
    p = ring.p
    q_res = cfg.residue_size

    residue = ring_make(cfg.with_precision(1))
    t0 = None
    for cand in residue.units():
        if (cfg.ext == RAMIFIED and cand.b) or not residue.pow(cand, q_res - 1).is_one():
            continue
        if _element_order(residue, cand, q_res - 1) == q_res - 1:
            t0 = cand
            break
    if t0 is None:
        raise LabError("[RING] corpo residual sem gerador")

    teich = teichmuller(ring.elt(*t0.coords))

    residue_table: dict[tuple[int, int], int] = {}
    value = residue.one
    for k in range(q_res - 1):
        key = (value.a, value.b if cfg.ext == UNRAMIFIED else 0)
        residue_table[key] = k
        value = residue.mul(value, t0)

    principal = [x for x in ring.units() if x.a % p == 1 and (cfg.ext == RAMIFIED or x.b % p == 0)]
    gens, orders, table = _pgroup_basis(ring, principal)

    group = UnitGroupStructure(ring, (teich,) + gens, (q_res - 1,) + orders)
    group._residue_table = residue_table
    group._pgroup_table = table
    return group


def _pgroup_basis(
    ring: ResidueRing, elements: list[ResidueElt]
) -> tuple[tuple[ResidueElt, ...], tuple[int, ...], dict[ResidueElt, tuple[int, ...]]]:
    """Base de um p-grupo abeliano por escolha gulosa de ordem máxima no quociente."""
    p = ring.p
    size = len(elements)
    table: dict[ResidueElt, tuple[int, ...]] = {ring.one: ()}
    gens: list[ResidueElt] = []
    orders: list[int] = []

    while len(table) < size:
        best: Optional[ResidueElt] = None
        best_order = 1
        for x in elements:
            order = 1
            y = x
            while y not in table:
                y = ring.pow(y, p)
                order *= p
            if order > best_order:
                best, best_order = x, order
        assert best is not None

        # Corrige o representante para que sua ordem coincida com a do quociente.
        coords = table[ring.pow(best, best_order)]
        correction = ring.one
        for g, e in zip(gens, coords):
            if e % best_order:
                raise LabError("[RING] falha ao separar fator direto do p-grupo")
            correction = ring.mul(correction, ring.pow(g, -(e // best_order)))
        gen = ring.mul(best, correction)

        new_table: dict[ResidueElt, tuple[int, ...]] = {}
        power = ring.one
        for e in range(best_order):
            for h, exps in table.items():
                new_table[ring.mul(h, power)] = exps + (e,)
            power = ring.mul(power, gen)
        table = new_table
        gens.append(gen)
        orders.append(best_order)

    return tuple(gens), tuple(orders), table


def teichmuller(x: ResidueElt) -> ResidueElt:
    """Raiz da unidade de ordem prima com p congruente a x módulo ϖ."""
    ring = ring_make(x.cfg)
    if not ring.is_unit(x):
        raise PreconditionError(f"[RING] levantamento de Teichmüller de não unidade {x!r}")
    q_res = x.cfg.residue_size if x.cfg.is_extension else x.cfg.p
    return ring.pow(x, q_res ** (2 * ring.m))


def norm_trace(x: ResidueElt) -> tuple[ResidueElt, ResidueElt]:
    """Norma e traço de um elemento de extensão, no anel base de mesma precisão."""
    if not x.cfg.is_extension:
        raise PreconditionError("[RING] norma/traço exigem elemento de extensão")
    ring = ring_make(x.cfg)
    base = ring_make(x.cfg.base())
    return base.elt(ring.norm_int(x)), base.elt(2 * x.a)
