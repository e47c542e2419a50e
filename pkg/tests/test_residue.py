from __future__ import annotations

import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from relchar_lab.exceptions import EvenPrimeError, NotNonResidueError, NotPrimeError
from relchar_lab.residue import (
    RAMIFIED,
    UNRAMIFIED,
    ResidueRingCfg,
    canonical_generator,
    least_non_residue,
    norm_trace,
    teichmuller,
    ring_make,
    unit_group,
)


class RingConstructionTest(unittest.TestCase):
    def test_even_prime_rejected(self) -> None:
        with self.assertRaises(EvenPrimeError):
            ring_make(ResidueRingCfg(2, 1))

    def test_composite_rejected(self) -> None:
        with self.assertRaises(NotPrimeError):
            ring_make(ResidueRingCfg(9, 1))

    def test_square_u_rejected(self) -> None:
        with self.assertRaises(NotNonResidueError):
            ring_make(ResidueRingCfg(5, 1, UNRAMIFIED, 4))

    def test_least_non_residue(self) -> None:
        self.assertEqual(least_non_residue(3), 2)
        self.assertEqual(least_non_residue(5), 2)
        self.assertEqual(least_non_residue(7), 3)

    def test_canonical_generator(self) -> None:
        self.assertEqual(canonical_generator(3), 2)
        self.assertEqual(canonical_generator(5), 2)


class UnitGroupTest(unittest.TestCase):
    def test_z_mod_9_cyclic_of_order_6(self) -> None:
        group = unit_group(ring_make(ResidueRingCfg(3, 2)))
        self.assertEqual(group.orders, (6,))
        self.assertEqual(group.generators[0].a, 2)

    def test_f9_generator_of_order_8(self) -> None:
        ring = ring_make(ResidueRingCfg(3, 1, UNRAMIFIED, 2))
        group = unit_group(ring)
        self.assertEqual(group.orders, (8,))
        g = group.generators[0]
        self.assertFalse(ring.pow(g, 4).is_one())
        self.assertTrue(ring.pow(g, 8).is_one())

    def test_unit_counts(self) -> None:
        cases = [
            (ResidueRingCfg(3, 3), 18),
            (ResidueRingCfg(3, 2, UNRAMIFIED, 2), 72),
            (ResidueRingCfg(3, 2, RAMIFIED), 54),
            (ResidueRingCfg(5, 1, RAMIFIED), 20),
        ]
        for cfg, expected in cases:
            with self.subTest(cfg=cfg):
                ring = ring_make(cfg)
                self.assertEqual(unit_group(ring).order, expected)
                self.assertEqual(sum(1 for _ in ring.units()), expected)

    def test_dlog_inverts_element(self) -> None:
        for cfg in (ResidueRingCfg(5, 2), ResidueRingCfg(3, 2, UNRAMIFIED, 2), ResidueRingCfg(3, 2, RAMIFIED)):
            ring = ring_make(cfg)
            group = unit_group(ring)
            for x in ring.units():
                with self.subTest(cfg=cfg, x=x):
                    self.assertEqual(group.element(group.dlog(x)), x)

    def test_norm_trace(self) -> None:
        ring = ring_make(ResidueRingCfg(3, 1, UNRAMIFIED, 2))
        nm, tr = norm_trace(ring.elt(1, 1))
        self.assertEqual(nm.a, (1 - 2) % 3)
        self.assertEqual(tr.a, 2)

    def test_teichmuller_lift(self) -> None:
        ring = ring_make(ResidueRingCfg(5, 2))
        w = teichmuller(ring.elt(2))
        self.assertEqual(w.a % 5, 2)
        self.assertTrue((w**4).is_one())
        ext = ring_make(ResidueRingCfg(3, 2, UNRAMIFIED, 2))
        t = teichmuller(ext.elt(1, 1))
        self.assertEqual((t.a % 3, t.b % 3), (1, 1))
        self.assertTrue((t**8).is_one())


EXT_CFG = ResidueRingCfg(3, 2, UNRAMIFIED, 2)
coords = st.integers(min_value=0, max_value=8)


class RingLawsTest(unittest.TestCase):
    @settings(max_examples=60, deadline=None)
    @given(coords, coords, coords, coords, coords, coords)
    def test_distributive_and_commutative(self, a, b, c, d, e, f) -> None:
        ring = ring_make(EXT_CFG)
        x, y, z = ring.elt(a, b), ring.elt(c, d), ring.elt(e, f)
        self.assertEqual(x * (y + z), x * y + x * z)
        self.assertEqual(x * y, y * x)
        self.assertEqual((x + y) - y, x)

    @settings(max_examples=60, deadline=None)
    @given(coords, coords, coords, coords)
    def test_dlog_is_homomorphism(self, a, b, c, d) -> None:
        ring = ring_make(EXT_CFG)
        x, y = ring.elt(a, b), ring.elt(c, d)
        if not (x.is_unit() and y.is_unit()):
            return
        group = unit_group(ring)
        lhs = group.dlog(x * y)
        rhs = tuple((u + v) % o for u, v, o in zip(group.dlog(x), group.dlog(y), group.orders))
        self.assertEqual(lhs, rhs)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=1, max_value=124))
    def test_inverse(self, a) -> None:
        ring = ring_make(ResidueRingCfg(5, 3))
        x = ring.elt(a)
        if not x.is_unit():
            return
        self.assertTrue((x * x.inverse()).is_one())


if __name__ == "__main__":
    unittest.main()
