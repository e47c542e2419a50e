from __future__ import annotations

import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from relchar_lab.characters import (
    alpha_of,
    alpha_pair,
    base_char,
    chi_flat_sharp,
    compose_norm,
    conductor,
    enumerate_X,
    x_count,
)
from relchar_lab.exceptions import NonGenericPairError, PreconditionError
from relchar_lab.local_factors import PrincipalSeries, find_admissible_xi
from relchar_lab.local_field import ExtElt, frac_of_fraction, vp
from relchar_lab.residue import UNRAMIFIED, ResidueRingCfg, ring_make


class ConductorTest(unittest.TestCase):
    def test_conductors_mod_9(self) -> None:
        expected = {0: 0, 1: 2, 2: 2, 3: 1, 4: 2, 5: 2}
        for exp, c in expected.items():
            with self.subTest(exp=exp):
                self.assertEqual(conductor(base_char(3, 2, exp)), c)

    def test_counts(self) -> None:
        self.assertEqual(x_count(0, 3), 1)
        self.assertEqual(x_count(2, 3), 6)
        self.assertEqual(x_count(1, 5), 4)
        self.assertEqual(len(enumerate_X(2, 3)), 6)
        self.assertEqual(len(enumerate_X(0, 5)), 1)
        with self.assertRaises(PreconditionError):
            enumerate_X(-1, 3)

    def test_precision_change_keeps_values(self) -> None:
        chi = base_char(3, 1, 1)
        lifted = chi.at_precision(3)
        for a in (1, 2, 4, 5, 7, 8):
            self.assertAlmostEqual(chi.at_unit_int(a), lifted.at_unit_int(a))


class MultiplicativityTest(unittest.TestCase):
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 19), st.integers(1, 124), st.integers(1, 124))
    def test_character_is_multiplicative(self, exp, a, b) -> None:
        if a % 5 == 0 or b % 5 == 0:
            return
        chi = base_char(5, 3, exp)
        self.assertAlmostEqual(chi.at_unit_int(a * b), chi.at_unit_int(a) * chi.at_unit_int(b))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 5), st.integers(0, 5))
    def test_product_and_inverse(self, e1, e2) -> None:
        x, y = base_char(3, 2, e1), base_char(3, 2, e2)
        prod = x * y
        for a in (2, 4, 5):
            self.assertAlmostEqual(prod.at_unit_int(a), x.at_unit_int(a) * y.at_unit_int(a))
        self.assertTrue((x * x.inverse()).is_trivial_on_units())


class AlphaTest(unittest.TestCase):
    def test_alpha_examples_p3(self) -> None:
        self.assertEqual(alpha_of(base_char(3, 1, 1)).alpha, Fraction(1, 3))
        self.assertEqual(alpha_of(base_char(3, 2, 4)).alpha, Fraction(1, 9))
        self.assertEqual(alpha_of(base_char(3, 2, 2)).alpha, Fraction(2, 9))

    def test_alpha_defining_identity(self) -> None:
        for exp in (1, 3, 7, 11):
            chi = base_char(5, 2, exp)
            n = conductor(chi)
            datum = alpha_of(chi)
            self.assertEqual(vp(datum.alpha, 5), -n)
            ring = ring_make(chi.cfg)
            step = 5**datum.domain
            for y in range(25):
                with self.subTest(exp=exp, y=y):
                    self.assertEqual(chi.phase(ring.elt(1 + step * y)), frac_of_fraction(datum.alpha * step * y, 5))

    def test_unramified_rejected(self) -> None:
        with self.assertRaises(PreconditionError):
            alpha_of(base_char(3, 2, 0))

    def test_alpha_on_extension(self) -> None:
        ext = ResidueRingCfg(3, 1, UNRAMIFIED, 2)
        xi = find_admissible_xi(ext, 2)
        datum = alpha_of(xi)
        self.assertEqual(vp(datum.alpha, 3), -4)
        ring = ring_make(xi.cfg)
        assert datum.elt is not None
        for c in range(3):
            for d in range(3):
                x = ExtElt.of(3 * c, 3 * d, 2)
                with self.subTest(c=c, d=d):
                    self.assertEqual(
                        xi.phase(ring.elt(1 + 3 * c, 3 * d)),
                        frac_of_fraction((datum.elt * x).trace(), 3),
                    )


class PairTest(unittest.TestCase):
    def test_flat_sharp(self) -> None:
        flat, sharp = chi_flat_sharp(base_char(3, 2, 1), base_char(3, 1, 1))
        self.assertEqual(flat.exps, (4,))
        self.assertEqual(sharp.exps, (2,))

    def test_alpha_pair_principal_series(self) -> None:
        self.assertEqual(alpha_pair(PrincipalSeries(base_char(3, 2, 1)), base_char(3, 1, 1)), Fraction(2, 81))
        self.assertEqual(alpha_pair(PrincipalSeries(base_char(5, 2, 1)), base_char(5, 2, 10)), Fraction(6, 625))

    def test_non_generic_pair(self) -> None:
        with self.assertRaises(NonGenericPairError):
            alpha_pair(PrincipalSeries(base_char(3, 1, 1)), base_char(3, 1, 1))

    def test_compose_norm(self) -> None:
        ext = ResidueRingCfg(3, 2, UNRAMIFIED, 2)
        nu = base_char(3, 2, 1)
        nu_e = compose_norm(nu, ext)
        ring = ring_make(ext)
        for x in list(ring.units())[:20]:
            with self.subTest(x=x):
                self.assertAlmostEqual(nu_e(x), nu.at_unit_int(ring.norm_int(x)))
        self.assertAlmostEqual(nu_e.wpi, nu.wpi**2)


if __name__ == "__main__":
    unittest.main()
