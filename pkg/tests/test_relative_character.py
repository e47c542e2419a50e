from __future__ import annotations

import unittest
from dataclasses import replace
from fractions import Fraction

from relchar_lab.characters import base_char
from relchar_lab.exceptions import NonGenericPairError, OutOfRegimeError, PreconditionError
from relchar_lab.local_factors import PrincipalSeries, Supercuspidal, find_admissible_xi
from relchar_lab.local_field import LieCoords
from relchar_lab.op_calculus import Wavepacket
from relchar_lab.relative_character import (
    check_hypotheses,
    make_pair_data,
    relchar_bruteforce,
    relchar_table,
    table_value,
    uncertainty_holds,
    unit_indicator,
    window_indicator,
)
from relchar_lab.residue import RAMIFIED, UNRAMIFIED, ResidueRingCfg

THIRD = Fraction(1, 3)


def ps_pair():
    return make_pair_data(PrincipalSeries(base_char(3, 2, 1)), base_char(3, 1, 1))


def sc_pair(ext: str):
    cfg = ResidueRingCfg(3, 1, ext, 2 if ext == UNRAMIFIED else 0)
    xi = find_admissible_xi(cfg, 2)
    return make_pair_data(Supercuspidal(cfg.with_precision(xi.cfg.m), xi), base_char(3, 1, 1))


def packet(N: int, x=0, y=0, z=0) -> Wavepacket:
    return Wavepacket(3, N, LieCoords.of(x, y, z))


class PairDataTest(unittest.TestCase):
    def test_principal_series_pair(self) -> None:
        pd = ps_pair()
        self.assertEqual(pd.c_pair, 4)
        self.assertEqual(pd.alpha_pair, Fraction(2, 81))
        self.assertEqual(pd.alpha_chi.alpha, THIRD)
        self.assertEqual(pd.r_max, 1)
        self.assertAlmostEqual(abs(pd.gamma), 1.0)

    def test_supercuspidal_conductors(self) -> None:
        self.assertEqual(sc_pair(UNRAMIFIED).c_pair, 4)
        self.assertEqual(sc_pair(RAMIFIED).c_pair, 3)

    def test_rejected_pairs(self) -> None:
        with self.assertRaises(NonGenericPairError):
            make_pair_data(PrincipalSeries(base_char(3, 1, 1)), base_char(3, 1, 1))
        with self.assertRaises(PreconditionError):
            make_pair_data(PrincipalSeries(base_char(3, 2, 1)), base_char(3, 1, 0))


class TableTest(unittest.TestCase):
    def setUp(self) -> None:
        self.pd = ps_pair()

    def test_origin_cell_counts_shells(self) -> None:
        self.assertEqual(table_value(self.pd, packet(1)), 0)
        self.assertEqual(table_value(self.pd, packet(2)), 1)
        self.assertEqual(table_value(self.pd, packet(3)), 3)

    def test_edge_cells(self) -> None:
        self.assertEqual(table_value(self.pd, packet(1, y=THIRD)), 0)
        self.assertEqual(table_value(self.pd, packet(2, y=THIRD)), Fraction(1, 2))
        self.assertEqual(table_value(self.pd, packet(2, z=2 * THIRD)), Fraction(1, 2))

    def test_corner_cell_reads_pair_alpha(self) -> None:
        self.assertEqual(table_value(self.pd, packet(1, y=THIRD, z=2 * THIRD)), Fraction(1, 2))
        self.assertEqual(table_value(self.pd, packet(1, y=THIRD, z=THIRD)), 0)

    def test_corner_cell_deeper_level(self) -> None:
        pd = replace(self.pd, alpha_pair=Fraction(1, 243))
        self.assertEqual(table_value(pd, packet(1, y=Fraction(1, 9), z=THIRD)), Fraction(1, 6))
        self.assertEqual(table_value(pd, packet(1, y=Fraction(4, 9), z=THIRD)), Fraction(1, 6))
        self.assertEqual(table_value(pd, packet(1, y=Fraction(2, 9), z=THIRD)), 0)

    def test_supercuspidal_corner_cells(self) -> None:
        unram = sc_pair(UNRAMIFIED)
        self.assertEqual(unram.alpha_pair * 81 % 3, 1)
        self.assertEqual(table_value(unram, packet(1, y=THIRD, z=THIRD)), Fraction(1, 2))
        self.assertEqual(table_value(unram, packet(1, y=THIRD, z=2 * THIRD)), 0)
        ram = sc_pair(RAMIFIED)
        for N in (1, 2):
            for z in (THIRD, 2 * THIRD):
                with self.subTest(N=N, z=z):
                    self.assertEqual(table_value(ram, packet(N, y=THIRD, z=z)), 0)

    def test_window(self) -> None:
        self.assertTrue(window_indicator(self.pd, packet(1)))
        self.assertFalse(window_indicator(self.pd, packet(1, x=THIRD)))
        self.assertEqual(relchar_table(self.pd, packet(2, x=THIRD)).exact, 0)

    def test_unit_indicator(self) -> None:
        self.assertTrue(unit_indicator(Fraction(4), 3, 1))
        self.assertFalse(unit_indicator(Fraction(2), 3, 1))
        self.assertTrue(unit_indicator(Fraction(1, 2), 3, 0))
        self.assertFalse(unit_indicator(Fraction(3), 3, 0))


class HypothesesTest(unittest.TestCase):
    def setUp(self) -> None:
        self.pd = ps_pair()

    def test_violations_name_the_hypothesis(self) -> None:
        with self.assertRaisesRegex(PreconditionError, "N ≥ 1"):
            check_hypotheses(self.pd, packet(0))
        with self.assertRaisesRegex(PreconditionError, "q\\^\\{2N\\}"):
            check_hypotheses(self.pd, packet(1, x=Fraction(1, 9)))
        with self.assertRaises(PreconditionError):
            check_hypotheses(self.pd, Wavepacket(5, 1, LieCoords.of()))

    def test_twist_radius(self) -> None:
        with self.assertRaises(OutOfRegimeError):
            check_hypotheses(self.pd, packet(2, y=Fraction(1, 9)))

    def test_uncertainty_only_constrains_corner(self) -> None:
        self.assertTrue(uncertainty_holds(self.pd, packet(1, y=THIRD), 1.0))
        self.assertTrue(uncertainty_holds(self.pd, packet(1, y=THIRD, z=2 * THIRD), 0.5))


class BruteForceTest(unittest.TestCase):
    def test_matches_table(self) -> None:
        pd = ps_pair()
        points = [packet(2), packet(2, y=THIRD), packet(2, z=THIRD), packet(1, y=THIRD, z=2 * THIRD), packet(2, x=THIRD)]
        for a in points:
            with self.subTest(tau=a.tau, N=a.N):
                bf = relchar_bruteforce(pd, a)
                table = relchar_table(pd, a)
                self.assertTrue(bf.stable)
                self.assertAlmostEqual(abs(bf.value), float(table.exact), places=8)
                self.assertLess(abs(bf.value - table.value), 1e-8)

    def test_radius_and_stability_check(self) -> None:
        a = packet(2, y=THIRD)
        bf = relchar_bruteforce(ps_pair(), a)
        self.assertEqual(bf.R, a.N + 4 + 1 + 1)
        self.assertEqual(bf.R_check, bf.R + 2)
        self.assertTrue(bf.stable)


if __name__ == "__main__":
    unittest.main()
