from __future__ import annotations

import itertools
import unittest
from dataclasses import replace
from fractions import Fraction

from relchar_lab.characters import base_char
from relchar_lab.local_factors import PrincipalSeries
from relchar_lab.local_field import LieCoords
from relchar_lab.op_calculus import Wavepacket, WavepacketSum
from relchar_lab.phase_space import (
    HyperbolaSpec,
    hyp_integral_closed,
    hyp_integral_lattice,
    hyp_integral_sum,
)
from relchar_lab.relative_character import make_pair_data, table_value, window_indicator


def grid(N: int):
    reps = [Fraction(k, 3) for k in range(3)]
    for x, y, z in itertools.product(reps, repeat=3):
        yield Wavepacket(3, N, LieCoords(x, y, z))


class HyperbolaTest(unittest.TestCase):
    def setUp(self) -> None:
        self.pd = make_pair_data(PrincipalSeries(base_char(3, 2, 1)), base_char(3, 1, 1))
        self.hs = HyperbolaSpec(self.pd)

    def test_closed_matches_lattice(self) -> None:
        for N in (1, 2):
            for a in grid(N):
                with self.subTest(N=N, tau=a.tau):
                    result = hyp_integral_lattice(self.hs, a, 1)
                    self.assertTrue(result.final)
                    self.assertEqual(hyp_integral_closed(self.hs, a), result.value)

    def test_closed_matches_windowed_table(self) -> None:
        for a in grid(2):
            expected = table_value(self.pd, a) if window_indicator(self.pd, a) else 0
            with self.subTest(tau=a.tau):
                self.assertEqual(hyp_integral_closed(self.hs, a), expected)

    def test_closed_form_follows_alpha(self) -> None:
        hs = HyperbolaSpec(replace(self.pd, alpha_pair=Fraction(1, 81)))
        for a in grid(1):
            with self.subTest(tau=a.tau):
                self.assertEqual(hyp_integral_closed(hs, a), hyp_integral_lattice(hs, a, 1).value)
        third = Fraction(1, 3)
        self.assertEqual(hyp_integral_closed(hs, Wavepacket(3, 1, LieCoords.of(0, third, third))), Fraction(1, 2))
        self.assertEqual(hyp_integral_closed(hs, Wavepacket(3, 1, LieCoords.of(0, third, 2 * third))), 0)

    def test_lattice_depth(self) -> None:
        a = Wavepacket(3, 2, LieCoords.of(0, Fraction(1, 3), 0))
        self.assertEqual(hyp_integral_lattice(self.hs, a, 2).value, hyp_integral_closed(self.hs, a))
        with self.assertRaises(ValueError):
            hyp_integral_lattice(self.hs, a, 0)

    def test_linearity(self) -> None:
        a = Wavepacket(3, 2, LieCoords.of(), 2 + 0j)
        b = Wavepacket(3, 2, LieCoords.of(0, Fraction(1, 3), 0), -3 + 0j)
        total = hyp_integral_sum(self.hs, WavepacketSum((a, b)))
        self.assertAlmostEqual(total, 2 * 1 - 3 * 0.5)
        self.assertAlmostEqual(hyp_integral_sum(self.hs, WavepacketSum((a, b)), depth=1), total)

    def test_sign_must_be_unit(self) -> None:
        with self.assertRaises(ValueError):
            HyperbolaSpec(self.pd, x_sign=0)


if __name__ == "__main__":
    unittest.main()
