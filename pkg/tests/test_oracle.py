from fractions import Fraction

import pytest

from subquad.oracle import brute_min, format_report, verify_reduction
from subquad.pbf import MultilinearPoly, QuadraticPoly


G6 = MultilinearPoly.from_terms(3, [((1, 2, 3), 1), ((1, 2), -1), ((1, 3), -1), ((2, 3), -1)])


class TestBruteMin:
    def test_neg_quartic(self):
        f = MultilinearPoly.from_terms(4, [((1, 2, 3, 4), -1)])
        assert brute_min(f) == (Fraction(-1), 0b1111)

    def test_zero(self):
        assert brute_min(MultilinearPoly.zero(2)) == (Fraction(0), 0)

    def test_g6(self):
        assert brute_min(G6) == (Fraction(-2), 0b111)

    def test_tie_takes_smallest_mask(self):
        f = MultilinearPoly.from_terms(2, [((1,), 0)])
        assert brute_min(f) == (Fraction(0), 0)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            brute_min(MultilinearPoly.zero(21))


class TestVerifyReduction:
    def test_cubic_reduction_passes(self):
        f = MultilinearPoly.from_terms(3, [((1, 2, 3), -1)])
        h = QuadraticPoly(
            MultilinearPoly.from_terms(
                4, [((4,), 2), ((1, 4), -1), ((2, 4), -1), ((3, 4), -1)]
            ),
            3,
            1,
        )
        report = verify_reduction(f, h)
        assert report.passed
        assert all(report.av_monotone)
        assert all(row.gap == 0 for row in report.rows)

    def test_no_aux(self):
        f = MultilinearPoly.from_terms(2, [((1, 2), -1)])
        h = QuadraticPoly(f, 2, 0)
        assert verify_reduction(f, h).passed

    def test_deliberate_mismatch(self):
        f = MultilinearPoly.from_terms(3, [((1, 2, 3), -1)])
        h = QuadraticPoly(MultilinearPoly.zero(3), 3, 0)
        report = verify_reduction(f, h)
        assert not report.passed
        assert report.gaps[0b111] == -1
        assert all(report.gaps[x] == 0 for x in range(7))

    def test_width_mismatch_rejected(self):
        f = MultilinearPoly.from_terms(2, [((1, 2), -1)])
        h = QuadraticPoly(MultilinearPoly.zero(3), 3, 0)
        with pytest.raises(ValueError):
            verify_reduction(f, h)

    def test_format_report_stable(self):
        f = MultilinearPoly.from_terms(2, [((1, 2), -1)])
        text = format_report(verify_reduction(f, QuadraticPoly(f, 2, 0)))
        lines = text.splitlines()
        assert lines[0] == "labeling f min_h gap z_argmin"
        assert lines[1] == "- 0 0 0 -"
        assert lines[-1] == "1,2 -1 -1 0 -"
