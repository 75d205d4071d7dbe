import random
from fractions import Fraction

import pytest

import kellipse as ke
from kellipse import Metric, Point, Space

ALL_KINDS = [Metric.l1(), Metric.l2(), Metric.linf(), Metric.lp(4)]


@pytest.mark.parametrize("metric,a,b,expected", [
    (Metric.l1(), (1, 0), (0, 1), 2),
    (Metric.l2(), (3, 0), (0, 4), 5),
    (Metric.linf(), (1, 0), (0, 1), 1),
    (Metric.lp(4), (-1, 0, 0), (1, 0, 0), 2),
])
def test_distance_examples(metric, a, b, expected):
    assert metric.distance(a, b) == pytest.approx(expected, abs=1e-12)


def test_distance_symmetric_and_zero_on_diagonal():
    rng = random.Random(1)
    for metric in ALL_KINDS:
        for _ in range(200):
            a = tuple(rng.uniform(-10, 10) for _ in range(3))
            b = tuple(rng.uniform(-10, 10) for _ in range(3))
            assert metric.distance(a, b) == metric.distance(b, a)
            assert metric.distance(a, a) == 0


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        Metric.l2().distance((1, 0), (1, 0, 0))


def test_lp_exponent_validation():
    with pytest.raises(ValueError):
        Metric.lp(0.5)
    with pytest.raises(ValueError):
        Metric.lp(65)
    with pytest.raises(ValueError):
        Metric("lp")          # missing p
    with pytest.raises(ValueError):
        Metric("l2", p=3)     # p on a fixed kind
    Metric.lp(1)
    Metric.lp(64)


def test_exact_arithmetic_preserved_in_1d_and_l1():
    d = Metric.l1().distance((Fraction(1, 3), 2), (1, Fraction(1, 2)))
    assert d == Fraction(2, 3) + Fraction(3, 2)
    assert isinstance(d, Fraction)
    assert Metric.l2().distance((Fraction(7, 2),), (1,)) == Fraction(5, 2)


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("metric", ALL_KINDS, ids=lambda m: m.label)
def test_triangle_inequality_1000_triples(metric, dim):
    rng = random.Random(97 * dim + hash(metric.kind) % 100)
    for _ in range(1000):
        a, b, c = (tuple(rng.uniform(-10, 10) for _ in range(dim)) for _ in range(3))
        assert metric.distance(a, c) <= metric.distance(a, b) + metric.distance(b, c) + 1e-9


def test_lp_limits_agree_with_l1_l2():
    rng = random.Random(5)
    lp1, lp2 = Metric.lp(1), Metric.lp(2)
    for _ in range(1000):
        a = tuple(rng.uniform(-10, 10) for _ in range(3))
        b = tuple(rng.uniform(-10, 10) for _ in range(3))
        assert abs(lp1.distance(a, b) - Metric.l1().distance(a, b)) <= 1e-12
        assert abs(lp2.distance(a, b) - Metric.l2().distance(a, b)) <= 1e-12


def test_lp_monotone_in_p():
    rng = random.Random(6)
    ps = [1, 1.5, 2, 3, 4, 8, 16, 64]
    for _ in range(1000):
        a = tuple(rng.uniform(-5, 5) for _ in range(3))
        b = tuple(rng.uniform(-5, 5) for _ in range(3))
        linf = Metric.linf().distance(a, b)
        l1 = Metric.l1().distance(a, b)
        prev = l1
        for p in ps:
            d = Metric.lp(p).distance(a, b)
            assert linf - 1e-12 <= d <= l1 + 1e-12
            assert d <= prev + 1e-12      # non-increasing in p
            prev = d


def test_point_validation():
    with pytest.raises(ValueError):
        Point(())
    with pytest.raises(ValueError):
        Point((float("nan"),))
    with pytest.raises(ValueError):
        Point((1.0, float("inf")))
    assert Point((1, Fraction(1, 2), 0.25)).dim == 3


def test_finite_space_dedupes_and_checks_membership():
    sp = Space.finite([(0,), (1,), (0,), (2,)], Metric.l1())
    assert len(sp.points) == 3
    assert sp.contains((1,))
    assert not sp.contains((5,))
    with pytest.raises(ValueError):
        sp.require_member((5,))
    with pytest.raises(ValueError):
        sp.require_member((1, 0))


def test_membership_restriction():
    import math
    mem = ke.Membership(isolated=(-2, -1), intervals=((0, math.inf),))
    sp = Space.continuum(1, Metric.l1(), mem)
    assert sp.contains((-2,)) and sp.contains((0,)) and sp.contains((17.5,))
    assert not sp.contains((-0.5,)) and not sp.contains((-3,))
    with pytest.raises(ValueError):
        Space.continuum(2, Metric.l1(), mem)   # 1D only


def test_verify_metric_axioms_clean_for_norm_metrics():
    for metric in (Metric.l1(), Metric.l2()):
        sp = Space.continuum(2, metric)
        report = ke.verify_metric_axioms(sp, 1000, seed=42)
        assert report.ok, report.violations[:3]


def test_verify_metric_axioms_finite_space():
    sp = Space.finite([(0,), (1,), (5,)], Metric.l1())
    assert ke.verify_metric_axioms(sp, 100, seed=1).ok


def test_verify_metric_axioms_sample_count_precondition():
    sp = Space.continuum(1, Metric.l1())
    with pytest.raises(ValueError):
        ke.verify_metric_axioms(sp, 2)


def test_sample_points_deterministic():
    sp = Space.continuum(2, Metric.l2())
    assert ke.sample_points(sp, 10, seed=3) == ke.sample_points(sp, 10, seed=3)
    assert ke.sample_points(sp, 10, seed=3) != ke.sample_points(sp, 10, seed=4)


def test_distance_free_function():
    assert ke.distance(Metric.l1(), (1, 0), (0, 1)) == 2
    assert ke.distance(Metric.l2(), 3, 7) == 4     # scalars coerce to 1D points


class _Asymmetric(Metric):
    """Deliberately broken metric used to exercise violation reporting."""

    def distance(self, a, b):
        d = super().distance(a, b)
        return d * 1.5 if a > b else d


def test_axiom_violations_are_reported_not_raised():
    sp = Space.continuum(1, _Asymmetric("l1"))
    report = ke.verify_metric_axioms(sp, 500, seed=9)
    assert not report.ok
    kinds = {v.axiom for v in report.violations}
    assert "symmetry" in kinds
    v = report.violations[0]
    assert len(v.points) >= 1 and v.amount > 0
