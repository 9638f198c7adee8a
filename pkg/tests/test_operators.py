import math

import numpy as np
import pytest

from wcodyn.domain import AffineLatticeMap, Region
from wcodyn.operators import (
    OperatorError,
    WeightedCompositionOperator,
    apply,
    apply_inverse,
    iterate,
    iterate_log,
    operator_norm_bound,
)
from wcodyn.spaces import (
    ConstantWeight,
    EllPNorm,
    RadialPowerWeight,
    SampleFunction,
    TableWeight,
    norm,
    weighted_norm,
)


def chi(*pts):
    return SampleFunction.indicator([(p,) for p in pts])


def make_op(offset=-1, w=1.0, region=None):
    region = region or Region.box([[-8, 8]])
    return WeightedCompositionOperator(
        AffineLatticeMap.translation((offset,)), ConstantWeight(w), region
    )


class TestApply:
    def test_unit_symbol_moves_bump(self):
        assert apply(make_op(), chi(0)) == chi(1)

    def test_identity_map(self):
        op = make_op(offset=0)
        f = SampleFunction({(0,): 1.0, (4,): -2.0})
        assert apply(op, f) == f

    def test_symbol_scales(self):
        got = apply(make_op(w=2.0), chi(0))
        assert got == SampleFunction({(1,): 2.0})

    def test_linearity_exact(self):
        op = make_op(w=3.0)
        f, g = chi(0, 2), chi(1)
        lhs = apply(op, 2 * f + (-0.5) * g)
        rhs = 2 * apply(op, f) + (-0.5) * apply(op, g)
        assert lhs == rhs


class TestApplyInverse:
    def test_inverse_contract(self):
        rng = np.random.default_rng(11)
        op = make_op(w=1.7)
        f = SampleFunction({(int(i),): v for i, v in zip(rng.integers(-5, 6, 5), rng.normal(size=5))})
        back = apply(op, apply_inverse(op, f))
        assert back.support == f.support
        for pt, v in f.items():
            assert back[pt] == pytest.approx(v, abs=1e-12)

    def test_unit_symbol_pullback(self):
        assert apply_inverse(make_op(), chi(0)) == chi(-1)

    def test_symbol_divides(self):
        got = apply_inverse(make_op(w=2.0), chi(1))
        assert got == SampleFunction({(0,): 0.5})


class TestIterate:
    def test_empty_power_is_identity(self):
        f = chi(0, 3)
        assert iterate(make_op(w=2.0), 0, f) == f

    def test_matches_double_apply(self):
        op = make_op(w=2.0)
        assert iterate(op, 2, chi(0)) == apply(op, apply(op, chi(0)))
        got = iterate(op, 2, chi(0))
        assert got == SampleFunction({(2,): 4.0})

    def test_negative_matches_double_inverse(self):
        op = make_op(w=2.0)
        want = apply_inverse(op, apply_inverse(op, chi(2)))
        got = iterate(op, -2, chi(2))
        assert got.support == want.support == {(0,)}
        assert got[(0,)] == pytest.approx(0.25, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 7])
    def test_agrees_with_nfold_apply(self, n):
        table = TableWeight({(x,): 1.0 + 0.1 * (x % 5) for x in range(-40, 40)})
        op = WeightedCompositionOperator(
            AffineLatticeMap.translation((-1,)), table, Region.box([[-8, 8]])
        )
        rng = np.random.default_rng(n)
        f = SampleFunction({(int(i),): complex(a, b) for i, a, b in
                            zip(rng.integers(-5, 6, 4), rng.normal(size=4), rng.normal(size=4))})
        fwd = f
        for _ in range(n):
            fwd = apply(op, fwd)
        got = iterate(op, n, f)
        assert got.support == fwd.support
        for pt, v in fwd.items():
            assert got[pt] == pytest.approx(v, rel=1e-9)
        bwd = f
        for _ in range(n):
            bwd = apply_inverse(op, bwd)
        gotb = iterate(op, -n, f)
        assert gotb.support == bwd.support
        for pt, v in bwd.items():
            assert gotb[pt] == pytest.approx(v, rel=1e-9)

    def test_semigroup_mixed_signs(self):
        op = make_op(w=1.3)
        f = chi(0, 1)
        lhs = iterate(op, 5 - 3, f)
        rhs = iterate(op, 5, iterate(op, -3, f))
        assert lhs.support == rhs.support
        for pt, v in lhs.items():
            assert rhs[pt] == pytest.approx(v, rel=1e-9)

    def test_log_magnitude_growth(self):
        op = make_op(w=2.0)
        logs = iterate_log(op, 2000, chi(0))
        (pt, (mag, phase)), = logs.items()
        assert pt == (2000,)
        assert mag == pytest.approx(2000 * math.log(2.0), abs=1e-9)
        assert phase == 1.0

    def test_overflowing_iterate_is_reported(self):
        op = make_op(w=2.0)
        with pytest.raises(OperatorError, match="iterate_log"):
            iterate(op, 2000, chi(0))


class TestConjugationIdentities:
    """On the unweighted space the norm of an iterate equals the norm of the
    weight product pinned to the original support."""

    def _setup(self):
        table = TableWeight({(x,): 1.0 + 0.2 * ((x + 100) % 7) for x in range(-120, 120)})
        op = WeightedCompositionOperator(
            AffineLatticeMap.translation((-1,)), table, Region.box([[-8, 8]])
        )
        rng = np.random.default_rng(5)
        f = SampleFunction({(int(i),): v for i, v in zip(rng.integers(-6, 7, 5), rng.normal(size=5))})
        return op, f

    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_forward(self, n):
        op, f = self._setup()
        spec = EllPNorm(2)
        lhs = norm(spec, iterate(op, n, f))
        prod = {}
        for pt, v in f.items():
            acc = 1.0
            q = pt
            for _ in range(n):
                q = op.map.inverse.apply(q)
                acc *= op.symbol.value_at(q)
            prod[pt] = v * acc
        rhs = norm(spec, SampleFunction(prod))
        assert lhs == pytest.approx(rhs, rel=1e-9)

    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_backward(self, n):
        op, f = self._setup()
        spec = EllPNorm(2)
        lhs = norm(spec, iterate(op, -n, f))
        prod = {}
        for pt, v in f.items():
            acc = 1.0
            q = pt
            for _ in range(n):
                acc /= op.symbol.value_at(q)
                q = op.map.apply(q)
            prod[pt] = v * acc
        rhs = norm(spec, SampleFunction(prod))
        assert lhs == pytest.approx(rhs, rel=1e-9)


class TestNormBound:
    def test_unit_everything(self):
        got = operator_norm_bound(make_op(), ConstantWeight(1.0), Region.box([[-5, 5]]))
        assert got == 1.0

    def test_doubling_symbol_with_radial_weight(self):
        got = operator_norm_bound(
            make_op(w=2.0), RadialPowerWeight(p=1), Region.box([[-5, 5]])
        )
        assert got == pytest.approx(4.0, rel=1e-12)

    def test_bound_holds_on_random_functions(self):
        eta = RadialPowerWeight(p=1)
        region = Region.box([[-9, 9]])
        op = make_op(w=2.0, region=region)
        bound = operator_norm_bound(op, eta, region)
        spec = EllPNorm(1)
        rng = np.random.default_rng(23)
        for _ in range(50):
            f = SampleFunction(
                {(int(i),): v for i, v in zip(rng.integers(-6, 7, 4), rng.normal(size=4))}
            )
            assert weighted_norm(spec, eta, apply(op, f)) <= bound * weighted_norm(
                spec, eta, f
            ) * (1 + 1e-12)

    def test_symbol_must_be_bounded_away_from_zero(self):
        tiny = TableWeight({(0,): 1.0}, default=None)
        with pytest.raises(Exception):
            WeightedCompositionOperator(
                AffineLatticeMap.translation((-1,)), tiny, Region.box([[-2, 2]])
            )
