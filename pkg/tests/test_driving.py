import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impns.driving import (
    BilinearForm,
    Forcing,
    HullPoint,
    ImpulseOperator,
    ImpulseSchedule,
    SampleGrid,
    apply_impulse,
    estimate_B_norm,
    estimate_f_norm,
    eval_forcing,
    hull_distance,
    shift,
)
from impns.spectral import StateVector

TANH5 = 0.9999092042625951  # mpmath, 50 digits


class TestShift:
    def test_identity(self):
        assert shift(HullPoint(0.0), 0.0).shift_tau == 0.0

    def test_additive(self):
        assert shift(HullPoint(1.5), 2.5).shift_tau == 4.0

    @settings(deadline=None, max_examples=30)
    @given(
        tau=st.floats(0, 50),
        s=st.floats(0, 50),
        t=st.floats(0, 50),
    )
    def test_flow_property(self, tau, s, t):
        lhs = shift(shift(HullPoint(tau), t), s).shift_tau
        rhs = shift(HullPoint(tau), s + t).shift_tau
        assert lhs == pytest.approx(rhs, rel=1e-15, abs=1e-300)

    def test_chained_example(self):
        assert shift(shift(HullPoint(1.0), 2.0), 3.0).shift_tau == shift(
            HullPoint(1.0), 5.0
        ).shift_tau == 6.0


def piecewise_forcing(t_jump: float, v1: StateVector, v2: StateVector) -> Forcing:
    def ev(t, u):
        return v2 if t >= t_jump else v1

    return Forcing(
        evaluator=ev,
        bound_M=max(v1.norm_h, v2.norm_h),
        lipschitz_L=0.0,
        sup_norm_f1=max(v1.norm_h, v2.norm_h),
        dim=v1.dim,
        discontinuity_times=(t_jump,),
    )


class TestEvalForcing:
    def test_constant_autonomous(self):
        c = StateVector([2.0, 0.0])
        f = Forcing.constant(c)
        out = eval_forcing(f, 3.7, HullPoint(11.0), StateVector.zeros(2))
        np.testing.assert_array_equal(out.coeffs, c.coeffs)

    def test_right_continuity_at_jump(self):
        v1, v2 = StateVector([1.0]), StateVector([5.0])
        f = piecewise_forcing(1.0, v1, v2)
        out = eval_forcing(f, 1.0, HullPoint(0.0), StateVector.zeros(1))
        assert out.coeffs[0] == 5.0

    def test_shift_composition(self):
        v1, v2 = StateVector([1.0]), StateVector([5.0])
        f = piecewise_forcing(1.0, v1, v2)
        out = eval_forcing(f, 0.0, HullPoint(1.0), StateVector.zeros(1))
        assert out.coeffs[0] == 5.0


class TestImpulseOperators:
    def test_zero(self):
        sched = ImpulseSchedule(np.array([1.0]), (ImpulseOperator.zero(),))
        out = apply_impulse(sched, 0, StateVector([1.0, 1.0]))
        np.testing.assert_array_equal(out.coeffs, [1.0, 1.0])

    def test_constant_jump(self):
        op = ImpulseOperator.constant(StateVector([0.1, 0.0]))
        sched = ImpulseSchedule(np.array([1.0]), (op,))
        out = apply_impulse(sched, 0, StateVector([1.0, 1.0]))
        np.testing.assert_allclose(out.coeffs, [1.1, 1.0], rtol=1e-15)

    def test_saturation_closed_form(self):
        op = ImpulseOperator.saturation(1.0, StateVector([1.0, 0.0]))
        sched = ImpulseSchedule(np.array([1.0]), (op,))
        out = apply_impulse(sched, 0, StateVector([3.0, 4.0]))
        np.testing.assert_allclose(out.coeffs, [3.0 + TANH5, 4.0], rtol=1e-15)

    def test_index_out_of_range(self):
        sched = ImpulseSchedule(np.array([1.0]), (ImpulseOperator.zero(),))
        with pytest.raises(IndexError):
            apply_impulse(sched, 1, StateVector([1.0]))

    def test_jump_identity_bit_exact(self):
        op = ImpulseOperator.saturation(0.7, StateVector([0.0, 2.0]))
        sched = ImpulseSchedule(np.array([1.0]), (op,))
        u = StateVector([0.3, -0.8])
        post = apply_impulse(sched, 0, u)
        np.testing.assert_array_equal(post.coeffs - u.coeffs, op(u).coeffs)

    @pytest.mark.parametrize(
        "op",
        [
            ImpulseOperator.zero(),
            ImpulseOperator.constant(StateVector([0.3, -0.1])),
            ImpulseOperator.saturation(0.8, StateVector([1.0, 1.0])),
        ],
        ids=["zero", "constant", "saturation"],
    )
    def test_boundedness_and_lipschitz(self, op):
        rng = np.random.default_rng(7)
        K2, K3 = op.sup_bound, op.lipschitz
        for _ in range(1000):
            u = StateVector(rng.standard_normal(2) * rng.uniform(0, 20))
            v = StateVector(rng.standard_normal(2) * rng.uniform(0, 20))
            assert op(u).norm_h <= K2 * (1 + 1e-12)
            assert (op(u) - op(v)).norm_h <= K3 * (u - v).norm_h * (1 + 1e-12) + 1e-15

    def test_custom_flagged_unverified(self):
        op = ImpulseOperator.custom(lambda u: u * 0.0, sup_bound=1.0, lipschitz=0.5)
        assert not op.verified
        sched = ImpulseSchedule(np.array([1.0]), (op,))
        assert not sched.all_verified


class TestSchedule:
    def test_strictly_increasing_enforced(self):
        ops = (ImpulseOperator.zero(), ImpulseOperator.zero())
        with pytest.raises(ValueError):
            ImpulseSchedule(np.array([1.0, 1.0]), ops)
        with pytest.raises(ValueError):
            ImpulseSchedule(np.array([2.0, 1.0]), ops)

    def test_count_up_to(self):
        sched = ImpulseSchedule(
            np.array([0.5, 1.0, 2.0]),
            (ImpulseOperator.zero(),) * 3,
        )
        assert sched.count_up_to(0.4) == 0
        assert sched.count_up_to(1.0) == 2  # t_k <= T counts
        assert sched.count_up_to(5.0) == 3

    def test_constants(self):
        sched = ImpulseSchedule(
            np.array([1.0, 2.0]),
            (
                ImpulseOperator.constant(StateVector([0.3, 0.0])),
                ImpulseOperator.saturation(0.2, StateVector([1.0, 0.0])),
            ),
        )
        assert sched.sup_bound_K2 == pytest.approx(0.3)
        assert sched.lipschitz_K3 == pytest.approx(0.2)
        assert sched.gamma_Gamma == pytest.approx(0.5)

    def test_gamma_override(self):
        sched = ImpulseSchedule(
            np.array([1.0]),
            (ImpulseOperator.zero(),),
            gamma_override=np.inf,
        )
        assert np.isinf(sched.gamma_Gamma)


class TestBilinearFormInvariants:
    def test_bilinearity_random_triples(self):
        b = BilinearForm.toy_skew(scale=1.3)
        rng = np.random.default_rng(9)
        for _ in range(20):
            u1, u2, v = (StateVector(rng.standard_normal(2)) for _ in range(3))
            a_c, b_c = rng.standard_normal(2)
            lhs = b.evaluator(0.0, StateVector(a_c * u1.coeffs + b_c * u2.coeffs), v)
            rhs = a_c * b.evaluator(0.0, u1, v) + b_c * b.evaluator(0.0, u2, v)
            np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-12, atol=1e-14)
            lhs_v = b.evaluator(0.0, v, StateVector(a_c * u1.coeffs + b_c * u2.coeffs))
            rhs_v = a_c * b.evaluator(0.0, v, u1) + b_c * b.evaluator(0.0, v, u2)
            np.testing.assert_allclose(lhs_v.coeffs, rhs_v.coeffs, rtol=1e-12,
                                       atol=1e-14)

    def test_size_and_difference_bounds(self):
        # |B(u,u)| <= Binf |u|^2 and the two-solution difference bound
        b = BilinearForm.toy_skew(scale=0.9)
        rng = np.random.default_rng(10)
        for _ in range(200):
            u = StateVector(rng.standard_normal(2) * rng.uniform(0, 3))
            v = StateVector(rng.standard_normal(2) * rng.uniform(0, 3))
            buu = b.evaluator(0.0, u, u)
            bvv = b.evaluator(0.0, v, v)
            assert b.measure(buu) <= b.norm_bound_Binf * u.norm_h**2 * (1 + 1e-12)
            gap = b.measure(buu - bvv)
            assert gap <= b.norm_bound_Binf * (u.norm_h + v.norm_h) * (
                u - v
            ).norm_h * (1 + 1e-12) + 1e-15


class TestEstimateBNorm:
    def test_zero_form(self):
        assert estimate_B_norm(BilinearForm.zero(3), 50, rng_seed=0) == 0.0

    def test_toy_skew_bounded_by_analytic(self):
        b = BilinearForm.toy_skew(scale=1.0)
        est = estimate_B_norm(b, 400, rng_seed=1)
        assert est <= b.norm_bound_Binf * (1 + 1e-12)
        assert est > 0.5  # random unit pairs come close to the sup = 1

    def test_scaled(self):
        b = BilinearForm.toy_skew(scale=2.5)
        est = estimate_B_norm(b, 400, rng_seed=1)
        assert est <= 2.5 * (1 + 1e-12)


class TestEstimateFNorm:
    def test_constant(self):
        c = StateVector([0.0, 2.0])
        assert estimate_f_norm(Forcing.constant(c), 1.0, 51) == pytest.approx(2.0)

    def test_sinusoidal_hits_peak(self):
        c = StateVector([1.0])
        f = Forcing.sinusoidal(c, freq=1.0)
        # odd grid over [0, pi] contains pi/2 exactly
        assert estimate_f_norm(f, np.pi, 201) == pytest.approx(1.0, rel=1e-12)

    def test_zero(self):
        assert estimate_f_norm(Forcing.zero(2), 1.0, 11) == 0.0

    def test_dominated_by_declared(self):
        f = Forcing.sinusoidal(StateVector([1.0, 1.0]), freq=3.0)
        assert estimate_f_norm(f, 10.0, 301) <= f.sup_norm_f1 * (1 + 1e-12)


class TestHullDistance:
    def grid(self):
        return SampleGrid(times=np.linspace(0.0, np.pi, 101), state_count=4, seed=5)

    def test_equal_shifts_zero(self):
        f = Forcing.sinusoidal(StateVector([1.0, 0.0]))
        b = BilinearForm.toy_skew()
        assert hull_distance(HullPoint(1.3), HullPoint(1.3), f, b, self.grid()) == 0.0

    def test_autonomous_data_zero(self):
        f = Forcing.constant(StateVector([1.0, 2.0]))
        b = BilinearForm.toy_skew()
        assert hull_distance(HullPoint(0.0), HullPoint(7.0), f, b, self.grid()) == 0.0

    def test_sin_shifted_pi(self):
        f = Forcing.sinusoidal(StateVector([1.0, 0.0]))
        b = BilinearForm.zero(2)
        d = hull_distance(HullPoint(0.0), HullPoint(np.pi), f, b, self.grid())
        assert d == pytest.approx(2.0, rel=1e-12)

    def test_pseudometric(self):
        f = Forcing.sinusoidal(StateVector([0.3, 1.0]), freq=2.0)
        b = BilinearForm.toy_skew(scale=0.5)
        g = self.grid()
        rng = np.random.default_rng(11)
        for _ in range(5):
            o1, o2, o3 = (HullPoint(x) for x in rng.uniform(0, 5, 3))
            d12 = hull_distance(o1, o2, f, b, g)
            d21 = hull_distance(o2, o1, f, b, g)
            d13 = hull_distance(o1, o3, f, b, g)
            d23 = hull_distance(o2, o3, f, b, g)
            assert d12 >= 0
            assert d12 == pytest.approx(d21, abs=1e-12)
            assert d13 <= d12 + d23 + 1e-12
