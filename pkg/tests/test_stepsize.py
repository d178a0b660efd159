import numpy as np
import pytest

from beamsim.stepsize import (
    AssParams,
    FssParams,
    MassParams,
    StepSizeBounds,
    StepSizeState,
    TaassParams,
    ass_update,
    clamp,
    fss_update,
    make_mechanism,
    mass_update,
    taass_update,
)

BOUNDS = StepSizeBounds(mu_min=1e-6, mu_max=1e-4)
WIDE = StepSizeBounds(mu_min=1e-300, mu_max=1e300)


class TestClamp:
    def test_three_cases(self):
        assert clamp(5e-4, BOUNDS) == 1e-4
        assert clamp(1e-8, BOUNDS) == 1e-6
        assert clamp(5e-5, BOUNDS) == 5e-5


class TestParamValidation:
    def test_bounds_ordering(self):
        with pytest.raises(ValueError, match="0 < mu_min < mu_max"):
            StepSizeBounds(mu_min=1e-4, mu_max=1e-6)
        with pytest.raises(ValueError):
            StepSizeBounds(mu_min=0.0, mu_max=1e-4)

    def test_mass_taass_ranges(self):
        with pytest.raises(ValueError):
            MassParams(alpha=1.0, gamma=1e-3, bounds=BOUNDS, mu0=1e-5)
        with pytest.raises(ValueError):
            MassParams(alpha=0.9, gamma=0.0, bounds=BOUNDS, mu0=1e-5)
        with pytest.raises(ValueError):
            MassParams(alpha=0.9, gamma=1e-3, bounds=BOUNDS, mu0=1.0)
        with pytest.raises(ValueError):
            TaassParams(alpha=0.9, gamma=1e-3, beta=1.0, bounds=BOUNDS, mu0=1e-5)
        with pytest.raises(ValueError):
            AssParams(rho=-1.0, bounds=BOUNDS, mu0=1e-5)
        with pytest.raises(ValueError):
            FssParams(mu=-1e-9)


class TestFss:
    def test_mu_never_changes(self):
        state = StepSizeState(mu=1e-4)
        for e in np.random.default_rng(0).normal(size=1000):
            state = fss_update(state, float(e))
            assert state.mu == 1e-4
        assert (state.adds, state.mults) == (0, 0)


class TestMass:
    def test_pure_decay_when_error_zero(self):
        params = MassParams(alpha=0.98, gamma=1e-3, bounds=BOUNDS, mu0=1e-5)
        state = StepSizeState(mu=1e-5)
        state = mass_update(state, 0.0, params)
        assert state.mu == pytest.approx(0.98e-5, rel=1e-15)

    def test_geometric_decay_matches_power(self):
        params = MassParams(alpha=0.98, gamma=1e-300, bounds=WIDE, mu0=1e-5)
        state = StepSizeState(mu=params.mu0)
        for i in range(1, 301):
            state = mass_update(state, 0.0, params)
            assert state.mu == pytest.approx(0.98**i * 1e-5, rel=1e-12)

    def test_example_update_clamps_at_upper_bound(self):
        # alpha mu + gamma e^2 = 0.98e-5 + 1e-3 >> mu_max
        params = MassParams(alpha=0.98, gamma=1e-3, bounds=BOUNDS, mu0=1e-5)
        state = mass_update(StepSizeState(mu=1e-5), 1.0, params)
        assert state.mu == 1e-4

    def test_counters_exact(self):
        params = MassParams(alpha=0.98, gamma=1e-3, bounds=BOUNDS, mu0=1e-5)
        state = mass_update(StepSizeState(mu=1e-5), 0.3, params)
        assert (state.adds, state.mults) == (1, 3)

    def test_monotone_toward_fixed_point(self):
        # fixed e: mu moves monotonically toward gamma e^2 / (1 - alpha)
        params = MassParams(alpha=0.9, gamma=1e-3, bounds=WIDE, mu0=1e-5)
        fixed_point = 1e-3 * 0.25 / 0.1
        low = StepSizeState(mu=fixed_point / 10)
        high = StepSizeState(mu=fixed_point * 10)
        for _ in range(50):
            nlow = mass_update(low, 0.5, params)
            nhigh = mass_update(high, 0.5, params)
            assert nlow.mu >= low.mu
            assert nhigh.mu <= high.mu
            low, high = nlow, nhigh

    def test_stays_in_box(self):
        params = MassParams(alpha=0.98, gamma=1e-3, bounds=BOUNDS, mu0=5e-5)
        state = StepSizeState(mu=5e-5)
        for e in np.random.default_rng(1).normal(scale=3.0, size=2000):
            state = mass_update(state, float(e), params)
            assert BOUNDS.mu_min <= state.mu <= BOUNDS.mu_max


class TestTaass:
    def test_worked_example(self):
        bounds = StepSizeBounds(1e-6, 3e-4)
        params = TaassParams(alpha=0.98, gamma=1e-3, beta=0.99, bounds=bounds, mu0=1e-4)
        state = StepSizeState(mu=1e-4, v=0.0, prev_error=1.0)
        state = taass_update(state, 1.0, params)
        assert state.v == pytest.approx(0.01, rel=1e-12)
        assert state.mu == pytest.approx(9.81e-5, rel=1e-9)

    def test_first_call_is_pure_decay(self):
        params = TaassParams(alpha=0.98, gamma=1e-3, beta=0.99, bounds=BOUNDS, mu0=1e-5)
        state = taass_update(StepSizeState(mu=1e-5), 5.0, params)
        assert state.v == 0.0
        assert state.mu == pytest.approx(0.98e-5, rel=1e-15)
        assert state.prev_error == 5.0

    def test_beta_near_one_freezes_average(self):
        params = TaassParams(
            alpha=0.98, gamma=1e-3, beta=1.0 - 1e-15, bounds=WIDE, mu0=1e-5
        )
        state = StepSizeState(mu=1e-5, v=0.37, prev_error=2.0)
        state = taass_update(state, 2.0, params)
        assert state.v == pytest.approx(0.37, rel=1e-12)

    def test_counters_exact(self):
        params = TaassParams(alpha=0.98, gamma=1e-3, beta=0.99, bounds=BOUNDS, mu0=1e-5)
        state = taass_update(StepSizeState(mu=1e-5), 0.2, params)
        assert (state.adds, state.mults) == (2, 6)

    def test_reduces_to_mass_on_squared_error_when_beta_tiny(self):
        # constant error stream, beta -> 0+: v -> e^2, so the mu recursion
        # matches MASS driven by e^2 in place of e
        e = 0.5
        taass = TaassParams(alpha=0.98, gamma=1e-3, beta=1e-6, bounds=WIDE, mu0=1e-5)
        mass = MassParams(alpha=0.98, gamma=1e-3, bounds=WIDE, mu0=1e-5)
        ts = StepSizeState(mu=1e-5, prev_error=e)
        ms = StepSizeState(mu=1e-5)
        for _ in range(100):
            ts = taass_update(ts, e, taass)
            ms = mass_update(ms, e * e, mass)
            assert ts.mu == pytest.approx(ms.mu, abs=1e-9)

    def test_stays_in_box(self):
        bounds = StepSizeBounds(1e-6, 3e-4)
        params = TaassParams(alpha=0.98, gamma=1e-3, beta=0.99, bounds=bounds, mu0=1e-4)
        state = StepSizeState(mu=1e-4)
        for e in np.random.default_rng(2).normal(scale=5.0, size=2000):
            state = taass_update(state, float(e), params)
            assert bounds.mu_min <= state.mu <= bounds.mu_max


class TestAss:
    def setup_method(self):
        self.rng = np.random.default_rng(8)
        self.params = AssParams(rho=1e-6, bounds=StepSizeBounds(1e-6, 3e-4), mu0=1e-5)

    def _info(self, m):
        x = self.rng.standard_normal(m) + 1j * self.rng.standard_normal(m)
        px = x - x.mean()  # any blocked vector works for counter checks
        y = complex(self.rng.standard_normal() + 1j * self.rng.standard_normal())
        return float(abs(y) ** 2 - 1), y, x, px

    def test_first_call_with_zero_gradient_keeps_mu(self):
        e, y, x, px = self._info(6)
        state = StepSizeState(mu=1e-5, g=np.zeros(6, dtype=complex))
        out = ass_update(state, e, y, x, px, self.params)
        assert out.mu == 1e-5
        assert np.any(out.g != 0)

    def test_rho_zero_reduces_to_fixed_step(self):
        params = AssParams(rho=0.0, bounds=StepSizeBounds(1e-6, 3e-4), mu0=1e-5)
        state = StepSizeState(mu=1e-5, g=np.zeros(4, dtype=complex))
        for _ in range(50):
            state = ass_update(state, *self._info(4), params)
            assert state.mu == 1e-5

    def test_counter_growth_is_linear_in_m(self):
        counts = {}
        for m in (8, 16, 24, 32):
            state = StepSizeState(mu=1e-5, g=np.zeros(m, dtype=complex))
            state = ass_update(state, *self._info(m), self.params)
            counts[m] = (state.adds, state.mults)
        # equal increments over an arithmetic m progression: linear growth
        assert counts[16][0] - counts[8][0] == counts[24][0] - counts[16][0]
        assert counts[16][1] - counts[8][1] == counts[24][1] - counts[16][1]
        assert counts[16][0] > counts[8][0]
        # doubling m roughly doubles the cost, up to the fixed overhead
        assert counts[16][1] / counts[8][1] == pytest.approx(2.0, rel=0.1)
        assert counts[32][1] / counts[16][1] == pytest.approx(2.0, rel=0.1)

    def test_stays_in_box(self):
        params = AssParams(rho=1e-3, bounds=StepSizeBounds(1e-6, 3e-4), mu0=1e-4)
        state = StepSizeState(mu=1e-4, g=np.zeros(5, dtype=complex))
        for _ in range(500):
            state = ass_update(state, *self._info(5), params)
            assert params.bounds.mu_min <= state.mu <= params.bounds.mu_max


class TestMechanismFactory:
    def test_counters_independent_of_array_size(self):
        mass = make_mechanism("mass", MassParams(0.98, 1e-3, BOUNDS, 1e-5))
        taass = make_mechanism("taass", TaassParams(0.98, 1e-3, 0.99, BOUNDS, 1e-5))
        for mech, expected in ((mass, (1, 3)), (taass, (2, 6))):
            for m in (2, 16, 64):
                state = mech.initial_state(m)
                x = np.ones(m, dtype=complex)
                state = mech.update(state, 0.5, 1.0 + 0j, x, x)
                assert (state.adds, state.mults) == expected

    def test_unknown_kind_and_wrong_params(self):
        with pytest.raises(ValueError):
            make_mechanism("rls", FssParams(mu=1e-5))
        with pytest.raises(TypeError):
            make_mechanism("mass", FssParams(mu=1e-5))
