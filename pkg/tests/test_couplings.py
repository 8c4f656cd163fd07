import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import collect
from fcltmc.couplings import (
    JointStepLaw,
    Kappa,
    build_ar1_pair,
    build_ct_pair,
    build_dt0_pair,
    wkappa_by_quadrature,
)
from fcltmc.errors import ConfigurationError
from fcltmc.gaussian_paths import Ar1Params, Path, TimeGrid
from fcltmc.metrics import continuum_tail, l1_diff
from fcltmc.oracles import l1_rate, var_wkappa_ct


class TestKappa:
    def test_accepts_reals_at_least_one(self):
        assert Kappa(1.0).value == 1.0
        assert Kappa(3.7).value == 3.7

    def test_rejects_below_one(self):
        with pytest.raises(ConfigurationError):
            Kappa(0.99)


class TestJointStepLaw:
    @given(st.floats(min_value=1e-6, max_value=1.0))
    def test_positive_semidefinite(self, step):
        law = JointStepLaw(step)
        assert 0.0 < law.correlation <= 1.0
        l11, l21, l22 = law.cholesky()
        # reassemble the covariance from the factor
        assert l11 * l11 == pytest.approx(law.var_dw, rel=1e-12)
        assert l11 * l21 == pytest.approx(law.cov, rel=1e-12)
        assert l21**2 + l22**2 == pytest.approx(law.var_i, rel=1e-9)

    def test_small_step_margin(self):
        # var_i - cov^2/var_dw ~ step^3/3: tiny but positive
        law = JointStepLaw(1e-4)
        _, l21, l22 = law.cholesky()
        assert l22 > 0.0


class TestCtPair:
    def test_zero_at_time_zero(self, stream):
        pair = build_ct_pair(4.0, 1.0, 1.0 / 64.0, stream)
        assert pair.w.values[0] == 0.0
        assert pair.w_kappa.values[0] == 0.0

    def test_identity_exact_per_sample(self, stream):
        for i in range(20):
            pair = build_ct_pair(4.0, 1.0, 1.0 / 64.0, stream.replicate(i))
            gap = pair.w_kappa.values - pair.w.values - pair.residual.values
            assert np.max(np.abs(gap)) < 1e-14

    def test_limit_process_variance_is_t(self, stream):
        reps = 8000
        ends = collect(
            lambda s: build_ct_pair(4.0, 1.0, 1.0 / 64.0, s).w.values[-1],
            reps,
            stream.block(1),
        )
        var = ends.var(ddof=1)
        assert abs(var - 1.0) <= 3.0 * var * math.sqrt(2.0 / (reps - 1))

    def test_rescaled_process_variance_matches_formula(self, stream):
        reps = 20000
        ends = collect(
            lambda s: build_ct_pair(1.0, 1.0, 1.0 / 64.0, s).w_kappa.values[-1],
            reps,
            stream.block(2),
        )
        var = ends.var(ddof=1)
        target = var_wkappa_ct(1.0, 1.0)
        assert abs(var - target) <= 3.0 * var * math.sqrt(2.0 / (reps - 1))

    def test_step_budget_guard(self, stream):
        with pytest.raises(ConfigurationError):
            build_ct_pair(1e6, 1000.0, 1e-6, stream)


class TestQuadratureOracle:
    def test_zero_integrand(self):
        g = TimeGrid(t_end=4.0, step=0.25)
        out = TimeGrid(t_end=1.0, step=0.0625)
        q = wkappa_by_quadrature(Path(g, np.zeros(g.n_points)), 4.0, out)
        assert np.all(q.values == 0.0)

    def test_constant_integrand_exact(self):
        c, k = 1.7, 4.0
        g = TimeGrid(t_end=4.0, step=0.25)
        out = TimeGrid(t_end=1.0, step=0.0625)
        q = wkappa_by_quadrature(Path(g, np.full(g.n_points, c)), k, out)
        expected = c * math.sqrt(k) * out.times()
        assert np.max(np.abs(q.values - expected)) < 1e-12

    def test_grid_mismatch_rejected(self):
        g = TimeGrid(t_end=4.0, step=0.25)
        out = TimeGrid(t_end=1.0, step=0.125)
        with pytest.raises(ConfigurationError):
            wkappa_by_quadrature(Path(g, np.zeros(g.n_points)), 4.0, out)

    def test_refinement_shrinks_discrepancy(self, stream):
        rms = []
        for h in (1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0):
            pair = build_ct_pair(4.0, 1.0, h, stream.replicate(7))
            x_path = Path(
                TimeGrid(t_end=4.0, step=h), pair.diagnostics["x_fine"]
            )
            q = wkappa_by_quadrature(x_path, 4.0, pair.w.grid)
            rms.append(
                math.sqrt(float(np.mean((q.values - pair.w_kappa.values) ** 2)))
            )
        assert rms[0] / rms[1] >= 1.3
        assert rms[1] / rms[2] >= 1.3


class TestDt0Pair:
    def test_residual_vanishes_at_knots(self, stream):
        pair = build_dt0_pair(4.0, 1.0, stream, substeps=16)
        knots = pair.residual.values[::16]
        assert np.max(np.abs(knots)) < 1e-12

    def test_cell_residual_is_scaled_bridge(self, stream):
        # tail of the rescaled one-cell maximum matches e^{-2x^2}; the
        # crossing-corrected estimator removes sub-grid bias, so plain
        # 3-standard-error bands apply
        k, r, reps = 4.0, 16, 4000
        sqrt_k = math.sqrt(k)

        def cell_tail(spec):
            pair = build_dt0_pair(k, 1.0, spec, substeps=r)
            cell = sqrt_k * pair.residual.values[: r + 1]
            return continuum_tail(cell, 1.0 / r, 1.0)

        tails = collect(cell_tail, reps, stream.block(3))
        target = math.exp(-2.0)
        se = tails.std(ddof=1) / math.sqrt(reps)
        assert abs(tails.mean() - target) <= 3.0 * se

    def test_cell_abs_maximum_scale(self, stream):
        # E max |residual| over one cell is E sup|bridge| / sqrt(kappa);
        # grid maxima undershoot, so allow a 10% one-sided band at r=64
        k, r, reps = 4.0, 64, 2000
        target = math.sqrt(math.pi / 2.0) * math.log(2.0) / math.sqrt(k)
        vals = collect(
            lambda s: np.max(
                np.abs(build_dt0_pair(k, 1.0, s, substeps=r).residual.values[: r + 1])
            ),
            reps,
            stream.block(4),
        )
        assert target * 0.90 <= vals.mean() <= target * 1.02

    def test_l1_closed_form_small(self, stream):
        reps = 4000
        vals = collect(
            lambda s: l1_diff(build_dt0_pair(4.0, 1.0, s, substeps=64), 1.0),
            reps,
            stream.block(5),
        )
        target = l1_rate(4.0)
        assert abs(vals.mean() - target) <= 0.02 * target


class TestAr1Pair:
    def test_a_zero_reduces_to_dt0_bitwise(self, stream):
        for i in range(5):
            s = stream.replicate(i)
            p0 = build_dt0_pair(8.0, 1.0, s, substeps=8)
            pa = build_ar1_pair(Ar1Params(0.0), 8.0, 1.0, s, substeps=8)
            assert np.array_equal(p0.w.values, pa.w.values)
            assert np.array_equal(p0.w_kappa.values, pa.w_kappa.values)
            assert np.max(np.abs(pa.residual.values)) == 0.0

    def test_decomposition_identity_exact(self, stream):
        pair = build_ar1_pair(Ar1Params(0.5), 8.0, 1.0, stream, substeps=8)
        gap = pair.w_kappa.values - pair.diagnostics["s_kappa"] - pair.residual.values
        assert np.max(np.abs(gap)) < 1e-14

    def test_knot_variance_against_covariance_double_sum(self, stream):
        # Var W^kappa(m/kappa) = (1/kappa) [m R(0) + 2 sum_{j<m} (m-j) R(j)]
        a, k, m, reps = 0.5, 16, 16, 20000
        params = Ar1Params(a)
        target = (
            m * params.covariance(0)
            + 2.0 * sum((m - j) * params.covariance(j) for j in range(1, m))
        ) / k
        vals = collect(
            lambda s: build_ar1_pair(params, float(k), 1.0, s, substeps=4).w_kappa.values[-1],
            reps,
            stream.block(6),
        )
        var = vals.var(ddof=1)
        assert abs(var - target) <= 3.0 * var * math.sqrt(2.0 / (reps - 1))

    def test_memory_formula_discrepancy_is_one_ar_term(self, stream):
        # the displayed coefficient formula differs from the identity value
        # by exactly -X_m at every knot; the builder reports, never repairs
        pair = build_ar1_pair(Ar1Params(0.5), 8.0, 1.0, stream, substeps=8)
        disc = pair.diagnostics["formula_discrepancy"]
        x_seq = pair.diagnostics["x_seq"]
        assert pair.diagnostics["formula_discrepancy_max"] > 0.01
        assert np.max(np.abs(disc + x_seq[1:])) < 1e-12

    def test_memory_norm_growth_band(self, stream):
        # E ||residual|| sqrt(kappa) / sqrt(ln(1+kappa)) stays within a
        # fixed band (no trend by more than a factor of 2)
        a, reps = 0.5, 300
        scaled = []
        for i, k in enumerate((4.0, 16.0, 64.0, 256.0)):
            vals = collect(
                lambda s, k=k: np.max(
                    np.abs(build_ar1_pair(Ar1Params(a), k, 1.0, s, substeps=8).residual.values)
                    / (1.0 + np.arange(int(k) * 8 + 1) / (k * 8))
                ),
                reps,
                stream.block(10 + i),
            )
            scaled.append(vals.mean() * math.sqrt(k) / math.sqrt(math.log1p(k)))
        assert max(scaled) / min(scaled) <= 2.0

    def test_rejects_non_integer_kappa(self, stream):
        with pytest.raises(ConfigurationError):
            build_ar1_pair(Ar1Params(0.5), 2.5, 1.0, stream)
