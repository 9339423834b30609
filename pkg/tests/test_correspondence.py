import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rqmc import spectra
from rqmc.core import Branch, PhysicalParams, StateSpec, System
from rqmc.correspondence import (ClassicalDensity, ClassicalTarget, CorrectionSeriesHook,
                                 CorrespondenceReport, Kernel, TargetMode, amplitude_from_state,
                                 branch_comparison, classical_box_density,
                                 classical_oscillator_density, classical_target, coarse_grain,
                                 convergence_study, correspondence_distance,
                                 corrected_oscillator_density, default_window, l1_distance,
                                 quantum_number_from_amplitude, residual_scaling)
from rqmc.densities import DensityCurve, density_grid
from rqmc.quadrature import simpson

# regression baseline: kg-oscillator n = 10 against the energy-fixed arcsine, natural units
KG_N10_CLASSICAL_BASELINE = 0.5483192804910406


def curve(x, v):
    return DensityCurve(np.asarray(x, float), np.asarray(v, float), 1.0)


class TestClassicalDensities:
    def test_arcsine_centre(self):
        assert classical_oscillator_density(1.0, 0.0) == pytest.approx(1 / math.pi)

    @pytest.mark.parametrize("x0", [0.2, 1.0, 7.5])
    def test_arcsine_normalized(self, x0):
        # x = x0 sin(t); Gauss-Legendre nodes never touch the turning points
        t, w = np.polynomial.legendre.leggauss(40)
        t, w = t * math.pi / 2, w * math.pi / 2
        total = w @ (x0 * np.cos(t) * classical_oscillator_density(x0, x0 * np.sin(t)))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_arcsine_rejects_turning_point(self):
        with pytest.raises(ValueError):
            classical_oscillator_density(1.0, [0.0, 1.0])

    def test_monte_carlo_histogram(self):
        # x = x0 sin(omega t) at uniformly random phases
        rng = np.random.default_rng(20261015)
        x0, samples = 1.3, 1_000_000
        xs = x0 * np.sin(rng.uniform(0, 2 * math.pi, samples))
        edges = np.linspace(-x0, x0, 41)
        counts, _ = np.histogram(xs, edges)
        law = ClassicalDensity("arcsine", x0)
        prob = np.diff(law.cdf(edges))
        sigma = np.sqrt(samples * prob * (1 - prob))
        assert np.all(np.abs(counts - samples * prob) < 5 * sigma)

    def test_uniform_values(self):
        assert classical_box_density(2.0, 1.0) == 0.5
        assert classical_box_density(2.0, -0.5) == 0.0

    def test_uniform_grid_integral(self):
        x = np.linspace(0, 2, 1001)
        assert curve(x, classical_box_density(2.0, x)).integral() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("kind", ["arcsine", "uniform"])
    @pytest.mark.parametrize("kernel", list(Kernel))
    def test_smoothed_law_keeps_unit_mass(self, kind, kernel):
        law = ClassicalDensity(kind, 2.0)
        x = np.linspace(-4, 6, 8001)
        assert curve(x, law.smoothed(x, 0.3, kernel)).integral() == pytest.approx(1.0, abs=1e-6)

    def test_smoothed_arcsine_matches_direct_convolution(self):
        law = ClassicalDensity("arcsine", 1.0)
        s = 0.2
        for x in (-1.1, 0.0, 0.6, 0.99):
            direct = simpson(lambda t: np.exp(-0.5 * ((x - np.sin(t)) / s) ** 2),
                             -math.pi / 2, math.pi / 2, rtol=1e-12) / (math.pi * s * math.sqrt(2 * math.pi))
            assert law.smoothed(np.array([x]), s)[0] == pytest.approx(direct, rel=1e-9)

    def test_transform(self):
        assert ClassicalDensity("arcsine", 2.0).ft(0.0) == 1.0
        assert ClassicalDensity("uniform", 1.0).ft(0.0) == 1.0

    def test_target_extent(self):
        t = ClassicalTarget(((0.6, ClassicalDensity("arcsine", 2.0)),
                             (0.4, ClassicalDensity("arcsine", 1.5))))
        assert t.extent == (-2.0, 2.0)


class TestEnergyFixing:
    def test_amplitude_tends_to_kappa(self):
        p = PhysicalParams(c=1e3)
        x0 = amplitude_from_state(StateSpec("kg-oscillator", 12), p)
        assert x0 == pytest.approx(spectra.oscillator_kappa(12, p), rel=1e-5)

    def test_relativistic_amplitude_below_kappa(self, nat):
        assert amplitude_from_state(StateSpec("kg-oscillator", 12), nat) < 5.0

    @pytest.mark.parametrize("c", [10.0, 1e2, 1e3])
    def test_leading_correction(self, c):
        p = PhysicalParams(c=c)
        x0 = amplitude_from_state(StateSpec("kg-oscillator", 12), p)
        ratio = (spectra.oscillator_kappa(12, p) / x0 - 1) / (x0**2 / (8 * c * c))
        # the next term is relatively O(c^-2)
        assert abs(ratio - 1) < 2.0 / c**2

    def test_dirac_shift_by_branch(self):
        p = PhysicalParams(c=1e3)
        part = amplitude_from_state(StateSpec("dirac-oscillator", 20), p)
        anti = amplitude_from_state(StateSpec("dirac-oscillator", 21, "antiparticle"), p)
        assert part == pytest.approx(anti, rel=1e-14)
        assert part == pytest.approx(spectra.oscillator_kappa(20, p), rel=1e-5)

    def test_integer_level_recovered(self):
        p = PhysicalParams(c=1e3)
        assert quantum_number_from_amplitude(5.0, p, "kg-oscillator") == 12

    @given(st.integers(0, 400), st.sampled_from(["kg-oscillator", "dirac-oscillator"]),
           st.sampled_from(list(Branch)), st.floats(0.5, 50))
    def test_round_trip(self, n, system, branch, c):
        if system == "dirac-oscillator" and branch is Branch.ANTIPARTICLE:
            n += 1
        elif system == "dirac-oscillator" and n == 0:
            n = 1
        p = PhysicalParams(c=c)
        state = StateSpec(system, n, branch)
        x0 = amplitude_from_state(state, p)
        assert quantum_number_from_amplitude(x0, p, system, branch) == n

    @given(st.floats(0.5, 30), st.floats(0.01, 10))
    def test_monotone(self, x0, dx):
        p = PhysicalParams()
        a = quantum_number_from_amplitude(x0, p, "kg-oscillator")
        assert quantum_number_from_amplitude(x0 + dx, p, "kg-oscillator") >= a

    def test_box_has_no_amplitude(self, nat):
        with pytest.raises(ValueError):
            amplitude_from_state(StateSpec("kg-box", 3), nat)

    def test_dirac_targets(self, nat):
        s = StateSpec("dirac-oscillator", 9)
        asym = classical_target(s, nat)
        assert len(asym.parts) == 2 and sum(w for w, _ in asym.parts) == pytest.approx(1.0)
        assert len(classical_target(s, nat, TargetMode.CLASSICAL).parts) == 1
        assert classical_target(StateSpec("kg-box", 2), nat).parts[0][1].kind == "uniform"


class TestCoarseGraining:
    def test_uniform_interior_unchanged(self):
        x = np.linspace(-0.5, 1.5, 2001)
        raw = curve(x, classical_box_density(1.0, x))
        for kernel in Kernel:
            smooth = coarse_grain(raw, 0.025, kernel)
            inside = (x > 0.3) & (x < 0.7)
            np.testing.assert_allclose(smooth.values[inside], 1.0, rtol=1e-12)

    @given(st.floats(0.02, 0.5), st.sampled_from(list(Kernel)))
    def test_integral_preserved(self, window, kernel):
        x = np.linspace(-2, 2, 801)
        rng = np.random.default_rng(7)
        raw = curve(x, rng.random(x.size))
        assert coarse_grain(raw, window, kernel).integral() == pytest.approx(raw.integral(), rel=1e-12)

    @settings(max_examples=30)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from(list(Kernel)))
    def test_linear(self, a, b, kernel):
        x = np.linspace(0, 1, 301)
        f, g = np.sin(7 * x) ** 2, np.exp(-x)
        lhs = coarse_grain(curve(x, a * f + b * g), 0.05, kernel).values
        rhs = (a * coarse_grain(curve(x, f), 0.05, kernel).values
               + b * coarse_grain(curve(x, g), 0.05, kernel).values)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_positivity(self):
        x = np.linspace(0, 1, 301)
        v = np.where(np.arange(x.size) % 17 == 0, 1.0, 0.0)
        assert np.all(coarse_grain(curve(x, v), 0.02).values >= 0)

    def test_removes_oscillations(self, nat):
        raw = density_grid(StateSpec("kg-oscillator", 100), nat)
        smooth = coarse_grain(raw, params=nat)
        tv = lambda c: np.sum(np.abs(np.diff(c.values)))  # noqa: E731
        assert tv(raw) >= 10 * tv(smooth)

    def test_rejects_tiny_window_and_nonuniform_grid(self):
        x = np.linspace(0, 1, 11)
        with pytest.raises(ValueError):
            coarse_grain(curve(x, np.ones(11)), 0.1)
        with pytest.raises(ValueError):
            coarse_grain(curve(x**2, np.ones(11)), 0.3)

    def test_default_windows(self, nat):
        assert default_window(StateSpec("kg-oscillator", 16), nat) == pytest.approx(
            math.sqrt(33) / 4)
        assert default_window(StateSpec("kg-box", 20), nat) == pytest.approx(0.2)


class TestDistance:
    def test_identical_is_zero(self):
        x = np.linspace(0, 1, 101)
        c = curve(x, 1 + x)
        assert l1_distance(c, c) == 0.0

    def test_disjoint_boxes(self):
        x = np.linspace(0, 4, 4001)
        a = curve(x, np.where((x > 0.5) & (x < 1.5), 1.0, 0.0))
        b = curve(x, np.where((x > 2.5) & (x < 3.5), 1.0, 0.0))
        assert l1_distance(a, b) == pytest.approx(2.0, abs=1e-12)

    @given(st.lists(st.floats(0.01, 10), min_size=3, max_size=3),
           st.lists(st.floats(0.01, 10), min_size=3, max_size=3),
           st.lists(st.floats(0.01, 10), min_size=3, max_size=3))
    def test_metric(self, pa, pb, pc):
        x = np.linspace(-1, 1, 201)

        def make(c):
            return curve(x, c[0] + c[1] * x**2 + c[2] * np.cos(3 * x) ** 2)

        a, b, c = make(pa), make(pb), make(pc)
        assert l1_distance(a, b) == pytest.approx(l1_distance(b, a), abs=1e-14)
        assert 0 <= l1_distance(a, b) <= 2 + 1e-12
        assert l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12

    def test_scale_invariant(self):
        x = np.linspace(0, 1, 51)
        assert l1_distance(curve(x, 1 + x), curve(x, 5 + 5 * x)) == pytest.approx(0.0, abs=1e-14)

    def test_resamples_second_curve(self):
        xa, xb = np.linspace(0, 1, 101), np.linspace(0, 1, 37)
        assert l1_distance(curve(xa, 1 + xa), curve(xb, 1 + xb)) < 1e-12

    def test_rejects_empty_curve(self):
        x = np.linspace(0, 1, 11)
        with pytest.raises(ValueError):
            l1_distance(curve(x, np.ones(11)), curve(x, np.zeros(11)))


class TestStudies:
    def test_classical_baseline(self, nat):
        d = correspondence_distance(StateSpec("kg-oscillator", 10), nat,
                                    target=TargetMode.CLASSICAL)
        assert 0 < d < 2
        assert d == pytest.approx(KG_N10_CLASSICAL_BASELINE, rel=1e-6)

    def test_kg_box_close_to_uniform(self, nat):
        report = convergence_study("kg-box", [10, 20, 40], nat)
        assert max(report.distances) < 1e-3
        assert all(e.S is None for e in report.entries)

    def test_report_round_trip(self, nat):
        report = convergence_study("dirac-box", [10, 12, 14], nat)
        again = CorrespondenceReport.from_dict(report.to_dict())
        assert again == report
        assert set(report.to_dict()) == {"system", "branch", "units", "entries", "exponent",
                                          "exponent_stderr", "monotone", "window_policy",
                                          "version"}

    def test_oscillator_report(self, nat):
        report = convergence_study("kg-oscillator", [10, 20, 40], nat)
        assert report.monotone
        assert report.exponent < 0 and report.exponent_stderr >= 0
        assert report.window_policy["kernel"] == "gaussian"
        assert report.units["mode"] == "natural"

    def test_thread_cap_does_not_change_results(self, nat, monkeypatch):
        monkeypatch.setenv("RQMC_THREADS", "1")
        serial = convergence_study("kg-oscillator", [10, 14, 18], nat)
        monkeypatch.setenv("RQMC_THREADS", "4")
        assert convergence_study("kg-oscillator", [10, 14, 18], nat) == serial

    def test_rejects_bad_n_list(self, nat):
        with pytest.raises(ValueError):
            convergence_study("kg-oscillator", [10, 20], nat)
        with pytest.raises(ValueError):
            convergence_study("kg-oscillator", [10, 30, 20], nat)

    def test_residual_scaling(self, nat):
        fit = residual_scaling("kg-oscillator", [10, 40, 160], nat)
        assert all(r > 0 for r in fit.y)
        assert fit.y[0] > fit.y[1] > fit.y[2]
        assert fit.slope < 0 and math.isfinite(fit.stderr)

    def test_branch_comparison_nonrelativistic(self):
        cmp = branch_comparison(40, PhysicalParams(c=1e3))
        assert cmp.antiparticle_n == 41
        assert cmp.equivalent
        assert cmp.mutual < 1e-4


class TestCorrectionHook:
    def test_inactive_hook_is_plain_arcsine(self, nat):
        x = np.linspace(-0.9, 0.9, 7)
        np.testing.assert_array_equal(corrected_oscillator_density(1.0, x, nat),
                                      classical_oscillator_density(1.0, x))
        assert not CorrectionSeriesHook().active

    def test_hook_terms_are_added(self, nat):
        x = np.linspace(-0.9, 0.9, 7)
        hook = CorrectionSeriesHook(lambda j, x, x0: np.full_like(x, float(j)), order=2)
        s = 4 * math.sqrt(2 * math.pi)
        r = -1 / s**2
        expected = classical_oscillator_density(1.0, x) + (r + 2 * r * r) / (2 * math.pi)
        np.testing.assert_allclose(corrected_oscillator_density(1.0, x, nat, hook), expected,
                                   rtol=1e-14)
