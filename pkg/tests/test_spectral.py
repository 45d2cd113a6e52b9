"""Diagonalization, fractal dimensions, GOE reference, windowed statistics."""

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from bhchaos import (CapacityError, CouplingParameters, EqualWidthWindows,
                     NearestEnergyWindows, NumericalError, assemble,
                     build_parity_basis, diagonalize, enumerate_basis,
                     fock_energy, fractal_dimension, fractal_dimensions,
                     goe_d1_asymptotic, goe_reference, make_staggered,
                     scaled_energy, spectrum_edges, windowed_statistics)

PARAMS = CouplingParameters(j=0.8, u=1.1)


def small_spectral_data(gamma=1.0, n=4, l=4, sector="even"):
    basis = enumerate_basis(n, l)
    work = basis if sector == "full" else build_parity_basis(basis, sector)
    return diagonalize(assemble(work, CouplingParameters.from_gamma(gamma)))


class TestDiagonalize:
    def test_two_site_closed_form(self):
        even = build_parity_basis(enumerate_basis(2, 2), "even")
        spec = diagonalize(assemble(even, PARAMS))
        j, u = PARAMS.j, PARAMS.u
        root = np.sqrt(u * u + 16 * j * j)
        assert np.allclose(spec.energies, [(u - root) / 2, (u + root) / 2])

    def test_zero_tunneling_spectrum_is_sorted_diagonal(self):
        basis = enumerate_basis(4, 4)
        ham = assemble(basis, CouplingParameters(j=0.0, u=1.3))
        spec = diagonalize(ham)
        assert np.allclose(spec.energies, np.sort(1.3 * ham.h_int))

    def test_single_particle_band(self):
        l = 7
        spec = diagonalize(assemble(enumerate_basis(1, l),
                                    CouplingParameters(j=1.0, u=0.0)))
        expected = np.sort(-2 * np.cos(np.arange(1, l + 1) * np.pi / (l + 1)))
        assert np.allclose(spec.energies, expected, atol=1e-12)

    def test_invariants(self):
        spec = small_spectral_data()
        assert np.all(np.diff(spec.energies) >= -1e-12)
        gram = spec.vectors.T @ spec.vectors
        assert np.abs(gram - np.eye(spec.dim)).max() < 1e-8
        ham = spec.hamiltonian
        scale = max(abs(spec.e_min), abs(spec.e_max))
        for k in (0, spec.dim // 2, spec.dim - 1):
            res = np.linalg.norm(ham.apply(spec.vectors[:, k])
                                 - spec.energies[k] * spec.vectors[:, k])
            assert res < 1e-8 * scale

    def test_capacity_error(self):
        ham = assemble(enumerate_basis(8, 8), PARAMS)
        with pytest.raises(CapacityError):
            diagonalize(ham, dense_cap=1000)


class TestSpectrumEdges:
    def test_zero_tunneling(self):
        # N <= L: spreading the particles kills the interaction entirely,
        # stacking them all maximizes it
        for l in (4, 6):
            ham = assemble(enumerate_basis(4, l), CouplingParameters(j=0.0, u=1.5))
            lo, hi = spectrum_edges(ham)
            assert lo == 0.0
            assert hi == pytest.approx(1.5 * 4 * 3 / 2)

    def test_matches_dense_small(self):
        ham = assemble(build_parity_basis(enumerate_basis(5, 5), "even"), PARAMS)
        lo, hi = spectrum_edges(ham)
        energies = sla.eigvalsh(ham.dense())
        assert lo == pytest.approx(energies[0], rel=1e-10)
        assert hi == pytest.approx(energies[-1], rel=1e-10)

    def test_iterative_path_matches_dense(self):
        # D+(7,7) = 868 exceeds the internal dense cutoff for edges
        ham = assemble(build_parity_basis(enumerate_basis(7, 7), "even"),
                       CouplingParameters.from_gamma(1.7))
        lo, hi = spectrum_edges(ham)
        energies = sla.eigvalsh(ham.dense())
        scale = max(abs(energies[0]), abs(energies[-1]))
        assert abs(lo - energies[0]) < 1e-7 * scale
        assert abs(hi - energies[-1]) < 1e-7 * scale

    def test_finite_size_tunneling_asymptote(self):
        # exact large-gamma width is 4*gamma*cos(pi/(L+1)) * N, per hard walls
        n = l = 8
        ham = assemble(build_parity_basis(enumerate_basis(n, l), "even"),
                       CouplingParameters.from_gamma(100.0))
        lo, hi = spectrum_edges(ham)
        scaled = (hi - lo) / (n * (n - 1))
        exact = 4 * 100.0 * np.cos(np.pi / (l + 1)) / (n - 1)
        assert scaled == pytest.approx(exact, rel=1e-3)


class TestScaledEnergy:
    def test_endpoints_and_midpoint(self):
        spec = small_spectral_data()
        assert scaled_energy(spec.e_min, spec) == 0.0
        assert scaled_energy(spec.e_max, spec) == 1.0
        mid = (spec.e_min + spec.e_max) / 2
        assert scaled_energy(mid, spec) == pytest.approx(0.5)

    def test_degenerate_width_raises(self):
        even = build_parity_basis(enumerate_basis(2, 2), "even")
        ham = assemble(even, PARAMS)
        spec = diagonalize(ham)
        degenerate = type(spec)(ham, np.array([1.0, 1.0]), np.eye(2))
        with pytest.raises(NumericalError):
            scaled_energy(1.0, degenerate)


class TestFractalDimension:
    def test_uniform_vector(self):
        d = 868
        v = np.full(d, 1 / np.sqrt(d))
        assert fractal_dimension(v) == pytest.approx(1.0, abs=1e-13)

    def test_basis_vector_is_exactly_zero(self):
        v = np.zeros(100)
        v[17] = 1.0
        assert fractal_dimension(v) == 0.0

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            fractal_dimension(np.ones(10))

    def test_explicit_basis_size(self):
        v = np.zeros(8)
        v[:4] = 0.5
        assert fractal_dimension(v, basis_size=16) == pytest.approx(
            np.log(4) / np.log(16))

    def test_column_batch_matches_scalar(self):
        spec = small_spectral_data()
        batch = fractal_dimensions(spec.vectors)
        single = [fractal_dimension(spec.vectors[:, k]) for k in range(spec.dim)]
        assert np.allclose(batch, single, atol=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 200), st.integers(0, 2 ** 31 - 1))
    def test_bounds_property(self, dim, seed):
        v = np.random.default_rng(seed).standard_normal(dim)
        v /= np.linalg.norm(v)
        assert -1e-12 <= fractal_dimension(v) <= 1.0

    def test_phase_invariance(self):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(50)
        v /= np.linalg.norm(v)
        assert fractal_dimension(-v) == fractal_dimension(v)
        w = v.astype(complex) * np.exp(1j * 0.6)
        assert fractal_dimension(w) == pytest.approx(fractal_dimension(v), abs=1e-13)

    def test_parity_vs_full_entropy_shift(self):
        # expanding symmetrized members to the full basis adds exactly
        # ln2 * (non-palindromic weight) of Shannon entropy
        basis = enumerate_basis(5, 5)
        even = build_parity_basis(basis, "even")
        spec = diagonalize(assemble(even, PARAMS))
        pal = even.first == even.partner
        for k in (0, spec.dim // 3, spec.dim - 1):
            vec = spec.vectors[:, k]
            s_sector = fractal_dimension(vec) * np.log(even.dim)
            full = even.expand(vec)
            s_full = fractal_dimension(full) * np.log(basis.dim)
            shift = np.log(2) * (1.0 - np.sum(vec[pal] ** 2))
            assert s_full == pytest.approx(s_sector + shift, abs=1e-12)


class TestGOEReference:
    def test_sampled_matches_asymptotic_three_digits(self):
        dim = 868
        ref = goe_reference(dim, samples=4000, seed=3)
        assert ref.mean_d1 == pytest.approx(goe_d1_asymptotic(dim), rel=1e-3)
        assert ref.var_d1 > 0

    def test_seed_reproducibility(self):
        a = goe_reference(250, samples=500, seed=42)
        b = goe_reference(250, samples=500, seed=42)
        assert a.mean_d1 == b.mean_d1 and a.var_d1 == b.var_d1


class TestWindowedStatistics:
    def test_zero_tunneling_var_vanishes(self):
        basis = enumerate_basis(4, 4)
        spec = diagonalize(assemble(basis, CouplingParameters(j=0.0, u=1.0)))
        stats = windowed_statistics(spec, EqualWidthWindows(10))
        filled = stats.count > 0
        assert np.allclose(stats.mean_d1[filled], 0.0, atol=1e-12)
        assert np.allclose(stats.var_d1[filled], 0.0, atol=1e-12)

    def test_equal_width_partition(self):
        spec = small_spectral_data(gamma=2.0, n=5, l=5)
        stats = windowed_statistics(spec, EqualWidthWindows(25))
        assert stats.count.sum() == spec.dim
        assert np.all(stats.var_d1[stats.count > 0] >= 0)

    def test_nearest_energy_prefix_invariant(self):
        spec = small_spectral_data(gamma=1.3, n=5, l=5)
        e_ref = fock_energy(make_staggered(5, 5), 1 / 1.3)
        stats = windowed_statistics(spec, NearestEnergyWindows(e_ref, 7))
        order = np.argsort(np.abs(spec.energies - e_ref), kind="stable")
        taken = []
        for w in range(stats.n_windows):
            taken.extend(order[w * 7:(w + 1) * 7])
            assert len(taken) == stats.count[:w + 1].sum()
        assert sorted(taken) == list(range(spec.dim))

    def test_nearest_energy_tie_break_is_deterministic(self):
        spec = small_spectral_data(gamma=0.9)
        e_ref = float(spec.energies[3])
        a = windowed_statistics(spec, NearestEnergyWindows(e_ref, 5))
        b = windowed_statistics(spec, NearestEnergyWindows(e_ref, 5))
        assert np.array_equal(a.mean_d1, b.mean_d1)

    def test_oversized_window_rejected(self):
        spec = small_spectral_data()
        with pytest.raises(ValueError):
            windowed_statistics(spec, NearestEnergyWindows(0.0, spec.dim + 1))

    def test_var_invariant_under_sign_flips(self):
        spec = small_spectral_data(gamma=1.1, n=5, l=5)
        flipped = spec.vectors * np.where(np.arange(spec.dim) % 2, -1.0, 1.0)
        d1_flipped = fractal_dimensions(flipped)
        stats = windowed_statistics(spec, EqualWidthWindows(6))
        stats_flipped = windowed_statistics(spec, EqualWidthWindows(6), d1_flipped)
        assert np.allclose(stats.var_d1[stats.count > 0],
                           stats_flipped.var_d1[stats_flipped.count > 0],
                           atol=1e-14, equal_nan=True)

    def test_chaotic_window_beats_integrable_limits(self):
        # mean D1 near the staggered energy peaks at intermediate gamma
        basis = enumerate_basis(6, 6)
        even = build_parity_basis(basis, "even")
        means = {}
        for gamma in (0.01, 2.0, 100.0):
            params = CouplingParameters.from_gamma(gamma)
            spec = diagonalize(assemble(even, params))
            e_ref = fock_energy(make_staggered(6, 6), params.u)
            stats = windowed_statistics(spec, NearestEnergyWindows(e_ref, 50))
            means[gamma] = stats.mean_d1[0]
        assert means[2.0] > means[0.01]
        assert means[2.0] > means[100.0]
