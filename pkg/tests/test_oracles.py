"""Independent verification paths: covariance propagation and kernel
diagonalization.

The propagator path never touches the scale-factor machinery, so
agreement between the two pipelines is evidence against shared bugs.
"""

import numpy as np
import pytest

from entchain import (
    ChainSpec,
    GridError,
    KernelGrid,
    NumericsError,
    Partition,
    QuenchSchedule,
    SymplecticPropagator,
    build_coupling_matrix,
    covariance_entropy,
    covariance_series,
    entropy_series,
    ground_state_covariance,
    integrate_covariance_general,
    kernel_spectrum,
    quench_modes,
    reduce_covariance,
    solve_sudden,
    symplectic_eigenvalues,
    symplectic_form,
    two_site_reduced,
)

XI_STATIC = 2.0 / (7.0 + 3.0 * np.sqrt(5.0))


def test_ground_state_covariance_structure():
    spec = ChainSpec(n=4, omega_i=3.0, k_i=2.0, omega_f=1.0, k_f=0.0)
    coupling = build_coupling_matrix(spec, "pre")
    sigma = ground_state_covariance(coupling)
    nu = symplectic_eigenvalues(sigma)
    assert np.abs(nu - 0.5).max() < 1e-10
    # xx block is half the inverse square root of the coupling
    w, v = np.linalg.eigh(coupling)
    inv_root = v @ ((w ** -0.5)[:, None] * v.T)
    assert np.abs(sigma[:4, :4] - 0.5 * inv_root).max() < 1e-12
    assert np.abs(sigma[:4, 4:]).max() == 0.0
    with pytest.raises(NumericsError):
        ground_state_covariance(np.diag([-1.0, 1.0]))


def test_propagator_is_symplectic():
    j4 = symplectic_form(4)
    specs = [
        ChainSpec(n=4, omega_i=3.0, k_i=2.0, omega_f=0.1, k_f=2.5),
        # zero post-quench mode: periodic chain at omega_f = 0
        ChainSpec(n=4, omega_i=3.0, k_i=2.0, omega_f=0.0, k_f=2.5),
    ]
    for spec in specs:
        prop = SymplecticPropagator.from_coupling(
            build_coupling_matrix(spec, "post")
        )
        assert np.abs(prop.matrix(0.0) - np.eye(8)).max() < 1e-12
        for t in (0.4, 3.9, 77.0):
            s = prop.matrix(t)
            assert np.abs(s @ j4 @ s.T - j4).max() < 1e-10


def test_series_agree_at_time_zero_and_no_quench():
    spec = ChainSpec(n=4, omega_i=3.0, k_i=2.0, omega_f=3.0, k_f=2.0)
    times = 0.5 * np.arange(30)
    part = Partition.second_half(4)
    oracle = covariance_series(spec, part, times, alphas=(1, 2))
    assert np.abs(oracle.s1 - oracle.s1[0]).max() < 1e-10
    primary = entropy_series(spec, part, times, alphas=(1, 2))
    assert abs(oracle.s1[0] - primary.s1[0]) < 1e-10


def test_oracle_matches_primary_path():
    spec = ChainSpec(n=4, omega_i=3.0, k_i=2.0, omega_f=0.3, k_f=2.5)
    times = 0.25 * np.arange(201)
    part = Partition.second_half(4)
    primary = entropy_series(spec, part, times, alphas=(1, 2))
    oracle = covariance_series(spec, part, times, alphas=(1, 2))
    assert np.abs(primary.s1 - oracle.s1).max() < 1e-9
    assert np.abs(primary.entropies[2] - oracle.entropies[2]).max() < 1e-9
    assert np.abs(primary.xi - oracle.xi).max() < 1e-9


def test_general_integrator_reproduces_sudden():
    spec = ChainSpec(n=4, omega_i=3.0, k_i=2.0, omega_f=0.3, k_f=2.5)
    schedule = QuenchSchedule(
        times=[0.0], omegas=[0.3], ks=[2.5], interpolation="previous"
    )
    times = 0.2 * np.arange(101)
    part = Partition.second_half(4)
    sudden = covariance_series(spec, part, times, alphas=(1,))
    general = covariance_series(
        spec, part, times, alphas=(1,), schedule=schedule
    )
    assert np.abs(sudden.s1 - general.s1).max() < 1e-8


def test_general_schedule_cross_validates_primary_path():
    """A genuine ramp: covariance flow integration against the
    scale-factor pipeline, two unrelated integrators."""
    spec = ChainSpec(n=4, omega_i=3.0, k_i=2.0, omega_f=0.3, k_f=2.5)
    schedule = QuenchSchedule(
        times=[0.0, 2.0, 4.0],
        omegas=[3.0, 1.5, 0.3],
        ks=[2.0, 2.25, 2.5],
        interpolation="linear",
    )
    times = 0.25 * np.arange(41)
    part = Partition.second_half(4)
    primary = entropy_series(spec, part, times, schedule=schedule)
    oracle = covariance_series(spec, part, times, schedule=schedule)
    assert np.abs(primary.s1 - oracle.s1).max() < 1e-8


def test_integrate_covariance_validation():
    spec = ChainSpec(n=2, omega_i=1.0, k_i=1.0, omega_f=1.0, k_f=1.0)
    schedule = QuenchSchedule(times=[0.0], omegas=[1.0], ks=[1.0])
    with pytest.raises(ValueError, match="sorted"):
        integrate_covariance_general(spec, schedule, np.array([1.0, 0.5]))
    with pytest.raises(ValueError, match="tolerance"):
        integrate_covariance_general(
            spec, schedule, np.array([0.0, 1.0]), tolerance=0.0
        )


def test_covariance_entropy_values():
    assert covariance_entropy([0.5])[1] == 0.0
    out = covariance_entropy([1.5], alphas=(1, 2))
    assert out[1] == pytest.approx(2 * np.log(2.0) - 0.0, abs=1e-12)
    # nu = 1.5 maps to xi = 0.5, whose order-2 entropy is ln 3
    assert out[2] == pytest.approx(np.log(3.0), abs=1e-12)
    with pytest.raises(NumericsError):
        covariance_entropy([0.4])


def test_reduce_covariance_block_selection():
    sigma = np.arange(16.0).reshape(4, 4)
    sigma = 0.5 * (sigma + sigma.T)
    part = Partition.from_traced((1,), 2)  # keep site 2
    block = reduce_covariance(sigma, part)
    want = sigma[np.ix_([1, 3], [1, 3])]
    assert np.array_equal(block, want)
    with pytest.raises(ValueError, match="partition"):
        reduce_covariance(sigma, Partition.second_half(4))


class TestKernelSpectrum:
    def test_uncoupled_is_pure(self):
        levels = kernel_spectrum(2.0, 0.0, count=4)
        assert abs(levels[0] - 1.0) < 1e-6
        assert np.abs(levels[1:]).max() < 1e-6

    def test_static_ladder_frozen(self):
        reduced = two_site_reduced(1.0, 5.0, 1.0, 0.0, 1.0, 0.0)
        levels = kernel_spectrum(reduced[0], reduced[1], reduced[2], count=3)
        assert np.allclose(levels, [0.854102, 0.124612, 0.018181], atol=1e-6)

    def test_quench_snapshot_matches_ladder(self):
        """Evolved two-site state at a generic time: kernel eigenvalues
        against the geometric law, with and without the phase factor."""
        spec = ChainSpec(
            n=2, omega_i=1.0, k_i=12.0, omega_f=0.15, k_f=8.6, boundary="open"
        )
        qm = quench_modes(spec)
        sols = [solve_sudden(li, lf) for li, lf in zip(qm.lam_pre, qm.lam_post)]
        t = 2.0
        (b1, db1), (b2, db2) = sols[0].evaluate(t), sols[1].evaluate(t)
        gamma, beta, z = two_site_reduced(
            np.sqrt(qm.lam_pre[0]), np.sqrt(qm.lam_pre[1]), b1, db1, b2, db2
        )
        eps = np.sqrt(gamma**2 - beta**2)
        xi = beta / (gamma + eps)
        ladder = (1 - xi) * xi ** np.arange(5)
        with_phase = kernel_spectrum(gamma, beta, z, count=5)
        without = kernel_spectrum(gamma, beta, 0.0, count=5, include_phase=False)
        assert np.abs(with_phase - ladder).max() < 1e-4
        assert np.abs(without - ladder).max() < 1e-4
        assert np.abs(with_phase - without).max() < 1e-6

    def test_grid_validation(self):
        with pytest.raises(ValueError, match="normalizability"):
            kernel_spectrum(1.0, 1.5)
        with pytest.raises(GridError, match="400"):
            kernel_spectrum(2.0, 0.5, grid=KernelGrid(half_width=8.0, points=100))
        with pytest.raises(GridError):
            kernel_spectrum(2.0, 0.5, grid=KernelGrid(half_width=0.5, points=801))
        with pytest.raises(ValueError, match="count"):
            kernel_spectrum(2.0, 0.5, count=0)
