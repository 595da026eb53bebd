import numpy as np
import pytest

from conftest import (
    random_density_matrix,
    random_hermitian,
    random_params,
    regression_params,
)
from superrad.errors import (
    CutoffNotConverged,
    DegenerateSteadyState,
    DimensionCap,
    IndexOutOfRange,
    UnknownObservable,
    VacuumState,
)
from superrad.exact import (
    DensityMatrix,
    HilbertConfig,
    build_liouvillian,
    expectation,
    g2_zero_converged,
    g2_zero_exact,
    photon_flux_exact,
    site_operator,
    steady_state_exact,
    time_evolve,
    total_excitation_operator,
    trace_distance,
    unvec,
    vec,
)
from superrad.params import SystemParams

# frozen by running the cutoff-converged solver on the N=1 reference set;
# stable to <1e-12 against rel_tol in {1e-6, 1e-9, 1e-12} and both frames
FLUX_N1_REFERENCE = 0.6145299918401527


def test_dimension_arithmetic():
    h = HilbertConfig(n_max=1, n_emitters=2)
    assert h.dim == 8
    liou = build_liouvillian(regression_params(2), h)
    assert liou.matrix.shape == (64, 64)


def test_dimension_cap_enforced():
    with pytest.raises(DimensionCap):
        HilbertConfig(n_max=10, n_emitters=6, cap=512).check_cap()
    with pytest.raises(DimensionCap):
        build_liouvillian(regression_params(2), HilbertConfig(7, 2, cap=16))


def test_trace_preservation_is_structural():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        liou = build_liouvillian(random_params(rng, n), HilbertConfig(2, n))
        assert liou.trace_residual() <= 1e-10


def test_dark_state_is_null_vector_without_pump():
    p = SystemParams(1, 10.0, 10.0, 0.0, 3.0, 0.0, 0.5, 0.0)
    h = HilbertConfig(2, 1)
    liou = build_liouvillian(p, h)
    rho_dark = DensityMatrix.vacuum(h)
    assert np.abs(liou.matrix @ vec(rho_dark.mat)).max() <= 1e-12


def test_liouvillian_has_zero_eigenvalue():
    rng = np.random.default_rng(1)
    liou = build_liouvillian(random_params(rng, 2), HilbertConfig(1, 2))
    eigs = np.linalg.eigvals(liou.matrix.toarray())
    scale = max(1.0, np.abs(eigs).max())
    assert np.abs(eigs).min() <= 1e-10 * scale


def test_steady_state_no_pump_is_vacuum():
    p = SystemParams(2, 8.0, 9.0, 2.0, 5.0, 0.0, 0.3, 0.7)
    h = HilbertConfig(3, 2)
    rho = steady_state_exact(build_liouvillian(p, h))
    assert expectation(rho, "photon_number", h).real == pytest.approx(0.0, abs=1e-12)
    assert expectation(rho, "sigma_z", h, 0).real == pytest.approx(-1.0, abs=1e-12)


def test_steady_state_rate_equation_fixed_point():
    # g = 0 decouples the field; the emitter settles at omega/(omega+gamma-)
    p = SystemParams(1, 2350.0, 2350.0, 0.0, 1.0, 1.0, 3.0, 0.0)
    h = HilbertConfig(2, 1)
    rho = steady_state_exact(build_liouvillian(p, h))
    population = (1.0 + expectation(rho, "sigma_z", h, 0).real) / 2.0
    assert population == pytest.approx(0.25, abs=1e-9)


def test_steady_state_matches_long_time_integration():
    p = regression_params(2)
    h = HilbertConfig(4, 2)
    liou = build_liouvillian(p, h, frame="rotating")
    rho_ss = steady_state_exact(liou)
    rho_t = time_evolve(liou, DensityMatrix.vacuum(h), 1000.0)
    assert trace_distance(rho_ss, rho_t) <= 1e-8


def test_steady_state_matches_dense_null_eigenvector():
    # independent route: the eigenvector of the dense L with eigenvalue ~ 0
    rng = np.random.default_rng(77)
    checked = 0
    while checked < 8:
        n_em = int(rng.integers(1, 3))
        h = HilbertConfig(2, n_em)
        p = random_params(rng, n_em)
        if p.kappa < 0.05 and p.gamma_minus < 0.05:
            continue  # near-degenerate null space, not comparable
        liou = build_liouvillian(p, h)
        rho_tr = steady_state_exact(liou)
        eigvals, eigvecs = np.linalg.eig(liou.matrix.toarray())
        k = int(np.argmin(np.abs(eigvals)))
        rho_ev = unvec(eigvecs[:, k], h.dim)
        rho_ev = (rho_ev + rho_ev.conj().T) / 2
        rho_ev = rho_ev / np.trace(rho_ev).real
        assert trace_distance(rho_tr, DensityMatrix(rho_ev)) <= 1e-10
        checked += 1


def test_degenerate_steady_state_detected():
    # g = 0, kappa = 0, omega = 0: every diagonal field state is stationary
    p = SystemParams(1, 5.0, 5.0, 0.0, 0.0, 0.0, 0.4, 0.0)
    with pytest.raises(DegenerateSteadyState):
        steady_state_exact(build_liouvillian(p, HilbertConfig(2, 1)))


def test_steady_state_frame_invariance():
    # resonant and detuned: every tracked observable commutes with the
    # excitation-number phase rotation, so both frames must agree
    for delta_c in (2350.0, 2365.0):
        p = SystemParams(2, 2350.0, delta_c, 5.0, 50.0, 1.0, 0.1, 1.0)
        h = HilbertConfig(3, 2)
        rho_aw = steady_state_exact(build_liouvillian(p, h))
        rho_rot = steady_state_exact(build_liouvillian(p, h, frame="rotating"))
        for which, idx in [("photon_number", ()), ("sigma_z", (0,)),
                           ("cross_pm", (0, 1)), ("field_coherence", (0,))]:
            a = expectation(rho_aw, which, h, *idx)
            b = expectation(rho_rot, which, h, *idx)
            assert a == pytest.approx(b, abs=1e-9)


def test_time_evolve_zero_time_is_identity():
    rng = np.random.default_rng(2)
    h = HilbertConfig(2, 1)
    liou = build_liouvillian(regression_params(1), h)
    rho0 = random_density_matrix(rng, h.dim)
    rho1 = time_evolve(liou, rho0, 0.0)
    assert np.abs(rho1.mat - rho0.mat).max() == 0.0


def test_time_evolve_trace_drift():
    rng = np.random.default_rng(3)
    p = random_params(rng, 2, delta_scale=5.0)
    h = HilbertConfig(2, 2)
    liou = build_liouvillian(p, h)
    rho0 = random_density_matrix(rng, h.dim)
    rho_t = time_evolve(liou, rho0, 100.0)
    assert abs(np.trace(rho_t.mat) - 1.0) <= 1e-9
    rho_t.validate()


def test_pure_dephasing_keeps_populations_fixed():
    # L[sz] only: diagonal entries in the product basis are untouched
    rng = np.random.default_rng(4)
    p = SystemParams(2, 6.0, 6.0, 0.0, 0.0, 0.0, 0.0, 1.3)
    h = HilbertConfig(2, 2)
    liou = build_liouvillian(p, h)
    rho0 = random_density_matrix(rng, h.dim)
    rho_t = time_evolve(liou, rho0, 5.0)
    assert np.abs(np.diag(rho_t.mat) - np.diag(rho0.mat)).max() <= 1e-9


def test_expectation_examples():
    h = HilbertConfig(2, 2)
    vac = DensityMatrix.vacuum(h)
    assert expectation(vac, "photon_number", h) == pytest.approx(0.0)

    # all emitters excited: |0_field> x |e e>
    state = np.zeros(h.dim, dtype=complex)
    state[3] = 1.0  # field 0, both spins at index 1 -> 0*4 + 1*2 + 1
    rho_exc = DensityMatrix.pure(state)
    assert expectation(rho_exc, "sigma_z", h, 0).real == pytest.approx(1.0)

    # symmetric one-excitation state (|eg> + |ge>)/sqrt(2): <s+_0 s-_1> = 1/2
    psi = np.zeros(h.dim, dtype=complex)
    psi[2] = 1.0 / np.sqrt(2)  # |g e>... field 0: indices: spin0*2 + spin1
    psi[1] = 1.0 / np.sqrt(2)
    rho_dicke = DensityMatrix.pure(psi)
    assert expectation(rho_dicke, "cross_pm", h, 0, 1).real == pytest.approx(0.5)


def test_photon_pair_observable():
    # <a'a'aa> = n(n-1) on a Fock state
    h = HilbertConfig(3, 1)
    two_photons = np.zeros(h.dim, dtype=complex)
    two_photons[2 * 2] = 1.0  # field index 2, spin ground
    rho = DensityMatrix.pure(two_photons)
    assert expectation(rho, "photon_pair", h).real == pytest.approx(2.0)
    assert expectation(DensityMatrix.vacuum(h), "photon_pair", h) == pytest.approx(0.0)


def test_expectation_errors():
    h = HilbertConfig(2, 2)
    vac = DensityMatrix.vacuum(h)
    with pytest.raises(UnknownObservable):
        expectation(vac, "parity", h)
    with pytest.raises(IndexOutOfRange):
        expectation(vac, "sigma_z", h, 5)
    with pytest.raises(IndexOutOfRange):
        expectation(vac, "cross_pm", h, 1, 1)


def test_flux_zero_when_decoupled():
    p = SystemParams(2, 10.0, 10.0, 0.0, 5.0, 1.0, 0.2, 0.1)
    assert photon_flux_exact(p, HilbertConfig(2, 2)) == pytest.approx(0.0, abs=1e-12)


def test_flux_n1_regression_value():
    p = regression_params(1)
    flux = photon_flux_exact(p, HilbertConfig(3, 1), frame="rotating")
    assert flux == pytest.approx(FLUX_N1_REFERENCE, rel=1e-10)
    # sanity band: adiabatic estimate Gamma_c * p_e with Gamma_c = 4 g^2 / kappa = 2
    gamma_c = 4 * p.g**2 / p.kappa
    p_e = p.omega / (p.omega + p.gamma_minus + gamma_c)
    assert 0.3 * gamma_c * p_e < flux < 3.0 * gamma_c * p_e


def test_flux_linear_response_doubling():
    base = dict(delta=2350.0, delta_c=2350.0, g=5.0, kappa=50.0,
                gamma_minus=0.1, gamma_z=1.0)
    f1 = photon_flux_exact(SystemParams(n_emitters=1, omega=0.01, **base),
                           HilbertConfig(3, 1), frame="rotating")
    f2 = photon_flux_exact(SystemParams(n_emitters=1, omega=0.02, **base),
                           HilbertConfig(3, 1), frame="rotating")
    assert f2 / f1 == pytest.approx(2.0, rel=0.05)


def test_flux_cutoff_not_converged_when_capped():
    p = regression_params(2, omega=5.0)
    with pytest.raises(CutoffNotConverged):
        photon_flux_exact(p, HilbertConfig(3, 2, cap=20), frame="rotating")


def test_g2_vacuum_guard():
    p = SystemParams(1, 10.0, 10.0, 2.0, 5.0, 0.0, 0.2, 0.0)
    with pytest.raises(VacuumState):
        g2_zero_exact(p, HilbertConfig(2, 1))


def test_g2_single_emitter_antibunching():
    # one two-level emitter cannot emit photon pairs: g2 << 1 at weak drive
    p = SystemParams(1, 2350.0, 2350.0, 5.0, 50.0, 0.01, 0.1, 1.0)
    g2, _ = g2_zero_converged(p, HilbertConfig(3, 1), frame="rotating")
    assert g2 < 0.5


def test_g2_collective_trend_toward_coherent():
    vals = {}
    for n in (1, 2, 3):
        p = SystemParams(n, 2350.0, 2350.0, 5.0, 100.0, 1.5 * n, 0.1, 1.0)
        vals[n], _ = g2_zero_converged(p, HilbertConfig(3, n), frame="rotating")
    assert vals[1] < 0.5
    assert 0.8 < vals[2] < 1.5
    assert 0.8 < vals[3] < 1.5
    assert abs(vals[3] - 1.0) < abs(vals[1] - 1.0)


# --- randomized invariants -----------------------------------------------------

def test_trace_preserved_on_random_states():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(1, 3))
        h = HilbertConfig(2, n)
        liou = build_liouvillian(random_params(rng, n), h)
        rho = random_density_matrix(rng, h.dim)
        assert abs(liou.trace_row() @ (liou.matrix @ vec(rho.mat))) <= 1e-10


def test_hermiticity_preserved():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 3))
        h = HilbertConfig(2, n)
        liou = build_liouvillian(random_params(rng, n), h)
        herm = random_hermitian(rng, h.dim)
        out = unvec(liou.matrix @ vec(herm), h.dim)
        assert np.abs(out - out.conj().T).max() <= 1e-10


def test_permutation_symmetry_preserved():
    rng = np.random.default_rng(8)
    p = random_params(rng, 2, delta_scale=5.0)
    h = HilbertConfig(2, 2)
    liou = build_liouvillian(p, h)
    # symmetrize a random state over the two emitters
    rho_raw = random_density_matrix(rng, h.dim).mat
    swap = np.zeros((h.dim, h.dim))
    for f in range(h.n_max + 1):
        for s0 in range(2):
            for s1 in range(2):
                swap[f * 4 + s1 * 2 + s0, f * 4 + s0 * 2 + s1] = 1.0
    rho_sym = (rho_raw + swap @ rho_raw @ swap.T) / 2
    rho_sym = DensityMatrix(rho_sym / np.trace(rho_sym).real)
    for t in (0.5, 2.0):
        rho_t = time_evolve(liou, rho_sym, t)
        sz0 = expectation(rho_t, "sigma_z", h, 0)
        sz1 = expectation(rho_t, "sigma_z", h, 1)
        assert abs(sz0 - sz1) <= 1e-9


def test_excitation_conserved_under_dephasing_only():
    # kappa = omega = gamma_minus = 0: H and L[sz] conserve a'a + sum s+s-
    rng = np.random.default_rng(9)
    for _ in range(10):
        p = SystemParams(2, rng.uniform(1, 10), rng.uniform(1, 10),
                         rng.uniform(0, 5), 0.0, 0.0, 0.0, rng.uniform(0.1, 3))
        h = HilbertConfig(2, 2)
        liou = build_liouvillian(p, h)
        n_tot = total_excitation_operator(h)
        rho = random_density_matrix(rng, h.dim)
        drho = unvec(liou.matrix @ vec(rho.mat), h.dim)
        assert abs(np.trace(n_tot.toarray() @ drho)) <= 1e-8


def test_site_operator_index_guard():
    h = HilbertConfig(2, 2)
    with pytest.raises(IndexOutOfRange):
        site_operator(h, np.eye(2), 2)
