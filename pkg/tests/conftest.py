"""Shared fixtures and oracle helpers for the test suite."""

import numpy as np
import pytest

from superrad.cumulant import MomentState
from superrad.exact import (
    DensityMatrix,
    HilbertConfig,
    build_liouvillian,
    observable_operator,
    operator_expectation,
    unvec,
    vec,
)
from superrad.params import SystemParams


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


def regression_params(n_emitters, omega=1.0):
    """The small-N reference parameter set used throughout: resonant, leaky cavity."""
    return SystemParams(
        n_emitters=n_emitters, delta=2350.0, delta_c=2350.0,
        g=5.0, kappa=50.0, omega=omega, gamma_minus=0.1, gamma_z=1.0,
    )


def random_params(rng, n_emitters, delta_scale=20.0):
    """Random valid parameters with energies small enough for tight absolute tolerances."""
    return SystemParams(
        n_emitters=n_emitters,
        delta=rng.uniform(0.5, delta_scale),
        delta_c=rng.uniform(0.5, delta_scale),
        g=rng.uniform(0.0, 8.0),
        kappa=rng.uniform(0.0, 30.0),
        omega=rng.uniform(0.0, 5.0),
        gamma_minus=rng.uniform(0.0, 5.0),
        gamma_z=rng.uniform(0.0, 5.0),
    )


def random_density_matrix(rng, dim):
    """Random full-rank valid state: normalized A A^+ with complex Gaussian A."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def cutoff_safe_product_state(rng, h):
    """Uncorrelated product state whose top two Fock levels are empty.

    Keeping the top of the photon ladder unpopulated makes the truncated
    a, a' act exactly, so moment derivatives computed on the truncated space
    equal their infinite-ladder values.
    """
    probs = np.zeros(h.n_max + 1)
    probs[: h.n_max - 1] = rng.dirichlet(np.ones(h.n_max - 1))
    p_excited = rng.uniform(0.0, 1.0)
    rho = DensityMatrix.product(h, probs, p_excited)
    n_mean = float(np.arange(h.n_max + 1) @ probs)
    moments = MomentState.product(n_mean, 2.0 * p_excited - 1.0)
    return rho, moments


def exact_moment_derivatives(p, h, rho):
    """d/dt of (n, s, Re c, Im c, Re x, Im x, z) from the full Liouvillian."""
    liou = build_liouvillian(p, h)
    drho = unvec(liou.matrix @ vec(rho.mat), h.dim)
    dn = operator_expectation(observable_operator("photon_number", h), drho)
    ds = operator_expectation(observable_operator("sigma_z", h, 0), drho)
    dc = operator_expectation(observable_operator("field_coherence", h, 0), drho)
    if h.n_emitters >= 2:
        dx = operator_expectation(observable_operator("cross_pm", h, 0, 1), drho)
        dz = operator_expectation(observable_operator("cross_zz", h, 0, 1), drho)
    else:
        dx, dz = 0j, 0j
    return np.array([dn.real, ds.real, dc.real, dc.imag, dx.real, dx.imag, dz.real])


def moment_vector(d: MomentState):
    return np.array([d.n_photon, d.s_z, d.coh.real, d.coh.imag,
                     d.x_pm.real, d.x_pm.imag, d.z_zz])
