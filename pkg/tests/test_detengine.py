import mpmath as mp
import pytest

from refl6v.params import SpectralParams, special_point, OutOfRegimeError
from refl6v.enumeration import enumerate_Z, enumerate_correlations, evaluate_h
from refl6v.detengine import (
    tsuchiya_Z,
    freefermion_Z,
    homogeneous_Z,
    partial_inhom_Z,
    hN_determinant,
    tau_N,
    tau_tilde_N,
    tau_sequence,
    toda_residuals,
    default_dps,
    SingularPrefactorError,
)
from refl6v.asymptotics import gamma_map


with mp.workdps(60):
    GENERIC = SpectralParams(lam=0.55, mu=0.21, eta=mp.pi / 5, xi=1.2)
    GENERIC0 = SpectralParams(lam=0.55, mu=0, eta=mp.pi / 5, xi=1.2)
    FF = SpectralParams(lam=0.52, mu=0.13, eta=mp.pi / 4, xi=1.1)


def test_tsuchiya_n1_closed():
    lam, mu = mp.mpf("0.5"), mp.mpf("0.2")
    Z = tsuchiya_Z([lam], [mu], GENERIC, dps=60)
    closed = mp.sin(2 * lam) * mp.sin(GENERIC.xi - mu) / mp.sin(GENERIC.xi) * mp.sin(2 * GENERIC.eta)
    assert abs(Z - closed) / closed < mp.mpf(10) ** -45


def test_tsuchiya_permutation_symmetry():
    lams = [mp.mpf("0.5"), mp.mpf("0.62")]
    mus = [mp.mpf("0.2"), mp.mpf("0.11")]
    Z1 = tsuchiya_Z(lams, mus, GENERIC, dps=60)
    Z2 = tsuchiya_Z(lams[::-1], mus, GENERIC, dps=60)
    assert abs(Z1 - Z2) / Z1 < mp.mpf(10) ** -50


def test_tsuchiya_against_enumeration():
    for N in (2, 3):
        lams = [mp.mpf("0.5") + mp.mpf("0.07") * j for j in range(N)]
        mus = [mp.mpf("0.2") - mp.mpf("0.04") * k for k in range(N)]
        Zt = tsuchiya_Z(lams, mus, GENERIC, dps=60)
        Ze, _ = enumerate_Z(N, GENERIC, mode="transfer", lambdas=lams, mus=mus, dps=60)
        assert abs(Zt - Ze) / Ze < mp.mpf(10) ** -45


def test_tsuchiya_rejects_coinciding_parameters():
    with pytest.raises(SingularPrefactorError, match="homogeneous_Z"):
        tsuchiya_Z([mp.mpf("0.5"), mp.mpf("0.5")], [mp.mpf("0.1"), mp.mpf("0.2")], GENERIC)


def test_freefermion_closed_equals_tsuchiya():
    lams = [mp.mpf("0.61"), mp.mpf("0.47"), mp.mpf("0.33")]
    mus = [mp.mpf("0.21"), mp.mpf("0.12"), mp.mpf("0.05")]
    Zt = tsuchiya_Z(lams, mus, FF, dps=60)
    Zf = freefermion_Z(lams, mus, FF.xi, dps=60)
    assert abs(Zt - Zf) / Zf < mp.mpf(10) ** -50


def test_homogeneous_matches_enumeration():
    for p in (GENERIC, GENERIC0, FF):
        for N in (1, 2, 3, 4):
            Zh = homogeneous_Z(N, p, dps=60)
            Ze, _ = enumerate_Z(N, p, mode="transfer", dps=60)
            assert abs(Zh - Ze) / Ze < mp.mpf(10) ** -50, (N, float(p.eta))


def test_homogeneous_regular_at_lam_quarter_pi():
    # the generic prefactor has a(2 lam) = 0 here; the free-fermion closed
    # form stays regular
    p = special_point()
    for N in (2, 3, 4):
        Zh = homogeneous_Z(N, p, dps=50)
        Ze, _ = enumerate_Z(N, p, mode="transfer", dps=50)
        assert abs(Zh - Ze) / Ze < mp.mpf(10) ** -45


def test_tau_jet_route_matches_free_fermion_closed_form():
    # tau_N from the series jets against the closed form implied by the
    # factorized partition function at eta = pi/4 (lam away from pi/4)
    lam, mu = mp.mpf("0.52"), mp.mpf("0.13")
    N = 8
    dps = default_dps(N)
    with mp.workdps(dps):
        tau = tau_N(N, lam, mu, mp.pi / 4, dps=dps)
        m = N * (N - 1) // 2
        CN = mp.mpf(1)
        f = mp.mpf(1)
        for j in range(1, N):
            f *= mp.factorial(j)
        CN = f * f
        closed = (
            CN
            * (-mp.sin(4 * lam) * mp.sin(4 * mu) / 4) ** m
            * ((mp.sin(2 * lam) ** 2 - mp.sin(2 * mu) ** 2) / 4) ** (-(N * N))
        )
        assert abs(tau - closed) / abs(closed) < mp.mpf(10) ** -40


def test_partial_inhom_matches_inhomogeneous_enumeration():
    om = mp.mpf("0.11")
    for p in (GENERIC, GENERIC0, FF):
        for N in (2, 3, 4):
            Zp = partial_inhom_Z(N, p, omega=om, dps=60)
            mus = [p.mu] * (N - 1) + [p.mu + om]
            Ze, _ = enumerate_Z(N, p, mode="transfer", mus=mus, dps=60)
            assert abs(Zp - Ze) / Ze < mp.mpf(10) ** -50, (N, float(p.eta), float(p.mu))


def test_partial_inhom_omega_to_zero():
    for p in (GENERIC, FF):
        Zh = homogeneous_Z(3, p, dps=60)
        Zp = partial_inhom_Z(3, p, omega=mp.mpf("1e-12"), dps=80)
        assert abs(Zp / Zh - 1) < mp.mpf(10) ** -10


def test_sn_small_omega_law():
    # S_N ~ omega^(N-1)/(N-1)! as omega -> 0
    N = 3
    om = mp.mpf("1e-6")
    with mp.workdps(80):
        tau = tau_N(N, GENERIC.lam, GENERIC.mu, GENERIC.eta, dps=80)
        tilde = tau_tilde_N(N, GENERIC.lam, GENERIC.mu, om, GENERIC.eta, dps=80)
        S = tilde / tau
        predicted = om ** (N - 1) / mp.factorial(N - 1)
        assert abs(S / predicted - 1) < mp.mpf(10) ** -4


def test_tau_sequence_basics():
    seq = tau_sequence(4, GENERIC.lam, GENERIC.mu, GENERIC.eta, omega=mp.mpf("0.1"))
    from refl6v.detengine import psi_value

    with mp.workdps(seq.precision):
        assert abs(seq.tau[0] - psi_value(GENERIC.lam, GENERIC.mu, GENERIC.eta)) < 1e-40
        assert abs(seq.tau_tilde[0] - psi_value(GENERIC.lam, GENERIC.mu + mp.mpf("0.1"),
                                                GENERIC.eta)) < 1e-40
    assert abs(seq.C[3] - (1 * 1 * 2 * 6) ** 2) == 0


def test_toda_residuals_small():
    for N in (2, 4, 8):
        dps = default_dps(N + 1)
        r1, r2 = toda_residuals(N, GENERIC.lam, GENERIC.mu, GENERIC.eta, dps=dps)
        thr = mp.mpf(10) ** (-dps // 2)
        assert r1 < thr and r2 < thr


def test_tau_precision_stability():
    # doubling the working precision moves tau_N by a negligible amount
    for N in (8, 16, 24):
        dps = default_dps(N)
        t1 = tau_N(N, GENERIC.lam, GENERIC.mu, GENERIC.eta, dps=dps)
        t2 = tau_N(N, GENERIC.lam, GENERIC.mu, GENERIC.eta, dps=2 * dps)
        with mp.workdps(2 * dps):
            assert abs(t1 - t2) / abs(t2) < mp.mpf(10) ** -10


def test_hn_determinant_identity_and_errors():
    lam = mp.pi / 4
    for N in (2, 4):
        tab = enumerate_correlations(N, special_point(), dps=60)
        for om in (mp.mpf("0.1"), mp.mpf("-0.2")):
            hd = hN_determinant(N, lam, om, dps=60)
            he = evaluate_h(tab, gamma_map(om, lam))
            assert abs(hd - he) / he < mp.mpf(10) ** -40
    with pytest.raises(OutOfRegimeError):
        hN_determinant(3, mp.mpf("0.3"), mp.mpf("0.4"))
    with pytest.raises(OutOfRegimeError):
        hN_determinant(3, mp.mpf("1.0"), mp.mpf("0.1"))


def test_homogeneous_positivity_guard():
    # in-regime results are positive despite the negative prefactor base
    for N in (2, 3, 4, 5):
        assert homogeneous_Z(N, GENERIC, dps=60) > 0


def test_hn_identity_over_omega_grid():
    # the finite-N identity holds across the whole overlap domain
    import numpy as np

    lam = mp.pi / 4
    N = 3
    tab = enumerate_correlations(N, special_point(), dps=60)
    for om in np.linspace(-0.55, 0.55, 10):
        hd = hN_determinant(N, lam, mp.mpf(om), dps=60)
        he = evaluate_h(tab, gamma_map(mp.mpf(om), lam))
        assert abs(hd - he) / abs(he) < mp.mpf(10) ** -40
