import mpmath as mp
import pytest

from refl6v.params import SpectralParams, special_point, CapacityError
from refl6v.enumeration import (
    enumerate_Z,
    enumerate_states,
    enumerate_correlations,
    evaluate_h,
    enumerate_extended,
)


GENERIC = SpectralParams(lam=0.55, mu=0.21, eta=mp.pi / 5, xi=1.2)
SP = special_point()


def test_configuration_counts():
    # frozen from the brute-force enumeration; mode equivalence is exact
    expected = {1: 2, 2: 12, 3: 208}
    for N, cnt in expected.items():
        Zb, cb = enumerate_Z(N, GENERIC, mode="brute")
        Zt, ct = enumerate_Z(N, GENERIC, mode="transfer")
        assert cb == ct == cnt
        assert Zb == Zt or abs(Zb - Zt) / Zb < mp.mpf(10) ** -45


def test_z1_special_point():
    Z, count = enumerate_Z(1, SP, mode="brute")
    assert count == 2
    assert abs(Z - 1) < 1e-45


def test_free_fermion_factorized_z():
    # eta = pi/4 closed form, generic lam/mu/xi
    p = SpectralParams(lam=0.6, mu=0.17, eta=mp.pi / 4, xi=1.3)
    for N in (1, 2, 3, 4):
        Z, _ = enumerate_Z(N, p, mode="transfer")
        closed = (mp.sin(2 * p.lam) * mp.sin(p.xi - p.mu) / mp.sin(p.xi)) ** N
        closed *= (mp.sin(2 * p.lam) * mp.cos(2 * p.mu)) ** (N * (N - 1) // 2)
        assert abs(Z - closed) / closed < mp.mpf(10) ** -45


def test_correlation_invariants_generic():
    for N in (1, 2, 3, 4):
        t = enumerate_correlations(N, GENERIC)
        assert abs(t.G[-1] - 1) < mp.mpf(10) ** -45
        assert abs(sum(t.H) - 1) < mp.mpf(10) ** -45
        acc = mp.mpf(0)
        for r in range(N):
            assert t.A[r] > 0 and t.D[r] > 0
            assert abs(t.Z * t.H[r] - t.A[r] - t.D[r]) / t.Z < mp.mpf(10) ** -45
            acc += t.H[r]
            assert abs(t.G[r] - acc) < mp.mpf(10) ** -45
        # G is a cumulative sum of non-negative terms, so non-decreasing
        assert all(t.G[r + 1] >= t.G[r] for r in range(N - 1))


def test_h3_closed_values_at_symmetric_point():
    # exact distribution of the first-column c-vertex at the symmetric point,
    # derived independently from the factorized finite-N h identity
    t = enumerate_correlations(3, SP)
    assert abs(t.H[0] - mp.mpf(3) / 16) < 1e-50
    assert abs(t.H[1] - mp.mpf(5) / 8) < 1e-50
    assert abs(t.H[2] - mp.mpf(3) / 16) < 1e-50
    # the symmetric point is reflection-symmetric in the double rows
    t4 = enumerate_correlations(4, SP)
    for r in range(4):
        assert abs(t4.H[r] - t4.H[3 - r]) < 1e-50


def test_evaluate_h_edges():
    t = enumerate_correlations(4, SP)
    assert abs(evaluate_h(t, 1) - 1) < 1e-50
    assert abs(evaluate_h(t, 0) - t.H[0]) < 1e-50


def test_conditioned_sums_equal_z():
    t = enumerate_correlations(3, GENERIC)
    total = sum(t.A) + sum(t.D)
    assert abs(total - t.Z) / t.Z < mp.mpf(10) ** -45


def test_extended_lattice_identity():
    for N, L in ((2, 1), (2, 2), (3, 1)):
        ext = enumerate_extended(N, L, SP)
        assert ext.residual < mp.mpf(10) ** -50
    # generic weights satisfy the factorization too
    ext = enumerate_extended(2, 1, GENERIC)
    assert ext.residual < mp.mpf(10) ** -50


def test_extended_degenerate_l0():
    for p in (SP, GENERIC):
        ext = enumerate_extended(2, 0, p)
        Z, _ = enumerate_Z(2, p, mode="transfer")
        assert abs(ext.Z_NL - Z) / Z < mp.mpf(10) ** -50
        assert ext.residual < mp.mpf(10) ** -50


def test_capacity_errors():
    with pytest.raises(CapacityError):
        enumerate_Z(5, SP, mode="brute")
    with pytest.raises(CapacityError):
        enumerate_Z(11, SP, mode="transfer")
    with pytest.raises(CapacityError):
        enumerate_extended(6, 1, SP)


def test_path_flux_through_cuts():
    # ice-rule conservation: thick h-edges at a cut equal paths crossing it
    from refl6v.lattice import to_paths

    for st, _ in enumerate_states(3, SP):
        pp = to_paths(st)
        for c in range(1, 4):
            thick = int((st.h[:, c] == 1).sum())
            crossing = sum(
                1 for path in pp.paths for kind, i, cc in path if kind == "h" and cc == c
            )
            assert thick == crossing
