import mpmath as mp
import pytest

from refl6v.params import SpectralParams, build_weights, special_point, OutOfRegimeError



def test_free_fermion_symmetric_weights():
    # at lambda = pi/4, mu = 0, eta = pi/4: a = b = sqrt(2)/2, c = 1
    ws = build_weights(special_point(), "even")
    root2_over_2 = mp.sqrt(2) / 2
    assert abs(ws.w1 - root2_over_2) < 1e-45
    assert abs(ws.w2 - root2_over_2) < 1e-45
    assert abs(ws.w3 - 1) < 1e-45


def test_delta_is_cos_2eta():
    for eta in (mp.pi / 4, mp.pi / 5, mp.mpf("0.9")):
        p = SpectralParams(lam=0.45, mu=0.13, eta=eta, xi=1.2)
        ws = build_weights(p, "even")
        assert abs(ws.delta - mp.cos(2 * eta)) < 1e-45
        # the ratio is argument-independent: the plus pair gives the same value
        delta_plus = (ws.a_plus ** 2 + ws.b_plus ** 2 - ws.c ** 2) / (2 * ws.a_plus * ws.b_plus)
        assert abs(delta_plus - mp.cos(2 * eta)) < 1e-45


def test_kappa_at_xi_half_pi():
    p = SpectralParams(lam=mp.mpf("0.3"), mu=0, eta=mp.pi / 4, xi=mp.pi / 2)
    ws = build_weights(p, "even")
    assert abs(ws.kappa_plus - mp.cos(mp.mpf("0.3"))) < 1e-45
    assert abs(ws.kappa_minus - mp.cos(mp.mpf("0.3"))) < 1e-45


def test_parity_triples():
    p = SpectralParams(lam=0.5, mu=0.2, eta=mp.pi / 5, xi=1.2)
    even = build_weights(p, "even")
    odd = build_weights(p, "odd")
    # even rows: (a(l-m), b(l-m), c); odd rows swap the roles through l -> -l
    assert even.w1 == even.a_minus and even.w2 == even.b_minus
    assert odd.w1 == odd.b_plus and odd.w2 == odd.a_plus


def test_omega_applies_to_leftmost_column():
    p = SpectralParams(lam=0.5, mu=0.2, eta=mp.pi / 5, xi=1.2, omega=mp.mpf("0.1"))
    plain = build_weights(p, "even", column_index=1, n_columns=3)
    shifted = build_weights(p, "even", column_index=3, n_columns=3)
    assert plain.a_minus != shifted.a_minus
    assert abs(shifted.a_minus - mp.sin(p.lam - (p.mu + p.omega) + 2 * p.eta)) < 1e-40


def test_out_of_regime_names_offender():
    with pytest.raises(OutOfRegimeError, match="b_minus"):
        build_weights(SpectralParams(lam=0.2, mu=0.5, eta=mp.pi / 4, xi=1.2), "even")
    with pytest.raises(OutOfRegimeError, match="kappa_minus"):
        build_weights(SpectralParams(lam=1.0, mu=0.1, eta=mp.pi / 8, xi=0.9), "even")
    with pytest.raises(OutOfRegimeError, match="eta"):
        SpectralParams(lam=0.5, mu=0.1, eta=2.0, xi=1.2)


def test_string_angles_parse_at_high_precision():
    p = SpectralParams(lam="0.55", mu="0.21", eta="0.6283", xi="1.2")
    assert abs(p.lam - mp.mpf("0.55")) < 1e-45
