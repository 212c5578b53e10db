import math

import numpy as np
import mpmath as mp
import pytest
from scipy import stats as sstats

from refl6v.params import SpectralParams, special_point, build_weights
from refl6v.lattice import LatticeState, validate_state, state_weight, to_paths
from refl6v.enumeration import enumerate_states, enumerate_correlations
from refl6v import montecarlo as mc
from refl6v import _mc_core_py as pure_kernel

SP = special_point()
GENERIC = SpectralParams(lam=0.5, mu=0.15, eta=mp.pi / 5, xi=1.2)


def test_reference_state_valid_with_n_paths():
    for N in (1, 2, 3, 16, 64):
        st = mc.reference_state(N)
        assert validate_state(st) == []
        assert len(to_paths(st).paths) == N


def test_mc_init_modes():
    for N in (1, 3, 6):
        chain = mc.mc_init(N, seed=3, mode="exact-dp")
        assert validate_state(chain.state) == []
    with pytest.raises(Exception):
        mc.mc_init(12, seed=0, mode="exact-dp")


def test_sweeps_preserve_validity():
    for N in (1, 2, 5):
        chain = mc.mc_init(N, seed=7, mode="reference", kernel="pure")
        mc.mc_run(chain, 50, debug=True)  # debug revalidates after each sweep


def test_turn_moves_are_live():
    chain = mc.mc_init(3, seed=1, mode="reference", kernel="pure")
    mc.mc_run(chain, 200)
    assert chain.stats.turn_accepted > 0
    assert chain.stats.interior_accepted > 0


@pytest.mark.skipif(len(mc.available_kernels()) < 2, reason="compiled kernel not built")
def test_kernel_trajectories_bit_identical():
    for N, weights in ((2, None), (5, None), (4, build_weights(GENERIC))):
        a = mc.mc_init(N, seed=42, mode="reference", kernel="compiled")
        b = mc.mc_init(N, seed=42, mode="reference", kernel="pure")
        mc.mc_run(a, 300, weights=weights)
        mc.mc_run(b, 300, weights=weights)
        assert np.array_equal(a.state.h, b.state.h)
        assert np.array_equal(a.state.v, b.state.v)
        assert a.stats.as_dict() == b.stats.as_dict()


def test_metropolis_ratios_equal_exact_weight_ratios():
    # detailed balance: the kernel's acceptance ratio equals the Boltzmann
    # weight ratio of the flipped state, for every face of every N=2 state,
    # at the special point and at generic weights
    for params in (SP, GENERIC):
        ws = build_weights(params)
        wlut, kp, km = mc.weight_lut(ws)
        for st, w in enumerate_states(2, params):
            for kind, coords in (
                [("interior", (g, 0)) for g in range(3)] + [("turn", (p,)) for p in range(2)]
            ):
                h2, v2 = st.h.copy(), st.v.copy()
                fl, ratio = pure_kernel.face_ratio(h2, v2, wlut, kp, km, kind, *coords)
                if not fl:
                    continue
                if kind == "interior":
                    g, c = coords
                    h2[g, c + 1] ^= 1
                    h2[g + 1, c + 1] ^= 1
                    v2[g + 1, c] ^= 1
                    v2[g + 1, c + 1] ^= 1
                else:
                    (p,) = coords
                    h2[2 * p, 2] ^= 1
                    h2[2 * p + 1, 2] ^= 1
                    v2[2 * p + 1, 1] ^= 1
                flipped = LatticeState(2, h2, v2)
                assert validate_state(flipped) == []
                exact = float(state_weight(flipped, params) / w)
                assert abs(ratio - exact) < 1e-12 * max(1.0, exact)


def test_exact_sampler_matches_boltzmann():
    states = list(enumerate_states(3, SP))
    probs = np.array([float(w) for _, w in states])
    probs /= probs.sum()
    index = {st.key(): i for i, (st, _) in enumerate(states)}
    sampler = mc.ExactSampler(3, SP)
    rng = np.random.Generator(np.random.Philox(7))
    M = 60000
    counts = np.zeros(len(states))
    for _ in range(M):
        counts[index[sampler.sample(rng).key()]] += 1
    assert sstats.chisquare(counts, probs * M).pvalue > 0.01


def test_exact_sampler_scan_mode_agrees():
    # the table-free backward scan draws from the same distribution
    states = list(enumerate_states(2, SP))
    probs = np.array([float(w) for _, w in states])
    probs /= probs.sum()
    index = {st.key(): i for i, (st, _) in enumerate(states)}
    sampler = mc.ExactSampler(2, SP, table_max_n=0)
    assert sampler._tables is None
    rng = np.random.Generator(np.random.Philox(11))
    M = 20000
    counts = np.zeros(len(states))
    for _ in range(M):
        st = sampler.sample(rng)
        assert validate_state(st) == []
        counts[index[st.key()]] += 1
    assert sstats.chisquare(counts, probs * M).pvalue > 0.01


def test_chain_visits_all_states_with_right_frequencies():
    # empirical ergodicity check backing the move-set design
    states = list(enumerate_states(2, SP))
    probs = np.array([float(w) for _, w in states])
    probs /= probs.sum()
    index = {st.key(): i for i, (st, _) in enumerate(states)}
    chain = mc.mc_init(2, seed=5, mode="reference", kernel="pure")
    mc.mc_run(chain, 500)
    counts = np.zeros(len(states))
    for _ in range(30000):
        mc.mc_sweep(chain)
        counts[index[chain.state.key()]] += 1
    assert (counts > 0).all()
    assert sstats.chisquare(counts, probs * counts.sum()).pvalue > 0.01


def test_measure_and_g_extraction():
    N = 4
    tab = enumerate_correlations(N, SP, dps=40)
    exact_G = np.array([float(g) for g in tab.G])
    chain = mc.mc_init(N, seed=9, mode="exact-dp")
    field = mc.mc_measure(chain, n_sweeps=40000, burn_in=4000, thinning=4)
    est, err = field.g_estimate()
    for r in range(N):
        tol = 4 * err[r] if err[r] > 0 else 1e-12
        assert abs(est[r] - exact_G[r]) <= tol
    assert field.density.min() >= 0 and field.density.max() <= 1
    # boundary rows are frozen by construction
    assert field.density[0].max() == 0
    assert field.density[2 * N].min() == 1


def test_density_symmetry_under_reflection():
    # at the symmetric point the up-down flip maps d -> 1 - d
    chain = mc.mc_init(8, seed=13, mode="exact-dp")
    field = mc.mc_measure(chain, n_sweeps=20000, burn_in=2000, thinning=4)
    dev = np.abs(field.density + field.density[::-1, :] - 1)
    assert dev.max() < 0.08


def test_contour_on_analytic_disk():
    # a noiseless disordered disk: density 1/2 inside, frozen outside
    N = 64
    x, y = mc.field_coordinates(N)
    X, Y = np.meshgrid(x, y)
    inside = (X - 1) ** 2 + (Y - 1) ** 2 < 1
    density = np.where(inside, 0.5, np.where(Y > 1, 0.0, 1.0))
    field = mc.DensityField(N=N, density=density, stderr=np.zeros_like(density),
                            n_samples=1, sweeps=0, burn_in=0, thinning=1, seed=0)
    cont = mc.extract_contour(field, 0.05)
    dist = mc.compare_semicircle(cont, x_max=1 - 1.0 / N, corner_exclusion=0.0)
    assert dist <= math.hypot(0.5 / N, 1.0 / N) * 1.5  # within cell resolution
    contacts = mc.contour_contacts(cont)
    assert max(c["distance"] for c in contacts.values()) < 2.0 / N


def test_contour_errors():
    N = 8
    density = np.zeros((2 * N + 1, N))
    density[N:, :] = 1.0
    field = mc.DensityField(N=N, density=density, stderr=np.zeros_like(density),
                            n_samples=1, sweeps=0, burn_in=0, thinning=1, seed=0)
    with pytest.raises(ValueError, match="empty contour"):
        mc.extract_contour(field, 0.05)
    with pytest.raises(ValueError, match="epsilon"):
        mc.extract_contour(field, 0.7)


def test_generic_weights_chain_matches_enumeration():
    # Metropolis with a fully generic positive WeightSet samples the right
    # distribution (N = 2)
    ws = build_weights(GENERIC)
    states = list(enumerate_states(2, GENERIC))
    probs = np.array([float(w) for _, w in states])
    probs /= probs.sum()
    index = {st.key(): i for i, (st, _) in enumerate(states)}
    chain = mc.mc_init(2, seed=21, mode="reference", kernel="pure")
    mc.mc_run(chain, 500, weights=ws)
    counts = np.zeros(len(states))
    for _ in range(30000):
        mc.mc_sweep(chain, weights=ws)
        counts[index[chain.state.key()]] += 1
    assert sstats.chisquare(counts, probs * counts.sum()).pvalue > 0.01
