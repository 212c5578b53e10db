"""Markov-chain sampling of reflecting-end six-vertex states.

Moves: oriented-cycle reversals of the interior unit plaquettes plus the N
three-edge turn faces (the two rightmost horizontal edges of a row pair and
the vertical edge connecting them); a turn-face flip toggles kappa_+ <->
kappa_-.  Both move classes preserve the ice rule and the fixed boundary.
Acceptance is Metropolis with the ratio of the (at most four) affected
vertex weights and the turn weight.

The sweep kernel exists twice: a Cython extension (refl6v._mc_core) and a
vectorized pure-Python fallback, selected at import; both consume one
uniform per face from a per-sweep Philox block in the same order and
produce bit-identical trajectories.  Set REFL6V_PURE_KERNEL=1 to force the
fallback.

An exact (perfect) sampler draws from the true Boltzmann distribution by
backward sampling of the column transfer sweep; it is the reference the
Markov chain is validated against.
"""

import os
import math
from dataclasses import dataclass, field

import numpy as np
import mpmath as mp

from .params import CapacityError, special_point, build_weights
from .lattice import LatticeState, validate_state
from .enumeration import (
    TRANSFER_MAX_N,
    column_transitions,
    forward_sweep,
    _closure_factor,
)
from .asymptotics import CurveSample
from . import _mc_core_py as _pure_kernel

try:
    from . import _mc_core as _compiled_kernel
except ImportError:  # extension not built; pure fallback only
    _compiled_kernel = None


def available_kernels():
    names = ["pure"]
    if _compiled_kernel is not None:
        names.insert(0, "compiled")
    return names


def get_kernel(name=None):
    if name in (None, "auto"):
        if os.environ.get("REFL6V_PURE_KERNEL"):
            return _pure_kernel
        return _compiled_kernel if _compiled_kernel is not None else _pure_kernel
    if name == "pure":
        return _pure_kernel
    if name == "compiled":
        if _compiled_kernel is None:
            raise RuntimeError("compiled kernel not built; install with the Cython extension")
        return _compiled_kernel
    raise ValueError(f"unknown kernel {name!r}")


def weight_lut(weights):
    """(wlut, kappa_plus, kappa_minus) float64 view of a WeightSet.

    wlut[p][t]: weight of a type-t vertex (0=a, 1=b, 2=c) on rows of parity
    p (0-based row index mod 2; parity 0 rows carry -lambda).
    """
    wlut = np.array(
        [
            [float(weights.b_plus), float(weights.a_plus), float(weights.c)],
            [float(weights.a_minus), float(weights.b_minus), float(weights.c)],
        ],
        dtype=np.float64,
    )
    return wlut, float(weights.kappa_plus), float(weights.kappa_minus)


@dataclass
class MoveStats:
    interior_proposed: int = 0
    interior_accepted: int = 0
    turn_proposed: int = 0
    turn_accepted: int = 0

    def update(self, ip, ia, tp, ta):
        self.interior_proposed += ip
        self.interior_accepted += ia
        self.turn_proposed += tp
        self.turn_accepted += ta

    def as_dict(self):
        return {
            "interior_proposed": self.interior_proposed,
            "interior_accepted": self.interior_accepted,
            "turn_proposed": self.turn_proposed,
            "turn_accepted": self.turn_accepted,
        }


@dataclass
class MCState:
    state: LatticeState
    seed: int
    rng: np.random.Generator
    sweeps: int = 0
    stats: MoveStats = field(default_factory=MoveStats)
    kernel: str = "auto"

    @property
    def N(self):
        return self.state.N


def reference_state(N):
    """Deterministic valid state: path p runs north along column p, then
    east along the lower line of double row p into its turn (kappa_-)."""
    h = np.zeros((2 * N, N + 1), dtype=np.int8)
    v = np.zeros((2 * N + 1, N), dtype=np.int8)
    for p in range(N):
        for c in range(p + 1, N + 1):
            h[2 * p + 1][c] = 1
        for g in range(2 * p + 2, 2 * N + 1):
            v[g][p] = 1
    return LatticeState(N, h, v)


class ExactSampler:
    """Perfect sampler by backward sampling of the column sweep (N <= 10)."""

    def __init__(self, N, params=None, table_max_n=7):
        if N > TRANSFER_MAX_N:
            raise CapacityError(f"exact sampling supports N <= {TRANSFER_MAX_N}")
        self.N = N
        self.params = params or special_point()
        from .lattice import bulk_weight_table, turn_weight_pairs

        with mp.workdps(30):
            table = bulk_weight_table(N, self.params)
            self.triples = [
                [tuple(float(w) for w in table[i][j]) for i in range(2 * N)]
                for j in range(N)
            ]
            self.kappas = [
                (float(kp), float(km)) for kp, km in turn_weight_pairs(N, self.params)
            ]
        self.fwd = forward_sweep(self.triples)
        # closure distribution over final profiles
        profs, ws = [], []
        for prof, acc in self.fwd[N].items():
            f = _closure_factor(prof, self.kappas)
            if f is not None:
                profs.append(prof)
                ws.append(acc * f)
        self.Z = float(sum(ws))
        if not self.Z > 0:
            raise ArithmeticError("vanishing partition function")
        self._final = (profs, np.cumsum(ws))
        self._tables = None
        if N <= table_max_n:
            self._tables = []
            for c in range(N):
                rev = {}
                for prof, acc in self.fwd[c].items():
                    for q, w, vmask in column_transitions(prof, self.triples[c]):
                        rev.setdefault(q, []).append((prof, acc * w, vmask))
                self._tables.append(
                    {
                        q: ([e[0] for e in entries], np.cumsum([e[1] for e in entries]),
                            [e[2] for e in entries])
                        for q, entries in rev.items()
                    }
                )

    def _pick(self, cum, rng):
        return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))

    def sample(self, rng):
        N = self.N
        profs, cum = self._final
        prof = profs[self._pick(cum, rng)]
        cut_profiles = [0] * (N + 1)
        vmasks = [0] * N
        cut_profiles[N] = prof
        for c in range(N - 1, -1, -1):
            q = cut_profiles[c + 1]
            if self._tables is not None:
                ps, cumw, vms = self._tables[c][q]
                i = self._pick(cumw, rng)
                cut_profiles[c], vmasks[c] = ps[i], vms[i]
            else:
                cands = []
                for prev, acc in self.fwd[c].items():
                    tw = _transition_weight(prev, q, self.triples[c])
                    if tw is not None:
                        cands.append((prev, acc * tw[0], tw[1]))
                cumw = np.cumsum([x[1] for x in cands])
                i = self._pick(cumw, rng)
                cut_profiles[c], vmasks[c] = cands[i][0], cands[i][2]
        assert cut_profiles[0] == 0
        h = np.zeros((2 * N, N + 1), dtype=np.int8)
        v = np.zeros((2 * N + 1, N), dtype=np.int8)
        for j in range(N):
            prof_j = cut_profiles[j + 1]
            for i in range(2 * N):
                h[i][j + 1] = (prof_j >> i) & 1
            for g in range(2 * N + 1):
                v[g][j] = (vmasks[j] >> g) & 1
        return LatticeState(N, h, v)


def _transition_weight(prev, q, triples):
    """(weight, vmask) of the column transition prev -> q, or None."""
    n_rows = len(triples)
    v = 0
    vmask = 0
    w = 1.0
    for i in range(n_rows):
        left = (prev >> i) & 1
        right = (q >> i) & 1
        nv = v + right - left
        if nv < 0 or nv > 1:
            return None
        if left != right:
            w *= triples[i][2]
        elif v == left:
            w *= triples[i][0]
        else:
            w *= triples[i][1]
        v = nv
        vmask |= v << (i + 1)
    if v != 1:
        return None
    return w, vmask


def mc_init(N, seed=0, mode="exact-dp", params=None, kernel="auto"):
    """Initialize a chain: 'exact-dp' draws from the exact distribution
    (N <= 10), 'reference' builds the deterministic staircase state."""
    params = params or special_point()
    rng = np.random.Generator(np.random.Philox(seed))
    if mode == "exact-dp":
        sampler = ExactSampler(N, params)
        state = sampler.sample(rng)
    elif mode == "reference":
        state = reference_state(N)
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    bad = validate_state(state)
    if bad:
        raise AssertionError(f"initial state invalid: {bad[0]}")
    return MCState(state=state, seed=seed, rng=rng, kernel=kernel)


def n_faces(N):
    return (2 * N - 1) * (N - 1) + N


def mc_sweep(mcstate, weights=None, debug=False):
    """One Metropolis pass over all faces; returns the updated MCState."""
    weights = weights or build_weights(special_point())
    wlut, kp, km = weight_lut(weights)
    kern = get_kernel(mcstate.kernel)
    u = mcstate.rng.random(n_faces(mcstate.N))
    stats = kern.sweep(mcstate.state.h, mcstate.state.v, u, wlut, kp, km)
    mcstate.stats.update(*stats)
    mcstate.sweeps += 1
    if debug:
        bad = validate_state(mcstate.state)
        if bad:
            raise AssertionError(f"sweep broke the state: {bad[0]}")
    return mcstate


def mc_run(mcstate, n_sweeps, weights=None, debug=False):
    weights = weights or build_weights(special_point())
    wlut, kp, km = weight_lut(weights)
    kern = get_kernel(mcstate.kernel)
    h, v = mcstate.state.h, mcstate.state.v
    nf = n_faces(mcstate.N)
    for _ in range(n_sweeps):
        u = mcstate.rng.random(nf)
        mcstate.stats.update(*kern.sweep(h, v, u, wlut, kp, km))
        mcstate.sweeps += 1
        if debug:
            bad = validate_state(mcstate.state)
            if bad:
                raise AssertionError(f"sweep broke the state: {bad[0]}")
    return mcstate


@dataclass
class DensityField:
    """Down-arrow frequency of every vertical edge, with batch-mean errors."""

    N: int
    density: np.ndarray  # (2N+1, N)
    stderr: np.ndarray   # batch-mean standard error of the density
    n_samples: int
    sweeps: int
    burn_in: int
    thinning: int
    seed: int

    @property
    def variance(self):
        """Per-cell variance of the binary down-arrow indicator."""
        return self.density * (1.0 - self.density)

    def g_estimate(self):
        """(G[r], stderr[r]) for r = 1..N from the leftmost column."""
        idx = [2 * r for r in range(1, self.N + 1)]
        return self.density[idx, 0], self.stderr[idx, 0]


def mc_measure(mcstate, n_sweeps, burn_in=0, thinning=1, weights=None, n_batches=16):
    """Accumulate the down-arrow density over a measured run."""
    if burn_in < 0 or thinning < 1:
        raise ValueError("need burn_in >= 0 and thinning >= 1")
    weights = weights or build_weights(special_point())
    wlut, kp, km = weight_lut(weights)
    kern = get_kernel(mcstate.kernel)
    N = mcstate.N
    h, v = mcstate.state.h, mcstate.state.v
    nf = n_faces(N)
    for _ in range(burn_in):
        u = mcstate.rng.random(nf)
        mcstate.stats.update(*kern.sweep(h, v, u, wlut, kp, km))
        mcstate.sweeps += 1
    n_meas = n_sweeps // thinning
    if n_meas < n_batches:
        n_batches = max(1, n_meas)
    batch_acc = np.zeros((n_batches, 2 * N + 1, N), dtype=np.float64)
    batch_cnt = np.zeros(n_batches, dtype=np.int64)
    sample_idx = 0
    for s in range(n_sweeps):
        u = mcstate.rng.random(nf)
        mcstate.stats.update(*kern.sweep(h, v, u, wlut, kp, km))
        mcstate.sweeps += 1
        if (s + 1) % thinning == 0:
            b = min(sample_idx * n_batches // n_meas, n_batches - 1)
            batch_acc[b] += v == 1
            batch_cnt[b] += 1
            sample_idx += 1
    total = batch_acc.sum(axis=0)
    n_samples = int(batch_cnt.sum())
    if n_samples == 0:
        raise ValueError("no samples taken; increase n_sweeps or lower thinning")
    density = total / n_samples
    means = batch_acc / np.maximum(batch_cnt, 1)[:, None, None]
    if n_batches > 1:
        stderr = means.std(axis=0, ddof=1) / math.sqrt(n_batches)
    else:
        stderr = np.full_like(density, np.nan)
    return DensityField(
        N=N, density=density, stderr=stderr, n_samples=n_samples,
        sweeps=mcstate.sweeps, burn_in=burn_in, thinning=thinning, seed=mcstate.seed,
    )


def field_coordinates(N):
    """(x[j], y[i]) of the vertical edge grid in the [0,1] x [0,2] rectangle."""
    x = (np.arange(N) + 0.5) / N
    y = 2.0 - np.arange(2 * N + 1) / N
    return x, y


def extract_contour(field, epsilon=0.05):
    """Boundary cells of the region where density is in (eps, 1-eps).

    The boundary is topological: cells of the region adjacent to an
    out-of-band cell or to the lattice edge.  It is a closed curve; its
    eastern part runs along the right lattice edge (the disordered region
    touches the reflecting end for all heights) and is excluded from the
    semicircle comparison, not from the contour itself.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must be in (0, 0.5)")
    d = field.density
    mask = (d > epsilon) & (d < 1 - epsilon)
    if not mask.any():
        raise ValueError("empty contour: no cells with intermediate density")
    pad = np.zeros((d.shape[0] + 2, d.shape[1] + 2), dtype=bool)
    pad[1:-1, 1:-1] = mask
    has_outside = (
        ~pad[:-2, 1:-1] | ~pad[2:, 1:-1] | ~pad[1:-1, :-2] | ~pad[1:-1, 2:]
    )
    boundary = mask & has_outside
    x, y = field_coordinates(field.N)
    samples = []
    for i, j in zip(*np.nonzero(boundary)):
        samples.append(CurveSample(x=float(x[j]), y=float(y[i]), parameter=float(d[i, j]),
                                   source="mc"))
    return samples


def compare_semicircle(samples, x_max=1.0, corner_exclusion=0.2):
    """Sup over western contour points of | |(x,y)-(1,1)| - 1 |.

    x_max drops the eastern closure of the contour (it runs along the
    lattice edge x = 1, through the interior of the limiting disc; pass
    1 - 1/N for a cell-resolution lattice).  corner_exclusion drops
    neighborhoods of the tangential contacts (1, 0) and (1, 2): the fixed-
    epsilon level set detaches from the limit curve there because the edge
    density profile flattens at tangency; those neighborhoods are tested
    separately through the contact points.
    """
    worst = 0.0
    for s in samples:
        if s.x > x_max:
            continue
        if (
            math.hypot(s.x - 1.0, s.y - 2.0) <= corner_exclusion
            or math.hypot(s.x - 1.0, s.y) <= corner_exclusion
        ):
            continue
        worst = max(worst, abs(math.hypot(s.x - 1.0, s.y - 1.0) - 1.0))
    return worst


def contour_contacts(samples):
    """Distance from the contour to each expected boundary contact point."""
    out = {}
    for name, (tx, ty) in (("left", (0.0, 1.0)), ("top", (1.0, 2.0)), ("bottom", (1.0, 0.0))):
        best = min(samples, key=lambda s: math.hypot(s.x - tx, s.y - ty))
        out[name] = {
            "point": (best.x, best.y),
            "distance": math.hypot(best.x - tx, best.y - ty),
        }
    return out
