"""Exact enumeration of the reflecting-end six-vertex model.

Both modes sweep the lattice column by column from the left.  The sweep
state is the profile of 2N horizontal-edge bits at a vertical cut (bit i =
row i from the top, 0 = arrow right).  The left boundary fixes the initial
profile to 0; the right boundary is closed by the turn constraints, each
row pair contributing kappa_+(lam_j) or kappa_-(lam_j) depending on the
flow direction through its turn.

Walking down one column, the vertical edge below each vertex is determined
by the ice rule up to the usual two-fold choice:

    left bit == incoming vertical bit  ->  pass through (w1) or corner (w3)
    left bit != incoming vertical bit  ->  forced straight vertical (w2)

so a column maps an input profile to a weighted set of output profiles.
Weights are arbitrary-precision reals (mpmath) by default; the same sweep
runs on floats or plain ints (for configuration counts).
"""

from dataclasses import dataclass

import mpmath as mp

from .params import CapacityError
from .lattice import LatticeState, bulk_weight_table, turn_weight_pairs
import numpy as np

BRUTE_MAX_N = 4
TRANSFER_MAX_N = 10
EXTENDED_MAX_N = 5
EXTENDED_MAX_L = 4


def column_transitions(profile, triples, top_bit=0, bottom_bit=1):
    """All (out_profile, weight, vmask) for one column.

    triples[i] = (w1, w2, w3) of row i; vmask bit g is the vertical edge at
    gap g (g=0 the edge above the first row).
    """
    n_rows = len(triples)
    one = triples[0][0] * 0 + 1  # multiplicative unit of the weight ring
    out = []
    stack = [(0, top_bit, 0, top_bit, one)]
    while stack:
        i, v, bits, vmask, w = stack.pop()
        if i == n_rows:
            if v == bottom_bit:
                out.append((bits, w, vmask))
            continue
        left = (profile >> i) & 1
        w1, w2, w3 = triples[i]
        if left == v:
            g = i + 1
            stack.append((g, v, bits | (left << i), vmask | (v << g), w * w1))
            nv = 1 - v
            stack.append((g, nv, bits | ((1 - left) << i), vmask | (nv << g), w * w3))
        else:
            g = i + 1
            stack.append((g, v, bits | (left << i), vmask | (v << g), w * w2))
    return out


def _closure_factor(profile, kappa_pairs):
    """Turn-closure weight of a final profile (0 if any pair has no flow)."""
    w = None
    for p, (kp, km) in enumerate(kappa_pairs):
        up = (profile >> (2 * p)) & 1
        lo = (profile >> (2 * p + 1)) & 1
        if up == lo:
            return None
        f = km if up == 0 else kp
        w = f if w is None else w * f
    return w


def forward_sweep(triples_by_column, bottom_bits=None, start_profile=0):
    """List of {profile: weight} dicts at every cut, sweeping left to right."""
    one = triples_by_column[0][0][0] * 0 + 1
    layers = [{start_profile: one}]
    for j, triples in enumerate(triples_by_column):
        bb = 1 if bottom_bits is None else bottom_bits[j]
        cur = layers[-1]
        nxt = {}
        for prof, acc in cur.items():
            for q, w, _ in column_transitions(prof, triples, bottom_bit=bb):
                nxt[q] = nxt.get(q, acc * 0) + acc * w
        layers.append(nxt)
    return layers


def backward_sweep(triples_by_column, kappa_pairs, supports, bottom_bits=None):
    """R[c][P] = weight of completing columns c.. plus the turn closure.

    supports[c] restricts each layer to the profiles actually reachable from
    the left (from a forward sweep), keeping the cost proportional to the
    forward one.
    """
    n_cols = len(triples_by_column)
    zero = triples_by_column[0][0][0] * 0
    final = {}
    for prof in supports[n_cols]:
        f = _closure_factor(prof, kappa_pairs)
        if f is not None:
            final[prof] = f
    layers = [None] * n_cols + [final]
    for c in range(n_cols - 1, -1, -1):
        bb = 1 if bottom_bits is None else bottom_bits[c]
        nxt = layers[c + 1]
        cur = {}
        for prof in supports[c]:
            acc = zero
            for q, w, _ in column_transitions(prof, triples_by_column[c], bottom_bit=bb):
                r = nxt.get(q)
                if r is not None:
                    acc = acc + w * r
            cur[prof] = acc
        layers[c] = cur
    return layers


def _check_caps(N, mode):
    if mode == "brute" and N > BRUTE_MAX_N:
        raise CapacityError(f"brute enumeration supports N <= {BRUTE_MAX_N}, got {N}")
    if mode == "transfer" and N > TRANSFER_MAX_N:
        raise CapacityError(f"transfer enumeration supports N <= {TRANSFER_MAX_N}, got {N}")


def _unit_triples(N, n_cols):
    return [[(1, 1, 1)] * (2 * N) for _ in range(n_cols)]


def _mp_triples(N, params, lambdas, mus, n_cols=None):
    table = bulk_weight_table(N, params, lambdas, mus, n_columns=n_cols)
    n_cols = N if n_cols is None else n_cols
    return [[table[i][j] for i in range(2 * N)] for j in range(n_cols)]


def enumerate_Z(N, params, mode="transfer", lambdas=None, mus=None, dps=50):
    """Exact partition function and configuration count.

    brute materializes every state (N <= 4); transfer sums the column sweep
    (N <= 10).  Both agree exactly.
    """
    _check_caps(N, mode)
    if mode == "brute":
        Z = mp.mpf(0)
        count = 0
        for _, w in enumerate_states(N, params, lambdas, mus, dps=dps):
            Z += w
            count += 1
        return Z, count
    with mp.workdps(dps):
        cols = _mp_triples(N, params, lambdas, mus)
        kappas = turn_weight_pairs(N, params, lambdas)
        layers = forward_sweep(cols)
        Z = mp.mpf(0)
        for prof, acc in layers[N].items():
            f = _closure_factor(prof, kappas)
            if f is not None:
                Z += acc * f
    count = 0
    count_layers = forward_sweep(_unit_triples(N, N))
    unit_kappas = [(1, 1)] * N
    for prof, acc in count_layers[N].items():
        if _closure_factor(prof, unit_kappas) is not None:
            count += acc
    return Z, count


def enumerate_states(N, params, lambdas=None, mus=None, dps=50):
    """Yield (LatticeState, weight) over all valid configurations (N <= 4)."""
    _check_caps(N, "brute")
    with mp.workdps(dps):
        cols = _mp_triples(N, params, lambdas, mus)
        kappas = turn_weight_pairs(N, params, lambdas)

        def rec(j, prof, acc, col_records):
            if j == N:
                f = _closure_factor(prof, kappas)
                if f is not None:
                    yield _assemble_state(N, col_records), acc * f
                return
            for q, w, vmask in column_transitions(prof, cols[j]):
                yield from rec(j + 1, q, acc * w, col_records + [(q, vmask)])

        yield from rec(0, 0, mp.mpf(1), [])


def _assemble_state(N, col_records):
    h = np.zeros((2 * N, N + 1), dtype=np.int8)
    v = np.zeros((2 * N + 1, N), dtype=np.int8)
    for j, (prof, vmask) in enumerate(col_records):
        for i in range(2 * N):
            h[i][j + 1] = (prof >> i) & 1
        for g in range(2 * N + 1):
            v[g][j] = (vmask >> g) & 1
    return LatticeState(N, h, v)


@dataclass
class CorrelationTable:
    """Exact boundary correlations of the 2N x N lattice.

    H[r-1], G[r-1] are the one-point functions of the sole first-column
    c-vertex (probability it sits in double row r, and the cumulative sum);
    A, D are the unnormalized splits by upper/lower line, so that
    Z*H = A + D componentwise.  h_coeffs are the coefficients of the
    generating polynomial h_N(z) = sum_r H^(r) z^(r-1).
    """

    N: int
    Z: mp.mpf
    H: list
    G: list
    A: list
    D: list
    h_coeffs: list

    def to_json_dict(self, digits=30):
        s = lambda x: mp.nstr(x, digits)
        return {
            "N": self.N,
            "Z": s(self.Z),
            "H": [s(x) for x in self.H],
            "G": [s(x) for x in self.G],
            "A": [s(x) for x in self.A],
            "D": [s(x) for x in self.D],
            "h_coeffs": [s(x) for x in self.h_coeffs],
        }

    def csv_rows(self, digits=30):
        s = lambda x: mp.nstr(x, digits)
        rows = []
        for r in range(1, self.N + 1):
            rows.append([r, s(self.H[r - 1]), s(self.G[r - 1]), s(self.A[r - 1]), s(self.D[r - 1])])
        return rows


def first_column_leaves(N, triples0):
    """The leftmost column in closed form.

    Its left edges all point in, so walking down the column the vertical
    state flips from up to down at exactly one c-vertex, at row m.  Returns
    (m, out_profile, weight) for m = 0..2N-1.
    """
    leaves = []
    for m in range(2 * N):
        w = triples0[m][2]
        for i in range(m):
            w = w * triples0[i][0]
        for i in range(m + 1, 2 * N):
            w = w * triples0[i][1]
        leaves.append((m, 1 << m, w))
    return leaves


def enumerate_correlations(N, params, lambdas=None, mus=None, dps=50):
    """CorrelationTable via one forward and one backward sweep (N <= 10)."""
    _check_caps(N, "transfer")
    with mp.workdps(dps):
        cols = _mp_triples(N, params, lambdas, mus)
        kappas = turn_weight_pairs(N, params, lambdas)
        fwd = forward_sweep(cols)
        supports = [set(layer.keys()) for layer in fwd]
        back = backward_sweep(cols, kappas, supports)
        A = [mp.mpf(0)] * N
        D = [mp.mpf(0)] * N
        Z = mp.mpf(0)
        for m, prof, w in first_column_leaves(N, cols[0]):
            tail = back[1].get(prof)
            if tail is None:
                continue
            contrib = w * tail
            Z += contrib
            r = m // 2  # double row index, 0-based
            if m % 2 == 0:
                A[r] += contrib  # c-vertex on the upper line of the pair
            else:
                D[r] += contrib
        H = [(A[r] + D[r]) / Z for r in range(N)]
        G = []
        acc = mp.mpf(0)
        for r in range(N):
            acc += H[r]
            G.append(acc)
        return CorrelationTable(N=N, Z=Z, H=H, G=G, A=A, D=D, h_coeffs=list(H))


def evaluate_h(table, z):
    """h_N(z) = sum_r H^(r) z^(r-1)."""
    z = mp.mpf(z) if not isinstance(z, mp.mpf) else z
    acc = mp.mpf(0)
    for coeff in reversed(table.h_coeffs):
        acc = acc * z + coeff
    return acc


@dataclass
class ExtendedLattice:
    """Partition function of the 2N x (N+L) lattice and its two-domain split.

    The bottom boundary carries inward (up) arrows on columns 1..L (0-based)
    and outward (down) arrows elsewhere, so a single path crosses the
    interface between column L and L+1 at some height k (1-based from the
    bottom): Z_NL = sum_k Z_left[k] * Z_right[k] exactly.
    """

    N: int
    L: int
    Z_left: list   # index k-1, k = 1..2N
    Z_right: list
    Z_NL: mp.mpf
    Z_sum: mp.mpf

    @property
    def residual(self):
        return abs(self.Z_NL - self.Z_sum) / abs(self.Z_NL)

    def to_json_dict(self, digits=30):
        s = lambda x: mp.nstr(x, digits)
        return {
            "N": self.N,
            "L": self.L,
            "Z_left": [s(x) for x in self.Z_left],
            "Z_right": [s(x) for x in self.Z_right],
            "Z_NL": s(self.Z_NL),
            "Z_sum": s(self.Z_sum),
        }


def enumerate_extended(N, L, params, lambdas=None, dps=50):
    """Direct and factorized partition functions of the extended lattice."""
    if N > EXTENDED_MAX_N or L > EXTENDED_MAX_L:
        raise CapacityError(
            f"extended enumeration supports N <= {EXTENDED_MAX_N}, L <= {EXTENDED_MAX_L}"
        )
    n_cols = N + L
    with mp.workdps(dps):
        cols = _mp_triples(N, params, lambdas, None, n_cols=n_cols)
        kappas = turn_weight_pairs(N, params, lambdas)
        bottom = [1 if (j == 0 or j >= L + 1) else 0 for j in range(n_cols)]

        layers = forward_sweep(cols, bottom_bits=bottom)
        Z_NL = mp.mpf(0)
        for prof, acc in layers[n_cols].items():
            f = _closure_factor(prof, kappas)
            if f is not None:
                Z_NL += acc * f

        # left domain: columns 0..L; the interface profile must be a single
        # thick edge
        left_layers = forward_sweep(cols[: L + 1], bottom_bits=bottom[: L + 1])
        interface = left_layers[L + 1]
        Z_left = [mp.mpf(0)] * (2 * N)
        for prof, acc in interface.items():
            assert prof != 0 and (prof & (prof - 1)) == 0, "interface must carry one path"
            i = prof.bit_length() - 1  # row index from the top
            k = 2 * N - i              # 1-based from the bottom
            Z_left[k - 1] = acc

        # right domain: columns L+1..N+L-1 entered with one thick edge at
        # height k
        Z_right = [mp.mpf(0)] * (2 * N)
        for k in range(1, 2 * N + 1):
            i = 2 * N - k
            sub = forward_sweep(cols[L + 1:], bottom_bits=bottom[L + 1:], start_profile=1 << i)
            z = mp.mpf(0)
            for prof, acc in sub[-1].items():
                f = _closure_factor(prof, kappas)
                if f is not None:
                    z += acc * f
            Z_right[k - 1] = z

        Z_sum = mp.mpf(0)
        for k in range(2 * N):
            Z_sum += Z_left[k] * Z_right[k]
        return ExtendedLattice(N=N, L=L, Z_left=Z_left, Z_right=Z_right, Z_NL=Z_NL, Z_sum=Z_sum)
