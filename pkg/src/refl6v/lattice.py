"""Lattice states of the 2N x N six-vertex model with a reflecting end.

Edge encoding (one bit per edge, canonical direction right/up):

    h[i][c] : horizontal edge of row i (0-based from the top) at cut c,
              c = 0 is the left external edge, c = N the edge entering the
              turn.  Bit 0 = arrow points right, 1 = left.
    v[g][j] : vertical edge of column j (0-based from the left) at gap g,
              g = 0 is the top external edge, g = 2N the bottom external.
              Bit 0 = arrow points up, 1 = down.

Fixed boundary: left external edges point in (0), top external edges point
up/out (0), bottom external edges point down/out (1).  The right boundary
joins row pairs (2p, 2p+1) with a turn; flow through the turn determines its
state: upper edge toward the turn (bit 0) is the kappa_minus state, upper
edge away (bit 1) is kappa_plus.  Column j corresponds to the column
parameter mu_{N-j} (columns are numbered from the right in the transfer
matrix construction).

A thick-line (path) picture assigns a thick line to every left or down
arrow; every valid state decomposes into N non-crossing up/right paths
entering at the bottom and terminating at the turns.
"""

import json
from dataclasses import dataclass

import numpy as np
import mpmath as mp

from .params import raw_weights


def _generate_vertex_table():
    """Map (L, R, T, B) edge bits -> vertex type id, from the ice rule.

    Type ids: 0,1 = a-type (weight w1), 2,3 = b-type (w2), 4,5 = c-type (w3).
    Invalid combinations map to None.
    """
    table = {}
    for L in (0, 1):
        for R in (0, 1):
            for T in (0, 1):
                for B in (0, 1):
                    inward = (1 - L) + R + T + (1 - B)
                    if inward != 2:
                        table[(L, R, T, B)] = None
                    elif L == R and T == B:
                        if T == L:
                            table[(L, R, T, B)] = 0 + L       # a1 / a2
                        else:
                            table[(L, R, T, B)] = 2 + L       # b1 / b2
                    elif L != R and T != B:
                        table[(L, R, T, B)] = 4 + L           # c1 / c2
                    else:
                        table[(L, R, T, B)] = None
    return table


VERTEX_TABLE = _generate_vertex_table()

#: weight class (0=w1, 1=w2, 2=w3) of each vertex type id
WEIGHT_CLASS = (0, 0, 1, 1, 2, 2)


@dataclass
class LatticeState:
    N: int
    h: np.ndarray  # (2N, N+1) int8
    v: np.ndarray  # (2N+1, N) int8

    def copy(self):
        return LatticeState(self.N, self.h.copy(), self.v.copy())

    def __eq__(self, other):
        return (
            isinstance(other, LatticeState)
            and self.N == other.N
            and np.array_equal(self.h, other.h)
            and np.array_equal(self.v, other.v)
        )

    def key(self):
        """Hashable identity of the arrow configuration."""
        return (self.N, self.h.tobytes(), self.v.tobytes())

    @property
    def turn_states(self):
        """'+' or '-' per double row; derived from the rightmost h-edges."""
        return ["+" if self.h[2 * p][self.N] == 1 else "-" for p in range(self.N)]

    def vertex_type(self, i, j):
        return VERTEX_TABLE[
            (int(self.h[i][j]), int(self.h[i][j + 1]), int(self.v[i][j]), int(self.v[i + 1][j]))
        ]

    def to_json_dict(self):
        return {
            "N": self.N,
            "h_edges": self.h.astype(int).tolist(),
            "v_edges": self.v.astype(int).tolist(),
            "turns": self.turn_states,
        }

    def dumps(self):
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d):
        N = int(d["N"])
        h = np.array(d["h_edges"], dtype=np.int8)
        v = np.array(d["v_edges"], dtype=np.int8)
        state = cls(N, h, v)
        turns = d.get("turns")
        if turns is not None and list(turns) != state.turn_states:
            raise ValueError("turn states inconsistent with edge directions")
        return state

    @classmethod
    def loads(cls, s):
        return cls.from_json_dict(json.loads(s))


def validate_state(state):
    """List of violations; empty iff the state is a valid configuration.

    Each violation is a (kind, position, message) tuple.  Total function:
    never raises on malformed content, only on wrong array shapes.
    """
    N = state.N
    bad = []
    if state.h.shape != (2 * N, N + 1) or state.v.shape != (2 * N + 1, N):
        return [("shape", None, f"expected h {(2*N, N+1)} and v {(2*N+1, N)}")]
    for arr, name in ((state.h, "h"), (state.v, "v")):
        if not np.isin(arr, (0, 1)).all():
            bad.append(("encoding", name, "edge bits must be 0 or 1"))
            return bad
    for i in range(2 * N):
        if state.h[i][0] != 0:
            bad.append(("boundary", ("left", i), "left external edge must point in"))
    for j in range(N):
        if state.v[0][j] != 0:
            bad.append(("boundary", ("top", j), "top external edge must point up"))
        if state.v[2 * N][j] != 1:
            bad.append(("boundary", ("bottom", j), "bottom external edge must point down"))
    for i in range(2 * N):
        for j in range(N):
            if state.vertex_type(i, j) is None:
                bad.append(("ice", (i, j), "vertex violates the ice rule"))
    for p in range(N):
        if state.h[2 * p][N] == state.h[2 * p + 1][N]:
            bad.append(("turn", p, "flow must pass through the turn"))
    return bad


def bulk_weight_table(N, params, lambdas=None, mus=None, n_columns=None):
    """(w1, w2, w3) per (row i, column j), 0-based from top-left.

    lambdas (length N, per double row from the top) and mus (length
    n_columns, indexed by the 1-based column number from the right) override
    the homogeneous parameters; params.omega is applied to the leftmost
    column when mus is not given.
    """
    n_cols = N if n_columns is None else n_columns
    table = []
    for i in range(2 * N):
        lam = params.lam if lambdas is None else lambdas[i // 2]
        row = []
        for j in range(n_cols):
            k = n_cols - j  # 1-based column number from the right
            mu = params.mu_of_column(k, n_cols) if mus is None else mus[k - 1]
            ap, am, bp, bm, c, _, _ = raw_weights(lam, mu, params.eta, params.xi)
            if i % 2 == 0:  # odd row (1-based): parameter -lambda
                row.append((bp, ap, c))
            else:
                row.append((am, bm, c))
        table.append(row)
    return table


def turn_weight_pairs(N, params, lambdas=None):
    """(kappa_plus(lam_j), kappa_minus(lam_j)) per double row."""
    pairs = []
    for p in range(N):
        lam = params.lam if lambdas is None else lambdas[p]
        kp = mp.sin(params.xi + lam) / mp.sin(params.xi)
        km = mp.sin(params.xi - lam) / mp.sin(params.xi)
        pairs.append((kp, km))
    return pairs


def state_weight(state, params, lambdas=None, mus=None):
    """Product of all 2N*N vertex weights and the N turn weights."""
    bad = validate_state(state)
    if bad:
        raise ValueError(f"invalid state: {bad[0]}")
    N = state.N
    table = bulk_weight_table(N, params, lambdas, mus)
    kappas = turn_weight_pairs(N, params, lambdas)
    w = mp.mpf(1)
    for i in range(2 * N):
        for j in range(N):
            w *= table[i][j][WEIGHT_CLASS[state.vertex_type(i, j)]]
    for p in range(N):
        kp, km = kappas[p]
        w *= kp if state.h[2 * p][state.N] == 1 else km
    return w


@dataclass
class PathPicture:
    """Non-crossing directed path decomposition of a state.

    paths[p] is a list of edges ('h', i, c) / ('v', g, j), ordered from the
    bottom entry edge to the turn where the path terminates.
    """

    N: int
    paths: list


def to_paths(state):
    """Thick-line decomposition; asserts the path invariants."""
    N = state.N
    used_h = np.zeros_like(state.h, dtype=bool)
    used_v = np.zeros_like(state.v, dtype=bool)
    paths = []
    for j0 in range(N):
        assert state.v[2 * N][j0] == 1
        path = [("v", 2 * N, j0)]
        used_v[2 * N][j0] = True
        i, j = 2 * N - 1, j0  # vertex reached from below
        heading = "n"
        while True:
            if heading == "n":
                # entered vertex (i, j) from the south; continue east if the
                # east edge is thick, else north
                if state.h[i][j + 1] == 1:
                    edge = ("h", i, j + 1)
                    nxt = ("e", i, j + 1)
                else:
                    assert state.v[i][j] == 1, "path must continue north"
                    edge = ("v", i, j)
                    nxt = ("n", i - 1, j)
            else:
                # entered from the west; continue north if the north edge is
                # thick, else east
                if state.v[i][j] == 1:
                    edge = ("v", i, j)
                    nxt = ("n", i - 1, j)
                else:
                    assert state.h[i][j + 1] == 1, "path must continue east"
                    edge = ("h", i, j + 1)
                    nxt = ("e", i, j + 1)
            kind, a, b = edge
            if kind == "h":
                assert not used_h[a][b], "paths may not share an edge"
                used_h[a][b] = True
            else:
                assert not used_v[a][b], "paths may not share an edge"
                used_v[a][b] = True
            path.append(edge)
            heading, i, j = nxt
            if heading == "e" and j == N:
                break  # reached a turn
        paths.append(path)
    # exactly the thick edges are covered
    assert used_h.sum() == (state.h == 1).sum()
    assert used_v.sum() == (state.v == 1).sum()
    return PathPicture(N, paths)


def from_paths(picture, N=None):
    """Rebuild the LatticeState whose thick edges are the given paths."""
    N = picture.N if N is None else N
    h = np.zeros((2 * N, N + 1), dtype=np.int8)
    v = np.zeros((2 * N + 1, N), dtype=np.int8)
    for path in picture.paths:
        for kind, a, b in path:
            if kind == "h":
                h[a][b] = 1
            else:
                v[a][b] = 1
    v[2 * N, :] = 1  # bottom boundary is all-thick by construction
    return LatticeState(N, h, v)
