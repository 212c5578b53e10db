"""Pure-Python (numpy) Metropolis sweep kernel.

Same contract as the compiled kernel in _mc_core.pyx: one checkerboard pass
over all interior plaquettes (four color classes, so same-class faces share
no edge and can be updated simultaneously) followed by the N turn faces.
Face f consumes uniforms[f], with interior face (g, c) numbered
g*(N-1) + c and turn face p numbered (2N-1)*(N-1) + p, so the compiled and
pure kernels produce bit-identical trajectories from the same uniform
block.
"""

import numpy as np

BACKEND = "pure"

_grid_cache = {}


def _phase_grids(N):
    if N in _grid_cache:
        return _grid_cache[N]
    phases = []
    for pg in (0, 1):
        for pc in (0, 1):
            g = np.arange(pg, 2 * N - 1, 2, dtype=np.intp)
            c = np.arange(pc, N - 1, 2, dtype=np.intp)
            G, C = np.meshgrid(g, c, indexing="ij")
            phases.append((G.ravel(), C.ravel()))
    _grid_cache[N] = phases
    return phases


def _vtype(L, R, T, B):
    # 0 = a (all four bits equal), 1 = b (straight), 2 = c (corner)
    return np.where(L != R, 2, np.where(T == L, 0, 1))


def sweep(h, v, uniforms, wlut, kappa_plus, kappa_minus):
    """One Metropolis pass; mutates h and v in place.

    wlut[p][t] is the weight of a type-t vertex (0=a, 1=b, 2=c) in a row of
    parity p (0-based row index mod 2).  Returns (interior proposed,
    interior accepted, turn proposed, turn accepted); proposed counts the
    faces whose edges form a reversible oriented cycle.
    """
    N = v.shape[1]
    n_int = (2 * N - 1) * (N - 1)
    int_prop = int_acc = turn_prop = turn_acc = 0

    for G, C in _phase_grids(N):
        if G.size == 0:
            continue
        ht = h[G, C + 1]
        hb = h[G + 1, C + 1]
        vw = v[G + 1, C]
        ve = v[G + 1, C + 1]
        flippable = (ht != hb) & (vw != ve) & (ht == vw)
        if not flippable.any():
            int_prop += 0
            continue
        pg = (G % 2).astype(np.intp)
        pg1 = ((G + 1) % 2).astype(np.intp)

        L0, R0, T0, B0 = h[G, C], ht, v[G, C], vw
        L1, R1, T1, B1 = ht, h[G, C + 2], v[G, C + 1], ve
        L2, R2, T2, B2 = h[G + 1, C], hb, vw, v[G + 2, C]
        L3, R3, T3, B3 = hb, h[G + 1, C + 2], ve, v[G + 2, C + 1]

        w_old = (
            wlut[pg, _vtype(L0, R0, T0, B0)]
            * wlut[pg, _vtype(L1, R1, T1, B1)]
            * wlut[pg1, _vtype(L2, R2, T2, B2)]
            * wlut[pg1, _vtype(L3, R3, T3, B3)]
        )
        w_new = (
            wlut[pg, _vtype(L0, 1 - R0, T0, 1 - B0)]
            * wlut[pg, _vtype(1 - L1, R1, T1, 1 - B1)]
            * wlut[pg1, _vtype(L2, 1 - R2, 1 - T2, B2)]
            * wlut[pg1, _vtype(1 - L3, R3, 1 - T3, B3)]
        )
        ratio = w_new / w_old
        u = uniforms[G * (N - 1) + C]
        accept = flippable & (u < ratio)
        int_prop += int(flippable.sum())
        na = int(accept.sum())
        int_acc += na
        if na:
            Ga, Ca = G[accept], C[accept]
            h[Ga, Ca + 1] ^= 1
            h[Ga + 1, Ca + 1] ^= 1
            v[Ga + 1, Ca] ^= 1
            v[Ga + 1, Ca + 1] ^= 1

    P = np.arange(N, dtype=np.intp)
    hu = h[2 * P, N]
    hl = h[2 * P + 1, N]
    vm = v[2 * P + 1, N - 1]
    flippable = (hu != hl) & (vm == hu)
    Lu, Ru, Tu, Bu = h[2 * P, N - 1], hu, v[2 * P, N - 1], vm
    Ll, Rl, Tl, Bl = h[2 * P + 1, N - 1], hl, vm, v[2 * P + 2, N - 1]
    w_old = wlut[0, _vtype(Lu, Ru, Tu, Bu)] * wlut[1, _vtype(Ll, Rl, Tl, Bl)]
    w_new = wlut[0, _vtype(Lu, 1 - Ru, Tu, 1 - Bu)] * wlut[1, _vtype(Ll, 1 - Rl, 1 - Tl, Bl)]
    kfac = np.where(hu == 0, kappa_plus / kappa_minus, kappa_minus / kappa_plus)
    ratio = w_new * kfac / w_old
    u = uniforms[n_int + P]
    accept = flippable & (u < ratio)
    turn_prop = int(flippable.sum())
    turn_acc = int(accept.sum())
    if turn_acc:
        Pa = P[accept]
        h[2 * Pa, N] ^= 1
        h[2 * Pa + 1, N] ^= 1
        v[2 * Pa + 1, N - 1] ^= 1

    return int_prop, int_acc, turn_prop, turn_acc


def face_ratio(h, v, wlut, kappa_plus, kappa_minus, kind, a, c=0):
    """(flippable, Metropolis ratio) of one face; diagnostic for tests.

    kind 'interior' addresses face (a=g, c); kind 'turn' addresses turn a.
    Uses the same vectorized expressions as sweep on singleton arrays.
    """
    N = v.shape[1]
    if kind == "interior":
        G = np.array([a], dtype=np.intp)
        C = np.array([c], dtype=np.intp)
        ht, hb = h[G, C + 1], h[G + 1, C + 1]
        vw, ve = v[G + 1, C], v[G + 1, C + 1]
        flippable = bool(((ht != hb) & (vw != ve) & (ht == vw))[0])
        pg = (G % 2).astype(np.intp)
        pg1 = ((G + 1) % 2).astype(np.intp)
        L0, R0, T0, B0 = h[G, C], ht, v[G, C], vw
        L1, R1, T1, B1 = ht, h[G, C + 2], v[G, C + 1], ve
        L2, R2, T2, B2 = h[G + 1, C], hb, vw, v[G + 2, C]
        L3, R3, T3, B3 = hb, h[G + 1, C + 2], ve, v[G + 2, C + 1]
        w_old = (
            wlut[pg, _vtype(L0, R0, T0, B0)]
            * wlut[pg, _vtype(L1, R1, T1, B1)]
            * wlut[pg1, _vtype(L2, R2, T2, B2)]
            * wlut[pg1, _vtype(L3, R3, T3, B3)]
        )
        w_new = (
            wlut[pg, _vtype(L0, 1 - R0, T0, 1 - B0)]
            * wlut[pg, _vtype(1 - L1, R1, T1, 1 - B1)]
            * wlut[pg1, _vtype(L2, 1 - R2, 1 - T2, B2)]
            * wlut[pg1, _vtype(1 - L3, R3, 1 - T3, B3)]
        )
        return flippable, float((w_new / w_old)[0])
    if kind == "turn":
        P = np.array([a], dtype=np.intp)
        hu, hl = h[2 * P, N], h[2 * P + 1, N]
        vm = v[2 * P + 1, N - 1]
        flippable = bool(((hu != hl) & (vm == hu))[0])
        Lu, Ru, Tu, Bu = h[2 * P, N - 1], hu, v[2 * P, N - 1], vm
        Ll, Rl, Tl, Bl = h[2 * P + 1, N - 1], hl, vm, v[2 * P + 2, N - 1]
        w_old = wlut[0, _vtype(Lu, Ru, Tu, Bu)] * wlut[1, _vtype(Ll, Rl, Tl, Bl)]
        w_new = wlut[0, _vtype(Lu, 1 - Ru, Tu, 1 - Bu)] * wlut[1, _vtype(Ll, 1 - Rl, 1 - Tl, Bl)]
        kfac = np.where(hu == 0, kappa_plus / kappa_minus, kappa_minus / kappa_plus)
        return flippable, float((w_new * kfac / w_old)[0])
    raise ValueError(f"unknown face kind {kind!r}")
