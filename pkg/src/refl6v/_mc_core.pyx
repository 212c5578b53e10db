# Compiled Metropolis sweep kernel.  Semantics must match _mc_core_py.sweep
# exactly (same checkerboard order, same uniform indexing, same float
# expression order) so both backends produce bit-identical trajectories.

import numpy as np

BACKEND = "compiled"


cdef inline int _vtype(int L, int R, int T, int B) nogil:
    if L != R:
        return 2
    if T == L:
        return 0
    return 1


def sweep(signed char[:, ::1] h, signed char[:, ::1] v, double[::1] uniforms,
          double[:, ::1] wlut, double kappa_plus, double kappa_minus):
    cdef int N = v.shape[1]
    cdef int n_int = (2 * N - 1) * (N - 1)
    cdef int int_prop = 0, int_acc = 0, turn_prop = 0, turn_acc = 0
    cdef int pg, pc, g, c, p, i
    cdef int ht, hb, vw, ve, hu, hl, vm
    cdef int r0, r1
    cdef double w_old, w_new, ratio, kfac
    cdef int L0, R0, T0, B0, L1, R1, T1, B1, L2, R2, T2, B2, L3, R3, T3, B3

    for pg in range(2):
        for pc in range(2):
            for g in range(pg, 2 * N - 1, 2):
                r0 = g & 1
                r1 = (g + 1) & 1
                for c in range(pc, N - 1, 2):
                    ht = h[g, c + 1]
                    hb = h[g + 1, c + 1]
                    vw = v[g + 1, c]
                    ve = v[g + 1, c + 1]
                    if ht != hb and vw != ve and ht == vw:
                        int_prop += 1
                        L0 = h[g, c]; R0 = ht; T0 = v[g, c]; B0 = vw
                        L1 = ht; R1 = h[g, c + 2]; T1 = v[g, c + 1]; B1 = ve
                        L2 = h[g + 1, c]; R2 = hb; T2 = vw; B2 = v[g + 2, c]
                        L3 = hb; R3 = h[g + 1, c + 2]; T3 = ve; B3 = v[g + 2, c + 1]
                        w_old = (wlut[r0, _vtype(L0, R0, T0, B0)]
                                 * wlut[r0, _vtype(L1, R1, T1, B1)]
                                 * wlut[r1, _vtype(L2, R2, T2, B2)]
                                 * wlut[r1, _vtype(L3, R3, T3, B3)])
                        w_new = (wlut[r0, _vtype(L0, 1 - R0, T0, 1 - B0)]
                                 * wlut[r0, _vtype(1 - L1, R1, T1, 1 - B1)]
                                 * wlut[r1, _vtype(L2, 1 - R2, 1 - T2, B2)]
                                 * wlut[r1, _vtype(1 - L3, R3, 1 - T3, B3)])
                        ratio = w_new / w_old
                        if uniforms[g * (N - 1) + c] < ratio:
                            int_acc += 1
                            h[g, c + 1] ^= 1
                            h[g + 1, c + 1] ^= 1
                            v[g + 1, c] ^= 1
                            v[g + 1, c + 1] ^= 1

    for p in range(N):
        hu = h[2 * p, N]
        hl = h[2 * p + 1, N]
        vm = v[2 * p + 1, N - 1]
        if hu != hl and vm == hu:
            turn_prop += 1
            L0 = h[2 * p, N - 1]; R0 = hu; T0 = v[2 * p, N - 1]; B0 = vm
            L1 = h[2 * p + 1, N - 1]; R1 = hl; T1 = vm; B1 = v[2 * p + 2, N - 1]
            w_old = wlut[0, _vtype(L0, R0, T0, B0)] * wlut[1, _vtype(L1, R1, T1, B1)]
            w_new = (wlut[0, _vtype(L0, 1 - R0, T0, 1 - B0)]
                     * wlut[1, _vtype(L1, 1 - R1, 1 - T1, B1)])
            if hu == 0:
                kfac = kappa_plus / kappa_minus
            else:
                kfac = kappa_minus / kappa_plus
            ratio = w_new * kfac / w_old
            if uniforms[n_int + p] < ratio:
                turn_acc += 1
                h[2 * p, N] ^= 1
                h[2 * p + 1, N] ^= 1
                v[2 * p + 1, N - 1] ^= 1

    return int_prop, int_acc, turn_prop, turn_acc
