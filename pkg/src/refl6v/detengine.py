"""High-precision determinant evaluation of the partition function.

Three evaluation routes, all reducing to the same Tsuchiya determinant:

  * tsuchiya_Z: the inhomogeneous N x N determinant, for pairwise distinct
    spectral parameters.
  * tau_N / homogeneous_Z: the homogeneous limit, where the determinant
    degenerates into tau_N = det[d_lam^{j-1} d_mu^{k-1} psi] and the
    Vandermonde factors of the limit cancel against the prefactor, leaving
    C_N = (prod_{j<N} j!)^2 and the [-a(2 lam) b(2 mu)]^{N(N-1)/2} power.
    At mu = 0 that limit is doubly degenerate (psi is even in mu) and the
    column variable becomes x = mu^2.
  * the free-fermion point eta = pi/4, where psi(l, m) = 4/(S(l) - S(m))
    with S(x) = sin^2(2x) makes the determinant a Cauchy determinant and the
    whole partition function factorizes in closed form.  The closed form is
    regular at coincident parameters and at lam = pi/4, where the generic
    prefactors develop 0/0; the engine dispatches to it automatically.

Default precision: max(50, 12*N) decimal digits.  The determinant matrices
are Hankel-like and severely ill-conditioned, so derivatives needed by the
Toda checks come from one-order-higher jets, never finite differences.
"""

from dataclasses import dataclass

import mpmath as mp

from .params import OutOfRegimeError, a_weight, b_weight, c_weight
from .jets import (
    Jet2,
    factorials,
    psi_mixed_table,
    psi_lambda_derivs,
    phi_mixed_table,
)


class SingularPrefactorError(ValueError):
    """Coinciding spectral parameters; use homogeneous_Z instead."""


def default_dps(N):
    return max(50, 12 * N)


def det_full_pivot(rows):
    """Determinant by Gaussian elimination with full pivoting (mpf entries)."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    det = mp.mpf(1)
    for k in range(n):
        pr, pc, best = k, k, abs(m[k][k])
        for i in range(k, n):
            for j in range(k, n):
                v = abs(m[i][j])
                if v > best:
                    pr, pc, best = i, j, v
        if best == 0:
            return mp.mpf(0)
        if pr != k:
            m[k], m[pr] = m[pr], m[k]
            sign = -sign
        if pc != k:
            for i in range(n):
                m[i][k], m[i][pc] = m[i][pc], m[i][k]
            sign = -sign
        piv = m[k][k]
        det *= piv
        inv = 1 / piv
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f == 0:
                continue
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] -= f * row_k[j]
    return det * sign


def det_jet2(rows):
    """Determinant over the ring of first-order bivariate jets."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    det = Jet2(mp.mpf(1))
    for k in range(n):
        pr, pc, best = k, k, abs(m[k][k].a)
        for i in range(k, n):
            for j in range(k, n):
                v = abs(m[i][j].a)
                if v > best:
                    pr, pc, best = i, j, v
        if best == 0:
            return Jet2(mp.mpf(0))
        if pr != k:
            m[k], m[pr] = m[pr], m[k]
            sign = -sign
        if pc != k:
            for i in range(n):
                m[i][k], m[i][pc] = m[i][pc], m[i][k]
            sign = -sign
        piv = m[k][k]
        det = det * piv
        for i in range(k + 1, n):
            f = m[i][k] / piv
            for j in range(k + 1, n):
                m[i][j] = m[i][j] - f * m[k][j]
    if sign < 0:
        det = -det
    return det


def psi_value(lam, mu, eta):
    ap = a_weight(lam + mu, eta)
    am = a_weight(lam - mu, eta)
    bp = b_weight(lam + mu, eta)
    bm = b_weight(lam - mu, eta)
    return c_weight(eta) / (ap * am * bp * bm)


def _kappa_minus(x, xi):
    return mp.sin(xi - x) / mp.sin(xi)


def tsuchiya_Z(lambdas, mus, params, dps=None):
    """Inhomogeneous partition function via the Tsuchiya determinant."""
    N = len(lambdas)
    if len(mus) != N:
        raise ValueError("need equally many row and column parameters")
    dps = dps or default_dps(N)
    with mp.workdps(dps):
        lambdas = [mp.mpf(x) for x in lambdas]
        mus = [mp.mpf(x) for x in mus]
        eta, xi = params.eta, params.xi
        tol = mp.mpf(10) ** (-dps // 2)
        for vals, kind in ((lambdas, "lambda"), (mus, "mu")):
            for i in range(N):
                for j in range(i + 1, N):
                    if abs(vals[i] - vals[j]) < tol:
                        raise SingularPrefactorError(
                            f"coinciding {kind} parameters; use homogeneous_Z"
                        )
        num = mp.mpf(1)
        for l in lambdas:
            for m in mus:
                num *= (
                    a_weight(l + m, eta) * a_weight(l - m, eta)
                    * b_weight(l + m, eta) * b_weight(l - m, eta)
                )
        den = mp.mpf(1)
        for j in range(N):
            for k in range(j):
                den *= a_weight(lambdas[j] + lambdas[k], eta) * b_weight(
                    lambdas[j] - lambdas[k], eta
                )
        for a in range(N):
            for b in range(a + 1, N):
                den *= b_weight(mus[a] + mus[b], eta) * b_weight(mus[a] - mus[b], eta)
        pre = mp.mpf(1)
        for j in range(N):
            pre *= b_weight(2 * lambdas[j], eta) * _kappa_minus(mus[j], xi)
        M = [[psi_value(l, m, eta) for m in mus] for l in lambdas]
        return num / den * pre * det_full_pivot(M)


def freefermion_Z(lambdas, mus, xi, dps=None):
    """Exact factorized partition function at eta = pi/4.

    At the free-fermion point psi is a Cauchy kernel in sin^2(2x) and the
    Tsuchiya determinant evaluates in closed form:

        Z = prod_j sin(2 l_j) kappa_-(m_j)
            * prod_{k<j} sin(l_j + l_k) cos(l_j - l_k)
            * prod_{a<b} cos(m_a + m_b) cos(m_a - m_b).

    Regular at coincident parameters and at l_j = pi/4.
    """
    N = len(lambdas)
    dps = dps or default_dps(N)
    with mp.workdps(dps):
        lambdas = [mp.mpf(x) for x in lambdas]
        mus = [mp.mpf(x) for x in mus]
        z = mp.mpf(1)
        for j in range(N):
            z *= mp.sin(2 * lambdas[j]) * _kappa_minus(mus[j], xi)
        for j in range(N):
            for k in range(j):
                z *= mp.sin(lambdas[j] + lambdas[k]) * mp.cos(lambdas[j] - lambdas[k])
        for a in range(N):
            for b in range(a + 1, N):
                z *= mp.cos(mus[a] + mus[b]) * mp.cos(mus[a] - mus[b])
        return z


def tau_table(N, lam, mu, eta, extra=0):
    """Mixed-derivative table of psi large enough for tau_1..tau_N (+jets)."""
    return psi_mixed_table(lam, mu, eta, N - 1 + extra, N - 1 + extra)


def tau_N(N, lam, mu, eta=None, dps=None):
    """tau_N = det[d_lam^{j-1} d_mu^{k-1} psi(lam, mu)]."""
    eta = mp.pi / 4 if eta is None else eta
    dps = dps or default_dps(N)
    with mp.workdps(dps):
        lam, mu, eta = mp.mpf(lam), mp.mpf(mu), mp.mpf(eta)
        T = tau_table(N, lam, mu, eta)
        return det_full_pivot([[T[j][k] for k in range(N)] for j in range(N)])


def tau_tilde_N(N, lam, mu, omega, eta=None, dps=None):
    """tau_N with the last column replaced by d_lam^{j-1} psi(lam, mu+omega)."""
    eta = mp.pi / 4 if eta is None else eta
    dps = dps or default_dps(N)
    with mp.workdps(dps):
        lam, mu, omega, eta = mp.mpf(lam), mp.mpf(mu), mp.mpf(omega), mp.mpf(eta)
        T = tau_table(N, lam, mu, eta)
        H = psi_lambda_derivs(lam, mu + omega, eta, N - 1)
        rows = [[T[j][k] for k in range(N - 1)] + [H[j]] for j in range(N)]
        return det_full_pivot(rows)


@dataclass
class TauSequence:
    """tau_1..tau_N and tau~_1..tau~_N from one derivative table."""

    N_max: int
    lam: mp.mpf
    mu: mp.mpf
    eta: mp.mpf
    omega: mp.mpf
    tau: list
    tau_tilde: list
    C: list  # C_N = (prod_{j=0}^{N-1} j!)^2
    precision: int

    def S(self, N):
        """Determinant ratio tau~_N / tau_N."""
        return self.tau_tilde[N - 1] / self.tau[N - 1]


def tau_sequence(N_max, lam, mu, eta=None, omega=None, dps=None):
    eta = mp.pi / 4 if eta is None else eta
    omega = mp.mpf(0) if omega is None else omega
    dps = dps or default_dps(N_max)
    with mp.workdps(dps):
        lam, mu, eta, omega = mp.mpf(lam), mp.mpf(mu), mp.mpf(eta), mp.mpf(omega)
        T = tau_table(N_max, lam, mu, eta)
        H = psi_lambda_derivs(lam, mu + omega, eta, N_max - 1)
        taus, tilded = [], []
        for n in range(1, N_max + 1):
            taus.append(det_full_pivot([[T[j][k] for k in range(n)] for j in range(n)]))
            tilded.append(
                det_full_pivot([[T[j][k] for k in range(n - 1)] + [H[j]] for j in range(n)])
            )
        fact = factorials(N_max)
        C = []
        prod = mp.mpf(1)
        for j in range(N_max):
            if j > 0:
                prod *= fact[j]
            C.append(prod * prod)
        return TauSequence(
            N_max=N_max, lam=lam, mu=mu, eta=eta, omega=omega,
            tau=taus, tau_tilde=tilded, C=C, precision=dps,
        )


def toda_residuals(N, lam, mu, eta=None, omega=None, dps=None):
    """Relative residuals of the bilinear recursions at size N.

    First: tau_{N+1} tau_{N-1} = tau_N d_lam d_mu tau_N - d_lam tau_N d_mu tau_N.
    Second: tau~_{N+1} tau_{N-1} = d_lam tau~_N tau_N - tau~_N d_lam tau_N.
    Derivatives of the determinants come from jet-valued elimination over
    one-order-higher derivative tables.
    """
    eta = mp.pi / 4 if eta is None else eta
    omega = mp.mpf("0.1") if omega is None else mp.mpf(omega)
    if omega == 0:
        raise OutOfRegimeError(
            "omega = 0 duplicates a column of the shifted determinant; "
            "the tilde recursion degenerates"
        )
    dps = dps or default_dps(N + 1)
    with mp.workdps(dps):
        lam, mu, eta, omega = mp.mpf(lam), mp.mpf(mu), mp.mpf(eta), mp.mpf(omega)
        T = psi_mixed_table(lam, mu, eta, N + 1, N + 1)
        H = psi_lambda_derivs(lam, mu + omega, eta, N + 1)

        def plain(n):
            return det_full_pivot([[T[j][k] for k in range(n)] for j in range(n)])

        def plain_tilde(n):
            return det_full_pivot(
                [[T[j][k] for k in range(n - 1)] + [H[j]] for j in range(n)]
            )

        tau_m1 = plain(N - 1) if N > 1 else mp.mpf(1)
        tau_p1 = plain(N + 1)
        jet = det_jet2(
            [
                [Jet2(T[j][k], T[j + 1][k], T[j][k + 1], T[j + 1][k + 1]) for k in range(N)]
                for j in range(N)
            ]
        )
        lhs = tau_p1 * tau_m1
        rhs = jet.a * jet.dst - jet.ds * jet.dt
        res_toda = abs(lhs - rhs) / max(abs(lhs), abs(rhs))

        tilde_p1 = plain_tilde(N + 1)
        jet_t = det_jet2(
            [
                [Jet2(T[j][k], T[j + 1][k]) for k in range(N - 1)]
                + [Jet2(H[j], H[j + 1])]
                for j in range(N)
            ]
        )
        lhs_t = tilde_p1 * tau_m1
        rhs_t = jet_t.ds * jet.a - jet_t.a * jet.ds
        res_toda_t = abs(lhs_t - rhs_t) / max(abs(lhs_t), abs(rhs_t))
        return res_toda, res_toda_t


def _hom_prefactor_sign(N):
    """Parity of the (-1)^{N(N-1)/2} in the homogeneous prefactor."""
    return -1 if (N * (N - 1) // 2) % 2 else 1


def homogeneous_Z(N, params, dps=None):
    """Homogeneous-limit partition function Z_N(lam, mu).

    Dispatch: free-fermion point -> closed factorized form; mu = 0 -> even
    (x = mu^2) jet determinant; otherwise the generic tau_N formula.  The
    in-regime result is asserted positive; the negative prefactor base is
    compensated by the sign carried by tau_N.
    """
    dps = dps or default_dps(N)
    with mp.workdps(dps):
        lam, mu, eta, xi = params.lam, params.mu, params.eta, params.xi
        if params.free_fermion:
            return freefermion_Z([lam] * N, [mu] * N, xi, dps=dps)
        m = N * (N - 1) // 2
        CN = mp.mpf(1)
        fact = factorials(N)
        for j in range(1, N):
            CN *= fact[j]
        CN = CN * CN
        if mu == 0:
            if abs(a_weight(2 * lam, eta)) < mp.mpf(10) ** (-dps // 2):
                raise OutOfRegimeError("a(2 lam) = 0: prefactor degenerates; no closed route")
            P = phi_mixed_table(lam, eta, N - 1, N - 1)
            detD = det_full_pivot([[P[j][k] for k in range(N)] for j in range(N)])
            ab = a_weight(lam, eta) * b_weight(lam, eta)
            z = (
                ab ** (2 * N * N) * b_weight(2 * lam, eta) ** N * detD
                / (CN * _hom_prefactor_sign(N) * a_weight(2 * lam, eta) ** m)
            )
        else:
            tau = tau_N(N, lam, mu, eta, dps=dps)
            A = psi_value(lam, mu, eta)  # c / A_prod
            Aprod = c_weight(eta) / A
            z = (
                Aprod ** (N * N)
                * (b_weight(2 * lam, eta) * _kappa_minus(mu, xi)) ** N
                * tau
                / (
                    CN
                    * _hom_prefactor_sign(N)
                    * a_weight(2 * lam, eta) ** m
                    * b_weight(2 * mu, eta) ** m
                )
            )
        if not z > 0:
            raise ArithmeticError(f"homogeneous Z came out non-positive: {mp.nstr(z, 10)}")
        return z


def partial_inhom_Z(N, params, omega=None, dps=None):
    """Z_N(lam, mu, omega): column N carries mu + omega, the rest mu.

    mu != 0 uses the determinant-ratio route S_N = tau~_N / tau_N against
    homogeneous_Z; mu = 0 uses the even-limit jet determinant; the
    free-fermion point uses the closed factorized form.
    """
    omega = params.omega if omega is None else mp.mpf(omega)
    dps = dps or default_dps(N)
    with mp.workdps(dps):
        lam, mu, eta, xi = params.lam, params.mu, params.eta, params.xi
        if params.free_fermion:
            return freefermion_Z([lam] * N, [mu] * (N - 1) + [mu + omega], xi, dps=dps)
        if omega == 0:
            return homogeneous_Z(N, params, dps=dps)
        m = N * (N - 1) // 2
        fact = factorials(N)
        CN = mp.mpf(1)
        for j in range(1, N):
            CN *= fact[j]
        CN = CN * CN
        if mu == 0:
            if abs(a_weight(2 * lam, eta)) < mp.mpf(10) ** (-dps // 2):
                raise OutOfRegimeError("a(2 lam) = 0: prefactor degenerates; no closed route")
            P = phi_mixed_table(lam, eta, N - 1, N - 2 if N > 1 else 0)
            H = psi_lambda_derivs(lam, omega, eta, N - 1)
            rows = [[P[j][k] for k in range(N - 1)] + [H[j]] for j in range(N)]
            detDt = det_full_pivot(rows)
            ab = a_weight(lam, eta) * b_weight(lam, eta)
            Aom = (
                a_weight(lam + omega, eta) * a_weight(lam - omega, eta)
                * b_weight(lam + omega, eta) * b_weight(lam - omega, eta)
            )
            return (
                fact[N - 1]
                * ab ** (2 * N * (N - 1))
                * Aom ** N
                * b_weight(2 * lam, eta) ** N
                * _kappa_minus(omega, xi)
                * detDt
                / (
                    CN
                    * _hom_prefactor_sign(N)
                    * a_weight(2 * lam, eta) ** m
                    * b_weight(omega, eta) ** (2 * (N - 1))
                )
            )
        Zh = homogeneous_Z(N, params, dps=dps)
        tau = tau_N(N, lam, mu, eta, dps=dps)
        tilde = tau_tilde_N(N, lam, mu, omega, eta, dps=dps)
        S = tilde / tau
        Amu = c_weight(eta) / psi_value(lam, mu, eta)
        Aom = c_weight(eta) / psi_value(lam, mu + omega, eta)
        ratio = (
            fact[N - 1]
            / b_weight(omega, eta) ** (N - 1)
            * _kappa_minus(mu + omega, xi) / _kappa_minus(mu, xi)
            * (b_weight(2 * mu, eta) / b_weight(2 * mu + omega, eta)) ** (N - 1)
            * (Aom / Amu) ** N
            * S
        )
        return Zh * ratio


def hN_determinant(N, lam, omega, dps=None):
    """h_N at z = gamma(omega) from the exact finite-N combination

        [a(w) Z_N(l, w) - b(w) Z_N(l, pi/2 - w)] / [a(2w) Z_N(l)]
            / [a(l+w) b(l-w) / (a(l) b(l))]^{N-1}

    at the free-fermion point (eta = pi/4, mu = 0, xi = pi/2), where the
    three partition functions have exact factorized values, regular at
    lam = pi/4.
    """
    dps = dps or default_dps(N)
    with mp.workdps(dps):
        lam, omega = mp.mpf(lam), mp.mpf(omega)
        if not (0 < lam <= mp.pi / 4 + mp.mpf("1e-12")):
            raise OutOfRegimeError("need 0 < lam <= pi/4")
        if not abs(omega) < lam:
            raise OutOfRegimeError("need |omega| < lam")
        a2w = mp.cos(2 * omega)
        if abs(a2w) < mp.mpf(10) ** (-dps // 2):
            raise SingularPrefactorError("a(2 omega) = 0: combination is singular")
        xi = mp.pi / 2
        Z0 = freefermion_Z([lam] * N, [mp.mpf(0)] * N, xi, dps=dps)
        Zw = freefermion_Z([lam] * N, [mp.mpf(0)] * (N - 1) + [omega], xi, dps=dps)
        Zc = freefermion_Z([lam] * N, [mp.mpf(0)] * (N - 1) + [mp.pi / 2 - omega], xi, dps=dps)
        lhs = (mp.cos(omega) * Zw - mp.sin(omega) * Zc) / (a2w * Z0)
        scale = (mp.cos(lam + omega) * mp.sin(lam - omega) / (mp.cos(lam) * mp.sin(lam))) ** (
            N - 1
        )
        return lhs / scale
