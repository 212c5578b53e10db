"""Truncated power-series (jet) arithmetic for the determinant engine.

The kernel entering every determinant is

    psi(l, m) = c / (F(l+m) F(l-m)),     F(x) = a(x) b(x) = sin(x+2 eta) sin(x),

so a bivariate jet of psi(l+s, m+t) factorizes through univariate series in
u = s+t and w = s-t.  F has closed-form Taylor coefficients,

    F(x0+u) = [cos(2 eta) - cos(2 x0 + 2 eta + 2u)] / 2,

and its reciprocal follows from the standard power-series recurrence, which
keeps every mixed partial of psi an O(n^2) binomial double sum over two
coefficient lists instead of a symbolic expression.
"""

import mpmath as mp

_binomial_cache = {}


def binomials(n):
    """Rows 0..n of Pascal's triangle (exact ints)."""
    if n in _binomial_cache:
        return _binomial_cache[n]
    rows = [[1]]
    for i in range(1, n + 1):
        prev = rows[-1]
        rows.append([1] + [prev[k - 1] + prev[k] for k in range(1, i)] + [1])
    _binomial_cache[n] = rows
    return rows


def factorials(n):
    out = [mp.mpf(1)]
    for i in range(1, n + 1):
        out.append(out[-1] * i)
    return out


def f_series(x0, eta, order):
    """Taylor coefficients of F(x0+u) = sin(x0+u+2 eta) sin(x0+u) up to u^order."""
    theta = 2 * x0 + 2 * eta
    coeffs = [(mp.cos(2 * eta) - mp.cos(theta)) / 2]
    fact = mp.mpf(1)
    for k in range(1, order + 1):
        fact *= k
        coeffs.append(-mp.mpf(2) ** (k - 1) * mp.cos(theta + k * mp.pi / 2) / fact)
    return coeffs


def series_recip(f, order):
    """Coefficients of 1/f(u) up to u^order; f[0] must be nonzero."""
    if f[0] == 0:
        raise ZeroDivisionError("series reciprocal of a series with zero constant term")
    inv0 = 1 / f[0]
    r = [inv0]
    for k in range(1, order + 1):
        acc = mp.mpf(0)
        for i in range(1, min(k, len(f) - 1) + 1):
            acc += f[i] * r[k - i]
        r.append(-acc * inv0)
    return r


def series_mul(a, b, order):
    out = [mp.mpf(0)] * (order + 1)
    for i, ai in enumerate(a):
        if i > order:
            break
        for j, bj in enumerate(b):
            if i + j > order:
                break
            out[i + j] += ai * bj
    return out


def recip_F_derivs(x0, eta, order):
    """d^m/du^m [1/F(x0+u)] at u=0 for m = 0..order."""
    r = series_recip(f_series(x0, eta, order), order)
    fact = factorials(order)
    return [r[m] * fact[m] for m in range(order + 1)]


def psi_mixed_table(lam, mu, eta, jmax, kmax):
    """T[j][k] = d_lam^j d_mu^k psi(lam, mu) for j <= jmax, k <= kmax.

    Uses psi(lam+s, mu+t) = c * Rp(s+t) * Rq(s-t) with Rp = 1/F at lam+mu
    and Rq = 1/F at lam-mu; d_s = d_u + d_w, d_t = d_u - d_w.
    """
    order = jmax + kmax
    c = mp.sin(2 * eta)
    f = recip_F_derivs(lam + mu, eta, order)
    g = recip_F_derivs(lam - mu, eta, order)
    C = binomials(max(jmax, kmax))
    table = [[mp.mpf(0)] * (kmax + 1) for _ in range(jmax + 1)]
    for J in range(jmax + 1):
        for K in range(kmax + 1):
            acc = mp.mpf(0)
            for al in range(J + 1):
                ca = C[J][al]
                for be in range(K + 1):
                    term = ca * C[K][be] * f[al + be] * g[J + K - al - be]
                    if (K - be) % 2:
                        acc -= term
                    else:
                        acc += term
            table[J][K] = c * acc
    return table


def psi_lambda_derivs(lam, mu_arg, eta, jmax):
    """d_lam^j psi(lam, mu_arg) for j = 0..jmax (mu_arg held fixed)."""
    c = mp.sin(2 * eta)
    rp = series_recip(f_series(lam + mu_arg, eta, jmax), jmax)
    rq = series_recip(f_series(lam - mu_arg, eta, jmax), jmax)
    prod = series_mul(rp, rq, jmax)
    fact = factorials(jmax)
    return [c * prod[j] * fact[j] for j in range(jmax + 1)]


def phi_mixed_table(lam, eta, imax, kmax):
    """P[i][k] = d_lam^i d_x^k phi(lam, x)|_{x=0} where psi(lam, t) = phi(lam, t^2).

    The homogeneous limit at mu = 0 is doubly degenerate (psi is even in
    mu), so the natural column variable is x = mu^2.  Built from the full
    (s, t) coefficient table of psi(lam+s, t); odd powers of t cancel
    identically and are asserted small.
    """
    tmax = 2 * kmax
    order = imax + tmax
    c = mp.sin(2 * eta)
    r = series_recip(f_series(lam, eta, order), order)
    C = binomials(order)
    # coefficient tables of R(s+t) and R(s-t)
    T1 = [[mp.mpf(0)] * (tmax + 1) for _ in range(imax + 1)]
    T2 = [[mp.mpf(0)] * (tmax + 1) for _ in range(imax + 1)]
    for i in range(imax + 1):
        for m in range(tmax + 1):
            T1[i][m] = r[i + m] * C[i + m][i]
            T2[i][m] = T1[i][m] if m % 2 == 0 else -T1[i][m]
    conv = [[mp.mpf(0)] * (tmax + 1) for _ in range(imax + 1)]
    for i1 in range(imax + 1):
        row1 = T1[i1]
        for m1 in range(tmax + 1):
            a = row1[m1]
            if a == 0:
                continue
            for i2 in range(imax + 1 - i1):
                row2 = T2[i2]
                for m2 in range(tmax + 1 - m1):
                    conv[i1 + i2][m1 + m2] += a * row2[m2]
    fact = factorials(order)
    scale = max(abs(conv[i][m]) for i in range(imax + 1) for m in range(tmax + 1))
    for i in range(imax + 1):
        for m in range(1, tmax + 1, 2):
            assert abs(conv[i][m]) <= scale * mp.mpf(10) ** (-mp.mp.dps // 2), \
                "odd-order coefficients must cancel for the even kernel"
    P = [[mp.mpf(0)] * (kmax + 1) for _ in range(imax + 1)]
    for i in range(imax + 1):
        for k in range(kmax + 1):
            # d_x^k phi = k! [t^{2k}] psi;  d_lam^i adds i! on the s side
            P[i][k] = c * conv[i][2 * k] * fact[i] * fact[k]
    return P


class Jet2:
    """First-order bivariate jet a + s*ds + t*dt + s*t*dst (s^2 = t^2 = 0)."""

    __slots__ = ("a", "ds", "dt", "dst")

    def __init__(self, a, ds=0, dt=0, dst=0):
        self.a, self.ds, self.dt, self.dst = a, ds, dt, dst

    def __add__(self, o):
        return Jet2(self.a + o.a, self.ds + o.ds, self.dt + o.dt, self.dst + o.dst)

    def __sub__(self, o):
        return Jet2(self.a - o.a, self.ds - o.ds, self.dt - o.dt, self.dst - o.dst)

    def __mul__(self, o):
        return Jet2(
            self.a * o.a,
            self.a * o.ds + self.ds * o.a,
            self.a * o.dt + self.dt * o.a,
            self.a * o.dst + self.ds * o.dt + self.dt * o.ds + self.dst * o.a,
        )

    def __truediv__(self, o):
        inv0 = 1 / o.a
        q = self.a * inv0
        ds = (self.ds - q * o.ds) * inv0
        dt = (self.dt - q * o.dt) * inv0
        dst = (self.dst - q * o.dst - ds * o.dt - dt * o.ds) * inv0
        return Jet2(q, ds, dt, dst)

    def __neg__(self):
        return Jet2(-self.a, -self.ds, -self.dt, -self.dst)
