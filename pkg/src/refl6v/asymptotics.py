"""Closed-form asymptotics and the tangent method at the free-fermion point.

Throughout, a(x) = cos(x) and b(x) = sin(x) (free-fermion weights), and the
boundary parameter is xi = pi/2 so that kappa_pm = cos.  The map between
the generating-variable z and the column shift omega is

    gamma(omega) = a(l-w) b(l+w) / (a(l+w) b(l-w))
                 = (sin 2l + sin 2w) / (sin 2l - sin 2w),

a monotone bijection (-l, l) -> (0, inf).  The large-N rate of the
generating polynomial h_N along gamma is

    rate(w) = log[ a(w)^2 a(l) b(l) / (a(l+w) b(l-w)) ],

v(z) is its z-derivative, and the north-west arctic curve is the envelope
of the tangent-line family with slope 2 sqrt(z)/(1-z) and intercept
2 (1 - z v(z)).  In the omega parametrization the curve is
x = 1 - cos(2w), y = 1 - sin(2w), the west half of the unit circle centered
at (1, 1); the south-west half follows by the y -> 2-y reflection.
"""

import warnings
from dataclasses import dataclass

import mpmath as mp

from .params import OutOfRegimeError, special_point
from .jets import binomials
from .enumeration import enumerate_correlations, enumerate_extended

STENCIL_DPS = 40
FD_STEP = mp.mpf("1e-4")  # central-difference step in omega, away from endpoints

# 5-point central stencils
_D1 = (1, -8, 0, 8, -1)     # / (12 h)
_D2 = (-1, 16, -30, 16, -1)  # / (12 h^2)


def _check_domain(omega, lam):
    if not abs(omega) < lam:
        raise OutOfRegimeError(f"need |omega| < lam, got omega={omega}, lam={lam}")


def gamma_map(omega, lam):
    """z = gamma(omega); warns near the domain edges where z -> 0 or inf."""
    with mp.workdps(STENCIL_DPS):
        omega, lam = mp.mpf(omega), mp.mpf(lam)
        _check_domain(omega, lam)
        if lam - abs(omega) < mp.mpf("1e-9"):
            warnings.warn("omega at the domain edge: gamma has a zero/pole there")
        S, s = mp.sin(2 * lam), mp.sin(2 * omega)
        return (S + s) / (S - s)


def gamma_inverse(z, lam):
    """omega with gamma(omega) = z, for z > 0 (single monotone branch)."""
    with mp.workdps(STENCIL_DPS):
        z, lam = mp.mpf(z), mp.mpf(lam)
        if not z > 0:
            raise OutOfRegimeError("gamma image is z > 0")
        return mp.asin(mp.sin(2 * lam) * (z - 1) / (z + 1)) / 2


def h_rate(omega, lam):
    """Large-N rate of log h_N[gamma(omega)] per double row."""
    with mp.workdps(STENCIL_DPS):
        omega, lam = mp.mpf(omega), mp.mpf(lam)
        _check_domain(omega, lam)
        return mp.log(
            mp.cos(omega) ** 2 * mp.cos(lam) * mp.sin(lam)
            / (mp.cos(lam + omega) * mp.sin(lam - omega))
        )


def _rate_raw(omega, lam):
    return mp.log(
        mp.cos(omega) ** 2 * mp.cos(lam) * mp.sin(lam)
        / (mp.cos(lam + omega) * mp.sin(lam - omega))
    )


def _gamma_raw(omega, lam):
    S, s = mp.sin(2 * lam), mp.sin(2 * omega)
    return (S + s) / (S - s)


def _fd_step(omega, lam):
    # the rate has log singularities at omega = +-lam; shrink the stencil
    # near them so the h^4 truncation term stays below ~1e-7
    delta = min(abs(lam - omega), abs(lam + omega))
    return min(FD_STEP, delta / 50)


def _omega_derivs(omega, lam):
    """(R', R'', g', g'') of the rate and gamma at omega, 5-point stencils."""
    h = _fd_step(omega, lam)
    rs = [_rate_raw(omega + k * h, lam) for k in (-2, -1, 0, 1, 2)]
    gs = [_gamma_raw(omega + k * h, lam) for k in (-2, -1, 0, 1, 2)]
    r1 = sum(c * v for c, v in zip(_D1, rs)) / (12 * h)
    r2 = sum(c * v for c, v in zip(_D2, rs)) / (12 * h * h)
    g1 = sum(c * v for c, v in zip(_D1, gs)) / (12 * h)
    g2 = sum(c * v for c, v in zip(_D2, gs)) / (12 * h * h)
    return r1, r2, g1, g2


def v_func(z, lam):
    """v(z) = d/dz of the h-rate, by chain rule through omega."""
    with mp.workdps(STENCIL_DPS):
        omega = gamma_inverse(z, lam)
        r1, _, g1, _ = _omega_derivs(omega, mp.mpf(lam))
        return r1 / g1


def v_prime(z, lam):
    """dv/dz, one more chain-rule order."""
    with mp.workdps(STENCIL_DPS):
        omega = gamma_inverse(z, lam)
        r1, r2, g1, g2 = _omega_derivs(omega, mp.mpf(lam))
        return (r2 * g1 - r1 * g2) / g1 ** 3


def v_closed(z):
    """Closed form of v at lam = pi/4: 1/(sqrt(z) (1 + sqrt(z)))."""
    with mp.workdps(STENCIL_DPS):
        z = mp.mpf(z)
        return 1 / (mp.sqrt(z) * (1 + mp.sqrt(z)))


def contact_point(lam):
    """(kappa, theta''(1)): contact height of the curve on the left boundary.

    kappa = 2 - 2 z v(z) at the degenerate saddle z0 = 1; theta''(1) must be
    positive for the steepest-descent contour through z0 = 1 to be
    admissible.
    """
    with mp.workdps(STENCIL_DPS):
        v1 = v_func(mp.mpf(1), lam)
        kappa = 2 - 2 * v1
        vp1 = v_prime(mp.mpf(1), lam)
        theta2 = vp1 + v1  # theta'' at z=1 with y = kappa
        if not theta2 > 0:
            raise ArithmeticError(f"saddle at z=1 not admissible: theta''={mp.nstr(theta2, 8)}")
        return kappa, theta2


def theta_exponent(z, y, lam):
    """Saddle exponent of the cumulative-correlation integral at height y."""
    with mp.workdps(STENCIL_DPS):
        z = mp.mpf(z)
        omega = gamma_inverse(z, lam)
        return _rate_raw(omega, lam) + (mp.mpf(y) - 2) / 2 * mp.log(z)


@dataclass
class SaddlePoint:
    z: float
    u: float
    chi0: float
    zeta0: float
    branch: int  # +1 for z < 1, -1 for z > 1
    res_chi: float
    res_zeta: float


def saddle_pair(z, u=1.0):
    """Stationary point (chi0, zeta0) of the extended-lattice exponent.

    chi0 = +-u sqrt(z)/(1-z), zeta0 = +-2u sqrt(z)/(1 +- sqrt(z)), signs
    taken together so that both come out positive: plus branch for z < 1,
    minus for z > 1.
    """
    with mp.workdps(STENCIL_DPS):
        z, u = mp.mpf(z), mp.mpf(u)
        if not (z > 0 and u > 0):
            raise OutOfRegimeError("need z > 0 and u > 0")
        if z == 1:
            raise OutOfRegimeError("z = 1: saddle degenerates (contact point)")
        sq = mp.sqrt(z)
        sign = 1 if z < 1 else -1
        chi0 = sign * u * sq / (1 - z)
        zeta0 = sign * 2 * u * sq / (1 + sign * sq)
        assert chi0 > 0 and zeta0 > 0
        # stationarity residuals; the chi equation is squared to stay real
        # on both branches
        res_chi = mp.log((2 * chi0 / (2 * chi0 - zeta0)) ** 2) + mp.log(z)
        res_zeta = mp.log(2 * (2 * chi0 - zeta0) * (u - zeta0) / zeta0 ** 2)
        return SaddlePoint(
            z=float(z), u=float(u), chi0=float(chi0), zeta0=float(zeta0),
            branch=sign, res_chi=float(res_chi), res_zeta=float(res_zeta),
        )


@dataclass
class TangentLine:
    """Line y = slope*x + 2*chi crossing (-u, 0) and (0, 2*chi)."""

    z: float
    u: float
    chi: float
    slope: float

    @property
    def intercept(self):
        return 2 * self.chi

    def evaluate(self, x, y):
        """U_u(x, y; z) = y - slope*x - 2*chi."""
        return y - self.slope * x - 2 * self.chi


def tangent_family(z, lam=None, u=None):
    """Tangent line of parameter z in (0, 1) (north-west portion).

    The intercept is 2 chi0 with chi0 = 1 - z v(z) from the saddle of the
    generating-function integral; the slope 2 sqrt(z)/(1-z) then fixes
    u = 2 chi0 / slope.  The slope diverges as z -> 1.
    """
    with mp.workdps(STENCIL_DPS):
        z = mp.mpf(z)
        lam = mp.pi / 4 if lam is None else mp.mpf(lam)
        if not 0 < z < 1:
            raise OutOfRegimeError("north-west tangent lines have z in (0, 1)")
        if 1 - z < mp.mpf("1e-9"):
            warnings.warn("z -> 1: tangent-line slope diverges at the contact point")
        chi0 = 1 - z * v_func(z, lam)
        slope = 2 * mp.sqrt(z) / (1 - z)
        u_impl = 2 * chi0 / slope
        if u is not None and abs(mp.mpf(u) - u_impl) > mp.mpf("1e-6"):
            warnings.warn("supplied u is inconsistent with the envelope value; using it anyway")
        return TangentLine(z=float(z), u=float(u if u is not None else u_impl),
                           chi=float(chi0), slope=float(slope))


@dataclass
class CurveSample:
    x: float
    y: float
    parameter: float  # omega for analytic samples, z for envelope samples
    source: str       # 'analytic' | 'envelope' | 'mc'


def curve_closed_form(omega):
    """North-west arc in closed form: (1 - cos 2w, 1 - sin 2w), w in (-pi/4, 0)."""
    with mp.workdps(STENCIL_DPS):
        omega = mp.mpf(omega)
        return float(1 - mp.cos(2 * omega)), float(1 - mp.sin(2 * omega))


def _chebyshev_grid(a, b, n):
    pts = []
    with mp.workdps(STENCIL_DPS):
        a, b = mp.mpf(a), mp.mpf(b)
        for k in range(n):
            x = mp.cos(mp.pi * (2 * k + 1) / (2 * n))
            pts.append((a + b) / 2 + (b - a) / 2 * x)
    return pts


def envelope_point(z, lam=None):
    """Parametric curve point from the envelope of the tangent family."""
    with mp.workdps(STENCIL_DPS):
        z = mp.mpf(z)
        lam = mp.pi / 4 if lam is None else mp.mpf(lam)
        v = v_func(z, lam)
        vp = v_prime(z, lam)
        x = 2 * mp.sqrt(z) * (1 - z) ** 2 * (v + z * vp) / (1 + z)
        y = (2 * (1 + z) + 2 * z * (1 - 3 * z) * v + 4 * z * z * (1 - z) * vp) / (1 + z)
        return float(x), float(y)


def arctic_curve(n_points=200, lam=None, include_sw=True, clip=mp.mpf("1e-3")):
    """Envelope samples of the arctic curve on a Chebyshev omega-grid.

    omega runs over (-pi/4 + clip, -clip); the exact contact points
    (0, 1) (omega -> 0) and (1, 2) (omega -> -pi/4) are appended
    analytically.  The south-west portion is the y -> 2 - y reflection.
    """
    with mp.workdps(STENCIL_DPS):
        lam_v = mp.pi / 4 if lam is None else mp.mpf(lam)
        if mp.mpf(clip) < mp.mpf("1e-9"):
            warnings.warn("grid touches the z = 0/1 endpoints; clipping to 1e-9")
            clip = mp.mpf("1e-9")
        lo = -mp.pi / 4 + mp.mpf(clip)
        hi = -mp.mpf(clip)
        samples = []
        for omega in _chebyshev_grid(lo, hi, n_points):
            z = _gamma_raw(omega, lam_v)
            x, y = envelope_point(z, lam_v)
            samples.append(CurveSample(x=x, y=y, parameter=float(z), source="envelope"))
        samples.append(CurveSample(x=0.0, y=1.0, parameter=1.0, source="analytic"))
        samples.append(CurveSample(x=1.0, y=2.0, parameter=0.0, source="analytic"))
        if include_sw:
            for s in list(samples):
                samples.append(
                    CurveSample(x=s.x, y=2.0 - s.y, parameter=s.parameter, source=s.source)
                )
        return samples


def g_kernel(lam, omega):
    """Ratio kernel g = b(2l)^2 b(2w)^2 / (4 b(2l-2w) b(2l+2w))."""
    with mp.workdps(STENCIL_DPS):
        lam, omega = mp.mpf(lam), mp.mpf(omega)
        return (
            mp.sin(2 * lam) ** 2 * mp.sin(2 * omega) ** 2
            / (4 * mp.sin(2 * lam - 2 * omega) * mp.sin(2 * lam + 2 * omega))
        )


def ratio_rate_predicted(lam, omega):
    """(1/N) log of the predicted large-N ratio Z_N(l, w)/Z_N(l).

    Evaluates the bracket of the asymptotic ratio formula literally:
    log[ a(l+w) a(l-w) b(l+w) b(l-w) g(l, w) / (a(l)^2 b(l)^2 b(w)^2) ].
    """
    with mp.workdps(STENCIL_DPS):
        lam, omega = mp.mpf(lam), mp.mpf(omega)
        num = (
            mp.cos(lam + omega) * mp.cos(lam - omega)
            * mp.sin(lam + omega) * mp.sin(lam - omega) * g_kernel(lam, omega)
        )
        den = (mp.cos(lam) * mp.sin(lam) * mp.sin(omega)) ** 2
        return mp.log(num / den)


def sn_growth_exponent(lam, mu, omega, eta, dps=STENCIL_DPS):
    """W = e^Omega, the per-row growth factor of the shifted determinant
    ratio: S_N (N-1)! ~ W^N.  Solves the transport equation of the ratio:

        W(mu, w) = 2 e^{-4f} d_lam [ f(lam, mu+w) - f(lam, mu) ],

    with f = (1/4) log |e^{4f}| and the in-regime sign of e^{4f} carried
    explicitly.
    """
    with mp.workdps(dps):
        lam, mu, omega, eta = mp.mpf(lam), mp.mpf(mu), mp.mpf(omega), mp.mpf(eta)
        alpha = mp.pi / eta

        def e4f(l, m):
            return -(alpha ** 2) * mp.sin(alpha * l) * mp.sin(alpha * m) / (
                mp.cos(alpha * m) - mp.cos(alpha * l)
            ) ** 2

        def f_num(l, m):
            return mp.log(abs(e4f(l, m))) / 4

        h = mp.mpf(10) ** (-dps // 4)
        d_lam = lambda m: (f_num(lam + h, m) - f_num(lam - h, m)) / (2 * h)
        return 2 / e4f(lam, mu) * (d_lam(mu + omega) - d_lam(mu))


def path_count(x, y, a):
    """Corner-weighted count of up/right paths (0,0) -> (x,y).

    P_a = sum_l C(x,l) C(y,l) a^(-(2l+1)); each east-north corner costs
    a^(-2) on top of the overall a^(-1) of the extended path.
    """
    if x < 0 or y < 0:
        raise ValueError("need non-negative endpoint")
    C = binomials(max(x, y))
    a = mp.mpf(a)
    acc = mp.mpf(0)
    for l in range(min(x, y) + 1):
        acc += C[x][l] * C[y][l] * a ** (-(2 * l + 1))
    return acc


def z_left_weighted(N, L, k, a):
    """Left-domain partition function: a^{2N(L+1)} P_a(L, k-1)."""
    return mp.mpf(a) ** (2 * N * (L + 1)) * path_count(L, k - 1, a)


@dataclass
class AssemblyReport:
    N: int
    L: int
    Z_assembled: mp.mpf
    Z_direct: mp.mpf
    residual: float
    bracket_min: float
    bracket_max: float
    neglected_fraction: float


def assemble_Z_NL(N, L, dps=50):
    """Rebuild the extended-lattice Z from the boundary correlations.

    At the special point (mu=0, a=b=1/sqrt 2, c=1):

        Z_NL = a^{2NL} sum_n sum_l a^{-2l} C(L,l)
               [ C(2n-1,l) A^(N-n+1) + C(2n-2,l) D^(N-n+1) ],

    compared against the directly enumerated extended lattice.  Also reports
    the range of the bracket 1 - (l/(2n-1)) D/(Z H) and the fraction of
    Z_NL it accounts for (the part neglected in the scaling limit).
    """
    sp = special_point()
    with mp.workdps(dps):
        a = 1 / mp.sqrt(2)
        tab = enumerate_correlations(N, sp, dps=dps)
        ext = enumerate_extended(N, L, sp, dps=dps)
        C = binomials(max(L, 2 * N))
        total = mp.mpf(0)
        kept = mp.mpf(0)
        brackets = []
        for n in range(1, N + 1):
            r = N - n + 1
            A = tab.A[r - 1]
            D = tab.D[r - 1]
            H = tab.H[r - 1]
            for l in range(0, min(L, 2 * n - 1) + 1):
                termA = a ** (-2 * l) * C[L][l] * C[2 * n - 1][l] * A
                termD = a ** (-2 * l) * C[L][l] * (C[2 * n - 2][l] if 2 * n - 2 >= l else 0) * D
                total += termA + termD
                bracket = 1 - mp.mpf(l) / (2 * n - 1) * D / (tab.Z * H)
                brackets.append(float(bracket))
                kept += a ** (-2 * l) * C[L][l] * C[2 * n - 1][l] * tab.Z * H * bracket
        Z_assembled = a ** (2 * N * L) * total
        residual = float(abs(Z_assembled - ext.Z_NL) / abs(ext.Z_NL))
        # without the bracket, the regrouped sum would overcount by the
        # D-column shift; report the relative size of what the bracket removes
        full = mp.mpf(0)
        for n in range(1, N + 1):
            H = tab.H[N - n]
            for l in range(0, min(L, 2 * n - 1) + 1):
                full += a ** (-2 * l) * C[L][l] * C[2 * n - 1][l] * tab.Z * H
        neglected = float(abs(full - total) / full)
        return AssemblyReport(
            N=N, L=L, Z_assembled=Z_assembled, Z_direct=ext.Z_NL, residual=residual,
            bracket_min=min(brackets), bracket_max=max(brackets),
            neglected_fraction=neglected,
        )


@dataclass
class FreeEnergyRate:
    lam: float
    mu: float
    eta: float
    alpha: float
    e4f_abs: mp.mpf
    e4f_sign: int
    F: mp.mpf


def free_energy_rate(lam, mu, eta, dps=STENCIL_DPS):
    """Liouville exponent e^{4f} and the free energy per vertex F.

    e^{4f} = -alpha^2 sin(alpha lam) sin(alpha mu) / (cos(alpha mu) -
    cos(alpha lam))^2 with alpha = pi/eta; in-regime it is negative, and
    the matching sign of -a(2 lam) b(2 mu) cancels in

        e^{-2F} = A(lam, mu) sqrt( e^{4f} / (-a(2 lam) b(2 mu)) ),

    so F is reported real; the sign of e^{4f} is returned, not hidden.
    """
    with mp.workdps(dps):
        lam, mu, eta = mp.mpf(lam), mp.mpf(mu), mp.mpf(eta)
        alpha = mp.pi / eta
        denom = mp.cos(alpha * mu) - mp.cos(alpha * lam)
        if abs(denom) < mp.mpf(10) ** (-dps // 2):
            raise OutOfRegimeError("cos(alpha mu) = cos(alpha lam): rate is singular")
        e4f = -(alpha ** 2) * mp.sin(alpha * lam) * mp.sin(alpha * mu) / denom ** 2
        sign = 1 if e4f > 0 else -1
        A = (
            mp.sin(lam + mu + 2 * eta) * mp.sin(lam - mu + 2 * eta)
            * mp.sin(lam + mu) * mp.sin(lam - mu)
        )
        a2l = mp.sin(2 * lam + 2 * eta)
        b2m = mp.sin(2 * mu)
        ratio = e4f / (-a2l * b2m)
        if not ratio > 0:
            raise OutOfRegimeError("sign mismatch between e^{4f} and the prefactor")
        em2F = A * mp.sqrt(ratio)
        F = -mp.log(em2F) / 2
        return FreeEnergyRate(
            lam=float(lam), mu=float(mu), eta=float(eta), alpha=float(alpha),
            e4f_abs=abs(e4f), e4f_sign=sign, F=F,
        )


def liouville_residual(lam, mu, eta, h=mp.mpf("3e-4"), dps=STENCIL_DPS):
    """|2 d_lam d_mu f - e^{4f}| with f = (1/4) log |e^{4f}|, by stencils."""
    with mp.workdps(dps):
        lam, mu, eta = mp.mpf(lam), mp.mpf(mu), mp.mpf(eta)
        alpha = mp.pi / eta

        def f_num(l, m):
            e4f = -(alpha ** 2) * mp.sin(alpha * l) * mp.sin(alpha * m) / (
                mp.cos(alpha * m) - mp.cos(alpha * l)
            ) ** 2
            return mp.log(abs(e4f)) / 4

        mixed = mp.mpf(0)
        for i, ci in zip((-2, -1, 0, 1, 2), _D1):
            if ci == 0:
                continue
            for j, cj in zip((-2, -1, 0, 1, 2), _D1):
                if cj == 0:
                    continue
                mixed += ci * cj * f_num(lam + i * h, mu + j * h)
        mixed /= (12 * h) ** 2
        rate = free_energy_rate(lam, mu, eta, dps=dps)
        return abs(2 * mixed - rate.e4f_sign * rate.e4f_abs)
