"""Spectral parameters and Boltzmann weights.

Disordered-regime parametrization of the six-vertex weights:

    a(x) = sin(x + 2*eta),   b(x) = sin(x),   c = sin(2*eta),

so that Delta = (a^2 + b^2 - c^2)/(2ab) = cos(2*eta) for every argument x.
The reflecting end carries boundary weights kappa_pm(x) = sin(xi +- x)/sin(xi).

Row convention (rows counted from the top of the 2N x N lattice): odd rows
carry spectral parameter -lambda_j, even rows +lambda_j, so the bulk weight
triple (w1, w2, w3) is (b(l+m), a(l+m), c) on odd rows and
(a(l-m), b(l-m), c) on even rows.

At the free-fermion point eta = pi/4 the weights reduce to a(x) = cos(x),
b(x) = sin(x), c = 1.
"""

from dataclasses import dataclass

import mpmath as mp

FF_TOL = 1e-12  # |eta - pi/4| below this is treated as the free-fermion point


class OutOfRegimeError(ValueError):
    """A derived Boltzmann weight is not strictly positive."""


class CapacityError(ValueError):
    """Requested size exceeds the supported range of an exact method."""


def a_weight(x, eta):
    return mp.sin(x + 2 * eta)


def b_weight(x, eta):
    return mp.sin(x)


def c_weight(eta):
    return mp.sin(2 * eta)


@dataclass(frozen=True)
class SpectralParams:
    """Angles (radians) defining all vertex and boundary weights.

    omega is the column inhomogeneity shift: the leftmost column of the
    lattice carries mu + omega while all others carry mu.
    """

    lam: mp.mpf
    mu: mp.mpf = mp.mpf(0)
    eta: mp.mpf = None
    xi: mp.mpf = None
    omega: mp.mpf = mp.mpf(0)

    def __post_init__(self):
        with mp.workdps(max(mp.mp.dps, 50)):
            if self.eta is None:
                object.__setattr__(self, "eta", mp.pi / 4)
            if self.xi is None:
                object.__setattr__(self, "xi", mp.pi / 2)
            for name in ("lam", "mu", "eta", "xi", "omega"):
                v = getattr(self, name)
                if not isinstance(v, mp.mpf):
                    # floats and ints convert exactly; strings are parsed at
                    # >= 50 digits.  mpf inputs keep their own precision.
                    object.__setattr__(self, name, mp.mpf(v))
            if not (0 < self.eta < mp.pi / 2):
                raise OutOfRegimeError(f"eta={self.eta} outside (0, pi/2)")

    @property
    def free_fermion(self):
        return abs(self.eta - mp.pi / 4) < FF_TOL

    @property
    def delta(self):
        return mp.cos(2 * self.eta)

    def mu_of_column(self, column_index, n_columns=None):
        """mu of column k (1-based, counted from the right).

        The inhomogeneity shift omega sits on column N (the leftmost), so it
        is applied only when n_columns is given and k == n_columns.
        """
        if n_columns is not None and column_index == n_columns:
            return self.mu + self.omega
        return self.mu

    def replace(self, **kw):
        d = dict(lam=self.lam, mu=self.mu, eta=self.eta, xi=self.xi, omega=self.omega)
        d.update(kw)
        return SpectralParams(**d)


def special_point(dps=50):
    """Free-fermion symmetric point: Delta=0, mu=0, a=b (lambda=pi/4), xi=pi/2."""
    with mp.workdps(max(mp.mp.dps, dps)):
        return SpectralParams(lam=mp.pi / 4, mu=mp.mpf(0), eta=mp.pi / 4, xi=mp.pi / 2)


@dataclass(frozen=True)
class WeightSet:
    """Bulk and boundary weights for one (row, column) parameter pair.

    w1/w2/w3 are the bulk weights in the row parity requested from
    build_weights; the a/b fields keep both +- combinations so callers can
    form either parity.
    """

    a_plus: mp.mpf
    a_minus: mp.mpf
    b_plus: mp.mpf
    b_minus: mp.mpf
    c: mp.mpf
    kappa_plus: mp.mpf
    kappa_minus: mp.mpf
    delta: mp.mpf
    w1: mp.mpf
    w2: mp.mpf
    w3: mp.mpf

    def bulk_triple(self, row_parity):
        """(w1, w2, w3) for 'even' or 'odd' rows (1-based, from the top)."""
        if row_parity == "even":
            return (self.a_minus, self.b_minus, self.c)
        if row_parity == "odd":
            return (self.b_plus, self.a_plus, self.c)
        raise ValueError(f"row_parity must be 'even' or 'odd', got {row_parity!r}")


def raw_weights(lam, mu, eta, xi):
    """All six derived weights for row parameter lam and column parameter mu.

    Raises OutOfRegimeError naming the first non-positive factor.
    """
    vals = {
        "a_plus=a(lam+mu)": a_weight(lam + mu, eta),
        "a_minus=a(lam-mu)": a_weight(lam - mu, eta),
        "b_plus=b(lam+mu)": b_weight(lam + mu, eta),
        "b_minus=b(lam-mu)": b_weight(lam - mu, eta),
        "c": c_weight(eta),
        "kappa_plus=sin(xi+lam)/sin(xi)": mp.sin(xi + lam) / mp.sin(xi),
        "kappa_minus=sin(xi-lam)/sin(xi)": mp.sin(xi - lam) / mp.sin(xi),
    }
    for name, v in vals.items():
        if not v > 0:
            raise OutOfRegimeError(f"non-positive weight {name} = {mp.nstr(v, 8)}")
    return list(vals.values())


def build_weights(params, row_parity="even", column_index=1, n_columns=None):
    """WeightSet for a vertex in a row of the given parity.

    column_index is the 1-based column number counted from the right; with
    n_columns given, column N picks up the omega shift of the partially
    inhomogeneous model.
    """
    mu = params.mu_of_column(column_index, n_columns)
    ap, am, bp, bm, c, kp, km = raw_weights(params.lam, mu, params.eta, params.xi)
    delta = (am * am + bm * bm - c * c) / (2 * am * bm)
    ws = WeightSet(
        a_plus=ap, a_minus=am, b_plus=bp, b_minus=bm, c=c,
        kappa_plus=kp, kappa_minus=km, delta=delta, w1=0, w2=0, w3=0,
    )
    w1, w2, w3 = ws.bulk_triple(row_parity)
    object.__setattr__(ws, "w1", w1)
    object.__setattr__(ws, "w2", w2)
    object.__setattr__(ws, "w3", w3)
    return ws
