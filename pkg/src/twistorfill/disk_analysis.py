"""Fourier and Hardy analysis on the unit circle and disk.

Functions on the disk are finite sums of monomials zeta^p conj(zeta)^q,
which restrict to e^{i(p-q)theta} on the boundary.  This representation is
closed under the operations the extremal-disk problem needs (dbar, conj,
multiplication by zeta), so every step of the solver is exact up to
floating point, and the band bounds the total degree p+q.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import AliasingWarning, NegativeFourierContent, SingularLevi, TruncationOverflow

DEFAULT_BAND = 128
DEFAULT_TOL = 1e-12


def _is_pow2(m):
    return m >= 1 and m & (m - 1) == 0


@dataclass(frozen=True)
class FourierSeries:
    """Truncated series sum_k a_k e^{ik theta} with |k| <= band."""

    coefficients: dict
    band: int

    def __post_init__(self):
        clean = {int(k): complex(v) for k, v in dict(self.coefficients).items() if v != 0}
        for k in clean:
            if abs(k) > self.band:
                raise TruncationOverflow(f"mode {k} exceeds band {self.band}")
        object.__setattr__(self, "coefficients", clean)

    def __getitem__(self, k):
        return self.coefficients.get(k, 0j)

    @property
    def is_real(self):
        return all(abs(self[-k] - v.conjugate()) <= 1e-14 * max(1.0, abs(v))
                   for k, v in self.coefficients.items())

    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for k, v in self.coefficients.items():
            out += v * np.exp(1j * k * theta)
        return out

    def samples(self, m):
        """Values on the grid theta_j = 2 pi j / m."""
        c = np.zeros(m, dtype=complex)
        for k, v in self.coefficients.items():
            c[k % m] += v
        return np.fft.ifft(c) * m

    def max_abs(self):
        return max((abs(v) for v in self.coefficients.values()), default=0.0)

    def to_dict(self):
        return {"band": self.band,
                "coefficients": {str(k): {"re": v.real, "im": v.imag}
                                 for k, v in sorted(self.coefficients.items())}}


def fourier_decompose(samples, band=None, tol=DEFAULT_TOL):
    """Coefficients a_k = (1/M) sum_j samples_j e^{-ik theta_j} for |k| <= band.

    ``band`` defaults to M/2 - 1.  An AliasingWarning is issued when the
    modes above the band carry more than ``tol`` relative energy.
    """
    x = np.asarray(samples, dtype=complex).ravel()
    m = len(x)
    if band is None:
        band = m // 2 - 1
    if not _is_pow2(m) or m < 2 * band + 2:
        raise ValueError(f"need a power-of-two sample count >= {2 * band + 2}, got {m}")
    a = np.fft.fft(x) / m
    ks = np.fft.fftfreq(m, 1.0 / m).astype(int)
    inside = np.abs(ks) <= band
    total = float(np.sum(np.abs(a) ** 2))
    outside = float(np.sum(np.abs(a[~inside]) ** 2))
    if total > 0 and outside > tol ** 2 * total:
        warnings.warn(f"{outside / total:.3e} relative energy above band {band}", AliasingWarning)
    return FourierSeries({int(k): a[i] for i, k in enumerate(ks) if inside[i]}, band)


def positivity_filter(s, mode="nonneg", tol=DEFAULT_TOL):
    """Check that modes k < 0 (``strict``: k <= 0) vanish up to ``tol``.

    Returns ``(passed, {mode: magnitude})`` listing the offending modes.
    """
    if mode not in ("nonneg", "strict"):
        raise ValueError("mode must be 'nonneg' or 'strict'")
    bound = 0 if mode == "strict" else -1
    bad = {k: abs(v) for k, v in s.coefficients.items() if k <= bound and abs(v) > tol}
    return not bad, dict(sorted(bad.items()))


@dataclass(frozen=True)
class DiskFunction:
    """Finite sum of terms c_{pq} zeta^p conj(zeta)^q on the closed unit disk."""

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (p, q), v in dict(self.terms).items():
            if p < 0 or q < 0:
                raise ValueError("exponents must be nonnegative")
            if v != 0:
                clean[(int(p), int(q))] = clean.get((int(p), int(q)), 0j) + complex(v)
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v != 0})

    @classmethod
    def holomorphic(cls, taylor):
        return cls({(int(k), 0): v for k, v in dict(taylor).items()})

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): c})

    @property
    def taylor(self):
        """Holomorphic coefficients {p: c_{p0}}."""
        return {p: v for (p, q), v in sorted(self.terms.items()) if q == 0}

    @property
    def is_holomorphic(self):
        return all(q == 0 for (_, q) in self.terms)

    @property
    def degree(self):
        return max((p + q for (p, q) in self.terms), default=0)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0j) + v
        return DiskFunction(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return DiskFunction({k: c * v for k, v in self.terms.items()})

    def times_zeta(self, power=1):
        return DiskFunction({(p + power, q): v for (p, q), v in self.terms.items()})

    def times_abs2(self):
        """Multiply by |zeta|^2."""
        return DiskFunction({(p + 1, q + 1): v for (p, q), v in self.terms.items()})

    def conj(self):
        return DiskFunction({(q, p): v.conjugate() for (p, q), v in self.terms.items()})

    def dbar(self):
        return DiskFunction({(p, q - 1): q * v for (p, q), v in self.terms.items() if q})

    def dz(self):
        return DiskFunction({(p - 1, q): p * v for (p, q), v in self.terms.items() if p})

    def at_zero(self):
        return self.terms.get((0, 0), 0j)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        zb = np.conj(z)
        for (p, q), v in self.terms.items():
            out += v * z ** p * zb ** q
        return out

    def boundary_trace(self, band=None):
        coeffs = {}
        for (p, q), v in self.terms.items():
            coeffs[p - q] = coeffs.get(p - q, 0j) + v
        if band is None:
            band = max((abs(k) for k in coeffs), default=0)
        return FourierSeries(coeffs, band)

    def sup_bound(self):
        return float(sum(abs(v) for v in self.terms.values()))

    def max_abs(self):
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def to_dict(self):
        return {"terms": [{"p": p, "q": q, "re": v.real, "im": v.imag}
                          for (p, q), v in sorted(self.terms.items())]}

    @classmethod
    def from_dict(cls, d):
        return cls({(int(t["p"]), int(t["q"])): complex(t["re"], t["im"]) for t in d["terms"]})

    @classmethod
    def from_polar_samples(cls, values, radii, band):
        """Fit samples values[j, m] at (radii[j], 2 pi m / M) by monomials of degree <= band.

        Mode n = p - q has radial profile sum_q c r^{|n| + 2 min(p,q)}; each
        angular mode is fitted independently by least squares.
        """
        values = np.asarray(values, dtype=complex)
        radii = np.asarray(radii, dtype=float)
        m = values.shape[1]
        modes = np.fft.fft(values, axis=1) / m
        ks = np.fft.fftfreq(m, 1.0 / m).astype(int)
        terms = {}
        for i, n in enumerate(ks):
            if abs(n) > band:
                continue
            js = list(range((band - abs(n)) // 2 + 1))
            A = np.stack([radii ** (abs(n) + 2 * j) for j in js], axis=1)
            c = np.linalg.lstsq(A, modes[:, i], rcond=None)[0]
            for j, cj in zip(js, c):
                p, q = (n + j, j) if n >= 0 else (j, j - n)
                terms[(p, q)] = cj
        return cls(terms)


def extend_disk(s, tol=DEFAULT_TOL):
    """Holomorphic extension sum_{k>=0} a_k zeta^k of a nonnegative boundary series."""
    ok, bad = positivity_filter(s, "nonneg", tol)
    if not ok:
        raise NegativeFourierContent("boundary series has negative modes", bad)
    return DiskFunction.holomorphic({k: v for k, v in s.coefficients.items() if k >= 0})


def _check_band(f, band, what):
    if f.degree > band:
        raise TruncationOverflow(f"{what} needs degree {f.degree} > band {band}")


def dbar_disk_solve(g, band=DEFAULT_BAND):
    """Particular solution u of du/dconj(zeta) = g whose boundary trace has only k < 0 modes.

    Termwise: zeta^p conj(zeta)^{q+1} / (q+1), minus the holomorphic
    zeta^{p-q-1} / (q+1) carrying the same boundary mode when p > q.
    """
    out = {}
    for (p, q), v in g.terms.items():
        c = v / (q + 1)
        out[(p, q + 1)] = out.get((p, q + 1), 0j) + c
        if p >= q + 1:
            key = (p - q - 1, 0)
            out[key] = out.get(key, 0j) - c
    u = DiskFunction(out)
    _check_band(u, band, "dbar solution")
    return u


@dataclass(frozen=True)
class RHProblem:
    """Right-hand sides of the linearized extremal-disk system.

    ``levi[j][i]`` is F_{jbar i}; ``g0`` and the lists ``g``, ``rho`` hold
    DiskFunctions, one per base direction.
    """

    g0: DiskFunction
    g: tuple
    rho: tuple
    levi: np.ndarray
    band: int = DEFAULT_BAND

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(self.g))
        object.__setattr__(self, "rho", tuple(self.rho))
        object.__setattr__(self, "levi", np.asarray(self.levi, dtype=complex).reshape(
            len(self.g), len(self.g)))
        if len(self.rho) != len(self.g):
            raise ValueError("g and rho need one entry per base direction")

    @property
    def n(self):
        return len(self.g)

    @property
    def condition_number(self):
        return float(np.linalg.cond(self.levi)) if self.n else 1.0

    @classmethod
    def zero(cls, levi, band=DEFAULT_BAND):
        n = len(np.atleast_2d(levi))
        return cls(DiskFunction(), [DiskFunction()] * n, [DiskFunction()] * n, levi, band)

    def __add__(self, other):
        return RHProblem(self.g0 + other.g0, [a + b for a, b in zip(self.g, other.g)],
                         [a + b for a, b in zip(self.rho, other.rho)], self.levi, self.band)

    def to_dict(self):
        return {"band": self.band, "g0": self.g0.to_dict(),
                "g": [x.to_dict() for x in self.g], "rho": [x.to_dict() for x in self.rho],
                "levi": [[{"re": v.real, "im": v.imag} for v in row] for row in self.levi]}

    @classmethod
    def from_dict(cls, d, band=None):
        levi = np.array([[complex(v["re"], v["im"]) for v in row] for row in d["levi"]])
        return cls(DiskFunction.from_dict(d["g0"]), [DiskFunction.from_dict(x) for x in d["g"]],
                   [DiskFunction.from_dict(x) for x in d["rho"]], levi,
                   band if band is not None else d.get("band", DEFAULT_BAND))


@dataclass(frozen=True)
class RHSolution:
    f0: DiskFunction
    f: tuple
    varpi: tuple
    residuals: dict
    defects: dict

    @property
    def max_residual(self):
        return max(self.residuals.values(), default=0.0)

    @property
    def max_defect(self):
        return max(self.defects.values(), default=0.0)

    def to_dict(self):
        return {"f0": self.f0.to_dict(), "f": [x.to_dict() for x in self.f],
                "varpi": [x.to_dict() for x in self.varpi],
                "residuals": dict(sorted(self.residuals.items())),
                "defects": dict(sorted(self.defects.items()))}


def _levi_inverse(levi):
    if levi.size == 0:
        return levi
    s = np.linalg.svd(levi, compute_uv=False)
    if s[-1] <= 1e-12 * max(1.0, s[0]):
        raise SingularLevi(f"Levi matrix is singular (smallest singular value {s[-1]:.3e})")
    return np.linalg.inv(levi)


def _levi_pair(fs, levi, i):
    """sum_j fs[j] F_{jbar i}."""
    out = DiskFunction()
    for j, fj in enumerate(fs):
        if levi[j, i] != 0:
            out = out + fj.scale(levi[j, i])
    return out


def _boundary_grid(band):
    m = 1
    while m < 2 * band + 8:
        m *= 2
    return np.exp(2j * np.pi * np.arange(m) / m)


def rh_residuals(p, f0, f, varpi):
    """PDE residual norms (max coefficient magnitude) and boundary defects (max on a grid)."""
    res = {"f0": (f0.dbar() - p.g0).max_abs()}
    for i in range(p.n):
        res[f"f{i + 1}"] = (f[i].dbar() - p.g[i]).max_abs()
        lhs = varpi[i].dbar() - _levi_pair([x.conj().dbar() for x in f], p.levi, i).times_zeta()
        res[f"varpi{i + 1}"] = (lhs - p.rho[i]).max_abs()
    z = _boundary_grid(max(p.band, f0.degree, *(x.degree for x in list(f) + list(varpi)), 1))
    dfc = {"Re(f0/zeta)|S1": float(np.abs((f0.evaluate(z) / z).real).max()),
           "f0(0)": abs(f0.at_zero()), "f0(1)": abs(complex(f0.evaluate(1.0)))}
    for i in range(p.n):
        dfc[f"f{i + 1}(1)"] = abs(complex(f[i].evaluate(1.0)))
        dfc[f"varpi{i + 1}|S1"] = float(np.abs(varpi[i].evaluate(z)).max())
        dfc[f"varpi{i + 1}(0)"] = abs(varpi[i].at_zero())
    return {k: float(v) for k, v in res.items()}, {k: float(v) for k, v in dfc.items()}


def _negative_trace(u):
    """Boundary modes k < 0 of a particular solution; the others cancel up to rounding."""
    trace = u.boundary_trace()
    rest = max((abs(v) for k, v in trace.coefficients.items() if k >= 0), default=0.0)
    if rest > 1e-10 * max(1.0, u.max_abs()):
        raise AssertionError("particular solution carries nonnegative boundary modes")
    return FourierSeries({k: v for k, v in trace.coefficients.items() if k < 0}, trace.band)


def _solve_f0(g0, band):
    part = dbar_disk_solve(g0, band)
    trace = _negative_trace(part)
    corr = DiskFunction.holomorphic({k: -trace[2 - k].conjugate() for k in range(3, band + 4)
                                      if trace[2 - k] != 0})
    f = part + corr
    a0 = -f.at_zero()
    a1 = 1j * (-(complex(f.evaluate(1.0))) - (a0 - a0.conjugate())).imag
    return f + DiskFunction.holomorphic({0: a0, 1: a1, 2: -a0.conjugate()})


def solve_rh(p):
    """Solve the linearized extremal-disk system by the constructive scheme.

    f0: particular solution with negative boundary modes, reflected
    holomorphic correction for Re(f0/zeta) = 0, then a0 + a1 zeta - conj(a0) zeta^2
    with Re a1 = 0 pinned by f0(0) = f0(1) = 0.  f^i: particular solution
    plus a holomorphic h^i chosen so that varpi_i vanishes on the circle and
    at the origin and f^i(1) = 0.
    """
    levi = p.levi
    inv = _levi_inverse(levi)
    band = p.band
    f0 = _solve_f0(p.g0, band)
    n = p.n
    fpart = [dbar_disk_solve(g, band) for g in p.g]
    forcing = [p.rho[i] + _levi_pair([x.conj().dbar() for x in fpart], levi, i).times_zeta()
               for i in range(n)]
    w0 = [dbar_disk_solve(r, band) for r in forcing]
    traces = [_negative_trace(w) for w in w0]
    # holomorphic phi^j with boundary values -zeta sum_i conj(w0_i) conj(inv[i, j])
    phi = []
    for j in range(n):
        coeffs = {}
        for i in range(n):
            for m, b in traces[i].coefficients.items():
                coeffs[1 - m] = coeffs.get(1 - m, 0j) - b.conjugate() * inv[i, j].conjugate()
        phi.append(DiskFunction.holomorphic(coeffs))
    w = [w0[i] + _levi_pair([x.conj() for x in phi], levi, i).times_zeta() for i in range(n)]
    # conj(a1^j) F_{jbar i} = w_i(0)
    target = np.array([x.at_zero() for x in w], dtype=complex)
    a1 = np.linalg.solve(levi.T, target).conj() if n else np.zeros(0)
    corr_const = [DiskFunction.constant(a1[j].conjugate()) for j in range(n)]
    w = [w[i] + _levi_pair([c.times_abs2() - c for c in corr_const], levi, i) for i in range(n)]
    f = []
    for j in range(n):
        h = fpart[j] + phi[j] + DiskFunction.holomorphic({1: a1[j]})
        a0 = -complex(h.evaluate(1.0))
        f.append(h + DiskFunction.constant(a0))
    for x in [f0] + f + w:
        _check_band(x, band + 4, "solution")
    res, dfc = rh_residuals(p, f0, f, w)
    return RHSolution(f0, tuple(f), tuple(w), res, dfc)


def homogeneous_system(levi, band):
    """Boundary conditions on solutions of the homogeneous system, as a real matrix.

    Unknowns are the Taylor coefficients (degree <= band) of f0, f^i and the
    holomorphic part H_i of varpi_i = zeta conj(f^j) F_{jbar i} + H_i.  Rows
    are the boundary modes of Re(f0/zeta) and varpi_i and the point
    conditions f0(0), f^i(1) for i = 0..n, varpi_i(0).  Coefficients and
    boundary modes of index k carry the weight 1+|k|, a discrete H^1 norm in
    which point evaluation is bounded uniformly in the band.  Returns a
    sparse matrix acting on (Re, Im) pairs of weighted unknowns.
    """
    levi = np.asarray(levi, dtype=complex)
    n = len(levi)
    nc = band + 1
    ncx = nc * (1 + 2 * n)

    def col(block, k):
        return block * nc + k

    lin, anti, weight = [], [], []  # row value = sum lin * x + sum anti * conj(x)

    def new_row(mode=0):
        lin.append({})
        anti.append({})
        weight.append(1.0 + abs(mode))
        return len(lin) - 1

    # Re(f0/zeta), mode m >= 0: (c_{m+1} + conj(c_{1-m})) / 2
    for m in range(nc):
        r = new_row(m)
        if m + 1 < nc:
            lin[r][col(0, m + 1)] = 0.5
        if 1 - m >= 0:
            anti[r][col(0, 1 - m)] = anti[r].get(col(0, 1 - m), 0) + 0.5
    r = new_row()
    lin[r][col(0, 0)] = 1.0
    for blk in range(n + 1):
        r = new_row()
        for k in range(nc):
            lin[r][col(blk, k)] = 1.0
    for i in range(n):
        hb = 1 + n + i
        for m in range(-nc, nc):
            r = new_row(m)
            if 0 <= m < nc:
                lin[r][col(hb, m)] = 1.0
            if 0 <= 1 - m < nc:
                for j in range(n):
                    if levi[j, i] != 0:
                        anti[r][col(1 + j, 1 - m)] = levi[j, i]
        r = new_row()
        lin[r][col(hb, 0)] = 1.0
    rows, cols, vals = [], [], []
    for r, (a, b) in enumerate(zip(lin, anti)):
        # x = u + iv: value = (a + b) u + i (a - b) v; unknown k is scaled by 1/(1+k)
        for c in set(a) | set(b):
            ca, cb = a.get(c, 0), b.get(c, 0)
            scale = weight[r] / (1.0 + c % nc)
            for j, v in ((2 * c, ca + cb), (2 * c + 1, 1j * (ca - cb))):
                for part, x in ((0, v.real), (1, v.imag)):
                    if x != 0:
                        rows.append(2 * r + part)
                        cols.append(j)
                        vals.append(x * scale)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(2 * len(lin), 2 * ncx))


def injectivity_singular_value(levi, band):
    """Smallest singular value of :func:`homogeneous_system`.

    The matrix is block diagonal after permutation; each connected block of
    the row/column incidence graph gets its own dense SVD.
    """
    M = homogeneous_system(levi, band).tocsc()
    nrow, ncol = M.shape
    graph = sparse.bmat([[None, M], [M.T, None]]).tocsr()
    ncomp, labels = connected_components(graph, directed=False)
    smallest = np.inf
    for c in range(ncomp):
        rs = np.nonzero(labels[:nrow] == c)[0]
        cs = np.nonzero(labels[nrow:] == c)[0]
        if len(cs) == 0:
            continue
        if len(rs) < len(cs):
            return 0.0
        block = M[rs][:, cs].toarray()
        smallest = min(smallest, float(np.linalg.svd(block, compute_uv=False)[-1]))
    return smallest
