"""Solvability of the complex hessian on negative weights and related ranks.

Per representation V^{K,L}, a function ``f`` with coefficient ``w(s,-s)``
has S1 weight ``s`` and its hessian touches exactly four coefficients of
the same weight: phi^1_{1bar}(s+4,-s), phi^2_{1bar}(s+2,2-s),
phi^1_{2bar}(s+2,2-s) and phi^2_{2bar}(s,4-s).  The solver sweeps the
negative weights one line at a time; a weight with equations but no
unknown, or with inconsistent equations, is an obstruction.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _forms as fm
from . import _scalars as sc
from .errors import ConstraintViolation, Obstructed
from .rep_core import ProductRep, hom_so3_multiplicity, real_structure_factor
from .twistor_calculus import (CR_DEFORM, FUNCTIONS, P1_NORMAL, EquivariantTensor,
                               complex_hessian, dbar_function, dbar_h, dbar_vector,
                               levi_contract, operator_matrix, p1_project, s1_weight, sharp,
                               OMEGA02, TWO_FORM)

COEFF_NAMES = {"e1bar_e1": "w^1_1bar", "e1bar_e2": "w^2_1bar",
               "e2bar_e1": "w^1_2bar", "e2bar_e2": "w^2_2bar"}

# (label, k offset, l offset from (s,-s), factor turning phi into a candidate w)
_HESSIAN_TERMS = (("e1bar_e1", 4, 0, sc.times_i), ("e1bar_e2", 2, 2, sc.times_minus_i),
                  ("e2bar_e1", 2, 2, sc.times_i), ("e2bar_e2", 0, 4, sc.times_minus_i))


def coefficient_name(label, k, l):
    return f"{COEFF_NAMES[label]}({k},{l})"


def case_label(K, L):
    if K >= L:
        return "K>=L"
    if K == L - 2:
        return "K=L-2"
    return "K<=L-4"


def blocking_positions(K, L):
    """Obstruction coefficients that must vanish for solvability, as (label, k, l)."""
    if K >= L:
        return []
    if K == L - 2:
        return [("e1bar_e1", -K + 2, K + 2)]
    return [(lab, -K, K + 4) for lab in ("e1bar_e1", "e1bar_e2", "e2bar_e1")]


@dataclass(frozen=True)
class BlockingCoefficient:
    name: str
    label: str
    k: int
    l: int
    value: object
    vanishes: bool

    def to_dict(self):
        return {"name": self.name, "label": self.label, "k": self.k, "l": self.l,
                "value": self.value, "vanishes": self.vanishes}


@dataclass(frozen=True)
class RepObstruction:
    """Verdict for one representation.

    ``blocking`` lists the obstruction coefficients; ``inconsistent`` lists every
    coefficient whose equation fails, including ones implied by the
    obstruction list through the constraints.
    """

    K: int
    L: int
    case: str
    blocking: tuple
    inconsistent: tuple
    max_defect: float
    solvable: bool

    def to_dict(self):
        return {"K": self.K, "L": self.L, "case": self.case,
                "blocking": [b.to_dict() for b in self.blocking],
                "inconsistent": list(self.inconsistent),
                "max_defect": self.max_defect, "solvable": self.solvable}


@dataclass(frozen=True)
class ObstructionReport:
    reps: tuple = ()

    @property
    def solvable(self):
        return all(r.solvable for r in self.reps)

    def blocking_names(self, nonzero_only=True):
        return [b.name for r in self.reps for b in r.blocking
                if not (nonzero_only and b.vanishes)]

    def to_dict(self):
        return {"solvable": self.solvable, "reps": [r.to_dict() for r in self.reps]}


def check_constraints(phi, tol=1e-10):
    """Raise ConstraintViolation unless levi_contract(phi) = dbar_h(phi) = 0."""
    bad = []
    scale = max(1.0, phi.max_abs())
    for name, t in (("levi_contract", levi_contract(phi)), ("dbar_h", dbar_h(phi))):
        bad.extend((name, key, v) for key, v in t.entries.items()
                   if not sc.is_zero(v, tol * scale))
    if bad:
        raise ConstraintViolation("input violates the hessian-image constraints", bad)


def _mean(values):
    n = len(values)
    total = values[0]
    for v in values[1:]:
        total = total + v
    return total * sc.gaussian(Fraction(1, n)) if sc.is_exact(total) else total / n


def _solve_rep(phi, K, L, tol):
    entries = phi.entries
    exact = phi.exact
    zero = sc.zero(sc.EXACT if exact else sc.FLOAT)
    scale = max(1.0, phi.max_abs())
    w = {}
    inconsistent = []
    defect = 0.0
    for s in range(-(K + L + 4), 0):
        if (s - K) % 2:
            continue
        cands = []
        for lab, dk, dl, factor in _HESSIAN_TERMS:
            k, l = s + dk, -s + dl
            if abs(k) <= K and abs(l) <= L:
                cands.append((lab, k, l, factor(entries.get((K, L, k, l, lab), zero))))
        has_unknown = abs(s) <= min(K, L)
        if not cands:
            if has_unknown:
                w[s] = zero
            continue
        target = _mean([c[3] for c in cands]) if has_unknown else zero
        for lab, k, l, c in cands:
            d = sc.magnitude(c - target)
            defect = max(defect, d)
            if not sc.is_zero(c - target, tol * scale):
                inconsistent.append(coefficient_name(lab, k, l))
        if has_unknown:
            w[s] = target
    blocking = []
    for lab, k, l in blocking_positions(K, L):
        v = entries.get((K, L, k, l, lab), zero)
        blocking.append(BlockingCoefficient(coefficient_name(lab, k, l), lab, k, l, v,
                                            sc.is_zero(v, tol * scale)))
    solvable = not inconsistent
    return w, RepObstruction(K, L, case_label(K, L), tuple(blocking), tuple(inconsistent),
                             float(defect), solvable)


def solve_hessian_negative(phi, tol=1e-10, complete="real", raise_on_obstruction=True):
    """Find f whose hessian reproduces the negative-weight part of phi.

    Returns ``(f, report)``.  The negative coefficients of f are determined
    line by line; ``complete="real"`` fills the positive ones by
    conj f = f and leaves the invariant coefficient zero, ``"none"``
    returns only the negative part.  Exact input is solved exactly.
    """
    check_constraints(phi, tol)
    out = {}
    reps = []
    for (K, L) in phi.reps():
        w, verdict = _solve_rep(phi, K, L, tol)
        reps.append(verdict)
        for s, val in w.items():
            if sc.is_zero(val):
                continue
            out[(K, L, s, -s, "1")] = val
            if complete == "real":
                t = real_structure_factor(K, -s) * real_structure_factor(L, s)
                conj_val = sc.conj(val) * (sc.gaussian(t) if sc.is_exact(val) else float(t))
                out[(K, L, -s, s, "1")] = conj_val
    report = ObstructionReport(tuple(reps))
    if raise_on_obstruction and not report.solvable:
        raise Obstructed("negative-weight part is not in the image of the hessian", report)
    return EquivariantTensor(FUNCTIONS, out), report


def _negative_hessian_matrix(rep, strictly=True):
    """Hessian matrix from f columns to phi rows, both restricted by S1 weight."""
    H = operator_matrix(complex_hessian, FUNCTIONS, CR_DEFORM, rep)
    fcoords = FUNCTIONS.coordinates(rep)
    pcoords = CR_DEFORM.coordinates(rep)
    keep_f = [i for i, (lab, x) in enumerate(fcoords)
              if (x[0] < 0 if strictly else x[0] <= 0)]
    return H, fcoords, pcoords, keep_f


def dense_hessian_residual(phi):
    """Least-squares oracle: per rep, distance of phi_- from hessian(f_-).

    Returns ``{(K, L): (residual_norm, residual_vector, coordinates)}``.
    """
    out = {}
    for (K, L) in phi.reps():
        rep = ProductRep(K, L)
        H, fcoords, pcoords, keep_f = _negative_hessian_matrix(rep)
        rows = [i for i, (lab, x) in enumerate(pcoords)
                if s1_weight((K, L, x[0], x[1], lab), CR_DEFORM) < 0]
        b = phi.to_complex().block(K, L).to_vector(rep)[rows]
        A = H[np.ix_(rows, keep_f)]
        if A.size:
            c = np.linalg.lstsq(A, b, rcond=None)[0]
            r = b - A @ c
        else:
            r = b
        out[(K, L)] = (float(np.linalg.norm(r)), r, [pcoords[i] for i in rows])
    return out


def coulomb_decompose(phi, tol=1e-10):
    """Split phi = hessian(f) + phi_W with phi_W orthogonal to hessian(f_{<=0}).

    f is supported on nonpositive S1 weights and is the minimum-norm
    least-squares choice, which quotients out the hessian kernel.
    """
    check_constraints(phi, tol)
    phi = phi.to_complex()
    fout, wout = {}, {}
    for (K, L) in phi.reps():
        rep = ProductRep(K, L)
        H, fcoords, pcoords, keep_f = _negative_hessian_matrix(rep, strictly=False)
        A = H[:, keep_f]
        b = phi.block(K, L).to_vector(rep)
        c = np.linalg.lstsq(A, b, rcond=None)[0] if A.size else np.zeros(0)
        r = b - A @ c
        for j, i in enumerate(keep_f):
            if abs(c[j]) > 0:
                lab, x = fcoords[i]
                fout[(K, L, x[0], x[1], lab)] = complex(c[j])
        for (lab, x), v in zip(pcoords, r):
            if abs(v) > tol * max(1.0, np.abs(b).max(initial=0.0)):
                wout[(K, L, x[0], x[1], lab)] = complex(v)
    return EquivariantTensor(FUNCTIONS, fout), EquivariantTensor(CR_DEFORM, wout)


@dataclass(frozen=True)
class TangentCondition:
    name: str
    label: str
    k: int
    l: int


def tangent_c_plus(K, L):
    """Vanishing conditions on the CR tangent space contributed by V^{K,L}."""
    if (K + L) % 2:
        raise ValueError("K+L must be even")
    return [TangentCondition(coefficient_name(lab, k, l), lab, k, l)
            for lab, k, l in blocking_positions(K, L)]


@dataclass(frozen=True)
class TangentComponent:
    role: str  # "g" for the metric variation, "Q" for the second datum
    K: int
    L: int
    multiplicity: int
    dimension: int

    def to_dict(self):
        return {"role": self.role, "K": self.K, "L": self.L,
                "multiplicity": self.multiplicity, "dimension": self.dimension}


@dataclass(frozen=True)
class TangentSpaceDescription:
    family: str
    components: tuple
    cutoff: int

    @property
    def total_dimension(self):
        return sum(c.dimension for c in self.components)

    def reps(self, role=None):
        return {(c.K, c.L) for c in self.components if role is None or c.role == role}

    def to_dict(self):
        return {"family": self.family, "cutoff": self.cutoff,
                "components": [c.to_dict() for c in self.components],
                "total_dimension": self.total_dimension}


FAMILIES = ("B+", "M+", "B-", "M-")


def _component(role, K, L, mirrored):
    if mirrored:
        K, L = L, K
    m = hom_so3_multiplicity(K, L, 4)
    return TangentComponent(role, K, L, m, m * (K + 1) * (L + 1)) if m else None


def tangent_bg_dims(family, cutoff):
    """Representations contributing to the tangent space of a boundary family.

    The cutoff bounds L (K for the mirrored families).  ``B`` families carry
    both data, ``M`` families only the metric variation.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    mirrored = family.endswith("-")
    comps = []
    for L in range(cutoff + 1):
        c = _component("g", L + 4, L, mirrored)
        if c:
            comps.append(c)
        if family.startswith("B"):
            for K in (L, L + 2, L + 4):
                c = _component("Q", K, L, mirrored)
                if c:
                    comps.append(c)
    return TangentSpaceDescription(family, tuple(comps), cutoff)


def phi_b_kernel_dim(K, L):
    """Kernel dimension of levi_contract = dbar_h = p1_project = 0 on V^{K,L}."""
    rep = ProductRep(K, L)
    n = len(CR_DEFORM.coordinates(rep))
    if n == 0:
        return 0
    M = np.vstack([operator_matrix(levi_contract, CR_DEFORM, OMEGA02, rep),
                   operator_matrix(dbar_h, CR_DEFORM, TWO_FORM, rep),
                   operator_matrix(p1_project, CR_DEFORM, P1_NORMAL, rep)]).real
    return n - int(np.linalg.matrix_rank(M)) if M.size else n


@dataclass(frozen=True)
class ContactVectorField:
    """X_f = f R - #d_H f; ``horizontal`` is the (1,0)-part -#dbar f, the
    (0,1)-part being its conjugate."""

    reeb: EquivariantTensor
    horizontal: EquivariantTensor


def contact_vector_field(f):
    return ContactVectorField(f, sharp(dbar_function(f)).scale(-1))


def cr_action(field_):
    """Linearized action of a contact field on the standard CR structure."""
    return dbar_vector(field_.horizontal).scale(-1)


# ---------------------------------------------------------------------------
# P operator on the frame calculus.  Components use the frame indices of
# _forms: theta=1, e1=2, e1bar=3, e2=4, e2bar=5.

PHI = [((3,), "X1"), ((3,), "X2"), ((5,), "X1"), ((5,), "X2")]
ALPHA = [((3,), "one"), ((5,), "one")]
XI = [((1,), "s"), ((2,), "s")]
XI_P2 = ((4,), "s")
PSI = [((3, 5), "X1"), ((3, 5), "X2")]
BETA = [((3, 5), "one")]
ZETA = [((1, 3), "s"), ((1, 5), "s"), ((2, 3), "s"), ((2, 5), "s"), ((3, 4), "s"),
        ((4, 5), "s")]
COMPAT = [((1, 3, 5), "s"), ((2, 3, 5), "s"), ((3, 4, 5), "s")]

PHI_LABELS = {((3,), "X1"): "e1bar_e1", ((3,), "X2"): "e1bar_e2",
              ((5,), "X1"): "e2bar_e1", ((5,), "X2"): "e2bar_e2"}
PSI_LABELS = {((3, 5), "X1"): "e1bar^e2bar_e1", ((3, 5), "X2"): "e1bar^e2bar_e2"}

HOL_CONTACT = {((2,), "s"): 1.0, ((4,), "s"): -1.0}
D_HOL_CONTACT = fm.invariant_derivative(HOL_CONTACT)
CURVATURE_L = {((4, 5), "one"): -2.0}


def p_operator(frame_rep, x):
    """(phi, alpha, xi) -> (psi, beta, zeta)."""
    d = frame_rep.d
    phi, alpha, xi = fm.keep(x, PHI), fm.keep(x, ALPHA), fm.keep(x, XI + [XI_P2])
    psi = fm.keep(d(phi), PSI)
    beta = fm.keep(fm.add(d(alpha), fm.contract(phi, CURVATURE_L)), BETA)
    zeta = fm.keep(fm.add(d(xi), fm.scale(d(fm.contract(phi, HOL_CONTACT)), -1),
                          fm.contract(phi, D_HOL_CONTACT), fm.wedge(alpha, HOL_CONTACT)), ZETA)
    return fm.add(psi, beta, zeta)


def compatibility_operator(frame_rep, y):
    """(psi, beta, zeta) -> the defect whose vanishing characterizes the image of P."""
    d = frame_rep.d
    psi, beta, zeta = fm.keep(y, PSI), fm.keep(y, BETA), fm.keep(y, ZETA)
    return fm.keep(fm.add(d(zeta), fm.scale(d(fm.contract(psi, HOL_CONTACT)), -1),
                          fm.contract(psi, D_HOL_CONTACT),
                          fm.scale(fm.wedge(beta, HOL_CONTACT), -1)), COMPAT)


def _nullspace(M, dim, tol=1e-9):
    if M.shape[0] == 0:
        return np.eye(dim, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    r = int((s > tol * max(1.0, s[0] if len(s) else 1.0)).sum())
    return vh[r:].conj().T


@dataclass
class PSystem:
    """P restricted to one V^{K,L}.

    ``matrix`` acts on all domain coordinates; ``constrained_basis`` spans
    the subspace phi contracted with the Levi form = 0, and ``restricted``
    drops the P1_2 component of xi.
    """

    K: int
    L: int
    restricted: bool
    frame_rep: object = field(repr=False)
    domain: object = field(repr=False)
    target: object = field(repr=False)
    compat_space: object = field(repr=False)
    matrix: np.ndarray = field(repr=False)
    constraint: np.ndarray = field(repr=False)
    constrained_basis: np.ndarray = field(repr=False)
    compat_matrix: np.ndarray = field(repr=False)

    @property
    def constrained_matrix(self):
        return self.matrix @ self.constrained_basis

    def block(self, rows, cols):
        """Sub-matrix between component lists of the target and domain."""
        r = [i for i, (c, _) in enumerate(self.target.coords) if c in rows]
        c_ = [j for j, (c, _) in enumerate(self.domain.coords) if c in cols]
        return self.matrix[np.ix_(r, c_)]

    def phi_columns(self):
        return [j for j, (c, _) in enumerate(self.domain.coords) if c in PHI]


def build_p_system(K, L, restrict_xi=True):
    if (K + L) % 2:
        raise ValueError("K+L must be even")
    rep = ProductRep(K, L)
    fr = fm.FrameRep(rep)
    dom = fm.Space(rep, PHI + ALPHA + XI + ([] if restrict_xi else [XI_P2]))
    tgt = fm.Space(rep, PSI + BETA + ZETA)
    cc = fm.Space(rep, COMPAT)
    P = dom.matrix(lambda x: p_operator(fr, x), tgt)
    C = tgt.matrix(lambda y: compatibility_operator(fr, y), cc)
    rows = []
    for x in rep.lines_with_sum(4):
        r = np.zeros(dom.dim)
        r[dom.pos[(((5,), "X1"), x)]] = 1
        r[dom.pos[(((3,), "X2"), x)]] = 1
        rows.append(r)
    Mc = np.array(rows).reshape(len(rows), dom.dim)
    return PSystem(K, L, restrict_xi, fr, dom, tgt, cc, P, Mc, _nullspace(Mc, dom.dim), C)


def _rank_with_gap(M, rel_tol=1e-9):
    if M.size == 0:
        return 0, float("inf")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0, float("inf")
    r = int((s > rel_tol * s[0]).sum())
    gap = float("inf") if r == len(s) or s[r] == 0 else float(s[r - 1] / s[r])
    if r == 0:
        gap = float("inf")
    return r, gap


@dataclass(frozen=True)
class RankCertificate:
    K: int
    L: int
    domain_dim: int
    constrained_dim: int
    image_rank: int
    target_dim: int
    compat_rank: int
    compat_kernel_dim: int
    image_gap: float
    compat_gap: float
    composition_norm: float
    holds: bool

    def to_dict(self):
        return dict(self.__dict__)


GAP_THRESHOLD = 1e6


def verify_p_surjectivity(K, L, restrict_xi=True):
    """Compare rank P with dim ker C on V^{K,L}, certifying the numerical ranks."""
    ps = build_p_system(K, L, restrict_xi)
    PN = ps.constrained_matrix
    C = ps.compat_matrix
    rp, gp = _rank_with_gap(PN)
    rc, gc = _rank_with_gap(C)
    comp = float(np.abs(C @ PN).max()) if C.size and PN.size else 0.0
    kc = ps.target.dim - rc
    holds = rp == kc and comp < 1e-9 and gp >= GAP_THRESHOLD and gc >= GAP_THRESHOLD
    return holds, RankCertificate(K, L, ps.domain.dim, PN.shape[1], rp, ps.target.dim, rc, kc,
                                  gp, gc, comp, holds)


# Sub-complexes of dbar computing H^1 of L and of the two summands of
# Omega^1 (x) L on the twistor space, as (degree 0, 1, 2) component lists.
SUBCOMPLEXES = {
    "L": ([((), "s")], [((3,), "s"), ((5,), "s")], [((3, 5), "s")]),
    "Omega1_P1_L": ([((2,), "s")], [((2, 3), "s"), ((2, 5), "s")], [((2, 3, 5), "s")]),
    "Omega1_P2_L": ([((4,), "s")], [((3, 4), "s"), ((4, 5), "s")], [((3, 4, 5), "s")]),
}


def cohomology_positions(K, L, bundle="L", min_weight=0):
    """H^1 of the chosen sub-complex on V^{K,L}, graded by S1 weight.

    Returns ``{weight: dimension}`` for weights >= ``min_weight`` with
    nonzero cohomology.  The differential preserves S1 weight, so the
    complex splits weight by weight.
    """
    if bundle not in SUBCOMPLEXES:
        raise ValueError(f"unknown bundle {bundle!r}")
    rep = ProductRep(K, L)
    fr = fm.FrameRep(rep)
    spaces = [fm.Space(rep, comps) for comps in SUBCOMPLEXES[bundle]]
    D0 = spaces[0].matrix(fr.d, spaces[1], strict=False)
    D1 = spaces[1].matrix(fr.d, spaces[2], strict=False)
    out = {}
    weights = {spaces[1].s1_weight(i) for i in range(spaces[1].dim)}
    for wgt in sorted(weights):
        if wgt < min_weight:
            continue
        idx = [[i for i in range(S.dim) if S.s1_weight(i) == wgt] for S in spaces]
        d0 = D0[np.ix_(idx[1], idx[0])]
        d1 = D1[np.ix_(idx[2], idx[1])]
        h = len(idx[1]) - _rank_with_gap(d0)[0] - _rank_with_gap(d1)[0]
        if h:
            out[wgt] = h
    return out


def image_covers_cohomology(K, L, bundle, pure_phi=False, min_weight=0):
    """Whether the image of P, read in the sub-complex's degree-1 slot,
    together with the coboundaries spans every cocycle of weight >= min_weight."""
    ps = build_p_system(K, L)
    comps = SUBCOMPLEXES[bundle]
    deg1 = {"L": [((1, 3), "s"), ((1, 5), "s")],
            "Omega1_P1_L": comps[1], "Omega1_P2_L": comps[1]}[bundle]
    rep = ps.domain.rep
    fr = ps.frame_rep
    S0, S1, S2 = (fm.Space(rep, c) for c in comps)
    D0 = S0.matrix(fr.d, S1, strict=False)
    D1 = S1.matrix(fr.d, S2, strict=False)
    basis = ps.constrained_basis
    if pure_phi:
        cols = ps.phi_columns()
        sel = np.zeros((ps.domain.dim, len(cols)))
        sel[cols, range(len(cols))] = 1
        basis = _nullspace(ps.constraint[:, cols], len(cols))
        basis = sel @ basis
    image = ps.matrix @ basis
    # the theta-components of zeta carry the same weights as the dbar of L
    img = np.zeros((S1.dim, image.shape[1]), dtype=complex)
    for i, (cc, xx) in enumerate(S1.coords):
        key = (deg1[S1.comps.index(cc)], xx)
        if key in ps.target.pos:
            img[i] = image[ps.target.pos[key]]
    keep1 = [i for i in range(S1.dim) if S1.s1_weight(i) >= min_weight]
    keep0 = [i for i in range(S0.dim) if S0.s1_weight(i) >= min_weight]
    keep2 = [i for i in range(S2.dim) if S2.s1_weight(i) >= min_weight]
    B = D0[np.ix_(keep1, keep0)]
    Zb = _nullspace(D1[np.ix_(keep2, keep1)], len(keep1))
    I = img[keep1]
    span = np.hstack([B, I]) if B.size else I
    r1 = _rank_with_gap(span)[0]
    r2 = _rank_with_gap(np.hstack([span, Zb]))[0]
    return r1 == r2
