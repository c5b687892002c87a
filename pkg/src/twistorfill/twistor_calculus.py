"""Equivariant tensor calculus on the twistor space Sp1Sp1/U1.

A section of a homogeneous bundle is stored as a finitely supported map
``(K, L, k, l, label) -> coefficient``.  Each coefficient is the value of
the U1-equivariant map on the weight line V(k,l) of V^{K,L}; since every
weight space is one-dimensional this loses nothing.

The frame conventions are: ``e1``, ``e2`` span the (1,0)-forms, ``e1bar``,
``e2bar`` the (0,1)-forms, ``e_1``, ``e_2`` the dual (1,0)-vectors,
``theta`` the real contact direction and ``sigma`` a basis vector of the
weight-2 isotropy line defining L = O(0,2).  A CR deformation entry
``e1bar_e2`` is the component phi^2_{1bar} (form index barred, vector index
upper).
"""

from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from . import _scalars as sc
from .rep_core import ProductRep, g0_line_factor, real_structure_factor


@dataclass(frozen=True)
class FiberSpec:
    """Fiber of a homogeneous bundle: labels, isotropy weights, S1 offsets.

    ``u1_weights[i]`` is the isotropy weight of ``basis_labels[i]``; every
    coefficient on that label lives on lines with k+l equal to it.
    ``s1_offsets`` is ``None`` for fibers that are not S1-graded.
    """

    name: str
    basis_labels: tuple
    u1_weights: tuple
    s1_offsets: tuple = None

    def __post_init__(self):
        if len(self.basis_labels) != len(self.u1_weights):
            raise ValueError("one isotropy weight per basis label is required")
        if self.s1_offsets is not None and len(self.s1_offsets) != len(self.basis_labels):
            raise ValueError("one S1 offset per basis label is required")

    @property
    def u1_weight(self):
        """Common isotropy weight; raises when weights differ per label."""
        ws = set(self.u1_weights)
        if len(ws) != 1:
            raise ValueError(f"fiber {self.name} has per-label weights {self.u1_weights}")
        return ws.pop()

    def weight_of(self, label):
        return self.u1_weights[self.basis_labels.index(label)]

    def offset_of(self, label):
        if self.s1_offsets is None:
            raise ValueError(f"fiber {self.name} carries no S1 grading")
        return self.s1_offsets[self.basis_labels.index(label)]

    def coordinates(self, rep):
        """``(label, (k, l))`` pairs spanning the fiber's coefficients on ``rep``."""
        return [(lab, x) for lab, w in zip(self.basis_labels, self.u1_weights)
                for x in rep.lines_with_sum(w)]


def _fiber(name, spec):
    labels = tuple(s[0] for s in spec)
    weights = tuple(s[1] for s in spec)
    offsets = None if spec[0][2] is None else tuple(s[2] for s in spec)
    return FiberSpec(name, labels, weights, offsets)


# label, isotropy weight, S1 offset
FUNCTIONS = _fiber("Functions", [("1", 0, 0)])
CR_DEFORM = _fiber("CRDeform", [("e1bar_e1", 4, -4), ("e1bar_e2", 4, -2),
                                ("e2bar_e1", 4, -2), ("e2bar_e2", 4, 0)])
TWO_FORM = _fiber("TwoForm", [("e1bar^e2bar_e1", 6, -4), ("e1bar^e2bar_e2", 6, -2)])
OMEGA01 = _fiber("Omega01", [("e1bar", 2, -2), ("e2bar", 2, 0)])
OMEGA02 = _fiber("Omega02", [("e1bar^e2bar", 4, -2)])
T10 = _fiber("T10", [("e_1", 2, -2), ("e_2", 2, 0)])
P1_NORMAL = _fiber("P1Normal", [("p1", 4, None)])
CONTACT_FORMS = _fiber("ContactForms", [("theta", 0, 0), ("e1", -2, 2), ("e2", -2, 0)])
CONTACT_FORMS_L = _fiber("ContactFormsL", [("theta.sigma", 2, 0), ("e1.sigma", 0, 2),
                                           ("e2.sigma", 0, 0)])
OMEGA01_CONTACT_L = _fiber("Omega01ContactFormsL", [
    ("e1bar.theta.sigma", 4, -2), ("e2bar.theta.sigma", 4, 0),
    ("e1bar.e1.sigma", 2, 0), ("e2bar.e1.sigma", 2, 2),
    ("e1bar.e2.sigma", 2, -2), ("e2bar.e2.sigma", 2, 0)])
OMEGA02_CONTACT_L = _fiber("Omega02ContactFormsL", [
    ("e1bar^e2bar.theta.sigma", 6, -2), ("e1bar^e2bar.e1.sigma", 4, 0),
    ("e1bar^e2bar.e2.sigma", 4, -2)])

FIBERS = {f.name: f for f in (FUNCTIONS, CR_DEFORM, TWO_FORM, OMEGA01, OMEGA02, T10,
                              P1_NORMAL, CONTACT_FORMS, CONTACT_FORMS_L,
                              OMEGA01_CONTACT_L, OMEGA02_CONTACT_L)}


def _check_key(fiber, key):
    K, L, k, l, label = key
    if label not in fiber.basis_labels:
        raise ValueError(f"label {label!r} is not a basis label of {fiber.name}")
    if K < 0 or L < 0 or (K + L) % 2:
        raise ValueError(f"V^{{{K},{L}}} is not an admissible representation")
    if abs(k) > K or abs(l) > L or (K - k) % 2 or (L - l) % 2:
        raise ValueError(f"({k},{l}) is not a weight of V^{{{K},{L}}}")
    w = fiber.weight_of(label)
    if k + l != w:
        raise ValueError(f"entry {key} lies off the k+l={w} lines of {fiber.name}")


@dataclass(frozen=True)
class EquivariantTensor:
    """Finitely supported coefficient map over one fiber."""

    fiber: FiberSpec
    entries: MappingProxyType = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, val in dict(self.entries).items():
            key = (int(key[0]), int(key[1]), int(key[2]), int(key[3]), str(key[4]))
            _check_key(self.fiber, key)
            clean[key] = val
        object.__setattr__(self, "entries", MappingProxyType(clean))

    def __len__(self):
        return len(self.entries)

    def get(self, K, L, k, l, label, default=0j):
        return self.entries.get((K, L, k, l, label), default)

    @property
    def exact(self):
        return any(sc.is_exact(v) for v in self.entries.values())

    def reps(self):
        return sorted({(K, L) for (K, L, _, _, _) in self.entries})

    def block(self, K, L):
        return EquivariantTensor(self.fiber, {key: v for key, v in self.entries.items()
                                              if key[0] == K and key[1] == L})

    def map_values(self, fn):
        return EquivariantTensor(self.fiber, {key: fn(v) for key, v in self.entries.items()})

    def __add__(self, other):
        if other.fiber != self.fiber:
            raise ValueError("cannot add tensors over different fibers")
        out = dict(self.entries)
        for key, v in other.entries.items():
            out[key] = out[key] + v if key in out else v
        return EquivariantTensor(self.fiber, _drop_exact_zeros(out))

    def __neg__(self):
        return self.map_values(lambda v: -v)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self.map_values(lambda v: c * v)

    def pruned(self, tol=0.0):
        return EquivariantTensor(self.fiber, {key: v for key, v in self.entries.items()
                                              if not sc.is_zero(v, tol)})

    def to_complex(self):
        return self.map_values(sc.to_complex)

    def to_exact(self):
        return self.map_values(sc.to_exact)

    def max_abs(self):
        return max((sc.magnitude(v) for v in self.entries.values()), default=0.0)

    def is_zero(self, tol=0.0):
        return all(sc.is_zero(v, tol) for v in self.entries.values())

    def to_vector(self, rep):
        """Dense complex vector in ``fiber.coordinates(rep)`` order."""
        coords = self.fiber.coordinates(rep)
        return np.array([sc.to_complex(self.get(rep.K, rep.L, x[0], x[1], lab))
                         for lab, x in coords], dtype=complex)

    @classmethod
    def from_vector(cls, fiber, rep, vec, tol=0.0):
        coords = fiber.coordinates(rep)
        return cls(fiber, {(rep.K, rep.L, x[0], x[1], lab): complex(v)
                           for (lab, x), v in zip(coords, vec) if abs(v) > tol})

    def equals(self, other, tol=0.0):
        """Entrywise comparison; exact pairs compare exactly, others within ``tol``."""
        if other.fiber != self.fiber:
            return False
        for key in set(self.entries) | set(other.entries):
            a, b = self.entries.get(key, 0j), other.entries.get(key, 0j)
            if sc.is_exact(a) and sc.is_exact(b):
                if a != b:
                    return False
            elif abs(sc.to_complex(a) - sc.to_complex(b)) > tol:
                return False
        return True


def _drop_exact_zeros(d):
    return {k: v for k, v in d.items() if not (sc.is_exact(v) and v == sc.zero(sc.EXACT))
            and not (not sc.is_exact(v) and v == 0)}


def _accumulate(out, key, val):
    out[key] = out[key] + val if key in out else val


def _require(t, fiber, opname):
    if t.fiber != fiber:
        raise ValueError(f"{opname} expects a tensor over {fiber.name}, got {t.fiber.name}")


def _in_rep(K, L, k, l):
    return abs(k) <= K and abs(l) <= L


@dataclass(frozen=True)
class LeviData:
    """Curvature pairing F = -(e1^e1bar - e2^e2bar) of the contact distribution.

    ``matrix[i][j]`` is F_{ibar j}.  The sign on the e1 term is fixed at +1;
    only signs of obstruction coefficients depend on that choice.
    """

    orientation: int = 1

    @property
    def matrix(self):
        return np.array([[self.orientation, 0], [0, -self.orientation]])

    @property
    def nondegenerate(self):
        return abs(np.linalg.det(self.matrix)) > 0


@dataclass(frozen=True)
class HolContactSymbol:
    """Algebraic model (e1 - e2) (x) sigma of the holomorphic contact form.

    ``coefficients`` maps (1,0)-form labels to their coefficient; on
    (1,0)-vectors its kernel is spanned by e_1 + e_2.
    """

    coefficients: tuple = (("e1", 1), ("e2", -1))

    def evaluate(self, vector_label):
        """eta^c(e_j) as the coefficient of sigma."""
        d = dict(self.coefficients)
        return d.get("e" + vector_label[-1], 0)


def complex_hessian(f):
    """The complex hessian of a function as a CR deformation.

    phi^1_{1bar} = -i w Y1^2, phi^2_{1bar} = i w Y2 Y1, phi^1_{2bar} = -i w Y1 Y2,
    phi^2_{2bar} = i w Y2^2; with Y-entries equal to 1 each term is a shift.
    """
    _require(f, FUNCTIONS, "complex_hessian")
    out = {}
    for (K, L, a, b, _), w in f.entries.items():
        for (dk, dl, label, mult) in ((4, 0, "e1bar_e1", sc.times_minus_i),
                                      (2, 2, "e1bar_e2", sc.times_i),
                                      (2, 2, "e2bar_e1", sc.times_minus_i),
                                      (0, 4, "e2bar_e2", sc.times_i)):
            k, l = a + dk, b + dl
            if _in_rep(K, L, k, l):
                _accumulate(out, (K, L, k, l, label), mult(w))
    return EquivariantTensor(CR_DEFORM, _drop_exact_zeros(out))


def dbar_h(phi):
    """Tangential dbar of a CR deformation, valued in Omega^{0,2} (x) T^{1,0}.

    The e_j coefficient at (k,l) is phi^j_{2bar}(k-2,l) - phi^j_{1bar}(k,l-2).
    """
    _require(phi, CR_DEFORM, "dbar_h")
    out = {}
    for (K, L, a, b, label), w in phi.entries.items():
        form, vec = label.split("_")
        target = "e1bar^e2bar_" + vec
        if form == "e2bar":
            k, l, val = a + 2, b, w
        else:
            k, l, val = a, b + 2, -w
        if _in_rep(K, L, k, l):
            _accumulate(out, (K, L, k, l, target), val)
    return EquivariantTensor(TWO_FORM, _drop_exact_zeros(out))


def levi_contract(phi):
    """phi contracted with the Levi form: phi^1_{2bar} + phi^2_{1bar}."""
    _require(phi, CR_DEFORM, "levi_contract")
    out = {}
    for (K, L, k, l, label), w in phi.entries.items():
        if label in ("e2bar_e1", "e1bar_e2"):
            _accumulate(out, (K, L, k, l, "e1bar^e2bar"), w)
    return EquivariantTensor(OMEGA02, _drop_exact_zeros(out))


_P1_SIGNS = {"e1bar_e1": 1, "e2bar_e1": 1, "e1bar_e2": -1, "e2bar_e2": -1}


def p1_project(phi):
    """phi^1_{1bar} + phi^1_{2bar} - phi^2_{1bar} - phi^2_{2bar}, linewise."""
    _require(phi, CR_DEFORM, "p1_project")
    out = {}
    for (K, L, k, l, label), w in phi.entries.items():
        _accumulate(out, (K, L, k, l, "p1"), w if _P1_SIGNS[label] > 0 else -w)
    return EquivariantTensor(P1_NORMAL, _drop_exact_zeros(out))


def sharp(alpha):
    """Levi duality from (0,1)-forms to (1,0)-vectors: e1bar -> -i e_1, e2bar -> i e_2."""
    _require(alpha, OMEGA01, "sharp")
    out = {}
    for (K, L, k, l, label), w in alpha.entries.items():
        if label == "e1bar":
            out[(K, L, k, l, "e_1")] = sc.times_minus_i(w)
        else:
            out[(K, L, k, l, "e_2")] = sc.times_i(w)
    return EquivariantTensor(T10, out)


def sharp_inverse(v):
    """Inverse of :func:`sharp`: e_1 -> i e1bar, e_2 -> -i e2bar."""
    _require(v, T10, "sharp_inverse")
    out = {}
    for (K, L, k, l, label), w in v.entries.items():
        if label == "e_1":
            out[(K, L, k, l, "e1bar")] = sc.times_i(w)
        else:
            out[(K, L, k, l, "e2bar")] = sc.times_minus_i(w)
    return EquivariantTensor(OMEGA01, out)


def dbar_function(f):
    """(0,1)-differential of a function: w Y1 on e1bar, w Y2 on e2bar."""
    _require(f, FUNCTIONS, "dbar_function")
    out = {}
    for (K, L, a, b, _), w in f.entries.items():
        if _in_rep(K, L, a + 2, b):
            _accumulate(out, (K, L, a + 2, b, "e1bar"), w)
        if _in_rep(K, L, a, b + 2):
            _accumulate(out, (K, L, a, b + 2, "e2bar"), w)
    return EquivariantTensor(OMEGA01, out)


def dbar_vector(v):
    """dbar_H of a (1,0)-vector field: e_j coefficient composed with Y_i."""
    _require(v, T10, "dbar_vector")
    out = {}
    for (K, L, a, b, label), w in v.entries.items():
        j = label[-1]
        if _in_rep(K, L, a + 2, b):
            _accumulate(out, (K, L, a + 2, b, "e1bar_e" + j), w)
        if _in_rep(K, L, a, b + 2):
            _accumulate(out, (K, L, a, b + 2, "e2bar_e" + j), w)
    return EquivariantTensor(CR_DEFORM, _drop_exact_zeros(out))


def s1_weight(key, fiber=None):
    """S1 weight k + offset(label) of an entry key ``(K, L, k, l, label)``.

    The fiber is inferred from the label when not given.
    """
    K, L, k, l, label = key
    if fiber is None:
        matches = [f for f in FIBERS.values() if label in f.basis_labels]
        if not matches:
            raise ValueError(f"unknown basis label {label!r}")
        fiber = matches[0]
    return k + fiber.offset_of(label)


def _rep_of(K, L):
    if (K + L) % 2:
        raise ValueError("the real structure requires K+L even")
    return ProductRep(K, L)


def _exact_like(w, value):
    return value if sc.is_exact(w) else sc.to_complex(value)


def tau_pullback(t, kind="function"):
    """Pull back by the real structure of the twistor space.

    ``kind="function"``: w -> w o rho(g0^{-1}).
    ``kind="cr"``: w^j_{ibar} -> conj(w^j_{ibar} o rho(g0^{-1}) o tau_rho), the
    entrywise conjugation being the only place conjugation enters.
    """
    out = {}
    if kind == "function":
        _require(t, FUNCTIONS, "tau_pullback")
        for (K, L, a, b, lab), w in t.entries.items():
            rep = _rep_of(K, L)
            c = g0_line_factor(rep, -a, -b)
            _accumulate(out, (K, L, -a, -b, lab), _exact_like(w, c) * w)
        return EquivariantTensor(FUNCTIONS, _drop_exact_zeros(out))
    if kind in ("cr", "CR-deformation"):
        _require(t, CR_DEFORM, "tau_pullback")
        for (K, L, k, l, lab), w in t.entries.items():
            rep = _rep_of(K, L)
            tf = real_structure_factor(K, k) * real_structure_factor(L, l)
            c = sc.gaussian(tf) * g0_line_factor(rep, -k, -l)
            _accumulate(out, (K, L, k, l, lab), sc.conj(_exact_like(w, c) * w))
        return EquivariantTensor(CR_DEFORM, _drop_exact_zeros(out))
    raise ValueError(f"unknown pullback kind {kind!r}")


def conjugate_function(f):
    """Complex conjugate of a function: w -> conj(w o tau_rho)."""
    _require(f, FUNCTIONS, "conjugate_function")
    out = {}
    for (K, L, a, b, lab), w in f.entries.items():
        _rep_of(K, L)
        tf = real_structure_factor(K, -a) * real_structure_factor(L, -b)
        val = sc.conj(w) * (sc.gaussian(tf) if sc.is_exact(w) else float(tf))
        _accumulate(out, (K, L, -a, -b, lab), val)
    return EquivariantTensor(FUNCTIONS, _drop_exact_zeros(out))


def random_function(reps, rng, real=True, odd_under_tau=True, exact=False, scale=3):
    """Random function supported on ``reps``.

    ``real`` imposes conj f = f and ``odd_under_tau`` imposes tau* f = -f,
    by averaging over the two commuting involutions.  Exact mode draws
    small Gaussian integers, so the projected result is Gaussian rational.
    """
    entries = {}
    for (K, L) in reps:
        rep = _rep_of(K, L)
        for (k, l) in rep.lines_with_sum(0):
            re, im = (int(x) for x in rng.integers(-scale, scale + 1, size=2))
            entries[(K, L, k, l, "1")] = sc.gaussian(re, im) if exact else complex(re, im) + complex(*rng.normal(size=2))
    f = EquivariantTensor(FUNCTIONS, entries)
    half = sc.gaussian(1, 0) / 2 if exact else 0.5
    if real:
        f = (f + conjugate_function(f)).scale(half)
    if odd_under_tau:
        f = (f - tau_pullback(f, "function")).scale(half)
    return f


def random_tensor(fiber, reps, rng, exact=False, scale=3):
    """Random tensor with every admissible coordinate populated."""
    entries = {}
    for (K, L) in reps:
        rep = _rep_of(K, L)
        for lab, (k, l) in fiber.coordinates(rep):
            re, im = (int(x) for x in rng.integers(-scale, scale + 1, size=2))
            entries[(K, L, k, l, lab)] = sc.gaussian(re, im) if exact else complex(*rng.normal(size=2))
    return EquivariantTensor(fiber, entries)


def operator_matrix(op, fiber_in, fiber_out, rep):
    """Dense matrix of a linear tensor operator on one representation."""
    cin = fiber_in.coordinates(rep)
    cout = fiber_out.coordinates(rep)
    pos = {(lab, x): i for i, (lab, x) in enumerate(cout)}
    M = np.zeros((len(cout), len(cin)), dtype=complex)
    for j, (lab, x) in enumerate(cin):
        unit = EquivariantTensor(fiber_in, {(rep.K, rep.L, x[0], x[1], lab): 1.0 + 0j})
        for (K, L, k, l, lab2), v in op(unit).entries.items():
            M[pos[(lab2, (k, l))], j] += sc.to_complex(v)
    return M


def negative_part(t):
    """Entries with strictly negative S1 weight."""
    return EquivariantTensor(t.fiber, {key: v for key, v in t.entries.items()
                                       if s1_weight(key, t.fiber) < 0})


def s1_component(t, pred):
    return EquivariantTensor(t.fiber, {key: v for key, v in t.entries.items()
                                       if pred(s1_weight(key, t.fiber))})
