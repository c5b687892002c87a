"""Left-invariant frame calculus on SU2 x SU2 for homogeneous bundles.

Lie algebra basis (index): 0 Z = H1+H2 (isotropy), 1 R = H1-H2, 2 X1,
3 Y1, 4 X2, 5 Y2.  The dual frame is z, theta, e1, e1bar, e2, e2bar.  A
form is a dict ``{(monomial, label): coefficient vector}`` where the
monomial is a sorted tuple of frame indices, the label names the fiber
vector (``one``, ``X1``, ``X2`` for e_1, e_2, or ``s`` for sigma), and the
vector holds the coefficients on the weight lines of one V^{K,L}.

Coefficients are differentiated by A.w = -rho(A)^T w.  The fiber vectors
carry connection forms pulling them back along the isotropy direction; for
sigma the connection is 2z - 2theta, whose curvature is -2 e2 ^ e2bar.
Every z-component must cancel on equivariant sections, which ``d`` checks.
"""

import numpy as np

from .rep_core import ladder_matrix

Z, THETA, E1, E1B, E2, E2B = range(6)
BARRED = frozenset((E1B, E2B))
VECTOR_OF_FORM = {E1: "X1", E2: "X2"}


def _bracket_table():
    c = {}

    def put(a, b, vec):
        c[(a, b)] = vec
        c[(b, a)] = {k: -v for k, v in vec.items()}

    h1 = {Z: 0.5, THETA: 0.5}
    h2 = {Z: 0.5, THETA: -0.5}
    put(Z, E1, {E1: 2}); put(Z, E1B, {E1B: -2}); put(Z, E2, {E2: 2}); put(Z, E2B, {E2B: -2})
    put(THETA, E1, {E1: 2}); put(THETA, E1B, {E1B: -2})
    put(THETA, E2, {E2: -2}); put(THETA, E2B, {E2B: 2})
    put(E1, E1B, h1); put(E2, E2B, h2)
    return c


_BRACKETS = _bracket_table()
FRAME_WEIGHT = {Z: 0, THETA: 0, E1: -2, E1B: 2, E2: -2, E2B: 2}
LABEL_WEIGHT = {"one": 0, "X1": 2, "X2": 2, "s": 2}
FRAME_S1_OFFSET = {THETA: 0, E1: 2, E1B: -2, E2: 0, E2B: 0}
LABEL_S1_OFFSET = {"one": 0, "X1": -2, "X2": 0, "s": 0}
CONNECTION = {"one": {}, "X1": {Z: 2}, "X2": {Z: 2}, "s": {Z: 2, THETA: -2}}


def sort_with_sign(seq):
    """Sign of the sorting permutation and the sorted tuple; (0, None) on repeats."""
    if len(set(seq)) < len(seq):
        return 0, None
    arr = list(seq)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


def _d_frame(a):
    out = {}
    for b in range(6):
        for c in range(b + 1, 6):
            v = _BRACKETS.get((b, c), {}).get(a, 0)
            if v:
                out[(b, c)] = -v
    return out


_D_FRAME = {a: _d_frame(a) for a in range(6)}


def _d_monomial(mono):
    out = {}
    for r, a in enumerate(mono):
        for (b, c), v in _D_FRAME[a].items():
            sg, m = sort_with_sign(list(mono[:r]) + [b, c] + list(mono[r + 1:]))
            if sg:
                out[m] = out.get(m, 0) + (-1) ** r * sg * v
    return out


def accumulate(out, key, vec):
    out[key] = out[key] + vec if key in out else vec.copy()


def add(*forms):
    out = {}
    for f in forms:
        for k, v in f.items():
            accumulate(out, k, v)
    return out


def scale(form, c):
    return {k: c * v for k, v in form.items()}


def keep(form, comps):
    comps = set(comps)
    return {k: v for k, v in form.items() if k in comps}


class FrameRep:
    """Derivative matrices of V^{K,L} in the frame basis above."""

    def __init__(self, rep):
        self.rep = rep
        m = {w: ladder_matrix(rep, w, dtype=float).toarray() for w in
             ("H1", "H2", "X1", "X2", "Y1", "Y2")}
        self.rho = {Z: m["H1"] + m["H2"], THETA: m["H1"] - m["H2"], E1: m["X1"],
                    E1B: m["Y1"], E2: m["X2"], E2B: m["Y2"]}
        self.deriv = {a: -mat.T for a, mat in self.rho.items()}

    def d(self, form, check=True):
        """Covariant exterior derivative; z-components are checked and dropped."""
        out = {}
        for (mono, lab), c in form.items():
            for a in range(6):
                sg, m = sort_with_sign([a] + list(mono))
                if sg:
                    accumulate(out, (m, lab), sg * (self.deriv[a] @ c))
            for m, v in _d_monomial(mono).items():
                accumulate(out, (m, lab), v * c)
            for a, g in CONNECTION[lab].items():
                sg, m = sort_with_sign([a] + list(mono))
                if sg:
                    accumulate(out, (m, lab), sg * g * c)
        res = {}
        for (m, lab), v in out.items():
            if Z in m:
                if check and not np.allclose(v, 0, atol=1e-9):
                    raise AssertionError(f"isotropy component {m}/{lab} does not cancel")
                continue
            if np.any(v != 0):
                res[(m, lab)] = v
        return res


def constant_form(frame_rep, cform):
    """Broadcast a left-invariant form to coefficient vectors on one rep."""
    n = frame_rep.rep.dim
    return {k: np.full(n, v, dtype=complex) for k, v in cform.items()}


def invariant_derivative(cform):
    """d of a left-invariant form (no coefficient derivatives)."""
    from .rep_core import ProductRep
    triv = FrameRep(ProductRep(0, 0))
    res = triv.d({k: np.array([complex(v)]) for k, v in cform.items()})
    return {k: complex(v[0]) for k, v in res.items()}


def contract(vector_form, cform):
    """Derivation substituting e^j -> vector_form^j in a left-invariant form.

    ``vector_form`` is ``{(monomial, Xj): coefficient vector}`` (a form with
    values in T^{1,0}); ``cform`` is ``{(monomial, label): scalar}``.
    """
    out = {}
    for (mono, lab), cv in cform.items():
        for r, a in enumerate(mono):
            if a not in VECTOR_OF_FORM:
                continue
            for (m2, xl), pv in vector_form.items():
                if xl != VECTOR_OF_FORM[a]:
                    continue
                sg, m = sort_with_sign(list(mono[:r]) + list(m2) + list(mono[r + 1:]))
                if sg:
                    accumulate(out, (m, lab), sg * cv * pv)
    return out


def wedge(form, cform):
    """form ^ cform for a scalar-valued form and a left-invariant L-valued one."""
    out = {}
    for (m1, l1), c in form.items():
        for (m2, l2), v in cform.items():
            lab = l2 if l1 == "one" else l1
            sg, m = sort_with_sign(list(m1) + list(m2))
            if sg:
                accumulate(out, (m, lab), sg * v * c)
    return out


def component_weight(comp):
    mono, lab = comp
    return sum(FRAME_WEIGHT[a] for a in mono) + LABEL_WEIGHT[lab]


def component_s1_offset(comp):
    mono, lab = comp
    return sum(FRAME_S1_OFFSET[a] for a in mono) + LABEL_S1_OFFSET[lab]


class Space:
    """Coordinates (component, weight line) of a list of form components."""

    def __init__(self, rep, comps):
        self.rep = rep
        self.comps = list(comps)
        self.coords = [(c, x) for c in self.comps
                       for x in rep.lines_with_sum(component_weight(c))]
        self.pos = {c: i for i, c in enumerate(self.coords)}
        self.dim = len(self.coords)

    def s1_weight(self, i):
        c, x = self.coords[i]
        return x[0] + component_s1_offset(c)

    def unit(self, i):
        c, x = self.coords[i]
        v = np.zeros(self.rep.dim, dtype=complex)
        v[self.rep.index(*x)] = 1
        return {c: v}

    def read(self, form, strict=True):
        out = np.zeros(self.dim, dtype=complex)
        lines = self.rep.lines
        for c, v in form.items():
            for j in np.nonzero(v)[0]:
                key = (c, lines[j])
                if key in self.pos:
                    out[self.pos[key]] += v[j]
                elif strict and c in self.comps and abs(v[j]) > 1e-12:
                    raise AssertionError(f"coefficient on {key} violates the weight constraint")
        return out

    def matrix(self, op, target, strict=True):
        M = np.zeros((target.dim, self.dim), dtype=complex)
        for i in range(self.dim):
            M[:, i] = target.read(op(self.unit(i)), strict)
        return M
