"""Dimensions of line-bundle cohomology on products of projective spaces.

Everything here is exact integer arithmetic.  The non-split bundle
Omega' (x) L is handled through its extension sequence, with the connecting
maps assembled explicitly from Kunneth components and their ranks
computed over the integers.
"""

import itertools
import re
from dataclasses import dataclass
from math import comb

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from .errors import UnsupportedBundle


def h_dim(n, q, k):
    """dim H^q(P^n, O(k)) by Bott's formula."""
    if n < 1 or not 0 <= q <= n:
        raise ValueError("need n >= 1 and 0 <= q <= n")
    if q == 0:
        return comb(n + k, n) if k >= 0 else 0
    if q == n:
        return comb(-k - 1, n) if k <= -n - 1 else 0
    return 0


@dataclass(frozen=True)
class LineBundle:
    """O(a, b, ...) on a product of projective spaces of the given dimensions."""

    base: tuple
    twist: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(n) for n in self.base))
        object.__setattr__(self, "twist", tuple(int(a) for a in self.twist))
        if len(self.base) != len(self.twist):
            raise ValueError("one twist per projective factor is required")
        if any(n < 1 for n in self.base):
            raise ValueError("projective factors need dimension >= 1")

    @property
    def dimension(self):
        return sum(self.base)


def _kunneth_components(bundle, q):
    """Degree splittings (q_1, ..., q_r) of q with nonzero factor cohomology."""
    for degs in itertools.product(*(range(n + 1) for n in bundle.base)):
        if sum(degs) == q:
            dims = [h_dim(n, d, a) for n, d, a in zip(bundle.base, degs, bundle.twist)]
            prod = 1
            for x in dims:
                prod *= x
            if prod:
                yield degs, dims, prod


def kunneth_h_dim(bundle, q):
    """dim H^q of a line bundle on a product, by the Kunneth formula."""
    if not 0 <= q <= bundle.dimension:
        return 0
    return sum(p for _, _, p in _kunneth_components(bundle, q))


P1xP1 = (1, 1)


def descent_twist(name, k):
    """Twist of E (x) O(k,-k) on P1 x P1 for the split line bundles E."""
    table = {"O": (k, -k), "L": (k, 2 - k), "Omega1_P1_L": (k - 2, 2 - k),
             "Omega1_P2_L": (k, -k)}
    if name not in table:
        raise UnsupportedBundle(f"no line-bundle model for {name!r}")
    return table[name]


SUPPORTED_BUNDLES = ("O", "L", "Omega1_P1_L", "Omega1_P2_L", "OmegaPrime_L")


def _index(bundle, q):
    """Basis of H^q: list of (kunneth degrees, multi-index) with offsets."""
    out = {}
    pos = 0
    for degs, dims, prod in _kunneth_components(bundle, q):
        out[degs] = (pos, dims)
        pos += prod
    return out, pos


def _cup_omega(src, q, factor, sign):
    """Cup product with the Kahler class of one P1 factor, H^q(src) -> H^{q+1}(dst).

    The P1 factor map H^0(O(a)) -> H^1(O(a-2)) is an isomorphism for a = 0
    and zero otherwise; other factors carry the identity.
    """
    dst = LineBundle(src.base, tuple(a - 2 if i == factor else a
                                     for i, a in enumerate(src.twist)))
    sidx, sdim = _index(src, q)
    didx, ddim = _index(dst, q + 1)
    entries = []
    if src.twist[factor] == 0:
        for degs, (spos, sdims) in sidx.items():
            if degs[factor] != 0:
                continue
            tdeg = tuple(d + 1 if i == factor else d for i, d in enumerate(degs))
            if tdeg not in didx:
                continue
            dpos, ddims = didx[tdeg]
            n = 1
            for i, x in enumerate(sdims):
                if i != factor:
                    n *= x
            # the factor space is one-dimensional on both sides
            entries.extend((dpos + j, spos + j, sign) for j in range(n))
    return dst, entries, ddim, sdim


def _integer_rank(nrows, ncols, entries):
    if nrows == 0 or ncols == 0 or not entries:
        return 0
    rows = {}
    for r, c, v in entries:
        rows.setdefault(r, {})
        rows[r][c] = rows[r].get(c, 0) + v
    data = {r: {c: ZZ(v) for c, v in d.items() if v} for r, d in rows.items()}
    dm = DomainMatrix({r: d for r, d in data.items() if d}, (nrows, ncols), ZZ)
    return int(dm.convert_to(ZZ.get_field()).rank())


def connecting_rank(k, q):
    """Rank of the connecting map H^q(Q) -> H^{q+1}(S) for Omega' (x) L (x) O(k,-k).

    S = Omega^{1,0} (x) L splits as Omega^1_{P1} (x) L + Omega^1_{P2} (x) L,
    Q = L, and the extension class is (omega_1, -omega_2).
    """
    quotient = LineBundle(P1xP1, descent_twist("L", k))
    d1, e1, n1, ns = _cup_omega(quotient, q, 0, 1)
    d2, e2, n2, _ = _cup_omega(quotient, q, 1, -1)
    entries = e1 + [(r + n1, c, v) for r, c, v in e2]
    return _integer_rank(n1 + n2, ns, entries)


@dataclass(frozen=True)
class WeightDecomposition:
    bundle: str
    table: dict  # weight -> ((q, dim), ...)

    def dim(self, k, q):
        return dict(self.table.get(k, ())).get(q, 0)

    def to_dict(self):
        return {"bundle": self.bundle,
                "weights": {str(k): {str(q): d for q, d in v} for k, v in sorted(self.table.items())}}


def descent_cohomology(name, k):
    """(h^0, h^1, h^2) of E (x) O(k,-k) on P1 x P1."""
    if name == "OmegaPrime_L":
        subs = [LineBundle(P1xP1, descent_twist(s, k)) for s in ("Omega1_P1_L", "Omega1_P2_L")]
        quotient = LineBundle(P1xP1, descent_twist("L", k))
        hs = [sum(kunneth_h_dim(b, q) for b in subs) for q in range(3)]
        hq = [kunneth_h_dim(quotient, q) for q in range(3)]
        ranks = [connecting_rank(k, q) for q in range(2)] + [0]
        return tuple(hs[q] - (ranks[q - 1] if q else 0) + hq[q] - ranks[q] for q in range(3))
    bundle = LineBundle(P1xP1, descent_twist(name, k))
    return tuple(kunneth_h_dim(bundle, q) for q in range(3))


def circle_bundle_decomposition(name, weights):
    """Per S1 weight k, the cohomology dimensions of the descended bundle."""
    if name not in SUPPORTED_BUNDLES:
        raise UnsupportedBundle(f"unsupported bundle {name!r}; choose from {SUPPORTED_BUNDLES}")
    table = {}
    for k in weights:
        h = descent_cohomology(name, k)
        table[int(k)] = tuple((q, d) for q, d in enumerate(h))
    return WeightDecomposition(name, table)


def h1_nonneg_L_weight(k):
    """Weight-k piece of the nonnegative H^1 of L: H^0(O(k)) (x) H^1(O(2-k)) on P1 x P1."""
    return h_dim(1, 0, k) * h_dim(1, 1, 2 - k)


def _tangent_h1_bound(n, k):
    """Upper bound for dim H^1(P^n, T(-k)) from the Euler sequence.

    0 -> O(-k) -> O(1-k)^{n+1} -> T(-k) -> 0 gives
    h^1(T(-k)) <= (n+1) h^1(O(1-k)) + h^2(O(-k)).
    """
    h1 = h_dim(n, 1, 1 - k) if n >= 1 else 0
    h2 = h_dim(n, 2, -k) if n >= 2 else 0
    return (n + 1) * h1 + h2


def quaternionic_vanishing(m, kmax):
    """Check H^1(P^{2m-1} x P1, O(-k,k)) = H^1(T^{1,0} (x) O(-k,k)) = 0 for 0 < k <= kmax.

    T^{1,0} splits as T_{P^{2m-1}} + T_{P1}; the first summand is bounded by
    the Euler-sequence chase, the second is the line bundle O(-k, k+2).
    """
    if m < 2:
        raise ValueError("m >= 2 is required")
    if kmax < 1:
        raise ValueError("kmax >= 1 is required")
    n = 2 * m - 1
    rows = []
    for k in range(1, kmax + 1):
        scalar = kunneth_h_dim(LineBundle((n, 1), (-k, k)), 1)
        # H^1(T(-k)) (x) H^0(O(k)) + H^0(T(-k)) (x) H^1(O(k)); the latter vanishes for k >= 0
        h0_t = (n + 1) * h_dim(n, 0, 1 - k) - h_dim(n, 0, -k)
        tangent_base = (_tangent_h1_bound(n, k) * h_dim(1, 0, k) + h0_t * h_dim(1, 1, k))
        tangent_fiber = kunneth_h_dim(LineBundle((n, 1), (-k, k + 2)), 1)
        rows.append({"k": k, "scalar_h1": scalar, "tangent_h1_bound": tangent_base + tangent_fiber,
                     "vanishes": scalar == 0 and tangent_base + tangent_fiber == 0})
    return {"m": m, "kmax": kmax, "all_vanish": all(r["vanishes"] for r in rows), "rows": rows}


_TERM = re.compile(r"^\s*([+-]?)\s*(\d*)\s*(\*?\s*k)?\s*$")


def parse_affine(expr):
    """Parse an affine expression in k such as ``-k``, ``2-k`` or ``3*k+1`` to (slope, intercept)."""
    s = expr.replace(" ", "")
    if not s:
        raise ValueError("empty twist expression")
    parts = re.findall(r"[+-]?[^+-]+", s)
    if "".join(parts) != s:
        raise ValueError(f"cannot parse twist {expr!r}")
    slope = const = 0
    for part in parts:
        mt = _TERM.match(part)
        if not mt:
            raise ValueError(f"cannot parse twist term {part!r}")
        sign = -1 if mt.group(1) == "-" else 1
        if mt.group(3):
            slope += sign * (int(mt.group(2)) if mt.group(2) else 1)
        elif mt.group(2):
            const += sign * int(mt.group(2))
        else:
            raise ValueError(f"cannot parse twist term {part!r}")
    return slope, const


def parse_base(text):
    """``P1xP1`` -> (1, 1); ``P3xP1`` -> (3, 1)."""
    out = []
    for f in text.split("x"):
        mt = re.fullmatch(r"P(\d+)", f.strip())
        if not mt:
            raise ValueError(f"cannot parse projective factor {f!r}")
        out.append(int(mt.group(1)))
    return tuple(out)
