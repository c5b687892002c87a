"""Scalar helpers that work for both complex floats and Gaussian rationals.

Exact values use sympy's ``QQ_I`` domain elements; floating values are
Python ``complex``.  Every helper dispatches on the value type so the
tensor operators can stay arithmetic-agnostic.
"""

from fractions import Fraction

from sympy.polys.domains import QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational

EXACT = "exact"
FLOAT = "float"


def is_exact(value):
    return isinstance(value, GaussianRational)


def gaussian(re, im=0):
    """Exact Gaussian rational ``re + i*im`` from ints or Fractions."""
    return QQ_I(_to_qq(re), _to_qq(im))


def _to_qq(x):
    if isinstance(x, Fraction):
        return QQ_I.dom(x.numerator, x.denominator)
    if isinstance(x, float):
        f = Fraction(x)
        return QQ_I.dom(f.numerator, f.denominator)
    return QQ_I.dom(x)


def unit_i(mode):
    return QQ_I(0, 1) if mode == EXACT else 1j


def one(mode):
    return QQ_I(1, 0) if mode == EXACT else 1.0 + 0j


def zero(mode):
    return QQ_I(0, 0) if mode == EXACT else 0j


def times_i(value):
    if is_exact(value):
        return QQ_I(-value.y, value.x)
    return 1j * value


def times_minus_i(value):
    if is_exact(value):
        return QQ_I(value.y, -value.x)
    return -1j * value


def conj(value):
    if is_exact(value):
        return QQ_I(value.x, -value.y)
    return complex(value).conjugate()


def to_complex(value):
    if is_exact(value):
        return complex(float(value.x), float(value.y))
    return complex(value)


def to_exact(value):
    """Convert a float/complex/int/Fraction to an exact Gaussian rational.

    Floats are converted by their exact binary value, so this is only
    meaningful for inputs that were exact to begin with.
    """
    if is_exact(value):
        return value
    if isinstance(value, (int, Fraction)):
        return gaussian(value, 0)
    c = complex(value)
    return gaussian(Fraction(c.real), Fraction(c.imag))


def real_parts(value):
    """Return ``(re, im)`` as Fractions for exact input, floats otherwise."""
    if is_exact(value):
        return (Fraction(int(value.x.numerator), int(value.x.denominator)),
                Fraction(int(value.y.numerator), int(value.y.denominator)))
    c = complex(value)
    return c.real, c.imag


def magnitude(value):
    return abs(to_complex(value))


def is_zero(value, tol=0.0):
    if is_exact(value):
        return value == QQ_I(0, 0)
    return abs(complex(value)) <= tol


def convert(value, mode):
    return to_exact(value) if mode == EXACT else to_complex(value)
