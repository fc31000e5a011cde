"""
Polynomial helpers for Frobenius data: p-adic Newton slopes, slope polygons,
and an exact test that all complex roots lie on a circle of given radius.
"""
from fractions import Fraction

from sympy import Poly, QQ, Rational as SympyRational, Symbol

from ogus.linalg import INFINITY, padic_valuation, to_rational

_X = Symbol('x')
_S = Symbol('s')


def _poly(coefficients, generator=_X):
    coefficients = [to_rational(c) for c in coefficients]
    return Poly([SympyRational(c.numerator, c.denominator) for c in coefficients] or [0], generator, domain=QQ)


def _lower_hull(points):
    hull = []
    for point in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (point[1] - y1) - (y2 - y1) * (point[0] - x1)
            if cross > 0:
                break
            hull.pop()
        hull.append(point)
    return hull


def newton_slopes(coefficients, prime):
    """
    Valuations of the roots of a polynomial (leading coefficient first), sorted ascending.

    Read off the lower convex hull of the points (k, v_p(c_k)); a segment of
    slope s and horizontal length l stands for l roots of valuation -s. Roots
    at zero are not reported.
    """
    ascending = [to_rational(c) for c in reversed(list(coefficients))]
    points = [(k, padic_valuation(c, prime)) for k, c in enumerate(ascending) if c != 0]
    points = [(k, Fraction(v)) for k, v in points if v != INFINITY]
    slopes = []
    hull = _lower_hull(points)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = (y2 - y1) / (x2 - x1)
        slopes.extend([-slope] * (x2 - x1))
    return sorted(slopes)


def polygon_vertices(slopes):
    """
    Break points of the convex polygon with the given slope multiset, starting at the origin.
    """
    vertices = [(0, Fraction(0))]
    for index, slope in enumerate(sorted(Fraction(s) for s in slopes), start=1):
        vertices.append((index, vertices[-1][1] + slope))
    return vertices


def lies_above(upper, lower):
    """
    True iff the polygon of `upper` slopes lies on or above the polygon of `lower` slopes.

    Both multisets must have the same size; endpoints are not required to agree.
    """
    if len(upper) != len(lower):
        raise ValueError("Polygons of different lengths: {} and {}".format(len(upper), len(lower)))
    return all(
        high[1] >= low[1] for high, low in zip(polygon_vertices(upper), polygon_vertices(lower))
    )


def _strip_root(poly, root):
    generator = poly.gens[0]
    factor = Poly(generator - root, generator, domain=QQ)
    while poly.degree() > 0 and poly.eval(root) == 0:
        poly = poly.quo(factor)
    return poly


def _chebyshev_like(degree):
    """
    D_0 .. D_degree with w^k + w^-k = D_k(w + 1/w).
    """
    polys = [Poly(2, _S, domain=QQ), Poly(_S, _S, domain=QQ)]
    while len(polys) <= degree:
        polys.append(Poly(_S, _S, domain=QQ) * polys[-1] - polys[-2])
    return polys[:degree + 1]


def roots_on_circle(coefficients, radius_squared):
    """
    True iff every complex root of the polynomial has |root|^2 = radius_squared.

    One Graeffe step turns the squared radius into the radius of the squared
    roots, which is rational; rescaling moves the question to the unit circle,
    where it becomes reality of the roots of a half-degree polynomial in
    s = w + 1/w inside [-2, 2].
    """
    radius_squared = to_rational(radius_squared)
    if radius_squared <= 0:
        raise ValueError("Radius must be positive")
    chi = _poly(coefficients)
    if chi.degree() <= 0:
        return True
    if chi.eval(0) == 0:
        return False
    mirrored = Poly(chi.as_expr().subs(_X, -_X), _X, domain=QQ)
    product = (chi * mirrored).all_coeffs()[::-1]
    graeffe = product[0::2]
    scale = SympyRational(radius_squared.numerator, radius_squared.denominator)
    rescaled = [coefficient * scale ** k for k, coefficient in enumerate(graeffe)]
    poly = Poly(rescaled[::-1], _X, domain=QQ)
    poly = _strip_root(_strip_root(poly, 1), -1)
    if poly.degree() <= 0:
        return True
    coefficients = poly.all_coeffs()
    if poly.degree() % 2 or coefficients != coefficients[::-1]:
        return False
    half = poly.degree() // 2
    ascending = coefficients[::-1]
    chebyshev = _chebyshev_like(half)
    reduced = Poly(ascending[half], _S, domain=QQ)
    for k in range(1, half + 1):
        reduced = reduced + chebyshev[k] * ascending[half - k]
    square_free = reduced.sqf_part()
    if square_free.degree() <= 0:
        return True
    return square_free.count_roots(-2, 2) == square_free.degree()
