"""Exact derivation of interpolation and quadrature coefficients.

Every stencil weight used by the reconstruction kernels and the deferred
correction quadrature is obtained here by integrating or differentiating
Lagrange basis polynomials in exact rational arithmetic, then converting to
floats once.  This removes coefficient accuracy as a variable in the order
studies: any failure to hit design order is a scheme property, not a table
typo.

Polynomials are coefficient tuples ``(c0, c1, ...)`` meaning
``c0 + c1*x + c2*x**2 + ...`` with :class:`fractions.Fraction` entries.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

ZERO = (Fraction(0),)


def poly_add(p, q):
    n = max(len(p), len(q))
    p = tuple(p) + (Fraction(0),) * (n - len(p))
    q = tuple(q) + (Fraction(0),) * (n - len(q))
    return tuple(a + b for a, b in zip(p, q))


def poly_scale(p, c):
    c = Fraction(c)
    return tuple(a * c for a in p)


def poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)


def poly_antiderivative(p):
    return (Fraction(0),) + tuple(c / (k + 1) for k, c in enumerate(p))


def poly_derivative(p):
    if len(p) <= 1:
        return ZERO
    return tuple(c * k for k, c in enumerate(p) if k >= 1)


def poly_eval(p, x):
    """Horner evaluation; ``x`` may be a Fraction or an ndarray."""
    acc = p[-1] if not isinstance(x, np.ndarray) else float(p[-1])
    if isinstance(x, np.ndarray):
        acc = np.full_like(x, float(p[-1]))
        for c in reversed(p[:-1]):
            acc = acc * x + float(c)
        return acc
    for c in reversed(p[:-1]):
        acc = acc * x + c
    return acc


def poly_compose_negate(p):
    """Return p(-x)."""
    return tuple(c if k % 2 == 0 else -c for k, c in enumerate(p))


def poly_to_float(p):
    return np.array([float(c) for c in p])


def lagrange_basis(nodes):
    """Lagrange basis polynomials for distinct rational nodes."""
    nodes = [Fraction(t) for t in nodes]
    basis = []
    for i, xi in enumerate(nodes):
        num = (Fraction(1),)
        den = Fraction(1)
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            num = poly_mul(num, (-xj, Fraction(1)))
            den *= xi - xj
        basis.append(poly_scale(num, Fraction(1) / den))
    return basis


def integration_weights(nodes, a, b):
    """Weights w with sum_i w_i p(nodes_i) = int_a^b p for deg(p) < len(nodes)."""
    a, b = Fraction(a), Fraction(b)
    out = []
    for basis in lagrange_basis(nodes):
        prim = poly_antiderivative(basis)
        out.append(poly_eval(prim, b) - poly_eval(prim, a))
    return out


def uniform_subinterval_alpha(M):
    """Integrals of the M+1 uniform-node basis over each unit sub-interval.

    Row m integrates over [m, m+1] on the node set {0, 1, ..., M}; scaling by
    the actual sub-step size is the caller's job.  Exact for polynomials of
    degree <= M, which is what the correction recurrence requires.
    """
    if not 1 <= M <= 8:
        raise ValueError("node count M must be in 1..8")
    nodes = list(range(M + 1))
    rows = []
    for m in range(M):
        rows.append(integration_weights(nodes, m, m + 1))
    return rows


def _prefix_to_value_coeffs(node_polys, n_values):
    """Convert polynomials attached to prefix sums into per-value polynomials.

    The interpolation targets below go through cumulative sums
    ``V_k = f_0 + ... + f_k``; the coefficient of ``f_o`` is the sum of the
    polynomials attached to every ``V_k`` with ``k >= o``.
    """
    out = []
    for o in range(n_values):
        acc = ZERO
        for k in range(o, n_values):
            acc = poly_add(acc, node_polys[k])
        out.append(acc)
    return out


def subcell_flux_polys(cell_offsets):
    """Coefficient polynomials in theta for the trailing sub-cell integral.

    Works on unit cells ``[o-1, o]`` carrying averages ``f_o`` for the given
    offsets; the target is ``Q(theta) = int_{-theta}^{0} h`` where ``h`` is the
    reconstruction whose cell averages match.  Returns ``{offset: poly}`` with
    ``Q(theta) = sum_o poly_o(theta) * f_o`` and, structurally, ``Q(0) = 0``.
    """
    offsets = list(cell_offsets)
    nodes = [Fraction(offsets[0] - 1)] + [Fraction(o) for o in offsets]
    basis = lagrange_basis(nodes)
    # prefix value at node offsets[k] is f_{offsets[0]} + ... + f_{offsets[k]}
    per_value = _prefix_to_value_coeffs(basis[1:], len(offsets))
    out = {}
    for o, pol in zip(offsets, per_value):
        q = poly_add((poly_eval(pol, Fraction(0)),), poly_scale(poly_compose_negate(pol), -1))
        out[o] = q
    return out


def interface_value_weights(cell_offsets):
    """Weights giving h(0) from unit-cell averages f_o on cells [o-1, o]."""
    offsets = list(cell_offsets)
    nodes = [Fraction(offsets[0] - 1)] + [Fraction(o) for o in offsets]
    basis = [poly_derivative(b) for b in lagrange_basis(nodes)]
    per_value = _prefix_to_value_coeffs(basis[1:], len(offsets))
    return np.array([float(poly_eval(p, Fraction(0))) for p in per_value])


def point_fraction_polys(point_offsets):
    """Coefficient polynomials in theta for ``int_{-theta}^{0}`` of a point interpolant.

    The interpolant matches point values ``f_o`` at integer offsets ``o``.
    """
    offsets = [Fraction(o) for o in point_offsets]
    out = {}
    for o, basis in zip(point_offsets, lagrange_basis(offsets)):
        prim = poly_antiderivative(basis)
        q = poly_add((poly_eval(prim, Fraction(0)),), poly_scale(poly_compose_negate(prim), -1))
        out[o] = q
    return out


def point_cell_integral_weights(point_offsets):
    """Weights giving ``int_0^1`` of the interpolant through points at offsets."""
    offsets = [Fraction(o) for o in point_offsets]
    return np.array([float(w) for w in integration_weights(offsets, 0, 1)])


def monomial_cell_averages(power, cell_offsets):
    """Exact averages of x**power over the unit cells [o-1, o]."""
    p = Fraction(1, power + 1)
    return [p * (Fraction(o) ** (power + 1) - Fraction(o - 1) ** (power + 1)) for o in cell_offsets]


def monomial_point_values(power, point_offsets):
    return [Fraction(o) ** power for o in point_offsets]
