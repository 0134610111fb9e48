"""Finite Blaschke products and critical sets.

A finite Blaschke product of degree ``d`` is

    B(z) = eta * prod_k (z - a_k) / (1 - conj(a_k) z),   |a_k| < 1, |eta| = 1,

stored as the unimodular factor ``eta`` plus the multiset of zeros.  The
derivative never vanishes on the unit circle, and the ``d - 1`` critical
points inside the disk are the disk roots of the numerator polynomial

    Q(z) = sum_k (1 - |a_k|^2) * prod_{j != k} (z - a_j)(1 - conj(a_j) z),

of degree ``2d - 2``, whose root set is symmetric under reflection across the
circle.

Serialization schema (JSON)
---------------------------
``FiniteBlaschke``::

    {"eta": {"re": <float>, "im": <float>},
     "zeros": [{"re": <float>, "im": <float>}, ...]}

``CriticalSet``::

    {"points": [{"re": <float>, "im": <float>, "multiplicity": <int>}, ...]}

Complex numbers always appear as explicit ``re``/``im`` pairs; multiplicities
are positive integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .disk import BOUNDARY_TOL, pseudo_hyperbolic_distance
from .errors import InputError, NumericalError
from .roots import MERGE_TOL, cluster_roots, polynomial_roots

#: Evaluation closer than this to a reflected pole 1/conj(a_k) is rejected.
POLE_TOL = 1e-14


def _as_complex(x):
    return complex(x)


@dataclass(frozen=True)
class CriticalSet:
    """Multiset of prescribed critical points inside the unit disk.

    Attributes
    ----------
    entries : tuple of (complex, int)
        Distinct points with their multiplicities, canonically ordered.
    """

    entries: tuple = ()

    def __post_init__(self):
        merged = {}
        for point, mult in self.entries:
            point = _as_complex(point)
            mult = int(mult)
            if mult < 1:
                raise InputError("critical point multiplicity must be >= 1")
            if abs(point) >= 1.0 - BOUNDARY_TOL:
                raise InputError("critical points must lie inside the unit disk")
            merged[point] = merged.get(point, 0) + mult
        ordered = tuple(
            sorted(merged.items(), key=lambda e: (abs(e[0]), np.angle(e[0])))
        )
        object.__setattr__(self, "entries", ordered)

    @classmethod
    def from_points(cls, points, merge_tol=MERGE_TOL):
        """Build from a plain list of points, merging near-duplicates."""
        entries = []
        for p in points:
            p = _as_complex(p)
            for i, (q, m) in enumerate(entries):
                if abs(p - q) <= merge_tol:
                    entries[i] = (q, m + 1)
                    break
            else:
                entries.append((p, 1))
        return cls(tuple(entries))

    @property
    def total(self) -> int:
        """Number of critical points counted with multiplicity."""
        return sum(m for _, m in self.entries)

    @property
    def origin_multiplicity(self) -> int:
        """Multiplicity of 0 in the set (0 if absent)."""
        for point, mult in self.entries:
            if point == 0:
                return mult
        return 0

    def points(self):
        """Expanded list of points, each repeated by its multiplicity."""
        out = []
        for point, mult in self.entries:
            out.extend([point] * mult)
        return out

    def nonzero_entries(self):
        return tuple((p, m) for p, m in self.entries if p != 0)

    def union(self, other: "CriticalSet", merge_tol=MERGE_TOL) -> "CriticalSet":
        """Multiset union: multiplicities add, near-duplicate points merge."""
        entries = [list(e) for e in self.entries]
        for p, m in other.entries:
            for e in entries:
                if abs(p - e[0]) <= merge_tol:
                    e[1] += m
                    break
            else:
                entries.append([p, m])
        return CriticalSet(tuple((p, m) for p, m in entries))

    def contains(self, other: "CriticalSet", merge_tol=MERGE_TOL) -> bool:
        """True if every point of ``other`` appears here with at least its
        multiplicity (points matched within ``merge_tol``)."""
        for p, m in other.entries:
            if not any(
                abs(p - q) <= merge_tol and mq >= m for q, mq in self.entries
            ):
                return False
        return True

    def match(self, other: "CriticalSet") -> float:
        """Largest pseudo-hyperbolic mismatch under the best pairing.

        Entries pair only within equal multiplicity; a differing multiplicity
        profile raises, since no pairing then reproduces the multiset.
        """
        by_mult_a, by_mult_b = {}, {}
        for p, m in self.entries:
            by_mult_a.setdefault(m, []).append(p)
        for p, m in other.entries:
            by_mult_b.setdefault(m, []).append(p)
        if {m: len(v) for m, v in by_mult_a.items()} != {
            m: len(v) for m, v in by_mult_b.items()
        }:
            raise NumericalError("multiplicity profiles do not match")
        worst = 0.0
        for m, pa in by_mult_a.items():
            pb = by_mult_b[m]
            cost = np.array(
                [[pseudo_hyperbolic_distance(x, y) for y in pb] for x in pa]
            )
            rows, cols = linear_sum_assignment(cost)
            worst = max(worst, float(cost[rows, cols].max()))
        return worst

    def to_dict(self):
        return {
            "points": [
                {"re": p.real, "im": p.imag, "multiplicity": m}
                for p, m in self.entries
            ]
        }

    @classmethod
    def from_dict(cls, data):
        try:
            entries = tuple(
                (complex(e["re"], e["im"]), e["multiplicity"])
                for e in data["points"]
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed critical set: {exc}") from exc
        return cls(entries)


@dataclass(frozen=True)
class FiniteBlaschke:
    """Finite Blaschke product ``eta * prod (z - a_k) / (1 - conj(a_k) z)``.

    The unimodular factor is renormalized on construction and the zeros are
    kept as a canonically ordered tuple, so equal products compare equal.
    """

    zeros: tuple = ()
    eta: complex = 1.0 + 0j

    def __post_init__(self):
        e = _as_complex(self.eta)
        if abs(e) == 0:
            raise InputError("unimodular factor must be nonzero")
        object.__setattr__(self, "eta", e / abs(e))
        zs = tuple(_as_complex(a) for a in self.zeros)
        if any(abs(a) >= 1.0 - BOUNDARY_TOL for a in zs):
            raise InputError("zeros must lie strictly inside the unit disk")
        object.__setattr__(
            self, "zeros", tuple(sorted(zs, key=lambda a: (a.real, a.imag)))
        )

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        return evaluate(self, z)

    def to_dict(self):
        return {
            "eta": {"re": self.eta.real, "im": self.eta.imag},
            "zeros": [{"re": a.real, "im": a.imag} for a in self.zeros],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            eta = complex(data["eta"]["re"], data["eta"]["im"])
            zeros = tuple(complex(a["re"], a["im"]) for a in data["zeros"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed Blaschke product: {exc}") from exc
        return cls(zeros=zeros, eta=eta)


def _factors(B: FiniteBlaschke, z):
    """Stacked Moebius factors f_k(z) = (z - a_k) / (1 - conj(a_k) z)."""
    z = np.asarray(z, dtype=complex)
    a = np.array(B.zeros, dtype=complex).reshape((-1,) + (1,) * z.ndim)
    denom = 1.0 - np.conj(a) * z
    if np.any(np.abs(denom) < POLE_TOL):
        raise NumericalError("evaluation point too close to a reflected pole")
    return (z - a) / denom, denom


def evaluate(B: FiniteBlaschke, z):
    """Evaluate ``B`` at ``z`` (scalar or ndarray)."""
    z = np.asarray(z, dtype=complex)
    if B.degree == 0:
        out = np.full_like(z, B.eta)
        return complex(out) if out.ndim == 0 else out
    factors, _ = _factors(B, z)
    out = B.eta * factors.prod(axis=0)
    return complex(out) if out.ndim == 0 else out


def derivative(B: FiniteBlaschke, z):
    """Evaluate ``B'`` at ``z`` in pole-free form.

    Uses ``B'(z) = eta * sum_k (1 - |a_k|^2) / (1 - conj(a_k) z)^2 *
    prod_{j != k} f_j(z)``, assembled with prefix/suffix products so no
    division by a vanishing factor occurs at the zeros of ``B``.
    """
    z = np.asarray(z, dtype=complex)
    d = B.degree
    if d == 0:
        out = np.zeros_like(z)
        return complex(out) if out.ndim == 0 else out
    factors, denom = _factors(B, z)
    ones = np.ones((1,) + z.shape, dtype=complex)
    prefix = np.concatenate([ones, np.cumprod(factors, axis=0)], axis=0)
    suffix = np.concatenate(
        [np.cumprod(factors[::-1], axis=0)[::-1], ones], axis=0
    )
    w = np.array([1.0 - abs(a) ** 2 for a in B.zeros]).reshape(
        (-1,) + (1,) * z.ndim
    )
    terms = w / denom**2 * prefix[:-1] * suffix[1:]
    out = B.eta * terms.sum(axis=0)
    return complex(out) if out.ndim == 0 else out


def derivative_at_origin_order(B: FiniteBlaschke, order: int) -> float:
    """Value of ``Re B^(order+1)(0)`` given a zero of exact order ``order+1`` at 0.

    Writing ``B(z) = z^(order+1) g(z)`` with ``g(0) != 0``, the derivative is
    ``(order+1)! * g(0)``.  The real part is returned: it is the linear
    functional maximized by the extremal product, and for a normalized product
    the value is real and positive.

    Raises
    ------
    InputError
        If the zero order of ``B`` at the origin is not exactly ``order + 1``.
    """
    at_origin = sum(1 for a in B.zeros if a == 0)
    if at_origin != order + 1:
        raise InputError(
            f"zero order at origin is {at_origin}, expected {order + 1}"
        )
    g0 = B.eta
    for a in B.zeros:
        if a != 0:
            g0 *= -a
    return math.factorial(order + 1) * g0.real


def critical_numerator_coeffs(zeros):
    """Coefficients (descending) of the numerator polynomial of ``B'``.

    Depends only on the zero multiset; the unimodular factor scales ``B'``
    without moving its roots.
    """
    a = np.array(tuple(zeros), dtype=complex)
    d = len(a)
    quads = [
        np.array([-np.conj(ak), 1.0 + abs(ak) ** 2, -ak], dtype=complex)
        for ak in a
    ]
    prefix = [np.array([1.0 + 0j])]
    for q in quads:
        prefix.append(np.convolve(prefix[-1], q))
    suffix = [np.array([1.0 + 0j])]
    for q in reversed(quads):
        suffix.append(np.convolve(suffix[-1], q))
    suffix.reverse()
    total = np.zeros(max(2 * d - 1, 1), dtype=complex)
    for k in range(d):
        w = 1.0 - abs(a[k]) ** 2
        term = w * np.convolve(prefix[k], suffix[k + 1])
        total[-len(term):] += term
    return total


def critical_points(
    B: FiniteBlaschke, merge_tol=MERGE_TOL, noise_rel=1e-12
) -> CriticalSet:
    """Critical set of ``B`` inside the unit disk, with multiplicities.

    The ``2d - 2`` roots of the critical numerator polynomial split into
    ``d - 1`` inside the disk and their reflections outside; roots too close
    to the circle make that split ill-defined and raise.

    ``noise_rel`` is the assumed relative accuracy of the product's zeros;
    repeated critical points are resolved only up to the root splitting that
    such an uncertainty induces (about its square root, for double points),
    so nearby-but-distinct critical points closer than that are reported as
    one multiple point.
    """
    d = B.degree
    if d <= 1:
        return CriticalSet()
    q = critical_numerator_coeffs(B.zeros)
    roots = polynomial_roots(q)
    circle_gap = np.abs(np.abs(roots) - 1.0)
    if np.any(circle_gap < 10 * merge_tol):
        raise NumericalError(
            "critical point too close to the unit circle to classify"
        )
    inside = roots[np.abs(roots) < 1.0]
    if len(inside) != d - 1:
        raise NumericalError(
            f"expected {d - 1} interior critical points, found {len(inside)}"
        )
    clusters = cluster_roots(inside, q, merge_tol=merge_tol, noise_rel=noise_rel)
    return CriticalSet(tuple(clusters))


def compose(B: FiniteBlaschke, C: FiniteBlaschke) -> FiniteBlaschke:
    """The composite ``B o C`` as a finite Blaschke product.

    Its zeros are the ``C``-preimages of the zeros of ``B`` (degree
    ``deg B * deg C``); the unimodular factor is fitted from one evaluation
    and validated at several more.
    """
    if B.degree == 0 or C.degree == 0:
        # constant outer or inner factor collapses the composite
        value = evaluate(B, evaluate(C, 0j)) if C.degree == 0 else B.eta
        return FiniteBlaschke(zeros=(), eta=value)
    num = np.array([1.0 + 0j])
    for c in C.zeros:
        num = np.convolve(num, np.array([1.0, -c]))
    num *= C.eta
    den = np.array([1.0 + 0j])
    for c in C.zeros:
        den = np.convolve(den, np.array([-np.conj(c), 1.0]))
    zeros = []
    for a in B.zeros:
        # preimages C(z) = a: roots of eta_C * N(z) - a * D(z), both arrays
        # already share length deg C + 1 in descending order
        zeros.extend(polynomial_roots(num - a * den))
    zeros = np.array(zeros, dtype=complex)
    # fit the unimodular factor at a probe where the centered product is tame
    candidate = FiniteBlaschke(zeros=tuple(zeros), eta=1.0)
    for probe in (0.31 + 0.17j, -0.23 + 0.29j, 0.11 - 0.37j):
        base = evaluate(candidate, probe)
        if abs(base) > 1e-6:
            break
    else:
        raise NumericalError("no usable probe point for composition fit")
    eta = evaluate(B, evaluate(C, probe)) / base
    if abs(abs(eta) - 1.0) > 1e-6:
        raise NumericalError("composition produced a non-unimodular factor")
    result = FiniteBlaschke(zeros=tuple(zeros), eta=eta)
    for check in (0.4 + 0j, -0.1 + 0.33j, 0.05 - 0.21j):
        direct = evaluate(B, evaluate(C, check))
        if abs(direct - evaluate(result, check)) > 1e-8:
            raise NumericalError("composition validation failed")
    return result


def reflect_check(B: FiniteBlaschke, z) -> complex:
    """Evaluate ``B`` at ``z`` and verify ``B(z) = 1 / conj(B(1/conj(z)))``.

    Works at any point where neither side hits a pole; deviation beyond
    1e-10 (relative to the value size) raises.
    """
    z = complex(z)
    if z == 0:
        raise InputError("reflection check needs z != 0")
    lhs = evaluate(B, z)
    inner = evaluate(B, 1.0 / np.conj(z))
    if abs(inner) < POLE_TOL:
        raise NumericalError("reflected point lands on a zero")
    rhs = 1.0 / np.conj(inner)
    if abs(lhs - rhs) > 1e-10 * max(1.0, abs(lhs), abs(rhs)):
        raise NumericalError("reflection identity violated")
    return lhs
