"""Rotation groups acting on the circle: word metric, growth, Diophantine
margins, conjugacy/centralizer data, Haar averaging, fixed-point sets.

Two concrete groups are supported, both abelian subgroups of the isometry
group of S^1 (circumference 2*pi):

* ``dense-rotation``: Z acting by k -> rotation through 2*pi*k*theta with
  theta irrational; the closure group is U(1).
* ``finite-cyclic``: Z/q acting by k -> rotation through 2*pi*k/q; the
  closure group is the group itself.

Group elements are plain integer labels; composition is integer addition
(mod q in the finite case) and the identity is 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi

GroupElement = int

DENSE = "dense-rotation"
FINITE = "finite-cyclic"

GOLDEN_CONJUGATE = (np.sqrt(5.0) - 1.0) / 2.0


class GroupModelError(ValueError):
    """Invalid group specification or group-operation argument."""


def circle_dist(a, b=0.0):
    """Distance on the circle of circumference 2*pi (values in [0, pi])."""
    d = np.mod(np.asarray(a) - b, TWO_PI)
    return np.minimum(d, TWO_PI - d)


def continued_fraction(x: float, depth: int = 40, tol: float = 1e-12) -> tuple[list[int], bool]:
    """Continued-fraction expansion of x.

    Returns (partial quotients, terminated). ``terminated`` is True when the
    fractional remainder drops below ``tol`` within ``depth`` steps, i.e. x is
    rational at machine precision.
    """
    quotients = []
    y = float(x)
    for _ in range(depth):
        a = int(np.floor(y))
        quotients.append(a)
        frac = y - a
        if frac < tol:
            return quotients, True
        y = 1.0 / frac
    return quotients, False


def cf_value(quotients: Sequence[int]) -> float:
    """Value of a finite continued fraction [a0; a1, a2, ...]."""
    if not quotients:
        raise GroupModelError("empty continued fraction")
    value = float(quotients[-1])
    for a in reversed(quotients[:-1]):
        value = a + 1.0 / value
    return value


def convergent_denominators(theta: float, limit: int, depth: int = 64) -> list[int]:
    """Denominators q_n of the continued-fraction convergents of theta, q_n <= limit."""
    quotients, _ = continued_fraction(theta, depth=depth)
    q_prev, q = 1, 0
    dens = []
    for a in quotients:
        q_prev, q = q, a * q + q_prev
        if q > limit:
            break
        if q >= 1:
            dens.append(q)
    return dens


@dataclass(frozen=True)
class GroupSpec:
    """A finitely generated rotation group with a fixed symmetric generating set."""

    kind: str
    theta: float = 0.0
    order: int = 0
    generators: tuple[int, ...] = (1, -1)
    cf_depth: int = 25

    def __post_init__(self):
        if self.kind not in (DENSE, FINITE):
            raise GroupModelError(f"unknown group kind {self.kind!r}")
        gens = tuple(int(g) for g in self.generators)
        if not gens or 0 in gens:
            raise GroupModelError("generators must be nonzero and nonempty")
        object.__setattr__(self, "generators", gens)
        if self.kind == FINITE:
            if self.order < 1:
                raise GroupModelError("finite-cyclic group needs order >= 1")
            closed = {self.normalize(-g) for g in gens} == {self.normalize(g) for g in gens}
        else:
            _, terminated = continued_fraction(self.theta, depth=self.cf_depth)
            if terminated:
                raise GroupModelError(
                    f"theta={self.theta!r} is rational at machine precision "
                    f"(continued fraction terminates within depth {self.cf_depth})"
                )
            closed = {-g for g in gens} == set(gens)
        if not closed:
            raise GroupModelError("generator set must be closed under inverse")

    # -- elementary group structure ------------------------------------

    def normalize(self, g: GroupElement) -> GroupElement:
        return g % self.order if self.kind == FINITE else g

    def compose(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return self.normalize(g + h)

    def inverse(self, g: GroupElement) -> GroupElement:
        return self.normalize(-g)

    def angle(self, g: GroupElement) -> float:
        """Rotation angle of g, as an element of [0, 2*pi)."""
        if self.kind == FINITE:
            return TWO_PI * (g % self.order) / self.order
        return float(np.mod(TWO_PI * g * self.theta, TWO_PI))

    def elements_in_ball(self, radius: int) -> list[GroupElement]:
        """All elements with word length <= radius, sorted by (length, label)."""
        table = _word_lengths(self, radius)
        return sorted(table, key=lambda g: (table[g], g))


@lru_cache(maxsize=None)
def _word_lengths(spec: GroupSpec, radius: int) -> dict[GroupElement, int]:
    """Breadth-first word lengths over the symmetric generating set."""
    lengths = {0: 0}
    frontier = deque([0])
    while frontier:
        g = frontier.popleft()
        if lengths[g] >= radius:
            continue
        for s in spec.generators:
            h = spec.compose(g, s)
            if h not in lengths:
                lengths[h] = lengths[g] + 1
                frontier.append(h)
    return lengths


def word_length(g: GroupElement, spec: GroupSpec) -> int:
    """Minimum word length of g over the generating set (0 iff identity)."""
    g = spec.normalize(g)
    if g == 0:
        return 0
    # radius guess grows geometrically until BFS reaches g
    radius = 4
    while True:
        table = _word_lengths(spec, radius)
        if g in table and table[g] < radius:
            return table[g]
        if spec.kind == FINITE and len(table) == spec.order and g in table:
            return table[g]
        if radius > 10**7:
            raise GroupModelError(f"element {g} unreachable from generators")
        radius *= 4


def growth_census(spec: GroupSpec, kmax: int):
    """Counts #{g : |g| <= k} for k = 0..kmax and a log-log fitted degree.

    Returns (counts, fitted_degree). The fit is least squares of log(count)
    against log(k) over k >= 1, a diagnostic for the polynomial-growth
    hypothesis; for groups that saturate the fitted degree tends to 0.
    """
    if kmax < 1:
        raise GroupModelError("kmax must be >= 1")
    table = _word_lengths(spec, kmax)
    lengths = np.array(sorted(table.values()))
    counts = np.array([int(np.searchsorted(lengths, k, side="right")) for k in range(kmax + 1)])
    ks = np.arange(1, kmax + 1, dtype=float)
    degree = float(np.polyfit(np.log(ks), np.log(counts[1:].astype(float)), 1)[0])
    return counts, degree


def diophantine_margin(spec: GroupSpec, g: GroupElement, C: float, N: float):
    """Margin of the Diophantine estimate for a fixed-point-free rotation g.

    dist(g(x), x) is the constant circle distance of the rotation angle from
    0, dist(x, fix(g)) = 1 by convention for empty fixed sets.  Returns
    (margin, satisfied) with margin = dist * |g|^N and satisfied = margin >= C.
    """
    if C <= 0 or N <= 0:
        raise GroupModelError("C and N must be positive")
    g = spec.normalize(g)
    if g == 0:
        raise GroupModelError("diophantine margin is undefined for the identity")
    move = float(circle_dist(spec.angle(g)))
    margin = move * word_length(g, spec) ** N
    return margin, bool(margin >= C)


def diophantine_sweep(spec: GroupSpec, kmax: int, C: float, N: float):
    """Worst margin over all nonidentity |g| <= kmax (dense case: 1 <= k <= kmax).

    Returns (worst_k, worst_margin, all_satisfied).  For the dense case the
    margin min((2*pi*||k*theta||) * k^N) is always attained at a convergent
    denominator of theta, which the acceptance tests exploit as the
    independent oracle (see ``convergent_denominators``).
    """
    if spec.kind == FINITE:
        ks = range(1, spec.order)
    else:
        ks = range(1, kmax + 1)
    worst_k, worst = None, np.inf
    for k in ks:
        margin, _ = diophantine_margin(spec, k, C, N)
        if margin < worst:
            worst_k, worst = k, margin
    if worst_k is None:
        return None, np.inf, True
    return worst_k, worst, bool(worst >= C)


# -- conjugacy data ------------------------------------------------------

U1 = "U(1)"


@dataclass(frozen=True)
class ConjugacyClass:
    representative: GroupElement
    members: tuple[GroupElement, ...]
    centralizer: str  # U1 or "Z/q"
    # coset descriptor per member: for abelian groups every coset is the
    # centralizer itself
    cosets: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConjugacyTable:
    spec: GroupSpec
    classes: tuple[ConjugacyClass, ...]

    def representatives(self):
        return [c.representative for c in self.classes]


def conjugacy_table(spec: GroupSpec, radius: int) -> ConjugacyTable:
    """Conjugacy classes of the elements with |g| <= radius.

    Both implemented groups are abelian, so classes are singletons and every
    centralizer is the full closure group; the data model keeps the general
    shape (members, per-member cosets) for nonabelian extensions.
    """
    centralizer = U1 if spec.kind == DENSE else f"Z/{spec.order}"
    classes = tuple(
        ConjugacyClass(g, (g,), centralizer, (centralizer,))
        for g in spec.elements_in_ball(radius)
    )
    return ConjugacyTable(spec, classes)


def haar_average(
    f: Callable[[float], object],
    g0: GroupElement,
    table: ConjugacyTable,
    quadrature_points: int = 64,
    rtol: float = 1e-10,
    max_doublings: int = 8,
):
    """Normalized Haar average of f over the coset conjugating g0 to itself.

    ``f`` receives the rotation angle of a closure-group element. For U(1)
    this is trapezoidal quadrature (spectrally accurate for smooth periodic
    f), doubled until two successive values agree to ``rtol``; for finite
    groups it is the exact average. Values may be scalars or ndarrays.
    """
    if quadrature_points < 4:
        raise GroupModelError("need at least 4 quadrature points")
    spec = table.spec
    if spec.kind == FINITE:
        vals = [np.asarray(f(TWO_PI * j / spec.order)) for j in range(spec.order)]
        return sum(vals[1:], start=vals[0] + 0.0) / spec.order

    def trapezoid(pts):
        acc = np.asarray(f(0.0)) + 0.0
        for j in range(1, pts):
            acc = acc + np.asarray(f(TWO_PI * j / pts))
        return acc / pts

    pts = quadrature_points
    prev = trapezoid(pts)
    for _ in range(max_doublings):
        pts *= 2
        cur = trapezoid(pts)
        if np.max(np.abs(cur - prev)) < rtol * max(1.0, float(np.max(np.abs(cur)))):
            return cur
        prev = cur
    return prev


# -- fixed sets and the codifferential action ----------------------------

EMPTY = "empty"
WHOLE = "whole-manifold"
ISOLATED = "isolated-points"


@dataclass(frozen=True)
class FixedSet:
    """Fixed-point set of a group element on the circle (or point data).

    ``points`` holds (point, normal_differential) pairs for the
    isolated-points descriptor used by the localized-Todd unit tests; the
    normal differential is the matrix of dg on the normal space at the point.
    """

    element: GroupElement
    kind: str
    points: tuple = ()

    @staticmethod
    def isolated(element: GroupElement, points) -> "FixedSet":
        pts = tuple((p, np.asarray(dg, dtype=complex)) for p, dg in points)
        return FixedSet(element, ISOLATED, pts)


def fixed_set(g: GroupElement, spec: GroupSpec) -> FixedSet:
    """Identity fixes the whole circle; any other rotation is fixed-point free."""
    g = spec.normalize(g)
    if g == 0:
        return FixedSet(0, WHOLE)
    return FixedSet(g, EMPTY)


@dataclass(frozen=True)
class CodifferentialAction:
    """Action of g on the cosphere bundle S*S^1 and on the torus 2B*S^1.

    A rotation has unit derivative in the standard trivialization, so the
    fiber part ((dg)*)^{-1} is the identity: the action is g along the base
    on both spaces.
    """

    element: GroupElement
    angle: float

    def on_cosphere(self, xi: int, x: float):
        return xi, float(np.mod(x + self.angle, TWO_PI))

    def on_double_ball(self, x: float, beta: float):
        return float(np.mod(x + self.angle, TWO_PI)), beta


def codifferential_action(g: GroupElement, spec: GroupSpec) -> CodifferentialAction:
    g = spec.normalize(g)
    return CodifferentialAction(g, spec.angle(g))
