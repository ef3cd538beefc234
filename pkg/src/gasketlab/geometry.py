"""Exact plane geometry for upward-triangle iterated function systems.

Coordinates live in the oblique basis {(1,0), (1/2, sqrt(3)/2)}: the unit
triangle has corners (0,0), (1,0), (0,1) there, a homothety acts
coordinatewise, and the squared Euclidean distance of two rational points
is the rational form dp^2 + dp*dq + dq^2.  Every predicate on the decision
path is therefore decided in exact rational arithmetic; floats appear only
in rendered output.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product

from .automaton import (
    ABSENT_ALPHA,
    ABSENT_BETA,
    ABSENT_GAMMA,
    Role,
    State,
    TriangleAutomaton,
    delta,
)
from .reports import FormatError, Report, ScopeError
from .words import ECSeq

_SQRT3_2 = math.sqrt(3.0) / 2.0


@dataclass(frozen=True, order=True)
class ObliquePoint:
    p: Fraction
    q: Fraction

    def __add__(self, other: "ObliquePoint") -> "ObliquePoint":
        return ObliquePoint(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "ObliquePoint") -> "ObliquePoint":
        return ObliquePoint(self.p - other.p, self.q - other.q)

    def scale(self, r: Fraction) -> "ObliquePoint":
        return ObliquePoint(self.p * r, self.q * r)

    def dist_sq(self, other: "ObliquePoint") -> Fraction:
        dp, dq = self.p - other.p, self.q - other.q
        return dp * dp + dp * dq + dq * dq

    def cartesian(self) -> tuple[float, float]:
        return float(self.p) + float(self.q) / 2.0, float(self.q) * _SQRT3_2

    def to_json(self) -> list[str]:
        return [str(self.p), str(self.q)]

    def __str__(self) -> str:
        return f"({self.p},{self.q})"


ORIGIN = ObliquePoint(Fraction(0), Fraction(0))


def _q_form(p: Fraction, q: Fraction) -> Fraction:
    return p * p + p * q + q * q


def _bilinear(up, uq, vp, vq) -> Fraction:
    # polarization of _q_form: B(u,v) = up*vp + uq*vq + (up*vq + uq*vp)/2
    return up * vp + uq * vq + Fraction(up * vq + uq * vp, 2)


@dataclass(frozen=True, order=True)
class Triangle:
    """Upward triangle: lower-left corner plus side length, i.e. the region
    {p >= p0, q >= q0, p + q <= p0 + q0 + size}."""

    origin: ObliquePoint
    size: Fraction

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("triangle size must be positive")

    @property
    def csum(self) -> Fraction:
        return self.origin.p + self.origin.q + self.size

    def corner(self, role: Role) -> ObliquePoint:
        if role is Role.A:
            return self.origin
        if role is Role.B:
            return ObliquePoint(self.origin.p + self.size, self.origin.q)
        return ObliquePoint(self.origin.p, self.origin.q + self.size)

    def corners(self) -> tuple[ObliquePoint, ObliquePoint, ObliquePoint]:
        return tuple(self.corner(r) for r in Role)

    def contains(self, pt: ObliquePoint) -> bool:
        return (
            pt.p >= self.origin.p
            and pt.q >= self.origin.q
            and pt.p + pt.q <= self.csum
        )

    def vertex_role(self, pt: ObliquePoint) -> Role | None:
        for role in Role:
            if self.corner(role) == pt:
                return role
        return None

    def apply(self, inner: "Triangle") -> "Triangle":
        """Image of ``inner`` under the homothety with this image triangle."""
        return Triangle(self.origin + inner.origin.scale(self.size), self.size * inner.size)

    def map_point(self, pt: ObliquePoint) -> ObliquePoint:
        return self.origin + pt.scale(self.size)


UNIT = Triangle(ORIGIN, Fraction(1))


def classify_pair(t1: Triangle, t2: Triangle) -> tuple[str, ObliquePoint | None]:
    """Intersection of two upward triangles: 'disjoint', ('point', where),
    or 'overlap' (two-dimensional)."""
    p = max(t1.origin.p, t2.origin.p)
    q = max(t1.origin.q, t2.origin.q)
    c = min(t1.csum, t2.csum)
    if p + q > c:
        return "disjoint", None
    if p + q == c:
        return "point", ObliquePoint(p, q)
    return "overlap", None


def point_segment_dist_sq(pt: ObliquePoint, a: ObliquePoint, b: ObliquePoint) -> Fraction:
    wp, wq = pt.p - a.p, pt.q - a.q
    vp, vq = b.p - a.p, b.q - a.q
    qv = _q_form(vp, vq)
    if qv == 0:
        return _q_form(wp, wq)
    t = _bilinear(wp, wq, vp, vq) / qv
    t = min(max(t, Fraction(0)), Fraction(1))
    return _q_form(wp - t * vp, wq - t * vq)


def point_triangle_dist_sq(pt: ObliquePoint, t: Triangle) -> Fraction:
    if t.contains(pt):
        return Fraction(0)
    a, b, g = t.corners()
    return min(
        point_segment_dist_sq(pt, a, b),
        point_segment_dist_sq(pt, a, g),
        point_segment_dist_sq(pt, b, g),
    )


def triangle_dist_sq(t1: Triangle, t2: Triangle) -> Fraction:
    kind, _ = classify_pair(t1, t2)
    if kind != "disjoint":
        return Fraction(0)
    best = None
    for pt in t1.corners():
        d = point_triangle_dist_sq(pt, t2)
        best = d if best is None or d < best else best
    for pt in t2.corners():
        d = point_triangle_dist_sq(pt, t1)
        best = d if best is None or d < best else best
    return best


# ---------------------------------------------------------------------------
# Gasket specifications


@dataclass(frozen=True)
class GasketSpec:
    """IFS of upward homothetic triangles, stored by image triangle.

    Map j sends z to origin_j + size_j * z in oblique coordinates; the
    classical shift parameter is recovered as origin_j / size_j.
    """

    triangles: tuple[Triangle, ...]

    def __post_init__(self):
        if not self.triangles:
            raise ValueError("a gasket needs at least one triangle")
        object.__setattr__(self, "triangles", tuple(self.triangles))

    @property
    def n(self) -> int:
        return len(self.triangles)

    def triangle(self, sym: int) -> Triangle:
        if not 1 <= sym <= self.n:
            raise ValueError(f"symbol {sym} out of range 1..{self.n}")
        return self.triangles[sym - 1]

    def cylinder(self, word) -> Triangle:
        """Image triangle of the composed map along ``word``."""
        out = UNIT
        for sym in word:
            out = out.apply(self.triangle(sym))
        return out

    def fixed_point(self, sym: int) -> ObliquePoint:
        t = self.triangle(sym)
        return t.origin.scale(1 / (1 - t.size))

    @cached_property
    def ratios(self) -> tuple[Fraction, ...]:
        return tuple(t.size for t in self.triangles)

    @property
    def r_min(self) -> Fraction:
        return min(self.ratios)

    @property
    def r_max(self) -> Fraction:
        return max(self.ratios)

    def to_json(self) -> dict:
        return {
            "triangles": [
                {"origin": t.origin.to_json(), "size": str(t.size)}
                for t in self.triangles
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "GasketSpec":
        try:
            triangles = tuple(
                Triangle(
                    ObliquePoint(Fraction(t["origin"][0]), Fraction(t["origin"][1])),
                    Fraction(t["size"]),
                )
                for t in data["triangles"]
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad gasket spec: {exc}") from exc
        for t in triangles:
            if not 0 < t.size < 1:
                raise FormatError(f"triangle size {t.size} not in (0, 1)")
        return cls(triangles)


@dataclass(frozen=True)
class CornerAssign:
    alpha: int
    beta: int
    gamma: int

    def of_role(self, role: Role) -> int:
        return (self.alpha, self.beta, self.gamma)[role]

    def present(self, role: Role) -> bool:
        return self.of_role(role) >= 1

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


@dataclass(frozen=True)
class Contact:
    """Ordered touching record: map i's v-corner equals map j's u-corner."""

    i: int
    j: int
    v_role: Role
    u_role: Role
    point: ObliquePoint

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "v_role": self.v_role.label,
            "u_role": self.u_role.label,
            "point": self.point.to_json(),
        }


def validate_spec(spec: GasketSpec) -> Report:
    """Containment plus pairwise vertex-only intersection, all exact.

    A nonempty pairwise intersection must be a single point that is a
    vertex of *both* triangles; anything else is reported.
    """
    report = Report()
    for sym in range(1, spec.n + 1):
        t = spec.triangle(sym)
        if not 0 < t.size < 1:
            report.add("ratio", f"triangle {sym} has size {t.size} not in (0,1)", (sym,))
        if t.origin.p < 0 or t.origin.q < 0 or t.csum > 1:
            report.add(
                "containment",
                f"triangle {sym} at {t.origin} size {t.size} leaves the unit triangle",
                (sym,),
            )
    for i, j in combinations(range(1, spec.n + 1), 2):
        ti, tj = spec.triangle(i), spec.triangle(j)
        kind, pt = classify_pair(ti, tj)
        if kind == "overlap":
            report.add(
                "overlap",
                f"triangles {i} and {j} overlap in a two-dimensional region",
                (i, j),
            )
        elif kind == "point":
            ri, rj = ti.vertex_role(pt), tj.vertex_role(pt)
            if ri is None or rj is None:
                which = j if ri is not None else i
                report.add(
                    "touch-not-vertex",
                    f"triangles {i} and {j} meet at {pt}, which is not a "
                    f"vertex of triangle {which}",
                    (i, j, str(pt)),
                )
    report.stats["n"] = spec.n
    report.stats["maps"] = [
        {"ratio": str(t.size), "shift": (t.origin.scale(1 / t.size)).to_json()}
        for t in spec.triangles
    ]
    return report


def corner_symbols(spec: GasketSpec) -> CornerAssign:
    """Which map fixes each corner of the unit triangle, if any."""
    alpha = beta = gamma = None
    for sym in range(1, spec.n + 1):
        t = spec.triangle(sym)
        if t.origin == ORIGIN:
            alpha = sym
        if t.origin.q == 0 and t.origin.p + t.size == 1:
            beta = sym
        if t.origin.p == 0 and t.origin.q + t.size == 1:
            gamma = sym
    return CornerAssign(
        alpha if alpha is not None else ABSENT_ALPHA,
        beta if beta is not None else ABSENT_BETA,
        gamma if gamma is not None else ABSENT_GAMMA,
    )


def contacts(spec: GasketSpec) -> tuple[Contact, ...]:
    """All ordered touching records (each unordered touch appears twice)."""
    out = []
    for i, j in combinations(range(1, spec.n + 1), 2):
        ti, tj = spec.triangle(i), spec.triangle(j)
        kind, pt = classify_pair(ti, tj)
        if kind != "point":
            continue
        ri, rj = ti.vertex_role(pt), tj.vertex_role(pt)
        if ri is None or rj is None:
            raise ValueError(f"invalid spec: non-vertex touch between {i} and {j}")
        out.append(Contact(i, j, ri, rj, pt))
        out.append(Contact(j, i, rj, ri, pt))
    return tuple(sorted(out, key=lambda c: (c.i, c.j)))


def topology_automaton(spec: GasketSpec) -> TriangleAutomaton:
    """Touching-structure automaton of the gasket.

    A touch contributes an edge only when both involved corner symbols are
    present: the touching point lies in the attractor piece of map i iff
    the corresponding corner of the unit triangle lies in the attractor,
    which happens iff that corner's map exists.
    """
    assign = corner_symbols(spec)
    p_ab, p_ag, p_bg = set(), set(), set()
    for c in contacts(spec):
        if not (assign.present(c.v_role) and assign.present(c.u_role)):
            continue
        key = (c.u_role, c.v_role)
        if key == (Role.A, Role.B):
            p_ab.add((c.i, c.j))
        elif key == (Role.A, Role.G):
            p_ag.add((c.i, c.j))
        elif key == (Role.B, Role.G):
            p_bg.add((c.i, c.j))
        # mirrored orientations are covered by the reversed contact
    return TriangleAutomaton(
        n=spec.n,
        alpha=assign.alpha,
        beta=assign.beta,
        gamma=assign.gamma,
        p_ab=frozenset(p_ab),
        p_ag=frozenset(p_ag),
        p_bg=frozenset(p_bg),
    )


def horizontal_blocks(spec: GasketSpec) -> tuple[tuple[int, ...], ...]:
    """Maximal left-to-right chains under the geometric right-corner-to-
    left-corner adjacency, singletons included, sorted by chain head.

    Uses raw geometry only: corner membership in the attractor is
    irrelevant here.
    """
    succ: dict[int, int] = {}
    pred: dict[int, int] = {}
    for c in contacts(spec):
        if (c.v_role, c.u_role) == (Role.B, Role.A):
            succ[c.i] = c.j
            pred[c.j] = c.i
    blocks = []
    for head in range(1, spec.n + 1):
        if head in pred:
            continue
        chain = [head]
        while chain[-1] in succ:
            chain.append(succ[chain[-1]])
        blocks.append(tuple(chain))
    return tuple(sorted(blocks, key=lambda b: b[0]))


@dataclass(frozen=True)
class FamilyReport:
    top_isolated: bool
    gamma_in_k: bool
    alpha_beta_same_block: bool
    in_f_t_ab: bool

    def to_json(self) -> dict:
        return {
            "top_isolated": self.top_isolated,
            "gamma_in_k": self.gamma_in_k,
            "alpha_beta_same_block": self.alpha_beta_same_block,
            "in_f_t_ab": self.in_f_t_ab,
        }


def family_check(spec: GasketSpec) -> FamilyReport:
    """Membership test for the classifiable family: the top map (when
    present) touches nothing, and the two bottom corners sit in one
    horizontal block."""
    assign = corner_symbols(spec)
    if assign.alpha < 1 or assign.beta < 1:
        raise ScopeError(
            "both bottom corner maps must exist (the attractor is totally "
            "disconnected otherwise)"
        )
    gamma_in_k = assign.gamma >= 1
    top_isolated = False
    if gamma_in_k:
        tg = spec.triangle(assign.gamma)
        top_isolated = all(
            classify_pair(tg, spec.triangle(j))[0] == "disjoint"
            for j in range(1, spec.n + 1)
            if j != assign.gamma
        )
    same_block = any(
        assign.alpha in block and assign.beta in block
        for block in horizontal_blocks(spec)
    )
    in_family = (top_isolated or not gamma_in_k) and same_block
    return FamilyReport(top_isolated, gamma_in_k, same_block, in_family)


def pi_point(spec: GasketSpec, x: ECSeq) -> ObliquePoint:
    """Exact attractor point coded by an eventually-constant word: the
    composed map along the prefix applied to the tail map's fixed point."""
    if x.max_symbol() > spec.n:
        raise ValueError("sequence symbol out of alphabet")
    pt = spec.fixed_point(x.tail)
    for sym in reversed(x.prefix):
        pt = spec.triangle(sym).map_point(pt)
    return pt


# ---------------------------------------------------------------------------
# Certified separation bounds


def _pair_cover_dist_sq(
    spec: GasketSpec,
    t1: Triangle,
    t2: Triangle,
    depth: int,
    enough: Fraction | None = None,
) -> Fraction:
    """Exact minimum squared distance between the depth-level covers of two
    cylinder triangles, by best-first subdivision.

    A pair's triangle distance bounds all its sub-pair distances from
    below, so the first depth-level pair popped from the queue carries the
    exact minimum.  When ``enough`` is given the search stops as soon as
    every remaining pair is certifiably at least that far apart.
    """
    heap: list = [(triangle_dist_sq(t1, t2), 0, t1, t2, 0)]
    counter = 0
    while heap:
        d, _, u1, u2, lvl = heapq.heappop(heap)
        if enough is not None and d >= enough:
            return d
        if lvl == depth:
            return d
        for a in spec.triangles:
            c1 = u1.apply(a)
            for b in spec.triangles:
                c2 = u2.apply(b)
                counter += 1
                heapq.heappush(
                    heap, (triangle_dist_sq(c1, c2), counter, c1, c2, lvl + 1)
                )
    raise AssertionError("subdivision queue exhausted")


def _point_cover_dist_sq(
    spec: GasketSpec, z: ObliquePoint, t: Triangle, depth: int
) -> Fraction:
    """Exact minimum squared distance from a point to a depth-level cover."""
    heap: list = [(point_triangle_dist_sq(z, t), 0, t, 0)]
    counter = 0
    while heap:
        d, _, u, lvl = heapq.heappop(heap)
        if lvl == depth:
            return d
        for a in spec.triangles:
            c = u.apply(a)
            counter += 1
            heapq.heappush(heap, (point_triangle_dist_sq(z, c), counter, c, lvl + 1))
    raise AssertionError("subdivision queue exhausted")


@dataclass(frozen=True)
class SeparationBounds:
    """Certified rational lower bounds on the squared separation constants.

    ``c1_sq_lb`` bounds the squared distance between disjoint first-level
    pieces (None when every pair touches), ``c2_sq_lb`` the squared
    distance from a piece to a main corner point outside it.  The combined
    bound is valid because the attractor has diameter one.
    """

    c1_sq_lb: Fraction | None
    c2_sq_lb: Fraction
    cprime_sq_lb: Fraction
    refine_depth: int

    def to_json(self) -> dict:
        return {
            "c1_sq_lb": None if self.c1_sq_lb is None else str(self.c1_sq_lb),
            "c2_sq_lb": str(self.c2_sq_lb),
            "cprime_sq_lb": str(self.cprime_sq_lb),
            "refine_depth": self.refine_depth,
        }


def separation_constants(spec: GasketSpec, refine_depth: int = 2) -> SeparationBounds:
    assign = corner_symbols(spec)
    if assign.alpha < 1 or assign.beta < 1:
        raise ScopeError("separation bounds need both bottom corner maps")

    touching = set()
    for c in contacts(spec):
        if assign.present(c.v_role) and assign.present(c.u_role):
            touching.add((min(c.i, c.j), max(c.i, c.j)))

    c1 = None
    for i, j in combinations(range(1, spec.n + 1), 2):
        if (i, j) in touching:
            continue
        d = _pair_cover_dist_sq(
            spec, spec.triangle(i), spec.triangle(j), refine_depth, enough=c1
        )
        if d == 0:
            raise ValueError(
                f"cannot certify separation of pieces {i},{j} at refine depth "
                f"{refine_depth}; increase it"
            )
        c1 = d if c1 is None or d < c1 else c1

    c2 = None
    for role in Role:
        corner_sym = assign.of_role(role)
        if corner_sym < 1:
            continue
        z = UNIT.corner(role)
        for i in range(1, spec.n + 1):
            if i == corner_sym:
                continue
            d = _point_cover_dist_sq(spec, z, spec.triangle(i), refine_depth)
            if d == 0:
                raise ValueError(
                    f"cannot certify separation of piece {i} from corner "
                    f"{role.label} at refine depth {refine_depth}; increase it"
                )
            c2 = d if c2 is None or d < c2 else c2
    if c2 is None:
        raise ValueError("no corner/piece pairs to bound")

    cprime = c2 if c1 is None else min(c1, c2)
    return SeparationBounds(c1, c2, cprime, refine_depth)


# ---------------------------------------------------------------------------
# Cross-checks between geometry and automaton


def geometry_vs_automaton_audit(
    spec: GasketSpec,
    depth: int,
    refine: int = 2,
    workers: int | None = None,
) -> Report:
    """For every pair of equal-length words, the automaton state and the
    exact cylinder geometry must tell the same story; disjoint pairs must
    additionally satisfy the certified sharp-separation inequality."""
    report = Report()
    assign = corner_symbols(spec)
    aut = topology_automaton(spec)
    # Any certified level gives a valid lower bound; level 1 keeps the
    # cover sizes small while already separating phantom-corner touches.
    # The separation inequality is normalized by the attractor diameter,
    # which is 1 only when both bottom corner maps exist; skip it otherwise.
    bounds = None
    if assign.alpha >= 1 and assign.beta >= 1:
        bounds = separation_constants(spec, refine_depth=min(refine, 1))

    words = list(product(range(1, spec.n + 1), repeat=depth))
    cylinders = {w: spec.cylinder(w) for w in words}
    checked = 0
    sep_checked = 0
    for wi, wj in combinations(words, 2):
        checked += 1
        state = State.ID
        for a, b in zip(wi, wj):
            state = delta(aut, state, (a, b))
            if state is State.EXIT:
                break
        ti, tj = cylinders[wi], cylinders[wj]
        kind, pt = classify_pair(ti, tj)
        if kind == "overlap":
            report.add(
                "overlap",
                f"cylinders {wi} and {wj} overlap in a 2d region",
                (wi, wj),
            )
            continue
        if kind == "point":
            ri, rj = ti.vertex_role(pt), tj.vertex_role(pt)
            if ri is None or rj is None:
                report.add(
                    "touch-not-vertex",
                    f"cylinders {wi} and {wj} meet at {pt} which is not a "
                    "shared vertex",
                    (wi, wj, str(pt)),
                )
                continue
            in_attractor = assign.present(ri) and assign.present(rj)
        else:
            in_attractor = False

        if kind == "point" and in_attractor:
            expected = _state_for_roles(rj, ri)
            if state is not expected:
                report.add(
                    "state-mismatch",
                    f"cylinders {wi},{wj} share vertex {pt} (roles {ri.label},"
                    f"{rj.label}) but automaton reached {state.name}",
                    (wi, wj, state.name),
                )
            else:
                # exact witness of the defining corner equation
                if ti.corner(ri) != tj.corner(rj):
                    report.add(
                        "corner-equation",
                        f"cylinders {wi},{wj}: corner points differ",
                        (wi, wj),
                    )
        else:
            if state is not State.EXIT:
                report.add(
                    "state-mismatch",
                    f"cylinders {wi},{wj} have disjoint attractor pieces but "
                    f"automaton reached {state.name}",
                    (wi, wj, state.name),
                )
                continue
            if bounds is None:
                continue
            sep_checked += 1
            required = bounds.cprime_sq_lb * min(ti.size, tj.size) ** 2
            lb = _pair_cover_dist_sq(spec, ti, tj, refine, enough=required)
            if lb < required:
                report.add(
                    "sharp-separation",
                    f"could not certify dist({wi},{wj})^2 >= {required} at "
                    f"refine depth {refine}",
                    (wi, wj, str(required)),
                )
    report.stats["pairs"] = checked
    report.stats["separation_pairs"] = sep_checked
    report.stats["cprime_sq_lb"] = None if bounds is None else str(bounds.cprime_sq_lb)
    return report


def _state_for_roles(u_role: Role, v_role: Role) -> State:
    return {
        (Role.A, Role.B): State.S_AB,
        (Role.B, Role.A): State.S_BA,
        (Role.A, Role.G): State.S_AG,
        (Role.G, Role.A): State.S_GA,
        (Role.B, Role.G): State.S_BG,
        (Role.G, Role.B): State.S_GB,
    }[(u_role, v_role)]


def component_audit(spec: GasketSpec, depth: int) -> Report:
    """Evidence that nontrivial connected components are horizontal.

    (a) every component of the depth-k horizontal cylinder adjacency sits
        on one baseline and has height at most r_max ** k;
    (b) when the top map exists, its k-fold self-cylinder is exactly
        disjoint from every other depth-k cylinder, certifying that the
        top corner's component is a single point.
    """
    fam = family_check(spec)
    if not (fam.in_f_t_ab or not fam.gamma_in_k):
        raise ScopeError("component audit requires the classifiable family")
    assign = corner_symbols(spec)
    report = Report()

    for k in range(1, depth + 1):
        words = list(product(range(1, spec.n + 1), repeat=k))
        cyl = {w: spec.cylinder(w) for w in words}
        by_b_corner = {cyl[w].corner(Role.B): w for w in words}
        parent: dict[tuple, tuple] = {w: w for w in words}

        def find(w):
            while parent[w] != w:
                parent[w] = parent[parent[w]]
                w = parent[w]
            return w

        for w in words:
            nb = by_b_corner.get(cyl[w].corner(Role.A))
            if nb is not None:
                parent[find(w)] = find(nb)
        comps: dict[tuple, list[tuple]] = {}
        for w in words:
            comps.setdefault(find(w), []).append(w)
        rmax_k = spec.r_max ** k
        for members in comps.values():
            baselines = {cyl[w].origin.q for w in members}
            if len(baselines) > 1:
                report.add(
                    "baseline",
                    f"depth-{k} horizontal component {sorted(members)} spans "
                    f"several baselines",
                    (k, tuple(sorted(members))),
                )
            extent = max(cyl[w].size for w in members)
            if extent > rmax_k:
                report.add(
                    "extent",
                    f"depth-{k} component height {extent} exceeds {rmax_k}",
                    (k, str(extent)),
                )

        if assign.gamma >= 1:
            top = (assign.gamma,) * k
            for w in words:
                if w == top:
                    continue
                kind, _ = classify_pair(cyl[top], cyl[w])
                if kind != "disjoint":
                    report.add(
                        "top-degeneracy",
                        f"top cylinder {top} meets cylinder {w} at depth {k}",
                        (k, w),
                    )
    report.stats["depth"] = depth
    return report


# ---------------------------------------------------------------------------
# Rendering

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def render_svg(
    spec: GasketSpec,
    depth: int,
    color_blocks: bool = False,
    width: int = 640,
    stroke: str = "#222222",
) -> str:
    """Deterministic SVG of all depth-k image triangles.

    Floats appear only here, formatted to fixed precision, and triangles
    are emitted in lexicographic word order, so output bytes are stable.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    height = width * _SQRT3_2
    block_of: dict[int, int] = {}
    if color_blocks:
        for b, block in enumerate(horizontal_blocks(spec)):
            for sym in block:
                block_of[sym] = b

    def fmt(v: float) -> str:
        return f"{v:.6f}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{fmt(height)}" viewBox="0 0 {width} {fmt(height)}">',
    ]
    words = [()] if depth == 0 else list(product(range(1, spec.n + 1), repeat=depth))
    count = 0
    for w in words:
        t = spec.cylinder(w)
        pts = []
        for role in Role:
            x, y = t.corner(role).cartesian()
            pts.append(f"{fmt(x * width)},{fmt((_SQRT3_2 - y) * width)}")
        if color_blocks and w:
            fill = _PALETTE[block_of[w[0]] % len(_PALETTE)]
        else:
            fill = "#cccccc"
        lines.append(
            f'<polygon points="{" ".join(pts)}" fill="{fill}" '
            f'stroke="{stroke}" stroke-width="0.5"/>'
        )
        count += 1
    lines.append(f"<!-- triangles: {count} -->")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
