"""Eight-state automata reading pairs of symbols, and the pseudo-metric
they induce on sequences.

The machine starts in ``Id``, stays there exactly on equal symbol pairs,
branches into one of six corner-pair states on the pairs listed in three
edge sets, and each pair state survives only its single loop input.  The
last step index before ``Exit`` is the *surviving time* of a sequence
pair; ``xi ** T`` then behaves like a distance once the edge sets satisfy
the gasket axioms checked by :func:`validate_triangle_gasket`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from functools import cached_property

from .reports import Report
from .words import ECSeq, INFINITY

ABSENT_ALPHA = -1
ABSENT_BETA = -2
ABSENT_GAMMA = -3

_ABSENT_CODES = (ABSENT_ALPHA, ABSENT_BETA, ABSENT_GAMMA)


class Role(IntEnum):
    """Corner roles of the base triangle: left, right, top."""

    A = 0
    B = 1
    G = 2

    @property
    def label(self) -> str:
        return {Role.A: "alpha", Role.B: "beta", Role.G: "gamma"}[self]


class State(IntEnum):
    ID = 0
    S_AB = 1
    S_BA = 2
    S_AG = 3
    S_GA = 4
    S_BG = 5
    S_GB = 6
    EXIT = 7

    @property
    def roles(self) -> tuple[Role, Role] | None:
        """Ordered role pair (u, v) of a pair state S_uv, else None."""
        return _PAIR_ROLES.get(self)

    @property
    def mirror(self) -> "State":
        return _MIRROR[self]


_PAIR_ROLES = {
    State.S_AB: (Role.A, Role.B),
    State.S_BA: (Role.B, Role.A),
    State.S_AG: (Role.A, Role.G),
    State.S_GA: (Role.G, Role.A),
    State.S_BG: (Role.B, Role.G),
    State.S_GB: (Role.G, Role.B),
}

_MIRROR = {
    State.ID: State.ID,
    State.EXIT: State.EXIT,
    State.S_AB: State.S_BA,
    State.S_BA: State.S_AB,
    State.S_AG: State.S_GA,
    State.S_GA: State.S_AG,
    State.S_BG: State.S_GB,
    State.S_GB: State.S_BG,
}

# (edge-set attribute, state of a stored pair, state of its mirror)
_EDGE_SETS = (
    ("p_ab", State.S_AB, State.S_BA),
    ("p_ag", State.S_AG, State.S_GA),
    ("p_bg", State.S_BG, State.S_GB),
)


@dataclass(frozen=True)
class TriangleAutomaton:
    """Automaton determined by the three stored edge sets.

    ``p_ab``, ``p_ag``, ``p_bg`` hold the pairs mapped from ``Id`` to
    S_ab, S_ag, S_bg; the mirrored pairs (to S_ba, S_ga, S_gb) are always
    derived, never stored, so the mirror symmetry cannot be broken by
    construction.  Corner fields hold a symbol of ``1..n`` or the absent
    code (-1, -2, -3).
    """

    n: int
    alpha: int
    beta: int
    gamma: int
    p_ab: frozenset[tuple[int, int]]
    p_ag: frozenset[tuple[int, int]]
    p_bg: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("alphabet size must be >= 1")
        for corner, code in (("alpha", -1), ("beta", -2), ("gamma", -3)):
            value = getattr(self, corner)
            if not (1 <= value <= self.n or value == code):
                raise ValueError(f"{corner} must be in 1..{self.n} or {code}")
        present = [c for c in (self.alpha, self.beta, self.gamma) if c >= 1]
        if len(set(present)) != len(present):
            raise ValueError("present corner symbols must be distinct")
        for name in ("p_ab", "p_ag", "p_bg"):
            pairs = getattr(self, name)
            if not isinstance(pairs, frozenset):
                object.__setattr__(self, name, frozenset(pairs))
                pairs = getattr(self, name)
            for i, j in pairs:
                if not (1 <= i <= self.n and 1 <= j <= self.n):
                    raise ValueError(f"{name} pair {i, j} out of range 1..{self.n}")
                if i == j:
                    raise ValueError(f"diagonal pair {i, j} not allowed in {name}")

    def corner(self, role: Role) -> int:
        return (self.alpha, self.beta, self.gamma)[role]

    def corner_present(self, role: Role) -> bool:
        return self.corner(role) >= 1

    @cached_property
    def _id_map(self) -> dict[tuple[int, int], State]:
        # Later assignments win, so insert mirrors first: on conflicting
        # (axiom-violating) edge sets the stored direction takes precedence
        # in the fixed order p_ab, p_ag, p_bg.
        table: dict[tuple[int, int], State] = {}
        for name, state, mirror in reversed(_EDGE_SETS):
            for i, j in sorted(getattr(self, name)):
                table[(j, i)] = mirror
        for name, state, mirror in reversed(_EDGE_SETS):
            for i, j in sorted(getattr(self, name)):
                table[(i, j)] = state
        return table

    @cached_property
    def loop_inputs(self) -> dict[State, tuple[int, int]]:
        """For each pair state S_uv its only surviving input (v_sym, u_sym)."""
        out = {}
        for state, (u, v) in _PAIR_ROLES.items():
            usym, vsym = self.corner(u), self.corner(v)
            if usym >= 1 and vsym >= 1:
                out[state] = (vsym, usym)
        return out

    def vertical_union(self) -> frozenset[tuple[int, int]]:
        return self.p_ag | self.p_bg

    def with_edges(self, **kwargs) -> "TriangleAutomaton":
        kwargs = {k: frozenset(v) for k, v in kwargs.items()}
        return replace(self, **kwargs)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "p_ab": [list(p) for p in sorted(self.p_ab)],
            "p_ag": [list(p) for p in sorted(self.p_ag)],
            "p_bg": [list(p) for p in sorted(self.p_bg)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TriangleAutomaton":
        return cls(
            n=int(data["n"]),
            alpha=int(data["alpha"]),
            beta=int(data["beta"]),
            gamma=int(data["gamma"]),
            p_ab=frozenset((int(i), int(j)) for i, j in data.get("p_ab", ())),
            p_ag=frozenset((int(i), int(j)) for i, j in data.get("p_ag", ())),
            p_bg=frozenset((int(i), int(j)) for i, j in data.get("p_bg", ())),
        )


def delta(aut: TriangleAutomaton, state: State, pair: tuple[int, int]) -> State:
    """One transition step.  There are no transitions out of Exit."""
    i, j = pair
    if not (1 <= i <= aut.n and 1 <= j <= aut.n):
        raise ValueError(f"input pair {pair} out of range 1..{aut.n}")
    if state is State.EXIT:
        raise ValueError("no transitions out of Exit")
    if state is State.ID:
        if i == j:
            return State.ID
        return aut._id_map.get((i, j), State.EXIT)
    if aut.loop_inputs.get(state) == pair:
        return state
    return State.EXIT


def itinerary(aut: TriangleAutomaton, x: ECSeq, y: ECSeq) -> tuple[list[State], int | float]:
    """State sequence S_0, S_1, ... of the pair (x, y) and its surviving time.

    The list ends with the first Exit when the itinerary is finite;
    otherwise it stops once the states provably repeat forever.
    """
    t = surviving_time(aut, x, y)
    states = [State.ID]
    last = int(t) + 1 if t is not INFINITY else max(len(x.prefix), len(y.prefix)) + 2
    for k in range(1, last + 1):
        states.append(delta(aut, states[-1], (x[k], y[k])))
    return states, t


def surviving_time(aut: TriangleAutomaton, x: ECSeq, y: ECSeq) -> int | float:
    """Largest k with S_k != Exit; INFINITY when Exit is never reached.

    Beyond position m = max prefix length the input pair is constant.
    From any state a constant input either exits within two further steps
    or revisits a state: Id self-loops exactly on equal pairs, and a pair
    state self-loops exactly on its single loop input.  A revisited state
    then repeats forever, so m + 2 steps decide the whole infinite run.
    """
    if x.max_symbol() > aut.n or y.max_symbol() > aut.n:
        raise ValueError("sequence symbol out of automaton alphabet")
    m = max(len(x.prefix), len(y.prefix))
    state = State.ID
    for k in range(1, m + 3):
        state = delta(aut, state, (x[k], y[k]))
        if state is State.EXIT:
            return k - 1
    return INFINITY


def rho(aut: TriangleAutomaton, x: ECSeq, y: ECSeq, xi: float) -> float:
    """xi ** surviving_time; zero on equivalent sequences."""
    if not 0.0 < xi < 1.0:
        raise ValueError("xi must lie in (0, 1)")
    t = surviving_time(aut, x, y)
    return 0.0 if t is INFINITY else xi ** t


def equivalent(aut: TriangleAutomaton, x: ECSeq, y: ECSeq) -> bool:
    return surviving_time(aut, x, y) is INFINITY


# ---------------------------------------------------------------------------
# Axiom validation


def validate_triangle_gasket(aut: TriangleAutomaton) -> Report:
    """Check the gasket axioms; an empty report means all hold.

    (a) uniqueness: each relation is a partial bijection (out- and
        in-degree at most 1 per symbol);
    (b) gathering: for every a, b, c, among {a->c vertical-left,
        a->b vertical-right, b->c horizontal} any two imply the third;
    (c) boundary: each present corner symbol is minimal in its two
        incident relations (six forbidden edge positions);
    (d) disjointness: an ordered pair may be mapped to at most one pair
        state once mirrors are added.
    """
    report = Report()

    for name, state, _ in _EDGE_SETS:
        pairs = getattr(aut, name)
        out: dict[int, list[int]] = {}
        into: dict[int, list[int]] = {}
        for i, j in sorted(pairs):
            out.setdefault(i, []).append(j)
            into.setdefault(j, []).append(i)
        for i, js in sorted(out.items()):
            if len(js) > 1:
                report.add(
                    "uniqueness",
                    f"symbol {i} has {len(js)} successors {js} in {name}",
                    (name, i, tuple(js)),
                )
        for j, is_ in sorted(into.items()):
            if len(is_) > 1:
                report.add(
                    "uniqueness",
                    f"symbol {j} has {len(is_)} predecessors {is_} in {name}",
                    (name, j, tuple(is_)),
                )

    for a in range(1, aut.n + 1):
        for b in range(1, aut.n + 1):
            for c in range(1, aut.n + 1):
                facts = (
                    (a, c) in aut.p_ag,
                    (a, b) in aut.p_bg,
                    (b, c) in aut.p_ab,
                )
                if sum(facts) == 2:
                    report.add(
                        "gathering",
                        f"exactly two of a={a}<c={c} (ag), a={a}<b={b} (bg), "
                        f"b={b}<c={c} (ab) hold",
                        (a, b, c, facts),
                    )

    # Forbidden in-edges per present corner: the corner must be minimal in
    # the two relations named below ("uv-minimal" = "vu-maximal", so the
    # gamma clauses forbid outgoing vertical edges instead).
    if aut.alpha >= 1:
        _forbid_in(report, aut.p_ag, aut.alpha, "alpha must be ag-minimal")
        _forbid_in(report, aut.p_ab, aut.alpha, "alpha must be ab-minimal")
    if aut.beta >= 1:
        _forbid_in(report, aut.p_bg, aut.beta, "beta must be bg-minimal")
        _forbid_out(report, aut.p_ab, aut.beta, "beta must be ab-maximal")
    if aut.gamma >= 1:
        _forbid_out(report, aut.p_ag, aut.gamma, "gamma must be ag-maximal")
        _forbid_out(report, aut.p_bg, aut.gamma, "gamma must be bg-maximal")

    targets: dict[tuple[int, int], list[str]] = {}
    for name, state, mirror in _EDGE_SETS:
        for i, j in sorted(getattr(aut, name)):
            targets.setdefault((i, j), []).append(state.name)
            targets.setdefault((j, i), []).append(mirror.name)
    for pair, states in sorted(targets.items()):
        if len(states) > 1:
            report.add(
                "disjointness",
                f"pair {pair} maps to {len(states)} states {states}",
                (pair, tuple(states)),
            )

    report.stats["n"] = aut.n
    return report


def _forbid_in(report: Report, pairs, corner: int, rule: str) -> None:
    for i, j in sorted(pairs):
        if j == corner:
            report.add("boundary", f"{rule}, but edge ({i},{j}) exists", (i, j))


def _forbid_out(report: Report, pairs, corner: int, rule: str) -> None:
    for i, j in sorted(pairs):
        if i == corner:
            report.add("boundary", f"{rule}, but edge ({i},{j}) exists", (i, j))


def check_gamma_isolated(aut: TriangleAutomaton) -> Report:
    """Three clauses: all corners present, vertical union acyclic, gamma
    isolated in all three relations."""
    report = Report()
    missing = [r.label for r in Role if not aut.corner_present(r)]
    if missing:
        report.add("corners", f"absent corner symbols: {missing}", tuple(missing))

    cycle = _find_cycle(aut.n, aut.vertical_union())
    if cycle is not None:
        report.add(
            "cycle",
            f"vertical union graph has directed cycle {cycle}",
            tuple(cycle),
        )

    if aut.gamma >= 1:
        g = aut.gamma
        for name, _, _ in _EDGE_SETS:
            for i, j in sorted(getattr(aut, name)):
                if g in (i, j):
                    report.add(
                        "gamma-touched",
                        f"gamma={g} occurs in {name} edge ({i},{j})",
                        (name, i, j),
                    )
    report.stats["gamma"] = aut.gamma
    return report


def is_gamma_isolated(aut: TriangleAutomaton) -> bool:
    return check_gamma_isolated(aut).ok


def _find_cycle(n: int, edges) -> list[int] | None:
    succ: dict[int, list[int]] = {}
    for i, j in sorted(edges):
        succ.setdefault(i, []).append(j)
    color = {v: 0 for v in range(1, n + 1)}  # 0 new, 1 on stack, 2 done
    stack_path: list[int] = []

    def visit(v: int) -> list[int] | None:
        color[v] = 1
        stack_path.append(v)
        for w in succ.get(v, ()):
            if color[w] == 1:
                return stack_path[stack_path.index(w):] + [w]
            if color[w] == 0:
                found = visit(w)
                if found is not None:
                    return found
        stack_path.pop()
        color[v] = 2
        return None

    for v in range(1, n + 1):
        if color[v] == 0:
            found = visit(v)
            if found is not None:
                return found
    return None


def pseudo_metric_audit(aut: TriangleAutomaton, depth: int, workers: int | None = None) -> Report:
    """Exhaustive check of the relaxed triangle inequality and T-symmetry.

    Enumerates every eventually-constant word with prefix length <= depth
    (all tails) and verifies, over all triples,
    ``min(T(x,y), T(x,z)) <= T(y,z) + 1`` with infinity larger than
    everything, plus ``T(x,y) == T(y,x)`` over all pairs.
    """
    from . import _grid

    grid = _grid.SeqGrid.full(aut.n, depth)
    t = _grid.t_matrix(aut, grid, workers=workers)
    report = Report()
    report.stats["sequences"] = grid.size
    report.stats["triples"] = grid.size ** 3
    finite = t[t != _grid.INF8]
    report.stats["max_finite_t"] = int(finite.max()) if finite.size else None

    sym_bad = _grid.first_asymmetry(t)
    if sym_bad is not None:
        i, j = sym_bad
        report.add(
            "symmetry",
            f"T({grid.ecseq(i)}, {grid.ecseq(j)}) = {t[i, j]} but mirror is {t[j, i]}",
            (str(grid.ecseq(i)), str(grid.ecseq(j))),
        )

    for x, y, z, txy, txz, tyz in _grid.triangle_violations(t, limit=25):
        report.add(
            "triangle",
            f"min(T(x,y)={txy}, T(x,z)={txz}) > T(y,z)={tyz} + 1 for "
            f"x={grid.ecseq(x)} y={grid.ecseq(y)} z={grid.ecseq(z)}",
            (str(grid.ecseq(x)), str(grid.ecseq(y)), str(grid.ecseq(z))),
        )
    return report
