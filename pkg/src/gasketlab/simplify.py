"""Stepwise removal of vertical edges from a gasket automaton.

Each step deletes one terminal vertical edge (tau, kappa) -- terminal
meaning kappa has no further vertical successors -- together with the
second edge of its gathering family when kappa has the relevant
horizontal neighbour.  Horizontal edges are never touched, so iterating
to exhaustion leaves exactly the horizontal structure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automaton import (
    Role,
    TriangleAutomaton,
    check_gamma_isolated,
    validate_triangle_gasket,
)
from .reports import Report

SIDE_AG = "AG"
SIDE_BG = "BG"


@dataclass(frozen=True)
class SimplStep:
    """One edge deletion record.

    ``side`` names the relation the deleted edge (tau, kappa) lived in;
    ``lam`` is the partner symbol when the step also removed the gathering
    companion edge (tau, lam), else None.  ``kind`` is "TKL" exactly when
    ``lam`` is present.
    """

    kind: str
    side: str
    tau: int
    kappa: int
    lam: int | None = None

    def __post_init__(self):
        if self.kind not in ("TK", "TKL") or self.side not in (SIDE_AG, SIDE_BG):
            raise ValueError("bad step tag")
        if (self.kind == "TKL") != (self.lam is not None):
            raise ValueError("kind TKL iff a partner symbol is present")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "side": self.side,
            "tau": self.tau,
            "kappa": self.kappa,
            "lambda": self.lam,
        }


def select_terminal_edge(aut: TriangleAutomaton) -> tuple[int, int, str]:
    """Deterministic choice of a vertical edge whose head has no vertical
    successors.

    Starting from the lexicographically smallest vertical edge, follow the
    ag-successor when one exists, else the bg-successor; acyclicity of the
    vertical union makes this terminate, and the final edge's head is then
    maximal in both vertical relations.
    """
    union = aut.vertical_union()
    if not union:
        raise ValueError("no vertical edges to select")
    ag_succ = {i: j for i, j in aut.p_ag}
    bg_succ = {i: j for i, j in aut.p_bg}
    edge = min(union)
    seen = {edge}
    while True:
        head = edge[1]
        nxt = ag_succ.get(head, bg_succ.get(head))
        if nxt is None:
            side = SIDE_AG if edge in aut.p_ag else SIDE_BG
            return edge[0], edge[1], side
        edge = (head, nxt)
        if edge in seen:
            raise ValueError("vertical union graph has a cycle")
        seen.add(edge)


def one_step(aut: TriangleAutomaton) -> tuple[TriangleAutomaton, SimplStep]:
    """Delete one terminal vertical edge plus its gathering companion.

    For an ag-side edge the companion is (tau, lam) with lam the
    horizontal predecessor of kappa: the gathering condition applied to
    tau->kappa (ag) and lam->kappa (ab) forces tau->lam (bg), and removing
    both keeps the condition intact.  The bg side mirrors this with the
    horizontal successor.
    """
    tau, kappa, side = select_terminal_edge(aut)
    if side == SIDE_AG:
        lam = next((i for i, j in aut.p_ab if j == kappa), None)
        if lam is None:
            step = SimplStep("TK", side, tau, kappa)
            out = aut.with_edges(p_ag=aut.p_ag - {(tau, kappa)})
        else:
            if (tau, lam) not in aut.p_bg:
                raise ValueError(
                    f"gathering-implied edge ({tau},{lam}) missing from p_bg; "
                    "input automaton is not a gasket automaton"
                )
            step = SimplStep("TKL", side, tau, kappa, lam)
            out = aut.with_edges(
                p_ag=aut.p_ag - {(tau, kappa)},
                p_bg=aut.p_bg - {(tau, lam)},
            )
    else:
        lam = next((j for i, j in aut.p_ab if i == kappa), None)
        if lam is None:
            step = SimplStep("TK", side, tau, kappa)
            out = aut.with_edges(p_bg=aut.p_bg - {(tau, kappa)})
        else:
            if (tau, lam) not in aut.p_ag:
                raise ValueError(
                    f"gathering-implied edge ({tau},{lam}) missing from p_ag; "
                    "input automaton is not a gasket automaton"
                )
            step = SimplStep("TKL", side, tau, kappa, lam)
            out = aut.with_edges(
                p_bg=aut.p_bg - {(tau, kappa)},
                p_ag=aut.p_ag - {(tau, lam)},
            )
    return out, step


def final_simplification(
    aut: TriangleAutomaton,
) -> tuple[TriangleAutomaton, tuple[SimplStep, ...]]:
    """Iterate :func:`one_step` until no vertical edges remain.

    Requires a valid gasket automaton; when vertical edges exist it must
    additionally be gamma-isolated (otherwise the intermediate automata
    are not guaranteed to stay in the family).
    """
    if aut.vertical_union():
        bad = validate_triangle_gasket(aut)
        if not bad.ok:
            raise ValueError(f"not a gasket automaton: {bad.violations[0].detail}")
        iso = check_gamma_isolated(aut)
        if not iso.ok:
            raise ValueError(
                f"gamma-isolated condition fails: {iso.violations[0].detail}"
            )
    steps = []
    current = aut
    budget = len(aut.p_ag) + len(aut.p_bg)
    while current.vertical_union():
        if len(steps) >= budget:
            raise AssertionError("simplification failed to terminate in bound")
        current, step = one_step(current)
        steps.append(step)
    return current, tuple(steps)


def step_invariant_audit(
    before: TriangleAutomaton, after: TriangleAutomaton, step: SimplStep
) -> Report:
    """Everything a single step must preserve or establish.

    The simplified automaton stays a gamma-isolated gasket automaton, the
    horizontal edges are untouched, tau and kappa end up maximal in both
    vertical relations, kappa is isolated in the relation it was deleted
    from, and the step's symbols avoid the corners they must avoid.
    """
    report = Report()
    report.merge(validate_triangle_gasket(after), prefix="after_")
    report.merge(check_gamma_isolated(after), prefix="after_iso_")

    if before.p_ab != after.p_ab:
        report.add("horizontal-changed", "horizontal edge set changed", ())

    for sym, name in ((step.tau, "tau"), (step.kappa, "kappa")):
        for rel, pairs in (("p_ag", after.p_ag), ("p_bg", after.p_bg)):
            if any(i == sym for i, _ in pairs):
                report.add(
                    "double-maximal",
                    f"{name}={sym} still has a successor in {rel}",
                    (name, sym, rel),
                )

    deleted_rel = after.p_ag if step.side == SIDE_AG else after.p_bg
    rel_name = "p_ag" if step.side == SIDE_AG else "p_bg"
    if any(step.kappa in pair for pair in deleted_rel):
        report.add(
            "kappa-isolated",
            f"kappa={step.kappa} still occurs in {rel_name}",
            (step.kappa, rel_name),
        )

    forbidden = (
        (before.alpha, "alpha") if step.side == SIDE_AG else (before.beta, "beta")
    )
    if step.kappa in (forbidden[0], before.gamma):
        report.add(
            "kappa-corner",
            f"kappa={step.kappa} equals corner {forbidden[1]} or gamma",
            (step.kappa,),
        )
    if step.tau == before.gamma:
        report.add("tau-corner", f"tau={step.tau} equals gamma", (step.tau,))

    report.stats["step"] = step.to_json()
    return report
