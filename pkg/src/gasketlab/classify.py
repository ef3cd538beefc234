"""Block profiles, equivalence verdicts and machine-checkable certificates.

Two classifiable gaskets whose horizontal blocks match in size (and whose
corner-to-corner blocks match) are homeomorphic, via: simplify both
touching-structure automata down to their horizontal skeletons, relabel
one skeleton onto the other block by block, and compose the per-step
sequence bijections.  The pieces of that argument are exactly what the
audits here re-check numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .automaton import TriangleAutomaton
from .geometry import (
    GasketSpec,
    SeparationBounds,
    corner_symbols,
    family_check,
    horizontal_blocks,
    pi_point,
    separation_constants,
    topology_automaton,
)
from .reports import Report, ScopeError
from .simplify import SimplStep, final_simplification, one_step, step_invariant_audit
from .transducer import distortion_audit

LIPSCHITZ = "LIPSCHITZ"
BIHOLDER_HOMEOMORPHIC = "BIHOLDER_HOMEOMORPHIC"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class BlockProfile:
    sizes: tuple[int, ...]  # descending
    ab_block_size: int
    uniform_ratio: Fraction | None

    def to_json(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "ab_block_size": self.ab_block_size,
            "uniform_ratio": None if self.uniform_ratio is None else str(self.uniform_ratio),
        }


def block_profile(spec: GasketSpec) -> BlockProfile:
    assign = corner_symbols(spec)
    if assign.alpha < 1 or assign.beta < 1:
        raise ScopeError("block profile needs both bottom corner maps")
    blocks = horizontal_blocks(spec)
    ab = next(
        (b for b in blocks if assign.alpha in b and assign.beta in b), None
    )
    if ab is None:
        raise ScopeError("bottom corner maps lie in different horizontal blocks")
    ratios = set(spec.ratios)
    return BlockProfile(
        sizes=tuple(sorted((len(b) for b in blocks), reverse=True)),
        ab_block_size=len(ab),
        uniform_ratio=next(iter(ratios)) if len(ratios) == 1 else None,
    )


@dataclass(frozen=True)
class Verdict:
    level: str
    witness: tuple[tuple[int, int], ...] | None
    reasons: str

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "witness": None if self.witness is None else [list(p) for p in self.witness],
            "reasons": self.reasons,
        }


def classify_pair(e: GasketSpec, f: GasketSpec) -> Verdict:
    """Sufficient-condition classification; never claims non-equivalence."""
    for name, spec in (("first", e), ("second", f)):
        fam = family_check(spec)
        if not fam.in_f_t_ab:
            raise ScopeError(f"the {name} gasket is outside the classifiable family")
    pe, pf = block_profile(e), block_profile(f)
    if pe.sizes != pf.sizes or pe.ab_block_size != pf.ab_block_size:
        return Verdict(
            INCONCLUSIVE,
            None,
            f"block profiles differ ({list(pe.sizes)} ab={pe.ab_block_size} vs "
            f"{list(pf.sizes)} ab={pf.ab_block_size}); the criterion is only "
            "sufficient, so no conclusion",
        )
    witness = tuple(sorted(isometry_symbol_map(e, f).items()))
    if pe.uniform_ratio is not None and pe.uniform_ratio == pf.uniform_ratio:
        return Verdict(
            LIPSCHITZ,
            witness,
            f"matching block profile and a shared contraction ratio "
            f"{pe.uniform_ratio}",
        )
    return Verdict(
        BIHOLDER_HOMEOMORPHIC,
        witness,
        "matching block profile (sizes and corner block agree)",
    )


def isometry_symbol_map(e: GasketSpec, f: GasketSpec) -> dict[int, int]:
    """Block-by-block symbol bijection: the corner blocks pair up, other
    blocks pair by size (ties by smallest member), and the j-th chain
    element maps to the j-th chain element."""
    ae, af = corner_symbols(e), corner_symbols(f)
    be = horizontal_blocks(e)
    bf = horizontal_blocks(f)
    ab_e = next(b for b in be if ae.alpha in b and ae.beta in b)
    ab_f = next(b for b in bf if af.alpha in b and af.beta in b)
    if len(ab_e) != len(ab_f):
        raise ScopeError("corner blocks have different sizes")
    rest_e = sorted((b for b in be if b != ab_e), key=lambda b: (len(b), min(b)))
    rest_f = sorted((b for b in bf if b != ab_f), key=lambda b: (len(b), min(b)))
    if [len(b) for b in rest_e] != [len(b) for b in rest_f]:
        raise ScopeError("block size multisets do not match")
    mapping: dict[int, int] = {}
    for block_e, block_f in zip([ab_e] + rest_e, [ab_f] + rest_f):
        for s, t in zip(block_e, block_f):
            mapping[s] = t
    return mapping


def final_automaton(spec: GasketSpec) -> tuple[TriangleAutomaton, tuple[SimplStep, ...]]:
    """Horizontal skeleton of the touching structure plus the step list."""
    return final_simplification(topology_automaton(spec))


@dataclass(frozen=True)
class HolderParams:
    s: float
    xi: float
    c: float
    separation: SeparationBounds

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "xi": self.xi,
            "c": self.c,
            "separation": self.separation.to_json(),
        }


def holder_params(spec: GasketSpec, refine_depth: int = 2) -> HolderParams:
    """Exponent, base and constant of the coding-map distortion bounds.

    s = sqrt(log r_max / log r_min) lies in (0, 1]; xi = r_min ** s; the
    constant is max(2, 1 / (r_min * C')) with C' the certified separation
    bound (a lower bound on C' gives a valid upper bound on the constant).
    """
    bounds = separation_constants(spec, refine_depth=refine_depth)
    r_min, r_max = float(spec.r_min), float(spec.r_max)
    s = math.sqrt(math.log(r_max) / math.log(r_min))
    xi = r_min ** s
    cprime = math.sqrt(float(bounds.cprime_sq_lb))
    c = max(2.0, 1.0 / (r_min * cprime))
    return HolderParams(s=s, xi=xi, c=c, separation=bounds)


def biholder_audit(
    spec: GasketSpec,
    depth: int,
    sample_count: int = 10000,
    refine_depth: int = 2,
    workers: int | None = None,
    pair_cap: int = 200_000_000,
    tolerance: float = 1e-9,
) -> Report:
    """Check the two-sided distortion bounds of the coding map.

    Over pairs of eventually-constant words (exhaustive when the grid is
    small enough, sampled otherwise): C^-1 * rho^(1/s) <= |pi(x) - pi(y)|
    <= C * rho^s, with rho evaluated at the canonical xi, distances exact,
    and the stated relative tolerance applied to the float comparisons.
    Zero distance and zero rho must coincide exactly.
    """
    from . import _grid

    assign = corner_symbols(spec)
    if assign.alpha < 1 or assign.beta < 1:
        raise ScopeError("the distortion audit needs both bottom corner maps")
    hp = holder_params(spec, refine_depth=refine_depth)
    aut = topology_automaton(spec)
    grid = _grid.SeqGrid.full(spec.n, depth)
    m = grid.size
    report = Report()
    report.stats["holder"] = hp.to_json()

    points = [pi_point(spec, grid.ecseq(i)) for i in range(m)]
    denom = 1
    for pt in points:
        denom = denom * pt.p.denominator // math.gcd(denom, pt.p.denominator)
        denom = denom * pt.q.denominator // math.gcd(denom, pt.q.denominator)
    exact = denom <= (1 << 26)
    report.stats["exact_coordinates"] = exact
    if exact:
        ps = np.array([int(pt.p * denom) for pt in points], dtype=np.int64)
        qs = np.array([int(pt.q * denom) for pt in points], dtype=np.int64)
        scale_sq = float(denom) ** 2
    else:
        ps = np.array([float(pt.p) for pt in points])
        qs = np.array([float(pt.q) for pt in points])
        scale_sq = 1.0

    # per-T-value squared bounds, INF handled separately
    steps = depth + 2
    tvals = np.arange(steps + 1, dtype=np.float64)
    rho = hp.xi ** tvals
    low_sq = (rho ** (2.0 / hp.s)) / (hp.c ** 2) * (1.0 - tolerance) ** 2
    up_sq = (rho ** (2.0 * hp.s)) * (hp.c ** 2) * (1.0 + tolerance) ** 2
    tight_up = 0.0
    tight_low = 0.0

    if m * m <= pair_cap:
        table = _grid.delta_table(aut)
        for start, stop in grid.row_chunks(m, _grid.resolve_workers(workers)):
            rows, cols = slice(start, stop), slice(start, m)
            t = _grid.t_block(
                table, spec.n, grid.syms[rows], grid.tails[rows],
                grid.syms[cols], grid.tails[cols], depth,
            )
            dp = ps[rows][:, None] - ps[cols][None, :]
            dq = qs[rows][:, None] - qs[cols][None, :]
            d2 = (dp * dp + dp * dq + dq * dq).astype(np.float64) / scale_sq
            inf_mask = t == _grid.INF8
            zero = d2 == 0.0
            for r, c in np.argwhere(inf_mask != zero)[:5]:
                report.add(
                    "identification",
                    f"rho is {'zero' if inf_mask[r, c] else 'positive'} but the "
                    f"coded points are {'equal' if zero[r, c] else 'distinct'} "
                    f"for x={grid.ecseq(start + r)} y={grid.ecseq(start + c)}",
                    (str(grid.ecseq(start + r)), str(grid.ecseq(start + c))),
                )
            finite = ~inf_mask
            tf = np.where(finite, t, 0).astype(np.int64)
            bad_low = finite & (d2 < low_sq[tf])
            bad_up = finite & (d2 > up_sq[tf])
            for kind, bad in (("lower-bound", bad_low), ("upper-bound", bad_up)):
                for r, c in np.argwhere(bad)[:5]:
                    report.add(
                        kind,
                        f"T={t[r, c]} d^2={d2[r, c]:.6g} violates the {kind} for "
                        f"x={grid.ecseq(start + r)} y={grid.ecseq(start + c)}",
                        (str(grid.ecseq(start + r)), str(grid.ecseq(start + c))),
                    )
            if finite.any():
                rho_f = hp.xi ** tf.astype(np.float64)
                with np.errstate(divide="ignore", invalid="ignore"):
                    tight_up = max(
                        tight_up, float(np.sqrt((d2 / rho_f ** (2 * hp.s))[finite].max()))
                    )
                    pos = finite & (d2 > 0)
                    if pos.any():
                        tight_low = max(
                            tight_low,
                            float(np.sqrt((rho_f ** (2 / hp.s) / np.where(pos, d2, 1.0))[pos].max())),
                        )
        report.stats["pairs"] = m * (m + 1) // 2
        report.stats["mode"] = "exhaustive"
    else:
        from .automaton import surviving_time
        from .words import INFINITY

        rng = np.random.default_rng(20240801)
        idx = rng.integers(0, m, size=(sample_count, 2))
        checked = 0
        for i, j in idx:
            x, y = grid.ecseq(int(i)), grid.ecseq(int(j))
            t = surviving_time(aut, x, y)
            d2f = float(pi_point(spec, x).dist_sq(pi_point(spec, y)))
            if t is INFINITY:
                if d2f != 0.0:
                    report.add("identification", f"rho=0 but points differ: {x} {y}", (str(x), str(y)))
                continue
            rho_v = hp.xi ** t
            d = math.sqrt(d2f)
            if d < rho_v ** (1 / hp.s) / hp.c * (1 - tolerance) or d > hp.c * rho_v ** hp.s * (1 + tolerance):
                report.add("bounds", f"T={t} d={d:.6g} out of bounds: {x} {y}", (str(x), str(y)))
            tight_up = max(tight_up, d / rho_v ** hp.s)
            if d > 0:
                tight_low = max(tight_low, rho_v ** (1 / hp.s) / d)
            checked += 1
        report.stats["pairs"] = checked
        report.stats["mode"] = "sampled"

    report.stats["tightest_upper_constant"] = tight_up
    report.stats["tightest_lower_constant"] = tight_low
    return report


def transport_audit(
    e: GasketSpec,
    f: GasketSpec,
    depth: int,
    tail: int | None = None,
    workers: int | None = None,
) -> Report:
    """The relabeling isometry must transport surviving times exactly.

    Structurally: the symbol map carries one horizontal skeleton onto the
    other with matching bottom corners, which covers *all* sequence pairs.
    Numerically: exhaustive equality of surviving times on the depth grid
    (all tails by default, one tail when given).
    """
    from . import _grid

    report = Report()
    mapping = isometry_symbol_map(e, f)
    estar, _ = final_automaton(e)
    fstar, _ = final_automaton(f)

    iso_ok = (
        mapping[estar.alpha] == fstar.alpha
        and mapping[estar.beta] == fstar.beta
        and {(mapping[i], mapping[j]) for i, j in estar.p_ab} == set(fstar.p_ab)
    )
    if not iso_ok:
        report.add(
            "skeleton-isomorphism",
            "the symbol map does not carry one horizontal skeleton onto the other",
            tuple(sorted(mapping.items())),
        )
    report.stats["structural_isomorphism"] = iso_ok

    lut = np.zeros(e.n + 1, dtype=np.uint8)
    for k, v in mapping.items():
        lut[k] = v
    grid = (
        _grid.SeqGrid.full(e.n, depth)
        if tail is None
        else _grid.SeqGrid.single_tail(e.n, depth, tail)
    )
    m = grid.size
    te = _grid.delta_table(estar)
    tf = _grid.delta_table(fstar)
    fsyms = lut[grid.syms]
    ftails = lut[grid.tails]
    mismatches = 0
    for start, stop in grid.row_chunks(m, _grid.resolve_workers(workers)):
        rows, cols = slice(start, stop), slice(start, m)
        a = _grid.t_block(
            te, e.n, grid.syms[rows], grid.tails[rows], grid.syms[cols], grid.tails[cols], depth
        )
        b = _grid.t_block(
            tf, f.n, fsyms[rows], ftails[rows], fsyms[cols], ftails[cols], depth
        )
        bad = a != b
        if bad.any():
            mismatches += int(bad.sum())
            for r, c in np.argwhere(bad)[:5]:
                report.add(
                    "transport",
                    f"T* differs under the relabeling for "
                    f"x={grid.ecseq(start + r)} y={grid.ecseq(start + c)}",
                    (str(grid.ecseq(start + r)), str(grid.ecseq(start + c))),
                )
    report.stats["pairs"] = m * (m + 1) // 2
    report.stats["mismatches"] = mismatches
    report.stats["mapping"] = [list(p) for p in sorted(mapping.items())]
    return report


@dataclass
class ChainReport:
    """Full equivalence certificate for a classified pair."""

    verdict: Verdict
    e_chain: list
    f_chain: list
    isometry: list
    composed_exponent: int
    step_audits: list
    transport: Report
    ok: bool

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.to_json(),
            "e_chain": self.e_chain,
            "f_chain": self.f_chain,
            "isometry": self.isometry,
            "composed_exponent": self.composed_exponent,
            "step_audits": self.step_audits,
            "transport": self.transport.to_json(),
            "ok": self.ok,
        }


def equivalence_chain(
    e: GasketSpec,
    f: GasketSpec,
    audit_depth: int = 3,
    transport_depth: int = 3,
    workers: int | None = None,
) -> ChainReport:
    """Build and re-check the whole certificate for a classified pair.

    Each simplification step carries its invariant and distortion audits
    (every step distorts surviving times by at most 5, so the composed
    two-sided exponent is 5 times the total number of steps); the second
    chain is traversed in reverse through the relabeling isometry.
    """
    verdict = classify_pair(e, f)
    if verdict.level == INCONCLUSIVE:
        raise ScopeError("no certificate: the pair is not classified as equivalent")

    chains = []
    audits = []
    all_ok = True
    for label, spec in (("E", e), ("F", f)):
        aut = topology_automaton(spec)
        links = []
        current = aut
        index = 0
        while current.vertical_union():
            nxt, step = one_step(current)
            inv = step_invariant_audit(current, nxt, step)
            dist = distortion_audit(current, nxt, step, audit_depth, workers=workers)
            all_ok = all_ok and inv.ok and dist.ok
            audits.append(
                {
                    "which": label,
                    "index": index,
                    "step": step.to_json(),
                    "invariants_ok": inv.ok,
                    "distortion_ok": dist.ok,
                    "max_abs_diff": dist.stats["max_abs_diff"],
                }
            )
            links.append({"step": step.to_json(), "result": nxt.to_json()})
            current = nxt
            index += 1
        chains.append({"initial": aut.to_json(), "steps": links, "final": current.to_json()})

    transport = transport_audit(e, f, transport_depth, workers=workers)
    all_ok = all_ok and transport.ok
    total_steps = len(chains[0]["steps"]) + len(chains[1]["steps"])
    return ChainReport(
        verdict=verdict,
        e_chain=[chains[0]],
        f_chain=[chains[1]],
        isometry=[list(p) for p in sorted(isometry_symbol_map(e, f).items())],
        composed_exponent=5 * total_steps,
        step_audits=audits,
        transport=transport,
        ok=all_ok,
    )
