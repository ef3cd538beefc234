"""The surviving-time-preserving bijection between sequence spaces of an
automaton and its one-step simplification.

The map factors a sequence greedily into segments from a small pattern
family, rewrites each segment through a fixed segment bijection, and
concatenates.  Segment lengths are preserved, classes are matched
greedily (longest prefix first), and the whole map is invertible because
the image family decomposes uniquely as well.

An equivalent streaming transducer is derived from the same rules purely
for inspection and cross-checking; the decomposition is the normative
implementation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .automaton import TriangleAutomaton
from .reports import Report
from .simplify import SIDE_AG, SimplStep
from .words import ECSeq, canonicalize


@dataclass(frozen=True)
class DecompParams:
    """Symbols driving the segment patterns.

    ``tau`` and ``kappa`` name the deleted edge; ``alpha`` is the
    horizontal corner on the edge's side (the left corner normally, the
    right corner when ``mirror`` is set) and ``gamma`` the top corner.
    All four are distinct except that tau may equal alpha.
    """

    n: int
    tau: int
    kappa: int
    alpha: int
    gamma: int
    mirror: bool = False

    def __post_init__(self):
        syms = (self.tau, self.kappa, self.alpha, self.gamma)
        if any(not 1 <= s <= self.n for s in syms):
            raise ValueError(f"symbols {syms} out of range 1..{self.n}")
        if self.kappa in (self.tau, self.alpha, self.gamma):
            raise ValueError("kappa must differ from tau, alpha and gamma")
        if self.gamma in (self.tau, self.alpha):
            raise ValueError("gamma must differ from tau and alpha")
        if self.n < 4:
            if self.tau == self.alpha and self.n == 3:
                warnings.warn(
                    "alphabet of size 3 with tau == alpha: the construction "
                    "is stated for alphabets of size >= 4",
                    stacklevel=2,
                )
            else:
                raise ValueError("alphabet size must be >= 4")

    @classmethod
    def from_step(cls, aut: TriangleAutomaton, step: SimplStep) -> "DecompParams":
        mirror = step.side != SIDE_AG
        alpha = aut.beta if mirror else aut.alpha
        if alpha < 1 or aut.gamma < 1:
            raise ValueError("decomposition params need present corner symbols")
        return cls(
            n=aut.n,
            tau=step.tau,
            kappa=step.kappa,
            alpha=alpha,
            gamma=aut.gamma,
            mirror=mirror,
        )


class SegmentKind(Enum):
    LETTER = "LETTER"
    TG_K = "TG_K"        # tau gamma^k, k >= 2
    KAK_G = "KAK_G"      # kappa alpha^k kappa gamma, k >= 0
    KAK_GG = "KAK_GG"    # kappa alpha^k kappa gamma gamma, k >= 0
    TGG = "TGG"          # tau gamma gamma


@dataclass(frozen=True)
class Segment:
    kind: SegmentKind
    word: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.word)

    def run(self) -> int:
        """The pattern's run parameter k."""
        if self.kind is SegmentKind.TG_K:
            return len(self.word) - 1
        if self.kind is SegmentKind.KAK_G:
            return len(self.word) - 3
        if self.kind is SegmentKind.KAK_GG:
            return len(self.word) - 4
        raise ValueError(f"{self.kind} has no run parameter")


@dataclass(frozen=True)
class Decomposition:
    """Head segments followed by the tail letter repeating forever."""

    segments: tuple[Segment, ...]
    tail: int

    def head_word(self) -> tuple[int, ...]:
        out: list[int] = []
        for seg in self.segments:
            out.extend(seg.word)
        return tuple(out)


def _run_length(x: ECSeq, pos: int, sym: int) -> int | None:
    """Length of the run of ``sym`` starting at pos; None when infinite."""
    if x.tail == sym:
        k = pos
        while k <= len(x.prefix):
            if x[k] != sym:
                return k - pos
            k += 1
        return None
    k = pos
    while x[k] == sym:
        k += 1
    return k - pos


def m_decompose(x: ECSeq, params: DecompParams) -> Decomposition:
    """Greedy longest-match factorization over {tau gamma^k (k>=2),
    kappa alpha^k kappa gamma (k>=0)} plus single letters."""
    return _decompose(x, params, image_side=False)


def mp_decompose(u: ECSeq, params: DecompParams) -> Decomposition:
    """Greedy factorization over the image family {kappa alpha^k kappa
    gamma, kappa alpha^k kappa gamma gamma, tau gamma gamma} plus letters;
    the longer gamma-gamma form wins whenever it matches."""
    return _decompose(u, params, image_side=True)


def _decompose(x: ECSeq, params: DecompParams, image_side: bool) -> Decomposition:
    if x.max_symbol() > params.n:
        raise ValueError("sequence symbol out of alphabet")
    tau, kappa, alpha, gamma = params.tau, params.kappa, params.alpha, params.gamma
    segments: list[Segment] = []
    i = 1
    while i <= len(x.prefix):
        c = x[i]
        if c == tau and not image_side:
            run = _run_length(x, i + 1, gamma)
            if run is None:
                raise ValueError(
                    f"no longest match at position {i}: the top-run pattern "
                    "extends forever (tail equals the top symbol)"
                )
            if run >= 2:
                segments.append(Segment(SegmentKind.TG_K, x.head(i + run)[i - 1:]))
                i += run + 1
                continue
        elif c == tau and image_side:
            if x[i + 1] == gamma and x[i + 2] == gamma:
                segments.append(Segment(SegmentKind.TGG, (tau, gamma, gamma)))
                i += 3
                continue
        elif c == kappa:
            run = _run_length(x, i + 1, alpha)
            if run is not None and x[i + 1 + run] == kappa and x[i + 2 + run] == gamma:
                if image_side and x[i + 3 + run] == gamma:
                    segments.append(
                        Segment(SegmentKind.KAK_GG, x.head(i + 3 + run)[i - 1:])
                    )
                    i += run + 4
                    continue
                segments.append(Segment(SegmentKind.KAK_G, x.head(i + 2 + run)[i - 1:]))
                i += run + 3
                continue
        segments.append(Segment(SegmentKind.LETTER, (c,)))
        i += 1
    return Decomposition(tuple(segments), x.tail)


def segment_map(seg: Segment, params: DecompParams) -> Segment:
    """The segment bijection: top-runs shorten into hook patterns, hooks
    grow a second top symbol, the shortest hook becomes the short
    top-pair, letters are fixed."""
    tau, kappa, alpha, gamma = params.tau, params.kappa, params.alpha, params.gamma
    if seg.kind is SegmentKind.LETTER:
        return seg
    if seg.kind is SegmentKind.TG_K:
        k = seg.run()
        return Segment(
            SegmentKind.KAK_G, (kappa,) + (alpha,) * (k - 2) + (kappa, gamma)
        )
    if seg.kind is SegmentKind.KAK_G:
        k = seg.run()
        if k == 0:
            return Segment(SegmentKind.TGG, (tau, gamma, gamma))
        return Segment(
            SegmentKind.KAK_GG, (kappa,) + (alpha,) * (k - 1) + (kappa, gamma, gamma)
        )
    raise ValueError(f"segment kind {seg.kind} is not in the source family")


def segment_unmap(seg: Segment, params: DecompParams) -> Segment:
    tau, kappa, alpha, gamma = params.tau, params.kappa, params.alpha, params.gamma
    if seg.kind is SegmentKind.LETTER:
        return seg
    if seg.kind is SegmentKind.KAK_G:
        k = seg.run()
        return Segment(SegmentKind.TG_K, (tau,) + (gamma,) * (k + 2))
    if seg.kind is SegmentKind.KAK_GG:
        k = seg.run()
        return Segment(
            SegmentKind.KAK_G, (kappa,) + (alpha,) * (k + 1) + (kappa, gamma)
        )
    if seg.kind is SegmentKind.TGG:
        return Segment(SegmentKind.KAK_G, (kappa, kappa, gamma))
    raise ValueError(f"segment kind {seg.kind} is not in the image family")


def map_forward(x: ECSeq, params: DecompParams) -> ECSeq:
    """Image of a sequence: rewrite every segment of its decomposition."""
    dec = m_decompose(x, params)
    out: list[int] = []
    for seg in dec.segments:
        out.extend(segment_map(seg, params).word)
    return canonicalize(out, dec.tail)


def map_backward(u: ECSeq, params: DecompParams) -> ECSeq:
    dec = mp_decompose(u, params)
    out: list[int] = []
    for seg in dec.segments:
        out.extend(segment_unmap(seg, params).word)
    return canonicalize(out, dec.tail)


# ---------------------------------------------------------------------------
# Distortion audit


def distortion_audit(
    before: TriangleAutomaton,
    after: TriangleAutomaton,
    step: SimplStep,
    depth: int,
    workers: int | None = None,
) -> Report:
    """Exhaustive check of the map's guarantees on the tail-kappa grid.

    Over all pairs with prefix length <= depth: the round trip is the
    identity, surviving times move by at most 5, common prefixes shrink by
    at most 2, infinite times match up exactly, and the simplified
    automaton never outlives the original on identical inputs.
    """
    from . import _grid

    params = DecompParams.from_step(before, step)
    grid = _grid.SeqGrid.single_tail(before.n, depth, step.kappa)
    m = grid.size
    report = Report()

    seqs = [grid.ecseq(i) for i in range(m)]
    images = [map_forward(x, params) for x in seqs]
    roundtrip_bad = [
        (str(x), str(u)) for x, u in zip(seqs, images) if map_backward(u, params) != x
    ]
    for x, u in roundtrip_bad[:10]:
        report.add("roundtrip", f"backward(forward({x})) != original (image {u})", (x, u))

    index = grid.index_map()
    gidx = np.empty(m, dtype=np.int64)
    for i, u in enumerate(images):
        key = (
            np.asarray(u.head(depth), dtype=np.uint8).tobytes(),
            u.tail,
        )
        if key not in index:
            report.add("image-off-grid", f"image {u} left the grid", (str(u),))
            return report
        gidx[i] = index[key]
    if len(set(gidx.tolist())) != m:
        report.add("not-injective", "map is not injective on the grid", ())

    gsyms = grid.syms[gidx]
    gtails = grid.tails[gidx]
    table_m = _grid.delta_table(before)
    table_mp = _grid.delta_table(after)

    max_diff = 0
    bound_hits = 0
    prefix_ok = True
    equality_witness = None
    pairs = 0
    # every check below is symmetric in (x, y): scan columns >= row start
    for start, stop in grid.row_chunks(m, _grid.resolve_workers(workers)):
        rows = slice(start, stop)
        cols = slice(start, m)
        tm = _grid.t_block(
            table_m,
            before.n,
            grid.syms[rows],
            grid.tails[rows],
            grid.syms[cols],
            grid.tails[cols],
            depth,
        )
        tmp_g = _grid.t_block(
            table_mp, after.n, gsyms[rows], gtails[rows], gsyms[cols], gtails[cols], depth
        )
        tmp_same = _grid.t_block(
            table_mp,
            after.n,
            grid.syms[rows],
            grid.tails[rows],
            grid.syms[cols],
            grid.tails[cols],
            depth,
        )
        inf_m = tm == _grid.INF8
        inf_g = tmp_g == _grid.INF8
        if (inf_m != inf_g).any():
            for r, c in np.argwhere(inf_m != inf_g)[:5]:
                report.add(
                    "equivalence",
                    f"exactly one of T, T' is infinite for "
                    f"x={seqs[start + r]} y={seqs[start + c]}",
                    (str(seqs[start + r]), str(seqs[start + c])),
                )
        finite = ~inf_m & ~inf_g
        diff = np.abs(
            tm.astype(np.int16) - tmp_g.astype(np.int16), where=finite, out=np.zeros(tm.shape, np.int16)
        )
        chunk_max = int(diff.max()) if diff.size else 0
        max_diff = max(max_diff, chunk_max)
        over = finite & (diff > 5)
        if over.any():
            for r, c in np.argwhere(over)[:5]:
                report.add(
                    "distortion",
                    f"|T - T'| = {diff[r, c]} > 5 for x={seqs[start + r]} "
                    f"y={seqs[start + c]}",
                    (str(seqs[start + r]), str(seqs[start + c])),
                )
        bad81 = tmp_same > tm
        if bad81.any():
            for r, c in np.argwhere(bad81)[:5]:
                report.add(
                    "monotonicity",
                    f"T'(x,y) > T(x,y) on identical inputs for "
                    f"x={seqs[start + r]} y={seqs[start + c]}",
                    (str(seqs[start + r]), str(seqs[start + c])),
                )

        cpl = _grid.cpl_block(grid.syms[rows], grid.syms[cols])
        cplg = _grid.cpl_block(gsyms[rows], gsyms[cols])
        distinct = cpl < depth  # equal padded rows = equal sequences here
        short = distinct & (cplg.astype(np.int16) < cpl.astype(np.int16) - 2)
        if short.any():
            prefix_ok = False
            for r, c in np.argwhere(short)[:5]:
                report.add(
                    "prefix-bound",
                    f"|g(x)^g(y)| = {cplg[r, c]} < |x^y| - 2 = {cpl[r, c] - 2} "
                    f"for x={seqs[start + r]} y={seqs[start + c]}",
                    (str(seqs[start + r]), str(seqs[start + c])),
                )
        if equality_witness is None:
            tight = distinct & (cplg.astype(np.int16) == cpl.astype(np.int16) - 2)
            hit = np.argwhere(tight)
            if hit.size:
                r, c = hit[0]
                equality_witness = (str(seqs[start + r]), str(seqs[start + c]))
        bound_hits += int((finite & (diff == 5)).sum())
        pairs += tm.size

    report.stats.update(
        {
            "pairs": pairs,
            "max_abs_diff": max_diff,
            "distortion_bound": 5,
            "bound_hits": bound_hits,
            "prefix_bound_ok": prefix_ok,
            "prefix_equality_witness": equality_witness,
            "roundtrip_failures": len(roundtrip_bad),
        }
    )
    return report


# ---------------------------------------------------------------------------
# Derived streaming transducer (inspection / cross-check only)

_STATES = ("Id", "T1", "T2", "T3", "T4", "K1", "KK", "KA", "KAK")


def transducer_step(
    state: str, c: int, params: DecompParams
) -> tuple[tuple[int, ...], str]:
    """One streaming step; output symbols emitted plus the next state.

    States buffer at most two undecided input symbols (plus knowledge of
    long runs already re-emitted), matching the factorization's bounded
    lookahead.  When tau == alpha, run continuation takes precedence over
    starting a new top-run segment.
    """
    tau, kappa, alpha, gamma = params.tau, params.kappa, params.alpha, params.gamma

    def restart(emitted: tuple[int, ...], sym: int) -> tuple[tuple[int, ...], str]:
        if sym == tau:
            return emitted, "T1"
        if sym == kappa:
            return emitted, "K1"
        return emitted + (sym,), "Id"

    if state == "Id":
        return restart((), c)
    if state == "T1":  # held: tau
        if c == gamma:
            return (), "T2"
        return restart((tau,), c)
    if state == "T2":  # held: tau gamma
        if c == gamma:
            return (kappa,), "T3"
        return restart((tau, gamma), c)
    if state == "T3":  # seen tau gamma^2, emitted kappa
        if c == gamma:
            return (alpha,), "T4"
        return restart((kappa, gamma), c)
    if state == "T4":  # seen tau gamma^j (j >= 3), emitted kappa alpha^(j-2)
        if c == gamma:
            return (alpha,), "T4"
        return restart((kappa, gamma), c)
    if state == "K1":  # held: kappa
        if c == alpha:
            return (kappa,), "KA"
        if c == kappa:
            return (), "KK"
        return restart((kappa,), c)
    if state == "KK":  # held: kappa kappa
        if c == gamma:
            return (tau, gamma, gamma), "Id"
        if c == alpha:
            return (kappa, kappa), "KA"
        if c == kappa:
            return (kappa,), "KK"
        return restart((kappa, kappa), c)
    if state == "KA":  # seen kappa alpha^j, emitted kappa alpha^(j-1)
        if c == alpha:
            return (alpha,), "KA"
        if c == kappa:
            return (), "KAK"
        if c == gamma and tau == alpha:
            # the run's last alpha doubles as tau starting a top run
            return (), "T2"
        return restart((alpha,), c)
    if state == "KAK":  # seen kappa alpha^j kappa, emitted kappa alpha^(j-1)
        if c == gamma:
            return (kappa, gamma, gamma), "Id"
        if c == alpha:
            return (alpha, kappa), "KA"
        if c == kappa:
            return (alpha,), "KK"
        return restart((alpha, kappa), c)
    raise ValueError(f"unknown state {state}")


def run_transducer(params: DecompParams, symbols) -> list[int]:
    """Feed symbols through the streaming form; returns emitted output.

    Output lags input by at most two symbols at every moment, so feeding
    the first m + 2 symbols determines the image's first m symbols.
    """
    state = "Id"
    out: list[int] = []
    for c in symbols:
        emitted, state = transducer_step(state, c, params)
        out.extend(emitted)
    return out


def derived_transducer(params: DecompParams) -> dict:
    """Explicit state/edge table of the streaming form, for export."""
    edges = []
    for state in _STATES:
        for c in range(1, params.n + 1):
            emitted, nxt = transducer_step(state, c, params)
            edges.append(
                {"from": state, "input": c, "output": list(emitted), "to": nxt}
            )
    return {"states": list(_STATES), "initial": "Id", "edges": edges}
