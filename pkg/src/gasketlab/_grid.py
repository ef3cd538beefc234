"""Vectorized enumeration of eventually-constant words and batch runs.

The audits enumerate every word ``w . t^inf`` with ``|w| <= depth`` and
need surviving times for millions of sequence pairs; a padded numpy
representation makes those runs cheap.  A canonical word with prefix
length <= depth corresponds one-to-one to (word of length exactly depth,
tail), the prefix padded with the tail symbol, so grids are plain integer
arrays.

All results are exact: the transition table is the real automaton and a
run of ``depth + 2`` steps decides every infinite itinerary (beyond the
prefixes the input is constant, and under constant input any state either
exits within two steps or repeats forever).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .automaton import State, TriangleAutomaton
from .words import ECSeq, canonicalize

INF8 = np.int8(127)

_CHUNK_ELEMENTS = 4_000_000  # per-chunk pair budget, keeps peaks ~tens of MB


def resolve_workers(workers: int | None) -> int:
    if workers is not None and workers >= 1:
        return workers
    env = os.environ.get("GASKETLAB_THREADS", "")
    if env.isdigit() and int(env) >= 1:
        return int(env)
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SeqGrid:
    """Padded representation of a set of eventually-constant words."""

    n: int
    depth: int
    syms: np.ndarray  # (M, depth) uint8, positions 1..depth (tail-padded)
    tails: np.ndarray  # (M,) uint8

    @property
    def size(self) -> int:
        return self.syms.shape[0]

    @classmethod
    def full(cls, n: int, depth: int, tails=None) -> "SeqGrid":
        """All words w.t^inf with |w| <= depth; tail-major, word-lex order."""
        if tails is None:
            tails = range(1, n + 1)
        tails = list(tails)
        words = _all_words(n, depth)
        syms = np.tile(words, (len(tails), 1))
        tcol = np.repeat(np.asarray(tails, dtype=np.uint8), len(words))
        return cls(n=n, depth=depth, syms=syms, tails=tcol)

    @classmethod
    def single_tail(cls, n: int, depth: int, tail: int) -> "SeqGrid":
        return cls.full(n, depth, tails=[tail])

    @classmethod
    def from_ecseqs(cls, n: int, depth: int, seqs) -> "SeqGrid":
        rows = np.empty((len(seqs), depth), dtype=np.uint8)
        tails = np.empty(len(seqs), dtype=np.uint8)
        for i, s in enumerate(seqs):
            if len(s.prefix) > depth:
                raise ValueError(f"prefix longer than grid depth: {s}")
            rows[i] = s.head(depth)
            tails[i] = s.tail
        return cls(n=n, depth=depth, syms=rows, tails=tails)

    def ecseq(self, i: int) -> ECSeq:
        return canonicalize(tuple(int(v) for v in self.syms[i]), int(self.tails[i]))

    def index_map(self) -> dict[tuple[bytes, int], int]:
        return {
            (self.syms[i].tobytes(), int(self.tails[i])): i
            for i in range(self.size)
        }

    def row_chunks(self, cols: int, workers: int = 1):
        rows = max(1, min(self.size, _CHUNK_ELEMENTS // max(cols, 1)))
        for start in range(0, self.size, rows):
            yield start, min(start + rows, self.size)


def _all_words(n: int, depth: int) -> np.ndarray:
    if depth == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    grids = np.meshgrid(*([np.arange(1, n + 1, dtype=np.uint8)] * depth), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def delta_table(aut: TriangleAutomaton) -> np.ndarray:
    """Transition tensor D[state, i, j]; Exit is absorbing here so that
    batch runs can keep indexing (callers track the first Exit step)."""
    n = aut.n
    table = np.full((8, n + 1, n + 1), int(State.EXIT), dtype=np.int8)
    idx = np.arange(1, n + 1)
    table[State.ID, idx, idx] = int(State.ID)
    for (i, j), state in aut._id_map.items():
        table[State.ID, i, j] = int(state)
    for state, (i, j) in aut.loop_inputs.items():
        table[state, i, j] = int(state)
    table[State.EXIT, :, :] = int(State.EXIT)
    return table


def t_block(
    table: np.ndarray,
    n: int,
    rsyms: np.ndarray,
    rtails: np.ndarray,
    csyms: np.ndarray,
    ctails: np.ndarray,
    depth: int,
) -> np.ndarray:
    """Surviving times for all row x column sequence pairs (int8, INF8=inf)."""
    flat = table.reshape(-1)
    nr, nc = rsyms.shape[0], csyms.shape[0]
    state = np.zeros((nr, nc), dtype=np.int8)
    t = np.full((nr, nc), INF8, dtype=np.int8)
    exit_code = np.int8(int(State.EXIT))
    for k in range(depth + 2):
        xi = rsyms[:, k] if k < depth else rtails
        yj = csyms[:, k] if k < depth else ctails
        idx = (state.astype(np.int32) * (n + 1) + xi[:, None].astype(np.int32)) * (
            n + 1
        ) + yj[None, :].astype(np.int32)
        state = flat[idx]
        fresh = (state == exit_code) & (t == INF8)
        t[fresh] = k  # S_{k+1} is the first Exit, so T = k
    return t


def t_matrix(aut: TriangleAutomaton, grid: SeqGrid, workers: int | None = None) -> np.ndarray:
    """Full surviving-time matrix of a grid against itself.

    Row chunks are independent and write disjoint slices, so they can run
    on a thread pool (numpy releases the GIL on the large ops); the result
    is identical for any worker count.
    """
    table = delta_table(aut)
    out = np.empty((grid.size, grid.size), dtype=np.int8)

    def fill(start: int, stop: int) -> None:
        out[start:stop] = t_block(
            table,
            aut.n,
            grid.syms[start:stop],
            grid.tails[start:stop],
            grid.syms,
            grid.tails,
            grid.depth,
        )

    chunks = list(grid.row_chunks(grid.size, resolve_workers(workers)))
    pool = resolve_workers(workers)
    if pool > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=pool) as executor:
            list(executor.map(lambda c: fill(*c), chunks))
    else:
        for start, stop in chunks:
            fill(start, stop)
    return out


def cpl_block(rsyms: np.ndarray, csyms: np.ndarray) -> np.ndarray:
    """Common prefix length of padded words (capped at depth)."""
    eq = rsyms[:, None, :] == csyms[None, :, :]
    return eq.cumprod(axis=2).sum(axis=2, dtype=np.int16).astype(np.int8)


def first_asymmetry(t: np.ndarray) -> tuple[int, int] | None:
    bad = np.argwhere(t != t.T)
    if bad.size:
        i, j = bad[0]
        return int(i), int(j)
    return None


def triangle_violations(t: np.ndarray, limit: int = 25):
    """Yield witnesses (x, y, z, Txy, Txz, Tyz) violating
    min(T(x,y), T(x,z)) <= T(y,z) + 1, with INF8 meaning infinity.

    For each finite value v the pairs (y, z) with T = v are screened with
    packed bitsets: a violation at (y, z) means some x has both T(x,y) and
    T(x,z) >= v + 2.
    """
    m = t.shape[0]
    found = 0
    values = sorted(int(v) for v in np.unique(t) if v != INF8)
    iu, ju = np.triu_indices(m)
    for v in values:
        thresh = v + 2
        ge = t >= thresh  # (x, y) boolean, columns indexed by y
        packed = np.packbits(ge, axis=0).T.copy()  # (y, ceil(m/8))
        mask = t[iu, ju] == v
        ys, zs = iu[mask], ju[mask]
        for start in range(0, ys.size, 65536):
            yb = packed[ys[start:start + 65536]]
            zb = packed[zs[start:start + 65536]]
            hit = (yb & zb).any(axis=1)
            for off in np.nonzero(hit)[0]:
                y = int(ys[start + off])
                z = int(zs[start + off])
                x = int(np.nonzero(ge[:, y] & ge[:, z])[0][0])
                yield x, y, z, _tval(t[x, y]), _tval(t[x, z]), v
                found += 1
                if found >= limit:
                    return


def _tval(v) -> int | float:
    return float("inf") if v == INF8 else int(v)
