"""Built-in reference gaskets used in documentation, tests and demos."""

from __future__ import annotations

from fractions import Fraction

from .geometry import GasketSpec, ObliquePoint, Triangle


def _spec(size, origins) -> GasketSpec:
    if isinstance(size, (list, tuple)):
        sizes = [Fraction(s) for s in size]
    else:
        sizes = [Fraction(size)] * len(origins)
    return GasketSpec(
        tuple(
            Triangle(ObliquePoint(Fraction(p), Fraction(q)), s)
            for (p, q), s in zip(origins, sizes)
        )
    )


def sierpinski() -> GasketSpec:
    """Three half-size maps tiling the corners; every pair touches."""
    return _spec("1/2", [(0, 0), ("1/2", 0), (0, "1/2")])


def h6() -> GasketSpec:
    """Six quarter-size maps: a bottom row of four, one map stacked on the
    row's left end, and an isolated top map."""
    return _spec(
        "1/4",
        [(0, 0), ("1/4", 0), ("1/2", 0), ("3/4", 0), (0, "1/4"), (0, "3/4")],
    )


def h6_prime() -> GasketSpec:
    """Like :func:`h6` but the stacked map sits over the row's right half."""
    return _spec(
        "1/4",
        [(0, 0), ("1/4", 0), ("1/2", 0), ("3/4", 0), ("1/2", "1/4"), (0, "3/4")],
    )


def g5() -> GasketSpec:
    """A bottom row of four quarter-size maps plus an isolated top map."""
    return _spec("1/4", [(0, 0), ("1/4", 0), ("1/2", 0), ("3/4", 0), (0, "3/4")])


def g5_prime() -> GasketSpec:
    """Like :func:`g5` but the fifth map floats away from the top corner,
    so no corner map exists at the top."""
    return _spec("1/4", [(0, 0), ("1/4", 0), ("1/2", 0), ("3/4", 0), (0, "1/2")])


def block_pair_1235() -> tuple[GasketSpec, GasketSpec]:
    """Two eleven-map gaskets with horizontal blocks of sizes 5, 2, 3, 1.

    Both have a full bottom row of five (the block holding the two bottom
    corners), an isolated top map, and a 2-chain plus a 3-chain placed
    differently; the second uses two tenth-size maps for its 2-chain, so
    the pair is classifiable as homeomorphic but not via a single ratio.
    """
    e = _spec(
        "1/5",
        [
            (0, 0), ("1/5", 0), ("2/5", 0), ("3/5", 0), ("4/5", 0),
            (0, "1/5"), ("1/5", "1/5"),
            (0, "2/5"), ("1/5", "2/5"), ("2/5", "2/5"),
            (0, "4/5"),
        ],
    )
    f = _spec(
        ["1/5"] * 8 + ["1/10", "1/10", "1/5"],
        [
            (0, 0), ("1/5", 0), ("2/5", 0), ("3/5", 0), ("4/5", 0),
            ("1/5", "1/5"), ("2/5", "1/5"), ("3/5", "1/5"),
            ("1/10", "3/5"), ("2/10", "3/5"),
            (0, "4/5"),
        ],
    )
    return e, f
