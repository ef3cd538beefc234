"""Command-line surface: validation, extraction, simplification, mapping,
classification, audits and rendering.

Exit codes: 0 success / all checks pass, 1 validation or audit failure,
2 unreadable or malformed input, 3 input outside the supported family.
All machine output is JSON on stdout with sorted keys; ``-v`` adds human
summaries on stderr.  Worker counts (``--threads`` or GASKETLAB_THREADS)
only partition work; outputs are identical for any count.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .automaton import TriangleAutomaton, pseudo_metric_audit
from .classify import biholder_audit, block_profile, classify_pair, equivalence_chain
from .geometry import (
    GasketSpec,
    component_audit,
    corner_symbols,
    family_check,
    geometry_vs_automaton_audit,
    horizontal_blocks,
    render_svg,
    topology_automaton,
    validate_spec,
)
from .reports import FormatError, ScopeError
from .simplify import one_step, step_invariant_audit
from .transducer import DecompParams, distortion_audit, m_decompose, map_backward, map_forward, mp_decompose
from .words import parse_seq

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_FORMAT = 2
EXIT_SCOPE = 3

GRID_CAP = 20_000  # sequences; audits enumerate pairs, so keep this modest


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _load_spec(path: str) -> GasketSpec:
    data = _load_json(path)
    if "triangles" not in data:
        raise FormatError(f"{path}: not a gasket spec (missing 'triangles')")
    return GasketSpec.from_json(data)


def _load_spec_or_automaton(path: str):
    data = _load_json(path)
    if "triangles" in data:
        return GasketSpec.from_json(data)
    if "n" in data:
        try:
            return TriangleAutomaton.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: bad automaton: {exc}") from exc
    raise FormatError(f"{path}: neither a gasket spec nor an automaton")


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _note(args, message: str) -> None:
    if args.verbose:
        sys.stderr.write(message + "\n")


def _check_grid(n: int, depth: int, tails: int, force: bool) -> None:
    if n ** depth * tails > GRID_CAP and not force:
        raise ScopeError(
            f"grid of {n ** depth * tails} sequences exceeds the safety cap "
            f"{GRID_CAP}; pass --force to run anyway"
        )


def cmd_validate(args) -> int:
    spec = _load_spec(args.spec)
    report = validate_spec(spec)
    assign = corner_symbols(spec)
    payload = {
        "valid": report.ok,
        "corners": assign.to_json(),
        "blocks": None,
        "family": None,
        "report": report.to_json(),
    }
    if report.ok:
        payload["blocks"] = [list(b) for b in horizontal_blocks(spec)]
        try:
            payload["family"] = family_check(spec).to_json()
        except ScopeError as exc:
            payload["family_note"] = str(exc)
    _emit(payload)
    _note(args, f"valid={report.ok} corners={assign.to_json()}")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_automaton(args) -> int:
    spec = _load_spec(args.spec)
    _require_valid(spec)
    _emit(topology_automaton(spec).to_json())
    return EXIT_OK


def cmd_blocks(args) -> int:
    spec = _load_spec(args.spec)
    _require_valid(spec)
    payload = {"blocks": [list(b) for b in horizontal_blocks(spec)]}
    try:
        payload["profile"] = block_profile(spec).to_json()
    except ScopeError as exc:
        payload["profile"] = None
        payload["profile_note"] = str(exc)
    _emit(payload)
    return EXIT_OK


def cmd_simplify(args) -> int:
    source = _load_spec_or_automaton(args.input)
    aut = source if isinstance(source, TriangleAutomaton) else topology_automaton(source)
    links = []
    audits_ok = True
    current = aut
    while current.vertical_union():
        nxt, step = one_step(current)
        link = {"step": step.to_json(), "result": nxt.to_json()}
        if args.verify:
            audit = step_invariant_audit(current, nxt, step)
            link["audit"] = audit.to_json()
            audits_ok = audits_ok and audit.ok
        links.append(link)
        current = nxt
    _emit({"initial": aut.to_json(), "steps": links, "final": current.to_json()})
    return EXIT_OK if audits_ok else EXIT_FAIL


def cmd_gmap(args) -> int:
    try:
        parts = [int(v) for v in args.params.split(",")]
    except ValueError as exc:
        raise FormatError(f"bad --params {args.params!r}: {exc}") from exc
    if len(parts) != 4:
        raise FormatError("--params needs tau,kappa,alpha,gamma")
    seq = parse_seq(args.input)
    n = args.n if args.n else max(max(parts), seq.max_symbol())
    params = DecompParams(
        n=n, tau=parts[0], kappa=parts[1], alpha=parts[2], gamma=parts[3],
        mirror=args.mirror,
    )
    if args.decompose:
        dec = mp_decompose(seq, params) if args.backward else m_decompose(seq, params)
        _emit(
            {
                "segments": [
                    {"kind": s.kind.value, "word": list(s.word)} for s in dec.segments
                ],
                "tail": dec.tail,
            }
        )
        return EXIT_OK
    out = map_backward(seq, params) if args.backward else map_forward(seq, params)
    sys.stdout.write(str(out) + "\n")
    return EXIT_OK


def cmd_classify(args) -> int:
    e = _load_spec(args.spec_e)
    f = _load_spec(args.spec_f)
    for spec in (e, f):
        _require_valid(spec)
    verdict = classify_pair(e, f)
    _emit(verdict.to_json())
    if args.certificate:
        chain = equivalence_chain(
            e, f, audit_depth=args.audit_depth, transport_depth=args.transport_depth,
            workers=args.threads,
        )
        with open(args.certificate, "w", encoding="utf-8") as fh:
            json.dump(chain.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        _note(args, f"certificate written to {args.certificate} (ok={chain.ok})")
        if not chain.ok:
            return EXIT_FAIL
    return EXIT_OK


_SUITES = ("metric", "geometry", "distortion", "biholder", "component")


def cmd_audit(args) -> int:
    spec = _load_spec(args.spec)
    validity = validate_spec(spec)
    if not validity.ok:
        _emit({"valid": False, "report": validity.to_json()})
        return EXIT_FAIL
    suites = list(_SUITES) if args.suite == "all" else [args.suite]
    results: dict[str, dict] = {}
    failed = False
    for suite in suites:
        if suite == "metric":
            _check_grid(spec.n, args.depth, spec.n, args.force)
            rep = pseudo_metric_audit(topology_automaton(spec), args.depth, workers=args.threads)
        elif suite == "geometry":
            rep = geometry_vs_automaton_audit(spec, args.depth, refine=args.refine, workers=args.threads)
        elif suite == "distortion":
            try:
                rep = _distortion_suite(spec, args)
            except ScopeError as exc:
                if args.suite == "all":
                    results[suite] = {"skipped": str(exc)}
                    continue
                raise
        elif suite == "biholder":
            _check_grid(spec.n, args.depth, spec.n, args.force)
            rep = biholder_audit(
                spec, args.depth, sample_count=args.samples,
                refine_depth=args.refine, workers=args.threads,
            )
        else:
            try:
                rep = component_audit(spec, args.depth)
            except ScopeError as exc:
                if args.suite == "all":
                    results[suite] = {"skipped": str(exc)}
                    continue
                raise
        results[suite] = rep.to_json()
        failed = failed or not rep.ok
        _note(args, f"{suite}: {'pass' if rep.ok else 'FAIL'}")
    _emit({"suites": results})
    return EXIT_FAIL if failed else EXIT_OK


def _distortion_suite(spec, args):
    from .automaton import check_gamma_isolated
    from .reports import Report

    _check_grid(spec.n, args.depth, 1, args.force)
    combined = Report()
    current = topology_automaton(spec)
    if current.vertical_union() and not check_gamma_isolated(current).ok:
        raise ScopeError(
            "distortion audit needs the isolated-top-corner condition"
        )
    index = 0
    while current.vertical_union():
        nxt, step = one_step(current)
        rep = distortion_audit(current, nxt, step, args.depth, workers=args.threads)
        combined.merge(rep, prefix=f"step{index}_")
        index += 1
        current = nxt
    combined.stats["steps"] = index
    return combined


def cmd_render(args) -> int:
    spec = _load_spec(args.spec)
    _require_valid(spec)
    svg = render_svg(spec, args.depth, color_blocks=args.color_blocks, width=args.width)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def _require_valid(spec: GasketSpec) -> None:
    report = validate_spec(spec)
    if not report.ok:
        first = report.violations[0]
        raise ScopeError(f"invalid gasket spec: {first.detail}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gasketlab",
        description="Exact toolkit for triangular gasket IFS and their "
        "touching-structure automata.",
    )
    parser.add_argument("--version", action="version", version=f"gasketlab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="human summaries on stderr")
    parser.add_argument("--threads", type=int, default=None, help="worker count for audits")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a gasket spec file")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("automaton", help="extract the touching-structure automaton")
    p.add_argument("spec")
    p.set_defaults(func=cmd_automaton)

    p = sub.add_parser("blocks", help="horizontal blocks and block profile")
    p.add_argument("spec")
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("simplify", help="full simplification chain as JSON")
    p.add_argument("input", help="gasket spec or automaton JSON")
    p.add_argument("--verify", action="store_true", help="audit every step")
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("gmap", help="apply the sequence bijection of one step")
    p.add_argument("--params", required=True, help="tau,kappa,alpha,gamma")
    p.add_argument("--mirror", action="store_true", help="right-corner variant")
    p.add_argument("--input", required=True, help="sequence like 1.4.4.(2)^inf")
    p.add_argument("--backward", action="store_true", help="apply the inverse")
    p.add_argument("--decompose", action="store_true", help="print the factorization")
    p.add_argument("--n", type=int, default=None, help="alphabet size")
    p.set_defaults(func=cmd_gmap)

    p = sub.add_parser("classify", help="equivalence verdict for two specs")
    p.add_argument("spec_e")
    p.add_argument("spec_f")
    p.add_argument("--certificate", help="write the full chain certificate here")
    p.add_argument("--audit-depth", type=int, default=3)
    p.add_argument("--transport-depth", type=int, default=3)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("audit", help="run verification suites")
    p.add_argument("spec")
    p.add_argument("--suite", choices=_SUITES + ("all",), default="all")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--refine", type=int, default=2)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--force", action="store_true", help="override enumeration caps")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("render", help="SVG of the depth-k triangle cover")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--color-blocks", action="store_true")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("depth", "refine", "samples", "width"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            parser.error(f"--{name} must be >= 0")
    try:
        return args.func(args)
    except FormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FORMAT
    except ScopeError as exc:
        sys.stderr.write(f"out of scope: {exc}\n")
        return EXIT_SCOPE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
