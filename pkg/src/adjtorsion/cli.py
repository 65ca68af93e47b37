"""Command-line front end.  Every command prints exactly one JSON document on stdout; logs go to stderr.

Exit codes: 0 success, 2 parse or input error, 3 solver failure, 4 integrity/domain error,
5 the verification ran but the verdict is false.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, IntegrityError, ParseError, SolverError
from .flattening import Flattening, flattening_defects, solve_strong_flattening
from .gluing import (ShapeVector, big_g, check_row_choice, default_drop_rows,
                     newton_solve, principal_gluing_ideal)
from .triangulation import (NZData, canonical_isosig, cusp_incidence, edge_orbits, gluing_matrices, nz_from_dict,
                            nz_to_dict, parse_isosig)

log = logging.getLogger("adjtorsion")

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_INTEGRITY, EXIT_VERDICT = 0, 2, 3, 4, 5
BUILTIN = ("m003",)


class VerdictFalse(Exception):
    def __init__(self, outputs: dict):
        super().__init__("verdict is false")
        self.outputs = outputs


def _cx(x) -> list[float]:
    x = complex(x)
    return [x.real, x.imag]


def _read_input(source: str) -> tuple[bytes, str]:
    if source in BUILTIN and not Path(source).exists():
        return resources.files("adjtorsion.data").joinpath(f"{source}.json").read_bytes(), f"builtin:{source}"
    try:
        return Path(source).read_bytes(), source
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc.strerror}") from exc


def _load_fixture(source: str) -> tuple[NZData, str]:
    raw, _ = _read_input(source)
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{source}: not valid JSON ({exc})") from exc
    return nz_from_dict(doc), hashlib.sha256(raw).hexdigest()


def _parse_complex_list(text: str) -> list[complex]:
    try:
        return [complex(s.strip().replace(" ", "").replace("i", "j")) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ParseError(f"cannot parse complex list {text!r}") from exc


def _drop_rows(args, data: NZData) -> list[int]:
    if args.drop_rows is None:
        return default_drop_rows(data.gluing)
    try:
        rows = [int(x) for x in args.drop_rows.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"--drop-rows expects comma-separated integers, got {args.drop_rows!r}") from exc
    return rows


def _hint(args) -> Flattening | None:
    if not args.flattening_hint:
        return None
    raw, _ = _read_input(args.flattening_hint) if Path(args.flattening_hint).exists() else (
        args.flattening_hint.encode(), "")
    try:
        return Flattening.from_json(json.loads(raw))
    except json.JSONDecodeError as exc:
        raise ParseError(f"flattening hint is not valid JSON ({exc})") from exc


def _start(args, n: int) -> list[complex]:
    if args.seed_shapes:
        z0 = _parse_complex_list(args.seed_shapes)
        if len(z0) == 1:
            z0 = z0 * n
        if len(z0) != n:
            raise ParseError(f"--seed-shapes needs 1 or {n} values")
        return z0
    z0 = [0.5 + 0.8j] * n
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        z0 = [z + complex(*rng.uniform(-0.05, 0.05, 2)) for z in z0]
    return z0


def _shapes(args, data: NZData) -> ShapeVector:
    u = _parse_complex_list(args.u) if args.u is not None else [0j] * data.gluing.k
    z = newton_solve(data.gluing, u, _start(args, data.gluing.N), max_iter=args.max_iter, tol=args.tol,
                     drop_rows=_drop_rows(args, data))
    for w in z.info["warnings"]:
        log.warning(w)
    return z


def _solution_json(z: ShapeVector, tol: float) -> dict:
    return {"shapes": [_cx(x) for x in z.z], "iterations": z.info["iterations"],
            "edge_residual": z.info["edge_residual"], "u_residual": z.info["u_residual"],
            "u_target": [_cx(u) for u in z.info["u_target"]], "tolerance": tol,
            "positive": z.is_positive(), "warnings": z.info["warnings"]}


# ----------------------------------------------------------------------------
# commands


def cmd_parse(args) -> tuple[dict, str]:
    if args.json or args.input.endswith(".json") or args.input in BUILTIN:
        data, digest = _load_fixture(args.input)
        doc = nz_to_dict(data)
        doc["labels_match"] = data.labels_match
        return {"nzdata": doc}, digest
    sig = args.input.strip()
    if not sig:
        raise ParseError("empty isomorphism signature", 0)
    tri = parse_isosig(sig)
    G, Gp, Gpp = gluing_matrices(tri)
    edges = edge_orbits(tri)
    K = cusp_incidence(tri)
    out = {
        "isosig": sig, "canonical_isosig": canonical_isosig(sig), "N": tri.n_tet, "k": len(K),
        "edge_degrees": [e.degree for e in edges], "G": G, "Gp": Gp, "Gpp": Gpp, "K": K,
        "gluings": [[[d, list(p)] for d, p in faces] for faces in tri.gluings],
    }
    return out, hashlib.sha256(sig.encode()).hexdigest()


def cmd_solve(args) -> tuple[dict, str]:
    data, digest = _load_fixture(args.input)
    z = _shapes(args, data)
    return {"solution": _solution_json(z, args.tol)}, digest


def cmd_flatten(args) -> tuple[dict, str]:
    data, digest = _load_fixture(args.input)
    hint = _hint(args)
    out = {}
    if hint is not None:
        defects = flattening_defects(data.gluing, hint)
        out["hint_valid"] = not defects
        if defects:
            out["hint_defects"] = defects
    fl = solve_strong_flattening(data.gluing, hint)
    out["flattening"] = fl.to_json()
    return out, digest


def _flattening_for(args, data: NZData) -> Flattening:
    hint = _hint(args)
    if hint is None and "flattening" in data.extra:
        hint = Flattening.from_json(data.extra["flattening"])
    if hint is not None:
        defects = flattening_defects(data.gluing, hint)
        if defects:
            raise IntegrityError("invalid flattening: " + "; ".join(defects))
        return hint
    return solve_strong_flattening(data.gluing)


def cmd_oneloop(args) -> tuple[dict, str]:
    from .adjoint import one_loop
    data, digest = _load_fixture(args.input)
    gs = data.gluing
    fl = _flattening_for(args, data)
    drop = _drop_rows(args, data)
    out = {"flattening": fl.to_json(), "drop_rows": drop}
    if args.exact:
        val = one_loop(gs, fl, ShapeVector.generic(gs.N), drop)
        out["one_loop"] = {"exact": val.to_json(), "text": val.format(), "ideal_generator": None}
        if gs.N - gs.k == 1:
            out["one_loop"]["ideal_generator"] = principal_gluing_ideal(gs, drop).generator.to_json()
        out["note"] = "value modulo sign; meaningful on the gluing variety"
        return out, digest
    z = _shapes(args, data)
    check_row_choice(gs, drop, z)
    val = one_loop(gs, fl, z, drop, tol=max(args.tol * 1e3, 1e-9))
    out["solution"] = _solution_json(z, args.tol)
    out["one_loop"] = {"value": _cx(val), "abs": abs(val), "modulo_sign": True, "nonzero_threshold": 1e-12,
                       "nonzero": abs(val) > 1e-12,
                       "det_big_g": _cx(np.linalg.det(np.asarray(big_g(gs, z, drop))))}
    return out, digest


def cmd_verify(args) -> tuple[dict, str]:
    from .adjoint import verify_reduced
    data, digest = _load_fixture(args.input)
    words = None
    if args.words:
        raw, _ = _read_input(args.words)
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.words}: not valid JSON ({exc})") from exc
        words = doc["words"] if isinstance(doc, dict) else doc
    report = verify_reduced(data, words=words, flattening=_flattening_for(args, data), automatic=args.auto)
    for stage, t in report.timings.items():
        log.info("%s: %.3f s", stage, t)
    out = report.to_json()
    if not args.timings:
        del out["timings"]
    if not report.verdict:
        raise VerdictFalse(out)
    return out, digest


# ----------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adjtorsion", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-12, help="Newton residual tolerance")
    common.add_argument("--seed", type=int, default=None, help="jitter the default starting shapes")
    common.add_argument("--drop-rows", default=None, help="comma-separated 0-based edge rows to drop")
    common.add_argument("--flattening-hint", default=None, help="flattening JSON (file or literal)")
    common.add_argument("--u", "--u-target", dest="u", default=None, help="log-parameter target(s), e.g. 0.1+0.2i")
    common.add_argument("--seed-shapes", default=None, help="starting shapes, comma-separated complex numbers")
    common.add_argument("--max-iter", type=int, default=100)
    common.add_argument("--timings", action="store_true", help="include wall times (not byte-deterministic)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", parents=[common], help="parse an isomorphism signature or a fixture")
    s.add_argument("input")
    s.add_argument("--json", action="store_true", help="treat the input as a JSON fixture")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("solve", parents=[common], help="solve the gluing equations for a log-parameter")
    s.add_argument("input")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("flatten", parents=[common], help="find a strong combinatorial flattening")
    s.add_argument("input")
    s.add_argument("--hint", dest="flattening_hint", default=None)
    s.set_defaults(func=cmd_flatten)

    s = sub.add_parser("oneloop", parents=[common], help="evaluate the 1-loop invariant")
    s.add_argument("input")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--numeric", dest="exact", action="store_false")
    mode.add_argument("--exact", dest="exact", action="store_true")
    s.set_defaults(func=cmd_oneloop, exact=False)

    s = sub.add_parser("verify", parents=[common], help="exact verification of the reduced torsion formula")
    s.add_argument("input")
    s.add_argument("--words", default=None, help="JSON file with monodromy words overriding the fixture")
    s.add_argument("--auto", action="store_true", help="develop the spine automatically, ignoring fixture words")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    report = {"command": args.command, "version": __version__, "input": args.input, "seed": args.seed}
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        outputs, digest = args.func(args)
        report["input_digest"] = digest
        report["outputs"] = outputs
    except VerdictFalse as exc:
        report["outputs"] = exc.outputs
        code = EXIT_VERDICT
    except ParseError as exc:
        report["error"], code = {"type": "parse", "message": str(exc)}, EXIT_PARSE
    except SolverError as exc:
        report["error"], code = {"type": "solver", "message": str(exc)}, EXIT_SOLVER
    except (IntegrityError, DomainError, NotImplementedError) as exc:
        report["error"], code = {"type": "integrity", "message": str(exc)}, EXIT_INTEGRITY
    report["exit_code"] = code
    if args.timings:
        report["wall_time"] = round(time.perf_counter() - t0, 3)
    log.info("finished in %.3f s", time.perf_counter() - t0)
    if "error" in report:
        log.error(report["error"]["message"])
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
