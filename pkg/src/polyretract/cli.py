"""Command-line front end: JSON in, JSON report out.

Exit status is 0 on success, 1 when the verb's question is answered
negatively (invalid map, no certificate, failed replay) and 2 on input
errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Any, Callable

from . import io
from .binomial import segmentonomial_ideal_primes, segmentonomial_minimal_primes, split_variable
from .geometry import LatticePolytope, lattice_width, minimal_lattice_width, segment_embeddings, symmetries
from .groups import column_vectors, height_form
from .io import SCHEMA_VERSION, SchemaError, point_id, rational_to_json
from .laurent import ExtensionRequired
from .retraction.bases import find_base
from .retraction.certificates import verify_certificate
from .retraction.maps import (
    FibrationError,
    HomomorphismViolation,
    KernelMismatch,
    LatticeFibration,
    check_idempotent,
    fibration_retraction,
    image_dimension,
    kernel_monomials,
)
from .retraction.tameness import PreconditionError, polygon_tameness, segment_obstruction
from .semigroup import AffineSemigroup, difference_group, normality_check, polytopal_semigroup, toric_relations

VERBS = (
    "analyze",
    "col",
    "normality",
    "relations",
    "width",
    "embed-segment",
    "symmetries",
    "retraction-check",
    "retraction-tame",
    "fibration-verify",
    "segprime",
    "split-variable",
    "verify-cert",
)


class InputError(Exception):
    pass


def report_schema_version() -> str:
    return SCHEMA_VERSION


def _load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    if isinstance(data, dict):
        io.check_schema(data)
    return data


def _polytope(data) -> LatticePolytope:
    if isinstance(data, dict) and "polytope" in data:
        return io.polytope_from_json(data["polytope"], "$.polytope")
    return io.polytope_from_json(data)


def _semigroup_or_polytope(data) -> tuple[AffineSemigroup, LatticePolytope | None]:
    if isinstance(data, dict) and "generators" in data:
        return io.semigroup_from_json(data), None
    if isinstance(data, dict) and "semigroup" in data:
        return io.semigroup_from_json(data["semigroup"], "$.semigroup"), None
    P = _polytope(data)
    return polytopal_semigroup(P), P


def _pts(xs) -> list[list[int]]:
    return [list(x) for x in xs]


def _facets(P: LatticePolytope) -> list[dict]:
    return [{"normal": list(a), "offset": b, "points": _pts(P.facet_points(i))} for i, (a, b) in enumerate(P.facet_forms())]


def _columns(P: LatticePolytope) -> list[dict]:
    return [{"vector": list(c.vector), "facet": c.facet, "height_form": list(height_form(P, c))} for c in column_vectors(P)]


def _normality(S: AffineSemigroup, args) -> dict:
    res = normality_check(S, args.degree_bound, args.exhaustive)
    out = {"normal": res.normal, "degree_bound": res.degree_bound, "complete": res.complete}
    if res.witness is not None:
        x, c = res.witness
        out["witness"] = {"element": list(x), "multiple": c}
    return out


# verbs --------------------------------------------------------------------------


def cmd_analyze(args) -> tuple[dict, int]:
    P = _polytope(_load(args.input))
    S = polytopal_semigroup(P)
    out = {
        "dim": P.dim,
        "vertices": _pts(P.vertices),
        "lattice_points": _pts(P.lattice_points),
        "interior_points": _pts(P.interior_points()),
        "facets": _facets(P),
        "column_vectors": _columns(P),
        "semigroup_rank": difference_group(S).rank,
        "normality": _normality(S, args),
        "symmetry_count": len(symmetries(P)),
    }
    if P.ambient_dim == 2 and P.dim == 2:
        w, form = minimal_lattice_width(P)
        out["minimal_width"] = {"width": w, "form": list(form)}
    return out, 0


def cmd_col(args) -> tuple[dict, int]:
    P = _polytope(_load(args.input))
    return {"column_vectors": _columns(P)}, 0


def cmd_normality(args) -> tuple[dict, int]:
    S, _ = _semigroup_or_polytope(_load(args.input))
    if S.grading is None:
        raise InputError("normality needs a graded semigroup")
    return _normality(S, args), 0


def cmd_relations(args) -> tuple[dict, int]:
    S, P = _semigroup_or_polytope(_load(args.input))
    if S.grading is None:
        raise InputError("relations need a graded semigroup")
    D = args.degree_bound if args.degree_bound is not None else (max(2, P.dim + 1) if P is not None else 2)
    rels = toric_relations(S, D)
    return {
        "generators": _pts(S.generators),
        "degree_bound": D,
        "relations": [{"left": list(r.left), "right": list(r.right), "degree": r.degree} for r in rels],
    }, 0


def cmd_width(args) -> tuple[dict, int]:
    P = _polytope(_load(args.input))
    out: dict[str, Any] = {}
    if args.direction is not None:
        out["direction"] = list(args.direction)
        out["width"] = lattice_width(P, args.direction)
    if P.ambient_dim == 2 and P.dim == 2:
        w, form = minimal_lattice_width(P)
        out["minimal_width"] = {"width": w, "form": list(form)}
    elif args.direction is None:
        raise InputError("minimal width needs a full-dimensional polygon; pass --direction")
    return out, 0


def cmd_embed_segment(args) -> tuple[dict, int]:
    P = _polytope(_load(args.input))
    if args.c is None or args.c < 1:
        raise InputError("--c must be a positive integer")
    embs = segment_embeddings(P, args.c)
    out: dict[str, Any] = {"c": args.c, "embeddings": [{"start": list(s), "step": list(t)} for s, t in embs]}
    if P.dim == 2:
        out["obstruction"] = segment_obstruction(P, args.c)
    return out, 0


def cmd_symmetries(args) -> tuple[dict, int]:
    P = _polytope(_load(args.input))
    maps = symmetries(P)
    return {"count": len(maps), "maps": [io.affine_map_to_json(f) for f in maps]}, 0


def _load_map(args, check=True):
    data = _load(args.input)
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    return io.map_from_json(data, "$", args.degree_bound, check=check)


def cmd_retraction_check(args) -> tuple[dict, int]:
    try:
        h = _load_map(args)
    except HomomorphismViolation as exc:
        rel = exc.relation
        return {
            "valid": False,
            "violated_relation": {"left": list(rel.left), "right": list(rel.right)},
            "left_product": exc.left.to_json(),
            "right_product": exc.right.to_json(),
        }, 1
    out: dict[str, Any] = {"valid": True, "degree_bound": h.degree_bound}
    out["idempotent"] = check_idempotent(h)
    dim = image_dimension(h, args.trials, args.seed)
    rank = difference_group(h.semigroup).rank
    out["image_dimension"] = {"dimension": dim.dimension, "trials": dim.trials, "seed": dim.seed}
    out["codimension"] = rank - dim.dimension
    try:
        F = kernel_monomials(h)
        out["kernel_monomials"] = None if F is None else {"face": _pts(F.lattice_points)}
    except KernelMismatch as exc:
        out["kernel_monomials"] = {"mismatch": [point_id(z) for z in exc.zeros]}
    if out["idempotent"]:
        search = find_base(h, seed=args.seed, trials=args.trials)
        w = search.witness
        out["base"] = None if w is None else {"points": _pts(w.points), "cross_section": w.cross_section is not None, "meets_interior": w.meets_interior}
    return out, 0


def cmd_retraction_tame(args) -> tuple[dict, int]:
    try:
        h = _load_map(args)
    except HomomorphismViolation as exc:
        raise InputError(f"input is not a homomorphism: {exc}") from None
    D = args.degree_bound if args.degree_bound is not None else h.degree_bound
    try:
        rep = polygon_tameness(h, D, args.seed, args.trials)
    except PreconditionError as exc:
        return {"tame": False, "reason": str(exc)}, 1
    out: dict[str, Any] = {
        "tame": rep.certificate is not None,
        "path": rep.path,
        "c": rep.c,
        "degree_bound": rep.degree_bound,
        "seed": rep.seed,
        "subcase": rep.subcase,
        "segments": [
            {
                "points": _pts(s.points),
                "outcome": s.outcome,
                "kernel_element": s.kernel_element.to_json() if s.kernel_element is not None else None,
                "width": s.width,
                "width_equals_c": s.width_equals_c,
                "independent_of_base": s.independent_of_base,
            }
            for s in rep.segments
        ],
    }
    if rep.certificate is None:
        out["reason"] = rep.reason
        out["obstruction"] = rep.segment_obstructed
        return out, 1
    out["certificate"] = io.certificate_to_json(rep.certificate)
    return out, 0


def cmd_fibration_verify(args) -> tuple[dict, int]:
    data = _load(args.input)
    P, base, dirs, w = io.fibration_parts_from_json(data)
    try:
        fib = LatticeFibration(P, base, dirs, w)
    except FibrationError as exc:
        return {"valid": False, "reason": str(exc)}, 1
    D = args.degree_bound
    r = fibration_retraction(fib, D)
    return {
        "valid": True,
        "codimension": fib.codimension,
        "base_points": _pts(fib.base_points),
        "projection": {point_id(x): point_id(y) for x, y in sorted(fib.projection.items())},
        "idempotent": check_idempotent(r),
        "degree_bound": r.degree_bound,
    }, 0


def _prime_json(p) -> dict:
    images = {}
    for g, img in p.projected_map().items():
        images[point_id(g)] = None if img is None else {"scalar": rational_to_json(img[0]), "monomial": list(img[1])}
    return {
        "kind": p.kind,
        "target_dim": p.target_dim,
        "target_grading": list(p.target_grading) if p.target_grading is not None else None,
        "direction": list(p.direction) if p.direction is not None else None,
        "root": rational_to_json(p.root) if p.root is not None else None,
        "generator_images": images,
        "kernel_generators": [f.to_json() for f in p.generators],
    }


def cmd_segprime(args) -> tuple[dict, int]:
    data = _load(args.input)
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    S, _ = _semigroup_or_polytope(data)
    D = args.degree_bound if args.degree_bound is not None else 3
    try:
        if "polynomials" in data:
            fs = data["polynomials"]
            if not isinstance(fs, list):
                raise SchemaError("$.polynomials", "expected a list")
            polys = [io.laurent_from_json(f, f"$.polynomials[{i}]") for i, f in enumerate(fs)]
            res = segmentonomial_ideal_primes(S, polys, D)
        else:
            f = io.laurent_from_json(data.get("polynomial"), "$.polynomial") if "polynomial" in data else None
            if f is None:
                raise SchemaError("$.polynomial", "missing field")
            res = segmentonomial_minimal_primes(S, f, D, strict=args.exhaustive)
    except ExtensionRequired as exc:
        return {"primes": [], "extension_required": [[rational_to_json(c) for c in fac] for fac in exc.factors]}, 1
    except SchemaError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return {
        "degree_bound": res.degree_bound,
        "primes": [_prime_json(p) for p in res],
        "skipped_factors": [[rational_to_json(c) for c in fac] for fac in res.skipped_factors],
    }, 0


def cmd_split_variable(args) -> tuple[dict, int]:
    data = _load(args.input)
    if not isinstance(data, dict) or "matrix" not in data:
        raise SchemaError("$.matrix", "missing field")
    rows = data["matrix"]
    if not isinstance(rows, list):
        raise SchemaError("$.matrix", "expected a list of rows")
    mat = [[io.rational_from_json(x, f"$.matrix[{i}][{j}]") for j, x in enumerate(r)] if isinstance(r, list) else None for i, r in enumerate(rows)]
    if any(r is None for r in mat):
        raise SchemaError("$.matrix", "expected a list of rows")
    try:
        t = split_variable(mat)
    except ValueError as exc:
        raise InputError(str(exc)) from None

    def enc(m):
        return [[rational_to_json(x) for x in r] for r in m]

    return {"j": t.chosen_j, "epsilon": enc(t.epsilon_matrix), "nu": enc(t.nu_matrix), "commutes": t.check_square()}, 0


def cmd_verify_cert(args) -> tuple[dict, int]:
    data = _load(args.input)
    if isinstance(data, dict) and data.get("verb") == "retraction-tame" and "certificate" in data:
        # a whole retraction-tame report is accepted as well
        cert_data, path = data["certificate"], "$.certificate"
    else:
        cert_data, path = data, "$"
    try:
        cert = io.certificate_from_json(cert_data, path)
    except (HomomorphismViolation, FibrationError) as exc:
        return {"ok": False, "checked": 0, "divergence": {"generator": None, "reason": str(exc), "expected": None, "actual": None}}, 1
    rep = verify_certificate(cert)
    return io.verification_to_json(rep), 0 if rep else 1


COMMANDS: dict[str, Callable] = {
    "analyze": cmd_analyze,
    "col": cmd_col,
    "normality": cmd_normality,
    "relations": cmd_relations,
    "width": cmd_width,
    "embed-segment": cmd_embed_segment,
    "symmetries": cmd_symmetries,
    "retraction-check": cmd_retraction_check,
    "retraction-tame": cmd_retraction_tame,
    "fibration-verify": cmd_fibration_verify,
    "segprime": cmd_segprime,
    "split-variable": cmd_split_variable,
    "verify-cert": cmd_verify_cert,
}


def _direction(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(a) for a in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed direction {s!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyretract", description="Retractions of polytopal algebras.")
    parser.add_argument("verb", help="one of: " + ", ".join(VERBS))
    parser.add_argument("input", help="input JSON file")
    parser.add_argument("--degree-bound", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--exhaustive", action="store_true")
    parser.add_argument("--c", type=int, default=None, help="segment length for embed-segment")
    parser.add_argument("--direction", type=_direction, default=None, help="line direction for width, e.g. 1,0")
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    # reject unknown verbs before touching any file
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        return _emit(out, {"error": f"unknown verb {argv[0]!r}", "verbs": list(VERBS)}, 2)
    try:
        args = build_parser().parse_args(argv)
        report, status = COMMANDS[args.verb](args)
    except SchemaError as exc:
        return _emit(out, {"error": str(exc), "path": exc.path}, 2)
    except InputError as exc:
        return _emit(out, {"error": str(exc)}, 2)
    except (ValueError, TypeError, KeyError) as exc:
        return _emit(out, {"error": f"invalid input: {exc}"}, 2)
    return _emit(out, {"schema": report_schema_version(), "verb": args.verb, **report}, status)


_RATIONAL = re.compile(r'\{\s*"num": (-?\d+),\s*"den": (\d+)\s*\}')
_SCALAR = r"(?:-?\d+|null|true|false)"
_FLAT_LIST = re.compile(rf"\[\s*{_SCALAR}(?:\s*,\s*{_SCALAR})*\s*\]")


def format_json(data) -> str:
    """Indented JSON with rationals and lists of integers kept on one line."""
    text = _RATIONAL.sub(r'{"num": \1, "den": \2}', json.dumps(data, indent=2))
    return _FLAT_LIST.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(0)[1:-1].split(",")) + "]", text)


def _emit(out, report: dict, status: int) -> int:
    if "schema" not in report:
        report = {"schema": SCHEMA_VERSION, **report}
    out.write(format_json(report) + "\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
