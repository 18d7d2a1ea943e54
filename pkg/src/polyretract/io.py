"""JSON encoding of polytopes, maps, words, fibrations and certificates.

Rationals are ``{"num": int, "den": int}``; lattice points used as keys are
comma-joined coordinates (``"0,1"``).  Every decoder raises
:class:`SchemaError` carrying the JSON path of the offending value.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

from .geometry import AffineLatticeMap, LatticePolytope
from .groups import AutomorphismWord, ColumnVector, Elementary, Symmetry, Toric
from .laurent import LaurentPolynomial
from .retraction.certificates import (
    AutomorphismStage,
    ChainCertificate,
    EmbeddingStage,
    FaceRetraction,
    FibrationRetraction,
    MorphismStage,
    RetractionStage,
    TamenessCertificate,
    VerificationReport,
)
from .retraction.maps import GradedAlgebraMap, LatticeFibration, generator
from .semigroup import AffineSemigroup

SCHEMA_VERSION = "1.0"

Point = tuple[int, ...]


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def check_schema(data: Mapping, path: str = "$") -> None:
    """Accept documents without a version or with the current major version."""
    version = data.get("schema")
    if version is None:
        return
    if not isinstance(version, str) or version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise SchemaError(f"{path}.schema", f"unsupported schema version {version!r}")


def _obj(data: Any, path: str) -> Mapping:
    if not isinstance(data, Mapping):
        raise SchemaError(path, "expected an object")
    return data


def _field(data: Mapping, key: str, path: str):
    if key not in data:
        raise SchemaError(f"{path}.{key}", "missing field")
    return data[key]


def _int(x: Any, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(path, "expected an integer")
    return x


def _int_list(x: Any, path: str) -> tuple[int, ...]:
    if not isinstance(x, list):
        raise SchemaError(path, "expected a list of integers")
    return tuple(_int(a, f"{path}[{i}]") for i, a in enumerate(x))


def _matrix(x: Any, path: str) -> list[tuple[int, ...]]:
    if not isinstance(x, list):
        raise SchemaError(path, "expected a list of rows")
    return [_int_list(r, f"{path}[{i}]") for i, r in enumerate(x)]


# scalars and points -----------------------------------------------------------


def rational_to_json(q) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def rational_from_json(data: Any, path: str = "$") -> Fraction:
    if isinstance(data, int) and not isinstance(data, bool):
        return Fraction(data)
    d = _obj(data, path)
    num = _int(_field(d, "num", path), f"{path}.num")
    den = _int(_field(d, "den", path), f"{path}.den")
    if den == 0:
        raise SchemaError(f"{path}.den", "zero denominator")
    return Fraction(num, den)


def point_id(x) -> str:
    return ",".join(str(a) for a in x)


def parse_point_id(s: Any, path: str = "$") -> Point:
    if not isinstance(s, str):
        raise SchemaError(path, "expected a point id string")
    try:
        return tuple(int(a) for a in s.split(","))
    except ValueError:
        raise SchemaError(path, f"malformed point id {s!r}") from None


# polytopes and semigroups -------------------------------------------------------


def polytope_to_json(P: LatticePolytope) -> dict:
    return {"ambient_dim": P.ambient_dim, "vertices": [list(v) for v in P.vertices]}


def polytope_from_json(data: Any, path: str = "$") -> LatticePolytope:
    d = _obj(data, path)
    key = "vertices" if "vertices" in d else "points"
    pts = _matrix(_field(d, key, path), f"{path}.{key}")
    if not pts:
        raise SchemaError(f"{path}.{key}", "empty point list")
    n = len(pts[0])
    if "ambient_dim" in d and _int(d["ambient_dim"], f"{path}.ambient_dim") != n:
        raise SchemaError(f"{path}.ambient_dim", "does not match the point length")
    for i, p in enumerate(pts):
        if len(p) != n:
            raise SchemaError(f"{path}.{key}[{i}]", "point has the wrong length")
    return LatticePolytope(pts)


def semigroup_from_json(data: Any, path: str = "$") -> AffineSemigroup:
    d = _obj(data, path)
    gens = _matrix(_field(d, "generators", path), f"{path}.generators")
    grading = d.get("grading")
    grading = _int_list(grading, f"{path}.grading") if grading is not None else None
    try:
        return AffineSemigroup(gens, grading)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


def laurent_from_json(data: Any, path: str = "$") -> LaurentPolynomial:
    d = _obj(data, path)
    terms = _field(d, "terms", path)
    if not isinstance(terms, list):
        raise SchemaError(f"{path}.terms", "expected a list")
    out = {}
    dim = d.get("ambient_dim")
    for i, t in enumerate(terms):
        tp = f"{path}.terms[{i}]"
        t = _obj(t, tp)
        e = _int_list(_field(t, "exp", tp), f"{tp}.exp")
        c = rational_from_json(t, tp) if "num" in t else rational_from_json(_field(t, "coeff", tp), f"{tp}.coeff")
        out[e] = out.get(e, Fraction(0)) + c
    if dim is None and not out:
        raise SchemaError(path, "zero polynomial needs ambient_dim")
    return LaurentPolynomial(out, dim)


# degree-one data and maps -------------------------------------------------------


def degree_one_to_json(f: LaurentPolynomial) -> list[dict]:
    return [{"coeff": rational_to_json(c), "point": point_id(e[:-1])} for e, c in sorted(f.items())]


def degree_one_from_json(data: Any, dim: int, path: str) -> LaurentPolynomial:
    if not isinstance(data, list):
        raise SchemaError(path, "expected a list of terms")
    out = LaurentPolynomial.zero(dim + 1)
    for i, t in enumerate(data):
        tp = f"{path}[{i}]"
        t = _obj(t, tp)
        x = parse_point_id(_field(t, "point", tp), f"{tp}.point")
        if len(x) != dim:
            raise SchemaError(f"{tp}.point", "point has the wrong length")
        out = out + generator(x, rational_from_json(_field(t, "coeff", tp), f"{tp}.coeff"))
    return out


def images_to_json(images: Mapping[Point, LaurentPolynomial]) -> dict:
    return {point_id(x): degree_one_to_json(f) for x, f in sorted(images.items())}


def images_from_json(data: Any, dim: int, path: str) -> dict[Point, LaurentPolynomial]:
    d = _obj(data, path)
    out = {}
    for k, v in d.items():
        out[parse_point_id(k, f"{path}[{k!r}]")] = degree_one_from_json(v, dim, f"{path}[{k!r}]")
    return out


def map_to_json(h: GradedAlgebraMap) -> dict:
    out = {"polytope": polytope_to_json(h.polytope)}
    if h.target != h.polytope:
        out["target"] = polytope_to_json(h.target)
    out["images"] = images_to_json(h.images)
    out["degree_bound"] = h.degree_bound
    return out


def map_from_json(data: Any, path: str = "$", degree_bound: int | None = None, check: bool = True) -> GradedAlgebraMap:
    d = _obj(data, path)
    P = polytope_from_json(_field(d, "polytope", path), f"{path}.polytope")
    T = polytope_from_json(d["target"], f"{path}.target") if "target" in d else P
    imgs = images_from_json(_field(d, "images", path), T.ambient_dim, f"{path}.images")
    if degree_bound is None and "degree_bound" in d:
        degree_bound = _int(d["degree_bound"], f"{path}.degree_bound")
    try:
        return GradedAlgebraMap(P, imgs, degree_bound, T, check=check)
    except ValueError as exc:
        if type(exc) is ValueError:
            raise SchemaError(f"{path}.images", str(exc)) from None
        raise


# words and fibrations -----------------------------------------------------------


def affine_map_to_json(f: AffineLatticeMap) -> dict:
    return {"matrix": [list(r) for r in f.matrix], "translation": list(f.translation)}


def affine_map_from_json(data: Any, path: str) -> AffineLatticeMap:
    d = _obj(data, path)
    m = _matrix(_field(d, "matrix", path), f"{path}.matrix")
    t = _int_list(_field(d, "translation", path), f"{path}.translation")
    return AffineLatticeMap(tuple(m), t)


def factor_to_json(f) -> dict:
    if isinstance(f, Elementary):
        return {"kind": "elementary", "vector": list(f.column.vector), "facet": f.column.facet, "scalar": rational_to_json(f.scalar)}
    if isinstance(f, Toric):
        return {"kind": "toric", "xi": [rational_to_json(x) for x in f.xi]}
    return {"kind": "symmetry", **affine_map_to_json(f.map)}


def factor_from_json(data: Any, path: str):
    d = _obj(data, path)
    kind = _field(d, "kind", path)
    if kind == "elementary":
        v = _int_list(_field(d, "vector", path), f"{path}.vector")
        facet = _int(_field(d, "facet", path), f"{path}.facet")
        return Elementary(ColumnVector(v, facet), rational_from_json(_field(d, "scalar", path), f"{path}.scalar"))
    if kind == "toric":
        xi = _field(d, "xi", path)
        if not isinstance(xi, list):
            raise SchemaError(f"{path}.xi", "expected a list")
        return Toric(tuple(rational_from_json(x, f"{path}.xi[{i}]") for i, x in enumerate(xi)))
    if kind == "symmetry":
        return Symmetry(affine_map_from_json(d, path))
    raise SchemaError(f"{path}.kind", f"unknown factor kind {kind!r}")


def word_to_json(w: AutomorphismWord) -> dict:
    return {"polytope": polytope_to_json(w.polytope), "factors": [factor_to_json(f) for f in w.factors]}


def word_from_json(data: Any, path: str = "$", polytope: LatticePolytope | None = None) -> AutomorphismWord:
    d = _obj(data, path)
    P = polytope if polytope is not None else polytope_from_json(_field(d, "polytope", path), f"{path}.polytope")
    fs = _field(d, "factors", path)
    if not isinstance(fs, list):
        raise SchemaError(f"{path}.factors", "expected a list")
    factors = [factor_from_json(f, f"{path}.factors[{i}]") for i, f in enumerate(fs)]
    try:
        return AutomorphismWord(P, factors)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{path}.factors", str(exc)) from None


def fibration_to_json(fib: LatticeFibration) -> dict:
    return {
        "polytope": polytope_to_json(fib.polytope),
        "base_point": list(fib.base_point),
        "h_directions": [list(v) for v in fib.h_directions],
        "w_basis": [list(v) for v in fib.w_basis],
    }


def fibration_parts_from_json(data: Any, path: str = "$"):
    d = _obj(data, path)
    P = polytope_from_json(_field(d, "polytope", path), f"{path}.polytope")
    base = _int_list(_field(d, "base_point", path), f"{path}.base_point")
    dirs = _matrix(_field(d, "h_directions", path), f"{path}.h_directions")
    w = _matrix(_field(d, "w_basis", path), f"{path}.w_basis")
    if not dirs:
        dirs = [tuple(0 for _ in base)]
    return P, base, dirs, w


def fibration_from_json(data: Any, path: str = "$") -> LatticeFibration:
    """Decode and check; a violated fibration condition propagates as ``FibrationError``."""
    P, base, dirs, w = fibration_parts_from_json(data, path)
    return LatticeFibration(P, base, dirs, w)


# certificates ------------------------------------------------------------------


def inner_to_json(inner) -> dict:
    if isinstance(inner, FaceRetraction):
        return {"type": "face", "face": polytope_to_json(inner.face)}
    return {"type": "fibration", **fibration_to_json(inner.fibration)}


def inner_from_json(data: Any, path: str):
    d = _obj(data, path)
    kind = _field(d, "type", path)
    if kind == "face":
        return FaceRetraction(polytope_from_json(_field(d, "face", path), f"{path}.face"))
    if kind == "fibration":
        return FibrationRetraction(fibration_from_json(d, path))
    raise SchemaError(f"{path}.type", f"unknown retraction type {kind!r}")


def certificate_to_json(cert: TamenessCertificate) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "tameness",
        "path": cert.path,
        "original": map_to_json(cert.original),
        "conjugator": [factor_to_json(f) for f in cert.conjugator.factors],
        "inner": inner_to_json(cert.inner),
        "embedding": images_to_json(cert.embedding_images),
        "degree_bound": cert.degree_bound,
        "seed": cert.seed,
    }


def stage_to_json(st) -> dict:
    if isinstance(st, MorphismStage):
        return {"type": "morphism", **map_to_json(st.map)}
    if isinstance(st, AutomorphismStage):
        return {"type": "automorphism", **word_to_json(st.word)}
    if isinstance(st, RetractionStage):
        return {"type": "retraction", "polytope": polytope_to_json(st.polytope), "inner": inner_to_json(st.inner)}
    return {"type": "embedding", "source": polytope_to_json(st.source), "target": polytope_to_json(st.target), "images": images_to_json(st.images)}


def stage_from_json(data: Any, path: str, degree_bound: int):
    d = _obj(data, path)
    kind = _field(d, "type", path)
    if kind == "morphism":
        return MorphismStage(map_from_json(d, path, degree_bound, check=True))
    if kind == "automorphism":
        return AutomorphismStage(word_from_json(d, path))
    if kind == "retraction":
        return RetractionStage(polytope_from_json(_field(d, "polytope", path), f"{path}.polytope"), inner_from_json(_field(d, "inner", path), f"{path}.inner"))
    if kind == "embedding":
        src = polytope_from_json(_field(d, "source", path), f"{path}.source")
        tgt = polytope_from_json(_field(d, "target", path), f"{path}.target")
        return EmbeddingStage(src, tgt, images_from_json(_field(d, "images", path), tgt.ambient_dim, f"{path}.images"))
    raise SchemaError(f"{path}.type", f"unknown stage type {kind!r}")


def chain_to_json(cert: ChainCertificate) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "chain",
        "original": map_to_json(cert.original),
        "stages": [stage_to_json(s) for s in cert.stages],
        "degree_bound": cert.degree_bound,
    }


def certificate_from_json(data: Any, path: str = "$"):
    d = _obj(data, path)
    check_schema(d, path)
    kind = _field(d, "kind", path)
    D = _int(_field(d, "degree_bound", path), f"{path}.degree_bound")
    original = map_from_json(_field(d, "original", path), f"{path}.original", D)
    if kind == "tameness":
        P = original.polytope
        factors = _field(d, "conjugator", path)
        word = word_from_json({"factors": factors}, f"{path}.conjugator", P) if isinstance(factors, list) else word_from_json(factors, f"{path}.conjugator", P)
        inner = inner_from_json(_field(d, "inner", path), f"{path}.inner")
        emb = images_from_json(_field(d, "embedding", path), P.ambient_dim, f"{path}.embedding")
        seed = _int(d.get("seed", 0), f"{path}.seed")
        return TamenessCertificate(original, word, inner, emb, D, seed, d.get("path", ""))
    if kind == "chain":
        stages = _field(d, "stages", path)
        if not isinstance(stages, list):
            raise SchemaError(f"{path}.stages", "expected a list")
        return ChainCertificate(original, [stage_from_json(s, f"{path}.stages[{i}]", D) for i, s in enumerate(stages)], D)
    raise SchemaError(f"{path}.kind", f"unknown certificate kind {kind!r}")


def verification_to_json(report: VerificationReport) -> dict:
    out: dict[str, Any] = {"ok": report.ok, "checked": report.checked}
    if report.divergence is not None:
        dv = report.divergence
        out["divergence"] = {
            "generator": point_id(dv.generator) if dv.generator is not None else None,
            "reason": dv.reason,
            "expected": degree_one_to_json(dv.expected) if dv.expected is not None else None,
            "actual": degree_one_to_json(dv.actual) if dv.actual is not None and all(e[-1] == 1 for e in dv.actual.support) else (dv.actual.to_json() if dv.actual is not None else None),
        }
    return out
