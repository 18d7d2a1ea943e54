"""Tameness certificates and their exact replay.

A :class:`TamenessCertificate` records ``alpha``, a retraction ``g`` of face
or fibration type and embedding data ``iota`` such that

    h = alpha ∘ iota ∘ g ∘ alpha^-1

on every degree-1 generator.  A :class:`ChainCertificate` records an
arbitrary left-to-right pipeline of stages, enough to express tame
morphisms passing through a different polytope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from ..geometry import LatticePolytope
from ..groups import AutomorphismWord
from ..laurent import LaurentPolynomial
from .maps import (
    GradedAlgebraMap,
    LatticeFibration,
    check_idempotent,
    degree_one_points,
    face_retraction,
    fibration_retraction,
    generator,
    is_face,
)

Point = tuple[int, ...]


@dataclass(frozen=True)
class FaceRetraction:
    face: LatticePolytope

    @property
    def base(self) -> LatticePolytope:
        return self.face

    def build(self, P: LatticePolytope, degree_bound: int) -> GradedAlgebraMap:
        return face_retraction(P, self.face, degree_bound)


@dataclass(frozen=True)
class FibrationRetraction:
    fibration: LatticeFibration

    @property
    def base(self) -> LatticePolytope:
        return self.fibration.base_polytope()

    def build(self, P: LatticePolytope, degree_bound: int) -> GradedAlgebraMap:
        fib = self.fibration
        # rebuilding re-checks the three fibration conditions
        fresh = LatticeFibration(P, fib.base_point, fib.h_directions, fib.w_basis)
        return fibration_retraction(fresh, degree_bound)


InnerRetraction = Union[FaceRetraction, FibrationRetraction]


@dataclass(frozen=True)
class Divergence:
    generator: Point | None
    expected: LaurentPolynomial | None
    actual: LaurentPolynomial | None
    reason: str


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    divergence: Divergence | None = None
    checked: int = 0

    def __bool__(self):
        return self.ok


def _linear(images: Mapping[Point, LaurentPolynomial], f: LaurentPolynomial, dim: int) -> LaurentPolynomial:
    out = LaurentPolynomial.zero(dim)
    for x, c in degree_one_points(f).items():
        if x not in images:
            raise KeyError(x)
        out = out + images[x] * c
    return out


@dataclass
class TamenessCertificate:
    original: GradedAlgebraMap
    conjugator: AutomorphismWord
    inner: InnerRetraction
    embedding_images: dict[Point, LaurentPolynomial]
    degree_bound: int
    seed: int = 0
    path: str = ""

    @property
    def polytope(self) -> LatticePolytope:
        return self.original.polytope

    def replay(self, x: Sequence[int], g: GradedAlgebraMap | None = None) -> LaurentPolynomial:
        """``alpha ∘ iota ∘ g ∘ alpha^-1`` on the generator ``x``."""
        P = self.polytope
        if g is None:
            g = self.inner.build(P, self.degree_bound)
        y = self.conjugator.inverse()(generator(x))
        z = _linear(self.embedding_images, g(y), P.ambient_dim + 1)
        return self.conjugator(z)

    def to_json(self) -> dict:
        from ..io import certificate_to_json

        return certificate_to_json(self)


@dataclass(frozen=True)
class MorphismStage:
    map: GradedAlgebraMap


@dataclass(frozen=True)
class AutomorphismStage:
    word: AutomorphismWord


@dataclass(frozen=True)
class RetractionStage:
    polytope: LatticePolytope
    inner: InnerRetraction


@dataclass(frozen=True)
class EmbeddingStage:
    source: LatticePolytope
    target: LatticePolytope
    images: dict[Point, LaurentPolynomial] = field(hash=False)


Stage = Union[MorphismStage, AutomorphismStage, RetractionStage, EmbeddingStage]


@dataclass
class ChainCertificate:
    """``original`` equals the stages applied in order, first stage first."""

    original: GradedAlgebraMap
    stages: list[Stage]
    degree_bound: int

    def _stage_maps(self):
        out = []
        for st in self.stages:
            if isinstance(st, MorphismStage):
                out.append(st.map)
            elif isinstance(st, AutomorphismStage):
                out.append(st.word)
            elif isinstance(st, RetractionStage):
                out.append(st.inner.build(st.polytope, self.degree_bound))
            else:
                out.append(GradedAlgebraMap(st.source, st.images, self.degree_bound, st.target))
        return out

    def replay(self, x: Sequence[int], maps=None) -> LaurentPolynomial:
        maps = maps if maps is not None else self._stage_maps()
        f = generator(x)
        for m in maps:
            f = m(f)
        return f

    def to_json(self) -> dict:
        from ..io import chain_to_json

        return chain_to_json(self)


def _compare(original: GradedAlgebraMap, replay) -> VerificationReport:
    n = 0
    for x in original.polytope.lattice_points:
        try:
            got = replay(x)
        except (KeyError, ValueError) as exc:
            return VerificationReport(False, Divergence(x, original.images[x], None, f"replay failed: {exc}"), n)
        if got != original.images[x]:
            return VerificationReport(False, Divergence(x, original.images[x], got, "image differs"), n)
        n += 1
    return VerificationReport(True, None, n)


def _verify_tameness(cert: TamenessCertificate) -> VerificationReport:
    P = cert.polytope
    if cert.conjugator.polytope != P:
        return VerificationReport(False, Divergence(None, None, None, "conjugator acts on a different polytope"))
    try:
        g = cert.inner.build(P, cert.degree_bound)
    except ValueError as exc:
        return VerificationReport(False, Divergence(None, None, None, f"inner retraction invalid: {exc}"))
    if not check_idempotent(g):
        return VerificationReport(False, Divergence(None, None, None, "inner retraction is not idempotent"))
    if isinstance(cert.inner, FaceRetraction) and not is_face(P, cert.inner.face):
        return VerificationReport(False, Divergence(None, None, None, "inner face is not a face"))
    base = cert.inner.base
    if set(cert.embedding_images) != set(base.lattice_points):
        return VerificationReport(False, Divergence(None, None, None, "embedding data does not match the base lattice points"))
    try:
        GradedAlgebraMap(base, cert.embedding_images, cert.degree_bound, P)
    except ValueError as exc:
        return VerificationReport(False, Divergence(None, None, None, f"embedding is not a homomorphism: {exc}"))
    return _compare(cert.original, lambda x: cert.replay(x, g))


def _verify_chain(cert: ChainCertificate) -> VerificationReport:
    current = cert.original.polytope
    for i, st in enumerate(cert.stages):
        if isinstance(st, MorphismStage):
            src, dst = st.map.polytope, st.map.target
        elif isinstance(st, AutomorphismStage):
            src = dst = st.word.polytope
        elif isinstance(st, RetractionStage):
            src = dst = st.polytope
        else:
            src, dst = st.source, st.target
        if src != current and not (isinstance(st, EmbeddingStage) and set(src.lattice_points) <= set(current.lattice_points)):
            return VerificationReport(False, Divergence(None, None, None, f"stage {i} does not compose with its predecessor"))
        current = dst
    if current != cert.original.target:
        return VerificationReport(False, Divergence(None, None, None, "chain does not end in the target polytope"))
    try:
        maps = cert._stage_maps()
    except ValueError as exc:
        return VerificationReport(False, Divergence(None, None, None, f"stage invalid: {exc}"))
    for st, m in zip(cert.stages, maps):
        if isinstance(st, RetractionStage) and not check_idempotent(m):
            return VerificationReport(False, Divergence(None, None, None, "retraction stage is not idempotent"))
    return _compare(cert.original, lambda x: cert.replay(x, maps))


def verify_certificate(cert: TamenessCertificate | ChainCertificate) -> VerificationReport:
    """Replay the certificate on every degree-1 generator and re-check its parts."""
    if isinstance(cert, TamenessCertificate):
        return _verify_tameness(cert)
    if isinstance(cert, ChainCertificate):
        return _verify_chain(cert)
    raise TypeError(f"not a certificate: {cert!r}")


class CertificateError(RuntimeError):
    def __init__(self, report: VerificationReport):
        self.report = report
        super().__init__(f"emitted certificate failed replay: {report.divergence}")


def emit(cert):
    """Return ``cert`` after it passes verification; raise otherwise."""
    report = verify_certificate(cert)
    if not report:
        raise CertificateError(report)
    return cert
