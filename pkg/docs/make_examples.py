"""Regenerate the example inputs under docs/examples/."""

from fractions import Fraction
from pathlib import Path

from polyretract import io
from polyretract.cli import format_json
from polyretract.geometry import LatticePolytope
from polyretract.groups import AutomorphismWord, Elementary, Toric, column_vectors
from polyretract.retraction import LatticeFibration, fibration_retraction
from polyretract.retraction.catalog import unit_square, wildtame_chain, wildtame_retraction
from polyretract.retraction.tameness import polygon_tameness

OUT = Path(__file__).parent / "examples"
TRIANGLE = LatticePolytope([(0, -1), (-1, 0), (1, 1)])


def conjugated_square_retraction(degree_bound=3):
    sq = unit_square()
    rho = fibration_retraction(LatticeFibration(sq, (0, 0), [(1, 0)], [(0, 1)]), degree_bound)
    col = next(c for c in column_vectors(sq) if c.vector == (0, 1))
    word = AutomorphismWord(sq, [Elementary(col, Fraction(2)), Toric((Fraction(1), Fraction(3), Fraction(1, 2)))])
    return word.to_map(degree_bound).compose(rho).compose(word.inverse().to_map(degree_bound))


def write(name, data):
    (OUT / name).write_text(format_json(data) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    tri = {"schema": io.SCHEMA_VERSION, "polytope": io.polytope_to_json(TRIANGLE)}
    write("triangle.json", tri)
    write("wide_triangle.json", {"schema": io.SCHEMA_VERSION, "polytope": io.polytope_to_json(LatticePolytope([(0, 0), (1, 1), (2, 1)]))})
    write("non_normal_semigroup.json", {"schema": io.SCHEMA_VERSION, "semigroup": {"generators": [[0, 1], [1, 1], [3, 1]], "grading": [0, 1]}})
    write("wildtame_map.json", {"schema": io.SCHEMA_VERSION, **io.map_to_json(wildtame_retraction())})
    write("wildtame_chain.json", wildtame_chain().to_json())
    write("square_conjugated_map.json", {"schema": io.SCHEMA_VERSION, **io.map_to_json(conjugated_square_retraction())})
    sq = unit_square()
    write("square_fibration.json", {"schema": io.SCHEMA_VERSION, **io.fibration_to_json(LatticeFibration(sq, (0, 0), [(1, 0)], [(0, 1)]))})
    write(
        "segmentonomial.json",
        {
            "schema": io.SCHEMA_VERSION,
            "semigroup": {"generators": [[1, 0], [0, 1]], "grading": [1, 1]},
            "polynomial": {"terms": [{"exp": [2, 0], "coeff": 1}, {"exp": [1, 1], "coeff": -3}, {"exp": [0, 2], "coeff": 2}]},
        },
    )
    write("split_matrix.json", {"schema": io.SCHEMA_VERSION, "matrix": [[1, 2, 0], [0, 1, 1], [1, 0, 1]]})
    rep = polygon_tameness(conjugated_square_retraction(), 3, seed=42)
    write("square_certificate.json", rep.certificate.to_json())


if __name__ == "__main__":
    main()
