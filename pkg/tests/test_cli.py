import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from polyretract.cli import VERBS, format_json, report_schema_version, run

EXAMPLES = Path(__file__).resolve().parent.parent / "docs" / "examples"


def call(*argv):
    out = io.StringIO()
    status = run([str(a) for a in argv], out)
    return status, json.loads(out.getvalue()), out.getvalue()


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


# one invocation per verb, with the expected exit status
VERB_CASES = [
    ("analyze", "triangle.json", [], 0),
    ("col", "triangle.json", [], 0),
    ("normality", "non_normal_semigroup.json", [], 0),
    ("relations", "triangle.json", [], 0),
    ("width", "triangle.json", ["--direction", "1,0"], 0),
    ("embed-segment", "wide_triangle.json", ["--c", "2"], 0),
    ("symmetries", "triangle.json", [], 0),
    ("retraction-check", "wildtame_map.json", [], 0),
    ("retraction-tame", "square_conjugated_map.json", ["--seed", "42", "--degree-bound", "3"], 0),
    ("fibration-verify", "square_fibration.json", [], 0),
    ("segprime", "segmentonomial.json", [], 0),
    ("split-variable", "split_matrix.json", [], 0),
    ("verify-cert", "wildtame_chain.json", [], 0),
]


def test_every_verb_has_a_case():
    assert sorted(v for v, *_ in VERB_CASES) == sorted(VERBS)


@pytest.mark.parametrize("verb,name,flags,status", VERB_CASES)
def test_verbs_on_documented_examples(verb, name, flags, status):
    got, report, _ = call(verb, EXAMPLES / name, *flags)
    assert got == status
    assert report["schema"] == report_schema_version() and report["verb"] == verb


def test_every_example_file_is_used():
    used = {name for _, name, _, _ in VERB_CASES} | {"square_certificate.json"}
    assert used == {p.name for p in EXAMPLES.glob("*.json")}


def test_analyze_triangle():
    _, r, _ = call("analyze", EXAMPLES / "triangle.json")
    assert len(r["lattice_points"]) == 4 and r["column_vectors"] == [] and r["normality"]["normal"]
    assert r["interior_points"] == [[0, 0]]


def test_normality_witness():
    status, r, _ = call("normality", EXAMPLES / "non_normal_semigroup.json")
    assert status == 0 and not r["normal"] and r["witness"]["element"] == [2, 1]


def test_retraction_check_wildtame():
    _, r, _ = call("retraction-check", EXAMPLES / "wildtame_map.json")
    assert r["valid"] and r["idempotent"]
    assert r["image_dimension"]["dimension"] == 2 and r["codimension"] == 2
    assert r["kernel_monomials"] is None


def test_retraction_check_reports_violations(tmp_path):
    data = json.loads((EXAMPLES / "wildtame_map.json").read_text())
    data["images"]["0,2,1"] = data["images"]["0,0,1"]
    status, r, _ = call("retraction-check", write(tmp_path, "bad.json", data))
    assert status == 1 and not r["valid"] and r["violated_relation"]


def test_tame_certificate_round_trip(tmp_path):
    status, r, text = call("retraction-tame", EXAMPLES / "square_conjugated_map.json", "--seed", "42", "--degree-bound", "3")
    assert status == 0 and r["tame"]
    cert = tmp_path / "cert.json"
    cert.write_text(json.dumps(r["certificate"]))
    status, v, _ = call("verify-cert", cert)
    assert status == 0 and v["ok"]
    # the whole report is accepted as well
    whole = tmp_path / "report.json"
    whole.write_text(text)
    assert call("verify-cert", whole)[0] == 0


def test_documented_certificate_verifies():
    status, v, _ = call("verify-cert", EXAMPLES / "square_certificate.json")
    assert status == 0 and v["ok"]


def test_tampered_certificate_fails(tmp_path):
    data = json.loads((EXAMPLES / "square_certificate.json").read_text())
    first = next(iter(data["original"]["images"]))
    data["original"]["images"][first] = data["original"]["images"][first][:1]
    status, v, _ = call("verify-cert", write(tmp_path, "bad.json", data))
    assert status == 1 and not v["ok"] and v["divergence"]


def test_retraction_tame_negative_is_exit_one(tmp_path):
    # the WildTame map has codimension 2; the polygon pipeline refuses it
    status, r, _ = call("retraction-tame", EXAMPLES / "wildtame_map.json")
    assert status == 1 and not r["tame"]


def test_embed_segment_reports_obstruction():
    _, r, _ = call("embed-segment", EXAMPLES / "wide_triangle.json", "--c", "2")
    assert r["obstruction"] is True


def test_segprime_exhaustive_flag(tmp_path):
    data = json.loads((EXAMPLES / "segmentonomial.json").read_text())
    data["polynomial"]["terms"] = [{"exp": [2, 0], "coeff": 1}, {"exp": [0, 2], "coeff": -2}]
    p = write(tmp_path, "irrational.json", data)
    status, r, _ = call("segprime", p)
    assert status == 0 and r["skipped_factors"]
    assert call("segprime", p, "--exhaustive")[0] == 1


def test_fibration_verify_negative(tmp_path):
    data = json.loads((EXAMPLES / "square_fibration.json").read_text())
    data["w_basis"] = [[0, 2]]
    status, r, _ = call("fibration-verify", write(tmp_path, "bad.json", data))
    assert status == 1 and not r["valid"]


# input errors --------------------------------------------------------------------


def test_unknown_verb_is_rejected_before_reading(tmp_path):
    status, r, _ = call("frobnicate", tmp_path / "does-not-exist.json")
    assert status == 2 and "unknown verb" in r["error"]


def test_missing_file_is_an_input_error(tmp_path):
    assert call("analyze", tmp_path / "nope.json")[0] == 2


def test_unparseable_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert call("analyze", p)[0] == 2


def test_unknown_major_version(tmp_path):
    data = json.loads((EXAMPLES / "square_certificate.json").read_text())
    data["schema"] = "2.0"
    status, r, _ = call("verify-cert", write(tmp_path, "future.json", data))
    assert status == 2 and r["path"] == "$.schema"


def test_schema_errors_point_at_the_offending_path(tmp_path):
    data = {"schema": "1.0", "polytope": {"ambient_dim": 2, "vertices": [[0, 0], [1, "x"]]}}
    status, r, _ = call("analyze", write(tmp_path, "bad.json", data))
    assert status == 2 and r["path"].startswith("$.polytope.vertices[1]")


def test_missing_required_flag(tmp_path):
    assert call("embed-segment", EXAMPLES / "triangle.json")[0] == 2


# output ---------------------------------------------------------------------------


@pytest.mark.parametrize("verb,name,flags,status", VERB_CASES)
def test_output_is_byte_identical(verb, name, flags, status):
    assert call(verb, EXAMPLES / name, *flags)[2] == call(verb, EXAMPLES / name, *flags)[2]


def test_no_floats_in_reports():
    for verb, name, flags, _ in VERB_CASES:
        text = call(verb, EXAMPLES / name, *flags)[2]

        def walk(x):
            assert not isinstance(x, float), (verb, x)
            if isinstance(x, dict):
                for v in x.values():
                    walk(v)
            elif isinstance(x, list):
                for v in x:
                    walk(v)

        walk(json.loads(text))


def test_format_json_keeps_rationals_and_flat_lists_on_one_line():
    text = format_json({"a": {"num": 1, "den": 2}, "b": [1, 2, None], "c": ["x, y", "z"]})
    assert '"a": {"num": 1, "den": 2}' in text and '"b": [1, 2, null]' in text
    assert json.loads(text)["c"] == ["x, y", "z"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polyretract.cli", "analyze", str(EXAMPLES / "triangle.json")], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["verb"] == "analyze"
