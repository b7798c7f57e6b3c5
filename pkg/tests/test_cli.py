import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from oracles import h2
from seccompute.cli import main
from seccompute.errors import InvalidArgumentError, ResourceLimitError
from seccompute.problem import bundled_fixture, generate_auction, parse_problem, problem_from_dict

FIXTURES = ["dsbs_delta01.json", "dsbs_delta025.json", "example2.json", "auction_m4_k2.json"]


def schema(name):
    ref = resources.files("seccompute").joinpath("schemas").joinpath(f"{name}.json")
    return json.loads(ref.read_text())


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def write(tmp_path, doc, name="p.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def uniform_doc(total=1.0):
    cells = [["0", "0"], ["0", "1"], ["1", "0"], ["1", "1"]]
    return {"alphabets": [["0", "1"], ["0", "1"]], "pmf": [{"x": c, "p": total / 4} for c in cells]}


# -- problem files ---------------------------------------------------------

def test_minimal_file_loads(tmp_path):
    pf = parse_problem(write(tmp_path, uniform_doc()))
    assert pf.dist.m == 2
    assert pf.functions == {}


def test_short_pmf_rejected(tmp_path):
    with pytest.raises(InvalidArgumentError, match="pmf"):
        parse_problem(write(tmp_path, uniform_doc(0.98)))


def test_slightly_off_pmf_normalized(tmp_path):
    pf = parse_problem(write(tmp_path, uniform_doc(1 + 5e-7)))
    assert pf.dist.pmf.sum() == pytest.approx(1.0, abs=1e-15)


def test_bundled_dsbs_fixture():
    pf = parse_problem(bundled_fixture("dsbs_delta01.json"))
    assert np.allclose(pf.dist.pmf, [[0.45, 0.05], [0.05, 0.45]], atol=1e-15)
    g = pf.function()
    assert g.table.tolist() == [[0, 1], [1, 0]]
    assert pf.computing_set == (1, 2)


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_validate_against_problem_schema(name):
    jsonschema.validate(json.loads(bundled_fixture(name).read_text()), schema("problem"))


@pytest.mark.parametrize("tie_break", ["lowest", "highest"])
def test_auction_round_trip(tie_break):
    pf = generate_auction(4, 2, tie_break=tie_break)
    back = problem_from_dict(json.loads(pf.dumps()))
    assert back.dist.alphabets == pf.dist.alphabets
    assert np.array_equal(back.dist.pmf, pf.dist.pmf)
    assert back.functions.keys() == pf.functions.keys()
    for k in pf.functions:
        assert back.functions[k].outputs == pf.functions[k].outputs
        assert np.array_equal(back.functions[k].table, pf.functions[k].table)
    assert (back.computing_set, back.secrecy_set) == (pf.computing_set, pf.secrecy_set)


def test_auction_support_and_caps():
    pf = generate_auction(4, 2)
    assert np.count_nonzero(pf.dist.pmf) == 8
    assert np.allclose(pf.dist.pmf[pf.dist.pmf > 0], 1 / 8)
    with pytest.raises(ResourceLimitError):
        generate_auction(8, 10)
    with pytest.raises(InvalidArgumentError):
        generate_auction(2, 2)


def test_bundled_auction_matches_generator():
    a = parse_problem(bundled_fixture("auction_m4_k2.json"))
    b = generate_auction(4, 2)
    assert np.array_equal(a.dist.pmf, b.dist.pmf)
    assert np.array_equal(a.function("argmax").table, b.function("argmax").table)


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d.pop("alphabets"), "alphabets"),
    (lambda d: d["pmf"].append({"x": ["0", "2"], "p": 0.0}), "pmf"),
    (lambda d: d.update(A=[3]), "A"),
    (lambda d: d.update(side_info={"1": "maybe"}), "side_info"),
    (lambda d: d.update(function={"outputs": ["0"], "table": [{"x": ["0", "0"], "y": "0"}]}), "function"),
])
def test_field_level_messages(mutate, field):
    doc = uniform_doc()
    mutate(doc)
    with pytest.raises(InvalidArgumentError, match=field):
        problem_from_dict(doc)


# -- dispatch --------------------------------------------------------------

def test_decide_dsbs(capsys):
    code, out, _ = run(["decide", "examples/dsbs_delta01.json", "--set", "1,2"], capsys)
    assert code == 0
    assert out["verdict"] == "SecurelyComputable"
    assert out["H_G"] == pytest.approx(0.468995593590, abs=1e-12)
    assert out["C"] == pytest.approx(0.531004406410, abs=1e-12)


def test_decide_example2_is_data_not_error(capsys):
    code, out, _ = run(["decide", "examples/example2.json", "--set", "1,2"], capsys)
    assert code == 0
    assert out["verdict"] == "NotSecurelyComputable"
    assert out["C"] == 0.0


def test_capacity_sk_auction(capsys):
    code, out, _ = run(["capacity", "sk", "examples/auction_m4_k2.json", "--set", "1,2,3,4"], capsys)
    assert code == 0 and out["C"] == 1.0


def test_capacity_ask_matches_secure(capsys):
    _, ask, _ = run(["capacity", "ask", "examples/example2.json", "--set", "1,2,3",
                     "--side-info", "3:G"], capsys)
    _, sec, _ = run(["capacity", "secure", "examples/example2.json", "--set", "1,2"], capsys)
    assert ask["C"] == pytest.approx(sec["C"], abs=1e-12)


def test_twelve_significant_digits(capsys):
    _, out, _ = run(["entropy", "examples/dsbs_delta01.json", "--set", "2", "--given", "1"], capsys)
    assert out["H_conditional"] == float(f"{h2(0.1):.12g}")


def test_diagnostics_go_to_stderr(capsys):
    code, out, err = run(["decide", "no/such/dir/dsbs_delta01.json", "--set", "1,2"], capsys)
    assert code == 0 and out["verdict"] == "SecurelyComputable"
    assert "bundled fixture" in err


def test_gen_auction_to_file(tmp_path, capsys):
    path = tmp_path / "a.json"
    code, out, _ = run(["gen-auction", "--m", "4", "--k", "2", "-o", str(path)], capsys)
    assert code == 0 and out["output"] == str(path)
    assert parse_problem(path).dist.m == 4


def test_seed_controls_simulation(capsys):
    argv = ["simulate-example1", "--delta", "0.1", "--trials", "300"]
    _, a, _ = run(argv + ["--seed", "1"], capsys)
    _, b, _ = run(argv + ["--seed", "1"], capsys)
    _, c, _ = run(argv + ["--seed", "2"], capsys)
    assert a == b and a != c


SCHEMA_CASES = [
    ("entropy", ["entropy", "examples/dsbs_delta01.json", "--set", "1,2", "--given", "", "--with", ""]),
    ("entropy", ["entropy", "examples/auction_m4_k2.json", "--set", "4", "--function", "max"]),
    ("mcf", ["mcf", "examples/dsbs_delta025.json"]),
    ("mcf", ["mcf", "examples/auction_m4_k2.json", "--groups", "1,2;4"]),
    ("capacity", ["capacity", "sk", "examples/dsbs_delta01.json", "--set", "1,2"]),
    ("capacity", ["capacity", "secure", "examples/auction_m4_k2.json", "--function", "max"]),
    ("capacity", ["capacity", "ask", "examples/example2.json", "--set", "1,2,3", "--side-info", "3:G"]),
    ("decide", ["decide", "examples/dsbs_delta025.json"]),
    ("decompose", ["decompose", "examples/auction_m4_k2.json", "--function", "max"]),
    ("simulate-binning", ["simulate-binning", "examples/dsbs_delta01.json", "--n", "4", "--trials", "50",
                          "--margin", "0.15", "--exact-realizations", "1"]),
    ("simulate-binning", ["simulate-binning", "examples/dsbs_delta01.json", "--rates", "0.6,0.6", "--n", "3",
                          "--trials", "20", "--freeze-bins"]),
    ("simulate-example1", ["simulate-example1", "--trials", "200"]),
    ("balance-check", ["balance-check", "--samples", "5", "--u-size", "256", "--v-size", "2", "--r-prime", "2"]),
    ("gen-auction", ["gen-auction", "--m", "3", "--k", "3", "--tie-break", "highest"]),
]


@pytest.mark.parametrize("name, argv", SCHEMA_CASES)
def test_output_matches_published_schema(name, argv, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    jsonschema.validate(out, schema(name))


def test_every_subcommand_has_a_schema():
    from seccompute.cli import build_parser
    sub = next(a for a in build_parser()._actions if a.dest == "command")
    for name in sub.choices:
        assert schema(name)["title"].endswith(f"{name} output")


@pytest.mark.parametrize("argv, expected", [
    (["decide", "examples/dsbs_delta01.json"], 0),
    (["bogus"], 2),
    ([], 2),
    (["decide", "missing_file.json"], 2),
    (["decide", "examples/dsbs_delta01.json", "--set", "1,5"], 2),
    (["decide", "examples/dsbs_delta01.json", "--set", "x"], 2),
    (["decide", "examples/auction_m4_k2.json"], 2),
    (["decide", "examples/auction_m4_k2.json", "--function", "min"], 2),
    (["capacity", "ask", "examples/dsbs_delta01.json", "--side-info", "2:H"], 2),
    (["simulate-binning", "examples/dsbs_delta01.json", "--rates", "0.5"], 2),
    (["simulate-example1", "--delta", "0.7"], 2),
    (["balance-check", "--lambda", "0.5"], 2),
    (["gen-auction", "--m", "2"], 2),
    (["gen-auction", "--m", "9", "--k", "10"], 3),
    (["simulate-binning", "examples/dsbs_delta01.json", "--n", "30", "--trials", "1"], 3),
    (["balance-check", "--u-size", "5000", "--v-size", "300"], 3),
])
def test_exit_codes(argv, expected, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:   # argparse usage errors
        code = exc.code
    capsys.readouterr()
    assert code == expected


@pytest.mark.parametrize("content", ["{", "[1, 2]", '{"alphabets": [["0"]], "pmf": [{"x": ["0"], "p": 0.98}]}'])
def test_malformed_files_exit_2(tmp_path, content, capsys):
    code = main(["decide", write(tmp_path, content), "--set", "1"])
    _, err = capsys.readouterr()
    assert code == 2 and err.startswith("error:")


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "seccompute.cli", "decide", "examples/example2.json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "NotSecurelyComputable"
