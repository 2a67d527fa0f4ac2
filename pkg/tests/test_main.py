import json
import logging
import math

import pytest

from openbook.__main__ import EXIT_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main
from openbook.suite import known_checks


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    level, handlers = root.level, list(root.handlers)
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def test_list_checks(capsys):
    assert main(["--list-checks"]) == EXIT_OK
    assert capsys.readouterr().out.split() == known_checks()


def test_no_command_is_usage_error(capsys):
    assert main([]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_verbose_and_quiet_are_exclusive():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["-v", "-q", "verify"])
    assert exc.value.code == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--n", "5", "--k", "1"],
        ["verify", "--n", "2", "--k", "0"],
        ["verify", "--samples", "0"],
        ["verify", "--check", "nosuch"],
        ["verify", "--tol", "cmap.pullback=-1"],
        ["verify", "--tol", "nosuch.check=1e-3"],
        ["profile", "--k", "1", "--k", "2"],
        ["sample", "--n", "2", "--n", "3", "--k", "1"],
    ],
)
def test_configuration_errors(argv, capsys):
    assert main(["-q", *argv]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("Error:")


def test_profile_csv(tmp_path):
    out = tmp_path / "profile.csv"
    assert main(["-q", "profile", "--k", "2", "-o", str(out)]) == EXIT_OK
    text = out.read_text()
    head, _, tail = text.partition("\n\n")
    rows = head.splitlines()
    assert rows[0] == "y,f_k,I,h_k,h_aux"
    assert rows[1] == "0,0,0,1,0"
    g_rows = tail.splitlines()
    assert g_rows[0] == "r,target,g"
    assert len(g_rows) == 1001
    gs = [float(row.split(",")[2]) for row in g_rows[1:]]
    assert all(b > a for a, b in zip(gs, gs[1:]))


def test_sample_json_lines(capsys):
    assert main(["-q", "sample", "--n", "3", "--k", "2", "--count", "3"]) == EXIT_OK
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["kind"] for r in records] == ["binding"] * 3 + ["page"] * 3 + ["torus"] * 3
    for record in records:
        assert len(record["z"]) == 8
        assert record["defect"]["f"] <= 1e-9
        assert record["defect"]["sphere"] <= 1e-9
    for record in records[3:6]:
        re, im = record["theta"]
        assert math.hypot(re, im) == pytest.approx(1.0, abs=1e-12)
    assert records[6]["torus"]["model"] == "twist"


def test_sample_single_kind(capsys):
    assert main(["-q", "sample", "--n", "2", "--k", "1", "--kind", "binding", "--count", "2"]) == 0
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["index"] for r in records] == [0, 1]
    assert all(abs(r["z"][0]) + abs(r["z"][1]) <= 1e-12 for r in records)


VERIFY = ["-q", "verify", "--n", "2", "--k", "1", "--samples", "4", "--check", "rescale", "--check", "phi"]


def test_verify_json(tmp_path):
    out = tmp_path / "report.json"
    assert main([*VERIFY, "-o", str(out)]) == EXIT_OK
    document = json.loads(out.read_text())
    assert (document["n"], document["k"], document["seed"]) == (2, 1, 7)
    assert document["pass"] is True
    names = [check["name"] for check in document["checks"]]
    assert names and all(name.split(".")[0] in ("rescale", "phi") for name in names)
    assert all(len(check) == 5 for check in document["checks"])


def test_verify_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main([*VERIFY, "--seed", "123", "-o", str(first)])
    main([*VERIFY, "--seed", "123", "-o", str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_verify_several_cells(capsys):
    argv = ["-q", "verify", "--n", "2", "--n", "3", "--k", "2", "--samples", "3", "--check", "psi"]
    assert main(argv) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert [(r["n"], r["k"]) for r in document["reports"]] == [(2, 2), (3, 2)]
    assert set(document) == {"reports", "pass"}
    assert document["pass"] is True


@pytest.mark.parametrize("fmt, marker", [("csv", "n,k,seed,name"), ("text", "n=2 k=1 seed=7")])
def test_verify_formats(fmt, marker, capsys):
    assert main([*VERIFY, "--format", fmt]) == EXIT_OK
    assert capsys.readouterr().out.startswith(marker)


def test_verify_failure_exit_code(capsys):
    argv = [*VERIFY, "--tol", "rescale.monotone=1e300"]
    assert main(argv) == EXIT_FAILED
    captured = capsys.readouterr()
    assert "rescale.monotone" in captured.err
    assert json.loads(captured.out)["pass"] is False


def test_unwritable_output(tmp_path):
    target = tmp_path / "missing" / "report.json"
    assert main([*VERIFY, "-o", str(target)]) == EXIT_FAILED


def test_verify_group_tolerance(capsys):
    assert main([*VERIFY, "--tol", "rescale=1e300"]) == EXIT_FAILED
    document = json.loads(capsys.readouterr().out)
    rescale = [check for check in document["checks"] if check["name"].startswith("rescale.")]
    assert rescale
    assert all(check["tolerance"] == 1e300 for check in rescale)
    phi = [check for check in document["checks"] if check["name"].startswith("phi.")]
    assert all(check["tolerance"] != 1e300 for check in phi)


def test_profile_json(capsys):
    assert main(["-q", "profile", "--k", "3", "--format", "json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["k"] == 3
    assert document["profile"]["columns"] == ["y", "f_k", "I", "h_k", "h_aux"]
    assert document["profile"]["rows"][0] == pytest.approx([0, 0, 0, 1, 0], abs=1e-12)
    assert document["g"]["columns"] == ["r", "target", "g"]
    assert len(document["g"]["rows"]) == 1000


def test_sample_rejects_csv():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["sample", "--format", "csv"])
    assert exc.value.code == EXIT_USAGE
