import itertools
import json
import os
import subprocess
from fractions import Fraction

import pytest

import mdt


def test_gauss_sum_squares_to_p():
    g = mdt.gauss_sum(5)
    assert (g * g).rational() == 5
    assert g.conductor == 5
    # p = 3 mod 4: g^2 = -p
    g3 = mdt.gauss_sum(7)
    assert (g3 * g3).rational() == -7


def test_gauss_sum_absolute_value():
    for p in (3, 5, 7, 11):
        for k in (1, 2):
            g = mdt.gauss_sum(p, k)
            assert (g * g.conj()).rational() == p**k


def test_gl_order():
    assert mdt.gl_order(1, 7) == 6
    assert mdt.gl_order(2, 2) == 6
    assert mdt.gl_order(3, 2) == 168


def _commuting_pairs_brute(q):
    # 2x2 over F_q, q prime
    mats = list(itertools.product(range(q), repeat=4))

    def mul(a, b):
        return (
            (a[0] * b[0] + a[1] * b[2]) % q,
            (a[0] * b[1] + a[1] * b[3]) % q,
            (a[2] * b[0] + a[3] * b[2]) % q,
            (a[2] * b[1] + a[3] * b[3]) % q,
        )

    return sum(1 for a in mats for b in mats if mul(a, b) == mul(b, a))


@pytest.mark.parametrize("q", [2, 3])
def test_commuting_count_against_python(q):
    expect = _commuting_pairs_brute(q)
    for backend in ("brute", "classes"):
        v = mdt.commuting_twisted_count(2, q, 1, "", backend)
        assert v.rational() == expect


def test_twisted_count_is_not_rational():
    v = mdt.commuting_twisted_count(1, 5, 1, "c c")
    # sum over b, c of psi(c^2) = 5 * g
    g = mdt.gauss_sum(5)
    assert (v * v).rational() == 25 * 5
    assert abs(complex(v) - 5 * complex(g)) < 1e-9
    assert all(isinstance(c, Fraction) for c in v.coeffs)


def test_budget_and_errors():
    with pytest.raises(mdt.BudgetExceeded):
        mdt.commuting_twisted_count(2, 5, 1, "", "brute", budget=10)
    with pytest.raises(mdt.Error):
        mdt.commuting_twisted_count(2, 5, 1, "", "nope")


def test_reports():
    r = mdt.check_cmps(2, 5, 2, 2)
    assert r["check"] == "cmps" and r["pass"]
    assert all(row["equal"] for row in r["rows"])
    assert mdt.check_feit_fine([2, 3], 2)["pass"]
    d = mdt.check_dimred("x^2*t + x", p=3, kmax=2)
    assert d["pass"] and d["params"]["weights"]["feasible"] is False
    assert mdt.check_classes([2, 3], 2)["pass"]
    assert mdt.check_sigma_oracle(2, 5, 3)["pass"]
    assert mdt.check_preprojective("c b b", 5, 1, 2)["pass"]


CLI = os.environ.get("MDT_CLI")
needs_cli = pytest.mark.skipif(not CLI, reason="MDT_CLI not set")


def run_cli(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


@needs_cli
def test_cli_exit_codes(tmp_path):
    assert run_cli("cmps", "--d", "2", "--p", "5", "--nmax", "2", "--kmax", "2").returncode == 0
    assert run_cli("cmps", "--p", "4").returncode == 2
    assert run_cli("cmps", "--bogus").returncode == 2
    assert run_cli("dimred", "--poly", "x*t^2", "--p", "3").returncode == 2
    r = run_cli("cmps", "--p", "5", "--nmax", "2", "--kmax", "2", "--backend", "brute", "--budget", "100",
                "--out", str(tmp_path / "r.json"))
    assert r.returncode == 3
    partial = json.loads((tmp_path / "r.json").read_text())
    assert partial["pass"] is False and partial["params"]["partial"] is True


@needs_cli
def test_cli_json_is_reproducible(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        r = run_cli("feit-fine", "--q", "2,3", "--nmax", "2", "--out", str(path))
        assert r.returncode == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["pass"] and all(row["ms"] == 0 for row in rep["rows"])
