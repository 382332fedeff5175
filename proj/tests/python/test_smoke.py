import json
import math

import pytest

import pdcontact


def test_projection_hand_cases():
    r_n, r_t = pdcontact.project_friction_cone(0.0, [1.0, 0.0], 0.5)
    assert r_n == pytest.approx(-0.4)
    assert r_t == pytest.approx([0.2, 0.0])
    x0, x1 = pdcontact.project_soc(0.0, [2.0, 0.0])
    assert x0 == pytest.approx(1.0)
    assert x1 == pytest.approx([1.0, 0.0])
    with pytest.raises(ValueError):
        pdcontact.project_friction_cone(0.0, [1.0], -1.0)


def test_mu_one_matches_soc():
    for x0, x1 in [(0.3, [1.2, -0.4]), (-1.0, [0.1, 0.1]), (2.0, [0.5, 0.5])]:
        r_n, r_t = pdcontact.project_friction_cone(-x0, x1, 1.0)
        s0, s1 = pdcontact.project_soc(x0, x1)
        assert -r_n == pytest.approx(s0, abs=1e-14)
        assert r_t == pytest.approx(s1, abs=1e-14)


def test_gen_solve_verify():
    p = pdcontact.gen("example1", 4)
    assert (p.dofs, p.c, p.m) == (100, 10, 1)
    sol = pdcontact.solve(p)
    assert sol["converged"]
    assert sol["status"] == "converged"
    rep = pdcontact.residuals(p, sol["du"], sol["r"])
    norm_p = math.sqrt(sum(v * v for v in p.p))
    assert rep["resid_eq"] <= 1e-8 * max(1.0, norm_p)
    assert rep["resid_compl"] <= 1e-8
    assert rep["resid_pen"] <= 1e-9
    assert rep["free"] + rep["slip"] + rep["stick"] == pytest.approx(1.0)
    assert pdcontact.verify_soclcp(p, sol["du"], sol["r"])["passed"]


def test_oracle_agrees_on_small_planar_problem():
    p = pdcontact.gen("example1", 2)
    assert p.c == 5
    sols = pdcontact.oracle(p)
    assert len(sols) == 1
    got = pdcontact.solve(p)
    assert max(abs(a - b) for a, b in zip(got["du"], sols[0]["du"])) <= 1e-6


def test_problem_round_trip(tmp_path):
    p = pdcontact.gen("example2", 1, mu=0.8)
    assert p.m == 2
    assert p.mu == 0.8
    path = tmp_path / "p.json"
    pdcontact.write_problem(path, p)
    q = pdcontact.read_problem(path)
    assert q.hash() == p.hash()
    assert json.loads(q.to_json())["format"] == "pdcontact-problem"
    assert pdcontact.Problem.from_json(p.to_json()).hash() == p.hash()
    with pytest.raises(ValueError):
        pdcontact.Problem.from_json("{}")
    pdcontact.export_soclcp(p, tmp_path / "soclcp")
    assert (tmp_path / "soclcp" / "M22.mtx").exists()


def test_bad_arguments():
    with pytest.raises(ValueError):
        pdcontact.gen("example1", 3)
    with pytest.raises(ValueError):
        pdcontact.gen("example9", 2)
