import os
from fractions import Fraction
from pathlib import Path

import pytest

import vpiso

INSTANCES = Path(os.environ.get("VPISO_INSTANCE_DIR", Path(__file__).resolve().parents[2] / "instances"))


def read(name):
    return (INSTANCES / name).read_text()


def test_log_exp_roundtrip():
    m = [[1, 2, 3], [0, 1, 4], [0, 0, 1]]
    log = vpiso.unipotent_log(m)
    assert log[0][2] == Fraction(-1)  # 3 - 2*4/2
    assert vpiso.nilpotent_exp(log) == [[Fraction(x) for x in row] for row in m]


def test_bch_heisenberg():
    x = [[0, 1, 0], [0, 0, 0], [0, 0, 0]]
    y = [[0, 0, 0], [0, 0, 1], [0, 0, 0]]
    z = vpiso.bch(x, y)
    assert z[0][1] == 1 and z[1][2] == 1 and z[0][2] == Fraction(1, 2)


def test_smith_invariants():
    assert vpiso.smith_invariants([[2, 0], [0, 4]]) == (0, [2, 4])
    assert vpiso.smith_invariants([[6, 4]]) == (1, [2])


def test_parse_and_errors():
    summary = vpiso.parse_instance(read("heisenberg_self.vpiso"))
    assert summary["G"]["hirsch_rank"] == 3
    with pytest.raises(vpiso.InstanceError):
        vpiso.parse_instance("vpiso v1\n[G]\nn = 2\n")
    with pytest.raises(ValueError):
        vpiso.local_solvability("not a system")


def test_self_instance_positive():
    text = read("heisenberg_self.vpiso")
    dio = vpiso.build_system(text)
    assert sum(1 for line in dio.splitlines() if line.startswith("var ")) == 56
    verdict = vpiso.decide(text)
    assert verdict["verdict"] == "ProfinitelyIsomorphic"
    assert verdict["positive"]["local"]["overall"] == "LocallySolvableOnSet"


def test_negative_pair():
    text = read("n2_vs_n4.vpiso")
    verdict = vpiso.decide(text)
    assert verdict["verdict"] == "NotProfinitelyIsomorphic"
    assert verdict["negative"]["kind"] == "abelianization"
    lie = vpiso.build_system(text, lie=True)
    report = vpiso.local_solvability(lie, primes=[2], max_level=4)
    assert report["overall"] == "NotLocallySolvable"
    assert report["verdicts"][0]["level"] == 2


def test_hensel_and_enumeration():
    dio = "dio v1\nmeta n=0 nprime=0 r=0 rprime=0 d=0 s=0 good=1\nvar x\npoly e3: x^2 - 2\n"
    points, truncated, _ = vpiso.solutions_mod(dio, 7, 2)
    assert not truncated
    assert sorted(p[0] for p in points) == sorted(x for x in range(49) if (x * x - 2) % 49 == 0)
    report = vpiso.local_solvability(dio, primes=[5, 7])
    assert [v["status"] for v in report["verdicts"]] == ["CertifiedUnsolvable", "CertifiedSolvable"]
    assert vpiso.residuals_vanish(dio.replace("x^2 - 2", "x^2 - 4"), [2])


def test_fingerprint_matches_between_sides():
    text = read("heisenberg_self.vpiso")
    assert vpiso.fingerprint(text, "G", [2, 3]) == vpiso.fingerprint(text, "Gdag", [2, 3])
