import json
from fractions import Fraction

import bidfair_py as bf


def test_instance_round_trip():
    inst = bf.Instance.random(4, 3, 5)
    assert (inst.n, inst.m) == (3, 5)
    again = bf.Instance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    assert sum(Fraction(b) for b in inst.entitlements()) == 1


def test_single_agent_gets_everything():
    inst = bf.Instance.random(9, 1, 4)
    assert inst.aps(0) == inst.mms(0)


def test_play_meets_the_guarantee_and_reverifies():
    inst = bf.Instance.random(2, 3, 6)
    report = inst.play(seed=5, random_ties=True)
    doc = json.loads(report)
    assert all(row["pass"] for row in doc["guarantee"])
    assert bf.verify_report(report)
    doc["transcript"]["rounds"][0]["payment"] = "1000/1"
    try:
        bf.verify_report(json.dumps(doc))
    except ValueError:
        pass
    else:
        raise AssertionError("tampered report accepted")


def test_allocate_partitions_items():
    inst = bf.Instance.random(7, 3, 5)
    bundles = inst.allocate("1/10")
    items = [e for b in bundles.values() for e in b]
    assert len(items) == len(set(items)) and set(items) <= set(range(5))


def test_lp_certificate():
    status, mult = bf.lp_certificate("27/10", 100)
    assert status == "infeasible" and len(mult) == 4
    status, _ = bf.lp_certificate("51/20")
    assert status == "feasible"
    assert bf.proportional_rho("1/2") == "1/2"
