from fractions import Fraction
import math

import pytest

import assouad

CANTOR = {"type": "cantor_ifs", "preset": "middle_third"}
UNIFORM = {"kind": "weighted", "tree": {"coding": "cantor", "depth": 8}, "rule": {"name": "uniform"}}


def test_cantor_set_dimension():
    est = assouad.set_dimension(CANTOR, "upper", depth=10)
    assert abs(est["value"] - math.log(2) / math.log(3)) < 0.02
    assert est["infinite"] is False
    assert est["window"]["base"] == "1/3"


def test_uniform_measure_ball_mass_is_exact():
    lo, hi = assouad.ball_mass(UNIFORM, "0", "1/2")
    assert lo == hi == Fraction(1, 2)


def test_measure_dimension_and_doubling():
    up = assouad.measure_dimension(UNIFORM, "upper")
    assert abs(up["value"] - 0.6309) < 0.02
    assert assouad.doubling_check(UNIFORM)["infinite"] is False


def test_tree_verifies():
    t = assouad.build_tree({"set": {"type": "points", "points": ["0", "1/2"]}, "s": "1/4", "depth": 4})
    assert t["verify"]["all_pass"] is True
    assert t["level_sizes"][0] >= 1


def test_synthesis_weights_sum_per_group():
    r = assouad.synthesize({"kind": "weighted",
                            "tree": {"set": CANTOR, "s": "1/9", "depth": 4},
                            "rule": {"name": "upper", "D": "6/5", "epsilon": "1/4"}})
    assert r["manifest"]["strategy"] == "longbdy"
    assert r["manifest"]["a"] == r["manifest"]["min_weight"]
    # Children of the root are the next four weights in level order.
    assert sum(Fraction(w) for w in r["weights"][1:5]) == 1


def test_classifier():
    m = {"kind": "discrete", "sequence": {"type": "double_exp", "alpha": "1/2", "M": 2},
         "profile": {"type": "telescoping"}}
    assert assouad.classify(m)["case"] == "CaseI"
    with pytest.raises(assouad.InconclusiveError):
        assouad.classify(m, last=2)


def test_errors_map_to_exception_types():
    with pytest.raises(assouad.DomainError):
        assouad.set_dimension({"type": "nope"})
    with pytest.raises(assouad.DomainError):
        assouad.set_dimension("{not json")
    with pytest.raises(assouad.DomainError, match="D must exceed upper Assouad estimate"):
        assouad.synthesize({"kind": "weighted", "tree": {"set": CANTOR, "s": "1/9", "depth": 4},
                            "rule": {"name": "upper", "D": "1/2", "epsilon": "1/10"}})
    assert issubclass(assouad.DomainError, assouad.AssouadError)


def test_acceptance_subset_is_deterministic():
    a = assouad.accept(only=[9])
    assert a == assouad.accept(only=[9])
    assert a["all_pass"] is True
    assert [c["id"] for c in a["criteria"]] == [9]
