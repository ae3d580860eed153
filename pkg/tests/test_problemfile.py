"""
问题文件测试
Problem-file tests

- 解析、规范化（合并重复项、分级字典序）与错误定位
- 规范序列化与摘要
- 各 kind 到领域对象的转换，鲁棒文件的等价改写
"""

import json

import pytest

from src.dualgen import MinimaxProblem, RationalMinimaxProblem, RobustProblem
from src.exceptions import InputError
from src.problemfile import counterpart_file, digest, load, parse, serialize, to_problem
from tests.conftest import PROBLEMS

EXAMPLE = {
    "kind": "minimax",
    "dimension": 1,
    "objectives": [
        [{"c": 2.0, "p": [4]}, {"c": -1.0, "p": [1]}],
        [{"c": 5.0, "p": [2]}, {"c": 1.0, "p": [1]}],
    ],
    "constraints": [[{"c": -1.0, "p": [1]}, {"c": -2.0, "p": [0]}]],
}


def _doc(**update):
    doc = json.loads(json.dumps(EXAMPLE))
    doc.update(update)
    return doc


def test_parse_minimax():
    pf = parse(json.dumps(EXAMPLE))
    P = to_problem(pf)
    assert isinstance(P, MinimaxProblem)
    assert (P.r, P.m, P.degree_bound) == (2, 1, 4)
    assert P.max_objective([0.0]) == 0.0


def test_load_bundled_file():
    pf = load(PROBLEMS / "quartic_pair.json")
    assert pf.name == "quartic-pair"
    assert to_problem(pf).r == 2


def test_missing_file():
    with pytest.raises(InputError, match="not found"):
        load(PROBLEMS / "nope.json")


def test_empty_objectives():
    with pytest.raises(InputError) as ei:
        parse(json.dumps(_doc(objectives=[])))
    assert ei.value.location == "objectives"


def test_exponent_length_mismatch_location():
    doc = _doc(dimension=2, objectives=[[{"c": 1.0, "p": [2, 0]}, {"c": 1.0, "p": [0, 2]}, {"c": 1.0, "p": [1, 1, 0]}]])
    doc["constraints"] = []
    with pytest.raises(InputError) as ei:
        parse(json.dumps(doc))
    assert ei.value.location == "objectives.0.2.p"


def test_unknown_kind():
    with pytest.raises(InputError) as ei:
        parse(json.dumps(_doc(kind="semi-infinite")))
    assert ei.value.location == "kind"


def test_negative_exponent_rejected():
    with pytest.raises(InputError) as ei:
        parse(json.dumps(_doc(objectives=[[{"c": 1.0, "p": [-1]}]])))
    assert ei.value.location == "objectives.0.0.p.0"


def test_nan_coefficient_rejected():
    text = json.dumps(EXAMPLE).replace('"c": 5.0', '"c": NaN')
    with pytest.raises(InputError) as ei:
        parse(text)
    assert ei.value.location == "objectives.1.0.c"


def test_unknown_field_rejected():
    with pytest.raises(InputError):
        parse(json.dumps(_doc(weights=[1, 2])))


def test_malformed_json_reports_position():
    with pytest.raises(InputError) as ei:
        parse('{"kind": "minimax",\n "dimension": }')
    assert ei.value.location.startswith("line 2 column")


def test_yaml_accepted():
    text = """
kind: minimax
dimension: 1
objectives:
  - [{c: 1.0, p: [2]}]
"""
    P = to_problem(parse(text))
    assert P.max_objective([3.0]) == 9.0


def test_duplicates_summed_and_sorted():
    doc = _doc(objectives=[[{"c": 1.0, "p": [1]}, {"c": 2.0, "p": [4]}, {"c": 1.5, "p": [1]}, {"c": 0.0, "p": [2]}]])
    pf = parse(json.dumps(doc))
    assert [(t.c, t.p) for t in pf.objectives[0]] == [(2.5, [1]), (2.0, [4])]


def test_serialize_is_canonical():
    pf = parse(json.dumps(EXAMPLE))
    text = serialize(pf)
    assert parse(text) == pf
    assert serialize(parse(text)) == text
    assert " " not in text
    # 键顺序与空白不影响摘要
    shuffled = json.dumps(dict(reversed(list(EXAMPLE.items()))), indent=4)
    assert digest(parse(shuffled)) == digest(pf)
    assert len(digest(pf)) == 64


def test_box_length_checked():
    with pytest.raises(InputError) as ei:
        parse(json.dumps(_doc(box=[[-1, 1], [-1, 1]])))
    assert ei.value.location == "box"
    assert parse(json.dumps(_doc(box=[-3, 3]))).box == (-3.0, 3.0)


def test_fractional_kind():
    pf = load(PROBLEMS / "frac_quadratic.json")
    P = to_problem(pf)
    assert isinstance(P, RationalMinimaxProblem)
    assert P.denominator([1.0]) == 3.0


def test_fractional_needs_denominator():
    with pytest.raises(InputError) as ei:
        parse(json.dumps(_doc(kind="fractional")))
    assert ei.value.location == "denominator"


def test_minimax_rejects_denominator():
    with pytest.raises(InputError):
        parse(json.dumps(_doc(denominator=[{"c": 1.0, "p": [0]}])))


def test_linear_fractional_must_be_affine():
    doc = _doc(kind="linear-fractional", denominator=[{"c": 1.0, "p": [0]}])
    with pytest.raises(InputError) as ei:
        parse(json.dumps(doc))
    assert ei.value.location == "objectives.0"
    assert isinstance(to_problem(load(PROBLEMS / "linfrac.json")), RationalMinimaxProblem)


def test_robust_finite_file():
    pf = load(PROBLEMS / "robust_two_scenario.yml")
    U = to_problem(pf)
    assert isinstance(U, RobustProblem)
    assert U.mode == "finite"
    assert len(U.objective) == 2
    assert [len(s) for s in U.constraints] == [2]


def test_robust_polytopic_file():
    U = to_problem(load(PROBLEMS / "robust_polytopic.json"))
    assert U.mode == "polytopic"
    assert U.dimension == 1


def test_robust_vertex_length_checked():
    doc = {
        "kind": "robust",
        "dimension": 1,
        "scenarios": {
            "mode": "polytopic",
            "objective": {"template": [{"c": 1.0, "p": [2, 0]}, {"c": 1.0, "p": [1, 1]}], "vertices": [[1.0], [-1.0, 0.0]]},
        },
    }
    with pytest.raises(InputError) as ei:
        parse(json.dumps(doc))
    assert ei.value.location == "scenarios.objective.vertices.1"


def test_robust_finite_needs_scenarios():
    doc = {"kind": "robust", "dimension": 1, "scenarios": {"mode": "finite", "objective": {"scenarios": []}}}
    with pytest.raises(InputError) as ei:
        parse(json.dumps(doc))
    assert ei.value.location == "scenarios.objective.scenarios"


def test_counterpart_file():
    cf = counterpart_file(load(PROBLEMS / "robust_two_scenario.yml"))
    assert cf.kind == "minimax"
    P = to_problem(cf)
    assert (P.r, P.m) == (2, 2)
    assert parse(serialize(cf)) == cf


def test_counterpart_requires_robust_kind():
    with pytest.raises(InputError):
        counterpart_file(parse(json.dumps(EXAMPLE)))
