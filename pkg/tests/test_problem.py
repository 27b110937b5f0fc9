import json

import numpy as np
import pytest

from metaequiv import problem
from metaequiv.errors import AssumptionA2Violated


def test_generate_round_trip(tmp_path):
    p = problem.generate(3, 7)
    path = tmp_path / "p.json"
    problem.dump(p, path)
    q = problem.load(path)
    for name in ("v1", "v2", "c", "omega", "b1", "b2"):
        np.testing.assert_array_equal(getattr(p, name), getattr(q, name))
    assert q.seed == 7 and q.dim == 3
    assert problem.dumps(q) == path.read_text()
    q.to_spec()


def test_defaults():
    p = problem.from_dict({"dim": 1, "v1": [[2]], "v2": [[1]], "c": [[0.5]]})
    np.testing.assert_array_equal(p.omega, [[1.0]])
    np.testing.assert_array_equal(p.b1, [0.0])
    assert p.seed is None
    assert "seed" not in p.to_dict()


@pytest.mark.parametrize(
    "data,path",
    [
        ({"v1": [[1]]}, "$.dim"),
        ({"dim": 0}, "$.dim"),
        ({"dim": 1, "v2": [[1]], "c": [[0]]}, "$.v1"),
        ({"dim": 2, "v1": [[1]], "v2": [[1]], "c": [[0]]}, "$.v1"),
        ({"dim": 1, "v1": [[1]], "v2": [["x"]], "c": [[0]]}, "$.v2"),
        ({"dim": 1, "v1": [[1]], "v2": [[1]], "c": [[0]], "b2": [1, 2]}, "$.b2"),
        ({"dim": 1, "v1": [[1]], "v2": [[1]], "c": [[0]], "seed": 1.5}, "$.seed"),
    ],
)
def test_parse_errors_carry_path(data, path):
    with pytest.raises(problem.ProblemError) as info:
        problem.from_dict(data)
    assert info.value.path == path
    assert str(info.value).startswith(path)


def test_invalid_json():
    with pytest.raises(problem.ProblemError):
        problem.loads("{not json")


def test_singular_problem_fails_validation():
    p = problem.loads(json.dumps({"dim": 1, "v1": [[2]], "v2": [[1]], "c": [[2 ** 0.5]]}))
    with pytest.raises(AssumptionA2Violated):
        p.to_spec()
