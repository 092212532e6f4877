from cogs.bench import average_feature_values, run_bench, synthetic_variant
from cogs.inference import decision
from cogs.planner import PlanConfig
from cogs.schema import load_schema


def test_average_feature_values():
    schema = load_schema("feature a: categorical {p, q}.\nfeature b: categorical {p, q, r}.\n"
                         "feature n: numeric [0,9] step 1.")
    assert average_feature_values(schema) == 2.5
    assert average_feature_values(load_schema("feature n: numeric [0,9] step 1.")) is None


def test_synthetic_variant_shape():
    v = synthetic_variant([2, 3, 3])
    assert average_feature_values(v.schema) == 8 / 3
    assert decision(v.Q, v.instance)
    goal = v.schema.state({f.name: f.domain.values[-1] for f in v.schema})
    assert not decision(v.Q, goal)


def test_every_feature_must_move():
    rows = run_bench([synthetic_variant([2, 2, 3])], 2, PlanConfig(minimal=True))
    (row,) = rows
    assert row.path_len == 4 and len(row.times) == 2 and row.std_s >= 0


def test_zero_reps_is_empty():
    assert run_bench([synthetic_variant([2])], 0, PlanConfig()) == []
