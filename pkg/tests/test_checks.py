"""Battery plumbing: scaling, report shape, reproducibility."""

import json

from abelmod.checks import SCHEMA, _count, run_all


class TestScaling:
    def test_reference_scale_is_identity(self):
        assert _count(500, 1000) == 1000
        assert _count(500, 300) == 300

    def test_proportional_and_floored(self):
        assert _count(50, 1000) == 100
        assert _count(1, 300) == 2  # floor keeps every criterion alive


class TestReport:
    def test_shape_and_schema(self):
        rep = run_all(samples=4, seed=3, n_max=4, d_max=2)
        assert rep["schema"] == SCHEMA
        assert [r["criterion"] for r in rep["criteria"]] == list(range(1, 10))
        for r in rep["criteria"]:
            assert set(r) == {"criterion", "name", "pass", "detail"}

    def test_seed_reproducible_bytes(self):
        a = run_all(samples=4, seed=9, n_max=4, d_max=2)
        b = run_all(samples=4, seed=9, n_max=4, d_max=2)
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_different_seeds_differ(self):
        a = run_all(samples=4, seed=1, n_max=4, d_max=2)
        b = run_all(samples=4, seed=2, n_max=4, d_max=2)
        assert json.dumps(a, sort_keys=True) != json.dumps(b, sort_keys=True)
