import numpy as np

from selinv import verify


def test_small_suite_passes():
    results = verify.run_suite(n_max=4, cases=5, seed=3)
    assert results and all(r.passed for r in results)


def test_result_records_first_counterexample():
    r = verify.PropertyResult("demo")
    r.record(True, 1e-16)
    r.record(False, 0.5, "first")
    r.record(False, 0.1, "second")
    assert not r.passed
    assert r.counterexample == "first" and r.violations == 2
    assert r.line().startswith("FAIL") and "first" in r.line()


def test_empty_result_is_not_a_pass():
    assert not verify.PropertyResult("nothing").passed


def test_structure_check_catches_non_triangular():
    assert verify._is_upper(np.triu(np.ones((3, 3))))
    assert not verify._is_upper(np.ones((3, 3)))
    assert verify._is_lower(np.tril(np.ones((3, 3))))
