import pytest

from warpgeo import verify as vf

CHECKS = [c.name for c in vf.REGISTRY]


@pytest.mark.parametrize("name", CHECKS)
def test_check_passes_at_default_seed(name):
    (chk,) = [c for c in vf.REGISTRY if c.name == name]
    res = vf.run_check(chk, vf.VerifyContext())
    assert res.passed, (res.residual, res.tol, res.error, res.detail)


def test_every_criterion_has_checks():
    covered = {c.criterion for c in vf.REGISTRY if c.criterion is not None}
    assert covered == set(range(1, 10))


def test_hat_sign_mutation_is_caught():
    (chk,) = vf.select("pairs.hat_consistency")
    assert vf.run_check(chk, vf.VerifyContext()).passed
    assert not vf.run_check(chk, vf.VerifyContext(hat_sign=-1.0)).passed


def test_tolerance_override_fails_loudly():
    (chk,) = vf.select("csc.fd_oracle")
    res = vf.run_check(chk, vf.VerifyContext(tol=1e-14))
    assert not res.passed and res.residual > 1e-14


def test_seeds_are_reproducible_and_thread_independent():
    a = vf.run_suite(vf.VerifyContext(seed=7), only="geodesics", threads=1)
    b = vf.run_suite(vf.VerifyContext(seed=7), only="geodesics", threads=4)
    assert [(r.name, r.residual) for r in a] == [(r.name, r.residual) for r in b]


def test_crashing_check_counts_as_failure():
    chk = vf.Check("tmp.crash", "tmp", lambda ctx, tol: 1 / 0, 1.0)
    res = vf.run_check(chk, vf.VerifyContext())
    assert not res.passed and "ZeroDivisionError" in res.error
