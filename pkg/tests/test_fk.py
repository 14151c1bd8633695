import numpy as np
import pytest

from diffuselab.errors import (
    InvalidParameterError,
    SimulationError,
    StateOverflowError,
)
from diffuselab.fieldexpr import FieldSpec, parse
from diffuselab.fk import FkQuery, fk_estimate, fk_weighted_payoffs
from diffuselab.pde import solve_backward_fk

BM = FieldSpec.from_strings(["0"], ["1"])
OU = FieldSpec.from_strings(["-x"], ["1"])


def query(**kw):
    args = dict(
        fields=BM, potential=parse("0"), payoff=parse("1"),
        x=[0.0], T=1.0, n_paths=200, n_steps=8, seed=0,
    )
    args.update(kw)
    return FkQuery(**args)


def test_zero_potential_unit_payoff_is_exactly_one():
    vals = fk_weighted_payoffs(query())
    assert np.array_equal(vals, np.ones(200))
    est = fk_estimate(query())
    assert est.mean == 1.0
    assert est.stderr == 0.0
    assert est.n_samples == 200


def test_constant_potential_scales_every_path():
    # dt = 0.125 and c = 0.5 are dyadic, so the exponent accumulates exactly
    plain = fk_weighted_payoffs(query(payoff=parse("exp(-x^2)")))
    weighted = fk_weighted_payoffs(query(payoff=parse("exp(-x^2)"), potential=parse("0.5")))
    np.testing.assert_allclose(weighted, np.exp(-0.5) * plain, rtol=1e-12)
    est = fk_estimate(query(potential=parse("0.5")))
    # all 200 path values are bit-identical; averaging costs at most an ulp
    assert est.mean == pytest.approx(float(np.exp(-0.5)), rel=5e-16)
    assert est.stderr <= 1e-15


def test_time_dependent_potential_with_offset_start():
    # V = t from t0 = 1 to T = 2 in 4 steps: sum of left endpoints times dt
    # is (1 + 1.25 + 1.5 + 1.75) / 4 = 1.375, all values dyadic
    q = query(potential=parse("t"), t0=1.0, T=2.0, n_steps=4)
    vals = fk_weighted_payoffs(q)
    assert np.all(vals == np.exp(-1.375))


def test_path_for_path_reproducibility_and_block_invariance():
    q = query(fields=OU, potential=parse("0.1*x^2"), payoff=parse("exp(-x^2)"), n_paths=100)
    a = fk_weighted_payoffs(q)
    b = fk_weighted_payoffs(q, block_paths=7)
    assert np.array_equal(a, b)


def test_brownian_second_moment():
    est = fk_estimate(query(payoff=parse("x^2"), n_paths=20_000, n_steps=50, seed=3))
    assert abs(est.mean - 1.0) <= 4.0 * est.stderr
    assert est.stderr < 0.02


def test_matches_backward_solver_on_ou_with_quadratic_potential():
    fields = OU
    potential, payoff = parse("0.5*x^2"), parse("exp(-x^2)")
    probe = 0.5
    q = FkQuery(
        fields=fields, potential=potential, payoff=payoff,
        x=[probe], T=1.0, n_paths=20_000, n_steps=100, seed=11,
    )
    est = fk_estimate(q)
    # grid chosen so the probe lands exactly on a cell center
    sol = solve_backward_fk(
        fields, potential, payoff, T=1.0, n_t=500,
        lo=[-6.01], hi=[5.99], n_cells=[600],
    )
    xs = sol.grid.centers(0)
    idx = int(np.argmin(np.abs(xs - probe)))
    assert abs(xs[idx] - probe) < 1e-12
    assert abs(est.mean - sol.grid.values[idx]) <= 4.0 * est.stderr + 0.01


def test_payoff_domain_error_reports_path():
    with pytest.raises(SimulationError) as exc:
        fk_weighted_payoffs(query(payoff=parse("log(x)"), n_paths=50))
    assert "payoff" in str(exc.value)
    assert exc.value.step == 8  # after the last step
    assert exc.value.path_id is not None


def test_potential_domain_error_reports_step_zero():
    with pytest.raises(SimulationError) as exc:
        fk_weighted_payoffs(query(potential=parse("1/x"), n_paths=10))
    assert "potential" in str(exc.value)
    assert exc.value.step == 0
    assert exc.value.path_id == 0


def test_exploding_drift_aborts():
    fields = FieldSpec.from_strings(["x*x"], ["0"])
    with pytest.raises(StateOverflowError):
        fk_weighted_payoffs(query(fields=fields, x=[2.0], T=1.0, n_steps=20, n_paths=4))


def test_query_validation():
    with pytest.raises(InvalidParameterError):
        query(x=[0.0, 0.0])
    with pytest.raises(InvalidParameterError):
        query(T=0.0, t0=0.0)
    with pytest.raises(InvalidParameterError):
        query(T=1.0, t0=2.0)
    with pytest.raises(InvalidParameterError):
        query(n_paths=1)
    with pytest.raises(InvalidParameterError):
        query(n_steps=0)
