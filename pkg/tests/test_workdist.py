from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from conftest import random_process
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldwork import qsys, workdist
from fieldwork.errors import DegenerateBasisWarning, UnsupportedMomentError, ValidationError
from fieldwork.workdist import Kind

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 5)
ALL = list(Kind)
TRACE_KINDS = [Kind.RS, Kind.ATMH, Kind.FCS]


@given(seeds, dims)
@settings(max_examples=30)
def test_every_distribution_is_normalised(seed, d):
    p = random_process(np.random.default_rng(seed), d)
    for kind in ALL:
        assert abs(workdist.distribution(p, kind).total() - 1) < 1e-12


@given(seeds, dims)
@settings(max_examples=30)
def test_distribution_reproduces_trace_char(seed, d):
    p = random_process(np.random.default_rng(seed), d)
    mu = np.linspace(-4, 4, 17)
    for kind in TRACE_KINDS:
        direct = workdist.char(p, kind, mu)
        from_support = workdist.distribution(p, kind).char(mu)
        assert np.max(np.abs(direct - from_support)) < 1e-12


@given(seeds, dims, st.integers(1, 4))
@settings(max_examples=30)
def test_moment_traces_match_support(seed, d, j):
    p = random_process(np.random.default_rng(seed), d)
    for kind in ALL:
        assert abs(workdist.moments(p, kind, j) - workdist.distribution(p, kind).moment(j)) < 1e-10


def test_unsupported_moment():
    p = random_process(np.random.default_rng(0), 2)
    with pytest.raises(UnsupportedMomentError):
        workdist.moments(p, Kind.RS, 5)


@given(seeds, dims)
@settings(max_examples=25)
def test_margenau_hill_is_real_part(seed, d):
    p = random_process(np.random.default_rng(seed), d)
    rs = workdist.dist_rs(p)
    mh = workdist.dist_atmh(p)
    assert np.allclose(rs.values, mh.values)
    assert np.allclose(rs.weights.real, mh.weights, atol=1e-15)
    assert mh.is_real()


@given(seeds, dims)
@settings(max_examples=25)
def test_fcs_weights_real_and_tpm_nonnegative(seed, d):
    p = random_process(np.random.default_rng(seed), d)
    assert workdist.dist_fcs(p).is_real(1e-12)
    tpm = workdist.dist_tpm(p)
    assert tpm.is_real(1e-15) and np.all(tpm.weights.real >= -1e-15)


@given(seeds, dims, st.floats(0.1, 5.0))
@settings(max_examples=25)
def test_all_coincide_on_diagonal_states(seed, d, beta):
    p = random_process(np.random.default_rng(seed), d, beta=beta)
    mu = np.linspace(-5, 5, 11)
    tpm = workdist.dist_tpm(p).char(mu)
    for kind in TRACE_KINDS:
        assert np.max(np.abs(workdist.char(p, kind, mu) - tpm)) < 1e-12


@given(seeds, dims)
@settings(max_examples=30)
def test_first_law(seed, d):
    p = random_process(np.random.default_rng(seed), d)
    for kind in (Kind.ATMH, Kind.FCS):
        r = workdist.first_law_report(p, kind)
        assert abs(r.mean_gap) < 1e-10 and abs(r.var_gap) < 1e-10
    r = workdist.first_law_report(p, Kind.RS)
    assert abs(r.mean_gap) < 1e-10
    assert abs(r.var_gap - r.commutator_expectation) < 1e-10
    assert abs(r.var_gap.real) < 1e-10


@given(seeds, dims, st.sampled_from([0.2, 1.0, 5.0]))
@settings(max_examples=30)
def test_crooks_general_process(seed, d, beta):
    rng = np.random.default_rng(seed)
    h0, h1, u = qsys.random_hermitian(d, rng), qsys.random_hermitian(d, rng), qsys.random_unitary(d, rng)
    assert workdist.crooks_check(h0, h1, u, beta, np.linspace(-5, 5, 21)) < 1e-10


def test_crooks_rejects_nonpositive_beta():
    h = qsys.HermitianOperator(qsys.SIGMA_Z)
    with pytest.raises(ValidationError):
        workdist.crooks_check(h, h, qsys.UnitaryOperator.identity(2), 0.0, [0.0])


@given(seeds, dims, st.floats(0.1, 5.0))
@settings(max_examples=30)
def test_jarzynski_all_work_kinds(seed, d, beta):
    p = random_process(np.random.default_rng(seed), d, beta=beta)
    target = qsys.partition_ratio(p.htau, p.h0, beta)
    for kind in (Kind.RS, Kind.ATMH, Kind.FCS, Kind.TPM):
        assert abs(workdist.jarzynski_value(p, beta, kind) - target) < 1e-10


def test_jarzynski_needs_thermal_state():
    p = random_process(np.random.default_rng(3), 3)
    with pytest.raises(ValidationError):
        workdist.jarzynski_value(p, 1.0)


@pytest.mark.parametrize("beta_eps", [0.3, math.log(2), 2.0])
def test_independent_measurement_energy_change_breaks_jarzynski(beta_eps):
    eps = 1.3
    beta = beta_eps / eps
    h = qsys.HermitianOperator.diagonal([0.0, eps])
    p = qsys.ProcessSpec(qsys.gibbs(h, beta), h, h, qsys.UnitaryOperator.identity(2))
    val = workdist.jarzynski_value(p, beta, Kind.DU_CONV)
    x = math.exp(-beta * eps)
    assert abs(val - 2 * (1 + x * x) / (1 + x) ** 2) < 1e-12


@given(seeds, dims)
@settings(max_examples=25)
def test_variance_relation(seed, d):
    p = random_process(np.random.default_rng(seed), d)
    assert workdist.du_variance_relation_check(p) < 1e-10


@given(seeds, dims)
@settings(max_examples=20)
def test_du_operator_distribution(seed, d):
    p = random_process(np.random.default_rng(seed), d)
    op = workdist.du_operator(p)
    dist = workdist.dist_du_op(p)
    assert abs(dist.moment(1) - np.trace(p.rho.matrix @ op.matrix)) < 1e-12
    assert np.all(np.isin(np.round(dist.values, 9), np.round(op.eigenvalues, 9)))


def test_tpm_paths_differ_with_equal_final_states():
    h = qsys.HermitianOperator.diagonal([0.0, 1.0])
    rho = qsys.DensityMatrix.maximally_mixed(2)
    a = qsys.ProcessSpec(rho, h, h, qsys.UnitaryOperator.identity(2))
    b = qsys.ProcessSpec(rho, h, h, qsys.UnitaryOperator(qsys.SIGMA_X))
    da, db = workdist.dist_tpm(a).pruned(), workdist.dist_tpm(b).pruned()
    assert list(da) == [(0.0, 1.0)]
    assert [(v, w.real) for v, w in db] == [(-1.0, 0.5), (1.0, 0.5)]


def test_degenerate_spectrum_warns():
    h = qsys.HermitianOperator.diagonal([0.0, 0.0, 1.0])
    p = qsys.ProcessSpec(qsys.DensityMatrix.maximally_mixed(3), h, h, qsys.UnitaryOperator.identity(3))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        workdist.dist_rs(p)
    assert any(issubclass(r.category, DegenerateBasisWarning) for r in rec)


def test_degenerate_levels_are_merged():
    h = qsys.HermitianOperator.diagonal([0.0, 0.0, 1.0])
    p = qsys.ProcessSpec(qsys.DensityMatrix.maximally_mixed(3), h, h, qsys.UnitaryOperator.identity(3))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBasisWarning)
        d = workdist.dist_tpm(p).pruned()
    assert list(d) == [(0.0, 1.0)]


def test_scan_shape_and_origin():
    p = random_process(np.random.default_rng(5), 3)
    sc = workdist.scan(p, np.linspace(-1, 1, 5))
    assert sc.values.shape == (5,)
    assert abs(sc.values[2] - 1) < 1e-14
