"""Verifier oracles: replay checks, form predicates, mutation detection."""

import pytest

from turrittin.errors import PrecisionError
from turrittin.field import FieldElement, RATIONALS
from turrittin.jets import LaurentJet
from turrittin.matrix import Matrix
from turrittin.poly import FieldPolynomial
from turrittin.rationals import QQ
from turrittin.systems import (
    SystemJet,
    TransformChain,
    constant_step,
    gauge_transform,
    monomial_step,
    polynomial_step,
    ramification_step,
    replay,
)
from turrittin.verify import check_form, check_gauge_chain, invariants_report


def q(v):
    return FieldElement.of(QQ(v))


def M(rows):
    return Matrix([[q(v) for v in row] for row in rows])


def system_of(valuation, matrices, order=None):
    return SystemJet.from_coefficients(
        RATIONALS, valuation, [M(rows) for rows in matrices], order
    )


def test_empty_chain_passes():
    a = system_of(-2, [[[1, 2], [3, 4]]], order=1)
    report = check_gauge_chain(a, TransformChain(), a)
    assert report.all_pass


def test_single_step_definitional():
    a = system_of(-2, [[[1, 2], [3, 4]], [[1, 0], [0, 1]]], order=2)
    p = Matrix(
        [
            [FieldPolynomial.from_scalars([1, 1]), FieldPolynomial.from_scalars([0])],
            [FieldPolynomial.from_scalars([2]), FieldPolynomial.from_scalars([1])],
        ]
    )
    step = polynomial_step(p)
    claimed = gauge_transform(a, step)
    report = check_gauge_chain(a, TransformChain([step]), claimed)
    assert report.all_pass


def test_mixed_chain_with_ramification():
    a = system_of(-2, [[[0, 1], [1, 0]], [[1, 1], [0, 1]]], order=3)
    chain = TransformChain(
        [
            ramification_step(2),
            constant_step(M([[1, 1], [0, 1]])),
            monomial_step([0, 1]),
        ]
    )
    claimed = replay(a, chain)
    report = check_gauge_chain(a, chain, claimed)
    assert report.all_pass


def test_perturbed_claim_fails_with_witness():
    a = system_of(-2, [[[1, 2], [3, 4]], [[1, 0], [0, 1]]], order=2)
    step = constant_step(M([[1, 1], [0, 1]]))
    claimed = gauge_transform(a, step)
    rows = [list(r) for r in claimed.entries]
    rows[0][1] = rows[0][1] + LaurentJet.monomial(q(1), -1)
    tampered = SystemJet(claimed.field, rows, claimed.order)
    report = check_gauge_chain(a, TransformChain([step]), tampered)
    assert not report.all_pass
    name, ok, witness = report.checks[-1]
    assert name == "replay-matches-claimed" and not ok
    assert "degree -1" in witness


def test_check_form_first_kind():
    a = system_of(-1, [[[1, 2], [3, 4]]], order=2)
    assert check_form(a, "trs", 0, 0).all_pass


def test_check_form_commutation_failure():
    # D = diag(1,2), C with nonzero off-diagonal: [D,C] != 0
    a = system_of(-2, [[[1, 0], [0, 2]], [[0, 1], [0, 0]]], order=2)
    report = check_form(a, "trs", 1, 0)
    assert not report.all_pass
    assert any(name == "commutation" and not ok for name, ok, _ in report.checks)


def test_check_form_radial_commutes_trivially():
    a = system_of(-2, [[[1, 0], [0, 1]], [[5, 7], [1, 2]]], order=2)
    assert check_form(a, "trs", 1, 0).all_pass


def test_check_form_degree_tail():
    zero = [[0, 0], [0, 0]]
    mats = [[[1, 0], [0, 2]], zero, zero, zero, [[0, 1], [0, 0]]]
    a = system_of(-2, mats, order=-2 + 5)
    assert check_form(a, "trs", 1, 2).all_pass
    report = check_form(a, "trs", 1, 3)
    assert not report.all_pass


def test_check_form_rtrs():
    # Theta(i) head with commuting Theta residual
    mats = [[[0, -1], [1, 0]], [[3, -4], [4, 3]]]
    a = system_of(-2, mats, order=0)
    assert check_form(a, "rtrs", 1, 0).all_pass
    # real coordinate after a pair: not canonical
    mats3 = [
        [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    ]
    b = system_of(-2, mats3, order=0)
    report = check_form(b, "rtrs", 1, 0)
    assert not report.all_pass


def test_invariants_report():
    a = system_of(-3, [[[1, 0], [0, 1]], [[2, 0], [0, 2]], [[0, 1], [0, 0]]], order=1)
    report = invariants_report(a)
    values = {name: witness for name, _, witness in report.checks}
    assert values["poincare-rank"] == 2
    assert values["radiality-index"] == 2
    assert values["determinacy-order"] == 2
