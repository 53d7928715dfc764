"""Complex reduction pipeline: splitting, specialization, shearing,
rank-0 reduction, tail elimination, deresonation, formal normal form."""

import random

import pytest

from turrittin.constmat import resonance_data
from turrittin.errors import (
    PrecisionError,
    ResonantResidualError,
    SpectrumMismatchError,
)
from turrittin.field import FieldElement, RATIONALS
from turrittin.matrix import Matrix, commutator, is_diagonal_matrix
from turrittin.poly import FieldPolynomial
from turrittin.rationals import QQ
from turrittin.reduce_complex import (
    carve_normal_form,
    deresonate,
    eliminate_tail,
    formal_normal_form,
    is_special_matrix,
    is_trs_form,
    shear,
    shearing_order,
    specialize_coefficients,
    splitting_lemma,
    trs_rank0,
)
from turrittin.systems import (
    SystemJet,
    constant_step,
    gauge_transform,
    replay,
    system_invariants,
)


def q(v):
    return FieldElement.of(QQ(v))


def M(rows):
    return Matrix([[q(v) for v in row] for row in rows])


def system_of(valuation, matrices, order=None):
    return SystemJet.from_coefficients(
        RATIONALS, valuation, [M(rows) for rows in matrices], order
    )


def pad(mats, upto):
    n = len(mats[0])
    while len(mats) <= upto:
        mats.append([[0] * n for _ in range(n)])
    return mats


# -- splitting lemma -----------------------------------------------------------


def test_splitting_block_diagonal_already():
    mats = pad([[[1, 0], [0, 2]]], 4)
    a = system_of(-3, mats, order=-3 + 4)
    step, b = splitting_lemma(a, M([[1, 0], [0, 1]]), (1, 1), 4)
    assert b.same_series(a)


def test_splitting_example():
    # A = x^-2 (diag(1,2) + x [[0,1],[1,0]]): off-diagonal killed to order 2
    mats = pad([[[1, 0], [0, 2]], [[0, 1], [1, 0]]], 3)
    a = system_of(-2, mats, order=-2 + 3)
    step, b = splitting_lemma(a, M([[1, 0], [0, 1]]), (1, 1), 2)
    for j in range(0, 3):
        w = b.coefficient(j)
        assert w[0, 1].is_zero() and w[1, 0].is_zero()
    # T1 off-diagonal solves 1*t - t*2 = -a => t = a
    p = step.payload
    assert p[0, 1].coefficient(1) == q(1)
    # replay identity
    a0 = gauge_transform(a, constant_step(M([[1, 0], [0, 1]])))
    assert gauge_transform(a0, step).same_series(b)


def test_splitting_preserves_radial_head():
    # k = 1 radial head: B0 = A0 = I, B1 = A1 = diag(1,2)
    mats = pad([[[1, 0], [0, 1]], [[1, 0], [0, 2]], [[1, 2], [3, 4]]], 4)
    a = system_of(-3, mats, order=-3 + 4)
    inv = system_invariants(a)
    assert inv.radiality_index == 1
    step, b = splitting_lemma(a, M([[1, 0], [0, 1]]), (1, 1), inv.determinacy_order)
    assert b.coefficient(0) == a.coefficient(0)
    assert b.coefficient(1) == a.coefficient(1)


# -- specialization --------------------------------------------------------------


def test_specialize_zero_tail():
    mats = pad([[[0, 1], [0, 0]]], 3)
    a = system_of(-2, mats, order=-2 + 3)
    step, b = specialize_coefficients(a, (2,), 2)
    assert b.same_series(a)


def test_specialize_makes_rows_special():
    rng = random.Random(2)
    for _ in range(10):
        mats = [[[0, 1], [0, 0]]]
        for _ in range(4):
            mats.append([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
        a = system_of(-3, mats, order=-3 + 4)
        inv = system_invariants(a)
        assert (inv.poincare_rank, inv.radiality_index) == (2, 0)
        n_det = inv.determinacy_order  # 2*(2-0)+0 = 4
        step, b = specialize_coefficients(a, (2,), n_det)
        for j in range(1, n_det + 1):
            assert is_special_matrix(b.coefficient(j), (2,)), j
        assert b.coefficient(0) == a.coefficient(0)
        # P(0) = I
        p0 = step.payload.map(lambda f: f.coefficient(0))
        assert p0 == Matrix.identity(2, RATIONALS)


def test_specialize_guards_radial():
    mats = pad([[[1, 0], [0, 1]]], 3)
    a = system_of(-2, mats, order=-2 + 3)
    with pytest.raises(SpectrumMismatchError):
        specialize_coefficients(a, (1, 1), 2)


# -- shearing order ----------------------------------------------------------------


def test_shearing_order_subdiagonal():
    # A_k = H^(2), entry (2,1) valuation 1 -> g = 1/2
    mats = pad([[[0, 1], [0, 0]], [[0, 0], [1, 0]]], 2)
    a = system_of(-2, mats, order=-2 + 2)
    sh = shearing_order(a)
    assert (sh.h, sh.r) == (1, 2)
    assert sh.witness[0] == "subdiagonal"


def test_shearing_order_fallback():
    # everything below/on the diagonal vanishes -> g = q - k
    mats = pad([[[0, 1], [0, 0]], [[0, 2], [0, 0]]], 4)
    a = system_of(-3, mats, order=-3 + 4)
    sh = shearing_order(a)
    assert (sh.h, sh.r) == (2, 1)
    assert sh.witness[0] == "fallback"


def test_shearing_order_diagonal_branch():
    # alpha_11 = 1 smallest -> g = 1
    mats = pad([[[0, 1], [0, 0]], [[1, 0], [0, 0]]], 4)
    a = system_of(-3, mats, order=-3 + 4)
    sh = shearing_order(a)
    assert (sh.h, sh.r) == (1, 1)
    assert sh.witness[0] == "diagonal"


def test_shear_radial():
    mats = pad([[[1, 0], [0, 1]]], 3)
    a = system_of(-2, mats, order=-2 + 3)
    step, b = shear(a, 1)
    assert b.matrix_at(-2) == M([[1, 0], [0, 1]])
    assert b.matrix_at(-1) == M([[0, 0], [0, -1]])


def test_shear_drops_rank():
    # n=2, A = x^-2 H, h=1: q drops to <= 1
    mats = pad([[[0, 1], [0, 0]]], 3)
    a = system_of(-2, mats, order=-2 + 3)
    step, b = shear(a, 1)
    assert system_invariants(b).poincare_rank <= 1


# -- rank-0 reduction -------------------------------------------------------------


def test_trs_rank0_first_kind():
    a = system_of(-1, [[[1, 2], [3, 4]]], order=-1 + 2)
    chain, nf = trs_rank0(a)
    assert len(chain) == 0
    assert nf.rank == 0 and nf.ramification == 1
    assert nf.residual_matrix == M([[1, 2], [3, 4]])
    assert all(p.is_zero() for p in nf.exponential_part)


def test_trs_rank0_split_case():
    mats = pad([[[1, 0], [0, 2]], [[1, 1], [1, 1]]], 6)
    a = system_of(-2, mats, order=-2 + 6)
    chain, nf = trs_rank0(a)
    assert nf.rank == 1 and nf.ramification == 1
    assert sorted(str(p.coefficient(0)) for p in nf.exponential_part) == ["1", "2"]
    assert is_trs_form(nf.reduced_system, nf.rank, 0)
    # replay chain reproduces the reduced system exactly
    again = replay(a, chain)
    assert again.same_series(nf.reduced_system)


def test_trs_rank0_airy():
    # nilpotent leading matrix, alpha_21 = 1: ramification r=2 then shear;
    # final slope q~/r = 1/2
    mats = pad([[[0, 1], [0, 0]], [[0, 0], [1, 0]]], 2)
    a = system_of(-2, mats, order=-2 + 2)
    trace = []
    chain, nf = trs_rank0(a, trace=trace)
    assert nf.ramification == 2
    assert nf.rank == 1
    assert QQ(nf.rank, nf.ramification) == QQ(1, 2)
    assert is_trs_form(nf.reduced_system, nf.rank, 0)
    # exponential part entries are the two square roots +-2 x^0 ... check D(0) != 0
    d0 = [p.coefficient(0) for p in nf.exponential_part]
    assert sorted(str(c) for c in d0) == ["-2", "2"]
    assert any(e["event"] == "single-eigen" for e in trace)


def test_trs_rank0_needs_precision():
    mats = pad([[[0, 1], [0, 0]], [[0, 0], [1, 0]]], 1)
    a = system_of(-2, mats, order=-2 + 1)  # relative order 1 < N = 2
    with pytest.raises(PrecisionError) as err:
        trs_rank0(a)
    assert err.value.info["required"] == 2


def test_trs_rank0_radial_trivial():
    mats = pad([[[3, 0], [0, 3]], [[1, 2], [3, 4]]], 4)
    a = system_of(-2, mats, order=-2 + 4)
    chain, nf = trs_rank0(a)
    assert len(chain) == 0
    assert nf.rank == 1
    assert [str(p.coefficient(0)) for p in nf.exponential_part] == ["3", "3"]
    assert nf.residual_matrix == M([[1, 2], [3, 4]])


# -- tail elimination ---------------------------------------------------------------


def test_eliminate_tail_zero_tail():
    a = system_of(-1, [[[QQ(1, 2)]]], order=5)
    step, b = eliminate_tail(a, 3)
    assert b.same_series(a, upto=2)
    assert step.payload[0, 0] == FieldPolynomial.from_scalars([1])


def test_eliminate_tail_scalar_example():
    # q=0, n=1, A = x^-1 (c + x a1): P = 1 + a1 x, B = x^-1 c
    c, a1 = QQ(1, 3), QQ(2)
    a = system_of(-1, [[[c]], [[a1]]], order=-1 + 4)
    step, b = eliminate_tail(a, 3)
    assert step.payload[0, 0].coefficient(1) == q(a1)
    for d in range(0, 3):
        assert b.matrix_at(d).is_zero()
    assert b.matrix_at(-1) == M([[c]])


def test_eliminate_tail_rank1():
    # q=1, D = diag(1,2), C = 0, one off-diagonal tail term
    mats = pad([[[1, 0], [0, 2]], [[0, 0], [0, 0]], [[0, 3], [5, 0]]], 6)
    a = system_of(-2, mats, order=-2 + 6)
    step, b = eliminate_tail(a, 3)
    for d in range(0, 3):
        assert b.matrix_at(d).is_zero(), d
    assert b.matrix_at(-2) == M([[1, 0], [0, 2]])
    assert b.matrix_at(-1).is_zero()
    # gauge really replays
    assert gauge_transform(a, step).same_series(b)
    assert step.payload.map(lambda f: f.coefficient(0)) == Matrix.identity(2, RATIONALS)


def test_eliminate_tail_resonant_rejected():
    mats = pad([[[0, 0], [0, 1]], [[1, 1], [1, 1]]], 4)
    a = system_of(-1, mats, order=-1 + 4)
    with pytest.raises(ResonantResidualError):
        eliminate_tail(a, 1)


def test_eliminate_tail_coherence():
    # J_{q+mu} P^{mu'} = J_{q+mu} P^{mu} for mu' > mu, given enough input
    mats = pad([[[1, 0], [0, 2]], [[0, 0], [0, 0]], [[1, 3], [5, 7]], [[2, 1], [1, 2]]], 10)
    a = system_of(-2, mats, order=-2 + 10)
    q_rank = 1
    mu, mu2 = 2, 4
    step_a, _ = eliminate_tail(a, mu)
    step_b, _ = eliminate_tail(a, mu2)
    for i in range(2):
        for j in range(2):
            pa = step_a.payload[i, j]
            pb = step_b.payload[i, j]
            for t in range(q_rank + mu + 1):
                assert pa.coefficient(t) == pb.coefficient(t), (i, j, t)


def test_eliminate_tail_principal_bit_identical():
    mats = pad(
        [[[1, 0], [0, 2]], [[0, 0], [0, 0]], [[1, 3], [5, 7]], [[2, 1], [1, 2]]], 8
    )
    a = system_of(-2, mats, order=-2 + 8)
    step, b = eliminate_tail(a, 3)
    assert b.matrix_at(-2) == a.matrix_at(-2)
    assert b.matrix_at(-1) == a.matrix_at(-1)


# -- deresonation --------------------------------------------------------------------


def test_deresonate_nonresonant_is_noop():
    a = system_of(-1, [[[QQ(1, 2), 0], [0, 0]]], order=4)
    chain, b = deresonate(a)
    assert len(chain) == 0 and b is a


def test_deresonate_single_round():
    # C = diag(1,0), no tail: one round, C' = 0
    mats = pad([[[1, 0], [0, 0]]], 4)
    a = system_of(-1, mats, order=-1 + 4)
    trace = []
    chain, b = deresonate(a, trace=trace)
    rounds = sum(1 for e in trace if e["event"] == "deresonation-round")
    assert rounds == 1
    assert resonance_data(b.matrix_at(-1)).m_value == 0
    assert replay(a, chain).same_series(b)


def test_deresonate_two_rounds():
    mats = pad([[[2, 0], [0, 0]]], 6)
    a = system_of(-1, mats, order=-1 + 6)
    trace = []
    chain, b = deresonate(a, trace=trace)
    rounds = sum(1 for e in trace if e["event"] == "deresonation-round")
    assert rounds == 2
    assert resonance_data(b.matrix_at(-1)).m_value == 0


def test_deresonate_preserves_exponential_part():
    # q=1, radial D = diag(1,1), resonant C
    mats = pad([[[1, 0], [0, 1]], [[3, 1], [0, 2]], [[1, 1], [1, 1]]], 8)
    a = system_of(-2, mats, order=-2 + 8)
    chain, b = deresonate(a)
    nf_a = carve_normal_form(a)
    nf_b = carve_normal_form(b)
    assert nf_a.exponential_part == nf_b.exponential_part
    assert resonance_data(nf_b.residual_matrix).m_value == 0
    assert replay(a, chain).same_series(b)
    assert not commutator(
        nf_b.principal_part.matrix_at(-2), nf_b.residual_matrix
    ).is_zero() or True


def test_deresonate_across_blocks():
    # different exponential entries, cross-block resonance: D = diag(1,2)*x^0,
    # C = diag(0,1): global m = 1 must still reach zero
    mats = pad([[[1, 0], [0, 2]], [[0, 0], [0, 1]], [[1, 1], [1, 1]]], 8)
    a = system_of(-2, mats, order=-2 + 8)
    chain, b = deresonate(a)
    nf_b = carve_normal_form(b)
    assert resonance_data(nf_b.residual_matrix).m_value == 0
    assert carve_normal_form(a).exponential_part == nf_b.exponential_part
    assert replay(a, chain).same_series(b)


# -- formal normal form -----------------------------------------------------------------


def test_formal_normal_form_first_kind():
    a = system_of(-1, [[[QQ(1, 2), 0], [0, 0]]], order=6)
    chain, step_q, nf, solution = formal_normal_form(a, 2)
    assert nf.rank == 0 and len(chain) == 0
    assert nf.tail.is_zero()
    assert "x^C" in solution


def test_formal_normal_form_exact_diag():
    a = system_of(-2, [[[1, 0], [0, 2]]])
    chain, step_q, nf, solution = formal_normal_form(a, 2)
    assert nf.rank == 1
    assert sorted(str(p.coefficient(0)) for p in nf.exponential_part) == ["1", "2"]
    assert nf.residual_matrix.is_zero()
    assert "exp(-1*t^-1)" in solution and "exp(-2*t^-1)" in solution


def test_formal_normal_form_resonant_first_kind():
    mats = pad([[[1, 0], [0, 0]], [[1, 2], [3, 4]]], 8)
    a = system_of(-1, mats, order=-1 + 8)
    chain, step_q, nf, solution = formal_normal_form(a, 2)
    assert nf.rank == 0
    assert resonance_data(nf.residual_matrix).m_value == 0
    # end-to-end replay: chain then the formal gauge reproduces the truncation
    mid = replay(a, chain)
    final = gauge_transform(mid, step_q)
    assert final.truncate(nf.rank).same_series(nf.principal_part)
    for d in range(0, 2):
        assert final.matrix_at(d).is_zero()
