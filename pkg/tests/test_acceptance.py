"""Acceptance suite: one test per criterion, each printing a PASS line.

Random corpora are seeded and sized per the criteria.  Leading
coefficients are built from tower-compatible spectral types conjugated by
unimodular matrices, so the spectra stay inside Q, one real quadratic
extension, and their i-adjunctions while the entries stay dense.
"""

import random

from turrittin.constmat import is_c_system, resonance_data, theta_embed_system
from turrittin.errors import PrecisionError
from turrittin.field import FieldElement, GAUSSIAN, RATIONALS, complex_pair
from turrittin.jets import LaurentJet
from turrittin.matrix import Matrix, det, inverse
from turrittin.poly import FieldPolynomial
from turrittin.rationals import QQ
from turrittin.reduce_complex import (
    carve_normal_form,
    deresonate,
    eliminate_tail,
    trs_rank0,
)
from turrittin.reduce_real import (
    is_rtrs_form,
    propagate_c_structure,
    rtrs_rank0,
)
from turrittin.constmat import sylvester_solve
from turrittin.errors import CommonEigenvalueError
from turrittin.matrix import charpoly
from turrittin.poly import poly_gcd
from turrittin.systems import (
    SystemJet,
    apply_step,
    gauge_transform,
    polynomial_step,
    replay,
    system_invariants,
)
from turrittin.verify import check_form, check_gauge_chain

import pytest


def q(v):
    return FieldElement.of(QQ(v))


def M(rows):
    return Matrix([[q(v) for v in row] for row in rows])


def random_unimodular(rng, n):
    """Product of elementary shear matrices: integer entries, det +-1."""
    m = Matrix.identity(n, RATIONALS)
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        rows = [list(r) for r in Matrix.identity(n, RATIONALS).rows]
        rows[i][j] = q(rng.choice([-2, -1, 1, 2]))
        m = m * Matrix(rows)
    return m


def _jordanish_block(rng, ev, size):
    rows = [[q(0)] * size for _ in range(size)]
    for i in range(size):
        rows[i][i] = q(ev)
        if i + 1 < size and rng.random() < 0.7:
            rows[i][i + 1] = q(1)
    return Matrix(rows)


def random_leading(rng, n):
    """A tower-compatible leading coefficient: conjugated block forms."""
    kind = rng.choice(["rational", "nilpotent", "rotation", "mixed"])
    blocks = []
    remaining = n
    while remaining:
        if kind == "rotation" and remaining >= 2 and rng.random() < 0.7:
            a, b = rng.randint(-2, 2), rng.choice([1, 2, -1])
            blocks.append(M([[a, -b], [b, a]]))
            remaining -= 2
            continue
        if kind == "nilpotent":
            size = rng.randint(1, remaining)
            blocks.append(_jordanish_block(rng, 0, size))
            remaining -= size
            continue
        size = rng.randint(1, remaining)
        blocks.append(_jordanish_block(rng, rng.randint(-3, 3), size))
        remaining -= size
    from turrittin.matrix import direct_sum

    core = direct_sum(blocks) if len(blocks) > 1 else blocks[0]
    t = random_unimodular(rng, n)
    return t * core * inverse(t)


def random_dense(rng, n, denominators=(1, 1, 2)):
    return Matrix(
        [
            [
                q(QQ(rng.randint(-3, 3), rng.choice(denominators)))
                for _ in range(n)
            ]
            for _ in range(n)
        ]
    )


def random_system(rng, n, q_rank, margin=4, radial_head=False):
    """Dense random system with exact Poincare rank q_rank and relative
    truncation N(n, q, k) + margin."""
    head = []
    if radial_head and q_rank >= 1:
        k = rng.randint(1, q_rank)
        for _ in range(k):
            head.append(Matrix.identity(n, RATIONALS).scaled(q(rng.choice([1, 2, -1]))))
    lead = random_leading(rng, n) if q_rank > 0 else random_dense(rng, n)
    if not head and lead.is_zero():
        lead = Matrix.identity(n, RATIONALS)
    mats = head + [lead]
    k_guess = len(head)
    n_det = n * (q_rank - k_guess) + k_guess
    total = n_det + margin
    while len(mats) <= total:
        mats.append(random_dense(rng, n))
    v = -(q_rank + 1)
    return SystemJet.from_coefficients(RATIONALS, v, mats, order=v + total)


def reduce_complex_pipeline(a):
    """The chain `reduce --mode complex` emits at degree 0."""
    chain, nf = trs_rank0(a)
    chain_d, work = deresonate(nf.reduced_system)
    chain = chain + chain_d
    claimed = work
    return chain, claimed


EMITTED_CHAINS = []


def rank_of(system):
    v = system.valuation()
    return None if v is None else max(-v - 1, 0)


def test_criterion_01_gauge_replay_soundness():
    """>= 200 random systems; every emitted chain replays to the claimed
    output with exact rational equality."""
    rng = random.Random(20260810)
    produced = 0
    attempts = 0
    skipped = 0
    while produced < 200:
        attempts += 1
        assert attempts < 260, "generator kept producing infeasible systems"
        n = rng.choice([1, 2, 3, 4])
        q_rank = rng.choice([0, 1, 2, 3])
        a = random_system(rng, n, q_rank, margin=4, radial_head=rng.random() < 0.25)
        try:
            chain, claimed = reduce_complex_pipeline(a)
        except PrecisionError:
            skipped += 1  # resonance descent would need a deeper truncation
            continue
        report = check_gauge_chain(a, chain, claimed)
        assert report.all_pass, [c for c in report.checks if not c[1]]
        EMITTED_CHAINS.append((a, chain))
        produced += 1
    assert skipped <= 20
    print(f"ACCEPTANCE 1 gauge-replay-soundness: PASS ({produced} systems, {skipped} regenerated)")


def test_criterion_02_form_predicates():
    """All complex outputs satisfy check_form(TRS, q~, 0); after tail
    elimination with mu in {1,2,3} they satisfy the degree-mu predicate
    with a bit-identical principal part."""
    rng = random.Random(512)
    count = 0
    while count < 40:
        n = rng.choice([1, 2, 3])
        q_rank = rng.choice([0, 1, 2])
        a = random_system(rng, n, q_rank, margin=12)
        try:
            chain, nf = trs_rank0(a)
            chain_d, work = deresonate(nf.reduced_system)
        except PrecisionError:
            continue
        q_t = rank_of(work)
        assert check_form(work, "trs", q_t, 0).all_pass
        base = carve_normal_form(work)
        for mu in (1, 2, 3):
            try:
                step, out = eliminate_tail(work, mu)
            except PrecisionError:
                continue
            assert check_form(out, "trs", q_t, mu).all_pass, mu
            done = carve_normal_form(out)
            assert done.principal_part.same_series(base.principal_part)
        EMITTED_CHAINS.append((a, chain + chain_d))
        count += 1
    print(f"ACCEPTANCE 2 form-predicates: PASS ({count} pipelines, mu in 1..3)")


def test_criterion_03_truncation_determinacy():
    """J_N-equal pairs yield identical principal parts; differing at order
    N-1 produces a differing principal part in at least one instance."""
    rng = random.Random(77)
    pairs = 0
    while pairs < 50:
        n = rng.choice([2, 3])
        q_rank = rng.choice([1, 2])
        a = random_system(rng, n, q_rank, margin=3)
        inv = system_invariants(a)
        n_det = inv.determinacy_order
        v = a.valuation()
        # replace the tail beyond N with fresh random data
        base = a.truncate(n_det)
        tail_mats = [random_dense(rng, n) for _ in range(3)]
        variant = _with_tail(base, v, n_det, tail_mats, a.order)
        try:
            _, nf1 = trs_rank0(a)
            _, nf2 = trs_rank0(variant)
        except PrecisionError:
            continue
        assert nf1.rank == nf2.rank
        assert nf1.ramification == nf2.ramification
        assert nf1.principal_part.same_series(nf2.principal_part)
        pairs += 1
    # control: a difference at order N-1 must be able to change the principal part
    control_hits = 0
    for seed in range(40):
        rng2 = random.Random(1000 + seed)
        a = random_system(rng2, 2, 1, margin=2)
        inv = system_invariants(a)
        n_det = inv.determinacy_order
        v = a.valuation()
        bumped = _bump_coefficient(a, v + n_det - 1)
        try:
            _, nf1 = trs_rank0(a)
            _, nf2 = trs_rank0(bumped)
        except PrecisionError:
            continue
        if nf1.rank != nf2.rank or not nf1.principal_part.same_series(
            nf2.principal_part
        ):
            control_hits += 1
    assert control_hits >= 1
    print(
        f"ACCEPTANCE 3 truncation-determinacy: PASS (50 pairs agree, "
        f"{control_hits} control pairs differ at N-1)"
    )


def _with_tail(base, valuation, n_det, tail_mats, order):
    mats = []
    rel = 0
    cur = base
    total = n_det + len(tail_mats)
    for t in range(total + 1):
        if t <= n_det:
            mats.append(base.matrix_at(valuation + t))
        else:
            mats.append(tail_mats[t - n_det - 1])
    return SystemJet.from_coefficients(RATIONALS, valuation, mats, order=order)


def _bump_coefficient(a, degree):
    rows = [list(r) for r in a.entries]
    rows[0][0] = rows[0][0] + LaurentJet.monomial(q(1), degree)
    return SystemJet(a.field, rows, a.order)


def test_criterion_04_sylvester_oracle():
    """200 disjoint-spectra solves verified by substitution; 50 constructed
    common-eigenvalue cases all raise."""
    rng = random.Random(404)
    solved = 0
    while solved < 200:
        n, k = rng.choice([(1, 1), (2, 1), (2, 2), (3, 2), (3, 3)])
        r = random_dense(rng, n)
        s = random_dense(rng, k)
        if poly_gcd(charpoly(r), charpoly(s)).degree != 0:
            continue
        m = Matrix([[q(rng.randint(-5, 5)) for _ in range(k)] for _ in range(n)])
        x = sylvester_solve(r, s, m)
        assert r * x - x * s == m
        solved += 1
    raised = 0
    for _ in range(50):
        n = rng.choice([1, 2, 3])
        r = random_dense(rng, n)
        t = random_unimodular(rng, n)
        s = t * r * inverse(t)  # same spectrum by construction
        m = Matrix([[q(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)])
        try:
            sylvester_solve(r, s, m)
        except CommonEigenvalueError:
            raised += 1
    assert raised == 50
    print("ACCEPTANCE 4 sylvester-oracle: PASS (200 solves, 50 rejections)")


def test_criterion_05_deresonation_descent():
    """Radial residual matrices with m(C) in 1..5: the number of rounds
    equals m(C), the final m is 0, and the chain degree is <= 2m."""
    rng = random.Random(55)
    cases = 0
    for m_target in [1, 2, 3, 4, 5] * 6:
        n = rng.choice([2, 3])
        # build a spectrum with integer gaps summing to m_target
        evs = [QQ(0), QQ(m_target)]
        while len(evs) < n:
            evs.append(QQ(rng.randint(0, m_target)))
        rng.shuffle(evs)
        core = Matrix.diagonal([q(e) for e in evs])
        t = random_unimodular(rng, n)
        c = t * core * inverse(t)
        q_rank = rng.choice([0, 1])
        mats = []
        if q_rank == 1:
            mats.append(Matrix.identity(n, RATIONALS).scaled(q(rng.choice([1, 2]))))
        mats.append(c)
        rel = q_rank + 2 * m_target + 2
        while len(mats) <= rel:
            mats.append(random_dense(rng, n))
        v = -(q_rank + 1)
        a = SystemJet.from_coefficients(RATIONALS, v, mats, order=v + rel)
        m_actual = resonance_data(c).m_value
        trace = []
        chain, out = deresonate(a, trace=trace)
        rounds = sum(1 for e in trace if e["event"] == "deresonation-round")
        assert rounds == m_actual, (m_actual, rounds)
        assert resonance_data(out.matrix_at(-1)).m_value == 0
        assert chain.gauge_degree() <= 2 * m_actual
        EMITTED_CHAINS.append((a, chain))
        cases += 1
    print(f"ACCEPTANCE 5 deresonation-descent: PASS ({cases} cases, rounds == m)")


def test_criterion_06_rank_monotonicity():
    """Across every chain emitted by criteria 1-5, the Poincare rank never
    increases over a non-ramification step."""
    if not EMITTED_CHAINS:  # standalone run: regenerate a small corpus
        rng = random.Random(20260810)
        while len(EMITTED_CHAINS) < 40:
            n = rng.choice([2, 3, 4])
            a = random_system(rng, n, rng.choice([1, 2, 3]), margin=4)
            try:
                chain, _ = reduce_complex_pipeline(a)
            except PrecisionError:
                continue
            EMITTED_CHAINS.append((a, chain))
    violations = 0
    steps_checked = 0
    for a, chain in EMITTED_CHAINS:
        cur = a
        for step in chain:
            before = rank_of(cur)
            cur = apply_step(cur, step)
            after = rank_of(cur)
            if step.kind != "ramification":
                if before is not None and after is not None and after > before:
                    violations += 1
                steps_checked += 1
    assert violations == 0
    print(
        f"ACCEPTANCE 6 rank-monotonicity: PASS ({steps_checked} gauge steps, 0 violations)"
    )


def _exponential_signature(nf):
    """Multiset of exponential entries after x -> x^(1/r) bookkeeping:
    per entry, the sorted tuple of (exponent fraction, coefficient key)."""
    sig = []
    for p in nf.exponential_part:
        entry = tuple(
            (str(QQ(t, nf.ramification)), str(c))
            for t, c in enumerate(p.coeffs)
            if not c.is_zero()
        )
        sig.append(entry)
    return sorted(sig)


def test_criterion_07_exponential_invariance():
    """Regular polynomial gauges change neither the slope q~/r nor the
    exponential part (after aligning ramifications)."""
    rng = random.Random(707)
    done = 0
    while done < 30:
        n = rng.choice([2, 3])
        q_rank = rng.choice([1, 2])
        a = random_system(rng, n, q_rank, margin=8)
        deg = rng.choice([1, 2, 3])
        p = Matrix(
            [
                [
                    FieldPolynomial.from_scalars(
                        [rng.randint(-2, 2) for _ in range(deg + 1)]
                    )
                    for _ in range(n)
                ]
                for _ in range(n)
            ]
        )
        if det(p.map(lambda f: f.coefficient(0))).is_zero():
            continue
        b = gauge_transform(a, polynomial_step(p))
        try:
            _, nf_a = trs_rank0(a)
            _, nf_b = trs_rank0(b)
        except PrecisionError:
            continue
        assert QQ(nf_a.rank, nf_a.ramification) == QQ(nf_b.rank, nf_b.ramification)
        assert _exponential_signature(nf_a) == _exponential_signature(nf_b)
        done += 1
    print("ACCEPTANCE 7 exponential-invariance: PASS (30 gauge pairs)")


def random_real_system(rng, n, q_rank, margin=4):
    """Real systems with conjugate-pair content: Theta images of complex
    systems plus real perturbations, and native real spectral types."""
    if n % 2 == 0 and rng.random() < 0.5:
        m = n // 2
        entries = []
        for i in range(m):
            row = []
            for j in range(m):
                coeffs = [
                    complex_pair(q(rng.randint(-2, 2)), q(rng.randint(-2, 2)))
                    for _ in range(2)
                ]
                row.append(LaurentJet(GAUSSIAN, -(q_rank + 1), coeffs, -q_rank + 1))
            entries.append(row)
        abar = SystemJet(GAUSSIAN, entries)
        base = theta_embed_system(abar)
        if base.is_zero():
            return random_real_system(rng, n, q_rank, margin)
        inv = system_invariants(base)
        total = inv.determinacy_order + margin
        mats = [base.matrix_at(base.valuation() + t) for t in range(min(2, total) + 1)]
        while len(mats) <= total:
            mats.append(random_dense(rng, n))
        return SystemJet.from_coefficients(
            RATIONALS, base.valuation(), mats, order=base.valuation() + total
        )
    return random_system(rng, n, q_rank, margin=margin)


def test_criterion_08_real_reality_and_form():
    """>= 100 random real systems: all payloads real, outputs in (RTRS)
    form; propagated coefficients pass the C-matrix test."""
    rng = random.Random(808)
    produced = 0
    propagated = 0
    while produced < 100:
        n = rng.choice([1, 2, 2, 3, 4])
        q_rank = rng.choice([0, 1, 2])
        a = random_real_system(rng, n, q_rank, margin=4)
        try:
            chain, nf = rtrs_rank0(a)
        except PrecisionError:
            continue
        for step in chain:
            assert _step_is_real(step), step.kind
        assert check_form(nf.reduced_system, "rtrs", nf.rank, 0).all_pass
        report = check_gauge_chain(a, chain, nf.reduced_system)
        assert report.all_pass
        produced += 1
        # proposition check: single conjugate-pair heads propagate to C-systems
        if q_rank >= 1 and n % 2 == 0:
            inv = system_invariants(a)
            if inv.radiality_index < inv.poincare_rank:
                from turrittin.factor import factor_poly

                ak = a.coefficient(inv.radiality_index)
                facs = factor_poly(charpoly(ak))
                if len(facs) == 1 and facs[0][0].degree == 2:
                    mu = inv.determinacy_order
                    _, b = propagate_c_structure(a, mu)
                    assert is_c_system(b, upto=b.valuation() + mu)
                    propagated += 1
    assert propagated >= 5
    print(
        f"ACCEPTANCE 8 real-reality-and-form: PASS ({produced} systems, "
        f"{propagated} propagation checks)"
    )


def _step_is_real(step):
    if step.kind in ("ramification", "diagonal-monomial"):
        return True
    for row in step.payload.rows:
        for entry in row:
            if hasattr(entry, "coeffs"):
                if not all(c.is_real() for c in entry.coeffs):
                    return False
            elif not entry.is_real():
                return False
    return True


def test_criterion_09_theta_compatibility():
    """Reducing Theta(A-bar) with the real pipeline matches the complex
    reduction of A-bar entrywise through Theta, up to block permutation and
    per-entry conjugation, with a common ramification index."""
    rng = random.Random(909)
    done = 0
    while done < 30:
        m = rng.choice([1, 2])
        q_rank = rng.choice([1, 2])
        entries = []
        for i in range(m):
            row = []
            for j in range(m):
                coeffs = [
                    complex_pair(q(rng.randint(-2, 2)), q(rng.randint(-2, 2)))
                    for _ in range(q_rank + 3)
                ]
                row.append(
                    LaurentJet(GAUSSIAN, -(q_rank + 1), coeffs, 2 * m * q_rank + 4)
                )
            entries.append(row)
        abar = SystemJet(GAUSSIAN, entries)
        if abar.is_zero() or abar.valuation() != -(q_rank + 1):
            continue
        real = theta_embed_system(abar)
        try:
            _, nf_c = trs_rank0(abar)
            _, nf_r = rtrs_rank0(real)
        except PrecisionError:
            continue
        assert nf_r.ramification == nf_c.ramification
        assert nf_r.rank == nf_c.rank
        assert _theta_related(nf_r, nf_c)
        done += 1
    print("ACCEPTANCE 9 theta-compatibility: PASS (30 systems)")


def _theta_related(nf_r, nf_c):
    remaining = list(nf_c.exponential_part)

    def take(pred):
        for idx, cand in enumerate(remaining):
            if pred(cand):
                remaining.pop(idx)
                return True
        return False

    for g in nf_r.complex_exponentials:
        gg = g
        if not take(lambda cand: gg == cand.coerce(gg.field)
                    or gg == cand.coerce(gg.field).conjugate()):
            return False
    reals = list(nf_r.real_exponentials)
    while reals:
        p = reals.pop(0)
        try:
            reals.remove(p)
        except ValueError:
            return False  # real entries must come in doubled pairs
        pc = p
        if not take(lambda cand: cand.is_real()
                    and cand.coerce(pc.field.complexification())
                    == pc.coerce(pc.field.complexification())):
            return False
    return not remaining


def test_criterion_10_termination_measure():
    """On nilpotent-leading systems the single-eigenvalue loop measure
    decreases strictly lexicographically; iterations stay under 10 n."""
    rng = random.Random(1010)
    runs = 0
    while runs < 50:
        n = rng.choice([2, 3])
        q_rank = rng.choice([1, 2, 3])
        # companion-style nilpotent head
        head = [[0] * n for _ in range(n)]
        for i in range(n - 1):
            head[i][i + 1] = 1
        mats = [head]
        n_det = n * q_rank
        while len(mats) <= n_det + 4:
            mats.append(
                [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            )
        if all(all(v == 0 for v in row) for row in mats[1]):
            mats[1][n - 1][0] = 1
        v = -(q_rank + 1)
        a = SystemJet.from_coefficients(
            RATIONALS, v, [M(rows) for rows in mats], order=v + n_det + 4
        )
        trace = []
        try:
            trs_rank0(a, trace=trace)
        except PrecisionError:
            continue
        events = [e for e in trace if e["event"] == "single-eigen"]
        if not events:
            continue
        # strictly decreasing measure within each same-dimension loop
        by_dim = {}
        for e in events:
            by_dim.setdefault(e["n"], []).append(e["measure"])
        for dim, measures in by_dim.items():
            for earlier, later in zip(measures, measures[1:]):
                assert later < earlier, (earlier, later)
            assert len(measures) <= 10 * dim
        runs += 1
    print("ACCEPTANCE 10 termination-measure: PASS (50 nilpotent-leading runs)")
