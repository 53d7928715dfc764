"""Independent oracles: chain replay against the defining gauge identity,
normal-form predicates re-implemented from the definitions, and invariant
reports.  This module never calls the reduction pipelines; a failing check
always carries a concrete witness.
"""

from .errors import PrecisionError
from .field import join
from .jets import LaurentJet, ORDER_INF
from .matrix import Matrix
from .rationals import QQ
from .systems import SystemJet, apply_step, RAMIFICATION


class VerificationReport:
    __slots__ = ("checks",)

    def __init__(self, checks=()):
        object.__setattr__(self, "checks", list(checks))

    def __setattr__(self, *args):
        raise AttributeError("use add(); reports accumulate through it")

    def add(self, name, passed, witness=None):
        if not passed and witness is None:
            witness = "failed"
        self.checks.append((name, bool(passed), witness))

    @property
    def all_pass(self):
        return all(ok for _, ok, _ in self.checks)

    def merged(self, other):
        report = VerificationReport(self.checks)
        for item in other.checks:
            report.checks.append(item)
        return report

    def as_dict(self):
        return {
            "all_pass": self.all_pass,
            "checks": [
                {"name": name, "pass": ok, **({"witness": str(w)} if w is not None else {})}
                for name, ok, w in self.checks
            ],
        }

    def __repr__(self):
        status = "pass" if self.all_pass else "FAIL"
        return f"<report {status}: {len(self.checks)} checks>"


# -- replay -------------------------------------------------------------------


def _jet_poly_matrix(step, field):
    return step.poly_matrix(field).map(lambda p: LaurentJet.from_polynomial(p))


def _check_multiplied_identity(before, after, step, report, label):
    """Verify P * B = A * P - P' coefficientwise with plain ring ops."""
    field = join(before.field, after.field)
    if step.field is not None:
        field = join(field, step.field)
    p = _jet_poly_matrix(step, field)
    p_prime = step.poly_matrix(field).map(
        lambda q: LaurentJet.from_polynomial(q.derivative())
    )
    a = Matrix(before.coerce(field).entries)
    b = Matrix(after.coerce(field).entries)
    lhs = p * b
    rhs = a * p - p_prime
    for i in range(before.n):
        for j in range(before.n):
            le, re_ = lhs[i, j], rhs[i, j]
            limit = min(le.order, re_.order)
            if not le.same_series(re_, upto=limit):
                d = min(le.valuation_bound, re_.valuation_bound)
                while d <= limit:
                    if le.coefficient(d) != re_.coefficient(d):
                        break
                    d += 1
                report.add(
                    label,
                    False,
                    f"entry ({i},{j}) differs at degree {d}",
                )
                return False
    report.add(label, True)
    return True


def _independent_ramification(system, r):
    """r x^{r-1} A(x^r), recomputed entrywise from the definition."""
    field = system.field
    rows = []
    for row in system.entries:
        out = []
        for jet in row:
            sparse = {}
            for d, c in jet.items():
                sparse[d * r + r - 1] = c * r
            order = jet.order * r + r - 1
            from .jets import _from_sparse

            out.append(_from_sparse(field, sparse, order))
        rows.append(out)
    return SystemJet(field, rows)


def check_gauge_chain(system, chain, claimed):
    """Replay a chain step by step, verifying each gauge step against the
    multiplied-out identity and each ramification against its definition,
    then compare with the claimed output exactly."""
    report = VerificationReport()
    current = system
    for idx, step in enumerate(chain):
        label = f"step[{idx}] {step.kind}"
        after = apply_step(current, step)
        if step.kind == RAMIFICATION:
            independent = _independent_ramification(current, step.payload)
            ok = after.same_series(independent)
            report.add(label, ok, None if ok else "ramification mismatch")
            if not ok:
                return report
        else:
            if not _check_multiplied_identity(current, after, step, report, label):
                return report
        current = after
    limit = min(current.order, claimed.order)
    for i in range(current.n):
        for j in range(current.n):
            a = current.entries[i][j]
            b = claimed.entries[i][j]
            if not a.same_series(b, upto=limit):
                d = min(a.valuation_bound, b.valuation_bound)
                while d <= limit:
                    try:
                        if a.coefficient(d) != b.coefficient(d):
                            break
                    except PrecisionError:
                        break
                    d += 1
                report.add(
                    "replay-matches-claimed",
                    False,
                    f"entry ({i},{j}) differs at degree {d}: "
                    f"expected {b.coefficient(d) if d <= b.order else '?'}, "
                    f"found {a.coefficient(d) if d <= a.order else '?'}",
                )
                return report
    report.add("replay-matches-claimed", True)
    return report


# -- form predicates ------------------------------------------------------------


def _diag_entry_poly(system, i, rank):
    coeffs = [system.matrix_at(t - rank - 1)[i, i] for t in range(rank)]
    return coeffs


def check_form(system, mode, rank, degree):
    """Definitional (TRS)/(RTRS) predicate at the stated rank and degree."""
    report = VerificationReport()
    mode = mode.upper()
    v = system.valuation()
    actual_rank = 0 if v is None else max(-v - 1, 0)
    report.add(
        "rank-matches",
        actual_rank == rank,
        None if actual_rank == rank else f"expected {rank}, found {actual_rank}",
    )
    if actual_rank != rank:
        return report
    if system.order != ORDER_INF and system.order < degree - 1:
        raise PrecisionError(
            "form check needs the tail through the stated degree",
            required=rank + degree,
            available=system.order + rank + 1,
        )
    n = system.n
    # D region: coefficients at absolute degrees -(rank+1) .. -2
    d_mats = [system.matrix_at(t - rank - 1) for t in range(rank)]
    residual = system.matrix_at(-1)
    if mode == "TRS":
        for t, m in enumerate(d_mats):
            for i in range(n):
                for j in range(n):
                    if i != j and not m[i, j].is_zero():
                        report.add(
                            "exponential-diagonal",
                            False,
                            f"D coefficient {t} entry ({i},{j}) nonzero",
                        )
                        return report
        report.add("exponential-diagonal", True)
        sides = [[i] for i in range(n)]
        pair_info = {}
    else:
        ok, sides, pair_info, witness = _scan_real_layout(d_mats, n)
        report.add("real-exponential-layout", ok, witness)
        if not ok:
            return report
    # commutation [D, C] = 0
    for t, m in enumerate(d_mats):
        for i in range(n):
            for j in range(n):
                acc = _zero_like(residual)
                for s in range(n):
                    acc = acc + m[i, s] * residual[s, j] - residual[i, s] * m[s, j]
                if not acc.is_zero():
                    report.add(
                        "commutation",
                        False,
                        f"[D_{t}, C] nonzero at ({i},{j})",
                    )
                    return report
    report.add("commutation", True)
    if rank > 0:
        nonzero = not d_mats[0].is_zero()
        report.add("leading-exponential-nonzero", nonzero, None if nonzero else "D(0) = 0")
        if not nonzero:
            return report
    if mode == "RTRS":
        ok, witness = _check_real_residual(residual, sides, pair_info, n)
        report.add("residual-real-split", ok, witness)
        if not ok:
            return report
    # zero tail through the stated degree
    for d in range(0, degree):
        m = system.matrix_at(d)
        if not m.is_zero():
            bad = next((i, j) for i, j, x in m.entries() if not x.is_zero())
            report.add(
                "tail-zero",
                False,
                f"tail coefficient at degree {d} nonzero at {bad}",
            )
            return report
    report.add("tail-zero", True)
    return report


def _zero_like(matrix):
    from .field import zero_of

    return zero_of(matrix[0, 0].field)


def _scan_real_layout(d_mats, n):
    """Classify coordinates into real singles then complex 2x2 pairs.

    Returns (ok, sides, pair_info, witness): sides is a list of coordinate
    units ([i] or [i, i+1]); pair_info maps the unit start to True when the
    unit is a genuine complex pair (non-real content somewhere in D).
    """
    sides = []
    pair_info = {}
    i = 0
    seen_pair = False
    while i < n:
        clean = True
        for m in d_mats:
            for j in range(n):
                if j != i and (not m[i, j].is_zero() or not m[j, i].is_zero()):
                    clean = False
                    break
            if not clean:
                break
        if clean:
            if seen_pair:
                return False, [], {}, f"real coordinate {i} after a complex pair"
            sides.append([i])
            i += 1
            continue
        if i + 1 >= n:
            return False, [], {}, f"coordinate {i} is neither real nor part of a pair"
        nonreal = False
        for m in d_mats:
            a, nb = m[i, i], m[i, i + 1]
            b, a2 = m[i + 1, i], m[i + 1, i + 1]
            if a != a2 or nb != -b:
                return False, [], {}, f"D block at ({i},{i+1}) is not of Lambda shape"
            for j in range(n):
                if j not in (i, i + 1):
                    if (
                        not m[i, j].is_zero()
                        or not m[j, i].is_zero()
                        or not m[i + 1, j].is_zero()
                        or not m[j, i + 1].is_zero()
                    ):
                        return False, [], {}, f"pair ({i},{i+1}) couples outside itself"
            if not b.is_zero():
                nonreal = True
        if not nonreal:
            return False, [], {}, f"pair at ({i},{i+1}) has real content only"
        sides.append([i, i + 1])
        pair_info[i] = True
        seen_pair = True
        i += 2
    return True, sides, pair_info, None


def _check_real_residual(residual, sides, pair_info, n):
    """C = C1 (+) C2 with C2 passing the C-matrix test."""
    n1 = sum(1 for unit in sides if len(unit) == 1)
    for i in range(n1):
        for j in range(n1, n):
            if not residual[i, j].is_zero() or not residual[j, i].is_zero():
                return False, f"residual couples real part with pair part at ({i},{j})"
    # C2 blockwise Lambda shape
    j = n1
    while j < n:
        k = n1
        while k < n:
            a, nb = residual[j, k], residual[j, k + 1]
            b, a2 = residual[j + 1, k], residual[j + 1, k + 1]
            if a != a2 or nb != -b:
                return False, f"residual block ({j},{k}) is not of Lambda shape"
            k += 2
        j += 2
    return True, None


# -- invariants report --------------------------------------------------------------


def invariants_report(system, normal_form=None):
    """Orders and invariants; with a normal form attached, also the ratio
    rank/ramification and the exponential-entry multiset for equivalence
    comparisons."""
    from .systems import system_invariants
    from .text import render_polynomial

    report = VerificationReport()
    inv = system_invariants(system)
    report.add("order", True, inv.order)
    report.add("poincare-rank", True, inv.poincare_rank)
    report.add("radiality-index", True, inv.radiality_index)
    report.add("determinacy-order", True, inv.determinacy_order)
    if normal_form is not None:
        ratio = QQ(normal_form.rank, normal_form.ramification) if normal_form.ramification else QQ(0)
        report.add("slope", True, str(ratio))
        entries = sorted(render_polynomial(p) for p in normal_form.exponential_part)
        report.add("exponential-entries", True, "; ".join(entries))
    return report
