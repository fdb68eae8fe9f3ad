"""
Dense property suite over seeded random instances.

Every check builds the relevant Kronecker-form objects explicitly with
:mod:`selinv.kron` and compares them with closed forms or with the sparse
recursions. Results are plain records so the CLI and the tests can report
them the same way.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kron
from .generators import random_closed_pattern, random_spd, random_unit_lower
from .solver import ldl_factorize, selected_inverse

KRON_RTOL = 1e-9
ORACLE_RTOL = 1e-12

# reference n = 3 matrices for the basic triangular order
PRINTED_E3 = np.array([
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1],
], dtype=float)
PRINTED_D3 = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
], dtype=float)


@dataclass
class PropertyResult:
    name: str
    cases: int = 0
    violations: int = 0
    max_error: float = 0.0
    counterexample: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.cases > 0

    def record(self, ok: bool, err: float = 0.0, example: str | None = None):
        self.cases += 1
        self.max_error = max(self.max_error, float(err))
        if not ok:
            self.violations += 1
            if self.counterexample is None:
                self.counterexample = example

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name}: {self.cases} cases, {self.violations} violations"
        if self.max_error:
            text += f", max error {self.max_error:.2e}"
        if self.counterexample and not self.passed:
            text += f" [{self.counterexample}]"
        return text


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(1.0, float(np.abs(b).max()) if b.size else 1.0)
    return float(np.abs(a - b).max() / scale) if a.size else 0.0


def _close(a, b, rtol=KRON_RTOL):
    err = _rel(a, b)
    return err <= rtol, err


# --- Kronecker / vec identities ---------------------------------------------

def check_kronecker_identities(cases: int, rng: np.random.Generator) -> list[PropertyResult]:
    names = [
        "vec(a) = a",
        "vec(a b^T) = b kron a",
        "vec(ABC) = (C^T kron A) vec(B)",
        "vec(A)^T vec(B) = tr(A^T B)",
        "(A kron B)(C kron D) = AC kron BD",
        "(A kron B)^-1 = A^-1 kron B^-1",
        "(A kron B)^T = A^T kron B^T",
        "det(A kron B) = det(A)^M det(B)^N",
        "tr(A kron B) = tr(A) tr(B)",
    ]
    results = {nm: PropertyResult(nm) for nm in names}
    for c in range(cases):
        p, q, r, s = (int(v) for v in rng.integers(1, 5, size=4))
        tag = f"case {c}"
        a = rng.normal(size=p)
        results[names[0]].record(*_close(kron.vec(a), a), tag)
        bvec = rng.normal(size=q)
        results[names[1]].record(*_close(kron.vec(np.outer(a, bvec)), np.kron(bvec, a)), tag)
        A, B, C = rng.normal(size=(p, q)), rng.normal(size=(q, r)), rng.normal(size=(r, s))
        results[names[2]].record(*_close(kron.vec(A @ B @ C), np.kron(C.T, A) @ kron.vec(B)), tag)
        A2 = rng.normal(size=(p, q))
        B2 = rng.normal(size=(p, q))
        results[names[3]].record(*_close(kron.vec(A2) @ kron.vec(B2), np.trace(A2.T @ B2)), tag)
        C2, D2 = rng.normal(size=(q, r)), rng.normal(size=(s, p))
        B3 = rng.normal(size=(r, s))
        results[names[4]].record(
            *_close(np.kron(A2, B3) @ np.kron(C2, D2), np.kron(A2 @ C2, B3 @ D2)), tag)
        Sa = rng.normal(size=(p, p)) + p * np.eye(p)
        Sb = rng.normal(size=(q, q)) + q * np.eye(q)
        results[names[5]].record(
            *_close(np.linalg.inv(np.kron(Sa, Sb)),
                    np.kron(np.linalg.inv(Sa), np.linalg.inv(Sb))), tag)
        results[names[6]].record(*_close(np.kron(A2, B3).T, np.kron(A2.T, B3.T)), tag)
        det_lhs = np.linalg.det(np.kron(Sa, Sb))
        det_rhs = np.linalg.det(Sa) ** q * np.linalg.det(Sb) ** p
        err = abs(det_lhs - det_rhs) / max(abs(det_rhs), 1e-300)
        results[names[7]].record(err <= KRON_RTOL, err, tag)
        results[names[8]].record(
            *_close(np.trace(np.kron(Sa, Sb)), np.trace(Sa) * np.trace(Sb)), tag)
    return list(results.values())


# --- elimination / duplication ----------------------------------------------

def _orders_for(n, rng):
    pattern = random_closed_pattern(n, rng)
    return pattern, [("basic", kron.basic_triangular_order(n)),
                     ("ultimate", kron.ultimate_triangular_order(n, pattern))]


def check_elimination_duplication(cases: int, n_max: int,
                                  rng: np.random.Generator) -> list[PropertyResult]:
    names = ["E D = 1 (exact)", "D E vec(S) = vec(S)", "E vec(L) = E vec(diag L)",
             "E (1 kron L) D E = E (1 kron L)", "(E (1 kron L) D)^-1 = E (1 kron L^-1) D",
             "E^T E vec(U) = vec(U)"]
    results = {nm: PropertyResult(nm) for nm in names}
    for c in range(cases):
        n = int(rng.integers(1, n_max + 1))
        pattern, orders = _orders_for(n, rng)
        lmat = random_unit_lower(pattern, rng)
        lfull = np.tril(rng.normal(size=(n, n))) + n * np.eye(n)
        sym = rng.normal(size=(n, n))
        sym = sym + sym.T
        upper = np.triu(rng.normal(size=(n, n)))
        eye = np.eye(n)
        for oname, order in orders:
            tag = f"case {c}, n={n}, {oname} order"
            e, d = kron.elimination_matrix(order), kron.duplication_matrix(order)
            ed = e @ d
            results[names[0]].record(np.array_equal(ed, np.eye(order.m)),
                                     _rel(ed, np.eye(order.m)), tag)
            results[names[1]].record(*_close(d @ e @ kron.vec(sym), kron.vec(sym)), tag)
            for lm in (lmat, lfull):
                results[names[2]].record(
                    *_close(e @ kron.vec(lm), e @ kron.vec(np.diag(np.diag(lm)))), tag)
                g = e @ np.kron(eye, lm) @ d
                results[names[3]].record(*_close(g @ e, e @ np.kron(eye, lm)), tag)
                results[names[4]].record(
                    *_close(np.linalg.inv(g), e @ np.kron(eye, np.linalg.inv(lm)) @ d), tag)
            results[names[5]].record(*_close(e.T @ e @ kron.vec(upper), kron.vec(upper)), tag)
    return list(results.values())


def check_printed_example() -> PropertyResult:
    res = PropertyResult("n=3 E and D match the reference matrices")
    order = kron.basic_triangular_order(3)
    e, d = kron.elimination_matrix(order), kron.duplication_matrix(order)
    res.record(np.array_equal(e, PRINTED_E3), _rel(e, PRINTED_E3), "E differs")
    res.record(np.array_equal(d, PRINTED_D3), _rel(d, PRINTED_D3), "D differs")
    return res


# --- structural properties ---------------------------------------------------

def _is_upper(mat):
    return not np.any(np.tril(mat, -1))


def _is_lower(mat):
    return not np.any(np.triu(mat, 1))


def check_structure(cases: int, n_max: int, rng: np.random.Generator) -> list[PropertyResult]:
    names = ["entry formulas match dense C, G, d",
             "closure: C[ij, kl] = 0 for ij in L, kl outside",
             "basic order: C upper triangular",
             "basic order: G lower triangular",
             "ultimate order: C lower-left block zero, C11/C22 upper",
             "ultimate order: G upper-right block zero, G lower",
             "ultimate order equals adjacent-swap fixed point",
             "E(1 kron LSL^T)D = E(1 kron LS)D E(1 kron L^T)D",
             "(E(1 kron LS)D)^-1 E vec(1) = E vec(S^-1)"]
    res = {nm: PropertyResult(nm) for nm in names}
    for c in range(cases):
        n = int(rng.integers(1, n_max + 1))
        pattern = random_closed_pattern(n, rng)
        lmat = random_unit_lower(pattern, rng)
        s = rng.uniform(0.5, 2.0, n)
        tag = f"case {c}, n={n}, pattern={sorted(pattern.off_diagonal)}"
        basic = kron.basic_triangular_order(n)
        ult = kron.ultimate_triangular_order(n, pattern)

        cb, gb = kron.build_C(lmat, basic), kron.build_G(lmat, basic)
        db = kron.build_d(s, basic)
        idx = basic.index()
        ok = True
        for (i, j) in basic.sequence:
            for (k, l) in basic.sequence:
                r, col = idx[(i, j)], idx[(k, l)]
                if cb[r, col] != kron.entry_C(i, j, k, l, lmat) or \
                        gb[r, col] != kron.entry_G(i, j, k, l, lmat):
                    ok = False
            if db[idx[(i, j)]] != kron.entry_d(i, j, s):
                ok = False
        res[names[0]].record(ok, 0.0, tag)

        viol = sum(1 for (i, j) in pattern.entries for (k, l) in pattern.complement
                   if kron.entry_C(i, j, k, l, lmat) != 0.0)
        res[names[1]].record(viol == 0, 0.0, tag)
        res[names[2]].record(_is_upper(cb), 0.0, tag)
        res[names[3]].record(_is_lower(gb), 0.0, tag)

        cu, gu = kron.build_C(lmat, ult), kron.build_G(lmat, ult)
        c11, c12, c21, c22 = kron.split_blocks(cu, ult, pattern)
        res[names[4]].record(not np.any(c21) and _is_upper(c11) and _is_upper(c22), 0.0, tag)
        g11, g12, g21, g22 = kron.split_blocks(gu, ult, pattern)
        res[names[5]].record(not np.any(g12) and _is_lower(gu), 0.0, tag)
        res[names[6]].record(kron.swap_to_fixed_point(basic, pattern) == ult, 0.0, tag)

        e, d = kron.elimination_matrix(basic), kron.duplication_matrix(basic)
        eye = np.eye(n)
        ls = lmat @ np.diag(s)
        lhs = e @ np.kron(eye, ls @ lmat.T) @ d
        rhs = (e @ np.kron(eye, ls) @ d) @ (e @ np.kron(eye, lmat.T) @ d)
        res[names[7]].record(*_close(lhs, rhs), tag)
        chain = np.linalg.solve(e @ np.kron(eye, ls) @ d, e @ kron.vec(eye))
        res[names[8]].record(*_close(chain, db), tag)
    return list(res.values())


def check_sparse_against_dense(cases: int, n_max: int,
                               rng: np.random.Generator) -> list[PropertyResult]:
    """Sparse recursions versus dense solves of ``G22 v2 = h2`` and ``C22 y2 = d2``."""
    rv = PropertyResult("factorization v2 equals dense G22 solve (1e-12)")
    ry = PropertyResult("selected inverse y2 equals dense C22 solve (1e-12)")
    for c in range(cases):
        n = int(rng.integers(1, n_max + 1))
        pattern = random_closed_pattern(n, rng)
        a = random_spd(pattern, rng, kind="factor" if c % 2 else "dominant")
        tag = f"case {c}, n={n}"
        f = ldl_factorize(a)
        y = selected_inverse(f)
        ult = kron.ultimate_triangular_order(n, f.pattern)
        k = len(f.pattern.complement)
        inside = ult.sequence[k:]

        g22 = kron.build_G(f, ult)[k:, k:]
        h2 = kron.build_h(a, ult)[k:]
        v2 = np.linalg.solve(g22, h2)
        v_sparse = np.array([f.L(i, j) * f.S(j) for i, j in inside])
        rv.record(*_close(v_sparse, v2, ORACLE_RTOL), tag)

        c22 = kron.build_C(f, ult)[k:, k:]
        d2 = kron.build_d(f, ult)[k:]
        y2 = np.linalg.solve(c22, d2)
        y_sparse = np.array([y[p] for p in inside])
        ry.record(*_close(y_sparse, y2, ORACLE_RTOL), tag)
    return [rv, ry]


def run_suite(n_max: int = 8, cases: int = 100, seed: int = 0) -> list[PropertyResult]:
    """Every dense-oracle property, each over ``cases`` seeded instances."""
    if n_max > kron.MAX_ORACLE_N:
        raise ValueError(f"n_max must be <= {kron.MAX_ORACLE_N}")
    rng = np.random.default_rng(seed)
    out = [check_printed_example()]
    out += check_kronecker_identities(cases, rng)
    out += check_elimination_duplication(cases, n_max, rng)
    out += check_structure(cases, n_max, rng)
    out += check_sparse_against_dense(cases, n_max, rng)
    return out
