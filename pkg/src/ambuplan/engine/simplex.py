"""Bounded-variable primal simplex over a sparse revised formulation.

Rows are converted once into equality standard form (slack columns for
inequalities). The basis inverse is represented by a sparse LU factorization
(scipy ``splu``) plus a product-form eta file that is folded back into a fresh
factorization every few dozen pivots. Phase 1 minimizes the total artificial
value from a slack crash basis; phase 2 continues on the true costs from the
feasible basis phase 1 leaves behind.

Anti-cycling: Dantzig pricing by default, switching to Bland's rule whenever
the objective has not improved for 5 * (num_vars + num_rows) iterations.
Pivots smaller than PIVOT_TOL are never accepted; if no acceptable pivot
exists after a fresh refactorization the solver raises
NumericalBreakdownError rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .program import (
    LinearProgram,
    LpSolution,
    LpStatus,
    NumericalBreakdownError,
)

FEAS_TOL = 1e-9      # row/bound tolerance, scaled by 1 + |reference value|
PIVOT_TOL = 1e-7     # smallest acceptable pivot magnitude
INTEGRALITY_TOL = 1e-6
REFACTOR_EVERY = 64  # eta-file length before folding into a fresh LU

BASIC, AT_LOWER, AT_UPPER, FREE = 0, 1, 2, 3


@dataclass
class StandardForm:
    """Equality form min c x, A x = b, lo <= x <= up shared across solves."""

    m: int
    n_struct: int
    n_real: int            # structural + slack columns
    A_csr: sparse.csr_array
    A_csc: sparse.csc_array
    AT_csr: sparse.csr_array
    b: np.ndarray
    cost_real: np.ndarray
    lower_real: np.ndarray
    upper_real: np.ndarray


@dataclass
class CoreResult:
    status: LpStatus
    x_real: np.ndarray | None
    objective: float | None
    iterations: int


def build_standard_form(lp: LinearProgram) -> StandardForm:
    """Append one slack column per inequality row; equalities get none."""
    m = lp.num_rows
    n = lp.num_vars
    slack_count = sum(1 for r in lp.rows if r.relation != "=")
    n_real = n + slack_count

    rows_idx: list[int] = []
    cols_idx: list[int] = []
    vals: list[float] = []
    b = np.zeros(m)
    next_slack = n
    for k, row in enumerate(lp.rows):
        b[k] = row.rhs
        for i, v in row.coeffs:
            if v != 0.0:
                rows_idx.append(k)
                cols_idx.append(i)
                vals.append(v)
        if row.relation != "=":
            rows_idx.append(k)
            cols_idx.append(next_slack)
            vals.append(1.0 if row.relation == "<=" else -1.0)
            next_slack += 1

    A = sparse.coo_array(
        (np.asarray(vals, dtype=np.float64),
         (np.asarray(rows_idx, dtype=np.int64), np.asarray(cols_idx, dtype=np.int64))),
        shape=(m, n_real))
    A_csr = A.tocsr()
    A_csc = A.tocsc()
    AT_csr = A_csc.T.tocsr()

    cost = np.zeros(n_real)
    cost[:n] = lp.objective
    lower = np.zeros(n_real)
    upper = np.full(n_real, np.inf)
    lower[:n] = lp.lower
    upper[:n] = lp.upper
    return StandardForm(m=m, n_struct=n, n_real=n_real, A_csr=A_csr, A_csc=A_csc,
                        AT_csr=AT_csr, b=b, cost_real=cost,
                        lower_real=lower, upper_real=upper)


def _solve_no_rows(std: StandardForm, lo: np.ndarray, up: np.ndarray) -> CoreResult:
    """Row-free program: each variable sits at its cost-preferred bound."""
    c = std.cost_real
    x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(up), up, 0.0))
    pick_up = (c < 0) & np.isfinite(up)
    x[pick_up] = up[pick_up]
    unbounded = ((c < 0) & ~np.isfinite(up)) | ((c > 0) & ~np.isfinite(lo))
    if np.any(unbounded):
        return CoreResult(LpStatus.UNBOUNDED, None, None, 0)
    return CoreResult(LpStatus.OPTIMAL, x, float(c @ x), 0)


class _Solver:
    """One bounded-simplex run over a shared StandardForm."""

    def __init__(self, std: StandardForm,
                 lo_struct: np.ndarray | None, hi_struct: np.ndarray | None,
                 conservative: bool = False):
        self.std = std
        self.pivot_tol = 1e-6 if conservative else PIVOT_TOL
        self.refactor_every = 16 if conservative else REFACTOR_EVERY
        m, n_real = std.m, std.n_real
        self.m = m
        self.n_real = n_real
        self.N = n_real + m
        self.lo = np.concatenate([std.lower_real, np.zeros(m)])
        self.up = np.concatenate([std.upper_real, np.zeros(m)])
        if lo_struct is not None:
            self.lo[:std.n_struct] = lo_struct
        if hi_struct is not None:
            self.up[:std.n_struct] = hi_struct
        self.x = np.zeros(self.N)
        self.status = np.full(self.N, AT_LOWER, dtype=np.int8)
        self.basis = np.zeros(m, dtype=np.int64)
        self.g = np.ones(m)  # artificial column signs
        self.lu = None
        self.etas: list[tuple[int, np.ndarray]] = []
        self.updates_since_refactor = 0
        self.iterations = 0
        self.bland_threshold = 5 * (std.n_struct + m)
        self.max_iterations = 20000 + 50 * (m + n_real)

    # ----- basis linear algebra -------------------------------------------

    def column(self, q: int) -> np.ndarray:
        col = np.zeros(self.m)
        if q < self.n_real:
            A = self.std.A_csc
            s, e = A.indptr[q], A.indptr[q + 1]
            col[A.indices[s:e]] = A.data[s:e]
        else:
            k = q - self.n_real
            col[k] = self.g[k]
        return col

    def refactor(self) -> None:
        m, n_real = self.m, self.n_real
        A = self.std.A_csc
        idx_parts: list[np.ndarray] = []
        dat_parts: list[np.ndarray] = []
        indptr = np.zeros(m + 1, dtype=np.int64)
        for pos, v in enumerate(self.basis):
            if v < n_real:
                s, e = A.indptr[v], A.indptr[v + 1]
                idx_parts.append(A.indices[s:e])
                dat_parts.append(A.data[s:e])
                indptr[pos + 1] = indptr[pos] + (e - s)
            else:
                k = v - n_real
                idx_parts.append(np.array([k], dtype=A.indices.dtype))
                dat_parts.append(np.array([self.g[k]]))
                indptr[pos + 1] = indptr[pos] + 1
        B = sparse.csc_array(
            (np.concatenate(dat_parts), np.concatenate(idx_parts), indptr),
            shape=(m, m))
        try:
            self.lu = splu(B.tocsc(), permc_spec="COLAMD")
        except RuntimeError as exc:
            raise NumericalBreakdownError(
                f"basis factorization failed: {exc}") from exc
        self.etas = []
        self.updates_since_refactor = 0
        # recompute basic values from scratch to shed accumulated drift
        xn = self.x.copy()
        xn[self.basis] = 0.0
        rhs = self.std.b - self.std.A_csr @ xn[:n_real]
        art = xn[n_real:]
        if np.any(art):
            rhs = rhs - self.g * art
        self.x[self.basis] = self.lu.solve(rhs)

    def ftran(self, col: np.ndarray) -> np.ndarray:
        v = self.lu.solve(col)
        for r, w in self.etas:
            t = v[r] / w[r]
            if t != 0.0:
                v = v - w * t
            v[r] = t
        return v

    def btran(self, c: np.ndarray) -> np.ndarray:
        u = c.copy()
        for r, w in reversed(self.etas):
            dot = w @ u - w[r] * u[r]
            u[r] = (u[r] - dot) / w[r]
        return self.lu.solve(u, trans="T")

    # ----- initialization --------------------------------------------------

    def crash_basis(self) -> None:
        """Slack crash: slacks carry their rows when feasible, else artificials."""
        std = self.std
        n_real, m = self.n_real, self.m
        lo_f = np.isfinite(self.lo[:n_real])
        up_f = np.isfinite(self.up[:n_real])
        self.status[:n_real] = np.where(lo_f, AT_LOWER, np.where(up_f, AT_UPPER, FREE))
        self.x[:n_real] = np.where(lo_f, self.lo[:n_real],
                                   np.where(up_f, self.up[:n_real], 0.0))
        self.status[n_real:] = AT_LOWER
        self.x[n_real:] = 0.0

        resid = std.b - std.A_csr @ self.x[:n_real]
        # find each row's slack column, if any: it is the trailing entry
        # appended during standardization (column index >= n_struct).
        A = std.A_csr
        for k in range(m):
            slack_idx = -1
            sigma = 0.0
            s, e = A.indptr[k], A.indptr[k + 1]
            for p in range(e - 1, s - 1, -1):
                if A.indices[p] >= std.n_struct:
                    slack_idx = int(A.indices[p])
                    sigma = float(A.data[p])
                    break
            placed = False
            if slack_idx >= 0:
                sval = sigma * (resid[k] + sigma * self.x[slack_idx])
                # x[slack] is 0 here, kept explicit for clarity
                if sval >= -1e-12:
                    self.basis[k] = slack_idx
                    self.status[slack_idx] = BASIC
                    self.x[slack_idx] = max(sval, 0.0)
                    placed = True
            if not placed:
                aidx = n_real + k
                self.g[k] = 1.0 if resid[k] >= 0 else -1.0
                self.basis[k] = aidx
                self.status[aidx] = BASIC
                self.x[aidx] = abs(resid[k])
                self.up[aidx] = np.inf

    # ----- pricing and pivoting --------------------------------------------

    def phase_cost(self, phase: int) -> np.ndarray:
        c = np.zeros(self.N)
        if phase == 1:
            c[self.n_real:] = 1.0
        else:
            c[:self.n_real] = self.std.cost_real
        return c

    def choose_entering(self, d: np.ndarray, dtol: float, bland: bool) -> int:
        st = self.status
        movable = (st != BASIC) & (self.lo < self.up)
        viol = np.zeros(self.N)
        sel = movable & (st == AT_LOWER) & (d < -dtol)
        viol[sel] = -d[sel]
        sel = movable & (st == AT_UPPER) & (d > dtol)
        viol[sel] = d[sel]
        sel = movable & (st == FREE) & (np.abs(d) > dtol)
        viol[sel] = np.abs(d[sel])
        if not viol.any():
            return -1
        if bland:
            return int(np.argmax(viol > 0))
        return int(np.argmax(viol))

    def run_phase(self, phase: int) -> str:
        """Returns 'optimal' or 'unbounded' (phase 2 only)."""
        c = self.phase_cost(phase)
        dtol = 1e-7 + 1e-11 * float(np.abs(c).max(initial=0.0))
        z = float(c @ self.x)
        since_improve = 0

        while True:
            if self.iterations >= self.max_iterations:
                raise NumericalBreakdownError(
                    f"iteration cap {self.max_iterations} exceeded in phase {phase}")
            # pricing against a clean factorization is trusted as-is
            fresh = not self.etas and self.updates_since_refactor == 0
            y = self.btran(c[self.basis])
            d = np.empty(self.N)
            d[:self.n_real] = c[:self.n_real] - self.std.AT_csr @ y
            d[self.n_real:] = c[self.n_real:] - self.g * y
            bland = since_improve > self.bland_threshold
            q = self.choose_entering(d, dtol, bland)
            if q < 0:
                if fresh:
                    return "optimal"
                # re-certify optimality against a clean factorization
                self.refactor()
                z = float(c @ self.x)
                continue

            if self.status[q] == AT_LOWER or (self.status[q] == FREE and d[q] < 0):
                sigma = 1.0
            else:
                sigma = -1.0

            w = self.ftran(self.column(q))
            step, r = self._ratio(q, sigma, w, bland)
            if step is None:
                # no finite blocking step and no own bound to flip to
                if not fresh:
                    self.refactor()
                    z = float(c @ self.x)
                    continue
                if phase == 1:
                    raise NumericalBreakdownError(
                        "phase 1 claims an unbounded improving ray")
                return "unbounded"

            self.iterations += 1
            z_new = z + step * sigma * d[q]
            if z_new < z - 1e-9 * (1.0 + abs(z)):
                since_improve = 0
            else:
                since_improve += 1
            z = z_new
            self._apply(q, sigma, w, step, r)
            if (len(self.etas) >= self.refactor_every
                    or self.updates_since_refactor >= 4 * self.refactor_every):
                self.refactor()
                z = float(c @ self.x)

    def _ratio(self, q: int, sigma: float, w: np.ndarray,
               bland: bool) -> tuple[float | None, int]:
        """Largest step before a basic variable or q's own range blocks.

        Returns (step, r) with r the blocking basis position, or r = -1 for a
        bound flip of q itself, or (None, -1) when nothing blocks.
        """
        xB = self.x[self.basis]
        loB = self.lo[self.basis]
        upB = self.up[self.basis]
        sw = sigma * w
        tol = self.pivot_tol
        with np.errstate(divide="ignore", invalid="ignore"):
            t_lo = np.where(sw > tol, (xB - loB) / sw, np.inf)
            t_up = np.where(sw < -tol, (xB - upB) / sw, np.inf)
        steps = np.minimum(t_lo, t_up)
        np.nan_to_num(steps, copy=False, nan=np.inf, posinf=np.inf)
        np.maximum(steps, 0.0, out=steps)

        r = int(np.argmin(steps)) if self.m else -1
        step_basic = float(steps[r]) if self.m else np.inf
        if self.m and np.isfinite(step_basic):
            # among (near-)minimal steps prefer the largest pivot for
            # stability; under Bland's rule the lowest variable index instead
            tie = steps <= step_basic + 1e-9 * (1.0 + step_basic)
            cand = np.flatnonzero(tie)
            if bland:
                r = int(cand[np.argmin(self.basis[cand])])
            else:
                r = int(cand[np.argmax(np.abs(sw[cand]))])
            step_basic = float(steps[r])

        step_self = self.up[q] - self.lo[q]  # inf for FREE or one-sided
        if step_self <= step_basic:
            if not np.isfinite(step_self):
                return (None, -1)
            return (step_self, -1)
        if not np.isfinite(step_basic):
            return (None, -1)
        return (step_basic, r)

    def _apply(self, q: int, sigma: float, w: np.ndarray,
               step: float, r: int) -> None:
        if step != 0.0:
            self.x[self.basis] = self.x[self.basis] - step * sigma * w
        if r < 0:
            # bound flip: q crosses its full range, basis unchanged
            if sigma > 0:
                self.x[q] = self.up[q]
                self.status[q] = AT_UPPER
            else:
                self.x[q] = self.lo[q]
                self.status[q] = AT_LOWER
            self.updates_since_refactor += 1
            return
        enter_val = self.x[q] + sigma * step
        leave = int(self.basis[r])
        if sigma * w[r] > 0:
            self.x[leave] = self.lo[leave]
            self.status[leave] = AT_LOWER
        else:
            self.x[leave] = self.up[leave]
            self.status[leave] = AT_UPPER
        if leave >= self.n_real:
            # an artificial that left the basis never returns
            self.up[leave] = 0.0
            self.x[leave] = 0.0
            self.status[leave] = AT_LOWER
        self.basis[r] = q
        self.status[q] = BASIC
        self.x[q] = enter_val
        self.etas.append((r, w))
        self.updates_since_refactor += 1

    # ----- driver -----------------------------------------------------------

    def solve(self) -> CoreResult:
        if np.any(self.lo > self.up):
            return CoreResult(LpStatus.INFEASIBLE, None, None, 0)
        if self.m == 0:
            return _solve_no_rows(self.std, self.lo[:self.n_real],
                                  self.up[:self.n_real])
        self.crash_basis()
        self.refactor()

        art_total = float(np.abs(self.x[self.n_real:]).sum())
        p1_tol = FEAS_TOL * (1.0 + float(np.abs(self.std.b).sum()))
        if art_total > p1_tol:
            self.run_phase(1)
            art_total = float(np.abs(self.x[self.n_real:]).sum())
            if art_total > p1_tol:
                return CoreResult(LpStatus.INFEASIBLE, None, None, self.iterations)
        # pin every artificial for phase 2
        self.up[self.n_real:] = 0.0

        outcome = self.run_phase(2)
        if outcome == "unbounded":
            return CoreResult(LpStatus.UNBOUNDED, None, None, self.iterations)
        self._verify()
        x_real = self.x[:self.n_real].copy()
        obj = float(self.std.cost_real @ x_real)
        return CoreResult(LpStatus.OPTIMAL, x_real, obj, self.iterations)

    def _verify(self) -> None:
        """Exact-form residual and bound check; breakdown when irreparable."""
        for attempt in range(3):
            x_real = self.x[:self.n_real]
            resid = self.std.A_csr @ x_real - self.std.b
            art = self.x[self.n_real:]
            if np.any(art):
                resid = resid + self.g * art
            row_tol = FEAS_TOL * (1.0 + np.abs(self.std.b))
            rows_ok = bool(np.all(np.abs(resid) <= row_tol * 100))
            lo, up = self.lo[:self.n_real], self.up[:self.n_real]
            lo_ok = bool(np.all(x_real >= lo - 1e-7 * (1.0 + np.abs(np.where(np.isfinite(lo), lo, 0.0)))))
            up_ok = bool(np.all(x_real <= up + 1e-7 * (1.0 + np.abs(np.where(np.isfinite(up), up, 0.0)))))
            if rows_ok and lo_ok and up_ok:
                return
            self.refactor()
        raise NumericalBreakdownError(
            "optimal basis failed residual verification after refactorization")


def core_solve(std: StandardForm,
               lo_struct: np.ndarray | None = None,
               hi_struct: np.ndarray | None = None) -> CoreResult:
    """Solve the continuous program over std with optional bound overrides.

    A numerical failure triggers one full retry under conservative settings
    (tighter pivot threshold, more frequent refactorization) before the
    breakdown is reported to the caller.
    """
    try:
        return _Solver(std, lo_struct, hi_struct).solve()
    except NumericalBreakdownError:
        return _Solver(std, lo_struct, hi_struct, conservative=True).solve()


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase bounded-variable primal simplex on the continuous relaxation.

    Statuses: OPTIMAL with a primal-feasible x (rows within FEAS_TOL scaled by
    1 + |rhs|), INFEASIBLE, or UNBOUNDED. Integrality flags are ignored here.
    """
    std = build_standard_form(lp)
    res = core_solve(std)
    if res.status is not LpStatus.OPTIMAL:
        return LpSolution(res.status, None, None, res.iterations)
    x = res.x_real[:lp.num_vars].copy()
    return LpSolution(LpStatus.OPTIMAL, x, float(lp.objective @ x), res.iterations)
