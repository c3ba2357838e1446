"""Minimal linear-program container and a solve contract with dual prices.

The backend is HiGHS (dual simplex) through :func:`scipy.optimize.linprog`.
Constraints are collected as sparse COO triplets; rows carrying a ``tag``
get their dual multipliers reported by :func:`solve`. Duals are expressed
as d(objective)/d(rhs) in the orientation the row was written in, so the
dual of ``supply + unsupplied == load`` is the marginal cost of load.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .domain import HeatMarketError

FEAS_TOL = 1e-6
_HIGHS_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


class NumericalFailure(HeatMarketError):
    pass


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LinearProgram:
    """Minimization LP built incrementally.

    Variables are added in named groups and addressed by integer index.
    Rows are added with :meth:`add_rows` (vectorized) or :meth:`add_row`.
    """

    def __init__(self, name: str = "lp"):
        self.name = name
        self._lb: list[np.ndarray] = []
        self._ub: list[np.ndarray] = []
        self._cost: list[np.ndarray] = []
        self._names: list[tuple[str, int, int]] = []
        self.n_vars = 0
        # per sense: list of (rows, cols, vals), rhs chunks, row count
        self._rows = {"==": [], "<=": []}
        self._rhs = {"==": [], "<=": []}
        self._nrows = {"==": 0, "<=": 0}
        self._tags: dict[str, list[tuple[str, np.ndarray, float]]] = {}
        self.constant = 0.0

    def add_variables(self, n: int, lb=0.0, ub=np.inf, cost=0.0, name: str = "x") -> np.ndarray:
        lb = np.broadcast_to(np.asarray(lb, dtype=float), (n,)).copy()
        ub = np.broadcast_to(np.asarray(ub, dtype=float), (n,)).copy()
        if np.any(lb > ub):
            raise ValueError(f"variable group {name!r}: lower bound above upper bound")
        self._lb.append(lb)
        self._ub.append(ub)
        self._cost.append(np.broadcast_to(np.asarray(cost, dtype=float), (n,)).copy())
        idx = np.arange(self.n_vars, self.n_vars + n)
        self._names.append((name, self.n_vars, n))
        self.n_vars += n
        return idx

    def add_rows(self, sense: str, rows, cols, vals, rhs, tag: str | None = None) -> None:
        """Add ``len(rhs)`` rows given COO triplets with row ids local to this call."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if cols.size and (cols.min() < 0 or cols.max() >= self.n_vars):
            raise ValueError("constraint references an undeclared variable")
        if rows.size and (rows.min() < 0 or rows.max() >= rhs.size):
            raise ValueError("row id outside the rhs range")
        flip = 1.0
        if sense == ">=":
            sense, vals, rhs, flip = "<=", -vals, -rhs, -1.0
        elif sense not in ("==", "<="):
            raise ValueError(f"unknown sense {sense!r}")
        base = self._nrows[sense]
        self._rows[sense].append((rows + base, cols, vals))
        self._rhs[sense].append(rhs)
        if tag is not None:
            self._tags.setdefault(tag, []).append((sense, np.arange(base, base + rhs.size), flip))
        self._nrows[sense] += rhs.size

    def add_row(self, sense: str, coeffs: dict[int, float], rhs: float, tag: str | None = None):
        cols = np.fromiter(coeffs.keys(), dtype=np.int64, count=len(coeffs))
        vals = np.fromiter(coeffs.values(), dtype=float, count=len(coeffs))
        self.add_rows(sense, np.zeros(len(coeffs), dtype=np.int64), cols, vals, [rhs], tag)

    @property
    def cost(self) -> np.ndarray:
        return np.concatenate(self._cost) if self._cost else np.zeros(0)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self._lb:
            return np.zeros(0), np.zeros(0)
        return np.concatenate(self._lb), np.concatenate(self._ub)

    def matrix(self, sense: str) -> tuple[sp.csr_matrix, np.ndarray]:
        n = self._nrows[sense]
        if n == 0:
            return sp.csr_matrix((0, self.n_vars)), np.zeros(0)
        r, c, v = (np.concatenate(x) for x in zip(*self._rows[sense]))
        mat = sp.coo_matrix((v, (r, c)), shape=(n, self.n_vars)).tocsr()
        mat.sum_duplicates()
        return mat, np.concatenate(self._rhs[sense])

    @property
    def tags(self) -> list[str]:
        return list(self._tags)

    def variable_names(self) -> list[str]:
        out = []
        for name, start, n in self._names:
            out.extend(f"{name}_{k}" for k in range(n))
        return out


@dataclass(frozen=True)
class LpSolution:
    status: Status
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = float("nan")
    duals: dict[str, np.ndarray] = field(default_factory=dict)
    dual_objective: float = float("nan")
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp``; infeasible/unbounded come back as statuses."""
    a_eq, b_eq = lp.matrix("==")
    a_ub, b_ub = lp.matrix("<=")
    lb, ub = lp.bounds
    cost = lp.cost
    if lp.n_vars == 0:
        return LpSolution(Status.OPTIMAL, np.zeros(0), lp.constant, {t: np.zeros(0) for t in lp.tags}, lp.constant)
    bounds = np.column_stack([lb, ub])
    bounds = [(lo if np.isfinite(lo) else None, hi if np.isfinite(hi) else None) for lo, hi in bounds]
    res = linprog(
        cost,
        A_ub=a_ub if a_ub.shape[0] else None,
        b_ub=b_ub if a_ub.shape[0] else None,
        A_eq=a_eq if a_eq.shape[0] else None,
        b_eq=b_eq if a_eq.shape[0] else None,
        bounds=bounds,
        method="highs-ds",
        options=_HIGHS_OPTIONS,
    )
    if res.status == 2:
        return LpSolution(Status.INFEASIBLE, message=res.message)
    if res.status == 3:
        return LpSolution(Status.UNBOUNDED, message=res.message)
    if res.status != 0:
        raise NumericalFailure(f"{lp.name}: {res.message}")

    y_eq = res.eqlin.marginals if a_eq.shape[0] else np.zeros(0)
    y_ub = res.ineqlin.marginals if a_ub.shape[0] else np.zeros(0)
    duals = {}
    for tag, chunks in lp._tags.items():
        parts = []
        for sense, rows, flip in chunks:
            parts.append(flip * (y_eq if sense == "==" else y_ub)[rows])
        duals[tag] = np.concatenate(parts)

    dual_obj = float(b_eq @ y_eq + b_ub @ y_ub)
    fin_lb, fin_ub = np.isfinite(lb), np.isfinite(ub)
    dual_obj += float(lb[fin_lb] @ res.lower.marginals[fin_lb])
    dual_obj += float(ub[fin_ub] @ res.upper.marginals[fin_ub])
    return LpSolution(
        Status.OPTIMAL,
        np.asarray(res.x, dtype=float),
        float(res.fun) + lp.constant,
        duals,
        dual_obj + lp.constant,
        res.message,
    )


def max_violation(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest row or bound violation of ``x``, rows scaled by their max |coef|."""
    worst = 0.0
    lb, ub = lp.bounds
    if x.size:
        worst = max(worst, float(np.max(lb - x, initial=0.0)), float(np.max(x - ub, initial=0.0)))
    for sense in ("==", "<="):
        mat, rhs = lp.matrix(sense)
        if not mat.shape[0]:
            continue
        scale = np.maximum(abs(mat).max(axis=1).toarray().ravel(), 1.0)
        resid = (mat @ x - rhs) / scale
        worst = max(worst, float(np.max(np.abs(resid) if sense == "==" else resid, initial=0.0)))
    return worst


def write_lp_file(lp: LinearProgram, path: str | Path) -> Path:
    """Dump ``lp`` in CPLEX LP text format for debugging with external solvers."""
    path = Path(path)
    names = lp.variable_names()
    lb, ub = lp.bounds

    def expr(cols, vals):
        terms = []
        for c, v in zip(cols, vals):
            if v == 0:
                continue
            sign = "-" if v < 0 else "+"
            terms.append(f"{sign} {abs(v):.12g} {names[c]}")
        text = " ".join(terms) or "0 " + (names[0] if names else "")
        return text[2:] if text.startswith("+ ") else text

    lines = [f"\\ {lp.name}", "Minimize", " obj: " + expr(range(lp.n_vars), lp.cost), "Subject To"]
    for sense, op in (("==", "="), ("<=", "<=")):
        mat, rhs = lp.matrix(sense)
        for k in range(mat.shape[0]):
            row = mat.getrow(k)
            lines.append(f" {'e' if sense == '==' else 'u'}{k}: {expr(row.indices, row.data)} {op} {rhs[k]:.12g}")
    lines.append("Bounds")
    for k, name in enumerate(names):
        lo = "-inf" if not np.isfinite(lb[k]) else f"{lb[k]:.12g}"
        hi = "+inf" if not np.isfinite(ub[k]) else f"{ub[k]:.12g}"
        lines.append(f" {lo} <= {name} <= {hi}")
    lines.append("End")
    path.write_text("\n".join(lines) + "\n")
    return path
