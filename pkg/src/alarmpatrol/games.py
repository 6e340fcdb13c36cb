"""Constant-sum matrix games solved by linear programming.

The defender picks a row, the attacker a column; the payoff matrix stores the
defender utility and the attacker receives one minus it.  Both players' maxmin
strategies come from a pair of LPs whose values must agree by duality, which
doubles as an internal numerical check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

import numpy as np

from .lp import LinearProgram, LinearProgramSolution, lp_solve  # noqa: F401

PROB_CLIP = 1e-9
VALUE_TOL = 1e-6


@dataclass(frozen=True)
class MatrixGame:
    """Defender-utility matrix with optional action labels."""

    payoff: np.ndarray
    row_actions: tuple[Hashable, ...] | None = None
    col_actions: tuple[Hashable, ...] | None = None

    def __post_init__(self) -> None:
        payoff = np.asarray(self.payoff, dtype=float)
        if payoff.ndim != 2 or payoff.size == 0:
            raise ValueError("payoff must be a nonempty 2-D matrix")
        if not np.all(np.isfinite(payoff)):
            raise ValueError("payoff entries must be finite")
        object.__setattr__(self, "payoff", payoff)


@dataclass(frozen=True)
class MixedStrategy:
    """Probability distribution over hashable actions; stores the support only."""

    probs: dict[Any, float] = field(default_factory=dict)

    def prob(self, action: Any) -> float:
        return self.probs.get(action, 0.0)

    def support(self) -> tuple[Any, ...]:
        return tuple(self.probs)

    @classmethod
    def pure(cls, action: Any) -> "MixedStrategy":
        return cls({action: 1.0})

    @classmethod
    def from_weights(
        cls, actions: Sequence[Any], weights: Sequence[float]
    ) -> "MixedStrategy":
        """Build a distribution, clipping stray tiny weights and renormalizing."""
        w = np.asarray(weights, dtype=float)
        w = np.where(w < PROB_CLIP, 0.0, w)
        total = w.sum()
        if total <= 0.0:
            raise ValueError("mixed strategy needs positive total weight")
        w = w / total
        return cls({a: float(p) for a, p in zip(actions, w) if p > 0.0})


def solve_zero_sum(game: MatrixGame) -> tuple[MixedStrategy, MixedStrategy, float]:
    """Maxmin/minmax pair and game value for a constant-sum game.

    The row player maximizes the minimal column payoff; the column strategy is
    the attacker minmax distribution (the one row generation best-responds
    to).  Payoffs are shifted to be non-negative so the value variable can be
    kept sign-constrained.
    """
    U = game.payoff
    n_rows, n_cols = U.shape
    shift = float(min(0.0, U.min()))
    Us = U - shift

    # maximize v  s.t.  v - sum_r U[r,t] x_r <= 0 per column, sum x = 1
    A_ub = np.hstack([-Us.T, np.ones((n_cols, 1))])
    A_eq = np.hstack([np.ones((1, n_rows)), np.zeros((1, 1))])
    c = np.zeros(n_rows + 1)
    c[-1] = 1.0
    row_sol = lp_solve(
        LinearProgram(c=c, A_ub=A_ub, b_ub=np.zeros(n_cols), A_eq=A_eq, b_eq=np.ones(1))
    )
    if row_sol.status != "optimal":
        raise ArithmeticError(f"row LP ended with status {row_sol.status}")

    # minimize u  s.t.  sum_t U[r,t] y_t - u <= 0 per row, sum y = 1
    A_ub = np.hstack([Us, -np.ones((n_rows, 1))])
    A_eq = np.hstack([np.ones((1, n_cols)), np.zeros((1, 1))])
    c = np.zeros(n_cols + 1)
    c[-1] = -1.0
    col_sol = lp_solve(
        LinearProgram(c=c, A_ub=A_ub, b_ub=np.zeros(n_rows), A_eq=A_eq, b_eq=np.ones(1))
    )
    if col_sol.status != "optimal":
        raise ArithmeticError(f"column LP ended with status {col_sol.status}")

    value = float(row_sol.x[-1]) + shift
    value_col = -float(col_sol.objective) + shift
    if abs(value - value_col) > VALUE_TOL:
        raise ArithmeticError(
            f"LP duality gap {abs(value - value_col)} exceeds {VALUE_TOL}"
        )

    row_actions = game.row_actions or tuple(range(n_rows))
    col_actions = game.col_actions or tuple(range(n_cols))
    row = MixedStrategy.from_weights(row_actions, row_sol.x[:n_rows])
    col = MixedStrategy.from_weights(col_actions, col_sol.x[:n_cols])
    return row, col, value
