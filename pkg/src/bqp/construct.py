"""Construction heuristics: trivial, random and greedy starting solutions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Instance, Solution, make_solution


@dataclass
class GreedyTrace:
    """Per-row decision record of one greedy run.

    `order` is the processing permutation (rows sorted by descending
    potential c_i + sum_j max(q_ij, 0), stable on ties) and `decisions`
    holds one (keep_value, take_value, chosen_bit) triple per processed row.
    """

    order: np.ndarray
    decisions: list[tuple[int, int, int]]


def trivial_solution(instance: Instance) -> Solution:
    """The all-zero assignment; objective 0 on every instance."""
    return Solution(
        np.zeros(instance.m, dtype=np.int8),
        np.zeros(instance.n, dtype=np.int8),
        0,
    )


def random_solution(instance: Instance, p: float, rng: np.random.Generator) -> Solution:
    """Each bit is set independently with probability p from the given stream."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    x = (rng.random(instance.m) < p).astype(np.int8)
    y = (rng.random(instance.n) < p).astype(np.int8)
    return make_solution(instance, x, y)


def greedy_trace(instance: Instance) -> tuple[Solution, GreedyTrace]:
    """Greedy construction, returning the solution together with its trace.

    Rows are processed in descending order of the potential
    w+_i = c_i + sum_j max(q_ij, 0) (stable tie-break by original index).
    At each row the value of switching the row on, with all later rows off
    and columns re-optimized, is compared against keeping it off; the row
    is taken only on strict improvement.  Runs in O(mn).
    """
    Q, c, d = instance.Q, instance.c, instance.d
    w_plus = c + np.maximum(Q, 0).sum(axis=1)
    order = np.argsort(-w_plus, kind="stable")

    x = np.zeros(instance.m, dtype=np.int8)
    s = d.copy()
    decisions: list[tuple[int, int, int]] = []
    for i in order:
        f0 = int(np.maximum(s, 0).sum())
        f1 = int(c[i]) + int(np.maximum(s + Q[i], 0).sum())
        if f0 >= f1:
            decisions.append((f0, f1, 0))
        else:
            x[i] = 1
            s += Q[i]
            decisions.append((f0, f1, 1))
    y = (s > 0).astype(np.int8)
    return make_solution(instance, x, y), GreedyTrace(order=order, decisions=decisions)


def greedy(instance: Instance) -> Solution:
    """Greedy construction; see `greedy_trace` for the full decision record."""
    solution, _ = greedy_trace(instance)
    return solution
