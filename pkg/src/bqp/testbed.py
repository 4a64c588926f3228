"""Benchmark instance families, the bipartite graph generator and file I/O.

Five generator families cover the classic applications: dense random
weights, maximum weight biclique, maximum weight induced subgraph,
bipartite max-cut, and rank-one binary matrix factorization.  All
randomness flows through PCG64 generators seeded from a single
SeedSequence per instance, split into named child streams (degrees,
edges, weights for graph-based families; one stream per weight array
otherwise), so a (family, m, n, seed) tuple reproduces byte-identical
files on any platform.  Normal weights are drawn by inverse CDF on the
uniform stream and rounded half away from zero.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .core import Instance, Solution, evaluate

FAMILIES = ("random", "biclique", "maxinduced", "maxcut", "matrixfact")

DEGREE_RESAMPLE_FACTOR = 50  # switch to the deterministic fixer after 50*(m+n) resamples
REALIZATION_RETRIES = 50


class FormatError(ValueError):
    """A text document does not parse as a valid instance or solution."""


class CertificateError(ValueError):
    """A solution certificate fails re-verification against its instance."""


class GenerationError(RuntimeError):
    """The graph generator could not realize the requested degrees."""


@dataclass(frozen=True)
class BipartiteGraphSpec:
    """Degree-constrained random bipartite graph parameters.

    Left nodes get degrees in [left_min, left_max] (each at most n), right
    nodes in [right_min, right_max] (at most m).  The bounds must allow the
    degree sums to meet: m*left_min <= n*right_max and m*left_max >= n*right_min.
    """

    m: int
    n: int
    left_min: int
    left_max: int
    right_min: int
    right_max: int
    weight_mean: float
    weight_sigma: float = 100.0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("need at least one node on each side")
        if not 0 <= self.left_min <= self.left_max <= self.n:
            raise ValueError("left degree bounds must satisfy 0 <= min <= max <= n")
        if not 0 <= self.right_min <= self.right_max <= self.m:
            raise ValueError("right degree bounds must satisfy 0 <= min <= max <= m")
        if self.m * self.left_min > self.n * self.right_max:
            raise ValueError("infeasible: left demand exceeds right capacity")
        if self.m * self.left_max < self.n * self.right_min:
            raise ValueError("infeasible: right demand exceeds left capacity")


@dataclass
class GeneratedGraph:
    """Realized edge list (left, right, weight) with the degree sequences."""

    edges: np.ndarray
    left_degrees: np.ndarray
    right_degrees: np.ndarray


def _round_half_away(v: float) -> int:
    return int(math.floor(v + 0.5)) if v >= 0 else int(math.ceil(v - 0.5))


def normal_integers(rng: np.random.Generator, mean: float, sigma: float, size: int) -> np.ndarray:
    """Normally distributed integers via inverse CDF on the uniform stream."""
    u = rng.random(size)
    while True:
        zero = u == 0.0  # inv_cdf(0) is -inf
        if not zero.any():
            break
        u[zero] = rng.random(int(zero.sum()))
    dist = NormalDist(mean, sigma)
    return np.array([_round_half_away(dist.inv_cdf(float(v))) for v in u], dtype=np.int64)


def _balanced_degrees(
    spec: BipartiteGraphSpec, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample degree sequences and rebalance until the sums agree.

    Resampling alternates sides (left first); if it has not converged after
    50*(m+n) attempts, a deterministic fixer walks the left sum toward the
    right sum within its bounds and then adjusts the right side, which
    always terminates for a feasible spec.
    """
    dl = rng.integers(spec.left_min, spec.left_max + 1, size=spec.m)
    dr = rng.integers(spec.right_min, spec.right_max + 1, size=spec.n)
    threshold = DEGREE_RESAMPLE_FACTOR * (spec.m + spec.n)
    side = 0
    attempts = 0
    while dl.sum() != dr.sum() and attempts < threshold:
        if side == 0:
            dl[rng.integers(spec.m)] = rng.integers(spec.left_min, spec.left_max + 1)
        else:
            dr[rng.integers(spec.n)] = rng.integers(spec.right_min, spec.right_max + 1)
        side ^= 1
        attempts += 1

    if dl.sum() != dr.sum():
        delta = 1 if dl.sum() < dr.sum() else -1
        while (
            dl.sum() != dr.sum()
            and spec.m * spec.left_min <= delta + dl.sum() <= spec.m * spec.left_max
        ):
            cand = np.flatnonzero(
                (spec.left_min <= dl + delta) & (dl + delta <= spec.left_max)
            )
            if cand.size == 0:  # unreachable for a feasible spec
                raise GenerationError("degree fixing stalled on the left side")
            dl[cand[rng.integers(cand.size)]] += delta
        while dl.sum() != dr.sum():
            cand = np.flatnonzero(
                (spec.right_min <= dr - delta) & (dr - delta <= spec.right_max)
            )
            if cand.size == 0:
                raise GenerationError("degree fixing stalled on the right side")
            dr[cand[rng.integers(cand.size)]] -= delta
    return dl, dr


def _realize_edges(
    spec: BipartiteGraphSpec, dl: np.ndarray, dr: np.ndarray, rng: np.random.Generator
) -> np.ndarray | None:
    """Greedy edge placement with relocation fallback.

    Picks a random deficient left node and joins it to a random right node
    with spare capacity; when none is available, an existing edge of a
    random non-adjacent right node is relocated.  Returns None on a dead
    end (the sampled sequence was not realizable), letting the caller
    resample the degrees.
    """
    m, n = spec.m, spec.n
    adj = np.zeros((m, n), dtype=bool)
    deg_l = np.zeros(m, dtype=np.int64)
    deg_r = np.zeros(n, dtype=np.int64)
    ops = 0
    max_ops = 20 * int(dl.sum()) + 100
    while True:
        deficient = np.flatnonzero(deg_l < dl)
        if deficient.size == 0:
            break
        ops += 1
        if ops > max_ops:
            return None
        v = int(deficient[rng.integers(deficient.size)])
        open_right = np.flatnonzero((deg_r < dr) & ~adj[v])
        if open_right.size:
            u = int(open_right[rng.integers(open_right.size)])
        else:
            movable = np.flatnonzero(~adj[v] & (dr > 0))
            if movable.size == 0:
                return None
            u = int(movable[rng.integers(movable.size)])
            nbrs = np.flatnonzero(adj[:, u])
            v2 = int(nbrs[rng.integers(nbrs.size)])
            adj[v2, u] = False
            deg_l[v2] -= 1
            deg_r[u] -= 1
        adj[v, u] = True
        deg_l[v] += 1
        deg_r[u] += 1
    left, right = np.nonzero(adj)  # row-major, deterministic weight order
    return np.column_stack([left, right]).astype(np.int64)


def generate_graph(spec: BipartiteGraphSpec, rng: np.random.Generator) -> GeneratedGraph:
    """Random bipartite graph with degrees inside the spec bounds.

    Uses three child streams of `rng` (degrees, edges, weights).  Edge
    weights are normal integers with the spec's mean and sigma.
    """
    deg_rng, edge_rng, weight_rng = rng.spawn(3)
    edges = None
    for _ in range(REALIZATION_RETRIES):
        dl, dr = _balanced_degrees(spec, deg_rng)
        edges = _realize_edges(spec, dl, dr, edge_rng)
        if edges is not None:
            break
    if edges is None:
        raise GenerationError("could not realize a graph for the sampled degree sequences")
    weights = normal_integers(weight_rng, spec.weight_mean, spec.weight_sigma, len(edges))
    full = np.column_stack([edges, weights]) if len(edges) else np.zeros((0, 3), dtype=np.int64)
    left_deg = np.bincount(edges[:, 0], minlength=spec.m) if len(edges) else np.zeros(spec.m, dtype=np.int64)
    right_deg = np.bincount(edges[:, 1], minlength=spec.n) if len(edges) else np.zeros(spec.n, dtype=np.int64)
    return GeneratedGraph(edges=full, left_degrees=left_deg, right_degrees=right_deg)


def _biclique_style_spec(m: int, n: int, mean: float) -> BipartiteGraphSpec:
    return BipartiteGraphSpec(
        m=m,
        n=n,
        left_min=max(1, n // 5),
        left_max=n,
        right_min=max(1, m // 5),
        right_max=m,
        weight_mean=mean,
    )


def generate_instance(family: str, m: int, n: int, seed: int) -> Instance:
    """Build one instance of the given family, fully determined by the seed."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    root = np.random.default_rng(np.random.SeedSequence(seed))
    meta = {"family": family, "seed": str(seed)}

    if family == "random":
        q_rng, c_rng, d_rng = root.spawn(3)
        Q = normal_integers(q_rng, 0.0, 100.0, m * n).reshape(m, n)
        c = normal_integers(c_rng, 0.0, 100.0, m)
        d = normal_integers(d_rng, 0.0, 100.0, n)
        meta["sigma"] = "100"
        return Instance(Q, c, d, meta)

    if family == "matrixfact":
        h = (root.random((m, n)) < 0.5).astype(np.int64)
        Q = 1 - 2 * h
        return Instance(Q, np.zeros(m, dtype=np.int64), np.zeros(n, dtype=np.int64), meta)

    mean = 100.0 if family == "biclique" else 0.0
    graph = generate_graph(_biclique_style_spec(m, n, mean), root)
    zeros_m = np.zeros(m, dtype=np.int64)
    zeros_n = np.zeros(n, dtype=np.int64)

    if family == "biclique":
        # Any single non-edge penalty must dominate all attainable positive mass.
        penalty = 1 + int(np.maximum(graph.edges[:, 2], 0).sum()) if len(graph.edges) else 1
        Q = np.full((m, n), -penalty, dtype=np.int64)
        if len(graph.edges):
            Q[graph.edges[:, 0], graph.edges[:, 1]] = graph.edges[:, 2]
        meta["M"] = str(penalty)
        return Instance(Q, zeros_m, zeros_n, meta)

    Q = np.zeros((m, n), dtype=np.int64)
    if len(graph.edges):
        Q[graph.edges[:, 0], graph.edges[:, 1]] = graph.edges[:, 2]

    if family == "maxinduced":
        return Instance(Q, zeros_m, zeros_n, meta)

    # maxcut: double the negated edge weights, then half-sums become exact.
    Q *= -2
    c = Q.sum(axis=1) // 2
    d = Q.sum(axis=0) // 2
    return Instance(Q, c, d, meta)


# ---------------------------------------------------------------------------
# Text formats.  Instance files: header "bqp 1", "# key=value" comments,
# "m n", the c line, the d line, then m rows of Q.  Solution certificates
# carry the instance digest and re-verify on read.
# ---------------------------------------------------------------------------


def _content_lines(instance: Instance) -> list[str]:
    lines = [f"{instance.m} {instance.n}"]
    lines.append(" ".join(str(int(v)) for v in instance.c))
    lines.append(" ".join(str(int(v)) for v in instance.d))
    for row in instance.Q:
        lines.append(" ".join(str(int(v)) for v in row))
    return lines


def instance_digest(instance: Instance) -> str:
    """SHA-256 over the numeric content (dimensions and weights only)."""
    payload = "\n".join(_content_lines(instance)) + "\n"
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def instance_label(instance: Instance) -> str:
    meta = instance.meta
    if "name" in meta:
        return meta["name"]
    family = meta.get("family")
    seed = meta.get("seed")
    if family and seed is not None:
        return f"{family}-{instance.m}x{instance.n}-s{seed}"
    return f"bqp-{instance.m}x{instance.n}"


def write_instance(instance: Instance) -> str:
    out = ["bqp 1"]
    for key in sorted(instance.meta):
        value = instance.meta[key]
        if "\n" in key or "\n" in value or "=" in key:
            raise ValueError(f"meta entry {key!r} not representable in the file format")
        out.append(f"# {key}={value}")
    out.extend(_content_lines(instance))
    return "\n".join(out) + "\n"


def _parse_int_row(line: str, expected: int, what: str) -> np.ndarray:
    tokens = line.split()
    if len(tokens) != expected:
        raise FormatError(f"{what}: expected {expected} entries, got {len(tokens)}")
    try:
        return np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"{what}: non-integer token ({exc})") from None


def read_instance(text: str) -> Instance:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "bqp 1":
        raise FormatError("malformed header: expected 'bqp 1'")
    meta: dict[str, str] = {}
    pos = 1
    while pos < len(lines) and lines[pos].startswith("#"):
        body = lines[pos][1:].strip()
        if "=" not in body:
            raise FormatError(f"malformed comment line {pos + 1}: expected key=value")
        key, value = body.split("=", 1)
        meta[key] = value
        pos += 1
    rest = [ln for ln in lines[pos:] if ln.strip()]
    if not rest:
        raise FormatError("missing dimension line")
    dims = rest[0].split()
    if len(dims) != 2:
        raise FormatError("dimension line must hold exactly two integers")
    try:
        m, n = int(dims[0]), int(dims[1])
    except ValueError:
        raise FormatError("dimension line: non-integer token") from None
    if m < 1 or n < 1:
        raise FormatError("dimensions must be positive")
    if len(rest) != 3 + m:
        raise FormatError(f"expected {3 + m} content lines, got {len(rest)}")
    c = _parse_int_row(rest[1], m, "c line")
    d = _parse_int_row(rest[2], n, "d line")
    Q = np.stack([_parse_int_row(rest[3 + i], n, f"Q row {i + 1}") for i in range(m)])
    return Instance(Q, c, d, meta)


def _bit_string(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)


def write_solution(solution: Solution, instance: Instance, name: str | None = None) -> str:
    """Serialize a solution certificate; refuses stale cached objectives."""
    actual = evaluate(instance, solution.x, solution.y)
    if actual != solution.objective:
        raise CertificateError(
            f"cached objective {solution.objective} does not match evaluation {actual}"
        )
    label = name if name is not None else instance_label(instance)
    if any(ch.isspace() for ch in label):
        raise ValueError("solution label must not contain whitespace")
    return "\n".join(
        [
            "bqpsol 1",
            f"instance {instance_digest(instance)} {label}",
            f"objective {solution.objective}",
            f"x {_bit_string(solution.x)}",
            f"y {_bit_string(solution.y)}",
        ]
    ) + "\n"


def read_solution(text: str, instance: Instance | None = None) -> tuple[str, str, Solution]:
    """Parse a certificate; verify digest and objective when the instance is given."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 5 or lines[0].strip() != "bqpsol 1":
        raise FormatError("malformed solution header")
    fields = lines[1].split()
    if len(fields) != 3 or fields[0] != "instance":
        raise FormatError("malformed instance line")
    digest, label = fields[1], fields[2]
    obj_fields = lines[2].split()
    if len(obj_fields) != 2 or obj_fields[0] != "objective":
        raise FormatError("malformed objective line")
    try:
        objective = int(obj_fields[1])
    except ValueError:
        raise FormatError("objective: non-integer token") from None
    x_fields = lines[3].split()
    y_fields = lines[4].split()
    if len(x_fields) != 2 or x_fields[0] != "x" or len(y_fields) != 2 or y_fields[0] != "y":
        raise FormatError("malformed assignment lines")
    if set(x_fields[1]) - {"0", "1"} or set(y_fields[1]) - {"0", "1"}:
        raise FormatError("assignments must be 0/1 strings")
    x = np.array([int(ch) for ch in x_fields[1]], dtype=np.int8)
    y = np.array([int(ch) for ch in y_fields[1]], dtype=np.int8)
    solution = Solution(x, y, objective)

    if instance is not None:
        if digest != instance_digest(instance):
            raise CertificateError("certificate digest does not match the instance")
        actual = evaluate(instance, x, y)
        if actual != objective:
            raise CertificateError(
                f"stored objective {objective} does not match evaluation {actual}"
            )
    return digest, label, solution
