"""Regular LDPC codes represented as bipartite (Tanner) graphs.

A (n, l, k) code has n variable nodes of degree l and m = n*l/k check
nodes of degree k.  Graphs are sampled with the configuration model and
kept simple (no repeated variable-check pair).  Assignments are plain
numpy 0/1 vectors of length n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetError, ConstructionError, ParameterError

__all__ = [
    "TannerGraph",
    "sample_regular_code",
    "syndrome",
    "code_rate",
    "expansion_audit",
    "ExpansionReport",
    "save_graph",
    "load_graph",
]


class TannerGraph:
    """Immutable biregular bipartite graph of n variables and m checks.

    Both adjacency maps are stored as rectangular int arrays with rows
    sorted ascending: ``var_to_checks`` has shape (n, l) and
    ``check_to_vars`` has shape (m, k).
    """

    __slots__ = ("n", "m", "l", "k", "var_to_checks", "check_to_vars")

    def __init__(self, n: int, l: int, k: int, check_to_vars: np.ndarray):
        check_to_vars = np.asarray(check_to_vars, dtype=np.int64)
        if l < 1 or k < 1 or n < 1:
            raise ParameterError("n, l, k must be positive")
        if (n * l) % k != 0:
            raise ParameterError(f"n*l = {n * l} not divisible by k = {k}")
        m = n * l // k
        if check_to_vars.shape != (m, k):
            raise ParameterError(
                f"check_to_vars has shape {check_to_vars.shape}, expected {(m, k)}"
            )
        if check_to_vars.min(initial=0) < 0 or check_to_vars.max(initial=0) >= n:
            raise ParameterError("variable index out of range")

        flat = check_to_vars.ravel()
        # simple graph: no repeated (variable, check) pair
        pair_ids = np.repeat(np.arange(m, dtype=np.int64), k) * n + flat
        if np.unique(pair_ids).size != m * k:
            raise ParameterError("repeated (variable, check) pair")
        degrees = np.bincount(flat, minlength=n)
        if not np.all(degrees == l):
            raise ParameterError(f"variable degrees are not all {l}")

        order = np.lexsort((np.repeat(np.arange(m), k), flat))
        var_to_checks = np.repeat(np.arange(m), k)[order].reshape(n, l)

        self.n = n
        self.m = m
        self.l = l
        self.k = k
        self.check_to_vars = np.sort(check_to_vars, axis=1)
        self.var_to_checks = var_to_checks
        self.check_to_vars.flags.writeable = False
        self.var_to_checks.flags.writeable = False

    def __repr__(self):
        return f"TannerGraph(n={self.n}, m={self.m}, l={self.l}, k={self.k})"


def sample_regular_code(n: int, l: int, k: int, seed) -> TannerGraph:
    """Sample a uniform-ish random simple (l, k)-biregular Tanner graph.

    Uses the configuration model (the n*l variable stubs are matched to
    the m*k check stubs through a random permutation), then repairs any
    repeated (variable, check) pair with degree-preserving random edge
    swaps; a swap is only taken when it removes a duplicate without
    creating one.  Deterministic for a fixed seed.
    """
    if n < 1 or l < 1 or k < 1:
        raise ParameterError("n, l, k must be positive")
    if (n * l) % k != 0:
        raise ParameterError(f"n*l = {n * l} not divisible by k = {k}")
    if n < k:
        raise ParameterError(f"need n >= k, got n={n}, k={k}")
    m = n * l // k
    rng = np.random.default_rng(seed)
    var_stubs = np.repeat(np.arange(n, dtype=np.int64), l)
    slot_check = np.repeat(np.arange(m, dtype=np.int64), k)
    matched = var_stubs[rng.permutation(n * l)]
    for _ in range(1000):
        pair_ids = slot_check * n + matched
        order = np.argsort(pair_ids, kind="stable")
        sorted_ids = pair_ids[order]
        bad = order[np.concatenate(([False], sorted_ids[1:] == sorted_ids[:-1]))]
        if bad.size == 0:
            return TannerGraph(n, l, k, matched.reshape(m, k))
        # superset of current pairs: blocking on it can forbid a valid swap
        # but never admits a duplicate
        pairs = set(np.unique(pair_ids).tolist())
        for i in bad.tolist():
            ci, vi = int(slot_check[i]), int(matched[i])
            for _attempt in range(200):
                j = int(rng.integers(matched.size))
                cj, vj = int(slot_check[j]), int(matched[j])
                if vi == vj:
                    continue
                pi_new, pj_new = ci * n + vj, cj * n + vi
                if pi_new in pairs or pj_new in pairs:
                    continue
                matched[i], matched[j] = vj, vi
                pairs.add(pi_new)
                pairs.add(pj_new)
                break
    raise ConstructionError(
        f"could not repair ({l},{k})-biregular pairing to a simple graph (n={n})"
    )


def syndrome(graph: TannerGraph, bits) -> np.ndarray:
    """Parity (sum mod 2) of the assigned bits in each check.

    All-zero iff ``bits`` is a codeword.
    """
    bits = np.asarray(bits)
    if bits.shape != (graph.n,):
        raise ParameterError(f"assignment has shape {bits.shape}, expected ({graph.n},)")
    return (bits[graph.check_to_vars].sum(axis=1) & 1).astype(np.uint8)


def code_rate(l: int, k: int) -> Fraction:
    """Design rate (k - l)/k of an (l, k)-regular code, as an exact fraction."""
    if not 1 <= l < k:
        raise ParameterError(f"need 1 <= l < k, got l={l}, k={k}")
    return Fraction(k - l, k)


@dataclass(frozen=True)
class ExpansionReport:
    """Exhaustive vertex-expansion summary for subset sizes 1..max size.

    ``min_ratio_by_size[s]`` is min over all size-s variable subsets V of
    |checks neighboring V| / |V|; ``witness_by_size[s]`` attains it.
    """

    min_ratio_by_size: dict[int, float]
    witness_by_size: dict[int, tuple[int, ...]]

    @property
    def min_ratio(self) -> float:
        return min(self.min_ratio_by_size.values())


def expansion_audit(
    graph: TannerGraph, max_subset_size: int, subset_budget: int = 500_000
) -> ExpansionReport:
    """Brute-force expansion ratios over all variable subsets up to a size cap.

    Refuses (BudgetError) when the total number of subsets exceeds
    ``subset_budget``; intended for tiny diagnostic graphs only.
    """
    if not 1 <= max_subset_size <= graph.n:
        raise ParameterError("max_subset_size out of range")
    total = sum(math.comb(graph.n, s) for s in range(1, max_subset_size + 1))
    if total > subset_budget:
        raise BudgetError(
            f"{total} subsets exceeds budget {subset_budget}; refusing to approximate"
        )
    masks = [0] * graph.n
    for v in range(graph.n):
        for c in graph.var_to_checks[v]:
            masks[v] |= 1 << int(c)
    ratios: dict[int, float] = {}
    witnesses: dict[int, tuple[int, ...]] = {}
    for s in range(1, max_subset_size + 1):
        best = None
        best_subset = None
        for subset in itertools.combinations(range(graph.n), s):
            acc = 0
            for v in subset:
                acc |= masks[v]
            ratio = acc.bit_count() / s
            if best is None or ratio < best:
                best, best_subset = ratio, subset
        ratios[s] = best
        witnesses[s] = best_subset
    return ExpansionReport(ratios, witnesses)


def save_graph(graph: TannerGraph, path) -> None:
    """Write the text format: header ``n m l k``, then one line of k
    variable indices per check."""
    with open(path, "w") as fh:
        fh.write(f"{graph.n} {graph.m} {graph.l} {graph.k}\n")
        for row in graph.check_to_vars:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_graph(path) -> TannerGraph:
    """Read the text format written by :func:`save_graph`, validating all
    graph invariants."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ParameterError(f"bad header in {path!r}: expected 'n m l k'")
        n, m, l, k = (int(x) for x in header)
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append([int(x) for x in line.split()])
    if len(rows) != m or any(len(r) != k for r in rows):
        raise ParameterError(f"expected {m} lines of {k} indices in {path!r}")
    graph = TannerGraph(n, l, k, np.array(rows, dtype=np.int64))
    if graph.m != m:
        raise ParameterError(f"header m={m} inconsistent with n*l/k={graph.m}")
    return graph
