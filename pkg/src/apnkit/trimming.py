"""Trims: hyperplane restrictions with one projected output component.

A trim of F: F_2^n -> F_2^n restricts the input to a hyperplane H (either
alpha-orthogonal or its affine complement) and composes the output with
the projection x -> x + beta * <gamma, x> onto the complement of beta,
yielding an (n-1)-bit function. Collecting one representative for every
(H, beta) choice gives the trim spectrum, a multiset of 2*(2^n - 1)^2
signature classes that is invariant under EA-equivalence.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .gf2 import inner_product, lowest_set_bit
from .ortho import InvariantSignature, invariant_signature, signatures_of_tables
from .vbf import _PAR16, VBF, is_apn

SIDES = ("linear", "affine")


@dataclass(frozen=True)
class Hyperplane:
    """H = alpha-orthogonal when side is "linear", its complement otherwise."""

    alpha: int
    side: str = "linear"

    def __post_init__(self) -> None:
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")


@dataclass(frozen=True)
class TrimDescriptor:
    """One trim choice: hyperplane, projected component beta, and the
    auxiliary offsets (epsilon picks the coset point, gamma the projection
    direction). Any valid (epsilon, gamma) yield affine-equivalent trims."""

    hyperplane: Hyperplane
    beta: int
    epsilon: int
    gamma: int

    def __post_init__(self) -> None:
        if self.beta == 0:
            raise ValueError("beta must be nonzero")
        if inner_product(self.beta, self.gamma) != 1:
            raise ValueError("<beta, gamma> must be 1")
        if self.hyperplane.side == "linear":
            if self.epsilon != 0:
                raise ValueError("epsilon must be 0 on the linear side")
        elif inner_product(self.hyperplane.alpha, self.epsilon) != 1:
            raise ValueError("epsilon must lie outside the hyperplane")

    @classmethod
    def canonical(cls, alpha: int, side: str, beta: int) -> "TrimDescriptor":
        """Lexicographically smallest valid epsilon and gamma."""
        eps = 0 if side == "linear" else lowest_set_bit(alpha)
        return cls(Hyperplane(alpha, side), beta, eps, lowest_set_bit(beta))


def project(beta: int, gamma: int, x: int) -> int:
    """x -> x + beta * <gamma, x>, the projection onto gamma-orthogonal."""
    if inner_product(beta, gamma) != 1:
        raise ValueError("<beta, gamma> must be 1")
    return x ^ (beta if inner_product(gamma, x) else 0)


def hyperplane_basis(alpha: int, n: int) -> tuple[int, ...]:
    """Deterministic basis {e_j + alpha_j e_i : j != i} of alpha-orthogonal,
    where i is the lowest set bit of alpha."""
    i = lowest_set_bit(alpha).bit_length() - 1
    out = []
    for j in range(n):
        if j == i:
            continue
        out.append((1 << j) | (((alpha >> j) & 1) << i))
    return tuple(out)


def _embedded_points(alpha: int, n: int) -> np.ndarray:
    """Coordinates 0 .. 2^(n-1)-1 mapped through hyperplane_basis(alpha)."""
    i = lowest_set_bit(alpha).bit_length() - 1
    xs = np.arange(1 << (n - 1), dtype=np.uint32)
    x0 = np.zeros_like(xs)
    k = 0
    for j in range(n):
        if j == i:
            continue
        x0 |= ((xs >> k) & 1) << j
        k += 1
    return x0 | (_PAR16[x0 & np.uint32(alpha)].astype(np.uint32) << i)


def _drop_bit(v: np.ndarray, i: int) -> np.ndarray:
    low_mask = (1 << i) - 1
    return (v & low_mask) | ((v >> 1) & ~np.uint32(low_mask))


def trim(f: VBF, d: TrimDescriptor) -> VBF:
    """Materialize one trim as an (n-1)-bit table.

    Domain coordinates follow hyperplane_basis(alpha); codomain coordinates
    are gamma-orthogonal read through hyperplane_basis(gamma), which
    amounts to dropping the lowest set bit of gamma.
    """
    if f.n != f.m:
        raise ValueError("trims are defined for n = m")
    n = f.n
    if n < 2:
        raise ValueError("trims need n >= 2")
    alpha = d.hyperplane.alpha
    if not (0 < alpha < (1 << n) and 0 < d.beta < (1 << n)):
        raise ValueError("descriptor does not fit the dimension")
    if d.gamma >> n or d.epsilon >> n:
        raise ValueError("descriptor does not fit the dimension")
    x = _embedded_points(alpha, n)
    vals = f.table[x ^ np.uint32(d.epsilon)].astype(np.uint32)
    par = _PAR16[vals & np.uint32(d.gamma)]
    vals ^= par.astype(np.uint32) * np.uint32(d.beta)
    ig = lowest_set_bit(d.gamma).bit_length() - 1
    return VBF(n - 1, n - 1, _drop_bit(vals, ig))


def _tables_for_alpha(f: VBF, alpha: int, side: str) -> np.ndarray:
    """Trim tables for all beta = 1 .. 2^n - 1 under canonical epsilon and
    gamma, stacked as one (2^n - 1, 2^(n-1)) matrix."""
    n = f.n
    eps = 0 if side == "linear" else lowest_set_bit(alpha)
    x = _embedded_points(alpha, n)
    vals = f.table[x ^ np.uint32(eps)].astype(np.uint32)
    betas = np.arange(1, 1 << n, dtype=np.int64)
    gammas = (betas & -betas).astype(np.uint32)
    betas = betas.astype(np.uint32)
    par = _PAR16[vals[None, :] & gammas[:, None]].astype(np.uint32)
    out = vals[None, :] ^ par * betas[:, None]
    # drop the gamma pivot bit; group rows by pivot position to stay vectorized
    res = np.empty_like(out)
    pivots = np.log2(gammas).astype(np.int64)
    for i in range(n):
        rows = pivots == i
        if rows.any():
            res[rows] = _drop_bit(out[rows], i)
    return res.astype(np.uint16)


def descriptor_count(n: int, quadratic_reduced: bool = False) -> int:
    c = (1 << n) - 1
    return c * c if quadratic_reduced else 2 * c * c


@dataclass
class TrimSpectrum:
    """Multiset of trim signatures over all (H, beta) choices."""

    n: int
    quadratic_reduced: bool
    counts: dict[InvariantSignature, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def distinct(self) -> int:
        return len(self.counts)

    def apn_signatures(self) -> list[InvariantSignature]:
        return sorted((s for s in self.counts if s.apn),
                      key=lambda s: s.canonical())


def _sides_for(f: VBF, quadratic_reduced: bool) -> tuple[str, ...]:
    if quadratic_reduced:
        if f.degree > 2:
            raise ValueError(
                "quadratic-reduced trim spectrum needs degree <= 2")
        return ("linear",)
    return SIDES


def trim_spectrum(f: VBF, quadratic_reduced: bool = False) -> TrimSpectrum:
    sides = _sides_for(f, quadratic_reduced)
    counts: Counter = Counter()
    for alpha in range(1, 1 << f.n):
        for side in sides:
            tabs = _tables_for_alpha(f, alpha, side)
            counts.update(signatures_of_tables(tabs, f.n - 1))
    return TrimSpectrum(f.n, quadratic_reduced, dict(counts))


def spectrum_chunk(table: Sequence[int], n: int,
                   pairs: Sequence[tuple[int, str]]) -> list[tuple[InvariantSignature, int]]:
    """Signature counts for the (alpha, side) work items in ``pairs``;
    picklable worker behind parallel spectrum computation."""
    f = VBF(n, n, table)
    counts: Counter = Counter()
    for alpha, side in pairs:
        counts.update(signatures_of_tables(_tables_for_alpha(f, alpha, side), n - 1))
    return list(counts.items())


def _iter_apn_trims(f: VBF) -> Iterator[tuple[TrimDescriptor, VBF, InvariantSignature]]:
    """APN trims in ascending (alpha, side, beta) order, with signatures."""
    n = f.n
    for alpha in range(1, 1 << n):
        for side in SIDES:
            tabs = _tables_for_alpha(f, alpha, side)
            sigs = signatures_of_tables(tabs, n - 1, only_apn=True)
            for beta0, sig in enumerate(sigs):
                if sig is None:
                    continue
                d = TrimDescriptor.canonical(alpha, side, beta0 + 1)
                yield d, VBF(n - 1, n - 1, tabs[beta0]), sig


def apn_trims(f: VBF) -> list[tuple[TrimDescriptor, InvariantSignature]]:
    """Distinct APN trim signatures with one witness descriptor each."""
    if f.n != f.m:
        raise ValueError("trims are defined for n = m")
    seen: dict[InvariantSignature, TrimDescriptor] = {}
    for d, _, sig in _iter_apn_trims(f):
        if sig not in seen:
            seen[sig] = d
    return [(d, s) for s, d in seen.items()]


def recursive_witness(f: VBF) -> Optional[list[VBF]]:
    """A chain [F_n, F_(n-1), ..., F_2] of APN functions linked by trims,
    or None if no such chain exists.

    Depth-first search over APN trims, deduplicated by signature within a
    node and memoizing failed signatures per dimension.
    """
    if not is_apn(f):
        raise ValueError("recursive witness requires an APN function")
    failed: dict[int, set[InvariantSignature]] = defaultdict(set)
    chain = [f]

    def descend(g: VBF) -> bool:
        k = g.n
        if k == 2:
            return True
        tried: set[InvariantSignature] = set()
        for _, t, sig in _iter_apn_trims(g):
            if sig in tried or sig in failed[k - 1]:
                continue
            tried.add(sig)
            chain.append(t)
            if descend(t):
                return True
            chain.pop()
            failed[k - 1].add(sig)
        return False

    return chain if descend(f) else None


# ---------------------------------------------------------------------------
# trimming graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphNode:
    dim: int
    signature: InvariantSignature

    def node_id(self) -> str:
        return self.signature.key64()

    def sort_key(self) -> tuple[int, str]:
        return (self.dim, self.node_id())


@dataclass
class TrimmingGraph:
    """Nodes are signature classes tagged with their dimension; an edge
    from dimension k to k-1 records an APN trim with the child signature.
    Node counts are lower bounds for EA-class counts (signature collisions
    would merge nodes), which the exporters flag in their metadata."""

    nodes: set[GraphNode]
    edges: set[tuple[GraphNode, GraphNode]]

    def nonisolated(self) -> set[GraphNode]:
        out = set()
        for a, b in self.edges:
            out.add(a)
            out.add(b)
        return out


def trimming_graph(functions: Sequence[VBF]) -> TrimmingGraph:
    nodes: set[GraphNode] = set()
    edges: set[tuple[GraphNode, GraphNode]] = set()
    for f in functions:
        if not is_apn(f):
            raise ValueError("trimming graph inputs must be APN")
        parent = GraphNode(f.n, invariant_signature(f))
        nodes.add(parent)
        for _, sig in apn_trims(f):
            child = GraphNode(f.n - 1, sig)
            nodes.add(child)
            edges.add((parent, child))
    return TrimmingGraph(nodes, edges)
