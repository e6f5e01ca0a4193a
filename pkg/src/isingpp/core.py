"""Ising problems, spin configurations, and tunnel arithmetic.

The energy of a spin assignment ``s`` in ``{-1, +1}^n`` is

    F(s) = sum_a h[a] * s[a]  +  sum_{a<b} J[a, b] * s[a] * s[b]

with linear coefficients ``h`` and symmetric pair couplings ``J`` given on
an undirected graph. Vertices absent from ``h``/``J`` (e.g. dead hardware
qubits) simply contribute nothing.

A *tunnel* is a set of vertices considered for a joint flip. Its
contribution under a configuration counts the tunnel's linear terms and
its boundary couplings; couplings internal to the tunnel are excluded, so
the contribution changes sign exactly when the whole tunnel is flipped.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

SPIN_DTYPE = np.int8

# Global tolerance for energy equality checks.
ENERGY_ATOL = 1e-9


class IsingProblem:
    """Immutable problem instance over vertices ``0 .. vertex_count - 1``.

    h maps vertex -> coefficient, J maps an unordered vertex pair -> coupling.
    Self-couplings and duplicate pairs are rejected. Construction normalizes
    every pair to (a, b) with a < b and precomputes dense coefficient arrays
    plus adjacency lists; instances must not be mutated afterwards.
    """

    __slots__ = (
        "vertex_count", "h", "J",
        "_h_vec", "_edge_a", "_edge_b", "_edge_w", "_nbr", "_nbr_w",
    )

    def __init__(self, vertex_count, h=None, J=None):
        if int(vertex_count) != vertex_count or vertex_count < 0:
            raise DimensionError(f"vertex_count must be a non-negative integer, got {vertex_count!r}")
        n = int(vertex_count)
        self.vertex_count = n

        h = dict(h or {})
        for a, v in h.items():
            if not (0 <= a < n):
                raise IndexError(f"h vertex {a} out of range for {n} vertices")
            h[a] = float(v)

        normalized = {}
        for pair, w in dict(J or {}).items():
            a, b = pair
            if a == b:
                raise IndexError(f"self-coupling ({a}, {b}) is not allowed")
            if not (0 <= a < n and 0 <= b < n):
                raise IndexError(f"J pair ({a}, {b}) out of range for {n} vertices")
            key = (a, b) if a < b else (b, a)
            if key in normalized:
                raise IndexError(f"duplicate coupling for pair {key}")
            normalized[key] = float(w)

        self.h = h
        self.J = normalized

        self._h_vec = np.zeros(n, dtype=np.float64)
        for a, v in h.items():
            self._h_vec[a] = v

        edges = sorted(normalized)
        self._edge_a = np.array([e[0] for e in edges], dtype=np.intp)
        self._edge_b = np.array([e[1] for e in edges], dtype=np.intp)
        self._edge_w = np.array([normalized[e] for e in edges], dtype=np.float64)

        nbr = [[] for _ in range(n)]
        for (a, b), w in normalized.items():
            nbr[a].append((b, w))
            nbr[b].append((a, w))
        for lst in nbr:
            lst.sort()
        self._nbr = [np.array([x[0] for x in lst], dtype=np.intp) for lst in nbr]
        self._nbr_w = [np.array([x[1] for x in lst], dtype=np.float64) for lst in nbr]

    @property
    def edge_list(self):
        """Edges as a list of (a, b) with a < b, sorted."""
        return list(zip(self._edge_a.tolist(), self._edge_b.tolist()))

    @property
    def adjacency(self):
        """Per-vertex list of (neighbor, coupling) pairs, neighbors ascending."""
        return [
            list(zip(self._nbr[a].tolist(), self._nbr_w[a].tolist()))
            for a in range(self.vertex_count)
        ]

    def neighbors(self, a):
        return self._nbr[a]

    def _check_length(self, spins):
        if spins.shape[-1] != self.vertex_count:
            raise DimensionError(
                f"spin vector has length {spins.shape[-1]}, expected {self.vertex_count}"
            )

    def evaluate(self, spins) -> float:
        """Energy of one spin vector. Terms are summed in a fixed order
        (h by vertex, then J by sorted pair), so results are reproducible."""
        s = np.asarray(spins, dtype=np.float64)
        self._check_length(s)
        e = float(np.sum(self._h_vec * s))
        if self._edge_w.size:
            e += float(np.sum(self._edge_w * s[self._edge_a] * s[self._edge_b]))
        return e

    def evaluate_many(self, spins_matrix) -> np.ndarray:
        """Energies of a (runs, vertex_count) matrix of spin vectors."""
        s = np.asarray(spins_matrix, dtype=np.float64)
        self._check_length(s)
        e = s @ self._h_vec
        if self._edge_w.size:
            e = e + (s[:, self._edge_a] * s[:, self._edge_b]) @ self._edge_w
        return e

    def configuration(self, spins) -> "SpinConfiguration":
        """Wrap a spin vector, computing its energy fresh."""
        arr = np.asarray(spins, dtype=SPIN_DTYPE)
        return SpinConfiguration(arr, self.evaluate(arr))

    def content_hash(self) -> str:
        """Stable short identifier derived from the problem's contents."""
        parts = [str(self.vertex_count)]
        parts.extend(f"h {a} {self._h_vec[a]!r}" for a in sorted(self.h))
        parts.extend(
            f"J {a} {b} {w!r}"
            for (a, b), w in sorted(self.J.items())
        )
        digest = hashlib.sha256("\n".join(parts).encode()).hexdigest()
        return digest[:12]

    def __repr__(self):
        return (
            f"IsingProblem(vertex_count={self.vertex_count}, "
            f"|h|={len(self.h)}, |J|={len(self.J)})"
        )


@dataclass(frozen=True, eq=False, slots=True)
class SpinConfiguration:
    """One optimizer run: a spin vector plus its cached energy.

    Value type. The spin array is marked read-only; derived configurations
    are always built fresh with a newly computed energy, never mutated.
    """

    spins: np.ndarray
    energy: float

    def __post_init__(self):
        arr = np.asarray(self.spins, dtype=SPIN_DTYPE)
        bad = np.setdiff1d(np.unique(arr), [-1, 1])
        if bad.size:
            raise ValueError(f"spins must be -1 or +1, found {bad.tolist()}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "spins", arr)
        object.__setattr__(self, "energy", float(self.energy))

    def __len__(self):
        return self.spins.shape[0]

    def same_spins(self, other) -> bool:
        return np.array_equal(self.spins, other.spins)

    def __repr__(self):
        return f"SpinConfiguration(n={len(self)}, energy={self.energy})"


@dataclass(frozen=True, slots=True)
class Tunnel:
    """Nonempty set of vertices flipped as a unit, stored sorted."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(sorted(set(int(v) for v in self.vertices)))
        if not verts:
            raise ValueError("a tunnel must contain at least one vertex")
        object.__setattr__(self, "vertices", verts)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, v):
        return v in set(self.vertices)


def energy(problem: IsingProblem, config: SpinConfiguration) -> float:
    """Fresh energy of ``config`` under ``problem`` (the cache is ignored)."""
    return problem.evaluate(config.spins)


def validate_energy_cache(problem: IsingProblem, config: SpinConfiguration):
    """Raise if the cached energy drifts from a fresh evaluation."""
    fresh = problem.evaluate(config.spins)
    if abs(fresh - config.energy) > ENERGY_ATOL:
        raise ValueError(
            f"cached energy {config.energy} differs from evaluated {fresh}"
        )


def tunnel_contribution(problem: IsingProblem, config: SpinConfiguration,
                        tunnel: Tunnel) -> float:
    """Energy terms a tunnel owns under ``config``:

        sum_{a in T} h[a] s[a]  +  sum_{a in T, b not in T} J[a, b] s[a] s[b]

    Couplings with both ends inside the tunnel are excluded, so negating
    every spin in the tunnel negates the value exactly.
    """
    verts = np.fromiter(tunnel.vertices, dtype=np.intp)
    if verts.min() < 0 or verts.max() >= problem.vertex_count:
        raise IndexError(
            f"tunnel vertices out of range for {problem.vertex_count} vertices"
        )
    s = np.asarray(config.spins, dtype=np.float64)
    problem._check_length(s)

    inside = np.zeros(problem.vertex_count, dtype=bool)
    inside[verts] = True

    total = float(np.sum(problem._h_vec[verts] * s[verts]))
    if problem._edge_w.size:
        boundary = inside[problem._edge_a] ^ inside[problem._edge_b]
        if boundary.any():
            total += float(np.sum(
                problem._edge_w[boundary]
                * s[problem._edge_a[boundary]]
                * s[problem._edge_b[boundary]]
            ))
    return total


def single_flip_delta(problem: IsingProblem, spins, vertex: int) -> float:
    """Energy change from flipping one spin.

    Equals 2 s'[a] (h[a] + sum_b J[a,b] s[b]) with s'[a] the proposed
    (flipped) value, i.e. -2 s[a] (...) in terms of the current one.
    Costs O(degree of a) instead of a full re-evaluation.
    """
    s = np.asarray(spins, dtype=np.float64)
    problem._check_length(s)
    if not (0 <= vertex < problem.vertex_count):
        raise IndexError(f"vertex {vertex} out of range")
    field = problem._h_vec[vertex]
    nbrs = problem._nbr[vertex]
    if nbrs.size:
        field += float(np.sum(problem._nbr_w[vertex] * s[nbrs]))
    return -2.0 * float(s[vertex]) * field
