"""Submultiplicative weights on semilattices.

A weight assigns a strictly positive real ``omega(x)`` to every element with
``omega(x*y) <= omega(x) * omega(y)``.  On a semilattice this forces
``omega >= 1`` everywhere (take ``x = y``).  Weights may be floats or exact
``fractions.Fraction`` values; the exact form is what the counterexample
certificates use.

Provided here:

* validation (:func:`check_submultiplicative`, :class:`WeightedSemilattice`),
* the building-block weight ``C^gamma`` on a free semilattice and its
  orthogonal-sum extension used by the non-AMNM counterexample families,
* the flighty constant: the maximum weight reachable by products of
  elements whose weight lies below a threshold,
* a repaired random weight generator for the test bench.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NonPositiveWeight, NotSubmultiplicative, StructureMismatch
from .semilattice import FreeSemilattice, Semilattice, generated

__all__ = [
    "WeightedSemilattice",
    "check_submultiplicative",
    "weighted",
    "unit_weight",
    "building_block_weight",
    "counterexample_weight",
    "sublevel_set",
    "flighty_constant",
    "FlightyReport",
    "flighty_report",
    "random_submultiplicative_weight",
]

Number = "int | float | Fraction"


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def check_submultiplicative(S: Semilattice, omega: Sequence) -> tuple[int, int] | None:
    """Validate positivity and return the first pair with
    ``omega(x*y) > omega(x)*omega(y)``, or None if the weight is valid.

    Comparisons are exact (no tolerance).  Raises :class:`NonPositiveWeight`
    if some value is not a strictly positive real number.
    """
    if len(omega) != S.n:
        raise ValueError(f"weight has {len(omega)} entries for a {S.n}-element semilattice")
    for i, w in enumerate(omega):
        if isinstance(w, bool) or not isinstance(w, (int, float, Fraction)):
            raise NonPositiveWeight(f"omega[{i}] = {w!r} is not a real number", i)
        if not w > 0:
            raise NonPositiveWeight(f"omega[{i}] = {w!r} is not strictly positive", i)
    table = S.table
    for i in range(S.n):
        for j in range(S.n):
            if omega[int(table[i, j])] > omega[i] * omega[j]:
                return (i, j)
    return None


@dataclass(frozen=True, eq=False)
class WeightedSemilattice:
    """A semilattice together with a validated submultiplicative weight."""

    S: Semilattice
    omega: tuple

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(self.omega))
        witness = check_submultiplicative(self.S, self.omega)
        if witness is not None:
            i, j = witness
            raise NotSubmultiplicative(
                f"omega[{int(self.S.table[i, j])}] > omega[{i}] * omega[{j}]", (i, j)
            )
        if min(self.omega) < 1:
            # impossible once submultiplicativity holds (omega(x) <= omega(x)^2)
            raise NonPositiveWeight("submultiplicative weight dipped below 1", None)

    @property
    def n(self) -> int:
        return self.S.n

    @cached_property
    def omega_float(self) -> np.ndarray:
        arr = np.array([float(w) for w in self.omega])
        arr.setflags(write=False)
        return arr

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(w) for w in self.omega)


def weighted(S: Semilattice, omega: Sequence) -> WeightedSemilattice:
    """Validate and attach a weight to a semilattice."""
    return WeightedSemilattice(S, tuple(omega))


def unit_weight(S: Semilattice) -> WeightedSemilattice:
    """The constant weight 1 (exact)."""
    return WeightedSemilattice(S, (1,) * S.n)


def building_block_weight(F: FreeSemilattice, C) -> tuple:
    """The weight ``C^gamma(e)`` for ``e`` above the zero, and ``C`` at the zero.

    ``C >= 1`` is required.  When ``C`` is an int or Fraction the returned
    values are exact Fractions.
    """
    if not C >= 1:
        raise ValueError(f"building-block base must satisfy C >= 1, got {C!r}")
    base = Fraction(C) if _is_exact(C) else float(C)
    values = []
    for e in range(F.n):
        if e == F.zero:
            values.append(base)
        else:
            values.append(base ** int(F.gamma[e]))
    return tuple(values)


def _recover_blocks(T: Semilattice) -> tuple[int, list[list[int]]]:
    """Find the absorbing zero and the connected blocks of an orthogonal sum."""
    table = T.table
    n = T.n
    zeros = [z for z in range(n) if all(int(table[z, x]) == z for x in range(n))]
    if len(zeros) != 1:
        raise StructureMismatch(
            f"expected a unique absorbing zero element, found {len(zeros)}"
        )
    zero = zeros[0]
    others = [i for i in range(n) if i != zero]
    parent = {i: i for i in others}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in others:
        for j in others:
            if i < j and int(table[i, j]) != zero:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in others:
        groups.setdefault(find(i), []).append(i)
    blocks = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
    return zero, blocks


def _verify_free_block(T: Semilattice, block: list[int]) -> dict[int, int]:
    """Check a block is a free semilattice; return the length function on it."""
    table = T.table
    members = set(block)
    for i in block:
        for j in block:
            if int(table[i, j]) not in members:
                raise StructureMismatch("block is not closed under the product")
    generators = [
        i for i in block if all(int(table[i, j]) != i for j in block if j != i)
    ]
    k = len(generators)
    if len(block) != (1 << k) - 1 or k == 0:
        raise StructureMismatch(
            f"block of size {len(block)} is not free on its {k} maximal elements"
        )
    gamma: dict[int, int] = {}
    seen: dict[int, int] = {}
    for mask in range(1, 1 << k):
        prod = None
        for b in range(k):
            if (mask >> b) & 1:
                g = generators[b]
                prod = g if prod is None else int(table[prod, g])
        size = mask.bit_count()
        if prod in seen and seen[prod] != size:
            raise StructureMismatch("block products do not realize a free semilattice")
        if prod in gamma:
            raise StructureMismatch("two generator subsets share a product; block not free")
        gamma[prod] = size
        seen[prod] = size
    if set(gamma) != members:
        raise StructureMismatch("generator products do not exhaust the block")
    return gamma


def counterexample_weight(T: Semilattice, C) -> tuple:
    """Building-block weight on each block of an orthogonal sum of free blocks.

    The zero of the sum gets weight 1; each block carries ``C^gamma`` with the
    block's own zero demoted to ``C``.  The table is *verified* to have the
    orthogonal-sum-of-free-blocks shape (raises :class:`StructureMismatch`
    otherwise), so the function can be used on reconstructed inputs.
    """
    if not C >= 1:
        raise ValueError(f"building-block base must satisfy C >= 1, got {C!r}")
    base = Fraction(C) if _is_exact(C) else float(C)
    zero, blocks = _recover_blocks(T)
    values: list = [None] * T.n
    values[zero] = base**0
    for block in blocks:
        gamma = _verify_free_block(T, block)
        k = max(gamma.values())
        for e, g in gamma.items():
            values[e] = base if g == k else base**g
    return tuple(values)


def sublevel_set(WS: WeightedSemilattice, K) -> frozenset[int]:
    """Indices with ``omega(x) <= K`` (ties included; exact comparison)."""
    return frozenset(i for i, w in enumerate(WS.omega) if w <= K)


@dataclass(frozen=True)
class FlightyReport:
    """Details behind a flighty-constant evaluation."""

    value: object
    threshold: object
    sublevel: frozenset[int]
    closure: frozenset[int]
    sublevel_empty: bool


def flighty_report(WS: WeightedSemilattice, K) -> FlightyReport:
    """Maximum weight over the subsemilattice generated by the K-sublevel set.

    An empty sublevel set yields the neutral value 1 and is flagged.
    """
    sub = sublevel_set(WS, K)
    if not sub:
        return FlightyReport(1, K, sub, frozenset(), True)
    closure = generated(WS.S, sub)
    value = max(WS.omega[i] for i in closure)
    return FlightyReport(value, K, sub, closure, False)


def flighty_constant(WS: WeightedSemilattice, K):
    """The value of :func:`flighty_report` (exact when the weight is exact)."""
    return flighty_report(WS, K).value


def random_submultiplicative_weight(
    rng: np.random.Generator, S: Semilattice, spread: float = 2.5
) -> WeightedSemilattice:
    """Random float weight >= 1, repaired to submultiplicativity.

    Starts from log-uniform values and repeatedly caps ``omega(x*y)`` by
    ``omega(x)*omega(y)`` until a fixpoint; the result stays >= 1 because the
    caps are products of values >= 1.
    """
    n = S.n
    vals = [float(v) for v in np.exp(rng.uniform(0.0, spread, n))]
    table = S.table
    for _ in range(5 * n + 10):
        changed = False
        for i in range(n):
            for j in range(n):
                p = int(table[i, j])
                cap = vals[i] * vals[j]
                if vals[p] > cap:
                    vals[p] = cap
                    changed = True
        if not changed:
            break
    return WeightedSemilattice(S, tuple(vals))
