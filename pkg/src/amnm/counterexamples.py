"""Certified families of approximately-but-not-nearly multiplicative maps.

Each family constructor builds a map with a small, exactly computed
multiplicativity defect that nevertheless stays far from every exactly
multiplicative map.  The defect claims are certified by exact rational
arithmetic whenever the weights permit; the distance claims are certified
either by exhaustive enumeration of the (finitely many) multiplicative maps
or by the two-element obstruction inequalities of
:func:`amnm.mat2.obstruction_check`.

Families
========

``psi_n_family``
    Scalar maps on an orthogonal sum of free blocks with geometric weights:
    defect exactly ``base**(-size)`` per block, distance exactly ``1/base``.

``theta_m_t2``
    Upper-triangular maps on a weighted min-chain: defect exactly
    ``1/omega(m)``, distance exactly 1 from every multiplicative map —
    yet each admits an exactly multiplicative 2x2-matrix companion at
    distance ``1/omega(m)``, so the obstruction is specific to the
    upper-triangular codomain.

``theta_m2_chain``
    2x2-matrix maps on a weighted min-chain: defect exactly
    ``1/omega(n) + 1/omega(n+1) <= delta``, distance at least 1/2.

``theta_m2_chain_nonuniform``
    A variant whose sup norm grows as ``delta`` shrinks, with defect at most
    ``(2/3) delta`` and distance at least 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .defects import (
    AlgebraMap,
    DefectReport,
    defect,
    m2_map,
    scalar_map,
    t2_map,
    weighted_sup_distance_report,
)
from .errors import ClassificationFailure, NoEligibleIndex, StructureMismatch
from .filters import _is_nmin_table, enumerate_filters, filter_indicator, zero_map
from .mat2 import Mat2
from .semilattice import (
    OrthogonalSum,
    Semilattice,
    free_semilattice,
    nmin,
    orthogonal_direct_sum,
)
from .weights import WeightedSemilattice, counterexample_weight, weighted

__all__ = [
    "CounterexampleReport",
    "geometric_weight",
    "spiked_weight",
    "orthogonal_free_sum",
    "psi_n_family",
    "theta_m_t2",
    "theta_m2_chain",
    "theta_m2_chain_nonuniform",
]


@dataclass(frozen=True, eq=False)
class CounterexampleReport:
    """A constructed map together with its certified defect and distance.

    ``defect`` is the full report (exact value when available);
    ``distance_lower_bound`` is certified by ``method`` — ``"exhaustive"``
    means every multiplicative map was enumerated and beaten,
    ``"analytic-lemma"`` means the two-element obstruction inequalities
    apply to the recorded elements.  ``distance_exact`` is the exact value
    when the certifying scan produced one.
    """

    family: str
    params: dict
    theta: AlgebraMap
    defect: DefectReport
    distance_lower_bound: float
    distance_exact: Fraction | None
    method: str
    details: dict


def geometric_weight(M: int, base=2) -> WeightedSemilattice:
    """The min-chain of length ``M`` with weight ``base**k`` at the number ``k``.

    Any weight ``>= 1`` on a min-chain is submultiplicative, since
    ``omega(min(j,k)) <= omega(min(j,k)) * omega(other)``.
    """
    if isinstance(base, int):
        base = Fraction(base)
    if base < 1:
        raise ValueError(f"base must be at least 1, got {base!r}")
    return weighted(nmin(M), [base ** (i + 1) for i in range(M)])


def spiked_weight(M: int, position: int, spike, low=1) -> WeightedSemilattice:
    """A min-chain weight that is ``low`` everywhere except one ``spike``.

    This is the natural carrier for the non-uniform matrix family: the
    largest adjacent minimum stays at ``low`` while the spike towers over
    it, so the index right after the spike is eligible.
    """
    if not 0 <= position < M:
        raise ValueError(f"spike position {position} outside 0..{M - 1}")
    if not (low >= 1 and spike >= low):
        raise ValueError("need spike >= low >= 1")
    values = [low] * M
    values[position] = spike
    return weighted(nmin(M), values)


def orthogonal_free_sum(sizes) -> OrthogonalSum:
    """Orthogonal direct sum of free semilattices on ``sizes`` generators."""
    return orthogonal_direct_sum([free_semilattice(k) for k in sizes])


# ---------------------------------------------------------------------------
# Scalar family on orthogonal sums of free blocks.
# ---------------------------------------------------------------------------


def psi_n_family(base=2, sizes=(2, 3, 4, 5)) -> list[CounterexampleReport]:
    """One scalar counterexample per free block of an orthogonal sum.

    Block ``n`` (on ``k`` generators) carries the indicator of its non-zero
    part.  Only products that collapse onto the block zero break
    multiplicativity, and the cheapest such pair costs weight ``base**k``,
    so the defect is exactly ``base**(-k)``.  Yet every multiplicative map
    must disagree with the indicator somewhere on the block at weight at
    most ``base``, which the exhaustive scan confirms: the distance is
    exactly ``1/base``, uniformly over blocks.
    """
    if isinstance(base, int):
        base = Fraction(base)
    if base <= 1:
        raise ValueError(f"base must exceed 1, got {base!r}")
    if any(k < 2 for k in sizes):
        raise ValueError("blocks need at least 2 generators to break multiplicativity")
    T = orthogonal_free_sum(sizes)
    WS = weighted(T, counterexample_weight(T, base))
    mult_maps = [zero_map(T)] + [filter_indicator(T, f) for f in enumerate_filters(T)]
    reports = []
    for n, (start, stop) in enumerate(T.blocks):
        k = sizes[n]
        block_zero = stop - 1  # the full-support element of the free block
        psi = scalar_map(
            [1 if start <= e < stop and e != block_zero else 0 for e in range(T.n)]
        )
        rep = defect(WS, psi)
        expected_sq = (base ** -k) ** 2
        if rep.defect_sq != expected_sq:
            raise ClassificationFailure(
                f"block {n}: defect^2 is {rep.defect_sq!r}, expected {expected_sq!r}"
            )
        best_sq = None
        best_index = -1
        for i, phi in enumerate(mult_maps):
            d = weighted_sup_distance_report(WS, psi, phi)
            if best_sq is None or d.value_sq < best_sq:
                best_sq, best_index = d.value_sq, i
        expected_dist_sq = (1 / base) ** 2
        if best_sq != expected_dist_sq:
            raise ClassificationFailure(
                f"block {n}: nearest multiplicative map is at squared distance "
                f"{best_sq!r}, expected {expected_dist_sq!r}"
            )
        dist = 1 / base
        reports.append(
            CounterexampleReport(
                family="psi-blocks",
                params={"base": base, "sizes": tuple(sizes), "block": n},
                theta=psi,
                defect=rep,
                distance_lower_bound=float(dist),
                distance_exact=dist,
                method="exhaustive",
                details={
                    "block_range": (start, stop),
                    "block_zero": block_zero,
                    "maps_scanned": len(mult_maps),
                    "nearest_map_index": best_index,
                },
            )
        )
    return reports


# ---------------------------------------------------------------------------
# Chain families.  All three live on a weighted min-chain.
# ---------------------------------------------------------------------------


def _require_chain(WS: WeightedSemilattice) -> Semilattice:
    S = WS.S
    if not _is_nmin_table(S):
        raise StructureMismatch("this family needs a min-chain semilattice")
    return S


def _omega_values(WS: WeightedSemilattice):
    return list(WS.omega) if WS.is_exact else [float(x) for x in WS.omega_float]


def theta_m_t2(WS: WeightedSemilattice, m: int) -> CounterexampleReport:
    """The upper-triangular chain map pinned at element index ``m``.

    ``theta(k) = (chi(k), omega(m) * [k == m])`` with ``chi`` the indicator
    of ``{k >= m}``.  Its defect is exactly ``1/omega(m)``, attained only at
    the pair ``(m, m)``; exhaustive enumeration shows every multiplicative
    upper-triangular map sits at distance exactly 1.  The report's details
    carry a 2x2-matrix companion map that is *exactly* multiplicative and
    only ``1/omega(m)`` away, so enlarging the codomain dissolves the
    obstruction.
    """
    S = _require_chain(WS)
    n = S.n
    if not 0 <= m < n:
        raise NoEligibleIndex(f"index {m} outside 0..{n - 1}")
    om = _omega_values(WS)
    one = 1 if WS.is_exact else 1.0
    zero = one * 0
    theta = t2_map(
        [(one if k >= m else zero, om[m] if k == m else zero) for k in range(n)]
    )
    rep = defect(WS, theta)
    if not (rep.witness == (m, m)):
        raise ClassificationFailure(f"defect witness {rep.witness!r} is not ({m},{m})")
    if WS.is_exact:
        expected_sq = Fraction(1) / (Fraction(om[m]) ** 2)
        if rep.defect_sq != expected_sq:
            raise ClassificationFailure(
                f"defect^2 is {rep.defect_sq!r}, expected {expected_sq!r}"
            )
    elif abs(rep.defect_float - 1.0 / om[m]) > 1e-12 * (1.0 + 1.0 / om[m]):
        raise ClassificationFailure("defect does not match 1/omega(m)")

    mult_maps = [zero_map(S)] + [filter_indicator(S, f) for f in enumerate_filters(S)]
    best = None
    for phi in mult_maps:
        phi_t2 = t2_map([(v, v * 0) for v in phi.values])
        d = weighted_sup_distance_report(WS, theta, phi_t2)
        key = d.value_sq if d.value_sq is not None else d.value_float
        if best is None or key < best:
            best = key
    expected_best = Fraction(1) if WS.is_exact else 1.0
    if WS.is_exact:
        certified = best == expected_best
    else:
        certified = abs(best - 1.0) <= 1e-12
    if not certified:
        raise ClassificationFailure(
            f"nearest multiplicative upper-triangular map is at {best!r}, expected 1"
        )

    companion = m2_map(
        [
            Mat2(
                one if k >= m else zero,
                om[m] if k == m else zero,
                zero,
                one if k >= m + 1 else zero,
            )
            for k in range(n)
        ]
    )
    companion_defect = defect(WS, companion, "op")
    if companion_defect.defect_float != 0.0:
        raise ClassificationFailure("companion map is not exactly multiplicative")
    companion_distance = weighted_sup_distance_report(WS, theta.as_m2(), companion, "op")
    if WS.is_exact:
        if companion_distance.value_sq != Fraction(1) / (Fraction(om[m]) ** 2):
            raise ClassificationFailure("companion distance is not exactly 1/omega(m)")
    elif abs(companion_distance.value_float - 1.0 / om[m]) > 1e-12 * (1.0 + 1.0 / om[m]):
        raise ClassificationFailure("companion distance does not match 1/omega(m)")

    return CounterexampleReport(
        family="t2-chain",
        params={"m": m, "omega_m": om[m]},
        theta=theta,
        defect=rep,
        distance_lower_bound=1.0,
        distance_exact=Fraction(1) if WS.is_exact else None,
        method="exhaustive",
        details={
            "maps_scanned": len(mult_maps),
            "companion": companion,
            "companion_defect": companion_defect,
            "companion_distance": companion_distance,
        },
    )


def _eligible_index(pred, n: int, what: str) -> int:
    for i in range(n - 1):
        if pred(i):
            return i
    raise NoEligibleIndex(
        f"no adjacent pair of this chain satisfies the {what} weight conditions"
    )


def theta_m2_chain(WS: WeightedSemilattice, delta: float) -> CounterexampleReport:
    """The 2x2-matrix chain map with defect at most ``delta``, distance >= 1/2.

    At the least index ``i`` with ``min(omega(i), omega(i+1)) >= 2/delta``:
    zero below ``i``, ``[[1, -omega(i)], [0, 0]]`` at ``i``,
    ``[[1, omega(i+1)], [0, 0]]`` at ``i+1``, identity above.  The only
    defective pair is the ordered ``(i, i+1)``, costing exactly
    ``1/omega(i) + 1/omega(i+1) <= delta``.  Any multiplicative map sends
    ``i`` and ``i+1`` to commuting idempotents, and the two-element
    obstruction (pair scenario, ``a = omega(i)``, ``b = omega(i+1)``)
    forces one of them at least ``a/2`` resp. ``b/2`` away — i.e. weighted
    distance at least 1/2 — in operator norm, hence also in the larger
    Hilbert-Schmidt norm.
    """
    S = _require_chain(WS)
    delta = float(delta)
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    om = _omega_values(WS)
    level = 2.0 / delta
    i = _eligible_index(lambda j: om[j] >= level and om[j + 1] >= level, S.n, "m2-chain")
    one = 1 if WS.is_exact else 1.0
    zero = one * 0
    vals = []
    for k in range(S.n):
        if k < i:
            vals.append(Mat2(zero, zero, zero, zero))
        elif k == i:
            vals.append(Mat2(one, -om[i], zero, zero))
        elif k == i + 1:
            vals.append(Mat2(one, om[i + 1], zero, zero))
        else:
            vals.append(Mat2(one, zero, zero, one))
    theta = m2_map(vals)
    rep = defect(WS, theta, "op")
    if rep.witness != (i, i + 1):
        raise ClassificationFailure(f"defect witness {rep.witness!r} is not ({i},{i + 1})")
    closed_form = 1.0 / float(om[i]) + 1.0 / float(om[i + 1])
    if WS.is_exact:
        expected = Fraction(1) / Fraction(om[i]) + Fraction(1) / Fraction(om[i + 1])
        if rep.defect_sq != expected**2:
            raise ClassificationFailure(
                f"defect^2 is {rep.defect_sq!r}, expected {expected**2!r}"
            )
    elif abs(rep.defect_float - closed_form) > 1e-12 * (1.0 + closed_form):
        raise ClassificationFailure("defect does not match 1/omega(i) + 1/omega(i+1)")
    if rep.defect_float > delta:
        raise ClassificationFailure(
            f"defect {rep.defect_float!r} exceeds the requested delta {delta!r}"
        )
    return CounterexampleReport(
        family="m2-chain",
        params={"delta": delta, "index": i, "omega_i": om[i], "omega_i1": om[i + 1]},
        theta=theta,
        defect=rep,
        distance_lower_bound=0.5,
        distance_exact=Fraction(1, 2),
        method="analytic-lemma",
        details={
            "lemma_scenario": "pair",
            "lemma_a": om[i],
            "lemma_b": om[i + 1],
            "lemma_elements": (i, i + 1),
        },
    )


def theta_m2_chain_nonuniform(WS: WeightedSemilattice, delta: float) -> CounterexampleReport:
    """The 2x2-matrix chain map witnessing that the distance bound cannot be
    made uniform over maps of growing sup norm.

    With ``c = max_k min(omega(k), omega(k+1))``, pick the least index ``i``
    with ``omega(i) >= max(6/delta, 2c)`` and ``omega(i+1) <= c``; set
    ``theta(i+1) = [[1, omega(i)], [0, 0]]`` and ``theta(i) = 2 theta(i+1)``
    (zero below, identity above).  The only defective pair is ``(i, i)``,
    costing ``2 sqrt(1 + omega(i)^2) / omega(i)^2 <= (2/3) delta``, while
    the sup norm of the map is of order ``omega(i)/omega(i+1)``.  The
    two-element obstruction (double scenario, ``d = omega(i)``) keeps every
    multiplicative map at weighted distance at least 1/2, using
    ``omega(i) >= 2 omega(i+1)``.
    """
    S = _require_chain(WS)
    delta = float(delta)
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    om = _omega_values(WS)
    c = max(min(om[j], om[j + 1]) for j in range(S.n - 1)) if S.n > 1 else None
    if c is None:
        raise NoEligibleIndex("the chain has no adjacent pair at all")
    i = _eligible_index(
        lambda j: om[j] >= max(6.0 / delta, 2 * c) and om[j + 1] <= c,
        S.n,
        "non-uniform m2-chain",
    )
    if not om[i] >= 2 * om[i + 1]:
        raise ClassificationFailure("omega(i) >= 2 omega(i+1) failed after selection")
    one = 1 if WS.is_exact else 1.0
    zero = one * 0
    base = Mat2(one, om[i], zero, zero)
    vals = []
    for k in range(S.n):
        if k < i:
            vals.append(Mat2(zero, zero, zero, zero))
        elif k == i:
            vals.append(2 * base)
        elif k == i + 1:
            vals.append(base)
        else:
            vals.append(Mat2(one, zero, zero, one))
    theta = m2_map(vals)
    rep = defect(WS, theta, "op")
    if rep.witness != (i, i):
        raise ClassificationFailure(f"defect witness {rep.witness!r} is not ({i},{i})")
    if WS.is_exact:
        w = Fraction(om[i])
        expected_sq = 4 * (1 + w**2) / w**4
        if rep.defect_sq != expected_sq:
            raise ClassificationFailure(
                f"defect^2 is {rep.defect_sq!r}, expected {expected_sq!r}"
            )
    else:
        closed_form = 2.0 * math.sqrt(1.0 + om[i] ** 2) / om[i] ** 2
        if abs(rep.defect_float - closed_form) > 1e-12 * (1.0 + closed_form):
            raise ClassificationFailure(
                "defect does not match 2 sqrt(1 + omega(i)^2) / omega(i)^2"
            )
    if rep.defect_float > (2.0 / 3.0) * delta + 1e-15:
        raise ClassificationFailure(
            f"defect {rep.defect_float!r} exceeds (2/3) delta = {(2.0 / 3.0) * delta!r}"
        )
    norm_ratio = 2.0 * float(om[i]) / float(om[i + 1])
    return CounterexampleReport(
        family="m2-chain-nonuniform",
        params={"delta": delta, "index": i, "omega_i": om[i], "omega_i1": om[i + 1]},
        theta=theta,
        defect=rep,
        distance_lower_bound=0.5,
        distance_exact=Fraction(1, 2),
        method="analytic-lemma",
        details={
            "lemma_scenario": "double",
            "lemma_d": om[i],
            "lemma_elements": (i, i + 1),
            "weight_cap": c,
            "sup_norm_bound": norm_ratio,
        },
    )
