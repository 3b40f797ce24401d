"""Constructive corrections: from approximately multiplicative to multiplicative.

Each ``correct_*`` function takes a map whose multiplicativity defect is
below the method's threshold, constructs an exactly multiplicative map
nearby, *verifies every intermediate claim of the construction at runtime*,
and returns a :class:`Certificate` recording the input defect, the claimed
distance bound, the achieved distance, and the classification data.

The four procedures and their guarantees (defect delta measured in the
stated norm):

===========================  =============  ==========================  =========
procedure                    threshold      corrected map               bound
===========================  =============  ==========================  =========
:func:`correct_scalar`       delta < 1/5    filter indicator            (7/5) delta
:func:`correct_weighted`     margin < 1     filter indicator            epsilon
:func:`correct_t2`           delta < 1/5    chi . identity              (25/11) delta
:func:`correct_m2`           delta < 0.03   {0, P, I-P, I}-valued       12 delta
===========================  =============  ==========================  =========

``correct_weighted`` works on a weighted semilattice with a binary input
(round first with :func:`amnm.defects.round_to_binary`); its margin is
``2 * delta * C(2/epsilon) / epsilon`` with ``C`` the flighty constant.  The
other three are unweighted statements and take a bare semilattice.

Internal assertion failures raise :class:`ClassificationFailure`; every such
check is a proved consequence of the stated precondition, so a raise means
the precondition was violated (or a genuine bug was found) — the checks are
never skipped or relaxed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .defects import (
    AlgebraMap,
    defect,
    m2_map,
    scalar_map,
    t2_map,
    weighted_sup_distance_report,
)
from .errors import ClassificationFailure, DefectTooLarge, PreconditionGap
from .filters import Filter, filter_generated, filter_indicator, is_filter, zero_map
from .mat2 import (
    M2_ID,
    M2_ZERO,
    Mat2,
    hs_norm,
    inv2,
    kappa,
    key_estimates,
    rho,
)
from .semilattice import Semilattice, generated
from .weights import WeightedSemilattice, flighty_report, sublevel_set

__all__ = ["Certificate", "correct_scalar", "correct_weighted", "correct_t2", "correct_m2"]

_TOL = 1e-9  # structural tolerance for certified inequalities
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Outcome of a correction: the multiplicative map and its guarantees.

    Invariants enforced at construction: the corrected map's own defect is
    at most 1e-9, and the achieved distance does not exceed the claimed
    bound.  ``details`` carries the classification data (index sets, base
    point, projection) that the construction committed to.
    """

    target: str
    corrected: AlgebraMap
    input_defect: float
    claimed_bound: float
    achieved_distance: float
    corrected_defect: float
    norm: str
    details: dict

    def __post_init__(self):
        if self.corrected_defect > 1e-9:
            raise ClassificationFailure(
                f"corrected map has defect {self.corrected_defect!r} > 1e-9"
            )
        if self.achieved_distance > self.claimed_bound + 1e-12:
            raise ClassificationFailure(
                f"achieved distance {self.achieved_distance!r} exceeds the "
                f"claimed bound {self.claimed_bound!r}"
            )


def _require_semilattice(S) -> Semilattice:
    if isinstance(S, WeightedSemilattice):
        raise TypeError(
            "this correction is an unweighted statement: pass the bare semilattice "
            "(weighted maps go through correct_weighted)"
        )
    if not isinstance(S, Semilattice):
        raise TypeError(f"expected a Semilattice, got {type(S)!r}")
    return S


def correct_scalar(S: Semilattice, psi: AlgebraMap) -> Certificate:
    """Correct a scalar map with defect < 1/5 to a filter indicator.

    The set ``S_1 = {e : |psi(e) - 1| < 7/25}`` is certified to be empty or
    a filter; its indicator ``chi`` satisfies the certified pointwise bound
    ``|psi(e) - chi(e)| <= (7/5) |psi(e)^2 - psi(e)|``, hence
    ``sup |psi - chi| <= (7/5) defect(psi)``.
    """
    S = _require_semilattice(S)
    if psi.codomain != "scalar":
        raise ValueError("correct_scalar expects a scalar map")
    rep = defect(S, psi)
    delta = rep.defect_float
    if not delta < 0.2:
        raise DefectTooLarge(delta, 0.2)
    values = [complex(v) for v in psi.values]
    s1 = frozenset(e for e, v in enumerate(values) if abs(v - 1.0) < 7.0 / 25.0)
    if s1 and not is_filter(S, s1):
        raise ClassificationFailure("the near-one level set is neither empty nor a filter")
    chi = scalar_map([1 if e in s1 else 0 for e in range(S.n)])
    for e, v in enumerate(values):
        pointwise = abs(v - (1.0 if e in s1 else 0.0))
        if pointwise > 1.4 * abs(v * v - v) + _TOL:
            raise ClassificationFailure(
                f"pointwise bound |psi - chi| <= (7/5)|psi^2 - psi| failed at {e}"
            )
    dist = weighted_sup_distance_report(S, psi, chi)
    chi_defect = defect(S, chi)
    return Certificate(
        target="scalar",
        corrected=chi,
        input_defect=delta,
        claimed_bound=1.4 * delta,
        achieved_distance=dist.value_float,
        corrected_defect=chi_defect.defect_float,
        norm="abs",
        details={"S1": sorted(s1), "distance_witness": dist.witness},
    )


def _binary_values(psi: AlgebraMap) -> list[int]:
    out = []
    for e, v in enumerate(psi.values):
        z = complex(v)
        if z == 0:
            out.append(0)
        elif z == 1:
            out.append(1)
        else:
            raise ValueError(
                f"correct_weighted expects a {{0,1}}-valued map (round first); "
                f"value at {e} is {v!r}"
            )
    return out


def correct_weighted(WS: WeightedSemilattice, psi: AlgebraMap, epsilon: float) -> Certificate:
    """Correct a binary map on a weighted semilattice to a filter indicator.

    Requires the margin ``2 * delta * C / epsilon < 1`` where ``delta`` is
    the weighted defect of ``psi`` and ``C`` the flighty constant at level
    ``2/epsilon`` (otherwise :class:`PreconditionGap` reports the violating
    constants).  The correction keeps ``psi`` on the sublevel set
    ``S_fix = {omega <= 2/epsilon}`` — certified via ``F`` intersecting
    ``S_fix`` exactly in ``E = {y in S_fix : psi(y) = 1}`` — and the
    distance bound ``epsilon`` comes from weights above ``2/epsilon``
    elsewhere.
    """
    if not isinstance(WS, WeightedSemilattice):
        raise TypeError("correct_weighted needs a WeightedSemilattice")
    if psi.codomain != "scalar":
        raise ValueError("correct_weighted expects a scalar map")
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    binary = _binary_values(psi)
    delta = defect(WS, psi).defect_float
    level = 2.0 / epsilon
    flighty = flighty_report(WS, level)
    c_val = float(flighty.value)
    if not 2.0 * delta * c_val / epsilon < 1.0:
        raise PreconditionGap(delta, c_val, epsilon)
    s_fix = sublevel_set(WS, level)
    ones = frozenset(y for y in s_fix if binary[y] == 1)
    S = WS.S
    if ones:
        filt: Filter | None = filter_generated(S, ones)
        closure = generated(S, ones)
        for x in closure:
            if binary[x] != 1:
                raise ClassificationFailure(
                    f"psi is not identically 1 on the set generated by E (fails at {x})"
                )
        if frozenset(filt.members) & s_fix != ones:
            raise ClassificationFailure(
                "generated filter meets the sublevel set outside E"
            )
        chi = filter_indicator(S, filt)
    else:
        filt = None
        chi = zero_map(S)
    dist = weighted_sup_distance_report(WS, psi, chi)
    if dist.value_float > epsilon + _TOL:
        raise ClassificationFailure(
            f"corrected map is {dist.value_float!r} away, beyond epsilon = {epsilon!r}"
        )
    chi_defect = defect(WS, chi)
    return Certificate(
        target="weighted-scalar",
        corrected=chi,
        input_defect=delta,
        claimed_bound=epsilon,
        achieved_distance=dist.value_float,
        corrected_defect=chi_defect.defect_float,
        norm="abs",
        details={
            "delta": delta,
            "flighty_constant": c_val,
            "margin": 2.0 * delta * c_val / epsilon,
            "sublevel": sorted(s_fix),
            "E": sorted(ones),
            "filter": sorted(filt.members) if filt is not None else None,
            "distance_witness": dist.witness,
        },
    )


def correct_t2(S: Semilattice, theta: AlgebraMap) -> Certificate:
    """Correct a T2-valued map with defect < 1/5 to ``chi`` times the identity.

    The diagonal part ``a`` is scalar-corrected to a filter indicator
    ``chi``; the certified per-element chain
    ``|a - chi| + |b| <= (7/5)|a^2 - a| + (25/11)|(2a - 1) b|
    <= (25/11) ||theta(e)^2 - theta(e)||`` yields the (25/11) bound, using
    ``|2a(e) - 1| >= 11/25`` which is asserted en route.
    """
    S = _require_semilattice(S)
    if theta.codomain != "t2":
        raise ValueError("correct_t2 expects a T2-valued map")
    rep = defect(S, theta)
    delta = rep.defect_float
    if not delta < 0.2:
        raise DefectTooLarge(delta, 0.2)
    a_vals = [complex(v.a) for v in theta.values]
    b_vals = [complex(v.b) for v in theta.values]
    a_map = scalar_map(a_vals)
    a_defect = defect(S, a_map).defect_float
    if a_defect > delta + _TOL:
        raise ClassificationFailure("diagonal defect exceeded the full T2 defect")
    scalar_cert = correct_scalar(S, a_map)
    chi_vals = [int(complex(v).real) for v in scalar_cert.corrected.values]
    for e in range(S.n):
        if abs(2.0 * a_vals[e] - 1.0) < 11.0 / 25.0 - _TOL:
            raise ClassificationFailure(
                f"|2a - 1| >= 11/25 failed at element {e}"
            )
        lhs = abs(a_vals[e] - chi_vals[e]) + abs(b_vals[e])
        diag = abs(a_vals[e] ** 2 - a_vals[e]) + abs((2.0 * a_vals[e] - 1.0) * b_vals[e])
        if lhs > (25.0 / 11.0) * diag + _TOL:
            raise ClassificationFailure(
                f"per-element (25/11) bound against the diagonal defect failed at {e}"
            )
    phi = t2_map([(chi_vals[e], 0) for e in range(S.n)])
    dist = weighted_sup_distance_report(S, theta, phi)
    phi_defect = defect(S, phi)
    return Certificate(
        target="t2",
        corrected=phi,
        input_defect=delta,
        claimed_bound=(25.0 / 11.0) * delta,
        achieved_distance=dist.value_float,
        corrected_defect=phi_defect.defect_float,
        norm="t2",
        details={
            "S1": scalar_cert.details["S1"],
            "scalar_bound": scalar_cert.claimed_bound,
            "distance_witness": dist.witness,
        },
    )


# ---------------------------------------------------------------------------
# The 2x2 matrix correction.
# ---------------------------------------------------------------------------


def _trace_classify(vals: list[Mat2], delta: float) -> tuple[list[int], list[float]]:
    """Assign each value its trace class j in {0,1,2}, certifying the windows.

    The nearest class must lie within sqrt(2) * rho(delta) * delta (< 0.05,
    which makes the radius-0.95 windows and these tight windows agree); the
    other classes are then automatically at distance > 0.95.
    """
    radius = _SQRT2 * rho(delta) * delta
    if not radius < 0.05:
        raise ClassificationFailure("trace window radius failed the < 0.05 bound")
    classes: list[int] = []
    distances: list[float] = []
    for e, v in enumerate(vals):
        tr = complex(v.trace)
        j = min((0, 1, 2), key=lambda k: abs(tr - k))
        td = abs(tr - j)
        if td > radius + _TOL:
            raise ClassificationFailure(
                f"trace {tr!r} of element {e} is outside every certified window"
            )
        classes.append(j)
        distances.append(td)
    return classes, distances


def _m2_battery(S: Semilattice, vals: list[Mat2], classes: list[int], delta: float,
                s_p: frozenset[int], s_q: frozenset[int]) -> int:
    """Run every certified closure/metric assertion of the 2x2 correction.

    Returns the number of checks performed; raises
    :class:`ClassificationFailure` on the first violated claim.
    """
    n = S.n
    table = S.table
    leq = S.leq
    kd = kappa(delta) * delta
    checks = 0

    def fail(msg: str):
        raise ClassificationFailure(msg)

    label = {}
    for e in range(n):
        if classes[e] == 2:
            label[e] = "2"
        elif classes[e] == 0:
            label[e] = "0"
        else:
            label[e] = "p" if e in s_p else "q"

    for e in range(n):
        checks += 1
        if hs_norm(2.0 * vals[e] - M2_ID) < math.sqrt(max(2.0 - 6.0 * delta, 0.0)) - _TOL:
            fail(f"||2 theta - I|| lower bound failed at element {e}")
        if label[e] == "2":
            checks += 2
            if hs_norm(vals[e] - M2_ID) > kd + _TOL:
                fail(f"element {e} in the near-identity class is not within kappa*delta of I")
            if hs_norm(inv2(vals[e])) >= 1.5:
                fail(f"inverse norm bound < 1.5 failed on the near-identity class at {e}")
        if label[e] == "0":
            checks += 2
            if hs_norm(vals[e]) > kd + _TOL:
                fail(f"element {e} in the near-zero class is not within kappa*delta of 0")
            if hs_norm(inv2(M2_ID - vals[e])) >= 1.5:
                fail(f"inverse norm bound < 1.5 failed on the near-zero class at {e}")

    for e in range(n):
        for f in range(n):
            p = int(table[e, f])
            le, lf, lp = label[e], label[f], label[p]
            checks += 1
            if le == "2" and lf == "2" and lp != "2":
                fail(f"near-identity class is not closed under products at ({e},{f})")
            if lf == "0" and lp != "0":
                fail(f"near-zero class is not an ideal at ({e},{f})")
            if le == "2" and lf == "p" and lp != "p":
                fail(f"identity * P-class escaped the P-class at ({e},{f})")
            if le == "2" and lf == "q" and lp != "q":
                fail(f"identity * Q-class escaped the Q-class at ({e},{f})")
            if le == "p" and lf == "p" and lp != "p":
                fail(f"P-class not closed under products at ({e},{f})")
            if le == "q" and lf == "q" and lp != "q":
                fail(f"Q-class not closed under products at ({e},{f})")
            if {le, lf} == {"p", "q"} and lp != "0":
                fail(f"P-class times Q-class left the near-zero class at ({e},{f})")
            if le in ("p", "q") and lf in ("p", "q") and lp == "2":
                fail(f"rank-one classes multiplied into the identity class at ({e},{f})")
            # upward closure of the near-identity class
            if leq[f, e] and lf == "2" and le != "2":
                fail(f"near-identity class is not upward closed at ({f},{e})")

    mid = [e for e in range(n) if classes[e] == 1]
    for e in mid:
        for f in mid:
            p = int(table[e, f])
            if classes[p] == 0:
                checks += 2
                if hs_norm(vals[e] + vals[f] - M2_ID) > 10.0 * delta + _TOL:
                    fail(f"separation bound ||e + f - I|| <= 10 delta failed at ({e},{f})")
                if hs_norm(vals[e] - vals[f]) < 4.0 / 3.0 - 10.0 * delta - _TOL:
                    fail(f"separation bound ||e - f|| >= 4/3 - 10 delta failed at ({e},{f})")
            if leq[f, e]:
                checks += 1
                if hs_norm(vals[e] - vals[f]) > 5.0 * delta + _TOL:
                    fail(f"chain bound ||e - f|| <= 5 delta failed at ({e},{f})")
    return checks


def correct_m2(S: Semilattice, theta: AlgebraMap, delta: float | None = None) -> Certificate:
    """Correct a 2x2-matrix map with HS defect < 0.03 to an exactly
    multiplicative one within HS distance 12 * delta.

    The construction: classify elements by trace into near-zero, middle and
    near-identity classes; send the outer classes to 0 and I; split the
    middle class by the product-based equivalence at its lowest-index base
    point ``p0`` into a P-class and a Q-class; take ``P`` as the certified
    idempotent near ``theta(p0)`` and send the two classes to ``P`` and
    ``I - P``.  Every inclusion, closure, separation, chain and inverse-norm
    claim used by the proof of correctness is asserted at runtime.
    """
    S = _require_semilattice(S)
    if theta.codomain != "m2":
        raise ValueError("correct_m2 expects a 2x2-matrix-valued map")
    rep = defect(S, theta, "hs")
    measured = rep.defect_float
    if delta is None:
        delta = measured
    delta = float(delta)
    if measured > delta:
        raise DefectTooLarge(measured, delta, what="measured defect (vs supplied delta)")
    if not delta < 0.03:
        raise DefectTooLarge(delta, 0.03, what="delta")

    vals = [Mat2(*(complex(x) for x in v)) for v in theta.values]
    n = S.n
    classes, trace_distances = _trace_classify(vals, delta)
    s0 = frozenset(e for e in range(n) if classes[e] == 0)
    s1 = frozenset(e for e in range(n) if classes[e] == 1)
    s2 = frozenset(e for e in range(n) if classes[e] == 2)

    details: dict = {
        "classes": classes,
        "trace_distances": trace_distances,
        "S0": sorted(s0),
        "S1": sorted(s1),
        "S2": sorted(s2),
    }

    if not s1:
        phi_vals = [M2_ID if e in s2 else M2_ZERO for e in range(n)]
        s_p: frozenset[int] = frozenset()
        s_q: frozenset[int] = frozenset()
        p_mat = None
        details.update({"p0": None, "P": None, "Sp": [], "Sq": []})
    else:
        p0 = min(s1)
        table = S.table
        s_p = frozenset(e for e in s1 if int(table[e, p0]) in s1)
        s_q = s1 - s_p
        # two-class structure: the product relation must agree with the split
        for e in s1:
            for f in s1:
                same = (e in s_p) == (f in s_p)
                related = int(table[e, f]) in s1
                if related != same:
                    raise ClassificationFailure(
                        f"middle-class relation is not the two-class split at ({e},{f})"
                    )
        # tiny headroom: the sup-defect scan and the per-element norm follow
        # different floating-point paths, so the base point's own defect may
        # exceed the scanned maximum by a last-place unit
        ke = key_estimates(vals[p0], delta * (1.0 + 1e-12) + 1e-15)
        if ke.trace_class != 1:
            raise ClassificationFailure("base point's trace class is not 1")
        p_mat = ke.nearby_idempotent
        if abs(complex(p_mat.trace) - 1.0) > 1e-9:
            raise ClassificationFailure("projection near the base point is not rank one")
        if hs_norm(p_mat - vals[p0]) > rho(delta) * delta + _TOL:
            raise ClassificationFailure("projection strayed beyond rho(delta)*delta of the base point")
        complement = M2_ID - p_mat
        for e in s_p:
            if hs_norm(vals[e] - p_mat) > 12.0 * delta + _TOL:
                raise ClassificationFailure(
                    f"P-class element {e} lies outside the 12 delta ball around P"
                )
        for e in s_q:
            if hs_norm(vals[e] - complement) > 12.0 * delta + _TOL:
                raise ClassificationFailure(
                    f"Q-class element {e} lies outside the 12 delta ball around I - P"
                )
        phi_vals = []
        for e in range(n):
            if e in s2:
                phi_vals.append(M2_ID)
            elif e in s0:
                phi_vals.append(M2_ZERO)
            elif e in s_p:
                phi_vals.append(p_mat)
            else:
                phi_vals.append(complement)
        details.update(
            {
                "p0": p0,
                "P": [[p_mat.a, p_mat.b], [p_mat.c, p_mat.d]],
                "Sp": sorted(s_p),
                "Sq": sorted(s_q),
            }
        )

    checks = _m2_battery(S, vals, classes, delta, s_p, s_q)
    details["assertions_checked"] = checks
    details["F1"] = sorted(s2 | s_p)
    details["F2"] = sorted(s2 | s_q)

    phi = m2_map(phi_vals)
    dist = weighted_sup_distance_report(S, theta, phi, "hs")
    phi_defect = defect(S, phi, "hs")
    return Certificate(
        target="m2",
        corrected=phi,
        input_defect=measured,
        claimed_bound=12.0 * delta,
        achieved_distance=dist.value_float,
        corrected_defect=phi_defect.defect_float,
        norm="hs",
        details=details,
    )
