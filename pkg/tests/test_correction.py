"""Correction procedures: certified bounds, classification data, failure modes."""

import numpy as np
import pytest

from amnm import (
    DefectTooLarge,
    PreconditionGap,
    characters,
    correct_m2,
    correct_scalar,
    correct_t2,
    correct_weighted,
    defect,
    filter_indicator,
    free_semilattice,
    geometric_weight,
    is_filter,
    generated,
    nearest_binary_idempotent,
    nmin,
    random_binary_weighted_instance,
    random_m2_instance,
    random_scalar_instance,
    random_semilattice,
    random_submultiplicative_weight,
    random_t2_instance,
    scalar_map,
    sublevel_set,
    t2_map,
    weighted,
    weighted_sup_distance,
)


# ---------------------------------------------------------------------------
# Scalar.
# ---------------------------------------------------------------------------


def test_scalar_correction_bound_on_random_instances(rng):
    for _ in range(100):
        S = random_semilattice(rng)
        psi = random_scalar_instance(rng, S)
        cert = correct_scalar(S, psi)
        assert cert.target == "scalar"
        assert cert.corrected_defect <= 1e-9
        assert cert.achieved_distance <= 1.4 * cert.input_defect + 1e-9
        members = cert.details["S1"]
        assert not members or is_filter(S, members)


def test_scalar_correction_is_identity_on_characters():
    S = free_semilattice(2)
    for chi in characters(S):
        cert = correct_scalar(S, chi)
        assert cert.achieved_distance == 0
        assert tuple(cert.corrected.values) == tuple(chi.values)


def test_scalar_correction_of_the_zero_map():
    S = nmin(3)
    cert = correct_scalar(S, scalar_map([0.0, 0.0, 0.0]))
    assert cert.achieved_distance == 0
    assert set(cert.corrected.values) == {0}


def test_scalar_correction_rejects_large_defect():
    S = free_semilattice(2)
    # indicator of the two singletons: psi(x)psi(y) = 1 but psi(xy) = 0
    with pytest.raises(DefectTooLarge) as exc:
        correct_scalar(S, scalar_map([1.0, 1.0, 0.0]))
    assert exc.value.threshold == pytest.approx(0.2)


def test_scalar_correction_rejects_weighted_input():
    WS = geometric_weight(3)
    with pytest.raises(TypeError):
        correct_scalar(WS, scalar_map([1.0, 1.0, 1.0]))


# ---------------------------------------------------------------------------
# Weighted scalar.
# ---------------------------------------------------------------------------


def test_weighted_correction_bound_and_classification(rng):
    done = 0
    while done < 60:
        S = random_semilattice(rng)
        WS = random_submultiplicative_weight(rng, S)
        epsilon = float(rng.uniform(0.1, 0.6))
        psi = random_binary_weighted_instance(rng, WS, epsilon)
        cert = correct_weighted(WS, psi, epsilon)
        assert cert.achieved_distance <= epsilon + 1e-12
        # the sublevel set fixed by the construction is exactly recovered
        E = set(cert.details["E"])
        fixed = {e for e in sublevel_set(WS, 2.0 / epsilon) if psi.values[e] == 1}
        assert E == fixed
        F = cert.details["filter"]
        if E:
            assert set(F) & set(cert.details["sublevel"]) == E
            # psi is identically 1 on the subsemilattice generated by E
            for e in generated(S, E):
                assert psi.values[e] == 1
        else:
            assert F is None
            assert set(cert.corrected.values) == {0}
        done += 1


def test_weighted_correction_requires_margin_below_one():
    WS = geometric_weight(4)  # weights 2, 4, 8, 16
    # defect 1/4 at the pair (0,1): psi flips at 1
    psi = scalar_map([1, 0, 1, 1])
    eps = 0.05
    with pytest.raises(PreconditionGap) as exc:
        correct_weighted(WS, psi, eps)
    assert exc.value.margin >= 1.0


def test_weighted_correction_rejects_non_binary_values():
    WS = geometric_weight(3)
    with pytest.raises(ValueError, match="round"):
        correct_weighted(WS, scalar_map([0.9, 1.0, 1.0]), 0.5)


# ---------------------------------------------------------------------------
# Upper-triangular (dual-number) target.
# ---------------------------------------------------------------------------


def test_t2_correction_bound_on_random_instances(rng):
    for _ in range(100):
        S = random_semilattice(rng)
        theta = random_t2_instance(rng, S)
        cert = correct_t2(S, theta)
        assert cert.corrected_defect <= 1e-9
        assert cert.achieved_distance <= (25.0 / 11.0) * cert.input_defect + 1e-9
        # corrected map is a scalar character embedded on the diagonal
        assert all(v.b == 0 for v in cert.corrected.values)
        assert set(v.a for v in cert.corrected.values) <= {0, 1}


def test_t2_correction_kills_the_nilpotent_part():
    S = nmin(2)
    theta = t2_map([(0.01, 0.02), (0.99, -0.015)])
    cert = correct_t2(S, theta)
    assert [v.a for v in cert.corrected.values] == [0, 1]


def test_t2_correction_rejects_large_defect():
    S = free_semilattice(2)
    with pytest.raises(DefectTooLarge):
        correct_t2(S, t2_map([(1, 0), (1, 0), (0, 0)]))


# ---------------------------------------------------------------------------
# Full 2x2 target.
# ---------------------------------------------------------------------------


def test_m2_correction_bound_and_idempotent_choice(rng):
    for _ in range(40):
        S = random_semilattice(rng)
        theta = random_m2_instance(rng, S)
        delta = defect(S, theta, "hs").defect_float
        cert = correct_m2(S, theta)
        assert cert.norm == "hs"
        assert cert.claimed_bound == pytest.approx(12.0 * cert.input_defect)
        assert cert.achieved_distance <= 12.0 * delta + 1e-9
        assert cert.corrected_defect <= 1e-9
        if cert.details["S1"]:
            p0 = cert.details["p0"]
            P, _ = nearest_binary_idempotent(theta.values[p0])
            assert cert.details["P"] == [[P.a, P.b], [P.c, P.d]]


def test_m2_correction_rejects_stated_delta_above_threshold(rng):
    S = nmin(3)
    theta = random_m2_instance(rng, S)
    with pytest.raises(DefectTooLarge):
        correct_m2(S, theta, delta=0.03)


def test_m2_correction_rejects_understated_delta(rng):
    S = nmin(3)
    theta = random_m2_instance(rng, S, threshold=0.02)
    measured = defect(S, theta, "hs").defect_float
    if measured > 0.0:
        with pytest.raises(DefectTooLarge):
            correct_m2(S, theta, delta=measured / 2.0)


def test_m2_correction_distance_verified_independently(rng):
    for _ in range(20):
        S = random_semilattice(rng)
        theta = random_m2_instance(rng, S)
        cert = correct_m2(S, theta)
        again = weighted_sup_distance(S, theta, cert.corrected, "hs")
        assert float(again) == pytest.approx(cert.achieved_distance, abs=1e-12)


def test_corrections_compose_with_exact_family_maps():
    # an exactly multiplicative input comes back unchanged at distance zero
    S = free_semilattice(2)
    chi = filter_indicator(S, None)
    cert = correct_scalar(S, scalar_map([complex(v) for v in chi.values]))
    assert cert.achieved_distance == 0
