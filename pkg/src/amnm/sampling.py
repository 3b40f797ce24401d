"""Random instance generators for exercising the correction procedures.

Each generator guarantees its stated precondition (retrying with shrunken
noise when a draw lands outside), so downstream correction calls are
entitled to succeed.  All draws go through a caller-supplied
``numpy.random.Generator`` — fixed seed, fixed instances.
"""

from __future__ import annotations

import math

import numpy as np

from .defects import AlgebraMap, defect, m2_map, scalar_map, t2_map
from .filters import enumerate_filters, filter_indicator, zero_map
from .mat2 import Mat2, hs_norm
from .semilattice import Semilattice
from .weights import WeightedSemilattice, flighty_report

__all__ = [
    "random_multiplicative_scalar",
    "random_scalar_instance",
    "random_t2_instance",
    "random_m2_instance",
    "random_binary_weighted_instance",
    "random_bounded_idempotent",
    "random_near_idempotent",
]

_MAX_SHRINKS = 60


def random_multiplicative_scalar(rng: np.random.Generator, S: Semilattice) -> AlgebraMap:
    """A uniformly chosen multiplicative scalar map (zero or a filter indicator)."""
    filters = enumerate_filters(S)
    k = int(rng.integers(0, len(filters) + 1))
    if k == len(filters):
        return zero_map(S)
    return filter_indicator(S, filters[k])


def _complex_noise(rng: np.random.Generator, amp: float) -> complex:
    r = amp * math.sqrt(rng.uniform())
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return complex(r * math.cos(phi), r * math.sin(phi))


def random_scalar_instance(
    rng: np.random.Generator, S: Semilattice, *, threshold: float = 0.2, amp: float = 0.06
) -> AlgebraMap:
    """A perturbed multiplicative scalar map with defect strictly below ``threshold``."""
    base = random_multiplicative_scalar(rng, S)
    noise = [_complex_noise(rng, amp) for _ in range(S.n)]
    scale = 1.0
    for _ in range(_MAX_SHRINKS):
        psi = scalar_map([complex(v) + scale * z for v, z in zip(base.values, noise)])
        if defect(S, psi).defect_float < 0.95 * threshold:
            return psi
        scale *= 0.5
    raise RuntimeError("could not shrink scalar noise below the defect threshold")


def random_t2_instance(
    rng: np.random.Generator, S: Semilattice, *, threshold: float = 0.2, amp: float = 0.03
) -> AlgebraMap:
    """A perturbed multiplicative upper-triangular map with defect below ``threshold``."""
    base = random_multiplicative_scalar(rng, S)
    noise = [(_complex_noise(rng, amp), _complex_noise(rng, amp)) for _ in range(S.n)]
    scale = 1.0
    for _ in range(_MAX_SHRINKS):
        theta = t2_map(
            [
                (complex(v) + scale * za, scale * zb)
                for v, (za, zb) in zip(base.values, noise)
            ]
        )
        if defect(S, theta).defect_float < 0.95 * threshold:
            return theta
        scale *= 0.5
    raise RuntimeError("could not shrink T2 noise below the defect threshold")


def random_bounded_idempotent(rng: np.random.Generator, *, min_pairing: float = 0.35) -> Mat2:
    """A rank-one idempotent ``v u* / (u* v)`` with HS norm at most ``1/min_pairing``."""
    while True:
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        nu = math.sqrt(float(np.vdot(u, u).real))
        nv = math.sqrt(float(np.vdot(v, v).real))
        if nu < 1e-6 or nv < 1e-6:
            continue
        u, v = u / nu, v / nv
        pairing = complex(np.vdot(u, v))
        if abs(pairing) < min_pairing:
            continue
        return Mat2(
            v[0] * u[0].conjugate() / pairing,
            v[0] * u[1].conjugate() / pairing,
            v[1] * u[0].conjugate() / pairing,
            v[1] * u[1].conjugate() / pairing,
        )


def _random_mat2_ball(rng: np.random.Generator, radius: float) -> Mat2:
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    nrm = math.sqrt(float(np.vdot(raw, raw).real))
    if nrm == 0.0:
        return Mat2(0.0j, 0.0j, 0.0j, 0.0j)
    r = radius * rng.uniform()
    raw = raw * (r / nrm)
    return Mat2(*(complex(z) for z in raw))


def random_m2_instance(
    rng: np.random.Generator,
    S: Semilattice,
    *,
    threshold: float = 0.03,
    amp: float = 0.002,
) -> AlgebraMap:
    """A perturbed multiplicative 2x2 map with HS defect strictly below ``threshold``.

    The base map is ``chi_F1 P + chi_F2 (I - P)`` for random empty-or-filter
    sets and a norm-bounded random rank-one ``P``; each value then receives
    an independent perturbation of HS norm at most ``amp``.
    """
    filters = enumerate_filters(S)
    options = [None] + list(filters)
    F1 = options[int(rng.integers(0, len(options)))]
    F2 = options[int(rng.integers(0, len(options)))]
    P = random_bounded_idempotent(rng)
    one = 1.0 + 0.0j
    ident = Mat2(one, 0.0j, 0.0j, one)
    comp = ident - P
    m1 = F1.members if F1 is not None else frozenset()
    m2 = F2.members if F2 is not None else frozenset()
    base = []
    for e in range(S.n):
        if e in m1 and e in m2:
            base.append(ident)
        elif e in m1:
            base.append(P)
        elif e in m2:
            base.append(comp)
        else:
            base.append(Mat2(0.0j, 0.0j, 0.0j, 0.0j))
    noise = [_random_mat2_ball(rng, amp) for _ in range(S.n)]
    scale = 1.0
    for _ in range(_MAX_SHRINKS):
        theta = m2_map([b + scale * z for b, z in zip(base, noise)])
        if defect(S, theta, "hs").defect_float < 0.95 * threshold:
            return theta
        scale *= 0.5
    raise RuntimeError("could not shrink matrix noise below the defect threshold")


def random_binary_weighted_instance(
    rng: np.random.Generator, WS: WeightedSemilattice, epsilon: float
) -> AlgebraMap:
    """A {0,1}-valued map whose weighted defect keeps the correction margin
    ``2 * delta * C(2/epsilon) / epsilon`` strictly below 1.

    Starts from a multiplicative map and keeps only those random flips that
    preserve the margin, so the precondition holds by construction.
    """
    S = WS.S
    c_val = float(flighty_report(WS, 2.0 / epsilon).value)
    values = [int(complex(v).real) for v in random_multiplicative_scalar(rng, S).values]
    order = list(rng.permutation(S.n))
    flips = int(rng.integers(0, S.n + 1))
    for e in order[:flips]:
        values[e] = 1 - values[e]
        delta = defect(WS, scalar_map(values)).defect_float
        if not 2.0 * delta * c_val / epsilon < 0.95:
            values[e] = 1 - values[e]
    psi = scalar_map(values)
    delta = defect(WS, psi).defect_float
    if not 2.0 * delta * c_val / epsilon < 1.0:
        raise RuntimeError("flip filter failed to preserve the margin")
    return psi


def random_near_idempotent(
    rng: np.random.Generator, eps: float, *, rank_weights=(0.2, 0.6, 0.2)
) -> Mat2:
    """A matrix with ``||A - A^2||_HS <= eps``, near a random 0/rank-one/identity."""
    kind = int(rng.choice(3, p=list(rank_weights)))
    if kind == 0:
        base = Mat2(0.0j, 0.0j, 0.0j, 0.0j)
    elif kind == 2:
        base = Mat2(1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j)
    else:
        base = random_bounded_idempotent(rng)
    noise = _random_mat2_ball(rng, 1.0)
    scale = 0.45 * eps  # first guess: the defect map is roughly 2-Lipschitz here
    for _ in range(_MAX_SHRINKS):
        A = base + scale * noise
        if hs_norm(A @ A - A) <= eps:
            return A
        scale *= 0.5
    return base
