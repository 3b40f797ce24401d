"""Closed-form 2x2 matrix analysis: norms, Schur form, idempotent projection.

Everything here is exact-formula work on 2x2 complex matrices — no iterative
linear algebra.  :class:`Mat2` is a lightweight tuple type whose entries may
be Python complex/floats or exact ``Fraction`` values (for the certified
counterexample computations); all arithmetic is entrywise and generic.

The analytical core:

* ``f_key(t) = (1 - sqrt(1 - 4t))/2`` — the distance-to-{0,1} control
  function for approximately idempotent scalars, with the derived factors
  ``rho(t) = f_key(t)/t`` and ``kappa(t) = 1/(1 - sqrt(2) rho(t) t)``;
* :func:`scalar_project` — nearest of {0, 1} with the certified bound;
* :func:`unitary_triangularize` — deterministic closed-form Schur form;
* :func:`key_estimates` — for ``||A - A^2|| <= eps < 2/9``, locates the trace
  near an integer class j in {0, 1, 2} and produces a genuinely idempotent
  matrix nearby with the certified distance bound;
* :func:`obstruction_check` — the lower-bound lemma used to certify that
  certain maps stay far from every pair of commuting idempotents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ClassificationFailure, DefectTooLarge

__all__ = [
    "Mat2",
    "T2Element",
    "M2_ZERO",
    "M2_ID",
    "T2_ZERO",
    "T2_ONE",
    "abs2",
    "hs_norm_sq",
    "hs_norm",
    "op_norm",
    "t2_norm",
    "inv2",
    "f_key",
    "rho",
    "kappa",
    "ScalarProjection",
    "scalar_project",
    "unitary_triangularize",
    "KeyEstimateReport",
    "nearest_binary_idempotent",
    "key_estimates",
    "ObstructionReport",
    "obstruction_check",
    "sample_commuting_idempotents",
    "is_idempotent_within",
    "commute_within",
]


class Mat2(NamedTuple):
    """A 2x2 matrix (a b / c d) with generic numeric entries."""

    a: complex
    b: complex
    c: complex
    d: complex

    # NamedTuple inherits tuple's concatenation/repetition operators, which
    # would silently corrupt arithmetic; all four are overridden.
    def __add__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __mul__(self, s) -> "Mat2":
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    __rmul__ = __mul__

    def adjoint(self) -> "Mat2":
        return Mat2(
            self.a.conjugate(),
            self.c.conjugate(),
            self.b.conjugate(),
            self.d.conjugate(),
        )

    @property
    def trace(self):
        return self.a + self.d

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def to_array(self) -> np.ndarray:
        return np.array([[complex(self.a), complex(self.b)], [complex(self.c), complex(self.d)]])

    @classmethod
    def from_array(cls, arr) -> "Mat2":
        return cls(arr[0][0], arr[0][1], arr[1][0], arr[1][1])


class T2Element(NamedTuple):
    """Element (a, b) of the two-dimensional algebra with product
    (a, b)(c, d) = (ac, ad + bc) and norm |a| + |b|."""

    a: complex
    b: complex

    def __add__(self, o: "T2Element") -> "T2Element":
        return T2Element(self.a + o.a, self.b + o.b)

    def __sub__(self, o: "T2Element") -> "T2Element":
        return T2Element(self.a - o.a, self.b - o.b)

    def __matmul__(self, o: "T2Element") -> "T2Element":
        return T2Element(self.a * o.a, self.a * o.b + self.b * o.a)

    def as_mat2(self) -> Mat2:
        return Mat2(self.a, self.b, self.a * 0, self.a)


M2_ZERO = Mat2(0, 0, 0, 0)
M2_ID = Mat2(1, 0, 0, 1)
T2_ZERO = T2Element(0, 0)
T2_ONE = T2Element(1, 0)


def abs2(x):
    """|x|^2, exact for real/rational/complex-rational inputs."""
    v = x * x.conjugate()
    return v.real if isinstance(v, complex) else v


def hs_norm_sq(A: Mat2):
    """Squared Hilbert-Schmidt norm tr(A* A); exact for exact entries."""
    return abs2(A.a) + abs2(A.b) + abs2(A.c) + abs2(A.d)


def hs_norm(A: Mat2) -> float:
    return math.sqrt(float(hs_norm_sq(A)))


def op_norm(A: Mat2) -> float:
    """Largest singular value, from the closed form on the 2x2 Gram trace."""
    t = float(hs_norm_sq(A))
    d = float(abs2(A.det))
    disc = max(t * t - 4.0 * d, 0.0)
    return math.sqrt((t + math.sqrt(disc)) / 2.0)


def t2_norm(x: T2Element):
    """|a| + |b| (exact when the parts are rational reals)."""
    return abs(x.a) + abs(x.b)


def inv2(A: Mat2) -> Mat2:
    det = A.det
    if abs(complex(det)) == 0.0:
        raise ZeroDivisionError("matrix is singular")
    return Mat2(A.d / det, -A.b / det, -A.c / det, A.a / det)


def is_idempotent_within(A: Mat2, tol: float = 1e-9) -> bool:
    return hs_norm(A @ A - A) <= tol


def commute_within(A: Mat2, B: Mat2, tol: float = 1e-9) -> bool:
    return hs_norm(A @ B - B @ A) <= tol


# ---------------------------------------------------------------------------
# The control functions.
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)


def f_key(t: float) -> float:
    """(1 - sqrt(1 - 4t))/2 on [0, 1/4]: the certified distance from an
    approximately idempotent scalar to the nearer of {0, 1}."""
    t = float(t)
    if not 0.0 <= t <= 0.25:
        raise ValueError(f"f_key requires 0 <= t <= 1/4, got {t!r}")
    return 0.5 * (1.0 - math.sqrt(1.0 - 4.0 * t))


def rho(t: float) -> float:
    """f_key(t)/t, continuously extended by rho(0) = 1; increasing, range [1, 2]."""
    t = float(t)
    if not 0.0 <= t <= 0.25:
        raise ValueError(f"rho requires 0 <= t <= 1/4, got {t!r}")
    if t == 0.0:
        return 1.0
    return f_key(t) / t


def kappa(t: float) -> float:
    """1/(1 - sqrt(2) rho(t) t) on [0, 1/4]; increasing, kappa(0) = 1."""
    return 1.0 / (1.0 - rho(t) * t * _SQRT2)


# ---------------------------------------------------------------------------
# Scalar projection.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarProjection:
    """Nearest point of {0, 1} to an approximately idempotent scalar."""

    value: int
    distance: float
    tie: bool


def scalar_project(z: complex, eps: float) -> ScalarProjection:
    """Project z onto {0, 1} given ``|z^2 - z| <= eps < 1/4``.

    Ties (equidistant z) resolve to 0.  The certified bound
    ``distance <= f_key(|z^2 - z|) <= rho(eps) * eps`` is asserted.
    """
    eps = float(eps)
    if not 0.0 <= eps < 0.25:
        raise ValueError(f"scalar projection requires 0 <= eps < 1/4, got {eps!r}")
    z = complex(z)
    measured = abs(z * z - z)
    if measured > eps:
        raise DefectTooLarge(measured, eps, what="|z^2 - z|")
    d0 = abs(z)
    d1 = abs(z - 1.0)
    value = 0 if d0 <= d1 else 1
    distance = min(d0, d1)
    bound = f_key(measured)
    if distance > bound + 1e-12:
        raise ClassificationFailure(
            f"projection distance {distance!r} exceeds certified bound {bound!r}"
        )
    return ScalarProjection(value, distance, tie=(d0 == d1))


# ---------------------------------------------------------------------------
# Closed-form Schur triangularization.
# ---------------------------------------------------------------------------


def unitary_triangularize(A: Mat2) -> tuple[Mat2, Mat2]:
    """Deterministic unitary U and upper-triangular T with A = U T U*.

    The first diagonal entry of T is the eigenvalue farther from tr(A)/2
    (the two are always equidistant, so effectively the lexicographically
    larger one by (re, im)); the eigenvector is taken from the closed-form
    candidate of larger norm, and the second column is the canonical
    orthogonal completion.  The subdiagonal entry is asserted tiny and then
    set to exactly zero.
    """
    a, b, c, d = (complex(x) for x in A)
    tr = a + d
    disc = (a - d) * (a - d) + 4.0 * b * c
    root = complex(disc) ** 0.5
    lams = (0.5 * (tr + root), 0.5 * (tr - root))
    lam = max(lams, key=lambda z: (abs(z - 0.5 * tr), z.real, z.imag))
    cand1 = (b, lam - a)
    cand2 = (lam - d, c)
    n1 = abs(cand1[0]) ** 2 + abs(cand1[1]) ** 2
    n2 = abs(cand2[0]) ** 2 + abs(cand2[1]) ** 2
    v = cand1 if n1 >= n2 else cand2
    vn = math.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
    if vn == 0.0:
        v = (1.0 + 0.0j, 0.0j)
        vn = 1.0
    v1, v2 = v[0] / vn, v[1] / vn
    U = Mat2(v1, -v2.conjugate(), v2, v1.conjugate())
    T = U.adjoint() @ Mat2(a, b, c, d) @ U
    scale = 1.0 + hs_norm(A)
    if abs(T.c) > 1e-10 * scale:
        raise ClassificationFailure(
            f"triangularization left subdiagonal {abs(T.c)!r} (scale {scale!r})"
        )
    return U, Mat2(T.a, T.b, 0.0j, T.d)


# ---------------------------------------------------------------------------
# Key estimates for approximately idempotent 2x2 matrices.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KeyEstimateReport:
    """Certified localization of an approximately idempotent 2x2 matrix.

    ``trace_class`` is the unique j in {0, 1, 2} with |tr A - j| < 1/2;
    ``nearby_idempotent`` is exactly idempotent (to machine precision) with
    ``||A - P||_HS <= idempotent_distance_bound``, which is ``rho(eps)*eps``
    when the trace class is 1 (P is then rank one) and ``kappa(eps)*eps``
    when it is 0 or 2 (P is then 0 or the identity).
    """

    trace_class: int
    trace_distance: float
    nearby_idempotent: Mat2
    idempotent_distance_bound: float
    achieved_distance: float
    measured: float


def _nearest01(z: complex) -> int:
    return 0 if abs(z) <= abs(z - 1.0) else 1


def nearest_binary_idempotent(A: Mat2) -> tuple[Mat2, int]:
    """Idempotent from rounding the triangularized diagonal of ``A`` to {0, 1}.

    Returns ``(P, j)`` where ``j`` in {0, 1, 2} is the rounded trace.  When
    the rounded diagonal is mixed, ``P`` keeps the triangular
    super-diagonal entry (making it exactly idempotent in that basis);
    otherwise ``P`` is 0 or the identity.  No smallness of ``||A - A^2||``
    is assumed — :func:`key_estimates` adds the certified bounds.
    """
    U, T = unitary_triangularize(A)
    na, nd = _nearest01(T.a), _nearest01(T.d)
    if na != nd:
        P_T = Mat2(complex(na), T.b, 0.0j, complex(nd))
    else:
        P_T = M2_ZERO if na == 0 else M2_ID
    return U @ P_T @ U.adjoint(), na + nd


def key_estimates(A: Mat2, eps: float) -> KeyEstimateReport:
    """Trace localization and idempotent approximation for ``||A - A^2|| <= eps < 2/9``.

    Also certifies the companion lower bound ``||2A - I||_HS >= sqrt(2 - 6 eps)``.
    """
    eps = float(eps)
    if not 0.0 <= eps < 2.0 / 9.0:
        raise ValueError(f"key estimates require 0 <= eps < 2/9, got {eps!r}")
    measured = hs_norm(A @ A - A)
    if measured > eps:
        raise DefectTooLarge(measured, eps, what="||A - A^2||_HS")

    lower = math.sqrt(max(2.0 - 6.0 * measured, 0.0))
    if hs_norm(2.0 * A - M2_ID) < lower - 1e-12:
        raise ClassificationFailure("||2A - I|| fell below the certified lower bound")

    P, j = nearest_binary_idempotent(A)
    trace_distance = abs(complex(A.trace) - j)
    cap = _SQRT2 * rho(eps) * eps + 1e-12
    if trace_distance > cap or trace_distance >= 0.5:
        raise ClassificationFailure(
            f"trace {complex(A.trace)!r} is not within {cap!r} of class {j}"
        )
    bound = rho(eps) * eps if j == 1 else kappa(eps) * eps
    if hs_norm(P @ P - P) > 1e-12 * (1.0 + hs_norm_sq(P)):
        raise ClassificationFailure("constructed projection failed idempotency check")
    achieved = hs_norm(A - P)
    if achieved > bound + 1e-12 * (1.0 + hs_norm(A)):
        raise ClassificationFailure(
            f"achieved distance {achieved!r} exceeds certified bound {bound!r}"
        )
    return KeyEstimateReport(
        trace_class=j,
        trace_distance=trace_distance,
        nearby_idempotent=P,
        idempotent_distance_bound=bound,
        achieved_distance=achieved,
        measured=measured,
    )


# ---------------------------------------------------------------------------
# Obstruction lower bounds (operator norm; they transfer to HS since HS >= op).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObstructionReport:
    """Evaluation of the two-target lower-bound dichotomy."""

    scenario: str
    holds: bool
    lhs_first: float
    bound_first: float
    lhs_second: float
    bound_second: float


def _check_pair_inputs(P: Mat2, Q: Mat2, tol: float) -> None:
    for name, M in (("P", P), ("Q", Q)):
        if not is_idempotent_within(M, tol):
            raise ValueError(f"{name} is not idempotent to within {tol}")
    if not commute_within(P, Q, tol):
        raise ValueError(f"P and Q do not commute to within {tol}")


def obstruction_check(
    P: Mat2,
    Q: Mat2,
    scenario: str,
    *,
    a: float | None = None,
    b: float | None = None,
    d: float | None = None,
    tol: float = 1e-9,
) -> ObstructionReport:
    """Check the certified dichotomy against a pair of commuting idempotents.

    Scenario ``"pair"`` (requires a, b >= 1): with A = (1 -a / 0 0) and
    B = (1 b / 0 0), at least one of ``||P - A||_op >= a/2`` and
    ``||Q - B||_op >= b/2`` holds.  Scenario ``"double"`` (requires d >= 1):
    with C = (1 d / 0 0), at least one of ``||P - 2C||_op >= d/2`` and
    ``||Q - C||_op >= d/4`` holds.  Inputs are validated to be commuting
    idempotents to within ``tol``.
    """
    _check_pair_inputs(P, Q, tol)
    slack = 1e-9
    if scenario == "pair":
        if a is None or b is None or not (a >= 1 and b >= 1):
            raise ValueError("scenario 'pair' requires parameters a >= 1 and b >= 1")
        A = Mat2(1.0, -float(a), 0.0, 0.0)
        B = Mat2(1.0, float(b), 0.0, 0.0)
        lhs1, bd1 = op_norm(P - A), float(a) / 2.0
        lhs2, bd2 = op_norm(Q - B), float(b) / 2.0
    elif scenario == "double":
        if d is None or not d >= 1:
            raise ValueError("scenario 'double' requires parameter d >= 1")
        C = Mat2(1.0, float(d), 0.0, 0.0)
        lhs1, bd1 = op_norm(P - 2.0 * C), float(d) / 2.0
        lhs2, bd2 = op_norm(Q - C), float(d) / 4.0
    else:
        raise ValueError(f"unknown obstruction scenario {scenario!r}")
    holds = (lhs1 >= bd1 - slack) or (lhs2 >= bd2 - slack)
    return ObstructionReport(scenario, holds, lhs1, bd1, lhs2, bd2)


# ---------------------------------------------------------------------------
# Sampling commuting idempotent pairs (all four structural cases).
# ---------------------------------------------------------------------------


def _random_rank1_idempotent(rng: np.random.Generator, exact: bool) -> Mat2:
    """P = v u* / (u* v) for random u, v with a non-degenerate pairing."""
    from fractions import Fraction

    while True:
        if exact:
            u = [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(2)]
            v = [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(2)]
            pairing = u[0] * v[0] + u[1] * v[1]
            nu = u[0] ** 2 + u[1] ** 2
            nv = v[0] ** 2 + v[1] ** 2
            if nu == 0 or nv == 0:
                continue
            if 25 * pairing**2 < nu * nv:  # |<u,v>| >= 0.2 ||u|| ||v||
                continue
            return Mat2(
                v[0] * u[0] / pairing,
                v[0] * u[1] / pairing,
                v[1] * u[0] / pairing,
                v[1] * u[1] / pairing,
            )
        re = rng.standard_normal(4)
        im = rng.standard_normal(4)
        u = [complex(re[0], im[0]), complex(re[1], im[1])]
        v = [complex(re[2], im[2]), complex(re[3], im[3])]
        pairing = u[0].conjugate() * v[0] + u[1].conjugate() * v[1]
        nu = math.sqrt(abs(u[0]) ** 2 + abs(u[1]) ** 2)
        nv = math.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
        if nu == 0.0 or nv == 0.0 or abs(pairing) < 0.2 * nu * nv:
            continue
        return Mat2(
            v[0] * u[0].conjugate() / pairing,
            v[0] * u[1].conjugate() / pairing,
            v[1] * u[0].conjugate() / pairing,
            v[1] * u[1].conjugate() / pairing,
        )


def sample_commuting_idempotents(
    rng: np.random.Generator, count: int, exact: bool = False
) -> list[tuple[Mat2, Mat2]]:
    """Random commuting idempotent pairs covering all structural cases:
    both scalar; equal rank-1; complementary (Q = I - P); one scalar.

    In exact mode the entries are rational (real), and idempotency /
    commutation hold exactly; in float mode they hold to machine precision.
    """
    one = 1 if exact else 1.0
    zero_m = M2_ZERO if not exact else Mat2(0, 0, 0, 0)
    id_m = M2_ID if not exact else Mat2(1, 0, 0, 1)
    scalars = [zero_m, id_m]
    pairs = []
    for _ in range(count):
        case = int(rng.integers(0, 4))
        if case == 0:
            P = scalars[int(rng.integers(0, 2))]
            Q = scalars[int(rng.integers(0, 2))]
        elif case == 1:
            P = _random_rank1_idempotent(rng, exact)
            Q = P
        elif case == 2:
            P = _random_rank1_idempotent(rng, exact)
            Q = Mat2(one - P.a, -P.b, -P.c, one - P.d)
        else:
            P = scalars[int(rng.integers(0, 2))]
            Q = _random_rank1_idempotent(rng, exact)
            if rng.integers(0, 2):
                P, Q = Q, P
        pairs.append((P, Q))
    return pairs
