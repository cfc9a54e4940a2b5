"""Witness algebra: half-space splits, test-operator witnesses and verdicts.

A witness is stored as a bound together with a test operator and stands for
the Hermitian operator ``bound * I - test``. Detection couples a half-space
membership test on the constraint observable with the sign of the matching
witness expectation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .linalg import DimensionMismatch, HermitianOperator, expectation

DETECTION_TOL = 1e-10
BOUNDARY_TOL = 1e-9


class HalfSpaceSide(enum.Enum):
    LEQ = "leq"
    GEQ = "geq"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class ConstraintSpec:
    """Constraint observable C together with its threshold value c.

    Splits state space into the half-spaces Tr(rho C) <= c and >= c.
    """

    C: HermitianOperator
    c: float

    def membership(self, rho) -> HalfSpaceSide:
        return halfspace_membership(rho, self)


@dataclass(frozen=True)
class Witness:
    """Operator ``bound * I - test`` in (bound, test) form."""

    bound: float
    test: HermitianOperator

    def as_operator(self) -> HermitianOperator:
        return self.bound * HermitianOperator.identity(self.test.dims) - self.test

    def value(self, rho) -> float:
        """Expectation of the witness operator on a state."""
        return self.bound - expectation(self.test, rho)

    def fires(self, rho, tol: float = DETECTION_TOL) -> bool:
        return self.value(rho) < -tol


@dataclass(frozen=True)
class AlphaWitness:
    """Rotated witness: test alpha*C + (1-alpha)*L, bound alpha*c + (1-alpha)*p_c."""

    alpha: float
    base: ConstraintSpec
    test_L: HermitianOperator
    p_c_of_L: float
    witness: Witness


@dataclass(frozen=True)
class UewPair:
    """The two witnesses of a constrained pair, one per half-space."""

    w_c: Witness
    w_ctilde: Witness
    constraint: ConstraintSpec


class VerdictLabel(enum.Enum):
    ENTANGLED = "entangled"
    NOT_DETECTED = "not-detected"


@dataclass(frozen=True)
class Verdict:
    label: VerdictLabel
    side_used: HalfSpaceSide
    witness_value: float

    @property
    def entangled(self) -> bool:
        return self.label is VerdictLabel.ENTANGLED


def halfspace_membership(rho, spec: ConstraintSpec) -> HalfSpaceSide:
    """Which side of Tr(rho C) = c a state falls on, with a 1e-9 boundary band."""
    val = expectation(spec.C, rho)
    if val < spec.c - BOUNDARY_TOL:
        return HalfSpaceSide.LEQ
    if val > spec.c + BOUNDARY_TOL:
        return HalfSpaceSide.GEQ
    return HalfSpaceSide.BOUNDARY


def combine_alpha(spec: ConstraintSpec, L: HermitianOperator, alpha: float) -> HermitianOperator:
    """Rotated test operator alpha*C + (1-alpha)*L, defined for alpha < 1."""
    if not alpha < 1.0:
        raise ValueError("alpha must be < 1")
    if spec.C.dims != L.dims:
        raise DimensionMismatch(f"dims {spec.C.dims} vs {L.dims}")
    return alpha * spec.C + (1.0 - alpha) * L


def build_few(L: HermitianOperator, g_s: float) -> Witness:
    """Witness g_s*I - L from a certified unconstrained product supremum."""
    return Witness(bound=float(g_s), test=L)


def build_v_alpha(
    spec: ConstraintSpec, L: HermitianOperator, p_c: float, alpha: float
) -> AlphaWitness:
    """Rotated constrained witness from a certified p_c(L).

    The bound is the affine combination alpha*c + (1-alpha)*p_c, which equals
    the constrained supremum of the rotated test operator whenever the
    unconstrained optimum of that operator stays on the >= side.
    """
    n_alpha = combine_alpha(spec, L, alpha)
    bound = alpha * spec.c + (1.0 - alpha) * float(p_c)
    return AlphaWitness(
        alpha=alpha,
        base=spec,
        test_L=L,
        p_c_of_L=float(p_c),
        witness=Witness(bound=bound, test=n_alpha),
    )


def build_minus_inf(spec: ConstraintSpec, L: HermitianOperator, p_c: float) -> Witness:
    """Limit witness (p_c - c)*I - (L - C) of the rotated family."""
    if spec.C.dims != L.dims:
        raise DimensionMismatch(f"dims {spec.C.dims} vs {L.dims}")
    return Witness(bound=float(p_c) - spec.c, test=L - spec.C)


def detect(rho, pair: UewPair) -> Verdict:
    """Half-space aware detection verdict for a state.

    The constraint expectation picks which witness applies; boundary states
    are tried against both and count as entangled if either fires.
    """
    side = halfspace_membership(rho, pair.constraint)
    if side is HalfSpaceSide.LEQ:
        val = pair.w_c.value(rho)
    elif side is HalfSpaceSide.GEQ:
        val = pair.w_ctilde.value(rho)
    else:
        val = min(pair.w_c.value(rho), pair.w_ctilde.value(rho))
    label = VerdictLabel.ENTANGLED if val < -DETECTION_TOL else VerdictLabel.NOT_DETECTED
    return Verdict(label=label, side_used=side, witness_value=float(val))
