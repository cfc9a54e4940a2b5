"""Reproduction harness: noise-threshold scans, alpha sweeps, plane samples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .linalg import expectation
from .optimize import OptimizerConfig, sup_product_constrained
from .states import DensityMatrix, NoisyStateFamily
from .witness import (
    ConstraintSpec,
    HalfSpaceSide,
    Witness,
    build_minus_inf,
    build_v_alpha,
    halfspace_membership,
)

MINUS_INF = float("-inf")


@dataclass(frozen=True)
class SweepRow:
    """One alpha of a sweep: witness bound, detection threshold, detection at p=0."""

    alpha: float  # -inf stands for the limit witness
    bound: float
    threshold_p: Optional[float]
    detected_at_zero: bool


@dataclass(frozen=True)
class PlaneSample:
    label: str
    x: float  # constraint expectation
    y: float  # test expectation


def _detected(witness: Witness, spec: ConstraintSpec, side: HalfSpaceSide, rho: DensityMatrix) -> bool:
    member = halfspace_membership(rho, spec)
    if member is not side and member is not HalfSpaceSide.BOUNDARY:
        return False
    return witness.fires(rho)


def threshold_scan(
    family: NoisyStateFamily,
    witness: Witness,
    spec: ConstraintSpec,
    side: HalfSpaceSide,
    resolution: float = 1e-3,
) -> Optional[float]:
    """Largest p* such that every noise level p <= p* is detected.

    The witness expectation is affine in p, so the detection set is an
    interval [0, p*]; a coarse scan at the given resolution brackets its
    edge and bisection refines it to resolution/10. Returns None when even
    p = 0 escapes detection.
    """
    if resolution > 1e-3:
        raise ValueError("resolution must be at most 1e-3")

    def hit(p: float) -> bool:
        return _detected(witness, spec, side, family.member(p))

    if not hit(0.0):
        return None
    steps = int(math.ceil(1.0 / resolution))
    edge = None
    for k in range(1, steps + 1):
        p = min(k * resolution, 1.0)
        if not hit(p):
            edge = (min((k - 1) * resolution, 1.0), p)
            break
    if edge is None:
        return 1.0
    lo, hi = edge
    while hi - lo > resolution / 10.0:
        mid = 0.5 * (lo + hi)
        if hit(mid):
            lo = mid
        else:
            hi = mid
    return lo


def alpha_sweep(
    L,
    spec: ConstraintSpec,
    alphas: Sequence[float],
    family: NoisyStateFamily,
    cfg: OptimizerConfig,
    resolution: float = 1e-3,
):
    """One SweepRow per requested alpha (float('-inf') selects the limit witness).

    The constrained bound of the base test operator is computed once and
    reused by every rotated witness.
    """
    for alpha in alphas:
        if alpha != MINUS_INF and not alpha < 1.0:
            raise ValueError("finite alphas must be < 1")
    p_c = sup_product_constrained(L, spec, HalfSpaceSide.LEQ, cfg).value
    rows = []
    for alpha in alphas:
        if alpha == MINUS_INF:
            witness = build_minus_inf(spec, L, p_c)
        else:
            witness = build_v_alpha(spec, L, p_c, alpha).witness
        thr = threshold_scan(family, witness, spec, HalfSpaceSide.LEQ, resolution)
        rows.append(
            SweepRow(
                alpha=alpha,
                bound=witness.bound,
                threshold_p=thr,
                detected_at_zero=thr is not None,
            )
        )
    return rows


def plane_samples(states, spec: ConstraintSpec, L) -> list:
    """(label, Tr(C rho), Tr(L rho)) for a list of labeled states."""
    out = []
    for label, rho in states:
        x = expectation(spec.C, rho)
        y = expectation(L, rho)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ValueError(f"non-finite expectation for state {label!r}")
        out.append(PlaneSample(label=str(label), x=x, y=y))
    return out
