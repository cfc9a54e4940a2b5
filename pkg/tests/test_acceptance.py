"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Criteria 1 and 2 assert externally supplied reference thresholds for the
worked instance. Those reference values are mutually inconsistent with the
instance's printed operator definitions (see the failure messages, which
carry the honestly computed table); the tests state the reference values
faithfully and are expected to stay red until the reference data is fixed.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import GS_EXACT, PC_EXACT
from uew import (
    HalfSpaceSide,
    build_minus_inf,
    build_v_alpha,
    compute_alpha0,
    grid_oracle_sup,
    sup_product_constrained,
    sup_product_unconstrained,
)
from uew.optimize import _alpha_feasible
from uew.states import product_expectations, random_product_batch
from uew.witness import DETECTION_TOL


@pytest.fixture
def report(capsys):
    """Emit one pass/fail line per criterion, bypassing output capture."""

    def emit(num, name, ok, detail=""):
        tag = "PASS" if ok else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        with capsys.disabled():
            print(f"\ncriterion {num:02d} ({name}): {tag}{suffix}", flush=True)
        return ok

    return emit


def run_scan(seed="11"):
    proc = subprocess.run(
        [
            sys.executable, "-m", "uew", "scan", "--example31",
            "--x", "2/3", "--cvalue", "1/100",
            "--alphas", "0,-1,-10,-100,-inf", "--seed", seed,
        ],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert proc.returncode == 0, proc.stderr
    rows = proc.stdout.strip().splitlines()[1:]
    thresholds = []
    for row in rows:
        cell = row.split(",")[2]
        thresholds.append(None if cell == "" else float(cell))
    return proc.stdout, thresholds


@pytest.fixture(scope="module")
def scan_result():
    t0 = time.perf_counter()
    stdout, thresholds = run_scan()
    return {"stdout": stdout, "thresholds": thresholds, "elapsed": time.perf_counter() - t0}


@pytest.fixture(scope="module")
def witnesses_1_to_5(example, pc_result):
    spec, L = example["spec"], example["L"]
    p_c = pc_result.value
    out = {}
    for alpha in (0.0, -0.5, -1.0, -5.0, -10.0, -100.0, -1e6):
        out[alpha] = build_v_alpha(spec, L, p_c, alpha).witness
    out["-inf"] = build_minus_inf(spec, L, p_c)
    return out


def test_criterion_01_reference_thresholds(report, scan_result):
    reference = [None, 0.004, 0.009, 0.010, 0.010]
    got = scan_result["thresholds"]
    ok_time = scan_result["elapsed"] < 120.0
    matches = []
    for ref, val in zip(reference, got):
        if ref is None:
            matches.append(val is None)
        else:
            matches.append(val is not None and abs(val - ref) <= 1e-3)
    detail = (
        f"computed={[None if v is None else round(v, 3) for v in got]} "
        f"reference={reference} elapsed={scan_result['elapsed']:.1f}s"
    )
    ok = all(matches) and ok_time
    assert report(1, "reference threshold table", ok, detail), (
        "scan thresholds disagree with the reference table: "
        f"{detail}; the computed values follow from the certified "
        f"constrained bound p_c = {PC_EXACT:.12f} and the affine noise "
        "response of the witness family, cross-checked by the independent "
        "grid oracle; every rotated witness keeps firing until the family "
        "leaves the <= half-space at p = 5/96"
    )


def test_criterion_02_alpha_zero_detects_nothing(report, example, pc_result):
    spec, L = example["spec"], example["L"]
    w = build_v_alpha(spec, L, pc_result.value, 0.0).witness
    ps = np.arange(0.0, 1.0 + 1e-12, 1e-4)
    # affine expectations over the noise family, vectorized
    l_pure = np.einsum("i,ij,j->", example["phi"].amplitudes.conj(), L.mat, example["phi"].amplitudes).real
    c_pure = np.einsum("i,ij,j->", example["phi"].amplitudes.conj(), spec.C.mat, example["phi"].amplitudes).real
    l_mix = L.trace() / 4.0
    c_mix = spec.C.trace() / 4.0
    lvals = l_pure + ps * (l_mix - l_pure)
    cvals = c_pure + ps * (c_mix - c_pure)
    fired = (cvals <= spec.c + 1e-9) & (w.bound - lvals < -DETECTION_TOL)
    n_fired = int(fired.sum())
    detail = f"detected at {n_fired}/{ps.size} grid points"
    if n_fired:
        detail += f", p in [{ps[fired].min():.4f}, {ps[fired].max():.4f}]"
    ok = n_fired == 0
    assert report(2, "alpha=0 detects nothing", ok, detail), (
        f"the unrotated constrained witness fires on part of the family: {detail}; "
        f"its certified bound {pc_result.value:.12f} lies below the test "
        f"expectation {l_pure:.12f} of the noiseless state"
    )


def test_criterion_03_monotone_improvement(report, example, pc_result, scan_result):
    got = scan_result["thresholds"]
    numeric = [-1.0 if v is None else v for v in got]  # None sorts lowest
    mono = all(b >= a - 1e-9 for a, b in zip(numeric, numeric[1:]))

    spec, L = example["spec"], example["L"]
    p_c = pc_result.value
    alphas = [0.0, -1.0, -10.0, -100.0]
    wits = [build_v_alpha(spec, L, p_c, a).witness for a in alphas]
    w_inf = build_minus_inf(spec, L, p_c)

    rng = np.random.default_rng(2203)
    n = 10_000
    g = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
    rhos = g @ g.conj().transpose(0, 2, 1)
    rhos /= np.trace(rhos, axis1=1, axis2=2)[:, None, None].real
    anchor = np.zeros((4, 4), dtype=complex)
    anchor[0, 0] = 1.0  # zero constraint expectation
    cvals = np.einsum("nij,ji->n", rhos, spec.C.mat).real
    target = rng.uniform(0.0, spec.c, size=n)
    lam = np.minimum(1.0, target / np.maximum(cvals, 1e-300))[:, None, None]
    rhos = lam * rhos + (1.0 - lam) * anchor

    vals = [w.bound - np.einsum("nij,ji->n", rhos, w.test.mat).real for w in wits]
    v_inf = w_inf.bound - np.einsum("nij,ji->n", rhos, w_inf.test.mat).real
    violations = 0
    for hi, lo in zip(vals, vals[1:]):
        firing = hi < 0
        violations += int(np.sum(lo[firing] > hi[firing] + 1e-10))
    firing = vals[-1] < -1e-10
    violations += int(np.sum(v_inf[firing] > 1e-10))
    ok = mono and violations == 0
    assert report(
        3, "monotone improvement + nesting", ok,
        f"thresholds={[None if v is None else round(v, 4) for v in got]} violations={violations}",
    )


def test_criterion_04_affine_identity_of_rotated_bound(report, example, cfg_small, pc_result):
    spec, L = example["spec"], example["L"]
    p_c = pc_result.value
    worst = 0.0
    for alpha in (-0.5, -1.0, -5.0, -10.0):
        lam = alpha / (1.0 - alpha)
        nbar = lam * spec.C + L
        sup = sup_product_constrained(nbar, spec, HalfSpaceSide.LEQ, cfg_small).value
        h = (1.0 - alpha) * sup
        residual = abs(h - (alpha * spec.c + (1.0 - alpha) * p_c))
        worst = max(worst, residual)
    ok = worst <= 1e-6
    assert report(4, "rotated bound affine identity", ok, f"worst residual={worst:.2e}")


def test_criterion_05_limit_convergence(report, example, pc_result):
    spec, L = example["spec"], example["L"]
    alpha = -1e6
    v = build_v_alpha(spec, L, pc_result.value, alpha).witness
    w_inf = build_minus_inf(spec, L, pc_result.value)
    diff = (1.0 / -alpha) * v.as_operator() - w_inf.as_operator()
    gap = diff.max_abs_entry()
    ok = gap <= 1e-5
    assert report(5, "limit witness convergence", ok, f"max entry gap={gap:.2e}")


def test_criterion_06_seesaw_matches_grid_oracle(report, cfg):
    rng = np.random.default_rng(20_240_601)
    worst_abs = 0.0
    worst_low = 0.0
    from uew import HermitianOperator

    for _ in range(50):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        op = HermitianOperator((g + g.conj().T) / 2, dims=(2, 2))
        ss = sup_product_unconstrained(op, cfg).value
        orc = grid_oracle_sup(op, resolution=721)
        worst_abs = max(worst_abs, abs(ss - orc))
        worst_low = min(worst_low, ss - orc)
    ok = worst_abs <= 2e-3 and worst_low >= -1e-6
    assert report(
        6, "see-saw vs grid oracle on 50 operators", ok,
        f"worst |gap|={worst_abs:.2e}, worst undershoot={worst_low:.2e}",
    )


def test_criterion_07_witness_validity_on_feasible_samples(report, example, witnesses_1_to_5):
    spec = example["spec"]
    need = 100_000
    batches = []
    total = 0
    seed = 0
    while total < need:
        A, B = random_product_batch((2, 2), 400_000, np.random.default_rng((41, seed)))
        cons = product_expectations(spec.C, A, B)
        keep = cons <= spec.c
        batches.append((A[keep], B[keep]))
        total += int(keep.sum())
        seed += 1
    A = np.concatenate([a for a, _ in batches])[:need]
    B = np.concatenate([b for _, b in batches])[:need]
    worst = np.inf
    worst_name = None
    for name, w in witnesses_1_to_5.items():
        vals = w.bound - product_expectations(w.test, A, B)
        m = float(vals.min())
        if m < worst:
            worst, worst_name = m, name
    ok = worst >= -1e-6
    assert report(
        7, "witness validity on 1e5 feasible samples", ok,
        f"worst min={worst:.2e} (witness alpha={worst_name})",
    )


def test_criterion_08_closed_form_unconstrained_bound(report, example, cfg):
    res = sup_product_unconstrained(example["L"], cfg)
    err = abs(res.value - GS_EXACT)
    ok = err <= 1e-9
    assert report(8, "closed-form unconstrained bound", ok, f"|g_s - 4/9|={err:.2e}")


def test_criterion_09_alpha0_certificate_and_few_check(report, swapped, cfg_small):
    spec, L = swapped["spec"], swapped["L"]
    p_c = sup_product_constrained(L, spec, HalfSpaceSide.LEQ, cfg_small).value
    a0 = compute_alpha0(L, spec, cfg_small, p_c=p_c)
    cert_hi = a0 is not None and _alpha_feasible(L, spec, cfg_small, p_c, a0 + 1e-3)
    cert_lo = a0 is not None and not _alpha_feasible(L, spec, cfg_small, p_c, a0 - 1e-3)

    w = build_v_alpha(spec, L, p_c, a0).witness
    # 1e5 separable samples: a random cloud plus a structured cloud around
    # the unconstrained optimum of the rotated operator, where a finest
    # witness must touch zero
    A, B = random_product_batch((2, 2), 99_000, np.random.default_rng(90))
    opt = sup_product_unconstrained(w.test, cfg_small).argmax
    rng = np.random.default_rng(91)
    pa = opt.a.amplitudes[None, :] + 0.003 * (
        rng.normal(size=(1_000, 2)) + 1j * rng.normal(size=(1_000, 2))
    )
    pb = opt.b.amplitudes[None, :] + 0.003 * (
        rng.normal(size=(1_000, 2)) + 1j * rng.normal(size=(1_000, 2))
    )
    pa[0], pb[0] = opt.a.amplitudes, opt.b.amplitudes
    pa /= np.linalg.norm(pa, axis=1)[:, None]
    pb /= np.linalg.norm(pb, axis=1)[:, None]
    A = np.concatenate([A, pa])
    B = np.concatenate([B, pb])
    vals = w.bound - product_expectations(w.test, A, B)
    few_valid = float(vals.min()) >= -1e-6
    few_tight = float(np.abs(vals).min()) <= 1e-3
    ok = cert_hi and cert_lo and few_valid and few_tight
    assert report(
        9, "alpha0 certificate + finest-witness check", ok,
        f"alpha0={a0} certificate=({cert_hi},{cert_lo}) "
        f"min={vals.min():.2e} closest-to-zero={np.abs(vals).min():.2e}",
    )


def test_criterion_10_scan_determinism(report):
    out1, _ = run_scan(seed="123")
    out2, _ = run_scan(seed="123")
    ok = out1 == out2
    assert report(10, "byte-identical scan reruns", ok, f"{len(out1)} bytes")
