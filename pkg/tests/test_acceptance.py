"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary."""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from homc import (
    box_power,
    box_product,
    check_ergodic,
    check_regular,
    classify_states,
    ever_reaching,
    from_linear,
    identity_tensor,
    k_step_tensor,
    mfpt_direct,
    mfpt_iterative,
    reduced_chain_matrix,
    stationary_distribution,
    Shape,
)
from homc import examples
from homc import montecarlo as mc
from homc.analysis import FULLY_TRANSIENT, RECURRENT, TRANSIENT
from homc.chain_model import positivity_patterns

from conftest import ROUNDTRIP_SHAPES, SMALL_SHAPES, random_stochastic, record_criterion
from oracles import naive_box_product
import reference_values as ref
from test_tensor_core import NONASSOC_A, NONASSOC_B, NONASSOC_C, RIGHT_IDENTITY_WITNESS

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
from scale_smoke import run_pipeline  # noqa: E402


def check(label, ok, detail=""):
    record_criterion(label, bool(ok), detail)
    assert ok, f"{label}: {detail}"


def test_01_regular_chain_tenth_power():
    p = examples.regular_chain()
    t0 = time.perf_counter()
    p10 = box_power(p, 10)
    elapsed = time.perf_counter() - t0
    err = np.abs(p10 - ref.stack_slices(ref.REG_P10)).max()
    check("1 P^10 of 4-state chain", err <= 5e-5 and elapsed < 1.0,
          f"max err {err:.2e} (<= 5e-5), {elapsed * 1e3:.1f} ms (< 1 s)")


def test_02_ergodic_not_regular():
    p = examples.ergodic_chain()
    even = ref.stack_slices([ref.ERG_EVEN_SLICE] * 3)
    worst = 0.0
    for k in range(1, 13):
        worst = max(worst, np.abs(box_power(p, k) - (p if k % 2 else even)).max())
    reg = check_regular(p, 50)
    erg = check_ergodic(p, 50)
    check("2 period-2 powers; not regular, ergodic",
          worst <= 1e-12 and not reg.confirmed and reg.status == "refuted-within-horizon" and erg.confirmed,
          f"max err {worst:.1e}, regular={reg.status}, ergodic={erg.status}")


def test_03_first_order_degeneration():
    p = examples.first_order_chain()
    p5 = k_step_tensor(p, 5)
    printed = np.abs(p5 - np.array(ref.FIRST_P5)).max()
    classical = np.abs(p5 - np.linalg.matrix_power(p, 5)).max()
    q = reduced_chain_matrix(p)
    check("3 first-order k-step and reduced chain",
          printed <= 5e-5 and classical <= 1e-12 and q.tobytes() == p.tobytes(),
          f"vs 4-decimal reference {printed:.1e}, vs matrix power {classical:.1e}, Q bitwise={q.tobytes() == p.tobytes()}")


def test_04_reduced_chain_and_limit():
    p = examples.regular_chain()
    t0 = time.perf_counter()
    q = reduced_chain_matrix(p)
    r = stationary_distribution(p)
    elapsed = time.perf_counter() - t0
    exact_q = np.array_equal(q, ref.REG_Q)
    err = np.abs(r.pi - ref.REG_PI).max()
    check("4 reduced chain Q and limiting distribution",
          exact_q and err <= 5e-5 and r.residual <= 1e-10 and elapsed < 1.0,
          f"Q exact={exact_q}, pi err {err:.1e}, residual {r.residual:.1e}, {elapsed * 1e3:.1f} ms")


def test_05_ever_reaching_and_classes():
    er = ever_reaching(examples.transient_chain(), tol=1e-8)
    err = np.abs(er.f - ref.stack_slices(ref.TRANSIENT_F)).max()
    labels = classify_states(er).labels
    check("5 ever-reaching series and classification",
          er.terms_used == 67 and err <= 1e-9 and labels == (TRANSIENT, RECURRENT, FULLY_TRANSIENT),
          f"terms {er.terms_used} (67), max err {err:.1e} (<= 1e-9), labels {labels}")


def test_06_ergodic_mfpt():
    p = examples.ergodic_chain()
    d = mfpt_direct(p)
    derr = np.abs(d.mu - ref.stack_slices([ref.ERG_MU_SLICE] * 3)).max()
    it = mfpt_iterative(p)
    ierr = np.abs(it.mu - ref.stack_slices([ref.ERG_MU_ITERATIVE_SLICE] * 3)).max()
    check("6 MFPT of ergodic chain, direct and iterative",
          derr <= 1e-10 and d.residual_max <= 1e-12 and it.iterations == 40 and ierr <= 1e-9,
          f"direct err {derr:.1e}, residual {d.residual_max:.1e}, iterations {it.iterations} (40), "
          f"iterative err {ierr:.1e}")


def test_07_first_order_mfpt():
    p = examples.first_order_chain()
    derr = np.abs(mfpt_direct(p).mu - np.array(ref.FIRST_M)).max()
    it = mfpt_iterative(p)
    ierr = np.abs(it.mu - np.array(ref.FIRST_M_ITERATIVE)).max()
    check("7 MFPT of first-order chain",
          derr <= 1e-10 and it.iterations == 66 and ierr <= 1e-9,
          f"direct err {derr:.1e}, iterations {it.iterations} (66), iterative err {ierr:.1e}")


def test_08_oracle_suites():
    rng = np.random.default_rng(20240801)
    prod_err = stoch_err = 0.0
    pattern_ok = roundtrip_ok = True
    for m, n in SMALL_SHAPES:
        a, b = rng.standard_normal((n,) * m), rng.standard_normal((n,) * m)
        prod_err = max(prod_err, np.abs(box_product(a, b) - naive_box_product(a, b)).max())
        p = random_stochastic(rng, m, n)
        for k in range(1, 21):
            stoch_err = max(stoch_err, np.abs(box_power(p, k).sum(axis=0) - 1).max())
        sparse = random_stochastic(rng, m, n, 0.6)
        for k, pat in positivity_patterns(sparse, 12):
            pattern_ok &= bool(np.array_equal(pat, box_power(sparse, k) > 1e-300))
    from homc import matricize, tensorize

    for m, n in ROUNDTRIP_SHAPES:
        a = rng.standard_normal((n,) * m)
        for k in range(1, m + 1):
            roundtrip_ok &= tensorize(matricize(a, k), k).tobytes() == a.tobytes()
    x, y, z = (from_linear(v, 3, 2) for v in (NONASSOC_A, NONASSOC_B, NONASSOC_C))
    nonassoc = np.abs(box_product(x, box_product(y, z)) - box_product(box_product(x, y), z)).max()
    w = from_linear(RIGHT_IDENTITY_WITNESS, 3, 2)
    right_id = np.abs(box_product(w, identity_tensor(Shape(3, 2))) - w).max()
    check("8 oracle suites",
          prod_err <= 1e-14 and stoch_err <= 1e-10 and pattern_ok and roundtrip_ok
          and nonassoc > 0.1 and right_id > 0.1,
          f"box vs naive {prod_err:.1e}, stochastic drift {stoch_err:.1e}, patterns={pattern_ok}, "
          f"roundtrip={roundtrip_ok}, witnesses {nonassoc:.3f}/{right_id:.3f}")


def test_09_monte_carlo_cross_validation(monkeypatch):
    cfg = mc.SimConfig(seed=42, trajectories=10**5, horizon=10**3)
    reg, trans, erg = examples.regular_chain(), examples.transient_chain(), examples.ergodic_chain()
    cases = [
        ("P^10(1,1,1)", box_power(reg, 10)[0, 0, 0], lambda: mc.estimate_kstep(reg, (1, 1), 1, 10, cfg)),
        ("F(1,1,1)", ever_reaching(trans, tol=1e-12).f[0, 0, 0],
         lambda: mc.estimate_ever_reach(trans, (1, 1), 1, cfg)),
        ("mu(1,1,1)", mfpt_direct(erg).mu[0, 0, 0], lambda: mc.estimate_mfpt(erg, (1, 1), 1, cfg)),
    ]
    t0 = time.perf_counter()
    ok = True
    details = []
    first_run = []
    for name, value, run in cases:
        est = run()
        first_run.append(est)
        z = abs(est.value - value) / est.standard_error
        ok &= z <= 4
        details.append(f"{name} {est.value:.4f} vs {value:.4f} ({z:.2f} se)")
    elapsed = time.perf_counter() - t0
    reruns = []
    for threads in ("1", "4"):
        monkeypatch.setenv("HOMC_THREADS", threads)
        reruns.append([run() for _, _, run in cases])
    identical = reruns[0] == reruns[1] == first_run
    check("9 Monte Carlo cross-validation", ok and elapsed < 30 and identical,
          "; ".join(details) + f"; {elapsed:.1f} s (< 30 s); bit-identical across threads={identical}")


def test_10_scale_smoke():
    elapsed, ratio, res = run_pipeline(dim=20, order=4, seed=0)
    mu_ok = res["mfpt"].residual_max <= 1e-10 and res["mfpt"].mu.min() >= 1 - 1e-9
    check("10 scale smoke test n=20, m=4",
          elapsed < 60 and ratio < 10 and mu_ok and res["erp"].converged,
          f"{elapsed:.2f} s (< 60 s), peak {ratio:.2f} x tensor size (< 10), "
          f"mfpt residual {res['mfpt'].residual_max:.1e} via {res['mfpt'].solver}")
