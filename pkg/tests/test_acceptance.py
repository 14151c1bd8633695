"""Acceptance gate: one test per headline guarantee, one printed verdict each.

Every test prints a single [PASS]/[FAIL] line on the real terminal (bypassing
capture) and then asserts, so a plain pytest run shows the whole scorecard.
Heavy experiment runs happen once through the CLI and are shared between the
science checks and the determinism check.
"""

import json
import time

import numpy as np
import pytest

from diffuselab import cli
from diffuselab.experiments import default_config
from diffuselab.fieldexpr import FieldSpec, parse
from diffuselab.fk import FkQuery, fk_weighted_payoffs
from diffuselab.ito import (
    TestFunction,
    integration_by_parts_residual,
    ito_formula_residual,
)
from diffuselab.kernels import apply_generator, chapman_kolmogorov_gap, generator_limit_gap, heat_solution
from diffuselab.paths import brownian_path
from diffuselab.rng import RngStream
from diffuselab.experiments import residual_refinement_ratio


def verdict(capfd, ok: bool, label: str, detail: str) -> None:
    with capfd.disabled():
        print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}", flush=True)
    assert ok, f"{label}: {detail}"


@pytest.fixture(scope="module")
def cli_run(tmp_path_factory):
    """Run an experiment once via the CLI at its default configuration and
    cache (out_dir, exit_code, elapsed_seconds) for reuse."""
    cache = {}

    def _run(name, workers=1):
        key = (name, workers)
        if key not in cache:
            out = tmp_path_factory.mktemp(f"{name}-w{workers}")
            cfg_file = tmp_path_factory.mktemp(f"{name}-cfg") / "config.json"
            cfg_file.write_text(json.dumps(default_config(name)))
            argv = [name, "--config", str(cfg_file), "--out", str(out)]
            if workers != 1:
                argv += ["--workers", str(workers)]
            t0 = time.monotonic()
            code = cli.main(argv)
            cache[key] = (out, code, time.monotonic() - t0)
        return cache[key]

    return _run


def test_criterion_01_brownian_increment_statistics(capfd):
    t0 = time.monotonic()
    n_paths, n_steps, dt = 100, 1000, 1.0e-3
    pooled = np.concatenate(
        [
            np.diff(brownian_path(RngStream(2024, i), 0.0, n_steps * dt, n_steps).states[:, 0])
            for i in range(n_paths)
        ]
    )
    n = pooled.size
    mean = float(np.mean(pooled))
    var = float(np.var(pooled))
    mean_bound = 4.0 / np.sqrt(n) * np.sqrt(dt)
    elapsed = time.monotonic() - t0
    ok = n == 100_000 and abs(mean) <= mean_bound and abs(var - dt) <= 0.02 * dt and elapsed < 5.0
    verdict(
        capfd,
        ok,
        "criterion 1, pooled Brownian increments",
        f"n={n}, |mean|={abs(mean):.2e} (bound {mean_bound:.2e}), "
        f"var={var:.6e} vs dt={dt} ({abs(var - dt) / dt:.2%} off), {elapsed:.1f}s",
    )


def test_criterion_02_ito_property_suite(capfd, cli_run):
    out, code, elapsed = cli_run("ito-props")
    report = json.loads((out / "ito_report.json").read_text())
    by_name = {c["name"]: c for c in report["checks"]}
    stat_ok = all(
        by_name[k]["passed"] for k in ("isometry", "martingale_zero_mean", "quadratic_variation")
    )
    exact = {k: by_name[k]["worst_residual"] for k in ("linearity", "w_dw_identity")}
    exact_ok = all(v <= 1e-12 for v in exact.values())
    ok = code == 0 and report["pass"] and stat_ok and exact_ok and elapsed < 60.0
    verdict(
        capfd,
        ok,
        "criterion 2, stochastic integral property suite at 2e5 paths x 1e3 steps",
        f"statistical checks within 4*stderr, linearity residual {exact['linearity']:.1e}, "
        f"W dW residual {exact['w_dw_identity']:.1e} (<= 1e-12), {elapsed:.1f}s",
    )


def test_criterion_03_discrete_identities_and_rate(capfd):
    t0 = time.monotonic()
    square = TestFunction(
        name="x^2", f=lambda t, x: x**2, dx=lambda t, x: 2.0 * x, dxx=lambda t, x: 2.0 + 0.0 * x
    )
    zero_drift = lambda t, x: 0.0 * x
    unit_diffusion = lambda t, x: 1.0 + 0.0 * x
    worst = 0.0
    for i in range(100):
        w = brownian_path(RngStream(5, i), 0.0, 1.0, 256)
        v = brownian_path(RngStream(6, i), 0.0, 1.0, 256)
        worst = max(worst, ito_formula_residual(w, zero_drift, unit_diffusion, square, second_order="qv"))
        worst = max(worst, integration_by_parts_residual(w, v))
    ratio = residual_refinement_ratio(2024, 100, 1.0, 1000)
    root2 = float(np.sqrt(2.0))
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-10 and 0.7 * root2 <= ratio <= 1.3 * root2 and elapsed < 30.0
    verdict(
        capfd,
        ok,
        "criterion 3, discrete change-of-variables and product-rule identities",
        f"worst exact residual {worst:.1e} over 100 paths (<= 1e-10), "
        f"exp(x) residual ratio {ratio:.3f} under step doubling (1.414 +/- 30%), {elapsed:.1f}s",
    )


def test_criterion_04_gbm_strong_convergence(capfd, cli_run):
    out, code, elapsed = cli_run("gbm")
    metrics = json.loads((out / "meta.json").read_text())["metrics"]
    lo, hi = metrics["slope_band"]
    ok = (
        code == 0
        and metrics["pass"]
        and lo <= metrics["slope"] <= hi
        and metrics["all_positive"]
        and elapsed < 30.0
    )
    verdict(
        capfd,
        ok,
        "criterion 4, Euler-Maruyama strong order on GBM (mu=0.5, sigma=0.2)",
        f"log-log slope {metrics['slope']:.4f} in [{lo}, {hi}] over dt=2^-4..2^-9, "
        f"200 coupled paths, {elapsed:.1f}s",
    )


def test_criterion_05_bm_terminals_vs_heat_kernel(capfd, cli_run):
    out, code, elapsed = cli_run("bm-vs-heat")
    m = json.loads((out / "metrics.json").read_text())
    bound = 2.0 * m["noise_floor"] + 0.02
    ok = code == 0 and m["pass"] and m["l1"] <= bound and elapsed < 60.0
    verdict(
        capfd,
        ok,
        "criterion 5, 40k 2D Brownian terminals vs heat solve",
        f"L1={m['l1']:.4f} <= 2*noise_floor+0.02={bound:.4f}, {elapsed:.1f}s",
    )


def test_criterion_06_fp_compare(capfd, cli_run):
    out, code, elapsed = cli_run("fp-compare")
    m = json.loads((out / "metrics.json").read_text())
    bound = 2.0 * m["noise_floor"] + 0.05
    mass_err = abs(m["mass_pde"] - 1.0)
    ok = code == 0 and m["pass"] and m["l1"] <= bound and mass_err <= 1e-9 and elapsed < 90.0
    verdict(
        capfd,
        ok,
        "criterion 6, nonlinear-drift ensemble vs Fokker-Planck solve (40k paths, T=3)",
        f"L1={m['l1']:.4f} <= {bound:.4f}, PDE mass error {mass_err:.1e} (<= 1e-9), {elapsed:.1f}s",
    )


def test_criterion_07_generator_checks(capfd):
    t0 = time.monotonic()
    bm2 = FieldSpec.from_strings(["0", "0"], ["1", "1"])
    quads = [
        (parse("x^2+y^2"), 2.0),
        (parse("x*y"), 0.0),
        (parse("3*x^2"), 3.0),
    ]
    worst_quad = max(
        abs(apply_generator(bm2, f, [0.3, -0.7]) - target) for f, target in quads
    )
    bm1 = FieldSpec.from_strings(["0"], ["1"])
    f4 = parse("x^4")
    gap_h = generator_limit_gap(bm1, f4, [1.0], h=0.2, n_paths=200_000, seed=0)
    gap_h2 = generator_limit_gap(bm1, f4, [1.0], h=0.1, n_paths=200_000, seed=0)
    ratio = gap_h / gap_h2
    elapsed = time.monotonic() - t0
    ok = worst_quad <= 1e-4 and 1.0 <= ratio <= 3.0 and elapsed < 30.0
    verdict(
        capfd,
        ok,
        "criterion 7, generator reproduces 0.5*Laplacian and O(h) semigroup defect",
        f"worst quadratic error {worst_quad:.1e} (<= 1e-4), "
        f"gap {gap_h:.3f} -> {gap_h2:.3f} when halving h, ratio {ratio:.2f} in [1, 3], {elapsed:.1f}s",
    )


def test_criterion_08_feynman_kac(capfd, cli_run):
    out, code, cli_elapsed = cli_run("fk-check")
    t0 = time.monotonic()
    bm1 = FieldSpec.from_strings(["0"], ["1"])
    query = FkQuery(
        fields=bm1,
        potential=parse("0.5"),
        payoff=parse("1"),
        x=[0.0],
        T=1.0,
        n_paths=1000,
        n_steps=8,
        seed=3,
    )
    weights = fk_weighted_payoffs(query)
    target = float(np.exp(-0.5))
    path_defect = float(np.max(np.abs(weights / target - 1.0)))
    report = json.loads((out / "fk_report.json").read_text())
    probe_ok = all(p["abs_difference"] <= p["tolerance"] for p in report["probes"])
    elapsed = (time.monotonic() - t0) + cli_elapsed
    ok = path_defect <= 1e-12 and code == 0 and report["pass"] and probe_ok and len(report["probes"]) == 5 and elapsed < 60.0
    worst_diff = max(p["abs_difference"] for p in report["probes"])
    verdict(
        capfd,
        ok,
        "criterion 8, Feynman-Kac weighting vs backward solve",
        f"constant-potential path defect {path_defect:.1e} (<= 1e-12), "
        f"5 probes within 4*stderr+0.01 (worst diff {worst_diff:.4f}), {elapsed:.1f}s",
    )


def test_criterion_09_chapman_kolmogorov_and_normalization(capfd):
    t0 = time.monotonic()
    rng = np.random.default_rng(7)
    worst_gap = 0.0
    for _ in range(10):
        s, t = rng.uniform(0.05, 2.0, size=2)
        x, y = rng.uniform(-3.0, 3.0, size=2)
        worst_gap = max(worst_gap, chapman_kolmogorov_gap(float(s), float(t), float(x), float(y)))
    one = lambda y: np.ones_like(y)
    worst_norm = max(
        abs(heat_solution(one, x, t, kappa) - 1.0)
        for x, t, kappa in [(0.0, 0.3, 0.5), (1.2, 1.0, 0.5), (-0.7, 2.0, 1.0)]
    )
    elapsed = time.monotonic() - t0
    ok = worst_gap <= 1e-8 and worst_norm <= 1e-8 and elapsed < 10.0
    verdict(
        capfd,
        ok,
        "criterion 9, transition-density consistency and normalization",
        f"worst composition gap {worst_gap:.1e} over 10 random tuples (<= 1e-8), "
        f"worst f=1 normalization error {worst_norm:.1e} (<= 1e-8), {elapsed:.1f}s",
    )


def test_criterion_10_cli_determinism(capfd, cli_run, tmp_path):
    names = ("bm-paths", "bm2d-paths", "bm-vs-heat", "gbm", "fp-compare", "fk-check", "ito-props")
    compared = 0
    for name in names:
        first, code, _ = cli_run(name)
        assert code in (0, 1)
        out = tmp_path / f"{name}-again"
        cfg_file = tmp_path / f"{name}.json"
        cfg_file.write_text(json.dumps(default_config(name)))
        again = cli.main([name, "--config", str(cfg_file), "--out", str(out)])
        assert again == code
        for artifact in sorted(first.iterdir()):
            if artifact.name == "meta.json":  # carries wall time
                continue
            assert artifact.read_bytes() == (out / artifact.name).read_bytes(), (
                f"{name}/{artifact.name} changed between identical runs"
            )
            compared += 1
    first, _, _ = cli_run("fp-compare")
    multi, code, _ = cli_run("fp-compare", workers=3)
    assert code == 0
    for artifact in sorted(first.iterdir()):
        if artifact.name == "meta.json":
            continue
        assert artifact.read_bytes() == (multi / artifact.name).read_bytes(), (
            f"fp-compare/{artifact.name} changed with 3 workers"
        )
        compared += 1
    verdict(
        capfd,
        True,
        "criterion 10, CLI determinism",
        f"{len(names)} experiments re-run byte-identical ({compared} artifacts), "
        "including fp-compare with 1 vs 3 workers",
    )
