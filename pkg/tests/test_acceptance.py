"""The ten acceptance criteria, one test each.

Every test records a single PASS/FAIL line (collected in the terminal
summary) and asserts its runtime budget.
"""

import math
import time

import numpy as np
import pytest

from ampforge.applications import (
    MaxFindSpec,
    StatePrepSpec,
    benchmark_tanh,
    find_maximum,
    loglog_slope,
    prepare_state,
    relative_spread,
    run_function_table,
)
from ampforge.approx import approx_gaussian, approx_sin, approx_tanh
from ampforge.block_encoding import fixed_point_amplify, verify_encoding
from ampforge.circuits import build_diag_encoding, build_G, build_sin_ladder, phi_state
from ampforge.engine import error_budget, importance_transform, uniform_transform
from ampforge.instances import (
    oracle_from_real,
    planted_gap_state,
    random_complex_state,
    random_real_state,
    random_spbe,
    random_vanishing_polynomial,
    rng_for,
)
from ampforge.lemmas import run_fuzz
from ampforge.poly import reduce_by_x, sup_norm

pytestmark = pytest.mark.acceptance


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_01_diagonal_encoding_exactness(record_criterion):
    with Timer() as t:
        worst = 0.0
        for seed in range(50):
            n = 1 + seed % 6
            u = random_real_state(n, seed)
            be = build_diag_encoding(u)
            worst = max(worst, verify_encoding(be, np.diag(u.real_amplitudes())))
    ok = worst <= 1e-9 and t.seconds < 30
    record_criterion(1, ok, f"max block deviation {worst:.2e} over 50 oracles, n=1..6", t.seconds)
    assert ok


def test_criterion_02_eigenrelation(record_criterion):
    with Timer() as t:
        worst = 0.0
        for seed in range(20):
            for n in range(1, 5):
                for p in (0, 1):
                    u = random_complex_state(n, seed) if p else random_real_state(n, seed)
                    g = build_G(u, p).matrix
                    herm = -0.5 * (g + g.conj().T)
                    psi = u.amplitudes()
                    scalars = psi.real if p == 0 else psi.imag
                    for k in range(1 << n):
                        phi = phi_state(u, p, k)
                        worst = max(worst, float(np.linalg.norm(herm @ phi - scalars[k] * phi)))
    ok = worst <= 1e-9 and t.seconds < 60
    record_criterion(2, ok, f"max residual {worst:.2e}, n<=4, p in {{0,1}}, 20 oracles", t.seconds)
    assert ok


def test_criterion_03_tanh_bound(record_criterion):
    with Timer() as t:
        grid = np.linspace(-1, 1, 20001)
        violations = []
        for k in range(2, 26):
            a = approx_tanh(k)
            measured = max(a.measured_error, float(np.max(np.abs(np.tanh(grid) - a.poly(grid)))))
            if measured > 9 * (2 / math.pi) ** k:
                violations.append(k)
        k10 = approx_tanh(10).measured_error
    ok = not violations and k10 <= 0.09785 and k10 <= 9 * (2 / math.pi) ** 10 and t.seconds < 5
    record_criterion(3, ok, f"k=2..25 within 9(2/pi)^k; k=10 measured {k10:.2e} <= 0.09785", t.seconds)
    assert ok


def test_criterion_04_function_table(record_criterion):
    with Timer() as t:
        rows = [r for seed in range(10) for r in run_function_table(6, seed, 1e-3)]
    worst = max(r["achieved_l2_error"] for r in rows)
    ok = worst <= 1e-3 and len(rows) == 50 and t.seconds < 300
    record_criterion(4, ok, f"max l2 error {worst:.2e} over 5 functions x 10 seeds, n=6", t.seconds)
    assert ok


def test_criterion_05_scaling_separation(record_criterion):
    with Timer() as t:
        rows = benchmark_tanh(range(4, 11), 1e-2, 0)
    spread = relative_spread([r["queries_importance"] for r in rows])
    slope = loglog_slope([2 ** (r["n"] / 2) for r in rows], [r["queries_uniform"] for r in rows])
    errors_ok = all(max(r["error_importance"], r["error_uniform"]) <= 1e-2 for r in rows)
    ok = spread <= 0.15 and 0.8 <= slope <= 1.2 and errors_ok
    record_criterion(5, ok, f"importance spread {spread:.3f}, uniform slope {slope:.3f}, n=4..10", t.seconds)
    assert ok


def test_criterion_06_maximum_finding(record_criterion):
    eps = 0.1
    threshold = (1 - eps**2 / 2) ** 2
    failures = []
    with Timer() as t:
        for gap in (0.1, 0.2, 0.4):
            for seed in range(30):
                v, top = planted_gap_state(3, gap, seed)
                index, rep = find_maximum(MaxFindSpec(oracle_from_real(v), float(v[top]), gap, eps))
                if index != top or rep.details["top_probability"] < threshold:
                    failures.append((gap, seed))
    ok = not failures and t.seconds < 300
    record_criterion(6, ok, f"{90 - len(failures)}/90 trials correct (30 seeds x 3 gaps)", t.seconds)
    assert ok


def test_criterion_07_state_preparation(record_criterion):
    with Timer() as t:
        errors = {}
        for name, f, domain in (
            ("gaussian", approx_gaussian(10, 1.0), (-1.0, 1.0)),
            ("sin", approx_sin(10), (0.0, 1.0)),
        ):
            state, _ = prepare_state(StatePrepSpec(f, domain, 8, 1e-2))
            samples = f.func(np.linspace(*domain, 256))
            errors[name] = float(np.linalg.norm(state.amplitudes - samples / np.linalg.norm(samples)))
        alphas = [build_sin_ladder(n).alpha for n in range(1, 9)]
    ok = max(errors.values()) <= 1e-2 and max(alphas) < 4 and t.seconds < 120
    detail = ", ".join(f"{k} error {v:.2e}" for k, v in errors.items()) + f", max ladder alpha {max(alphas):.3f}"
    record_criterion(7, ok, detail, t.seconds)
    assert ok


def test_criterion_08_lemma_fuzz(record_criterion):
    with Timer() as t:
        results = run_fuzz("abcdef", seed=0)
    trials = {r.part: r.trials for r in results}
    violations = sum(r.violations for r in results)
    ok = violations == 0 and list(trials.values()) == [500, 200, 1000, 500, 100, 200] and t.seconds < 180
    record_criterion(8, ok, f"{violations} violations in parts a-f ({sum(trials.values())} trials)", t.seconds)
    assert ok


def test_criterion_09_error_budget_robustness(record_criterion):
    worst = {"importance": 0.0, "uniform": 0.0}
    with Timer() as t:
        for seed in range(50):
            rng = rng_for(seed, 9)
            n = int(rng.integers(1, 5))
            u = random_real_state(n, 900 + seed)
            psi = u.real_amplitudes()
            eps = float(10 ** rng.uniform(-3, -1))
            p = random_vanishing_polynomial(int(rng.integers(1, 8)), seed)
            norm = float(np.linalg.norm(p(psi)))
            eta = sup_norm(reduce_by_x(p))
            _, rep = importance_transform(u, p, eps, noise_seed=seed)
            assert rep.delta0 == pytest.approx(eps**2 * norm**2 / (144 * eta**2 * psi.size), rel=1e-12)
            worst["importance"] = max(worst["importance"], rep.achieved_l2_error / eps)

            q = p + float(rng.uniform(-1, 1))
            qnorm = float(np.linalg.norm(q(psi)))
            gamma = sup_norm(q)
            _, rep = uniform_transform(u, q, eps, noise_seed=seed)
            assert rep.delta0 == pytest.approx(error_budget(eps, psi.size, qnorm, gamma, "uniform"), rel=1e-12)
            assert rep.delta0 == pytest.approx(eps**2 * qnorm**2 / (256 * gamma**2 * psi.size**2), rel=1e-12)
            worst["uniform"] = max(worst["uniform"], rep.achieved_l2_error / eps)
    ok = max(worst.values()) <= 1 and t.seconds < 180
    detail = f"worst error/eps: importance {worst['importance']:.2e}, uniform {worst['uniform']:.2e} (50 runs each)"
    record_criterion(9, ok, detail, t.seconds)
    assert ok


def test_criterion_10_spbe_amplification(record_criterion):
    eps1 = 1e-4
    worst = 0.0
    with Timer() as t:
        for seed in range(20):
            rng = rng_for(seed, 10)
            alpha = float(rng.uniform(1, 8))
            eps0 = float(rng.uniform(0, min(0.1, math.sqrt(alpha**2 - 1))))
            s = random_spbe(int(rng.integers(1, 5)), alpha, seed, eps0=eps0)
            out = fixed_point_amplify(s, eps1)
            worst = max(worst, out.state_error() / (math.sqrt(2 * eps0) + eps1))
    ok = worst <= 1 and t.seconds < 120
    record_criterion(10, ok, f"worst error / (sqrt(2 eps0) + eps1) = {worst:.3f} over 20 SPBEs, alpha in [1, 8]", t.seconds)
    assert ok
