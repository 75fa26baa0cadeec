"""Acceptance suite: desk-scale quantitative surrogates for the library's
guarantees, one check per criterion, each with its tolerance pinned here.

Every check is a pure function returning a CheckResult; run_suite prints
one PASS/FAIL line per criterion.  basin_eigenvalue_range is implemented
exactly as stated and is expected to fail: the analytic Hessian of the
paired-difference risk has minimum eigenvalue 2*||x*||^2 at the center of
the ball, strictly below the stated 8/3 lower edge, so the quoted
strong-convexity constant cannot hold as a pointwise eigenvalue range.
"""

from __future__ import annotations

import math
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import datagen
from .blind_deconv import BdInitConfig, bd_spectral_initialize, estimate_second_moment
from .domain import (
    CorruptionPlan,
    DirectionPlant,
    GDConfig,
    LargeOutlier,
    NoiseModel,
    Signal,
    SignAlignedResponse,
    dist,
)
from .oracle import (
    bd_covariance_matrix,
    bd_population_risk,
    davis_kahan_bound,
    gaussian_mixed_moment_bound,
    moment_bound_check,
    pr_lift_mean_matrix,
    pr_second_moment_matrix,
)
from .pipeline import naive_solve_pr, solve_bd, solve_pr
from .robust_gd import sample_gradient_bd, sample_gradient_pr
from .seeds import derive_seed
from .spectral_init import InitConfig, truncate
from .stability import estimate_gamma, question1_sweep

SIGMA_RUP1 = 15.0**-0.25  # Student-t(4.5) scaled so K4 = 1 (r_up = 1)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    known_gap: bool = False  # documented spec/paper defect, expected to fail


def _signal(n: int, seed: int, norm: float = 1.0) -> Signal:
    return Signal.random_direction(n, norm, seed)


def _rel_opnorm(emp: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(emp - ref, 2) / np.linalg.norm(ref, 2))


# -- 1: moment identities ----------------------------------------------------

def check_moment_identities() -> CheckResult:
    m = 500_000
    tol = 0.05
    worst = []
    for i, n in enumerate((3, 5)):
        sig = _signal(n, seed=derive_seed(101, i))
        noise = NoiseModel.student_t(SIGMA_RUP1)
        data = datagen.generate_clean(sig, noise, m, derive_seed(103, i))
        a, y = data.sensing, data.responses
        lift = (y[:, None] * a)
        emp1 = (a.T * y) @ a / m
        worst.append(("E[y a a^T]", _rel_opnorm(emp1, pr_lift_mean_matrix(sig))))
        emp2 = lift.T @ lift / m
        worst.append(("E[y^2 a a^T]", _rel_opnorm(emp2, pr_second_moment_matrix(sig, SIGMA_RUP1))))

        sym = datagen.symmetrize(data)
        ub = sym.upsilon[:, None] * sym.b
        cov = ub.T @ ub / sym.m - np.outer(ub.mean(axis=0), ub.mean(axis=0))
        worst.append(("Cov(v b)", _rel_opnorm(cov, bd_covariance_matrix(sig, SIGMA_RUP1))))
        v2 = float(np.mean(sym.upsilon**2))
        v2_ref = sig.norm**4 + SIGMA_RUP1**2 / 2.0
        worst.append(("E[v^2]", abs(v2 - v2_ref) / v2_ref))
        var_v2 = float(np.var(sym.upsilon**2))
        bound = 72.0 * (sig.norm**8 + 1.0)  # K4 = 1 at r_up = 1
        worst.append(("Var(v^2) bound excess", max(0.0, var_v2 / bound - 1.0)))
        q = sym.upsilon * np.einsum("ij,ij->i", sym.b, sym.c)
        var_q = float(np.var(q))
        var_q_ref = n * sig.norm**4 + n * SIGMA_RUP1**2 / 2.0 + 7.0 * sig.norm**4
        worst.append(("Var(v b^T c)", abs(var_q - var_q_ref) / var_q_ref))
    bad = [(k, v) for k, v in worst if v > tol]
    top = max(worst, key=lambda kv: kv[1])
    return CheckResult("moment_identities", not bad,
                       f"worst relative error {top[1]:.3f} ({top[0]}), tolerance {tol}")


# -- 2a: gradient / Hessian finite differences -------------------------------

def check_gradient_finite_diff() -> CheckResult:
    rng = np.random.default_rng(202)
    n, h, tol = 6, 1e-5, 1e-5
    worst = 0.0
    for _ in range(100):
        x = rng.standard_normal(n)
        a = rng.standard_normal(n)
        y = float(rng.standard_normal())
        g = sample_gradient_pr(x, a, y)
        fd = np.empty(n)
        for j in range(n):
            e = np.zeros(n); e[j] = h
            f = lambda v: (y - float(a @ v) ** 2) ** 2 / 4.0
            fd[j] = (f(x + e) - f(x - e)) / (2 * h)
        worst = max(worst, np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1e-9))

        b, c = rng.standard_normal(n), rng.standard_normal(n)
        u = float(rng.standard_normal())
        g2 = sample_gradient_bd(x, b, c, u)
        for j in range(n):
            e = np.zeros(n); e[j] = h
            f = lambda v: (u - float(b @ v) * float(c @ v)) ** 2 / 2.0
            fd[j] = (f(x + e) - f(x - e)) / (2 * h)
        worst = max(worst, np.linalg.norm(g2 - fd) / max(np.linalg.norm(g2), 1e-9))

    sig = _signal(5, seed=11)
    hess_worst = 0.0
    for _ in range(20):
        x = rng.standard_normal(5)
        _, _, H = bd_population_risk(x, sig, 0.3)
        fdH = np.empty((5, 5))
        for j in range(5):
            e = np.zeros(5); e[j] = h
            gp = bd_population_risk(x + e, sig, 0.3)[1]
            gm = bd_population_risk(x - e, sig, 0.3)[1]
            fdH[:, j] = (gp - gm) / (2 * h)
        hess_worst = max(hess_worst, np.linalg.norm(H - fdH, 2) / np.linalg.norm(H, 2))
    ok = worst <= tol and hess_worst <= tol
    return CheckResult("gradient_finite_diff", ok,
                       f"worst gradient rel err {worst:.2e}, Hessian rel err {hess_worst:.2e}, tol {tol}")


# -- 2b: basin eigenvalue range (documented spec/paper gap, expected red) -----

def check_basin_eigenvalue_range() -> CheckResult:
    rng = np.random.default_rng(203)
    n = 4
    sig = _signal(n, seed=23)
    lo_edge = (8.0 / 3.0) * sig.norm**2 * 0.98
    hi_edge = 6.0 * sig.norm**2 * 1.02
    lam_min, lam_max = np.inf, -np.inf
    for _ in range(1000):
        h = rng.standard_normal(n)
        h *= rng.random() ** (1 / n) * (sig.norm / 9.0) / np.linalg.norm(h)
        _, _, H = bd_population_risk(sig.x_star + h, sig, 0.0)
        evals = np.linalg.eigvalsh(H)
        lam_min = min(lam_min, evals[0])
        lam_max = max(lam_max, evals[-1])
    ok = lam_min >= lo_edge and lam_max <= hi_edge
    return CheckResult(
        "basin_eigenvalue_range", ok,
        f"measured eigenvalue range [{lam_min:.3f}, {lam_max:.3f}] vs stated "
        f"[{lo_edge:.3f}, {hi_edge:.3f}]; the analytic minimum curvature at the "
        f"ball center is 2*||x*||^2 = {2 * sig.norm**2:.3f}, below the stated lower edge",
        known_gap=True)


# -- 3: eigenvector perturbation bound ---------------------------------------

def check_davis_kahan() -> CheckResult:
    rng = np.random.default_rng(303)
    n, trials = 6, 500
    violations = 0
    worst_margin = np.inf
    for _ in range(trials):
        # eigenvalues with pairwise gaps >= 0.6, so any index qualifies
        evals = np.cumsum(0.6 + rng.uniform(0.0, 1.5, n))
        i = int(rng.integers(0, n))
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        S = Q @ np.diag(evals) @ Q.T
        T = S + 0.05 * rng.standard_normal((n, n))
        T = (T + T.T) / 2.0
        # order of the targeted eigenvalue among descending eigenvalues of S
        order = int(np.sum(evals > evals[i]))
        bound = davis_kahan_bound(S, T, order)
        vs = np.linalg.eigh(S)[1][:, ::-1][:, order]
        vt = np.linalg.eigh(T)[1][:, ::-1][:, order]
        actual = min(np.linalg.norm(vs - vt), np.linalg.norm(vs + vt))
        worst_margin = min(worst_margin, bound - actual)
        if actual > bound:
            violations += 1
    return CheckResult("davis_kahan", violations == 0,
                       f"{violations}/{trials} violations, smallest bound margin {worst_margin:.4f}")


# -- 4: Gaussian mixed-moment bounds ------------------------------------------

def check_moment_lemma() -> CheckResult:
    samples = 1_000_000
    sig = _signal(7, seed=41)
    rng = np.random.default_rng(404)
    msgs, ok = [], True
    for i in (2, 4, 6, 8):
        v = rng.standard_normal(7)
        res = moment_bound_check(i, sig, v, samples, seed=derive_seed(405, i))
        if res.estimate > res.bound + 4.0 * res.stderr:
            ok = False
        msgs.append(f"i={i}: est {res.estimate:.3g} <= bound {res.bound:.3g}")
    for i in (3, 5):
        v = rng.standard_normal(7)
        res = moment_bound_check(i, sig, v, samples, seed=derive_seed(406, i))
        if abs(res.estimate) > 4.0 * res.stderr:
            ok = False
        msgs.append(f"i={i}: |est| {abs(res.estimate):.3g} ~ 0 (4se {4 * res.stderr:.3g})")
    unit = Signal(np.r_[1.0, np.zeros(6)])
    c8 = gaussian_mixed_moment_bound(8, unit, unit.x_star)
    if c8 != 16380.0:
        ok = False
    msgs.append(f"i=8 aligned unit bound {c8:g} (expect 16380)")
    return CheckResult("moment_lemma_bounds", ok, "; ".join(msgs))


# -- 5: truncation gap --------------------------------------------------------

def check_truncation_gap() -> CheckResult:
    m = 1_000_000
    r_up = 1.0
    details, ok = [], True
    for i, n in enumerate((3, 5)):
        sig = _signal(n, seed=derive_seed(501, i))
        noise = NoiseModel.student_t(SIGMA_RUP1)
        data = datagen.generate_clean(sig, noise, m, derive_seed(503, i))
        cfg = InitConfig(r_up, 0.0, 0.1, 8, 8)
        tau = cfg.tau_constant * math.sqrt(n) * (r_up**2 + 1.0) * sig.norm**2
        X = data.responses[:, None] * data.sensing
        over = np.linalg.norm(X, axis=1) > tau
        gap = float(np.linalg.norm((X[over].T @ X[over]) / m, 2))
        lim = math.sqrt(2.0) * sig.norm**4 / 9.0
        ok &= gap <= lim
        details.append(f"pr n={n}: gap {gap:.4f} <= {lim:.4f}")

        sym = datagen.symmetrize(data)
        v_hat = math.sqrt(sig.norm**4 + SIGMA_RUP1**2 / 2.0)
        bd_cfg = BdInitConfig(r_up, 0.0, 0.1, 8, 8)
        tau_bd = bd_cfg.tau_constant * math.sqrt(n) * (r_up**2 + 1.0) * v_hat
        Xb = sym.upsilon[:, None] * sym.b
        over = np.linalg.norm(Xb, axis=1) > tau_bd
        gap_bd = float(np.linalg.norm((Xb[over].T @ Xb[over]) / sym.m, 2))
        lim_bd = sig.norm**4 / 54.0
        ok &= gap_bd <= lim_bd
        details.append(f"bd n={n}: gap {gap_bd:.5f} <= {lim_bd:.5f}")
    return CheckResult("truncation_gap", ok, "; ".join(details))


# -- 6: spectral init success -------------------------------------------------

def _init_trial_pr(n, eps, t):
    sig = _signal(n, seed=derive_seed(601, t))
    noise = NoiseModel.student_t(SIGMA_RUP1)
    cfg = InitConfig.from_rates(n, eps, delta=0.1, r_up=1.0)
    plan1 = CorruptionPlan(eps, LargeOutlier(100.0), derive_seed(603, t))
    plan2 = CorruptionPlan(eps, LargeOutlier(100.0), derive_seed(605, t))
    d1 = datagen.corrupt(datagen.generate_clean(sig, noise, cfg.m1, derive_seed(607, t)), plan1)
    d2 = datagen.corrupt(datagen.generate_clean(sig, noise, cfg.m2, derive_seed(609, t)), plan2)
    from .spectral_init import spectral_initialize

    est = spectral_initialize(d1, d2, cfg)
    return dist(est.x0, sig.x_star) <= sig.norm / 9.0


def _init_trial_bd(n, eps, t):
    sig = _signal(n, seed=derive_seed(611, t))
    noise = NoiseModel.student_t(SIGMA_RUP1, mu=3.0)
    cfg = BdInitConfig.from_rates(n, eps, delta=0.1, r_up=1.0)
    plan1 = CorruptionPlan(eps, LargeOutlier(100.0), derive_seed(613, t))
    plan2 = CorruptionPlan(eps, LargeOutlier(100.0), derive_seed(615, t))
    d1 = datagen.corrupt(datagen.generate_clean(sig, noise, 2 * cfg.m1, derive_seed(617, t)), plan1)
    d2 = datagen.corrupt(datagen.generate_clean(sig, noise, 2 * cfg.m2, derive_seed(619, t)), plan2)
    est = bd_spectral_initialize(datagen.symmetrize(d2), cfg, sym_norm=datagen.symmetrize(d1))
    return dist(est.x0, sig.x_star) <= sig.norm / 9.0


def check_spectral_init_success() -> CheckResult:
    n, trials = 20, 50
    pr_ok = sum(_init_trial_pr(n, 0.05, t) for t in range(trials))
    bd_ok = sum(_init_trial_bd(n, 0.04, t) for t in range(trials))
    ok = pr_ok >= math.ceil(0.9 * trials) and bd_ok >= math.ceil(0.85 * trials)
    return CheckResult("spectral_init_success", ok,
                       f"pr {pr_ok}/{trials} (need >=45), bd {bd_ok}/{trials} (need >=43)")


# -- 7: end-to-end error floor -------------------------------------------------

def _floor_curve(model: str, trials: int = 30):
    n, sigma = 20, 0.5
    eps_grid = [0.01, 0.02, 0.05, 0.1]
    P = 12
    m_t = 20000 if model == "pr" else 15000
    meds = []
    for eps in eps_grid:
        finals = []
        for t in range(trials):
            sig = _signal(n, seed=derive_seed(701, t))
            mu = 5.0 if model == "bd" else 0.0
            noise = NoiseModel.student_t(sigma, mu=mu)
            level = 1.25 if model == "pr" else 1.0
            adv = SignAlignedResponse(None, level)

            def draw(k, m):
                d = datagen.generate_clean(sig, noise, m, derive_seed(703, t, k, int(eps * 1000)))
                return datagen.corrupt(d, CorruptionPlan(eps, adv, derive_seed(707, t, k)))

            gd = GDConfig(P, m_t, None, 0.1)
            if model == "pr":
                cfg = InitConfig.from_rates(n, eps, delta=0.1, r_up=1.0)
                d1, d2 = draw(0, cfg.m1), draw(1, cfg.m2)
                batches = [draw(2 + r, m_t) for r in range(P)]
                _, _, rep = solve_pr(d1, d2, batches, cfg, gd, signal=sig)
            else:
                cfg = BdInitConfig.from_rates(n, eps, delta=0.1, r_up=1.0)
                d1, d2 = draw(0, 2 * cfg.m1), draw(1, 2 * cfg.m2)
                batches = [draw(2 + r, 2 * m_t) for r in range(P)]
                _, _, rep = solve_bd(d1, d2, batches, cfg, gd, signal=sig)
            finals.append(rep.dist_final)
        meds.append(float(np.median(finals)))
    slope, inter = np.polyfit(np.log(eps_grid), np.log(meds), 1)
    constant = float(np.exp(inter)) / sigma
    return slope, constant, meds


def check_error_floor_pr() -> CheckResult:
    slope, constant, meds = _floor_curve("pr")
    ok = 0.35 <= slope <= 0.65 and constant <= 10.0
    return CheckResult("error_floor_pr", ok,
                       f"exponent {slope:.3f} in [0.35, 0.65], constant {constant:.2f} <= 10; "
                       f"medians {['%.4f' % v for v in meds]}")


def check_error_floor_bd() -> CheckResult:
    slope, constant, meds = _floor_curve("bd")
    ok = 0.35 <= slope <= 0.65 and constant <= 10.0
    return CheckResult("error_floor_bd", ok,
                       f"exponent {slope:.3f} in [0.35, 0.65], constant {constant:.2f} <= 10; "
                       f"medians {['%.4f' % v for v in meds]}")


# -- 8: noiseless exact recovery ------------------------------------------------

def check_noiseless_exact() -> CheckResult:
    n, trials = 10, 20
    worst = 0.0
    for t in range(trials):
        sig = _signal(n, seed=derive_seed(801, t))
        noise = NoiseModel.gaussian(0.0)
        cfg = InitConfig.from_rates(n, 0.0, delta=0.1, r_up=1.0)
        gen = lambda k, m: datagen.generate_clean(sig, noise, m, derive_seed(803, t, k))
        d1, d2 = gen(0, cfg.m1), gen(1, cfg.m2)
        batches = [gen(2 + r, 2000) for r in range(40)]
        _, _, rep = solve_pr(d1, d2, batches, cfg, GDConfig(40, 2000, None, 0.1), signal=sig)
        worst = max(worst, rep.dist_final)
    return CheckResult("noiseless_exact_recovery", worst <= 1e-6,
                       f"worst dist over {trials} trials {worst:.2e} <= 1e-6")


# -- 9: breakdown comparison -----------------------------------------------------

def check_breakdown_comparison() -> CheckResult:
    n, eps, trials = 10, 0.1, 30
    rob, nai = [], []
    for t in range(trials):
        sig = _signal(n, seed=derive_seed(901, t))
        noise = NoiseModel.student_t(SIGMA_RUP1)
        rng = np.random.default_rng(derive_seed(903, t))
        v = rng.standard_normal(n)
        v -= (v @ sig.x_star) * sig.x_star / sig.norm**2
        v /= np.linalg.norm(v)
        adv = DirectionPlant(v, 20.0 * sig.norm)
        cfg = InitConfig.from_rates(n, eps, delta=0.1, r_up=1.0)

        def draw(k, m):
            d = datagen.generate_clean(sig, noise, m, derive_seed(905, t, k))
            return datagen.corrupt(d, CorruptionPlan(eps, adv, derive_seed(907, t, k)))

        d1, d2 = draw(0, cfg.m1), draw(1, cfg.m2)
        batches = [draw(2 + r, 5000) for r in range(12)]
        gd = GDConfig(12, 5000, None, 0.1)
        _, _, rr = solve_pr(d1, d2, batches, cfg, gd, signal=sig)
        _, _, rn = naive_solve_pr(d1, d2, batches, gd, signal=sig)
        rob.append(rr.dist_final)
        nai.append(rn.dist_final)
    ratio = float(np.median(nai)) / max(float(np.median(rob)), 1e-12)
    return CheckResult("breakdown_comparison", float(np.median(rob)) <= float(np.median(nai)) / 5.0,
                       f"robust median {np.median(rob):.4f}, naive median {np.median(nai):.4g}, "
                       f"ratio {ratio:.1f} (need >= 5)")


# -- 10: mean-shift cancellation --------------------------------------------------

def check_mean_shift_cancellation() -> CheckResult:
    n = 8
    sig = _signal(n, seed=1001)
    outs = []
    for mu in (0.0, 1e6):
        noise = NoiseModel.student_t(0.3, mu=mu)
        cfg = BdInitConfig.from_rates(n, 0.02, delta=0.1, r_up=1.0)
        gen = lambda k, m: datagen.generate_clean(sig, noise, m, derive_seed(1003, k))
        d1, d2 = gen(0, 2 * cfg.m1), gen(1, 2 * cfg.m2)
        batches = [gen(2 + r, 4000) for r in range(8)]
        x_out, trace, _ = solve_bd(d1, d2, batches, cfg, GDConfig(8, 2000, None, 0.1), signal=sig)
        outs.append((x_out, trace))
    exact = all(np.array_equal(a, b) for a, b in zip(outs[0][1].iterates, outs[1][1].iterates))
    exact &= np.array_equal(outs[0][0], outs[1][0])
    return CheckResult("mean_shift_cancellation", exact,
                       "bit-identical iterates for mu=0 vs mu=1e6" if exact
                       else "outputs differ between mu=0 and mu=1e6")


# -- 11: batch splitting -----------------------------------------------------------

def check_batch_splitting() -> CheckResult:
    m, eps, T, reps = 10_000, 0.1, 5, 200
    bound = eps + math.sqrt((math.log(T) + math.log(20.0)) / (2.0 * m / T))
    sig = _signal(4, seed=1101)
    noise = NoiseModel.gaussian(0.1)
    hits = 0
    for t in range(reps):
        data = datagen.generate_clean(sig, noise, m, derive_seed(1103, t))
        data = datagen.corrupt(data, CorruptionPlan(eps, LargeOutlier(50.0), derive_seed(1105, t)))
        split = datagen.split_batches(data, T, derive_seed(1107, t))
        hits += float(np.max(split.per_batch_corruption)) <= bound
    return CheckResult("batch_splitting", hits >= math.ceil(0.95 * reps),
                       f"{hits}/{reps} repetitions under bound {bound:.4f} (need >= {math.ceil(0.95 * reps)})")


# -- 12: stability instrument -------------------------------------------------------

def check_stability_instrument() -> CheckResult:
    # The monotone-in-m sweep runs at eps=0, the sampling-driven regime:
    # at any fixed eps>0 the greedy gamma converges (from below) to an
    # m-independent population tail constant, E[top-eps score mass], so
    # monotone decrease is not a property of the eps>0 instrument.
    n, eps = 4, 0.02
    sig = Signal(np.r_[1.0, np.zeros(n - 1)])
    noise = NoiseModel.gaussian(0.0)
    cfg = InitConfig(1.0, eps, 0.1, 8, 8)
    tau = cfg.tau_constant * math.sqrt(n) * 2.0 * sig.norm**2
    ref = pr_second_moment_matrix(sig, 0.0)
    medians = []
    for m in (1_000, 10_000, 100_000, 1_000_000):
        gammas = []
        for t in range(10):
            data = datagen.generate_clean(sig, noise, m, derive_seed(1203, m, t))
            pts, _ = truncate(data, tau, r_up=1.0, norm_hat=sig.norm)
            gammas.append(estimate_gamma(pts, ref, 0.0, seed=derive_seed(1205, m, t)).gamma_observed)
        medians.append(float(np.median(gammas)))
    monotone = all(medians[i + 1] <= medians[i] + 1e-9 for i in range(len(medians) - 1))

    data = datagen.generate_clean(sig, noise, 20_000, derive_seed(1207, 0))
    pts, _ = truncate(data, tau, r_up=1.0, norm_hat=sig.norm)
    rep0 = estimate_gamma(pts, ref, 0.0)
    emp = pts.T @ pts / pts.shape[0]
    direct = float(np.max(np.abs(np.linalg.eigvalsh(emp - ref)))) / float(np.linalg.norm(ref, 2))
    exact0 = abs(rep0.gamma_observed - direct) <= 1e-12

    rows = question1_sweep([4], [20.0, 200.0], 2, cfg, seed=7)
    sweep_ok = len(rows) == 2 and all("gamma_median" in r for r in rows)
    ok = monotone and exact0 and sweep_ok
    return CheckResult("stability_instrument", ok,
                       f"medians vs m {['%.4f' % v for v in medians]} monotone={monotone}, "
                       f"eps=0 exact match={exact0}, q1 sweep rows={len(rows)}")


# -- 13: determinism -----------------------------------------------------------------

_DETERMINISM_CONFIG = """
[experiment]
name = "determinism-probe"
model = "pr"
trials = 3
master_seed = 424242

[signal]
n = 6

[noise]
kind = "student_t"
sigma_over_norm2 = 0.3

[corruption]
epsilon = [0.05]
adversary = "large_outlier"

[gd]
rounds = 4
batch = 1500

[output]
plots = false
"""


def check_determinism() -> CheckResult:
    from .cli import run_experiment

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        cfg_path = tmp / "probe.toml"
        cfg_path.write_text(_DETERMINISM_CONFIG)
        run_experiment(cfg_path, tmp / "a")
        run_experiment(cfg_path, tmp / "b")

        def strip_runtime(path):
            lines = (path / "results.csv").read_text().splitlines()
            ix = lines[0].split(",").index("runtime_ms")
            return ["," .join(v for j, v in enumerate(line.split(",")) if j != ix)
                    for line in lines]

        same = strip_runtime(tmp / "a") == strip_runtime(tmp / "b")
    return CheckResult("determinism", same,
                       "identical results.csv across reruns (runtime column excluded)"
                       if same else "results.csv differs between reruns")


CRITERIA = [
    ("moment_identities", check_moment_identities),
    ("gradient_finite_diff", check_gradient_finite_diff),
    ("basin_eigenvalue_range", check_basin_eigenvalue_range),
    ("davis_kahan", check_davis_kahan),
    ("moment_lemma_bounds", check_moment_lemma),
    ("truncation_gap", check_truncation_gap),
    ("spectral_init_success", check_spectral_init_success),
    ("error_floor_pr", check_error_floor_pr),
    ("error_floor_bd", check_error_floor_bd),
    ("noiseless_exact_recovery", check_noiseless_exact),
    ("breakdown_comparison", check_breakdown_comparison),
    ("mean_shift_cancellation", check_mean_shift_cancellation),
    ("batch_splitting", check_batch_splitting),
    ("stability_instrument", check_stability_instrument),
    ("determinism", check_determinism),
]


def run_suite(only=None, stream=None) -> bool:
    """Run the acceptance criteria, print one PASS/FAIL line each, return
    overall success (documented known-gap failures count as failures)."""
    stream = stream or sys.stdout
    selected = [(n, f) for n, f in CRITERIA if only is None or n in only]
    all_ok = True
    for name, fn in selected:
        t0 = time.perf_counter()
        res = fn()
        dt = time.perf_counter() - t0
        status = "PASS" if res.passed else ("FAIL (known gap)" if res.known_gap else "FAIL")
        print(f"[{status}] {name} ({dt:.1f}s): {res.detail}", file=stream)
        all_ok &= res.passed
    return all_ok
