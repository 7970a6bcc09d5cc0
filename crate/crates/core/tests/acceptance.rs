//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any of them fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::{linspace, loglog_slope, logspace, random_gaussian, random_mixture, real_alpha};
use cvwitness::criterion::{component_lower_bound, evaluate_witness, WitnessResult, DEFAULT_TOL};
use cvwitness::cumulants::{cumulants_from_moments, finite_difference_cumulants, DEFAULT_FD_STEP};
use cvwitness::fock_oracle::{cat_density, oracle_moments, oracle_witness};
use cvwitness::numerics::symplectic_defect;
use cvwitness::optomech::{center_distances, evolve_mirrors, OptomechParams};
use cvwitness::states::{cat_state, sample_wigner, weyl_central_moments, MixtureState, Vec4};
use cvwitness::tensor::{Tensor3, Tensor4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const G: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Every witness evaluation made by the suite, for the interlacing check.
#[derive(Default)]
struct Ledger {
    seen: Vec<(String, WitnessResult)>,
}

impl Ledger {
    fn witness(&mut self, label: impl Into<String>, state: &MixtureState) -> WitnessResult {
        let w = evaluate_witness(state).expect("witness evaluation");
        self.seen.push((label.into(), w));
        w
    }
}

fn alpha_grid() -> Vec<f64> {
    linspace(0.05, 3.0, 60)
}

fn time_grid(n: usize) -> Vec<f64> {
    linspace(0.0, 4.0 * PI, n)
}

fn cat_third_cumulant(_: &mut Ledger) -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.3, 0.7, 1.0, 1.5, 2.0] {
        let cat = cat_state(real_alpha(a)).unwrap();
        let c = cumulants_from_moments(&weyl_central_moments(&cat).unwrap());
        worst = worst.max(c.k3.max_abs());
    }
    Outcome::new(worst < 1e-10, format!("max |k3| = {worst:.2e}"))
}

fn cat_second_order_blind(ledger: &mut Ledger) -> Outcome {
    let mut worst = f64::INFINITY;
    for a in alpha_grid() {
        let w = ledger.witness(format!("cat alpha={a}"), &cat_state(real_alpha(a)).unwrap());
        worst = worst.min(w.e2);
    }
    Outcome::new(
        worst >= -1e-10,
        format!("min E2 = {worst:.3e} over 60 alphas"),
    )
}

fn cat_fourth_order_detects(ledger: &mut Ledger) -> Outcome {
    let mut low_ok = true;
    let mut low_max = f64::NEG_INFINITY;
    let mut tail = Vec::new();
    for a in alpha_grid() {
        let w = ledger.witness(format!("cat alpha={a}"), &cat_state(real_alpha(a)).unwrap());
        if a <= 1.5 + 1e-12 {
            low_ok &= w.e4 < -1e-6;
            low_max = low_max.max(w.e4);
        }
        if a >= 2.0 - 1e-12 {
            tail.push(w.e4);
        }
    }
    let negative = tail.iter().all(|&e| e < 0.0);
    let decreasing = tail.windows(2).all(|p| p[1].abs() < p[0].abs());
    Outcome::new(
        low_ok && negative && decreasing,
        format!(
            "max E4 on [0.05,1.5] = {low_max:.3e}; tail ({} pts) from {:.3e} to {:.3e}, negative {negative}, |E4| decreasing {decreasing}",
            tail.len(),
            tail.first().unwrap(),
            tail.last().unwrap()
        ),
    )
}

fn fock_agreement(ledger: &mut Ledger) -> Outcome {
    let alpha = real_alpha(1.0);
    let rho = cat_density(alpha, 30).unwrap();
    let cat = cat_state(alpha).unwrap();
    let dm = oracle_moments(&rho).max_abs_diff(&weyl_central_moments(&cat).unwrap());
    let fock = oracle_witness(&rho).unwrap();
    let analytic = ledger.witness("cat alpha=1", &cat);
    let de2 = (fock.e2 - analytic.e2).abs();
    let de4 = (fock.e4 - analytic.e4).abs();
    Outcome::new(
        dm < 1e-8 && de2 < 1e-7 && de4 < 1e-7,
        format!("moments {dm:.1e}, E2 {de2:.1e}, E4 {de4:.1e}"),
    )
}

fn gaussian_annihilation(_: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut states = Vec::new();
    for _ in 0..20 {
        let (mean, sigma) = random_gaussian(&mut rng);
        states.push(MixtureState::gaussian(mean, sigma).unwrap());
    }
    for t in linspace(0.0, 4.0 * PI, 9) {
        states.push(evolve_mirrors(&OptomechParams::new(G, 0.0), t).unwrap().0);
    }
    let (mut k3, mut k4): (f64, f64) = (0.0, 0.0);
    for s in &states {
        let c = cumulants_from_moments(&weyl_central_moments(s).unwrap());
        k3 = k3.max(c.k3.max_abs());
        k4 = k4.max(c.k4.max_abs());
    }
    Outcome::new(
        k3 < 1e-10 && k4 < 1e-10,
        format!(
            "{} states: max |k3| = {k3:.1e}, max |k4| = {k4:.1e}",
            states.len()
        ),
    )
}

fn separable_positivity(ledger: &mut Ledger) -> Outcome {
    let mut worst = f64::INFINITY;
    for lambda in [0.1, 1.0] {
        for t in time_grid(100) {
            let (s, _) = evolve_mirrors(&OptomechParams::new(0.0, lambda), t).unwrap();
            worst = worst.min(ledger.witness(format!("g=0 lambda={lambda} t={t}"), &s).e4);
        }
    }
    Outcome::new(worst >= -1e-9, format!("min E4 = {worst:.3e}"))
}

fn symplectic_evolution(_: &mut Ledger) -> Outcome {
    let (mut defect, mut det): (f64, f64) = (0.0, 0.0);
    for g in [0.0, G, 0.1] {
        for t in time_grid(400) {
            let (_, comps) = evolve_mirrors(&OptomechParams::new(g, 1.0), t).unwrap();
            let s = comps.s_matrix;
            defect = defect.max(symplectic_defect(&s).unwrap());
            det = det.max(((s * s.transpose()).determinant() - 1.0).abs());
        }
    }
    Outcome::new(
        defect < 1e-10 && det < 1e-10,
        format!("max defect {defect:.1e}, max |det - 1| {det:.1e}"),
    )
}

struct Sweep {
    e2: usize,
    e4: usize,
    cov_agree: usize,
    n: usize,
}

fn mirror_sweep(ledger: &mut Ledger, lambda: f64) -> Sweep {
    let mut out = Sweep {
        e2: 0,
        e4: 0,
        cov_agree: 0,
        n: 0,
    };
    for t in time_grid(400) {
        let (s, _) = evolve_mirrors(&OptomechParams::new(G, lambda), t).unwrap();
        let w = ledger.witness(format!("mirror lambda={lambda} t={t}"), &s);
        out.n += 1;
        out.e2 += w.entangled.e2 as usize;
        out.e4 += w.entangled.e4 as usize;
        out.cov_agree += (w.entangled.e4_cov_only == w.entangled.e2) as usize;
    }
    out
}

fn non_gaussian_advantage(ledger: &mut Ledger) -> Outcome {
    let weak = mirror_sweep(ledger, 0.01);
    let strong = mirror_sweep(ledger, 1.0);
    let frac = |k: usize, n: usize| k as f64 / n as f64;
    Outcome::new(
        weak.e2 > 0 && frac(strong.e4, strong.n) > frac(strong.e2, strong.n),
        format!(
            "lambda=0.01: {} E2 detections; lambda=1: E4 {}/{} vs E2 {}/{} (tol {DEFAULT_TOL:e})",
            weak.e2, strong.e4, strong.n, strong.e2, strong.n
        ),
    )
}

fn covariance_only_ablation(ledger: &mut Ledger) -> Outcome {
    let mut worst: f64 = 1.0;
    let mut parts = Vec::new();
    for lambda in [0.01, 1.0] {
        let s = mirror_sweep(ledger, lambda);
        let f = s.cov_agree as f64 / s.n as f64;
        worst = worst.min(f);
        parts.push(format!("lambda={lambda}: {:.1}%", 100.0 * f));
    }
    Outcome::new(worst >= 0.9, format!("sign agreement {}", parts.join(", ")))
}

fn distance_peaks(_: &mut Ledger) -> Outcome {
    let p = OptomechParams::new(G, 1.0);
    let ts = time_grid(400);
    let dmax: Vec<f64> = ts
        .iter()
        .map(|&t| {
            center_distances(&p, t)
                .unwrap()
                .into_iter()
                .fold(0.0, f64::max)
        })
        .collect();
    let peaks: Vec<f64> = (1..ts.len() - 1)
        .filter(|&i| dmax[i] > dmax[i - 1] && dmax[i] >= dmax[i + 1])
        .map(|i| ts[i])
        .collect();
    let near = |c: f64| peaks.iter().any(|t| (t - c).abs() <= 0.3);
    let pass = near(PI) && near(3.0 * PI);
    let listed: Vec<String> = peaks.iter().map(|t| format!("{t:.3}")).collect();
    Outcome::new(pass, format!("local maxima at [{}]", listed.join(", ")))
}

fn bound_scaling(ledger: &mut Ledger) -> Outcome {
    let lambdas = logspace(1.0, 10.0, 20);
    let mut bounds = Vec::new();
    let mut valid = true;
    for &lambda in &lambdas {
        let (s, comps) = evolve_mirrors(&OptomechParams::new(G, lambda), 10.0).unwrap();
        let e4 = ledger.witness(format!("bound lambda={lambda}"), &s).e4;
        let (bc, mean) = comps.bound_components();
        let b = component_lower_bound(&bc, &mean).unwrap();
        valid &= b <= e4 + 1e-9;
        bounds.push(b);
    }
    let slope = loglog_slope(&lambdas, &bounds);
    Outcome::new(
        valid && (slope - 2.0).abs() <= 0.1,
        format!(
            "bound <= E4 everywhere: {valid}; |bound| from {:.3e} to {:.3e}, log-log slope {slope:.4}",
            bounds[0].abs(),
            bounds[bounds.len() - 1].abs()
        ),
    )
}

fn finite_difference_route(_: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut states: Vec<MixtureState> = (0..20)
        .map(|k| random_mixture(&mut rng, 1 + k % 4))
        .collect();
    for t in [0.5, 2.0, 5.0, 10.0, 12.0] {
        states.push(evolve_mirrors(&OptomechParams::new(G, 1.0), t).unwrap().0);
    }
    let mut worst: f64 = 0.0;
    for s in &states {
        let analytic = cumulants_from_moments(&weyl_central_moments(s).unwrap());
        let fd = finite_difference_cumulants(s, DEFAULT_FD_STEP).unwrap();
        worst = worst.max(fd.max_abs_diff(&analytic));
    }
    Outcome::new(
        worst < 1e-6,
        format!("{} states, max deviation {worst:.2e}", states.len()),
    )
}

fn monte_carlo(_: &mut Ledger) -> Outcome {
    let (state, _) = evolve_mirrors(&OptomechParams::new(G, 1.0), 2.0).unwrap();
    let m = weyl_central_moments(&state).unwrap();
    let samples = sample_wigner(&state, 1_000_000, 13).unwrap();
    let n = samples.len() as f64;

    // Running sums of each centred product and its square.
    let mut zscore: f64 = 0.0;
    let mut check = |est: &dyn Fn(&Vec4) -> f64, expected: f64| {
        let (mut s, mut s2) = (0.0, 0.0);
        for x in &samples {
            let v = est(x);
            s += v;
            s2 += v * v;
        }
        let mean = s / n;
        let se = ((s2 / n - mean * mean) / (n - 1.0)).sqrt();
        zscore = zscore.max((mean - expected).abs() / se);
    };
    let mu = m.m1;
    for i in 0..4 {
        check(&|x: &Vec4| x[i], m.m1[i]);
        for j in i..4 {
            check(
                &|x: &Vec4| 2.0 * (x[i] - mu[i]) * (x[j] - mu[j]),
                m.m2[(i, j)],
            );
            for k in j..4 {
                let d = |x: &Vec4| (x[i] - mu[i]) * (x[j] - mu[j]) * (x[k] - mu[k]);
                check(&d, Tensor3::get(&m.m3, i, j, k));
                for l in k..4 {
                    let d = |x: &Vec4| {
                        (x[i] - mu[i]) * (x[j] - mu[j]) * (x[k] - mu[k]) * (x[l] - mu[l])
                    };
                    check(&d, Tensor4::get(&m.m4, i, j, k, l));
                }
            }
        }
    }
    Outcome::new(zscore < 5.0, format!("69 moments, max |z| = {zscore:.2}"))
}

fn interlacing(ledger: &mut Ledger) -> Outcome {
    let bad: Vec<&String> = ledger
        .seen
        .iter()
        .filter(|(_, w)| w.e4 > w.e2 + 1e-10)
        .map(|(l, _)| l)
        .collect();
    Outcome::new(
        bad.is_empty(),
        format!(
            "{} evaluations, {} violations{}",
            ledger.seen.len(),
            bad.len(),
            bad.first()
                .map(|l| format!(" (first: {l})"))
                .unwrap_or_default()
        ),
    )
}

type Criterion = fn(&mut Ledger) -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 14] = [
        ("cat third cumulant vanishes", cat_third_cumulant),
        ("cat E2 non-negative", cat_second_order_blind),
        ("cat E4 negative and fading", cat_fourth_order_detects),
        ("Fock oracle agreement", fock_agreement),
        ("Gaussian cumulant annihilation", gaussian_annihilation),
        ("separable mirrors pass", separable_positivity),
        ("symplectic evolution", symplectic_evolution),
        ("non-Gaussian detection advantage", non_gaussian_advantage),
        ("covariance-only ablation", covariance_only_ablation),
        ("centre-distance peaks", distance_peaks),
        ("component bound and scaling", bound_scaling),
        ("finite-difference route", finite_difference_route),
        ("Monte Carlo moments", monte_carlo),
        ("E4 <= E2 everywhere", interlacing),
    ];
    let mut ledger = Ledger::default();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run(&mut ledger);
        let tag = if out.pass { "PASS" } else { "FAIL" };
        failed += (!out.pass) as usize;
        println!(
            "acceptance {:>2} {tag} {name}: {} [{:.2}s]",
            k + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
