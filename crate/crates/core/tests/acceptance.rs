//! Acceptance suite: one pass/fail line per criterion, non-zero exit status
//! when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use bihns_core::boundary::{beta01, beta02, beta11, beta12, BetaTable};
use bihns_core::clamped::ClampedBasis;
use bihns_core::flow::{duhamel, navier_frequency, propagate_navier, propagate_periodic, DuhamelState, Flow, ForcingHistory};
use bihns_core::lab::kato::{kato_sweep, RegularitySweep};
use bihns_core::lab::{count_lambda4, optimality_run};
use bihns_core::nonlinear::{picard_dirichlet, picard_navier, Family, InitialData, ProblemSpec, SolutionRecord};
use bihns_core::quadrature::CompositeRule;
use bihns_core::spectral::{odd_even_extend, reconstruct, reconstruct_derivative, FourierState};
use bihns_core::trace::BoundaryTrace;
use bihns_core::boundary::dirichlet_traces;
use bihns_core::{C64, TRACE_PERIOD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let q: Vec<C64> = (1..=256).map(|k| random_c(&mut rng) / (k as f64).powi(2)).collect();
        let st = FourierState::from_sine(q);
        let t = rng.gen_range(0.0..1.0);
        let out = propagate_navier(&st, t).unwrap();
        for s in [0.0, 1.0, 2.0] {
            let a = st.h_norm(s);
            worst = worst.max((out.h_norm(s) - a).abs() / a);
        }
    }
    outcome(worst <= 1e-13, format!("max relative deviation {worst:.2e} (limit 1e-13)"))
}

/// `sin²(π⁴t/2) = ½ − ¼e^{iπ⁴t} − ¼e^{−iπ⁴t}`.
fn smooth_trace() -> BoundaryTrace {
    BoundaryTrace::from_series([(0, C64::new(0.5, 0.0)), (1, C64::new(-0.25, 0.0)), (-1, C64::new(-0.25, 0.0))])
}

/// `L²(0,T)` distance between a recovered trace and the imposed one, by the
/// trapezoid rule over the stored snapshots.
fn trace_error(rec: &SolutionRecord, pick: impl Fn(usize) -> C64, h: &BoundaryTrace) -> f64 {
    let t = &rec.times;
    let mut acc = 0.0;
    for j in 1..t.len() {
        let e0 = (pick(j - 1) - h.eval(t[j - 1])).norm_sqr();
        let e1 = (pick(j) - h.eval(t[j])).norm_sqr();
        acc += 0.5 * (t[j] - t[j - 1]) * (e0 + e1);
    }
    acc.sqrt()
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn fixed(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
}

fn ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

fn navier_recovery() -> Outcome {
    let h1 = smooth_trace();
    let mut errors = Vec::new();
    for n in [32, 64, 128, 256] {
        let mut spec = ProblemSpec::new(Family::Navier);
        spec.s = 0.75;
        spec.lambda = 0.0;
        spec.modes = n;
        spec.horizon = TRACE_PERIOD;
        spec.dt = TRACE_PERIOD / 400.0;
        spec.snapshots = 401;
        spec.boundary.left = h1.clone();
        let rec = picard_navier(&spec).unwrap();
        errors.push(trace_error(&rec, |j| rec.boundary[j].left, &h1));
    }
    let r = ratios(&errors);
    outcome(
        r.iter().all(|&x| x >= 1.5),
        format!("L² errors [{}], ratios [{}] (each ≥ 1.5)", sci(&errors), fixed(&r)),
    )
}

/// Dormand–Prince 5(4) for `y' = iωy + f(t)` on `[a,b]`.
fn dopri(omega: f64, f: &dyn Fn(f64) -> C64, a: f64, b: f64, y0: C64, tol: f64) -> C64 {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let rhs = |t: f64, y: C64| C64::new(0.0, omega) * y + f(t);
    let (mut t, mut y) = (a, y0);
    let mut h = (b - a).min(0.1 / omega.max(1.0));
    while t < b {
        h = h.min(b - t);
        let mut k = [C64::new(0.0, 0.0); 7];
        for i in 0..7 {
            let mut yi = y;
            for j in 0..i {
                yi += h * A[i][j] * k[j];
            }
            k[i] = rhs(t + C[i] * h, yi);
        }
        let mut y5 = y;
        let mut y4 = y;
        for i in 0..7 {
            y5 += h * B5[i] * k[i];
            y4 += h * B4[i] * k[i];
        }
        let err = (y5 - y4).norm();
        let scale = tol * (1.0 + y5.norm());
        if err <= scale {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * (scale / err).powf(0.2) };
        h *= factor.clamp(0.2, 5.0);
    }
    y
}

fn duhamel_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 6;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let k = rng.gen_range(1..=4usize);
        let nodes = 40;
        let t_end = 0.02;
        let times: Vec<f64> = (0..=nodes).map(|j| t_end * j as f64 / nodes as f64).collect();
        let values: Vec<C64> = (0..=nodes).map(|_| random_c(&mut rng)).collect();
        let states: Vec<FourierState> = values
            .iter()
            .zip(&times)
            .map(|(v, &t)| {
                let mut q = vec![C64::new(0.0, 0.0); n];
                q[k - 1] = *v;
                FourierState::from_sine(q).with_time(t)
            })
            .collect();
        let forcing = ForcingHistory::fourier(times.clone(), states).unwrap();
        let t = rng.gen_range(0.25 * t_end..t_end);
        let got = match duhamel(Flow::Navier, &forcing, t).unwrap() {
            DuhamelState::Fourier(s) => s.sine()[k - 1],
            _ => unreachable!(),
        };
        // Reference: piecewise-linear forcing, integrated interval by interval.
        let omega = navier_frequency(k);
        let mut y = C64::new(0.0, 0.0);
        for j in 0..nodes {
            let (a, b) = (times[j], times[j + 1].min(t));
            if a >= t {
                break;
            }
            let (fa, fb, ta, tb) = (values[j], values[j + 1], times[j], times[j + 1]);
            let lin = move |s: f64| fa + (fb - fa) * ((s - ta) / (tb - ta));
            y = dopri(omega, &lin, a, b, y, 1e-13);
        }
        worst = worst.max((got - y).norm());
    }
    outcome(worst <= 1e-8, format!("max abs deviation {worst:.2e} over 50 histories (limit 1e-8)"))
}

fn beta_table() -> Outcome {
    let n = 10_000;
    let table = BetaTable::new(n);
    let mut mismatches = 0;
    for k in 1..=n {
        let kp = k as f64 * PI;
        let c = kp.cos();
        let i = |v: f64| C64::new(0.0, v);
        let expect = [
            i(-kp.powi(3) - 6.0 * kp * (c + 1.0)),
            i(12.0 * (kp - 1.0)),
            i(-2.0 * kp * (c + 2.0)),
            i(kp.powi(2) + 6.0 * (c - 1.0)),
        ];
        let got = [table.beta01[k - 1], table.beta02[k - 1], table.beta11[k - 1], table.beta12[k - 1]];
        for (a, b) in expect.iter().zip(&got) {
            if a.re.to_bits() != b.re.to_bits() || a.im.to_bits() != b.im.to_bits() {
                mismatches += 1;
            }
        }
    }
    let p = PI;
    let i = |v: f64| C64::new(0.0, v);
    let spots = [
        (beta01(1), i(-p.powi(3))),
        (beta02(1), i(12.0 * (p - 1.0))),
        (beta01(2), i(-8.0 * p.powi(3) - 24.0 * p)),
        (beta02(2), i(12.0 * (2.0 * p - 1.0))),
        (beta11(1), i(-2.0 * p)),
        (beta12(1), i(p * p - 12.0)),
        (beta11(2), i(-12.0 * p)),
        (beta12(2), i(4.0 * p * p)),
    ];
    let spot_err = spots.iter().map(|(a, b)| (a - b).norm() / b.norm()).fold(0.0, f64::max);
    outcome(
        mismatches == 0 && spot_err < 1e-15,
        format!("{mismatches} bitwise mismatches for k ≤ 10⁴, spot relative error {spot_err:.1e}"),
    )
}

fn lambda4() -> Outcome {
    let r = count_lambda4(200).unwrap();
    outcome(
        r.max_multiplicity <= 3,
        format!("max nonzero-bucket multiplicity {} at {:?} (limit 3)", r.max_multiplicity, r.argmax),
    )
}

fn optimality() -> Outcome {
    let grid = [1, 2, 4, 8, 16, 32, 64];
    let run = optimality_run(0.6, 3.4, 0, &grid).unwrap();
    let growth = run.ratio_at(64).unwrap() / run.ratio_at(4).unwrap();
    let control = optimality_run(0.75, 3.6, 0, &[32, 64]).unwrap();
    let control_growth = control.ratio_at(64).unwrap() / control.ratio_at(32).unwrap() - 1.0;
    outcome(
        growth > 1.2 && run.bound_holds() && control_growth <= 0.05,
        format!(
            "ratio(64)/ratio(4) = {growth:.3} (> 1.2), lower bound termwise: {}, control growth {:.2}% (≤ 5%)",
            run.bound_holds(),
            100.0 * control_growth
        ),
    )
}

fn picard_contraction() -> Outcome {
    let n = 64;
    let q: Vec<C64> = (1..=n)
        .map(|k| C64::new(1.0 / (k as f64).powi(3), 0.5 / (k as f64).powi(4)))
        .collect();
    let norm = FourierState::from_sine(q.clone()).h_norm(1.0);
    let q: Vec<C64> = q.iter().map(|c| c * (1e-3 / norm)).collect();
    let mut spec = ProblemSpec::new(Family::Navier);
    spec.s = 0.9;
    spec.p = 3.0;
    spec.lambda = 1.0;
    spec.modes = n;
    spec.horizon = 0.1;
    spec.dt = 1e-4;
    spec.initial = InitialData::SineModes(q);
    let rec = match picard_navier(&spec) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("solver error: {e}")),
    };
    let d = &rec.diagnostics;
    let m0 = rec.l2_norm(0).powi(2);
    let drift = (0..rec.states.len())
        .map(|j| (rec.l2_norm(j).powi(2) - m0).abs() / m0)
        .fold(0.0, f64::max);
    outcome(
        d.converged && d.iterations <= 8 && d.max_contraction() <= 0.5 && drift <= 1e-4,
        format!(
            "{} iterations (≤ 8), max contraction {:.2e} (≤ ½), T* = {}, relative mass drift {drift:.2e} (≤ 1e-4)",
            d.iterations,
            d.max_contraction(),
            d.existence_time
        ),
    )
}

fn dirichlet_pipeline() -> Outcome {
    // Part 1: periodic traces against the r-series.
    let (odd, even) = odd_even_extend(|x| C64::new((1.0 - x) * (1.0 + 2.0 * x * x), 0.3 * x), 32).unwrap();
    let tr = dirichlet_traces(&odd, &even).unwrap();
    let per0 = odd.add(&even).unwrap();
    let mut trace_err: f64 = 0.0;
    for t in [0.0, 0.013, 0.37, 0.9] {
        let st = propagate_periodic(&per0, t);
        let v = reconstruct(&st, &[0.0, 1.0]);
        let d = reconstruct_derivative(&st, &[0.0, 1.0], 1);
        for (a, r) in [(v[0], &tr.r1), (v[1], &tr.r2), (d[0], &tr.r3), (d[1], &tr.r4)] {
            trace_err = trace_err.max((a - r.eval(t)).norm() / (1.0 + a.norm()));
        }
    }
    // Part 2: linear solve, recovered h₁ and h₃.
    let h1 = smooth_trace();
    let h3 = BoundaryTrace::from_series([(1, C64::new(0.3, 0.0)), (2, C64::new(-0.3, 0.0))]);
    let mut e1 = Vec::new();
    let mut e3 = Vec::new();
    for n in [16, 32, 64, 128] {
        let mut spec = ProblemSpec::new(Family::Dirichlet);
        spec.lambda = 0.0;
        spec.modes = n;
        spec.horizon = TRACE_PERIOD;
        spec.dt = TRACE_PERIOD / 200.0;
        spec.snapshots = 201;
        spec.boundary.left = h1.clone();
        spec.boundary.left_aux = h3.clone();
        let rec = match picard_dirichlet(&spec) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("solver error: {e}")),
        };
        e1.push(trace_error(&rec, |j| rec.boundary[j].left, &h1));
        e3.push(trace_error(&rec, |j| rec.boundary[j].left_aux, &h3));
    }
    let (r1, r3) = (ratios(&e1), ratios(&e3));
    let pass = trace_err <= 1e-10 && r1.iter().chain(&r3).all(|&r| r >= 1.3);
    outcome(
        pass,
        format!(
            "trace identity {trace_err:.1e} (≤ 1e-10); h₁ errors [{}] ratios [{}]; h₃ errors [{}] ratios [{}] (each ≥ 1.3)",
            sci(&e1),
            fixed(&r1),
            sci(&e3),
            fixed(&r3)
        ),
    )
}

fn bisect(k: usize) -> f64 {
    let f = |m: f64| m.cos() * m.cosh() - 1.0;
    let c = (k as f64 + 0.5) * PI;
    let (mut a, mut b) = (c - 0.5, c + 0.5);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn clamped_basis() -> Outcome {
    let basis = ClampedBasis::new(32).unwrap();
    let root_err = (1..=2).map(|k| (basis.mu(k) - bisect(k)).abs()).fold(0.0, f64::max);
    let rule = CompositeRule::new(0.0, 1.0, 256, 12);
    let vals: Vec<Vec<f64>> = (1..=32)
        .map(|k| rule.nodes.iter().map(|&x| basis.eval(k, x, 0)).collect())
        .collect();
    let mut gram_err: f64 = 0.0;
    for a in 0..32 {
        for b in a..32 {
            let g: f64 = (0..rule.len()).map(|i| rule.weights[i] * vals[a][i] * vals[b][i]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            gram_err = gram_err.max((g - target).abs());
        }
    }
    outcome(
        root_err <= 1e-9 && gram_err <= 1e-8,
        format!("μ₁, μ₂ vs bisection {root_err:.1e} (≤ 1e-9), Gram deviation {gram_err:.1e} (≤ 1e-8)"),
    )
}

fn kato() -> Outcome {
    let cfg = RegularitySweep::default();
    let rows = kato_sweep(&cfg).unwrap();
    let worst = rows.iter().map(|r| (r.median - r.predicted).abs()).fold(0.0, f64::max);
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("s={} i={}: {:.3} vs {:.3}", r.s, r.order, r.median, r.predicted))
        .collect();
    outcome(
        worst <= 0.15 && rows.iter().all(|r| r.flagged < r.samples.len() + r.flagged),
        format!("max |median − (s+3−i)/4| = {worst:.3} (≤ 0.15); {}", table.join("; ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("1 isometry", isometry, Duration::from_secs(5)),
        ("2 navier boundary recovery", navier_recovery, Duration::from_secs(60)),
        ("3 duhamel oracle", duhamel_oracle, Duration::from_secs(10)),
        ("4 beta table exactness", beta_table, Duration::from_secs(60)),
        ("5 lambda4 counting", lambda4, Duration::from_secs(5)),
        ("6 optimality counterexample", optimality, Duration::from_secs(10)),
        ("7 picard contraction", picard_contraction, Duration::from_secs(120)),
        ("8 dirichlet pipeline", dirichlet_pipeline, Duration::from_secs(120)),
        ("9 clamped basis", clamped_basis, Duration::from_secs(5)),
        ("10 kato smoothing sweep", kato, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {name}: {} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
