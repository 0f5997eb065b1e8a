//! Experiment orchestration and artifact emission.
//!
//! Every experiment first produces an in-memory [`Report`]; nothing touches
//! the disk until the computation has finished, so a failed or rejected run
//! never leaves half-written tables behind.

use std::path::Path;

use bihns_core::lab::fit::median;
use bihns_core::lab::{
    count_lambda4, identity_checks, kato_sweep, optimality_run, tail_bound_spotcheck, trace_regularity_r, RunKind,
};
use bihns_core::nonlinear::{picard_dirichlet, picard_navier, Family, SolutionRecord};
use bihns_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    Experiment, IdentitiesConfig, KatoConfig, Lambda4Config, OptimalityConfig, RunConfig, SolveConfig, TracesConfig,
};

/// A CSV table. The anchor names the property the table supports and is
/// repeated in a trailing `anchor` column.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub anchor: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, anchor: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Two-column `x,y` table for external plotting.
    fn plot(name: impl Into<String>, anchor: impl Into<String>, points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut t = Self::new(name, anchor, &["x", "y"]);
        for (x, y) in points {
            t.push(vec![num(x), num(y)]);
        }
        t
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(self.header.iter().map(String::as_str).chain(["anchor"]))?;
        for row in &self.rows {
            w.write_record(row.iter().map(String::as_str).chain([self.anchor.as_str()]))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Shortest round-trip representation with `.` as decimal separator,
/// switching to exponent form for very small or large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn cplx(z: C64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }
}

/// Result of one experiment, before emission.
#[derive(Clone, Debug)]
pub struct Report {
    pub tables: Vec<Table>,
    pub plots: Vec<Table>,
    pub checks: Vec<Check>,
    pub results: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Run the configured experiment.
pub fn execute(cfg: &RunConfig) -> bihns_core::Result<Report> {
    match &cfg.experiment {
        Experiment::Solve(c) => solve(c),
        Experiment::KatoSweep(c) => kato(c),
        Experiment::Optimality(c) => optimality(c),
        Experiment::Lambda4(c) => lambda4(c),
        Experiment::Identities(c) => identities(c),
        Experiment::Traces(c) => traces(c, cfg.seed),
    }
}

/// Write the report's artifacts into `cfg.out`. Returns the file names written.
pub fn emit(cfg: &RunConfig, report: &Report) -> std::io::Result<Vec<String>> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let to_io = |e: csv::Error| std::io::Error::new(std::io::ErrorKind::Other, e);
    if cfg.emit.csv {
        for t in &report.tables {
            files.push((format!("{}.csv", t.name), t.to_csv().map_err(to_io)?));
        }
    }
    if cfg.emit.plot {
        for t in &report.plots {
            files.push((format!("{}.csv", t.name), t.to_csv().map_err(to_io)?));
        }
    }
    if cfg.emit.json {
        let mut names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
        names.push("summary.json".into());
        let summary = json!({
            "mode": cfg.mode.name(),
            "seed": cfg.seed,
            "pass": report.passed(),
            "checks": report.checks,
            "results": report.results,
            "artifacts": names,
        });
        let mut text = serde_json::to_vec_pretty(&summary)?;
        text.push(b'\n');
        files.push(("summary.json".into(), text));
    }
    write_all(&cfg.out, &files)?;
    Ok(files.into_iter().map(|(n, _)| n).collect())
}

/// Record a runtime failure as `error.json`.
pub fn emit_error(cfg: &RunConfig, err: &bihns_core::Error) -> std::io::Result<()> {
    let record = json!({
        "mode": cfg.mode.name(),
        "seed": cfg.seed,
        "pass": false,
        "error": err.to_string(),
        "kind": format!("{err:?}").split(|c: char| !c.is_alphanumeric()).next().unwrap_or(""),
    });
    let mut text = serde_json::to_vec_pretty(&record)?;
    text.push(b'\n');
    write_all(&cfg.out, &[("error.json".into(), text)])
}

fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in files {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn solve(c: &SolveConfig) -> bihns_core::Result<Report> {
    let spec = &c.spec;
    let rec = match spec.family {
        Family::Navier => picard_navier(spec)?,
        Family::Dirichlet => picard_dirichlet(spec)?,
    };
    let xs: Vec<f64> = (0..c.grid_points).map(|j| j as f64 / (c.grid_points - 1) as f64).collect();

    let mut field = Table::new("field", "solution:u(x,t)", &["t", "x", "u_re", "u_im"]);
    let mut norms = Table::new("norms", "solution:l2-norm-history", &["t", "l2_norm"]);
    let mut finite = true;
    let l2: Vec<f64> = (0..rec.times.len()).map(|j| rec.l2_norm(j)).collect();
    for (j, &t) in rec.times.iter().enumerate() {
        for (u, &x) in rec.eval(j, &xs).into_iter().zip(&xs) {
            finite &= u.re.is_finite() && u.im.is_finite();
            let [re, im] = cplx(u);
            field.push(vec![num(t), num(x), re, im]);
        }
        finite &= l2[j].is_finite();
        norms.push(vec![num(t), num(l2[j])]);
    }

    let (value_err, aux_err, boundary) = boundary_table(&rec, c);
    let d = &rec.diagnostics;
    let mut checks = vec![
        Check::new(
            "picard_converged",
            d.converged,
            format!(
                "{} iterations, residual {}, max contraction {}",
                d.iterations,
                sci(d.fixed_point_residual),
                sci(d.max_contraction())
            ),
        ),
        Check::new("finite_output", finite, "all sampled values finite".into()),
        Check::new(
            "boundary_values",
            value_err <= c.value_tol,
            format!("max |u − h| at x = 0, 1: {} (≤ {})", sci(value_err), sci(c.value_tol)),
        ),
    ];
    if let Some(tol) = c.aux_tol {
        let what = match spec.family {
            Family::Navier => "u_xx",
            Family::Dirichlet => "u_x",
        };
        checks.push(Check::new(
            "boundary_aux",
            aux_err <= tol,
            format!("max |{what} − h| at x = 0, 1: {} (≤ {})", sci(aux_err), sci(tol)),
        ));
    }
    let plots = vec![Table::plot(
        "plot_l2_norm",
        "solution:l2-norm-history",
        rec.times.iter().copied().zip(l2.iter().copied()),
    )];
    let results = json!({
        "family": spec.family,
        "existence_time": d.existence_time,
        "requested_horizon": spec.horizon,
        "contraction_factors": d.contraction_factors,
        "diagnostics": d,
        "boundary_value_error": value_err,
        "boundary_aux_error": aux_err,
    });
    Ok(Report {
        tables: vec![field, norms, boundary],
        plots,
        checks,
        results,
    })
}

fn boundary_table(rec: &SolutionRecord, c: &SolveConfig) -> (f64, f64, Table) {
    let b = &c.spec.boundary;
    let mut table = Table::new(
        "boundary",
        "boundary-recovery:traces-at-x=0,1",
        &[
            "t",
            "left_re",
            "left_im",
            "left_data_re",
            "left_data_im",
            "right_re",
            "right_im",
            "right_data_re",
            "right_data_im",
            "left_aux_re",
            "left_aux_im",
            "left_aux_data_re",
            "left_aux_data_im",
            "right_aux_re",
            "right_aux_im",
            "right_aux_data_re",
            "right_aux_data_im",
        ],
    );
    let (mut value_err, mut aux_err) = (0.0f64, 0.0f64);
    for s in &rec.boundary {
        let data = [b.left.eval(s.t), b.right.eval(s.t), b.left_aux.eval(s.t), b.right_aux.eval(s.t)];
        let got = [s.left, s.right, s.left_aux, s.right_aux];
        value_err = value_err.max((got[0] - data[0]).norm()).max((got[1] - data[1]).norm());
        aux_err = aux_err.max((got[2] - data[2]).norm()).max((got[3] - data[3]).norm());
        let mut row = vec![num(s.t)];
        for (g, h) in got.iter().zip(&data) {
            row.extend(cplx(*g));
            row.extend(cplx(*h));
        }
        table.push(row);
    }
    (value_err, aux_err, table)
}

fn kato(c: &KatoConfig) -> bihns_core::Result<Report> {
    let rows = kato_sweep(&c.sweep)?;
    let anchor = "kato-smoothing:(s+3-i)/4";
    let mut sweep = Table::new(
        "sweep",
        anchor,
        &["s", "order", "predicted", "median", "abs_error", "unflagged", "flagged", "free_flow"],
    );
    let mut samples = Table::new("sweep_samples", anchor, &["s", "order", "sample", "exponent"]);
    let mut worst = 0.0f64;
    let mut all_have_samples = true;
    for r in &rows {
        let err = (r.median - r.predicted).abs();
        worst = if err.is_nan() { f64::NAN } else { worst.max(err) };
        all_have_samples &= !r.samples.is_empty();
        sweep.push(vec![
            num(r.s),
            r.order.to_string(),
            num(r.predicted),
            num(r.median),
            num(err),
            r.samples.len().to_string(),
            r.flagged.to_string(),
            r.free_flow.to_string(),
        ]);
        for (j, v) in r.samples.iter().enumerate() {
            samples.push(vec![num(r.s), r.order.to_string(), j.to_string(), num(*v)]);
        }
    }
    let plots = c
        .sweep
        .orders
        .iter()
        .map(|&i| {
            Table::plot(
                format!("plot_sweep_order{i}"),
                anchor,
                rows.iter().filter(|r| r.order == i).map(|r| (r.s, r.median)),
            )
        })
        .collect();
    let checks = vec![
        Check::new(
            "median_matches_prediction",
            worst <= c.tolerance,
            format!("max |median − (s+3−i)/4| = {worst:.3} (≤ {})", c.tolerance),
        ),
        Check::new(
            "unflagged_samples",
            all_have_samples,
            "every (s, i) cell keeps at least one sample with r² > 0.5".into(),
        ),
    ];
    let results = json!({ "config": c.sweep, "rows": rows });
    Ok(Report {
        tables: vec![sweep, samples],
        plots,
        checks,
        results,
    })
}

fn optimality(c: &OptimalityConfig) -> bihns_core::Result<Report> {
    let run = optimality_run(c.alpha, c.beta, c.order, &c.n_grid)?;
    let anchor = format!("optimality:ratio-growth-below-alpha=(3-{})/4", c.order);
    let mut table = Table::new(
        "ratios",
        anchor.clone(),
        &[
            "n",
            "solution_norm",
            "trace_norm",
            "ratio",
            "monotone",
            "time_averaged",
            "lower_bound",
            "termwise",
        ],
    );
    let mut prev: Option<f64> = None;
    for r in &run.rows {
        let monotone = prev.map_or(true, |p| r.ratio > p);
        prev = Some(r.ratio);
        table.push(vec![
            r.n.to_string(),
            num(r.solution_norm),
            num(r.trace_norm),
            num(r.ratio),
            monotone.to_string(),
            num(r.time_averaged),
            num(r.lower_bound),
            r.termwise.to_string(),
        ]);
    }
    let first = run.rows.first().map(|r| r.ratio).unwrap_or(f64::NAN);
    let last = run.rows.last().map(|r| r.ratio).unwrap_or(f64::NAN);
    let mut checks = vec![Check::new(
        "lower_bound",
        run.bound_holds(),
        "time-averaged ‖u‖² dominates the lower bound termwise".into(),
    )];
    match run.kind {
        RunKind::Counterexample => {
            let growth = last / first;
            checks.push(Check::new(
                "ratio_growth",
                growth >= c.min_growth,
                format!("ratio(last)/ratio(first) = {growth:.4} (≥ {})", c.min_growth),
            ));
        }
        RunKind::BoundednessCheck => {
            let drift = match run.rows.len() {
                0 | 1 => 0.0,
                n => run.rows[n - 1].ratio / run.rows[n - 2].ratio - 1.0,
            };
            checks.push(Check::new(
                "ratio_bounded",
                drift <= c.max_drift,
                format!("relative growth over the last two rows {drift:.4} (≤ {})", c.max_drift),
            ));
        }
    }
    let plots = vec![Table::plot(
        "plot_ratio",
        anchor,
        run.rows.iter().map(|r| (r.n as f64, r.ratio)),
    )];
    Ok(Report {
        tables: vec![table],
        plots,
        checks,
        results: json!(run),
    })
}

fn lambda4(c: &Lambda4Config) -> bihns_core::Result<Report> {
    let r = count_lambda4(c.k_max)?;
    let anchor = "lambda4:bucket-multiplicity<=3";
    let mut table = Table::new("histogram", anchor, &["multiplicity", "buckets"]);
    for (m, n) in &r.histogram {
        table.push(vec![m.to_string(), n.to_string()]);
    }
    let checks = vec![Check::new(
        "max_multiplicity",
        r.max_multiplicity <= c.max_multiplicity,
        format!(
            "largest bucket {} at {:?} (≤ {}), diagonal bucket {} excluded",
            r.max_multiplicity, r.argmax, c.max_multiplicity, r.diagonal
        ),
    )];
    let plots = vec![Table::plot(
        "plot_histogram",
        anchor,
        r.histogram.iter().map(|(&m, &n)| (m as f64, n as f64)),
    )];
    let results = json!({
        "k_max": r.k_max,
        "max_multiplicity": r.max_multiplicity,
        "argmax": [r.argmax.0.to_string(), r.argmax.1.to_string()],
        "diagonal": r.diagonal,
    });
    Ok(Report {
        tables: vec![table],
        plots,
        checks,
        results,
    })
}

fn identities(c: &IdentitiesConfig) -> bihns_core::Result<Report> {
    let id = identity_checks(&c.a_grid, &c.x_grid, &c.ks);
    let tail = tail_bound_spotcheck(&c.tail_x, &c.tail_lambda, c.tail_alpha)?;
    let anchor = "expansion-identity:partial-sum-residual";
    let mut residuals = Table::new("identity_residuals", anchor, &["k_max", "max_residual"]);
    for &(k, r) in &id.residuals {
        residuals.push(vec![k.to_string(), num(r)]);
    }
    let mut tails = Table::new(
        "tail_bound",
        "tail-bound:x^(a-1)(1+lambda^(1/4))^(a-1)",
        &["x", "lambda", "value", "bound_shape", "ratio", "flagged"],
    );
    for p in &tail.points {
        tails.push(vec![
            num(p.x),
            num(p.lambda),
            num(p.value),
            num(p.bound_shape),
            num(p.value / p.bound_shape),
            p.flagged.to_string(),
        ]);
    }
    let checks = vec![
        Check::new(
            "residual_decreasing",
            id.monotone,
            format!(
                "residuals {}",
                id.residuals
                    .iter()
                    .map(|(k, r)| format!("K={k}: {}", sci(*r)))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ),
        Check::new(
            "exponential_form",
            id.sina_error <= c.exp_tol,
            format!("max relative deviation {} (≤ {})", sci(id.sina_error), sci(c.exp_tol)),
        ),
        Check::new(
            "tail_constant",
            tail.constant.is_finite() && tail.constant > 0.0,
            format!("fitted constant {}", sci(tail.constant)),
        ),
    ];
    let plots = vec![Table::plot(
        "plot_identity_residual",
        anchor,
        id.residuals.iter().map(|&(k, r)| (k as f64, r)),
    )];
    Ok(Report {
        tables: vec![residuals, tails],
        plots,
        checks,
        results: json!({ "identity": id, "tail": tail }),
    })
}

/// Smooth seeded data `x²(1−x)² g(x)`, where `g` has eight cosine and sine
/// modes with `k⁻³` decay and uniform complex coefficients.
fn random_data(seed: u64, count: usize, grid: usize) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs: Vec<(C64, C64)> = (0..8)
                .map(|k| {
                    let w = (1.0 + k as f64).powi(-3);
                    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
                    (c(), c())
                })
                .collect();
            (0..=grid)
                .map(|j| {
                    let x = j as f64 / grid as f64;
                    let bump = (x * (1.0 - x)).powi(2);
                    bump * coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| {
                            let (s, c) = (k as f64 * std::f64::consts::PI * x).sin_cos();
                            a * c + b * s
                        })
                        .sum::<C64>()
                })
                .collect()
        })
        .collect()
}

fn traces(c: &TracesConfig, seed: u64) -> bihns_core::Result<Report> {
    let data = c.explicit_data().unwrap_or_else(|| random_data(seed, c.ensemble, c.grid));
    let rep = trace_regularity_r(&data, &c.s_grid, c.modes, c.epsilon)?;
    let anchor = "trace-regularity:r1..r4";
    let mut constants = Table::new(
        "trace_constants",
        anchor,
        &[
            "sample", "s", "norm_r1", "norm_r2", "norm_r3", "norm_r4", "rhs_even", "rhs_odd", "c1", "c2", "c3", "c4",
        ],
    );
    for r in &rep.rows {
        let mut row = vec![r.sample.to_string(), num(r.s)];
        row.extend(r.norms.iter().map(|v| num(*v)));
        row.extend([num(r.rhs_even), num(r.rhs_odd)]);
        row.extend(r.constants.iter().map(|v| num(*v)));
        constants.push(row);
    }
    let mut book = Table::new(
        "bookkeeping",
        "trace-bookkeeping:(s+3)/8<s,s-1/2<s,(s+10)/8<s",
        &["s", "first", "second", "third", "all"],
    );
    for b in &rep.bookkeeping {
        book.push(vec![
            num(b.s),
            b.first.to_string(),
            b.second.to_string(),
            b.third.to_string(),
            b.all().to_string(),
        ]);
    }
    let finite = rep.rows.iter().all(|r| r.constants.iter().all(|v| v.is_finite()));
    let checks = vec![Check::new(
        "finite_constants",
        finite,
        format!("max constants {:?}", rep.max_constants.map(sci)),
    )];
    let per_s = c.s_grid.iter().map(|&s| {
        let vals: Vec<f64> = rep
            .rows
            .iter()
            .filter(|r| r.s == s)
            .flat_map(|r| r.constants)
            .collect();
        (s, median(&vals).unwrap_or(f64::NAN))
    });
    let plots = vec![Table::plot("plot_trace_constants", anchor, per_s)];
    Ok(Report {
        tables: vec![constants, book],
        plots,
        checks,
        results: json!(rep),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_rfc4180_with_trailing_anchor() {
        let mut t = Table::new("t", "a:b,c", &["x", "z_re", "z_im"]);
        let [re, im] = cplx(C64::new(0.5, -2.0));
        t.push(vec![num(1e-20), re, im]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "x,z_re,z_im,anchor\r\n1e-20,0.5,-2,\"a:b,c\"\r\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -7.25e-300, 1e21] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn random_data_is_seeded() {
        let a = random_data(3, 2, 16);
        assert_eq!(a, random_data(3, 2, 16));
        assert_ne!(a, random_data(4, 2, 16));
        assert_eq!(a[0].len(), 17);
    }
}
