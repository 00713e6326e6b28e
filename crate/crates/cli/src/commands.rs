//! The verbs. Each returns the files it produced plus a short summary; the
//! caller owns all writing.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use billiard_core::beta::{compare_spectra, beta3_bound_report, physical_beta, Verdict};
use billiard_core::billiard::{area_jacobian, reversibility_defect, step_lifted, twist_certificate, PhasePoint};
use billiard_core::geometry::CLOSURE_TOL;
use billiard_core::normal_form::{circle_zeta_scaled, normal_form, NormalFormOptions, CONSTRAINT_TOL};
use billiard_core::orbits::{fit_odd_powers, OrbitOptions, SpectrumEntry};
use billiard_core::series::Rational;
use rayon::prelude::*;

use crate::config::{Backend, Domain, Job};
use crate::svg::{range, Plot};
use crate::sweep;
use crate::table::{num, Table};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Output {
    /// `(file name, contents)` in a fixed order.
    pub files: Vec<(String, String)>,
    pub summary: String,
    /// False when a check failed; the process exits nonzero.
    pub success: bool,
}

impl Output {
    fn ok(summary: String, files: Vec<(String, String)>) -> Self {
        Self { files, summary, success: true }
    }
}

pub fn domain(d: &Domain) -> Output {
    let p = &d.profile;
    let c = &d.curve;
    let (a1, b1) = p.closure_defect();
    let (min_r, at) = p.min_radius();
    let turning = c.total_turning();
    let mut s = String::new();
    let _ = writeln!(s, "domain: {}", d.name);
    let _ = writeln!(s, "harmonics: {}", p.harmonics());
    let _ = writeln!(s, "samples: {}", d.spec.n_samples);
    let _ = writeln!(s, "closure: a1 = {a1:.3e}, b1 = {b1:.3e} (limit {CLOSURE_TOL:.0e})");
    let _ = writeln!(s, "convexity: min r = {min_r:.6e} at phi = {at:.6}");
    let _ = writeln!(s, "raw length: {:.15e}", c.raw_length());
    let _ = writeln!(s, "perimeter after scaling: {:.15e}", c.measured_perimeter());
    let _ = writeln!(s, "integral of 1/rho: {turning:.15e} (2 pi gap {:.3e})", (turning - TAU).abs());
    let _ = writeln!(s, "integral of rho^(-2/3): {:.15e}", c.lazutkin_integral());
    if let Some(e) = d.truncation_error {
        let _ = writeln!(s, "preset truncation error: {e:.3e}");
    }
    Output::ok(s, Vec::new())
}

fn orbit_row(e: &SpectrumEntry, per_iterate: bool) -> Vec<String> {
    let q = e.q as f64;
    match &e.result {
        Ok(r) => vec![
            e.p.to_string(),
            e.q.to_string(),
            num(e.p as f64 / q),
            num(if per_iterate { r.action / q } else { r.action }),
            num(r.el_residual),
            r.iterations.to_string(),
            r.converged.to_string(),
            String::new(),
        ],
        Err(err) => vec![
            e.p.to_string(),
            e.q.to_string(),
            num(e.p as f64 / q),
            String::new(),
            String::new(),
            String::new(),
            "false".into(),
            err.to_string(),
        ],
    }
}

/// `(1/q, β(1/q))` for the converged `p = 1`, `q ≥ 3` entries.
fn fit_samples(entries: &[SpectrumEntry]) -> Vec<(f64, f64)> {
    entries
        .iter()
        .filter(|e| e.p == 1 && e.q >= 3)
        .filter_map(|e| e.length().map(|l| (1.0 / e.q as f64, l / e.q as f64)))
        .collect()
}

pub fn beta(d: &Domain, job: &Job) -> Output {
    let pool = sweep::pool(job.jobs);
    let entries = sweep::spectrum(&pool, &d.curve, job.q_max);
    let mut table = Table::new(&["p", "q", "omega", "beta", "el_residual", "iterations", "converged", "error"]);
    for e in &entries {
        table.push(orbit_row(e, true));
    }
    let failed = entries.iter().filter(|e| e.result.is_err()).count();

    let n = job.order / 2 + 1;
    let mut coeffs = Table::new(&["provenance", "degree", "value", "ok", "note"]);
    match physical_beta(&d.curve, job.order, &NormalFormOptions::default()) {
        Ok(b) => {
            for (i, v) in b.coeffs_physical.iter().enumerate() {
                coeffs.push(vec!["normal_form".into(), (2 * i + 1).to_string(), num(*v), "true".into(), String::new()]);
            }
        }
        Err(err) => coeffs.push(vec!["normal_form".into(), String::new(), String::new(), "false".into(), err.to_string()]),
    }
    let samples = fit_samples(&entries);
    match fit_odd_powers(&samples, n) {
        Ok(f) => {
            let note = format!("{} samples, rms {:.3e}, condition {:.3e}", samples.len(), f.residual, f.condition);
            for (i, v) in f.coeffs.iter().enumerate() {
                coeffs.push(vec!["variational_fit".into(), (2 * i + 1).to_string(), num(*v), "true".into(), note.clone()]);
            }
        }
        Err(err) => coeffs.push(vec!["variational_fit".into(), String::new(), String::new(), "false".into(), err.to_string()]),
    }
    let integral = d.curve.lazutkin_integral();
    coeffs.push(vec!["quadrature".into(), "3".into(), num(integral.powi(3) / 24.0), "true".into(), String::new()]);

    let summary = format!(
        "{}: {} rotations up to q = {}, {} failed; coefficients through degree {}\n",
        d.name,
        entries.len(),
        job.q_max,
        failed,
        2 * n - 1
    );
    Output::ok(summary, vec![("beta.csv".into(), table.to_csv()), ("beta_coeffs.csv".into(), coeffs.to_csv())])
}

pub fn normal_form_cmd(d: &Domain, job: &Job) -> anyhow::Result<Output> {
    let mut coeffs = Table::new(&["degree", "value", "exact", "backend"]);
    let mut ledger = Table::new(&[
        "k",
        "k_next",
        "mean_f0",
        "symplectic_residual",
        "zeta_parity_residual",
        "order_residual",
        "mirror_residual",
        "discarded_energy",
        "ok",
    ]);
    let nf = normal_form(&d.curve, job.order, &NormalFormOptions::default())?;
    match job.backend {
        Backend::Float => {
            for (i, c) in nf.c_coeffs.iter().enumerate() {
                coeffs.push(vec![(2 * i + 3).to_string(), num(*c), String::new(), "float".into()]);
            }
        }
        Backend::Rational => {
            if !d.is_circle() {
                anyhow::bail!("the rational backend is only available for the circle");
            }
            // c_{2n+1} = [η^{2n+1}] arcsin η · (π/2)^{2n}.
            let exact = circle_zeta_scaled::<Rational>(job.order)?;
            for n in 1..=nf.c_coeffs.len() {
                let r = exact.coeff(2 * n + 1);
                let value = *r.numer() as f64 / *r.denom() as f64 * (PI / 2.0).powi(2 * n as i32);
                coeffs.push(vec![(2 * n + 1).to_string(), num(value), format!("{r} * (pi/2)^{}", 2 * n), "rational".into()]);
            }
        }
    }
    let mut worst = 0.0f64;
    for r in &nf.ledger {
        let ok = r.symplectic_residual < CONSTRAINT_TOL && r.zeta_parity_residual < CONSTRAINT_TOL;
        worst = worst.max(r.symplectic_residual).max(r.zeta_parity_residual);
        ledger.push(vec![
            r.k.to_string(),
            r.k_next.to_string(),
            num(r.mean_f0),
            num(r.symplectic_residual),
            num(r.zeta_parity_residual),
            num(r.order_residual),
            num(r.mirror_residual),
            num(r.discarded_energy),
            ok.to_string(),
        ]);
    }
    let summary = format!("{}: {} steps, C1 = {:.15e}, worst constraint residual {worst:.3e}\n", d.name, nf.ledger.len(), nf.c1);
    Ok(Output::ok(summary, vec![("nf_coeffs.csv".into(), coeffs.to_csv()), ("nf_ledger.csv".into(), ledger.to_csv())]))
}

pub fn spectrum(d: &Domain, job: &Job) -> Output {
    let entries = sweep::spectrum(&sweep::pool(job.jobs), &d.curve, job.q_max);
    let mut table = Table::new(&["p", "q", "omega", "length", "el_residual", "iterations", "converged", "error"]);
    for e in &entries {
        table.push(orbit_row(e, false));
    }
    let failed = entries.iter().filter(|e| e.result.is_err()).count();
    let summary = format!("{}: {} orbits up to q = {}, {failed} failed\n", d.name, entries.len(), job.q_max);
    Output::ok(summary, vec![("spectrum.csv".into(), table.to_csv())])
}

pub fn compare(a: &Domain, b: &Domain, job: &Job) -> Output {
    let pool = sweep::pool(job.jobs);
    let sa = sweep::spectrum(&pool, &a.curve, job.q_max);
    let sb = sweep::spectrum(&pool, &b.curve, job.q_max);
    let report = compare_spectra(&sa, &sb, job.tol);
    let verdict = match report.verdict {
        Verdict::Indistinguishable => "indistinguishable".to_string(),
        Verdict::DistinguishedAt { p, q, gap } => format!("distinguished at {p}/{q} (gap {gap:.3e})"),
        Verdict::Inconclusive { failed } => format!("inconclusive ({failed} entries failed)"),
    };
    let summary = format!(
        "{} vs {}: {verdict}\ncompared {} entries up to q = {}, max gap {:.3e}, tolerance {:.1e}\n",
        a.name, b.name, report.compared, job.q_max, report.max_gap, job.tol
    );
    Output::ok(summary, Vec::new())
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Phase grid `s = i/10`, `v = π(j + ½)/10`.
fn phase_grid() -> Vec<PhasePoint> {
    (0..10)
        .flat_map(|i| (0..10).map(move |j| PhasePoint { s: i as f64 / 10.0, v: PI * (j as f64 + 0.5) / 10.0 }))
        .collect()
}

fn geometry_checks(d: &Domain) -> Vec<Check> {
    let p = &d.profile;
    let c = &d.curve;
    let (a1, b1) = p.closure_defect();
    let (min_r, at) = p.min_radius();
    let perimeter = c.measured_perimeter();
    let turning = c.total_turning();
    vec![
        check("closure", a1.abs().max(b1.abs()) <= CLOSURE_TOL, format!("a1 = {a1:.3e}, b1 = {b1:.3e}")),
        check("convexity", min_r > 0.0, format!("min r = {min_r:.6e} at phi = {at:.4}")),
        check("perimeter", (perimeter - 1.0).abs() < 1e-12, format!("{perimeter:.15}")),
        check("turning", (turning - TAU).abs() < 1e-8, format!("gap {:.3e}", (turning - TAU).abs())),
    ]
}

fn map_checks(d: &Domain, pool: &rayon::ThreadPool) -> Vec<Check> {
    let c = &d.curve;
    let grid = phase_grid();
    let results: Vec<_> = pool.install(|| {
        grid.par_iter().map(|&p| (reversibility_defect(c, p), area_jacobian(c, p, 1e-6))).collect()
    });
    let mut rev = 0.0f64;
    let mut area = 0.0f64;
    let mut failures = 0;
    for (r, a) in results {
        match (r, a) {
            (Ok(r), Ok(a)) => {
                rev = rev.max(r);
                area = area.max((a - 1.0).abs());
            }
            _ => failures += 1,
        }
    }
    let mut twist = f64::INFINITY;
    for i in 0..20 {
        for d_bar in [0.05, 0.15, 0.3, 0.5] {
            let x = i as f64 / 20.0;
            match twist_certificate(c, x, x + d_bar) {
                Ok(t) => twist = twist.min(t.value),
                Err(_) => failures += 1,
            }
        }
    }
    vec![
        check("reversibility", failures == 0 && rev < 1e-8, format!("max defect {rev:.3e} on a 10x10 grid")),
        check("area preservation", failures == 0 && area < 1e-6, format!("max |det - 1| {area:.3e}")),
        check("twist", failures == 0 && twist > 0.0, format!("min -d12 h {twist:.3e}")),
    ]
}

fn normal_form_checks(d: &Domain, job: &Job) -> Vec<Check> {
    let mut out = Vec::new();
    match normal_form(&d.curve, job.order, &NormalFormOptions::default()) {
        Ok(nf) => {
            let symp = nf.ledger.iter().map(|r| r.symplectic_residual).fold(0.0, f64::max);
            let parity = nf.ledger.iter().map(|r| r.zeta_parity_residual).fold(0.0, f64::max);
            let steps = nf.ledger.len();
            out.push(check("symplectic constraint", symp < CONSTRAINT_TOL, format!("max {symp:.3e} over {steps} steps")));
            out.push(check("odd zeta", parity < CONSTRAINT_TOL, format!("max even coefficient {parity:.3e}")));
        }
        Err(e) => out.push(check("normal form", false, e.to_string())),
    }
    match physical_beta(&d.curve, 3, &NormalFormOptions::default()) {
        Ok(b) => {
            let want = d.curve.lazutkin_integral().powi(3) / 24.0;
            let rel = (b.coeffs_physical[1] - want).abs() / want;
            out.push(check("beta3 quadrature", rel < 1e-8, format!("relative gap {rel:.3e}")));
        }
        Err(e) => out.push(check("beta3 quadrature", false, e.to_string())),
    }
    out
}

fn orbit_checks(d: &Domain, job: &Job, pool: &rayon::ThreadPool) -> Vec<Check> {
    let c = &d.curve;
    let entries = sweep::spectrum(pool, c, job.q_max);
    let failed = entries.iter().filter(|e| e.result.is_err()).count();
    let worst = entries.iter().filter_map(|e| e.result.as_ref().ok()).map(|r| r.el_residual).fold(0.0, f64::max);
    let mut out =
        vec![check("orbits converge", failed == 0, format!("{} rotations, {failed} failed, max residual {worst:.3e}", entries.len()))];

    let mut points: Vec<(f64, f64)> =
        entries.iter().filter_map(|e| e.length().map(|l| (e.p as f64 / e.q as f64, l / e.q as f64))).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let second = points
        .windows(3)
        .map(|w| {
            let ((a, fa), (b, fb), (e, fe)) = (w[0], w[1], w[2]);
            fa + (fe - fa) * (b - a) / (e - a) - fb
        })
        .fold(f64::INFINITY, f64::min);
    out.push(check("beta convexity", second >= -1e-8, format!("min chord excess {second:.3e}")));

    let options = OrbitOptions { allow_multiples: true, ..OrbitOptions::default() };
    let base: Vec<(i64, i64)> = vec![(1, 3), (1, 4), (2, 5)];
    let multiples: Vec<(i64, i64)> = base.iter().map(|&(p, q)| (2 * p, 2 * q)).collect();
    let lows = sweep::orbits(pool, c, &base, &OrbitOptions::default());
    let highs = sweep::orbits(pool, c, &multiples, &options);
    let mut gap = 0.0f64;
    let mut ok = true;
    for (l, h) in lows.iter().zip(&highs) {
        match (l.length(), h.length()) {
            (Some(a), Some(b)) => gap = gap.max((a / l.q as f64 - b / h.q as f64).abs()),
            _ => ok = false,
        }
    }
    out.push(check("multiple covers", ok && gap < 1e-8, format!("max gap {gap:.3e}")));

    let n = job.order / 2 + 1;
    let fit = fit_odd_powers(&fit_samples(&entries), n);
    let nf = physical_beta(c, job.order, &NormalFormOptions::default());
    match (fit, nf) {
        (Ok(f), Ok(b)) => {
            let (x, y) = (f.coeffs[1], b.coeffs_physical[1]);
            let rel = (x - y).abs() / y.abs();
            out.push(check("beta3 cross-path", rel < 1e-2, format!("fit {x:.8}, normal form {y:.8}, relative {rel:.3e}")));
        }
        (f, b) => {
            let detail = [f.err().map(|e| e.to_string()), b.err().map(|e| e.to_string())].into_iter().flatten().collect::<Vec<_>>();
            out.push(check("beta3 cross-path", false, detail.join("; ")));
        }
    }
    out
}

fn inequality_check(d: &Domain) -> Check {
    let r = beta3_bound_report(&d.curve, None);
    let circle = d.is_circle();
    check(
        "beta3 bound",
        r.derived_bound_holds && (!circle || r.tight),
        format!(
            "pi^2/6 - beta3 = {:.3e}{}; literal combination beta3 + pi^2 beta1 with beta1 = +1: {:.3e}",
            r.derived_gap,
            if r.tight { " (tight)" } else { "" },
            r.literal_combination
        ),
    )
}

/// Runs every invariant; `success` is false when any fails.
pub fn check_suite(d: &Domain, job: &Job) -> Output {
    let pool = sweep::pool(job.jobs);
    let mut checks = geometry_checks(d);
    checks.extend(map_checks(d, &pool));
    checks.extend(normal_form_checks(d, job));
    checks.extend(orbit_checks(d, job, &pool));
    checks.push(inequality_check(d));

    let mut table = Table::new(&["check", "passed", "detail"]);
    let mut summary = String::new();
    for c in &checks {
        let _ = writeln!(summary, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        table.push(vec![c.name.into(), c.passed.to_string(), c.detail.clone()]);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(summary, "{}: {} checks, {failed} failed", d.name, checks.len());
    Output { files: vec![("check.csv".into(), table.to_csv())], summary, success: failed == 0 }
}

/// Orbit of `(s, v)` in `(s mod 1, cos v)`, stopping at the first failed step.
fn phase_orbit(d: &Domain, s: f64, v: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let (mut s, mut v) = (s, v);
    for _ in 0..n {
        out.push((s.rem_euclid(1.0), v.cos()));
        match step_lifted(&d.curve, s, v) {
            Ok((t, w)) => {
                s = t.rem_euclid(1.0);
                v = w;
            }
            Err(_) => break,
        }
    }
    out
}

pub fn plot(d: &Domain, job: &Job) -> Output {
    let pool = sweep::pool(job.jobs);
    let entries = sweep::spectrum(&pool, &d.curve, job.q_max);
    let points: Vec<(f64, f64)> =
        entries.iter().filter_map(|e| e.length().map(|l| (e.p as f64 / e.q as f64, l / e.q as f64))).collect();
    let series = |coeffs: &[f64]| -> Vec<(f64, f64)> {
        (0..=200)
            .map(|i| {
                let h = 0.5 * i as f64 / 200.0;
                (h, coeffs.iter().enumerate().map(|(n, c)| c * h.powi(2 * n as i32 + 1)).sum())
            })
            .collect()
    };
    let n = job.order / 2 + 1;
    let fit = fit_odd_powers(&fit_samples(&entries), n).ok().map(|f| series(&f.coeffs));
    let nf = physical_beta(&d.curve, job.order, &NormalFormOptions::default()).ok().map(|b| series(&b.coeffs_physical));
    let y = range(points.iter().map(|p| p.1).chain(std::iter::once(0.0)));
    let mut beta_plot = Plot::new(&format!("beta on rationals: {}", d.name), (0.0, 0.5), y).labels("rotation number", "beta");
    if let Some(f) = &fit {
        beta_plot.line(f, "#d62728", Some("odd-power fit"));
    }
    if let Some(f) = &nf {
        beta_plot.line(f, "#2ca02c", Some("normal-form expansion"));
    }
    beta_plot.dots(&points, "#1f77b4", 2.5, Some("minimizing orbits"));

    let starts: Vec<(f64, f64)> = (0..6)
        .flat_map(|i| (1..=12).map(move |j| (i as f64 / 6.0, PI * j as f64 / 13.0)))
        .collect();
    let orbits: Vec<Vec<(f64, f64)>> =
        pool.install(|| starts.par_iter().map(|&(s, v)| phase_orbit(d, s, v, 400)).collect());
    let mut phase = Plot::new(&format!("phase portrait: {}", d.name), (0.0, 1.0), (-1.0, 1.0)).labels("s", "cos v");
    for o in &orbits {
        phase.dots(o, "#333333", 0.7, None);
    }

    let summary = format!("{}: beta.svg ({} orbits), phase.svg ({} trajectories)\n", d.name, points.len(), orbits.len());
    Output::ok(summary, vec![("beta.svg".into(), beta_plot.render()), ("phase.svg".into(), phase.render())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn circle() -> Domain {
        Domain::parse("cos_coeffs = [1.0]\nn_samples = 128\n", Path::new("circle.toml")).unwrap()
    }

    #[test]
    fn rows_never_hold_nan() {
        let e = SpectrumEntry { p: 1, q: 2, result: Err(billiard_core::Error::OrderViolation) };
        let row = orbit_row(&e, true);
        assert_eq!(row[6], "false");
        assert!(row.iter().all(|f| !f.contains("NaN")));
    }

    #[test]
    fn rational_backend_needs_the_circle() {
        let job = Job { backend: Backend::Rational, ..Job::default() };
        let out = normal_form_cmd(&circle(), &job).unwrap();
        assert!(out.files[0].1.contains("1/6 * (pi/2)^2"));
        let e = Domain::parse("preset = \"ellipse\"\naxis_ratio = 0.8\nn_samples = 256\n", Path::new("e.toml")).unwrap();
        assert!(normal_form_cmd(&e, &job).is_err());
    }

    #[test]
    fn phase_orbit_stays_on_the_circle_level() {
        let o = phase_orbit(&circle(), 0.1, 0.7, 50);
        assert_eq!(o.len(), 50);
        assert!(o.iter().all(|(_, c)| (c - 0.7f64.cos()).abs() < 1e-10));
    }
}
