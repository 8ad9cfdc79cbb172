//! Acceptance checks shared by the `selftest` command and the test suite.
//!
//! Each check recomputes its quantities from scratch and compares them
//! with closed forms or independent oracles at fixed tolerances. Random
//! inputs come from a fixed-seed generator, so outcomes are reproducible.

use std::f64::consts::{E, PI};
use std::time::Instant;

use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{C, FOUR_PI_EPS0};
use crate::dce::{self, OscillationParams, CLOSED_FORM_COEFFICIENT};
use crate::error::Result;
use crate::mirror_phases::{self, MirrorScenario};
use crate::quadrature::{integrate_adaptive, integrate_improper, IntegralResult, QuadratureSpec};
use crate::sagnac::{self, SpinningParticle};
use crate::species::{bundled_species_db, find_species, AtomSpecies};
use crate::trajectories::{TimeWindow, Trajectory1D, Trajectory3D};

const SEED: u64 = 0x5eed_ca5e;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    /// `[PASS] 3 title: detail`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

/// Accumulates sub-checks of one criterion.
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, id: u8, title: &'static str, result: Result<()>) -> CriterionOutcome {
        let mut parts = self.notes;
        if let Err(e) = result {
            parts.push(format!("error: {e}"));
            return CriterionOutcome {
                id,
                title,
                passed: false,
                detail: parts.join("; "),
            };
        }
        parts.extend(self.failures.iter().map(|f| format!("failed: {f}")));
        CriterionOutcome {
            id,
            title,
            passed: self.failures.is_empty(),
            detail: parts.join("; "),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn rb() -> AtomSpecies {
    find_species(&bundled_species_db(), "Rb87-D2")
        .expect("bundled database has Rb87-D2")
        .clone()
}

fn bounded(a: f64, b: f64) -> Result<TimeWindow> {
    Ok(TimeWindow::bounded(a, b)?)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Straight-line quantum Sagnac phase, numeric vs closed form.
pub fn criterion_1() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let db = bundled_species_db();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let spec = QuadratureSpec::default();
        let mut worst: f64 = 0.0;
        let mut slowest: f64 = 0.0;
        for i in 0..10 {
            let species = &db[rng.gen_range(0..db.len())];
            let radius: f64 = rng.gen_range(1e-9..3e-9);
            let omega_mag = 10f64.powf(rng.gen_range(3.0..7.0));
            let rotation = Rotation3::from_scaled_axis(Vector3::from_fn(|_, _| rng.gen_range(-PI..PI)));
            let particle = SpinningParticle::new(
                FOUR_PI_EPS0 * radius.powi(3),
                rng.gen_range(1e16..3e16),
                rng.gen_range(0.0..1e14),
                rotation * Vector3::new(0.0, 0.0, omega_mag),
                radius,
            )?;
            let y = rng.gen_range(5e-9..1e-8) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let v = 10f64.powf(rng.gen_range(0.0..3.0));
            let traj = Trajectory3D::straight_line(
                rotation * Vector3::new(0.0, y, 0.0),
                rotation * Vector3::new(v, 0.0, 0.0),
                TimeWindow::improper(true),
            )?;
            let start = Instant::now();
            let numeric = sagnac::sagnac_phase(species, &particle, &traj, &spec)?;
            let elapsed = start.elapsed().as_secs_f64();
            let closed = sagnac::sagnac_phase_straightline(species, &particle, y)?;
            let e = rel(numeric.value.abs(), closed.abs());
            worst = worst.max(e);
            slowest = slowest.max(elapsed);
            c.check(e <= 1e-6, format!("tuple {i}: relative deviation {e:.3e}"));
            c.check(numeric.value == 0.0 || numeric.value.signum() == -closed.signum(), format!("tuple {i}: orientation"));
            c.check(elapsed < 1.0, format!("tuple {i}: {elapsed:.3} s"));
        }
        c.note(format!("10 tuples, worst relative deviation {worst:.2e} (tol 1e-6), slowest {slowest:.3} s"));
        Ok(())
    })();
    c.finish(1, "straight-line Sagnac phase", r)
}

/// Twenty integrals with known values: `(name, value, exact)`.
pub fn benchmark_integrals(spec: &QuadratureSpec) -> Vec<(&'static str, std::result::Result<IntegralResult, String>, f64)> {
    type F = fn(f64) -> f64;
    let finite: [(&str, F, f64, f64, f64); 15] = [
        ("x^2 on [0,1]", |x| x * x, 0.0, 1.0, 1.0 / 3.0),
        ("sin on [0,pi]", f64::sin, 0.0, PI, 2.0),
        ("exp on [0,1]", f64::exp, 0.0, 1.0, E - 1.0),
        ("1/(1+x^2) on [0,1]", |x| 1.0 / (1.0 + x * x), 0.0, 1.0, PI / 4.0),
        ("sqrt on [0,1]", f64::sqrt, 0.0, 1.0, 2.0 / 3.0),
        ("ln on [0,1]", f64::ln, 0.0, 1.0, -1.0),
        ("cos on [0,pi/2]", f64::cos, 0.0, PI / 2.0, 1.0),
        ("1/x on [1,e]", |x| 1.0 / x, 1.0, E, 1.0),
        ("x^5-3x^2 on [-1,2]", |x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1.5),
        ("sin^2 on [0,2pi]", |x| x.sin().powi(2), 0.0, 2.0 * PI, PI),
        ("x exp(-x) on [0,50]", |x| x * (-x).exp(), 0.0, 50.0, 1.0 - 51.0 * (-50f64).exp()),
        ("1/sqrt(1-x^2) on [-1,1]", |x| 1.0 / (1.0 - x * x).sqrt(), -1.0, 1.0, PI),
        ("ln(1+x) on [0,1]", f64::ln_1p, 0.0, 1.0, 2.0 * 2f64.ln() - 1.0),
        ("exp(cos x) on [0,2pi]", |x| x.cos().exp(), 0.0, 2.0 * PI, 7.954_926_521_012_845),
        ("x^3 on [0,2]", |x| x * x * x, 0.0, 2.0, 4.0),
    ];
    let improper: [(&str, F, f64); 5] = [
        ("exp(-x^2) on R", |x| (-x * x).exp(), PI.sqrt()),
        ("(1+x^2)^-4 on R", |x| (1.0 + x * x).powi(-4), 5.0 * PI / 16.0),
        ("1/(1+x^2) on R", |x| 1.0 / (1.0 + x * x), PI),
        ("sech^2 on R", |x| 1.0 / x.cosh().powi(2), 2.0),
        ("1/(1+x^4) on R", |x| 1.0 / (1.0 + x.powi(4)), PI / 2f64.sqrt()),
    ];
    let mut out = Vec::new();
    for (name, f, a, b, exact) in finite {
        out.push((name, integrate_adaptive(f, a, b, spec).map_err(|e| e.to_string()), exact));
    }
    for (name, f, exact) in improper {
        out.push((name, integrate_improper(f, spec).map_err(|e| e.to_string()), exact));
    }
    out
}

/// Quadrature oracle and error-estimate soundness.
pub fn criterion_2() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let spec = QuadratureSpec::default();
        let r = integrate_improper(|u| (1.0 + u * u).powi(-4), &spec)?;
        let e = (r.value - 5.0 * PI / 16.0).abs();
        c.check(e <= 1e-10, format!("(1+u^2)^-4: error {e:.2e}"));
        let set = benchmark_integrals(&spec);
        let mut sound = 0;
        for (name, res, exact) in &set {
            match res {
                Ok(res) => {
                    let true_err = (res.value - exact).abs();
                    if true_err <= 10.0 * res.error_estimate {
                        sound += 1;
                    } else {
                        c.note(format!("{name}: true error {true_err:.2e} > 10x estimate {:.2e}", res.error_estimate));
                    }
                }
                Err(e) => c.note(format!("{name}: {e}")),
            }
        }
        let fraction = sound as f64 / set.len() as f64;
        c.check(set.len() == 20, "benchmark set has 20 integrals");
        c.check(fraction >= 0.95, format!("sound fraction {fraction:.2}"));
        c.note(format!(
            "5pi/16 error {e:.1e} (tol 1e-10); {sound}/{} benchmark estimates sound (need >= 95%)",
            set.len()
        ));
        Ok(())
    })();
    c.finish(2, "quadrature oracle", r)
}

/// Symmetric two-path Sagnac total.
pub fn criterion_3() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let species = rb();
        let particle = SpinningParticle::new(FOUR_PI_EPS0 * 8e-27, 2e16, 0.0, Vector3::new(0.0, 0.0, 1e5), 2e-9)?;
        let ell = sagnac::ell_omega(&species, &particle)?;
        for y1 in [ell, 2.0 * ell, 7e-9] {
            let total = sagnac::sagnac_total_symmetric(&species, &particle, y1)?;
            let local = sagnac::sagnac_phase_straightline(&species, &particle, y1)?
                - sagnac::sagnac_phase_straightline(&species, &particle, -y1)?;
            let ratio = total.value / local;
            let nonlocal_expected = -9.0 * PI / 16.0 * (ell / y1).powi(6);
            c.check((ratio - 0.7).abs() <= 1e-12, format!("ratio {ratio}"));
            c.check(
                rel(total.breakdown["nonlocal"], nonlocal_expected) <= 1e-12,
                format!("nonlocal {:e} vs {nonlocal_expected:e}", total.breakdown["nonlocal"]),
            );
        }
        let at_ell = sagnac::sagnac_total_symmetric(&species, &particle, ell)?;
        c.check(rel(at_ell.value, 21.0 * PI / 16.0) <= 1e-12, "21pi/16 at y1 = ell");
        c.note(format!(
            "ratio {:.15}, total at ell {:.10} rad",
            at_ell.breakdown["ratio_total_to_local"], at_ell.value
        ));
        Ok(())
    })();
    c.finish(3, "symmetric two-path Sagnac", r)
}

/// Nonlocal mirror phase.
pub fn criterion_4() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let species = rb();
        let spec = QuadratureSpec::default();
        let k = mirror_phases::nonlocal_prefactor(&species)?;
        let (h, v, t) = (1e-7, 1e-5, 1e-3);
        let w = bounded(0.0, t)?;
        let scn = MirrorScenario::new(
            species.clone(),
            vec![Trajectory1D::linear(h, v, w)?, Trajectory1D::linear(h, -v, w)?],
        )?;
        let phi = mirror_phases::nonlocal_phase(&scn, &spec)?;
        let oracle = k * v * t / (4.0 * h * h * h);
        let e = rel(phi.value, oracle);
        c.check(e <= 1e-8, format!("counter-propagating deviation {e:.2e}"));

        let swapped = mirror_phases::nonlocal_phase(&scn.swapped()?, &spec)?;
        let asym = (phi.value + swapped.value).abs();
        c.check(
            asym <= phi.error_estimate + swapped.error_estimate + 1e-15 * phi.value.abs(),
            format!("swap antisymmetry residual {asym:.2e}"),
        );

        let omega = 2.0 * PI * 1e4;
        let cycle = bounded(0.0, 3.0 * 2.0 * PI / omega)?;
        let closed = MirrorScenario::new(
            species,
            vec![
                Trajectory1D::harmonic(2e-7, 5e-8, omega, 0.3, cycle)?,
                Trajectory1D::constant(1.5e-7, cycle)?,
            ],
        )?;
        let cyc = mirror_phases::nonlocal_phase(&closed, &spec.with_abs_tol(1e-15))?;
        c.check(cyc.value.abs() <= 1e-15, format!("closed cycle {:.2e} rad", cyc.value));
        c.note(format!(
            "counter-propagating rel. deviation {e:.2e} (tol 1e-8); closed cycle {:.1e} rad (tol 1e-15); swap residual {asym:.1e}",
            cyc.value.abs()
        ));
        Ok(())
    })();
    c.finish(4, "nonlocal mirror phase", r)
}

/// Motional mirror phase: second-order residual scaling and size relative
/// to the quasi-static phase.
pub fn criterion_5() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let species = rb();
        let spec = QuadratureSpec::default();
        let (h, t) = (1e-7, 1e-15);
        let w = bounded(0.0, t)?;
        let mut residuals = Vec::new();
        let mut worst_ratio: f64 = 0.0;
        for i in 0..5 {
            let beta = 1e-4 * 10f64.powf(i as f64 / 4.0);
            let scn = MirrorScenario::new(species.clone(), vec![Trajectory1D::linear(h, beta * C, w)?])?;
            let mot = mirror_phases::motional_phase_mirror(&scn, 0, &spec)?;
            let qs = mirror_phases::quasi_static_phase(&scn, 0, &spec)?;
            let lead = mot.breakdown["first_order"];
            residuals.push((beta, (mot.value - lead).abs()));
            let ratio = (mot.value / qs.value).abs() / beta;
            worst_ratio = worst_ratio.max(ratio);
            c.check(ratio <= 10.0, format!("linear beta {beta:.1e}: |mot/qs| = {ratio:.2} v/c"));
        }
        let slope = log_log_slope(&residuals);
        c.check((slope - 2.0).abs() <= 0.1, format!("residual slope {slope:.4}"));

        let omega = 2.0 * PI * 1e6;
        for amp_frac in [0.1, 0.5] {
            let hw = bounded(0.0, 2.0 * PI / omega)?;
            let path = Trajectory1D::harmonic(h, amp_frac * h, omega, 0.0, hw)?;
            let v_max = amp_frac * h * omega;
            let scn = MirrorScenario::new(species.clone(), vec![path])?;
            let mot = mirror_phases::motional_phase_mirror(&scn, 0, &spec)?;
            let qs = mirror_phases::quasi_static_phase(&scn, 0, &spec)?;
            let ratio = (mot.value / qs.value).abs() / (v_max / C);
            worst_ratio = worst_ratio.max(ratio);
            c.check(ratio <= 10.0, format!("harmonic A/h {amp_frac}: |mot/qs| = {ratio:.2} v/c"));
        }
        c.note(format!(
            "residual slope {slope:.4} (need 2 +/- 0.1); max |mot/qs| = {worst_ratio:.3} v_max/c (bound 10)"
        ));
        Ok(())
    })();
    c.finish(5, "motional mirror phase", r)
}

fn dce_params(a: f64, r_max: f64, omega_cm: f64, direction: Vector3<f64>) -> Result<OscillationParams> {
    OscillationParams::new(r_max, omega_cm, FOUR_PI_EPS0 * a * a * a, direction)
}

/// DCE coefficient, grid constancy, scaling slopes and isotropy.
pub fn criterion_6() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let start = Instant::now();
        let spec = QuadratureSpec::default().with_rel_tol(1e-8);
        let z = Vector3::z();
        let base = dce_params(1.6e-10, 1e-7, 2.0 * PI * 1e5, z)?;
        let res = dce::dce_rate_numeric(&base, &spec)?;
        let dev = rel(res.coefficient, CLOSED_FORM_COEFFICIENT);
        c.check(res.converged, "base rate converged");
        c.check(dev <= 0.05, format!("coefficient deviation {dev:.2e}"));

        let mut grid_worst: f64 = 0.0;
        for r_max in [3e-8, 1e-7, 3e-7] {
            for omega in [2.0 * PI * 1e4, 2.0 * PI * 1e5, 2.0 * PI * 1e6] {
                let p = dce_params(1.6e-10, r_max, omega, z)?;
                let ratio = dce::dce_rate_numeric(&p, &spec)?.gamma_total / dce::dce_rate_closed(&p);
                grid_worst = grid_worst.max((ratio - 1.0).abs());
                c.check((0.95..=1.05).contains(&ratio), format!("grid ratio {ratio}"));
            }
        }

        let rate = |a: f64, r: f64| -> Result<f64> {
            Ok(dce::dce_rate_numeric(&dce_params(a, r, base.omega_cm(), z)?, &spec)?.gamma_total)
        };
        let slope_a = (rate(1.6e-9, 1e-7)? / rate(1.6e-10, 1e-7)?).log10();
        // a and r_max scaled together: a/r_max and ω_cm fixed, v_max × 10
        let slope_v = (rate(1.6e-9, 1e-6)? / rate(1.6e-10, 1e-7)?).log10();
        c.check((slope_a - 6.0).abs() <= 0.01, format!("slope in a {slope_a}"));
        c.check((slope_v - 8.0).abs() <= 0.01, format!("slope in v_max {slope_v}"));

        let mut spread: f64 = 0.0;
        for d in [Vector3::x(), Vector3::new(1.0, 1.0, 1.0), Vector3::new(-0.3, 0.8, 0.2)] {
            let g = dce::dce_rate_numeric(&base.with_direction(d)?, &spec)?.gamma_total;
            spread = spread.max(rel(g, res.gamma_total));
        }
        c.check(spread <= 1e-6, format!("direction spread {spread:.2e}"));
        let elapsed = start.elapsed().as_secs_f64();
        c.check(elapsed <= 600.0, format!("runtime {elapsed:.1} s"));
        c.note(format!(
            "coefficient {:.10e} vs {CLOSED_FORM_COEFFICIENT:.10e} (dev {dev:.1e}, tol 5%); grid max |ratio-1| {grid_worst:.1e}; slopes a {slope_a:.6} v {slope_v:.6} (tol 0.01); isotropy spread {spread:.1e}; {elapsed:.2} s",
            res.coefficient
        ));
        Ok(())
    })();
    c.finish(6, "DCE coefficient and scaling", r)
}

/// Geometric and dynamical behaviour under reparametrization and reversal.
pub fn criterion_7() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let species = rb();
        let spec = QuadratureSpec::default();
        let w = bounded(0.0, 1e-4)?;
        let scn = MirrorScenario::new(
            species.clone(),
            vec![
                Trajectory1D::harmonic(2e-7, 6e-8, 2.0 * PI * 3e3, 0.4, w)?,
                Trajectory1D::linear(1.2e-7, 5e-4, w)?,
            ],
        )?;
        let nl = mirror_phases::nonlocal_phase(&scn, &spec)?.value;
        let qs = mirror_phases::quasi_static_phase(&scn, 0, &spec)?.value;

        let particle = SpinningParticle::new(FOUR_PI_EPS0 * 8e-27, 2e16, 1e13, Vector3::new(0.1, -0.2, 1.0) * 1e5, 2e-9)?;
        let path = Trajectory3D::straight_line(
            Vector3::new(-3e-8, 6e-9, 1e-9),
            Vector3::new(2.0, 0.3, -0.1),
            bounded(0.0, 3e-8)?,
        )?;
        let sg = sagnac::sagnac_phase(&species, &particle, &path, &spec)?.value;

        let mut worst_geo: f64 = 0.0;
        let mut worst_qs: f64 = 0.0;
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = scn.map_paths(|p| p.reparametrize(lambda))?;
            let e1 = rel(mirror_phases::nonlocal_phase(&scaled, &spec)?.value, nl);
            let e2 = rel(sagnac::sagnac_phase(&species, &particle, &path.reparametrize(lambda)?, &spec)?.value, sg);
            let e3 = rel(mirror_phases::quasi_static_phase(&scaled, 0, &spec)?.value, qs / lambda);
            worst_geo = worst_geo.max(e1).max(e2);
            worst_qs = worst_qs.max(e3);
            c.check(e1 <= 1e-8, format!("nonlocal lambda {lambda}: {e1:.2e}"));
            c.check(e2 <= 1e-8, format!("sagnac lambda {lambda}: {e2:.2e}"));
            c.check(e3 <= 1e-10, format!("quasi-static lambda {lambda}: {e3:.2e}"));
        }
        let reversed = scn.map_paths(|p| p.reverse())?;
        let r1 = rel(mirror_phases::nonlocal_phase(&reversed, &spec)?.value, -nl);
        let r2 = rel(sagnac::sagnac_phase(&species, &particle, &path.reverse()?, &spec)?.value, -sg);
        c.check(r1 <= 1e-8, format!("nonlocal reverse {r1:.2e}"));
        c.check(r2 <= 1e-8, format!("sagnac reverse {r2:.2e}"));
        c.note(format!(
            "reparametrization: geometric {worst_geo:.1e} (tol 1e-8), quasi-static 1/lambda {worst_qs:.1e} (tol 1e-10); reversal {:.1e}",
            r1.max(r2)
        ));
        Ok(())
    })();
    c.finish(7, "geometric-phase properties", r)
}

/// Central difference with step `h`.
fn central<F: Fn(f64) -> Result<f64>>(f: F, t: f64, h: f64) -> Result<f64> {
    Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
}

/// Analytic velocities and `Re α_S''` against finite differences.
pub fn criterion_8() -> CriterionOutcome {
    let mut c = Checks::new();
    let r = (|| -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
        let (t0, t1) = (0.0, 1e-3);
        let w = bounded(t0, t1)?;
        let omega = 2.0 * PI * 5e3;
        let harmonic = Trajectory1D::harmonic(3e-7, 1e-7, omega, 0.7, w)?;
        let spacing = 1e-4 / omega;
        let n = ((t1 - t0) / spacing).ceil() as usize;
        let samples = (0..=n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / n as f64;
                Ok((t, harmonic.position(t)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let sampled = Trajectory1D::polyline(samples, w)?;
        let kinds: [(&str, Trajectory1D, f64); 3] = [
            ("constant", Trajectory1D::constant(2e-7, w)?, 1e-6 * (t1 - t0)),
            ("linear", Trajectory1D::linear(2e-7, 1e-4, w)?, 1e-6 * (t1 - t0)),
            ("harmonic", harmonic.clone(), 1e-4 / omega),
        ];
        let mut worst: f64 = 0.0;
        for (name, traj, h) in &kinds {
            let mut bad = 0;
            for _ in 0..100 {
                let t = rng.gen_range(t0 + h..t1 - h);
                let v = traj.velocity(t)?;
                let fd = central(|s| Ok(traj.position(s)?), t, *h)?;
                let e = rel(fd, v);
                worst = worst.max(e);
                bad += (e > 1e-6) as usize;
            }
            c.check(bad == 0, format!("{name}: {bad}/100 points off"));
        }
        let mut bad = 0;
        for _ in 0..100 {
            let t = rng.gen_range(t0 + spacing..t1 - spacing);
            let e = rel(sampled.velocity(t)?, harmonic.velocity(t)?);
            worst = worst.max(e);
            bad += (e > 1e-6) as usize;
        }
        c.check(bad == 0, format!("sampled harmonic: {bad}/100 points off"));

        let line = Trajectory3D::straight_line(Vector3::new(1e-8, -2e-8, 3e-9), Vector3::new(3.0, -1.0, 0.5), w)?;
        let mut bad = 0;
        for _ in 0..100 {
            let t = rng.gen_range(t0 + 1e-9..t1 - 1e-9);
            let v = line.velocity(t)?;
            for i in 0..3 {
                let fd = central(|s| Ok(line.position(s)?[i]), t, 1e-9)?;
                let e = rel(fd, v[i]);
                worst = worst.max(e);
                bad += (e > 1e-6) as usize;
            }
        }
        c.check(bad == 0, format!("straight line: {bad}/300 components off"));

        let mut worst_alpha: f64 = 0.0;
        for gamma in [0.0, 1e14, 3e15] {
            let p = SpinningParticle::new(1e-30, 2e16, gamma, Vector3::z(), 0.0)?;
            let h = 1e-4 * p.omega_s();
            for _ in 0..20 {
                let w0 = rng.gen_range(0.0..0.8) * p.omega_s();
                let f = |x: f64| -> Result<f64> { Ok(sagnac::alpha_s(&p, x)?.re) };
                let fd = (f(w0 + h)? - 2.0 * f(w0)? + f(w0 - h)?) / (h * h);
                let e = rel(fd, sagnac::re_alpha_second(&p, w0)?);
                worst_alpha = worst_alpha.max(e);
                c.check(e <= 1e-6, format!("Re alpha'' at {w0:e}: {e:.2e}"));
            }
        }
        c.note(format!(
            "trajectory velocities worst {worst:.1e}, Re alpha'' worst {worst_alpha:.1e} (tol 1e-6)"
        ));
        Ok(())
    })();
    c.finish(8, "gradient checks", r)
}

/// Criteria 1 through 8 in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..6).map(|i| (i as f64, 3.0 * (i as f64).powf(2.5))).collect();
        assert!((log_log_slope(&pts) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn outcome_line_format() {
        let o = CriterionOutcome {
            id: 4,
            title: "t",
            passed: false,
            detail: "d".into(),
        };
        assert_eq!(o.line(), "[FAIL] 4 t: d");
    }

    #[test]
    fn benchmark_set_size() {
        assert_eq!(benchmark_integrals(&QuadratureSpec::default()).len(), 20);
    }
}
