//! Deterministic adaptive integration.
//!
//! All integrals in the crate go through a global-adaptive bisection
//! scheme built on the 7/15-point Gauss-Kronrod pair, with the error
//! estimate rescaling used by QUADPACK. No randomness is involved and the
//! subdivision order is fixed, so identical inputs give bit-identical
//! outputs.
//!
//! - [`integrate_adaptive`]: proper integrals over `[a, b]`.
//! - [`integrate_improper`]: integrals over the real line, through the
//!   tangent map `u = tan(theta)`.
//! - [`integrate_iterated`]: nested integrals with outer-dependent limits.
//! - [`line_integral`]: `∫ dr · F(r)` along a [`Trajectory3D`].
//!
//! Each entry point has a `try_` variant taking a fallible integrand so
//! errors raised while evaluating (a path leaving its sample range, a
//! nested integral failing) propagate unchanged.

use nalgebra::Vector3;
use thiserror::Error;

use crate::error::Error;
use crate::trajectories::{Motion3D, TimeWindow, Trajectory3D, TrajectoryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand is not finite at x = {at}")]
    NonFiniteEvaluation { at: f64 },

    #[error("integral did not converge: value {value}, error estimate {error_estimate} after {subdivisions} subdivisions")]
    NonConvergent {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("invalid quadrature specification: {0}")]
    InvalidSpec(String),

    #[error("all-time integral requested without a certified decay hypothesis")]
    UncertifiedDecay,
}

/// Tolerances for one integral.
///
/// The integral is accepted once the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|, 64 eps * ∫|f|)`. The last term is the
/// round-off floor: no bisection can resolve an error below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, QuadratureError> {
        let spec = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0) {
            return Err(QuadratureError::InvalidSpec(
                "tolerances must be non-negative".into(),
            ));
        }
        if !(self.rel_tol > 0.0 || self.abs_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec(
                "at least one of rel_tol, abs_tol must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Spec for an inner level of a nested integral.
    pub fn inner(&self) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol * 0.1,
            abs_tol: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Threshold the error estimate was compared against.
    pub tolerance: f64,
}

impl IntegralResult {
    fn zero() -> Self {
        IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
            tolerance: 0.0,
        }
    }

    /// Fail unless converged.
    pub fn require_converged(self, subdivisions: usize) -> Result<Self, QuadratureError> {
        if self.converged {
            Ok(self)
        } else {
            Err(QuadratureError::NonConvergent {
                value: self.value,
                error_estimate: self.error_estimate,
                subdivisions,
            })
        }
    }
}

// Kronrod abscissae on [0, 1); odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

fn gk15<E, F>(f: &mut F, a: f64, b: f64) -> Result<Segment, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64, E> {
        let y = f(x)?;
        if !y.is_finite() {
            return Err(QuadratureError::NonFiniteEvaluation { at: x }.into());
        }
        Ok(y)
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = eval(center - dx)?;
        let hi = eval(center + dx)?;
        f1[j] = lo;
        f2[j] = hi;
        res_k += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }

    let width = half.abs();
    let value = res_k * half;
    res_abs *= width;
    res_asc *= width;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * f64::min(1.0, (200.0 * error / res_asc).powf(1.5));
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(roundoff);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    })
}

/// Whether halving keeps every Kronrod node strictly inside the halves.
fn splittable(s: &Segment) -> bool {
    s.b - s.a > 2000.0 * f64::EPSILON * s.a.abs().max(s.b.abs())
}

/// Adaptive integral of a fallible integrand over `[a, b]` (either order).
///
/// Stops when the error criterion of [`QuadratureSpec`] holds or when
/// `max_subdivisions` segments exist; in the latter case the result is
/// returned with `converged = false`.
pub fn try_integrate_adaptive<E, F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadratureError::InvalidSpec(format!(
            "integration limits must be finite, got [{a}, {b}]"
        ))
        .into());
    }
    if a == b {
        return Ok(IntegralResult::zero());
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut segments = vec![gk15(&mut f, lo, hi)?];
    let mut evaluations = 15;
    let tolerance_for = |segments: &[Segment]| {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let l1: f64 = segments.iter().map(|s| s.abs_value).sum();
        let tol = spec
            .abs_tol
            .max(spec.rel_tol * value.abs())
            .max(64.0 * f64::EPSILON * l1);
        (value, tol)
    };

    loop {
        let (_, tol) = tolerance_for(&segments);
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= tol || segments.len() >= spec.max_subdivisions {
            break;
        }
        // worst splittable segment, first index wins ties
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| splittable(s))
            .fold(None, |best: Option<(usize, f64)>, (i, s)| match best {
                Some((_, e)) if s.error <= e => best,
                _ => Some((i, s.error)),
            });
        let Some((worst, _)) = worst else {
            // every segment is at machine resolution
            break;
        };
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        let left = gk15(&mut f, seg.a, mid)?;
        let right = gk15(&mut f, mid, seg.b)?;
        evaluations += 30;
        segments[worst] = left;
        segments.push(right);
    }

    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let (value, tol) = tolerance_for(&segments);
    let error: f64 = segments.iter().map(|s| s.error).sum();
    Ok(IntegralResult {
        value: sign * value,
        error_estimate: error,
        evaluations,
        converged: error <= tol,
        tolerance: tol,
    })
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_adaptive<F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_adaptive(|x| Ok::<f64, QuadratureError>(f(x)), a, b, spec)
}

/// `∫ f(t) dt` over the whole real line with `t = center + scale * tan(θ)`.
///
/// `center` and `scale` should put the bulk of the integrand near `θ = 0`
/// (a peak position and width). Non-convergence is an error here.
pub fn try_integrate_improper_scaled<E, F>(
    mut f: F,
    center: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    if !(scale > 0.0 && scale.is_finite() && center.is_finite()) {
        return Err(QuadratureError::InvalidSpec(format!(
            "improper integral needs a finite positive scale, got {scale}"
        ))
        .into());
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let result = try_integrate_adaptive::<E, _>(
        |theta: f64| {
            let (s, c) = theta.sin_cos();
            if c == 0.0 {
                return Ok(0.0);
            }
            let t = center + scale * s / c;
            Ok(f(t)? * scale / (c * c))
        },
        -half_pi,
        half_pi,
        spec,
    )?;
    Ok(result.require_converged(spec.max_subdivisions)?)
}

pub fn integrate_improper<F>(mut f: F, spec: &QuadratureSpec) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_improper_scaled(|x| Ok::<f64, QuadratureError>(f(x)), 0.0, 1.0, spec)
}

/// Maps enclosing variables to `(lower, upper)`.
pub type LimitFn<'a> = Box<dyn Fn(&[f64]) -> (f64, f64) + 'a>;

/// Limits of one level of an iterated integral.
pub enum Limits<'a> {
    Fixed(f64, f64),
    /// Limits computed from the values of the enclosing variables,
    /// outermost first.
    Dependent(LimitFn<'a>),
}

impl<'a> Limits<'a> {
    pub fn dependent(f: impl Fn(&[f64]) -> (f64, f64) + 'a) -> Self {
        Limits::Dependent(Box::new(f))
    }

    fn resolve(&self, outer: &[f64]) -> (f64, f64) {
        match self {
            Limits::Fixed(a, b) => (*a, *b),
            Limits::Dependent(f) => f(outer),
        }
    }
}

/// Maximum nesting depth accepted by [`integrate_iterated`].
pub const MAX_ITERATED_DIMENSION: usize = 3;

#[derive(Default)]
struct NestStats {
    evaluations: usize,
    inner_error: f64,
    inner_converged: bool,
}

fn iterate<E, F>(
    f: &mut F,
    limits: &[Limits<'_>],
    vars: &mut Vec<f64>,
    spec: &QuadratureSpec,
    stats: &mut NestStats,
) -> Result<IntegralResult, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let level = vars.len();
    let (a, b) = limits[level].resolve(vars);
    let width = (b - a).abs();
    if level + 1 == limits.len() {
        let r = try_integrate_adaptive(
            |x| {
                vars.push(x);
                let y = f(vars);
                vars.pop();
                y
            },
            a,
            b,
            spec,
        )?;
        stats.evaluations += r.evaluations;
        return Ok(r);
    }
    let inner_spec = spec.inner();
    let mut level_inner_error: f64 = 0.0;
    let r = try_integrate_adaptive::<E, _>(
        |x| {
            vars.push(x);
            let inner = iterate(f, limits, vars, &inner_spec, stats);
            vars.pop();
            let inner = inner?;
            stats.inner_converged &= inner.converged;
            level_inner_error = level_inner_error.max(inner.error_estimate);
            Ok(inner.value)
        },
        a,
        b,
        spec,
    )?;
    stats.inner_error += level_inner_error * width;
    Ok(r)
}

/// Nested adaptive integral `∫ dx0 ∫ dx1 ... f(x0, x1, ...)` with up to
/// [`MAX_ITERATED_DIMENSION`] levels, outermost first. Inner levels run at
/// a tenth of the outer relative tolerance; the reported error adds the
/// worst inner error times the outer width to the outer estimate.
pub fn try_integrate_iterated<E, F>(
    mut f: F,
    limits: &[Limits<'_>],
    spec: &QuadratureSpec,
) -> Result<IntegralResult, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    if limits.is_empty() || limits.len() > MAX_ITERATED_DIMENSION {
        return Err(QuadratureError::InvalidSpec(format!(
            "iterated integrals support 1..={MAX_ITERATED_DIMENSION} levels, got {}",
            limits.len()
        ))
        .into());
    }
    let mut stats = NestStats {
        inner_converged: true,
        ..Default::default()
    };
    let mut vars = Vec::with_capacity(limits.len());
    let outer = iterate(&mut f, limits, &mut vars, spec, &mut stats)?;
    let error_estimate = outer.error_estimate + stats.inner_error;
    Ok(IntegralResult {
        value: outer.value,
        error_estimate,
        evaluations: stats.evaluations.max(outer.evaluations),
        converged: outer.converged && stats.inner_converged,
        tolerance: outer.tolerance,
    })
}

pub fn integrate_iterated<F>(
    mut f: F,
    limits: &[Limits<'_>],
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(&[f64]) -> f64,
{
    try_integrate_iterated(|x| Ok::<f64, QuadratureError>(f(x)), limits, spec)
}

/// Scalar integral over a path's window, dispatching on its kind.
pub(crate) fn integrate_over_window<F>(
    f: F,
    window: TimeWindow,
    passage: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<IntegralResult, Error>
where
    F: FnMut(f64) -> Result<f64, Error>,
{
    match window {
        TimeWindow::Bounded { start, end } => try_integrate_adaptive(f, start, end, spec),
        TimeWindow::Improper { decay_certified } => {
            if !decay_certified {
                return Err(QuadratureError::UncertifiedDecay.into());
            }
            try_integrate_improper_scaled(f, passage.0, passage.1, spec)
        }
    }
}

/// `∫_P dr · F(r)` along `traj`, computed as `∫ dt v(t) · F(r(t))`.
///
/// Fails with [`Error::CollisionGuard`] when the path comes closer than
/// `r_min_guard` to the origin.
pub fn line_integral<F>(
    field: F,
    traj: &Trajectory3D,
    r_min_guard: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, Error>
where
    F: Fn(&Vector3<f64>) -> Vector3<f64>,
{
    let closest = traj.closest_approach();
    if closest <= r_min_guard {
        return Err(Error::CollisionGuard {
            distance: closest,
            guard: r_min_guard,
        });
    }
    let guarded = |t: f64| {
        let r = traj.position(t)?;
        let distance = r.norm();
        if distance <= r_min_guard {
            return Err(Error::CollisionGuard {
                distance,
                guard: r_min_guard,
            });
        }
        Ok(r)
    };
    let Motion3D::Polyline(samples) = traj.motion() else {
        return integrate_over_window(
            |t| Ok(traj.velocity(t)?.dot(&field(&guarded(t)?))),
            traj.window(),
            traj.passage_scale(),
            spec,
        );
    };
    // piecewise: dr/dt is the exact slope of each interpolation segment
    let (a, b) = traj.window().bounds().ok_or(TrajectoryError::ImproperWindow)?;
    let mut breaks = vec![a];
    breaks.extend(samples.iter().map(|s| s.0).filter(|&t| t > a && t < b));
    breaks.push(b);
    let mut total = IntegralResult::zero();
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let slope = (traj.position(t1)? - traj.position(t0)?) / (t1 - t0);
        let piece = try_integrate_adaptive(|t| Ok::<f64, Error>(slope.dot(&field(&guarded(t)?))), t0, t1, spec)?;
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
        total.tolerance += piece.tolerance;
        total.converged &= piece.converged;
    }
    Ok(total)
}
