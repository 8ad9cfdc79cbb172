//! Prescribed centre-of-mass paths.
//!
//! A trajectory is the external parameter that steers the atom-field
//! interaction: every phase and rate in the crate is a functional of
//! `position(t)` and `velocity(t)` over a [`TimeWindow`].
//!
//! One-dimensional paths give the height `z(t)` above a mirror at `z = 0`
//! and must stay strictly positive over their window. Three-dimensional
//! paths give the atom position relative to a particle at the origin.

use nalgebra::{Rotation3, Vector3};
use thiserror::Error;

use crate::constants::C;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("time {t} s is outside the sampled range [{start}, {end}] s")]
    OutOfWindow { t: f64, start: f64, end: f64 },

    #[error("operation requires a bounded time window")]
    ImproperWindow,

    #[error("invalid time window [{start}, {end}]")]
    InvalidWindow { start: f64, end: f64 },

    #[error("path leaves the half-space z > 0: z({t}) = {z} m")]
    NonPositiveHeight { t: f64, z: f64 },

    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("invalid trajectory parameter: {0}")]
    InvalidParameter(String),
}

type Result<T> = std::result::Result<T, TrajectoryError>;

/// Integration window of a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeWindow {
    /// `[start, end]` in seconds.
    Bounded { start: f64, end: f64 },
    /// All time, `(-inf, inf)`. The caller must certify that the integrands
    /// built on this path decay at least as a power law.
    Improper { decay_certified: bool },
}

impl TimeWindow {
    pub fn bounded(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(TrajectoryError::InvalidWindow { start, end });
        }
        Ok(TimeWindow::Bounded { start, end })
    }

    pub fn improper(decay_certified: bool) -> Self {
        TimeWindow::Improper { decay_certified }
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            TimeWindow::Bounded { start, end } => Some((start, end)),
            TimeWindow::Improper { .. } => None,
        }
    }

    pub fn is_improper(&self) -> bool {
        matches!(self, TimeWindow::Improper { .. })
    }

    fn scaled(&self, lambda: f64) -> Self {
        match *self {
            TimeWindow::Bounded { start, end } => TimeWindow::Bounded {
                start: start / lambda,
                end: end / lambda,
            },
            w @ TimeWindow::Improper { .. } => w,
        }
    }
}

/// Round-trip light time `2z/c` between an atom at height `z` and a
/// perfect mirror.
pub fn light_delay(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(TrajectoryError::NonPositiveDistance(z));
    }
    Ok(2.0 * z / C)
}

/// Height profiles `z(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Motion1D {
    Constant { height: f64 },
    /// `z(t) = height + velocity * t`
    Linear { height: f64, velocity: f64 },
    /// `z(t) = center + amplitude * sin(angular_frequency * t + phase)`
    Harmonic {
        center: f64,
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    },
    /// Piecewise-linear interpolation of `(t, z)` samples.
    Polyline(Vec<(f64, f64)>),
}

/// Number of window points checked at construction in addition to the
/// analytic minimum.
const CONSTRUCTION_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory1D {
    motion: Motion1D,
    window: TimeWindow,
    parallel_velocity: Option<f64>,
}

impl Trajectory1D {
    pub fn new(motion: Motion1D, window: TimeWindow) -> Result<Self> {
        let traj = Trajectory1D {
            motion,
            window,
            parallel_velocity: None,
        };
        traj.validate()?;
        Ok(traj)
    }

    pub fn constant(height: f64, window: TimeWindow) -> Result<Self> {
        Self::new(Motion1D::Constant { height }, window)
    }

    pub fn linear(height: f64, velocity: f64, window: TimeWindow) -> Result<Self> {
        Self::new(Motion1D::Linear { height, velocity }, window)
    }

    pub fn harmonic(
        center: f64,
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
        window: TimeWindow,
    ) -> Result<Self> {
        Self::new(
            Motion1D::Harmonic {
                center,
                amplitude,
                angular_frequency,
                phase,
            },
            window,
        )
    }

    pub fn polyline(samples: Vec<(f64, f64)>, window: TimeWindow) -> Result<Self> {
        Self::new(Motion1D::Polyline(samples), window)
    }

    /// Attach the velocity component parallel to the mirror (metadata only;
    /// the 1-D phases do not depend on it).
    pub fn with_parallel_velocity(mut self, v: f64) -> Self {
        self.parallel_velocity = Some(v);
        self
    }

    pub fn motion(&self) -> &Motion1D {
        &self.motion
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn parallel_velocity(&self) -> Option<f64> {
        self.parallel_velocity
    }

    fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(TrajectoryError::InvalidParameter(s.to_string()));
        match &self.motion {
            Motion1D::Constant { height } => {
                if !height.is_finite() {
                    return bad("height must be finite");
                }
            }
            Motion1D::Linear { height, velocity } => {
                if !height.is_finite() || !velocity.is_finite() {
                    return bad("height and velocity must be finite");
                }
                if self.window.is_improper() && *velocity != 0.0 {
                    return bad("a moving linear path crosses the mirror on an unbounded window");
                }
            }
            Motion1D::Harmonic {
                center,
                amplitude,
                angular_frequency,
                phase,
            } => {
                if ![center, amplitude, angular_frequency, phase]
                    .iter()
                    .all(|x| x.is_finite())
                {
                    return bad("harmonic parameters must be finite");
                }
                if *amplitude < 0.0 {
                    return bad("harmonic amplitude must be non-negative");
                }
                if !(*angular_frequency > 0.0) {
                    return bad("harmonic angular frequency must be positive");
                }
                if center - amplitude <= 0.0 {
                    return Err(TrajectoryError::NonPositiveHeight {
                        t: f64::NAN,
                        z: center - amplitude,
                    });
                }
            }
            Motion1D::Polyline(samples) => {
                validate_times(samples.iter().map(|s| s.0), samples.len())?;
                if samples.iter().any(|s| !s.1.is_finite()) {
                    return bad("polyline heights must be finite");
                }
                let (t0, t1) = (samples[0].0, samples[samples.len() - 1].0);
                match self.window {
                    TimeWindow::Improper { .. } => return Err(TrajectoryError::ImproperWindow),
                    TimeWindow::Bounded { start, end } => {
                        if start < t0 || end > t1 {
                            return Err(TrajectoryError::OutOfWindow {
                                t: if start < t0 { start } else { end },
                                start: t0,
                                end: t1,
                            });
                        }
                    }
                }
            }
        }

        let (t_min, z_min) = self.lowest_point();
        if !(z_min > 0.0) {
            return Err(TrajectoryError::NonPositiveHeight { t: t_min, z: z_min });
        }
        if let Some((a, b)) = self.window.bounds() {
            for i in 0..=CONSTRUCTION_SAMPLES {
                let t = a + (b - a) * (i as f64) / (CONSTRUCTION_SAMPLES as f64);
                let z = self.position(t)?;
                if !(z > 0.0) {
                    return Err(TrajectoryError::NonPositiveHeight { t, z });
                }
            }
        }
        Ok(())
    }

    /// Minimum height over the window together with a time at which it
    /// is attained.
    pub fn lowest_point(&self) -> (f64, f64) {
        match (&self.motion, self.window) {
            (Motion1D::Constant { height }, _) => (0.0, *height),
            (Motion1D::Linear { height, .. }, TimeWindow::Improper { .. }) => (0.0, *height),
            (Motion1D::Linear { height, velocity }, TimeWindow::Bounded { start, end }) => {
                let (za, zb) = (height + velocity * start, height + velocity * end);
                if za <= zb {
                    (start, za)
                } else {
                    (end, zb)
                }
            }
            (
                Motion1D::Harmonic {
                    center,
                    amplitude,
                    angular_frequency,
                    phase,
                },
                window,
            ) => {
                let trough = center - amplitude;
                // sin(ωt + φ) = -1 at t_k = (3π/2 - φ + 2πk)/ω
                let first = (1.5 * std::f64::consts::PI - phase) / angular_frequency;
                let period = 2.0 * std::f64::consts::PI / angular_frequency;
                match window {
                    TimeWindow::Improper { .. } => (first, trough),
                    TimeWindow::Bounded { start, end } => {
                        let k = ((start - first) / period).ceil();
                        let tk = first + k * period;
                        if tk <= end {
                            (tk, trough)
                        } else {
                            let za = self.eval_position(start);
                            let zb = self.eval_position(end);
                            if za <= zb {
                                (start, za)
                            } else {
                                (end, zb)
                            }
                        }
                    }
                }
            }
            (Motion1D::Polyline(samples), window) => {
                let (a, b) = window
                    .bounds()
                    .unwrap_or((samples[0].0, samples[samples.len() - 1].0));
                let mut best = (a, self.eval_position(a));
                let zb = self.eval_position(b);
                if zb < best.1 {
                    best = (b, zb);
                }
                for &(t, z) in samples.iter().filter(|s| s.0 > a && s.0 < b) {
                    if z < best.1 {
                        best = (t, z);
                    }
                }
                best
            }
        }
    }

    /// Largest speed over the window.
    pub fn max_speed(&self) -> f64 {
        match &self.motion {
            Motion1D::Constant { .. } => 0.0,
            Motion1D::Linear { velocity, .. } => velocity.abs(),
            Motion1D::Harmonic {
                amplitude,
                angular_frequency,
                ..
            } => amplitude * angular_frequency,
            Motion1D::Polyline(samples) => samples
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
        }
    }

    fn eval_position(&self, t: f64) -> f64 {
        match &self.motion {
            Motion1D::Constant { height } => *height,
            Motion1D::Linear { height, velocity } => height + velocity * t,
            Motion1D::Harmonic {
                center,
                amplitude,
                angular_frequency,
                phase,
            } => center + amplitude * (angular_frequency * t + phase).sin(),
            Motion1D::Polyline(samples) => interpolate(samples, t, |&(t, z)| (t, z)),
        }
    }

    /// Height at time `t`. Analytic kinds extrapolate outside the window;
    /// sampled kinds fail outside their sample range.
    pub fn position(&self, t: f64) -> Result<f64> {
        if let Motion1D::Polyline(samples) = &self.motion {
            check_range(samples.first().unwrap().0, samples.last().unwrap().0, t)?;
        }
        Ok(self.eval_position(t))
    }

    /// Vertical velocity `dz/dt`. Sampled kinds use a central difference
    /// with step `max(1e-6 * span, spacing / 2)`, clamped to the samples.
    pub fn velocity(&self, t: f64) -> Result<f64> {
        match &self.motion {
            Motion1D::Constant { .. } => Ok(0.0),
            Motion1D::Linear { velocity, .. } => Ok(*velocity),
            Motion1D::Harmonic {
                amplitude,
                angular_frequency,
                phase,
                ..
            } => Ok(amplitude * angular_frequency * (angular_frequency * t + phase).cos()),
            Motion1D::Polyline(samples) => {
                let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
                let (lo, hi) = sampled_difference_points(&times, t)?;
                Ok((self.eval_position(hi) - self.eval_position(lo)) / (hi - lo))
            }
        }
    }

    /// `z(t + dt) - z(t)` without cancellation for the analytic kinds.
    pub fn displacement(&self, t: f64, dt: f64) -> Result<f64> {
        match &self.motion {
            Motion1D::Constant { .. } => Ok(0.0),
            Motion1D::Linear { velocity, .. } => Ok(velocity * dt),
            Motion1D::Harmonic {
                amplitude,
                angular_frequency,
                phase,
                ..
            } => {
                // sin(x + d) - sin(x) = 2 cos(x + d/2) sin(d/2)
                let half = 0.5 * angular_frequency * dt;
                Ok(2.0 * amplitude * (angular_frequency * t + phase + half).cos() * half.sin())
            }
            Motion1D::Polyline(_) => Ok(self.position(t + dt)? - self.position(t)?),
        }
    }

    /// Same path traversed `lambda` times faster: `z'(t) = z(lambda t)`.
    pub fn reparametrize(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let motion = match &self.motion {
            Motion1D::Constant { height } => Motion1D::Constant { height: *height },
            Motion1D::Linear { height, velocity } => Motion1D::Linear {
                height: *height,
                velocity: velocity * lambda,
            },
            Motion1D::Harmonic {
                center,
                amplitude,
                angular_frequency,
                phase,
            } => Motion1D::Harmonic {
                center: *center,
                amplitude: *amplitude,
                angular_frequency: angular_frequency * lambda,
                phase: *phase,
            },
            Motion1D::Polyline(samples) => {
                Motion1D::Polyline(samples.iter().map(|&(t, z)| (t / lambda, z)).collect())
            }
        };
        Ok(Trajectory1D {
            motion,
            window: self.window.scaled(lambda),
            parallel_velocity: self.parallel_velocity.map(|v| v * lambda),
        })
    }

    /// Same path traversed backwards over the same window:
    /// `z'(t) = z(start + end - t)`.
    pub fn reverse(&self) -> Result<Self> {
        let (a, b) = self.window.bounds().ok_or(TrajectoryError::ImproperWindow)?;
        let s = a + b;
        let motion = match &self.motion {
            Motion1D::Constant { height } => Motion1D::Constant { height: *height },
            Motion1D::Linear { height, velocity } => Motion1D::Linear {
                height: height + velocity * s,
                velocity: -velocity,
            },
            Motion1D::Harmonic {
                center,
                amplitude,
                angular_frequency,
                phase,
            } => Motion1D::Harmonic {
                center: *center,
                amplitude: *amplitude,
                angular_frequency: *angular_frequency,
                // sin(ψ - ωt) = sin(ωt + π - ψ)
                phase: std::f64::consts::PI - (angular_frequency * s + phase),
            },
            Motion1D::Polyline(samples) => {
                Motion1D::Polyline(samples.iter().rev().map(|&(t, z)| (s - t, z)).collect())
            }
        };
        Ok(Trajectory1D {
            motion,
            window: self.window,
            parallel_velocity: self.parallel_velocity.map(|v| -v),
        })
    }
}

/// Atom positions relative to a particle at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum Motion3D {
    /// `r(t) = origin + velocity * t`
    StraightLine {
        origin: Vector3<f64>,
        velocity: Vector3<f64>,
    },
    Polyline(Vec<(f64, Vector3<f64>)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory3D {
    motion: Motion3D,
    window: TimeWindow,
}

impl Trajectory3D {
    pub fn new(motion: Motion3D, window: TimeWindow) -> Result<Self> {
        match &motion {
            Motion3D::StraightLine { origin, velocity } => {
                if !origin.iter().chain(velocity.iter()).all(|x| x.is_finite()) {
                    return Err(TrajectoryError::InvalidParameter(
                        "straight line parameters must be finite".into(),
                    ));
                }
            }
            Motion3D::Polyline(samples) => {
                validate_times(samples.iter().map(|s| s.0), samples.len())?;
                let (t0, t1) = (samples[0].0, samples[samples.len() - 1].0);
                match window {
                    TimeWindow::Improper { .. } => return Err(TrajectoryError::ImproperWindow),
                    TimeWindow::Bounded { start, end } => {
                        if start < t0 || end > t1 {
                            return Err(TrajectoryError::OutOfWindow {
                                t: if start < t0 { start } else { end },
                                start: t0,
                                end: t1,
                            });
                        }
                    }
                }
            }
        }
        Ok(Trajectory3D { motion, window })
    }

    pub fn straight_line(
        origin: Vector3<f64>,
        velocity: Vector3<f64>,
        window: TimeWindow,
    ) -> Result<Self> {
        Self::new(Motion3D::StraightLine { origin, velocity }, window)
    }

    pub fn polyline(samples: Vec<(f64, Vector3<f64>)>, window: TimeWindow) -> Result<Self> {
        Self::new(Motion3D::Polyline(samples), window)
    }

    pub fn motion(&self) -> &Motion3D {
        &self.motion
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    fn eval_position(&self, t: f64) -> Vector3<f64> {
        match &self.motion {
            Motion3D::StraightLine { origin, velocity } => origin + velocity * t,
            Motion3D::Polyline(samples) => Vector3::from_fn(|i, _| {
                interpolate(samples, t, |(t, r)| (*t, r[i]))
            }),
        }
    }

    pub fn position(&self, t: f64) -> Result<Vector3<f64>> {
        if let Motion3D::Polyline(samples) = &self.motion {
            check_range(samples.first().unwrap().0, samples.last().unwrap().0, t)?;
        }
        Ok(self.eval_position(t))
    }

    pub fn velocity(&self, t: f64) -> Result<Vector3<f64>> {
        match &self.motion {
            Motion3D::StraightLine { velocity, .. } => Ok(*velocity),
            Motion3D::Polyline(samples) => {
                let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
                let (lo, hi) = sampled_difference_points(&times, t)?;
                Ok((self.eval_position(hi) - self.eval_position(lo)) / (hi - lo))
            }
        }
    }

    pub fn reparametrize(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let motion = match &self.motion {
            Motion3D::StraightLine { origin, velocity } => Motion3D::StraightLine {
                origin: *origin,
                velocity: velocity * lambda,
            },
            Motion3D::Polyline(samples) => {
                Motion3D::Polyline(samples.iter().map(|&(t, r)| (t / lambda, r)).collect())
            }
        };
        Ok(Trajectory3D {
            motion,
            window: self.window.scaled(lambda),
        })
    }

    pub fn reverse(&self) -> Result<Self> {
        let (a, b) = self.window.bounds().ok_or(TrajectoryError::ImproperWindow)?;
        let s = a + b;
        let motion = match &self.motion {
            Motion3D::StraightLine { origin, velocity } => Motion3D::StraightLine {
                origin: origin + velocity * s,
                velocity: -velocity,
            },
            Motion3D::Polyline(samples) => {
                Motion3D::Polyline(samples.iter().rev().map(|&(t, r)| (s - t, r)).collect())
            }
        };
        Ok(Trajectory3D {
            motion,
            window: self.window,
        })
    }

    /// Rigid rotation of the path about the origin.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Self {
        let motion = match &self.motion {
            Motion3D::StraightLine { origin, velocity } => Motion3D::StraightLine {
                origin: rotation * origin,
                velocity: rotation * velocity,
            },
            Motion3D::Polyline(samples) => {
                Motion3D::Polyline(samples.iter().map(|&(t, r)| (t, rotation * r)).collect())
            }
        };
        Trajectory3D {
            motion,
            window: self.window,
        }
    }

    /// Smallest distance to the origin over the window.
    pub fn closest_approach(&self) -> f64 {
        match (&self.motion, self.window) {
            (Motion3D::StraightLine { origin, velocity }, window) => {
                let v2 = velocity.norm_squared();
                let mut t_star = if v2 > 0.0 {
                    -origin.dot(velocity) / v2
                } else {
                    0.0
                };
                if let Some((a, b)) = window.bounds() {
                    t_star = t_star.clamp(a, b);
                }
                (origin + velocity * t_star).norm()
            }
            (Motion3D::Polyline(samples), window) => {
                let (a, b) = window.bounds().expect("polyline windows are bounded");
                let mut pts = vec![(a, self.eval_position(a))];
                pts.extend(samples.iter().filter(|s| s.0 > a && s.0 < b).cloned());
                pts.push((b, self.eval_position(b)));
                pts.windows(2)
                    .map(|w| segment_distance_to_origin(&w[0].1, &w[1].1))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Time scale and centre used to map an all-time integral onto a
    /// finite interval: the time of closest approach and the crossing time
    /// `d_min / |v|`.
    pub fn passage_scale(&self) -> (f64, f64) {
        match &self.motion {
            Motion3D::StraightLine { origin, velocity } => {
                let v2 = velocity.norm_squared();
                if v2 == 0.0 {
                    return (0.0, 1.0);
                }
                let t_star = -origin.dot(velocity) / v2;
                let d = (origin + velocity * t_star).norm();
                let scale = if d > 0.0 { d / v2.sqrt() } else { 1.0 };
                (t_star, scale)
            }
            Motion3D::Polyline(samples) => {
                let (a, b) = (samples[0].0, samples[samples.len() - 1].0);
                (0.5 * (a + b), 0.5 * (b - a))
            }
        }
    }
}

fn segment_distance_to_origin(p: &Vector3<f64>, q: &Vector3<f64>) -> f64 {
    let d = q - p;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return p.norm();
    }
    let s = (-p.dot(&d) / len2).clamp(0.0, 1.0);
    (p + d * s).norm()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(TrajectoryError::InvalidParameter(format!(
            "reparametrization factor must be positive, got {lambda}"
        )));
    }
    Ok(())
}

fn validate_times(times: impl Iterator<Item = f64>, len: usize) -> Result<()> {
    if len < 2 {
        return Err(TrajectoryError::InvalidParameter(
            "a polyline needs at least two samples".into(),
        ));
    }
    let mut prev = f64::NEG_INFINITY;
    for t in times {
        if !t.is_finite() || t <= prev {
            return Err(TrajectoryError::InvalidParameter(
                "polyline times must be finite and strictly increasing".into(),
            ));
        }
        prev = t;
    }
    Ok(())
}

fn check_range(start: f64, end: f64, t: f64) -> Result<()> {
    if t < start || t > end || !t.is_finite() {
        return Err(TrajectoryError::OutOfWindow { t, start, end });
    }
    Ok(())
}

fn interpolate<S>(samples: &[S], t: f64, get: impl Fn(&S) -> (f64, f64)) -> f64 {
    let n = samples.len();
    let idx = samples.partition_point(|s| get(s).0 <= t);
    let i = idx.clamp(1, n - 1);
    let (t0, z0) = get(&samples[i - 1]);
    let (t1, z1) = get(&samples[i]);
    z0 + (z1 - z0) * (t - t0) / (t1 - t0)
}

/// Abscissae of the clamped central difference used for sampled kinds.
fn sampled_difference_points(times: &[f64], t: f64) -> Result<(f64, f64)> {
    let (t0, t1) = (times[0], times[times.len() - 1]);
    check_range(t0, t1, t)?;
    let idx = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
    let spacing = times[idx] - times[idx - 1];
    let step = f64::max(1e-6 * (t1 - t0), 0.5 * spacing);
    let lo = (t - step).max(t0);
    let hi = (t + step).min(t1);
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn window(a: f64, b: f64) -> TimeWindow {
        TimeWindow::bounded(a, b).unwrap()
    }

    #[test]
    fn linear_position() {
        let tr = Trajectory1D::linear(1.0, 2.0, window(0.0, 5.0)).unwrap();
        assert_eq!(tr.position(3.0).unwrap(), 7.0);
    }

    #[test]
    fn harmonic_phase_zero() {
        let tr = Trajectory1D::harmonic(2.0, 0.5, 3.0, 0.0, window(0.0, 1.0)).unwrap();
        assert_eq!(tr.position(0.0).unwrap(), 2.0);
        assert_relative_eq!(tr.velocity(0.0).unwrap(), 1.5);
    }

    #[test]
    fn polyline_midpoint() {
        let tr = Trajectory1D::polyline(vec![(0.0, 1.0), (1.0, 3.0)], window(0.0, 1.0)).unwrap();
        assert_eq!(tr.position(0.5).unwrap(), 2.0);
        assert_relative_eq!(tr.velocity(0.5).unwrap(), 2.0);
        assert!(matches!(
            tr.position(1.5),
            Err(TrajectoryError::OutOfWindow { .. })
        ));
    }

    #[test]
    fn constant_has_zero_velocity() {
        let tr = Trajectory1D::constant(1e-6, window(0.0, 1.0)).unwrap();
        assert_eq!(tr.velocity(0.3).unwrap(), 0.0);
    }

    #[test]
    fn rejects_paths_crossing_the_mirror() {
        assert!(Trajectory1D::linear(1.0, -1.0, window(0.0, 2.0)).is_err());
        assert!(Trajectory1D::harmonic(1.0, 1.0, 1.0, 0.0, window(0.0, 1.0)).is_err());
        assert!(Trajectory1D::polyline(vec![(0.0, 1.0), (1.0, -1.0)], window(0.0, 1.0)).is_err());
        assert!(Trajectory1D::linear(1.0, 0.1, TimeWindow::improper(true)).is_err());
        assert!(Trajectory1D::constant(0.0, window(0.0, 1.0)).is_err());
    }

    #[test]
    fn reparametrize_identity_and_scaling() {
        let tr = Trajectory1D::linear(1.0, 0.5, window(0.0, 4.0)).unwrap();
        assert_eq!(tr.reparametrize(1.0).unwrap(), tr);
        let fast = tr.reparametrize(2.0).unwrap();
        assert_eq!(
            fast.motion(),
            &Motion1D::Linear {
                height: 1.0,
                velocity: 1.0
            }
        );
        assert_eq!(fast.window(), window(0.0, 2.0));
        let back = fast.reparametrize(0.5).unwrap();
        assert_eq!(back, tr);
        assert!(tr.reparametrize(0.0).is_err());
    }

    #[test]
    fn reverse_linear_and_involution() {
        let tr = Trajectory1D::linear(1.0, 0.5, window(0.0, 4.0)).unwrap();
        let rev = tr.reverse().unwrap();
        assert_eq!(rev.position(0.0).unwrap(), 3.0);
        assert_eq!(rev.position(4.0).unwrap(), 1.0);
        assert_eq!(rev.velocity(1.0).unwrap(), -0.5);
        assert_eq!(rev.reverse().unwrap(), tr);

        let c = Trajectory1D::constant(2.0, window(0.0, 1.0)).unwrap();
        assert_eq!(c.reverse().unwrap(), c);
    }

    #[test]
    fn reverse_harmonic_and_polyline() {
        let h = Trajectory1D::harmonic(2.0, 0.5, 3.0, 0.2, window(-1.0, 2.0)).unwrap();
        let p = Trajectory1D::polyline(
            vec![(0.0, 1.0), (0.5, 2.0), (2.0, 1.5)],
            window(0.0, 2.0),
        )
        .unwrap();
        for tr in [h, p] {
            let (a, b) = tr.window().bounds().unwrap();
            let rev = tr.reverse().unwrap();
            for i in 0..=20 {
                let t = a + (b - a) * i as f64 / 20.0;
                assert_relative_eq!(
                    rev.position(t).unwrap(),
                    tr.position(a + b - t).unwrap(),
                    epsilon = 1e-12
                );
            }
            let twice = rev.reverse().unwrap();
            assert_relative_eq!(
                twice.position(a + 0.3).unwrap(),
                tr.position(a + 0.3).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn reverse_needs_bounded_window() {
        let tr = Trajectory3D::straight_line(
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            TimeWindow::improper(true),
        )
        .unwrap();
        assert_eq!(tr.reverse(), Err(TrajectoryError::ImproperWindow));
    }

    #[test]
    fn light_delay_values() {
        assert_relative_eq!(light_delay(C / 2.0).unwrap(), 1.0);
        // 2 * 1e-6 / 299792458
        assert_relative_eq!(light_delay(1e-6).unwrap(), 6.671_281_903_963_041e-15, max_relative = 1e-12);
        assert_relative_eq!(light_delay(2e-6).unwrap(), 2.0 * light_delay(1e-6).unwrap());
        assert!(light_delay(0.0).is_err());
        assert!(light_delay(-1.0).is_err());
    }

    #[test]
    fn harmonic_finite_difference_velocity() {
        let omega = 7.0;
        let tr = Trajectory1D::harmonic(3.0, 1.0, omega, 0.4, window(0.0, 10.0)).unwrap();
        let h = 1e-4 / omega;
        for i in 0..50 {
            let t = 0.1 + 0.19 * i as f64;
            let fd = (tr.position(t + h).unwrap() - tr.position(t - h).unwrap()) / (2.0 * h);
            let v = tr.velocity(t).unwrap();
            assert!((fd - v).abs() <= 1e-6 * omega * 1.0, "t={t} fd={fd} v={v}");
        }
    }

    #[test]
    fn displacement_matches_position_difference() {
        let w = window(0.0, 3.0);
        let paths = [
            Trajectory1D::constant(1.0, w).unwrap(),
            Trajectory1D::linear(1.0, 0.3, w).unwrap(),
            Trajectory1D::harmonic(2.0, 0.5, 4.0, 0.3, w).unwrap(),
            Trajectory1D::polyline(vec![(0.0, 1.0), (1.0, 2.0), (3.0, 1.5)], w).unwrap(),
        ];
        for p in &paths {
            for &(t, dt) in &[(0.1, 0.5), (1.2, 1e-3), (2.0, 0.9)] {
                let d = p.displacement(t, dt).unwrap();
                let diff = p.position(t + dt).unwrap() - p.position(t).unwrap();
                assert!((d - diff).abs() < 1e-12, "{d} vs {diff}");
            }
        }
        // tiny steps keep full relative precision
        let h = &paths[2];
        let d = h.displacement(0.7, 1e-12).unwrap();
        let v = h.velocity(0.7).unwrap();
        assert_relative_eq!(d / 1e-12, v, max_relative = 1e-9);
    }

    #[test]
    fn lowest_point_of_harmonic_window() {
        // trough at t = (3π/2)/ω inside the window
        let tr = Trajectory1D::harmonic(2.0, 1.0, 1.0, 0.0, window(0.0, 6.0)).unwrap();
        assert_relative_eq!(tr.lowest_point().1, 1.0);
        // short window before the trough: minimum at an endpoint
        let tr = Trajectory1D::harmonic(2.0, 1.0, 1.0, 0.0, window(0.0, 1.0)).unwrap();
        assert_relative_eq!(tr.lowest_point().1, 2.0);
    }

    #[test]
    fn closest_approach_straight_line() {
        let tr = Trajectory3D::straight_line(
            Vector3::new(-3.0, 2.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            TimeWindow::improper(true),
        )
        .unwrap();
        assert_relative_eq!(tr.closest_approach(), 2.0);
        let bounded = Trajectory3D::straight_line(
            Vector3::new(-3.0, 2.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            window(0.0, 1.0),
        )
        .unwrap();
        assert_relative_eq!(bounded.closest_approach(), (4.0f64 + 4.0).sqrt());
    }

    #[test]
    fn polyline_3d_interpolation() {
        let tr = Trajectory3D::polyline(
            vec![
                (0.0, Vector3::new(0.0, 1.0, 0.0)),
                (1.0, Vector3::new(2.0, 1.0, 4.0)),
            ],
            window(0.0, 1.0),
        )
        .unwrap();
        assert_eq!(tr.position(0.25).unwrap(), Vector3::new(0.5, 1.0, 1.0));
        let v = tr.velocity(0.5).unwrap();
        assert_relative_eq!(v.x, 2.0, epsilon = 1e-12);
        assert_relative_eq!(v.z, 4.0, epsilon = 1e-12);
        assert_relative_eq!(tr.closest_approach(), 1.0);
    }
}
