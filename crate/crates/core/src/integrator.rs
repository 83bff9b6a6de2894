//! Fixed-step integration of the full and reduced models, and the comparison
//! between them.

use std::f64::consts::TAU;
use std::io::{self, Write};
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::angle::wrap_to_pi;
use crate::error::{Error, Result};
use crate::normal_form::{full_rhs_into, Complex, SystemParams};
use crate::phase_model::{moment, phase_rhs_fast_into};
use crate::reduction::PhaseCouplingSet;

/// Element type of an integrable state vector.
pub trait StateValue: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    const ZERO: Self;
    fn is_finite(&self) -> bool;
}

impl StateValue for f64 {
    const ZERO: Self = 0.0;
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl StateValue for Complex {
    const ZERO: Self = Complex::new(0.0, 0.0);
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Sampled solution. `states[i]` is the state at `times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<Vec<T>>,
}

pub type FullTrajectory = Trajectory<Complex>;
pub type PhaseTrajectory = Trajectory<f64>;

impl<T: Copy> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[T])> {
        Some((*self.times.last()?, self.states.last()?.as_slice()))
    }

    /// Component `j` as a time series.
    pub fn component(&self, j: usize) -> Vec<T> {
        self.states.iter().map(|s| s[j]).collect()
    }
}

/// Classical RK4 stepper with preallocated stages.
pub struct Rk4<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: StateValue> Rk4<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![T::ZERO; dim],
            k2: vec![T::ZERO; dim],
            k3: vec![T::ZERO; dim],
            k4: vec![T::ZERO; dim],
            tmp: vec![T::ZERO; dim],
        }
    }

    /// Advance `x` in place by `h` under the autonomous field `rhs`.
    pub fn step<F>(&mut self, rhs: &mut F, x: &mut [T], h: f64)
    where
        F: FnMut(&[T], &mut [T]),
    {
        rhs(x, &mut self.k1);
        axpy(&mut self.tmp, x, &self.k1, 0.5 * h);
        rhs(&self.tmp, &mut self.k2);
        axpy(&mut self.tmp, x, &self.k2, 0.5 * h);
        rhs(&self.tmp, &mut self.k3);
        axpy(&mut self.tmp, x, &self.k3, h);
        rhs(&self.tmp, &mut self.k4);
        let h6 = h / 6.0;
        for (i, xi) in x.iter_mut().enumerate() {
            let incr = (self.k1[i] + self.k2[i] * 2.0 + self.k3[i] * 2.0 + self.k4[i]) * h6;
            *xi = *xi + incr;
        }
    }
}

fn axpy<T: StateValue>(out: &mut [T], x: &[T], k: &[T], a: f64) {
    for ((o, &xi), &ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + ki * a;
    }
}

fn check_step(dt: f64, t_end: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("must be positive and finite, got {dt}"),
        });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "t_end",
            reason: format!("must be positive and finite, got {t_end}"),
        });
    }
    if dt > t_end {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("dt = {dt} exceeds t_end = {t_end}"),
        });
    }
    Ok(())
}

/// Integrate from `t = 0` to `t_end` with fixed step `dt`, recording every step.
///
/// If `t_end` is not a multiple of `dt` the final step is shortened to land on it.
pub fn integrate<T, F>(rhs: F, x0: &[T], dt: f64, t_end: f64) -> Result<Trajectory<T>>
where
    T: StateValue,
    F: FnMut(&[T], &mut [T]),
{
    integrate_sampled(rhs, x0, dt, t_end, 1)
}

/// As [`integrate`], but only every `stride`-th step (and the final one) is
/// recorded.
pub fn integrate_sampled<T, F>(
    mut rhs: F,
    x0: &[T],
    dt: f64,
    t_end: f64,
    stride: usize,
) -> Result<Trajectory<T>>
where
    T: StateValue,
    F: FnMut(&[T], &mut [T]),
{
    check_step(dt, t_end)?;
    let stride = stride.max(1);
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut x = x0.to_vec();
    if !x.iter().all(StateValue::is_finite) {
        return Err(Error::NonFinite { t: 0.0 });
    }
    let mut rk = Rk4::new(x.len());
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps / stride + 2),
        states: Vec::with_capacity(steps / stride + 2),
    };
    traj.times.push(0.0);
    traj.states.push(x.clone());
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * dt;
        let t = if i == steps { t_end } else { i as f64 * dt };
        rk.step(&mut rhs, &mut x, t - t_prev);
        if !x.iter().all(StateValue::is_finite) {
            return Err(Error::NonFinite { t });
        }
        if i % stride == 0 || i == steps {
            traj.times.push(t);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

/// Final state only, for convergence studies.
pub fn integrate_final<T, F>(mut rhs: F, x0: &[T], dt: f64, t_end: f64) -> Result<Vec<T>>
where
    T: StateValue,
    F: FnMut(&[T], &mut [T]),
{
    check_step(dt, t_end)?;
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut x = x0.to_vec();
    let mut rk = Rk4::new(x.len());
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * dt;
        let t = if i == steps { t_end } else { i as f64 * dt };
        rk.step(&mut rhs, &mut x, t - t_prev);
        if !x.iter().all(StateValue::is_finite) {
            return Err(Error::NonFinite { t });
        }
    }
    Ok(x)
}

/// Richardson estimate of the global error at `t_end` for step `dt`: integrates
/// with `dt` and `dt/2` and returns `max_i |x_dt - x_{dt/2}| * 16/15`.
pub fn step_halving_error<F>(mut rhs: F, x0: &[Complex], dt: f64, t_end: f64) -> Result<f64>
where
    F: FnMut(&[Complex], &mut [Complex]),
{
    let coarse = integrate_final(&mut rhs, x0, dt, t_end)?;
    let fine = integrate_final(&mut rhs, x0, dt / 2.0, t_end)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        * 16.0
        / 15.0)
}

/// `min(2 pi / (50 Omega), 0.01 / lambda)`: resolves the fast rotation and the slow
/// radial relaxation.
pub fn default_step(omega_cap: f64, lambda: f64) -> f64 {
    let fast = if omega_cap.abs() > 0.0 {
        TAU / (50.0 * omega_cap.abs())
    } else {
        f64::INFINITY
    };
    fast.min(0.01 / lambda)
}

pub fn integrate_full(
    params: &SystemParams,
    z0: &[Complex],
    dt: f64,
    t_end: f64,
    stride: usize,
) -> Result<FullTrajectory> {
    params.validate()?;
    if z0.len() != params.n_osc {
        return Err(Error::DimensionMismatch {
            expected: params.n_osc,
            actual: z0.len(),
        });
    }
    integrate_sampled(
        |z, out| full_rhs_into(z, params, out),
        z0,
        dt,
        t_end,
        stride,
    )
}

pub fn integrate_phase(
    coupling: &PhaseCouplingSet,
    phi0: &[f64],
    dt: f64,
    t_end: f64,
    stride: usize,
) -> Result<PhaseTrajectory> {
    if phi0.len() != coupling.n_osc {
        return Err(Error::DimensionMismatch {
            expected: coupling.n_osc,
            actual: phi0.len(),
        });
    }
    integrate_sampled(
        |p, out| phase_rhs_fast_into(p, coupling, out),
        phi0,
        dt,
        t_end,
        stride,
    )
}

/// Points on the uncoupled torus `|z_j| = R*` with the given angles.
pub fn torus_state(r_star: f64, phi: &[f64]) -> Vec<Complex> {
    phi.iter()
        .map(|&p| Complex::from_polar(r_star, p))
        .collect()
}

/// Smallest modulus accepted by [`extract_phases`].
pub const MIN_AMPLITUDE: f64 = 1e-8;

/// Continuous (unwrapped) phase paths `arg z_j(t)`.
pub fn extract_phases(traj: &FullTrajectory) -> Result<PhaseTrajectory> {
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(traj.len());
    for (&t, z) in traj.times.iter().zip(&traj.states) {
        if let Some((index, w)) = z.iter().enumerate().find(|(_, w)| w.norm() < MIN_AMPLITUDE) {
            return Err(Error::AmplitudeCollapse {
                index,
                modulus: w.norm(),
                t,
            });
        }
        let next = match states.last() {
            None => z.iter().map(|w| w.arg()).collect(),
            Some(prev) => z
                .iter()
                .zip(prev)
                .map(|(w, &p)| p + wrap_to_pi(w.arg() - p))
                .collect(),
        };
        states.push(next);
    }
    Ok(Trajectory {
        times: traj.times.clone(),
        states,
    })
}

/// Distance between the full and reduced solutions, up to a common rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub horizon: f64,
    /// `sup_t max_j |arg z_j - phi_j - rotation(t)|`, measured on the circle.
    pub max_phase_dev: f64,
    pub freq_full: f64,
    pub freq_phase: f64,
}

fn check_grids(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    let scale = a.last().copied().unwrap_or(1.0).abs().max(1.0);
    if let Some((i, (x, y))) = a
        .iter()
        .zip(b)
        .enumerate()
        .find(|(_, (x, y))| (*x - *y).abs() > 1e-9 * scale)
    {
        return Err(Error::GridMismatch(format!("sample {i}: t = {x} vs {y}")));
    }
    Ok(())
}

/// Largest deviation after removing the circular mean of the differences.
fn aligned_deviation(a: &[f64], b: &[f64]) -> f64 {
    let mean: Complex = a
        .iter()
        .zip(b)
        .map(|(x, y)| Complex::from_polar(1.0, x - y))
        .sum();
    let rot = if mean.norm() > 0.0 { mean.arg() } else { 0.0 };
    a.iter()
        .zip(b)
        .map(|(x, y)| wrap_to_pi(x - y - rot).abs())
        .fold(0.0, f64::max)
}

fn mean_winding_rate(traj: &PhaseTrajectory) -> f64 {
    let (Some(first), Some(last)) = (traj.states.first(), traj.states.last()) else {
        return 0.0;
    };
    let span = traj.times.last().unwrap() - traj.times[0];
    if span <= 0.0 {
        return 0.0;
    }
    first.iter().zip(last).map(|(a, b)| b - a).sum::<f64>() / (first.len() as f64 * span)
}

/// Compare two phase trajectories sampled on the same grid. Phases must be
/// unwrapped for the frequencies to be meaningful.
pub fn compare_phases(full: &PhaseTrajectory, phase: &PhaseTrajectory) -> Result<ComparisonReport> {
    check_grids(&full.times, &phase.times)?;
    let mut max_dev: f64 = 0.0;
    for (a, b) in full.states.iter().zip(&phase.states) {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                actual: b.len(),
            });
        }
        max_dev = max_dev.max(aligned_deviation(a, b));
    }
    Ok(ComparisonReport {
        horizon: full.times.last().copied().unwrap_or(0.0),
        max_phase_dev: max_dev,
        freq_full: mean_winding_rate(full),
        freq_phase: mean_winding_rate(phase),
    })
}

/// Compare a full-model trajectory with a phase-model trajectory.
pub fn compare(full: &FullTrajectory, phase: &PhaseTrajectory) -> Result<ComparisonReport> {
    check_grids(&full.times, &phase.times)?;
    compare_phases(&extract_phases(full)?, phase)
}

/// Mean of `|Z_1|` over the trailing `fraction` of the samples.
pub fn trailing_order_parameter(phases: &PhaseTrajectory, fraction: f64) -> f64 {
    let n = phases.len();
    let take = ((n as f64 * fraction).ceil() as usize).clamp(1, n.max(1));
    let tail = &phases.states[n - take..];
    tail.iter().map(|p| moment(p, 1).norm()).sum::<f64>() / take as f64
}

fn write_header<W: Write>(out: &mut W, comments: &[String]) -> io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    Ok(())
}

/// `t,re(z_1),im(z_1),...` with 17 significant digits.
pub fn write_full_csv<W: Write>(
    out: &mut W,
    traj: &FullTrajectory,
    comments: &[String],
) -> io::Result<()> {
    write_header(out, comments)?;
    let n = traj.states.first().map_or(0, Vec::len);
    let mut header = String::from("t");
    for j in 1..=n {
        header.push_str(&format!(",re(z_{j}),im(z_{j})"));
    }
    writeln!(out, "{header}")?;
    for (t, z) in traj.times.iter().zip(&traj.states) {
        write!(out, "{t:.16e}")?;
        for w in z {
            write!(out, ",{:.16e},{:.16e}", w.re, w.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `t,phi_1,...`, optionally followed by `R* cos(phi_j)` columns.
pub fn write_phase_csv<W: Write>(
    out: &mut W,
    traj: &PhaseTrajectory,
    r_star: Option<f64>,
    comments: &[String],
) -> io::Result<()> {
    write_header(out, comments)?;
    let n = traj.states.first().map_or(0, Vec::len);
    let mut header = String::from("t");
    for j in 1..=n {
        header.push_str(&format!(",phi_{j}"));
    }
    if r_star.is_some() {
        for j in 1..=n {
            header.push_str(&format!(",rcos_{j}"));
        }
    }
    writeln!(out, "{header}")?;
    for (t, p) in traj.times.iter().zip(&traj.states) {
        write!(out, "{t:.16e}")?;
        for x in p {
            write!(out, ",{x:.16e}")?;
        }
        if let Some(r) = r_star {
            for x in p {
                write!(out, ",{:.16e}", r * x.cos())?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
