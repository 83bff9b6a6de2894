//! Right-hand side of the reduced phase model.
//!
//! Two evaluators are provided. [`phase_rhs_naive`] performs the nested sums
//! literally (cost `O(N^3)` per oscillator) and serves as the reference.
//! [`phase_rhs_fast`] regroups every sum through the circular moments
//! `Z_m = (1/N) sum_j e^{i m phi_j}`:
//!
//! ```text
//! (1/N)   sum_k      cos(m(phi_k - phi_j) + chi)           = Re(e^{i chi} Z_m e^{-i m phi_j})
//! (1/N^2) sum_{k,l}  cos(m(phi_k + phi_l - 2phi_j) + chi)  = Re(e^{i chi} Z_m^2 e^{-2i m phi_j})
//! (1/N^2) sum_{k,l}  cos(m(2phi_k - phi_l - phi_j) + chi)  = Re(e^{i chi} Z_2m conj(Z_m) e^{-i m phi_j})
//! (1/N^3) sum_{k,l,n} cos(m(phi_k + phi_l - phi_n - phi_j) + chi) = Re(e^{i chi} |Z_m|^2 Z_m e^{-i m phi_j})
//! ```
//!
//! so a full evaluation costs `O(N)`. Self-interaction terms (`k = j` and so on)
//! are included in every sum.

use serde::{Deserialize, Serialize};

use crate::angle::wrap_to_two_pi;
use crate::error::{Error, Result};
use crate::normal_form::Complex;
use crate::reduction::{CouplingFn, PhaseCouplingSet};

/// Above this size the moments are accumulated with compensated summation.
pub const COMPENSATED_SUM_THRESHOLD: usize = 10_000;

/// Phases reduced to `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    phi: Vec<f64>,
}

impl PhaseState {
    pub fn new(phi: impl IntoIterator<Item = f64>) -> Self {
        Self {
            phi: phi.into_iter().map(wrap_to_two_pi).collect(),
        }
    }

    /// Equally spaced phases `offset + 2 pi j / n`.
    pub fn splay(n: usize, offset: f64) -> Self {
        Self::new((0..n).map(|j| offset + std::f64::consts::TAU * j as f64 / n as f64))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.phi
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }
}

/// First and second circular moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularMoments {
    pub z1: Complex,
    pub z2: Complex,
}

impl CircularMoments {
    /// Kuramoto order parameter `|Z_1|`.
    pub fn order_parameter(&self) -> f64 {
        self.z1.norm()
    }
}

pub fn moments(phi: &[f64]) -> CircularMoments {
    CircularMoments {
        z1: moment(phi, 1),
        z2: moment(phi, 2),
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `Z_m = (1/N) sum_j e^{i m phi_j}`.
pub fn moment(phi: &[f64], m: u32) -> Complex {
    let n = phi.len() as f64;
    let m = m as f64;
    if phi.len() > COMPENSATED_SUM_THRESHOLD {
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        for &p in phi {
            let (s, c) = (m * p).sin_cos();
            re.add(c);
            im.add(s);
        }
        Complex::new(re.value() / n, im.value() / n)
    } else {
        let (re, im) = phi.iter().fold((0.0, 0.0), |(re, im), &p| {
            let (s, c) = (m * p).sin_cos();
            (re + c, im + s)
        });
        Complex::new(re / n, im / n)
    }
}

fn check_dim(phi: &[f64], coupling: &PhaseCouplingSet) -> Result<()> {
    if phi.len() != coupling.n_osc {
        return Err(Error::DimensionMismatch {
            expected: coupling.n_osc,
            actual: phi.len(),
        });
    }
    Ok(())
}

/// Phase-dependent common frequency `Omega~`, by direct double sum.
fn omega_tilde_naive(phi: &[f64], coupling: &PhaseCouplingSet) -> f64 {
    if coupling.mean_field_freq_amp == 0.0 {
        return coupling.omega_tilde_const;
    }
    let n = phi.len() as f64;
    let g5 = coupling.mean_field_phase();
    let mut acc = 0.0;
    for &pj in phi {
        for &pk in phi {
            acc += (g5 + pj - pk).cos();
        }
    }
    coupling.omega_tilde_const + coupling.mean_field_freq_amp * acc / (n * n)
}

/// Component `j` of the naive evaluator.
pub fn phase_rhs_naive_component(
    phi: &[f64],
    coupling: &PhaseCouplingSet,
    j: usize,
) -> Result<f64> {
    check_dim(phi, coupling)?;
    if j >= phi.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            actual: j,
        });
    }
    Ok(omega_tilde_naive(phi, coupling) + naive_interaction(phi, coupling, j))
}

fn naive_interaction(phi: &[f64], coupling: &PhaseCouplingSet, j: usize) -> f64 {
    let n = phi.len() as f64;
    let pj = phi[j];
    let g = |f, x| coupling.eval(f, x);
    let (mut s2, mut s3, mut s4, mut s5) = (0.0, 0.0, 0.0, 0.0);
    for &pk in phi {
        s2 += g(CouplingFn::G2, pk - pj);
        for &pl in phi {
            s3 += g(CouplingFn::G3, pk + pl - 2.0 * pj);
            s4 += g(CouplingFn::G4, 2.0 * pk - pl - pj);
            for &pm in phi {
                s5 += g(CouplingFn::G5, pk + pl - pm - pj);
            }
        }
    }
    coupling.epsilon * (s2 / n + (s3 + s4) / (n * n) + s5 / (n * n * n))
}

/// Literal evaluation of every nested sum.
pub fn phase_rhs_naive(phi: &[f64], coupling: &PhaseCouplingSet) -> Result<Vec<f64>> {
    check_dim(phi, coupling)?;
    let omega = omega_tilde_naive(phi, coupling);
    Ok((0..phi.len())
        .map(|j| omega + naive_interaction(phi, coupling, j))
        .collect())
}

/// `O(N)` evaluation through circular moments.
pub fn phase_rhs_fast(phi: &[f64], coupling: &PhaseCouplingSet) -> Result<Vec<f64>> {
    check_dim(phi, coupling)?;
    let mut out = vec![0.0; phi.len()];
    phase_rhs_fast_into(phi, coupling, &mut out);
    Ok(out)
}

/// Unchecked [`phase_rhs_fast`] writing into `out`.
pub fn phase_rhs_fast_into(phi: &[f64], coupling: &PhaseCouplingSet, out: &mut [f64]) {
    let max_order = [
        CouplingFn::G2,
        CouplingFn::G3,
        CouplingFn::G4,
        CouplingFn::G5,
    ]
    .iter()
    .flat_map(|&f| coupling.terms(f).iter())
    .map(|t| if t.amplitude == 0.0 { 1 } else { t.order })
    .max()
    .unwrap_or(1);
    // g4 of order m needs Z_{2m}
    let mut z = vec![Complex::new(0.0, 0.0); 2 * max_order as usize + 1];
    for (m, zm) in z.iter_mut().enumerate().skip(1) {
        *zm = moment(phi, m as u32);
    }

    // Collect, per power of e^{-i phi_j}, the complex coefficient multiplying it.
    let mut per_power = vec![Complex::new(0.0, 0.0); 2 * max_order as usize + 1];
    for t in coupling
        .terms(CouplingFn::G2)
        .iter()
        .filter(|t| t.amplitude != 0.0)
    {
        let m = t.order as usize;
        per_power[m] += t.phasor() * z[m];
    }
    for t in coupling
        .terms(CouplingFn::G3)
        .iter()
        .filter(|t| t.amplitude != 0.0)
    {
        let m = t.order as usize;
        per_power[2 * m] += t.phasor() * z[m] * z[m];
    }
    for t in coupling
        .terms(CouplingFn::G4)
        .iter()
        .filter(|t| t.amplitude != 0.0)
    {
        let m = t.order as usize;
        per_power[m] += t.phasor() * z[2 * m] * z[m].conj();
    }
    for t in coupling
        .terms(CouplingFn::G5)
        .iter()
        .filter(|t| t.amplitude != 0.0)
    {
        let m = t.order as usize;
        per_power[m] += t.phasor() * z[m] * z[m].norm_sqr();
    }

    let omega = coupling.omega_tilde_const
        + coupling.mean_field_freq_amp * z[1].norm_sqr() * coupling.mean_field_phase().cos();
    let eps = coupling.epsilon;
    let active: Vec<(f64, Complex)> = per_power
        .iter()
        .enumerate()
        .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
        .map(|(p, &c)| (p as f64, c))
        .collect();
    for (o, &pj) in out.iter_mut().zip(phi) {
        let mut acc = 0.0;
        for &(p, c) in &active {
            let (s, co) = (p * pj).sin_cos();
            // Re(c e^{-i p phi_j})
            acc += c.re * co + c.im * s;
        }
        *o = omega + eps * acc;
    }
}
