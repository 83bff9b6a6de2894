//! Cubic truncation of the `S_N x S^1`-equivariant Hopf normal form on `C^N`.
//!
//! Oscillator 1 obeys
//!
//! ```text
//! z1' = (lambda + i omega + a_1 |z1|^2) z1 + eps * sum_k a_k h_k(z)
//! ```
//!
//! with `k` running over `-1, 2, 3, ..., 11`; every other oscillator is obtained by
//! swapping its coordinate into the first slot. All basis sums are normalized by
//! powers of `1/N`, which keeps the coupling non-trivial as `N` grows.
//!
//! The basis is linearly independent only for `N >= 4`. Smaller `N` is accepted
//! (the formulas stay well defined) but a warning is logged on validation.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

pub type Complex = num_complex::Complex64;

/// Every basis index, `h_{-1}` through `h_{11}`.
pub const BASIS_INDICES: [i32; 13] = [-1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// Indices of the coupling terms (everything except `h_0` and the self term `h_1`).
pub const COUPLING_INDICES: [i32; 11] = [-1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// The twelve complex normal-form coefficients.
///
/// `a1` is the cubic self-interaction of a single oscillator; the rest weight the
/// equivariant coupling terms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormalFormCoefficients {
    pub a_m1: Complex,
    pub a1: Complex,
    pub a2: Complex,
    pub a3: Complex,
    pub a4: Complex,
    pub a5: Complex,
    pub a6: Complex,
    pub a7: Complex,
    pub a8: Complex,
    pub a9: Complex,
    pub a10: Complex,
    pub a11: Complex,
}

impl NormalFormCoefficients {
    /// Self term only; every coupling coefficient is zero.
    pub fn uncoupled(a1: Complex) -> Self {
        Self {
            a1,
            ..Self::default()
        }
    }

    /// Coefficient `a_k` for `k` in `-1, 1, 2, ..., 11`.
    pub fn get(&self, k: i32) -> Result<Complex> {
        Ok(match k {
            -1 => self.a_m1,
            1 => self.a1,
            2 => self.a2,
            3 => self.a3,
            4 => self.a4,
            5 => self.a5,
            6 => self.a6,
            7 => self.a7,
            8 => self.a8,
            9 => self.a9,
            10 => self.a10,
            11 => self.a11,
            _ => return Err(Error::BasisIndex(k)),
        })
    }

    pub fn get_mut(&mut self, k: i32) -> Result<&mut Complex> {
        Ok(match k {
            -1 => &mut self.a_m1,
            1 => &mut self.a1,
            2 => &mut self.a2,
            3 => &mut self.a3,
            4 => &mut self.a4,
            5 => &mut self.a5,
            6 => &mut self.a6,
            7 => &mut self.a7,
            8 => &mut self.a8,
            9 => &mut self.a9,
            10 => &mut self.a10,
            11 => &mut self.a11,
            _ => return Err(Error::BasisIndex(k)),
        })
    }

    /// Coupling coefficients paired with their basis index.
    pub fn coupling_terms(&self) -> [(i32, Complex); 11] {
        COUPLING_INDICES.map(|k| (k, self.get(k).expect("coupling index")))
    }

    pub fn validate(&self) -> Result<()> {
        for k in [-1, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11] {
            let a = self.get(k)?;
            check_finite("coefficients", a.re)?;
            check_finite("coefficients", a.im)?;
        }
        if self.a1.re >= 0.0 {
            return Err(Error::NotSupercritical(self.a1.re));
        }
        Ok(())
    }
}

/// Unfolding parameters together with the normal-form coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub lambda: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub n_osc: usize,
    pub coeffs: NormalFormCoefficients,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        check_finite("lambda", self.lambda)?;
        check_finite("omega", self.omega)?;
        check_finite("epsilon", self.epsilon)?;
        if self.lambda <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "lambda",
                reason: format!("must be positive, got {}", self.lambda),
            });
        }
        if self.n_osc < 2 {
            return Err(Error::InvalidParameter {
                field: "n_osc",
                reason: format!("need at least 2 oscillators, got {}", self.n_osc),
            });
        }
        if self.n_osc < 4 {
            log::warn!(
                "n_osc = {} < 4: the cubic equivariant basis is linearly dependent",
                self.n_osc
            );
        }
        self.coeffs.validate()
    }
}

/// Normalized sums shared by every basis function.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MeanFields {
    /// `(1/N) sum z_j`
    mean: Complex,
    /// `(1/N) sum |z_j|^2`
    mean_sq_modulus: f64,
    /// `(1/N) sum z_j^2`
    mean_square: Complex,
    /// `(1/N) sum |z_j|^2 z_j`
    mean_cubic: Complex,
}

impl MeanFields {
    pub(crate) fn new(z: &[Complex]) -> Self {
        let n = z.len() as f64;
        let mut mean = Complex::new(0.0, 0.0);
        let mut mean_sq_modulus = 0.0;
        let mut mean_square = Complex::new(0.0, 0.0);
        let mut mean_cubic = Complex::new(0.0, 0.0);
        for &w in z {
            let m = w.norm_sqr();
            mean += w;
            mean_sq_modulus += m;
            mean_square += w * w;
            mean_cubic += w * m;
        }
        Self {
            mean: mean / n,
            mean_sq_modulus: mean_sq_modulus / n,
            mean_square: mean_square / n,
            mean_cubic: mean_cubic / n,
        }
    }

    /// `h_k` with `w` in the distinguished slot.
    pub(crate) fn basis(&self, w: Complex, k: i32) -> Result<Complex> {
        let s = self.mean;
        Ok(match k {
            -1 => s,
            0 => w,
            1 => w * w.norm_sqr(),
            2 => w * w * s.conj(),
            3 => s * w.norm_sqr(),
            4 => w * self.mean_sq_modulus,
            5 => w * s.norm_sqr(),
            6 => w.conj() * self.mean_square,
            7 => w.conj() * s * s,
            8 => self.mean_cubic,
            9 => self.mean_square * s.conj(),
            10 => s * self.mean_sq_modulus,
            11 => s * s.norm_sqr(),
            _ => return Err(Error::BasisIndex(k)),
        })
    }

    /// Cubic coupling bracket (everything multiplied by `eps`) for distinguished `w`.
    pub(crate) fn coupling(&self, w: Complex, c: &NormalFormCoefficients) -> Complex {
        let s = self.mean;
        let w2 = w * w;
        let wm = w.norm_sqr();
        c.a_m1 * s
            + c.a2 * w2 * s.conj()
            + c.a3 * s * wm
            + c.a4 * w * self.mean_sq_modulus
            + c.a5 * w * s.norm_sqr()
            + c.a6 * w.conj() * self.mean_square
            + c.a7 * w.conj() * s * s
            + c.a8 * self.mean_cubic
            + c.a9 * self.mean_square * s.conj()
            + c.a10 * s * self.mean_sq_modulus
            + c.a11 * s * s.norm_sqr()
    }
}

fn validate_state(z: &[Complex]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::InvalidParameter {
            field: "z",
            reason: "state must not be empty".into(),
        });
    }
    for w in z {
        check_finite("z", w.re)?;
        check_finite("z", w.im)?;
    }
    Ok(())
}

/// Equivariant basis function `h_k(z)` with `z_1 = z[0]` distinguished.
pub fn equivariant_basis(z: &[Complex], k: i32) -> Result<Complex> {
    validate_state(z)?;
    MeanFields::new(z).basis(z[0], k)
}

/// Cubic coupling bracket `F_1` at `z` (without the factor `eps` and without the
/// `a_1` self term, which belongs to the uncoupled field).
pub fn coupling_field(z: &[Complex], coeffs: &NormalFormCoefficients) -> Result<Complex> {
    validate_state(z)?;
    Ok(MeanFields::new(z).coupling(z[0], coeffs))
}

/// Single uncoupled oscillator `(lambda + i omega + a_1 |z|^2) z`.
pub fn uncoupled_field(z1: Complex, params: &SystemParams) -> Complex {
    let v = Complex::new(params.lambda, params.omega) + params.coeffs.a1 * z1.norm_sqr();
    v * z1
}

/// Full right-hand side on `C^N`.
pub fn full_rhs(z: &[Complex], params: &SystemParams) -> Result<Vec<Complex>> {
    validate_state(z)?;
    if z.len() != params.n_osc {
        return Err(Error::DimensionMismatch {
            expected: params.n_osc,
            actual: z.len(),
        });
    }
    let mut out = vec![Complex::new(0.0, 0.0); z.len()];
    full_rhs_into(z, params, &mut out);
    Ok(out)
}

/// Unchecked variant of [`full_rhs`] writing into `out`; used on the integration
/// hot path. Cost is `O(N)`.
pub fn full_rhs_into(z: &[Complex], params: &SystemParams, out: &mut [Complex]) {
    let mf = MeanFields::new(z);
    for (o, &w) in out.iter_mut().zip(z) {
        *o = uncoupled_field(w, params) + params.epsilon * mf.coupling(w, &params.coeffs);
    }
}
