//! Phase reduction of the coupled normal form.
//!
//! On the attracting torus each oscillator sits near the uncoupled limit cycle
//! `|z| = R*`, rotating at `Omega`. Eliminating the fast radial deviation gives the
//! phase model
//!
//! ```text
//! phi_j' = Omega~(phi) + eps/N   sum_k      g2(phi_k - phi_j)
//!                     + eps/N^2 sum_{k,l}  g3(phi_k + phi_l - 2 phi_j)
//!                     + eps/N^2 sum_{k,l}  g4(2 phi_k - phi_l - phi_j)
//!                     + eps/N^3 sum_{k,l,m} g5(phi_k + phi_l - phi_m - phi_j)
//! ```
//!
//! Every coefficient `a_k = alpha_k e^{i theta_k}` enters through the pair
//! `(beta_k, gamma_k)` defined by
//! `beta_k cos(gamma_k + x) = alpha_k sin(theta_k + x) - c alpha_k cos(theta_k + x)`
//! for all `x`, where `c = C(0)/A(0) = a_1I / a_1R`.
//!
//! The higher-order tail of the uncoupled oscillator is taken to be zero, so the
//! constants below are exact rather than leading-order. The fifth-order
//! correction `delta` is zero in that case but can be supplied explicitly.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::angle::wrap_to_pi;
use crate::error::{check_finite, Error, Result};
use crate::normal_form::{Complex, NormalFormCoefficients, SystemParams, COUPLING_INDICES};

/// Limit-cycle data and the amplitude/phase constants at `lambda -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionConstants {
    /// `R*^2`
    pub r_star_sq: f64,
    /// Frequency on the limit cycle.
    pub omega_cap: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    /// `C(0)/A(0)`
    pub c_ratio: f64,
    /// Fifth-order correction `(C'(0)A(0) - A'(0)C(0)) / A(0)^2`.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcConstants {
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub c_ratio: f64,
}

fn require_supercritical(coeffs: &NormalFormCoefficients) -> Result<()> {
    check_finite("a1", coeffs.a1.re)?;
    check_finite("a1", coeffs.a1.im)?;
    if coeffs.a1.re >= 0.0 {
        return Err(Error::NotSupercritical(coeffs.a1.re));
    }
    Ok(())
}

/// Radius squared and angular frequency of the uncoupled limit cycle.
pub fn limit_cycle(params: &SystemParams) -> Result<(f64, f64)> {
    require_supercritical(&params.coeffs)?;
    if params.lambda.is_nan() || params.lambda <= 0.0 {
        return Err(Error::InvalidParameter {
            field: "lambda",
            reason: format!("must be positive, got {}", params.lambda),
        });
    }
    let a1 = params.coeffs.a1;
    let r_star_sq = params.lambda / (-a1.re);
    Ok((r_star_sq, params.omega + a1.im * r_star_sq))
}

/// `A(0) = -2`, `B(0) = 2 a_1I / sqrt(-a_1R)`, `C(0) = -2 a_1I / a_1R`.
pub fn abc_constants(coeffs: &NormalFormCoefficients) -> Result<AbcConstants> {
    require_supercritical(coeffs)?;
    let a1 = coeffs.a1;
    let a0 = -2.0;
    let c0 = -2.0 * a1.im / a1.re;
    Ok(AbcConstants {
        a0,
        b0: 2.0 * a1.im / (-a1.re).sqrt(),
        c0,
        // + 0.0 turns a signed zero into 0
        c_ratio: c0 / a0 + 0.0,
    })
}

pub fn reduction_constants(params: &SystemParams, delta: f64) -> Result<ReductionConstants> {
    check_finite("delta", delta)?;
    let (r_star_sq, omega_cap) = limit_cycle(params)?;
    let abc = abc_constants(&params.coeffs)?;
    Ok(ReductionConstants {
        r_star_sq,
        omega_cap,
        a0: abc.a0,
        b0: abc.b0,
        c0: abc.c0,
        c_ratio: abc.c_ratio,
        delta,
    })
}

/// Solve `beta cos(gamma + x) = alpha sin(theta + x) - c alpha cos(theta + x)`.
///
/// Written with phasors this is `beta e^{i gamma} = alpha e^{i theta} (-i - c)`.
/// Zero amplitude returns `(0, 0)`.
pub fn beta_gamma(alpha: f64, theta: f64, c_ratio: f64) -> (f64, f64) {
    if alpha == 0.0 {
        return (0.0, 0.0);
    }
    let beta = alpha * c_ratio.hypot(1.0);
    let gamma = wrap_to_pi(theta + (-1.0f64).atan2(-c_ratio));
    (beta, gamma)
}

/// `amplitude * cos(order * x + phase_offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub amplitude: f64,
    pub phase_offset: f64,
    pub order: u32,
}

impl HarmonicTerm {
    pub fn new(amplitude: f64, phase_offset: f64, order: u32) -> Self {
        Self::from_phasor(Complex::from_polar(amplitude, phase_offset), order)
    }

    /// Canonical form of `Re(p e^{i order x})`: non-negative amplitude, phase in
    /// `(-pi, pi]`, phase `0` for a vanishing phasor.
    pub fn from_phasor(p: Complex, order: u32) -> Self {
        let amplitude = p.norm();
        let phase_offset = if amplitude == 0.0 {
            0.0
        } else {
            wrap_to_pi(p.arg())
        };
        Self {
            amplitude,
            phase_offset,
            order,
        }
    }

    pub fn zero(order: u32) -> Self {
        Self {
            amplitude: 0.0,
            phase_offset: 0.0,
            order,
        }
    }

    pub fn phasor(&self) -> Complex {
        Complex::from_polar(self.amplitude, self.phase_offset)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (self.order as f64 * x + self.phase_offset).cos()
    }
}

/// One real value per coupling index `-1, 2, 3, ..., 11`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ByIndex([f64; 11]);

impl ByIndex {
    fn slot(k: i32) -> Result<usize> {
        COUPLING_INDICES
            .iter()
            .position(|&i| i == k)
            .ok_or(Error::BasisIndex(k))
    }

    pub fn get(&self, k: i32) -> f64 {
        self.0[Self::slot(k).expect("coupling index")]
    }

    pub fn set(&mut self, k: i32, v: f64) {
        self.0[Self::slot(k).expect("coupling index")] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        COUPLING_INDICES.iter().copied().zip(self.0.iter().copied())
    }
}

impl Serialize for ByIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(11))?;
        for (k, v) in self.iter() {
            map.serialize_entry(&k.to_string(), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ByIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        let mut out = ByIndex::default();
        for (key, v) in raw {
            let k: i32 = key
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coupling index `{key}`")))?;
            let slot = ByIndex::slot(k).map_err(D::Error::custom)?;
            out.0[slot] = v;
        }
        Ok(out)
    }
}

/// The four interaction functions of the phase model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingFn {
    G2,
    G3,
    G4,
    G5,
}

/// Everything the phase model needs, derived once from [`SystemParams`].
///
/// `g2` holds exactly one order-1 and one order-2 term; `g3`, `g4`, `g5` each hold
/// one order-1 term. Terms may have zero amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCouplingSet {
    pub n_osc: usize,
    pub epsilon: f64,
    pub lambda: f64,
    pub r_star_sq: f64,
    pub omega_cap: f64,
    pub delta: f64,
    /// `Omega + eps R*^2 beta_4 cos gamma_4`
    pub omega_tilde_const: f64,
    /// `eps R*^2 beta_5`, multiplying `|Z_1|^2 cos gamma_5` in `Omega~`.
    pub mean_field_freq_amp: f64,
    pub beta: ByIndex,
    pub gamma: ByIndex,
    /// `-lambda delta alpha_{-1} cos(theta_{-1} + x)`; part of `g2`.
    pub correction: HarmonicTerm,
    pub g2: Vec<HarmonicTerm>,
    pub g3: Vec<HarmonicTerm>,
    pub g4: Vec<HarmonicTerm>,
    pub g5: Vec<HarmonicTerm>,
}

impl PhaseCouplingSet {
    pub fn terms(&self, f: CouplingFn) -> &[HarmonicTerm] {
        match f {
            CouplingFn::G2 => &self.g2,
            CouplingFn::G3 => &self.g3,
            CouplingFn::G4 => &self.g4,
            CouplingFn::G5 => &self.g5,
        }
    }

    pub fn eval(&self, f: CouplingFn, x: f64) -> f64 {
        self.terms(f).iter().map(|t| t.eval(x)).sum()
    }

    pub fn mean_field_phase(&self) -> f64 {
        self.gamma.get(5)
    }

    /// `R*^2 beta_k e^{i gamma_k}`.
    fn cubic_phasor(&self, k: i32) -> Complex {
        Complex::from_polar(self.r_star_sq * self.beta.get(k), self.gamma.get(k))
    }

    /// `g2` as the literal sum of its contributions, before merging harmonics.
    pub fn g2_unmerged(&self) -> Vec<HarmonicTerm> {
        let r2 = self.r_star_sq;
        let mut out = vec![HarmonicTerm::new(self.beta.get(-1), self.gamma.get(-1), 1)];
        // cos(gamma_2 - x) = cos(x - gamma_2)
        out.push(HarmonicTerm::new(
            r2 * self.beta.get(2),
            -self.gamma.get(2),
            1,
        ));
        for k in [3, 8, 10] {
            out.push(HarmonicTerm::new(
                r2 * self.beta.get(k),
                self.gamma.get(k),
                1,
            ));
        }
        out.push(HarmonicTerm::new(
            r2 * self.beta.get(6),
            self.gamma.get(6),
            2,
        ));
        out.push(self.correction);
        out
    }

    /// Copy of the set with a different coupling strength; the phase functions do
    /// not depend on `eps`, only the frequency offsets do.
    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        let mut out = self.clone();
        out.epsilon = epsilon;
        out.omega_tilde_const =
            self.omega_cap + epsilon * self.r_star_sq * self.beta.get(4) * self.gamma.get(4).cos();
        out.mean_field_freq_amp = epsilon * self.r_star_sq * self.beta.get(5);
        out
    }

    /// Assemble a set directly from `(beta_k, gamma_k)`, bypassing the normal form.
    /// Mostly useful for synthetic experiments and tests.
    #[allow(clippy::too_many_arguments)]
    pub fn from_beta_gamma(
        n_osc: usize,
        epsilon: f64,
        lambda: f64,
        r_star_sq: f64,
        omega_cap: f64,
        beta: ByIndex,
        gamma: ByIndex,
        correction: HarmonicTerm,
    ) -> Self {
        let mut set = Self {
            n_osc,
            epsilon,
            lambda,
            r_star_sq,
            omega_cap,
            delta: 0.0,
            omega_tilde_const: 0.0,
            mean_field_freq_amp: 0.0,
            beta,
            gamma,
            correction,
            g2: Vec::new(),
            g3: Vec::new(),
            g4: Vec::new(),
            g5: Vec::new(),
        };
        let first = Complex::from_polar(set.beta.get(-1), set.gamma.get(-1))
            + [3, 8, 10]
                .iter()
                .map(|&k| set.cubic_phasor(k))
                .sum::<Complex>()
            + set.cubic_phasor(2).conj()
            + correction.phasor();
        set.g2 = vec![
            HarmonicTerm::from_phasor(first, 1),
            HarmonicTerm::from_phasor(set.cubic_phasor(6), 2),
        ];
        set.g3 = vec![HarmonicTerm::from_phasor(set.cubic_phasor(7), 1)];
        set.g4 = vec![HarmonicTerm::from_phasor(set.cubic_phasor(9), 1)];
        set.g5 = vec![HarmonicTerm::from_phasor(set.cubic_phasor(11), 1)];
        set.with_epsilon(epsilon)
    }
}

/// Derive the phase model of `params`, with fifth-order correction `delta`.
pub fn build_coupling(params: &SystemParams, delta: f64) -> Result<PhaseCouplingSet> {
    params.validate()?;
    let rc = reduction_constants(params, delta)?;
    let mut beta = ByIndex::default();
    let mut gamma = ByIndex::default();
    for (k, a) in params.coeffs.coupling_terms() {
        let (b, g) = beta_gamma(a.norm(), a.arg(), rc.c_ratio);
        beta.set(k, b);
        gamma.set(k, g);
    }
    let a_m1 = params.coeffs.a_m1;
    let correction = HarmonicTerm::from_phasor(-params.lambda * delta * a_m1, 1);
    let mut set = PhaseCouplingSet::from_beta_gamma(
        params.n_osc,
        params.epsilon,
        params.lambda,
        rc.r_star_sq,
        rc.omega_cap,
        beta,
        gamma,
        correction,
    );
    set.delta = delta;
    Ok(set)
}

/// One row of the `xi / chi` table: the merged harmonic of a coupling function,
/// split by its power of `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalHarmonic {
    pub function: CouplingFn,
    /// The complete merged term `xi cos(order x + chi)`.
    pub term: HarmonicTerm,
    /// Part that survives at `lambda = 0` (`xi^0`, `chi^0`).
    pub leading: Option<HarmonicTerm>,
    /// Part proportional to `lambda`, with the factor `lambda` removed (`xi^1`,
    /// `chi^1`).
    pub first_order: Option<HarmonicTerm>,
}

fn nonzero(t: HarmonicTerm) -> Option<HarmonicTerm> {
    (t.amplitude != 0.0).then_some(t)
}

/// Merged `(xi, chi)` representation of every non-vanishing harmonic.
pub fn canonical_xi_chi(coupling: &PhaseCouplingSet) -> Vec<CanonicalHarmonic> {
    let lam = coupling.lambda;
    let mut out = Vec::new();
    let mut push = |function, order, leading: Complex, scaled: Complex| {
        let term = HarmonicTerm::from_phasor(leading + scaled, order);
        if term.amplitude == 0.0 {
            return;
        }
        out.push(CanonicalHarmonic {
            function,
            term,
            leading: nonzero(HarmonicTerm::from_phasor(leading, order)),
            first_order: nonzero(HarmonicTerm::from_phasor(scaled / lam, order)),
        });
    };

    let lead = Complex::from_polar(coupling.beta.get(-1), coupling.gamma.get(-1));
    let cubic: Complex = [3, 8, 10]
        .iter()
        .map(|&k| coupling.cubic_phasor(k))
        .sum::<Complex>()
        + coupling.cubic_phasor(2).conj()
        + coupling.correction.phasor();
    let zero = Complex::new(0.0, 0.0);
    push(CouplingFn::G2, 1, lead, cubic);
    push(CouplingFn::G2, 2, zero, coupling.cubic_phasor(6));
    push(CouplingFn::G3, 1, zero, coupling.cubic_phasor(7));
    push(CouplingFn::G4, 1, zero, coupling.cubic_phasor(9));
    push(CouplingFn::G5, 1, zero, coupling.cubic_phasor(11));
    out
}
