//! Two-cluster reduction, synchrony, and the root structure of the cluster
//! phase-difference equation.
//!
//! Cluster 1 holds a fraction `q` of the oscillators at phase `phi_1`, cluster 2 a
//! fraction `p` at `phi_2`, and `alpha = q - p`. The phase difference
//! `Psi = phi_1 - phi_2` obeys `Psi' = eps G(Psi)` with
//!
//! ```text
//! G(Psi) = 2 sin(Psi/2) [A1 cos(Psi/2) + B1 sin(Psi/2) + A2 cos(3Psi/2) + B2 sin(3Psi/2)]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_form::NormalFormCoefficients;
use crate::reduction::PhaseCouplingSet;

/// Two-cluster split with `q = (1 + alpha)/2`, `p = (1 - alpha)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
}

impl ClusterConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                field: "alpha",
                reason: format!("must lie in (-1, 1), got {alpha}"),
            });
        }
        Ok(Self {
            alpha,
            p: (1.0 - alpha) / 2.0,
            q: (1.0 + alpha) / 2.0,
        })
    }

    /// `q_count` oscillators in cluster 1, `p_count` in cluster 2.
    pub fn from_counts(q_count: usize, p_count: usize) -> Result<Self> {
        if q_count == 0 || p_count == 0 {
            return Err(Error::InvalidParameter {
                field: "cluster sizes",
                reason: format!("both clusters must be non-empty, got ({q_count}, {p_count})"),
            });
        }
        let n = (q_count + p_count) as f64;
        Ok(Self {
            alpha: (q_count as f64 - p_count as f64) / n,
            p: p_count as f64 / n,
            q: q_count as f64 / n,
        })
    }

    /// The same split seen from the other cluster.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: -self.alpha,
            p: self.q,
            q: self.p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClusterCoefficients {
    pub a1_coef: f64,
    pub b1_coef: f64,
    pub a2_coef: f64,
    pub b2_coef: f64,
}

impl ClusterCoefficients {
    fn max_abs(&self) -> f64 {
        [self.a1_coef, self.b1_coef, self.a2_coef, self.b2_coef]
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Shorthand accessors for the `(beta_k, gamma_k)` table of a coupling set.
struct Groups<'a>(&'a PhaseCouplingSet);

impl Groups<'_> {
    fn b(&self, k: i32) -> f64 {
        self.0.beta.get(k)
    }
    fn g(&self, k: i32) -> f64 {
        self.0.gamma.get(k)
    }
    fn r2(&self) -> f64 {
        self.0.r_star_sq
    }
    fn corr(&self) -> (f64, f64) {
        (self.0.correction.amplitude, self.0.correction.phase_offset)
    }
}

fn cos(x: f64) -> f64 {
    x.cos()
}

/// Interaction part of the phase velocity of each cluster, so that the
/// velocity of cluster `i` is `Omega + eps h_i`.
pub fn two_cluster_h(
    phi1: f64,
    phi2: f64,
    cfg: &ClusterConfig,
    coupling: &PhaseCouplingSet,
) -> (f64, f64) {
    let h1 = h1_literal(phi1, phi2, cfg.q, cfg.p, coupling);
    let h2 = h1_literal(phi2, phi1, cfg.p, cfg.q, coupling);
    (h1, h2)
}

fn h1_literal(phi1: f64, phi2: f64, q: f64, p: f64, coupling: &PhaseCouplingSet) -> f64 {
    let s = Groups(coupling);
    let d = phi2 - phi1;
    let (b, g) = (|k| s.b(k), |k| s.g(k));
    let (xi, chi) = s.corr();

    let linear = b(-1) * (q * cos(g(-1)) + p * cos(g(-1) - phi1 + phi2))
        + xi * (q * cos(chi) + p * cos(chi + d));
    let cubic = b(2) * (q * cos(g(2)) + p * cos(g(2) + phi1 - phi2))
        + b(3) * (q * cos(g(3)) + p * cos(g(3) + d))
        + b(4) * (p + q) * cos(g(4))
        + b(5) * ((p * p + q * q) * cos(g(5)) + p * q * cos(g(5) + d) + p * q * cos(g(5) - d))
        + b(6) * (q * cos(g(6)) + p * cos(g(6) + 2.0 * d))
        + b(7) * (q * q * cos(g(7)) + 2.0 * p * q * cos(g(7) + d) + p * p * cos(g(7) + 2.0 * d))
        + b(8) * (q * cos(g(8)) + p * cos(g(8) + d))
        + b(9)
            * (q * q * cos(g(9))
                + p * q * cos(g(9) + 2.0 * d)
                + p * q * cos(g(9) - d)
                + p * p * cos(g(9) + d))
        + b(10) * (q * cos(g(10)) + p * cos(g(10) + d))
        + b(11)
            * (q * q * q * cos(g(11))
                + 2.0 * p * q * q * cos(g(11) + d)
                + q * p * p * cos(g(11) + 2.0 * d)
                + p * q * q * cos(g(11) - d)
                + 2.0 * q * p * p * cos(g(11))
                + p * p * p * cos(g(11) + d));
    linear + s.r2() * cubic
}

/// `H1 - H2` at `(phi_1, phi_2) = (Psi, 0)`, written out term by term.
pub fn g_raw(psi: f64, cfg: &ClusterConfig, coupling: &PhaseCouplingSet) -> f64 {
    let s = Groups(coupling);
    let (p, q) = (cfg.p, cfg.q);
    let (b, g) = (|k| s.b(k), |k| s.g(k));
    let (xi, chi) = s.corr();
    // pairwise order-1 shape shared by several groups
    let first = |gk: f64| (q - p) * cos(gk) + p * cos(gk - psi) - q * cos(gk + psi);

    let linear = b(-1) * first(g(-1)) + xi * first(chi);
    let cubic = b(2) * ((q - p) * cos(g(2)) + p * cos(g(2) + psi) - q * cos(g(2) - psi))
        + b(3) * first(g(3))
        + b(6) * ((q - p) * cos(g(6)) + p * cos(g(6) - 2.0 * psi) - q * cos(g(6) + 2.0 * psi))
        + b(7)
            * ((q * q - p * p) * cos(g(7)) + 2.0 * p * q * cos(g(7) - psi)
                - 2.0 * p * q * cos(g(7) + psi)
                + p * p * cos(g(7) - 2.0 * psi)
                - q * q * cos(g(7) + 2.0 * psi))
        + b(8) * first(g(8))
        + b(9)
            * ((q * q - p * p) * cos(g(9)) + p * p * cos(g(9) - psi) - q * q * cos(g(9) + psi)
                + p * q * cos(g(9) - 2.0 * psi)
                - p * q * cos(g(9) + 2.0 * psi)
                + p * q * cos(g(9) + psi)
                - p * q * cos(g(9) - psi))
        + b(10) * first(g(10))
        + b(11)
            * ((q * q * q - 2.0 * p * q * q + 2.0 * q * p * p - p * p * p) * cos(g(11))
                + (2.0 * p * q * q - q * p * p + p * p * p) * cos(g(11) - psi)
                + (-q * q * q + p * q * q - 2.0 * q * p * p) * cos(g(11) + psi)
                + q * p * p * cos(g(11) - 2.0 * psi)
                - p * q * q * cos(g(11) + 2.0 * psi));
    linear + s.r2() * cubic
}

/// `A1, B1, A2, B2` from the cluster fractions.
pub fn ab_coefficients(cfg: &ClusterConfig, coupling: &PhaseCouplingSet) -> ClusterCoefficients {
    let s = Groups(coupling);
    let (p, q) = (cfg.p, cfg.q);
    let r2 = s.r2();
    let bs = |k| s.b(k) * s.g(k).sin();
    let bc = |k| s.b(k) * s.g(k).cos();
    let (xi, chi) = s.corr();
    let (p2, q2) = (p * p, q * q);

    let a1 = (bs(-1) + xi * chi.sin()) * (p + q)
        + r2 * (-bs(2) * (p + q)
            + bs(11) * (p * p2 + 2.0 * p2 * q + 2.0 * p * q2 + q * q2)
            + bs(7) * (p2 + 4.0 * p * q + q2)
            + bs(9) * (p2 + q2)
            + (p + q) * (bs(10) + bs(3) + bs(6) + bs(8)));
    let b1 = (q - p) * (bc(-1) + xi * chi.cos())
        + r2 * ((q - p) * bc(2)
            + bc(11) * (-p * p2 + 2.0 * p2 * q - 2.0 * p * q2 + q * q2)
            + bc(7) * (q2 - p2)
            + bc(9) * (q2 - p2)
            + (q - p) * (bc(10) + bc(3) + bc(6) + bc(8)));
    let a2 = r2
        * (bs(11) * (p2 * q + p * q2) + bs(7) * (p2 + q2) + bs(6) * (p + q) + 2.0 * p * q * bs(9));
    let b2 = r2 * (bc(11) * (p * q2 - p2 * q) + bc(7) * (q2 - p2) + bc(6) * (q - p));
    let cc = ClusterCoefficients {
        a1_coef: a1,
        b1_coef: b1,
        a2_coef: a2,
        b2_coef: b2,
    };

    #[cfg(debug_assertions)]
    {
        let poly = AlphaPolynomials::from_coupling(coupling).at(cfg.alpha);
        let tol = 1e-12 * (1.0 + cc.max_abs());
        debug_assert!(
            (poly.a1_coef - a1).abs() <= tol
                && (poly.b1_coef - b1).abs() <= tol
                && (poly.a2_coef - a2).abs() <= tol
                && (poly.b2_coef - b2).abs() <= tol,
            "p,q and alpha forms disagree: {cc:?} vs {poly:?}"
        );
    }
    cc
}

/// `A1 cos(Psi/2) + B1 sin(Psi/2) + A2 cos(3Psi/2) + B2 sin(3Psi/2)`.
pub fn bracket(psi: f64, cc: &ClusterCoefficients) -> f64 {
    let (s1, c1) = (psi / 2.0).sin_cos();
    let (s3, c3) = (1.5 * psi).sin_cos();
    cc.a1_coef * c1 + cc.b1_coef * s1 + cc.a2_coef * c3 + cc.b2_coef * s3
}

/// Factored form of `G`, without the factor `eps`.
pub fn g_factored(psi: f64, cc: &ClusterCoefficients) -> f64 {
    2.0 * (psi / 2.0).sin() * bracket(psi, cc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiRoot {
    pub psi: f64,
    /// `G` touches zero without changing sign.
    pub tangential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RootSet<T> {
    /// The function vanishes everywhere; there is no isolated root set.
    IdenticallyZero,
    Roots(Vec<T>),
}

impl<T> RootSet<T> {
    pub fn roots(&self) -> &[T] {
        match self {
            RootSet::IdenticallyZero => &[],
            RootSet::Roots(r) => r,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        matches!(self, RootSet::IdenticallyZero)
    }
}

/// Minimum accepted `grid_size` for [`find_roots`].
pub const MIN_PSI_GRID: usize = 360;
const TANGENTIAL_TOL: f64 = 1e-8;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-14 || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Roots of `G` in `(0, 2 pi)` for given coefficients.
///
/// Since `sin(Psi/2) > 0` on that interval the search runs on the bracket, which
/// keeps sign changes clean near the endpoints.
pub fn find_roots_of(cc: &ClusterCoefficients, grid_size: usize) -> Result<RootSet<PsiRoot>> {
    if grid_size < MIN_PSI_GRID {
        return Err(Error::InvalidParameter {
            field: "grid_size",
            reason: format!("must be at least {MIN_PSI_GRID}, got {grid_size}"),
        });
    }
    if cc.max_abs() == 0.0 {
        return Ok(RootSet::IdenticallyZero);
    }
    let tau = std::f64::consts::TAU;
    let f = |x: f64| bracket(x, cc);
    let xs: Vec<f64> = (0..=grid_size)
        .map(|i| tau * i as f64 / grid_size as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let edge = 1e-12;
    let mut roots: Vec<PsiRoot> = Vec::new();
    let push = |psi: f64, tangential: bool, roots: &mut Vec<PsiRoot>| {
        if psi > edge && psi < tau - edge && roots.iter().all(|r| (r.psi - psi).abs() > 1e-9) {
            roots.push(PsiRoot { psi, tangential });
        }
    };

    for i in 0..grid_size {
        if ys[i] == 0.0 {
            push(xs[i], false, &mut roots);
        } else if ys[i] * ys[i + 1] < 0.0 {
            push(bisect(f, xs[i], xs[i + 1]), false, &mut roots);
        }
    }
    let g = |x: f64| g_factored(x, cc).abs();
    for i in 1..grid_size {
        let (a, b, c) = (ys[i - 1].abs(), ys[i].abs(), ys[i + 1].abs());
        let same_sign = ys[i - 1] * ys[i] > 0.0 && ys[i] * ys[i + 1] > 0.0;
        if same_sign && b <= a && b <= c {
            let x = golden_min(g, xs[i - 1], xs[i + 1]);
            if g(x) < TANGENTIAL_TOL {
                push(x, true, &mut roots);
            }
        }
    }
    roots.sort_by(|a, b| a.psi.total_cmp(&b.psi));
    Ok(RootSet::Roots(roots))
}

pub fn find_roots(
    cfg: &ClusterConfig,
    coupling: &PhaseCouplingSet,
    grid_size: usize,
) -> Result<RootSet<PsiRoot>> {
    find_roots_of(&ab_coefficients(cfg, coupling), grid_size)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyncStability {
    Stable,
    Unstable,
    Degenerate,
}

pub const SYNC_DEGENERACY_BAND: f64 = 1e-12;

/// Linear stability of `Psi = 0` from the sign of `G'(0) = A1 + A2`.
pub fn sync_stability(cc: &ClusterCoefficients) -> SyncStability {
    let s = cc.a1_coef + cc.a2_coef;
    if s.abs() < SYNC_DEGENERACY_BAND {
        SyncStability::Degenerate
    } else if s < 0.0 {
        SyncStability::Stable
    } else {
        SyncStability::Unstable
    }
}

/// Frequency of the fully synchronous solution.
pub fn sync_frequency(
    coupling: &PhaseCouplingSet,
    coeffs: &NormalFormCoefficients,
    delta: f64,
    lambda: f64,
) -> f64 {
    let eps = coupling.epsilon;
    let s = Groups(coupling);
    let cubic: f64 = (2..=11).map(|k| s.b(k) * s.g(k).cos()).sum();
    let a_m1 = coeffs.a_m1;
    coupling.omega_cap + eps * s.b(-1) * s.g(-1).cos() + eps * s.r2() * cubic
        - eps * lambda * delta * a_m1.norm() * a_m1.arg().cos()
}

/// Coefficients of `A1, B1, A2, B2` as cubics in `alpha` (lowest degree first).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlphaPolynomials {
    pub a1: [f64; 4],
    pub b1: [f64; 4],
    pub a2: [f64; 4],
    pub b2: [f64; 4],
}

fn horner(c: &[f64; 4], x: f64) -> f64 {
    ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
}

impl AlphaPolynomials {
    pub fn from_coupling(coupling: &PhaseCouplingSet) -> Self {
        let s = Groups(coupling);
        let r2 = s.r2();
        let bs = |k| s.b(k) * s.g(k).sin();
        let bc = |k| s.b(k) * s.g(k).cos();
        let (xi, chi) = s.corr();

        let a1_0 = bs(-1)
            + xi * chi.sin()
            + r2 * (-bs(2)
                + bs(3)
                + bs(6)
                + bs(8)
                + bs(10)
                + 0.75 * bs(11)
                + 1.5 * bs(7)
                + 0.5 * bs(9));
        let a1_2 = r2 * (0.25 * bs(11) - 0.5 * bs(7) + 0.5 * bs(9));
        let b1_1 = bc(-1)
            + xi * chi.cos()
            + r2 * ([2, 3, 6, 7, 8, 9, 10].iter().map(|&k| bc(k)).sum::<f64>() + 0.25 * bc(11));
        let b1_3 = r2 * 0.75 * bc(11);
        let a2_0 = r2 * (0.25 * bs(11) + 0.5 * bs(7) + bs(6) + 0.5 * bs(9));
        let a2_2 = r2 * (-0.25 * bs(11) + 0.5 * bs(7) - 0.5 * bs(9));
        let b2_1 = r2 * (0.25 * bc(11) + bc(6) + bc(7));
        let b2_3 = -r2 * 0.25 * bc(11);
        Self {
            a1: [a1_0, 0.0, a1_2, 0.0],
            b1: [0.0, b1_1, 0.0, b1_3],
            a2: [a2_0, 0.0, a2_2, 0.0],
            b2: [0.0, b2_1, 0.0, b2_3],
        }
    }

    pub fn at(&self, alpha: f64) -> ClusterCoefficients {
        ClusterCoefficients {
            a1_coef: horner(&self.a1, alpha),
            b1_coef: horner(&self.b1, alpha),
            a2_coef: horner(&self.a2, alpha),
            b2_coef: horner(&self.b2, alpha),
        }
    }

    /// The bracket at fixed `psi0` as a cubic in `alpha`.
    pub fn bracket_cubic(&self, psi0: f64) -> [f64; 4] {
        let (s1, c1) = (psi0 / 2.0).sin_cos();
        let (s3, c3) = (1.5 * psi0).sin_cos();
        std::array::from_fn(|i| {
            self.a1[i] * c1 + self.b1[i] * s1 + self.a2[i] * c3 + self.b2[i] * s3
        })
    }

    fn scale(&self) -> f64 {
        [self.a1, self.b1, self.a2, self.b2]
            .iter()
            .flatten()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Real roots in `(-1, 1)` of a polynomial of degree at most three.
///
/// Coefficients below `zero_tol` are treated as absent. The interval is split at
/// the critical points so that each piece is monotone, then each piece is
/// bisected.
pub fn cubic_roots_in_unit_interval(c: &[f64; 4], zero_tol: f64) -> Vec<f64> {
    let mut c = *c;
    for x in c.iter_mut() {
        if x.abs() <= zero_tol {
            *x = 0.0;
        }
    }
    let f = |x: f64| horner(&c, x);
    // critical points: c1 + 2 c2 x + 3 c3 x^2 = 0
    let mut cuts = vec![-1.0];
    let (qa, qb, qc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    if qa != 0.0 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let t = -0.5 * (qb + qb.signum() * sq);
            let mut crit = Vec::new();
            if t != 0.0 {
                crit.push(t / qa);
                crit.push(qc / t);
            } else {
                crit.push(0.0);
            }
            crit.sort_by(f64::total_cmp);
            cuts.extend(crit.into_iter().filter(|x| *x > -1.0 && *x < 1.0));
        }
    } else if qb != 0.0 {
        let x = -qc / qb;
        if x > -1.0 && x < 1.0 {
            cuts.push(x);
        }
    }
    cuts.push(1.0);

    let mut roots: Vec<f64> = Vec::new();
    let mut push = |x: f64| {
        if x > -1.0 && x < 1.0 && roots.iter().all(|r| (r - x).abs() > 1e-12) {
            roots.push(x);
        }
    };
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            push(lo);
        }
        if flo * fhi < 0.0 {
            push(bisect(f, lo, hi));
        }
    }
    // interior critical points that touch zero are double roots
    for &x in &cuts[1..cuts.len() - 1] {
        if f(x).abs() <= 1e-14 * scale {
            push(x);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Cluster fractions `alpha` in `(-1, 1)` for which `psi0` is a root of `G`.
pub fn alpha_roots_for_psi(psi0: f64, poly: &AlphaPolynomials) -> RootSet<f64> {
    let scale = poly.scale();
    let cubic = poly.bracket_cubic(psi0);
    let tol = 1e-13 * scale;
    if scale == 0.0 || cubic.iter().all(|x| x.abs() <= tol) {
        return RootSet::IdenticallyZero;
    }
    RootSet::Roots(cubic_roots_in_unit_interval(&cubic, tol))
}

/// [`alpha_roots_for_psi`] for the polynomials of a derived coupling.
pub fn alpha_roots_for_coupling(psi0: f64, coupling: &PhaseCouplingSet) -> RootSet<f64> {
    alpha_roots_for_psi(psi0, &AlphaPolynomials::from_coupling(coupling))
}
