//! The `d`-dimensional extension: `τ = 1/(1 + M d)`, the Schmidt input
//! family, the unitary model of the channel action on `A ⊗ C`, and the
//! entanglement threshold on `τγ`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{re, ComplexMatrix, DensityMatrix, C64};

const SCHMIDT_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuditConfig {
    pub d: usize,
    /// Schmidt coefficients of `|φ>_AB`, descending, `Σ b_i² = 1`.
    pub schmidt_b: Vec<f64>,
    /// Two largest Schmidt coefficients of the output pure state.
    pub schmidt_a: (f64, f64),
    /// Flag-partition coefficients entering `M`; zero for a `|0>` flag.
    pub flag_c: (f64, f64),
    /// Replaces `max(b1 b2, c1 c2)` when set.
    pub m_override: Option<f64>,
    pub p: f64,
}

impl QuditConfig {
    /// `a` defaults to the two leading entries of `b`.
    pub fn new(d: usize, schmidt_b: Vec<f64>, p: f64) -> Result<Self> {
        let a = (
            schmidt_b.first().copied().unwrap_or(0.0),
            schmidt_b.get(1).copied().unwrap_or(0.0),
        );
        let cfg = Self {
            d,
            schmidt_b,
            schmidt_a: a,
            flag_c: (0.0, 0.0),
            m_override: None,
            p,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_schmidt_a(mut self, a1: f64, a2: f64) -> Result<Self> {
        self.schmidt_a = (a1, a2);
        self.validate()?;
        Ok(self)
    }

    pub fn with_flag_c(mut self, c1: f64, c2: f64) -> Result<Self> {
        self.flag_c = (c1, c2);
        self.validate()?;
        Ok(self)
    }

    pub fn with_m(mut self, m: f64) -> Result<Self> {
        self.m_override = Some(m);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(invalid(format!("dimension {} < 2", self.d)));
        }
        let b = &self.schmidt_b;
        if b.is_empty() || b.len() > self.d {
            return Err(invalid(format!("need 1..={} Schmidt coefficients, got {}", self.d, b.len())));
        }
        if b.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid("Schmidt coefficients must be nonnegative"));
        }
        if b.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid("Schmidt coefficients must be descending"));
        }
        let norm: f64 = b.iter().map(|x| x * x).sum();
        if (norm - 1.0).abs() > SCHMIDT_TOL {
            return Err(invalid(format!("squared Schmidt coefficients sum to {norm}, not 1")));
        }
        let (a1, a2) = self.schmidt_a;
        if !(a1 >= a2 && a2 >= 0.0 && a1 * a1 + a2 * a2 <= 1.0 + SCHMIDT_TOL) {
            return Err(invalid(format!("invalid leading Schmidt pair ({a1}, {a2})")));
        }
        let (c1, c2) = self.flag_c;
        if !(c1 >= 0.0 && c2 >= 0.0 && c1.is_finite() && c2.is_finite()) {
            return Err(invalid("flag coefficients must be nonnegative"));
        }
        if let Some(m) = self.m_override {
            if !m.is_finite() || m < 0.0 {
                return Err(invalid(format!("M = {m} must be nonnegative")));
            }
        }
        if !self.p.is_finite() || !(0.0..=1.0).contains(&self.p) {
            return Err(invalid(format!("p = {} outside [0, 1]", self.p)));
        }
        Ok(())
    }

    /// `max(b1 b2, c1 c2)` unless overridden.
    pub fn m(&self) -> f64 {
        self.m_override.unwrap_or_else(|| {
            let b2 = self.schmidt_b.get(1).copied().unwrap_or(0.0);
            (self.schmidt_b[0] * b2).max(self.flag_c.0 * self.flag_c.1)
        })
    }

    /// `M < a1 a2`. Reported, not enforced.
    pub fn premise_holds(&self) -> bool {
        self.m() < self.schmidt_a.0 * self.schmidt_a.1
    }

    pub fn gamma(&self) -> f64 {
        1.0 - self.p
    }

    /// Full dimension `d³` of `A ⊗ B ⊗ C`.
    pub fn full_dim(&self) -> usize {
        self.d.pow(3)
    }
}

pub fn tau(config: &QuditConfig) -> f64 {
    1.0 / (1.0 + config.m() * config.d as f64)
}

/// `Σ b_i |i>_A |i>_B |0>_C`.
fn phi_ket(config: &QuditConfig) -> Vec<C64> {
    let d = config.d;
    let mut ket = vec![re(0.0); config.full_dim()];
    for (i, &b) in config.schmidt_b.iter().enumerate() {
        ket[(i * d + i) * d] = re(b);
    }
    ket
}

/// `t |φ><φ| ⊗ |0><0| + (1 − t) I/D` for an explicit weight `t`.
pub fn qudit_input_with_tau(config: &QuditConfig, t: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("tau = {t} outside [0, 1]")));
    }
    let n = config.full_dim();
    let pure = ComplexMatrix::outer(&phi_ket(config)).scale_real(t);
    let mixed = ComplexMatrix::identity(n).scale_real((1.0 - t) / n as f64);
    let d = config.d;
    DensityMatrix::new(&pure + &mixed, vec![d, d, d])
}

/// The input state at `τ` from [`tau`].
pub fn qudit_input(config: &QuditConfig) -> Result<DensityMatrix> {
    qudit_input_with_tau(config, tau(config))
}

/// Default `U_AC`: `|i>_A |0>_C ↦ |i>_A |+>_C` with `|+> = d^{-1/2} Σ |k>`,
/// completed to a unitary by Gram–Schmidt over the computational basis.
pub fn default_u_ac(d: usize) -> ComplexMatrix {
    let n = d * d;
    let amp = 1.0 / (d as f64).sqrt();
    let mut cols: Vec<Option<Vec<C64>>> = vec![None; n];
    for i in 0..d {
        let mut v = vec![re(0.0); n];
        for k in 0..d {
            v[i * d + k] = re(amp);
        }
        cols[i * d] = Some(v);
    }
    let mut basis: Vec<Vec<C64>> = cols.iter().flatten().cloned().collect();
    let mut candidates = (0..n).map(|k| {
        let mut e = vec![re(0.0); n];
        e[k] = re(1.0);
        e
    });
    for slot in cols.iter_mut().filter(|c| c.is_none()) {
        loop {
            let mut v = candidates.next().expect("basis completion");
            for b in &basis {
                let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
                basis.push(v.clone());
                *slot = Some(v);
                break;
            }
        }
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, z) in col.expect("filled").into_iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Lifts a unitary on `A ⊗ C` to `A ⊗ B ⊗ C` (identity on B).
pub fn lift_u_ac(u_ac: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = d * d * d;
    let mut u = ComplexMatrix::zeros(n, n);
    let idx = |a: usize, b: usize, c: usize| (a * d + b) * d + c;
    for a2 in 0..d {
        for c2 in 0..d {
            for a in 0..d {
                for c in 0..d {
                    let z = u_ac[(a2 * d + c2, a * d + c)];
                    if z == re(0.0) {
                        continue;
                    }
                    for b in 0..d {
                        u[(idx(a2, b, c2), idx(a, b, c))] = z;
                    }
                }
            }
        }
    }
    u
}

/// `σ = U (γτ |φ0><φ0| + (1 − γτ) I/D) U†` with `γ = 1 − p`.
pub fn qudit_evolve(config: &QuditConfig, u_ac: &ComplexMatrix) -> Result<DensityMatrix> {
    let d = config.d;
    if u_ac.rows() != d * d || u_ac.cols() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: u_ac.rows(),
        });
    }
    let err = u_ac.isometry_error();
    if err > UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    let inner = qudit_input_with_tau(config, config.gamma() * tau(config))?;
    let u = lift_u_ac(u_ac, d);
    DensityMatrix::new(inner.matrix().conjugate_by(&u).hermitian_part(), vec![d, d, d])
}

/// Entanglement verdict `τγ > 1/(1 + a1 a2 d)`.
pub fn qudit_entangled(tau_gamma: f64, a1: f64, a2: f64, d: usize) -> bool {
    tau_gamma > entanglement_threshold(a1, a2, d)
}

pub fn entanglement_threshold(a1: f64, a2: f64, d: usize) -> f64 {
    1.0 / (1.0 + a1 * a2 * d as f64)
}

/// Weight above which `x |ψ><ψ| + (1 − x) I/d²` has a negative partial
/// transpose, for `|ψ>` with leading Schmidt pair `(a1, a2)`.
pub fn ppt_threshold(a1: f64, a2: f64, d: usize) -> f64 {
    1.0 / (1.0 + a1 * a2 * (d * d) as f64)
}

/// `x |ψ><ψ| + (1 − x) I/d²` with `|ψ> = Σ a_i |ii>`.
pub fn isotropic_like_state(x: f64, schmidt: &[f64], d: usize) -> Result<DensityMatrix> {
    if schmidt.len() > d {
        return Err(invalid("more Schmidt coefficients than the dimension"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("weight {x} outside [0, 1]")));
    }
    let mut ket = vec![re(0.0); d * d];
    for (i, &a) in schmidt.iter().enumerate() {
        ket[i * d + i] = re(a);
    }
    let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > SCHMIDT_TOL {
        return Err(invalid("Schmidt vector is not normalized"));
    }
    let pure = ComplexMatrix::outer(&ket).scale_real(x);
    let mixed = ComplexMatrix::identity(d * d).scale_real((1.0 - x) / (d * d) as f64);
    DensityMatrix::new(&pure + &mixed, vec![d, d])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuditReport {
    pub tau: f64,
    pub gamma_tau: f64,
    pub threshold: f64,
    pub entangled: bool,
    pub premise_holds: bool,
}

pub fn qudit_report(config: &QuditConfig) -> QuditReport {
    let t = tau(config);
    let gt = config.gamma() * t;
    let (a1, a2) = config.schmidt_a;
    QuditReport {
        tau: t,
        gamma_tau: gt,
        threshold: entanglement_threshold(a1, a2, config.d),
        entangled: qudit_entangled(gt, a1, a2, config.d),
        premise_holds: config.premise_holds(),
    }
}
