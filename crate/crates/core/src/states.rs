//! Input states: the two-qubit Bell-diagonal family with local `z` Bloch
//! components, the classically correlated tripartite resource with a flag
//! qubit, and separability / PPT classification.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, re, ComplexMatrix, DensityMatrix, C64, PSD_TOL};

/// Largest off-X entry tolerated by [`corner_block_gap`].
pub const X_SHAPE_TOL: f64 = 1e-12;

/// `(r, s, c1, c2, c3)` with `r`, `s` the `z` components of the local Bloch
/// vectors and `c_i` the `σ_i ⊗ σ_i` correlation coefficients:
///
/// `ρ = ¼ (I⊗I + r σz⊗I + s I⊗σz + Σ c_i σ_i⊗σ_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BellDiagonalParams {
    pub r: f64,
    pub s: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalParams {
    pub fn new(r: f64, s: f64, c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for (name, v) in [("r", r), ("s", s), ("c1", c1), ("c2", c2), ("c3", c3)] {
            if !v.is_finite() || !(-1.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        Ok(Self { r, s, c1, c2, c3 })
    }

    /// Bell-diagonal point (`r = s = 0`).
    pub fn bell_diagonal(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        Self::new(0.0, 0.0, c1, c2, c3)
    }

    /// The input family parameterised by its corner-block gap `δ`:
    /// `c = (δ, −δ, 1 − 2δ)`.
    pub fn from_gap(delta: f64) -> Result<Self> {
        Self::bell_diagonal(delta, -delta, 1.0 - 2.0 * delta)
    }

    /// Coefficients after a phase flip of strength `p` on the second qubit:
    /// the transverse correlations shrink by `1 − p`.
    pub fn dephased(&self, p: f64) -> Self {
        Self {
            c1: (1.0 - p) * self.c1,
            c2: (1.0 - p) * self.c2,
            ..*self
        }
    }

    pub fn is_bell_diagonal(&self) -> bool {
        self.r == 0.0 && self.s == 0.0
    }

    pub fn correlation_sum(&self) -> f64 {
        self.c1.abs() + self.c2.abs() + self.c3.abs()
    }
}

/// The four closed-form eigenvalues of an X state in the Bloch
/// parameterisation. `v±` belong to the odd-parity block `{|01>, |10>}` and
/// `u±` to the even-parity block `{|00>, |11>}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenQuadruple {
    pub v_plus: f64,
    pub v_minus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
}

impl EigenQuadruple {
    pub fn to_array(&self) -> [f64; 4] {
        [self.v_plus, self.v_minus, self.u_plus, self.u_minus]
    }

    pub fn sum(&self) -> f64 {
        self.to_array().iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.to_array().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values sorted descending, for comparison with a numeric spectrum.
    pub fn sorted_desc(&self) -> [f64; 4] {
        let mut a = self.to_array();
        a.sort_by(|x, y| y.total_cmp(x));
        a
    }
}

/// Optional override for the flag outcome statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlagMix {
    pub p0: f64,
    pub p1: f64,
}

impl FlagMix {
    pub fn new(p0: f64, p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p1) || (p0 + p1 - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("flag mixture ({p0}, {p1}) is not a probability pair")));
        }
        Ok(Self { p0, p1 })
    }
}

/// Parameters of the tripartite input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InputSpec {
    /// Corner-block gap of the `AB` marginal, in `(0, 1/3]`.
    pub delta_in: f64,
    /// `None` draws flag outcomes with the post-selection branch weight of the
    /// output; `Some` fixes them.
    pub flag_mix: Option<FlagMix>,
}

impl InputSpec {
    pub fn new(delta_in: f64) -> Result<Self> {
        if !delta_in.is_finite() || delta_in <= 0.0 || delta_in > 1.0 / 3.0 + 1e-15 {
            return Err(invalid(format!("delta_in = {delta_in} outside (0, 1/3]")));
        }
        Ok(Self {
            delta_in,
            flag_mix: None,
        })
    }

    pub fn with_flag_mix(mut self, mix: FlagMix) -> Self {
        self.flag_mix = Some(mix);
        self
    }

    pub fn bell_params(&self) -> BellDiagonalParams {
        BellDiagonalParams::from_gap(self.delta_in).expect("delta_in in range")
    }

    /// Probability of drawing flag 0, falling back to `branch_weight`.
    pub fn flag_zero_probability(&self, branch_weight: f64) -> f64 {
        self.flag_mix.map_or(branch_weight, |m| m.p0)
    }
}

/// Bell basis ket: 0 → `(|00>+|11>)/√2`, 1 → `(|00>−|11>)/√2`,
/// 2 → `(|01>+|10>)/√2`, 3 → `(|01>−|10>)/√2`.
pub fn bell_ket(k: usize) -> [C64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = re(0.0);
    match k {
        0 => [re(h), z, z, re(h)],
        1 => [re(h), z, z, re(-h)],
        2 => [z, re(h), re(h), z],
        3 => [z, re(h), re(-h), z],
        _ => panic!("Bell index {k} out of range"),
    }
}

pub fn bell_state(k: usize) -> DensityMatrix {
    DensityMatrix::from_ket(&bell_ket(k), vec![2, 2]).expect("Bell state is valid")
}

/// Matrix of the Bloch-parameterised two-qubit state. Fails when the
/// parameters give a negative eigenvalue.
pub fn bell_diagonal_state(params: &BellDiagonalParams) -> Result<DensityMatrix> {
    let BellDiagonalParams { r, s, c1, c2, c3 } = *params;
    let mut m = ComplexMatrix::diag(&[
        (1.0 + r + s + c3) / 4.0,
        (1.0 + r - s - c3) / 4.0,
        (1.0 - r + s - c3) / 4.0,
        (1.0 - r - s + c3) / 4.0,
    ]);
    m[(0, 3)] = re((c1 - c2) / 4.0);
    m[(3, 0)] = re((c1 - c2) / 4.0);
    m[(1, 2)] = re((c1 + c2) / 4.0);
    m[(2, 1)] = re((c1 + c2) / 4.0);
    DensityMatrix::new(m, vec![2, 2])
}

/// Two-qubit state with corner gap `g`: diagonal `(½ − g/2, g/2, g/2, ½ − g/2)`
/// and `|00><11|` coherence `g/2`. This is the input marginal at `g = δ_in`
/// and the printed output template at `g = (1 − p) δ_in`.
pub fn gap_family_state(gap: f64) -> Result<DensityMatrix> {
    let half = gap / 2.0;
    let mut m = ComplexMatrix::diag(&[0.5 - half, half, half, 0.5 - half]);
    m[(0, 3)] = re(half);
    m[(3, 0)] = re(half);
    DensityMatrix::new(m, vec![2, 2])
}

/// The classically correlated `ABC` resource (qubits, order A, B, C):
///
/// `(½ − δ)(|000><000| + |110><110|) + (δ/2)(|000><110| + |110><000|)
///  + (δ/2)(|001><001| + |011><011| + |101><101| + |111><111|)`.
///
/// Its `AB` marginal is [`gap_family_state`]`(δ)`. The flag marginal is
/// `diag(1 − 2δ, 2δ)` regardless of `spec.flag_mix`.
pub fn input_tripartite(spec: &InputSpec) -> Result<DensityMatrix> {
    let d = spec.delta_in;
    if !(d > 0.0 && d <= 1.0 / 3.0 + 1e-15) {
        return Err(invalid(format!("delta_in = {d} outside (0, 1/3]")));
    }
    let mut m = ComplexMatrix::zeros(8, 8);
    let (k000, k110) = (0b000, 0b110);
    m[(k000, k000)] = re(0.5 - d);
    m[(k110, k110)] = re(0.5 - d);
    m[(k000, k110)] = re(d / 2.0);
    m[(k110, k000)] = re(d / 2.0);
    for k in [0b001, 0b011, 0b101, 0b111] {
        m[(k, k)] = re(d / 2.0);
    }
    DensityMatrix::new(m, vec![2, 2, 2])
}

/// Closed-form eigenvalues of [`bell_diagonal_state`], evaluated verbatim.
pub fn formula_eigenvalues(params: &BellDiagonalParams) -> EigenQuadruple {
    let BellDiagonalParams { r, s, c1, c2, c3 } = *params;
    let odd = ((r - s).powi(2) + (c1 + c2).powi(2)).sqrt();
    let even = ((r + s).powi(2) + (c1 - c2).powi(2)).sqrt();
    EigenQuadruple {
        v_plus: (1.0 - c3 + odd) / 4.0,
        v_minus: (1.0 - c3 - odd) / 4.0,
        u_plus: (1.0 + c3 + even) / 4.0,
        u_minus: (1.0 + c3 - even) / 4.0,
    }
}

/// Largest modulus among entries off the diagonal and anti-diagonal.
pub fn x_shape_error(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if j != i && j != n - 1 - i {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

fn require_x_state(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(invalid(format!("expected a two-qubit state, got dims {:?}", rho.dims())));
    }
    let err = x_shape_error(rho.matrix());
    if err >= X_SHAPE_TOL {
        return Err(Error::NotXShaped(err));
    }
    Ok(())
}

/// The two eigenvalues `(larger, smaller)` of the `{|00>, |11>}` block.
pub fn corner_block_eigenvalues(rho: &DensityMatrix) -> Result<(f64, f64)> {
    require_x_state(rho)?;
    let m = rho.matrix();
    let (a, d, b) = (m[(0, 0)].re, m[(3, 3)].re, m[(0, 3)]);
    let mean = (a + d) / 2.0;
    let half_gap = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    Ok((mean + half_gap, mean - half_gap))
}

/// Eigenvalue gap of the even-parity corner block of an X state.
pub fn corner_block_gap(rho: &DensityMatrix) -> Result<f64> {
    let (hi, lo) = corner_block_eigenvalues(rho)?;
    Ok(hi - lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparabilityVerdict {
    /// `max{v+, v-, u+, u-}`.
    pub max_eigenvalue: f64,
    pub max_eigenvalue_ok: bool,
    /// `|c1| + |c2| + |c3|`, only reported for Bell-diagonal parameters.
    pub correlation_sum: Option<f64>,
    pub correlation_sum_ok: Option<bool>,
}

impl SeparabilityVerdict {
    pub fn holds(&self) -> bool {
        self.max_eigenvalue_ok && self.correlation_sum_ok.unwrap_or(true)
    }
}

pub fn separability_conditions(params: &BellDiagonalParams) -> SeparabilityVerdict {
    let max = formula_eigenvalues(params).max();
    let sum = params.is_bell_diagonal().then(|| params.correlation_sum());
    SeparabilityVerdict {
        max_eigenvalue: max,
        max_eigenvalue_ok: max <= 0.5 + 1e-12,
        correlation_sum: sum,
        correlation_sum_ok: sum.map(|s| s <= 1.0 + 1e-12),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PptVerdict {
    pub is_ppt: bool,
    pub min_pt_eigenvalue: f64,
}

/// Peres–Horodecki test with respect to one subsystem.
pub fn ppt_check(rho: &DensityMatrix, subsystem: usize) -> Result<PptVerdict> {
    let pt = linalg::partial_transpose(rho, subsystem)?;
    let min = linalg::hermitian_eig(&pt)?.min();
    Ok(PptVerdict {
        is_ppt: min >= -PSD_TOL,
        min_pt_eigenvalue: min,
    })
}
