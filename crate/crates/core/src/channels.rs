//! Kraus channels: the phase flip on Bob's qubit, the measure-and-prepare
//! channel on the flag, the Pauli capacity expression, Stinespring
//! isometries and the joint application to `ρ_ABC`.

use log::warn;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, kron, re, ComplexMatrix, DensityMatrix};
use crate::states;

/// Completeness tolerance for `Σ N†N = I`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Lower end of the phase-flip regime the joint construction targets.
pub const REGIME_P_MIN: f64 = 1.0 / 3.0;

#[derive(Clone, Debug)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    /// Checks shapes and completeness.
    pub fn new(operators: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| invalid("a channel needs at least one Kraus operator"))?;
        let (rows, cols) = (first.rows(), first.cols());
        for op in &operators {
            if op.rows() != rows || op.cols() != cols {
                return Err(Error::DimensionMismatch {
                    expected: rows * cols,
                    got: op.rows() * op.cols(),
                });
            }
        }
        let channel = Self {
            operators,
            label: label.into(),
        };
        let err = channel.completeness_error();
        if err > COMPLETENESS_TOL {
            return Err(Error::Completeness(err));
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(d)], "identity").expect("identity is complete")
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn input_dim(&self) -> usize {
        self.operators[0].cols()
    }

    pub fn output_dim(&self) -> usize {
        self.operators[0].rows()
    }

    /// `max |Σ N†N − I|`.
    pub fn completeness_error(&self) -> f64 {
        let d = self.input_dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for op in &self.operators {
            sum = &sum + &(&op.adjoint() * op);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PauliNoise {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliNoise {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        let ok = [px, py, pz].iter().all(|v| v.is_finite() && *v >= 0.0);
        if !ok || px + py + pz > 1.0 + 1e-15 {
            return Err(invalid(format!("Pauli probabilities ({px}, {py}, {pz}) are not a sub-distribution")));
        }
        Ok(Self { px, py, pz })
    }

    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }
}

/// One branch of a projective measurement.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub outcome: u8,
    pub probability: f64,
    /// `None` when the outcome has zero probability.
    pub post_state: Option<DensityMatrix>,
}

/// `√(1 − p/2) I` and `√(p/2) Z`.
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("phase flip probability {p} outside [0, 1]")));
    }
    let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p / 2.0).sqrt());
    let k1 = ComplexMatrix::diag(&[1.0, -1.0]).scale_real((p / 2.0).sqrt());
    KrausChannel::new(vec![k0, k1], format!("phase_flip({p})"))
}

/// `1 − 2(px + py + pz + √(px py) + √(px pz) + √(py pz))` and whether it is
/// strictly positive. The raw value is not clamped.
pub fn pauli_quantum_capacity(noise: &PauliNoise) -> (f64, bool) {
    let PauliNoise { px, py, pz } = *noise;
    let raw = 1.0 - 2.0 * (px + py + pz + (px * py).sqrt() + (px * pz).sqrt() + (py * pz).sqrt());
    (raw, raw > 0.0)
}

/// Complete von Neumann measurement of a qubit in the computational basis
/// followed by preparation of `|outcome>`.
#[derive(Clone, Debug)]
pub struct EntanglementBreakingChannel {
    kraus: KrausChannel,
}

impl Default for EntanglementBreakingChannel {
    fn default() -> Self {
        Self::new()
    }
}

impl EntanglementBreakingChannel {
    pub fn new() -> Self {
        let ops = (0..2)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(2, 2);
                m[(k, k)] = re(1.0);
                m
            })
            .collect();
        Self {
            kraus: KrausChannel::new(ops, "measure_prepare_z").expect("projectors are complete"),
        }
    }

    pub fn kraus(&self) -> &KrausChannel {
        &self.kraus
    }

    /// Born-rule outcomes on a single qubit.
    pub fn measure(&self, rho: &DensityMatrix) -> Result<Vec<MeasurementOutcome>> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            });
        }
        Ok((0..2u8)
            .map(|k| {
                let prob = rho.matrix()[(k as usize, k as usize)].re.max(0.0);
                let post = (prob > 0.0).then(|| {
                    let mut ket = [re(0.0); 2];
                    ket[k as usize] = re(1.0);
                    DensityMatrix::from_ket(&ket, vec![2]).expect("basis state")
                });
                MeasurementOutcome {
                    outcome: k,
                    probability: prob,
                    post_state: post,
                }
            })
            .collect())
    }
}

/// `I ⊗ N ⊗ I` for every operator, with `N` placed on `target`.
fn embed(op: &ComplexMatrix, dims: &[usize], target: usize) -> ComplexMatrix {
    let left: usize = dims[..target].iter().product();
    let right: usize = dims[target + 1..].iter().product();
    let mut m = op.clone();
    if left > 1 {
        m = kron(&ComplexMatrix::identity(left), &m);
    }
    if right > 1 {
        m = kron(&m, &ComplexMatrix::identity(right));
    }
    m
}

/// `Σ (I ⊗ N_i ⊗ I) ρ (I ⊗ N_i ⊗ I)†` on subsystem `target`.
pub fn kraus_apply(channel: &KrausChannel, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
    let dims = rho.dims();
    if target >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: target,
            count: dims.len(),
        });
    }
    if dims[target] != channel.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.input_dim(),
            got: dims[target],
        });
    }
    let err = channel.completeness_error();
    if err > COMPLETENESS_TOL {
        return Err(Error::Completeness(err));
    }
    let mut out_dims = dims.to_vec();
    out_dims[target] = channel.output_dim();
    let n: usize = out_dims.iter().product();
    let mut acc = ComplexMatrix::zeros(n, n);
    for op in channel.operators() {
        let k = embed(op, dims, target);
        acc = &acc + &rho.matrix().conjugate_by(&k);
    }
    DensityMatrix::new(acc.hermitian_part(), out_dims)
}

/// Stinespring isometry `U = Σ_i N_i ⊗ |i>_E`, of shape
/// `(d_out · k) × d_in` with the environment as the last factor.
pub fn isometric_extension(channel: &KrausChannel) -> Result<ComplexMatrix> {
    let err = channel.completeness_error();
    if err > COMPLETENESS_TOL {
        return Err(Error::Completeness(err));
    }
    let k = channel.operators().len();
    let (d_out, d_in) = (channel.output_dim(), channel.input_dim());
    let mut u = ComplexMatrix::zeros(d_out * k, d_in);
    for (i, op) in channel.operators().iter().enumerate() {
        for a in 0..d_out {
            for j in 0..d_in {
                u[(a * k + i, j)] = op[(a, j)];
            }
        }
    }
    Ok(u)
}

/// `Tr_E(U ρ U†)` for an isometry built by [`isometric_extension`].
pub fn apply_isometry(u: &ComplexMatrix, env_dim: usize, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if u.cols() != rho.dim() || !u.rows().is_multiple_of(env_dim) {
        return Err(Error::DimensionMismatch {
            expected: u.cols(),
            got: rho.dim(),
        });
    }
    let d_out = u.rows() / env_dim;
    let joint = rho.matrix().conjugate_by(u);
    let reduced = linalg::partial_trace_matrix(&joint, &[d_out, env_dim], &[0])?;
    DensityMatrix::new(reduced.hermitian_part(), vec![d_out])
}

/// Outcomes of a computational-basis measurement of the last qubit, with the
/// conditional states of the remaining subsystems.
pub fn measure_flag(rho_abc: &DensityMatrix) -> Result<Vec<MeasurementOutcome>> {
    let dims = rho_abc.dims();
    if dims.len() < 2 || *dims.last().unwrap() != 2 {
        return Err(invalid(format!("expected a state whose last factor is a qubit flag, got dims {dims:?}")));
    }
    let rest = dims.len() - 1;
    let keep: Vec<usize> = (0..rest).collect();
    let rest_dims = dims[..rest].to_vec();
    let mut outcomes = Vec::with_capacity(2);
    for k in 0..2u8 {
        let mut proj = ComplexMatrix::zeros(2, 2);
        proj[(k as usize, k as usize)] = re(1.0);
        let p = embed(&proj, dims, rest);
        let branch = rho_abc.matrix().conjugate_by(&p);
        let reduced = linalg::partial_trace_matrix(&branch, dims, &keep)?;
        let prob = reduced.trace().re.max(0.0);
        let post = if prob > 1e-15 {
            Some(DensityMatrix::normalized(&reduced, rest_dims.clone())?)
        } else {
            None
        };
        outcomes.push(MeasurementOutcome {
            outcome: k,
            probability: prob,
            post_state: post,
        });
    }
    Ok(outcomes)
}

/// Output of [`apply_joint`].
#[derive(Clone, Debug)]
pub struct JointOutput {
    pub state: DensityMatrix,
    pub p: f64,
    /// Set when `p` lies below the targeted regime `p ≥ 1/3`.
    pub below_regime: bool,
}

impl JointOutput {
    /// `σ_AB` before the flag is read.
    pub fn ab_marginal(&self) -> Result<DensityMatrix> {
        linalg::partial_trace(&self.state, &[0, 1])
    }
}

/// Phase flip `p` on B, then the measure-and-prepare channel on C. A stays
/// untouched.
pub fn apply_joint(rho_abc: &DensityMatrix, p: f64) -> Result<JointOutput> {
    if rho_abc.dims() != [2, 2, 2] {
        return Err(invalid(format!("expected three qubits, got dims {:?}", rho_abc.dims())));
    }
    let below = p < REGIME_P_MIN;
    if below {
        warn!("phase flip p = {p} is below the p >= 1/3 regime");
    }
    let after_b = kraus_apply(&phase_flip(p)?, rho_abc, 1)?;
    let after_c = kraus_apply(EntanglementBreakingChannel::new().kraus(), &after_b, 2)?;
    Ok(JointOutput {
        state: after_c,
        p,
        below_regime: below,
    })
}

/// The printed output family: [`states::gap_family_state`] at gap
/// `(1 − p) δ_in`. Kept separate from the Kraus output, which differs from
/// it on the diagonal.
pub fn template_output_state(p: f64, delta_in: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} outside [0, 1]")));
    }
    states::gap_family_state((1.0 - p) * delta_in)
}
