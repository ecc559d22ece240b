//! Prepare, transmit, read the flag, post-select. Also the batch repeater
//! that turns the per-run flag bits into a list of entangled positions.

mod claims;

pub use claims::{verify_claims, ClaimRecord, ClaimValue, Verdict};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::apply_joint;
use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, DensityMatrix, PSD_TOL};
use crate::states::{self, input_tripartite, ppt_check, InputSpec};

/// Unnormalised split of an X state into its coherent Bell part and the
/// remainder.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub branch0: ComplexMatrix,
    pub branch1: ComplexMatrix,
    /// `Tr(branch0)`.
    pub p0: f64,
}

/// Splits `σ_AB` as `branch0 + branch1` where `branch0` carries the full
/// `|00><11|` coherence `γ`: entries `|γ|` on `(0,0)`, `(3,3)` and `γ`, `γ*`
/// on the corners. Fails if the remainder is not PSD.
pub fn decompose_output(sigma_ab: &DensityMatrix) -> Result<Decomposition> {
    if sigma_ab.dims() != [2, 2] {
        return Err(invalid(format!("expected a two-qubit state, got dims {:?}", sigma_ab.dims())));
    }
    let err = states::x_shape_error(sigma_ab.matrix());
    if err >= states::X_SHAPE_TOL {
        return Err(Error::NotXShaped(err));
    }
    let gamma = sigma_ab.matrix()[(0, 3)];
    let mag = gamma.norm();
    let mut branch0 = ComplexMatrix::zeros(4, 4);
    branch0[(0, 0)] = mag.into();
    branch0[(3, 3)] = mag.into();
    branch0[(0, 3)] = gamma;
    branch0[(3, 0)] = gamma.conj();
    let branch1 = sigma_ab.matrix() - &branch0;
    let min = hermitian_eig(&branch1)?.min();
    if min < -PSD_TOL {
        return Err(Error::NotPsd(min));
    }
    Ok(Decomposition {
        branch0,
        branch1,
        p0: 2.0 * mag,
    })
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub sigma_ab_premeasure: DensityMatrix,
    /// Normalised flag-0 branch, `None` when `p0 = 0`.
    pub branch0: Option<DensityMatrix>,
    /// Normalised flag-1 branch, `None` when `p0 = 1`.
    pub branch1: Option<DensityMatrix>,
    pub p0: f64,
    /// Probability actually used when drawing the flag.
    pub flag_zero_probability: f64,
    pub branch0_min_pt_eigenvalue: Option<f64>,
    pub sampled_outcome: u8,
    /// Outcome 0 was drawn and branch 0 fails the PPT test.
    pub localized: bool,
}

/// Deterministic part of the pipeline: everything except the flag draw.
#[derive(Clone, Debug)]
pub struct PipelineState {
    pub sigma_ab_premeasure: DensityMatrix,
    pub decomposition: Decomposition,
    pub branch0: Option<DensityMatrix>,
    pub branch1: Option<DensityMatrix>,
    pub branch0_min_pt_eigenvalue: Option<f64>,
    pub flag_zero_probability: f64,
}

const EMPTY_BRANCH: f64 = 1e-15;

pub fn prepare_pipeline(spec: &InputSpec, p: f64) -> Result<PipelineState> {
    let rho_abc = input_tripartite(spec)?;
    let sigma_ab = apply_joint(&rho_abc, p)?.ab_marginal()?;
    let dec = decompose_output(&sigma_ab)?;
    let branch0 = if dec.p0 > EMPTY_BRANCH {
        Some(DensityMatrix::normalized(&dec.branch0, vec![2, 2])?)
    } else {
        None
    };
    let branch1 = if 1.0 - dec.p0 > EMPTY_BRANCH {
        Some(DensityMatrix::normalized(&dec.branch1, vec![2, 2])?)
    } else {
        None
    };
    let branch0_min_pt_eigenvalue = match &branch0 {
        Some(b) => Some(ppt_check(b, 1)?.min_pt_eigenvalue),
        None => None,
    };
    let q = spec.flag_zero_probability(dec.p0);
    Ok(PipelineState {
        sigma_ab_premeasure: sigma_ab,
        flag_zero_probability: q,
        decomposition: dec,
        branch0,
        branch1,
        branch0_min_pt_eigenvalue,
    })
}

impl PipelineState {
    pub fn branch0_is_npt(&self) -> bool {
        self.branch0_min_pt_eigenvalue.is_some_and(|m| m < -PSD_TOL)
    }

    fn finish(self, outcome: u8) -> PipelineResult {
        let localized = outcome == 0 && self.branch0_is_npt();
        PipelineResult {
            sigma_ab_premeasure: self.sigma_ab_premeasure,
            p0: self.decomposition.p0,
            branch0: self.branch0,
            branch1: self.branch1,
            flag_zero_probability: self.flag_zero_probability,
            branch0_min_pt_eigenvalue: self.branch0_min_pt_eigenvalue,
            sampled_outcome: outcome,
            localized,
        }
    }
}

/// Flag draw for run `stream` of a seeded batch: outcome 0 iff `u < q`, with
/// `u` the first uniform of ChaCha8 stream `stream`.
pub fn sample_flag(seed: u64, stream: u64, q: f64) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let u: f64 = rng.random();
    if u < q {
        0
    } else {
        1
    }
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// One run: prepare, transmit, decompose, draw the flag.
pub fn run_pipeline(spec: &InputSpec, p: f64, seed: u64) -> Result<PipelineResult> {
    check_p(p)?;
    let state = prepare_pipeline(spec, p)?;
    let outcome = sample_flag(seed, 0, state.flag_zero_probability);
    Ok(state.finish(outcome))
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchResult {
    pub n: usize,
    pub flag_bits: Vec<u8>,
    pub entangled_indices: Vec<usize>,
    pub empirical_rate: f64,
    /// `⌊n (1 − p)⌋`.
    pub paper_predicted: u64,
    /// `n · p0`.
    pub model_predicted: f64,
    pub p0: f64,
    pub flag_zero_probability: f64,
}

/// `n` runs sharing one deterministic state; run `i` draws its flag from
/// stream `i` of the seeded generator, so the bits do not depend on thread
/// scheduling.
pub fn batch_repeater(n: usize, spec: &InputSpec, p: f64, seed: u64) -> Result<BatchResult> {
    if n == 0 {
        return Err(invalid("batch size must be at least 1"));
    }
    check_p(p)?;
    let state = prepare_pipeline(spec, p)?;
    let q = state.flag_zero_probability;
    let flag_bits: Vec<u8> = (0..n as u64).into_par_iter().map(|i| sample_flag(seed, i, q)).collect();
    let entangled_indices: Vec<usize> = flag_bits
        .iter()
        .enumerate()
        .filter(|(_, b)| **b == 0)
        .map(|(i, _)| i)
        .collect();
    let p0 = state.decomposition.p0;
    Ok(BatchResult {
        n,
        empirical_rate: entangled_indices.len() as f64 / n as f64,
        entangled_indices,
        flag_bits,
        paper_predicted: (n as f64 * (1.0 - p)).floor() as u64,
        model_predicted: n as f64 * p0,
        p0,
        flag_zero_probability: q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_ket, FlagMix};
    use approx::assert_abs_diff_eq;

    const THIRD: f64 = 1.0 / 3.0;

    fn reference_spec() -> InputSpec {
        InputSpec::new(THIRD).unwrap()
    }

    #[test]
    fn decomposition_at_reference_point() {
        let state = prepare_pipeline(&reference_spec(), THIRD).unwrap();
        let dec = &state.decomposition;
        assert_abs_diff_eq!(dec.p0, 2.0 / 9.0, epsilon = 1e-15);
        let b0 = state.branch0.as_ref().unwrap();
        assert!(b0.fidelity_with_ket(&bell_ket(0)) > 1.0 - 1e-12);
        let expected = ComplexMatrix::diag(&[2.0 / 9.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 9.0]).scale_real(9.0 / 7.0);
        assert!(state.branch1.as_ref().unwrap().matrix().max_abs_diff(&expected) < 1e-14);
        let sum = &dec.branch0 + &dec.branch1;
        assert!(sum.max_abs_diff(state.sigma_ab_premeasure.matrix()) < 1e-15);
    }

    #[test]
    fn diagonal_input_has_empty_coherent_branch() {
        let state = prepare_pipeline(&reference_spec(), 1.0).unwrap();
        assert_eq!(state.decomposition.p0, 0.0);
        assert!(state.branch0.is_none());
        assert!(state
            .branch1
            .unwrap()
            .matrix()
            .max_abs_diff(state.sigma_ab_premeasure.matrix())
            < 1e-15);
    }

    #[test]
    fn decomposition_rejects_out_of_family_states() {
        let bell = states::bell_state(0);
        // Bell remainder is zero, hence PSD.
        assert!(decompose_output(&bell).is_ok());
        let mut m = ComplexMatrix::diag(&[0.5, 0.1, 0.1, 0.3]);
        m[(0, 3)] = 0.35.into();
        m[(3, 0)] = 0.35.into();
        let rho = DensityMatrix::new(m, vec![2, 2]).unwrap();
        assert!(matches!(decompose_output(&rho), Err(Error::NotPsd(_))));
        let plus = DensityMatrix::from_ket(&[1.0.into(); 4], vec![2, 2]).unwrap();
        assert!(matches!(decompose_output(&plus), Err(Error::NotXShaped(_))));
    }

    #[test]
    fn pipeline_reference_run() {
        let r = run_pipeline(&reference_spec(), THIRD, 1).unwrap();
        assert_abs_diff_eq!(r.branch0_min_pt_eigenvalue.unwrap(), -0.5, epsilon = 1e-12);
        assert!(ppt_check(&r.sigma_ab_premeasure, 1).unwrap().is_ppt);
        assert_eq!(r.localized, r.sampled_outcome == 0);
    }

    #[test]
    fn full_dephasing_never_localizes() {
        for seed in 0..20 {
            let r = run_pipeline(&reference_spec(), 1.0, seed).unwrap();
            assert!(!r.localized);
            assert_eq!(r.sampled_outcome, 1);
        }
    }

    #[test]
    fn batch_is_deterministic() {
        let a = batch_repeater(500, &reference_spec(), THIRD, 42).unwrap();
        let b = batch_repeater(500, &reference_spec(), THIRD, 42).unwrap();
        assert_eq!(a.flag_bits, b.flag_bits);
        let c = batch_repeater(500, &reference_spec(), THIRD, 43).unwrap();
        assert_ne!(a.flag_bits, c.flag_bits);
        assert_eq!(a.paper_predicted, 333);
        assert!(batch_repeater(0, &reference_spec(), THIRD, 1).is_err());
    }

    #[test]
    fn flag_mix_overrides_draw_probability() {
        let spec = reference_spec().with_flag_mix(FlagMix::new(1.0, 0.0).unwrap());
        let b = batch_repeater(50, &spec, THIRD, 3).unwrap();
        assert_eq!(b.entangled_indices.len(), 50);
        assert_abs_diff_eq!(b.p0, 2.0 / 9.0, epsilon = 1e-15);
    }
}
