//! Correlation and capacity functionals of the two-qubit output: mutual
//! information, classical correlation, discord, coherent information,
//! relative entropy of entanglement and the single-shot joint capacity.
//!
//! All logarithms are base 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::apply_joint;
use crate::error::{invalid, Error, Result};
use crate::linalg::{
    self, binary_entropy, kron, partial_trace, re, relative_entropy_spectra, shannon_entropy, ComplexMatrix,
    DensityMatrix, EigenSpectrum, PSD_TOL,
};
use crate::states::{self, bell_ket, formula_eigenvalues, BellDiagonalParams, InputSpec};

/// Product-state candidates added to the REE search.
pub const REE_PRODUCT_SAMPLES: usize = 200;
const REE_PRODUCT_SEED: u64 = 0x005e_ed0f_5e9a;
const REE_LEVELS: [(f64, f64); 3] = [(0.05, 1.0), (0.01, 0.05), (0.002, 0.01)];

/// `S(A) + S(B) − S(AB)`.
pub fn mutual_information(rho_ab: &DensityMatrix) -> Result<f64> {
    if rho_ab.num_subsystems() != 2 {
        return Err(invalid(format!("expected a bipartite state, got dims {:?}", rho_ab.dims())));
    }
    let sa = linalg::von_neumann_entropy(&partial_trace(rho_ab, &[0])?);
    let sb = linalg::von_neumann_entropy(&partial_trace(rho_ab, &[1])?);
    Ok(sa + sb - linalg::von_neumann_entropy(rho_ab))
}

/// Mutual information through the closed-form marginal entropies and the
/// X-state eigenvalues `v±`, `u±`.
pub fn mutual_information_eigen(params: &BellDiagonalParams) -> Result<f64> {
    let eig = linalg::clip_spectrum(&formula_eigenvalues(params).to_array())?;
    let (sa, sb) = marginal_entropies(params);
    Ok(sa + sb - shannon_entropy(&eig))
}

/// Closed-form `(S(ρ_A), S(σ_B))` from the local Bloch components.
pub fn marginal_entropies(params: &BellDiagonalParams) -> (f64, f64) {
    let s = |x: f64| {
        let t = |y: f64| if y > 0.0 { 0.5 * y * y.log2() } else { 0.0 };
        1.0 - t(1.0 - x) - t(1.0 + x)
    };
    (s(params.r), s(params.s))
}

fn xlog_ratio(x: f64, denom: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x / denom).log2()
    }
}

fn bloch_entropy(x: f64) -> f64 {
    binary_entropy((1.0 + x.min(1.0)) / 2.0)
}

/// The three measurement-direction candidates `(f1, f2, f3)` minimised in
/// the classical correlation. `f1` keeps the `2(1 + s)` normalisation in
/// every term; `f2` and `f3` use `√(r² + c_i²)`.
pub fn f_candidates(params: &BellDiagonalParams) -> Result<(f64, f64, f64)> {
    let BellDiagonalParams { r, s, c1, c2, c3 } = *params;
    if s <= -1.0 {
        return Err(invalid("f1 is undefined at s = -1"));
    }
    let denom = 2.0 * (1.0 + s);
    let f1 = -0.25
        * (xlog_ratio(1.0 + r + s + c3, denom)
            + xlog_ratio(1.0 - r + s - c3, denom)
            + xlog_ratio(1.0 + r - s - c3, denom)
            + xlog_ratio(1.0 - r - s + c3, denom));
    let f2 = bloch_entropy((r * r + c1 * c1).sqrt());
    let f3 = bloch_entropy((r * r + c2 * c2).sqrt());
    Ok((f1, f2, f3))
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// `S(ρ_A) − min{f1, f2, f3}` on the phase-flipped coefficients
/// `((1 − p) c1, (1 − p) c2, c3)`.
pub fn classical_correlation(params: &BellDiagonalParams, p: f64) -> Result<f64> {
    check_p(p)?;
    let out = params.dephased(p);
    let min_eig = formula_eigenvalues(&out).to_array().into_iter().fold(f64::INFINITY, f64::min);
    if min_eig < -PSD_TOL {
        return Err(Error::NotPsd(min_eig));
    }
    let (f1, f2, f3) = f_candidates(&out)?;
    Ok(marginal_entropies(&out).0 - f1.min(f2).min(f3))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Discord {
    pub value: f64,
    pub is_nonnegative: bool,
}

/// `I(σ_AB) − C(σ_AB)`.
pub fn discord(rho_ab: &DensityMatrix, params: &BellDiagonalParams, p: f64) -> Result<Discord> {
    let value = mutual_information(rho_ab)? - classical_correlation(params, p)?;
    Ok(Discord {
        value,
        is_nonnegative: value >= -1e-10,
    })
}

/// `I(σ_AB) − 1`, i.e. the coherent information when the reference qubit is
/// maximally mixed.
pub fn coherent_information(rho_ab: &DensityMatrix) -> Result<f64> {
    Ok(mutual_information(rho_ab)? - 1.0)
}

/// Eigenvalue form of [`coherent_information`].
pub fn coherent_information_eigen(params: &BellDiagonalParams) -> Result<f64> {
    Ok(mutual_information_eigen(params)? - 1.0)
}

/// The closed-form entanglement value: the corner gap itself.
pub fn ree_closed_form(gap: f64) -> Result<f64> {
    if !gap.is_finite() || !(0.0..=1.0).contains(&gap) {
        return Err(invalid(format!("gap = {gap} outside [0, 1]")));
    }
    Ok(gap)
}

/// [`ree_closed_form`] at gap `(1 − p) δ_in`.
pub fn ree_closed_form_pipeline(p: f64, delta_in: f64) -> Result<f64> {
    check_p(p)?;
    ree_closed_form((1.0 - p) * delta_in)
}

/// Bell-basis eigenvalues `(Φ+, Φ−, Ψ+, Ψ−)` of the Bell-diagonal state
/// with correlations `c`.
fn bell_weights(c: [f64; 3]) -> [f64; 4] {
    let [c1, c2, c3] = c;
    [
        (1.0 + c1 - c2 + c3) / 4.0,
        (1.0 - c1 + c2 + c3) / 4.0,
        (1.0 + c1 + c2 - c3) / 4.0,
        (1.0 - c1 - c2 - c3) / 4.0,
    ]
}

/// `D(ρ‖σ)` for Bell-diagonal σ, given `−S(ρ)` and the Bell-basis
/// populations of ρ.
fn bell_diagonal_divergence(neg_entropy: f64, populations: &[f64; 4], weights: &[f64; 4]) -> f64 {
    let mut cross = 0.0;
    for (&q, &w) in populations.iter().zip(weights) {
        if q <= linalg::SUPPORT_TOL {
            continue;
        }
        if w <= linalg::SUPPORT_TOL {
            return f64::INFINITY;
        }
        cross -= q * w.log2();
    }
    (neg_entropy + cross).max(0.0)
}

fn octahedron_grid(center: [f64; 3], step: f64, half_width: f64) -> Vec<[f64; 3]> {
    let n = (half_width / step).round() as i64;
    let mut pts = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let c = [
                    center[0] + i as f64 * step,
                    center[1] + j as f64 * step,
                    center[2] + k as f64 * step,
                ];
                if c.iter().map(|x| x.abs()).sum::<f64>() <= 1.0 + 1e-12 {
                    pts.push(c);
                }
            }
        }
    }
    pts
}

fn random_bloch(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn qubit_from_bloch(v: [f64; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = re((1.0 + v[2]) / 2.0);
    m[(1, 1)] = re((1.0 - v[2]) / 2.0);
    m[(0, 1)] = linalg::c(v[0] / 2.0, -v[1] / 2.0);
    m[(1, 0)] = linalg::c(v[0] / 2.0, v[1] / 2.0);
    m
}

/// Relative entropy of entanglement by direct search over separable
/// candidates: a nested grid (0.05, 0.01, 0.002) over the Bell-diagonal
/// separable octahedron `|c1| + |c2| + |c3| ≤ 1`, plus a fixed-seed sample
/// of mixed product states. Returns an upper bound on the true minimum that
/// is tight for Bell-diagonal inputs.
pub fn ree_numeric(sigma: &DensityMatrix) -> Result<f64> {
    if sigma.dims() != [2, 2] {
        return Err(invalid(format!("expected a two-qubit state, got dims {:?}", sigma.dims())));
    }
    let spec = sigma.spectrum();
    let clipped = linalg::clip_spectrum(&spec.values)?;
    let neg_entropy = -shannon_entropy(&clipped);
    let mut populations = [0.0; 4];
    for (k, pop) in populations.iter_mut().enumerate() {
        *pop = sigma.fidelity_with_ket(&bell_ket(k)).max(0.0);
    }

    let eval = |c: &[f64; 3]| bell_diagonal_divergence(neg_entropy, &populations, &bell_weights(*c));
    let mut best_c = [0.0; 3];
    let mut best = f64::INFINITY;
    for (step, half) in REE_LEVELS {
        let candidates = octahedron_grid(best_c, step, half);
        let (value, c) = candidates
            .par_iter()
            .map(|c| (eval(c), *c))
            .reduce(|| (f64::INFINITY, best_c), |a, b| if b.0 < a.0 { b } else { a });
        if value < best {
            best = value;
            best_c = c;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(REE_PRODUCT_SEED);
    let products: Vec<ComplexMatrix> = (0..REE_PRODUCT_SAMPLES)
        .map(|_| {
            let a = qubit_from_bloch(random_bloch(&mut rng));
            let b = qubit_from_bloch(random_bloch(&mut rng));
            kron(&a, &b)
        })
        .collect();
    let product_best = products
        .par_iter()
        .map(|m| -> Result<f64> {
            let s: EigenSpectrum = linalg::hermitian_eig(m)?;
            Ok(relative_entropy_spectra(&spec, &s))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    Ok(best.min(product_best).max(0.0))
}

/// Candidate inputs for [`joint_capacity_single_shot`].
#[derive(Clone, Debug)]
pub enum InputGrid {
    /// Every Bell-diagonal `c` on a lattice of this spacing inside the PSD
    /// tetrahedron.
    Resolution(f64),
    Explicit(Vec<BellDiagonalParams>),
}

impl InputGrid {
    pub fn candidates(&self) -> Result<Vec<BellDiagonalParams>> {
        match self {
            InputGrid::Explicit(v) => Ok(v.clone()),
            InputGrid::Resolution(step) => {
                if !(step.is_finite() && *step > 0.0 && *step <= 2.0) {
                    return Err(invalid(format!("grid resolution {step} outside (0, 2]")));
                }
                let n = (2.0 / step).round() as i64;
                let mut out = Vec::new();
                for i in 0..=n {
                    for j in 0..=n {
                        for k in 0..=n {
                            let c = [
                                -1.0 + i as f64 * step,
                                -1.0 + j as f64 * step,
                                -1.0 + k as f64 * step,
                            ];
                            if c.iter().any(|x| *x > 1.0 + 1e-12) {
                                continue;
                            }
                            if bell_weights(c).iter().all(|w| *w >= -1e-12) {
                                let c = c.map(|x| x.clamp(-1.0, 1.0));
                                out.push(BellDiagonalParams::bell_diagonal(c[0], c[1], c[2])?);
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Coherent information of the `AB` output for input `ρ_AB ⊗ |0><0|_C`.
pub fn joint_output_coherent_information(params: &BellDiagonalParams, p: f64) -> Result<f64> {
    let rho_ab = states::bell_diagonal_state(params)?;
    let mut flag = ComplexMatrix::zeros(2, 2);
    flag[(0, 0)] = re(1.0);
    let rho_abc = DensityMatrix::new(kron(rho_ab.matrix(), &flag), vec![2, 2, 2])?;
    coherent_information(&apply_joint(&rho_abc, p)?.ab_marginal()?)
}

/// Single-shot (`n = 1`) joint capacity: the largest coherent information of
/// the output over the grid.
pub fn joint_capacity_single_shot(p: f64, grid: &InputGrid) -> Result<f64> {
    check_p(p)?;
    let candidates = grid.candidates()?;
    if candidates.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let values = candidates
        .par_iter()
        .map(|c| joint_output_coherent_information(c, p))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub coherent_info: f64,
    pub e_closed: f64,
    pub e_oracle: f64,
    pub p: f64,
    pub delta_in: f64,
}

/// All functionals of the `AB` output for the tripartite input at noise `p`.
pub fn correlation_report(spec: &InputSpec, p: f64) -> Result<CorrelationReport> {
    check_p(p)?;
    let rho_abc = states::input_tripartite(spec)?;
    let sigma_ab = apply_joint(&rho_abc, p)?.ab_marginal()?;
    let params = spec.bell_params();
    let mutual_info = mutual_information(&sigma_ab)?;
    let classical = classical_correlation(&params, p)?;
    Ok(CorrelationReport {
        mutual_info,
        classical,
        discord: mutual_info - classical,
        coherent_info: mutual_info - 1.0,
        e_closed: ree_closed_form(states::corner_block_gap(&sigma_ab)?)?,
        e_oracle: ree_numeric(&sigma_ab)?,
        p,
        delta_in: spec.delta_in,
    })
}
