//! One pass/fail line per acceptance criterion. Divergent criteria are left to
//! fail; nothing here is loosened to turn a line green.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corrconv_core::channels::{
    apply_isometry, apply_joint, isometric_extension, kraus_apply, pauli_quantum_capacity, phase_flip, PauliNoise,
};
use corrconv_core::linalg::{partial_trace, von_neumann_entropy};
use corrconv_core::measures::{correlation_report, ree_closed_form_pipeline, ree_numeric};
use corrconv_core::protocol::{batch_repeater, prepare_pipeline, verify_claims, Verdict};
use corrconv_core::qudit::{isotropic_like_state, qudit_entangled};
use corrconv_core::states::{
    bell_diagonal_state, bell_ket, bell_state, corner_block_eigenvalues, corner_block_gap, gap_family_state,
    input_tripartite, ppt_check, BellDiagonalParams, InputSpec,
};
use corrconv_core::{ComplexMatrix, DensityMatrix, C64};

const THIRD: f64 = 1.0 / 3.0;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn nominal_output() -> Result<DensityMatrix, String> {
    let spec = InputSpec::new(THIRD).map_err(e)?;
    let rho = input_tripartite(&spec).map_err(e)?;
    apply_joint(&rho, THIRD).map_err(e)?.ab_marginal().map_err(e)
}

fn p_sweep() -> Vec<f64> {
    let mut ps: Vec<f64> = (0..).map(|k| THIRD + 0.01 * k as f64).take_while(|p| *p <= 1.0).collect();
    ps.push(1.0);
    ps
}

fn random_qubit(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let data: Vec<C64> = (0..4).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let g = ComplexMatrix::from_vec(2, 2, data).unwrap();
    DensityMatrix::normalized(&(&g * &g.adjoint()), vec![2]).unwrap()
}

fn criterion_1() -> Outcome {
    let (zero, _) = pauli_quantum_capacity(&PauliNoise::new(1.0 / 6.0, 1.0 / 6.0, 0.0).map_err(e)?);
    let (one, _) = pauli_quantum_capacity(&PauliNoise::new(0.0, 0.0, 0.0).map_err(e)?);
    ensure!(zero.abs() <= 1e-12, "capacity at (1/6, 1/6, 0) = {zero:e}");
    ensure!(one == 1.0, "capacity at (0, 0, 0) = {one}");
    Ok(format!("Q(1/6,1/6,0) = {zero:e}, Q(0,0,0) = {one}"))
}

fn criterion_2() -> Outcome {
    let at = ree_closed_form_pipeline(THIRD, THIRD).map_err(e)?;
    ensure!((at - 2.0 / 9.0).abs() <= 1e-12, "E(1/3) = {at}");
    let values: Vec<(f64, f64)> = p_sweep()
        .into_iter()
        .map(|p| ree_closed_form_pipeline(p, THIRD).map(|v| (p, v)))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let (p_star, max) = values.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    ensure!((max - 2.0 / 9.0).abs() <= 1e-12, "grid max = {max}");
    ensure!((p_star - THIRD).abs() <= 1e-12, "max attained at p = {p_star}");
    let end = values.last().unwrap().1;
    ensure!(end.abs() <= 1e-12, "E(1) = {end:e}");
    Ok(format!("E(1/3) = {at:.12}, max over {} grid points at p = 1/3, E(1) = {end:e}", values.len()))
}

fn criterion_3() -> Outcome {
    let mut worst = Vec::new();
    for delta in [0.05, 0.1, THIRD] {
        let spec = InputSpec::new(delta).map_err(e)?;
        let rho = input_tripartite(&spec).map_err(e)?;
        let ab = partial_trace(&rho, &[0, 1]).map_err(e)?;
        let checks = [
            ("AB^TA", ppt_check(&ab, 0).map_err(e)?.min_pt_eigenvalue),
            ("AB^TB", ppt_check(&ab, 1).map_err(e)?.min_pt_eigenvalue),
            ("ABC^TB", ppt_check(&rho, 1).map_err(e)?.min_pt_eigenvalue),
            ("ABC^TC", ppt_check(&rho, 2).map_err(e)?.min_pt_eigenvalue),
        ];
        let sum = spec.bell_params().correlation_sum();
        ensure!(sum <= 1.0 + 1e-12, "delta {delta}: |c1|+|c2|+|c3| = {sum}");
        for (name, min) in checks {
            if min < -1e-10 {
                worst.push(format!("delta {delta:.4} {name} min {min:.6}"));
            }
        }
    }
    ensure!(worst.is_empty(), "negative partial transpose: {}", worst.join("; "));
    Ok("all four partial transposes PSD, correlation sums <= 1".into())
}

fn criterion_4() -> Outcome {
    let mut max_err = 0.0f64;
    for i in 0..10 {
        let p = THIRD + (1.0 - THIRD) * i as f64 / 9.0;
        for j in 0..10 {
            let delta = 0.01 + (THIRD - 0.01) * j as f64 / 9.0;
            let rho = input_tripartite(&InputSpec::new(delta).map_err(e)?).map_err(e)?;
            let ab = apply_joint(&rho, p).map_err(e)?.ab_marginal().map_err(e)?;
            let gap = corner_block_gap(&ab).map_err(e)?;
            max_err = max_err.max((gap - (1.0 - p) * delta).abs());
        }
    }
    ensure!(max_err <= 1e-12, "max |gap - (1-p) delta| = {max_err:e}");
    Ok(format!("max deviation {max_err:e} over 100 points"))
}

fn criterion_5() -> Outcome {
    let state = prepare_pipeline(&InputSpec::new(THIRD).map_err(e)?, THIRD).map_err(e)?;
    let b0 = state.branch0.as_ref().ok_or("flag-0 branch is empty")?;
    let fid = b0.fidelity_with_ket(&bell_ket(0));
    ensure!(fid >= 1.0 - 1e-10, "fidelity with beta00 = {fid}");
    let min = ppt_check(b0, 1).map_err(e)?.min_pt_eigenvalue;
    ensure!((min + 0.5).abs() <= 1e-9, "flag-0 min PT eigenvalue = {min}");
    let pre = &state.sigma_ab_premeasure;
    let pa = ppt_check(pre, 0).map_err(e)?;
    let pb = ppt_check(pre, 1).map_err(e)?;
    ensure!(pa.is_ppt && pb.is_ppt, "pre-measurement min PT eigenvalues {} / {}", pa.min_pt_eigenvalue, pb.min_pt_eigenvalue);
    Ok(format!("fidelity {fid:.12}, min PT {min:.12}, pre-measurement min PT {:.6}", pb.min_pt_eigenvalue))
}

fn criterion_6() -> Outcome {
    let (t_hi, t_lo) = corner_block_eigenvalues(&gap_family_state(2.0 / 9.0).map_err(e)?).map_err(e)?;
    ensure!((t_hi - 0.5).abs() <= 1e-12 && (t_lo - 5.0 / 18.0).abs() <= 1e-12, "template eigenvalues ({t_hi}, {t_lo})");
    let (k_hi, k_lo) = corner_block_eigenvalues(&nominal_output()?).map_err(e)?;
    ensure!(
        (k_hi - 4.0 / 9.0).abs() <= 1e-12 && (k_lo - 2.0 / 9.0).abs() <= 1e-12,
        "Kraus eigenvalues ({k_hi}, {k_lo})"
    );
    let claims = verify_claims(&InputSpec::new(THIRD).map_err(e)?, THIRD).map_err(e)?;
    let rec = claims.iter().find(|r| r.id == "output-corner-eigenvalues").ok_or("claim missing")?;
    ensure!(rec.verdict == Verdict::ReproducedOnTemplateOnly, "verdict {}", rec.verdict);
    Ok(format!("template ({t_hi:.12}, {t_lo:.12}), Kraus ({k_hi:.12}, {k_lo:.12}), verdict {}", rec.verdict))
}

fn criterion_7() -> Outcome {
    let spec = InputSpec::new(THIRD).map_err(e)?;
    let mut worst_d = 0.0f64;
    let mut worst_i = 0.0f64;
    let mut min_d = f64::MAX;
    let mut d_end = f64::NAN;
    let rho = input_tripartite(&spec).map_err(e)?;
    for p in p_sweep() {
        let r = correlation_report(&spec, p).map_err(e)?;
        // Mutual information and S(B) - S(AB) rebuilt from entropies of the state.
        let sigma = apply_joint(&rho, p).map_err(e)?.ab_marginal().map_err(e)?;
        let s_ab = von_neumann_entropy(&sigma);
        let s_a = von_neumann_entropy(&partial_trace(&sigma, &[0]).map_err(e)?);
        let s_b = von_neumann_entropy(&partial_trace(&sigma, &[1]).map_err(e)?);
        let mutual = s_a + s_b - s_ab;
        worst_d = worst_d.max((r.discord - (mutual - r.classical)).abs());
        worst_i = worst_i.max((r.coherent_info - (mutual - 1.0)).abs());
        worst_i = worst_i.max((r.coherent_info - (s_b - s_ab)).abs());
        min_d = min_d.min(r.discord);
        d_end = r.discord;
    }
    ensure!(worst_d <= 1e-10, "max |D - (I - C)| = {worst_d:e}");
    ensure!(worst_i <= 1e-10, "max |I_coh - (I - 1)| = {worst_i:e}");
    ensure!(d_end.abs() <= 1e-9, "D(p=1) = {d_end:e}");
    ensure!(min_d >= -1e-9, "min D = {min_d:e}");
    Ok(format!("identity errors {worst_d:e} / {worst_i:e}, D(1) = {d_end:e}, min D = {min_d:e}"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut drawn = 0;
    while drawn < 5 {
        let cs: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if cs.iter().map(|x| x.abs()).sum::<f64>() > 1.0 {
            continue;
        }
        let rho = bell_diagonal_state(&BellDiagonalParams::bell_diagonal(cs[0], cs[1], cs[2]).map_err(e)?).map_err(e)?;
        worst = worst.max(ree_numeric(&rho).map_err(e)?.abs());
        drawn += 1;
    }
    ensure!(worst <= 1e-3, "separable REE up to {worst:e}");
    let bell = ree_numeric(&bell_state(0)).map_err(e)?;
    ensure!((bell - 1.0).abs() <= 1e-3, "REE(beta00) = {bell}");
    let out = ree_numeric(&nominal_output()?).map_err(e)?;
    ensure!(out.abs() <= 1e-3, "REE(Kraus output) = {out}");
    let claims = verify_claims(&InputSpec::new(THIRD).map_err(e)?, THIRD).map_err(e)?;
    let rec = claims.iter().find(|r| r.id == "closed-form-vs-numeric-ree").ok_or("claim missing")?;
    ensure!(rec.verdict == Verdict::Diverges, "verdict {}", rec.verdict);
    Ok(format!("separable max {worst:e}, beta00 {bell:.6}, Kraus output {out:e}, closed form recorded as {}", rec.verdict))
}

fn criterion_9() -> Outcome {
    let n = 100_000;
    let b = batch_repeater(n, &InputSpec::new(THIRD).map_err(e)?, THIRD, 7).map_err(e)?;
    let p0 = 2.0 / 9.0;
    ensure!((b.p0 - p0).abs() <= 1e-12, "p0 = {}", b.p0);
    let bound = 3.0 * (p0 * (1.0 - p0) / n as f64).sqrt();
    ensure!((b.empirical_rate - p0).abs() <= bound, "rate {} outside {p0} +- {bound}", b.empirical_rate);
    ensure!(b.paper_predicted == (n as f64 * (1.0 - THIRD)).floor() as u64, "paper_predicted {}", b.paper_predicted);
    ensure!((b.model_predicted - n as f64 * p0).abs() <= 1e-6, "model_predicted {}", b.model_predicted);
    Ok(format!(
        "rate {:.5} within {bound:.5} of 2/9; paper {} vs model {:.1}",
        b.empirical_rate, b.paper_predicted, b.model_predicted
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for p in [THIRD, 0.5, 0.9] {
        let ch = phase_flip(p).map_err(e)?;
        let u = isometric_extension(&ch).map_err(e)?;
        for _ in 0..20 {
            let rho = random_qubit(&mut rng);
            let via_u = apply_isometry(&u, ch.operators().len(), &rho).map_err(e)?;
            let via_k = kraus_apply(&ch, &rho, 0).map_err(e)?;
            worst = worst.max(via_u.matrix().max_abs_diff(via_k.matrix()));
        }
    }
    ensure!(worst <= 1e-12, "max deviation {worst:e}");
    Ok(format!("max deviation {worst:e} over 60 states"))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = 0;
    let mut example = None;
    for _ in 0..50 {
        let x: f64 = rng.random_range(0.0..1.0);
        let theta: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_4);
        let (a1, a2) = (theta.cos(), theta.sin());
        let rho = isotropic_like_state(x, &[a1, a2], 2).map_err(e)?;
        let npt = !ppt_check(&rho, 1).map_err(e)?.is_ppt;
        if qudit_entangled(x, a1, a2, 2) != npt {
            mismatches += 1;
            example.get_or_insert((x, a1, a2, npt));
        }
    }
    let boundary = 1.0 / (1.0 + 0.5 * 2.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ensure!(!qudit_entangled(boundary, h, h, 2), "boundary equality reported entangled");
    if let Some((x, a1, a2, npt)) = example {
        return Err(format!(
            "{mismatches}/50 verdicts disagree with PPT, e.g. tau*gamma = {x:.4}, a = ({a1:.4}, {a2:.4}): verdict {}, NPT {npt}",
            !npt
        ));
    }
    Ok("50/50 verdicts agree with PPT, boundary is not entangled".into())
}

fn criterion_12() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_corrconv");
    let run = |args: &[&str]| {
        Command::new(bin).args(args).env_remove("CORRCONV_OUT_DIR").output().map_err(e)
    };
    let first = run(&["sweep"])?;
    let second = run(&["sweep"])?;
    ensure!(first.status.code() == Some(0), "sweep exit {:?}", first.status.code());
    ensure!(!first.stdout.is_empty() && first.stdout == second.stdout, "sweep CSV differs between runs");
    let cases: [(&[&str], i32); 4] = [
        (&["sweep", "--p-min", "0.9", "--p-max", "1"], 0),
        (&["sweep", "--p-min", "0.1"], 1),
        (&["sweep", "--out", "/nonexistent-dir/out.csv"], 2),
        (&["sweep", "--c1", "1", "--c2", "1", "--c3", "1"], 3),
    ];
    for (args, want) in cases {
        let got = run(args)?.status.code();
        ensure!(got == Some(want), "{args:?} exited {got:?}, want {want}");
    }
    Ok(format!("{} byte CSV identical across runs, exit codes 0/1/2/3", first.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("pauli capacity zero point", criterion_1),
        ("two-ninths bound", criterion_2),
        ("input-state certification", criterion_3),
        ("gap law", criterion_4),
        ("post-selection branch", criterion_5),
        ("template reproduction", criterion_6),
        ("measure identities", criterion_7),
        ("relative entropy oracle", criterion_8),
        ("monte carlo flag rate", criterion_9),
        ("isometric extension", criterion_10),
        ("qudit threshold", criterion_11),
        ("cli contract", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
