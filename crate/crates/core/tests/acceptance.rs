//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Set `KLSCOPE_ACCEPTANCE` to a
//! comma-separated list such as `1,4,8` to run a subset.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::time::Instant;

use klscope::codespace::{purity, random_unitary_2};
use klscope::enumerators::{closed_form_623, closed_form_723, weight_enumerators};
use klscope::families::{
    code_623, cyclic_code_723, hamiltonian_ground_check, lambda_star_sq_623, perm_code_723,
    so4_check, Branch, CyclicCoeffs, HamiltonianKind, OrthoFrame, PermVariant, So4Pair,
};
use klscope::optimizer::{
    gradient, jnr_feasibility, loss, optimize, random_theta, LossSpec, OptimizerConfig,
};
use klscope::stabilizer::BUILTIN_NAMES;
use klscope::sweep::{grid, sweep, SweepConfig};
use klscope::{
    CMatrix, CodeSubspace, DenseOperators, ErrorBasis, PauliString, StabilizerCode, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KL_TOL: f64 = 1e-10;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn basis(n: usize) -> ErrorBasis {
    ErrorBasis::new(n, 3).expect("distance-3 basis")
}

/// `lambda*^2` from an independent signature computation.
fn measured_sq(code: &CodeSubspace) -> Result<f64, String> {
    let b = basis(code.n());
    let kl = code.kl_violation(&b).map_err(err)?;
    ensure(kl <= KL_TOL, || format!("kl_violation {kl:e}"))?;
    Ok(code
        .signature_vector(&b, KL_TOL)
        .map_err(err)?
        .lambda_star_sq())
}

fn named_codes() -> Result<Vec<(String, CodeSubspace)>, String> {
    let mut out = Vec::new();
    for name in BUILTIN_NAMES {
        let code = StabilizerCode::builtin(name)
            .map_err(err)?
            .codespace()
            .map_err(err)?;
        out.push((name.to_string(), code));
    }
    for v in [PermVariant::Plus, PermVariant::Minus] {
        out.push((
            format!("perm-{v:?}").to_lowercase(),
            perm_code_723(v).map_err(err)?,
        ));
    }
    Ok(out)
}

fn criterion_1() -> Check {
    let steane = StabilizerCode::builtin("steane")
        .map_err(err)?
        .codespace()
        .map_err(err)?;
    let l = measured_sq(&steane)?.sqrt();
    ensure(l <= 1e-9, || format!("steane lambda* = {l:e}"))?;

    let shaw = StabilizerCode::builtin("shaw623")
        .map_err(err)?
        .codespace()
        .map_err(err)?;
    let sig = shaw.signature_vector(&basis(6), KL_TOL).map_err(err)?;
    ensure((sig.lambda_star() - 1.0).abs() <= 1e-9, || {
        format!("shaw lambda* = {}", sig.lambda_star())
    })?;
    let nz = sig.nonzero(1e-9);
    let z4z6: PauliString = "IIIZIZ".parse().map_err(err)?;
    ensure(
        nz.len() == 1 && nz[0].0 == z4z6 && (nz[0].1 - 1.0).abs() <= 1e-9,
        || format!("shaw nonzero components {nz:?}"),
    )?;

    let mut perm = Vec::new();
    for v in [PermVariant::Plus, PermVariant::Minus] {
        let l = measured_sq(&perm_code_723(v).map_err(err)?)?.sqrt();
        ensure((l - 7f64.sqrt()).abs() <= 1e-9, || {
            format!("{v:?} lambda* = {l}")
        })?;
        perm.push(l);
    }
    Ok(format!(
        "steane {l:.1e}, shaw {:.12} (only Z4Z6 = 1), perm {:.12}/{:.12}",
        sig.lambda_star(),
        perm[0],
        perm[1]
    ))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_kl: f64 = 0.0;
    let mut worst_formula: f64 = 0.0;
    for _ in 0..50 {
        let frame = OrthoFrame::random(&mut rng);
        let code = code_623(&frame).map_err(err)?;
        worst_kl = worst_kl.max(code.kl_violation(&basis(6)).map_err(err)?);
        let got = measured_sq(&code)?;
        worst_formula = worst_formula.max((got - lambda_star_sq_623(&frame.e())).abs());
    }
    let theta_min = (1.0 / 5f64.sqrt()).acos();
    let thetas: Vec<f64> = (0..20)
        .map(|i| i as f64 * FRAC_PI_2 / 19.0)
        .chain([theta_min])
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in &thetas {
        let code = code_623(&OrthoFrame::single_parameter(t)).map_err(err)?;
        worst_kl = worst_kl.max(code.kl_violation(&basis(6)).map_err(err)?);
        let got = measured_sq(&code)?;
        let want = 0.5 + (t.sin().powi(4) / 4.0 + t.cos().powi(4)) / 2.0;
        worst_formula = worst_formula.max((got - want).abs());
        lo = lo.min(got);
        hi = hi.max(got);
    }
    ensure(worst_kl <= KL_TOL, || format!("kl_violation {worst_kl:e}"))?;
    ensure(worst_formula <= 1e-9, || {
        format!("formula mismatch {worst_formula:e}")
    })?;
    ensure((lo - 0.6).abs() <= 1e-9 && (hi - 1.0).abs() <= 1e-9, || {
        format!("range [{lo}, {hi}]")
    })?;
    Ok(format!(
        "70 codes, max kl {worst_kl:.1e}, formula err {worst_formula:.1e}, range [{lo:.12}, {hi:.12}]"
    ))
}

fn criterion_3() -> Check {
    let mut worst_kl: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    let mut sets = 0;
    for lam in [0.0, 0.4, 1.0, 2.0, 7f64.sqrt()] {
        for b1 in Branch::ALL {
            for b3 in Branch::ALL {
                let coeffs = CyclicCoeffs::from_lambda(lam, b1, b3).map_err(err)?;
                let code = cyclic_code_723(&coeffs).map_err(err)?;
                worst_kl = worst_kl.max(code.kl_violation(&basis(7)).map_err(err)?);
                worst_l = worst_l.max((measured_sq(&code)?.sqrt() - lam).abs());
                sets += 1;
            }
        }
    }
    ensure(worst_kl <= KL_TOL, || format!("kl_violation {worst_kl:e}"))?;
    ensure(worst_l <= 1e-8, || format!("lambda* mismatch {worst_l:e}"))?;

    let steane = CyclicCoeffs::from_lambda(0.0, Branch::Minus, Branch::Minus).map_err(err)?;
    let want = [1.0 / 8f64.sqrt(), 0.0, (7.0f64 / 8.0).sqrt(), 0.0, 0.0];
    let dev = steane
        .c
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(dev <= 1e-12, || format!("steane amplitudes {:?}", steane.c))?;
    let top = CyclicCoeffs::from_lambda(7f64.sqrt(), Branch::Plus, Branch::Plus).map_err(err)?;
    ensure((top.c[0] - 15f64.sqrt() / 8.0).abs() <= 1e-12, || {
        format!("c0 at sqrt 7 = {}", top.c[0])
    })?;
    Ok(format!(
        "{sets} coefficient sets, max kl {worst_kl:.1e}, lambda* err {worst_l:.1e}, endpoints ok"
    ))
}

fn criterion_4() -> Check {
    let mut worst: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    let mut check_sum = |code: &CodeSubspace, e: &klscope::enumerators::WeightEnumerator| {
        let l2 = measured_sq(code)?;
        worst_sum = worst_sum.max((e.lambda_star_sq() - l2).abs());
        Ok::<_, String>(())
    };
    for lam in [0.0, 1.0, 7f64.sqrt()] {
        let coeffs = CyclicCoeffs::from_lambda(lam, Branch::Plus, Branch::Plus).map_err(err)?;
        let code = cyclic_code_723(&coeffs).map_err(err)?;
        let e = weight_enumerators(&code).map_err(err)?;
        worst = worst.max(e.max_deviation(&closed_form_723(lam)));
        check_sum(&code, &e)?;
    }
    for theta in [0.0, 0.4, (1.0 / 5f64.sqrt()).acos()] {
        let code = code_623(&OrthoFrame::single_parameter(theta)).map_err(err)?;
        let e = weight_enumerators(&code).map_err(err)?;
        worst = worst.max(e.max_deviation(&closed_form_623(theta)));
        check_sum(&code, &e)?;
    }
    for (_, code) in named_codes()? {
        let e = weight_enumerators(&code).map_err(err)?;
        check_sum(&code, &e)?;
    }
    ensure(worst <= 1e-8, || format!("closed-form deviation {worst:e}"))?;
    ensure(worst_sum <= 1e-8, || {
        format!("A1 + A2 mismatch {worst_sum:e}")
    })?;
    Ok(format!(
        "closed forms within {worst:.1e}, A1+A2 = lambda*^2 within {worst_sum:.1e}"
    ))
}

fn criterion_5() -> Check {
    let config = OptimizerConfig::default();
    let run = |n: usize, spec: LossSpec| {
        let b = basis(n);
        let r = optimize(n, 2, &b, &spec, &config).map_err(err)?;
        // certify with the independent codespace path
        let l2 = measured_sq(&r.code)?;
        ensure((l2.sqrt() - r.lambda_star).abs() <= 1e-9, || {
            format!("reported {} vs recomputed {}", r.lambda_star, l2.sqrt())
        })?;
        Ok::<_, String>((l2, r.kl_violation, r.wall_time_ms))
    };
    let (min6, kl_min, t1) = run(6, LossSpec::minimize(1000.0))?;
    let (max6, kl_max, t2) = run(6, LossSpec::maximize(1000.0))?;
    let (max7, _, t3) = run(7, LossSpec::maximize(1000.0))?;
    ensure(min6 <= 0.601 && kl_min <= KL_TOL, || {
        format!("min ((6,2,3)) {min6} kl {kl_min:e}")
    })?;
    ensure(max6 >= 0.999 && kl_max <= KL_TOL, || {
        format!("max ((6,2,3)) {max6} kl {kl_max:e}")
    })?;
    ensure(max7 >= 6.9, || format!("max ((7,2,3)) {max7}"))?;
    Ok(format!(
        "min623 {min6:.6} ({:.0}s), max623 {max6:.6} ({:.0}s), max723 {max7:.6} ({:.0}s)",
        t1 as f64 / 1e3,
        t2 as f64 / 1e3,
        t3 as f64 / 1e3
    ))
}

fn criterion_6() -> Check {
    let b = basis(6);
    let points = grid(0.5, 1.1, 0.02).map_err(err)?;
    let mut config = SweepConfig::default();
    config.optimizer.restarts = 16;
    let result = sweep(&b, 2, &points, &config, &[], |_| Ok(())).map_err(err)?;
    let csv = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("sweep_623.csv");
    result
        .write_csv(std::fs::File::create(&csv).map_err(err)?)
        .map_err(err)?;
    let mut bad = String::new();
    let (mut worst_in, mut best_out) = (0.0f64, f64::INFINITY);
    for row in &result.rows {
        let t = row.target_lambda_sq;
        if (0.6 - 1e-9..=1.0 + 1e-9).contains(&t) {
            worst_in = worst_in.max(row.final_loss);
            if row.final_loss > 1e-8 {
                let _ = write!(bad, " in:{t}={:e}", row.final_loss);
            }
        } else if t <= 0.55 + 1e-9 || t >= 1.05 - 1e-9 {
            best_out = best_out.min(row.final_loss);
            if row.final_loss < 1e-3 {
                let _ = write!(bad, " out:{t}={:e}", row.final_loss);
            }
        }
    }
    ensure(result.rows.len() == points.len(), || "missing rows".into())?;
    ensure(bad.is_empty(), || format!("violations:{bad}"))?;
    Ok(format!(
        "{} points, max loss inside {worst_in:.1e}, min loss beyond 0.05 {best_out:.1e}, csv {}",
        result.rows.len(),
        csv.display()
    ))
}

fn criterion_7() -> Check {
    let mats = ["XI", "XZ", "YI", "YZ", "ZI"]
        .iter()
        .map(|w| w.parse::<PauliString>().and_then(|p| p.dense_matrix()))
        .collect::<Result<Vec<CMatrix>, _>>()
        .map_err(err)?;
    let ops = DenseOperators::new(mats).map_err(err)?;
    let config = OptimizerConfig {
        restarts: 200,
        seed: 7,
        ..OptimizerConfig::default()
    };
    let result = jnr_feasibility(&ops, 2, &config).map_err(err)?;
    let mut signs = [0usize; 2];
    for run in &result.runs {
        ensure(run.converged, || {
            format!("run stalled at residual {:e}", run.residual)
        })?;
        let v = &run.values;
        ensure(
            v[..4].iter().all(|x| x.abs() <= 1e-8) && (v[4].abs() - 1.0).abs() <= 1e-8,
            || format!("tuple {v:?}"),
        )?;
        signs[(v[4] < 0.0) as usize] += 1;
    }
    ensure(signs[0] > 0 && signs[1] > 0, || {
        format!("sign counts {signs:?}")
    })?;
    Ok(format!(
        "200/200 runs on (0,0,0,0,+1) x{} and (0,0,0,0,-1) x{}",
        signs[0], signs[1]
    ))
}

/// Largest violation of the purity relations for single qubits and pairs,
/// and of `lambda*^2 = sum_i |l_i|^2 + sum_ij |l_ij|^2`.
fn purity_chain(code: &CodeSubspace) -> Result<f64, String> {
    let n = code.n();
    let sig = code.signature_vector(&basis(n), KL_TOL).map_err(err)?;
    let part = |sites: &[usize]| -> f64 {
        sig.words()
            .iter()
            .zip(sig.components())
            .filter(|(w, _)| w.support() == sites)
            .map(|(_, c)| c * c)
            .sum()
    };
    let single: Vec<f64> = (1..=n).map(|i| part(&[i])).collect();
    let mut worst: f64 = 0.0;
    let mut total = single.iter().sum::<f64>();
    for j in 0..code.k() {
        for i in 1..=n {
            let p = purity(&code.reduced_density_matrix(j, &[i]).map_err(err)?);
            worst = worst.max((single[i - 1] - (2.0 * p - 1.0)).abs());
        }
    }
    for i in 1..=n {
        for k in i + 1..=n {
            let pair = part(&[i, k]);
            total += pair;
            for j in 0..code.k() {
                let p = purity(&code.reduced_density_matrix(j, &[i, k]).map_err(err)?);
                let want = 4.0 * p - 1.0 - single[i - 1] - single[k - 1];
                worst = worst.max((pair - want).abs());
            }
        }
    }
    Ok(worst.max((total - sig.lambda_star_sq()).abs()))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut notes = Vec::new();

    let mut codes = named_codes()?;
    let mut drift: f64 = 0.0;
    for (_, code) in &codes {
        let b = basis(code.n());
        let base = code
            .signature_vector(&b, KL_TOL)
            .map_err(err)?
            .lambda_star();
        for _ in 0..100 {
            let factors: Vec<_> = (0..code.n()).map(|_| random_unitary_2(&mut rng)).collect();
            let moved = code.apply_local_unitary(&factors).map_err(err)?;
            let l = moved
                .signature_vector(&b, KL_TOL)
                .map_err(err)?
                .lambda_star();
            drift = drift.max((l - base).abs());
        }
    }
    ensure(drift <= 1e-9, || format!("LU drift {drift:e}"))?;
    notes.push(format!("LU drift {drift:.1e}"));

    codes.push((
        "theta".into(),
        code_623(&OrthoFrame::single_parameter(0.4)).map_err(err)?,
    ));
    let coeffs = CyclicCoeffs::from_lambda(1.0, Branch::Plus, Branch::Minus).map_err(err)?;
    codes.push(("cyclic".into(), cyclic_code_723(&coeffs).map_err(err)?));
    let mut chain: f64 = 0.0;
    for (_, code) in &codes {
        chain = chain.max(purity_chain(code)?);
    }
    ensure(chain <= 1e-10, || format!("purity chain {chain:e}"))?;
    notes.push(format!("purity chain {chain:.1e}"));

    let b = ErrorBasis::new(5, 3).map_err(err)?;
    let mut fd: f64 = 0.0;
    for i in 0..20 {
        let theta = random_theta(32, 2, &mut rng);
        let dir = random_theta(32, 2, &mut rng);
        let mu = rng.gen_range(1.0..1000.0);
        let spec = match i % 5 {
            0 => LossSpec::kl_only(),
            1 => LossSpec::minimize(mu),
            2 => LossSpec::maximize(mu),
            3 => LossSpec::target_length(mu, rng.gen_range(0.0..2.0)),
            _ => LossSpec::target_vector(
                mu,
                (0..b.len()).map(|_| rng.gen_range(-0.2..0.2)).collect(),
            ),
        };
        let g = gradient(&b, &theta, &spec).map_err(err)?;
        let analytic: f64 = g
            .iter()
            .zip(dir.iter())
            .map(|(x, y)| (x.conj() * y).re)
            .sum();
        let h = 1e-5;
        let plus = loss(&b, &(&theta + &dir * C64::new(h, 0.0)), &spec).map_err(err)?;
        let minus = loss(&b, &(&theta - &dir * C64::new(h, 0.0)), &spec).map_err(err)?;
        let numeric = (plus - minus) / (2.0 * h);
        let diff = (analytic - numeric).abs();
        if diff > 1e-9 {
            fd = fd.max(diff / numeric.abs());
        }
    }
    ensure(fd <= 1e-6, || format!("gradient relative error {fd:e}"))?;
    notes.push(format!("gradient rel err {fd:.1e}"));

    let mut resid: f64 = 0.0;
    for lam in [0.0, 0.4, 1.0, 2.0, 7f64.sqrt()] {
        for b1 in Branch::ALL {
            for b3 in Branch::ALL {
                let r = CyclicCoeffs::from_lambda(lam, b1, b3)
                    .map_err(err)?
                    .residuals();
                for x in [
                    r.max_constraint(),
                    r.e5.abs(),
                    r.e6.abs(),
                    r.quartic.abs(),
                    r.quartic_factored.abs(),
                    r.linear_factor.abs(),
                    r.e18.abs(),
                ] {
                    resid = resid.max(x);
                }
            }
        }
    }
    ensure(resid <= 1e-11, || format!("elimination residual {resid:e}"))?;
    notes.push(format!("elimination residuals {resid:.1e}"));

    let frame = OrthoFrame::random(&mut rng);
    let mut so4: f64 = 0.0;
    for pair in So4Pair::ALL {
        for _ in 0..5 {
            let theta = rng.gen_range(-3.0..3.0);
            so4 = so4.max(
                so4_check(&frame, pair, theta)
                    .map_err(err)?
                    .projector_deviation,
            );
        }
    }
    ensure(so4 <= 1e-10, || format!("SO(4) deviation {so4:e}"))?;
    notes.push(format!("SO(4) {so4:.1e}"));

    for (kind, deg) in [(HamiltonianKind::H623, 16), (HamiltonianKind::H723, 8)] {
        let r = hamiltonian_ground_check(kind).map_err(err)?;
        ensure(
            r.degeneracy == deg && r.containment_residual <= 1e-9,
            || format!("{r:?}"),
        )?;
        notes.push(format!(
            "{kind:?} degeneracy {} containment {:.1e}",
            r.degeneracy, r.containment_residual
        ));
    }
    Ok(notes.join(", "))
}

fn criterion_9() -> Check {
    let mut notes = Vec::new();
    for name in BUILTIN_NAMES {
        let code = StabilizerCode::builtin(name)
            .map_err(err)?
            .codespace()
            .map_err(err)?;
        let sig = code
            .signature_vector(&basis(code.n()), KL_TOL)
            .map_err(err)?;
        let off = sig
            .components()
            .iter()
            .map(|c| c.abs().min((c.abs() - 1.0).abs()))
            .fold(0.0, f64::max);
        let l2 = sig.lambda_star_sq();
        ensure(off <= 1e-10, || format!("{name}: component off by {off:e}"))?;
        ensure((l2 - l2.round()).abs() <= 1e-9, || {
            format!("{name}: lambda*^2 = {l2}")
        })?;
        notes.push(format!("{name} lambda*^2 = {}", l2.round()));
    }
    Ok(notes.join(", "))
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("KLSCOPE_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [(usize, &str, fn() -> Check); 9] = [
        (1, "named-code values", criterion_1),
        (2, "((6,2,3)) family exactness", criterion_2),
        (3, "((7,2,3)) cyclic family", criterion_3),
        (4, "enumerator identities", criterion_4),
        (5, "optimization extremes", criterion_5),
        (6, "sweep transition", criterion_6),
        (7, "disconnected joint numerical range", criterion_7),
        (8, "invariance suites", criterion_8),
        (9, "stabilizer integrality", criterion_9),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS [{name}] {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL [{name}] {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
