//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Built with `harness = false` so the lines always reach the terminal.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pgrass::algebra::{BlockOperator, Splitting};
use pgrass::gallery::{hardy_projection, idempotent_range_projection, HardyConfig, Symbol};
use pgrass::halmos::{build_geodesic, commutator_norm_via_angles, distance_report, halmos_decompose, sinc_identity_residual};
use pgrass::linalg::{commutator, hermitian_eig, identity, op_norm, schatten_norm};
use pgrass::model::{
    classify, diagonalize_pair, index_of, materialize, model_index, norm_distance_check, ClassName, Truncation,
};
use pgrass::random::Rng64;
use pgrass::spectral::{t_pair, verify_pairing};
use pgrass::suites::{disjoint_rank_pair, golden_models, random_model, two_by_two_errors};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn hardy_index() -> Outcome {
    let start = Instant::now();
    for k in -5i64..=5 {
        let h = hardy_projection(&HardyConfig {
            modes: 16,
            phi: Symbol::Monomial(k),
        })
        .map_err(|e| e.to_string())?;
        ensure(h.index == -k, || format!("z^{k}: index {} != {}", h.index, -k))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("index = -k for k in -5..5, {elapsed:.2?}"))
}

fn t_pair_formula() -> Outcome {
    let mut rng = Rng64::new(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = rng.uniform(0.0, 0.5);
        let (tp, tm) = t_pair(s).map_err(|e| e.to_string())?;
        worst = worst.max((tp + tm - 1.0).abs()).max((tp * tm - s * s).abs());
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    let half = t_pair(0.5).map_err(|e| e.to_string())?;
    ensure(half == (0.5, 0.5), || format!("t_pair(1/2) = {half:?}"))?;
    Ok(format!("max error {worst:.2e}"))
}

/// Sorted eigenvalues of `m` strictly inside `(eps, 1 − eps)`.
fn interior_eigenvalues(m: &pgrass::linalg::ComplexMatrix, eps: f64) -> Vec<f64> {
    let e = hermitian_eig(m, 1e-8).expect("hermitian block");
    e.values.into_iter().filter(|&t| t > eps && t < 1.0 - eps).collect()
}

fn pairing_suite() -> Outcome {
    let mut rng = Rng64::new(202);
    let mut worst: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for side in [8, 16, 32] {
        let s = Splitting::new(side, side).unwrap();
        for case in 0..100 {
            let p = rng.projection(s);
            let r = verify_pairing(&p, 1e-10).map_err(|e| e.to_string())?;
            ensure(r.passed, || format!("side {side} case {case}: pairing report failed"))?;
            for entry in &r.entries {
                ensure(entry.multiplicity_x == entry.multiplicity_y, || {
                    format!("side {side} case {case}: multiplicities differ at {}", entry.lambda)
                })?;
            }
            worst = worst.max(r.max_residual);
            // oracle: interior x-spectrum equals 1 − interior y-spectrum
            let x = interior_eigenvalues(&p.a11, 1e-6);
            let mut y: Vec<f64> = interior_eigenvalues(&p.a22, 1e-6).iter().map(|t| 1.0 - t).collect();
            y.sort_by(f64::total_cmp);
            ensure(x.len() == y.len(), || format!("side {side} case {case}: {} vs {} values", x.len(), y.len()))?;
            for (a, b) in x.iter().zip(&y) {
                oracle = oracle.max((a - b).abs());
            }
        }
    }
    ensure(worst <= 1e-8, || format!("intertwining residual {worst:e}"))?;
    ensure(oracle <= 1e-8, || format!("x/y spectrum mismatch {oracle:e}"))?;
    Ok(format!("300 projections, residual {worst:.2e}, spectrum oracle {oracle:.2e}"))
}

fn halmos_cross_check() -> Outcome {
    let mut rng = Rng64::new(303);
    let s = Splitting::new(16, 16).unwrap();
    let e = BlockOperator::e_plus(s);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = rng.projection(s);
        let h = halmos_decompose(&p, &e, 1e-8).map_err(|e| e.to_string())?;
        let comm = commutator(&e.to_dense(), &p.to_dense());
        for exp in [1.0, 2.0, 3.0] {
            let direct = schatten_norm(&comm, exp).unwrap();
            let via = commutator_norm_via_angles(&h, exp).unwrap();
            worst = worst.max((direct - via).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("max difference {worst:e}"))?;
    Ok(format!("max difference {worst:.2e}"))
}

fn metric_band() -> Outcome {
    let mut rng = Rng64::new(404);
    let s = Splitting::new(8, 8).unwrap();
    let (lo_bound, hi_bound) = (2.0 / PI - 1e-9, 1.0 + 1e-9);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut sinc: f64 = 0.0;
    for exp in [1.0, 2.0] {
        for _ in 0..200 {
            let p = rng.projection(s);
            let q = rng.projection_with_rank(s, p.trace().re.round() as usize);
            let r = distance_report(&p, &q, exp).map_err(|e| e.to_string())?;
            lo = lo.min(r.ratio);
            hi = hi.max(r.ratio);
            let g = build_geodesic(&p, &q, 1e-8).map_err(|e| e.to_string())?;
            sinc = sinc.max(sinc_identity_residual(&g).map_err(|e| e.to_string())?);
        }
    }
    ensure(lo >= lo_bound && hi <= hi_bound, || format!("ratio range [{lo}, {hi}]"))?;
    ensure(sinc <= 1e-9, || format!("sinc residual {sinc:e}"))?;
    let mut closed: f64 = 0.0;
    for exp in [1.0, 2.0] {
        for gamma in [0.05, 0.3, 0.7, 1.2, 1.5] {
            let (a, b) = two_by_two_errors(gamma, exp).map_err(|e| e.to_string())?;
            closed = closed.max(a).max(b);
        }
    }
    ensure(closed <= 1e-12, || format!("2x2 closed form error {closed:e}"))?;
    Ok(format!(
        "ratio in [{lo:.6}, {hi:.6}], sinc residual {sinc:.2e}, 2x2 error {closed:.2e}"
    ))
}

fn mixed_norm() -> Outcome {
    let mut rng = Rng64::new(505);
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    // random pairs on a finite splitting are all of D3 type
    let s = Splitting::new(10, 10).unwrap();
    for _ in 0..100 {
        let p = rng.projection(s);
        let q = rng.projection(s);
        for exp in [1.0, 2.0, 3.0] {
            let d = &p - &q;
            worst = worst.max(d.norm_infty_p(exp).unwrap() - 4.0 * d.schatten_norm(exp).unwrap());
        }
        pairs += 1;
    }
    // materialized D3 models, rotated by block-diagonal unitaries, against E+
    for (name, m, label) in golden_models().map_err(|e| e.to_string())? {
        if label.class != ClassName::D3 {
            continue;
        }
        let p = materialize(&m, Truncation::default()).map_err(|e| e.to_string())?;
        let sp = p.splitting();
        for _ in 0..10 {
            let w = BlockOperator::block_diagonal(rng.unitary(sp.dim_plus), rng.unitary(sp.dim_minus)).unwrap();
            let rotated = &(&w * &p) * &w.adjoint();
            for exp in [1.0, 2.0] {
                let d = &rotated - &BlockOperator::e_plus(sp);
                let excess = d.norm_infty_p(exp).unwrap() - 4.0 * d.schatten_norm(exp).unwrap();
                ensure(excess <= 0.0, || format!("{name}: mixed norm exceeds bound by {excess:e}"))?;
            }
            pairs += 1;
        }
    }
    ensure(worst <= 0.0, || format!("mixed norm exceeds 4x Schatten by {worst:e}"))?;
    let mut ratios = Vec::new();
    for r in [1usize, 2, 4, 8] {
        let (p, q) = disjoint_rank_pair(r).unwrap();
        let d = &p - &q;
        for exp in [1.0, 2.0] {
            let mixed = d.norm_infty_p(exp).unwrap();
            let schatten = d.schatten_norm(exp).unwrap();
            let want = ((2 * r) as f64).powf(1.0 / exp);
            ensure(mixed == 1.0, || format!("r = {r}, p = {exp}: mixed norm {mixed}"))?;
            ensure(schatten == want, || format!("r = {r}, p = {exp}: Schatten norm {schatten} != {want}"))?;
            if exp == 1.0 {
                ratios.push(schatten / mixed);
            }
        }
    }
    ensure(ratios.windows(2).all(|w| w[1] > w[0]), || format!("ratios {ratios:?} not growing"))?;
    Ok(format!("{pairs} pairs within bound; Schatten/mixed for r = 1,2,4,8 at p = 1: {ratios:?}"))
}

fn classification() -> Outcome {
    let golden = golden_models().map_err(|e| e.to_string())?;
    let mut seen = Vec::new();
    for (name, m, want) in &golden {
        let got = classify(m).map_err(|e| e.to_string())?;
        ensure(got == *want, || format!("{name}: {got} != {want}"))?;
        let comp = classify(&m.complement()).map_err(|e| e.to_string())?;
        ensure(comp.class == got.class.complement(), || {
            format!("{name}: complement class {} (expected {})", comp.class, got.class.complement())
        })?;
        if !seen.contains(&got.class) {
            seen.push(got.class);
        }
        if !matches!(got.class, ClassName::D3 | ClassName::D4) {
            continue;
        }
        let k = got.param.expect("discrete classes carry a parameter");
        let s_e = |p: &BlockOperator| {
            if got.class == ClassName::D3 {
                BlockOperator::e_plus(p.splitting())
            } else {
                BlockOperator::e_minus(p.splitting())
            }
        };
        for inf_block in [4, 8, 16, 32] {
            let p = materialize(m, Truncation { tail_terms: 24, inf_block }).map_err(|e| e.to_string())?;
            let trace = (&p - &s_e(&p)).trace().re;
            ensure((trace - k as f64).abs() <= 1e-6, || {
                format!("{name}, inf_block {inf_block}: trace {trace} vs index {k}")
            })?;
            let idx = model_index(&p, got.class).map_err(|e| e.to_string())?;
            ensure(idx == k, || format!("{name}, inf_block {inf_block}: index {idx} != {k}"))?;
        }
    }
    ensure(seen.len() == 9, || format!("only {} classes covered", seen.len()))?;
    Ok("9 classes, involution and D3/D4 truncation invariance hold".into())
}

fn norm_dichotomy() -> Outcome {
    let mut rng = Rng64::new(808);
    let mut near = 0;
    let mut sampled = 0;
    // models with a finite α list: the truncation is exact on the H+ side
    while sampled < 300 {
        let m = random_model(&mut rng);
        if m.alpha.is_infinite() {
            continue;
        }
        sampled += 1;
        let label = classify(&m).map_err(|e| e.to_string())?;
        let p = materialize(&m, Truncation::default()).map_err(|e| e.to_string())?;
        let r = norm_distance_check(&p, label, 1e-6);
        if r.near_e_plus {
            near += 1;
            ensure(label.class == ClassName::D3, || format!("{m:?}: distance {} but {label}", r.dist_e_plus))?;
        }
    }
    // random finite projections are D3 and pass trivially; check the E+ neighbourhood too
    let s = Splitting::new(8, 8).unwrap();
    let e = BlockOperator::e_plus(s);
    for _ in 0..50 {
        let norm = rng.uniform(0.1, 1.4);
        let x = rng.codiagonal(&e.to_dense(), norm);
        let u = pgrass::linalg::unitary_exp(&x, 1.0).unwrap();
        let p = BlockOperator::from_dense(s, &(&u * e.to_dense() * u.adjoint())).unwrap();
        let k = index_of(&p, &e, 2.0).map_err(|e| e.to_string())?;
        let r = norm_distance_check(&p, pgrass::model::ClassLabel::d3(k), 1e-6);
        ensure(r.passed && k == 0, || format!("rotated E+: distance {}, index {k}", r.dist_e_plus))?;
    }
    let mut min_essential = f64::INFINITY;
    for (name, m, label) in golden_models().map_err(|e| e.to_string())? {
        if label.class.is_discrete() {
            continue;
        }
        let p = materialize(&m, Truncation { tail_terms: 50, inf_block: 8 }).map_err(|e| e.to_string())?;
        let d = norm_distance_check(&p, label, 1e-6).dist_e_plus;
        ensure(d >= 0.99, || format!("{name}: distance {d}"))?;
        min_essential = min_essential.min(d);
    }
    Ok(format!(
        "{sampled} models ({near} within 1 - 1e-6 of E+, all D3); essential minimum distance {min_essential:.6}"
    ))
}

fn diagonalization() -> Outcome {
    let mut rng = Rng64::new(909);
    let s = Splitting::new(16, 16).unwrap();
    let mut conj: f64 = 0.0;
    let mut unit: f64 = 0.0;
    let mut sigma = f64::INFINITY;
    for _ in 0..100 {
        let p = rng.projection(s);
        let d = diagonalize_pair(&p, 1e-10).map_err(|e| e.to_string())?;
        // independent recomputation of the residuals
        let v = d.v.to_dense();
        let r = op_norm(&(&v * p.to_dense() * v.adjoint() - d.p0.to_dense()));
        let u = op_norm(&(v.adjoint() * &v - identity(32)));
        ensure(d.p0.a12.norm() == 0.0, || "P0 is not block diagonal".into())?;
        conj = conj.max(r);
        unit = unit.max(u);
        sigma = sigma.min(d.b_sigma_min);
    }
    ensure(conj <= 1e-8, || format!("conjugation residual {conj:e}"))?;
    ensure(unit <= 1e-10, || format!("unitarity defect {unit:e}"))?;
    ensure(sigma.is_finite() && sigma > 0.0, || format!("sigma_min {sigma}"))?;
    Ok(format!("residual {conj:.2e}, unitarity {unit:.2e}, min sigma_min(B) {sigma:.6}"))
}

fn idempotent_formula() -> Outcome {
    let mut rng = Rng64::new(1010);
    let mut proj: f64 = 0.0;
    let mut sv: f64 = 0.0;
    for _ in 0..50 {
        let b = rng.complex_matrix(4, 4);
        let r = idempotent_range_projection(&b).map_err(|e| e.to_string())?;
        let p = r.p.to_dense();
        proj = proj.max(op_norm(&(&p * &p - &p))).max(op_norm(&(&p - p.adjoint())));
        sv = sv.max(r.corner_singular_value_error);
        let k = index_of(&r.p, &BlockOperator::e_plus(r.p.splitting()), 2.0).map_err(|e| e.to_string())?;
        ensure(k == 0, || format!("index {k}"))?;
    }
    ensure(proj <= 1e-10, || format!("projection residual {proj:e}"))?;
    ensure(sv <= 1e-10, || format!("corner singular value error {sv:e}"))?;
    Ok(format!("projection residual {proj:.2e}, singular value error {sv:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Hardy index", hardy_index),
        ("t-pair formula", t_pair_formula),
        ("pairing suite", pairing_suite),
        ("Halmos cross-check", halmos_cross_check),
        ("metric band", metric_band),
        ("mixed-norm bound and non-equivalence", mixed_norm),
        ("classification", classification),
        ("norm dichotomy", norm_dichotomy),
        ("diagonalization", diagonalization),
        ("idempotent-range formula", idempotent_formula),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    let total = start.elapsed();
    if total < Duration::from_secs(300) {
        println!("criterion 11 PASS  wall clock ({:.2}s < 300s)", total.as_secs_f64());
    } else {
        failed += 1;
        println!("criterion 11 FAIL  wall clock ({:.2}s >= 300s)", total.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
