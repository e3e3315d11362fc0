//! Batch invariant suites behind `pgrass verify`. Each suite aggregates its
//! cases into a few checks (worst value against the bound) and returns the
//! per-case numbers as results. Cases run sequentially in a fixed order, so a
//! seed determines the report bytes.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;
use serde_json::json;

use crate::algebra::{BlockOperator, Splitting};
use crate::error::{Error, Result};
use crate::gallery::{
    fourier_projection, hardy_projection, idempotent_range_projection, FourierConfig, HardyConfig, Symbol,
};
use crate::halmos::{build_geodesic, commutator_norm_via_angles, distance_report, halmos_decompose, sinc_identity_residual};
use crate::linalg::{commutator, cplx, schatten_norm, ComplexMatrix};
use crate::model::{
    classify, diagonalize_pair, materialize, model_index, norm_distance_check, ClassLabel, ClassName, ExtRank,
    ProjectionModel, TailSpec, Truncation,
};
use crate::random::Rng64;
use crate::report::CheckRecord;
use crate::spectral::{extract_picture, t_pair, verify_pairing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Spectral,
    Halmos,
    Metric,
    Classify,
    Gallery,
    Diagonalize,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Spectral,
        Suite::Halmos,
        Suite::Metric,
        Suite::Classify,
        Suite::Gallery,
        Suite::Diagonalize,
    ];
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Schatten exponent added to each suite's fixed exponent list.
    pub p: f64,
    /// Dimension of each half-space for random cases.
    pub dims: usize,
    /// Random cases per configuration.
    pub cases: usize,
    pub tail_terms: usize,
    pub inf_block: usize,
    /// Working tolerance for projection checks.
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            p: 2.0,
            dims: 16,
            cases: 20,
            tail_terms: 24,
            inf_block: 8,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checks: Vec<CheckRecord>,
    pub results: serde_json::Value,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    if cfg.dims == 0 {
        return Err(Error::Config("dims must be at least 1".into()));
    }
    let (checks, results) = match suite {
        Suite::Spectral => spectral_suite(cfg)?,
        Suite::Halmos => halmos_suite(cfg)?,
        Suite::Metric => metric_suite(cfg)?,
        Suite::Classify => classify_suite(cfg)?,
        Suite::Gallery => gallery_suite(cfg)?,
        Suite::Diagonalize => diagonalize_suite(cfg)?,
    };
    Ok(SuiteOutcome {
        suite,
        checks,
        results,
    })
}

fn exponents(base: &[f64], extra: f64) -> Vec<f64> {
    let mut out = base.to_vec();
    if !out.contains(&extra) {
        out.push(extra);
    }
    out
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn spectral_suite(cfg: &SuiteConfig) -> Result<(Vec<CheckRecord>, serde_json::Value)> {
    let mut rng = Rng64::new(cfg.seed);
    let mut checks = Vec::new();

    let mut sum_err: f64 = 0.0;
    let mut prod_err: f64 = 0.0;
    for _ in 0..cfg.cases * 50 {
        let s = rng.uniform(0.0, 0.5);
        let (tp, tm) = t_pair(s)?;
        sum_err = sum_err.max((tp + tm - 1.0).abs());
        prod_err = prod_err.max((tp * tm - s * s).abs());
    }
    let (h1, h2) = t_pair(0.5)?;
    checks.push(CheckRecord::at_most("t_pair.sum_error", sum_err, 1e-12));
    checks.push(CheckRecord::at_most("t_pair.product_error", prod_err, 1e-12));
    checks.push(CheckRecord::at_most("t_pair.half", (h1 - 0.5).abs().max((h2 - 0.5).abs()), 0.0));

    let mut per_dim = Vec::new();
    for side in [(cfg.dims / 2).max(1), cfg.dims, 2 * cfg.dims] {
        let s = Splitting::new(side, side)?;
        let mut residual: f64 = 0.0;
        let mut mismatches = 0usize;
        let mut roundtrip: f64 = 0.0;
        for _ in 0..cfg.cases {
            let p = rng.projection(s);
            let report = verify_pairing(&p, cfg.tol)?;
            residual = residual.max(report.max_residual);
            mismatches += report
                .entries
                .iter()
                .filter(|e| e.multiplicity_x != e.multiplicity_y)
                .count();
            let pic = extract_picture(&p, cfg.tol)?;
            roundtrip = roundtrip.max((pic.assemble()?.to_dense() - p.to_dense()).norm());
        }
        checks.push(CheckRecord::at_most(format!("pairing.{side}.intertwining_residual"), residual, 1e-8));
        checks.push(CheckRecord::equal(format!("pairing.{side}.multiplicity_mismatches"), mismatches as f64, 0.0));
        checks.push(CheckRecord::at_most(format!("picture.{side}.roundtrip_residual"), roundtrip, 1e-8));
        per_dim.push(json!({"side": side, "max_residual": residual, "max_roundtrip": roundtrip}));
    }
    Ok((checks, json!({"t_pair_samples": cfg.cases * 50, "pairing": per_dim})))
}

fn halmos_suite(cfg: &SuiteConfig) -> Result<(Vec<CheckRecord>, serde_json::Value)> {
    let mut rng = Rng64::new(cfg.seed);
    let s = Splitting::new(cfg.dims, cfg.dims)?;
    let e = BlockOperator::e_plus(s);
    let ps = exponents(&[1.0, 2.0, 3.0], cfg.p);
    let mut errors = vec![0.0f64; ps.len()];
    let mut frame: f64 = 0.0;
    for _ in 0..cfg.cases {
        let p = rng.projection(s);
        let h = halmos_decompose(&p, &e, cfg.tol)?;
        frame = frame.max(h.frame_residual(&p.to_dense(), &e.to_dense()));
        let comm = commutator(&e.to_dense(), &p.to_dense());
        for (k, &exp) in ps.iter().enumerate() {
            let direct = schatten_norm(&comm, exp)?;
            let via = commutator_norm_via_angles(&h, exp)?;
            errors[k] = errors[k].max((direct - via).abs());
        }
    }
    let mut checks: Vec<CheckRecord> = ps
        .iter()
        .zip(&errors)
        .map(|(exp, err)| CheckRecord::at_most(format!("commutator_via_angles.p{exp}"), *err, 1e-8))
        .collect();
    checks.push(CheckRecord::at_most("frame_residual", frame, 1e-8));
    Ok((checks, json!({"exponents": ps, "max_errors": errors})))
}

/// `P = E+ + D`, `Q = E+ + F` with `D`, `F` orthogonal rank-`r` coordinate
/// projections inside `H−`.
pub fn disjoint_rank_pair(r: usize) -> Result<(BlockOperator, BlockOperator)> {
    let s = Splitting::new(1, 2 * r)?;
    let mut p = BlockOperator::e_plus(s);
    let mut q = p.clone();
    for i in 0..r {
        p.a22[(i, i)] = cplx(1.0);
        q.a22[(r + i, r + i)] = cplx(1.0);
    }
    Ok((p, q))
}

fn metric_suite(cfg: &SuiteConfig) -> Result<(Vec<CheckRecord>, serde_json::Value)> {
    let mut rng = Rng64::new(cfg.seed);
    let s = Splitting::new(cfg.dims, cfg.dims)?;
    let mut checks = Vec::new();
    let mut per_p = Vec::new();
    for exp in exponents(&[1.0, 2.0], cfg.p) {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut sinc_res: f64 = 0.0;
        let mut mixed_excess = f64::NEG_INFINITY;
        for _ in 0..cfg.cases {
            let p = rng.projection(s);
            let rank = p.trace().re.round() as usize;
            let q = rng.projection_with_rank(s, rank);
            let r = distance_report(&p, &q, exp)?;
            lo = lo.min(r.ratio);
            hi = hi.max(r.ratio);
            mixed_excess = mixed_excess.max(r.norm_inf_p - 4.0 * r.norm_p);
            sinc_res = sinc_res.max(sinc_identity_residual(&build_geodesic(&p, &q, cfg.tol)?)?);
        }
        checks.extend(CheckRecord::within(&format!("ratio.p{exp}"), lo, 2.0 / PI - 1e-9, 1.0 + 1e-9));
        checks.push(CheckRecord::at_most(format!("ratio.p{exp}.max"), hi, 1.0 + 1e-9));
        checks.push(CheckRecord::at_most(format!("sinc_residual.p{exp}"), sinc_res, 1e-9));
        checks.push(CheckRecord::at_most(format!("mixed_minus_4p.p{exp}"), mixed_excess, 0.0));

        let mut closed: f64 = 0.0;
        for gamma in [0.1, 0.5, 1.0, 1.4] {
            let (d_err, n_err) = two_by_two_errors(gamma, exp)?;
            closed = closed.max(d_err).max(n_err);
        }
        checks.push(CheckRecord::at_most(format!("two_by_two.p{exp}"), closed, 1e-12));

        let mut diag = Vec::new();
        for r in [1usize, 2, 4, 8] {
            let (p, q) = disjoint_rank_pair(r)?;
            let d = &p - &q;
            let mixed = d.norm_infty_p(exp)?;
            let schatten = d.schatten_norm(exp)?;
            let want = ((2 * r) as f64).powf(1.0 / exp);
            checks.push(CheckRecord::equal(format!("disjoint.r{r}.p{exp}.mixed"), mixed, 1.0));
            checks.push(CheckRecord::at_most(
                format!("disjoint.r{r}.p{exp}.schatten_error"),
                (schatten - want).abs(),
                1e-12,
            ));
            diag.push(json!({"r": r, "mixed": mixed, "schatten": schatten}));
        }
        per_p.push(json!({"p": exp, "ratio_min": lo, "ratio_max": hi, "sinc_residual": sinc_res, "disjoint": diag}));
    }
    Ok((checks, json!(per_p)))
}

/// Errors of `d_p = 2^{1/p}γ` and `‖P − Q‖_p = 2^{1/p} sin γ` for the 2×2 pair.
pub fn two_by_two_errors(gamma: f64, exp: f64) -> Result<(f64, f64)> {
    let s = Splitting::new(1, 1)?;
    let (c, sn) = (gamma.cos(), gamma.sin());
    let m = ComplexMatrix::from_row_slice(2, 2, &[cplx(c * c), cplx(c * sn), cplx(c * sn), cplx(sn * sn)]);
    let q = BlockOperator::from_dense(s, &m)?;
    let r = distance_report(&BlockOperator::e_plus(s), &q, exp)?;
    let k = 2f64.powf(1.0 / exp);
    Ok(((r.d_p - k * gamma).abs(), (r.norm_p - k * sn).abs()))
}

const fn label(class: ClassName, param: Option<i64>) -> ClassLabel {
    ClassLabel { class, param }
}

/// Bundled models, one per class plus `E+`, with their expected labels.
pub const GOLDEN_MODELS: [(&str, &str, ClassLabel); 10] = [
    ("e_plus", include_str!("../models/e_plus.json"), label(ClassName::D3, Some(0))),
    ("d1", include_str!("../models/d1.json"), label(ClassName::D1, Some(3))),
    ("d2", include_str!("../models/d2.json"), label(ClassName::D2, Some(3))),
    ("d3", include_str!("../models/d3.json"), label(ClassName::D3, Some(2))),
    ("d4", include_str!("../models/d4.json"), label(ClassName::D4, Some(-2))),
    ("e1", include_str!("../models/e1.json"), label(ClassName::E1, None)),
    ("e2", include_str!("../models/e2.json"), label(ClassName::E2, None)),
    ("e3", include_str!("../models/e3.json"), label(ClassName::E3, None)),
    ("e4", include_str!("../models/e4.json"), label(ClassName::E4, None)),
    ("e5", include_str!("../models/e5.json"), label(ClassName::E5, None)),
];

pub fn golden_models() -> Result<Vec<(&'static str, ProjectionModel, ClassLabel)>> {
    GOLDEN_MODELS
        .iter()
        .map(|(name, text, label)| Ok((*name, ProjectionModel::from_json(text)?, *label)))
        .collect()
}

/// Random valid model with short lists, optional tails and ranks in `{0, 1, 2, ∞}`.
pub fn random_model(rng: &mut Rng64) -> ProjectionModel {
    let side = |rng: &mut Rng64, upper: f64| {
        let count = rng.int(0, 3);
        let mut values: Vec<f64> = (0..count).map(|_| rng.uniform(0.05, upper)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        match rng.int(0, 2) {
            0 if values.is_empty() => TailSpec::none(),
            0 | 1 => TailSpec::list(&values),
            _ => TailSpec::power(&values, rng.uniform(0.1, 0.45), 2.0),
        }
    };
    let rank = |rng: &mut Rng64| match rng.int(0, 3) {
        3 => ExtRank::Infinite,
        r => ExtRank::Finite(r),
    };
    loop {
        let m = ProjectionModel {
            p: 2.0,
            alpha: side(rng, 0.45),
            beta: side(rng, 0.5),
            e1: rank(rng),
            e1p: rank(rng),
            n: rank(rng),
            np: rank(rng),
        };
        if classify(&m).is_ok() {
            return m;
        }
    }
}

fn classify_suite(cfg: &SuiteConfig) -> Result<(Vec<CheckRecord>, serde_json::Value)> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let trunc = Truncation {
        tail_terms: cfg.tail_terms,
        inf_block: cfg.inf_block,
    };
    for (name, m, want) in golden_models()? {
        let got = classify(&m)?;
        let comp = classify(&m.complement())?;
        checks.push(CheckRecord::equal(format!("golden.{name}.label"), f64::from(u8::from(got == want)), 1.0));
        checks.push(CheckRecord::equal(
            format!("golden.{name}.involution"),
            f64::from(u8::from(comp.class == got.class.complement())),
            1.0,
        ));
        if matches!(got.class, ClassName::D3 | ClassName::D4) {
            for inf_block in [4, 8, 16, 32] {
                let p = materialize(&m, Truncation { inf_block, ..trunc })?;
                let k = model_index(&p, got.class)? as f64;
                checks.push(CheckRecord::equal(
                    format!("golden.{name}.index.inf_block{inf_block}"),
                    k,
                    got.param.unwrap_or_default() as f64,
                ));
            }
        }
        if !got.class.is_discrete() {
            let p = materialize(&m, Truncation { tail_terms: 50, ..trunc })?;
            let r = norm_distance_check(&p, got, 1e-6);
            checks.push(CheckRecord::at_least(format!("golden.{name}.essential_distance"), r.dist_e_plus, 0.99));
        }
        rows.push(json!({"model": name, "label": got, "complement": comp}));
    }

    // random models whose α list is finite: materialized distance below 1 forces D3
    let mut rng = Rng64::new(cfg.seed);
    let mut violations = 0usize;
    let mut near = 0usize;
    let mut sampled = 0usize;
    while sampled < cfg.cases * 5 {
        let m = random_model(&mut rng);
        if m.alpha.is_infinite() {
            continue;
        }
        sampled += 1;
        let got = classify(&m)?;
        let p = materialize(&m, trunc)?;
        let r = norm_distance_check(&p, got, 1e-6);
        near += usize::from(r.near_e_plus);
        violations += usize::from(!r.passed);
    }
    checks.push(CheckRecord::equal("random.norm_dichotomy_violations", violations as f64, 0.0));
    Ok((checks, json!({"golden": rows, "random_sampled": sampled, "random_near_e_plus": near})))
}

fn gallery_suite(cfg: &SuiteConfig) -> Result<(Vec<CheckRecord>, serde_json::Value)> {
    let mut rng = Rng64::new(cfg.seed);
    let mut checks = Vec::new();
    let modes = cfg.dims.max(5);
    let mut hardy = Vec::new();
    for k in -5i64..=5 {
        let h = hardy_projection(&HardyConfig {
            modes,
            phi: Symbol::Monomial(k),
        })?;
        checks.push(CheckRecord::equal(format!("hardy.z{k}.index"), h.index as f64, -k as f64));
        hardy.push(json!({"k": k, "index": h.index}));
    }
    let symbols = [
        (0i64, vec![-0.5, 1.0]),
        (-1, vec![0.3, 1.0, 0.2]),
        (-2, vec![0.6, -3.2, 1.0]),
    ];
    for (i, (lowest, c)) in symbols.iter().enumerate() {
        let h = hardy_projection(&HardyConfig {
            modes,
            phi: Symbol::Polynomial {
                lowest: *lowest,
                coefficients: c.iter().map(|&v| cplx(v)).collect(),
            },
        })?;
        checks.push(CheckRecord::equal(format!("hardy.poly{i}.index"), h.index as f64, -h.winding as f64));
        checks.push(CheckRecord::at_most(
            format!("hardy.poly{i}.pairing"),
            verify_pairing(&h.p, cfg.tol)?.max_residual,
            1e-8,
        ));
        hardy.push(json!({"symbol": i, "winding": h.winding, "index": h.index}));
    }

    // larger windows push concentration eigenvalues into the cluster ambiguity band
    let (n, block) = (16, 4);
    let mut fourier = Vec::new();
    for case in 0..cfg.cases.min(10) {
        let shift = rng.int(0, n - 1);
        let t: Vec<usize> = (0..block).map(|i| (i + shift) % n).collect();
        let s: Vec<usize> = (0..block).collect();
        let (p, r) = fourier_projection(&FourierConfig::from_sets(n, &s, &t))?;
        let dims = (r.dim_range_range + r.dim_range_null + r.dim_null_range) as f64;
        checks.push(CheckRecord::equal(format!("fourier.{case}.intersections"), dims, 0.0));
        checks.push(CheckRecord::at_most(
            format!("fourier.{case}.commutator_trace_norm"),
            (r.commutator_trace_norm - r.twice_corner_trace_norm).abs(),
            1e-9,
        ));
        checks.push(CheckRecord::at_most(
            format!("fourier.{case}.pairing"),
            verify_pairing(&p, cfg.tol)?.max_residual,
            1e-8,
        ));
        fourier.push(r);
    }

    let mut idem_res: f64 = 0.0;
    let mut sv_err: f64 = 0.0;
    let mut nonzero_index = 0usize;
    for _ in 0..cfg.cases {
        let b = rng.complex_matrix(4, 4);
        let r = idempotent_range_projection(&b)?;
        idem_res = idem_res.max(r.projection_residual).max(r.range_residual);
        sv_err = sv_err.max(r.corner_singular_value_error);
        nonzero_index += usize::from(r.index != 0);
    }
    checks.push(CheckRecord::at_most("idempotent.projection_residual", idem_res, 1e-10));
    checks.push(CheckRecord::at_most("idempotent.corner_singular_values", sv_err, 1e-10));
    checks.push(CheckRecord::equal("idempotent.nonzero_index", nonzero_index as f64, 0.0));
    Ok((checks, json!({"hardy": hardy, "fourier": fourier})))
}

fn diagonalize_suite(cfg: &SuiteConfig) -> Result<(Vec<CheckRecord>, serde_json::Value)> {
    let mut rng = Rng64::new(cfg.seed);
    let s = Splitting::new(cfg.dims, cfg.dims)?;
    let mut conj: f64 = 0.0;
    let mut unit: f64 = 0.0;
    let mut sigma = f64::INFINITY;
    let mut ratios = Vec::new();
    for _ in 0..cfg.cases {
        let p = rng.projection(s);
        let d = diagonalize_pair(&p, cfg.tol)?;
        conj = conj.max(d.conjugation_residual);
        unit = unit.max(d.unitarity_defect);
        sigma = sigma.min(d.b_sigma_min);
        let pc = p.commutator_with_eplus().schatten_norm(cfg.p)?;
        let vc = d.v.commutator_with_eplus().schatten_norm(cfg.p)?;
        ratios.push(if pc > 0.0 { vc / pc } else { 0.0 });
    }
    let checks = vec![
        CheckRecord::at_most("conjugation_residual", conj, 1e-8),
        CheckRecord::at_most("unitarity_defect", unit, 1e-10),
        CheckRecord::at_least("b_sigma_min", sigma, FRAC_1_SQRT_2 - 1e-12),
    ];
    let worst = max_of(ratios.iter().copied());
    Ok((
        checks,
        json!({"b_sigma_min": sigma, "v_over_p_commutator_ratio_max": worst, "ratios": ratios}),
    ))
}
