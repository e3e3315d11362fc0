use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use pgrass::algebra::{BlockOperator, Splitting};
use pgrass::gallery::{
    fourier_projection, hardy_projection, idempotent_range_projection, FourierConfig, HardyConfig, Symbol,
};
use pgrass::halmos::{build_geodesic, distance_report, geodesic_curve, sinc_identity_residual};
use pgrass::linalg::cplx;
use pgrass::model::{
    classify, essential_verdicts, materialize, model_index, norm_distance_check, validate_model, ClassName,
    ProjectionModel, Truncation,
};
use pgrass::random::Rng64;
use pgrass::report::{curve_csv, CheckRecord, Report};
use pgrass::spectral::{extract_picture, verify_pairing};
use pgrass::suites::{run_suite, Suite, SuiteConfig};
use pgrass::Error;

#[derive(Parser, Debug)]
#[command(name = "pgrass", version, about = "Projections relative to a fixed splitting: classification, geodesics, checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for report.json and CSV curves.
    #[arg(long, global = true, env = "PGRASS_OUT")]
    out: Option<PathBuf>,
    /// Schatten exponent.
    #[arg(long, global = true, default_value_t = 2.0)]
    p: f64,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Dimension of each half-space for random cases.
    #[arg(long, global = true, default_value_t = 16)]
    dims: usize,
    #[arg(long, global = true, default_value_t = 24)]
    tail_terms: usize,
    #[arg(long, global = true, default_value_t = 8)]
    inf_block: usize,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a projection model and cross-check its materialization.
    Classify {
        #[arg(long)]
        model: PathBuf,
    },
    /// Build one of the example families.
    Example {
        #[command(subcommand)]
        which: Example,
    },
    /// Run invariant suites (all of them when --suite is omitted).
    Verify {
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        /// Random cases per configuration.
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
    /// Spectral picture of a model, a block-operator file, or a random projection.
    Picture {
        #[arg(long, conflicts_with = "matrix")]
        model: Option<PathBuf>,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Geodesic length and norm comparisons between two projections.
    Distance {
        /// Model or block-operator JSON; random when omitted.
        #[arg(long, requires = "to")]
        from: Option<PathBuf>,
        #[arg(long, requires = "from")]
        to: Option<PathBuf>,
    },
    /// Sample the geodesic between two projections as CSV.
    Geodesic {
        #[arg(long, requires = "to")]
        from: Option<PathBuf>,
        #[arg(long, requires = "from")]
        to: Option<PathBuf>,
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Example {
    /// Projection onto φH² in a window of 2N+1 Fourier modes.
    Hardy {
        /// Monomial symbol z^k.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "coeffs")]
        k: Option<i64>,
        /// Real coefficients of φ starting at z^lowest.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<f64>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        lowest: i64,
        #[arg(long, default_value_t = 16)]
        modes: usize,
    },
    /// Frequency-restricted projection on the cyclic group Z_n.
    Fourier {
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Coordinates forming H+ (default 0..n/4).
        #[arg(long, value_delimiter = ',')]
        s: Vec<usize>,
        /// Kept frequencies (default a random shift of 0..n/4).
        #[arg(long, value_delimiter = ',')]
        t: Vec<usize>,
    },
    /// Range projection of [[1, B], [0, 0]] for a random B.
    Idempotent {
        #[arg(long, default_value_t = 4)]
        size: usize,
    },
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        emit(&cli, &report)?;
        Ok(report)
    });
    match result {
        Ok(report) if report.all_passed() => ExitCode::SUCCESS,
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.passed()) {
                eprintln!("FAIL {}: measured {:e}, bound {:e}", c.name, c.measured, c.bound);
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> std::result::Result<(), Failure> {
    if let Some(dir) = &cli.out {
        report.write(dir)?;
    }
    if !matches!(cli.command, Command::Geodesic { .. }) || cli.out.is_some() {
        println!("{}", report.to_json()?);
    }
    Ok(())
}

fn config_echo(cli: &Cli) -> serde_json::Value {
    json!({
        "command": format!("{:?}", cli.command),
        "p": cli.p,
        "seed": cli.seed,
        "dims": cli.dims,
        "tail_terms": cli.tail_terms,
        "inf_block": cli.inf_block,
        "tol": cli.tol,
    })
}

fn run(cli: &Cli) -> Outcome {
    if !(cli.p >= 1.0 && cli.p.is_finite()) {
        return Err(Failure::Usage(format!("--p must be a finite number >= 1 (got {})", cli.p)));
    }
    if cli.dims == 0 {
        return Err(Failure::Usage("--dims must be at least 1".into()));
    }
    let trunc = Truncation {
        tail_terms: cli.tail_terms,
        inf_block: cli.inf_block,
    };
    match &cli.command {
        Command::Classify { model } => classify_cmd(cli, model, trunc),
        Command::Example { which } => example_cmd(cli, which),
        Command::Verify { suite, cases } => verify_cmd(cli, suite, *cases),
        Command::Picture { model, matrix } => picture_cmd(cli, model.as_deref(), matrix.as_deref(), trunc),
        Command::Distance { from, to } => distance_cmd(cli, from.as_deref(), to.as_deref(), trunc),
        Command::Geodesic { from, to, samples } => geodesic_cmd(cli, from.as_deref(), to.as_deref(), *samples, trunc),
    }
}

fn read_model(path: &Path) -> std::result::Result<ProjectionModel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    ProjectionModel::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Block-operator JSON, or a model JSON that gets materialized.
fn read_operator(path: &Path, trunc: Truncation) -> std::result::Result<BlockOperator, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let Ok(op) = serde_json::from_str::<BlockOperator>(&text) {
        return Ok(op);
    }
    let model =
        ProjectionModel::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(materialize(&model, trunc)?)
}

fn operator_pair(
    cli: &Cli,
    from: Option<&Path>,
    to: Option<&Path>,
    trunc: Truncation,
) -> std::result::Result<(BlockOperator, BlockOperator), Failure> {
    match (from, to) {
        (Some(a), Some(b)) => Ok((read_operator(a, trunc)?, read_operator(b, trunc)?)),
        _ => {
            let mut rng = Rng64::new(cli.seed);
            let s = Splitting::new(cli.dims, cli.dims)?;
            let p = rng.projection(s);
            let q = rng.projection_with_rank(s, p.trace().re.round() as usize);
            Ok((p, q))
        }
    }
}

fn classify_cmd(cli: &Cli, path: &Path, trunc: Truncation) -> Outcome {
    let model = read_model(path)?;
    let model = validate_model(&model).map_err(|e| Failure::Usage(e.to_string()))?;
    let label = classify(&model)?;
    let (e, f) = essential_verdicts(&model);
    let mut report = Report::new("classify", config_echo(cli));
    let p = materialize(&model, trunc)?;
    let mut indices = Vec::new();
    if matches!(label.class, ClassName::D3 | ClassName::D4) {
        for factor in [1, 2, 4] {
            let t = Truncation {
                inf_block: trunc.inf_block * factor,
                ..trunc
            };
            let k = model_index(&materialize(&model, t)?, label.class)?;
            report.push(CheckRecord::equal(
                format!("index.inf_block{}", t.inf_block),
                k as f64,
                label.param.unwrap_or_default() as f64,
            ));
            indices.push(json!({"inf_block": t.inf_block, "index": k}));
        }
    }
    let norms = norm_distance_check(&p, label, 1e-6);
    report.push(CheckRecord::equal("norm_dichotomy", f64::from(u8::from(norms.passed)), 1.0));
    report.results = json!({
        "model": model,
        "label": label,
        "essential": {"e": e, "f": f},
        "materialized": {"dim_plus": p.splitting().dim_plus, "dim_minus": p.splitting().dim_minus},
        "indices": indices,
        "norms": norms,
    });
    Ok(report)
}

fn example_cmd(cli: &Cli, which: &Example) -> Outcome {
    let mut rng = Rng64::new(cli.seed);
    match which {
        Example::Hardy {
            k,
            coeffs,
            lowest,
            modes,
        } => {
            let phi = match k {
                Some(k) => Symbol::Monomial(*k),
                None if coeffs.is_empty() => Symbol::Monomial(0),
                None => Symbol::Polynomial {
                    lowest: *lowest,
                    coefficients: coeffs.iter().map(|&c| cplx(c)).collect(),
                },
            };
            let h = hardy_projection(&HardyConfig { modes: *modes, phi })?;
            let mut report = Report::new("example hardy", config_echo(cli));
            report.push(CheckRecord::equal(
                "index",
                h.index as f64,
                h.expected.param.unwrap_or_default() as f64,
            ));
            report.push(CheckRecord::at_most(
                "pairing_residual",
                verify_pairing(&h.p, cli.tol)?.max_residual,
                1e-8,
            ));
            report.results = json!({
                "modes": modes,
                "winding": h.winding,
                "index": h.index,
                "expected": h.expected,
                "min_modulus": h.min_modulus,
            });
            Ok(report)
        }
        Example::Fourier { n, s, t } => {
            let block = (n / 4).max(1);
            let s = if s.is_empty() { (0..block).collect() } else { s.clone() };
            let t = if t.is_empty() {
                let shift = rng.int(0, n.saturating_sub(1));
                (0..block).map(|i| (i + shift) % n).collect()
            } else {
                t.clone()
            };
            if s.iter().chain(&t).any(|&i| i >= *n) {
                return Err(Failure::Usage(format!("mask indices must be below n = {n}")));
            }
            let (_, r) = fourier_projection(&FourierConfig::from_sets(*n, &s, &t))?;
            let mut report = Report::new("example fourier", config_echo(cli));
            report.push(CheckRecord::at_most(
                "commutator_trace_norm_identity",
                (r.commutator_trace_norm - r.twice_corner_trace_norm).abs(),
                1e-9,
            ));
            report.push(CheckRecord::at_most(
                "commutator_identity_residual",
                r.commutator_identity_residual,
                1e-12,
            ));
            if s.len() + t.len() > *n {
                report.push(CheckRecord::at_least(
                    "range_intersection_lower_bound",
                    r.dim_range_range as f64,
                    (s.len() + t.len() - n) as f64,
                ));
            }
            report.results = json!({"s": s, "t": t, "report": r});
            Ok(report)
        }
        Example::Idempotent { size } => {
            let b = rng.complex_matrix(*size, *size);
            let r = idempotent_range_projection(&b)?;
            let mut report = Report::new("example idempotent", config_echo(cli));
            report.push(CheckRecord::at_most("projection_residual", r.projection_residual, 1e-10));
            report.push(CheckRecord::at_most("range_residual", r.range_residual, 1e-10));
            report.push(CheckRecord::equal("index", r.index as f64, 0.0));
            report.push(CheckRecord::at_most(
                "corner_singular_values",
                r.corner_singular_value_error,
                1e-10,
            ));
            report.results = json!({"size": size, "rank": r.rank, "index": r.index, "expected": r.expected});
            Ok(report)
        }
    }
}

fn verify_cmd(cli: &Cli, suites: &[Suite], cases: usize) -> Outcome {
    let cfg = SuiteConfig {
        seed: cli.seed,
        p: cli.p,
        dims: cli.dims,
        cases,
        tail_terms: cli.tail_terms,
        inf_block: cli.inf_block,
        tol: cli.tol,
    };
    let selected: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let mut report = Report::new("verify", config_echo(cli));
    let mut results = serde_json::Map::new();
    for suite in selected {
        let out = run_suite(suite, &cfg)?;
        let prefix = serde_json::to_value(suite).map_err(Error::from)?;
        let prefix = prefix.as_str().unwrap_or("suite").to_string();
        for mut c in out.checks {
            c.name = format!("{prefix}.{}", c.name);
            report.push(c);
        }
        results.insert(prefix, out.results);
    }
    report.results = serde_json::Value::Object(results);
    Ok(report)
}

fn picture_cmd(cli: &Cli, model: Option<&Path>, matrix: Option<&Path>, trunc: Truncation) -> Outcome {
    let p = match (model, matrix) {
        (Some(m), _) => materialize(&read_model(m)?, trunc)?,
        (None, Some(m)) => read_operator(m, trunc)?,
        (None, None) => {
            let mut rng = Rng64::new(cli.seed);
            rng.projection(Splitting::new(cli.dims, cli.dims)?)
        }
    };
    let pic = extract_picture(&p, cli.tol)?;
    let pairing = verify_pairing(&p, cli.tol)?;
    let mut report = Report::new("picture", config_echo(cli));
    report.push(CheckRecord::at_most("pairing_residual", pairing.max_residual, pairing.residual_bound));
    report.push(CheckRecord::equal("pairing_passed", f64::from(u8::from(pairing.passed)), 1.0));
    report.results = json!({
        "alphas": pic.alphas,
        "betas": pic.betas,
        "rank_e1": pic.rank_e1,
        "rank_e1prime": pic.rank_e1prime,
        "rank_n": pic.rank_n,
        "rank_nprime": pic.rank_nprime,
        "pairing": pairing,
    });
    Ok(report)
}

fn distance_cmd(cli: &Cli, from: Option<&Path>, to: Option<&Path>, trunc: Truncation) -> Outcome {
    let (p, q) = operator_pair(cli, from, to, trunc)?;
    let r = distance_report(&p, &q, cli.p)?;
    let g = build_geodesic(&p, &q, cli.tol)?;
    let sinc = sinc_identity_residual(&g)?;
    let mut report = Report::new("distance", config_echo(cli));
    if r.d_p > 0.0 {
        report.extend(CheckRecord::within(
            "ratio",
            r.ratio,
            2.0 / std::f64::consts::PI - 1e-9,
            1.0 + 1e-9,
        ));
    }
    report.push(CheckRecord::at_most("mixed_norm", r.norm_inf_p, 4.0 * r.norm_p + 1e-9));
    report.push(CheckRecord::at_most("sinc_residual", sinc, 1e-9));
    report.results = json!({"distance": r, "angles": g.angles});
    Ok(report)
}

fn geodesic_cmd(cli: &Cli, from: Option<&Path>, to: Option<&Path>, samples: usize, trunc: Truncation) -> Outcome {
    let (p, q) = operator_pair(cli, from, to, trunc)?;
    let g = build_geodesic(&p, &q, cli.tol)?;
    let curve = geodesic_curve(&g, samples)?;
    let csv = curve_csv(&curve);
    let end = pgrass::halmos::geodesic_eval(&g, 1.0)?;
    let mut report = Report::new("geodesic", config_echo(cli));
    report.push(CheckRecord::at_most(
        "endpoint_residual",
        (&end - &q).op_norm(),
        1e-8,
    ));
    report.push(CheckRecord::at_most("codiagonal_defect", g.codiagonal_defect(), 1e-8));
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            std::fs::write(dir.join("geodesic.csv"), &csv).map_err(Error::from)?;
        }
        None => print!("{csv}"),
    }
    report.results = json!({"samples": curve.len(), "length": g.length(cli.p)?, "non_unique": g.non_unique});
    Ok(report)
}
