//! Symbolic projection models: finite eigenvalue data plus infinite-tail and
//! infinite-rank flags, the nine-class classification, materialization into
//! finite block operators, the index, and the diagonalizing unitary.
//!
//! A model lists the x-eigenvalues `α ∈ (0, ½)` and `β ∈ [½, 1)` together with
//! the ranks of `E1 = R(P)∩H+`, `E1' = R(P)∩H−`, `N = N(P)∩H+`,
//! `N' = N(P)∩H−`. β values are stored as gaps `δ = 1 − β ∈ (0, ½]`, so both
//! tails are sequences decreasing to zero.
//!
//! The essential verdicts `e`, `f` (images of the diagonal blocks in the
//! Calkin algebra) are read off the flags: an infinite α list accumulates at 0
//! inside `x`, an infinite β list accumulates at 1, and infinite ranks add
//! infinite-dimensional eigenspaces at 0 or 1.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockOperator, Splitting};
use crate::error::{Error, Result};
use crate::linalg::{self, cplx, hermitian_eig, op_norm, polar, ComplexMatrix, TAU};

/// Snap distance used when pushing x- and y-eigenvalues to 0/1.
pub const SNAP: f64 = 1e-9;
/// `trace(P − Q)` must be this close to an integer.
pub const INTEGER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    #[default]
    None,
    FiniteList,
    PowerTail,
}

/// Eigenvalue data on one side: listed values with multiplicities and an
/// optional tail `n ↦ c·n^{−g}` (terms ≥ ½ skipped, multiplicity 1 each).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TailSpec {
    pub kind: TailKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// Defaults to 1 for every listed value when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multiplicities: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

impl TailSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn list(values: &[f64]) -> Self {
        Self {
            kind: TailKind::FiniteList,
            values: values.to_vec(),
            ..Self::default()
        }
    }

    pub fn power(values: &[f64], coefficient: f64, exponent: f64) -> Self {
        Self {
            kind: TailKind::PowerTail,
            values: values.to_vec(),
            coefficient: Some(coefficient),
            exponent: Some(exponent),
            ..Self::default()
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == TailKind::PowerTail
    }

    fn multiplicity(&self, i: usize) -> usize {
        if self.multiplicities.is_empty() {
            1
        } else {
            self.multiplicities[i]
        }
    }

    /// Listed values with multiplicity followed by the first `tail_terms` tail terms.
    pub fn expand(&self, tail_terms: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .flat_map(|(i, &v)| std::iter::repeat_n(v, self.multiplicity(i)))
            .collect();
        if let (TailKind::PowerTail, Some(c), Some(g)) = (self.kind, self.coefficient, self.exponent) {
            out.extend(
                (1u32..)
                    .map(|n| c * f64::from(n).powf(-g))
                    .filter(|&v| v < 0.5)
                    .take(tail_terms),
            );
        }
        out
    }

    fn validate(&self, side: &str, upper_closed: bool, p: f64) -> Result<Self> {
        let mut spec = self.clone();
        if spec.kind == TailKind::None && !spec.values.is_empty() {
            spec.kind = TailKind::FiniteList;
        }
        if !spec.multiplicities.is_empty() && spec.multiplicities.len() != spec.values.len() {
            return Err(Error::RangeViolation(format!(
                "{side}: {} multiplicities for {} values",
                spec.multiplicities.len(),
                spec.values.len()
            )));
        }
        if spec.multiplicities.contains(&0) {
            return Err(Error::RangeViolation(format!("{side}: zero multiplicity")));
        }
        for &v in &spec.values {
            let inside = v > 0.0 && (v < 0.5 || (upper_closed && v == 0.5));
            if !v.is_finite() || !inside {
                let range = if upper_closed { "(0, 1/2]" } else { "(0, 1/2)" };
                return Err(Error::RangeViolation(format!("{side} value {v} outside {range}")));
            }
        }
        // sort listed values (with their multiplicities) descending, like the tail
        let mut pairs: Vec<(f64, usize)> = (0..spec.values.len())
            .map(|i| (spec.values[i], spec.multiplicity(i)))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::RangeViolation(format!(
                "{side}: repeated value; use multiplicities"
            )));
        }
        let explicit = !spec.multiplicities.is_empty();
        spec.values = pairs.iter().map(|q| q.0).collect();
        spec.multiplicities = if explicit { pairs.iter().map(|q| q.1).collect() } else { Vec::new() };

        match spec.kind {
            TailKind::PowerTail => {
                let (c, g) = match (spec.coefficient, spec.exponent) {
                    (Some(c), Some(g)) => (c, g),
                    _ => {
                        return Err(Error::RangeViolation(format!(
                            "{side}: power tail needs coefficient and exponent"
                        )))
                    }
                };
                if !(c.is_finite() && c > 0.0 && g.is_finite() && g > 0.0) {
                    return Err(Error::RangeViolation(format!(
                        "{side}: power tail needs c > 0 and g > 0 (got c = {c}, g = {g})"
                    )));
                }
                let product = g * p / 2.0;
                if product <= 1.0 {
                    return Err(Error::NotSummable { exponent: g, product });
                }
            }
            _ => {
                spec.coefficient = None;
                spec.exponent = None;
            }
        }
        Ok(spec)
    }
}

/// A rank that is either a nonnegative integer or infinite (`"inf"` in JSON).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtRank {
    Finite(usize),
    Infinite,
}

impl ExtRank {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtRank::Finite(_))
    }

    fn finite(self) -> Option<usize> {
        match self {
            ExtRank::Finite(r) => Some(r),
            ExtRank::Infinite => None,
        }
    }
}

impl Default for ExtRank {
    fn default() -> Self {
        ExtRank::Finite(0)
    }
}

impl fmt::Display for ExtRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRank::Finite(r) => write!(f, "{r}"),
            ExtRank::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtRank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtRank::Finite(r) => s.serialize_u64(*r as u64),
            ExtRank::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtRank {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct RankVisitor;
        impl Visitor<'_> for RankVisitor {
            type Value = ExtRank;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtRank, E> {
                usize::try_from(v).map(ExtRank::Finite).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtRank, E> {
                usize::try_from(v)
                    .map(ExtRank::Finite)
                    .map_err(|_| E::custom(format!("negative rank {v}")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtRank, E> {
                if v == "inf" {
                    Ok(ExtRank::Infinite)
                } else {
                    Err(E::custom(format!("unknown rank literal {v:?}")))
                }
            }
        }
        d.deserialize_any(RankVisitor)
    }
}

fn default_p() -> f64 {
    2.0
}

/// Symbolic description of a projection relative to `E+`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionModel {
    #[serde(default = "default_p")]
    pub p: f64,
    /// x-eigenvalues in `(0, ½)`.
    #[serde(default)]
    pub alpha: TailSpec,
    /// Gaps `1 − β` for x-eigenvalues `β ∈ [½, 1)`.
    #[serde(default)]
    pub beta: TailSpec,
    #[serde(default)]
    pub e1: ExtRank,
    #[serde(default)]
    pub e1p: ExtRank,
    #[serde(default)]
    pub n: ExtRank,
    #[serde(default)]
    pub np: ExtRank,
}

impl ProjectionModel {
    /// Model of `E+` itself.
    pub fn e_plus() -> Self {
        Self {
            p: 2.0,
            alpha: TailSpec::none(),
            beta: TailSpec::none(),
            e1: ExtRank::Infinite,
            e1p: ExtRank::Finite(0),
            n: ExtRank::Finite(0),
            np: ExtRank::Infinite,
        }
    }

    /// Model of `1 − P`: x-eigenvalues `t ↦ 1 − t`, so α values become β gaps
    /// and vice versa (a gap of exactly ½ stays a β), and
    /// `E1 ↔ N`, `E1' ↔ N'`.
    pub fn complement(&self) -> Self {
        let mut alpha = self.beta.clone();
        let mut beta = self.alpha.clone();
        let half: Vec<usize> = (0..alpha.values.len())
            .filter(|&i| alpha.values[i] == 0.5)
            .collect();
        for &i in half.iter().rev() {
            let v = alpha.values.remove(i);
            let m = if alpha.multiplicities.is_empty() {
                1
            } else {
                alpha.multiplicities.remove(i)
            };
            if !beta.multiplicities.is_empty() || m != 1 {
                if beta.multiplicities.is_empty() {
                    beta.multiplicities = vec![1; beta.values.len()];
                }
                beta.multiplicities.push(m);
            }
            beta.values.push(v);
            if beta.kind == TailKind::None {
                beta.kind = TailKind::FiniteList;
            }
        }
        if alpha.kind == TailKind::FiniteList && alpha.values.is_empty() {
            alpha.kind = TailKind::None;
        }
        Self {
            p: self.p,
            alpha,
            beta,
            e1: self.n,
            e1p: self.np,
            n: self.e1,
            np: self.e1p,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Checks ranges, summability and that both half-spaces are infinite.
/// Returns the model with listed values sorted.
pub fn validate_model(m: &ProjectionModel) -> Result<ProjectionModel> {
    if !m.p.is_finite() || m.p < 1.0 {
        return Err(Error::InvalidP(m.p));
    }
    let alpha = m.alpha.validate("alpha", false, m.p)?;
    let beta = m.beta.validate("beta", true, m.p)?;
    let tails = alpha.is_infinite() || beta.is_infinite();
    if !(tails || !m.e1.is_finite() || !m.n.is_finite()) {
        return Err(Error::FiniteSpace("H+"));
    }
    if !(tails || !m.e1p.is_finite() || !m.np.is_finite()) {
        return Err(Error::FiniteSpace("H-"));
    }
    Ok(ProjectionModel {
        p: m.p,
        alpha,
        beta,
        ..m.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassName {
    D1,
    D2,
    D3,
    D4,
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl ClassName {
    pub const ALL: [ClassName; 9] = [
        ClassName::D1,
        ClassName::D2,
        ClassName::D3,
        ClassName::D4,
        ClassName::E1,
        ClassName::E2,
        ClassName::E3,
        ClassName::E4,
        ClassName::E5,
    ];

    pub fn is_discrete(self) -> bool {
        matches!(self, ClassName::D1 | ClassName::D2 | ClassName::D3 | ClassName::D4)
    }

    /// Class of `1 − P`.
    pub fn complement(self) -> Self {
        use ClassName::*;
        match self {
            D1 => D2,
            D2 => D1,
            D3 => D4,
            D4 => D3,
            E1 => E3,
            E3 => E1,
            E2 => E4,
            E4 => E2,
            E5 => E5,
        }
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Essential verdict for one diagonal block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Essential {
    Zero,
    One,
    Proper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub class: ClassName,
    /// Rank (D1), corank (D2) or index (D3, D4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<i64>,
}

impl ClassLabel {
    pub fn d3(k: i64) -> Self {
        Self {
            class: ClassName::D3,
            param: Some(k),
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param {
            Some(k) => write!(f, "{}({k})", self.class),
            None => write!(f, "{}", self.class),
        }
    }
}

/// `(e, f)` for a validated model.
pub fn essential_verdicts(m: &ProjectionModel) -> (Essential, Essential) {
    let alpha_fin = !m.alpha.is_infinite();
    let beta_fin = !m.beta.is_infinite();
    let e = if beta_fin && m.e1.is_finite() {
        Essential::Zero
    } else if alpha_fin && m.n.is_finite() {
        Essential::One
    } else {
        Essential::Proper
    };
    let f = if alpha_fin && m.e1p.is_finite() {
        Essential::Zero
    } else if beta_fin && m.np.is_finite() {
        Essential::One
    } else {
        Essential::Proper
    };
    (e, f)
}

fn listed_count(t: &TailSpec) -> usize {
    (0..t.values.len()).map(|i| t.multiplicity(i)).sum()
}

/// Nine-class label, decided from the model flags alone.
pub fn classify(m: &ProjectionModel) -> Result<ClassLabel> {
    use Essential::*;
    let m = validate_model(m)?;
    let pairs = (listed_count(&m.alpha) + listed_count(&m.beta)) as i64;
    let r = |x: ExtRank| x.finite().map(|v| v as i64).unwrap_or(0);
    let (class, param) = match essential_verdicts(&m) {
        (Zero, Zero) => (ClassName::D1, Some(pairs + r(m.e1) + r(m.e1p))),
        (One, One) => (ClassName::D2, Some(pairs + r(m.n) + r(m.np))),
        (One, Zero) => (ClassName::D3, Some(r(m.e1p) - r(m.n))),
        (Zero, One) => (ClassName::D4, Some(r(m.e1) - r(m.np))),
        (Proper, Zero) => (ClassName::E1, None),
        (Zero, Proper) => (ClassName::E2, None),
        (Proper, One) => (ClassName::E3, None),
        (One, Proper) => (ClassName::E4, None),
        (Proper, Proper) => (ClassName::E5, None),
    };
    Ok(ClassLabel { class, param })
}

/// Finite budget used to materialize a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub tail_terms: usize,
    pub inf_block: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tail_terms: 24,
            inf_block: 8,
        }
    }
}

/// Finite projection realizing the truncated model.
///
/// Coordinates on each side: one per eigenvalue pair (α ascending, then β
/// ascending), then `E1`/`N` on `H+` and `E1'`/`N'` on `H−`.
pub fn materialize(m: &ProjectionModel, trunc: Truncation) -> Result<BlockOperator> {
    let m = validate_model(m)?;
    let size = |r: ExtRank, name: &str| match r {
        ExtRank::Infinite => Ok(trunc.inf_block),
        ExtRank::Finite(v) if v > trunc.inf_block => Err(Error::TruncationTooSmall(format!(
            "{name} = {v} exceeds inf_block = {}",
            trunc.inf_block
        ))),
        ExtRank::Finite(v) => Ok(v),
    };
    let (e1, n, e1p, np) = (size(m.e1, "e1")?, size(m.n, "n")?, size(m.e1p, "e1p")?, size(m.np, "np")?);

    let mut values = m.alpha.expand(trunc.tail_terms);
    values.sort_by(f64::total_cmp);
    let mut betas: Vec<f64> = m.beta.expand(trunc.tail_terms).iter().map(|d| 1.0 - d).collect();
    betas.sort_by(f64::total_cmp);
    values.extend(betas);

    let pairs = values.len();
    let dp = pairs + e1 + n;
    let dm = pairs + e1p + np;
    if dp == 0 || dm == 0 {
        return Err(Error::TruncationTooSmall(format!(
            "materialized splitting {dp}+{dm} has an empty side"
        )));
    }
    let splitting = Splitting::new(dp, dm)?;
    let mut x = ComplexMatrix::zeros(dp, dp);
    let mut y = ComplexMatrix::zeros(dm, dm);
    let mut a = ComplexMatrix::zeros(dp, dm);
    for (j, &t) in values.iter().enumerate() {
        x[(j, j)] = cplx(t);
        y[(j, j)] = cplx(1.0 - t);
        a[(j, j)] = cplx((t - t * t).sqrt());
    }
    for j in pairs..pairs + e1 {
        x[(j, j)] = cplx(1.0);
    }
    for j in pairs..pairs + e1p {
        y[(j, j)] = cplx(1.0);
    }
    let a_star = a.adjoint();
    BlockOperator::from_blocks(splitting, x, a, a_star, y)
}

/// `round(trace(P − Q))`, rejecting traces farther than `INTEGER_TOL` from an integer.
pub fn index_of(p: &BlockOperator, q: &BlockOperator, exponent: f64) -> Result<i64> {
    if exponent.is_nan() || exponent < 1.0 {
        return Err(Error::InvalidP(exponent));
    }
    if p.splitting() != q.splitting() {
        return Err(Error::DimensionMismatch("operators on different splittings".into()));
    }
    let trace = (p - q).trace().re;
    if !trace.is_finite() {
        return Err(Error::NonFinite);
    }
    let k = trace.round();
    let distance = (trace - k).abs();
    if distance > INTEGER_TOL {
        return Err(Error::NotInteger { trace, distance });
    }
    Ok(k as i64)
}

/// Index of a materialization: `trace(P − E+)` for D3-type labels and
/// `trace(P − E−)` for D4-type labels; the other one is not bounded
/// under truncation for the respective class.
pub fn model_index(p: &BlockOperator, class: ClassName) -> Result<i64> {
    let s = p.splitting();
    match class {
        ClassName::D4 => index_of(p, &BlockOperator::e_minus(s), 1.0),
        _ => index_of(p, &BlockOperator::e_plus(s), 1.0),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReport {
    pub dist_e_plus: f64,
    pub dist_e_minus: f64,
    pub label: ClassLabel,
    /// `‖P − E+‖ < 1 − τ`, which forces a D3 label.
    pub near_e_plus: bool,
    pub passed: bool,
}

/// Compares `‖P − E+‖ < 1 − τ` against the label: being that close forces D3.
pub fn norm_distance_check(p: &BlockOperator, label: ClassLabel, tol: f64) -> NormReport {
    let s = p.splitting();
    let dist_e_plus = (p - &BlockOperator::e_plus(s)).op_norm();
    let dist_e_minus = (p - &BlockOperator::e_minus(s)).op_norm();
    let near_e_plus = dist_e_plus < 1.0 - tol;
    NormReport {
        dist_e_plus,
        dist_e_minus,
        label,
        near_e_plus,
        passed: !near_e_plus || label.class == ClassName::D3,
    }
}

/// Output of [`diagonalize_pair`].
#[derive(Debug, Clone)]
pub struct Diagonalization {
    /// `E+`-diagonal projection obtained by pushing the x- and y-eigenvalues to 0/1.
    pub p0: BlockOperator,
    /// Unitary factor of `B = P + P0 − 1`; `V P V* = P0`.
    pub v: BlockOperator,
    pub b_sigma_min: f64,
    /// `‖V P V* − P0‖`.
    pub conjugation_residual: f64,
    /// `‖V*V − 1‖`.
    pub unitarity_defect: f64,
    /// `‖V − V*‖`.
    pub hermitian_defect: f64,
}

/// Unitary `V` with `V P V* = P0`, `P0` commuting with `E+`.
///
/// `P0 = P0+ ⊕ P0−` projects onto the x-eigenvectors with eigenvalue `≥ ½`
/// and the y-eigenvectors with eigenvalue `> ½` (`SNAP` decides ties at ½
/// consistently on both sides, since y-eigenvalues are `1 − x`-eigenvalues).
/// `B = P + P0 − 1` satisfies `BP = P0B` and is invertible, so its polar
/// factor does the conjugation.
pub fn diagonalize_pair(p: &BlockOperator, tol: f64) -> Result<Diagonalization> {
    p.ensure_projection(tol)?;
    let s = p.splitting();
    let ex = hermitian_eig(&p.a11, tol.max(TAU))?;
    let ey = hermitian_eig(&p.a22, tol.max(TAU))?;
    let p0_plus = linalg::projector(&ex.columns_where(|t| t >= 0.5 - SNAP));
    let p0_minus = linalg::projector(&ey.columns_where(|t| t > 0.5 + SNAP));
    let p0 = BlockOperator::block_diagonal(p0_plus, p0_minus)?;
    let b = &(p + &p0) - &BlockOperator::identity(s);
    let bd = b.to_dense();
    let pol = polar(&bd, linalg::scaled_tol(s.dim(), 1.0)).map_err(|e| match e {
        Error::Singular { sigma_min, .. } => Error::SingularB { sigma_min },
        other => other,
    })?;
    let v = pol.unitary;
    let n = s.dim();
    let conj = &v * p.to_dense() * v.adjoint();
    let conjugation_residual = op_norm(&(conj - p0.to_dense()));
    let unitarity_defect = op_norm(&(v.adjoint() * &v - linalg::identity(n)));
    let hermitian_defect = op_norm(&(&v - v.adjoint()));
    Ok(Diagonalization {
        p0,
        v: BlockOperator::from_dense(s, &v)?,
        b_sigma_min: pol.sigma_min,
        conjugation_residual,
        unitarity_defect,
        hermitian_defect,
    })
}

/// Block-diagonal unitary `W = W+ ⊕ W−` with `W P W* = Q` for two projections
/// that commute with `E+` and have equal ranks on each side.
pub fn diagonal_conjugator(p: &BlockOperator, q: &BlockOperator, tol: f64) -> Result<BlockOperator> {
    if p.splitting() != q.splitting() {
        return Err(Error::DimensionMismatch("operators on different splittings".into()));
    }
    for op in [p, q] {
        op.ensure_projection(tol)?;
        if op.a12.norm() > tol || op.a21.norm() > tol {
            return Err(Error::DimensionMismatch("projection does not commute with E+".into()));
        }
    }
    let side = |a: &ComplexMatrix, b: &ComplexMatrix| -> Result<ComplexMatrix> {
        let ea = hermitian_eig(a, tol.max(TAU))?;
        let eb = hermitian_eig(b, tol.max(TAU))?;
        let ra = ea.values.iter().filter(|&&t| t > 0.5).count();
        let rb = eb.values.iter().filter(|&&t| t > 0.5).count();
        if ra != rb {
            return Err(Error::DimensionMismatch(format!("ranks {ra} and {rb} differ")));
        }
        // both eigenbases are ascending, so matching columns pairs 0 with 0 and 1 with 1
        Ok(&eb.vectors * ea.vectors.adjoint())
    };
    let w_plus = side(&p.a11, &q.a11)?;
    let w_minus = side(&p.a22, &q.a22)?;
    BlockOperator::block_diagonal(w_plus, w_minus)
}
