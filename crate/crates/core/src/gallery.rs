//! Finite models of three standard families: Hardy-space projections
//! `P_{φH²}` on a truncated Fourier window, Fourier-restricted projections on
//! the cyclic group `Z_n`, and range projections of idempotents
//! `[[1, B], [0, 0]]`.

use std::f64::consts::TAU as TWO_PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockOperator, Splitting};
use crate::error::{Error, Result};
use crate::linalg::{
    self, cplx, op_norm, orthonormalize, projector, schatten_norm, singular_values, ComplexMatrix,
};
use crate::model::{index_of, ClassLabel};

/// Trigonometric polynomial `φ(z) = Σ_j c_j z^{lowest + j}` or the monomial `z^k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Monomial(i64),
    Polynomial {
        lowest: i64,
        coefficients: Vec<Complex64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyConfig {
    /// Window of frequencies `−modes..=modes`; `H+` holds `0..=modes`.
    pub modes: usize,
    pub phi: Symbol,
}

#[derive(Debug, Clone)]
pub struct HardyProjection {
    pub p: BlockOperator,
    pub expected: ClassLabel,
    pub winding: i64,
    /// `min |φ|` on the sampling grid (1 for monomials).
    pub min_modulus: f64,
    /// `index_of(P, E+)`.
    pub index: i64,
}

fn hardy_splitting(modes: usize) -> Result<Splitting> {
    Splitting::new(modes + 1, modes)
}

/// Coordinate of frequency `j` in the window: `H+` holds `0..=N` in order,
/// `H−` holds `−1, −2, …, −N`.
fn mode_index(modes: usize, j: i64) -> usize {
    if j >= 0 {
        j as usize
    } else {
        modes + (-j) as usize
    }
}

/// Projection onto the truncated span of `φ·z^j`, `j ≥ 0`.
///
/// Writing `φ = z^m·q_in·q_out` with `q_in` collecting the roots inside the unit
/// disk (`Z` of them) and `q_out` invertible in `H^∞`, the subspace `φH²`
/// equals `z^m q_in H²`; we take the span of `z^{m+j}·q_in`,
/// `0 ≤ j ≤ N − m − Z`, which stays inside the window and has index
/// `−(m + Z) = −winding(φ)` at every `N`.
pub fn hardy_projection(cfg: &HardyConfig) -> Result<HardyProjection> {
    if cfg.modes == 0 {
        return Err(Error::Config("hardy window needs modes >= 1".into()));
    }
    match &cfg.phi {
        Symbol::Monomial(k) => hardy_monomial(cfg.modes, *k),
        Symbol::Polynomial {
            lowest,
            coefficients,
        } => hardy_polynomial(cfg.modes, *lowest, coefficients),
    }
}

fn hardy_monomial(modes: usize, k: i64) -> Result<HardyProjection> {
    if k.unsigned_abs() as usize > modes {
        return Err(Error::Config(format!("|k| = {} exceeds modes = {modes}", k.abs())));
    }
    let s = hardy_splitting(modes)?;
    let mut d = ComplexMatrix::zeros(s.dim(), s.dim());
    for j in k..=modes as i64 {
        let i = mode_index(modes, j);
        d[(i, i)] = cplx(1.0);
    }
    let p = BlockOperator::from_dense(s, &d)?;
    let index = index_of(&p, &BlockOperator::e_plus(s), 1.0)?;
    Ok(HardyProjection {
        p,
        expected: ClassLabel::d3(-k),
        winding: k,
        min_modulus: 1.0,
        index,
    })
}

fn trim(coefficients: &[Complex64], lowest: i64) -> (i64, Vec<Complex64>) {
    let first = coefficients.iter().position(|c| c.norm() > 0.0);
    let last = coefficients.iter().rposition(|c| c.norm() > 0.0);
    match (first, last) {
        (Some(a), Some(b)) => (lowest + a as i64, coefficients[a..=b].to_vec()),
        _ => (lowest, Vec::new()),
    }
}

fn eval(lowest: i64, c: &[Complex64], z: Complex64) -> Complex64 {
    let poly = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci);
    poly * z.powi(lowest as i32)
}

/// Roots of `Σ c_i z^i` from the companion matrix.
fn roots(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = cplx(1.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    m.schur()
        .eigenvalues()
        .expect("complex Schur form always yields eigenvalues")
        .iter()
        .copied()
        .collect()
}

/// Winding number from phase accumulation on `samples` points of the circle,
/// with the minimum modulus seen and the largest phase step.
fn grid_winding(lowest: i64, c: &[Complex64], samples: usize) -> (i64, f64, f64) {
    let z = |k: usize| Complex64::from_polar(1.0, TWO_PI * k as f64 / samples as f64);
    let mut prev = eval(lowest, c, z(0));
    let mut min_modulus = prev.norm();
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    for k in 1..=samples {
        let v = eval(lowest, c, z(k % samples));
        min_modulus = min_modulus.min(v.norm());
        let step = (v / prev).arg();
        max_step = max_step.max(step.abs());
        total += step;
        prev = v;
    }
    ((total / TWO_PI).round() as i64, min_modulus, max_step)
}

fn hardy_subspace(modes: usize, lowest: i64, inner: &[Complex64]) -> Result<ComplexMatrix> {
    let s = hardy_splitting(modes)?;
    let z = inner.len() as i64 - 1;
    let count = modes as i64 - lowest - z + 1;
    if lowest < -(modes as i64) || count < 1 {
        return Err(Error::TruncationTooCoarse(format!(
            "symbol does not fit the window of {modes} modes"
        )));
    }
    let mut g = ComplexMatrix::zeros(s.dim(), count as usize);
    for j in 0..count {
        for (i, &ci) in inner.iter().enumerate() {
            g[(mode_index(modes, lowest + j + i as i64), j as usize)] = ci;
        }
    }
    let q = orthonormalize(&g, 1e-12);
    if q.ncols() != count as usize {
        return Err(Error::TruncationTooCoarse(format!(
            "span of shifted symbol has dimension {} instead of {count}",
            q.ncols()
        )));
    }
    Ok(projector(&q))
}

fn hardy_polynomial(modes: usize, lowest: i64, coefficients: &[Complex64]) -> Result<HardyProjection> {
    let (lowest, c) = trim(coefficients, lowest);
    if c.is_empty() {
        return Err(Error::SymbolVanishes { min_modulus: 0.0 });
    }
    let highest = lowest + c.len() as i64 - 1;
    if lowest < -(modes as i64) || highest > modes as i64 {
        return Err(Error::Config(format!(
            "symbol degrees {lowest}..{highest} exceed the window of {modes} modes"
        )));
    }
    let scale = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let samples = (4 * modes).max(64);
    let (winding, min_modulus, max_step) = grid_winding(lowest, &c, samples);
    if min_modulus <= 1e-10 * scale {
        return Err(Error::SymbolVanishes { min_modulus });
    }
    if max_step > std::f64::consts::FRAC_PI_2 {
        return Err(Error::TruncationTooCoarse(format!(
            "phase step {max_step:.3} on a {samples}-point grid"
        )));
    }

    // inner factor: monic product of (z − r) over roots inside the disk
    let mut inner = vec![cplx(1.0)];
    for r in roots(&c).into_iter().filter(|r| r.norm() < 1.0) {
        let mut next = vec![cplx(0.0); inner.len() + 1];
        for (i, &v) in inner.iter().enumerate() {
            next[i + 1] += v;
            next[i] -= r * v;
        }
        inner = next;
    }
    let inside = inner.len() as i64 - 1;
    if lowest + inside != winding {
        return Err(Error::TruncationTooCoarse(format!(
            "root count gives winding {} but the grid gives {winding}",
            lowest + inside
        )));
    }

    let s = hardy_splitting(modes)?;
    let p = BlockOperator::from_dense(s, &hardy_subspace(modes, lowest, &inner)?)?;
    let index = index_of(&p, &BlockOperator::e_plus(s), 1.0)?;
    let wider = hardy_splitting(modes + 4)?;
    let p_wider = BlockOperator::from_dense(wider, &hardy_subspace(modes + 4, lowest, &inner)?)?;
    let index_wider = index_of(&p_wider, &BlockOperator::e_plus(wider), 1.0)?;
    if index != index_wider {
        return Err(Error::TruncationTooCoarse(format!(
            "index {index} at {modes} modes but {index_wider} at {} modes",
            modes + 4
        )));
    }
    Ok(HardyProjection {
        p,
        expected: ClassLabel::d3(-winding),
        winding,
        min_modulus,
        index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierConfig {
    pub n: usize,
    /// Coordinates forming `H+`.
    pub s_mask: Vec<bool>,
    /// Frequencies kept by `P`.
    pub t_mask: Vec<bool>,
}

impl FourierConfig {
    pub fn from_sets(n: usize, s: &[usize], t: &[usize]) -> Self {
        let mask = |set: &[usize]| (0..n).map(|i| set.contains(&i)).collect();
        Self {
            n,
            s_mask: mask(s),
            t_mask: mask(t),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierReport {
    pub n: usize,
    pub size_s: usize,
    pub size_t: usize,
    /// `‖E+P‖_1`.
    pub trace_norm_e_plus_p: f64,
    pub dim_range_range: usize,
    pub dim_range_null: usize,
    pub dim_null_range: usize,
    /// `‖[E+, P]‖_1`.
    pub commutator_trace_norm: f64,
    /// `2‖E+P(1 − E+)‖_1`.
    pub twice_corner_trace_norm: f64,
    /// `‖[E+, P] − (E+P − (E+P)*)‖`.
    pub commutator_identity_residual: f64,
}

/// Number of singular values below `1e−8`, counting missing ones when the
/// matrix has more columns than rows.
fn null_dim(m: &ComplexMatrix) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    let s = singular_values(m);
    let small = s.iter().filter(|&&v| v < 1e-8).count();
    small + m.ncols().saturating_sub(m.nrows())
}

/// `P = F*·diag(t_mask)·F` with `F` the unitary DFT, in coordinates ordered
/// as `S` then its complement.
pub fn fourier_projection(cfg: &FourierConfig) -> Result<(BlockOperator, FourierReport)> {
    let n = cfg.n;
    if cfg.s_mask.len() != n || cfg.t_mask.len() != n {
        return Err(Error::Config(format!("masks must have length n = {n}")));
    }
    let s: Vec<usize> = (0..n).filter(|&i| cfg.s_mask[i]).collect();
    let sc: Vec<usize> = (0..n).filter(|&i| !cfg.s_mask[i]).collect();
    let t: Vec<usize> = (0..n).filter(|&i| cfg.t_mask[i]).collect();
    if s.is_empty() || sc.is_empty() {
        return Err(Error::Config("S must be a proper nonempty subset".into()));
    }
    let order: Vec<usize> = s.iter().chain(&sc).copied().collect();
    let mut d = ComplexMatrix::zeros(n, n);
    for (a, &ia) in order.iter().enumerate() {
        for (b, &ib) in order.iter().enumerate() {
            let diff = ia as i64 - ib as i64;
            let sum: Complex64 = t
                .iter()
                .map(|&f| Complex64::from_polar(1.0, TWO_PI * (f as i64 * diff).rem_euclid(n as i64) as f64 / n as f64))
                .sum();
            d[(a, b)] = sum / n as f64;
        }
    }
    let splitting = Splitting::new(s.len(), sc.len())?;
    let p = BlockOperator::from_dense(splitting, &d)?;

    let one_minus = linalg::identity(n) - &d;
    let k = s.len();
    let dim_range_range = null_dim(&one_minus.columns(0, k).into_owned());
    let dim_range_null = null_dim(&d.columns(0, k).into_owned());
    let dim_null_range = null_dim(&one_minus.columns(k, n - k).into_owned());

    let e = BlockOperator::e_plus(splitting);
    let ep = (&e * &p).to_dense();
    let comm = p.commutator_with_eplus().scale(cplx(-1.0)).to_dense();
    let report = FourierReport {
        n,
        size_s: k,
        size_t: t.len(),
        trace_norm_e_plus_p: schatten_norm(&ep, 1.0)?,
        dim_range_range,
        dim_range_null,
        dim_null_range,
        commutator_trace_norm: schatten_norm(&comm, 1.0)?,
        twice_corner_trace_norm: 2.0 * schatten_norm(&p.a12, 1.0)?,
        commutator_identity_residual: op_norm(&(&comm - (&ep - ep.adjoint()))),
    };
    Ok((p, report))
}

#[derive(Debug, Clone)]
pub struct IdempotentRangeProjection {
    pub p: BlockOperator,
    pub expected: ClassLabel,
    /// `max(‖P² − P‖, ‖P − P*‖)`.
    pub projection_residual: f64,
    /// `‖(1 − P)·[1; B*]‖`, zero when `R(P)` is the range of `[[1, B], [0, 0]]*`.
    pub range_residual: f64,
    pub rank: usize,
    /// Largest deviation of the corner singular values from `σ/(1 + σ²)`.
    pub corner_singular_value_error: f64,
    pub index: i64,
}

/// Range projection of the idempotent `[[1, B], [0, 0]]` by the closed form
/// `[[(1+BB*)^{−1}, B(1+B*B)^{−1}], [B*(1+BB*)^{−1}, B*B(1+B*B)^{−1}]]`.
pub fn idempotent_range_projection(b: &ComplexMatrix) -> Result<IdempotentRangeProjection> {
    linalg::ensure_square(b)?;
    linalg::ensure_finite(b)?;
    let l = b.nrows();
    let splitting = Splitting::new(l, l)?;
    let one = linalg::identity(l);
    let bs = b.adjoint();
    let inv = |m: ComplexMatrix| {
        m.cholesky()
            .map(|c| c.inverse())
            .ok_or(Error::Singular { sigma_min: 0.0, tol: 0.0 })
    };
    let left = inv(&one + b * &bs)?;
    let right = inv(&one + &bs * b)?;
    let x = left.clone();
    let a = b * &right;
    let a_star = &bs * &left;
    let y = &bs * b * &right;
    let p = BlockOperator::from_blocks(splitting, x, a, a_star, y)?;

    let pd = p.to_dense();
    let projection_residual = op_norm(&(&pd * &pd - &pd)).max(op_norm(&(&pd - pd.adjoint())));
    let mut graph = ComplexMatrix::zeros(2 * l, l);
    graph.view_mut((0, 0), (l, l)).copy_from(&one);
    graph.view_mut((l, 0), (l, l)).copy_from(&bs);
    let range_residual = op_norm(&((linalg::identity(2 * l) - &pd) * graph));
    let rank = p.trace().re.round() as usize;

    let mut want: Vec<f64> = singular_values(b).iter().map(|s| s / (1.0 + s * s)).collect();
    want.sort_by(|u, v| v.total_cmp(u));
    let got = singular_values(&p.a12);
    let corner_singular_value_error = want
        .iter()
        .zip(&got)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    let index = index_of(&p, &BlockOperator::e_plus(splitting), 1.0)?;
    Ok(IdempotentRangeProjection {
        p,
        expected: ClassLabel::d3(0),
        projection_residual,
        range_residual,
        rank,
        corner_singular_value_error,
        index,
    })
}
