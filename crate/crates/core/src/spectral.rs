//! Spectral picture of a projection `P = [[x, a], [a*, y]]` relative to `E+`.
//!
//! The nontrivial eigenvalues of `x` split into the α list (values in `(0, ½)`)
//! and the β list (values in `[½, 1)`); `y` carries `1 − α` and `1 − β` with the
//! same multiplicities, and the corner `a` pairs the two eigenspaces with
//! singular values `√(t − t²)`. Eigenvalues numerically equal to 0 or 1 are
//! counted as the ranks of `N`, `E1` (on `H+`) and `N'`, `E1'` (on `H−`).

use serde::{Deserialize, Serialize};

use crate::algebra::{matrix_serde, BlockOperator, Splitting};
use crate::error::{Error, Result};
use crate::linalg::{
    cplx, hermitian_eig, op_norm, projector, singular_values, ComplexMatrix, EigDecomposition,
};

/// Eigenvalues closer than this are one multiplicity group.
pub const MERGE_GAP: f64 = 1e-9;
/// Gaps in `[MERGE_GAP, RESOLVE_GAP)` cannot be resolved and raise `ClusterAmbiguity`.
pub const RESOLVE_GAP: f64 = 1e-7;
/// Singular values of the corner below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-5;

/// `t± = ½ ± √(¼ − s²)` for a corner singular value `s ∈ [0, ½]`.
///
/// `t⁻` is evaluated as `s² / t⁺` to avoid cancellation for small `s`.
pub fn t_pair(s: f64) -> Result<(f64, f64)> {
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::OutOfRange {
            value: s,
            range: "[0, 1/2]",
        });
    }
    let root = ((0.5 - s) * (0.5 + s)).sqrt();
    let t_plus = 0.5 + root;
    Ok((t_plus, s * s / t_plus))
}

/// Power tail of `t⁻` induced by corner singular values `s_n = c·n^{−g}`:
/// since `t⁻(s) = s² + O(s⁴)`, the tail is `c²·n^{−2g}`.
pub fn t_minus_tail(coefficient: f64, exponent: f64) -> (f64, f64) {
    (coefficient * coefficient, 2.0 * exponent)
}

/// An eigenvalue with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenGroup {
    pub value: f64,
    pub multiplicity: usize,
}

/// A run of consecutive sorted eigenvalues forming one multiplicity group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cluster {
    pub value: f64,
    pub start: usize,
    pub len: usize,
}

/// Groups ascending eigenvalues; gaps below [`MERGE_GAP`] merge, gaps in the
/// unresolved band are an error.
pub(crate) fn cluster(values: &[f64]) -> Result<Vec<Cluster>> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = if i == values.len() {
            true
        } else {
            let gap = values[i] - values[i - 1];
            if gap < MERGE_GAP {
                false
            } else if gap < RESOLVE_GAP {
                return Err(Error::ClusterAmbiguity {
                    value: values[i],
                    gap,
                });
            } else {
                true
            }
        };
        if split && i > start {
            let len = i - start;
            let value = values[start..i].iter().sum::<f64>() / len as f64;
            out.push(Cluster { value, start, len });
            start = i;
        }
    }
    Ok(out)
}

/// Where an eigenvalue of `x` or `y` belongs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Zero,
    One,
    Alpha,
    Beta,
}

pub(crate) fn slot(value: f64) -> Result<Slot> {
    let near_edge = |d: f64| (MERGE_GAP..RESOLVE_GAP).contains(&d);
    if value < MERGE_GAP {
        Ok(Slot::Zero)
    } else if value > 1.0 - MERGE_GAP {
        Ok(Slot::One)
    } else if near_edge(value) || near_edge(1.0 - value) {
        Err(Error::ClusterAmbiguity {
            value,
            gap: value.min(1.0 - value),
        })
    } else if value < 0.5 - MERGE_GAP {
        Ok(Slot::Alpha)
    } else {
        Ok(Slot::Beta)
    }
}

/// Eigen data of `x` or `y` grouped into clusters and slots.
pub(crate) struct SortedSpectrum {
    pub eig: EigDecomposition,
    pub clusters: Vec<(Cluster, Slot)>,
}

impl SortedSpectrum {
    pub fn new(m: &ComplexMatrix, tol: f64) -> Result<Self> {
        let eig = hermitian_eig(m, tol.max(1e-12))?;
        let clusters = cluster(&eig.values)?
            .into_iter()
            .map(|c| slot(c.value).map(|s| (c, s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { eig, clusters })
    }

    pub fn count(&self, wanted: Slot) -> usize {
        self.clusters
            .iter()
            .filter(|(_, s)| *s == wanted)
            .map(|(c, _)| c.len)
            .sum()
    }

    pub fn columns(&self, c: &Cluster) -> ComplexMatrix {
        self.eig.vectors.columns(c.start, c.len).into_owned()
    }

    pub fn columns_of(&self, wanted: Slot) -> ComplexMatrix {
        let idx: Vec<usize> = self
            .clusters
            .iter()
            .filter(|(_, s)| *s == wanted)
            .flat_map(|(c, _)| c.start..c.start + c.len)
            .collect();
        crate::linalg::select_columns(&self.eig.vectors, &idx)
    }

    /// The nontrivial cluster whose value is within [`RESOLVE_GAP`] of `target`.
    pub fn find(&self, target: f64) -> Option<&Cluster> {
        self.clusters
            .iter()
            .filter(|(_, s)| matches!(s, Slot::Alpha | Slot::Beta))
            .map(|(c, _)| c)
            .find(|c| (c.value - target).abs() < RESOLVE_GAP)
    }
}

/// Complete spectral data of a projection relative to `E+`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralPicture {
    pub alphas: Vec<EigenGroup>,
    pub betas: Vec<EigenGroup>,
    pub rank_e1: usize,
    pub rank_e1prime: usize,
    pub rank_n: usize,
    pub rank_nprime: usize,
    #[serde(with = "matrix_serde")]
    pub xi_basis: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub xiprime_basis: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub eta_basis: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub etaprime_basis: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub e1_basis: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub e1prime_basis: ComplexMatrix,
}

impl SpectralPicture {
    /// A picture without bases, to be laid out canonically by [`reconstruct`].
    pub fn from_values(
        alphas: Vec<EigenGroup>,
        betas: Vec<EigenGroup>,
        rank_e1: usize,
        rank_e1prime: usize,
        rank_n: usize,
        rank_nprime: usize,
    ) -> Self {
        let empty = ComplexMatrix::zeros(0, 0);
        Self {
            alphas,
            betas,
            rank_e1,
            rank_e1prime,
            rank_n,
            rank_nprime,
            xi_basis: empty.clone(),
            xiprime_basis: empty.clone(),
            eta_basis: empty.clone(),
            etaprime_basis: empty.clone(),
            e1_basis: empty.clone(),
            e1prime_basis: empty,
        }
    }

    pub fn alpha_count(&self) -> usize {
        self.alphas.iter().map(|g| g.multiplicity).sum()
    }

    pub fn beta_count(&self) -> usize {
        self.betas.iter().map(|g| g.multiplicity).sum()
    }

    pub fn dim_plus(&self) -> usize {
        self.alpha_count() + self.beta_count() + self.rank_e1 + self.rank_n
    }

    pub fn dim_minus(&self) -> usize {
        self.alpha_count() + self.beta_count() + self.rank_e1prime + self.rank_nprime
    }

    /// `λ_k = √(α − α²)` repeated with multiplicity.
    pub fn lambdas(&self) -> Vec<f64> {
        expand(&self.alphas).map(corner_value).collect()
    }

    /// `μ_l = √(β − β²)` repeated with multiplicity.
    pub fn mus(&self) -> Vec<f64> {
        expand(&self.betas).map(corner_value).collect()
    }

    /// Compares values, multiplicities and ranks; bases are ignored.
    pub fn same_spectrum(&self, other: &Self, tol: f64) -> bool {
        let groups_match = |a: &[EigenGroup], b: &[EigenGroup]| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(g, h)| g.multiplicity == h.multiplicity && (g.value - h.value).abs() <= tol)
        };
        groups_match(&self.alphas, &other.alphas)
            && groups_match(&self.betas, &other.betas)
            && self.rank_e1 == other.rank_e1
            && self.rank_e1prime == other.rank_e1prime
            && self.rank_n == other.rank_n
            && self.rank_nprime == other.rank_nprime
    }

    fn check_ordering(&self) -> Result<()> {
        let check = |groups: &[EigenGroup], lo: f64, hi: f64, closed_lo: bool, name: &str| {
            for g in groups {
                let ok_lo = if closed_lo { g.value >= lo } else { g.value > lo };
                if !ok_lo || g.value >= hi || g.multiplicity == 0 {
                    return Err(Error::OutOfRange {
                        value: g.value,
                        range: if name == "alpha" { "(0, 1/2)" } else { "[1/2, 1)" },
                    });
                }
            }
            if groups.windows(2).any(|w| w[0].value >= w[1].value) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} values are not strictly increasing"
                )));
            }
            Ok(())
        };
        check(&self.alphas, 0.0, 0.5, false, "alpha")?;
        check(&self.betas, 0.5, 1.0, true, "beta")
    }

    /// Rebuilds the projection from the stored bases.
    pub fn assemble(&self) -> Result<BlockOperator> {
        let dp = self.xi_basis.nrows().max(self.eta_basis.nrows()).max(self.e1_basis.nrows());
        let dm = self
            .xiprime_basis
            .nrows()
            .max(self.etaprime_basis.nrows())
            .max(self.e1prime_basis.nrows());
        let splitting = Splitting::new(dp, dm)?;
        if self.dim_plus() != dp || self.dim_minus() != dm {
            return Err(Error::DimensionMismatch(format!(
                "picture counts {}+{} but bases live in {dp}+{dm}",
                self.dim_plus(),
                self.dim_minus()
            )));
        }
        let weighted = |basis: &ComplexMatrix, w: &[f64]| {
            let mut b = basis.clone();
            for (j, &wj) in w.iter().enumerate() {
                let mut col = b.column_mut(j);
                col *= cplx(wj);
            }
            b
        };
        let alphas: Vec<f64> = expand(&self.alphas).collect();
        let betas: Vec<f64> = expand(&self.betas).collect();
        let one_minus = |v: &[f64]| v.iter().map(|t| 1.0 - t).collect::<Vec<_>>();

        let mut x = weighted(&self.xi_basis, &alphas) * self.xi_basis.adjoint()
            + weighted(&self.eta_basis, &betas) * self.eta_basis.adjoint();
        if self.rank_e1 > 0 {
            x += projector(&self.e1_basis);
        }
        let mut y = weighted(&self.xiprime_basis, &one_minus(&alphas)) * self.xiprime_basis.adjoint()
            + weighted(&self.etaprime_basis, &one_minus(&betas)) * self.etaprime_basis.adjoint();
        if self.rank_e1prime > 0 {
            y += projector(&self.e1prime_basis);
        }
        let a = weighted(&self.xi_basis, &self.lambdas()) * self.xiprime_basis.adjoint()
            + weighted(&self.eta_basis, &self.mus()) * self.etaprime_basis.adjoint();
        let a_star = a.adjoint();
        BlockOperator::from_blocks(splitting, x, a, a_star, y)
    }
}

fn expand(groups: &[EigenGroup]) -> impl Iterator<Item = f64> + '_ {
    groups
        .iter()
        .flat_map(|g| std::iter::repeat_n(g.value, g.multiplicity))
}

fn corner_value(t: f64) -> f64 {
    (t * (1.0 - t)).max(0.0).sqrt()
}

fn x_y_a(p: &BlockOperator) -> (&ComplexMatrix, &ComplexMatrix, &ComplexMatrix) {
    (&p.a11, &p.a22, &p.a12)
}

/// Extracts the spectral picture of a projection.
pub fn extract_picture(p: &BlockOperator, tol: f64) -> Result<SpectralPicture> {
    p.ensure_projection(tol)?;
    let (x, y, a) = x_y_a(p);
    let xs = SortedSpectrum::new(x, tol)?;
    let ys = SortedSpectrum::new(y, tol)?;

    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut xi_idx = Vec::new();
    let mut eta_idx = Vec::new();
    for (c, s) in &xs.clusters {
        let group = EigenGroup {
            value: c.value,
            multiplicity: c.len,
        };
        match s {
            Slot::Alpha => {
                alphas.push(group);
                xi_idx.extend(c.start..c.start + c.len);
            }
            Slot::Beta => {
                let value = if (c.value - 0.5).abs() < MERGE_GAP { 0.5 } else { c.value };
                betas.push(EigenGroup { value, ..group });
                eta_idx.extend(c.start..c.start + c.len);
            }
            _ => {}
        }
    }
    let xi_basis = crate::linalg::select_columns(&xs.eig.vectors, &xi_idx);
    let eta_basis = crate::linalg::select_columns(&xs.eig.vectors, &eta_idx);

    let a_star = a.adjoint();
    let partner = |basis: &ComplexMatrix, groups: &[EigenGroup]| {
        let mut out = &a_star * basis;
        for (j, t) in expand(groups).enumerate() {
            let mut col = out.column_mut(j);
            col /= cplx(corner_value(t));
        }
        out
    };
    let xiprime_basis = partner(&xi_basis, &alphas);
    let etaprime_basis = partner(&eta_basis, &betas);

    let pic = SpectralPicture {
        rank_e1: xs.count(Slot::One),
        rank_n: xs.count(Slot::Zero),
        rank_e1prime: ys.count(Slot::One),
        rank_nprime: ys.count(Slot::Zero),
        e1_basis: xs.columns_of(Slot::One),
        e1prime_basis: ys.columns_of(Slot::One),
        alphas,
        betas,
        xi_basis,
        xiprime_basis,
        eta_basis,
        etaprime_basis,
    };
    let s = p.splitting();
    if pic.dim_plus() != s.dim_plus || pic.dim_minus() != s.dim_minus {
        return Err(Error::PairingMismatch(format!(
            "x accounts for {} of {} dimensions, y for {} of {}",
            pic.dim_plus(),
            s.dim_plus,
            pic.dim_minus(),
            s.dim_minus
        )));
    }
    Ok(pic)
}

/// Builds the projection of a picture in canonical coordinates: pairs first
/// (α groups then β groups, each pair using one `H+` and one `H−` coordinate),
/// then `E1`/`N` on `H+` and `E1'`/`N'` on `H−`.
pub fn reconstruct(pic: &SpectralPicture, splitting: Splitting) -> Result<BlockOperator> {
    pic.check_ordering()?;
    if pic.dim_plus() != splitting.dim_plus || pic.dim_minus() != splitting.dim_minus {
        return Err(Error::DimensionMismatch(format!(
            "picture needs {}+{}, splitting is {}+{}",
            pic.dim_plus(),
            pic.dim_minus(),
            splitting.dim_plus,
            splitting.dim_minus
        )));
    }
    let mut out = BlockOperator::zeros(splitting);
    let values: Vec<f64> = expand(&pic.alphas).chain(expand(&pic.betas)).collect();
    for (k, &t) in values.iter().enumerate() {
        let c = corner_value(t);
        out.a11[(k, k)] = cplx(t);
        out.a12[(k, k)] = cplx(c);
        out.a21[(k, k)] = cplx(c);
        out.a22[(k, k)] = cplx(1.0 - t);
    }
    let pairs = values.len();
    for k in pairs..pairs + pic.rank_e1 {
        out.a11[(k, k)] = cplx(1.0);
    }
    for k in pairs..pairs + pic.rank_e1prime {
        out.a22[(k, k)] = cplx(1.0);
    }
    Ok(out)
}

/// Per-eigenvalue record of [`verify_pairing`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingEntry {
    /// Eigenvalue `λ` of `y`.
    pub lambda: f64,
    pub multiplicity_y: usize,
    /// Multiplicity of `1 − λ` as an eigenvalue of `x` (0 when absent).
    pub multiplicity_x: usize,
    /// `‖a·Proj_λ(y) − Proj_{1−λ}(x)·a‖`.
    pub intertwining_residual: f64,
    /// Smallest singular value of `a` restricted to the `λ`-eigenspace of `y`.
    pub injectivity_sigma_min: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingReport {
    pub entries: Vec<PairingEntry>,
    /// `dim N(a)` from the singular values of the corner.
    pub dim_null_a: usize,
    /// `dim N(y) + dim N(y − 1)`.
    pub dim_null_y_plus_eigen_one: usize,
    pub max_residual: f64,
    pub residual_bound: f64,
    pub passed: bool,
}

/// Checks that the corner `a` maps each nontrivial eigenspace of `y` onto the
/// matching eigenspace of `x` and intertwines the spectral projections.
pub fn verify_pairing(p: &BlockOperator, tol: f64) -> Result<PairingReport> {
    p.ensure_projection(tol)?;
    let (x, y, a) = x_y_a(p);
    let xs = SortedSpectrum::new(x, tol)?;
    let ys = SortedSpectrum::new(y, tol)?;
    let residual_bound = 10.0 * tol.max(crate::linalg::TAU) * (p.splitting().dim() as f64);

    let mut entries = Vec::new();
    let mut passed = true;
    for (c, s) in &ys.clusters {
        if !matches!(s, Slot::Alpha | Slot::Beta) {
            continue;
        }
        let vy = ys.columns(c);
        let py = projector(&vy);
        let (px, multiplicity_x) = match xs.find(1.0 - c.value) {
            Some(cx) => (projector(&xs.columns(cx)), cx.len),
            None => (ComplexMatrix::zeros(x.nrows(), x.ncols()), 0),
        };
        let residual = op_norm(&(a * &py - &px * a));
        let sv = singular_values(&(a * &vy));
        let sigma_min = if sv.len() < c.len {
            0.0
        } else {
            sv.last().copied().unwrap_or(0.0)
        };
        let injective = sigma_min > 0.5 * corner_value(c.value);
        if multiplicity_x != c.len || residual > residual_bound || !injective {
            passed = false;
        }
        entries.push(PairingEntry {
            lambda: c.value,
            multiplicity_y: c.len,
            multiplicity_x,
            intertwining_residual: residual,
            injectivity_sigma_min: sigma_min,
        });
    }
    // x-side eigenvalues with no partner in y also break the pairing.
    let paired_x: usize = entries.iter().map(|e| e.multiplicity_x).sum();
    let nontrivial_x = xs.count(Slot::Alpha) + xs.count(Slot::Beta);
    if paired_x != nontrivial_x {
        passed = false;
    }

    let rank_a = singular_values(a)
        .iter()
        .filter(|&&s| s > RANK_THRESHOLD)
        .count();
    let dim_null_a = a.ncols() - rank_a;
    let dim_null_y_plus_eigen_one = ys.count(Slot::Zero) + ys.count(Slot::One);
    if dim_null_a != dim_null_y_plus_eigen_one {
        passed = false;
    }
    let max_residual = entries
        .iter()
        .map(|e| e.intertwining_residual)
        .fold(0.0, f64::max);
    Ok(PairingReport {
        entries,
        dim_null_a,
        dim_null_y_plus_eigen_one,
        max_residual,
        residual_bound,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TAU;
    use crate::random::Rng64;

    fn split(p: usize, m: usize) -> Splitting {
        Splitting::new(p, m).unwrap()
    }

    fn angle_projection(gamma: f64) -> BlockOperator {
        let (c, s) = (gamma.cos(), gamma.sin());
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[cplx(c * c), cplx(c * s), cplx(c * s), cplx(s * s)],
        );
        BlockOperator::from_dense(split(1, 1), &m).unwrap()
    }

    #[test]
    fn t_pair_examples() {
        assert_eq!(t_pair(0.5).unwrap(), (0.5, 0.5));
        assert_eq!(t_pair(0.0).unwrap(), (1.0, 0.0));
        let (tp, tm) = t_pair(0.3).unwrap();
        assert!((tp - 0.9).abs() < 1e-15 && (tm - 0.1).abs() < 1e-15);
        assert!(t_pair(0.51).is_err());
        assert!(t_pair(-0.1).is_err());
    }

    #[test]
    fn t_minus_is_s_squared_to_fourth_order() {
        // t⁻(s) = s² + s⁴ + O(s⁶)
        for s in [1e-1, 1e-2, 1e-3] {
            let (_, tm) = t_pair(s).unwrap();
            let ratio = (tm - s * s) / s.powi(4);
            assert!((ratio - 1.0).abs() < 3.0 * s * s + 1e-6, "s={s} ratio={ratio}");
        }
        assert_eq!(t_minus_tail(0.2, 1.5), (0.2 * 0.2, 3.0));
    }

    #[test]
    fn cluster_bands() {
        let c = cluster(&[0.1, 0.1 + 1e-12, 0.3]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].len, 2);
        assert!(matches!(
            cluster(&[0.1, 0.1 + 1e-8]),
            Err(Error::ClusterAmbiguity { .. })
        ));
        assert!(matches!(slot(5e-8), Err(Error::ClusterAmbiguity { .. })));
        assert_eq!(slot(0.5).unwrap(), Slot::Beta);
        assert_eq!(slot(0.5 - 1e-12).unwrap(), Slot::Beta);
        assert_eq!(slot(1e-12).unwrap(), Slot::Zero);
    }

    #[test]
    fn picture_of_e_plus() {
        let s = split(3, 4);
        let pic = extract_picture(&BlockOperator::e_plus(s), TAU).unwrap();
        assert!(pic.alphas.is_empty() && pic.betas.is_empty());
        assert_eq!(pic.rank_e1, 3);
        assert_eq!(pic.rank_nprime, 4);
        assert_eq!(pic.rank_n, 0);
        assert_eq!(pic.rank_e1prime, 0);
    }

    #[test]
    fn picture_of_two_by_two_angle() {
        let gamma: f64 = 0.5;
        let (c, s) = (gamma.cos(), gamma.sin());
        let pic = extract_picture(&angle_projection(gamma), TAU).unwrap();
        // s < c: x = c² ≥ ½ is a β with 1 − β = s²
        assert!(pic.alphas.is_empty());
        assert_eq!(pic.betas.len(), 1);
        assert_eq!(pic.betas[0].multiplicity, 1);
        assert!((pic.betas[0].value - c * c).abs() < 1e-15);
        assert!((1.0 - pic.betas[0].value - s * s).abs() < 1e-15);
        assert_eq!((pic.rank_e1, pic.rank_n, pic.rank_e1prime, pic.rank_nprime), (0, 0, 0, 0));
        // s > c: the eigenvalue of x drops below ½ and becomes an α
        let pic = extract_picture(&angle_projection(std::f64::consts::FRAC_PI_2 - gamma), TAU)
            .unwrap();
        let s2 = gamma.sin().powi(2);
        assert_eq!(pic.alphas.len(), 1);
        assert_eq!(pic.alphas[0].multiplicity, 1);
        assert!((pic.alphas[0].value - s2).abs() < 1e-14);
        assert_eq!((pic.rank_e1, pic.rank_n, pic.rank_e1prime, pic.rank_nprime), (0, 0, 0, 0));
    }

    #[test]
    fn reconstruct_single_alpha() {
        let pic = SpectralPicture::from_values(
            vec![EigenGroup {
                value: 0.1,
                multiplicity: 1,
            }],
            vec![],
            0,
            0,
            0,
            0,
        );
        let p = reconstruct(&pic, split(1, 1)).unwrap();
        let want = [0.1, 0.3, 0.3, 0.9];
        let got = p.to_dense();
        for (i, w) in want.iter().enumerate() {
            assert!((got[(i / 2, i % 2)] - cplx(*w)).norm() < 1e-15);
        }
    }

    #[test]
    fn reconstruct_empty_is_e_plus() {
        let pic = SpectralPicture::from_values(vec![], vec![], 3, 0, 0, 2);
        let p = reconstruct(&pic, split(3, 2)).unwrap();
        assert_eq!(p, BlockOperator::e_plus(split(3, 2)));
        assert!(matches!(
            reconstruct(&pic, split(2, 2)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn random_pictures_roundtrip() {
        let mut rng = Rng64::new(99);
        for _ in 0..10 {
            let mut alphas: Vec<f64> = (0..rng.int(0, 4)).map(|_| rng.uniform(0.01, 0.49)).collect();
            let mut betas: Vec<f64> = (0..rng.int(0, 4)).map(|_| rng.uniform(0.5, 0.99)).collect();
            alphas.sort_by(f64::total_cmp);
            betas.sort_by(f64::total_cmp);
            let group = |v: &[f64], rng: &mut Rng64| {
                v.iter()
                    .map(|&value| EigenGroup {
                        value,
                        multiplicity: rng.int(1, 3),
                    })
                    .collect::<Vec<_>>()
            };
            let pic = SpectralPicture::from_values(
                group(&alphas, &mut rng),
                group(&betas, &mut rng),
                rng.int(0, 3),
                rng.int(0, 3),
                rng.int(0, 3),
                rng.int(0, 3),
            );
            let (dp, dm) = (pic.dim_plus(), pic.dim_minus());
            if dp == 0 || dm == 0 {
                continue;
            }
            let p = reconstruct(&pic, split(dp, dm)).unwrap();
            let (idem, asym) = p.projection_defects();
            assert!(idem <= 1e-9 && asym == 0.0);
            let back = extract_picture(&p, TAU).unwrap();
            assert!(back.same_spectrum(&pic, 1e-12));
        }
    }

    #[test]
    fn extract_then_assemble_reproduces_random_projection() {
        let mut rng = Rng64::new(7);
        for _ in 0..5 {
            let p = rng.projection(split(6, 5));
            let pic = extract_picture(&p, TAU * 100.0).unwrap();
            let back = pic.assemble().unwrap();
            assert!((back.to_dense() - p.to_dense()).norm() < 1e-10);
        }
    }

    #[test]
    fn pairing_on_diagonal_is_vacuous() {
        let s = split(3, 3);
        let mut p = BlockOperator::e_plus(s);
        p.a22[(0, 0)] = cplx(1.0);
        let r = verify_pairing(&p, TAU).unwrap();
        assert!(r.passed);
        assert!(r.entries.is_empty());
        assert_eq!(r.dim_null_a, 3);
    }

    #[test]
    fn pairing_on_two_angle_projection() {
        let pic = SpectralPicture::from_values(
            vec![EigenGroup {
                value: 0.2,
                multiplicity: 1,
            }],
            vec![EigenGroup {
                value: 0.7,
                multiplicity: 1,
            }],
            0,
            0,
            0,
            0,
        );
        let p = reconstruct(&pic, split(2, 2)).unwrap();
        let r = verify_pairing(&p, TAU).unwrap();
        assert!(r.passed);
        assert_eq!(r.entries.len(), 2);
        assert!(r.max_residual <= 1e-10);
        assert_eq!(r.dim_null_a, 0);
    }

    #[test]
    fn non_projection_is_rejected() {
        let s = split(2, 2);
        let not_p = BlockOperator::identity(s).scale(cplx(0.5));
        assert!(matches!(
            extract_picture(&not_p, TAU),
            Err(Error::NotAProjection { .. })
        ));
        assert!(matches!(
            verify_pairing(&not_p, TAU),
            Err(Error::NotAProjection { .. })
        ));
    }
}
