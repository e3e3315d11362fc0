//! Halmos two-projection decomposition, principal angles, geodesics
//! `δ(t) = e^{itX} P e^{−itX}` and the distance comparisons between the
//! geodesic length `d_p = ‖X‖_p`, the Schatten distance `‖P − Q‖_p` and the
//! mixed norm `‖P − Q‖_{∞,p}`.
//!
//! For a pair `(P, Q)` the space splits into `R(P)∩R(Q)`, `N(P)∩N(Q)`,
//! `R(P)∩N(Q)`, `N(P)∩R(Q)` and the generic part. On the generic part we build
//! an orthonormal frame `(e_j, g_j)` with `e_j ∈ R(Q)`, `g_j ∈ N(Q)` in which
//!
//! ```text
//!     Q ≅ [[1, 0], [0, 0]]      P ≅ [[C², CS], [CS, S²]]      C = cos Γ, S = sin Γ
//! ```
//!
//! Angles are computed as `atan2(‖(1−Q)f‖, ‖Qf‖)` for `f ∈ R(P)`, which keeps
//! full relative accuracy for angles near 0 and near π/2.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{matrix_serde, BlockOperator, Splitting};
use crate::error::{Error, Result};
use crate::linalg::{
    self, commutator, cplx, hstack, matfun_hermitian, op_norm, projection_range,
    schatten_from_singular_values, schatten_norm, sinc, unitary_exp, ComplexMatrix,
};
use crate::spectral::MERGE_GAP;

/// Angles below this (or within this of π/2) are intersection directions.
pub const INTERSECTION_ANGLE: f64 = 1e-8;
/// Angles in `[INTERSECTION_ANGLE, AMBIGUOUS_ANGLE)` from either endpoint are
/// reported as `ToleranceBreakdown`.
pub const AMBIGUOUS_ANGLE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGroup {
    pub angle: f64,
    pub multiplicity: usize,
}

/// Five-part decomposition of a pair of projections `(P, Q)`.
///
/// `basis` is unitary; its columns are, in order: `R(P)∩R(Q)`, `N(P)∩N(Q)`,
/// `R(P)∩N(Q)`, `N(P)∩R(Q)`, then the generic part as `e_1..e_m` followed by
/// `g_1..g_m`. With `Q = E+` the intersection dimensions are
/// `dim_11 = R(P)∩H+`, `dim_00 = N(P)∩H−`, `dim_10 = R(P)∩H−`, `dim_01 = N(P)∩H+`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalmosDecomposition {
    pub splitting: Splitting,
    pub dim_11: usize,
    pub dim_00: usize,
    pub dim_10: usize,
    pub dim_01: usize,
    pub generic_half_dim: usize,
    pub angles: Vec<AngleGroup>,
    /// Angle of each generic column pair, ascending.
    pub generic_angles: Vec<f64>,
    #[serde(with = "matrix_serde")]
    pub basis: ComplexMatrix,
}

/// Column ranges of the parts inside [`HalmosDecomposition::basis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    RangeRange,
    NullNull,
    RangeNull,
    NullRange,
    GenericQ,
    GenericQPerp,
}

impl HalmosDecomposition {
    pub fn columns(&self, part: Part) -> ComplexMatrix {
        let m = self.generic_half_dim;
        let o1 = self.dim_11;
        let o2 = o1 + self.dim_00;
        let o3 = o2 + self.dim_10;
        let o4 = o3 + self.dim_01;
        let (start, len) = match part {
            Part::RangeRange => (0, self.dim_11),
            Part::NullNull => (o1, self.dim_00),
            Part::RangeNull => (o2, self.dim_10),
            Part::NullRange => (o3, self.dim_01),
            Part::GenericQ => (o4, m),
            Part::GenericQPerp => (o4 + m, m),
        };
        self.basis.columns(start, len).into_owned()
    }

    /// Rebuilds `(P, Q)` from the parts and angles.
    pub fn reassemble(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.basis.nrows();
        let proj = |b: &ComplexMatrix| b * b.adjoint();
        let e = self.columns(Part::GenericQ);
        let g = self.columns(Part::GenericQPerp);
        let mut f = ComplexMatrix::zeros(n, self.generic_half_dim);
        for (j, &gamma) in self.generic_angles.iter().enumerate() {
            let col = e.column(j) * cplx(gamma.cos()) + g.column(j) * cplx(gamma.sin());
            f.set_column(j, &col);
        }
        let rr = proj(&self.columns(Part::RangeRange));
        let p = &rr + proj(&self.columns(Part::RangeNull)) + proj(&f);
        let q = &rr + proj(&self.columns(Part::NullRange)) + proj(&e);
        (p, q)
    }

    /// Largest deviation of `(B*PB, B*QB)` from the block model in the basis `B`.
    pub fn frame_residual(&self, p: &ComplexMatrix, q: &ComplexMatrix) -> f64 {
        let b = &self.basis;
        let (p_model, q_model) = self.model_in_basis();
        let dp = op_norm(&(b.adjoint() * p * b - p_model));
        let dq = op_norm(&(b.adjoint() * q * b - q_model));
        dp.max(dq)
    }

    fn model_in_basis(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.basis.ncols();
        let mut p = ComplexMatrix::zeros(n, n);
        let mut q = ComplexMatrix::zeros(n, n);
        for k in 0..self.dim_11 {
            p[(k, k)] = cplx(1.0);
            q[(k, k)] = cplx(1.0);
        }
        let o2 = self.dim_11 + self.dim_00;
        for k in o2..o2 + self.dim_10 {
            p[(k, k)] = cplx(1.0);
        }
        let o3 = o2 + self.dim_10;
        for k in o3..o3 + self.dim_01 {
            q[(k, k)] = cplx(1.0);
        }
        let o4 = o3 + self.dim_01;
        let m = self.generic_half_dim;
        for (j, &gamma) in self.generic_angles.iter().enumerate() {
            let (c, s) = (gamma.cos(), gamma.sin());
            let (i, k) = (o4 + j, o4 + m + j);
            q[(i, i)] = cplx(1.0);
            p[(i, i)] = cplx(c * c);
            p[(i, k)] = cplx(c * s);
            p[(k, i)] = cplx(c * s);
            p[(k, k)] = cplx(s * s);
        }
        (p, q)
    }

    /// `‖P − Q‖`: 1 when `R(P)∩N(Q)` or `N(P)∩R(Q)` is nontrivial, else `max sin γ`.
    pub fn distance_op_norm(&self) -> f64 {
        if self.dim_10 + self.dim_01 > 0 {
            1.0
        } else {
            self.generic_angles
                .iter()
                .map(|g| g.sin())
                .fold(0.0, f64::max)
        }
    }
}

/// A direction `f` in a subspace with its cosine and sine against `R(Q)`.
struct Direction {
    f: nalgebra::DVector<Complex64>,
    cos: f64,
    sin: f64,
}

impl Direction {
    fn angle(&self) -> f64 {
        self.sin.atan2(self.cos)
    }
}

/// Principal directions of the subspace spanned by `basis` against
/// `R(Q) = span(q_range)`, `N(Q) = span(q_null)`.
fn principal_directions(
    basis: &ComplexMatrix,
    q_range: &ComplexMatrix,
    q_null: &ComplexMatrix,
) -> Vec<Direction> {
    let r = basis.ncols();
    if r == 0 {
        return Vec::new();
    }
    let m = q_null.adjoint() * basis;
    // Jacobi keeps small sines accurate and yields a full right basis
    let (_, v) = crate::linalg::jacobi_right(&m);
    (0..r)
        .map(|j| {
            let f = basis * v.column(j);
            let cos = (q_range.adjoint() * &f).norm();
            let sin = (q_null.adjoint() * &f).norm();
            Direction { f, cos, sin }
        })
        .collect()
}

fn check_ambiguity(angle: f64) -> Result<()> {
    let from_edge = angle.min(FRAC_PI_2 - angle);
    if (INTERSECTION_ANGLE..AMBIGUOUS_ANGLE).contains(&from_edge) {
        return Err(Error::ToleranceBreakdown { angle });
    }
    Ok(())
}

fn columns_of(dirs: &[&Direction], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, dirs.len());
    for (j, d) in dirs.iter().enumerate() {
        out.set_column(j, &d.f);
    }
    out
}

/// Groups ascending angles into multiplicity groups.
fn group_angles(angles: &[f64]) -> Vec<AngleGroup> {
    let mut out: Vec<AngleGroup> = Vec::new();
    for &a in angles {
        match out.last_mut() {
            Some(g) if (a - g.angle).abs() < MERGE_GAP => g.multiplicity += 1,
            _ => out.push(AngleGroup {
                angle: a,
                multiplicity: 1,
            }),
        }
    }
    out
}

/// Halmos decomposition of `(P, Q)`; `Q` plays the role of `E+`.
pub fn halmos_decompose(p: &BlockOperator, q: &BlockOperator, tol: f64) -> Result<HalmosDecomposition> {
    p.ensure_projection(tol)?;
    q.ensure_projection(tol)?;
    let splitting = p.splitting();
    if q.splitting() != splitting {
        return Err(Error::DimensionMismatch("projections on different splittings".into()));
    }
    let n = splitting.dim();
    let pd = p.to_dense();
    let qd = q.to_dense();
    let (p_range, p_null) = projection_range(&pd)?;
    let (q_range, q_null) = projection_range(&qd)?;

    let range_dirs = principal_directions(&p_range, &q_range, &q_null);
    let null_dirs = principal_directions(&p_null, &q_range, &q_null);

    let mut rr = Vec::new();
    let mut rn = Vec::new();
    let mut generic = Vec::new();
    for d in &range_dirs {
        let a = d.angle();
        check_ambiguity(a)?;
        if a < INTERSECTION_ANGLE {
            rr.push(d);
        } else if a > FRAC_PI_2 - INTERSECTION_ANGLE {
            rn.push(d);
        } else {
            generic.push(d);
        }
    }
    let mut nr = Vec::new();
    let mut nn = Vec::new();
    let mut generic_null = 0;
    for d in &null_dirs {
        let a = d.angle();
        check_ambiguity(a)?;
        if a < INTERSECTION_ANGLE {
            nr.push(d);
        } else if a > FRAC_PI_2 - INTERSECTION_ANGLE {
            nn.push(d);
        } else {
            generic_null += 1;
        }
    }
    if generic_null != generic.len() {
        let worst = null_dirs
            .iter()
            .map(|d| d.angle())
            .fold(FRAC_PI_2, |acc, a| acc.min(a.min(FRAC_PI_2 - a)));
        return Err(Error::ToleranceBreakdown { angle: worst });
    }
    generic.sort_by(|a, b| a.angle().total_cmp(&b.angle()));

    let m = generic.len();
    let mut e = ComplexMatrix::zeros(n, m);
    let mut g = ComplexMatrix::zeros(n, m);
    let one_minus_q = linalg::identity(n) - &qd;
    for (j, d) in generic.iter().enumerate() {
        let qf = &qd * &d.f;
        let pf = &one_minus_q * &d.f;
        e.set_column(j, &(&qf / cplx(qf.norm())));
        g.set_column(j, &(&pf / cplx(pf.norm())));
    }
    let generic_angles: Vec<f64> = generic.iter().map(|d| d.angle()).collect();
    let basis = hstack(
        &[
            &columns_of(&rr, n),
            &columns_of(&nn, n),
            &columns_of(&rn, n),
            &columns_of(&nr, n),
            &e,
            &g,
        ],
        n,
    );
    if basis.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "decomposition found {} of {n} directions",
            basis.ncols()
        )));
    }
    Ok(HalmosDecomposition {
        splitting,
        dim_11: rr.len(),
        dim_00: nn.len(),
        dim_10: rn.len(),
        dim_01: nr.len(),
        generic_half_dim: m,
        angles: group_angles(&generic_angles),
        generic_angles,
        basis,
    })
}

/// `2^{1/p} (Σ mult·(cos γ sin γ)^p)^{1/p}`, the Schatten norm of `[Q, P]`
/// predicted from the angles (each `cos γ sin γ` is a singular value twice).
pub fn commutator_norm_via_angles(h: &HalmosDecomposition, p: f64) -> Result<f64> {
    let values: Vec<f64> = h
        .generic_angles
        .iter()
        .flat_map(|g| {
            let cs = g.cos() * g.sin();
            [cs, cs]
        })
        .collect();
    schatten_from_singular_values(&values, p)
}

/// Geodesic data: `δ(t) = e^{itX} P e^{−itX}` with `X` Hermitian,
/// `P`-codiagonal and `‖X‖ ≤ π/2`.
#[derive(Debug, Clone)]
pub struct GeodesicSpec {
    pub p: BlockOperator,
    pub x: ComplexMatrix,
    /// Angles carried by `X` (generic angles, then π/2 for each flipped pair).
    pub angles: Vec<f64>,
    /// True when π/2 blocks were inserted; the minimal geodesic is then not unique.
    pub non_unique: bool,
}

impl GeodesicSpec {
    /// Codiagonality defect `max(‖PXP‖, ‖(1−P)X(1−P)‖)`.
    pub fn codiagonal_defect(&self) -> f64 {
        let pd = self.p.to_dense();
        let q = linalg::identity(pd.nrows()) - &pd;
        op_norm(&(&pd * &self.x * &pd)).max(op_norm(&(&q * &self.x * &q)))
    }

    /// Finsler length `‖X‖_p`.
    pub fn length(&self, p: f64) -> Result<f64> {
        schatten_norm(&self.x, p)
    }
}

/// Exponent `X` with `e^{iX} P e^{−iX} = Q`.
///
/// On the generic part of `(Q, P)` with frame `e ∈ R(P)`, `g ∈ N(P)` and
/// `R(Q) ∋ cos γ·e + sin γ·g`, `X = iγ·e g* − iγ·g e*`; each matched pair
/// `u ∈ R(P)∩N(Q)`, `w ∈ N(P)∩R(Q)` gets the same block with `γ = π/2`.
pub fn build_geodesic(p: &BlockOperator, q: &BlockOperator, tol: f64) -> Result<GeodesicSpec> {
    let h = halmos_decompose(q, p, tol)?;
    if h.dim_10 != h.dim_01 {
        return Err(Error::NoGeodesic {
            rp_nq: h.dim_01,
            np_rq: h.dim_10,
        });
    }
    let n = p.splitting().dim();
    let mut x = ComplexMatrix::zeros(n, n);
    let mut add_block = |e: nalgebra::DVectorView<'_, Complex64>,
                         g: nalgebra::DVectorView<'_, Complex64>,
                         gamma: f64| {
        let i = Complex64::new(0.0, gamma);
        x += e * g.adjoint() * i - g * e.adjoint() * i;
    };
    let e = h.columns(Part::GenericQ);
    let g = h.columns(Part::GenericQPerp);
    for (j, &gamma) in h.generic_angles.iter().enumerate() {
        add_block(e.column(j), g.column(j), gamma);
    }
    let u = h.columns(Part::NullRange);
    let w = h.columns(Part::RangeNull);
    for j in 0..h.dim_01 {
        add_block(u.column(j), w.column(j), FRAC_PI_2);
    }
    let x = (&x + x.adjoint()).scale(0.5);
    let mut angles = h.generic_angles.clone();
    angles.extend(std::iter::repeat_n(FRAC_PI_2, h.dim_01));
    Ok(GeodesicSpec {
        p: p.clone(),
        x,
        angles,
        non_unique: h.dim_01 > 0,
    })
}

/// `δ(t) = e^{itX} P e^{−itX}`; `t = 0` returns `P` unchanged.
pub fn geodesic_eval(g: &GeodesicSpec, t: f64) -> Result<BlockOperator> {
    if t == 0.0 {
        return Ok(g.p.clone());
    }
    let u = unitary_exp(&g.x, t)?;
    let d = &u * g.p.to_dense() * u.adjoint();
    BlockOperator::from_dense(g.p.splitting(), &d)
}

/// `‖[P, e^{iX}] − i·sinc(X)·[P, X]‖`.
pub fn sinc_identity_residual(g: &GeodesicSpec) -> Result<f64> {
    let pd = g.p.to_dense();
    let u = unitary_exp(&g.x, 1.0)?;
    let s = matfun_hermitian(&g.x, |t| cplx(sinc(t)))?;
    let lhs = commutator(&pd, &u);
    let rhs = s * commutator(&pd, &g.x) * Complex64::new(0.0, 1.0);
    Ok(op_norm(&(lhs - rhs)))
}

/// Distances between two projections joined by a geodesic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceReport {
    pub p: f64,
    /// Geodesic length `‖X‖_p`.
    pub d_p: f64,
    /// `‖P − Q‖_p`.
    pub norm_p: f64,
    /// `‖P − Q‖_{∞,p}`.
    pub norm_inf_p: f64,
    /// `‖P − Q‖_p / d_p` (0 when `P = Q`).
    pub ratio: f64,
    pub lower_bound_holds: bool,
    pub upper_bound_holds: bool,
    pub mixed_bound_holds: bool,
    pub non_unique: bool,
}

impl DistanceReport {
    pub fn all_hold(&self) -> bool {
        self.lower_bound_holds && self.upper_bound_holds && self.mixed_bound_holds
    }
}

/// Checks `(2/π)·d_p ≤ ‖P − Q‖_p ≤ d_p` and `‖P − Q‖_{∞,p} ≤ 4‖P − Q‖_p`.
pub fn distance_report(p: &BlockOperator, q: &BlockOperator, exponent: f64) -> Result<DistanceReport> {
    if exponent.is_nan() || exponent < 1.0 {
        return Err(Error::InvalidP(exponent));
    }
    let tol = linalg::scaled_tol(p.splitting().dim(), 1.0);
    let g = build_geodesic(p, q, tol)?;
    let d_p = g.length(exponent)?;
    let diff = p - q;
    let norm_p = diff.schatten_norm(exponent)?;
    let norm_inf_p = diff.norm_infty_p(exponent)?;
    let ratio = if d_p == 0.0 { 0.0 } else { norm_p / d_p };
    let slack = linalg::TAU * (1.0 + d_p);
    Ok(DistanceReport {
        p: exponent,
        d_p,
        norm_p,
        norm_inf_p,
        ratio,
        lower_bound_holds: 2.0 / std::f64::consts::PI * d_p - slack <= norm_p,
        upper_bound_holds: norm_p <= d_p + slack,
        mixed_bound_holds: norm_inf_p <= 4.0 * norm_p + slack,
        non_unique: g.non_unique,
    })
}

/// Samples `t ↦ eigenvalues of E+ δ(t) E+` (the compression `x(t)`) on `samples`
/// equally spaced points of `[0, 1]`.
pub fn geodesic_curve(g: &GeodesicSpec, samples: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let samples = samples.max(2);
    (0..samples)
        .map(|k| {
            let t = k as f64 / (samples - 1) as f64;
            let d = geodesic_eval(g, t)?;
            let eig = linalg::hermitian_eig(&d.a11, 1e-8)?;
            Ok((t, eig.values))
        })
        .collect()
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
    fn e_plus_against_itself() {
        let s = split(3, 2);
        let e = BlockOperator::e_plus(s);
        let h = halmos_decompose(&e, &e, TAU).unwrap();
        assert_eq!((h.dim_11, h.dim_00, h.generic_half_dim), (3, 2, 0));
        assert_eq!((h.dim_10, h.dim_01), (0, 0));
        assert_eq!(commutator_norm_via_angles(&h, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn two_by_two_angle() {
        let gamma = 0.6;
        let p = angle_projection(gamma);
        let e = BlockOperator::e_plus(split(1, 1));
        let h = halmos_decompose(&p, &e, TAU).unwrap();
        assert_eq!(h.generic_half_dim, 1);
        assert!((h.generic_angles[0] - gamma).abs() < 1e-15);
        assert!((h.generic_angles[0] - gamma.sin().asin()).abs() < 1e-15);
        assert!(h.frame_residual(&p.to_dense(), &e.to_dense()) < 1e-15);
    }

    #[test]
    fn commutator_norm_at_quarter_pi() {
        let p = angle_projection(std::f64::consts::FRAC_PI_4);
        let e = BlockOperator::e_plus(split(1, 1));
        let h = halmos_decompose(&p, &e, TAU).unwrap();
        let v = commutator_norm_via_angles(&h, 2.0).unwrap();
        assert!((v - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_reassembly_and_commutator() {
        let mut rng = Rng64::new(2024);
        let s = split(16, 16);
        let e = BlockOperator::e_plus(s);
        for _ in 0..3 {
            let p = rng.projection(s);
            let h = halmos_decompose(&p, &e, 1e-8).unwrap();
            let (pr, qr) = h.reassemble();
            assert!((pr - p.to_dense()).norm() <= 1e-8);
            assert!((qr - e.to_dense()).norm() <= 1e-8);
            let b = &h.basis;
            assert!((b.adjoint() * b - linalg::identity(32)).norm() < 1e-10);
            for exp in [1.0, 2.0, 3.0] {
                let direct = schatten_norm(&commutator(&e.to_dense(), &p.to_dense()), exp).unwrap();
                let via = commutator_norm_via_angles(&h, exp).unwrap();
                assert!((direct - via).abs() <= 1e-8);
            }
            assert!((h.distance_op_norm() - (&p - &e).op_norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn intersections_are_counted() {
        // P = E+ ⊕ one vector of H−: R(P)∩H− has dimension 1
        let s = split(2, 2);
        let mut p = BlockOperator::e_plus(s);
        p.a22[(0, 0)] = cplx(1.0);
        let e = BlockOperator::e_plus(s);
        let h = halmos_decompose(&p, &e, TAU).unwrap();
        assert_eq!((h.dim_11, h.dim_00, h.dim_10, h.dim_01), (2, 1, 1, 0));
        assert_eq!(h.distance_op_norm(), 1.0);
    }

    #[test]
    fn ambiguous_angle_is_reported() {
        let p = angle_projection(5e-8);
        let e = BlockOperator::e_plus(split(1, 1));
        assert!(matches!(
            halmos_decompose(&p, &e, TAU),
            Err(Error::ToleranceBreakdown { .. })
        ));
    }

    #[test]
    fn geodesic_trivial_and_two_by_two() {
        let p = BlockOperator::e_plus(split(1, 1));
        let g = build_geodesic(&p, &p, TAU).unwrap();
        assert_eq!(g.x.norm(), 0.0);

        let gamma = 0.7;
        let q = angle_projection(gamma);
        let g = build_geodesic(&p, &q, TAU).unwrap();
        // e^{iX}E+e^{−iX} = [[c², cs],[cs, s²]] needs X = [[0, iγ],[−iγ, 0]]
        let want = ComplexMatrix::from_row_slice(
            2,
            2,
            &[cplx(0.0), Complex64::new(0.0, gamma), Complex64::new(0.0, -gamma), cplx(0.0)],
        );
        assert!((&g.x - want).norm() < 1e-15);
        for exp in [1.0, 2.0, 3.0] {
            let len = g.length(exp).unwrap();
            assert!((len - 2f64.powf(1.0 / exp) * gamma).abs() < 1e-14);
        }
        let end = geodesic_eval(&g, 1.0).unwrap();
        assert!((end.to_dense() - q.to_dense()).norm() < 1e-14);
        let half = geodesic_eval(&g, 0.5).unwrap();
        assert!((half.to_dense() - angle_projection(gamma / 2.0).to_dense()).norm() < 1e-14);
        assert_eq!(geodesic_eval(&g, 0.0).unwrap(), p);
    }

    #[test]
    fn orthogonal_flip_inserts_right_angle() {
        let s = split(1, 1);
        let p = BlockOperator::e_plus(s);
        let q = BlockOperator::e_minus(s);
        let g = build_geodesic(&p, &q, TAU).unwrap();
        assert!(g.non_unique);
        let r = distance_report(&p, &q, 2.0).unwrap();
        assert!((r.d_p - 2f64.sqrt() * FRAC_PI_2).abs() < 1e-14);
        let end = geodesic_eval(&g, 1.0).unwrap();
        assert!((end.to_dense() - q.to_dense()).norm() < 1e-14);
    }

    #[test]
    fn no_geodesic_when_ranks_differ() {
        let s = split(2, 2);
        let p = BlockOperator::e_plus(s);
        let mut q = BlockOperator::e_plus(s);
        q.a22[(0, 0)] = cplx(1.0);
        assert!(matches!(
            build_geodesic(&p, &q, TAU),
            Err(Error::NoGeodesic { rp_nq: 0, np_rq: 1 })
        ));
    }

    #[test]
    fn sinc_residual_cases() {
        let p = BlockOperator::e_plus(split(1, 1));
        let g = build_geodesic(&p, &p, TAU).unwrap();
        assert_eq!(sinc_identity_residual(&g).unwrap(), 0.0);
        let g = build_geodesic(&p, &angle_projection(1.1), TAU).unwrap();
        assert!(sinc_identity_residual(&g).unwrap() <= 1e-12);

        let mut rng = Rng64::new(5);
        let s = split(6, 6);
        let p = rng.projection(s);
        let x = rng.codiagonal(&p.to_dense(), FRAC_PI_2 * 0.9);
        let g = GeodesicSpec {
            p,
            x,
            angles: vec![],
            non_unique: false,
        };
        assert!(g.codiagonal_defect() < 1e-12);
        assert!(sinc_identity_residual(&g).unwrap() <= 1e-9);
    }

    #[test]
    fn distance_two_by_two_closed_form() {
        let gamma: f64 = 0.9;
        let p = BlockOperator::e_plus(split(1, 1));
        let q = angle_projection(gamma);
        for exp in [1.0, 2.0] {
            let r = distance_report(&p, &q, exp).unwrap();
            let k = 2f64.powf(1.0 / exp);
            assert!((r.d_p - k * gamma).abs() < 1e-12);
            assert!((r.norm_p - k * gamma.sin()).abs() < 1e-12);
            assert!((r.ratio - sinc(gamma)).abs() < 1e-12);
            assert!(r.all_hold());
        }
        let same = distance_report(&p, &p, 2.0).unwrap();
        assert_eq!((same.d_p, same.norm_p, same.norm_inf_p, same.ratio), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn tangent_vector_matches_commutator() {
        let mut rng = Rng64::new(77);
        let s = split(4, 4);
        let p = rng.projection(s);
        let q = rng.projection_with_rank(s, p.trace().re.round() as usize);
        let g = build_geodesic(&p, &q, 1e-8).unwrap();
        let h = 1e-5;
        let fwd = geodesic_eval(&g, h).unwrap().to_dense();
        let bwd = geodesic_eval(&g, -h).unwrap().to_dense();
        let fd = (fwd - bwd) / cplx(2.0 * h);
        let exact = commutator(&g.x, &p.to_dense()) * Complex64::new(0.0, 1.0);
        assert!((fd - exact).norm() <= 1e-6);
    }

    #[test]
    fn curve_stays_projection() {
        let mut rng = Rng64::new(12);
        let s = split(5, 5);
        let p = rng.projection_with_rank(s, 4);
        let q = rng.projection_with_rank(s, 4);
        let g = build_geodesic(&p, &q, 1e-8).unwrap();
        for k in 0..20 {
            let d = geodesic_eval(&g, k as f64 / 19.0).unwrap();
            let (idem, asym) = d.projection_defects();
            assert!(idem < 1e-10 && asym < 1e-10);
        }
        let curve = geodesic_curve(&g, 5).unwrap();
        assert_eq!(curve.len(), 5);
        assert_eq!(curve[0].1.len(), 5);
    }
}
