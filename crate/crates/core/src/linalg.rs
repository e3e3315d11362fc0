//! Dense complex-matrix primitives: Hermitian eigendecomposition, singular
//! values, Schatten norms, polar decomposition and Hermitian functional calculus.
//!
//! All routines are pure functions of their inputs. Tolerances follow a single
//! relative knob [`TAU`], scaled by the dimension and norm of the input where a
//! post-condition is checked.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix. Row/column indexing follows nalgebra.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Global relative tolerance.
pub const TAU: f64 = 1e-9;

/// Reconstruction constant `c` in `‖M − VΛV*‖ ≤ c·τ·‖M‖` for [`hermitian_eig`].
pub const EIG_RESIDUAL_CONSTANT: f64 = 10.0;

#[inline]
pub fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `τ` scaled by dimension and magnitude: `τ · n · max(1, scale)`.
pub fn scaled_tol(n: usize, scale: f64) -> f64 {
    TAU * (n.max(1) as f64) * scale.max(1.0)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Frobenius norm of `M − M*`.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = cplx(v);
    }
    m
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigDecomposition {
    /// `V f(Λ) V*`.
    pub fn apply<F>(&self, f: F) -> ComplexMatrix
    where
        F: Fn(f64) -> Complex64,
    {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Orthonormal columns for the eigenvalues selected by `keep`.
    pub fn columns_where<F: Fn(f64) -> bool>(&self, keep: F) -> ComplexMatrix {
        let idx: Vec<usize> = (0..self.values.len())
            .filter(|&j| keep(self.values[j]))
            .collect();
        select_columns(&self.vectors, &idx)
    }
}

pub fn select_columns(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.nrows(), idx.len());
    for (k, &j) in idx.iter().enumerate() {
        out.set_column(k, &m.column(j));
    }
    out
}

/// Concatenates column blocks with equal row counts.
pub fn hstack(blocks: &[&ComplexMatrix], rows: usize) -> ComplexMatrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Rotates a vector so that its first non-negligible component is real positive.
fn fix_phase(v: &mut nalgebra::DVectorViewMut<'_, Complex64>) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = z.conj() / z.norm();
        for w in v.iter_mut() {
            *w *= phase;
        }
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Ties are broken by the order returned from the underlying solver; every
/// eigenvector is phase-normalised so its first non-negligible component is
/// real positive. The reconstruction residual satisfies
/// `‖M − VΛV*‖_F ≤ EIG_RESIDUAL_CONSTANT · τ · n · max(1, ‖M‖_F)`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigDecomposition> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let norm = m.norm();
    let asym = hermitian_defect(m);
    let bound = tol * norm.max(f64::MIN_POSITIVE);
    if asym > bound && asym > 0.0 {
        return Err(Error::NotHermitian {
            asymmetry: asym,
            bound,
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(EigDecomposition {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let mut vectors = select_columns(&eig.eigenvectors, &order);
    for j in 0..n {
        fix_phase(&mut vectors.column_mut(j));
    }
    Ok(EigDecomposition { values, vectors })
}

/// Thin SVD `M = U·diag(s)·V*`, unsorted.
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

/// SVD with a reconstruction guard. nalgebra's complex SVD occasionally
/// returns inaccurate factors on matrices with many repeated singular values;
/// those cases are redone with one-sided Jacobi.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            u: ComplexMatrix::zeros(rows, 0),
            s: Vec::new(),
            v: ComplexMatrix::zeros(cols, 0),
        };
    }
    let raw = m.clone().svd(true, true);
    let u = raw.u.expect("requested U");
    let v = raw.v_t.expect("requested V*").adjoint();
    let s: Vec<f64> = raw.singular_values.iter().copied().collect();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * (k as f64) * scale.max(1.0);
    let mut us = u.clone();
    for (j, &sj) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(sj);
    }
    let recon = (&us * v.adjoint() - m).norm();
    let ortho = (u.adjoint() * &u - identity(k)).norm() + (v.adjoint() * &v - identity(k)).norm();
    if recon <= tol && ortho <= 1e-12 * k as f64 {
        return Svd { u, s, v };
    }
    jacobi_svd(m)
}

/// Thin SVD from [`jacobi_right`], sorted descending.
pub fn jacobi_svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let (a, v_full) = jacobi_columns(m);
    let s_full: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| s_full[b].total_cmp(&s_full[a]));
    let order = &order[..k];
    let v = select_columns(&v_full, order);
    // below the Jacobi floor a column is numerically zero
    let floor = f64::EPSILON * m.norm() * 1e-2;
    let s: Vec<f64> = order.iter().map(|&j| if s_full[j] > floor { s_full[j] } else { 0.0 }).collect();
    // rotated columns stay orthogonal to working precision even when tiny
    let mut u = ComplexMatrix::zeros(rows, k);
    for (j, &sj) in s.iter().enumerate() {
        if sj > 0.0 {
            u.set_column(j, &(a.column(order[j]) / cplx(sj)));
        }
    }
    let zero: Vec<usize> = (0..k).filter(|&j| s[j] == 0.0).collect();
    if !zero.is_empty() {
        let keep: Vec<usize> = (0..k).filter(|&j| s[j] > 0.0).collect();
        let done = select_columns(&u, &keep);
        let fill = orthonormalize(&hstack(&[&done, &identity(rows)], rows), 1e-10);
        for (next, &j) in (keep.len()..).zip(&zero) {
            u.set_column(j, &fill.column(next));
        }
    }
    Svd { u, s, v }
}

/// One-sided (Hestenes) Jacobi on the columns of `m`: returns `σ` and a
/// unitary `V` (`cols × cols`) with `M·V` having orthogonal columns of norms `σ`.
/// Works for wide matrices too, giving a complete right basis.
pub fn jacobi_right(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (a, v) = jacobi_columns(m);
    let s = (0..a.ncols()).map(|j| a.column(j).norm()).collect();
    (s, v)
}

/// Rotated columns `M·V` and the accumulated `V`.
fn jacobi_columns(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.ncols();
    let mut a = m.clone();
    let mut v = identity(n);
    // columns below this are numerically zero; rotating them only breeds subnormals
    let floor = (f64::EPSILON * m.norm() * 1e-3).powi(2);
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if alpha.min(beta) <= floor || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, i)];
                        let y = mat[(r, j)] * phase.conj();
                        mat[(r, i)] = x * c - y * s;
                        mat[(r, j)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s = svd(m).s;
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Operator (spectral) norm.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `(Σ σᵢ^p)^{1/p}` computed with max-scaling; `p = ∞` is the operator norm.
pub fn schatten_from_singular_values(s: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(max);
    }
    let sum: f64 = s.iter().map(|&v| (v / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}

/// Schatten p-norm `‖M‖_p = Tr^{1/p}(|M|^p)`; `p = f64::INFINITY` gives the operator norm.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    schatten_from_singular_values(&singular_values(m), p)
}

/// Polar factors `G = U·R` with `U` unitary and `R = (G*G)^{1/2}`.
#[derive(Debug, Clone)]
pub struct Polar {
    pub unitary: ComplexMatrix,
    pub positive: ComplexMatrix,
    pub sigma_min: f64,
}

/// Polar decomposition of an invertible square matrix via the SVD
/// `G = WΣV*`: `U = WV*`, `R = VΣV*`.
pub fn polar(g: &ComplexMatrix, tol: f64) -> Result<Polar> {
    ensure_square(g)?;
    ensure_finite(g)?;
    let n = g.nrows();
    let svd = svd(g);
    let sigma_min = svd
        .s
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if n == 0 {
        return Ok(Polar {
            unitary: ComplexMatrix::zeros(0, 0),
            positive: ComplexMatrix::zeros(0, 0),
            sigma_min: f64::INFINITY,
        });
    }
    if sigma_min <= tol {
        return Err(Error::Singular { sigma_min, tol });
    }
    let w = svd.u;
    let v = svd.v;
    let v_t = v.adjoint();
    let unitary = &w * &v_t;
    let mut vs = v.clone();
    for j in 0..n {
        let s = svd.s[j];
        for i in 0..n {
            vs[(i, j)] *= s;
        }
    }
    let positive = vs * &v_t;
    let positive = (&positive + positive.adjoint()).scale(0.5);
    Ok(Polar {
        unitary,
        positive,
        sigma_min,
    })
}

/// `V f(Λ) V*` for Hermitian `M`.
pub fn matfun_hermitian<F>(m: &ComplexMatrix, f: F) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Complex64,
{
    let tol = scaled_tol(m.nrows(), 1.0);
    let eig = hermitian_eig(m, tol)?;
    for &v in &eig.values {
        let fv = f(v);
        if !(fv.re.is_finite() && fv.im.is_finite()) {
            return Err(Error::FUndefinedOnSpectrum(v));
        }
    }
    Ok(eig.apply(f))
}

/// Cardinal sine `sin(t)/t`, with `sinc(0) = 1`; power series for `|t| < 1e-4`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// `e^{i t M}` for Hermitian `M`.
pub fn unitary_exp(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    matfun_hermitian(m, |x| Complex64::from_polar(1.0, t * x))
}

/// Orthonormal basis for the range of an (approximate) orthogonal projection:
/// eigenvectors with eigenvalue above ½.
pub fn projection_range(p: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = hermitian_eig(p, scaled_tol(p.nrows(), 1.0).max(1e-6))?;
    Ok((eig.columns_where(|v| v > 0.5), eig.columns_where(|v| v <= 0.5)))
}

/// Orthonormalises columns with modified Gram–Schmidt (two passes), dropping
/// columns whose residual norm falls below `drop_tol` relative to their
/// original norm.
pub fn orthonormalize(m: &ComplexMatrix, drop_tol: f64) -> ComplexMatrix {
    let rows = m.nrows();
    let mut kept: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        let orig = v.norm();
        if orig == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &kept {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        let r = v.norm();
        if r > drop_tol * orig {
            kept.push(v / cplx(r));
        }
    }
    let mut out = ComplexMatrix::zeros(rows, kept.len());
    for (k, q) in kept.iter().enumerate() {
        out.set_column(k, q);
    }
    out
}

/// `QQ*` for a matrix with orthonormal columns.
pub fn projector(q: &ComplexMatrix) -> ComplexMatrix {
    q * q.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Rng64;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eig_of_diagonal() {
        let m = diag_real(&[1.0, 0.0]);
        let e = hermitian_eig(&m, TAU).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0]);
        assert!((e.vectors[(1, 0)] - cplx(1.0)).norm() < 1e-15);
        assert!((e.vectors[(0, 1)] - cplx(1.0)).norm() < 1e-15);
    }

    #[test]
    fn eig_of_half_matrix() {
        // characteristic polynomial t² − t = 0
        let m = ComplexMatrix::from_element(2, 2, cplx(0.5));
        let e = hermitian_eig(&m, TAU).unwrap();
        assert!(close(e.values[0], 0.0, 1e-15));
        assert!(close(e.values[1], 1.0, 1e-15));
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = Rng64::new(11);
        let m = rng.hermitian(8);
        let e = hermitian_eig(&m, TAU).unwrap();
        let rec = e.apply(cplx);
        assert!((rec - &m).norm() <= 1e-10);
        let u = &e.vectors;
        assert!((u.adjoint() * u - identity(8)).norm() < 1e-12);
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = identity(2);
        m[(0, 1)] = cplx(1.0);
        assert!(matches!(hermitian_eig(&m, TAU), Err(Error::NotHermitian { .. })));
        let mut bad = identity(2);
        bad[(0, 0)] = cplx(f64::NAN);
        assert!(matches!(hermitian_eig(&bad, TAU), Err(Error::NonFinite)));
    }

    #[test]
    fn schatten_examples() {
        assert!(close(schatten_norm(&identity(3), 1.0).unwrap(), 3.0, 1e-14));
        assert!(close(schatten_norm(&diag_real(&[3.0, 4.0]), 2.0).unwrap(), 5.0, 1e-14));
        assert!(close(schatten_norm(&diag_real(&[3.0, 4.0]), f64::INFINITY).unwrap(), 4.0, 1e-14));
        let mut rng = Rng64::new(3);
        let u = rng.complex_vector(4);
        let v = rng.complex_vector(5);
        let r1 = &u * v.adjoint();
        let expect = u.norm() * v.norm();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!(close(schatten_norm(&r1, p).unwrap(), expect, 1e-12 * expect));
        }
        assert!(matches!(schatten_norm(&identity(2), 0.5), Err(Error::InvalidP(_))));
    }

    #[test]
    fn polar_examples() {
        let mut rng = Rng64::new(5);
        let u = rng.unitary(4);
        let pol = polar(&u, TAU).unwrap();
        assert!((&pol.unitary - &u).norm() < 1e-12);
        assert!((&pol.positive - identity(4)).norm() < 1e-12);

        let a = rng.complex_matrix(4, 4);
        let pd = &a * a.adjoint() + identity(4);
        let pol = polar(&pd, TAU).unwrap();
        assert!((&pol.unitary - identity(4)).norm() < 1e-10);
        assert!((&pol.positive - &pd).norm() < 1e-10);

        let g = rng.complex_matrix(6, 6);
        let pol = polar(&g, TAU).unwrap();
        assert!((&pol.unitary * &pol.positive - &g).norm() <= 1e-10);
        assert!((pol.unitary.adjoint() * &pol.unitary - identity(6)).norm() <= 1e-10);

        let singular = diag_real(&[1.0, 0.0]);
        assert!(matches!(polar(&singular, TAU), Err(Error::Singular { .. })));
    }

    #[test]
    fn matfun_examples() {
        let mut rng = Rng64::new(8);
        let m = rng.hermitian(5);
        let same = matfun_hermitian(&m, cplx).unwrap();
        assert!((same - &m).norm() < 1e-12);

        let d = diag_real(&[0.0, 2f64.ln()]);
        let e = matfun_hermitian(&d, |t| cplx(t.exp())).unwrap();
        assert!((e - diag_real(&[1.0, 2.0])).norm() < 1e-14);

        let w = unitary_exp(&m, 1.0).unwrap();
        let w_inv = unitary_exp(&m, -1.0).unwrap();
        assert!((w.adjoint() * &w - identity(5)).norm() < 1e-12);
        assert!((&w * &w_inv - identity(5)).norm() < 1e-12);
        assert!((w.adjoint() - w_inv).norm() < 1e-12);

        let ln = matfun_hermitian(&diag_real(&[0.0, 1.0]), |t| cplx(t.ln()));
        assert!(matches!(ln, Err(Error::FUndefinedOnSpectrum(_))));
    }

    #[test]
    fn sinc_series_and_closed_form_agree() {
        assert_eq!(sinc(0.0), 1.0);
        for t in [1e-5, 9.9e-5, 1.01e-4, 0.3, std::f64::consts::FRAC_PI_2] {
            let direct = if t == 0.0 { 1.0 } else { t.sin() / t };
            assert!(close(sinc(t), direct, 1e-15));
        }
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let mut m = ComplexMatrix::zeros(3, 3);
        m[(0, 0)] = cplx(1.0);
        m[(0, 1)] = cplx(2.0);
        m[(1, 2)] = cplx(1.0);
        let q = orthonormalize(&m, 1e-12);
        assert_eq!(q.ncols(), 2);
        assert!((q.adjoint() * &q - identity(2)).norm() < 1e-15);
    }

    #[test]
    fn jacobi_on_wide_rank_deficient() {
        // rank 2, 3 × 5: three right directions must land in the kernel
        let a = ComplexMatrix::from_fn(3, 2, |i, j| Complex64::new((i + 2 * j) as f64 - 1.0, (i * j) as f64));
        let b = ComplexMatrix::from_fn(2, 5, |i, j| Complex64::new(((i * 3 + j) % 4) as f64, 1.0 - j as f64));
        let m = &a * &b;
        let (s, v) = jacobi_right(&m);
        assert!((v.adjoint() * &v - identity(5)).norm() < 1e-13);
        let mv = &m * &v;
        let gram = mv.adjoint() * &mv;
        let off = &gram - ComplexMatrix::from_diagonal(&gram.diagonal());
        assert!(off.norm() < 1e-12 * gram.norm());
        let mut s = s;
        s.sort_by(|x, y| y.total_cmp(x));
        assert!(s[2] < 1e-13 * s[0]);
        let reference = singular_values(&m);
        assert!(close(s[0], reference[0], 1e-12 * s[0]));
        assert!(close(s[1], reference[1], 1e-12 * s[0]));
    }

    #[test]
    fn jacobi_svd_reconstructs_rank_deficient() {
        let mut rng = Rng64::new(11);
        for (rows, cols) in [(6, 3), (3, 6), (5, 5)] {
            let m = rng.complex_matrix(rows, 2) * rng.complex_matrix(2, cols);
            let f = jacobi_svd(&m);
            let k = rows.min(cols);
            assert_eq!(f.s.iter().filter(|&&x| x <= 1e-12 * f.s[0]).count(), k - 2);
            assert!((f.u.adjoint() * &f.u - identity(k)).norm() < 1e-12);
            assert!((f.v.adjoint() * &f.v - identity(k)).norm() < 1e-12);
            let mut us = f.u.clone();
            for (j, &sj) in f.s.iter().enumerate() {
                us.column_mut(j).scale_mut(sj);
            }
            assert!((us * f.v.adjoint() - &m).norm() < 1e-12 * m.norm());
        }
    }
}
