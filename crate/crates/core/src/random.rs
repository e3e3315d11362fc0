//! Deterministic random test objects.
//!
//! The generator is ChaCha8 seeded from a 64-bit integer, so a seed yields the
//! same stream on every platform. Random unitaries come from Gram–Schmidt on a
//! complex Gaussian matrix; Gram–Schmidt fixes the phases of the implied
//! triangular factor to be real positive, which makes the result Haar-distributed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{BlockOperator, Splitting};
use crate::linalg::{cplx, diag_real, orthonormalize, ComplexMatrix};
use num_complex::Complex64;

pub struct Rng64 {
    inner: ChaCha8Rng,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.inner.gen::<f64>()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.gen_range(lo..=hi)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian()) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.complex_gaussian();
            }
        }
        m
    }

    /// Column vector as an `n × 1` matrix.
    pub fn complex_vector(&mut self, n: usize) -> ComplexMatrix {
        self.complex_matrix(n, 1)
    }

    pub fn hermitian(&mut self, n: usize) -> ComplexMatrix {
        let a = self.complex_matrix(n, n);
        (&a + a.adjoint()).scale(0.5)
    }

    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let q = orthonormalize(&self.complex_matrix(n, n), 1e-8);
            if q.ncols() == n {
                return q;
            }
        }
    }

    /// `U·diag(1,…,1,0,…,0)·U*` with the given rank.
    pub fn projection_matrix(&mut self, n: usize, rank: usize) -> ComplexMatrix {
        let u = self.unitary(n);
        let d: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
        &u * diag_real(&d) * u.adjoint()
    }

    /// Random projection on `dim_plus + dim_minus` with rank drawn from `1..n-1`.
    pub fn projection(&mut self, splitting: Splitting) -> BlockOperator {
        let n = splitting.dim();
        let rank = self.int(1, n - 1);
        BlockOperator::from_dense(splitting, &self.projection_matrix(n, rank))
            .expect("dimensions match")
    }

    /// Random projection with the given rank.
    pub fn projection_with_rank(&mut self, splitting: Splitting, rank: usize) -> BlockOperator {
        let n = splitting.dim();
        BlockOperator::from_dense(splitting, &self.projection_matrix(n, rank))
            .expect("dimensions match")
    }

    /// Random block operator with Gaussian blocks.
    pub fn block_operator(&mut self, splitting: Splitting) -> BlockOperator {
        let n = splitting.dim();
        BlockOperator::from_dense(splitting, &self.complex_matrix(n, n)).expect("dimensions match")
    }

    /// Hermitian matrix `X` that is codiagonal for the projection `P`
    /// (`PXP = (1−P)X(1−P) = 0`), scaled so that `‖X‖ = norm`.
    pub fn codiagonal(&mut self, p: &ComplexMatrix, norm: f64) -> ComplexMatrix {
        let n = p.nrows();
        let y = self.complex_matrix(n, n);
        let one_minus = ComplexMatrix::identity(n, n) - p;
        let z = p * &y * &one_minus;
        let x = &z + z.adjoint();
        let current = crate::linalg::op_norm(&x);
        if current == 0.0 {
            return x;
        }
        x * cplx(norm / current)
    }
}
