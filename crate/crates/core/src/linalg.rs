//! Hermitian eigensolvers: dense for small blocks, deflated Lanczos above.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SparseOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSolverConfig {
    /// Blocks up to this dimension are diagonalized densely.
    pub dense_max_dim: usize,
    /// Absolute residual ‖Hx − θx‖ at which a Lanczos Ritz pair is accepted.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EigenSolverConfig {
    fn default() -> Self {
        Self {
            dense_max_dim: 160,
            tolerance: 1e-12,
            max_iterations: 600,
        }
    }
}

/// Eigenvalues in ascending order with their normalized eigenvectors.
#[derive(Debug, Clone, Default)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// All eigenpairs of a dense Hermitian matrix, ascending.
pub fn dense_hermitian(matrix: &DMatrix<Complex64>) -> Spectrum {
    let n = matrix.nrows();
    let real = matrix.iter().all(|v| v.im == 0.0);
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if real {
        let m = matrix.map(|v| v.re);
        let eig = SymmetricEigen::new(m);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|v| Complex64::new(v, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::new(matrix.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Spectrum {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order
            .iter()
            .map(|&i| vectors.column(i).iter().copied().collect())
            .collect(),
    }
}

/// Lowest eigenpairs of `op`, extended one at a time.
pub struct LowSpectrum<'a> {
    op: &'a SparseOperator,
    config: EigenSolverConfig,
    dense: Option<Spectrum>,
    found: Spectrum,
}

impl<'a> LowSpectrum<'a> {
    pub fn new(op: &'a SparseOperator, config: EigenSolverConfig) -> Self {
        let dense = (op.dim <= config.dense_max_dim).then(|| dense_hermitian(&op.to_dense()));
        Self {
            op,
            config,
            dense,
            found: Spectrum::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim
    }

    /// Next eigenpair above those already returned, or `None` when the block is exhausted.
    pub fn next_pair(&mut self) -> Result<Option<(f64, Vec<Complex64>)>> {
        let k = self.found.values.len();
        if k >= self.op.dim {
            return Ok(None);
        }
        let (value, vector) = match &self.dense {
            Some(s) => (s.values[k], s.vectors[k].clone()),
            None => lanczos_lowest(self.op, &self.found.vectors, &self.config)?,
        };
        self.found.values.push(value);
        self.found.vectors.push(vector.clone());
        Ok(Some((value, vector)))
    }

    /// Ensures at least `count` pairs (or the whole block) have been computed.
    pub fn take(&mut self, count: usize) -> Result<&Spectrum> {
        while self.found.values.len() < count.min(self.op.dim) {
            self.next_pair()?;
        }
        Ok(&self.found)
    }

    /// Computes pairs until one lies above `lowest + window`; returns the
    /// multiplicity of the lowest level.
    pub fn lowest_multiplicity(&mut self, window: f64) -> Result<usize> {
        self.take(1)?;
        loop {
            let k = self.found.values.len();
            let last = self.found.values[k - 1];
            if last > self.found.values[0] + window {
                return Ok(k - 1);
            }
            if self.next_pair()?.is_none() {
                return Ok(k);
            }
        }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.found
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for q in basis {
        let c = dot(q, w);
        w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
    }
}

/// Deterministic, symmetry-free start vector. A fresh vector per deflation
/// round matters: the previous one has no component left in the unexplored
/// part of a degenerate eigenspace.
fn start_vector(dim: usize, round: usize) -> Vec<Complex64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    const SILVER: f64 = 0.414_213_562_373_095_1;
    let offset = (round * 7919) as f64;
    (0..dim)
        .map(|i| {
            let x = i as f64 + 1.0 + offset;
            Complex64::new((x * GOLDEN).fract() - 0.5, 0.5 * ((x * SILVER).fract() - 0.5))
        })
        .collect()
}

/// Lowest eigenpair of `op` restricted to the orthogonal complement of `deflate`.
fn lanczos_lowest(
    op: &SparseOperator,
    deflate: &[Vec<Complex64>],
    config: &EigenSolverConfig,
) -> Result<(f64, Vec<Complex64>)> {
    let dim = op.dim;
    let mut q = start_vector(dim, deflate.len());
    project_out(&mut q, deflate);
    project_out(&mut q, deflate);
    let n0 = norm(&q);
    q.iter_mut().for_each(|v| *v /= n0);

    let max_steps = config.max_iterations.min(dim - deflate.len());
    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut best_residual = f64::INFINITY;

    for j in 0..max_steps {
        op.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        // two passes of full reorthogonalization
        for _ in 0..2 {
            project_out(&mut w, deflate);
            project_out(&mut w, &basis);
        }
        let b = norm(&w);

        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let s = eig.eigenvectors.column(imin);
        let residual = b * s[m - 1].abs();
        best_residual = best_residual.min(residual);

        if residual < config.tolerance || b < 1e-14 || j + 1 == max_steps {
            if residual >= config.tolerance && b >= 1e-14 {
                return Err(Error::NonConvergence {
                    iterations: m,
                    residual: best_residual,
                });
            }
            let mut x = vec![Complex64::new(0.0, 0.0); dim];
            for (i, qi) in basis.iter().enumerate() {
                let c = s[i];
                x.iter_mut().zip(qi).for_each(|(xv, qv)| *xv += c * qv);
            }
            project_out(&mut x, deflate);
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v /= nx);
            op.apply(&x, &mut w);
            let rayleigh = dot(&x, &w).re;
            return Ok((rayleigh, x));
        }
        beta.push(b);
        basis.push(w.iter().map(|v| v / b).collect());
    }
    Err(Error::NonConvergence {
        iterations: max_steps,
        residual: best_residual,
    })
}
