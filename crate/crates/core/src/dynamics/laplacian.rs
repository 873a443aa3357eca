use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{supra_flatten, MultilayerNetwork};
use crate::sparse::CsrMatrix;

/// Largest dimension handled by a dense eigensolver.
const DENSE_LIMIT: usize = 512;
const DEFLATED_TOL: f64 = 1e-12;
const DEFLATED_MAX_ITER: usize = 200_000;

/// `D - A_sym` over the supra graph, with `A_sym = (S + S^T) / 2` and
/// interlayer blocks of `S` scaled by the coupling strength.
#[derive(Debug, Clone, PartialEq)]
pub struct SupraLaplacian {
    n: usize,
    l: usize,
    dx: f64,
    labels: Vec<String>,
    matrix: CsrMatrix,
}

impl SupraLaplacian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_layers(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.n * self.l
    }

    pub fn coupling(&self) -> f64 {
        self.dx
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// `bank@layer` for every supra index.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix.get(i, i)).fold(0.0, f64::max)
    }

    /// `x^T L x`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        self.matrix.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (r, c, w) in self.matrix.triplets() {
            m[(r, c)] = w;
        }
        m
    }
}

pub fn supra_laplacian(net: &MultilayerNetwork, dx: f64) -> Result<SupraLaplacian> {
    if !(dx >= 0.0) || !dx.is_finite() {
        return Err(Error::InvalidParameter(format!("coupling strength must be finite and >= 0, got {dx}")));
    }
    let n = net.n();
    let l = net.num_layers();
    let dim = n * l;
    let supra = supra_flatten(net).into_matrix();
    let scaled: Vec<(usize, usize, f64)> = supra
        .triplets()
        .map(|(r, c, w)| (r, c, if r / n == c / n { w } else { w * dx }))
        .filter(|&(r, c, w)| w != 0.0 && r != c)
        .collect();
    let mut degree = vec![0.0; dim];
    let mut entries = Vec::with_capacity(2 * scaled.len() + dim);
    for &(r, c, w) in &scaled {
        let half = 0.5 * w;
        entries.push((r, c, -half));
        entries.push((c, r, -half));
        degree[r] += half;
        degree[c] += half;
    }
    entries.extend(degree.iter().enumerate().map(|(i, &d)| (i, i, d)));
    let labels = (0..dim)
        .map(|s| format!("{}@{}", net.registry().id(s % n), net.layer(s / n).layer()))
        .collect();
    Ok(SupraLaplacian { n, l, dx, labels, matrix: CsrMatrix::from_triplets(dim, dim, entries) })
}

/// All eigenvalues in ascending order (dense solve).
pub fn laplacian_spectrum(lap: &SupraLaplacian) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(lap.dense(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Eigensolver("symmetric eigendecomposition did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Connectivity {
    pub lambda2: f64,
    pub connected: bool,
}

/// Second-smallest Laplacian eigenvalue; 0 with `connected = false` when
/// the supra graph splits.
pub fn algebraic_connectivity(lap: &SupraLaplacian) -> Result<Connectivity> {
    let dim = lap.dim();
    if dim < 2 || !is_connected(lap.matrix()) {
        return Ok(Connectivity { lambda2: 0.0, connected: false });
    }
    let lambda2 = if dim <= DENSE_LIMIT {
        laplacian_spectrum(lap)?[1].max(0.0)
    } else {
        deflated_lambda2(lap)?
    };
    Ok(Connectivity { lambda2, connected: true })
}

fn is_connected(m: &CsrMatrix) -> bool {
    let dim = m.nrows();
    let mut seen = vec![false; dim];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for (v, w) in m.row(u) {
            if v != u && w != 0.0 && !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == dim
}

/// Power iteration on `cI - L` restricted to the complement of the constant
/// vector; its dominant eigenvalue there is `c - lambda_2`.
fn deflated_lambda2(lap: &SupraLaplacian) -> Result<f64> {
    let dim = lap.dim();
    let c = 2.0 * lap.max_diagonal();
    let project = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / dim as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    let mut v: Vec<f64> = (0..dim).map(|i| ((i * 7919) % 104_729) as f64 + 1.0).collect();
    project(&mut v);
    let mut lv = vec![0.0; dim];
    let mut mu = 0.0;
    for _ in 0..DEFLATED_MAX_ITER {
        lap.matrix().mul_vec_into(&v, &mut lv);
        let mut next: Vec<f64> = v.iter().zip(&lv).map(|(x, y)| c * x - y).collect();
        let rayleigh: f64 = next.iter().zip(&v).map(|(a, b)| a * b).sum();
        project(&mut next);
        let delta = (rayleigh - mu).abs();
        mu = rayleigh;
        v = next;
        if delta <= DEFLATED_TOL * c.max(1.0) {
            return Ok((c - mu).max(0.0));
        }
    }
    Err(Error::Eigensolver(format!("deflated iteration did not converge in {DEFLATED_MAX_ITER} steps")))
}
