//! Dominant eigenpairs of non-negative matrices and the Katz variant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{inf_norm, solve_dense, CsrMatrix};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Katz attenuations with `a * lambda_1` at or above `1 - KATZ_MARGIN` are rejected.
pub const KATZ_MARGIN: f64 = 1e-12;

/// Systems up to this dimension are solved directly; larger ones iterate.
const DIRECT_SOLVE_LIMIT: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    pub tol: f64,
    pub max_iter: usize,
    /// Uniform teleport weight in `[0, 1)`; regularizes reducible matrices.
    pub teleport: Option<f64>,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, teleport: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Non-negative, max-normalized.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// `A` optionally blended with a uniform rank-one teleport term
/// `(1 - eps) A + eps * (total / n^2) * 1 1^T`.
struct Operator<'a> {
    a: &'a CsrMatrix,
    keep: f64,
    uniform: f64,
}

impl Operator<'_> {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.a.mul_vec_into(x, out);
        if self.uniform > 0.0 {
            let add = self.uniform * x.iter().sum::<f64>();
            out.iter_mut().for_each(|o| *o = self.keep * *o + add);
        }
    }

    /// Smallest diagonal entry of the operator.
    fn min_diagonal(&self) -> f64 {
        let n = self.a.nrows();
        (0..n).map(|i| self.keep * self.a.get(i, i) + self.uniform).fold(f64::INFINITY, f64::min)
    }
}

/// Dominant (Perron) eigenpair of a non-negative square matrix.
///
/// Irreducible matrices, and any matrix with a teleport term, go straight to
/// shifted power iteration. Otherwise the matrix is split into strongly
/// connected components: the radius is the largest component radius. Every
/// component attaining it with no other such component upstream contributes
/// its Perron vector, extended to the banks that reach it by a linear solve;
/// the eigenvector is the sum of these contributions and zero elsewhere.
/// This stays exact where plain power iteration stalls on defective
/// dominant eigenvalues.
pub fn dominant_eigenpair(a: &CsrMatrix, cfg: &PowerIteration) -> Result<Eigenpair> {
    check_square_nonnegative(a)?;
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", cfg.tol)));
    }
    let n = a.nrows();
    let eps = cfg.teleport.unwrap_or(0.0);
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("teleport must lie in [0, 1), got {eps}")));
    }
    if n == 0 {
        return Err(Error::ZeroMatrix);
    }
    let total = a.total();
    if eps > 0.0 && total > 0.0 {
        let op = Operator { a, keep: 1.0 - eps, uniform: eps * total / (n * n) as f64 };
        return shifted_power(&op, n, cfg);
    }
    let comps = a.strongly_connected_components();
    if comps.len() == 1 {
        if a.nnz() == 0 {
            return Err(Error::ZeroMatrix);
        }
        return shifted_power(&Operator { a, keep: 1.0, uniform: 0.0 }, n, cfg);
    }
    let radii = component_radii(a, &comps, cfg)?;
    let lambda = radii.iter().map(|r| r.value).fold(0.0, f64::max);
    if lambda == 0.0 {
        return Err(Error::ZeroMatrix);
    }

    let mut comp_of = vec![0; n];
    for (c, comp) in comps.iter().enumerate() {
        comp.iter().for_each(|&i| comp_of[i] = c);
    }
    let dominant: Vec<bool> = radii.iter().map(|r| r.value >= lambda * (1.0 - DOMINANT_MARGIN)).collect();
    let mut v = vec![0.0; n];
    for c in (0..comps.len()).filter(|&c| dominant[c]) {
        let upstream = upstream_of(a, &comps[c]);
        if upstream.iter().any(|&i| dominant[comp_of[i]]) {
            continue;
        }
        let mut vc = vec![0.0; n];
        for (&i, &x) in comps[c].iter().zip(&radii[c].vector) {
            vc[i] = x;
        }
        if !upstream.is_empty() {
            let sub = a.submatrix(&upstream);
            let rhs: Vec<f64> =
                upstream.iter().map(|&i| a.row(i).filter(|&(j, _)| comp_of[j] == c).map(|(j, w)| w * vc[j]).sum()).collect();
            let vu = solve_shifted(&sub, lambda, rhs, cfg)?;
            for (&i, x) in upstream.iter().zip(vu) {
                vc[i] = x.max(0.0);
            }
        }
        v.iter_mut().zip(&vc).for_each(|(vi, x)| *vi += x);
    }
    let max = inf_norm(&v);
    v.iter_mut().for_each(|x| *x /= max);
    let iterations = radii.iter().map(|r| r.iterations).sum();
    Ok(Eigenpair { value: lambda, vector: v, iterations })
}

/// Components whose radii lie within this relative distance of the maximum
/// count as dominant.
const DOMINANT_MARGIN: f64 = 1e-10;

fn component_radii(a: &CsrMatrix, comps: &[Vec<usize>], cfg: &PowerIteration) -> Result<Vec<Eigenpair>> {
    comps
        .iter()
        .map(|comp| {
            if comp.len() == 1 {
                let d = a.get(comp[0], comp[0]);
                return Ok(Eigenpair { value: d, vector: vec![1.0], iterations: 0 });
            }
            let sub = a.submatrix(comp);
            shifted_power(&Operator { a: &sub, keep: 1.0, uniform: 0.0 }, comp.len(), cfg)
        })
        .collect()
}

/// Nodes outside `comp` with a path into it, ascending.
fn upstream_of(a: &CsrMatrix, comp: &[usize]) -> Vec<usize> {
    let at = a.transpose();
    let mut seen = vec![false; a.nrows()];
    let mut stack = comp.to_vec();
    comp.iter().for_each(|&i| seen[i] = true);
    let mut out = Vec::new();
    while let Some(j) = stack.pop() {
        for (i, _) in at.row(j) {
            if !seen[i] {
                seen[i] = true;
                out.push(i);
                stack.push(i);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Solves `(lambda I - S) x = b` where the spectral radius of `S` is below `lambda`.
fn solve_shifted(s: &CsrMatrix, lambda: f64, b: Vec<f64>, cfg: &PowerIteration) -> Result<Vec<f64>> {
    let m = s.nrows();
    if m <= DIRECT_SOLVE_LIMIT {
        let mut dense = vec![0.0; m * m];
        for i in 0..m {
            dense[i * m + i] = lambda;
        }
        for (i, j, w) in s.triplets() {
            dense[i * m + j] -= w;
        }
        return solve_dense(dense, b);
    }
    let mut x = vec![0.0; m];
    let mut sx = vec![0.0; m];
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        s.mul_vec_into(&x, &mut sx);
        residual = x.iter().zip(&sx).zip(&b).fold(0.0f64, |r, ((xi, si), bi)| r.max((lambda * xi - si - bi).abs()));
        if residual <= cfg.tol * lambda * inf_norm(&x).max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        x.iter_mut().zip(&sx).zip(&b).for_each(|((xi, si), bi)| *xi = (si + bi) / lambda);
    }
    Err(Error::NonConvergence { iterations: cfg.max_iter, residual })
}

/// Power iteration with `B + sI`, `s` a rough estimate of the spectral
/// radius: the shift leaves eigenvectors unchanged but makes the Perron root
/// strictly dominant for periodic (e.g. bipartite or cyclic) matrices.
/// Converged when `||B v - lambda v||_inf <= tol * lambda` with `max(v) = 1`.
fn shifted_power(op: &Operator<'_>, n: usize, cfg: &PowerIteration) -> Result<Eigenpair> {
    // Iterating on B - dI keeps B's eigenvectors and shrinks the ratio of
    // subdominant to dominant eigenvalues when the diagonal is heavy.
    let offset = op.min_diagonal();
    let apply = |x: &[f64], out: &mut [f64]| {
        op.apply(x, out);
        if offset > 0.0 {
            out.iter_mut().zip(x).for_each(|(o, xi)| *o -= offset * xi);
        }
    };
    let mut x = vec![1.0; n];
    let mut z = vec![0.0; n];

    // Rough radius estimate from a few unshifted steps.
    let mut shift = 0.0;
    for _ in 0..8 {
        apply(&x, &mut z);
        let norm = inf_norm(&z);
        if norm == 0.0 {
            break;
        }
        shift = norm;
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi = zi / norm);
    }
    if shift == 0.0 {
        x.iter_mut().for_each(|v| *v = 1.0);
        shift = 1.0;
    }

    let mut residual = f64::INFINITY;
    for iter in 0..cfg.max_iter {
        apply(&x, &mut z);
        let scale = x.iter().zip(&z).fold(0.0f64, |m, (xi, zi)| m.max(zi + shift * xi));
        let reduced = scale - shift;
        let lambda = reduced + offset;
        residual = x.iter().zip(&z).fold(0.0f64, |m, (xi, zi)| m.max((zi - reduced * xi).abs()));
        if lambda > 0.0 && residual <= cfg.tol * lambda {
            return Ok(Eigenpair { value: lambda, vector: x, iterations: iter + 1 });
        }
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi = (zi + shift * *xi) / scale);
    }
    Err(Error::NonConvergence { iterations: cfg.max_iter, residual })
}

/// Largest eigenvalue of a non-negative matrix: the largest radius over its
/// strongly connected components, 0 when its graph is acyclic.
pub fn spectral_radius(a: &CsrMatrix, cfg: &PowerIteration) -> Result<f64> {
    check_square_nonnegative(a)?;
    if a.pattern_is_acyclic() {
        return Ok(0.0);
    }
    let cfg = PowerIteration { teleport: None, ..*cfg };
    let comps = a.strongly_connected_components();
    Ok(component_radii(a, &comps, &cfg)?.iter().map(|r| r.value).fold(0.0, f64::max))
}

/// Solves `(I - a W) v = 1`.
///
/// Requires `a * lambda_1(W) < 1 - KATZ_MARGIN`; the radius is found with the
/// same power iteration used for eigencentrality.
pub fn katz_centrality(w: &CsrMatrix, a: f64, cfg: &PowerIteration) -> Result<Vec<f64>> {
    check_square_nonnegative(w)?;
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("attenuation must be non-negative, got {a}")));
    }
    let n = w.nrows();
    if a == 0.0 {
        return Ok(vec![1.0; n]);
    }
    let lambda = spectral_radius(w, cfg)?;
    if a * lambda >= 1.0 - KATZ_MARGIN {
        return Err(Error::DivergentAttenuation { a, lambda });
    }
    if n <= DIRECT_SOLVE_LIMIT {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        for (i, j, v) in w.triplets() {
            m[i * n + j] -= a * v;
        }
        return solve_dense(m, vec![1.0; n]);
    }
    katz_neumann(w, a, cfg)
}

/// `v <- 1 + a W v` until the residual of `(I - aW) v = 1` is below `tol`.
fn katz_neumann(w: &CsrMatrix, a: f64, cfg: &PowerIteration) -> Result<Vec<f64>> {
    let n = w.nrows();
    let mut v = vec![1.0; n];
    let mut wv = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        w.mul_vec_into(&v, &mut wv);
        residual = v.iter().zip(&wv).fold(0.0f64, |m, (vi, wi)| m.max((vi - a * wi - 1.0).abs()));
        if residual <= cfg.tol {
            return Ok(v);
        }
        v.iter_mut().zip(&wv).for_each(|(vi, wi)| *vi = 1.0 + a * wi);
    }
    Err(Error::NonConvergence { iterations: cfg.max_iter, residual })
}

fn check_square_nonnegative(a: &CsrMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.nrows(), a.ncols())));
    }
    if let Some((i, j, w)) = a.triplets().find(|&(_, _, w)| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidAmount { value: w, context: format!("matrix entry ({i}, {j}) must be non-negative") });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> CsrMatrix {
        CsrMatrix::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn three_cycle_is_uniform() {
        let m = dense(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        let p = dominant_eigenpair(&m, &PowerIteration::default()).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        assert!(p.vector.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn bipartite_pair() {
        let m = dense(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let p = dominant_eigenpair(&m, &PowerIteration::default()).unwrap();
        assert!((p.value - 2.0).abs() < 1e-12);
        assert!((p.vector[0] - 1.0).abs() < 1e-10 && (p.vector[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn asymmetric_two_cycle_converges_despite_periodicity() {
        let m = dense(&[&[0.0, 4.0], &[1.0, 0.0]]);
        let p = dominant_eigenpair(&m, &PowerIteration::default()).unwrap();
        assert!((p.value - 2.0).abs() < 1e-9);
        assert!((p.vector[0] - 1.0).abs() < 1e-9 && (p.vector[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_and_acyclic() {
        assert_eq!(spectral_radius(&CsrMatrix::zeros(3, 3), &PowerIteration::default()).unwrap(), 0.0);
        let dag = dense(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(spectral_radius(&dag, &PowerIteration::default()).unwrap(), 0.0);
        assert!(matches!(dominant_eigenpair(&dag, &PowerIteration::default()), Err(Error::ZeroMatrix)));
        let swap = dense(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((spectral_radius(&swap, &PowerIteration::default()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn defective_dominant_eigenvalue() {
        // triangular with a constant diagonal: one eigenvalue 0.6 of
        // multiplicity 3 and a single Jordan block
        let m = dense(&[&[0.6, 0.0, 0.0], &[0.7, 0.6, 0.0], &[0.1, 0.3, 0.6]]);
        assert_eq!(spectral_radius(&m, &PowerIteration::default()).unwrap(), 0.6);
        let p = dominant_eigenpair(&m, &PowerIteration::default()).unwrap();
        assert_eq!(p.value, 0.6);
        let av = m.mul_vec(&p.vector);
        assert!(av.iter().zip(&p.vector).all(|(a, v)| (a - 0.6 * v).abs() < 1e-15));
    }

    #[test]
    fn reducible_vector_extends_upstream() {
        let m = dense(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0], &[0.0, 2.0, 0.0]]);
        let p = dominant_eigenpair(&m, &PowerIteration::default()).unwrap();
        assert!((p.value - 2.0).abs() < 1e-12);
        assert!((p.vector[0] - 0.5).abs() < 1e-12);
        assert!((p.vector[1] - 1.0).abs() < 1e-12 && (p.vector[2] - 1.0).abs() < 1e-12);
        // a downstream sink with a weaker cycle receives nothing
        let m = dense(&[&[0.0, 3.0, 1.0, 0.0], &[3.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 0.0, 1.0, 0.0]]);
        let p = dominant_eigenpair(&m, &PowerIteration::default()).unwrap();
        assert!((p.value - 3.0).abs() < 1e-12);
        assert_eq!(&p.vector[2..], &[0.0, 0.0]);
    }

    #[test]
    fn disjoint_equal_blocks_share_the_vector() {
        let m = dense(&[&[0.0, 2.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 2.0], &[0.0, 0.0, 1.0, 0.0]]);
        let p = dominant_eigenpair(&m, &PowerIteration::default()).unwrap();
        assert!((p.value - 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(p.vector[..2], p.vector[2..]);
        assert!(p.vector.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn teleport_handles_dag() {
        let dag = dense(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let cfg = PowerIteration { teleport: Some(0.15), ..Default::default() };
        let p = dominant_eigenpair(&dag, &cfg).unwrap();
        assert!(p.value > 0.0);
        assert!(p.vector.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn non_convergence_reported() {
        let m = dense(&[&[0.0, 1.0, 0.0], &[0.5, 0.0, 0.3], &[0.2, 0.9, 0.0]]);
        let cfg = PowerIteration { max_iter: 1, tol: 1e-15, teleport: None };
        assert!(matches!(dominant_eigenpair(&m, &cfg), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn katz_examples() {
        let w = dense(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(katz_centrality(&w, 0.0, &PowerIteration::default()).unwrap(), vec![1.0, 1.0]);
        let v = katz_centrality(&w, 0.5, &PowerIteration::default()).unwrap();
        assert!((v[0] - 1.5).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        let cycle = dense(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(
            katz_centrality(&cycle, 1.0, &PowerIteration::default()),
            Err(Error::DivergentAttenuation { .. })
        ));
        assert!(katz_centrality(&cycle, 0.999, &PowerIteration::default()).is_ok());
    }

    #[test]
    fn katz_iterative_matches_direct() {
        let w = dense(&[&[0.0, 1.0, 0.5], &[0.2, 0.0, 1.0], &[1.0, 0.3, 0.0]]);
        let cfg = PowerIteration { tol: 1e-13, ..Default::default() };
        let direct = katz_centrality(&w, 0.4, &cfg).unwrap();
        let iter = katz_neumann(&w, 0.4, &cfg).unwrap();
        for (d, i) in direct.iter().zip(&iter) {
            assert!((d - i).abs() < 1e-11);
        }
    }

    #[test]
    fn negative_entries_rejected() {
        let m = dense(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(dominant_eigenpair(&m, &PowerIteration::default()).is_err());
    }
}
