use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::LltError;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, SymbolicCholesky, SymmetricOrdering};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side};

use super::assembly::ReducedSystem;
use super::CscMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Sparse Cholesky with an AMD ordering, single-threaded.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradient.
    ConjugateGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Full displacement vector; constrained dofs hold their prescribed value.
    pub u: Vec<f64>,
    /// `||K U - F|| / ||F||` over free dofs (absolute when `F = 0`).
    pub residual_norm: f64,
    /// `F^T U`.
    pub compliance: f64,
    pub iterations: Option<usize>,
}

/// Linear solver reusing the symbolic factorization across solves that
/// share a sparsity pattern.
#[derive(Debug, Default)]
pub struct LinearSolver {
    kind: SolverKind,
    cached: Option<Cached>,
}

#[derive(Debug)]
struct Cached {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    symbolic: SymbolicCholesky<usize>,
}

const RESIDUAL_LIMIT: f64 = 1e-8;
const CG_TOLERANCE: f64 = 1e-10;

impl LinearSolver {
    pub fn new(kind: SolverKind) -> Self {
        Self { kind, cached: None }
    }

    pub fn kind(&self) -> SolverKind {
        self.kind
    }

    pub fn solve(&mut self, system: &ReducedSystem) -> Result<SolveResult> {
        let (u_free, iterations) = match self.kind {
            SolverKind::Direct => (self.cholesky(&system.k, &system.f)?, None),
            SolverKind::ConjugateGradient => {
                let (u, it) = conjugate_gradient(&system.k, &system.f)?;
                (u, Some(it))
            }
        };
        let residual_norm = relative_residual(&system.k, &u_free, &system.f);
        if !(residual_norm <= RESIDUAL_LIMIT) {
            return Err(Error::Singular(format!(
                "solution residual {residual_norm:e} exceeds {RESIDUAL_LIMIT:e}"
            )));
        }
        let u = system.expand(&u_free);
        let compliance = system.f_full.iter().zip(&u).map(|(f, u)| f * u).sum();
        Ok(SolveResult {
            u,
            residual_norm,
            compliance,
            iterations,
        })
    }

    fn cholesky(&mut self, k: &CscMatrix, f: &[f64]) -> Result<Vec<f64>> {
        let n = k.ncols;
        let reuse = matches!(&self.cached, Some(c) if c.col_ptr == k.col_ptr && c.row_idx == k.row_idx);
        if !reuse {
            let pattern = SymbolicSparseColMatRef::new_checked(n, n, &k.col_ptr, None, &k.row_idx);
            let symbolic = factorize_symbolic_cholesky(pattern, Side::Lower, SymmetricOrdering::Amd, Default::default())
                .map_err(|e| Error::Backend(format!("{e:?}")))?;
            self.cached = Some(Cached {
                col_ptr: k.col_ptr.clone(),
                row_idx: k.row_idx.clone(),
                symbolic,
            });
        }
        let cached = self.cached.as_ref().expect("symbolic factorization present");
        let symbolic = &cached.symbolic;
        let matrix = SparseColMatRef::new(
            SymbolicSparseColMatRef::new_checked(n, n, &cached.col_ptr, None, &cached.row_idx),
            &k.values,
        );

        let par = Par::Seq;
        let mut l_values = vec![0.0f64; symbolic.len_val()];
        let mut mem = MemBuffer::new(
            symbolic
                .factorize_numeric_llt_scratch::<f64>(par, Default::default())
                .or(symbolic.solve_in_place_scratch::<f64>(1, par)),
        );
        let llt = symbolic
            .factorize_numeric_llt(
                &mut l_values,
                matrix,
                Side::Lower,
                Default::default(),
                par,
                MemStack::new(&mut mem),
                Default::default(),
            )
            .map_err(|LltError::NonPositivePivot { index }| Error::NonPositivePivot { index })?;
        let mut x = f.to_vec();
        llt.solve_in_place_with_conj(
            Conj::No,
            MatMut::from_column_major_slice_mut(&mut x, n, 1),
            par,
            MemStack::new(&mut mem),
        );
        Ok(x)
    }
}

/// Direct solve of a reduced system.
pub fn solve(system: &ReducedSystem) -> Result<SolveResult> {
    LinearSolver::new(SolverKind::Direct).solve(system)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(k: &CscMatrix, u: &[f64], f: &[f64]) -> f64 {
    let ku = k.mul_vec(u);
    let r: Vec<f64> = ku.iter().zip(f).map(|(a, b)| a - b).collect();
    let fn_ = norm(f);
    if fn_ > 0.0 {
        norm(&r) / fn_
    } else {
        norm(&r)
    }
}

fn conjugate_gradient(k: &CscMatrix, f: &[f64]) -> Result<(Vec<f64>, usize)> {
    let n = f.len();
    let mut x = vec![0.0; n];
    let f_norm = norm(f);
    if f_norm == 0.0 {
        return Ok((x, 0));
    }
    let inv_diag: Vec<f64> = k
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = f.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 10 * n.max(1);
    for it in 1..=max_iter {
        let kp = k.mul_vec(&p);
        let pkp: f64 = p.iter().zip(&kp).map(|(a, b)| a * b).sum();
        if !(pkp > 0.0) {
            return Err(Error::Singular(format!("matrix not positive definite (p^T K p = {pkp:e} at CG iteration {it})")));
        }
        let alpha = rz / pkp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * kp[i];
        }
        let rel = norm(&r) / f_norm;
        if rel <= CG_TOLERANCE {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: norm(&r) / f_norm,
    })
}
