//! Vanishing-minor conditions for polyhedra with dotted edges, checked
//! exactly, and a floating-point solver used to discover weights.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::gram::gram_matrix;
use super::{CoxeterDiagram, EdgeKind};
use crate::error::{Error, Result};
use crate::exact::{Inertia, TowerElement};

/// All index sets of size `d + 2` when they are proper subsets.
pub fn vanishing_minors(n: usize, d: usize) -> Vec<Vec<usize>> {
    let k = d + 2;
    if k >= n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct MinorCheck {
    /// Zero-based node indices; the full determinant lists every node.
    pub nodes: Vec<usize>,
    pub value: TowerElement,
}

impl MinorCheck {
    pub fn passed(&self) -> bool {
        self.value.is_zero()
    }
}

#[derive(Debug, Clone)]
pub struct WeightReport {
    pub minors: Vec<MinorCheck>,
    pub signature: Inertia,
    pub expected_signature: Inertia,
}

impl WeightReport {
    pub fn signature_ok(&self) -> bool {
        self.signature == self.expected_signature
    }

    pub fn passed(&self) -> bool {
        self.signature_ok() && self.minors.iter().all(MinorCheck::passed)
    }

    /// The full-determinant check, always the last entry.
    pub fn determinant(&self) -> &MinorCheck {
        self.minors.last().expect("determinant check present")
    }
}

/// Checks that the listed principal minors and the determinant vanish and
/// that the Gram matrix has signature `(d, 1)` plus zeros.
///
/// With `minors = None` every principal minor of order `d + 2` is checked.
pub fn verify_truncation_weights(
    d: &CoxeterDiagram,
    dim: usize,
    minors: Option<&[Vec<usize>]>,
) -> Result<WeightReport> {
    let g = gram_matrix(d)?;
    let n = d.n();
    if n < dim + 1 {
        return Err(Error::Precondition(format!("{n} facets cannot span dimension {dim}")));
    }
    let sets = match minors {
        Some(m) => m.to_vec(),
        None => vanishing_minors(n, dim),
    };
    let mut checks = Vec::with_capacity(sets.len() + 1);
    for idx in sets {
        if idx.iter().any(|&i| i >= n) {
            return Err(Error::OutOfRange(format!("minor {idx:?}")));
        }
        let value = g.principal(&idx).det()?;
        checks.push(MinorCheck { nodes: idx, value });
    }
    checks.push(MinorCheck {
        nodes: (0..n).collect(),
        value: g.det()?,
    });
    Ok(WeightReport {
        minors: checks,
        signature: g.inertia()?,
        expected_signature: Inertia {
            pos: dim,
            neg: 1,
            zero: n - dim - 1,
        },
    })
}

/// Gram matrix in floating point, with the unknown weights filled in order.
pub fn numeric_gram(d: &CoxeterDiagram, unknowns: &[f64]) -> Result<DMatrix<f64>> {
    let n = d.n();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut k = 0;
    for ((i, j), e) in d.edges() {
        let x = match e {
            EdgeKind::Label(m) => -(std::f64::consts::PI / *m as f64).cos(),
            EdgeKind::Heavy => -1.0,
            EdgeKind::Dotted(Some(w)) => -w.value.to_f64(),
            EdgeKind::Dotted(None) => {
                let w = *unknowns
                    .get(k)
                    .ok_or_else(|| Error::Precondition("too few unknown values".into()))?;
                k += 1;
                -w
            }
        };
        m[(i, j)] = x;
        m[(j, i)] = x;
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Starting values tried for every unknown weight.
    pub grid: Vec<f64>,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Extra principal minors required to vanish, beyond the default set.
    pub extra_minors: Vec<Vec<usize>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid: vec![1.05, 1.3, 1.7, 2.5, 4.0],
            max_iterations: 200,
            tolerance: 1e-13,
            extra_minors: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NumericSolution {
    /// Zero-based node pairs and their weights, in edge order.
    pub weights: Vec<((usize, usize), f64)>,
    pub residual: f64,
}

fn residuals(d: &CoxeterDiagram, sets: &[Vec<usize>], w: &[f64]) -> Result<DVector<f64>> {
    let g = numeric_gram(d, w)?;
    Ok(DVector::from_iterator(
        sets.len(),
        sets.iter().map(|s| {
            let k = s.len();
            DMatrix::from_fn(k, k, |a, b| g[(s[a], s[b])]).determinant()
        }),
    ))
}

/// Signature of the floating-point Gram matrix, counting eigenvalues within
/// `tol` of zero as zero. Used only as a cross-check of the exact value.
pub fn numeric_signature(d: &CoxeterDiagram, tol: f64) -> Result<Inertia> {
    if !d.unknown_weights().is_empty() {
        return Err(Error::Precondition("diagram has unknown weights".into()));
    }
    Ok(numeric_inertia(&numeric_gram(d, &[])?, tol))
}

fn numeric_inertia(m: &DMatrix<f64>, tol: f64) -> Inertia {
    let eig = SymmetricEigen::new(m.clone());
    let mut s = Inertia {
        pos: 0,
        neg: 0,
        zero: 0,
    };
    for &l in eig.eigenvalues.iter() {
        if l > tol {
            s.pos += 1;
        } else if l < -tol {
            s.neg += 1;
        } else {
            s.zero += 1;
        }
    }
    s
}

/// Finds weights > 1 for the unknown dotted edges making the vanishing
/// minors zero, by damped Gauss-Newton from a grid of starting points.
pub fn solve_truncation_weights_numeric(
    template: &CoxeterDiagram,
    dim: usize,
    opts: &SolverOptions,
) -> Result<Vec<NumericSolution>> {
    let unknowns = template.unknown_weights();
    let k = unknowns.len();
    if k == 0 {
        return Err(Error::Precondition("template has no unknown weights".into()));
    }
    let n = template.n();
    let mut sets = vanishing_minors(n, dim);
    sets.extend(opts.extra_minors.iter().cloned());
    sets.push((0..n).collect());
    if sets.len() < k {
        return Err(Error::Precondition(format!(
            "{} equations for {k} unknown weights",
            sets.len()
        )));
    }
    let expected = Inertia {
        pos: dim,
        neg: 1,
        zero: n - dim - 1,
    };

    let starts = opts.grid.len().pow(k as u32);
    let mut found: Vec<NumericSolution> = Vec::new();
    for s in 0..starts {
        let mut idx = s;
        let mut w: Vec<f64> = (0..k)
            .map(|_| {
                let v = opts.grid[idx % opts.grid.len()];
                idx /= opts.grid.len();
                v
            })
            .collect();
        let Some(res) = gauss_newton(template, &sets, &mut w, opts)? else {
            continue;
        };
        if w.iter().any(|&x| x <= 1.0 + 1e-9) {
            continue;
        }
        let g = numeric_gram(template, &w)?;
        if numeric_inertia(&g, 1e-8) != expected {
            continue;
        }
        if found
            .iter()
            .any(|f| f.weights.iter().zip(&w).all(|(a, b)| (a.1 - b).abs() < 1e-7))
        {
            continue;
        }
        found.push(NumericSolution {
            weights: unknowns.iter().copied().zip(w).collect(),
            residual: res,
        });
    }
    found.sort_by(|a, b| {
        let ka: Vec<f64> = a.weights.iter().map(|x| x.1).collect();
        let kb: Vec<f64> = b.weights.iter().map(|x| x.1).collect();
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found)
}

fn gauss_newton(
    d: &CoxeterDiagram,
    sets: &[Vec<usize>],
    w: &mut [f64],
    opts: &SolverOptions,
) -> Result<Option<f64>> {
    let k = w.len();
    let mut f = residuals(d, sets, w)?;
    let mut mu = 1e-3;
    for _ in 0..opts.max_iterations {
        let norm = f.norm();
        if norm < opts.tolerance {
            return Ok(Some(norm));
        }
        let mut jac = DMatrix::<f64>::zeros(sets.len(), k);
        for c in 0..k {
            let h = 1e-7 * w[c].abs().max(1.0);
            let mut wp = w.to_vec();
            let mut wm = w.to_vec();
            wp[c] += h;
            wm[c] -= h;
            let col = (residuals(d, sets, &wp)? - residuals(d, sets, &wm)?) / (2.0 * h);
            jac.set_column(c, &col);
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let rhs = -(&jt * &f);
        let mut improved = false;
        for _ in 0..30 {
            let a = &jtj + DMatrix::<f64>::identity(k, k) * mu;
            let Some(step) = a.lu().solve(&rhs) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = w.iter().zip(step.iter()).map(|(x, s)| x + s).collect();
            let ft = residuals(d, sets, &trial)?;
            if ft.norm() < norm {
                w.copy_from_slice(&trial);
                f = ft;
                mu = (mu / 10.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let norm = f.norm();
    Ok((norm < opts.tolerance * 1e3).then_some(norm))
}
