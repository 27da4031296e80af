use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::vector::{check_subeigenvector, ResidualReport, SubEigenvector};
use crate::error::{Error, Result};
use crate::graph::example1;
use crate::scalar::{Quadratic, Scalar};
use crate::transition::{
    generating_column, gurevich_entropy_with, spectral_radius_with_pivot, ArcIndex, CountableMatrix, DepthSchedule,
    FiniteMatrix, SeriesOptions,
};

/// Perron eigenpair of an irreducible matrix, normalized to `Σ v = 1`.
///
/// The residual satisfies `‖Av − λv‖∞ < tol·‖v‖∞`.
pub fn perron_vector(a: &FiniteMatrix, tol: f64) -> Result<SubEigenvector<f64>> {
    let (r, v) = spectral_radius_with_pivot(a, tol.min(1e-3), None)?;
    if !r.irreducible {
        return Err(Error::Reducible(format!("{}×{} matrix is not irreducible", a.size(), a.size())));
    }
    if !(r.value > 1.0) {
        return Err(Error::Precondition(format!("spectral radius {} is not above 1", r.value)));
    }
    let mut v = v;
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    // one exact power step sharpens the residual without changing the bracket
    let mut w = vec![0.0; v.len()];
    a.apply(&v, &mut w);
    let lambda = r.value;
    let residual = w.iter().zip(&v).map(|(wi, vi)| (wi - lambda * vi).abs()).fold(0.0, f64::max);
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    if residual >= tol * vmax {
        return Err(Error::Precondition(format!("residual {residual:e} not below {tol:e}")));
    }
    let entries = a.labels().iter().cloned().zip(v).collect();
    SubEigenvector::from_table(lambda, entries)
}

/// Characteristic polynomial `det(xI − A)`, coefficients from the constant term up.
pub fn characteristic_polynomial(a: &FiniteMatrix) -> Vec<BigRational> {
    let n = a.size();
    let dense = a.to_dense();
    let am: Vec<Vec<BigRational>> = dense
        .iter()
        .map(|row| row.iter().map(|&e| BigRational::from_integer(BigInt::from(e))).collect())
        .collect();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(&am, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        let am_k = mat_mul(&am, &next);
        let trace: BigRational = (0..n).map(|i| am_k[i][i].clone()).sum();
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
        mk = next;
    }
    coeffs
}

fn mat_mul(x: &[Vec<BigRational>], y: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = x.len();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if x[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !y[k][j].is_zero() {
                    out[i][j] += &x[i][k] * &y[k][j];
                }
            }
        }
    }
    out
}

fn eval_poly(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

// remainder of p modulo the monic x² − s1·x + s0
fn remainder_mod_quadratic(p: &[BigRational], s1: &BigRational, s0: &BigRational) -> (BigRational, BigRational) {
    let mut r: Vec<BigRational> = p.to_vec();
    for deg in (2..r.len()).rev() {
        let lead = r[deg].clone();
        if lead.is_zero() {
            continue;
        }
        r[deg] = BigRational::zero();
        r[deg - 1] += &lead * s1;
        r[deg - 2] -= &lead * s0;
    }
    let r1 = r.get(1).cloned().unwrap_or_else(BigRational::zero);
    (r.into_iter().next().unwrap_or_else(BigRational::zero), r1)
}

/// The Perron root as an exact element of `Q` or `Q(√d)`.
///
/// Integer roots and roots of quadratic factors are recognised; higher
/// degree Perron roots are unsupported.
pub fn exact_perron_root(a: &FiniteMatrix) -> Result<Quadratic> {
    let (r, _) = spectral_radius_with_pivot(a, 1e-12, None)?;
    let lambda = r.value;
    let p = characteristic_polynomial(a);
    let int = |x: f64| BigRational::from_integer(BigInt::from(x.round() as i64));
    if (lambda - lambda.round()).abs() < 1e-7 && eval_poly(&p, &int(lambda)).is_zero() {
        return Ok(Quadratic::rational(int(lambda)));
    }
    // λ and a conjugate μ with |μ| ≤ λ: trace p = λ + μ ∈ [0, 2λ], norm s = λμ
    for trace in 0..=(2.0 * lambda).floor() as i64 {
        let norm = lambda * (trace as f64 - lambda);
        if (norm - norm.round()).abs() > 1e-6 {
            continue;
        }
        let s1 = BigRational::from_integer(BigInt::from(trace));
        let s0 = BigRational::from_integer(BigInt::from(norm.round() as i64));
        let disc = &s1 * &s1 - BigRational::from_integer(BigInt::from(4)) * &s0;
        if !disc.is_positive() {
            continue;
        }
        let (c0, c1) = remainder_mod_quadratic(&p, &s1, &s0);
        if !(c0.is_zero() && c1.is_zero()) {
            continue;
        }
        let d = disc.to_integer().to_u64().ok_or_else(|| Error::Unsupported("discriminant too large".into()))?;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let root = Quadratic::new(s1 * &half, half, d);
        if (root.to_f64() - lambda).abs() < 1e-6 {
            return Ok(root);
        }
    }
    Err(Error::Unsupported(format!("Perron root {lambda} has degree above 2")))
}

/// Exact Perron eigenpair over `Q(√d)`, normalized to `Σ v = 1`.
pub fn exact_perron_vector(a: &FiniteMatrix) -> Result<SubEigenvector<Quadratic>> {
    if !crate::transition::is_irreducible(a) {
        return Err(Error::Reducible(format!("{}×{} matrix is not irreducible", a.size(), a.size())));
    }
    let lambda = exact_perron_root(a)?;
    if !(lambda > Quadratic::one()) {
        return Err(Error::Precondition(format!("spectral radius {lambda} is not above 1")));
    }
    let v = null_vector(a, &lambda)?;
    let entries = a.labels().iter().cloned().zip(v).collect();
    SubEigenvector::from_table(lambda, entries)?.normalized()
}

// kernel of A − λI, assumed one-dimensional, scaled positive
fn null_vector(a: &FiniteMatrix, lambda: &Quadratic) -> Result<Vec<Quadratic>> {
    let n = a.size();
    let mut rows: Vec<Vec<Quadratic>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = Quadratic::from_ratio(a.get(i, j) as i64, 1);
                    if i == j {
                        e - lambda.clone()
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&k| !rows[k][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Quadratic::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(Error::Precondition(format!("eigenspace has dimension {}", free.len())));
    }
    let f = free[0];
    let mut v = vec![Quadratic::zero(); n];
    v[f] = Quadratic::one();
    for (row, &c) in pivots.iter().enumerate() {
        v[c] = -rows[row][f].clone();
    }
    if v.iter().any(|x| *x < Quadratic::zero()) {
        v.iter_mut().for_each(|x| *x = -x.clone());
    }
    if v.iter().any(|x| !(*x > Quadratic::zero())) {
        return Err(Error::Precondition("Perron vector is not strictly positive".into()));
    }
    Ok(v)
}

/// Converts an exact vector whose entries all happen to be rational.
pub fn to_rational(v: &SubEigenvector<Quadratic>) -> Option<SubEigenvector<BigRational>> {
    let table = v.table().ok()?;
    if !v.lambda.is_rational() || table.iter().any(|(_, x)| !x.is_rational()) {
        return None;
    }
    Some(v.map(|x| x.rational_part().clone()))
}

/// Outcome of [`vj_subeigenvector`].
#[derive(Clone, Debug)]
pub struct VjSubEigenvector {
    pub vector: SubEigenvector<f64>,
    /// False when some series tail could not be certified.
    pub certified: bool,
    pub residual: ResidualReport<f64>,
    /// Rows whose whole successor set lies in the computed support.
    pub rows: Vec<ArcIndex>,
    /// `λ(v_j − 1)`, the expected image length at the deficient row.
    pub expected_deficient_image: f64,
}

/// Options for [`vj_subeigenvector`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VjOptions {
    pub horizon: usize,
    pub tol: f64,
    /// Budget of the entropy pre-check, in doubling steps.
    pub entropy_steps: usize,
}

impl Default for VjOptions {
    fn default() -> Self {
        VjOptions { horizon: 400, tol: 1e-9, entropy_steps: 16 }
    }
}

/// Subeigenvector deficient only at `j`: `v_i = M_ij(1/λ)`.
///
/// Requires `λ` strictly above `exp` of the certified entropy lower bound,
/// so the series converge.
pub fn vj_subeigenvector(
    m: &dyn CountableMatrix,
    lambda: f64,
    j: &ArcIndex,
    opts: VjOptions,
) -> Result<VjSubEigenvector> {
    if !(lambda > 1.0) {
        return Err(Error::Precondition(format!("lambda {lambda} must exceed 1")));
    }
    let entropy = gurevich_entropy_with(m, j, opts.entropy_steps, 1e-9, DepthSchedule::Doubling)?;
    if !(lambda.ln() > entropy.value) {
        return Err(Error::Precondition(format!(
            "log lambda = {} is not above the entropy lower bound {}",
            lambda.ln(),
            entropy.value
        )));
    }
    let column = generating_column(m, j, &(1.0 / lambda), opts.horizon, SeriesOptions::default())?;
    let mut certified = true;
    let mut entries = Vec::new();
    let support: Vec<ArcIndex> = m.enumeration().iter().filter(|a| column.contains_key(*a)).cloned().collect();
    for a in &support {
        let s = &column[a];
        certified &= s.certified();
        entries.push((a.clone(), s.estimate()));
    }
    if !column.contains_key(j) {
        return Err(Error::Precondition(format!("`{j}` is not in the enumeration prefix")));
    }
    let in_support: std::collections::HashSet<&ArcIndex> = support.iter().collect();
    let mut rows = Vec::new();
    for a in &support {
        if m.successors(a)?.iter().all(|s| in_support.contains(s)) {
            rows.push(a.clone());
        }
    }
    let vector = SubEigenvector::from_table(lambda, entries)?.with_slopes_from(m, &rows)?;
    let residual = check_subeigenvector(m, &lambda, &vector, &rows, opts.tol)?;
    let expected_deficient_image = lambda * (vector.entry(j)? - 1.0);
    Ok(VjSubEigenvector { vector, certified, residual, rows, expected_deficient_image })
}

/// The dendrite-fan 2-eigenvector as a rule over all laps.
pub fn example1_eigenvector<S: Scalar>() -> SubEigenvector<S> {
    SubEigenvector::from_rule(S::from_ratio(2, 1), |a: &ArcIndex| {
        example1::eigen_entry(a).map(|q| S::from_rational(&q))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Quadratic;

    fn m(rows: &[Vec<u8>]) -> FiniteMatrix {
        FiniteMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn tent_perron() {
        let v = perron_vector(&m(&[vec![1, 1], vec![1, 1]]), 1e-12).unwrap();
        assert!((v.lambda - 2.0).abs() < 1e-12);
        assert!((v.entry(&"0".into()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn golden_perron_ratio() {
        let v = perron_vector(&m(&[vec![1, 1], vec![1, 0]]), 1e-12).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let ratio = v.entry(&"0".into()).unwrap() / v.entry(&"1".into()).unwrap();
        assert!((ratio - phi).abs() < 1e-10);
    }

    #[test]
    fn permutation_rejected() {
        assert!(matches!(perron_vector(&m(&[vec![0, 1], vec![1, 0]]), 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn reducible_rejected() {
        assert!(matches!(perron_vector(&m(&[vec![1, 1], vec![0, 1]]), 1e-9), Err(Error::Reducible(_))));
    }

    #[test]
    fn characteristic_polynomial_of_golden_mean() {
        let p = characteristic_polynomial(&m(&[vec![1, 1], vec![1, 0]]));
        let ints: Vec<i64> = p.iter().map(|c| c.to_integer().to_i64().unwrap()).collect();
        assert_eq!(ints, vec![-1, -1, 1]);
    }

    #[test]
    fn exact_golden_vector() {
        let v = exact_perron_vector(&m(&[vec![1, 1], vec![1, 0]])).unwrap();
        let phi = Quadratic::new(BigRational::from_ratio(1, 2), BigRational::from_ratio(1, 2), 5);
        assert_eq!(v.lambda, phi);
        let v0 = v.entry(&"0".into()).unwrap();
        let v1 = v.entry(&"1".into()).unwrap();
        assert_eq!(v0.clone(), phi.clone() * v1.clone());
        assert_eq!(v0 + v1, Quadratic::one());
    }

    #[test]
    fn exact_tent_vector_is_rational() {
        let v = exact_perron_vector(&m(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]])).unwrap();
        let r = to_rational(&v).unwrap();
        assert_eq!(r.lambda, BigRational::from_ratio(3, 1));
        assert_eq!(r.entry(&"2".into()).unwrap(), BigRational::from_ratio(1, 3));
    }

    #[test]
    fn vj_on_full_two_shift() {
        let a = m(&[vec![1, 1], vec![1, 1]]);
        let out = vj_subeigenvector(&a, 3.0, &"0".into(), VjOptions::default()).unwrap();
        assert!(out.certified);
        assert!((out.vector.entry(&"0".into()).unwrap() - 2.0).abs() < 1e-9);
        assert!((out.vector.entry(&"1".into()).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(out.residual.deficient_rows(), vec![&ArcIndex::from("0")]);
        let row0 = out.residual.row(&"0".into()).unwrap();
        assert!((row0.image - out.expected_deficient_image).abs() < 1e-9);
    }

    #[test]
    fn vj_below_entropy_rejected() {
        let a = m(&[vec![1, 1], vec![1, 1]]);
        assert!(matches!(vj_subeigenvector(&a, 1.9, &"0".into(), VjOptions::default()), Err(Error::Precondition(_))));
    }
}
