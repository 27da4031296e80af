//! Spectral radius of finite nonnegative matrices with Collatz–Wielandt
//! certification.
//!
//! For a positive vector `v`, `min_i (Av)_i / v_i ≤ r(A) ≤ max_i (Av)_i / v_i`
//! on an irreducible matrix. Every radius returned here is such a bracket,
//! whatever produced the vector:
//!
//! 1. power iteration on `A + I` (the shift makes periodic matrices converge);
//! 2. when that stalls, a first-return solve: for a pivot `j`, the root of
//!    `F_jj(z) = 1` is `z = 1/r`, and the first-passage generating values
//!    `x_k(z)` at that root form a Perron vector. Long cycles, which make
//!    power iteration crawl, cost a single Gauss–Seidel sweep per evaluation
//!    here.
//!
//! Reducible inputs are split into strongly connected components and the
//! largest component radius is reported.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::FiniteMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMethod {
    Zero,
    PowerIteration,
    FirstReturn,
}

/// Certified bracket `lower ≤ r(A) ≤ upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralRadius {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// False when the matrix is reducible; the radius is then the maximum
    /// over its components.
    pub irreducible: bool,
    /// Bracket width reached the requested tolerance.
    pub converged: bool,
    pub method: RadiusMethod,
}

impl SpectralRadius {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn zero() -> Self {
        SpectralRadius {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            irreducible: false,
            converged: true,
            method: RadiusMethod::Zero,
        }
    }
}

/// Strongly connected components, each sorted; components in reverse
/// topological order of the condensation.
pub fn components(a: &FiniteMatrix) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(a.size(), a.nnz());
    let nodes: Vec<_> = (0..a.size()).map(|_| g.add_node(())).collect();
    for i in 0..a.size() {
        for &j in a.row(i) {
            g.add_edge(nodes[i], nodes[j], ());
        }
    }
    kosaraju_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// True if the component carries at least one cycle.
fn is_cyclic(a: &FiniteMatrix, comp: &[usize]) -> bool {
    comp.len() > 1 || a.get(comp[0], comp[0]) == 1
}

pub fn is_irreducible(a: &FiniteMatrix) -> bool {
    let comps = components(a);
    comps.len() == 1 && is_cyclic(a, &comps[0])
}

/// Spectral radius with a Collatz–Wielandt bracket narrower than `tol`.
pub fn spectral_radius(a: &FiniteMatrix, tol: f64) -> Result<SpectralRadius> {
    Ok(spectral_radius_with_pivot(a, tol, None)?.0)
}

/// As [`spectral_radius`], preferring `pivot` for the first-return solve.
/// Also returns the certifying vector of the dominant component, laid out
/// over the whole matrix (zero outside that component).
pub(crate) fn spectral_radius_with_pivot(
    a: &FiniteMatrix,
    tol: f64,
    pivot: Option<usize>,
) -> Result<(SpectralRadius, Vec<f64>)> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    if a.is_zero() {
        return Ok((SpectralRadius::zero(), vec![0.0; a.size()]));
    }
    let comps = components(a);
    let irreducible = comps.len() == 1 && is_cyclic(a, &comps[0]);
    let mut best: Option<(SpectralRadius, Vec<f64>, Vec<usize>)> = None;
    for comp in comps.iter().filter(|c| is_cyclic(a, c)) {
        let sub = if comps.len() == 1 { a.clone() } else { a.restrict(comp) };
        let local_pivot = pivot.and_then(|p| comp.binary_search(&p).ok());
        let (r, v) = irreducible_radius(&sub, tol, local_pivot);
        let better = match &best {
            None => true,
            Some((b, _, _)) => r.lower > b.lower || (r.lower == b.lower && r.upper < b.upper),
        };
        let upper = best.as_ref().map_or(r.upper, |b| b.0.upper.max(r.upper));
        if better {
            best = Some((r, v, comp.clone()));
        }
        if let Some(b) = best.as_mut() {
            b.0.upper = upper;
        }
    }
    let Some((mut r, v_local, comp)) = best else {
        return Ok((SpectralRadius::zero(), vec![0.0; a.size()]));
    };
    r.irreducible = irreducible;
    r.converged = r.converged && r.width() < tol;
    r.value = 0.5 * (r.lower + r.upper);
    let mut v = vec![0.0; a.size()];
    for (k, &p) in comp.iter().enumerate() {
        v[p] = v_local[k];
    }
    Ok((r, v))
}

/// Collatz–Wielandt bracket of `v` (positive) under `a`.
pub fn collatz_wielandt(a: &FiniteMatrix, v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..a.size() {
        let s: f64 = a.row(i).iter().map(|&j| v[j]).sum();
        let ratio = s / v[i];
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}

fn irreducible_radius(a: &FiniteMatrix, tol: f64, pivot: Option<usize>) -> (SpectralRadius, Vec<f64>) {
    let n = a.size();
    let nnz = a.nnz().max(1);
    // cap the power phase at roughly 5e7 multiply-adds
    let budget = (50_000_000 / (nnz + n)).clamp(50, 20_000);
    let (mut lo, mut hi, v_power) = power_phase(a, tol, budget);
    if hi - lo < tol {
        return (bracket(lo, hi, true, RadiusMethod::PowerIteration), v_power);
    }
    let pivot = pivot.unwrap_or_else(|| (0..n).max_by_key(|&i| a.row(i).len() + a.column(i).len()).unwrap());
    if let Some((flo, fhi, v)) = first_return_phase(a, pivot, lo, hi) {
        if fhi - flo < hi - lo {
            lo = flo;
            hi = fhi;
            return (bracket(lo, hi, hi - lo < tol, RadiusMethod::FirstReturn), v);
        }
    }
    (bracket(lo, hi, false, RadiusMethod::PowerIteration), v_power)
}

fn bracket(lower: f64, upper: f64, converged: bool, method: RadiusMethod) -> SpectralRadius {
    SpectralRadius { value: 0.5 * (lower + upper), lower, upper, irreducible: true, converged, method }
}

fn power_phase(a: &FiniteMatrix, tol: f64, budget: usize) -> (f64, f64, Vec<f64>) {
    let n = a.size();
    let mut v = vec![1.0; n];
    let mut av = vec![0.0; n];
    let mut best = (0.0, f64::INFINITY, v.clone());
    for _ in 0..budget {
        a.apply(&v, &mut av);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let ratio = av[i] / v[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if hi - lo < best.1 - best.0 {
            best = (lo, hi, v.clone());
        }
        if hi - lo < tol {
            break;
        }
        // v <- (A + I) v, rescaled
        let mut scale = 0.0f64;
        for i in 0..n {
            v[i] += av[i];
            scale = scale.max(v[i]);
        }
        for x in v.iter_mut() {
            *x /= scale;
        }
    }
    best
}

/// First-passage generating values `x_k(z)` toward `pivot`, computed by
/// Gauss–Seidel sweeps in DFS post-order. Returns `None` on divergence.
struct FirstPassage<'a> {
    a: &'a FiniteMatrix,
    pivot: usize,
    order: Vec<usize>,
}

impl<'a> FirstPassage<'a> {
    fn new(a: &'a FiniteMatrix, pivot: usize) -> Self {
        // iterative DFS from the pivot, recording finishing order
        let n = a.size();
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = vec![(pivot, 0)];
        state[pivot] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let row = a.row(node);
            if *next < row.len() {
                let child = row[*next];
                *next += 1;
                if state[child] == 0 {
                    state[child] = 1;
                    stack.push((child, 0));
                }
            } else {
                state[node] = 2;
                if node != pivot {
                    order.push(node);
                }
                stack.pop();
            }
        }
        FirstPassage { a, pivot, order }
    }

    fn solve(&self, z: f64, x: &mut [f64]) -> Option<f64> {
        const MAX_SWEEPS: usize = 20_000;
        for _ in 0..MAX_SWEEPS {
            let mut change = 0.0f64;
            for &k in &self.order {
                let s: f64 = self.a.row(k).iter().map(|&l| if l == self.pivot { 1.0 } else { x[l] }).sum();
                let new = z * s;
                if !(new < 1e250) {
                    return None;
                }
                let rel = (new - x[k]).abs() / new.max(f64::MIN_POSITIVE);
                change = change.max(rel);
                x[k] = new;
            }
            if change <= 1e-15 {
                let s: f64 =
                    self.a.row(self.pivot).iter().map(|&l| if l == self.pivot { 1.0 } else { x[l] }).sum();
                return Some(z * s);
            }
        }
        None
    }
}

fn first_return_phase(a: &FiniteMatrix, pivot: usize, lo: f64, hi: f64) -> Option<(f64, f64, Vec<f64>)> {
    let n = a.size();
    let fp = FirstPassage::new(a, pivot);
    if fp.order.len() + 1 != n {
        return None;
    }
    // z = 1/r lies in [1/hi, 1/lo]
    let mut z_lo = 1.0 / hi.max(f64::MIN_POSITIVE);
    let mut z_hi = if lo > 0.0 { 1.0 / lo } else { 1.0 };
    let mut x_lo = vec![0.0; n];
    match fp.solve(z_lo, &mut x_lo) {
        Some(f) if f <= 1.0 => {}
        _ => return None,
    }
    let mut x_mid = vec![0.0; n];
    for _ in 0..200 {
        if z_hi - z_lo <= 4.0 * f64::EPSILON * z_hi {
            break;
        }
        let mid = 0.5 * (z_lo + z_hi);
        if mid <= z_lo || mid >= z_hi {
            break;
        }
        x_mid.copy_from_slice(&x_lo);
        match fp.solve(mid, &mut x_mid) {
            Some(f) if f <= 1.0 => {
                z_lo = mid;
                std::mem::swap(&mut x_lo, &mut x_mid);
            }
            _ => z_hi = mid,
        }
    }
    let mut v = x_lo;
    v[pivot] = 1.0;
    if v.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    let (cw_lo, cw_hi) = collatz_wielandt(a, &v);
    let total: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= total;
    }
    Some((cw_lo, cw_hi, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> FiniteMatrix {
        FiniteMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn row_constant_matrix() {
        let r = spectral_radius(&m(&[&[1, 1], &[1, 1]]), 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.lower <= 2.0 && 2.0 <= r.upper);
        assert!(r.irreducible);
    }

    #[test]
    fn golden_mean_radius() {
        let r = spectral_radius(&m(&[&[1, 1], &[1, 0]]), 1e-12).unwrap();
        assert!((r.value - 1.618_033_988_749_895).abs() < 1e-11);
    }

    #[test]
    fn permutation_matrix_converges_with_shift() {
        let r = spectral_radius(&m(&[&[0, 1], &[1, 0]]), 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn zero_matrix_has_zero_radius() {
        let r = spectral_radius(&m(&[&[0, 0], &[0, 0]]), 1e-9).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(!r.irreducible);
    }

    #[test]
    fn reducible_matrix_is_flagged() {
        // a golden-mean block feeding a single self-loop
        let r = spectral_radius(&m(&[&[1, 1, 1], &[1, 0, 0], &[0, 0, 1]]), 1e-10).unwrap();
        assert!(!r.irreducible);
        assert!((r.value - 1.618_033_988_749_895).abs() < 1e-9);
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        assert!(spectral_radius(&m(&[&[1]]), 0.0).is_err());
    }

    #[test]
    fn long_cycle_uses_first_return_solve() {
        // a cycle of length 3000 with one chord: power iteration mixes
        // far too slowly for a tight bracket
        let n = 3000;
        let mut succ: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n]).collect();
        succ[n - 1].push(n / 2);
        let labels = (0..n).map(|i| i.to_string().into()).collect();
        let a = FiniteMatrix::from_successors(labels, succ).unwrap();
        let r = spectral_radius(&a, 1e-10).unwrap();
        assert!(r.converged, "{r:?}");
        assert_eq!(r.method, RadiusMethod::FirstReturn);
        // first returns to the chord's tail have lengths n and n/2
        let z = 1.0 / r.value;
        let f = z.powi(n as i32) + z.powi((n / 2) as i32);
        assert!((f - 1.0).abs() < 1e-6, "{f}");
    }
}
