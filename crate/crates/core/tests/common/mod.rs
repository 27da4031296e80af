//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library beyond reading the 0/1 table.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tamegraph::transition::{ArcIndex, CountableMatrix};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense 0/1 table of the prefix, rows and columns in enumeration order.
pub fn dense(m: &dyn CountableMatrix) -> (Vec<ArcIndex>, Vec<Vec<u8>>) {
    let labels = m.enumeration().to_vec();
    let rows = labels
        .iter()
        .map(|i| {
            let succ = m.successors(i).unwrap();
            labels.iter().map(|j| succ.contains(j) as u8).collect()
        })
        .collect();
    (labels, rows)
}

/// Number of words `i = w0, w1, ..., wn = j` by explicit enumeration.
pub fn brute_paths(rows: &[Vec<u8>], i: usize, j: usize, n: usize) -> u64 {
    if n == 0 {
        return (i == j) as u64;
    }
    (0..rows.len()).filter(|&k| rows[i][k] == 1).map(|k| brute_paths(rows, k, j, n - 1)).sum()
}

/// Every admissible word with `n + 1` letters, in lexicographic index order.
pub fn brute_words(rows: &[Vec<u8>], n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..rows.len()).map(|i| vec![i]).collect();
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                (0..rows.len()).filter(move |&k| rows[last][k] == 1).map(move |k| {
                    let mut x = w.clone();
                    x.push(k);
                    x
                })
            })
            .collect();
    }
    out
}

pub fn strongly_connected(rows: &[Vec<u8>]) -> bool {
    let n = rows.len();
    (0..n).all(|s| {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if rows[a][b] == 1 && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.iter().all(|&x| x)
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut x = p.clone();
            x.insert(k, n - 1);
            out.push(x);
        }
    }
    out
}

fn sign(p: &[usize]) -> f64 {
    let mut inv = 0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            inv += (p[a] > p[b]) as usize;
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Largest real root of `det(xI − A)` by Leibniz expansion and bisection.
/// Meant for irreducible matrices of size at most 6.
pub fn brute_radius(rows: &[Vec<u8>]) -> f64 {
    let n = rows.len();
    let perms: Vec<(Vec<usize>, f64)> = permutations(n).into_iter().map(|p| {
        let s = sign(&p);
        (p, s)
    }).collect();
    let det = |x: f64| -> f64 {
        perms
            .iter()
            .map(|(p, s)| {
                s * (0..n)
                    .map(|i| (if i == p[i] { x } else { 0.0 }) - rows[i][p[i]] as f64)
                    .product::<f64>()
            })
            .sum()
    };
    let step = 1e-4;
    let mut hi = n as f64 + 1.0;
    let mut lo = hi - step;
    while det(lo) > 0.0 {
        hi = lo;
        lo -= step;
        assert!(lo > -1.0, "no real root found");
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if det(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random irreducible 0/1 matrix of the given size.
pub fn random_irreducible(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<Vec<u8>> {
    loop {
        let rows: Vec<Vec<u8>> =
            (0..n).map(|_| (0..n).map(|_| rng.gen_bool(density) as u8).collect()).collect();
        if strongly_connected(&rows) {
            return rows;
        }
    }
}

/// The interval maps the finite built-ins realize, written directly on `[0, 1]`.
pub trait DirectMap<S> {
    /// Index of the lap containing an interior point.
    fn letter(&self, x: &S) -> usize;
    fn apply(&self, x: &S) -> S;
}

/// `2x` on `[0, 1/2]`, `2 − 2x` on `[1/2, 1]`.
pub struct DirectTent;

impl DirectMap<BigRational> for DirectTent {
    fn letter(&self, x: &BigRational) -> usize {
        (*x > q(1, 2)) as usize
    }

    fn apply(&self, x: &BigRational) -> BigRational {
        if *x <= q(1, 2) {
            x * q(2, 1)
        } else {
            q(2, 1) - x * q(2, 1)
        }
    }
}

/// With `a = φ/(1+φ)`: `1 − φx` on `[0, a]`, `φ(x − a)` on `[a, 1]`.
pub struct DirectGolden;

impl DirectGolden {
    pub fn phi() -> tamegraph::Quadratic {
        tamegraph::Quadratic::new(q(1, 2), q(1, 2), 5)
    }

    pub fn a() -> tamegraph::Quadratic {
        use num_traits::One;
        let phi = Self::phi();
        phi.clone() / (tamegraph::Quadratic::one() + phi)
    }
}

impl DirectMap<tamegraph::Quadratic> for DirectGolden {
    fn letter(&self, x: &tamegraph::Quadratic) -> usize {
        (*x > Self::a()) as usize
    }

    fn apply(&self, x: &tamegraph::Quadratic) -> tamegraph::Quadratic {
        use num_traits::One;
        let a = Self::a();
        if *x <= a {
            tamegraph::Quadratic::one() - Self::phi() * x.clone()
        } else {
            Self::phi() * (x.clone() - a)
        }
    }
}

/// Three-lap tent: `3x`, `2 − 3x`, `3x − 2` on the thirds of `[0, 1]`.
pub struct DirectShift3;

impl DirectMap<BigRational> for DirectShift3 {
    fn letter(&self, x: &BigRational) -> usize {
        if *x < q(1, 3) {
            0
        } else if *x < q(2, 3) {
            1
        } else {
            2
        }
    }

    fn apply(&self, x: &BigRational) -> BigRational {
        let three = x * q(3, 1);
        match self.letter(x) {
            0 => three,
            1 => q(2, 1) - three,
            _ => three - q(2, 1),
        }
    }
}
