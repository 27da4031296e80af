use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transition::{components, CountableMatrix, FiniteMatrix};

/// Largest truncation for which the eventually-onto search is attempted.
pub const LEO_SIZE_CAP: usize = 8192;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LeoStatus {
    /// Smallest `n` with every entry of `A^n` positive.
    Witness { n: usize },
    Inconclusive { reason: String },
}

/// What can be certified about mixing from the enumeration prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingCertificate {
    pub size: usize,
    pub irreducible: bool,
    /// Gcd of loop lengths; only meaningful when irreducible.
    pub period: Option<u64>,
    pub aperiodic: bool,
    pub leo: LeoStatus,
}

impl MixingCertificate {
    pub fn leo_witness(&self) -> Option<usize> {
        match self.leo {
            LeoStatus::Witness { n } => Some(n),
            LeoStatus::Inconclusive { .. } => None,
        }
    }
}

/// Mixing certificate for the principal submatrix on the enumeration prefix.
pub fn mixing_check(m: &dyn CountableMatrix, horizon: usize) -> Result<MixingCertificate> {
    if horizon == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    let a = FiniteMatrix::principal(m, m.enumeration().to_vec())?;
    Ok(certify(&a, horizon))
}

pub fn certify(a: &FiniteMatrix, horizon: usize) -> MixingCertificate {
    let size = a.size();
    let irreducible = size > 0 && components(a).len() == 1 && !a.is_zero();
    let period = irreducible.then(|| period(a));
    let aperiodic = period == Some(1);
    let leo = if !irreducible {
        LeoStatus::Inconclusive { reason: "truncation is reducible".into() }
    } else if !aperiodic {
        LeoStatus::Inconclusive { reason: "truncation is periodic".into() }
    } else if size > LEO_SIZE_CAP {
        LeoStatus::Inconclusive { reason: format!("truncation of {size} arcs exceeds the search cap") }
    } else {
        match leo_witness(a, horizon) {
            Some(n) => LeoStatus::Witness { n },
            None => LeoStatus::Inconclusive { reason: format!("no positive power up to {horizon}") },
        }
    };
    MixingCertificate { size, irreducible, period, aperiodic, leo }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// gcd of level[u] + 1 - level[v] over all edges, from a BFS of an irreducible matrix
fn period(a: &FiniteMatrix) -> u64 {
    let n = a.size();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in a.row(u) {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0u64;
    for u in 0..n {
        for &v in a.row(u) {
            let diff = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs();
            g = gcd(g, diff);
        }
    }
    g
}

// rows of A^k as bitsets: R_{k+1}(i) = OR over successors s of R_k(s)
fn leo_witness(a: &FiniteMatrix, horizon: usize) -> Option<usize> {
    let n = a.size();
    let words = n.div_ceil(64);
    let full = |row: &[u64]| {
        (0..words).all(|w| {
            let bits = if w + 1 == words && !n.is_multiple_of(64) { (1u64 << (n % 64)) - 1 } else { u64::MAX };
            row[w] & bits == bits
        })
    };
    let mut cur = vec![0u64; n * words];
    for i in 0..n {
        for &j in a.row(i) {
            cur[i * words + j / 64] |= 1 << (j % 64);
        }
    }
    let mut next = vec![0u64; n * words];
    for k in 1..=horizon {
        if (0..n).all(|i| full(&cur[i * words..(i + 1) * words])) {
            return Some(k);
        }
        if k == horizon {
            break;
        }
        next.iter_mut().for_each(|x| *x = 0);
        for i in 0..n {
            for &s in a.row(i) {
                for w in 0..words {
                    next[i * words + w] |= cur[s * words + w];
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    None
}
