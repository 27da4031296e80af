//! The dendrite fan: blades `A_n` (n ≥ 0), `B` and `C_n` (n ≥ 1) glued at a
//! fixed branchpoint `o`, split into monotone laps.
//!
//! | lap        | image                          |
//! |------------|--------------------------------|
//! | `a{n}.1`   | `C_{2^n}`, outward             |
//! | `a{n}.2`   | `C_{2^n}`, inward              |
//! | `a{n}.3`   | `A_{n+1}`, outward             |
//! | `b`        | `A_0`, outward                 |
//! | `c1`       | `B`, outward                   |
//! | `c{m}.1`   | `C_{m-1}`, outward (m ≥ 2)     |
//! | `c{m}.2`   | `C_{m-1}`, inward (m ≥ 2)      |

use num_bigint::BigInt;
use num_rational::BigRational;

use super::model::{ArcEnds, MapRule, PathStep, Vertex};
use crate::error::{Error, Result};
use crate::transition::ArcIndex;

/// Largest prefix depth accepted; the prefix holds about `2^(depth+1)` laps.
pub const MAX_DEPTH: u32 = 20;

/// Largest blade index representable in a label.
const MAX_A: u32 = 62;
const MAX_C: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Blade {
    A(u32),
    B,
    C(u64),
}

impl Blade {
    pub fn label(self) -> String {
        match self {
            Blade::A(n) => format!("A{n}"),
            Blade::B => "B".into(),
            Blade::C(m) => format!("C{m}"),
        }
    }

    pub fn laps(self) -> Vec<Lap> {
        laps_of(self)
    }
}

/// A monotone lap of one blade.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lap {
    A { n: u32, k: u8 },
    B,
    C1,
    C { m: u64, k: u8 },
}

impl Lap {
    pub fn parse(label: &str) -> Option<Lap> {
        match label {
            "b" => return Some(Lap::B),
            "c1" => return Some(Lap::C1),
            _ => {}
        }
        let (head, k) = label.split_once('.')?;
        let k: u8 = k.parse().ok()?;
        if let Some(n) = head.strip_prefix('a') {
            let n: u32 = canonical(n)?.parse().ok()?;
            (n <= MAX_A && (1..=3).contains(&k)).then_some(Lap::A { n, k })
        } else if let Some(m) = head.strip_prefix('c') {
            let m: u64 = canonical(m)?.parse().ok()?;
            ((2..=MAX_C).contains(&m) && (1..=2).contains(&k)).then_some(Lap::C { m, k })
        } else {
            None
        }
    }

    pub fn label(self) -> ArcIndex {
        ArcIndex::new(match self {
            Lap::A { n, k } => format!("a{n}.{k}"),
            Lap::B => "b".into(),
            Lap::C1 => "c1".into(),
            Lap::C { m, k } => format!("c{m}.{k}"),
        })
    }

    pub fn blade(self) -> Blade {
        match self {
            Lap::A { n, .. } => Blade::A(n),
            Lap::B => Blade::B,
            Lap::C1 => Blade::C(1),
            Lap::C { m, .. } => Blade::C(m),
        }
    }
}

// rejects "01" and the like so labels stay unique
fn canonical(digits: &str) -> Option<&str> {
    let ok = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'));
    ok.then_some(digits)
}

fn laps_of(blade: Blade) -> Vec<Lap> {
    match blade {
        Blade::A(n) => (1..=3).map(|k| Lap::A { n, k }).collect(),
        Blade::B => vec![Lap::B],
        Blade::C(1) => vec![Lap::C1],
        Blade::C(m) => vec![Lap::C { m, k: 1 }, Lap::C { m, k: 2 }],
    }
}

fn outward(blade: Blade) -> Vec<PathStep> {
    laps_of(blade).into_iter().map(|l| PathStep::forward(l.label())).collect()
}

fn inward(blade: Blade) -> Vec<PathStep> {
    laps_of(blade).into_iter().rev().map(|l| PathStep::reverse(l.label())).collect()
}

fn tip(blade: Blade) -> Vertex {
    match blade {
        Blade::A(n) => Vertex::new(format!("a{n}.tip")),
        Blade::B => Vertex::new("b.tip"),
        Blade::C(m) => Vertex::new(format!("c{m}.tip")),
    }
}

fn hub() -> Vertex {
    Vertex::new("o")
}

/// Rule family for the dendrite fan, with enumeration prefix of depth `D`:
/// all laps of `A_0..A_{D-1}`, the first two laps of `A_D`, `B`, and
/// `C_1..C_{2^D}`. The prefix is closed under the successor relation up to
/// the escaping laps `a{D-1}.3 → A_D` and is strongly connected.
#[derive(Clone, Debug)]
pub struct Example1 {
    depth: u32,
    arcs: Vec<ArcIndex>,
}

impl Example1 {
    pub fn new(depth: u32) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::Parameter(format!("depth {depth} exceeds the maximum {MAX_DEPTH}")));
        }
        let mut arcs = vec![Lap::B.label(), Lap::C1.label(), Lap::A { n: 0, k: 1 }.label(), Lap::A { n: 0, k: 2 }.label()];
        for n in 1..=depth {
            arcs.push(Lap::A { n: n - 1, k: 3 }.label());
            arcs.push(Lap::A { n, k: 1 }.label());
            arcs.push(Lap::A { n, k: 2 }.label());
            for m in (1u64 << (n - 1)) + 1..=(1u64 << n) {
                arcs.push(Lap::C { m, k: 1 }.label());
                arcs.push(Lap::C { m, k: 2 }.label());
            }
        }
        Ok(Example1 { depth, arcs })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    fn lap(&self, arc: &ArcIndex) -> Result<Lap> {
        Lap::parse(arc.as_str()).ok_or_else(|| Error::UnknownIndex(arc.clone()))
    }
}

impl MapRule for Example1 {
    fn family(&self) -> &str {
        "example1"
    }

    fn arcs(&self) -> &[ArcIndex] {
        &self.arcs
    }

    fn in_prefix(&self, arc: &ArcIndex) -> bool {
        let d = self.depth;
        match Lap::parse(arc.as_str()) {
            Some(Lap::A { n, k }) => n < d || (n == d && k < 3),
            Some(Lap::B | Lap::C1) => true,
            Some(Lap::C { m, .. }) => m <= 1u64 << d,
            None => false,
        }
    }

    fn contains(&self, arc: &ArcIndex) -> bool {
        Lap::parse(arc.as_str()).is_some()
    }

    fn ends(&self, arc: &ArcIndex) -> Result<ArcEnds> {
        Ok(match self.lap(arc)? {
            Lap::A { n, k: 1 } => ArcEnds::new(hub(), Vertex::new(format!("a{n}.p1"))),
            Lap::A { n, k: 2 } => ArcEnds::new(Vertex::new(format!("a{n}.p1")), Vertex::new(format!("a{n}.p2"))),
            Lap::A { n, .. } => ArcEnds::new(Vertex::new(format!("a{n}.p2")), tip(Blade::A(n))),
            Lap::B => ArcEnds::new(hub(), tip(Blade::B)),
            Lap::C1 => ArcEnds::new(hub(), tip(Blade::C(1))),
            Lap::C { m, k: 1 } => ArcEnds::new(hub(), Vertex::new(format!("c{m}.mid"))),
            Lap::C { m, .. } => ArcEnds::new(Vertex::new(format!("c{m}.mid")), tip(Blade::C(m))),
        })
    }

    fn image(&self, arc: &ArcIndex) -> Result<Vec<PathStep>> {
        Ok(match self.lap(arc)? {
            Lap::A { n, k: 1 } => outward(Blade::C(1u64 << n)),
            Lap::A { n, k: 2 } => inward(Blade::C(1u64 << n)),
            Lap::A { n, .. } => outward(Blade::A(n + 1)),
            Lap::B => outward(Blade::A(0)),
            Lap::C1 => outward(Blade::B),
            Lap::C { m, k: 1 } => outward(Blade::C(m - 1)),
            Lap::C { m, .. } => inward(Blade::C(m - 1)),
        })
    }

    fn preimages(&self, arc: &ArcIndex) -> Result<Vec<ArcIndex>> {
        let blade = self.lap(arc)?.blade();
        let mut out = Vec::new();
        match blade {
            Blade::A(0) => out.push(Lap::B.label()),
            Blade::A(n) => out.push(Lap::A { n: n - 1, k: 3 }.label()),
            Blade::B => out.push(Lap::C1.label()),
            Blade::C(m) => {
                if m < MAX_C {
                    out.push(Lap::C { m: m + 1, k: 1 }.label());
                    out.push(Lap::C { m: m + 1, k: 2 }.label());
                }
                if m.is_power_of_two() {
                    let n = m.trailing_zeros();
                    out.push(Lap::A { n, k: 1 }.label());
                    out.push(Lap::A { n, k: 2 }.label());
                }
            }
        }
        Ok(out)
    }

    fn is_finite(&self) -> bool {
        false
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Entry of the unique (up to scale) nonnegative 2-eigenvector at a lap.
///
/// Images of laps have length `2·v`: outer laps of `A_n` cover a whole
/// `C` blade (total 1/2), the third lap covers `A_{n+1}`.
pub fn eigen_entry(arc: &ArcIndex) -> Option<BigRational> {
    Some(match Lap::parse(arc.as_str())? {
        Lap::A { k: 1 | 2, .. } => ratio(1, 4),
        Lap::A { n, .. } => {
            let num = (BigInt::from(1) << (n as usize + 1)) + 1;
            BigRational::new(num, BigInt::from(2))
        }
        Lap::B => ratio(1, 1),
        Lap::C1 => ratio(1, 2),
        Lap::C { .. } => ratio(1, 4),
    })
}

/// Sum of [`eigen_entry`] over the laps of a blade.
pub fn blade_sum(blade: Blade) -> BigRational {
    laps_of(blade).into_iter().map(|l| eigen_entry(&l.label()).expect("valid lap")).sum()
}

/// The word `a0.3 a1.3 ... an.3` following the outer tips.
pub fn third_lap_word(n: u32) -> Vec<ArcIndex> {
    (0..=n).map(|k| Lap::A { n: k, k: 3 }.label()).collect()
}
