//! Half-open arcs of `R/Z` with rational endpoints, and arc partitions.
//!
//! Character phases are always fractions `k / D` with `D` the phase
//! denominator of the group (`N` or `p`), so membership of a phase in an arc
//! reduces to an integer window `lo <= k (+ D) < hi` computed once per arc.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = Ratio<i128>;

/// Largest arc count we are willing to materialize for explicit partitions
/// or allow for uniform ones.
pub const MAX_ARCS: u64 = 1 << 40;

pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den)
}

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: Rat) -> Rat {
    x - x.floor()
}

/// Largest `n / 2^bits` that does not exceed `x`.
pub fn floor_dyadic(x: f64, bits: u32) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::Parameter(format!("non-finite real {x}")));
    }
    let scale = (1i128 << bits) as f64;
    Ok(Rat::new((x * scale).floor() as i128, 1i128 << bits))
}

/// Closest fraction with denominator at most `max_den` (continued fractions,
/// then the better of the last convergent and the best semiconvergent).
pub fn approximate(x: f64, max_den: i128) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::Parameter(format!("non-finite real {x}")));
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut v = x;
    loop {
        let a = v.floor();
        if a.abs() > 1e18 {
            break;
        }
        let a = a as i128;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            let k = (max_den - q0) / q1.max(1);
            let semi = Rat::new(k * p1 + p0, k * q1 + q0);
            let conv = Rat::new(p1, q1.max(1));
            let err = |r: &Rat| (r.to_f64().unwrap_or(f64::MAX) - x).abs();
            return Ok(if q1 > 0 && err(&conv) <= err(&semi) { conv } else { semi });
        }
        let p2 = a * p1 + p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rem = v - a as f64;
        if rem.abs() < 1e-15 {
            break;
        }
        v = 1.0 / rem;
    }
    Ok(Rat::new(p1, q1))
}

/// The half-open arc `[start, start + length)` of `R/Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    start: Rat,
    length: Rat,
}

impl Arc {
    /// `[a, b)` with `a <= b <= a + 1`.
    pub fn new(a: Rat, b: Rat) -> Result<Self> {
        let length = b - a;
        if length.is_negative() || length > Rat::one() {
            return Err(Error::Parameter(format!("interval [{a}, {b}) has length outside [0, 1]")));
        }
        Ok(Arc { start: frac(a), length })
    }

    pub fn full() -> Self {
        Arc { start: Rat::zero(), length: Rat::one() }
    }

    /// `[-sigma, sigma)`, the arc of length `2 sigma` centred at phase 0.
    pub fn centred(sigma: Rat) -> Result<Self> {
        if sigma >= rat(1, 2) {
            return Ok(Self::full());
        }
        Self::new(-sigma, sigma)
    }

    pub fn start(&self) -> Rat {
        self.start
    }

    pub fn end(&self) -> Rat {
        self.start + self.length
    }

    pub fn measure(&self) -> Rat {
        self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= Rat::one()
    }

    /// The arc translated by `-by`.
    pub fn shifted_back(&self, by: Rat) -> Arc {
        Arc { start: frac(self.start - by), length: self.length }
    }

    pub fn contains(&self, theta: Rat) -> bool {
        self.is_full() || frac(theta - self.start) < self.length
    }

    pub fn window(&self, den: u64) -> PhaseWindow {
        let d = den as i128;
        let lo = (self.start * d).ceil().to_integer();
        let hi = (self.end() * d).ceil().to_integer();
        PhaseWindow { lo, hi, den: d }
    }
}

/// Integer form of an arc for phases `k / den`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseWindow {
    lo: i128,
    hi: i128,
    den: i128,
}

impl PhaseWindow {
    #[inline]
    pub fn contains(&self, k: u64) -> bool {
        if self.hi - self.lo >= self.den {
            return true;
        }
        let k = k as i128;
        let k = if k >= self.lo { k } else { k + self.den };
        k < self.hi
    }

    /// `(first residue, count)` of the cyclic integer range covered.
    pub fn range(&self) -> (u64, u64) {
        let count = (self.hi - self.lo).clamp(0, self.den);
        (self.lo.rem_euclid(self.den) as u64, count as u64)
    }
}

/// Partition of `R/Z` into `r` consecutive half-open arcs, the first `r - 1`
/// of measure `tau` and the last of measure in `(0, tau]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcPartition {
    tau: Rat,
    arcs: u64,
    /// Cut points `c_0 < c_1 < .. < c_{r-1} < c_0 + 1` when not the uniform
    /// grid starting at 0.
    cuts: Option<Vec<Rat>>,
}

impl ArcPartition {
    /// Uniform `tau`-grid starting at phase 0 with `ceil(1 / tau)` arcs.
    pub fn uniform(tau: Rat) -> Result<Self> {
        if tau <= Rat::zero() || tau >= Rat::one() {
            return Err(Error::Parameter(format!("tau = {tau} must lie in (0, 1)")));
        }
        let arcs = tau.recip().ceil().to_integer();
        if arcs as u64 > MAX_ARCS {
            return Err(Error::Parameter(format!("tau = {tau} needs too many arcs")));
        }
        Ok(ArcPartition { tau, arcs: arcs as u64, cuts: None })
    }

    pub fn from_cuts(cuts: Vec<Rat>) -> Result<Self> {
        if cuts.len() < 2 {
            return Err(Error::Parameter("a partition needs at least two arcs".into()));
        }
        let c0 = cuts[0];
        if c0.is_negative() || c0 >= Rat::one() {
            return Err(Error::Parameter("first cut must lie in [0, 1)".into()));
        }
        let mut lengths = Vec::with_capacity(cuts.len());
        for w in cuts.windows(2) {
            lengths.push(w[1] - w[0]);
        }
        lengths.push(c0 + Rat::one() - cuts[cuts.len() - 1]);
        let tau = lengths[0];
        let (head, last) = lengths.split_at(lengths.len() - 1);
        if head.iter().any(|&l| l != tau) || last[0] <= Rat::zero() || last[0] > tau || tau >= Rat::one() {
            return Err(Error::Parameter("arcs must have measure tau except a last arc in (0, tau]".into()));
        }
        let arcs = cuts.len() as u64;
        let uniform = c0.is_zero() && Some(arcs as i128) == Some(tau.recip().ceil().to_integer());
        Ok(ArcPartition { tau, arcs, cuts: if uniform { None } else { Some(cuts) } })
    }

    pub fn tau(&self) -> Rat {
        self.tau
    }

    pub fn len(&self) -> u64 {
        self.arcs
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cut(&self, j: u64) -> Rat {
        match &self.cuts {
            None => self.tau * j as i128,
            Some(c) => c[j as usize],
        }
    }

    pub fn arc(&self, j: u64) -> Arc {
        let start = self.cut(j);
        let end = if j + 1 == self.arcs { self.cut(0) + Rat::one() } else { self.cut(j + 1) };
        Arc { start: frac(start), length: end - start }
    }

    /// Index of the arc holding the phase `k / den`.
    pub fn index_of(&self, k: u64, den: u64) -> u64 {
        match &self.cuts {
            None => {
                // floor((k / den) / tau)
                let num = k as i128 * *self.tau.denom();
                let den = den as i128 * *self.tau.numer();
                (Integer::div_floor(&num, &den) as u64).min(self.arcs - 1)
            }
            Some(cuts) => {
                let theta = frac(Rat::new(k as i128, den as i128) - cuts[0]) + cuts[0];
                // Last cut not exceeding theta.
                let pos = cuts.partition_point(|&c| c <= theta);
                (pos as u64).saturating_sub(1)
            }
        }
    }

    pub fn cuts_vec(&self) -> Option<&[Rat]> {
        self.cuts.as_deref()
    }
}

/// JSON pair `[num, den]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RatWire(pub i128, pub i128);

impl TryFrom<RatWire> for Rat {
    type Error = Error;
    fn try_from(w: RatWire) -> Result<Rat> {
        if w.1 == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        // Keep headroom for products with group orders.
        if w.0.unsigned_abs() > 1 << 62 || w.1.unsigned_abs() > 1 << 62 {
            return Err(Error::Parse("rational component too large".into()));
        }
        Ok(Rat::new(w.0, w.1))
    }
}

impl From<Rat> for RatWire {
    fn from(r: Rat) -> Self {
        RatWire(*r.numer(), *r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_matches_rational_membership() {
        let arc = Arc::new(rat(0, 1), rat(1, 4)).unwrap();
        let w = arc.window(17);
        let members: Vec<u64> = (0..17).filter(|&k| w.contains(k)).collect();
        assert_eq!(members, vec![0, 1, 2, 3, 4]);
        for k in 0..17 {
            assert_eq!(w.contains(k), arc.contains(rat(k as i128, 17)));
        }
        let wrap = Arc::centred(rat(1, 10)).unwrap();
        let w = wrap.window(101);
        assert_eq!((0..101).filter(|&k| w.contains(k)).count(), 21);
    }

    #[test]
    fn uniform_thirds() {
        let part = ArcPartition::uniform(rat(1, 3)).unwrap();
        assert_eq!(part.len(), 3);
        assert_eq!(part.index_of(6, 17), 1);
        assert_eq!(part.index_of(0, 17), 0);
        assert_eq!(part.index_of(16, 17), 2);
        let part = ArcPartition::uniform(rat(2, 5)).unwrap();
        assert_eq!(part.len(), 3);
        assert_eq!(part.arc(2).measure(), rat(1, 5));
    }

    #[test]
    fn explicit_cuts_validate() {
        let p = ArcPartition::from_cuts(vec![rat(1, 10), rat(6, 10)]).unwrap();
        assert_eq!(p.index_of(0, 10), 1);
        assert_eq!(p.index_of(1, 10), 0);
        assert_eq!(p.index_of(6, 10), 1);
        assert!(ArcPartition::from_cuts(vec![rat(0, 1), rat(1, 4), rat(1, 2)]).is_err());
        assert!(ArcPartition::from_cuts(vec![rat(0, 1)]).is_err());
        // Uniform cut lists collapse to the grid form.
        let u = ArcPartition::from_cuts(vec![rat(0, 1), rat(1, 3), rat(2, 3)]).unwrap();
        assert_eq!(u, ArcPartition::uniform(rat(1, 3)).unwrap());
    }

    #[test]
    fn real_to_rational() {
        assert_eq!(approximate(0.1, 1 << 30).unwrap(), rat(1, 10));
        assert_eq!(approximate(0.3, 1000).unwrap(), rat(3, 10));
        let r = floor_dyadic(0.1, 20).unwrap();
        assert!(r.to_f64().unwrap() <= 0.1);
        assert!(approximate(f64::NAN, 10).is_err());
    }
}
