//! The two group families: cyclic `Z/NZ` and the additive group of `F_{p^m}`.
//!
//! Elements are stored as canonical `u64` labels in `[0, |G|)`. For the
//! cyclic family the label is the residue itself. For `F_{p^m}` the label
//! encodes the coefficient vector `(c_0, .., c_{m-1})` of the reduced
//! polynomial as `c_0 + c_1 p + .. + c_{m-1} p^{m-1}`, so equality of labels
//! is equality of field elements and the additive group is `(Z/p)^m` in
//! mixed-radix order.

pub(crate) mod fpoly;

use serde::{Deserialize, Serialize};

use crate::arith::{self, inv_mod, mul_mod, pow_mod};
use crate::error::{Error, Result};

pub const MAX_ORDER: u64 = 1 << 31;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupWire", into = "GroupWire")]
pub enum GroupSpec {
    Cyclic(Cyclic),
    Field(Field),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclic {
    n: u64,
    factorization: Vec<(u64, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    p: u64,
    m: u32,
    q: u64,
    /// Monic, length `m + 1`, low degree first.
    modulus: Vec<u64>,
    /// `Tr(X^k)` for `k < m`; the trace is linear in the coefficients.
    trace_basis: Vec<u64>,
}

/// Smallness conditions on a modulus: at most `omega` distinct primes, all
/// exponents at most `omega`, all primes at least `min_prime`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoughnessProfile {
    pub omega: u32,
    pub min_prime: u64,
}

impl RoughnessProfile {
    pub fn satisfied_by(&self, g: &GroupSpec) -> bool {
        let fac: Vec<(u64, u32)> = match g {
            GroupSpec::Cyclic(c) => c.factorization.clone(),
            GroupSpec::Field(f) => vec![(f.p, f.m)],
        };
        fac.len() as u32 <= self.omega && fac.iter().all(|&(p, m)| m <= self.omega && p >= self.min_prime)
    }
}

impl GroupSpec {
    pub fn cyclic(n: u64) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&n) {
            return Err(Error::ModulusOutOfRange(n));
        }
        Ok(GroupSpec::Cyclic(Cyclic { n, factorization: arith::factorize(n) }))
    }

    /// `F_{p^m}` with the least monic irreducible modulus, where candidates
    /// are ordered by their label `c_0 + c_1 p + .. + c_{m-1} p^{m-1}`.
    pub fn field(p: u64, m: u32) -> Result<Self> {
        Self::check_field_order(p, m)?;
        let q = p.pow(m);
        let mut lower = vec![0u64; m as usize];
        for idx in 0..q {
            let mut t = idx;
            for c in lower.iter_mut() {
                *c = t % p;
                t /= p;
            }
            // A zero constant term means X divides the candidate.
            if m > 1 && lower[0] == 0 {
                continue;
            }
            let mut cand = lower.clone();
            cand.push(1);
            if fpoly::is_irreducible(&cand, p) {
                return Self::field_with_modulus(p, m, cand);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn field_with_modulus(p: u64, m: u32, modulus: Vec<u64>) -> Result<Self> {
        Self::check_field_order(p, m)?;
        if modulus.len() != m as usize + 1 || modulus[m as usize] != 1 {
            return Err(Error::BadModulus(format!("expected monic degree-{m} vector, got {modulus:?}")));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadModulus("coefficients must lie in [0, p)".into()));
        }
        if !fpoly::is_irreducible(&modulus, p) {
            return Err(Error::BadModulus(format!("{modulus:?} is reducible over F_{p}")));
        }
        let q = p.pow(m);
        let mut f = Field { p, m, q, modulus, trace_basis: Vec::new() };
        f.trace_basis = (0..m).map(|k| f.trace_by_powers(f.monomial(k))).collect();
        Ok(GroupSpec::Field(f))
    }

    fn check_field_order(p: u64, m: u32) -> Result<()> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::Parameter("field degree must be >= 1".into()));
        }
        match p.checked_pow(m) {
            Some(q) if q <= MAX_ORDER => Ok(()),
            _ => Err(Error::FieldTooLarge { p, m }),
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            GroupSpec::Cyclic(c) => c.n,
            GroupSpec::Field(f) => f.q,
        }
    }

    pub fn size(&self) -> usize {
        self.order() as usize
    }

    pub fn is_field(&self) -> bool {
        matches!(self, GroupSpec::Field(_))
    }

    pub fn as_cyclic(&self) -> Result<&Cyclic> {
        match self {
            GroupSpec::Cyclic(c) => Ok(c),
            _ => Err(Error::WrongGroupKind { expected: "cyclic" }),
        }
    }

    pub fn as_field(&self) -> Result<&Field> {
        match self {
            GroupSpec::Field(f) => Ok(f),
            _ => Err(Error::WrongGroupKind { expected: "field" }),
        }
    }

    /// `(prime, exponent)` pairs of `|G|` for the cyclic family; `[(p, m)]`
    /// for the field.
    pub fn factorization(&self) -> Vec<(u64, u32)> {
        match self {
            GroupSpec::Cyclic(c) => c.factorization.clone(),
            GroupSpec::Field(f) => vec![(f.p, f.m)],
        }
    }

    pub fn check(&self, x: u64) -> Result<u64> {
        if x < self.order() {
            Ok(x)
        } else {
            Err(Error::ElementOutOfRange { elem: x, order: self.order() })
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            GroupSpec::Cyclic(c) => {
                let s = a + b;
                if s >= c.n {
                    s - c.n
                } else {
                    s
                }
            }
            GroupSpec::Field(f) => f.add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        match self {
            GroupSpec::Cyclic(c) => (c.n - a) % c.n,
            GroupSpec::Field(f) => f.neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    /// Ring multiplication (`Z/NZ`) or field multiplication (`F_q`).
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            GroupSpec::Cyclic(c) => mul_mod(a, b, c.n),
            GroupSpec::Field(f) => f.mul(a, b),
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        match self {
            GroupSpec::Cyclic(c) => pow_mod(a, e, c.n),
            GroupSpec::Field(f) => f.pow(a, e),
        }
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        match self {
            GroupSpec::Cyclic(c) => inv_mod(a, c.n),
            GroupSpec::Field(f) => f.inv(a),
        }
    }

    pub fn is_unit(&self, a: u64) -> bool {
        self.inv(a).is_some()
    }

    pub fn units(&self) -> Vec<u64> {
        match self {
            GroupSpec::Cyclic(c) => (1..c.n).filter(|&x| num_integer::gcd(x, c.n) == 1).collect(),
            GroupSpec::Field(f) => (1..f.q).collect(),
        }
    }

    pub fn largest_proper_subgroup_size(&self) -> u64 {
        match self {
            GroupSpec::Cyclic(c) => c.n / c.factorization[0].0,
            GroupSpec::Field(f) => f.q / f.p,
        }
    }

    /// Phase of the character labelled `label` at `x`, as the exact fraction
    /// `numerator / denominator` in `[0, 1)`.
    #[inline]
    pub fn phase(&self, label: u64, x: u64) -> (u64, u64) {
        match self {
            GroupSpec::Cyclic(c) => (mul_mod(label, x, c.n), c.n),
            GroupSpec::Field(f) => (f.trace(f.mul(label, x)), f.p),
        }
    }

    /// Denominator shared by all character phases.
    pub fn phase_denominator(&self) -> u64 {
        match self {
            GroupSpec::Cyclic(c) => c.n,
            GroupSpec::Field(f) => f.p,
        }
    }

    pub fn trace(&self, x: u64) -> Result<u64> {
        Ok(self.as_field()?.trace(x))
    }
}

impl Cyclic {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    fn split_moduli(&self, p1_power: u64) -> Result<(u64, u64)> {
        if p1_power < 2 || !self.n.is_multiple_of(p1_power) {
            return Err(Error::NotExactDivisor(p1_power));
        }
        let rest = self.n / p1_power;
        if num_integer::gcd(p1_power, rest) != 1 {
            return Err(Error::NotExactDivisor(p1_power));
        }
        Ok((p1_power, rest))
    }

    /// Inverses `(Gamma, gamma)` of `N'` modulo `p1_power` and of `p1_power`
    /// modulo `N'`.
    pub fn crt_coefficients(&self, p1_power: u64) -> Result<(u64, u64)> {
        let (a, b) = self.split_moduli(p1_power)?;
        let big_gamma = inv_mod(b % a, a).unwrap_or(0);
        let small_gamma = if b == 1 { 0 } else { inv_mod(a % b, b).unwrap_or(0) };
        Ok((big_gamma, small_gamma))
    }

    pub fn crt_split(&self, x: u64, p1_power: u64) -> Result<(u64, u64)> {
        let (a, b) = self.split_moduli(p1_power)?;
        Ok((x % a, x % b))
    }

    /// `(u, v) -> u N' Gamma + v p1_power gamma  (mod N)`.
    pub fn crt_join(&self, u: u64, v: u64, p1_power: u64) -> Result<u64> {
        let (a, b) = self.split_moduli(p1_power)?;
        let (big_gamma, small_gamma) = self.crt_coefficients(p1_power)?;
        let n = self.n;
        let left = mul_mod(mul_mod(u % a, b, n), big_gamma, n);
        let right = mul_mod(mul_mod(v % b, a, n), small_gamma, n);
        Ok((left + right) % n)
    }
}

impl Field {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus_poly(&self) -> &[u64] {
        &self.modulus
    }

    pub fn coeffs(&self, x: u64) -> Vec<u64> {
        let mut t = x;
        (0..self.m)
            .map(|_| {
                let c = t % self.p;
                t /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    fn monomial(&self, k: u32) -> u64 {
        // X^k for k < m is just the k-th basis vector.
        self.p.pow(k)
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.m {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    fn neg(&self, a: u64) -> u64 {
        if self.m == 1 {
            return (self.p - a) % self.p;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.m {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        if self.m == 1 {
            return mul_mod(a, b, p);
        }
        let m = self.m as usize;
        let mut ca = [0u64; 32];
        let mut cb = [0u64; 32];
        let (mut ta, mut tb) = (a, b);
        for i in 0..m {
            ca[i] = ta % p;
            cb[i] = tb % p;
            ta /= p;
            tb /= p;
        }
        let mut prod = [0u64; 64];
        for i in 0..m {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + mul_mod(ca[i], cb[j], p)) % p;
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            // X^d = X^{d-m} * (X^m) and X^m = -(modulus lower part).
            for (i, &mc) in self.modulus[..m].iter().enumerate() {
                let k = d - m + i;
                prod[k] = (prod[k] + p - mul_mod(c, mc, p)) % p;
            }
            prod[d] = 0;
        }
        prod[..m].iter().rev().fold(0, |acc, &d| acc * p + d)
    }

    fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q.max(2);
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.q - 2))
        }
    }

    /// `x + x^p + .. + x^{p^{m-1}}`, evaluated by repeated Frobenius.
    fn trace_by_powers(&self, x: u64) -> u64 {
        let mut acc = 0;
        let mut y = x;
        for _ in 0..self.m {
            acc = self.add(acc, y);
            y = self.pow(y, self.p);
        }
        assert!(acc < self.p, "trace left the prime subfield");
        acc
    }

    #[inline]
    pub fn trace(&self, x: u64) -> u64 {
        if self.m == 1 {
            return x;
        }
        let mut t = x;
        let mut acc = 0;
        for &tb in &self.trace_basis {
            acc += (t % self.p) * tb;
            t /= self.p;
        }
        acc % self.p
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum GroupWire {
    Cyclic {
        #[serde(rename = "N")]
        n: u64,
    },
    Field {
        p: u64,
        m: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        poly: Option<Vec<u64>>,
    },
}

impl TryFrom<GroupWire> for GroupSpec {
    type Error = Error;

    fn try_from(w: GroupWire) -> Result<Self> {
        match w {
            GroupWire::Cyclic { n } => GroupSpec::cyclic(n),
            GroupWire::Field { p, m, poly: None } => GroupSpec::field(p, m),
            GroupWire::Field { p, m, poly: Some(poly) } => GroupSpec::field_with_modulus(p, m, poly),
        }
    }
}

impl From<GroupSpec> for GroupWire {
    fn from(g: GroupSpec) -> Self {
        match g {
            GroupSpec::Cyclic(c) => GroupWire::Cyclic { n: c.n },
            GroupSpec::Field(f) => GroupWire::Field { p: f.p, m: f.m, poly: Some(f.modulus) },
        }
    }
}

impl GroupSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("group specs always serialize")
    }

    /// Short textual form: `Z/15`, `F_9`, or a JSON object. Used by CLI flags.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Self::from_json(s);
        }
        let bad = || Error::Parse(format!("unrecognized group '{s}' (try Z/15, F_7, F_3^2)"));
        if let Some(rest) = s.strip_prefix("Z/") {
            return GroupSpec::cyclic(rest.parse().map_err(|_| bad())?);
        }
        if let Some(rest) = s.strip_prefix("F_") {
            let (p, m) = match rest.split_once('^') {
                Some((p, m)) => (p.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?),
                None => {
                    let q: u64 = rest.parse().map_err(|_| bad())?;
                    let fac = arith::factorize(q);
                    if fac.len() != 1 {
                        return Err(bad());
                    }
                    fac[0]
                }
            };
            return GroupSpec::field(p, m);
        }
        Err(bad())
    }
}

impl std::fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupSpec::Cyclic(c) => write!(f, "Z/{}", c.n),
            GroupSpec::Field(fl) if fl.m == 1 => write!(f, "F_{}", fl.p),
            GroupSpec::Field(fl) => write!(f, "F_{}^{}", fl.p, fl.m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_factorizations() {
        let g = GroupSpec::cyclic(15).unwrap();
        assert_eq!(g.factorization(), vec![(3, 1), (5, 1)]);
        assert_eq!(GroupSpec::cyclic(49).unwrap().factorization(), vec![(7, 2)]);
        assert!(matches!(GroupSpec::cyclic(1), Err(Error::ModulusOutOfRange(1))));
        assert!(GroupSpec::cyclic((1 << 31) + 1).is_err());
    }

    #[test]
    fn least_irreducible_moduli() {
        let f = GroupSpec::field(2, 3).unwrap();
        assert_eq!(f.as_field().unwrap().modulus_poly(), &[1, 1, 0, 1]);
        let f = GroupSpec::field(3, 2).unwrap();
        assert_eq!(f.as_field().unwrap().modulus_poly(), &[1, 0, 1]);
        let f = GroupSpec::field(7, 1).unwrap();
        assert_eq!(f.as_field().unwrap().modulus_poly(), &[0, 1]);
        assert!(matches!(GroupSpec::field(9, 2), Err(Error::NotPrime(9))));
    }

    #[test]
    fn traces_in_f9() {
        let g = GroupSpec::field(3, 2).unwrap();
        let f = g.as_field().unwrap();
        let x = f.from_coeffs(&[0, 1]);
        assert_eq!(g.trace(x).unwrap(), 0);
        assert_eq!(g.trace(1).unwrap(), 2);
        let g7 = GroupSpec::field(7, 1).unwrap();
        assert_eq!(g7.trace(3).unwrap(), 3);
        assert!(GroupSpec::cyclic(7).unwrap().trace(1).is_err());
    }

    #[test]
    fn unit_counts() {
        assert_eq!(GroupSpec::cyclic(15).unwrap().units().len(), 8);
        assert_eq!(GroupSpec::field(3, 2).unwrap().units().len(), 8);
        assert_eq!(GroupSpec::cyclic(49).unwrap().units().len(), 42);
    }

    #[test]
    fn proper_subgroups() {
        assert_eq!(GroupSpec::cyclic(7).unwrap().largest_proper_subgroup_size(), 1);
        assert_eq!(GroupSpec::cyclic(15).unwrap().largest_proper_subgroup_size(), 5);
        assert_eq!(GroupSpec::field(3, 2).unwrap().largest_proper_subgroup_size(), 3);
    }

    #[test]
    fn crt_examples() {
        let g = GroupSpec::cyclic(15).unwrap();
        let c = g.as_cyclic().unwrap();
        assert_eq!(c.crt_split(7, 3).unwrap(), (1, 2));
        assert_eq!(c.crt_split(0, 3).unwrap(), (0, 0));
        assert_eq!(c.crt_join(2, 3, 3).unwrap(), 8);
        assert!(matches!(c.crt_split(1, 9), Err(Error::NotExactDivisor(9))));
        let g = GroupSpec::cyclic(45).unwrap();
        assert!(g.as_cyclic().unwrap().crt_split(1, 3).is_err());
    }

    #[test]
    fn json_shapes() {
        let g = GroupSpec::from_json(r#"{"kind":"cyclic","N":15}"#).unwrap();
        assert_eq!(g, GroupSpec::cyclic(15).unwrap());
        let f = GroupSpec::from_json(r#"{"kind":"field","p":2,"m":3}"#).unwrap();
        assert_eq!(f.to_json(), r#"{"kind":"field","p":2,"m":3,"poly":[1,1,0,1]}"#);
        assert!(GroupSpec::from_json(r#"{"kind":"field","p":2,"m":3,"poly":[1,0,0,1]}"#).is_err());
        assert_eq!(GroupSpec::parse("F_9").unwrap(), GroupSpec::field(3, 2).unwrap());
        assert_eq!(GroupSpec::parse("F_3^2").unwrap().to_string(), "F_3^2");
    }

    #[test]
    fn roughness() {
        let prof = RoughnessProfile { omega: 2, min_prime: 11 };
        assert!(prof.satisfied_by(&GroupSpec::cyclic(101 * 103).unwrap()));
        assert!(!prof.satisfied_by(&GroupSpec::cyclic(15).unwrap()));
        assert!(!prof.satisfied_by(&GroupSpec::cyclic(11 * 13 * 17).unwrap()));
    }
}
