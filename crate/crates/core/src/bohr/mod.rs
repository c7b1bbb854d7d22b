//! Inhomogeneous Bohr sets, arc partitions, cells and wrappers.
//!
//! Membership is always decided on exact integers: the phase of `x` under a
//! character is `k / D` with `D = N` (cyclic) or `D = p` (field), and each
//! interval is turned into an integer window over `k` once.
//!
//! Cell coordinates are 1-based, `v in [r]^d = {1..r}^d`.

pub mod arc;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::spectral::{dft_weighted, norm_q, WeightedFunction};

pub use arc::{rat, Arc, ArcPartition, PhaseWindow, Rat, RatWire};

/// A list of constraints `gamma_j(x) in I_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BohrWire", into = "BohrWire")]
pub struct BohrSpec {
    group: GroupSpec,
    constraints: Vec<(u64, Arc)>,
}

impl BohrSpec {
    pub fn new(group: &GroupSpec, constraints: Vec<(u64, Arc)>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::Parameter("a Bohr set needs at least one constraint".into()));
        }
        for (label, _) in &constraints {
            group.check(*label)?;
        }
        Ok(BohrSpec { group: group.clone(), constraints })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[(u64, Arc)] {
        &self.constraints
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: BohrWire = serde_json::from_str(s)?;
        w.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct BohrWire {
    group: GroupSpec,
    chars: Vec<u64>,
    /// `[[a_num, a_den], [b_num, b_den]]` for `[a, b)`.
    intervals: Vec<[RatWire; 2]>,
}

impl TryFrom<BohrWire> for BohrSpec {
    type Error = Error;
    fn try_from(w: BohrWire) -> Result<Self> {
        if w.chars.len() != w.intervals.len() {
            return Err(Error::Parse("chars and intervals differ in length".into()));
        }
        let constraints = w
            .chars
            .into_iter()
            .zip(w.intervals)
            .map(|(c, [a, b])| Ok((c, Arc::new(a.try_into()?, b.try_into()?)?)))
            .collect::<Result<Vec<_>>>()?;
        BohrSpec::new(&w.group, constraints)
    }
}

impl From<BohrSpec> for BohrWire {
    fn from(b: BohrSpec) -> Self {
        BohrWire {
            group: b.group,
            chars: b.constraints.iter().map(|c| c.0).collect(),
            intervals: b.constraints.iter().map(|(_, a)| [a.start().into(), a.end().into()]).collect(),
        }
    }
}

/// 0/1 indicator of the Bohr set.
pub fn bohr_members(b: &BohrSpec) -> WeightedFunction {
    let g = &b.group;
    let den = g.phase_denominator();
    let windows: Vec<(u64, PhaseWindow)> = b.constraints.iter().map(|(l, a)| (*l, a.window(den))).collect();
    let counts = (0..g.order()).map(|x| windows.iter().all(|(l, w)| w.contains(g.phase(*l, x).0)) as u64).collect();
    WeightedFunction::new(g, counts).expect("length matches")
}

/// A union of cells `B_v`, `v in X`, over characters `gamma_1..gamma_d` and an
/// arc partition, translated by `shift`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WrapperWire", into = "WrapperWire")]
pub struct WrapperSpec {
    group: GroupSpec,
    characters: Vec<u64>,
    partition: ArcPartition,
    cells: BTreeSet<Vec<u64>>,
    shift: u64,
}

impl WrapperSpec {
    pub fn new(
        group: &GroupSpec,
        characters: Vec<u64>,
        partition: ArcPartition,
        cells: BTreeSet<Vec<u64>>,
    ) -> Result<Self> {
        if characters.is_empty() {
            return Err(Error::Parameter("a wrapper needs at least one character".into()));
        }
        let mut seen = BTreeSet::new();
        for &c in &characters {
            group.check(c)?;
            if !seen.insert(c) {
                return Err(Error::Parameter(format!("character {c} repeated")));
            }
        }
        let r = partition.len();
        for v in &cells {
            if v.len() != characters.len() || v.iter().any(|&j| j == 0 || j > r) {
                return Err(Error::Parameter(format!("cell {v:?} outside [{r}]^{}", characters.len())));
            }
        }
        Ok(WrapperSpec { group: group.clone(), characters, partition, cells, shift: 0 })
    }

    /// The wrapper `W + t`.
    pub fn translated(&self, t: u64) -> Self {
        let mut w = self.clone();
        w.shift = self.group.add(self.shift, t);
        w
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn characters(&self) -> &[u64] {
        &self.characters
    }

    pub fn partition(&self) -> &ArcPartition {
        &self.partition
    }

    pub fn cells(&self) -> &BTreeSet<Vec<u64>> {
        &self.cells
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: WrapperWire = serde_json::from_str(s)?;
        w.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct WrapperWire {
    group: GroupSpec,
    chars: Vec<u64>,
    /// Uniform grid `[0, tau), [tau, 2 tau), ..`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<RatWire>,
    /// Explicit cut points, first arc starting at `arcs[0]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arcs: Option<Vec<RatWire>>,
    cells: Vec<Vec<u64>>,
    #[serde(default)]
    shift: u64,
}

impl TryFrom<WrapperWire> for WrapperSpec {
    type Error = Error;
    fn try_from(w: WrapperWire) -> Result<Self> {
        let partition = match (w.tau, w.arcs) {
            (Some(t), None) => ArcPartition::uniform(t.try_into()?)?,
            (None, Some(cuts)) => ArcPartition::from_cuts(cuts.into_iter().map(Rat::try_from).collect::<Result<_>>()?)?,
            _ => return Err(Error::Parse("exactly one of 'tau' and 'arcs' is required".into())),
        };
        let n = w.cells.len();
        let cells: BTreeSet<Vec<u64>> = w.cells.into_iter().collect();
        if cells.len() != n {
            return Err(Error::Parse("duplicate cells".into()));
        }
        let spec = WrapperSpec::new(&w.group, w.chars, partition, cells)?;
        w.group.check(w.shift)?;
        Ok(spec.translated(w.shift))
    }
}

impl From<WrapperSpec> for WrapperWire {
    fn from(w: WrapperSpec) -> Self {
        let (tau, arcs) = match w.partition.cuts_vec() {
            None => (Some(w.partition.tau().into()), None),
            Some(c) => (None, Some(c.iter().map(|&r| r.into()).collect())),
        };
        WrapperWire {
            group: w.group,
            chars: w.characters,
            tau,
            arcs,
            cells: w.cells.into_iter().collect(),
            shift: w.shift,
        }
    }
}

/// The cell `v` (1-based) of the untranslated partition holding `x`.
pub fn cell_of(x: u64, w: &WrapperSpec) -> Vec<u64> {
    cell_in(&w.group, &w.characters, &w.partition, x)
}

pub(crate) fn cell_in(g: &GroupSpec, chars: &[u64], partition: &ArcPartition, x: u64) -> Vec<u64> {
    let den = g.phase_denominator();
    chars.iter().map(|&c| partition.index_of(g.phase(c, x).0, den) + 1).collect()
}

/// Indicator of `W = shift + union_{v in X} B_v`.
pub fn wrapper_members(w: &WrapperSpec) -> WeightedFunction {
    let g = &w.group;
    let counts = (0..g.order()).map(|x| w.cells.contains(&cell_of(g.sub(x, w.shift), w)) as u64).collect();
    WeightedFunction::new(g, counts).expect("length matches")
}

/// Sizes `|B_v|` of every nonempty cell, by one scan over `G`.
pub fn occupied_cells(g: &GroupSpec, chars: &[u64], partition: &ArcPartition) -> BTreeMap<Vec<u64>, u64> {
    let mut out = BTreeMap::new();
    for x in 0..g.order() {
        *out.entry(cell_in(g, chars, partition, x)).or_insert(0) += 1;
    }
    out
}

/// `||1_S^||_1` with the normalized dual norm.
pub fn fourier_l1(set: &WeightedFunction) -> f64 {
    norm_q(&dft_weighted(set), 1.0).expect("exponent 1 is valid")
}

/// The slice `{u in Z/p1^m1 : crt_join(u, v) in B}` as a Bohr set of the
/// same rank over `Z/p1^m1`.
pub fn slice_bohr(b: &BohrSpec, p1_power: u64, v: u64) -> Result<BohrSpec> {
    let c = b.group.as_cyclic()?;
    let (big_gamma, small_gamma) = c.crt_coefficients(p1_power)?;
    let n_rest = c.modulus() / p1_power;
    if v >= n_rest {
        return Err(Error::ElementOutOfRange { elem: v, order: n_rest });
    }
    let sub = GroupSpec::cyclic(p1_power)?;
    let constraints = b
        .constraints
        .iter()
        .map(|(beta, arc)| {
            let label = crate::arith::mul_mod(*beta % p1_power, big_gamma % p1_power, p1_power);
            let off =
                crate::arith::mul_mod(crate::arith::mul_mod(*beta % n_rest, v, n_rest), small_gamma % n_rest, n_rest);
            (label, arc.shifted_back(rat(off as i128, n_rest as i128)))
        })
        .collect();
    BohrSpec::new(&sub, constraints)
}

/// Indicator of `c S` with multiplicities carried over.
pub fn dilate(set: &WeightedFunction, c: u64) -> Result<WeightedFunction> {
    let g = set.group();
    g.check(c)?;
    if !g.is_unit(c) {
        return Err(Error::NotUnit(c));
    }
    let mut out = vec![0u64; g.size()];
    for (x, &m) in set.counts().iter().enumerate() {
        out[g.mul(c, x as u64) as usize] += m;
    }
    WeightedFunction::new(g, out)
}

/// Rank-one Bohr set in `Z/p^m` written as `Q + H` with `H = <p^(m-l)>` the
/// subgroup of order `p^l` and `Q` an arithmetic progression in
/// `[0, p^(m-l))`, where `p^l` exactly divides the frequency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgressionDecomposition {
    pub start: u64,
    pub step: u64,
    pub length: u64,
    /// `p^(m-l)`; `Q` lives below it and `H` is generated by it.
    pub period: u64,
    pub subgroup_order: u64,
}

impl ProgressionDecomposition {
    pub fn members(&self, g: &GroupSpec) -> WeightedFunction {
        let mut out = vec![0u64; g.size()];
        for t in 0..self.length {
            let q = (self.start + t * self.step) % self.period;
            for h in 0..self.subgroup_order {
                out[(q + h * self.period) as usize] = 1;
            }
        }
        WeightedFunction::new(g, out).expect("length matches")
    }
}

pub fn progression_decomposition(b: &BohrSpec) -> Result<ProgressionDecomposition> {
    let c = b.group.as_cyclic()?;
    let fac = c.factorization();
    if fac.len() != 1 || b.rank() != 1 {
        return Err(Error::Hypothesis("needs a rank-one Bohr set over a prime power".into()));
    }
    let p = fac[0].0;
    let n = c.modulus();
    let (beta, arc) = &b.constraints[0];
    let mut period = n;
    let mut unit = *beta;
    while unit != 0 && unit % p == 0 {
        unit /= p;
        period /= p;
    }
    if unit == 0 {
        // Every phase is 0: B is G or empty.
        let length = arc.contains(rat(0, 1)) as u64;
        return Ok(ProgressionDecomposition { start: 0, step: 1, length, period: 1, subgroup_order: n });
    }
    let (lo, count) = arc.window(period).range();
    let step = crate::arith::inv_mod(unit % period, period).unwrap_or(0) % period.max(1);
    let step = if period == 1 { 0 } else { step };
    Ok(ProgressionDecomposition {
        start: crate::arith::mul_mod(lo, step, period.max(1)),
        step,
        length: count,
        period,
        subgroup_order: n / period,
    })
}
