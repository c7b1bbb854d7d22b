//! Solution counts for `sum_j sum_{n in I_j} c_n x_n^(i_j) = u` over subsets,
//! representation functions, popular Cauchy-Davenport and Kneser checks,
//! equidistribution of power maps and the extremal constructions.

use serde::{Deserialize, Serialize};

use crate::bohr::{bohr_members, fourier_l1, slice_bohr, BohrSpec};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::spectral::{convolve_all, ConvolutionMethod, WeightedFunction};

/// Largest `|A|^s` the brute-force counter will walk.
pub const BRUTE_FORCE_CAP: u64 = 1 << 28;

/// Default `M` in the `|H| <= |G| / M` hypothesis.
pub const DEFAULT_KNESER_M: u64 = 100;

/// The equation `sum_j sum_{n in I_j} c_n x_n^(i_j) = u`; the blocks `I_j`
/// are consecutive runs of `k_j` indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationSpec {
    group: GroupSpec,
    blocks: Vec<usize>,
    exponents: Vec<u64>,
    coefficients: Vec<u64>,
    target: u64,
}

/// JSON form. Coefficients may be negative integers, read as `-|c|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationWire {
    #[serde(default)]
    pub s: Option<usize>,
    pub blocks: Vec<usize>,
    pub exponents: Vec<u64>,
    pub coefficients: Vec<i64>,
    #[serde(default)]
    pub u: u64,
}

fn signed_label(g: &GroupSpec, c: i64) -> Result<u64> {
    let x = g.check(c.unsigned_abs())?;
    Ok(if c < 0 { g.neg(x) } else { x })
}

impl EquationSpec {
    pub fn new(
        group: &GroupSpec,
        blocks: Vec<usize>,
        exponents: Vec<u64>,
        coefficients: Vec<u64>,
        target: u64,
    ) -> Result<Self> {
        if blocks.is_empty() || blocks.len() != exponents.len() {
            return Err(Error::Parameter("need one exponent per nonempty block".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::Parameter("blocks must be nonempty".into()));
        }
        if exponents[0] == 0 || exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("exponents must be positive and strictly increasing".into()));
        }
        let s: usize = blocks.iter().sum();
        if s < 3 {
            return Err(Error::Parameter(format!("need at least three variables, got {s}")));
        }
        if coefficients.len() != s {
            return Err(Error::LengthMismatch { expected: s, got: coefficients.len() });
        }
        for &c in &coefficients {
            group.check(c)?;
            if !group.is_unit(c) {
                return Err(Error::NotUnit(c));
            }
        }
        group.check(target)?;
        Ok(EquationSpec { group: group.clone(), blocks, exponents, coefficients, target })
    }

    pub fn from_wire(group: &GroupSpec, w: EquationWire) -> Result<Self> {
        if let Some(s) = w.s {
            let total: usize = w.blocks.iter().sum();
            if s != total {
                return Err(Error::Parse(format!("s = {s} but blocks sum to {total}")));
            }
        }
        let coefficients = w.coefficients.iter().map(|&c| signed_label(group, c)).collect::<Result<_>>()?;
        Self::new(group, w.blocks, w.exponents, coefficients, group.check(w.u)?)
    }

    pub fn from_json(group: &GroupSpec, s: &str) -> Result<Self> {
        Self::from_wire(group, serde_json::from_str(s)?)
    }

    /// `x + y = z^2`, i.e. `x + y - z^2 = 0`.
    pub fn sum_equals_square(group: &GroupSpec) -> Result<Self> {
        Self::new(group, vec![2, 1], vec![1, 2], vec![1, 1, group.neg(1)], 0)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn s(&self) -> usize {
        self.coefficients.len()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn with_target(&self, u: u64) -> Result<Self> {
        let mut e = self.clone();
        e.target = self.group.check(u)?;
        Ok(e)
    }

    /// `(c_n, i_n)` per variable.
    pub fn terms(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.s());
        let mut n = 0;
        for (k, &i) in self.blocks.iter().zip(&self.exponents) {
            for _ in 0..*k {
                out.push((self.coefficients[n], i));
                n += 1;
            }
        }
        out
    }
}

/// `y -> #{a in A : c a^i = y}`, counting multiplicities of `A`.
pub fn pushforward(a: &WeightedFunction, c: u64, i: u64) -> Result<WeightedFunction> {
    let g = a.group();
    g.check(c)?;
    if !g.is_unit(c) {
        return Err(Error::NotUnit(c));
    }
    let mut out = vec![0u64; g.size()];
    for (x, &m) in a.counts().iter().enumerate() {
        if m != 0 {
            out[g.mul(c, g.pow(x as u64, i)) as usize] += m;
        }
    }
    WeightedFunction::new(g, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    /// Spectral convolution of pushforwards, direct fallback on a guard trip.
    #[default]
    Spectral,
    Brute,
}

impl std::str::FromStr for CountMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(CountMethod::Spectral),
            "brute" => Ok(CountMethod::Brute),
            _ => Err(Error::Parse(format!("unknown method '{s}'"))),
        }
    }
}

impl std::fmt::Display for CountMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CountMethod::Spectral => "spectral",
            CountMethod::Brute => "brute",
        })
    }
}

fn spectral_or_direct(fs: &[WeightedFunction]) -> Result<WeightedFunction> {
    match convolve_all(fs, ConvolutionMethod::Spectral) {
        Err(Error::IntegerGuard { .. }) => convolve_all(fs, ConvolutionMethod::Direct),
        other => other,
    }
}

/// `r(x) = (g_1 * .. * g_s)(x)` for every `x`.
pub fn representation_function(gs: &[WeightedFunction]) -> Result<WeightedFunction> {
    convolve_all(gs, ConvolutionMethod::Auto)
}

/// All targets at once: entry `u` is the count for right-hand side `u`.
pub fn solution_counts(a: &WeightedFunction, eq: &EquationSpec) -> Result<WeightedFunction> {
    if a.group() != &eq.group {
        return Err(Error::GroupMismatch);
    }
    let pushed = eq.terms().into_iter().map(|(c, i)| pushforward(a, c, i)).collect::<Result<Vec<_>>>()?;
    spectral_or_direct(&pushed)
}

pub fn count_solutions(a: &WeightedFunction, eq: &EquationSpec, method: CountMethod) -> Result<u64> {
    match method {
        CountMethod::Spectral => Ok(solution_counts(a, eq)?.get(eq.target)),
        CountMethod::Brute => brute_force_count(a, eq),
    }
}

/// Nested loops over `A^s`.
pub fn brute_force_count(a: &WeightedFunction, eq: &EquationSpec) -> Result<u64> {
    let g = &eq.group;
    if a.group() != g {
        return Err(Error::GroupMismatch);
    }
    let support = a.support();
    let s = eq.s();
    let work = (support.len() as u64).checked_pow(s as u32).unwrap_or(u64::MAX);
    if work > BRUTE_FORCE_CAP {
        return Err(Error::Parameter(format!("brute force over {work} tuples exceeds the cap")));
    }
    if support.is_empty() {
        return Ok(0);
    }
    let terms = eq.terms();
    // values[n][j] = c_n a_j^(i_n), weights[j] = multiplicity of a_j
    let values: Vec<Vec<u64>> =
        terms.iter().map(|&(c, i)| support.iter().map(|&x| g.mul(c, g.pow(x, i))).collect()).collect();
    let weights: Vec<u64> = support.iter().map(|&x| a.get(x)).collect();
    let mut idx = vec![0usize; s];
    let mut total = 0u64;
    loop {
        let mut sum = 0;
        let mut w = 1;
        for n in 0..s {
            sum = g.add(sum, values[n][idx[n]]);
            w *= weights[idx[n]];
        }
        if sum == eq.target {
            total += w;
        }
        let mut n = 0;
        loop {
            idx[n] += 1;
            if idx[n] < support.len() {
                break;
            }
            idx[n] = 0;
            n += 1;
            if n == s {
                return Ok(total);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PopularCd {
    pub lhs: u64,
    pub rhs: u64,
    pub pass: bool,
}

/// `sum_x min(t, r_{A+B}(x)) >= t min(|G|, |A| + |B| - t - |H|)`.
pub fn popular_cd_check(a: &WeightedFunction, b: &WeightedFunction, t: u64) -> Result<PopularCd> {
    if !a.is_indicator() || !b.is_indicator() {
        return Err(Error::Parameter("popular_cd_check takes indicator sets".into()));
    }
    let (na, nb) = (a.mass(), b.mass());
    if na == 0 || nb == 0 {
        return Err(Error::Parameter("sets must be nonempty".into()));
    }
    if t == 0 || t > na.min(nb) {
        return Err(Error::Parameter(format!("t = {t} outside [1, {}]", na.min(nb))));
    }
    let g = a.group();
    let r = representation_function(&[a.clone(), b.clone()])?;
    let lhs: u64 = r.counts().iter().map(|&c| c.min(t)).sum();
    let h = g.largest_proper_subgroup_size();
    let inner = (na + nb).saturating_sub(t + h);
    let rhs = t * g.order().min(inner);
    Ok(PopularCd { lhs, rhs, pass: lhs >= rhs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KneserReport {
    pub count: u64,
    pub ratio: f64,
    pub densities: Vec<f64>,
    pub kappa: f64,
    pub subgroup_size: u64,
    pub m: u64,
    pub density_hypothesis: bool,
    pub subgroup_hypothesis: bool,
    /// `Some(count > 0)` when both hypotheses hold.
    pub positive: Option<bool>,
}

impl KneserReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.density_hypothesis && self.subgroup_hypothesis
    }
}

/// `r(x)` for `A_1 + .. + A_s` with the density and subgroup hypotheses
/// `sum theta_i >= 1 + kappa`, `|H| <= |G| / M`.
pub fn popular_kneser_count(sets: &[WeightedFunction], x: u64, kappa: f64, m: u64) -> Result<KneserReport> {
    let first = sets.first().ok_or_else(|| Error::Parameter("no sets".into()))?;
    let g = first.group();
    g.check(x)?;
    if m == 0 {
        return Err(Error::Parameter("M must be positive".into()));
    }
    let order = g.order() as f64;
    let count = representation_function(sets)?.get(x);
    let densities: Vec<f64> = sets.iter().map(|s| s.mass() as f64 / order).collect();
    let h = g.largest_proper_subgroup_size();
    let density_hypothesis = densities.iter().sum::<f64>() >= 1.0 + kappa;
    let subgroup_hypothesis = h * m <= g.order();
    let ratio = count as f64 / order.powi(sets.len() as i32 - 1);
    let positive = (density_hypothesis && subgroup_hypothesis).then_some(count > 0);
    Ok(KneserReport {
        count,
        ratio,
        densities,
        kappa,
        subgroup_size: h,
        m,
        density_hypothesis,
        subgroup_hypothesis,
        positive,
    })
}

/// `lambda_j x^(i_j) in (0, p / (k_j r))` for every `j`, in `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalSpec {
    group: GroupSpec,
    lambdas: Vec<u64>,
    exponents: Vec<u64>,
    blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalWire {
    pub lambdas: Vec<i64>,
    pub exponents: Vec<u64>,
    pub blocks: Vec<usize>,
}

impl ExtremalSpec {
    pub fn new(group: &GroupSpec, lambdas: Vec<u64>, exponents: Vec<u64>, blocks: Vec<usize>) -> Result<Self> {
        let f = group.as_field()?;
        if f.degree() != 1 {
            return Err(Error::Hypothesis("the construction is stated for prime fields".into()));
        }
        if lambdas.len() != exponents.len() || lambdas.len() != blocks.len() || lambdas.is_empty() {
            return Err(Error::Parameter("lambdas, exponents and blocks must have equal nonzero length".into()));
        }
        for &l in &lambdas {
            if group.check(l)? == 0 {
                return Err(Error::Parameter("lambdas must be nonzero".into()));
            }
        }
        if blocks.contains(&0) {
            return Err(Error::Parameter("blocks must be nonempty".into()));
        }
        if exponents[0] == 0 || exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("exponents must be positive and strictly increasing".into()));
        }
        Ok(ExtremalSpec { group: group.clone(), lambdas, exponents, blocks })
    }

    pub fn from_json(group: &GroupSpec, s: &str) -> Result<Self> {
        let w: ExtremalWire = serde_json::from_str(s)?;
        let lambdas = w.lambdas.iter().map(|&c| signed_label(group, c)).collect::<Result<_>>()?;
        Self::new(group, lambdas, w.exponents, w.blocks)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// `prod_j 1 / (r k_j)`.
    pub fn expected_density(&self) -> f64 {
        let r = self.blocks.len() as f64;
        self.blocks.iter().map(|&k| 1.0 / (r * k as f64)).product()
    }

    /// The matching equation `sum_j lambda_j sum_{n in I_j} x_n^(i_j) = 0`.
    pub fn equation(&self) -> Result<EquationSpec> {
        let coefficients =
            self.blocks.iter().zip(&self.lambdas).flat_map(|(&k, &l)| std::iter::repeat_n(l, k)).collect();
        EquationSpec::new(&self.group, self.blocks.clone(), self.exponents.clone(), coefficients, 0)
    }
}

/// Members `x` with `1 <= lambda_j x^(i_j) < p / (k_j r)` for all `j`.
pub fn extremal_set(spec: &ExtremalSpec) -> WeightedFunction {
    let g = &spec.group;
    let p = g.order();
    let r = spec.blocks.len() as u64;
    let members = (0..p).filter(|&x| {
        spec.lambdas.iter().zip(&spec.exponents).zip(&spec.blocks).all(|((&l, &i), &k)| {
            let y = g.mul(l, g.pow(x, i));
            // y < p / (k r)  <=>  y k r < p
            y >= 1 && (y as u128) * (k as u128) * (r as u128) < p as u128
        })
    });
    WeightedFunction::indicator(g, members).expect("labels in range")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberCount {
    pub count: u64,
    pub main_term: f64,
    pub error: f64,
    /// `i_r sqrt(q) prod ||1_{X_j}^||_1` for fields.
    pub certified_bound: Option<f64>,
    pub pass: Option<bool>,
    /// `N sum_j log^(d r)(p_j^m_j) / p_j^(1/i_r)` for `Z/N`.
    pub shape: Option<f64>,
    pub shape_ratio: Option<f64>,
    /// All prime factors exceed `i_r` (always true for certified field rows).
    pub hypothesis: bool,
}

/// `#{x : c_j x^(i_j) in X_j for all j}` against `prod |X_j| / |G|^(r-1)`.
/// `rank` is the Bohr rank `d` used in the `Z/N` shape.
pub fn power_fiber_count(
    sets: &[WeightedFunction],
    exponents: &[u64],
    coefficients: &[u64],
    rank: u32,
) -> Result<FiberCount> {
    let first = sets.first().ok_or_else(|| Error::Parameter("no sets".into()))?;
    let g = first.group();
    if sets.len() != exponents.len() || sets.len() != coefficients.len() {
        return Err(Error::Parameter("sets, exponents and coefficients must have equal length".into()));
    }
    if sets.iter().any(|s| s.group() != g) {
        return Err(Error::GroupMismatch);
    }
    if exponents[0] == 0 || exponents.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("exponents must be positive and strictly increasing".into()));
    }
    for &c in coefficients {
        g.check(c)?;
        if !g.is_unit(c) {
            return Err(Error::NotUnit(c));
        }
    }
    let i_r = *exponents.last().expect("nonempty");
    let count = (0..g.order())
        .filter(|&x| sets.iter().zip(exponents).zip(coefficients).all(|((s, &i), &c)| s.get(g.mul(c, g.pow(x, i))) > 0))
        .count() as u64;
    let order = g.order() as f64;
    let r = sets.len() as i32;
    let main_term = sets.iter().map(|s| s.support_size() as f64).product::<f64>() / order.powi(r - 1);
    let error = (count as f64 - main_term).abs();
    let fac = g.factorization();
    let hypothesis = fac.iter().all(|&(p, _)| p > i_r);
    if g.is_field() {
        if !hypothesis {
            return Err(Error::Hypothesis(format!("need i_r < p, got i_r = {i_r}")));
        }
        let indicators: Vec<WeightedFunction> = sets
            .iter()
            .map(|s| WeightedFunction::new(g, s.counts().iter().map(|&c| (c > 0) as u64).collect()))
            .collect::<Result<_>>()?;
        let bound = i_r as f64 * order.sqrt() * indicators.iter().map(fourier_l1).product::<f64>();
        return Ok(FiberCount {
            count,
            main_term,
            error,
            certified_bound: Some(bound),
            pass: Some(error <= bound + 1e-6),
            shape: None,
            shape_ratio: None,
            hypothesis,
        });
    }
    let shape: f64 = order
        * fac
            .iter()
            .map(|&(p, m)| {
                let pm = (p as f64).powi(m as i32);
                pm.ln().powi((rank * r as u32) as i32) / (p as f64).powf(1.0 / i_r as f64)
            })
            .sum::<f64>();
    Ok(FiberCount {
        count,
        main_term,
        error,
        certified_bound: None,
        pass: None,
        shape: Some(shape),
        shape_ratio: Some(error / shape),
        hypothesis,
    })
}

/// The fiber count over `Z/N` for Bohr sets `X_j`, recomputed slice by slice
/// along `Z/N = Z/p1^m1 x Z/N'`: `x = join(u, v)` maps to
/// `c x^i = join(c_u u^i, c_v v^i)`, whose membership is a slice condition.
pub fn count_via_slices(bohrs: &[BohrSpec], exponents: &[u64], coefficients: &[u64], p1_power: u64) -> Result<u64> {
    let first = bohrs.first().ok_or_else(|| Error::Parameter("no Bohr sets".into()))?;
    let g = first.group();
    let c = g.as_cyclic()?;
    if bohrs.len() != exponents.len() || bohrs.len() != coefficients.len() {
        return Err(Error::Parameter("lengths differ".into()));
    }
    let rest = c.modulus() / p1_power;
    let gu = GroupSpec::cyclic(p1_power)?;
    let mut total = 0u64;
    for v in 0..rest {
        let slices = bohrs
            .iter()
            .zip(exponents)
            .zip(coefficients)
            .map(|((b, &i), &coef)| {
                let (cu, cv) = c.crt_split(coef, p1_power)?;
                let shifted_v = crate::arith::mul_mod(cv, crate::arith::pow_mod(v, i, rest.max(1)), rest.max(1));
                let members = bohr_members(&slice_bohr(b, p1_power, if rest == 1 { 0 } else { shifted_v })?);
                Ok((members, i, cu))
            })
            .collect::<Result<Vec<_>>>()?;
        total += (0..p1_power)
            .filter(|&u| slices.iter().all(|(m, i, cu)| m.get(gu.mul(*cu, gu.pow(u, *i))) > 0))
            .count() as u64;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub n: u64,
    pub k: u64,
    pub s: usize,
    pub size: u64,
    pub density: f64,
    /// Representations of each residue class mod 3 as `a_1^k + .. + a_s^k`.
    pub residue_counts: [u64; 3],
    pub unrepresentable: Vec<u64>,
}

pub fn congruence_obstruction_set(g: &GroupSpec, k: u64, s: usize) -> Result<(WeightedFunction, ObstructionReport)> {
    let n = g.as_cyclic()?.modulus();
    if n % 3 != 0 || (n / 3) % 3 == 0 {
        return Err(Error::Hypothesis(format!("need 3 | N and gcd(3, N/3) = 1, got N = {n}")));
    }
    if s == 0 {
        return Err(Error::Parameter("s must be positive".into()));
    }
    let a = crate::sets::obstruction_set(g, k)?;
    let pushed = pushforward(&a, 1, k)?;
    let reps = representation_function(&vec![pushed; s])?;
    let mut residue_counts = [0u64; 3];
    for (u, &c) in reps.counts().iter().enumerate() {
        residue_counts[u % 3] += c;
    }
    let unrepresentable = (0..3).filter(|&r| residue_counts[r as usize] == 0).collect();
    let size = a.mass();
    let report = ObstructionReport { n, k, s, size, density: size as f64 / n as f64, residue_counts, unrepresentable };
    Ok((a, report))
}
