//! Constructive wrapping of dense sets by unions of Bohr cells.
//!
//! [`wrap_level_set`] covers a level set `{l1 <= f <= l2}` of a nonnegative
//! function by whole cells of a uniform arc partition, keeping the points of
//! those cells where `f` strays outside `[l1 - delta, l2 + delta]` as the
//! exceptional set `Z`. [`wrap_sets`] runs the full pipeline: large spectrum,
//! smoothing Bohr set, convolved densities, level-set wrappers and the
//! translation search.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bohr::arc::{approximate, floor_dyadic};
use crate::bohr::cell_in;
use crate::bohr::{occupied_cells, Arc, ArcPartition, Rat, WrapperSpec};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::spectral::{convolve, convolve_all, dft, dft_weighted, norm_q, ConvolutionMethod};
use crate::spectral::{DenseComplexFunction, Spectrum, WeightedFunction};

pub const DEFAULT_D_CAP: usize = 6;

/// Slack for float comparisons in the per-run inequality checks.
const CHECK_SLACK: f64 = 1e-9;

/// Bits kept when flooring `tau` to a dyadic rational.
const TAU_BITS: u32 = 40;

/// User-facing parameters; `None` fields take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrappingParams {
    pub epsilon: f64,
    /// Density floor: every `|A_i| >= delta |G|`.
    pub delta: f64,
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub cls_q: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub eta: Option<Vec<f64>>,
    #[serde(default)]
    pub tau: Option<Vec<f64>>,
    #[serde(default)]
    pub d: Option<Vec<usize>>,
    #[serde(default = "default_d_cap")]
    pub d_cap: usize,
}

fn default_d_cap() -> usize {
    DEFAULT_D_CAP
}

impl WrappingParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        WrappingParams {
            epsilon,
            delta,
            n: None,
            sigma: None,
            cls_q: None,
            alpha: None,
            eta: None,
            tau: None,
            d: None,
            d_cap: DEFAULT_D_CAP,
        }
    }

    pub fn resolve(&self, s: usize) -> Result<ResolvedParams> {
        let eps = self.epsilon;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Parameter(format!("epsilon = {eps} must lie in (0, 1]")));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Parameter(format!("delta = {} must lie in (0, 1]", self.delta)));
        }
        let n = self.n.unwrap_or_else(|| (eps.powi(-2) - 1e-9).ceil() as u64);
        let sigma = self.sigma.unwrap_or(eps);
        let cls_q = self.cls_q.unwrap_or_else(|| (10.0 / eps).ln());
        let alpha = self.alpha.unwrap_or_else(|| eps.powf(1.0 / (2.0 * s as f64)));
        if n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("sigma = {sigma} must be positive")));
        }
        if !(cls_q > 2.0 && cls_q.is_finite()) {
            return Err(Error::Parameter(format!("cls_q = {cls_q} must exceed 2")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha = {alpha} must be positive")));
        }
        if self.d_cap == 0 {
            return Err(Error::Parameter("d_cap must be at least 1".into()));
        }
        for (name, len) in [
            ("eta", self.eta.as_ref().map(Vec::len)),
            ("tau", self.tau.as_ref().map(Vec::len)),
            ("d", self.d.as_ref().map(Vec::len)),
        ] {
            if let Some(len) = len {
                if len != s {
                    return Err(Error::Parameter(format!("{name} override has {len} entries, need {s}")));
                }
            }
        }
        Ok(ResolvedParams { epsilon: eps, delta: self.delta, n, sigma, cls_q, alpha, d_cap: self.d_cap })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedParams {
    pub epsilon: f64,
    pub delta: f64,
    pub n: u64,
    pub sigma: f64,
    pub cls_q: f64,
    pub alpha: f64,
    pub d_cap: usize,
}

/// A level set `{l1 <= f <= l2}` to be wrapped at granularity `tau`.
#[derive(Clone, Debug)]
pub struct LevelSetSpec {
    pub f: DenseComplexFunction,
    pub ell1: f64,
    pub ell2: f64,
    pub tau: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSetWrap {
    pub wrapper: WrapperSpec,
    pub z: Vec<u64>,
    /// `20 ||f^||_1 tau`.
    pub delta: f64,
    pub fourier_l1: f64,
    pub occupied_cells: usize,
    /// `Delta(l1 + delta, l2 - delta) \ Z` lies in `V \ Z`.
    pub inner_inclusion: bool,
    /// `V \ Z` lies in `Delta(l1 - delta, l2 + delta)`.
    pub outer_inclusion: bool,
}

impl LevelSetWrap {
    pub fn cells(&self) -> &BTreeSet<Vec<u64>> {
        self.wrapper.cells()
    }
}

fn real_values(f: &DenseComplexFunction) -> Result<Vec<f64>> {
    f.values()
        .iter()
        .map(|v| {
            if v.im.abs() > 1e-9 || v.re < -1e-9 {
                Err(Error::Parameter(format!("f must be real and nonnegative, found {v}")))
            } else {
                Ok(v.re)
            }
        })
        .collect()
}

pub fn wrap_level_set(spec: &LevelSetSpec, characters: &[u64]) -> Result<LevelSetWrap> {
    let l1 = fourier_l1_of(&dft(&spec.f));
    wrap_with_norm(spec, characters, l1)
}

fn fourier_l1_of(s: &Spectrum) -> f64 {
    norm_q(s, 1.0).expect("exponent 1 is valid")
}

fn wrap_with_norm(spec: &LevelSetSpec, characters: &[u64], fourier_l1: f64) -> Result<LevelSetWrap> {
    let g = spec.f.group();
    if characters.is_empty() {
        return Err(Error::Parameter("wrap_level_set needs at least one character".into()));
    }
    if characters.contains(&0) {
        return Err(Error::Parameter("characters must be nontrivial".into()));
    }
    if !(spec.ell1 >= 0.0 && spec.ell1 < spec.ell2) {
        return Err(Error::Parameter(format!("need 0 <= l1 < l2, got {} and {}", spec.ell1, spec.ell2)));
    }
    let f = real_values(&spec.f)?;
    let partition = ArcPartition::uniform(spec.tau)?;
    let tau = spec.tau.to_f64().expect("small rational");
    let delta = 20.0 * fourier_l1 * tau;
    let (lo_in, hi_in) = (spec.ell1 + delta, spec.ell2 - delta);
    let (lo_out, hi_out) = (spec.ell1 - delta, spec.ell2 + delta);

    let cell: Vec<Vec<u64>> = (0..g.order()).map(|x| cell_in(g, characters, &partition, x)).collect();
    let mut cells = BTreeSet::new();
    for (x, v) in cell.iter().enumerate() {
        if f[x] >= lo_in && f[x] <= hi_in {
            cells.insert(v.clone());
        }
    }
    let z: Vec<u64> = (0..g.order())
        .filter(|&x| cells.contains(&cell[x as usize]) && !(f[x as usize] >= lo_out && f[x as usize] <= hi_out))
        .collect();
    let zset: BTreeSet<u64> = z.iter().copied().collect();
    let in_v = |x: usize| cells.contains(&cell[x]);
    let inner_inclusion =
        (0..f.len()).filter(|&x| f[x] >= lo_in && f[x] <= hi_in && !zset.contains(&(x as u64))).all(in_v);
    let outer_inclusion =
        (0..f.len()).filter(|&x| in_v(x) && !zset.contains(&(x as u64))).all(|x| f[x] >= lo_out && f[x] <= hi_out);
    let occupied = occupied_cells(g, characters, &partition).len();
    let wrapper = WrapperSpec::new(g, characters.to_vec(), partition, cells)?;
    Ok(LevelSetWrap { wrapper, z, delta, fourier_l1, occupied_cells: occupied, inner_inclusion, outer_inclusion })
}

/// `|B| >= sigma^|Gamma| |G|` for `B = {x : gamma(x) in [-sigma, sigma) for gamma in Gamma}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrSizeCheck {
    pub size: u64,
    pub lower_bound: f64,
    pub pass: bool,
}

fn sigma_arc(sigma: f64) -> Result<Arc> {
    Arc::centred(approximate(sigma, 1 << 30)?)
}

/// Members of the smoothing Bohr set; `G` itself when `gamma` is empty.
pub fn smoothing_bohr_set(g: &GroupSpec, gamma: &[u64], sigma: f64) -> Result<WeightedFunction> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::Parameter(format!("sigma = {sigma} must be positive")));
    }
    let window = sigma_arc(sigma)?.window(g.phase_denominator());
    let counts = (0..g.order()).map(|x| gamma.iter().all(|&c| window.contains(g.phase(c, x).0)) as u64).collect();
    WeightedFunction::new(g, counts)
}

pub fn bohr_size_bound_check(g: &GroupSpec, gamma: &[u64], sigma: f64) -> Result<BohrSizeCheck> {
    for &c in gamma {
        g.check(c)?;
    }
    let size = smoothing_bohr_set(g, gamma, sigma)?.mass();
    let lower_bound = sigma.powi(gamma.len() as i32) * g.order() as f64;
    Ok(BohrSizeCheck { size, lower_bound, pass: size as f64 >= lower_bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct SetDiagnostics {
    pub size: u64,
    pub eta: f64,
    pub tau: f64,
    /// `tau` after flooring to a dyadic rational.
    pub tau_used: [i128; 2],
    pub d: usize,
    pub characters: Vec<u64>,
    pub fourier_l1: f64,
    pub l1four_bound: f64,
    pub l1four_pass: bool,
    /// `20 ||f^||_1 tau` against `eta / 2`.
    pub magma_lhs: f64,
    pub magma_rhs: f64,
    pub magma_pass: bool,
    pub mass: f64,
    pub mass_pass: bool,
    pub ell1: f64,
    pub ell2: f64,
    pub level_delta: f64,
    pub occupied_cells: usize,
    pub wrapper_cells: usize,
    pub wrapper_size: u64,
    pub y_size: u64,
    pub z_size: u64,
    pub y_ratio: f64,
    pub z_ratio: f64,
    pub y_reference: f64,
    pub z_reference: f64,
    pub inner_inclusion: bool,
    pub outer_inclusion: bool,
    pub containment: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WrappedSet {
    pub wrapper: WrapperSpec,
    pub translation: u64,
    pub y: Vec<u64>,
    pub z: Vec<u64>,
    pub diagnostics: SetDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
pub struct WrapResult {
    pub group: GroupSpec,
    pub params: ResolvedParams,
    pub a: u64,
    pub gamma: Vec<u64>,
    pub bohr_size: u64,
    pub bohr_check: BohrSizeCheck,
    pub sets: Vec<WrappedSet>,
    /// `a - b_1 - .. - b_s`.
    pub target: u64,
    /// `#{w in W_1 x .. x W_s : w_1 + .. + w_s = target}`.
    pub truncated_count: u64,
    /// `delta^-s eps^(1/2) |G|^(s-1)`.
    pub truncated_ceiling: f64,
    /// `#{x in A_1 x .. x A_s : x_1 + .. + x_s = a}`.
    pub solutions: u64,
}

impl WrapResult {
    /// Every hard check: containment, sandwich inclusions and the per-run
    /// inequalities.
    pub fn hard_pass(&self) -> bool {
        self.sets.iter().all(|s| {
            let d = &s.diagnostics;
            d.containment && d.inner_inclusion && d.outer_inclusion && d.l1four_pass && d.magma_pass && d.mass_pass
        })
    }
}

/// Top `d` nontrivial labels by `|f^|`, ties to the smaller label.
fn top_characters(s: &Spectrum, d: usize) -> Vec<u64> {
    let mut labels: Vec<(i64, u64)> =
        s.values().iter().enumerate().skip(1).map(|(i, v)| (-((v.norm() * 1e6).round() as i64), i as u64)).collect();
    labels.sort_unstable();
    labels.into_iter().take(d).map(|(_, l)| l).collect()
}

pub fn wrap_sets(sets: &[WeightedFunction], params: &WrappingParams, a: u64) -> Result<WrapResult> {
    let s = sets.len();
    if s < 3 {
        return Err(Error::Parameter(format!("need at least three sets, got {s}")));
    }
    let g = sets[0].group().clone();
    for set in sets {
        if set.group() != &g {
            return Err(Error::GroupMismatch);
        }
        if !set.is_indicator() {
            return Err(Error::Parameter("wrap_sets takes indicator sets".into()));
        }
    }
    g.check(a)?;
    let p = params.resolve(s)?;
    let order = g.order() as f64;
    for (i, set) in sets.iter().enumerate() {
        let size = set.mass();
        if size == 0 {
            return Err(Error::Parameter(format!("A_{} is empty", i + 1)));
        }
        if (size as f64) < p.delta * order {
            return Err(Error::Hypothesis(format!("|A_{}| = {size} is below delta |G| = {}", i + 1, p.delta * order)));
        }
    }

    // Work with A_1 - a so that the target is 0.
    let mut work: Vec<WeightedFunction> = sets.to_vec();
    work[0] = sets[0].translate(g.neg(a));

    let threshold = order / (p.n as f64).sqrt();
    let gamma: Vec<u64> =
        crate::spectral::large_labels(&dft_weighted(&work[0]), threshold).into_iter().filter(|&l| l != 0).collect();
    let bohr = smoothing_bohr_set(&g, &gamma, p.sigma)?;
    let bohr_check = bohr_size_bound_check(&g, &gamma, p.sigma)?;
    let b_size = bohr.mass();
    let b_elems = bohr.support();

    let mut out = Vec::with_capacity(s);
    for (i, set) in work.iter().enumerate() {
        let size = set.mass() as f64;
        let conv = convolve(set, &bohr)?;
        let f: Vec<f64> = conv.counts().iter().map(|&c| c as f64 / b_size as f64).collect();
        let mass: f64 = f.iter().sum();
        let f_fun = DenseComplexFunction::from_real(&g, &f)?;
        let spectrum = dft(&f_fun);
        let fl1 = fourier_l1_of(&spectrum);
        let l1four_bound = (size / b_size as f64).sqrt();

        let eta = match &params.eta {
            Some(v) => v[i],
            None => p.alpha * size / (20.0 * order),
        };
        let tau = match &params.tau {
            Some(v) => v[i],
            None => p.alpha * (size * b_size as f64).sqrt() / (800.0 * order),
        };
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Parameter(format!("eta_{} = {eta} outside (0, 1); shrink epsilon", i + 1)));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::Parameter(format!("tau_{} = {tau} outside (0, 1); shrink epsilon", i + 1)));
        }
        let tau_rat = floor_dyadic(tau, TAU_BITS)?;
        if tau_rat <= Rat::from_integer(0) {
            return Err(Error::Parameter(format!("tau_{} = {tau} is too small", i + 1)));
        }
        let tau_used = tau_rat.to_f64().expect("small rational");
        let d = match &params.d {
            Some(v) => v[i],
            None => ((p.cls_q / (tau * tau)).ceil() as usize).min(p.d_cap),
        }
        .clamp(1, g.size() - 1);
        let characters = top_characters(&spectrum, d);

        let magma_lhs = 20.0 * fl1 * tau_used;
        let level = LevelSetSpec { f: f_fun, ell1: eta, ell2: 1.0 + 2.0 * magma_lhs, tau: tau_rat };
        let wrap = wrap_with_norm(&level, &characters, fl1)?;

        // b_i minimizes |{a in A_i : f_i(a + b) < eta + delta}| over b in B.
        let members = set.support();
        let cut = eta + wrap.delta;
        let bad_count = |b: u64| members.iter().filter(|&&x| f[g.add(x, b) as usize] < cut).count();
        let (b_i, _) = b_elems.iter().map(|&b| (b, bad_count(b))).min_by_key(|&(b, c)| (c, b)).expect("B contains 0");

        let undo = if i == 0 { a } else { 0 };
        let shift = g.add(g.neg(b_i), undo);
        let wrapper = wrap.wrapper.translated(shift);
        let mut y: BTreeSet<u64> =
            members.iter().filter(|&&x| f[g.add(x, b_i) as usize] < cut).map(|&x| g.add(x, undo)).collect();
        y.extend(wrap.z.iter().map(|&z| g.add(z, shift)));
        let z_out: Vec<u64> = wrap.z.iter().map(|&z| g.add(z, shift)).collect();

        let w_members = crate::bohr::wrapper_members(&wrapper);
        let containment = sets[i].support().iter().all(|x| y.contains(x) || w_members.get(*x) == 1);

        let diagnostics = SetDiagnostics {
            size: set.mass(),
            eta,
            tau,
            tau_used: [*tau_rat.numer(), *tau_rat.denom()],
            d,
            characters: characters.clone(),
            fourier_l1: fl1,
            l1four_bound,
            l1four_pass: fl1 <= l1four_bound * (1.0 + CHECK_SLACK),
            magma_lhs,
            magma_rhs: eta / 2.0,
            magma_pass: magma_lhs <= eta / 2.0 * (1.0 + CHECK_SLACK),
            mass,
            mass_pass: (mass - size).abs() <= 1e-6,
            ell1: level.ell1,
            ell2: level.ell2,
            level_delta: wrap.delta,
            occupied_cells: wrap.occupied_cells,
            wrapper_cells: wrapper.cells().len(),
            wrapper_size: w_members.mass(),
            y_size: y.len() as u64,
            z_size: z_out.len() as u64,
            y_ratio: y.len() as f64 / order,
            z_ratio: z_out.len() as f64 / order,
            y_reference: p.epsilon.powf(1.0 / (2.0 * s as f64)),
            z_reference: (-p.cls_q).exp(),
            inner_inclusion: wrap.inner_inclusion,
            outer_inclusion: wrap.outer_inclusion,
            containment,
        };
        out.push(WrappedSet { wrapper, translation: b_i, y: y.into_iter().collect(), z: z_out, diagnostics });
    }

    let sum_b = out.iter().fold(0, |acc, w| g.add(acc, w.translation));
    let target = g.sub(a, sum_b);
    let wrappers: Vec<WeightedFunction> = out.iter().map(|w| crate::bohr::wrapper_members(&w.wrapper)).collect();
    let truncated_count = convolve_all(&wrappers, ConvolutionMethod::Auto)?.get(target);
    let solutions = convolve_all(sets, ConvolutionMethod::Auto)?.get(a);
    let truncated_ceiling = p.delta.powi(-(s as i32)) * p.epsilon.sqrt() * order.powi(s as i32 - 1);
    Ok(WrapResult {
        group: g,
        params: p,
        a,
        gamma,
        bohr_size: b_size,
        bohr_check,
        sets: out,
        target,
        truncated_count,
        truncated_ceiling,
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::rat;

    fn z(n: u64) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    #[test]
    fn bohr_size_examples() {
        let g = z(101);
        let c = bohr_size_bound_check(&g, &[], 0.1).unwrap();
        assert_eq!((c.size, c.lower_bound, c.pass), (101, 101.0, true));
        let c = bohr_size_bound_check(&g, &[1], 0.1).unwrap();
        assert_eq!(c.size, 21);
        assert!(c.pass && (c.lower_bound - 10.1).abs() < 1e-9);
        assert!(bohr_size_bound_check(&g, &[1, 2], 0.1).unwrap().pass);
    }

    #[test]
    fn constant_level_sets() {
        let g = z(31);
        let one = DenseComplexFunction::from_real(&g, &[1.0; 31]).unwrap();
        let spec = LevelSetSpec { f: one, ell1: 0.5, ell2: 1.5, tau: rat(1, 100) };
        let w = wrap_level_set(&spec, &[1]).unwrap();
        assert!((w.delta - 0.2).abs() < 1e-12);
        assert_eq!(w.cells().len(), w.occupied_cells);
        assert!(w.z.is_empty());
        assert_eq!(crate::bohr::wrapper_members(&w.wrapper).mass(), 31);

        let zero = DenseComplexFunction::from_real(&g, &[0.0; 31]).unwrap();
        let spec = LevelSetSpec { f: zero, ell1: 0.5, ell2: 1.5, tau: rat(1, 8) };
        let w = wrap_level_set(&spec, &[1, 2]).unwrap();
        assert!(w.cells().is_empty() && w.z.is_empty());
        assert!(w.delta < 0.5);
        assert!(wrap_level_set(&spec, &[]).is_err());
        assert!(wrap_level_set(&spec, &[0]).is_err());
    }

    #[test]
    fn smoothed_interval_sandwich() {
        let g = z(101);
        let interval = WeightedFunction::indicator(&g, 0..30).unwrap();
        let b = smoothing_bohr_set(&g, &[1], 0.05).unwrap();
        let conv = convolve(&interval, &b).unwrap();
        let f: Vec<f64> = conv.counts().iter().map(|&c| c as f64 / b.mass() as f64).collect();
        let fun = DenseComplexFunction::from_real(&g, &f).unwrap();
        let spec = LevelSetSpec { f: fun, ell1: 0.3, ell2: 0.9, tau: rat(1, 400) };
        let w = wrap_level_set(&spec, &[1]).unwrap();
        assert!(w.inner_inclusion && w.outer_inclusion);
        assert!(!w.cells().is_empty() && w.delta < 0.3);
        let members = crate::bohr::wrapper_members(&w.wrapper);
        let zs: BTreeSet<u64> = w.z.iter().copied().collect();
        for x in 0..101u64 {
            let fx = f[x as usize];
            if fx >= 0.3 + w.delta && fx <= 0.9 - w.delta && !zs.contains(&x) {
                assert_eq!(members.get(x), 1);
            }
            if members.get(x) == 1 && !zs.contains(&x) {
                assert!(fx >= 0.3 - w.delta && fx <= 0.9 + w.delta);
            }
        }
    }

    #[test]
    fn full_sets_give_trivial_wrappers() {
        let g = z(53);
        let full = WeightedFunction::full(&g);
        let r = wrap_sets(&[full.clone(), full.clone(), full], &WrappingParams::new(0.3, 0.5), 0).unwrap();
        assert!(r.gamma.is_empty());
        assert_eq!(r.bohr_size, 53);
        for s in &r.sets {
            assert_eq!(s.diagnostics.wrapper_size, 53);
            assert!(s.y.is_empty());
        }
        assert!(r.hard_pass());
    }

    #[test]
    fn parameter_guards() {
        let g = z(53);
        let full = WeightedFunction::full(&g);
        let sets = [full.clone(), full.clone(), full.clone()];
        let mut p = WrappingParams::new(0.3, 0.5);
        p.tau = Some(vec![1.5, 0.1, 0.1]);
        assert!(matches!(wrap_sets(&sets, &p, 0), Err(Error::Parameter(_))));
        assert!(wrap_sets(&sets[..2], &WrappingParams::new(0.3, 0.5), 0).is_err());
        let tiny = WeightedFunction::indicator(&g, [1]).unwrap();
        assert!(matches!(
            wrap_sets(&[tiny, full.clone(), full.clone()], &WrappingParams::new(0.3, 0.5), 0),
            Err(Error::Hypothesis(_))
        ));
        assert!(WrappingParams::new(0.0, 0.5).resolve(3).is_err());
    }

    #[test]
    fn default_params() {
        let p = WrappingParams::new(0.3, 0.5).resolve(3).unwrap();
        assert_eq!(p.n, 12);
        assert!((p.sigma - 0.3).abs() < 1e-15);
        assert!((p.cls_q - (10.0f64 / 0.3).ln()).abs() < 1e-12);
        assert!((p.alpha - 0.3f64.powf(1.0 / 6.0)).abs() < 1e-12);
        assert_eq!(WrappingParams::new(0.5, 0.5).resolve(3).unwrap().n, 4);
    }

    #[test]
    fn progressions_are_contained() {
        let g = z(211);
        let ap =
            |start: u64, step: u64| WeightedFunction::indicator(&g, (0..53).map(|t| (start + t * step) % 211)).unwrap();
        let sets = [ap(0, 1), ap(5, 3), ap(100, 7)];
        let r = wrap_sets(&sets, &WrappingParams::new(0.3, 0.2), 17).unwrap();
        assert!(r.hard_pass());
        for s in &r.sets {
            assert!(s.diagnostics.y_ratio.is_finite());
        }
    }
}
