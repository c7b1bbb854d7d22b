//! The six sweeps.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{
    CharsumBatch, DecaySurvey, EquidistSurvey, ExtremalGallery, ThresholdScan, WrapDemo, SPECTRAL_CAP,
};
use super::svg::Plot;
use super::{stream, Cell, Row, Sweep};
use crate::bohr::{
    bohr_members, dilate, fourier_l1, occupied_cells, rat, wrapper_members, Arc, ArcPartition, BohrSpec, WrapperSpec,
};
use crate::charsums::{certify, PolySpec};
use crate::counting::{
    brute_force_count, count_solutions, count_via_slices, extremal_set, popular_cd_check, popular_kneser_count,
    power_fiber_count, CountMethod, EquationSpec, ExtremalSpec, DEFAULT_KNESER_M,
};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::sets::{densecount_set, load_set, random_subset, rng, size_for_density};
use crate::spectral::WeightedFunction;
use crate::wrapping::wrap_sets;

/// Denominator for random arc endpoints.
const ARC_DEN: i128 = 1 << 20;

/// `size` labels built from the zero-solution set `D` of `F_p`: its first
/// `size` members when `size <= |D|`, otherwise `D` padded with the smallest
/// non-members. The flag reports whether the result is a subset of `D`.
pub fn structured_set(g: &GroupSpec, size: u64) -> Result<(WeightedFunction, bool)> {
    if size > g.order() {
        return Err(Error::Parameter(format!("size {size} exceeds |G| = {}", g.order())));
    }
    let d = densecount_set(g)?;
    let base = d.support();
    if size as usize <= base.len() {
        return Ok((WeightedFunction::indicator(g, base.into_iter().take(size as usize))?, true));
    }
    let extra = size as usize - base.len();
    let pad = (0..g.order()).filter(|&x| d.get(x) == 0).take(extra);
    Ok((WeightedFunction::indicator(g, base.iter().copied().chain(pad))?, false))
}

/// A dilate `c A` (`translate == false`) or translate `A + t` with `c, t`
/// drawn from `rng`; never the identity map.
pub fn variant_set(set: &WeightedFunction, translate: bool, rng: &mut ChaCha8Rng) -> Result<(WeightedFunction, u64)> {
    let g = set.group();
    if g.order() < 3 {
        return Err(Error::Parameter("variants need |G| >= 3".into()));
    }
    if translate {
        let t = rng.gen_range(1..g.order());
        Ok((set.translate(t), t))
    } else {
        let c = random_unit(g, rng, true);
        Ok((dilate(set, c)?, c))
    }
}

fn random_unit(g: &GroupSpec, rng: &mut ChaCha8Rng, avoid_one: bool) -> u64 {
    loop {
        let c = rng.gen_range(1..g.order());
        if g.is_unit(c) && !(avoid_one && c == 1) {
            return c;
        }
    }
}

fn random_labels(g: &GroupSpec, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    if d as u64 >= g.order() {
        return Err(Error::Parameter(format!("cannot pick {d} distinct nontrivial characters of {g}")));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(d);
    while out.len() < d {
        let c = rng.gen_range(1..g.order());
        if seen.insert(c) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Arc with start uniform on a `2^-20` grid and length in `[1/20, 1/2]`.
fn random_arc(rng: &mut ChaCha8Rng) -> Arc {
    let a = rng.gen_range(0..ARC_DEN);
    let len = rng.gen_range(ARC_DEN / 20..=ARC_DEN / 2);
    Arc::new(rat(a, ARC_DEN), rat(a + len, ARC_DEN)).expect("length below 1")
}

fn random_bohr(g: &GroupSpec, d: usize, rng: &mut ChaCha8Rng) -> Result<BohrSpec> {
    let chars = random_labels(g, d, rng)?;
    BohrSpec::new(g, chars.into_iter().map(|c| (c, random_arc(rng))).collect())
}

fn prime_and_degree(g: &GroupSpec) -> (u64, u32) {
    match g.factorization().as_slice() {
        [(p, m)] => (*p, *m),
        _ => (0, 0),
    }
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
}

fn col<'a>(columns: &[&str], row: &'a Row, name: &str) -> &'a Cell {
    row.get(columns, name).expect("known column")
}

fn default_equation(g: &GroupSpec, w: &Option<crate::counting::EquationWire>) -> Result<EquationSpec> {
    match w {
        Some(w) => EquationSpec::from_wire(g, w.clone()),
        None => EquationSpec::sum_equals_square(g),
    }
}

/// `prod_j 1 / (r k_j)`.
fn threshold_of(eq: &EquationSpec) -> f64 {
    let r = eq.blocks().len() as f64;
    eq.blocks().iter().map(|&k| 1.0 / (r * k as f64)).product()
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum ScanSet {
    Structured,
    Variant(usize),
    Random(usize),
}

impl Sweep for ThresholdScan {
    type Job = (u64, f64, ScanSet);

    fn columns(&self) -> Vec<&'static str> {
        vec![
            "p",
            "target_density",
            "kind",
            "variant",
            "map",
            "size",
            "density",
            "count",
            "normalized",
            "threshold",
            "expect_zero",
            "expect_total",
            "expect_positive",
            "cd_t",
            "cd_lhs",
            "cd_rhs",
            "cd_pass",
            "kneser_count",
            "kneser_ratio",
            "kneser_hypotheses",
            "kneser_positive",
        ]
    }

    fn jobs(&self, _seed: u64) -> Result<Vec<Self::Job>> {
        let mut jobs = Vec::new();
        for &p in &self.primes {
            for &d in &self.densities {
                jobs.push((p, d, ScanSet::Structured));
                jobs.extend((0..self.variants).map(|v| (p, d, ScanSet::Variant(v))));
                jobs.extend((0..self.random_sets).map(|j| (p, d, ScanSet::Random(j))));
            }
        }
        Ok(jobs)
    }

    fn run(&self, index: usize, &(p, target, kind): &Self::Job, seed: u64) -> Result<Row> {
        let g = GroupSpec::field(p, 1)?;
        let eq = default_equation(&g, &self.equation)?;
        let size = size_for_density(&g, target)?;
        let (set, kind_name, variant, map, subset) = match kind {
            ScanSet::Structured => {
                let (s, sub) = structured_set(&g, size)?;
                (s, "structured", None, None, sub)
            }
            ScanSet::Variant(v) => {
                let (base, _) = structured_set(&g, size)?;
                let translate = v % 2 == 1;
                let (s, c) = variant_set(&base, translate, &mut rng(seed, stream(index, 0)))?;
                (s, if translate { "translate" } else { "dilate" }, Some(v), Some(c), false)
            }
            ScanSet::Random(j) => (random_subset(&g, size, seed, stream(index, 0))?, "random", Some(j), None, false),
        };
        let s = eq.s() as i32;
        let count = count_solutions(&set, &eq, CountMethod::Spectral)?;
        let total = (p as f64).powi(s - 1);
        let normalized = count as f64 / total;
        let density = set.mass() as f64 / p as f64;
        let threshold = threshold_of(&eq);
        let expect_zero = subset && self.equation.is_none();
        let expect_total = set.mass() == p && eq.exponents().contains(&1);
        let expect_positive = density >= threshold + self.kappa;
        let mut hard = true;
        if expect_zero {
            hard &= count == 0;
        }
        if expect_total {
            hard &= count as f64 == total;
        }
        if expect_positive {
            hard &= count > 0;
        }
        let (cd_t, cd) = if set.mass() > 0 {
            let t = set.mass().div_ceil(2);
            (Some(t), Some(popular_cd_check(&set, &set, t)?))
        } else {
            (None, None)
        };
        hard &= cd.as_ref().is_none_or(|c| c.pass);
        let kneser = popular_kneser_count(&[set.clone(), set.clone(), set.clone()], 0, self.kappa, DEFAULT_KNESER_M)?;
        hard &= kneser.positive != Some(false);
        Ok(Row::ok(
            vec![
                p.into(),
                target.into(),
                kind_name.into(),
                variant.into(),
                map.into(),
                set.mass().into(),
                density.into(),
                count.into(),
                normalized.into(),
                threshold.into(),
                expect_zero.into(),
                expect_total.into(),
                expect_positive.into(),
                cd_t.into(),
                cd.as_ref().map(|c| c.lhs).into(),
                cd.as_ref().map(|c| c.rhs).into(),
                cd.as_ref().map(|c| c.pass).into(),
                kneser.count.into(),
                kneser.ratio.into(),
                kneser.hypotheses_hold().into(),
                kneser.positive.into(),
            ],
            hard,
        ))
    }

    fn summarize(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> BTreeMap<String, Value> {
        let mut per_p: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
        for (_, r) in rows.iter().filter(|(_, r)| r.status == "ok") {
            let p = col(columns, r, "p").as_f64().unwrap_or(0.0) as u64;
            let density = col(columns, r, "density").as_f64().unwrap_or(0.0);
            let norm = col(columns, r, "normalized").as_f64().unwrap_or(0.0);
            let threshold = col(columns, r, "threshold").as_f64().unwrap_or(0.0);
            let e = per_p.entry(p).or_insert((f64::INFINITY, 0.0));
            if density >= threshold + self.kappa {
                e.0 = e.0.min(norm);
            }
            if norm == 0.0 {
                e.1 = e.1.max(density);
            }
        }
        let curve: Vec<Value> = per_p
            .into_iter()
            .map(|(p, (min_norm, zero_density))| {
                json!({
                    "p": p,
                    "min_normalized_above_threshold": min_norm.is_finite().then_some(min_norm),
                    "max_density_with_zero_count": zero_density,
                })
            })
            .collect();
        BTreeMap::from([("epsilon_curve".to_string(), Value::Array(curve))])
    }

    fn plot(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> Option<Plot> {
        let mut plot = Plot {
            title: "normalized solution count vs density".into(),
            x_label: "|A| / p".into(),
            y_label: "count / p^(s-1)".into(),
            ..Default::default()
        };
        let mut threshold = None;
        for (_, r) in rows.iter().filter(|(_, r)| r.status == "ok") {
            let kind = col(columns, r, "kind").to_string();
            let (Some(x), Some(y)) = (col(columns, r, "density").as_f64(), col(columns, r, "normalized").as_f64())
            else {
                continue;
            };
            threshold = col(columns, r, "threshold").as_f64();
            plot.push(&kind, x, y);
        }
        if let Some(t) = threshold {
            plot.vlines.push((t, format!("threshold {t}")));
        }
        Some(plot)
    }
}

#[derive(Clone, Debug)]
pub(crate) enum DecayJob {
    Full(GroupSpec),
    Bohr(GroupSpec, usize),
    Wrapper(GroupSpec),
}

fn decay_row(
    g: &GroupSpec,
    kind: &str,
    d: usize,
    set: &WeightedFunction,
    cap: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Row> {
    let (p, m) = prime_and_degree(g);
    let l1 = fourier_l1(set);
    let log_order = (g.order() as f64).ln();
    let ratio = l1 / log_order.powi(d as i32);
    let cap_ratio = cap.map(|_| l1 / (p as f64).ln());
    let cap_pass = cap.zip(cap_ratio).map(|(c, r)| r <= c);
    let unit = random_unit(g, rng, false);
    let dilated = fourier_l1(&dilate(set, unit)?);
    let diff = (dilated - l1).abs();
    let dilation_pass = diff <= 1e-8;
    let mut hard = dilation_pass && cap_pass.unwrap_or(true);
    if kind == "full" {
        hard &= (l1 - 1.0).abs() <= 1e-9;
    }
    Ok(Row::ok(
        vec![
            g.to_string().into(),
            g.order().into(),
            (p > 0).then_some(p).into(),
            (m > 0).then_some(m).into(),
            kind.into(),
            d.into(),
            set.mass().into(),
            l1.into(),
            log_order.into(),
            ratio.into(),
            cap_ratio.into(),
            cap_pass.into(),
            unit.into(),
            dilated.into(),
            diff.into(),
            dilation_pass.into(),
        ],
        hard,
    ))
}

impl Sweep for DecaySurvey {
    type Job = DecayJob;

    fn columns(&self) -> Vec<&'static str> {
        vec![
            "group",
            "order",
            "p",
            "m",
            "kind",
            "d",
            "size",
            "l1",
            "log_order",
            "ratio",
            "cap_ratio",
            "cap_pass",
            "unit",
            "dilated_l1",
            "dilation_diff",
            "dilation_pass",
        ]
    }

    fn jobs(&self, _seed: u64) -> Result<Vec<Self::Job>> {
        let mut jobs = Vec::new();
        for g in self.groups.resolve(SPECTRAL_CAP)? {
            if self.include_full {
                jobs.push(DecayJob::Full(g.clone()));
            }
            for &d in &self.ranks {
                jobs.extend((0..self.samples).map(|_| DecayJob::Bohr(g.clone(), d)));
            }
            if let Some(w) = &self.wrapper {
                jobs.extend((0..w.samples).map(|_| DecayJob::Wrapper(g.clone())));
            }
        }
        Ok(jobs)
    }

    fn run(&self, index: usize, job: &Self::Job, seed: u64) -> Result<Row> {
        let mut r = rng(seed, stream(index, 0));
        match job {
            DecayJob::Full(g) => decay_row(g, "full", 0, &WeightedFunction::full(g), None, &mut r),
            DecayJob::Bohr(g, d) => {
                let b = random_bohr(g, *d, &mut r)?;
                let certified = g.is_field() && prime_and_degree(g).1 == 1 && *d == 1;
                decay_row(g, "bohr", *d, &bohr_members(&b), certified.then_some(self.cap), &mut r)
            }
            DecayJob::Wrapper(g) => {
                let w = self.wrapper.as_ref().expect("wrapper jobs need a wrapper survey");
                let chars = random_labels(g, w.d, &mut r)?;
                let partition = ArcPartition::uniform(rat(w.tau[0] as i128, w.tau[1] as i128))?;
                let cells: BTreeSet<Vec<u64>> =
                    occupied_cells(g, &chars, &partition).into_keys().filter(|_| r.gen_bool(w.keep)).collect();
                let spec = WrapperSpec::new(g, chars, partition, cells)?;
                decay_row(g, "wrapper", w.d, &wrapper_members(&spec), None, &mut r)
            }
        }
    }

    fn summarize(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> BTreeMap<String, Value> {
        let mut max: BTreeMap<String, f64> = BTreeMap::new();
        for (_, r) in rows.iter().filter(|(_, r)| r.status == "ok") {
            let key = format!("max_ratio_{}_d{}", col(columns, r, "kind"), col(columns, r, "d"));
            let v = col(columns, r, "ratio").as_f64().unwrap_or(0.0);
            let e = max.entry(key).or_insert(0.0);
            *e = e.max(v);
            if let Some(c) = col(columns, r, "cap_ratio").as_f64() {
                let e = max.entry("max_cap_ratio".into()).or_insert(0.0);
                *e = e.max(c);
            }
        }
        let mut out: BTreeMap<String, Value> = max.into_iter().map(|(k, v)| (k, json!(v))).collect();
        out.insert("cap".into(), json!(self.cap));
        out
    }

    fn plot(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> Option<Plot> {
        let mut plot = Plot {
            title: "Fourier L1 norm over (log |G|)^d".into(),
            x_label: "|G|".into(),
            y_label: "ratio".into(),
            ..Default::default()
        };
        for (_, r) in rows.iter().filter(|(_, r)| r.status == "ok") {
            let label = format!("{} d={}", col(columns, r, "kind"), col(columns, r, "d"));
            if let (Some(x), Some(y)) = (col(columns, r, "order").as_f64(), col(columns, r, "ratio").as_f64()) {
                plot.push(&label, x, y);
            }
        }
        Some(plot)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct EquidistJob {
    group: GroupSpec,
    full: bool,
}

impl Sweep for EquidistSurvey {
    type Job = EquidistJob;

    fn columns(&self) -> Vec<&'static str> {
        vec![
            "group",
            "order",
            "kind",
            "r",
            "rank",
            "sizes",
            "count",
            "main_term",
            "error",
            "certified_bound",
            "bound_pass",
            "shape",
            "shape_ratio",
            "hypothesis",
            "roughness",
            "certified",
            "slice_modulus",
            "slice_count",
            "slice_pass",
        ]
    }

    fn jobs(&self, _seed: u64) -> Result<Vec<Self::Job>> {
        let mut jobs = Vec::new();
        for g in self.groups.resolve(SPECTRAL_CAP)? {
            if self.include_full {
                jobs.push(EquidistJob { group: g.clone(), full: true });
            }
            jobs.extend((0..self.samples).map(|_| EquidistJob { group: g.clone(), full: false }));
        }
        Ok(jobs)
    }

    fn run(&self, index: usize, job: &Self::Job, seed: u64) -> Result<Row> {
        let g = &job.group;
        let r_len = self.exponents.len();
        let coefficients = match &self.coefficients {
            Some(cs) => cs
                .iter()
                .map(|&c| {
                    let x = g.check(c.unsigned_abs())?;
                    Ok(if c < 0 { g.neg(x) } else { x })
                })
                .collect::<Result<Vec<u64>>>()?,
            None => vec![1; r_len],
        };
        let mut rg = rng(seed, stream(index, 0));
        let bohrs: Vec<BohrSpec> =
            (0..r_len)
                .map(|_| {
                    if job.full {
                        BohrSpec::new(g, vec![(1, Arc::full())])
                    } else {
                        random_bohr(g, self.rank, &mut rg)
                    }
                })
                .collect::<Result<_>>()?;
        let sets: Vec<WeightedFunction> = bohrs.iter().map(bohr_members).collect();
        let rank = if job.full { 0 } else { self.rank as u32 };
        let fc = power_fiber_count(&sets, &self.exponents, &coefficients, rank)?;
        let roughness = self.roughness.as_ref().map(|p| p.satisfied_by(g));
        let certified = fc.hypothesis && roughness.unwrap_or(true);
        let fac = g.factorization();
        let (slice_modulus, slice_count) = if !g.is_field() && fac.len() >= 2 {
            let (p1, m1) = fac[0];
            let pm = p1.pow(m1);
            (Some(pm), Some(count_via_slices(&bohrs, &self.exponents, &coefficients, pm)?))
        } else {
            (None, None)
        };
        let slice_pass = slice_count.map(|c| c == fc.count);
        let mut hard = fc.pass != Some(false) && slice_pass != Some(false);
        if job.full {
            hard &= fc.error <= 1e-9;
        }
        let sizes: Vec<u64> = sets.iter().map(WeightedFunction::mass).collect();
        Ok(Row::ok(
            vec![
                g.to_string().into(),
                g.order().into(),
                (if job.full { "full" } else { "bohr" }).into(),
                r_len.into(),
                rank.into(),
                joined(&sizes).into(),
                fc.count.into(),
                fc.main_term.into(),
                fc.error.into(),
                fc.certified_bound.into(),
                fc.pass.into(),
                fc.shape.into(),
                fc.shape_ratio.into(),
                fc.hypothesis.into(),
                roughness.into(),
                certified.into(),
                slice_modulus.into(),
                slice_count.into(),
                slice_pass.into(),
            ],
            hard,
        ))
    }

    fn summarize(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> BTreeMap<String, Value> {
        let ok = rows.iter().filter(|(_, r)| r.status == "ok");
        let mut field_rows = 0u64;
        let mut max_bound_use: f64 = 0.0;
        let mut max_shape_ratio: f64 = 0.0;
        for (_, r) in ok {
            if let (Some(e), Some(b)) = (col(columns, r, "error").as_f64(), col(columns, r, "certified_bound").as_f64())
            {
                field_rows += 1;
                if b > 0.0 {
                    max_bound_use = max_bound_use.max(e / b);
                }
            }
            if let Some(s) = col(columns, r, "shape_ratio").as_f64() {
                max_shape_ratio = max_shape_ratio.max(s);
            }
        }
        BTreeMap::from([
            ("field_rows".into(), json!(field_rows)),
            ("max_error_over_bound".into(), json!(max_bound_use)),
            ("max_shape_ratio".into(), json!(max_shape_ratio)),
        ])
    }
}

impl Sweep for WrapDemo {
    type Job = usize;

    fn columns(&self) -> Vec<&'static str> {
        vec![
            "group",
            "s",
            "a",
            "epsilon",
            "delta",
            "gamma_size",
            "bohr_size",
            "bohr_bound",
            "bohr_pass",
            "min_tau",
            "max_d",
            "target",
            "truncated_count",
            "truncated_ceiling",
            "solutions",
            "max_y_ratio",
            "y_reference",
            "y_soft",
            "max_z_ratio",
            "z_reference",
            "z_soft",
            "containment",
            "inclusions",
            "l1four",
            "magma",
            "mass",
        ]
    }

    fn jobs(&self, _seed: u64) -> Result<Vec<Self::Job>> {
        Ok((0..self.runs.len()).collect())
    }

    fn tolerated(&self, err: &Error) -> bool {
        matches!(err, Error::Parameter(_) | Error::Hypothesis(_))
    }

    fn run(&self, _index: usize, &job: &Self::Job, _seed: u64) -> Result<Row> {
        let run = &self.runs[job];
        let g = GroupSpec::parse(&run.group)?;
        let sets = run.sets.iter().map(|s| load_set(&g, s)).collect::<Result<Vec<_>>>()?;
        let res = wrap_sets(&sets, &run.params, run.a)?;
        let diags: Vec<_> = res.sets.iter().map(|s| &s.diagnostics).collect();
        let max = |f: fn(&crate::wrapping::SetDiagnostics) -> f64| diags.iter().map(|d| f(d)).fold(0.0, f64::max);
        let all = |f: fn(&crate::wrapping::SetDiagnostics) -> bool| diags.iter().all(|d| f(d));
        let max_y = max(|d| d.y_ratio);
        let max_z = max(|d| d.z_ratio);
        let y_ref = diags.first().map_or(0.0, |d| d.y_reference);
        let z_ref = diags.first().map_or(0.0, |d| d.z_reference);
        let min_tau = diags.iter().map(|d| d.tau).fold(f64::INFINITY, f64::min);
        let max_d = diags.iter().map(|d| d.d).max().unwrap_or(0);
        let mut row = Row::ok(
            vec![
                g.to_string().into(),
                sets.len().into(),
                run.a.into(),
                res.params.epsilon.into(),
                res.params.delta.into(),
                res.gamma.len().into(),
                res.bohr_size.into(),
                res.bohr_check.lower_bound.into(),
                res.bohr_check.pass.into(),
                min_tau.into(),
                max_d.into(),
                res.target.into(),
                res.truncated_count.into(),
                res.truncated_ceiling.into(),
                res.solutions.into(),
                max_y.into(),
                y_ref.into(),
                (max_y <= y_ref).into(),
                max_z.into(),
                z_ref.into(),
                (max_z <= z_ref).into(),
                all(|d| d.containment).into(),
                all(|d| d.inner_inclusion && d.outer_inclusion).into(),
                all(|d| d.l1four_pass).into(),
                all(|d| d.magma_pass).into(),
                all(|d| d.mass_pass).into(),
            ],
            res.hard_pass(),
        );
        row.detail = Some(serde_json::to_value(&res)?);
        Ok(row)
    }

    fn summarize(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> BTreeMap<String, Value> {
        let completed = rows.iter().filter(|(_, r)| r.status == "ok").count();
        let aborted = rows.iter().filter(|(_, r)| r.status.starts_with("aborted")).count();
        let soft_y =
            rows.iter().filter(|(_, r)| r.status == "ok" && col(columns, r, "y_soft") == &Cell::Bool(false)).count();
        BTreeMap::from([
            ("completed".into(), json!(completed)),
            ("aborted".into(), json!(aborted)),
            ("runs_above_y_reference".into(), json!(soft_y)),
        ])
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CharsumJob {
    group: GroupSpec,
    degree: usize,
}

impl Sweep for CharsumBatch {
    type Job = CharsumJob;

    fn columns(&self) -> Vec<&'static str> {
        vec!["group", "p", "m", "degree", "poly", "modulus", "bound", "ratio", "bound_kind", "applicable", "pass"]
    }

    fn jobs(&self, _seed: u64) -> Result<Vec<Self::Job>> {
        let mut jobs = Vec::new();
        for g in self.groups.resolve(SPECTRAL_CAP)? {
            for &degree in &self.degrees {
                jobs.extend((0..self.polys).map(|_| CharsumJob { group: g.clone(), degree }));
            }
        }
        Ok(jobs)
    }

    fn run(&self, index: usize, job: &Self::Job, seed: u64) -> Result<Row> {
        let g = &job.group;
        if job.degree == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let mut r = rng(seed, stream(index, 0));
        let mut coeffs: Vec<u64> = (0..job.degree).map(|_| r.gen_range(0..g.order())).collect();
        coeffs.push(if self.monic { 1 } else { r.gen_range(1..g.order()) });
        let poly = PolySpec::new(g, coeffs)?;
        let cert = certify(&poly)?;
        let (p, m) = prime_and_degree(g);
        let kind = serde_json::to_value(cert.bound_kind)?.as_str().unwrap_or_default().to_string();
        Ok(Row::ok(
            vec![
                g.to_string().into(),
                p.into(),
                m.into(),
                poly.degree().into(),
                poly.display().into(),
                cert.modulus.into(),
                cert.bound.into(),
                cert.ratio.into(),
                kind.into(),
                cert.applicable.into(),
                cert.pass.into(),
            ],
            cert.pass != Some(false),
        ))
    }

    fn summarize(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> BTreeMap<String, Value> {
        let mut max: BTreeMap<String, f64> = BTreeMap::new();
        let mut certified = 0u64;
        for (_, r) in rows.iter().filter(|(_, r)| r.status == "ok") {
            if col(columns, r, "pass") == &Cell::Bool(true) {
                certified += 1;
            }
            let key = format!("max_ratio_{}_k{}", col(columns, r, "bound_kind"), col(columns, r, "degree"));
            let v = col(columns, r, "ratio").as_f64().unwrap_or(0.0);
            let e = max.entry(key).or_insert(0.0);
            if v.is_finite() {
                *e = e.max(v);
            }
        }
        let mut out: BTreeMap<String, Value> = max.into_iter().map(|(k, v)| (k, json!(v))).collect();
        out.insert("certified_sums".into(), json!(certified));
        out
    }
}

impl Sweep for ExtremalGallery {
    type Job = (u64, usize);

    fn columns(&self) -> Vec<&'static str> {
        vec![
            "p",
            "lambdas",
            "exponents",
            "blocks",
            "s",
            "size",
            "density",
            "expected_density",
            "relative_deviation",
            "method",
            "count",
            "zero_pass",
        ]
    }

    fn jobs(&self, _seed: u64) -> Result<Vec<Self::Job>> {
        Ok(self.primes.iter().flat_map(|&p| (0..self.tuples.len()).map(move |t| (p, t))).collect())
    }

    fn run(&self, _index: usize, &(p, t): &Self::Job, _seed: u64) -> Result<Row> {
        let g = GroupSpec::field(p, 1)?;
        let wire = &self.tuples[t];
        let spec = ExtremalSpec::from_json(&g, &serde_json::to_string(wire)?)?;
        let set = extremal_set(&spec);
        let eq = spec.equation()?;
        let (method, count) = if eq.s() <= 3 {
            ("brute", brute_force_count(&set, &eq)?)
        } else {
            ("spectral", count_solutions(&set, &eq, CountMethod::Spectral)?)
        };
        let density = set.mass() as f64 / p as f64;
        let expected = spec.expected_density();
        Ok(Row::ok(
            vec![
                p.into(),
                joined(&wire.lambdas).into(),
                joined(&wire.exponents).into(),
                joined(&wire.blocks).into(),
                eq.s().into(),
                set.mass().into(),
                density.into(),
                expected.into(),
                ((density - expected).abs() / expected).into(),
                method.into(),
                count.into(),
                (count == 0).into(),
            ],
            count == 0,
        ))
    }

    fn summarize(&self, columns: &[&'static str], rows: &[(usize, Row)]) -> BTreeMap<String, Value> {
        let dev = rows
            .iter()
            .filter(|(_, r)| r.status == "ok" && col(columns, r, "p").as_f64().is_some_and(|p| p >= 211.0))
            .filter_map(|(_, r)| col(columns, r, "relative_deviation").as_f64())
            .fold(0.0, f64::max);
        BTreeMap::from([("max_relative_deviation_p_ge_211".into(), json!(dev))])
    }
}
