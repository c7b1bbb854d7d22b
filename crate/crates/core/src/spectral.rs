//! Fourier analysis on `G` with the unnormalized forward transform
//! `f^(gamma) = sum_x f(x) gamma(x)` and the normalized dual norms
//! `||g||_q = (|G|^-1 sum |g(gamma)|^q)^(1/q)`.
//!
//! Dual labels: for `Z/NZ` the label `xi` is the character
//! `x -> e(xi x / N)`; for `F_q` the label `alpha` is
//! `psi_alpha(x) = e_p(Tr(alpha x))`.
//!
//! Cyclic transforms go through `rustfft` (mixed radix, Rader, Bluestein
//! for arbitrary `N`). Field transforms are `m` nested length-`p`
//! transforms over `(Z/p)^m` followed by the trace-pairing relabelling
//! `alpha -> (Tr(alpha X^k))_k`.

use std::cell::RefCell;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// Integer-valued convolutions are rejected if any entry lands further than
/// this from an integer.
pub const INTEGER_GUARD: f64 = 1e-3;

/// Below this order the direct convolution is used outright.
pub const DIRECT_CUTOFF: usize = 64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedFunction {
    group: GroupSpec,
    counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseComplexFunction {
    group: GroupSpec,
    values: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    group: GroupSpec,
    values: Vec<Complex64>,
}

impl WeightedFunction {
    pub fn new(group: &GroupSpec, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != group.size() {
            return Err(Error::LengthMismatch { expected: group.size(), got: counts.len() });
        }
        Ok(WeightedFunction { group: group.clone(), counts })
    }

    pub fn zero(group: &GroupSpec) -> Self {
        WeightedFunction { group: group.clone(), counts: vec![0; group.size()] }
    }

    pub fn full(group: &GroupSpec) -> Self {
        WeightedFunction { group: group.clone(), counts: vec![1; group.size()] }
    }

    pub fn delta(group: &GroupSpec, x: u64) -> Self {
        let mut f = Self::zero(group);
        f.counts[x as usize] = 1;
        f
    }

    /// Indicator of a set of labels. Labels outside the group are an error;
    /// repeats are collapsed.
    pub fn indicator<I: IntoIterator<Item = u64>>(group: &GroupSpec, elems: I) -> Result<Self> {
        let mut f = Self::zero(group);
        for x in elems {
            group.check(x)?;
            f.counts[x as usize] = 1;
        }
        Ok(f)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, x: u64) -> u64 {
        self.counts[x as usize]
    }

    pub fn mass(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of points in the support.
    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn support(&self) -> Vec<u64> {
        (0..self.counts.len() as u64).filter(|&x| self.counts[x as usize] > 0).collect()
    }

    pub fn is_indicator(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }

    pub fn to_complex(&self) -> DenseComplexFunction {
        DenseComplexFunction {
            group: self.group.clone(),
            values: self.counts.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect(),
        }
    }

    /// `x -> f(x - t)`, i.e. the function of the translated set `S + t`.
    pub fn translate(&self, t: u64) -> Self {
        let g = &self.group;
        let mut out = vec![0; self.counts.len()];
        for (x, &c) in self.counts.iter().enumerate() {
            out[g.add(x as u64, t) as usize] = c;
        }
        WeightedFunction { group: g.clone(), counts: out }
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let counts = self.counts.iter().zip(&other.counts).map(|(&a, &b)| a.min(b)).collect();
        Ok(WeightedFunction { group: self.group.clone(), counts })
    }
}

impl DenseComplexFunction {
    pub fn new(group: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.size() {
            return Err(Error::LengthMismatch { expected: group.size(), got: values.len() });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Parameter("non-finite function value".into()));
        }
        Ok(DenseComplexFunction { group: group.clone(), values })
    }

    pub fn from_real(group: &GroupSpec, values: &[f64]) -> Result<Self> {
        Self::new(group, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(&self.values, w)
    }

    pub fn read_csv<R: Read>(group: &GroupSpec, r: R) -> Result<Self> {
        Self::new(group, read_csv(r, group.size())?)
    }
}

impl Spectrum {
    pub fn new(group: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.size() {
            return Err(Error::LengthMismatch { expected: group.size(), got: values.len() });
        }
        Ok(Spectrum { group: group.clone(), values })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, label: u64) -> Complex64 {
        self.values[label as usize]
    }

    /// Pointwise product, the transform of a convolution.
    pub fn pointwise(&self, other: &Spectrum) -> Result<Spectrum> {
        same_group(&self.group, &other.group)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Spectrum { group: self.group.clone(), values })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(&self.values, w)
    }

    pub fn read_csv<R: Read>(group: &GroupSpec, r: R) -> Result<Self> {
        Self::new(group, read_csv(r, group.size())?)
    }
}

fn same_group(a: &GroupSpec, b: &GroupSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

fn fft_in_place(buf: &mut [Complex64], direction: FftDirection) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(buf.len(), direction));
    fft.process(buf);
}

/// Length-`p` transforms along each of the `m` digit axes.
fn nested_transform(buf: &mut [Complex64], p: usize, m: u32, direction: FftDirection) {
    let fft = PLANNER.with(|pl| pl.borrow_mut().plan_fft(p, direction));
    let mut line = vec![Complex64::default(); p];
    let mut stride = 1;
    for _ in 0..m {
        let block = stride * p;
        for base in (0..buf.len()).step_by(block) {
            for off in 0..stride {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = buf[base + off + t * stride];
                }
                fft.process(&mut line);
                for (t, &v) in line.iter().enumerate() {
                    buf[base + off + t * stride] = v;
                }
            }
        }
        stride = block;
    }
}

/// For each field label `alpha`, the mixed-radix index of the vector
/// `(Tr(alpha X^k))_{k<m}`.
pub(crate) fn trace_pairing_permutation(group: &GroupSpec) -> Vec<usize> {
    let f = group.as_field().expect("field group");
    let p = f.characteristic();
    let m = f.degree() as usize;
    // hankel[j][k] = Tr(X^(j+k))
    let hankel: Vec<Vec<u64>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|k| {
                    let xj = p.pow(j as u32);
                    let xk = p.pow(k as u32);
                    f.trace(group.mul(xj, xk))
                })
                .collect()
        })
        .collect();
    let q = group.size();
    let mut digits = vec![0u64; m];
    (0..q)
        .map(|alpha| {
            let mut t = alpha as u64;
            for d in digits.iter_mut() {
                *d = t % p;
                t /= p;
            }
            let mut idx = 0usize;
            for k in (0..m).rev() {
                let xi_k = (0..m).map(|j| digits[j] * hankel[j][k]).sum::<u64>() % p;
                idx = idx * p as usize + xi_k as usize;
            }
            idx
        })
        .collect()
}

pub fn dft(f: &DenseComplexFunction) -> Spectrum {
    let g = &f.group;
    let mut buf = f.values.clone();
    let values = match g {
        GroupSpec::Cyclic(_) => {
            fft_in_place(&mut buf, FftDirection::Inverse);
            buf
        }
        GroupSpec::Field(fl) => {
            nested_transform(&mut buf, fl.characteristic() as usize, fl.degree(), FftDirection::Inverse);
            if fl.degree() == 1 {
                buf
            } else {
                trace_pairing_permutation(g).into_iter().map(|i| buf[i]).collect()
            }
        }
    };
    Spectrum { group: g.clone(), values }
}

pub fn dft_weighted(f: &WeightedFunction) -> Spectrum {
    dft(&f.to_complex())
}

pub fn idft(s: &Spectrum) -> DenseComplexFunction {
    let g = &s.group;
    let n = g.size() as f64;
    let mut buf = match g {
        GroupSpec::Cyclic(_) => {
            let mut b = s.values.clone();
            fft_in_place(&mut b, FftDirection::Forward);
            b
        }
        GroupSpec::Field(fl) => {
            let mut b = if fl.degree() == 1 {
                s.values.clone()
            } else {
                let mut b = vec![Complex64::default(); s.values.len()];
                for (alpha, idx) in trace_pairing_permutation(g).into_iter().enumerate() {
                    b[idx] = s.values[alpha];
                }
                b
            };
            nested_transform(&mut b, fl.characteristic() as usize, fl.degree(), FftDirection::Forward);
            b
        }
    };
    for v in buf.iter_mut() {
        *v /= n;
    }
    DenseComplexFunction { group: g.clone(), values: buf }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConvolutionMethod {
    /// Direct below [`DIRECT_CUTOFF`], spectral above with a direct fallback
    /// when the integer guard trips.
    #[default]
    Auto,
    /// Spectral only; a guard violation is an error.
    Spectral,
    Direct,
}

pub fn convolve(f1: &WeightedFunction, f2: &WeightedFunction) -> Result<WeightedFunction> {
    convolve_all(&[f1.clone(), f2.clone()], ConvolutionMethod::Auto)
}

pub fn convolve_with(
    f1: &WeightedFunction,
    f2: &WeightedFunction,
    method: ConvolutionMethod,
) -> Result<WeightedFunction> {
    convolve_all(&[f1.clone(), f2.clone()], method)
}

/// `f_1 * f_2 * .. * f_s`, exact integers.
pub fn convolve_all(fs: &[WeightedFunction], method: ConvolutionMethod) -> Result<WeightedFunction> {
    let first = fs.first().ok_or_else(|| Error::Parameter("empty convolution".into()))?;
    for f in &fs[1..] {
        same_group(&first.group, &f.group)?;
    }
    if fs.len() == 1 {
        return Ok(first.clone());
    }
    match method {
        ConvolutionMethod::Direct => Ok(direct_chain(fs)),
        ConvolutionMethod::Spectral => spectral_chain(fs),
        ConvolutionMethod::Auto if first.group.size() < DIRECT_CUTOFF => Ok(direct_chain(fs)),
        ConvolutionMethod::Auto => spectral_chain(fs).or_else(|e| match e {
            Error::IntegerGuard { .. } => Ok(direct_chain(fs)),
            other => Err(other),
        }),
    }
}

fn direct_chain(fs: &[WeightedFunction]) -> WeightedFunction {
    let mut acc = fs[0].clone();
    for f in &fs[1..] {
        acc = direct_pair(&acc, f);
    }
    acc
}

fn direct_pair(a: &WeightedFunction, b: &WeightedFunction) -> WeightedFunction {
    let g = &a.group;
    let mut out = vec![0u64; a.counts.len()];
    for (y, &ca) in a.counts.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (z, &cb) in b.counts.iter().enumerate() {
            if cb != 0 {
                out[g.add(y as u64, z as u64) as usize] += ca * cb;
            }
        }
    }
    WeightedFunction { group: g.clone(), counts: out }
}

fn spectral_chain(fs: &[WeightedFunction]) -> Result<WeightedFunction> {
    let mut acc = dft_weighted(&fs[0]);
    for f in &fs[1..] {
        acc = acc.pointwise(&dft_weighted(f))?;
    }
    let back = idft(&acc);
    let counts = back
        .values
        .iter()
        .map(|v| {
            let r = v.re.round();
            if (v.re - r).abs() > INTEGER_GUARD || v.im.abs() > INTEGER_GUARD || r < 0.0 {
                Err(Error::IntegerGuard { value: v.re, tol: INTEGER_GUARD })
            } else {
                Ok(r as u64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedFunction { group: fs[0].group.clone(), counts })
}

/// Normalized dual norm; `exponent = f64::INFINITY` gives the max modulus.
pub fn norm_q(s: &Spectrum, exponent: f64) -> Result<f64> {
    if exponent.is_nan() || exponent < 1.0 {
        return Err(Error::BadExponent(exponent));
    }
    if exponent.is_infinite() {
        return Ok(s.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let n = s.values.len() as f64;
    if exponent == 1.0 {
        return Ok(s.values.iter().map(|v| v.norm()).sum::<f64>() / n);
    }
    let total: f64 = s.values.iter().map(|v| v.norm().powf(exponent)).sum();
    Ok((total / n).powf(exponent.recip()))
}

/// Labels with `|f^(gamma)| > threshold`, ascending.
pub fn large_spectrum(f: &WeightedFunction, threshold: f64) -> Result<Vec<u64>> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::Parameter(format!("threshold must be positive, got {threshold}")));
    }
    let s = dft_weighted(f);
    Ok(large_labels(&s, threshold))
}

pub(crate) fn large_labels(s: &Spectrum, threshold: f64) -> Vec<u64> {
    s.values.iter().enumerate().filter(|(_, v)| v.norm() > threshold).map(|(i, _)| i as u64).collect()
}

#[derive(serde::Serialize, serde::Deserialize)]
struct CsvRow {
    index: u64,
    re: f64,
    im: f64,
}

fn write_csv<W: Write>(values: &[Complex64], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for (i, v) in values.iter().enumerate() {
        wtr.serialize(CsvRow { index: i as u64, re: v.re, im: v.im })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads `index,re,im` rows. Every index in `[0, len)` must appear once.
pub fn read_csv<R: Read>(r: R, len: usize) -> Result<Vec<Complex64>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = vec![None; len];
    for row in rdr.deserialize() {
        let row: CsvRow = row?;
        let slot =
            out.get_mut(row.index as usize).ok_or_else(|| Error::Parse(format!("index {} out of range", row.index)))?;
        if slot.is_some() {
            return Err(Error::Parse(format!("duplicate index {}", row.index)));
        }
        if !row.re.is_finite() || !row.im.is_finite() {
            return Err(Error::Parse(format!("non-finite value at index {}", row.index)));
        }
        *slot = Some(Complex64::new(row.re, row.im));
    }
    out.into_iter().enumerate().map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing index {i}")))).collect()
}
