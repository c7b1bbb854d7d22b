//! Set files, set generators and the seeded random-subset algorithm.
//!
//! Set files are either JSON (`[1, 2, 3]` or `[[1, 2], [3]]`) or plain text
//! with one set per non-empty line, labels separated by commas or
//! whitespace; `#` starts a comment.
//!
//! Random subsets of exact size `k`: seed `ChaCha8Rng::seed_from_u64(seed)`,
//! select stream `stream`, draw one `next_u64` key per element in ascending
//! label order, and keep the `k` elements with the smallest `(key, label)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::spectral::WeightedFunction;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform subset of exactly `size` elements (see the module docs).
pub fn random_subset(g: &GroupSpec, size: u64, seed: u64, stream: u64) -> Result<WeightedFunction> {
    if size > g.order() {
        return Err(Error::Parameter(format!("subset size {size} exceeds |G| = {}", g.order())));
    }
    let mut r = rng(seed, stream);
    let mut keyed: Vec<(u64, u64)> = (0..g.order()).map(|x| (r.next_u64(), x)).collect();
    keyed.sort_unstable();
    WeightedFunction::indicator(g, keyed.into_iter().take(size as usize).map(|(_, x)| x))
}

/// `round(density |G|)`, clamped to `[0, |G|]`.
pub fn size_for_density(g: &GroupSpec, density: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Parameter(format!("density {density} outside [0, 1]")));
    }
    Ok(((density * g.order() as f64).round() as u64).min(g.order()))
}

/// `{x in (0, p/4) : x^2 mod p in (p/2, p)}` in `F_p`: no solutions to
/// `x + y = z^2` since the left side lies in `(0, p/2)`.
pub fn densecount_set(g: &GroupSpec) -> Result<WeightedFunction> {
    let f = g.as_field()?;
    if f.degree() != 1 {
        return Err(Error::Hypothesis("the structured set lives in a prime field".into()));
    }
    let p = f.characteristic();
    // 4x < p and p < 2 (x^2 mod p)
    let members = (1..p).filter(|&x| 4 * x < p && p < 2 * g.mul(x, x));
    WeightedFunction::indicator(g, members)
}

/// `{x : x^k = 1 mod 3}` in `Z/N`, `3 | N`.
pub fn obstruction_set(g: &GroupSpec, k: u64) -> Result<WeightedFunction> {
    let n = g.as_cyclic()?.modulus();
    if n % 3 != 0 {
        return Err(Error::Hypothesis(format!("3 does not divide {n}")));
    }
    let members = (0..n).filter(|&x| crate::arith::pow_mod(x % 3, k, 3) == 1);
    WeightedFunction::indicator(g, members)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SetGenerator {
    Full,
    Empty,
    Interval { start: u64, len: u64 },
    Progression { start: u64, step: u64, len: u64 },
    Random { size: Option<u64>, density: Option<f64>, seed: u64, stream: u64 },
    Densecount,
    Obstruction { k: u64 },
}

impl SetGenerator {
    /// `name` or `name:key=value,key=value`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), a),
            None => (s.trim(), ""),
        };
        let mut kv = Vec::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) =
                part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            kv.push((k.trim(), v.trim()));
        }
        let mut used = vec![false; kv.len()];
        let mut get = |key: &str| -> Option<&str> {
            kv.iter().enumerate().find(|(_, (k, _))| *k == key).map(|(i, (_, v))| {
                used[i] = true;
                *v
            })
        };
        fn int(key: &str, v: Option<&str>) -> Result<Option<u64>> {
            v.map(|v| v.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer for {key}: '{v}'")))).transpose()
        }
        fn need(key: &str, v: Option<u64>) -> Result<u64> {
            v.ok_or_else(|| Error::Parse(format!("missing {key}")))
        }
        let gen = match name {
            "full" => SetGenerator::Full,
            "empty" => SetGenerator::Empty,
            "interval" => SetGenerator::Interval {
                start: int("start", get("start"))?.unwrap_or(0),
                len: need("len", int("len", get("len"))?)?,
            },
            "ap" => SetGenerator::Progression {
                start: int("start", get("start"))?.unwrap_or(0),
                step: int("step", get("step"))?.unwrap_or(1),
                len: need("len", int("len", get("len"))?)?,
            },
            "random" => {
                let size = int("size", get("size"))?;
                let density = get("density")
                    .map(|v| v.parse::<f64>().map_err(|_| Error::Parse(format!("bad density '{v}'"))))
                    .transpose()?;
                if size.is_some() == density.is_some() {
                    return Err(Error::Parse("random needs exactly one of size and density".into()));
                }
                SetGenerator::Random {
                    size,
                    density,
                    seed: int("seed", get("seed"))?.unwrap_or(0),
                    stream: int("stream", get("stream"))?.unwrap_or(0),
                }
            }
            "densecount" => SetGenerator::Densecount,
            "obstruction" => SetGenerator::Obstruction { k: need("k", int("k", get("k"))?)? },
            other => return Err(Error::Parse(format!("unknown generator '{other}'"))),
        };
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::Parse(format!("unknown argument '{}' for {name}", kv[i].0)));
        }
        Ok(gen)
    }

    pub fn generate(&self, g: &GroupSpec) -> Result<WeightedFunction> {
        match *self {
            SetGenerator::Full => Ok(WeightedFunction::full(g)),
            SetGenerator::Empty => Ok(WeightedFunction::zero(g)),
            SetGenerator::Interval { start, len } => progression(g, start, 1, len),
            SetGenerator::Progression { start, step, len } => progression(g, start, step, len),
            SetGenerator::Random { size, density, seed, stream } => {
                let k = match (size, density) {
                    (Some(k), _) => k,
                    (None, Some(d)) => size_for_density(g, d)?,
                    (None, None) => return Err(Error::Parameter("random set needs a size or a density".into())),
                };
                random_subset(g, k, seed, stream)
            }
            SetGenerator::Densecount => densecount_set(g),
            SetGenerator::Obstruction { k } => obstruction_set(g, k),
        }
    }
}

/// `{start + t step : 0 <= t < len}` using the group law.
fn progression(g: &GroupSpec, start: u64, step: u64, len: u64) -> Result<WeightedFunction> {
    g.check(start)?;
    g.check(step)?;
    if len > g.order() {
        return Err(Error::Parameter(format!("length {len} exceeds |G| = {}", g.order())));
    }
    let mut counts = vec![0u64; g.size()];
    let mut x = start;
    for _ in 0..len {
        counts[x as usize] = 1;
        x = g.add(x, step);
    }
    WeightedFunction::new(g, counts)
}

/// Parses a set file into one label list per set.
pub fn parse_set_file(text: &str) -> Result<Vec<Vec<u64>>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let v: serde_json::Value = serde_json::from_str(trimmed)?;
        let arr = v.as_array().ok_or_else(|| Error::Parse("expected a JSON array".into()))?;
        if arr.iter().all(|e| e.is_array()) && !arr.is_empty() {
            return arr.iter().map(json_labels).collect();
        }
        return Ok(vec![json_labels(&v)?]);
    }
    let mut sets = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let labels = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad label '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        sets.push(labels);
    }
    Ok(sets)
}

fn json_labels(v: &serde_json::Value) -> Result<Vec<u64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of labels".into()))?
        .iter()
        .map(|e| e.as_u64().ok_or_else(|| Error::Parse(format!("bad label {e}"))))
        .collect()
}

/// Labels must be in range; repeats are rejected.
pub fn labels_to_set(g: &GroupSpec, labels: &[u64]) -> Result<WeightedFunction> {
    let mut counts = vec![0u64; g.size()];
    for &x in labels {
        g.check(x)?;
        if counts[x as usize] == 1 {
            return Err(Error::Parse(format!("label {x} repeated")));
        }
        counts[x as usize] = 1;
    }
    WeightedFunction::new(g, counts)
}

/// A path to a set file, or a generator expression.
pub fn load_set(g: &GroupSpec, arg: &str) -> Result<WeightedFunction> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        let sets = parse_set_file(&std::fs::read_to_string(path)?)?;
        if sets.len() != 1 {
            return Err(Error::Parse(format!("expected one set in {arg}, found {}", sets.len())));
        }
        return labels_to_set(g, &sets[0]);
    }
    SetGenerator::parse(arg)?.generate(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_subset_is_exact_and_deterministic() {
        let g = GroupSpec::cyclic(101).unwrap();
        let a = random_subset(&g, 40, 7, 3).unwrap();
        assert_eq!(a.mass(), 40);
        assert_eq!(a, random_subset(&g, 40, 7, 3).unwrap());
        assert_ne!(a, random_subset(&g, 40, 7, 4).unwrap());
        assert!(random_subset(&g, 102, 0, 0).is_err());
    }

    #[test]
    fn densecount_has_density_near_one_eighth() {
        let g = GroupSpec::field(499, 1).unwrap();
        let a = densecount_set(&g).unwrap();
        let d = a.mass() as f64 / 499.0;
        assert!((d - 0.125).abs() < 0.03, "{d}");
        assert!(densecount_set(&GroupSpec::field(3, 2).unwrap()).is_err());
    }

    #[test]
    fn generators_parse() {
        let g = GroupSpec::cyclic(15).unwrap();
        assert_eq!(SetGenerator::parse("interval:len=3").unwrap().generate(&g).unwrap().support(), vec![0, 1, 2]);
        assert_eq!(
            SetGenerator::parse("ap:start=14,step=4,len=3").unwrap().generate(&g).unwrap().support(),
            vec![3, 7, 14]
        );
        assert_eq!(SetGenerator::parse("obstruction:k=2").unwrap().generate(&g).unwrap().mass(), 10);
        assert_eq!(SetGenerator::parse("random:density=0.4,seed=2").unwrap().generate(&g).unwrap().mass(), 6);
        assert!(SetGenerator::parse("random:seed=2").is_err());
        assert!(SetGenerator::parse("interval:len=3,foo=1").is_err());
        assert!(SetGenerator::parse("nope").is_err());
    }

    #[test]
    fn set_files() {
        assert_eq!(parse_set_file("1, 2 3\n# c\n\n4\n").unwrap(), vec![vec![1, 2, 3], vec![4]]);
        assert_eq!(parse_set_file("[1,2]").unwrap(), vec![vec![1, 2]]);
        assert_eq!(parse_set_file("[[1],[2,3]]").unwrap(), vec![vec![1], vec![2, 3]]);
        assert!(parse_set_file("1 x").is_err());
        let g = GroupSpec::cyclic(5).unwrap();
        assert!(labels_to_set(&g, &[1, 1]).is_err());
        assert!(labels_to_set(&g, &[5]).is_err());
    }
}
