//! Experiment configuration, read from TOML or JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::counting::{EquationWire, ExtremalWire};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, RoughnessProfile};
use crate::wrapping::WrappingParams;

/// Largest group for spectral counting and surveys.
pub const SPECTRAL_CAP: u64 = 1_000_000;
/// Largest group for exhaustive oracles and wrapping.
pub const EXHAUSTIVE_CAP: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; the CLI `--out` flag takes precedence.
    #[serde(default)]
    pub output: Option<String>,
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    ThresholdScan(ThresholdScan),
    DecaySurvey(DecaySurvey),
    EquidistSurvey(EquidistSurvey),
    WrapDemo(WrapDemo),
    CharsumBatch(CharsumBatch),
    ExtremalGallery(ExtremalGallery),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::ThresholdScan(_) => "threshold_scan",
            Experiment::DecaySurvey(_) => "decay_survey",
            Experiment::EquidistSurvey(_) => "equidist_survey",
            Experiment::WrapDemo(_) => "wrap_demo",
            Experiment::CharsumBatch(_) => "charsum_batch",
            Experiment::ExtremalGallery(_) => "extremal_gallery",
        }
    }
}

/// Groups given by short form (`Z/15`, `F_7`, `F_3^2`) plus an optional
/// inclusive prime range expanded to prime fields.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupList {
    #[serde(default)]
    pub groups: Vec<String>,
    #[serde(default)]
    pub prime_range: Option<[u64; 2]>,
}

impl GroupList {
    pub fn resolve(&self, cap: u64) -> Result<Vec<GroupSpec>> {
        let mut out = self.groups.iter().map(|s| GroupSpec::parse(s)).collect::<Result<Vec<_>>>()?;
        if let Some([lo, hi]) = self.prime_range {
            if hi > cap {
                return Err(Error::Parameter(format!("prime range reaches {hi}, above the cap {cap}")));
            }
            for p in crate::arith::primes_between(lo, hi) {
                out.push(GroupSpec::field(p, 1)?);
            }
        }
        if out.is_empty() {
            return Err(Error::Parameter("empty group grid".into()));
        }
        if let Some(g) = out.iter().find(|g| g.order() > cap) {
            return Err(Error::Parameter(format!("|{g}| = {} exceeds the cap {cap}", g.order())));
        }
        Ok(out)
    }
}

fn default_random_sets() -> usize {
    3
}
fn default_variants() -> usize {
    2
}
fn default_kappa() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdScan {
    pub primes: Vec<u64>,
    pub densities: Vec<f64>,
    #[serde(default = "default_random_sets")]
    pub random_sets: usize,
    /// Dilates/translates of the structured set per grid point.
    #[serde(default = "default_variants")]
    pub variants: usize,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Defaults to `x + y = z^2`.
    #[serde(default)]
    pub equation: Option<EquationWire>,
}

fn default_ranks() -> Vec<usize> {
    vec![1]
}
fn default_samples() -> usize {
    20
}
fn default_cap() -> f64 {
    8.0
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrapperSurvey {
    pub d: usize,
    /// `[num, den]`.
    pub tau: [i64; 2],
    /// Probability of keeping each occupied cell.
    pub keep: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySurvey {
    #[serde(flatten)]
    pub groups: GroupList,
    #[serde(default = "default_ranks")]
    pub ranks: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Certification cap on `||1_B^||_1 / log |G|` for rank-one Bohr sets
    /// in prime fields.
    #[serde(default = "default_cap")]
    pub cap: f64,
    #[serde(default)]
    pub wrapper: Option<WrapperSurvey>,
    #[serde(default = "default_true")]
    pub include_full: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquidistSurvey {
    #[serde(flatten)]
    pub groups: GroupList,
    pub exponents: Vec<u64>,
    /// Defaults to all ones.
    #[serde(default)]
    pub coefficients: Option<Vec<i64>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_rank")]
    pub rank: usize,
    #[serde(default)]
    pub roughness: Option<RoughnessProfile>,
    #[serde(default = "default_true")]
    pub include_full: bool,
}

fn default_rank() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrapDemoRun {
    pub group: String,
    /// Set generators or file paths, one per set.
    pub sets: Vec<String>,
    #[serde(default)]
    pub a: u64,
    pub params: WrappingParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrapDemo {
    pub runs: Vec<WrapDemoRun>,
}

fn default_polys() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharsumBatch {
    #[serde(flatten)]
    pub groups: GroupList,
    pub degrees: Vec<usize>,
    #[serde(default = "default_polys")]
    pub polys: usize,
    #[serde(default = "default_true")]
    pub monic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalGallery {
    pub primes: Vec<u64>,
    pub tuples: Vec<ExtremalWire>,
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// JSON when the text starts with `{`, TOML otherwise.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json(s)
        } else {
            Self::from_toml(s)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            Some("toml") => Self::from_toml(&text),
            _ => Self::parse(&text),
        }
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.experiment.kind().to_string())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("plain data");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Grid and cap checks shared by every experiment.
    pub fn validate(&self) -> Result<()> {
        let nonempty = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{what} must be nonempty")))
            }
        };
        match &self.experiment {
            Experiment::ThresholdScan(t) => {
                nonempty(!t.primes.is_empty(), "primes")?;
                nonempty(!t.densities.is_empty(), "densities")?;
                for &p in &t.primes {
                    if p > SPECTRAL_CAP {
                        return Err(Error::Parameter(format!("p = {p} exceeds the cap {SPECTRAL_CAP}")));
                    }
                    GroupSpec::field(p, 1)?;
                }
                if let Some(d) = t.densities.iter().find(|d| !(0.0..=1.0).contains(*d)) {
                    return Err(Error::Parameter(format!("density {d} outside [0, 1]")));
                }
            }
            Experiment::DecaySurvey(d) => {
                d.groups.resolve(SPECTRAL_CAP)?;
                nonempty(!d.ranks.is_empty(), "ranks")?;
                if d.ranks.contains(&0) {
                    return Err(Error::Parameter("ranks must be positive".into()));
                }
                if let Some(w) = &d.wrapper {
                    if w.d == 0 || w.tau[1] <= 0 || w.tau[0] <= 0 || w.tau[0] >= w.tau[1] {
                        return Err(Error::Parameter("wrapper survey needs d >= 1 and tau in (0, 1)".into()));
                    }
                    if !(0.0..=1.0).contains(&w.keep) {
                        return Err(Error::Parameter("keep must lie in [0, 1]".into()));
                    }
                }
            }
            Experiment::EquidistSurvey(e) => {
                e.groups.resolve(SPECTRAL_CAP)?;
                nonempty(!e.exponents.is_empty(), "exponents")?;
                if let Some(c) = &e.coefficients {
                    if c.len() != e.exponents.len() {
                        return Err(Error::Parameter("one coefficient per exponent".into()));
                    }
                }
                if e.rank == 0 {
                    return Err(Error::Parameter("rank must be positive".into()));
                }
            }
            Experiment::WrapDemo(w) => {
                nonempty(!w.runs.is_empty(), "runs")?;
                for r in &w.runs {
                    let g = GroupSpec::parse(&r.group)?;
                    if g.order() > EXHAUSTIVE_CAP {
                        return Err(Error::Parameter(format!("|{g}| exceeds the cap {EXHAUSTIVE_CAP}")));
                    }
                }
            }
            Experiment::CharsumBatch(c) => {
                c.groups.resolve(SPECTRAL_CAP)?;
                nonempty(!c.degrees.is_empty(), "degrees")?;
            }
            Experiment::ExtremalGallery(x) => {
                nonempty(!x.primes.is_empty(), "primes")?;
                nonempty(!x.tuples.is_empty(), "tuples")?;
                for &p in &x.primes {
                    if p > EXHAUSTIVE_CAP {
                        return Err(Error::Parameter(format!("p = {p} exceeds the cap {EXHAUSTIVE_CAP}")));
                    }
                    GroupSpec::field(p, 1)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCAN: &str = r#"
seed = 7

[experiment]
kind = "threshold_scan"
primes = [101]
densities = [0.05, 1.0]
"#;

    #[test]
    fn toml_and_json_agree() {
        let c = ExperimentConfig::from_toml(SCAN).unwrap();
        assert_eq!(c.experiment.kind(), "threshold_scan");
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        c.validate().unwrap();
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::from_toml(SCAN).unwrap();
        let mut b = a.clone();
        b.seed = 8;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_grids() {
        assert!(ExperimentConfig::from_toml(
            "[experiment]\nkind = \"threshold_scan\"\nprimes=[5]\ndensities=[0.1]\nbogus=1\n"
        )
        .is_err());
        let c = ExperimentConfig::from_toml("[experiment]\nkind = \"threshold_scan\"\nprimes=[]\ndensities=[0.1]\n")
            .unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_toml("[experiment]\nkind = \"threshold_scan\"\nprimes=[15]\ndensities=[0.1]\n")
            .unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_toml(
            "[experiment]\nkind = \"charsum_batch\"\nprime_range=[2, 2000000]\ndegrees=[2]\n",
        )
        .unwrap();
        assert!(c.validate().is_err());
    }
}
