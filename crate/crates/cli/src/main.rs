use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fermat_forge::bohr::{bohr_members, fourier_l1, wrapper_members, BohrSpec, WrapperSpec};
use fermat_forge::charsums::{certify, PolySpec};
use fermat_forge::counting::{
    congruence_obstruction_set, count_solutions, extremal_set, power_fiber_count, CountMethod, EquationSpec,
    ExtremalSpec,
};
use fermat_forge::harness::{self, ExperimentConfig};
use fermat_forge::sets::load_set;
use fermat_forge::wrapping::{wrap_sets, WrappingParams};
use fermat_forge::{Error, GroupSpec, Result, WeightedFunction};

/// Exit code when a computation ran but a hard check failed.
const EXIT_CHECK_FAILED: u8 = 1;
/// Exit code for bad input or an aborted run.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "fermat-forge", version, about = "Fourier, Bohr-set and solution-count experiments over F_q and Z/NZ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl Output {
    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(fs::File::create(p)?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Complete exponential sums with square-root / prime-power certificates.
    Charsum {
        #[arg(long)]
        group: String,
        /// Coefficients `c0,c1,...`, low degree first. Repeatable.
        #[arg(long)]
        poly: Vec<String>,
        /// File with one coefficient list per line.
        #[arg(long)]
        batch: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Fourier L1 norms of Bohr sets and wrappers.
    BohrL1 {
        /// Bohr spec JSON, inline or a file path. Repeatable.
        #[arg(long)]
        spec: Vec<String>,
        /// Wrapper spec JSON, inline or a file path. Repeatable.
        #[arg(long)]
        wrapper: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the wrapping pipeline and print the JSON report.
    Wrap {
        #[arg(long)]
        group: String,
        /// Set file holding one set per line (or a JSON list of lists).
        #[arg(long)]
        sets: Option<PathBuf>,
        /// A set file or generator expression. Repeatable.
        #[arg(long)]
        set: Vec<String>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        a: u64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long = "q")]
        cls_q: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        d_cap: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Count solutions of an equation with all variables in a set.
    Count {
        #[arg(long)]
        group: String,
        /// A set file or generator expression.
        #[arg(long)]
        set: String,
        /// Equation JSON, inline or a file path; defaults to x + y = z^2.
        #[arg(long)]
        equation: Option<String>,
        #[arg(long, default_value = "spectral")]
        method: CountMethod,
        #[command(flatten)]
        output: Output,
    },
    /// Fibers of power maps over given sets.
    Equidist {
        #[arg(long)]
        group: String,
        /// One set per exponent. Repeatable.
        #[arg(long, required = true)]
        set: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<u64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coefficients: Vec<i64>,
        /// Bohr rank used in the Z/N error shape.
        #[arg(long, default_value_t = 1)]
        rank: u32,
        #[command(flatten)]
        output: Output,
    },
    /// The extremal construction and its solution count.
    Extremal {
        #[arg(long)]
        group: String,
        /// `{"lambdas":[..],"exponents":[..],"blocks":[..]}`, inline or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "spectral")]
        method: CountMethod,
        #[command(flatten)]
        output: Output,
    },
    /// The mod-3 congruence obstruction set and its unrepresentable residues.
    Obstruction {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run a configured sweep.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output`, then `out/`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Recompute one row and print it as CSV.
        #[arg(long)]
        replay: Option<usize>,
    },
}

/// Inline JSON when the argument looks like JSON, otherwise a file path.
fn json_arg(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        Ok(fs::read_to_string(arg)?)
    }
}

fn csv_out(output: &Output, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(output.sink()?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn charsum(group: &str, polys: &[String], batch: Option<&PathBuf>, output: &Output) -> Result<bool> {
    let g = GroupSpec::parse(group)?;
    let mut lines: Vec<String> = polys.to_vec();
    if let Some(path) = batch {
        let text = fs::read_to_string(path)?;
        lines.extend(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        );
    }
    if lines.is_empty() {
        return Err(Error::Parameter("give --poly or --batch".into()));
    }
    let mut rows = Vec::new();
    let mut ok = true;
    for line in &lines {
        let poly = PolySpec::parse(&g, line)?;
        let c = certify(&poly)?;
        ok &= c.pass != Some(false);
        rows.push(vec![poly.display(), c.modulus.to_string(), c.bound.to_string(), c.ratio.to_string(), opt(c.pass)]);
    }
    csv_out(output, &["poly", "modulus", "bound", "ratio", "pass"], &rows)?;
    Ok(ok)
}

fn l1_row(set: &WeightedFunction, g: &GroupSpec, d: usize) -> Vec<String> {
    let l1 = fourier_l1(set);
    let ratio = l1 / (g.order() as f64).ln().powi(d as i32);
    let (p, m) = match g.factorization().as_slice() {
        [(p, m)] => (p.to_string(), m.to_string()),
        _ => (String::new(), String::new()),
    };
    vec![p, m, d.to_string(), l1.to_string(), ratio.to_string()]
}

fn bohr_l1(specs: &[String], wrappers: &[String], output: &Output) -> Result<bool> {
    if specs.is_empty() && wrappers.is_empty() {
        return Err(Error::Parameter("give --spec or --wrapper".into()));
    }
    let mut rows = Vec::new();
    for s in specs {
        let b = BohrSpec::from_json(&json_arg(s)?)?;
        rows.push(l1_row(&bohr_members(&b), b.group(), b.rank()));
    }
    for s in wrappers {
        let w = WrapperSpec::from_json(&json_arg(s)?)?;
        rows.push(l1_row(&wrapper_members(&w), w.group(), w.characters().len()));
    }
    csv_out(output, &["p", "m", "d", "l1", "ratio"], &rows)?;
    Ok(true)
}

fn load_sets(g: &GroupSpec, file: Option<&PathBuf>, exprs: &[String]) -> Result<Vec<WeightedFunction>> {
    let mut sets = Vec::new();
    if let Some(path) = file {
        for labels in fermat_forge::sets::parse_set_file(&fs::read_to_string(path)?)? {
            sets.push(fermat_forge::sets::labels_to_set(g, &labels)?);
        }
    }
    for e in exprs {
        sets.push(load_set(g, e)?);
    }
    Ok(sets)
}

fn run_config(config: &Path, out: Option<PathBuf>, seed: Option<u64>, replay: Option<usize>) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = harness::run(&cfg, replay)?;
    if replay.is_some() {
        print!("{}", report.csv_string());
        return Ok(report.all_pass());
    }
    let dir = out.or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    let written = report.write(&dir)?;
    let failures = report.hard_failures();
    eprintln!(
        "{}: {} rows, {} hard failures -> {}",
        report.name,
        report.rows.len(),
        failures.len(),
        written.csv.display()
    );
    if !failures.is_empty() {
        eprintln!("failing rows: {failures:?}");
    }
    Ok(failures.is_empty())
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Charsum { group, poly, batch, output } => charsum(&group, &poly, batch.as_ref(), &output),
        Command::BohrL1 { spec, wrapper, output } => bohr_l1(&spec, &wrapper, &output),
        Command::Wrap { group, sets, set, epsilon, delta, a, n, sigma, cls_q, alpha, d_cap, output } => {
            let g = GroupSpec::parse(&group)?;
            let sets = load_sets(&g, sets.as_ref(), &set)?;
            let mut params = WrappingParams::new(epsilon, delta);
            params.n = n;
            params.sigma = sigma;
            params.cls_q = cls_q;
            params.alpha = alpha;
            if let Some(c) = d_cap {
                params.d_cap = c;
            }
            let res = wrap_sets(&sets, &params, a)?;
            let mut sink = output.sink()?;
            serde_json::to_writer_pretty(&mut sink, &res)?;
            writeln!(sink)?;
            Ok(res.hard_pass())
        }
        Command::Count { group, set, equation, method, output } => {
            let g = GroupSpec::parse(&group)?;
            let a = load_set(&g, &set)?;
            let eq = match equation {
                Some(e) => EquationSpec::from_json(&g, &json_arg(&e)?)?,
                None => EquationSpec::sum_equals_square(&g)?,
            };
            let count = count_solutions(&a, &eq, method)?;
            let normalized = count as f64 / (g.order() as f64).powi(eq.s() as i32 - 1);
            let row = vec![
                g.to_string(),
                eq.s().to_string(),
                a.mass().to_string(),
                method.to_string(),
                count.to_string(),
                normalized.to_string(),
            ];
            csv_out(&output, &["group", "s", "size", "method", "count", "normalized"], &[row])?;
            Ok(true)
        }
        Command::Equidist { group, set, exponents, coefficients, rank, output } => {
            let g = GroupSpec::parse(&group)?;
            let sets = load_sets(&g, None, &set)?;
            let coefficients = if coefficients.is_empty() { vec![1; exponents.len()] } else { coefficients };
            let coefficients = coefficients
                .iter()
                .map(|&c| {
                    let x = g.check(c.unsigned_abs())?;
                    Ok(if c < 0 { g.neg(x) } else { x })
                })
                .collect::<Result<Vec<_>>>()?;
            let fc = power_fiber_count(&sets, &exponents, &coefficients, rank)?;
            let row = vec![
                fc.count.to_string(),
                fc.main_term.to_string(),
                fc.error.to_string(),
                opt(fc.certified_bound),
                opt(fc.pass),
                opt(fc.shape),
                opt(fc.shape_ratio),
                fc.hypothesis.to_string(),
            ];
            let header =
                ["count", "main_term", "error", "certified_bound", "pass", "shape", "shape_ratio", "hypothesis"];
            csv_out(&output, &header, &[row])?;
            Ok(fc.pass != Some(false))
        }
        Command::Extremal { group, spec, method, output } => {
            let g = GroupSpec::parse(&group)?;
            let spec = ExtremalSpec::from_json(&g, &json_arg(&spec)?)?;
            let a = extremal_set(&spec);
            let eq = spec.equation()?;
            let count = count_solutions(&a, &eq, method)?;
            let row = vec![
                g.order().to_string(),
                a.mass().to_string(),
                (a.mass() as f64 / g.order() as f64).to_string(),
                spec.expected_density().to_string(),
                eq.s().to_string(),
                count.to_string(),
                (count == 0).to_string(),
            ];
            csv_out(&output, &["p", "size", "density", "expected_density", "s", "count", "zero_pass"], &[row])?;
            Ok(count == 0)
        }
        Command::Obstruction { group, k, s, output } => {
            let g = GroupSpec::parse(&group)?;
            let (_, rep) = congruence_obstruction_set(&g, k, s)?;
            let un = rep.unrepresentable.iter().map(u64::to_string).collect::<Vec<_>>().join("|");
            let row = vec![
                rep.n.to_string(),
                rep.k.to_string(),
                rep.s.to_string(),
                rep.size.to_string(),
                rep.density.to_string(),
                rep.residue_counts[0].to_string(),
                rep.residue_counts[1].to_string(),
                rep.residue_counts[2].to_string(),
                un,
            ];
            let header = ["n", "k", "s", "size", "density", "residue0", "residue1", "residue2", "unrepresentable"];
            csv_out(&output, &header, &[row])?;
            Ok(true)
        }
        Command::Run { config, out, seed, replay } => run_config(&config, out, seed, replay),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
