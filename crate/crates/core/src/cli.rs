//! Command-line front end: `constants`, `sample`, and `experiment`
//! subcommands over the library, with deterministic JSON/CSV output.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain/validation error,
//! 3 resource exhaustion or I/O failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::{
    bateman_horn_sweep, goldbach_sweep, prime_density_sweep, run_bateman_horn, run_goldbach,
    run_prime_density, write_sweep_csv, CountReport, EnsembleOptions,
};
use crate::poly::PolynomialFamily;
use crate::primes::{mertens_product, MertensKind};
use crate::sampler::{sample_range, ModelParameters, SampleManifest, SampledSet, DEFAULT_N_MIN};
use crate::singular::{asymptotic_residuals, compute_c2, compute_cf};

#[derive(Parser)]
#[command(name = "cgmodel", version = crate::VERSION, about = "Random model of the primes: constants, sampling, experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print model constants: Mertens products, the twin constant, and
    /// optionally a family's singular series.
    Constants(ConstantsArgs),
    /// Draw one seeded realization over a range and write its manifest,
    /// bitset, and optionally a member list.
    Sample(SampleArgs),
    /// Run a seeded observed-vs-predicted experiment.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    /// Euler-product truncation.
    #[arg(long, default_value_t = 1e4)]
    truncation: f64,
    /// Family whose singular series to evaluate, e.g. "x,x+2".
    #[arg(long)]
    family: Option<String>,
    /// Emit JSON instead of the human-readable table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SampleArgs {
    /// Lower end of the sampled range.
    #[arg(long, default_value_t = 2)]
    lo: u64,
    /// Upper end of the sampled range (inclusive).
    #[arg(
        long,
        required_unless_present = "from_manifest",
        conflicts_with = "from_manifest"
    )]
    hi: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Support cutoff: integers below this are never members.
    #[arg(long, default_value_t = DEFAULT_N_MIN)]
    n_min: u64,
    /// Re-draw the realization described by an existing manifest file.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
    /// Output directory for manifest.json and sample.bits.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write members.txt, one member per line.
    #[arg(long)]
    members: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(subcommand)]
    which: ExperimentCommand,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Count n <= x with every member of a polynomial family in the set.
    Bh(BhArgs),
    /// Ordered two-member representation counts of an even N.
    Goldbach(GoldbachArgs),
    /// Members that are genuine primes, against the Mertens-weighted
    /// density prediction.
    Primes(PrimesArgs),
}

#[derive(Args)]
struct BhArgs {
    /// Comma-separated family, e.g. "x,x+2".
    #[arg(long)]
    family: String,
    #[arg(long)]
    x: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct GoldbachArgs {
    /// The even integer whose representations are counted.
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PrimesArgs {
    #[arg(long)]
    x: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Number of seeds in the ensemble.
    #[arg(long)]
    seeds: Option<u64>,
    /// First seed; the ensemble uses base_seed..base_seed+seeds.
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    truncation: Option<f64>,
    #[arg(long)]
    n_min: Option<u64>,
    /// Override the certificate's lambda parameter.
    #[arg(long)]
    lambda: Option<f64>,
    /// key=value defaults file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here ("-" for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write an x,observed,predicted sweep (first seed only) here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Number of sweep checkpoints.
    #[arg(long, default_value_t = 8)]
    sweep_points: usize,
}

/// Resolved ensemble settings after merging flags over config defaults.
struct Resolved {
    seeds: Vec<u64>,
    opts: EnsembleOptions,
}

fn parse_config(path: &Path) -> Result<BTreeMap<String, String>> {
    const KNOWN: [&str; 5] = ["seeds", "base_seed", "truncation", "n_min", "lambda"];
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse(format!(
                "{}:{}: expected key=value, got {raw:?}",
                path.display(),
                i + 1
            )));
        };
        let key = key.trim().to_string();
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Parse(format!(
                "{}:{}: unknown config key {key:?} (known: {})",
                path.display(),
                i + 1,
                KNOWN.join(", ")
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn config_get<T: std::str::FromStr>(
    config: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    match config.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("config key {key}: cannot parse {v:?}"))),
    }
}

impl CommonArgs {
    fn resolve(&self) -> Result<Resolved> {
        let config = match &self.config {
            Some(path) => parse_config(path)?,
            None => BTreeMap::new(),
        };
        let count = match self.seeds.or(config_get(&config, "seeds")?) {
            Some(0) => return Err(Error::Validation("seed count must be positive".into())),
            Some(c) => c,
            None => 1,
        };
        let base = self
            .base_seed
            .or(config_get(&config, "base_seed")?)
            .unwrap_or(0);
        let opts = EnsembleOptions {
            n_min: self
                .n_min
                .or(config_get(&config, "n_min")?)
                .unwrap_or(DEFAULT_N_MIN),
            truncation: self
                .truncation
                .or(config_get(&config, "truncation")?)
                .unwrap_or(1e4),
            lambda: self.lambda.or(config_get(&config, "lambda")?),
        };
        Ok(Resolved {
            seeds: (base..base
                .checked_add(count)
                .ok_or_else(|| Error::Validation("seed range overflows".into()))?)
                .collect(),
            opts,
        })
    }
}

fn emit_report(report: &CountReport, dest: Option<&Path>) -> Result<()> {
    let body = serde_json::to_string_pretty(report)?;
    match dest {
        Some(p) if p.as_os_str() == "-" => println!("{body}"),
        Some(p) => fs::write(p, body + "\n")?,
        None => {
            println!("kind:      {:?}", report.kind);
            println!("seeds:     {}", report.seeds.len());
            println!("mean:      {:.3}", report.mean);
            println!("stddev:    {:.3}", report.stddev);
            println!("predicted: {:.3}", report.predicted);
            println!("ratio:     {:.4}", report.ratio);
            if let Some(cert) = &report.certificate {
                println!(
                    "certificate: k={} lambda={:.3} threshold={:.3} violations={}",
                    cert.k, cert.lambda, cert.threshold, cert.violations
                );
            }
        }
    }
    Ok(())
}

fn run_constants(args: &ConstantsArgs) -> Result<()> {
    let t = args.truncation;
    let inverse = mertens_product(t, 1, MertensKind::Inverse)?;
    let direct = mertens_product(t, 1, MertensKind::Direct)?;
    let c2 = compute_c2(t)?;
    let family = args
        .family
        .as_deref()
        .map(|s| -> Result<_> {
            let fam = PolynomialFamily::parse(s)?.check_admissibility()?;
            let cf = compute_cf(&fam, t)?;
            let lemma2 = asymptotic_residuals(fam.k(), t, Some(&fam))?;
            Ok((cf, lemma2))
        })
        .transpose()?;
    if args.json {
        let mut doc = json!({
            "truncation": t,
            "mertens_inverse": inverse.value,
            "mertens_direct": direct.value,
            "c2": c2,
        });
        if let Some((cf, lemma2)) = &family {
            doc["family"] = json!({
                "description": cf.family,
                "k": cf.k,
                "value": cf.value,
                "tail_error": cf.tail_error,
                "converged_fast": cf.converged_fast,
                "asymptotic_residual": lemma2.family,
            });
        }
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("truncation T = {t}");
        println!("prod_(p<=T) (1-1/p)^-1 = {:.12}", inverse.value);
        println!("prod_(p<=T) (1-1/p)    = {:.12}", direct.value);
        println!("C2(T) = {c2:.12}");
        if let Some((cf, _)) = &family {
            println!(
                "C_f(T) for {{{}}} (k = {}) = {:.12}  [tail ~ {:.2e}]",
                cf.family, cf.k, cf.value, cf.tail_error
            );
        }
    }
    Ok(())
}

fn write_sample(set: &SampledSet, out: &Path, members: bool) -> Result<()> {
    fs::create_dir_all(out)?;
    let manifest = serde_json::to_string_pretty(&set.manifest())?;
    fs::write(out.join("manifest.json"), manifest + "\n")?;
    let mut bits = fs::File::create(out.join("sample.bits"))?;
    set.write_bitset(&mut bits)?;
    bits.flush()?;
    if members {
        fs::write(out.join("members.txt"), set.member_list())?;
    }
    println!(
        "seed {} range [{}, {}]: {} members",
        set.params().seed,
        set.lo(),
        set.hi(),
        set.count()
    );
    Ok(())
}

fn run_sample(args: &SampleArgs) -> Result<()> {
    let set = match &args.from_manifest {
        Some(path) => {
            let manifest: SampleManifest = serde_json::from_str(&fs::read_to_string(path)?)?;
            SampledSet::from_manifest(&manifest)?
        }
        None => {
            let params = ModelParameters::with_n_min(args.seed, args.n_min)?;
            sample_range(args.lo, args.hi.expect("clap enforces hi"), &params)?
        }
    };
    write_sample(&set, &args.out, args.members)
}

fn run_experiment(args: &ExperimentArgs) -> Result<()> {
    match &args.which {
        ExperimentCommand::Bh(a) => {
            let family = PolynomialFamily::parse(&a.family)?;
            let r = a.common.resolve()?;
            let report = run_bateman_horn(&family, a.x, &r.seeds, &r.opts)?;
            emit_report(&report, a.common.json.as_deref())?;
            if let Some(path) = &a.common.csv {
                let rows =
                    bateman_horn_sweep(&family, a.x, r.seeds[0], &r.opts, a.common.sweep_points)?;
                write_sweep_csv(fs::File::create(path)?, &rows)?;
            }
            Ok(())
        }
        ExperimentCommand::Goldbach(a) => {
            let r = a.common.resolve()?;
            let report = run_goldbach(a.n, &r.seeds, &r.opts)?;
            emit_report(&report, a.common.json.as_deref())?;
            if let Some(path) = &a.common.csv {
                let rows = goldbach_sweep(a.n, r.seeds[0], &r.opts, a.common.sweep_points)?;
                write_sweep_csv(fs::File::create(path)?, &rows)?;
            }
            Ok(())
        }
        ExperimentCommand::Primes(a) => {
            let r = a.common.resolve()?;
            let report = run_prime_density(a.x, &r.seeds, &r.opts)?;
            emit_report(&report, a.common.json.as_deref())?;
            if let Some(path) = &a.common.csv {
                let rows = prime_density_sweep(a.x, r.seeds[0], &r.opts, a.common.sweep_points)?;
                write_sweep_csv(fs::File::create(path)?, &rows)?;
            }
            Ok(())
        }
    }
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Constants(args) => run_constants(args),
        Command::Sample(args) => run_sample(args),
        Command::Experiment(args) => run_experiment(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
