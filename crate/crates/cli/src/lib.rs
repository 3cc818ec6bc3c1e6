//! Command-line front end for the `twinkernel` library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.

pub mod config;
mod output;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

use twinkernel::estimators::{
    series_estimator, soft_filter_estimate, transported_series_estimator, DensityEstimate, KernelEstimate, MultiCenterSystem, Sample,
};
use twinkernel::experiments::{bias_variance_sweep, equivariance_error_identity, fmt_f64, group_label, multimodal_comparison, rate_study, CsvTable};
use twinkernel::group::{transported_basis_at, Transport};
use twinkernel::kernel::{Kernel, SpectralKernel, TransportedKernel};
use twinkernel::orthopoly::{Family, OrthonormalBasis};
use twinkernel::verify::run_verify;

pub use config::*;
pub use output::Provenance;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "twinkernel", version, about = "Transported Mercer kernels, orthogonal series estimators and their numerical checks")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "TWINKERNEL_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite and write equivariance tables.
    Verify {
        /// Negative control: invert every Jacobian.
        #[arg(long)]
        corrupt_jacobian: bool,
    },
    /// Fit a density estimate to a data file (one number per line).
    Estimate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Run Monte Carlo studies.
    Simulate {
        /// Study to run (repeatable); defaults to all.
        #[arg(long = "study", value_enum)]
        studies: Vec<Study>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Tabulate transported basis functions on a grid.
    Transport,
    /// Tabulate base and transported kernels on a grid.
    KernelTable,
}

/// Result of a completed command.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success { files: Vec<PathBuf> },
    VerificationFailed { failures: Vec<String>, files: Vec<PathBuf> },
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Success { .. } => EXIT_OK,
            Outcome::VerificationFailed { .. } => EXIT_VERIFICATION,
        }
    }
}

pub fn load_config(path: Option<&Path>) -> anyhow::Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

/// Parses one real per line; blank lines are skipped.
pub fn read_data(path: &Path) -> anyhow::Result<Sample> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading data {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t.parse().with_context(|| format!("line {}: cannot parse {t:?} as a number", i + 1))?;
        values.push(v);
    }
    if values.is_empty() {
        bail!("data file {} contains no values", path.display());
    }
    Ok(Sample::new(values)?)
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut cfg = load_config(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                bail!("--threads must be at least 1");
            }
            b = b.num_threads(n);
        }
        b.build()?
    };
    pool.install(|| dispatch(cli, cfg))
}

fn dispatch(cli: &Cli, mut cfg: RunConfig) -> anyhow::Result<Outcome> {
    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("twinkernel-out"));
    match &cli.command {
        Command::Verify { corrupt_jacobian } => {
            let mut v = cfg.verify.clone().unwrap_or_default();
            if *corrupt_jacobian {
                v.corrupt_jacobian = true;
            }
            if let Some(s) = cfg.seed {
                v.seed = s;
            }
            cfg.verify = Some(v.clone());
            let prov = Provenance::new(&cfg, v.seed)?;
            let report = run_verify(&v)?;
            let files = vec![
                output::write_csv(&out_dir, "equivariance.csv", &prov, &report.to_csv())?,
                output::write_json(&out_dir, "verify.json", &prov, &report)?,
            ];
            if report.passed() {
                Ok(Outcome::Success { files })
            } else {
                let failures = report
                    .failures()
                    .map(|c| format!("{} [{}]: {:e} vs tolerance {:e}", c.name, c.group, c.value, c.tolerance))
                    .collect();
                Ok(Outcome::VerificationFailed { failures, files })
            }
        }
        Command::Estimate { data, method, k, h } => {
            let mut e = cfg.estimate.clone().unwrap_or_default();
            if let Some(m) = method {
                e.method = *m;
            }
            if let Some(k) = k {
                e.k = *k;
            }
            if let Some(h) = h {
                e.h = Some(*h);
            }
            cfg.estimate = Some(e.clone());
            let prov = Provenance::new(&cfg, cfg.seed.unwrap_or(0))?;
            let sample = read_data(data)?;
            estimate(&e, &sample, &out_dir, &prov)
        }
        Command::Simulate { studies, replicates } => {
            let mut s = cfg.simulate.clone().unwrap_or_default();
            if !studies.is_empty() {
                s.studies = studies.clone();
            }
            for study in s.selected() {
                let mut ec = s.experiment(study);
                if let Some(r) = replicates {
                    ec.replicates = *r;
                }
                if let Some(seed) = cfg.seed {
                    ec.seed = seed;
                }
                match study {
                    Study::BiasVariance => s.bias_variance = Some(ec),
                    Study::Rates => s.rates = Some(ec),
                    Study::Equivariance => s.equivariance = Some(ec),
                    Study::Multimodal => s.multimodal = Some(ec),
                }
            }
            cfg.simulate = Some(s.clone());
            simulate(&s, &cfg, &out_dir)
        }
        Command::Transport => {
            let t = cfg.transport.clone().unwrap_or_default();
            cfg.transport = Some(t.clone());
            let prov = Provenance::new(&cfg, cfg.seed.unwrap_or(0))?;
            let basis = OrthonormalBasis::new(t.basis);
            let grid = t.grid.unwrap_or_else(|| GridSpec::for_family(t.basis));
            let mut csv = String::from("g,x,k,value\n");
            let mut groups = vec![twinkernel::group::GroupElement::IDENTITY];
            groups.extend(t.groups.iter().filter(|g| !g.is_identity()).copied());
            for g in groups {
                let tr = Transport::new(g, basis.measure())?;
                let label = group_label(&g);
                for x in grid.points() {
                    for (k, v) in transported_basis_at(&tr, basis, t.k_max, x).iter().enumerate() {
                        csv.push_str(&format!("{label},{},{k},{}\n", fmt_f64(x), fmt_f64(*v)));
                    }
                }
            }
            let files = vec![output::write_csv(&out_dir, "transport.csv", &prov, &csv)?];
            Ok(Outcome::Success { files })
        }
        Command::KernelTable => {
            let t = cfg.kernel_table.clone().unwrap_or_default();
            cfg.kernel_table = Some(t.clone());
            let prov = Provenance::new(&cfg, cfg.seed.unwrap_or(0))?;
            t.profile.validate().map_err(anyhow::Error::msg)?;
            let mut kernel = match (t.basis, t.profile) {
                (Family::HermiteProbabilist, twinkernel::kernel::EigenvalueProfile::Geometric { rho }) => SpectralKernel::mehler(rho),
                _ => SpectralKernel::new(OrthonormalBasis::new(t.basis), t.profile),
            };
            if let Some(ks) = t.k_spec {
                kernel = kernel.with_k_spec(ks);
            }
            let grid = t.grid.unwrap_or(GridSpec {
                points: 21,
                ..GridSpec::for_family(t.basis)
            });
            let mut csv = String::from("g,x,y,value\n");
            let mut groups = vec![twinkernel::group::GroupElement::IDENTITY];
            groups.extend(t.groups.iter().filter(|g| !g.is_identity()).copied());
            for g in groups {
                let tk = TransportedKernel::new(kernel.clone(), g)?;
                let label = group_label(&g);
                for x in grid.points() {
                    for y in grid.points() {
                        csv.push_str(&format!("{label},{},{},{}\n", fmt_f64(x), fmt_f64(y), fmt_f64(tk.eval(x, y))));
                    }
                }
            }
            let files = vec![output::write_csv(&out_dir, "kernel_table.csv", &prov, &csv)?];
            Ok(Outcome::Success { files })
        }
    }
}

fn estimate(e: &EstimateConfig, sample: &Sample, out_dir: &Path, prov: &Provenance) -> anyhow::Result<Outcome> {
    let basis = OrthonormalBasis::new(e.basis);
    let grid = e.grid.unwrap_or_else(|| GridSpec::for_family(e.basis));
    let (json, est): (serde_json::Value, Box<dyn DensityEstimate>) = match e.method {
        Method::Series => {
            let s = series_estimator(sample, basis, e.k)?;
            (serde_json::to_value(&s)?, Box::new(s))
        }
        Method::SeriesTransported => {
            let g = e.group.context("method series-transported needs a group element")?;
            let s = transported_series_estimator(sample, basis, e.k, g)?;
            (serde_json::to_value(&s)?, Box::new(s))
        }
        Method::Soft => {
            let h = e.h.context("method soft needs a bandwidth h")?;
            let s = soft_filter_estimate(sample, basis, h, &e.rate, e.k)?;
            (serde_json::json!({ "h": h, "rate": e.rate, "estimate": s }), Box::new(s))
        }
        Method::Parzen => {
            let h = e.h.context("method parzen needs a bandwidth h")?;
            let k = KernelEstimate::new(sample.clone(), h)?;
            (serde_json::json!({ "h": h, "n": sample.len() }), Box::new(k))
        }
        Method::Multimodal => {
            if e.basis != Family::HermiteProbabilist {
                bail!("method multimodal needs the Hermite basis");
            }
            let m = MultiCenterSystem::with_defaults(&e.centers, e.k)?.fit(sample)?;
            (serde_json::to_value(&m)?, Box::new(m))
        }
    };
    let json = serde_json::json!({ "method": e.method, "n": sample.len(), "fit": json });
    let mut csv = String::from("x,f_hat\n");
    for x in grid.points() {
        csv.push_str(&format!("{},{}\n", fmt_f64(x), fmt_f64(est.eval(x))));
    }
    let files = vec![
        output::write_json(out_dir, "estimate.json", prov, &json)?,
        output::write_csv(out_dir, "estimate.csv", prov, &csv)?,
    ];
    Ok(Outcome::Success { files })
}

fn simulate(s: &SimulateConfig, cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<Outcome> {
    let mut files = Vec::new();
    for study in s.selected() {
        let ec = s.experiment(study);
        let prov = Provenance::new(cfg, ec.seed)?;
        let stem = study.file_stem();
        let (csv, json) = match study {
            Study::BiasVariance => {
                let r = bias_variance_sweep(&ec)?;
                (r.to_csv(), serde_json::to_value(&r)?)
            }
            Study::Rates => {
                let r = rate_study(&ec)?;
                (r.to_csv(), serde_json::to_value(&r)?)
            }
            Study::Equivariance => {
                let r = equivariance_error_identity(&ec)?;
                (r.to_csv(), serde_json::to_value(&r)?)
            }
            Study::Multimodal => {
                let r = multimodal_comparison(&ec)?;
                (r.to_csv(), serde_json::to_value(&r)?)
            }
        };
        files.push(output::write_csv(out_dir, &format!("{stem}.csv"), &prov, &csv)?);
        files.push(output::write_json(out_dir, &format!("{stem}.json"), &prov, &json)?);
    }
    Ok(Outcome::Success { files })
}
