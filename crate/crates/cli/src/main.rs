use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use splitclust::certificate::{
    build_golfing_certificate, build_worstcase_certificate, disagreement_stats, golfing_params, sample_gamma_partition,
    theorem2_interval, verify_deterministic, verify_probabilistic, CertificateReport, CertificateSets,
};
use splitclust::clustering::Clustering;
use splitclust::genbench::{brute_force_min, generate_instance, run_sweep, sweep_meta, GeneratorParams, NoiseMode, SweepSpec};
use splitclust::graph::PartialGraph;
use splitclust::pipeline::{default_eta_grid, optimal_cluster, recommended_eta};
use splitclust::splitter::SolverConfig;
use splitclust::tolerances::Tolerances;
use splitclust::validity::{build_bstar, count_disagreements};

#[derive(Parser)]
#[command(name = "splitclust", version, about = "Cluster partially observed graphs by sparse plus low-rank splitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a planted-partition graph.
    Generate {
        /// Cluster sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        p0: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Bernoulli)]
        mode: Mode,
        /// Disagreements per node in `fixed` mode.
        #[arg(long, default_value_t = 0)]
        b: usize,
        /// Graph file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the planted clustering here.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Run the eta line search and write the clustering on success.
    Cluster {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Eta values to try in order, comma separated.
        #[arg(long, value_delimiter = ',')]
        eta_grid: Option<Vec<f64>>,
        /// Eta tried first (alone when no grid is given).
        #[arg(long)]
        eta: Option<f64>,
        /// Relative residual at which the solver stops.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// CSV with one row per solve.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check the optimality certificate of a clustering.
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        clustering: PathBuf,
        #[arg(long, value_enum)]
        mode: CertMode,
        /// Defaults to the interval midpoint (worstcase) or 1/(1+sqrt(n p0)) (golfing).
        #[arg(long)]
        eta: Option<f64>,
        /// Seed for splitting the observations (golfing).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exact minimum-disagreement clustering for n <= 12.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a success-rate sweep described by a TOML file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Rates CSV; metadata goes to `<out>.meta`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Bernoulli,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertMode {
    Worstcase,
    Golfing,
}

enum Fail {
    Usage(String),
    Declared,
    Certificate,
}

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Run = Result<(), Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Run {
    fs::write(path, text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<PartialGraph, Fail> {
    PartialGraph::parse(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn partition_text(c: &Clustering) -> String {
    c.clusters()
        .iter()
        .map(|cl| format!("{{{}}}", cl.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

#[allow(clippy::too_many_arguments)]
fn generate(sizes: Vec<usize>, tau: f64, p0: f64, seed: u64, mode: Mode, b: usize, out: Option<PathBuf>, truth: Option<PathBuf>) -> Run {
    let mode = match mode {
        Mode::Bernoulli => NoiseMode::BernoulliFlips,
        Mode::Fixed => NoiseMode::FixedPerNode(b),
    };
    let inst = generate_instance(&GeneratorParams { sizes, tau, p0, seed, mode })?;
    let text = inst.graph.to_text();
    match out {
        Some(p) => write(&p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = truth {
        write(&p, &inst.truth.to_text())?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cluster(
    input: PathBuf,
    out: Option<PathBuf>,
    eta_grid: Option<Vec<f64>>,
    eta: Option<f64>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    trace: Option<PathBuf>,
) -> Run {
    let g = load_graph(&input)?;
    let mut grid: Vec<f64> = eta.into_iter().collect();
    match eta_grid {
        Some(v) => grid.extend(v),
        None if eta.is_none() => {
            grid.push(recommended_eta(g.n(), g.observation_rate().max(f64::MIN_POSITIVE))?);
            grid.extend(default_eta_grid());
        }
        None => {}
    }
    let mut cfg = SolverConfig::default();
    if let Some(t) = tol {
        cfg.tol_rel = t;
    }
    if let Some(m) = max_iters {
        cfg.max_iters = m;
    }
    let outcome = optimal_cluster(&g, &grid, &cfg)?;
    if let Some(p) = trace {
        write(&p, &outcome.trace_csv())?;
    }
    let (Some(c), Some(eta), Some(dis)) = (&outcome.clustering, outcome.eta_used, outcome.disagreements) else {
        println!("status={} solves={}", outcome.status.as_str(), outcome.trace.len());
        return Err(Fail::Declared);
    };
    let header = format!("# status={} eta={eta} disagreements={dis} clusters={}\n", outcome.status.as_str(), c.num_clusters());
    match out {
        Some(p) => {
            write(&p, &format!("{header}{}", c.to_text()))?;
            print!("{header}");
        }
        None => print!("{header}{}", c.to_text()),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn certify(
    input: PathBuf,
    clustering: PathBuf,
    mode: CertMode,
    eta: Option<f64>,
    seed: u64,
    max_terms: usize,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Run {
    let g = load_graph(&input)?;
    let c = Clustering::parse(&read(&clustering)?).map_err(|e| Fail::Usage(format!("{}: {e}", clustering.display())))?;
    let sets = CertificateSets::from_graph(&g, &c)?;
    let bstar = build_bstar(&g, &c)?;
    let tol = Tolerances::default();
    let n = g.n();
    let mut text = String::new();
    let (report, built): (CertificateReport, bool) = match mode {
        CertMode::Worstcase => {
            let stats = disagreement_stats(&g, &c)?;
            let iv = theorem2_interval(n, &stats);
            let eta = eta.unwrap_or_else(|| iv.midpoint());
            text += &format!(
                "# worstcase eta={eta} dmax={} alpha={} interval=({}, {}) feasible={}\n",
                stats.dmax, stats.alpha, iv.lo, iv.hi, iv.feasible
            );
            let cert = build_worstcase_certificate(&c, &bstar, &sets.omega_obs, eta, tol.series_term, max_terms)?;
            text += &format!("# series_terms={} converged={} theta={}\n", cert.series_terms, cert.converged, cert.theta_estimate);
            (verify_deterministic(&cert, &c, &bstar, &sets.omega_obs, eta, tol.certificate_equality)?, cert.converged)
        }
        CertMode::Golfing => {
            let p0 = g.observation_rate();
            let tau = count_disagreements(&g, &c)? as f64 / g.num_observed().max(1) as f64;
            let eta = match eta {
                Some(e) => e,
                None => recommended_eta(n, p0)?,
            };
            let params = golfing_params(n, p0, tau)?;
            let parts = sample_gamma_partition(&sets.gamma, params.k0, params.q, seed)?;
            let cert = build_golfing_certificate(&c, &bstar, &parts, params.q, eta)?;
            text += &format!("# golfing eta={eta} k0={} q={} seed={seed}\n", params.k0, params.q);
            text += &format!("# residual_monotone={} final_residual={:e}\n", cert.residual_monotone(), cert.residuals.last().copied().unwrap_or(0.0));
            (verify_probabilistic(&cert, &c, &bstar, &sets.gamma, &sets.omega, eta, tol.certificate_equality)?, true)
        }
    };
    text += &report.to_text();
    print!("{text}");
    if let Some(p) = out {
        write(&p, &text)?;
    }
    if let Some(p) = csv {
        write(&p, &report.to_csv())?;
    }
    if report.passed() && built {
        Ok(())
    } else {
        Err(Fail::Certificate)
    }
}

fn oracle(input: PathBuf) -> Run {
    let g = load_graph(&input)?;
    let (c, min) = brute_force_min(&g)?;
    println!("minimum {min}");
    println!("partition {}", partition_text(&c));
    Ok(())
}

fn sweep(spec: PathBuf, out: PathBuf, jobs: usize) -> Run {
    let spec = SweepSpec::from_toml(&read(&spec)?)?;
    let result = run_sweep(&spec, jobs)?;
    write(&out, &result.to_csv())?;
    let mut meta = out.clone().into_os_string();
    meta.push(".meta");
    write(Path::new(&meta), &sweep_meta(&spec))?;
    print!("{}", result.to_csv());
    Ok(())
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Generate { sizes, tau, p0, seed, mode, b, out, truth } => generate(sizes, tau, p0, seed, mode, b, out, truth),
        Command::Cluster { input, out, eta_grid, eta, tol, max_iters, trace } => {
            cluster(input, out, eta_grid, eta, tol, max_iters, trace)
        }
        Command::Certify { input, clustering, mode, eta, seed, max_terms, out, csv } => {
            certify(input, clustering, mode, eta, seed, max_terms, out, csv)
        }
        Command::Oracle { input } => oracle(input),
        Command::Sweep { spec, out, jobs } => sweep(spec, out, jobs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Declared) => ExitCode::from(2),
        Err(Fail::Certificate) => ExitCode::from(3),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
