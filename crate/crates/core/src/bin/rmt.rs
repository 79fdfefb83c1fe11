use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rmt_core::harness::check::{check_diagnostics, check_figure1, check_figure2, check_report, check_semicircle, CheckLine};
use rmt_core::harness::{
    diagnostics_reductions, figure1, figure2, law_csv, run_experiment, semicircle_experiment, DiagnosticsOptions,
    ExperimentConfig, FigureOptions, KernelConfig, LawFailureKind, SemicircleOptions, FIGURE1_BETAS, FIGURE2_TAUS,
};
use rmt_core::laws::{
    linear_grid, zeta_indicator, GeneralizedMpLaw, LawSpec, MPLaw, SCLaw, SolverOptions, DEFAULT_V_SCHEDULE,
};
use rmt_core::{exec::with_threads, Exec, RmtError};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "rmt", version, about = "Spectra of kernelized truncated covariance matrices")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Apply the acceptance thresholds and exit with code 4 on a breach.
    #[arg(long, global = true)]
    check: bool,
    /// Run everything on one thread without the parallel executor.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Indicator-kernel spectra for several radii.
    Figure1 {
        #[command(flatten)]
        fig: FigureArgs,
        /// Radius parameters β; `inf` is the complete graph.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        betas: Option<Vec<f64>>,
    },
    /// Gaussian-kernel spectra for several bandwidths.
    Figure2 {
        #[command(flatten)]
        fig: FigureArgs,
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
    },
    /// The normalized matrix E against a semicircle law (needs p² > n).
    Semicircle {
        #[arg(long, default_value_t = 400)]
        p: usize,
        #[arg(long, default_value_t = 20_000)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value = "out/semicircle")]
        out: PathBuf,
    },
    /// Reduction gaps W₂(M, M̄), max|ξ′|/n and the off-diagonal norm across sizes.
    Diagnostics {
        /// Sizes as p:n pairs.
        #[arg(long, value_delimiter = ',', default_value = "100:250,200:500,400:1000")]
        sizes: Vec<String>,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        mc_conditional: usize,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value = "out/diagnostics")]
        out: PathBuf,
    },
    /// Tabulate a law's density and CDF without simulating.
    Law {
        #[arg(long = "type", value_enum)]
        kind: LawKind,
        #[arg(long, default_value_t = 0.4)]
        c: f64,
        /// MP scale.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// SC variance ϖ².
        #[arg(long, default_value_t = 1.0)]
        variance: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// ζ parameter of the generalized law (indicator kernel).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z_alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        x_lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_hi: Option<f64>,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long, default_value_t = 200)]
    p: usize,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    bins: usize,
    #[arg(long, default_value_t = 400)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl FigureArgs {
    fn options(&self) -> FigureOptions {
        FigureOptions {
            p: self.p,
            n: self.n,
            sigma: self.sigma,
            trials: self.trials,
            seed: self.seed,
            bins: self.bins,
            points: self.points,
        }
    }
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelChoice::Indicator)]
    kernel: KernelChoice,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    kernel_z_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    kernel_tau: f64,
}

impl KernelArgs {
    fn config(&self) -> KernelConfig {
        match self.kernel {
            KernelChoice::Constant => KernelConfig::constant(),
            KernelChoice::Indicator => KernelConfig::indicator_z_alpha(self.kernel_z_alpha),
            KernelChoice::Gaussian => KernelConfig::gaussian(self.kernel_tau),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelChoice {
    Constant,
    Indicator,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawKind {
    Mp,
    Sc,
    Genmp,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let threads = cli.threads;
    match with_threads(threads, || run(&cli, exec)) {
        Ok(lines) => {
            for l in &lines {
                println!("{l}");
            }
            if cli.check && lines.iter().any(|l| !l.pass) {
                ExitCode::from(EXIT_CHECK)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

enum Failure {
    Exit(u8, String),
}

impl From<RmtError> for Failure {
    fn from(e: RmtError) -> Self {
        let code = match e {
            RmtError::Config(_) | RmtError::InvalidArgument(_) => EXIT_CONFIG,
            RmtError::SolverFailure { .. } | RmtError::InversionQuality { .. } => EXIT_SOLVER,
            _ => 1,
        };
        Failure::Exit(code, e.to_string())
    }
}

fn run(cli: &Cli, exec: Exec) -> Result<Vec<CheckLine>, Failure> {
    match &cli.command {
        Command::Simulate { config, out } => {
            let cfg = ExperimentConfig::from_file(config)?;
            let result = run_experiment(&cfg, exec)?;
            let dir = out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            result.write_artifacts(&dir)?;
            let r = &result.report;
            eprintln!("wrote {} (pooled KS {:?})", dir.display(), r.pooled_ks);
            if let Some(f) = &r.law_failure {
                if matches!(f.kind, LawFailureKind::Solver | LawFailureKind::Inversion) {
                    return Err(Failure::Exit(EXIT_SOLVER, f.message.clone()));
                }
            }
            Ok(checks(cli, || check_report(r)))
        }
        Command::Figure1 { fig, betas } => {
            let betas = betas.clone().unwrap_or_else(|| FIGURE1_BETAS.to_vec());
            let f = figure1(&fig.options(), &betas, exec)?;
            let dir = fig.out.clone().unwrap_or_else(|| "out/figure1".into());
            f.write(&dir)?;
            for p in &f.panels {
                eprintln!(
                    "beta={:?}: KS {:?}, KS vs MP {:.4}, mean {:.4} (predicted {:?})",
                    p.beta, p.pooled_ks, p.ks_vs_mp, p.pooled_mean, p.predicted_mean
                );
            }
            Ok(checks(cli, || check_figure1(&f)))
        }
        Command::Figure2 { fig, taus } => {
            let taus = taus.clone().unwrap_or_else(|| FIGURE2_TAUS.to_vec());
            let f = figure2(&fig.options(), &taus, exec)?;
            let dir = fig.out.clone().unwrap_or_else(|| "out/figure2".into());
            f.write(&dir)?;
            for p in &f.panels {
                eprintln!(
                    "tau={}: KS vs MP(alpha^2) {:.4}, vs MP(alpha) {:.4}, vs MP(1) {:.4}",
                    p.tau, p.ks_alpha_squared, p.ks_alpha, p.ks_unit
                );
            }
            Ok(checks(cli, || check_figure2(&f)))
        }
        Command::Semicircle { p, n, sigma, trials, seed, kernel, out } => {
            let opts = SemicircleOptions {
                p: *p,
                n: *n,
                sigma: *sigma,
                trials: *trials,
                seed: *seed,
                kernel: kernel.config(),
                ..Default::default()
            };
            let s = semicircle_experiment(&opts, exec)?;
            s.write(out)?;
            eprintln!("pooled KS {:?}, centering {:?}", s.run.report.pooled_ks, s.centering);
            Ok(checks(cli, || check_semicircle(&s)))
        }
        Command::Diagnostics { sizes, seeds, sigma, seed, mc_conditional, kernel, out } => {
            let sizes = sizes.iter().map(|s| parse_size(s)).collect::<Result<Vec<_>, _>>()?;
            let opts = DiagnosticsOptions {
                sizes,
                kernel: kernel.config(),
                sigma: *sigma,
                seeds: *seeds,
                master_seed: *seed,
                mc_conditional: *mc_conditional,
            };
            let d = diagnostics_reductions(&opts, exec)?;
            d.write(out)?;
            for s in &d.summary {
                eprintln!(
                    "p={} n={}: median W2 {:.5}, median max|xi'|/n {:.5} (bound {:.5}), median offdiag {:.5}",
                    s.p, s.n, s.median_w2, s.median_xi_prime, s.xi_bound, s.median_offdiag
                );
            }
            Ok(checks(cli, || check_diagnostics(&d)))
        }
        Command::Law { kind, c, scale, variance, sigma, z_alpha, x_lo, x_hi, points, out } => {
            let law = match kind {
                LawKind::Mp => LawSpec::Mp(MPLaw::new(*c, *scale)?),
                LawKind::Sc => LawSpec::Sc(SCLaw::new(*variance)?),
                LawKind::Genmp => {
                    LawSpec::GeneralizedMp(GeneralizedMpLaw::new(*c, *sigma, zeta_indicator(*z_alpha, 64)?)?)
                }
            };
            let (lo, hi) = law.default_range();
            let grid = linear_grid(x_lo.unwrap_or(lo), x_hi.unwrap_or(hi), *points)?;
            let table = law.tabulate(&grid, &DEFAULT_V_SCHEDULE, &SolverOptions::default(), exec)?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(RmtError::from)?;
            }
            std::fs::write(out, law_csv(&table.x, &table.density, &table.cdf)).map_err(RmtError::from)?;
            eprintln!("wrote {}", out.display());
            Ok(Vec::new())
        }
    }
}

fn checks(cli: &Cli, f: impl FnOnce() -> Vec<CheckLine>) -> Vec<CheckLine> {
    if cli.check {
        f()
    } else {
        Vec::new()
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Exit(EXIT_CONFIG, format!("size must look like p:n, got {s:?}"));
    let (p, n) = s.split_once(':').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}
