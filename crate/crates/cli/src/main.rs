use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hofstadter::effective::{
    schur_effective_hopping, spectral_effective_hopping, FullModelSpec, ValidatorResult,
};
use hofstadter::ground::{
    detect_crossings, fidelity_trace, fit_alpha0, ground_state, DEFAULT_REFINE_WIDTH,
};
use hofstadter::io as codec;
use hofstadter::momentum::{find_peaks, sine_transform_2d, MomentumSource};
use hofstadter::spectrum::{butterfly_scan, uniform_grid};
use hofstadter::{Error, Gauge, GaugeConfig, LatticeSpec};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  invalid arguments or configuration
  3  eigensolver or Hamiltonian failure
  4  I/O error
  5  no level crossing found
  6  resonance in the effective-model reduction";

#[derive(Parser)]
#[command(name = "hofstadter", version, about = "Finite Harper-Hofstadter lattice analyses", after_help = EXIT_CODES)]
struct Cli {
    /// Output file; stdout when omitted.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every eigenvalue on a uniform alpha grid: CSV alpha,index,energy.
    Butterfly {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 0.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha_max: f64,
        /// Grid points including both ends.
        #[arg(long, default_value_t = 201)]
        steps: usize,
    },
    /// Ground-state amplitudes: CSV p,q,re,im,abs2.
    Ground {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        alpha: f64,
    },
    /// Ground-state density: CSV p,q,density.
    Density {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        alpha: f64,
    },
    /// Ground-state fidelity trace: CSV alpha,fidelity.
    Fidelity {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Level crossings from the fidelity trace: JSON report.
    Crossings {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Report grid brackets only.
        #[arg(long)]
        no_refine: bool,
    },
    /// Sine-transform momentum map: CSV kp,kq,magnitude.
    Momentum {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = SourceArg::Wavefunction)]
        source: SourceArg,
        /// Print only the N strongest local maxima.
        #[arg(long, value_name = "N")]
        peaks: Option<usize>,
    },
    /// Reduce the spin/resonator chain to a hopping amplitude: JSON report.
    ValidateEffective(ValidateArgs),
    /// First crossing versus 2/(L+1): CSV L,alpha0,prediction,deviation.
    FitAlpha0 {
        #[arg(long, value_delimiter = ',', default_value = "5,6,7,8,9,10")]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = GaugeArg::Symmetric)]
        gauge: GaugeArg,
    },
}

#[derive(Args)]
struct LatticeArgs {
    /// Side of a square lattice.
    #[arg(long, required_unless_present_all = ["rows", "cols"])]
    size: Option<usize>,
    #[arg(long, requires = "cols", conflicts_with = "size")]
    rows: Option<usize>,
    #[arg(long, requires = "rows", conflicts_with = "size")]
    cols: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    hopping: f64,
    #[arg(long, value_enum, default_value_t = GaugeArg::Symmetric)]
    gauge: GaugeArg,
}

impl LatticeArgs {
    fn spec(&self) -> Result<LatticeSpec, Error> {
        let (rows, cols) = match self.size {
            Some(l) => (l, l),
            None => (self.rows.unwrap_or(0), self.cols.unwrap_or(0)),
        };
        LatticeSpec::new(rows, cols, self.hopping)
    }

    fn gauge(&self, alpha: f64) -> Result<GaugeConfig, Error> {
        Ok(GaugeConfig::new(finite("alpha", alpha)?, self.gauge.into()))
    }
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, default_value_t = 0.0)]
    alpha_min: f64,
    #[arg(long, default_value_t = 0.6)]
    alpha_max: f64,
    #[arg(long, default_value_t = 0.001)]
    step: f64,
}

impl RangeArgs {
    fn check(&self) -> Result<(), Error> {
        finite("alpha-min", self.alpha_min)?;
        finite("alpha-max", self.alpha_max)?;
        if self.alpha_max < self.alpha_min {
            return Err(invalid("alpha-max must not be below alpha-min"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(invalid("step must be positive"));
        }
        Ok(())
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// Named parameter set; explicit flags override it.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Drive phases, one per site.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    theta: Option<Vec<f64>>,
    /// Spins per site.
    #[arg(long)]
    spins: Option<usize>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Schur)]
    method: MethodArg,
}

impl ValidateArgs {
    fn spec(&self) -> Result<(FullModelSpec, &'static str), Error> {
        let (mut spec, units) = match self.preset {
            Some(PresetArg::Paper) => (FullModelSpec::paper_preset(), "2pi MHz"),
            None => (FullModelSpec::chain(2, 0.0, 0.0, 0.0), "arbitrary"),
        };
        if self.preset.is_none() && (self.g.is_none() || self.t.is_none() || self.delta.is_none()) {
            return Err(invalid("give --preset or all of --g, --t and --delta"));
        }
        if let Some(s) = self.sites {
            spec.sites = s;
            spec.theta = vec![0.0; s];
        }
        spec.g = self.g.unwrap_or(spec.g);
        spec.t = self.t.unwrap_or(spec.t);
        if let Some(d) = self.delta {
            spec.delta = d;
            if self.preset.is_none() {
                spec.omega = 10.0 * d;
            }
        }
        spec.omega = self.omega.unwrap_or(spec.omega);
        if let Some(theta) = &self.theta {
            spec.theta = theta.clone();
        }
        spec.spins = self.spins.unwrap_or(spec.spins);
        spec.photon_cutoff = self.cutoff.unwrap_or(spec.photon_cutoff);
        spec.validate()?;
        if spec.sites < 2 {
            return Err(invalid("the reduction needs 2 or 3 sites"));
        }
        Ok((spec, units))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GaugeArg {
    Symmetric,
    Landau,
}

impl From<GaugeArg> for Gauge {
    fn from(g: GaugeArg) -> Self {
        match g {
            GaugeArg::Symmetric => Gauge::Symmetric,
            GaugeArg::Landau => Gauge::Landau,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Wavefunction,
    Density,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Schur,
    Spectral,
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    units: &'a str,
    spec: &'a FullModelSpec,
    #[serde(flatten)]
    result: ValidatorResult,
}

enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 4,
            Failure::Lib(e) => match e.root() {
                Error::InvalidInput(_) | Error::SiteOutOfRange { .. } | Error::Parse { .. } => 2,
                Error::NotHermitian { .. }
                | Error::NoConvergence { .. }
                | Error::MissingLink { .. }
                | Error::AtAlpha { .. } => 3,
                Error::NoCrossing { .. } => 5,
                Error::Resonance => 6,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

fn invalid(msg: &str) -> Error {
    Error::InvalidInput(msg.to_string())
}

fn finite(name: &str, x: f64) -> Result<f64, Error> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite")))
    }
}

/// A command whose arguments have been checked.
type Job = Box<dyn FnOnce() -> Result<Vec<u8>, Failure> + Send>;

fn prepare(command: Command) -> Result<Job, Error> {
    Ok(match command {
        Command::Butterfly {
            lattice,
            alpha_min,
            alpha_max,
            steps,
        } => {
            let spec = lattice.spec()?;
            uniform_grid(alpha_min, alpha_max, steps)?;
            let gauge = lattice.gauge.into();
            Box::new(move || {
                let bf = butterfly_scan(&spec, gauge, alpha_min, alpha_max, steps)?;
                let mut buf = Vec::new();
                codec::write_butterfly_csv(&mut buf, &bf)?;
                Ok(buf)
            })
        }
        Command::Ground { lattice, alpha } => {
            let (spec, gauge) = (lattice.spec()?, lattice.gauge(alpha)?);
            Box::new(move || {
                let g = ground_state(&spec, &gauge)?;
                let mut buf = Vec::new();
                codec::write_ground_csv(&mut buf, &g)?;
                Ok(buf)
            })
        }
        Command::Density { lattice, alpha } => {
            let (spec, gauge) = (lattice.spec()?, lattice.gauge(alpha)?);
            Box::new(move || {
                let g = ground_state(&spec, &gauge)?;
                let mut buf = Vec::new();
                codec::write_density_csv(&mut buf, &g)?;
                Ok(buf)
            })
        }
        Command::Fidelity { lattice, range } => {
            let spec = lattice.spec()?;
            range.check()?;
            let gauge = lattice.gauge.into();
            Box::new(move || {
                let t = fidelity_trace(&spec, gauge, range.alpha_min, range.alpha_max, range.step)?;
                let mut buf = Vec::new();
                codec::write_fidelity_csv(&mut buf, &t)?;
                Ok(buf)
            })
        }
        Command::Crossings {
            lattice,
            range,
            threshold,
            no_refine,
        } => {
            let spec = lattice.spec()?;
            range.check()?;
            if !(threshold > 0.0 && threshold < 1.0) {
                return Err(invalid("threshold must lie in (0, 1)"));
            }
            let gauge = lattice.gauge.into();
            Box::new(move || {
                let t = fidelity_trace(&spec, gauge, range.alpha_min, range.alpha_max, range.step)?;
                let refine = (!no_refine).then_some(DEFAULT_REFINE_WIDTH);
                let report = detect_crossings(&t, threshold, refine)?;
                if report.crossings.is_empty() {
                    return Err(Error::NoCrossing {
                        size: spec.rows().max(spec.cols()),
                        alpha_min: range.alpha_min,
                        alpha_max: range.alpha_max,
                    }
                    .into());
                }
                let mut buf = Vec::new();
                codec::write_json(&mut buf, &report)?;
                Ok(buf)
            })
        }
        Command::Momentum {
            lattice,
            alpha,
            source,
            peaks,
        } => {
            let (spec, gauge) = (lattice.spec()?, lattice.gauge(alpha)?);
            if peaks == Some(0) {
                return Err(invalid("--peaks must be at least 1"));
            }
            let source = match source {
                SourceArg::Wavefunction => MomentumSource::Wavefunction,
                SourceArg::Density => MomentumSource::Density,
            };
            Box::new(move || {
                let g = ground_state(&spec, &gauge)?;
                let map = sine_transform_2d(&g, source)?;
                let mut buf = Vec::new();
                match peaks {
                    Some(n) => codec::write_peaks_csv(&mut buf, &find_peaks(&map, n)?)?,
                    None => codec::write_momentum_csv(&mut buf, &map)?,
                }
                Ok(buf)
            })
        }
        Command::ValidateEffective(args) => {
            let (spec, units) = args.spec()?;
            let method = args.method;
            Box::new(move || {
                let result = match method {
                    MethodArg::Schur => schur_effective_hopping(&spec)?,
                    MethodArg::Spectral => spectral_effective_hopping(&spec)?,
                };
                let mut buf = Vec::new();
                codec::write_json(
                    &mut buf,
                    &ValidationReport {
                        units,
                        spec: &spec,
                        result,
                    },
                )?;
                Ok(buf)
            })
        }
        Command::FitAlpha0 { sizes, gauge } => {
            if sizes.is_empty() {
                return Err(invalid("no sizes given"));
            }
            if let Some(&l) = sizes.iter().find(|&&l| l < 5) {
                return Err(Error::InvalidInput(format!(
                    "sizes must be at least 5, got {l}"
                )));
            }
            let gauge = gauge.into();
            Box::new(move || {
                let fits = fit_alpha0(&sizes, gauge)?;
                let mut buf = Vec::new();
                codec::write_fit_csv(&mut buf, &fits)?;
                Ok(buf)
            })
        }
    })
}

fn emit(output: Option<&PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match output {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.threads == Some(0) {
        return Err(invalid("--threads must be at least 1").into());
    }
    let job = prepare(cli.command)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let bytes = pool.install(job)?;
    emit(cli.output.as_ref(), &bytes)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hofstadter: {e}");
            ExitCode::from(e.code())
        }
    }
}
