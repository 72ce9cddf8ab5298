use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use su3pol::network::Backend;
use su3pol_cli::config::{
    Analysis, Angles, Complex, ExperimentConfig, Format, Scheme, StateSpec, SweepParameter,
    SweepSpec,
};
use su3pol_cli::{exit_code, experiment, EXIT_SELFTEST_FAILED, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "su3pol",
    version,
    about = "Three-mode SU(3) quantum polarization simulator"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// JSON experiment config; replaces the state and setting flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print the resolved config as JSON instead of running it.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state and report photon numbers (or its portable record).
    State {
        #[command(flatten)]
        run: RunArgs,
        /// Emit the state record as JSON.
        #[arg(long)]
        record: bool,
    },
    /// Gell-Mann means, variances and the squeezing witness.
    Gellmann(RunArgs),
    /// Coherency-matrix invariants and degrees of polarization.
    Polarization(RunArgs),
    /// Photon-count differences behind the twelve-port interferometer.
    Interferometer(RunArgs),
    /// Relative-amplitude observables under photon counting.
    Amplitude(RunArgs),
    /// Run one analysis over a parameter grid.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        analysis: Option<AnalysisArg>,
        #[arg(long, value_enum)]
        parameter: Option<ParameterArg>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Verify the headline identities and values on built-in inputs.
    Selftest,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    #[arg(long, value_enum)]
    state: Option<StateArg>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    psi1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    psi2: f64,
    /// Photon number of `psi_n`.
    #[arg(long)]
    n: Option<usize>,
    /// Coherent amplitudes as `re+imi` literals, e.g. `1,1i,0`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    alpha: Option<Vec<Complex>>,
    /// Fock occupations, e.g. `2,1,0`.
    #[arg(long, value_delimiter = ',')]
    occupation: Option<Vec<u16>>,
    /// Per-mode photon cutoff (default: chosen from the state).
    #[arg(long)]
    cutoff: Option<usize>,
    /// Total photon cap.
    #[arg(long)]
    cap: Option<usize>,
    /// Interferometer phases `φ1,φ2,φ3` in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Discard the no-click outcome (amplitude analysis).
    #[arg(long)]
    weak_field: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateArg {
    Coherent,
    PsiN,
    Qutrit,
    Fock,
    Mixture,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    TwelvePort,
    Parallel,
    Homodyne,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    Moments,
    Fock,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalysisArg {
    State,
    Gellmann,
    Polarization,
    Interferometer,
    Amplitude,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParameterArg {
    Theta,
    Phi,
    Psi1,
    Psi2,
    AlphaScale,
    Phi1,
    Phi2,
    Phi3,
}

fn state_from_flags(r: &RunArgs) -> Result<StateSpec, String> {
    let angles = Angles {
        theta: r.theta,
        phi: r.phi,
        psi1: r.psi1,
        psi2: r.psi2,
    };
    match r.state {
        None => Err("either --state or --config is required".into()),
        Some(StateArg::Coherent) => Ok(StateSpec::Coherent {
            alphas: r.alpha.clone().ok_or("coherent state needs --alpha")?,
        }),
        Some(StateArg::PsiN) => Ok(StateSpec::PsiN {
            angles,
            n: r.n.ok_or("psi_n state needs --n")?,
        }),
        Some(StateArg::Qutrit) => Ok(StateSpec::Qutrit { angles }),
        Some(StateArg::Fock) => Ok(StateSpec::Fock {
            occupation: r
                .occupation
                .clone()
                .ok_or("fock state needs --occupation")?,
        }),
        Some(StateArg::Mixture) => Err("mixtures are only available through --config".into()),
    }
}

fn apply_flags(c: &mut ExperimentConfig, r: &RunArgs) -> Result<(), String> {
    if r.cutoff.is_some() {
        c.space.cutoff = r.cutoff;
    }
    if r.cap.is_some() {
        c.space.cap = r.cap;
    }
    if let Some(p) = &r.phases {
        c.phases = p
            .as_slice()
            .try_into()
            .map_err(|_| format!("--phases takes 3 values, got {}", p.len()))?;
    }
    if let Some(s) = r.scheme {
        c.scheme = match s {
            SchemeArg::TwelvePort => Scheme::TwelvePort,
            SchemeArg::Parallel => Scheme::Parallel,
            SchemeArg::Homodyne => Scheme::Homodyne,
        };
    }
    if let Some(b) = r.backend {
        c.backend = match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Moments => Backend::Moments,
            BackendArg::Fock => Backend::Fock,
        };
    }
    c.weak_field |= r.weak_field;
    Ok(())
}

fn analysis_of(a: AnalysisArg) -> Analysis {
    match a {
        AnalysisArg::State => Analysis::State,
        AnalysisArg::Gellmann => Analysis::Gellmann,
        AnalysisArg::Polarization => Analysis::Polarization,
        AnalysisArg::Interferometer => Analysis::Interferometer,
        AnalysisArg::Amplitude => Analysis::Amplitude,
    }
}

fn parameter_of(p: ParameterArg) -> SweepParameter {
    match p {
        ParameterArg::Theta => SweepParameter::Theta,
        ParameterArg::Phi => SweepParameter::Phi,
        ParameterArg::Psi1 => SweepParameter::Psi1,
        ParameterArg::Psi2 => SweepParameter::Psi2,
        ParameterArg::AlphaScale => SweepParameter::AlphaScale,
        ParameterArg::Phi1 => SweepParameter::Phi1,
        ParameterArg::Phi2 => SweepParameter::Phi2,
        ParameterArg::Phi3 => SweepParameter::Phi3,
    }
}

/// Config from `--config` (if given) or the state flags, with the
/// subcommand's analysis and any explicit setting flags applied on top.
fn resolve(
    cli: &Cli,
    run: &RunArgs,
    analysis: Option<Analysis>,
) -> Result<ExperimentConfig, String> {
    let mut c = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            ExperimentConfig::from_json(&text)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => ExperimentConfig::new(state_from_flags(run)?),
    };
    if let Some(a) = analysis {
        c.analysis = a;
    }
    apply_flags(&mut c, run)?;
    if let Some(f) = cli.format {
        c.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    Ok(c)
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    // `su3pol run gellmann …` is accepted as a synonym for `su3pol gellmann …`
    let cli = Cli::parse_from(
        std::env::args_os()
            .enumerate()
            .filter(|(i, a)| !(*i == 1 && a == "run"))
            .map(|(_, a)| a),
    );

    if let Command::Selftest = cli.command {
        let format = match cli.format {
            Some(FormatArg::Json) => Format::Json,
            _ => Format::Csv,
        };
        return match su3pol_cli::selftest_document() {
            Ok((doc, ok)) => {
                print!("{}", doc.render(format));
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_SELFTEST_FAILED as u8)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e) as u8)
            }
        };
    }

    let (run, analysis, record) = match &cli.command {
        Command::State { run, record } => (run, Some(Analysis::State), *record),
        Command::Gellmann(r) => (r, Some(Analysis::Gellmann), false),
        Command::Polarization(r) => (r, Some(Analysis::Polarization), false),
        Command::Interferometer(r) => (r, Some(Analysis::Interferometer), false),
        Command::Amplitude(r) => (r, Some(Analysis::Amplitude), false),
        Command::Sweep { run, analysis, .. } => (run, analysis.map(analysis_of), false),
        Command::Selftest => unreachable!("handled above"),
    };
    let mut config = match resolve(&cli, run, analysis) {
        Ok(c) => c,
        Err(msg) => return usage(&msg),
    };
    if let Command::Sweep {
        parameter,
        start,
        stop,
        steps,
        ..
    } = &cli.command
    {
        let mut spec = config.sweep;
        if let Some(p) = parameter {
            let base = spec.unwrap_or(SweepSpec {
                parameter: parameter_of(*p),
                start: 0.0,
                stop: 0.0,
                steps: 0,
            });
            spec = Some(SweepSpec {
                parameter: parameter_of(*p),
                ..base
            });
        }
        let Some(mut spec) = spec else {
            return usage("sweep needs --parameter or a config with a sweep section");
        };
        if let Some(v) = start {
            spec.start = *v;
        }
        if let Some(v) = stop {
            spec.stop = *v;
        }
        if let Some(v) = steps {
            spec.steps = *v;
        }
        config.sweep = Some(spec);
    } else {
        config.sweep = None;
    }

    if cli.dump_config {
        println!("{}", config.to_json());
        return ExitCode::SUCCESS;
    }

    if record {
        return match experiment::state_record(&config) {
            Ok(rec) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&rec).expect("record serializes")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e) as u8)
            }
        };
    }

    match su3pol_cli::execute(&config) {
        Ok(doc) => {
            print!("{}", doc.render(config.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
