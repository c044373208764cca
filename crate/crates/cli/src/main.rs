//! `zeno`: time series, steady states and sweeps for the two-atom cavity
//! scheme, written as CSV.
//!
//! Exit codes: 0 success, 1 invalid input, 2 solver failure, 3 I/O failure.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zeno_core::scenario::{
    self, format_float, parse_config_with, run_deviation_sweep, run_steady, run_steady_sweep, run_time_series,
    threads_from_env, write_sweep_csv, Scenario, ScenarioId, SweepRow,
};
use zeno_core::{Error, ErrorKind};

#[derive(Parser, Debug)]
#[command(name = "zeno", version, about = "Dissipative singlet preparation of two Rydberg atoms in a lossy cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve the initial state and write the time series.
    Simulate(Common),
    /// Solve for the steady state; one row in the sweep format.
    Steady {
        #[command(flatten)]
        common: Common,
        /// Also report the Liouvillian spectral gap on stderr.
        #[arg(long)]
        gap: bool,
    },
    /// Steady-state fidelity over the (gamma, kappa) grid.
    Sweep(Common),
    /// Steady-state fidelity against delta/Delta.
    Deviation(Common),
    /// Print the resolved configuration and derived quantities.
    Params(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario whose defaults apply (fig2a..fig2d, fig3, fig4a, fig4b, fig5, experimental).
    #[arg(long)]
    scenario: Option<String>,
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial atomic state (cavity in vacuum): gg, T, ee or S.
    #[arg(long)]
    initial: Option<String>,
    /// full or effective.
    #[arg(long)]
    model: Option<String>,
    /// on or off.
    #[arg(long)]
    feedback: Option<String>,
    /// Feedback rotation angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<String>,
    /// Highest retained photon number.
    #[arg(long)]
    fock_cutoff: Option<String>,
    /// End time in units of 1/g.
    #[arg(long)]
    tmax: Option<String>,
    /// Sampling interval in units of 1/g.
    #[arg(long)]
    sample_dt: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep workers; falls back to ZD_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn overrides(&self) -> [(&'static str, Option<&String>); 7] {
        [
            ("initial", self.initial.as_ref()),
            ("model", self.model.as_ref()),
            ("feedback", self.feedback.as_ref()),
            ("eta", self.eta.as_ref()),
            ("fock_cutoff", self.fock_cutoff.as_ref()),
            ("t_max", self.tmax.as_ref()),
            ("sample_dt", self.sample_dt.as_ref()),
        ]
    }

    /// Scenario defaults, then the config file, then flags.
    fn resolve(&self) -> Result<Scenario, Error> {
        let flag_id: Option<ScenarioId> = self.scenario.as_deref().map(str::parse).transpose()?;
        let text = match &self.config {
            Some(path) => fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?,
            None => String::new(),
        };
        let mut s = parse_config_with(&text, flag_id)?;
        if let Some(id) = flag_id.filter(|id| *id != s.id) {
            return Err(Error::InvalidArgument(format!(
                "--scenario {id} conflicts with 'scenario = {}' in the config file",
                s.id
            )));
        }
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                s.set(key, v).map_err(|e| match e {
                    Error::InvalidArgument(m) => Error::InvalidArgument(format!("--{}: {m}", flag_name(key))),
                    other => other,
                })?;
            }
        }
        s.validate()?;
        Ok(s)
    }

    fn threads(&self) -> Result<Option<usize>, Error> {
        match self.threads {
            Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
            Some(n) => Ok(Some(n)),
            None => threads_from_env(),
        }
    }
}

fn flag_name(key: &str) -> String {
    match key {
        "t_max" => "tmax".into(),
        k => k.replace('_', "-"),
    }
}

/// Where results go. A file is created before any compute so a bad path
/// fails fast, and removed again if the run fails.
enum Sink {
    Stdout,
    File { path: PathBuf, file: File },
}

impl Sink {
    fn open(out: Option<&Path>) -> Result<Self, Error> {
        match out {
            None => Ok(Sink::Stdout),
            Some(path) => {
                let file = File::create(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
                Ok(Sink::File { path: path.to_path_buf(), file })
            }
        }
    }

    fn finish(self, body: Result<Vec<u8>, Error>) -> Result<(), Error> {
        match (self, body) {
            (Sink::Stdout, Ok(bytes)) => {
                let mut out = io::stdout().lock();
                out.write_all(&bytes)
                    .and_then(|_| out.flush())
                    .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
            }
            (Sink::File { path, mut file }, Ok(bytes)) => {
                file.write_all(&bytes).and_then(|_| file.sync_all()).map_err(|e| Error::Io { path, source: e })
            }
            (Sink::Stdout, Err(e)) => Err(e),
            (Sink::File { path, file }, Err(e)) => {
                drop(file);
                let _ = fs::remove_file(&path);
                Err(e)
            }
        }
    }
}

fn params_text(s: &Scenario) -> Result<String, Error> {
    let d = s.params.derived()?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_else(|| "none".into());
    let mut text = s.to_config_text();
    text.push_str(&format!("# lambda = {}\n", format_float(d.lambda)));
    text.push_str(&format!("# K = {}\n", opt(d.zeno_ratio)));
    text.push_str(&format!("# C = {}\n", opt(d.cooperativity)));
    text.push_str(&format!("# u_rr = {}\n", format_float(d.u_rr)));
    Ok(text)
}

fn run(cli: Cli) -> Result<(), Error> {
    let common = match &cli.command {
        Command::Simulate(c) | Command::Sweep(c) | Command::Deviation(c) | Command::Params(c) => c,
        Command::Steady { common, .. } => common,
    };
    let s = common.resolve()?;
    let threads = common.threads()?;
    let sink = Sink::open(common.out.as_deref())?;
    let mut buf = Vec::new();
    let body = match &cli.command {
        Command::Simulate(_) => run_time_series(&s, &mut buf).map(|traj| {
            if let Some(last) = traj.last() {
                log::info!("t = {}: purity {:.6}, fidelity {:.6}", last.t, last.purity, last.fidelity_s);
            }
        }),
        Command::Steady { gap, .. } => run_steady(&s, *gap).and_then(|pt| {
            let p = &s.params;
            let row = SweepRow {
                gamma: p.gamma,
                kappa: p.kappa,
                cooperativity: p.derived()?.cooperativity,
                fidelity: pt.fidelity,
                residual: pt.result.residual,
                unique: Some(pt.result.unique),
            };
            if let Some(g) = pt.result.gap {
                eprintln!("spectral gap = {}", format_float(g));
            }
            write_sweep_csv(&mut buf, &s, &[row])
        }),
        Command::Sweep(_) => {
            run_steady_sweep(&s, &s.sweep_grid(), threads, &mut buf).map(|t| report_checks(&t.cutoff_checks))
        }
        Command::Deviation(_) => {
            let ratios = s.delta_deviation_values.values();
            run_deviation_sweep(&s, &ratios, threads, &mut buf).map(|t| report_checks(&t.cutoff_checks))
        }
        Command::Params(_) => params_text(&s).map(|t| buf.extend_from_slice(t.as_bytes())),
    };
    sink.finish(body.map(|_| buf))
}

fn report_checks(checks: &[scenario::CutoffCheck]) {
    if let Some(worst) = checks.iter().max_by(|a, b| a.difference().total_cmp(&b.difference())) {
        log::info!(
            "photon cutoff check on {} points: largest fidelity change {:.2e} (point {})",
            checks.len(),
            worst.difference(),
            worst.index
        );
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::InvalidInput => 1,
        ErrorKind::Solver => 2,
        ErrorKind::Io => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zeno: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
