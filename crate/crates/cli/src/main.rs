//! Batch front end: synthesize a control, simulate it, analyze the sine
//! series, or run a quick self-check.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use schroflat::scenario::{self, ControlMode, Scenario, ScenarioConfig, SimulationReport};
use schroflat::{Error, Result};

mod selftest;

#[derive(Parser)]
#[command(name = "schroflat", version, about = "Explicit null control of the 1D Schrödinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the control and write control.csv and report.json.
    Synthesize(Common),
    /// Simulate a control CSV and write snapshots.csv and report.json.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Control CSV; defaults to control.csv in the output directory.
        #[arg(long)]
        control: Option<PathBuf>,
    },
    /// Synthesize, simulate and report.
    Run(Common),
    /// Sine coefficients, Parseval defect and tail certificate.
    FourierAnalyze(Common),
    /// Fast internal consistency checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Integral,
    Spectral,
}

#[derive(Args)]
struct Common {
    /// JSON scenario; every field is optional.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "M")]
    m: Option<f64>,
    #[arg(long)]
    j_bar: Option<usize>,
    #[arg(long)]
    t_switch: Option<f64>,
    #[arg(long)]
    n_bar: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
    /// Fixed artificial diffusion instead of dx^diffusion_exponent.
    #[arg(long)]
    epsilon: Option<f64>,
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut c = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { c.$($field).+ = v; })*
            };
        }
        set!(t_final => t_final, tau => tau, s => s, m => m, j_bar => j_bar, t_switch => t_switch,
             nx => solver.nx, nt => solver.nt);
        if let Some(n) = self.n_bar {
            c.n_bar = Some(n);
        }
        if let Some(e) = self.epsilon {
            c.solver.epsilon = Some(e);
        }
        if let Some(m) = self.mode {
            c.mode = match m {
                Mode::Integral => ControlMode::Integral,
                Mode::Spectral => ControlMode::Spectral,
            };
        }
        if let Some(o) = &self.out {
            c.output_dir = Some(o.clone());
        }
        Ok(c)
    }

    fn scenario(&self) -> Result<(Scenario, PathBuf)> {
        let c = self.config()?;
        let dir = c.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        let sc = Scenario::new(c)?;
        Ok((sc, scenario::ensure_dir(&dir)?))
    }
}

fn synthesize(common: &Common) -> Result<()> {
    let (sc, dir) = common.scenario()?;
    let syn = scenario::synthesize(&sc)?;
    scenario::write_control_csv(&dir.join(scenario::CONTROL_CSV), &syn.schedule)?;
    scenario::write_json(&dir.join(scenario::REPORT_JSON), &syn.report)?;
    println!(
        "{} samples, max |u| = {:.3e}, tail = {:.3e}, u(T) = {}",
        syn.report.samples, syn.report.max_abs_u, syn.report.tail_diagnostic, syn.report.u_final
    );
    Ok(())
}

fn simulate(common: &Common, control: Option<&Path>) -> Result<()> {
    let (sc, dir) = common.scenario()?;
    let path = control.map(Path::to_path_buf).unwrap_or_else(|| dir.join(scenario::CONTROL_CSV));
    let schedule = scenario::read_control_csv(&path)?;
    let start = Instant::now();
    let out = scenario::simulate_schedule(&sc, &schedule)?;
    let report = SimulationReport::new(&out, start.elapsed().as_secs_f64());
    scenario::write_snapshots_csv(&dir.join(scenario::SNAPSHOTS_CSV), &out.snapshots)?;
    scenario::write_json(&dir.join(scenario::REPORT_JSON), &report)?;
    println!("final L2 error {:.6e}", report.final_l2_error);
    Ok(())
}

fn run(common: &Common) -> Result<()> {
    let (sc, dir) = common.scenario()?;
    let exp = scenario::run_experiment(&sc)?;
    scenario::write_control_csv(&dir.join(scenario::CONTROL_CSV), &exp.synthesis.schedule)?;
    scenario::write_snapshots_csv(&dir.join(scenario::SNAPSHOTS_CSV), &exp.output.snapshots)?;
    scenario::write_json(&dir.join(scenario::REPORT_JSON), &exp.report)?;
    let r = &exp.report;
    println!("final L2 error {:.6e} (initial norm {:.6e})", r.final_l2_error, r.initial_l2_norm);
    println!("expansion order {}, tail {:.3e}", r.expansion_order_achieved, r.tail_diagnostic);
    if let Some(c) = &r.spectral_check {
        println!("spectral vs integral {:.3e}, certificate {:.3e}", c.max_diff, c.certificate);
    }
    Ok(())
}

fn fourier_analyze(common: &Common) -> Result<()> {
    let (sc, dir) = common.scenario()?;
    let (coeffs, report) = scenario::fourier_analysis(&sc)?;
    let mut w = csv::Writer::from_path(dir.join("fourier.csv"))?;
    w.write_record(["n", "re", "im"])?;
    for (i, c) in coeffs.c.iter().enumerate() {
        w.write_record([(i + 1).to_string(), scenario::fmt_f64(c.re), scenario::fmt_f64(c.im)])?;
    }
    w.flush()?;
    scenario::write_json(&dir.join(scenario::REPORT_JSON), &report)?;
    println!(
        "n_bar {}, Parseval defect {:.3e}, tail bound {:.3e}{}",
        report.n_bar,
        report.parseval_defect,
        report.tail.bound,
        if report.abs_sum_converged { "" } else { " (sum |c_n| not converged)" }
    );
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() || matches!(e, Error::Io(_)) {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synthesize(c) => synthesize(c),
        Command::Simulate { common, control } => simulate(common, control.as_deref()),
        Command::Run(c) => run(c),
        Command::FourierAnalyze(c) => fourier_analyze(c),
        Command::Selftest => match selftest::run() {
            Ok(0) => Ok(()),
            Ok(n) => {
                eprintln!("selftest: {n} check(s) failed");
                return ExitCode::from(3);
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
