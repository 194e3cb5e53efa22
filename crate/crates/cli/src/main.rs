use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use squeeze_cli::{
    bench_table, cmd_bench, cmd_check, cmd_emit_vc, cmd_synth, load_pool, load_program, load_squeezer, CliError, PoolFile,
    RunReport, Settings,
};
use squeeze_core::synth::{Mode, PoolSpec};
use squeeze_core::vcgen::{SmtBackend, SmtConfig};

/// Verifies array programs with squeezers and synthesizes squeezers.
#[derive(Parser)]
#[command(name = "squeeze", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Check one squeezer against a program.
    Check { program: String, squeezer: PathBuf },
    /// Synthesize squeezers from a pool file (the benchmark pool for
    /// `bench:NAME` programs when omitted).
    Synth { program: String, pool: Option<PathBuf> },
    /// Synthesize for the embedded benchmarks (all of them by default).
    Bench { names: Vec<String> },
    /// Write the condition queries as SMT-LIB2 files.
    EmitVc {
        program: String,
        squeezer: PathBuf,
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Phase {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

#[derive(Args)]
struct Flags {
    /// Run phases up to this one.
    #[arg(long, global = true, value_enum, default_value = "all")]
    phase: Phase,
    /// Array length bound of phase 2.
    #[arg(long, global = true, default_value_t = 6)]
    len_bound: usize,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    #[arg(long, global = true)]
    m_max: Option<usize>,
    #[arg(long, global = true)]
    relaxed_sim: bool,
    #[arg(long, global = true)]
    base_bound: Option<usize>,
    /// Solver reading SMT-LIB2 on stdin, or `none` for bounded enumeration.
    /// Defaults to `z3 -in` when z3 is on the path.
    #[arg(long, global = true)]
    solver_cmd: Option<String>,
    #[arg(long, global = true, default_value_t = 60_000)]
    timeout_ms: u64,
    /// Seed of the state bank.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 24386)]
    bank_cap: usize,
    /// Dilution factor of the state bank.
    #[arg(long, global = true, default_value_t = 17)]
    df: u64,
    #[arg(long, global = true, value_enum, default_value = "first")]
    mode: ModeArg,
    /// Worker threads for phase 1; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the JSON run report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// With `check`, also write the condition queries here.
    #[arg(long, global = true)]
    emit_vc: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    All,
}

impl Flags {
    fn settings(&self) -> Settings {
        let solver = match self.solver_cmd.as_deref() {
            Some("none") => None,
            Some(cmd) => Some(SmtConfig::default().with_command(cmd).command),
            None => {
                let c = SmtConfig::default();
                if SmtBackend::available(&c) {
                    Some(c.command)
                } else {
                    log::warn!("no solver found; phases 2 and 3 enumerate bounded arrays");
                    None
                }
            }
        };
        Settings {
            phase: match self.phase {
                Phase::One => 1,
                Phase::Two => 2,
                Phase::Three | Phase::All => 3,
            },
            len_bound: self.len_bound,
            n_max: self.n_max,
            m_max: self.m_max,
            relaxed_sim: self.relaxed_sim,
            base_bound: self.base_bound,
            solver,
            timeout_ms: self.timeout_ms,
            seed: self.seed,
            bank_cap: self.bank_cap,
            df: self.df,
            elem_pool: None,
            mode: match self.mode {
                ModeArg::First => Mode::First,
                ModeArg::All => Mode::All,
            },
            jobs: self.jobs,
        }
    }
}

fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let settings = cli.flags.settings();
    match &cli.command {
        Command::Check { program, squeezer } => {
            let loaded = load_program(program)?;
            let q = load_squeezer(&loaded, &settings, squeezer)?;
            if let Some(dir) = &cli.flags.emit_vc {
                cmd_emit_vc(&loaded, &q, &settings, dir)?;
            }
            settings.require_solver()?;
            let c = cmd_check(&loaded, &q, &settings)?;
            for ph in &c.phases {
                let status = if ph.passed { "pass" } else { "FAIL" };
                println!("phase {} ({}): {status} {:.2}s", ph.phase, ph.backend, ph.seconds);
                if let (Some(reason), Some(detail)) = (&ph.reason, &ph.detail) {
                    println!("  {reason}: {detail}");
                }
                if let Some(w) = &ph.witness {
                    println!("  witness {w}");
                }
            }
            println!("{}", if c.ok { "verified" } else { "rejected" });
            let mut r = RunReport::new("check", &settings);
            r.add_check(c);
            Ok(r)
        }
        Command::Synth { program, pool } => {
            let loaded = load_program(program)?;
            let pool = match (pool, &loaded.bench) {
                (Some(path), _) => load_pool(path)?,
                (None, Some(b)) => PoolFile {
                    pool: b.pool_spec(),
                    depth_bound: b.depth_bound,
                    max_assigns: 2,
                },
                (None, None) => PoolFile {
                    pool: PoolSpec::default(),
                    depth_bound: 0,
                    max_assigns: 0,
                },
            };
            settings.require_solver()?;
            let s = cmd_synth(&loaded, &pool, &settings)?;
            println!("{} candidates, {} survivors, base case {}", s.candidates, s.survivors.len(), s.base_case.verdict);
            for sv in &s.survivors {
                println!("  #{} {}", sv.ordinal, sv.squeezer);
            }
            let mut r = RunReport::new("synth", &settings);
            r.add_synth(s);
            Ok(r)
        }
        Command::Bench { names } => {
            settings.require_solver()?;
            let reports = cmd_bench(names, &settings)?;
            print!("{}", bench_table(&reports));
            let mut r = RunReport::new("bench", &settings);
            for s in reports {
                r.add_synth(s);
            }
            Ok(r)
        }
        Command::EmitVc {
            program,
            squeezer,
            out_dir,
        } => {
            let loaded = load_program(program)?;
            let q = load_squeezer(&loaded, &settings, squeezer)?;
            let files = cmd_emit_vc(&loaded, &q, &settings, out_dir)?;
            println!("wrote {} files to {}", files.len(), out_dir.display());
            Ok(RunReport::new("emit-vc", &settings))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            if let Some(path) = &cli.flags.report {
                if let Err(e) = std::fs::write(path, r.to_json()) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
