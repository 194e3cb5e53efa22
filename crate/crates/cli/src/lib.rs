//! Driver behind the `squeeze` binary: loading programs, squeezers and
//! pool files, the `check`, `synth`, `bench` and `emit-vc` commands, and
//! the JSON run report.
//!
//! A program argument is either a path to a program file or `bench:NAME`
//! for one of the embedded benchmarks.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use squeeze_core::bank::{generate_bank, phase1_check, BankConfig, SimBounds, Verdict};
use squeeze_core::basecase::{check_base, BaseConfig, BaseVerdict};
use squeeze_core::bench::{self, BenchConfig};
use squeeze_core::ir::{parse_program, ElemSort, Program};
use squeeze_core::sqz::{parse_squeezer, render_squeezer, Squeezer};
use squeeze_core::synth::{synthesize, GenConfig, Mode, PipelineConfig, PoolSpec, SynthError};
use squeeze_core::vcgen::{all_queries, check_with_stats, emit_smtlib, Backend, BackendError, Domain, SmtBackend, SmtConfig};

pub use report::{BaseReport, CheckReport, PhaseResult, RunReport, SurvivorReport, SynthReport};

/// Element pool for character arrays.
pub const CHAR_POOL: [i64; 3] = [97, 98, 0];
/// Element pool for integer arrays.
pub const INT_POOL: [i64; 5] = [-4, -2, 9, 100, 200];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Io(_) | CliError::Backend(_) => 3,
        }
    }
}

/// Options shared by all commands. Unset optional fields fall back to the
/// program or benchmark defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    /// Last phase to run, 1 to 3.
    pub phase: u8,
    pub len_bound: usize,
    pub n_max: Option<usize>,
    pub m_max: Option<usize>,
    pub relaxed_sim: bool,
    pub base_bound: Option<usize>,
    /// Solver command line; `None` selects the bounded exhaustive backend.
    pub solver: Option<Vec<String>>,
    pub timeout_ms: u64,
    pub seed: u64,
    pub bank_cap: usize,
    pub df: u64,
    pub elem_pool: Option<Vec<i64>>,
    pub mode: Mode,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let bank = BankConfig::default();
        Settings {
            phase: 3,
            len_bound: 6,
            n_max: None,
            m_max: None,
            relaxed_sim: false,
            base_bound: None,
            solver: Some(SmtConfig::default().command),
            timeout_ms: SmtConfig::default().timeout_ms,
            seed: bank.seed,
            bank_cap: bank.cap,
            df: bank.dilution,
            elem_pool: None,
            mode: Mode::First,
            jobs: 0,
        }
    }
}

impl Settings {
    pub fn smt_config(&self) -> Option<SmtConfig> {
        self.solver.as_ref().map(|command| SmtConfig {
            command: command.clone(),
            timeout_ms: self.timeout_ms,
            ..SmtConfig::default()
        })
    }

    /// Fails with [`BackendError::Unavailable`] when a solver is configured
    /// but cannot be started.
    pub fn require_solver(&self) -> Result<(), CliError> {
        match self.smt_config() {
            Some(c) if self.phase >= 2 && !SmtBackend::available(&c) => {
                Err(BackendError::Unavailable(c.command.join(" ")).into())
            }
            _ => Ok(()),
        }
    }

    pub fn sim(&self, default: SimBounds) -> SimBounds {
        SimBounds {
            n_max: self.n_max.unwrap_or(default.n_max),
            m_max: self.m_max.unwrap_or(default.m_max),
            relaxed: self.relaxed_sim,
        }
    }

    pub fn bank(&self, elem_pool: Vec<i64>) -> BankConfig {
        BankConfig {
            elem_pool: self.elem_pool.clone().unwrap_or(elem_pool),
            dilution: self.df,
            cap: self.bank_cap,
            seed: self.seed,
            ..BankConfig::default()
        }
    }

    fn pipeline(&self, sim: SimBounds, bank: BankConfig) -> PipelineConfig {
        PipelineConfig {
            bank,
            sim,
            len_bound: self.len_bound,
            last_phase: self.phase,
            solver: self.smt_config(),
            jobs: self.jobs,
        }
    }
}

/// A loaded program with the defaults that come with it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub program: Program,
    pub bench: Option<BenchConfig>,
}

impl Loaded {
    pub fn base_bound(&self, settings: &Settings) -> usize {
        settings.base_bound.or(self.program.base_bound).unwrap_or(0)
    }

    /// Simulation bounds from the flags. Only `bench` falls back to the
    /// per-benchmark bounds.
    pub fn sim(&self, settings: &Settings) -> SimBounds {
        settings.sim(SimBounds::default())
    }

    /// The bench pool, or a pool chosen by the element sort of the arrays.
    pub fn elem_pool(&self) -> Vec<i64> {
        match &self.bench {
            Some(b) => b.elem_pool.to_vec(),
            None if self.program.arrays.iter().all(|a| a.sort == ElemSort::Char) => CHAR_POOL.to_vec(),
            None => INT_POOL.to_vec(),
        }
    }
}

pub fn load_program(arg: &str) -> Result<Loaded, CliError> {
    if let Some(name) = arg.strip_prefix("bench:") {
        let bench = bench::config(name).ok_or_else(|| CliError::Parse(format!("unknown benchmark `{name}`")))?;
        return Ok(Loaded {
            program: bench.program(),
            bench: Some(bench),
        });
    }
    let src = read(Path::new(arg))?;
    let program = parse_program(&src).map_err(|e| CliError::Parse(format!("{arg}: {e}")))?;
    Ok(Loaded { program, bench: None })
}

pub fn load_squeezer(loaded: &Loaded, settings: &Settings, path: &Path) -> Result<Squeezer, CliError> {
    let text = read(path)?;
    parse_squeezer(text.trim(), &loaded.program, loaded.base_bound(settings))
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// A pool file: the pool entries plus generator settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolFile {
    #[serde(flatten)]
    pub pool: PoolSpec,
    #[serde(default = "default_depth")]
    pub depth_bound: usize,
    #[serde(default = "default_assigns")]
    pub max_assigns: usize,
}

fn default_depth() -> usize {
    GenConfig::default().depth_bound
}

fn default_assigns() -> usize {
    GenConfig::default().max_assigns
}

pub fn load_pool(path: &Path) -> Result<PoolFile, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn backend(settings: &Settings, elem_pool: &[i64]) -> Backend {
    match settings.smt_config() {
        Some(c) => Backend::smt(c),
        None => Backend::Exhaustive(Domain::new(settings.len_bound, elem_pool.to_vec())),
    }
}

/// Runs phases 1 to `settings.phase` on one squeezer.
pub fn cmd_check(loaded: &Loaded, q: &Squeezer, settings: &Settings) -> Result<CheckReport, CliError> {
    let p = &loaded.program;
    let sim = loaded.sim(settings);
    let pool = loaded.elem_pool();
    let mut report = CheckReport {
        program: p.name.clone(),
        squeezer: render_squeezer(q, p),
        base_bound: loaded.base_bound(settings),
        phases: Vec::new(),
        ok: true,
    };

    let t = Instant::now();
    let bank = generate_bank(p, &settings.bank(pool.clone()));
    let v = phase1_check(p, q, &bank, sim);
    report.push(PhaseResult::new(1, "bank", &v, p, t));
    if !v.is_pass() || settings.phase < 2 {
        return Ok(report);
    }

    let mut b = backend(settings, &pool);
    let name = if settings.solver.is_some() { "smt" } else { "exhaustive" };
    let t = Instant::now();
    let (v, _) = check_with_stats(p, q, sim, &mut b, Some(settings.len_bound))?;
    report.push(PhaseResult::new(2, name, &v, p, t));
    if !v.is_pass() || settings.phase < 3 {
        return Ok(report);
    }

    // Without a solver the bounded verdict stands in for the unbounded one.
    let t = Instant::now();
    let v = match settings.solver {
        Some(_) => check_with_stats(p, q, sim, &mut b, None)?.0,
        None => v,
    };
    report.push(PhaseResult::new(3, name, &v, p, t));
    Ok(report)
}

/// Synthesizes squeezers, then checks the base case.
pub fn cmd_synth(loaded: &Loaded, pool: &PoolFile, settings: &Settings) -> Result<SynthReport, CliError> {
    let p = &loaded.program;
    let base_bound = loaded.base_bound(settings);
    let pred_pool = pool.pool.build(p).map_err(|e| CliError::Parse(e.to_string()))?;
    let gen = GenConfig {
        depth_bound: pool.depth_bound,
        max_assigns: pool.max_assigns,
        mode: settings.mode,
    };
    let elem_pool = loaded.elem_pool();
    let cfg = settings.pipeline(loaded.sim(settings), settings.bank(elem_pool.clone()));
    let mut report = SynthReport::new(p.name.clone(), base_bound, loaded.bench.as_ref().map(|b| b.published_candidates));
    let t = Instant::now();
    let result = match synthesize(p, &pred_pool, &gen, base_bound, &cfg) {
        Ok(r) => Some(r),
        Err(SynthError::Exhausted(r)) => {
            report.fill(&r, &[], p);
            None
        }
        Err(SynthError::Backend(e)) => return Err(e.into()),
    };
    if let Some(r) = result {
        report.fill(&r.report, &r.survivors, p);
        let mut b = backend(settings, &elem_pool);
        let base_cfg = BaseConfig::new(base_bound);
        let bt = Instant::now();
        let verdict = check_base(p, &base_cfg, &mut b).map_err(|e| match e {
            squeeze_core::basecase::BaseError::Backend(e) => CliError::Backend(e),
            e => CliError::Parse(e.to_string()),
        })?;
        report.base_case = BaseReport::new(&verdict, p, bt);
        report.ok = matches!(verdict, BaseVerdict::Safe);
    }
    report.seconds = t.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs [`cmd_synth`] on embedded benchmarks with their own pools.
pub fn cmd_bench(names: &[String], settings: &Settings) -> Result<Vec<SynthReport>, CliError> {
    let names: Vec<String> = if names.is_empty() {
        bench::NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    let mut out = Vec::new();
    for name in &names {
        let loaded = load_program(&format!("bench:{name}"))?;
        let b = loaded.bench.as_ref().expect("embedded benchmark");
        let settings = &Settings {
            n_max: settings.n_max.or(Some(b.sim.n_max)),
            m_max: settings.m_max.or(Some(b.sim.m_max)),
            ..settings.clone()
        };
        let pool = PoolFile {
            pool: b.pool_spec(),
            depth_bound: b.depth_bound,
            max_assigns: GenConfig::default().max_assigns,
        };
        out.push(cmd_synth(&loaded, &pool, settings)?);
    }
    Ok(out)
}

/// Writes one SMT-LIB2 file per condition query into `dir`.
pub fn cmd_emit_vc(loaded: &Loaded, q: &Squeezer, settings: &Settings, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    for (k, query) in all_queries(&loaded.program, q, loaded.sim(settings)).iter().enumerate() {
        let path = dir.join(format!("{k:03}-{}.smt2", query.name));
        fs::write(&path, emit_smtlib(query)).map_err(io)?;
        written.push(path);
    }
    Ok(written)
}

/// Formats the bench table: one row per benchmark.
pub fn bench_table(reports: &[SynthReport]) -> String {
    let mut out = format!(
        "{:<10} {:>2} {:>7} {:>6} {:>6} {:>5} {:>5} {:>8} {:>8} {:>8}  {}\n",
        "benchmark", "B", "#cand", "|bank|", "ph1", "bmc", "ph3", "t1", "t2", "t3", "base"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<10} {:>2} {:>7} {:>6} {:>6} {:>5} {:>5} {:>8.2} {:>8.2} {:>8.2}  {}\n",
            r.program,
            r.base_bound,
            r.candidates,
            r.bank_size,
            r.phase1.tested,
            r.phase2.passed,
            r.phase3.passed,
            r.phase1.seconds,
            r.phase2.seconds,
            r.phase3.seconds,
            r.base_case.verdict
        ));
    }
    out
}

fn show_verdict(v: &Verdict, p: &Program) -> (bool, Option<String>, Option<String>, Option<String>) {
    match v {
        Verdict::Pass { .. } => (true, None, None, None),
        Verdict::Fail {
            reason,
            witness,
            detail,
        } => (
            false,
            Some(reason.to_string()),
            Some(detail.clone()),
            witness.as_ref().map(|w| p.show_state(w)),
        ),
    }
}
