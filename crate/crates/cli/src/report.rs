//! The JSON run report. Field order is the serialization order and is part
//! of the format.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use squeeze_core::bank::{Reason, Verdict};
use squeeze_core::basecase::BaseVerdict;
use squeeze_core::ir::Program;
use squeeze_core::sqz::render_squeezer;
use squeeze_core::synth::{Candidate, CandidateReport, Outcome, PhaseStats};

use crate::Settings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub settings: Settings,
    pub checks: Vec<CheckReport>,
    pub syntheses: Vec<SynthReport>,
    pub ok: bool,
}

impl RunReport {
    pub fn new(command: &str, settings: &Settings) -> Self {
        RunReport {
            command: command.to_string(),
            settings: settings.clone(),
            checks: Vec::new(),
            syntheses: Vec::new(),
            ok: true,
        }
    }

    pub fn add_check(&mut self, c: CheckReport) {
        self.ok &= c.ok;
        self.checks.push(c);
    }

    pub fn add_synth(&mut self, s: SynthReport) {
        self.ok &= s.ok;
        self.syntheses.push(s);
    }

    /// The report with every wall-clock field set to zero.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        for c in &mut r.checks {
            for ph in &mut c.phases {
                ph.seconds = 0.0;
            }
        }
        for s in &mut r.syntheses {
            s.seconds = 0.0;
            s.phase1.seconds = 0.0;
            s.phase2.seconds = 0.0;
            s.phase3.seconds = 0.0;
            s.base_case.seconds = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub program: String,
    pub squeezer: String,
    pub base_bound: usize,
    pub phases: Vec<PhaseResult>,
    pub ok: bool,
}

impl CheckReport {
    pub(crate) fn push(&mut self, r: PhaseResult) {
        self.ok &= r.passed;
        self.phases.push(r);
    }

    /// The reason of the failed phase, if any.
    pub fn failure(&self) -> Option<&PhaseResult> {
        self.phases.iter().find(|p| !p.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    pub phase: u8,
    /// `bank`, `smt` or `exhaustive`.
    pub backend: String,
    pub passed: bool,
    pub reason: Option<String>,
    pub detail: Option<String>,
    pub witness: Option<String>,
    pub seconds: f64,
}

impl PhaseResult {
    pub(crate) fn new(phase: u8, backend: &str, v: &Verdict, p: &Program, t: Instant) -> Self {
        let (passed, reason, detail, witness) = crate::show_verdict(v, p);
        PhaseResult {
            phase,
            backend: backend.to_string(),
            passed,
            reason,
            detail,
            witness,
            seconds: t.elapsed().as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorReport {
    pub ordinal: usize,
    pub squeezer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectCount {
    pub reason: Reason,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseReport {
    /// `safe`, `unsafe`, `unknown` or `not run`.
    pub verdict: String,
    pub initial: Option<String>,
    pub bad: Option<String>,
    pub detail: Option<String>,
    pub seconds: f64,
}

impl BaseReport {
    fn not_run() -> Self {
        BaseReport {
            verdict: "not run".into(),
            initial: None,
            bad: None,
            detail: None,
            seconds: 0.0,
        }
    }

    pub(crate) fn new(v: &BaseVerdict, p: &Program, t: Instant) -> Self {
        let mut r = BaseReport::not_run();
        r.seconds = t.elapsed().as_secs_f64();
        match v {
            BaseVerdict::Safe => r.verdict = "safe".into(),
            BaseVerdict::Unsafe { initial, bad } => {
                r.verdict = "unsafe".into();
                r.initial = Some(p.show_state(initial));
                r.bad = Some(p.show_state(bad));
            }
            BaseVerdict::Unknown(why) => {
                r.verdict = "unknown".into();
                r.detail = Some(why.clone());
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub program: String,
    pub base_bound: usize,
    pub candidates: usize,
    /// Candidate count reported in the literature, for embedded benchmarks.
    pub published_candidates: Option<usize>,
    pub note: Option<String>,
    pub bank_size: usize,
    pub phase1: PhaseStats,
    pub phase2: PhaseStats,
    pub phase3: PhaseStats,
    pub rejected: Vec<RejectCount>,
    pub outcomes: Vec<Outcome>,
    pub survivors: Vec<SurvivorReport>,
    pub base_case: BaseReport,
    pub ok: bool,
    pub seconds: f64,
}

impl SynthReport {
    pub(crate) fn new(program: String, base_bound: usize, published_candidates: Option<usize>) -> Self {
        SynthReport {
            program,
            base_bound,
            candidates: 0,
            published_candidates,
            note: None,
            bank_size: 0,
            phase1: PhaseStats::default(),
            phase2: PhaseStats::default(),
            phase3: PhaseStats::default(),
            rejected: Vec::new(),
            outcomes: Vec::new(),
            survivors: Vec::new(),
            base_case: BaseReport::not_run(),
            ok: false,
            seconds: 0.0,
        }
    }

    pub(crate) fn fill(&mut self, r: &CandidateReport, survivors: &[Candidate], p: &Program) {
        self.candidates = r.candidates;
        self.bank_size = r.bank_size;
        self.phase1 = r.phase1.clone();
        self.phase2 = r.phase2.clone();
        self.phase3 = r.phase3.clone();
        self.rejected = r
            .rejected
            .iter()
            .map(|&(reason, count)| RejectCount { reason, count })
            .collect();
        self.outcomes = r.outcomes.clone();
        self.survivors = survivors
            .iter()
            .map(|c| SurvivorReport {
                ordinal: c.ordinal,
                squeezer: render_squeezer(&c.squeezer, p),
            })
            .collect();
        if let Some(n) = self.published_candidates {
            if n > 2 * r.candidates {
                self.note = Some(format!("candidate space capped by the pool: {} of {n}", r.candidates));
            }
        }
    }
}
