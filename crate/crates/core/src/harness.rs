//! Experiment orchestration: a declarative config names a presentation and
//! an optional construction pipeline; the driver builds the system, samples
//! growth functions into tables, audits witness-level inequalities
//! per-sample, and emits deterministic JSON/CSV reports.
//!
//! Every audited claim is an inequality between two *certified* sampled
//! quantities at a concrete scale, never a fitted asymptotic. A sample
//! whose ingredients include an unknown verdict or an uncertified value
//! reports `unknown`, not `pass`; a `fail` always carries the witness that
//! realizes the violation.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::area::{
    dehn_function, rel_cyclics_function, AreaCaps, AreaEngine, AreaOutcome, CyclicsVariant,
    Exactness, FunctionKind, FunctionTable, Sample,
};
use crate::conjugacy::{
    cl_base, cl_pair, construct_p_conjugator, cyclic_semigroup_membership,
    hard_conjugacy_instance, ClCaps, ClFlavor, ClPairCaps, ConjugatorCaps, ConjugatorOutcome,
    SemigroupMembership,
};
use crate::constructions::{dagger, rips, trivial_hnn, ConstructionError, DaggerOutput, RipsOutput};
use crate::fibre::{DistortionCaps, FibreError, FibreSystem};
use crate::geometry::BallIndex;
use crate::geometry::{return_of_cyclics, torsion_evolution};
use crate::lattice::abelianization;
use crate::oracle::{equal, order_of, strongest_oracle, ElementOrder, Verdict, WordOracle};
use crate::presentation::{Presentation, PresentationError};
use crate::word::Word;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Fibre(#[from] FibreError),
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io { path: path.to_path_buf(), source }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Which construction is applied to the base presentation before sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// sample the base presentation itself
    #[default]
    None,
    /// compile the base into a small cancellation cover and study the
    /// fibre product over the certified retraction
    Rips,
    /// the composite: compile, square, attach a stable letter along the
    /// fibre product's generators
    Dagger,
    /// attach a stable letter commuting with the configured words
    Hnn,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::None => "none",
            Pipeline::Rips => "rips",
            Pipeline::Dagger => "dagger",
            Pipeline::Hnn => "hnn",
        }
    }
}

fn default_radius() -> usize {
    12
}
fn default_moves() -> u64 {
    5
}
fn default_area() -> u64 {
    24
}
fn default_exponent() -> u64 {
    5
}
fn default_order_cutoff() -> u64 {
    8
}
fn default_quotient_budget() -> u64 {
    50_000_000
}
fn default_p_radius() -> usize {
    6
}
fn default_tails() -> usize {
    400
}
fn default_formats() -> Vec<String> {
    vec!["json".to_string(), "csv".to_string()]
}

/// Search budgets, all explicit in the emitted report: nothing about a
/// sample's trust level is hidden in a default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsConfig {
    /// oracle search radius
    #[serde(default = "default_radius")]
    pub radius: usize,
    /// relator applications allowed per oracle query
    #[serde(default = "default_moves")]
    pub moves: u64,
    /// area cap per certificate search
    #[serde(default = "default_area")]
    pub area: u64,
    /// power cap for cyclic-subgroup scans
    #[serde(default = "default_exponent")]
    pub exponent: u64,
    /// order probe cutoff
    #[serde(default = "default_order_cutoff")]
    pub order_cutoff: u64,
    /// work budget for finite-quotient separation
    #[serde(default = "default_quotient_budget")]
    pub quotient_budget: u64,
    /// radius cap for fibre-product ball growth
    #[serde(default = "default_p_radius")]
    pub p_radius: usize,
}

impl Default for CapsConfig {
    fn default() -> CapsConfig {
        CapsConfig {
            radius: default_radius(),
            moves: default_moves(),
            area: default_area(),
            exponent: default_exponent(),
            order_cutoff: default_order_cutoff(),
            quotient_budget: default_quotient_budget(),
            p_radius: default_p_radius(),
        }
    }
}

impl CapsConfig {
    fn budget_line(&self) -> String {
        format!(
            "radius={} moves={} area={} exponent={} order_cutoff={} quotient_budget={} p_radius={}",
            self.radius,
            self.moves,
            self.area,
            self.exponent,
            self.order_cutoff,
            self.quotient_budget,
            self.p_radius
        )
    }
}

/// A declarative experiment: one presentation, one optional construction,
/// a sampling range, and the tables and audits to produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// path to the base presentation file, relative to the config file
    pub presentation: String,
    #[serde(default)]
    pub pipeline: Pipeline,
    /// kernel generator names for fibre-product work (pipeline `none` only;
    /// the compile pipelines choose their own kernel letters)
    #[serde(default)]
    pub kernel: Vec<String>,
    /// words the stable letter commutes with (pipeline `hnn`)
    #[serde(default)]
    pub hnn_commute: Vec<String>,
    /// target kernel-word length for the compile pipelines
    #[serde(default = "default_tails")]
    pub tails: usize,
    pub n_min: u64,
    pub n_max: u64,
    /// fixes every randomized choice; echoed in the report
    #[serde(default)]
    pub seed: u64,
    /// output directory, relative to the config file
    pub output: String,
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default)]
    pub audits: Vec<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    #[serde(default)]
    pub caps: CapsConfig,
}

/// Audits that need a fibre-product system.
const SYSTEM_AUDITS: &[&str] = &[
    "pair_triangle",
    "half_length",
    "lift_length_bound",
    "witness_gap",
    "cl_flavor_order",
    "hard_pair_centralizer",
];

/// Every audit this driver knows how to run.
pub const KNOWN_AUDITS: &[&str] = &[
    "delta_monotone",
    "delta_le_delta_o",
    "pair_triangle",
    "half_length",
    "lift_length_bound",
    "witness_gap",
    "cl_flavor_order",
    "hard_pair_centralizer",
    "hnn_dehn_window",
    "semigroup_vs_ball",
];

impl ExperimentConfig {
    /// Parses and validates a TOML config.
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, HarnessError> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Whether this config produces a fibre-product system to sample.
    pub fn has_system(&self) -> bool {
        match self.pipeline {
            Pipeline::None => !self.kernel.is_empty(),
            Pipeline::Rips => true,
            Pipeline::Dagger | Pipeline::Hnn => false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.n_min > self.n_max {
            return bad(format!("empty n range: n_min={} > n_max={}", self.n_min, self.n_max));
        }
        if self.caps.radius == 0
            || self.caps.moves == 0
            || self.caps.area == 0
            || self.caps.exponent == 0
            || self.caps.order_cutoff == 0
            || self.caps.quotient_budget == 0
            || self.caps.p_radius == 0
        {
            return bad("caps must be positive".to_string());
        }
        if self.tails == 0 {
            return bad("tails must be positive".to_string());
        }
        for name in &self.functions {
            if FunctionKind::parse(name).is_none() {
                return bad(format!("unknown function {name:?}"));
            }
        }
        for audit in &self.audits {
            if !KNOWN_AUDITS.contains(&audit.as_str()) {
                return bad(format!("unknown audit {audit:?} (known: {})", KNOWN_AUDITS.join(", ")));
            }
        }
        for format in &self.formats {
            if format != "json" && format != "csv" {
                return bad(format!("unknown format {format:?} (known: json, csv)"));
            }
        }
        if !self.kernel.is_empty() && self.pipeline != Pipeline::None {
            return bad(
                "kernel selection only applies to pipeline \"none\"; the compile pipelines \
                 choose their own kernel letters"
                    .to_string(),
            );
        }
        if !self.hnn_commute.is_empty() && self.pipeline != Pipeline::Hnn {
            return bad("hnn_commute only applies to pipeline \"hnn\"".to_string());
        }
        if !self.has_system() {
            for name in &self.functions {
                if name == "dist" || name == "cl_rel" {
                    return bad(format!(
                        "function {name:?} needs a fibre-product system: pipeline \"none\" \
                         with a kernel selection, or pipeline \"rips\""
                    ));
                }
            }
            for audit in &self.audits {
                if SYSTEM_AUDITS.contains(&audit.as_str()) {
                    return bad(format!(
                        "audit {audit:?} needs a fibre-product system: pipeline \"none\" \
                         with a kernel selection, or pipeline \"rips\""
                    ));
                }
            }
        }
        if self.audits.iter().any(|a| a == "hnn_dehn_window") && self.pipeline != Pipeline::Hnn {
            return bad("audit \"hnn_dehn_window\" needs pipeline \"hnn\"".to_string());
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Audit report types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditStatus {
    Pass,
    Fail,
    Unknown,
}

/// A constant appearing in an audited inequality, with where it came from:
/// `computed` (derived from the presentation), `empirical` (measured by
/// this run), or `configured` (a cap or scale the config chose).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditConstant {
    pub name: String,
    pub value: String,
    pub provenance: String,
}

fn constant(name: &str, value: impl ToString, provenance: &str) -> AuditConstant {
    AuditConstant {
        name: name.to_string(),
        value: value.to_string(),
        provenance: provenance.to_string(),
    }
}

/// One checked instance of an audit's inequality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditSample {
    pub n: u64,
    pub status: AuditStatus,
    /// the object(s) realizing the checked instance
    pub witness: String,
    /// the inequality evaluated at the witness
    pub detail: String,
}

/// A per-sample audit of one inequality. `fail` always carries the
/// violating witness; a sample with any uncertified ingredient is
/// `unknown`, never `pass`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub id: String,
    pub inequality: String,
    pub constants: Vec<AuditConstant>,
    pub samples: Vec<AuditSample>,
    pub passed: usize,
    pub failed: usize,
    pub unknown: usize,
}

impl AuditReport {
    fn new(id: &str, inequality: &str, constants: Vec<AuditConstant>) -> AuditReport {
        AuditReport {
            id: id.to_string(),
            inequality: inequality.to_string(),
            constants,
            samples: Vec::new(),
            passed: 0,
            failed: 0,
            unknown: 0,
        }
    }

    fn push(&mut self, n: u64, status: AuditStatus, witness: String, detail: String) {
        match status {
            AuditStatus::Pass => self.passed += 1,
            AuditStatus::Fail => self.failed += 1,
            AuditStatus::Unknown => self.unknown += 1,
        }
        self.samples.push(AuditSample { n, status, witness, detail });
    }
}

/// Compares two sampled quantities as `lhs ≤ rhs`, trusting each sampled
/// value only as far as its exactness tag allows. `pass` needs both sides
/// exact. A violation is only a `fail` when the right side is exact and
/// the left side is at least a certified lower bound (`exact` or
/// `lower_bound`); a `budget_exhausted` left value is untrusted in both
/// directions.
pub fn check_le(lhs: (u64, Exactness), rhs: (u64, Exactness)) -> AuditStatus {
    let (lv, le) = lhs;
    let (rv, re) = rhs;
    if lv <= rv {
        if le == Exactness::Exact && re == Exactness::Exact {
            AuditStatus::Pass
        } else {
            AuditStatus::Unknown
        }
    } else if re == Exactness::Exact && le != Exactness::BudgetExhausted {
        AuditStatus::Fail
    } else {
        AuditStatus::Unknown
    }
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

/// A prepared experiment: the loaded base presentation, the pipeline's
/// output, and the system to sample.
pub struct Experiment {
    pub config: ExperimentConfig,
    /// the presentation named by the config
    pub base: Presentation,
    /// what the pipeline produced; equals `base` for pipeline `none`
    pub work: Presentation,
    pub system: Option<FibreSystem>,
    pub rips: Option<RipsOutput>,
    pub dagger: Option<DaggerOutput>,
    logs: Vec<String>,
}

/// Everything one run produces, serialized as `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub config: ExperimentConfig,
    pub tables: Vec<FunctionTable>,
    pub audits: Vec<AuditReport>,
    pub logs: Vec<String>,
}

pub const REPORT_SCHEMA: &str = "fpg-report/1";

impl Experiment {
    /// Loads the presentation and runs the construction pipeline. Paths in
    /// the config resolve relative to `base_dir`.
    pub fn prepare(config: ExperimentConfig, base_dir: &Path) -> Result<Experiment, HarnessError> {
        config.validate()?;
        let pres_path = base_dir.join(&config.presentation);
        let text = fs::read_to_string(&pres_path).map_err(|e| io_err(&pres_path, e))?;
        let base = Presentation::parse(&text)?;
        let mut logs = Vec::new();
        logs.push(format!(
            "base presentation: {} generators, {} relators",
            base.alphabet().len(),
            base.relators().len()
        ));
        let mut system = None;
        let mut rips_out = None;
        let mut dagger_out = None;
        let work = match config.pipeline {
            Pipeline::None => {
                if !config.kernel.is_empty() {
                    let names: Vec<&str> = config.kernel.iter().map(|s| s.as_str()).collect();
                    let sys = FibreSystem::with_budgets(
                        &base,
                        &names,
                        config.caps.radius,
                        config.caps.moves,
                    )?;
                    logs.push(format!(
                        "fibre product over the kernel of killing {{{}}}: {} pair generators",
                        config.kernel.join(", "),
                        sys.pair_generator_count()
                    ));
                    system = Some(sys);
                }
                base.clone()
            }
            Pipeline::Rips => {
                let out = rips(&base, config.tails)?;
                logs.push(format!(
                    "compiled cover: {} generators, {} relators, cancellation ratio {}/{}",
                    out.presentation.alphabet().len(),
                    out.presentation.relators().len(),
                    out.certificate.cancellation_ratio.0,
                    out.certificate.cancellation_ratio.1
                ));
                let sys = out.retraction_system()?;
                logs.push(
                    "retraction fibre system: quotient questions decided through kernel-letter \
                     deletion"
                        .to_string(),
                );
                system = Some(sys);
                let work = out.presentation.clone();
                rips_out = Some(out);
                work
            }
            Pipeline::Dagger => {
                let out = dagger(&base, config.tails)?;
                logs.push(format!(
                    "composite output: {} generators, {} relators, stable letter {}",
                    out.presentation.alphabet().len(),
                    out.presentation.relators().len(),
                    out.stable_letter
                ));
                let work = out.presentation.clone();
                dagger_out = Some(out);
                work
            }
            Pipeline::Hnn => {
                let mut words = Vec::new();
                for text in &config.hnn_commute {
                    let w = base
                        .alphabet()
                        .parse(text)
                        .map_err(|e| HarnessError::Config(format!("hnn_commute {text:?}: {e}")))?;
                    words.push(w);
                }
                let out = trivial_hnn(&base, &words)?;
                logs.push(format!(
                    "stable letter {} commuting with {} words",
                    out.alphabet().names().last().cloned().unwrap_or_default(),
                    words.len()
                ));
                out
            }
        };
        let oracle_kind = if !work.relators().is_empty() && work.is_c_prime_sixth() {
            "reducing (complete under the small-cancellation threshold)"
        } else {
            "bounded search"
        };
        logs.push(format!("work oracle: {oracle_kind}"));
        Ok(Experiment { config, base, work, system, rips: rips_out, dagger: dagger_out, logs })
    }

    fn caps_for(&self) -> impl Fn(&Word) -> AreaCaps + Sync + '_ {
        let area_cap = self.config.caps.area;
        move |w: &Word| {
            let mut caps = AreaCaps::default_for(w, &self.work);
            caps.area_cap = area_cap;
            caps
        }
    }

    fn dist_caps(&self) -> DistortionCaps {
        DistortionCaps {
            p_radius_cap: self.config.caps.p_radius,
            quotient_budget: self.config.caps.quotient_budget,
        }
    }

    fn pair_caps(&self) -> ClPairCaps {
        ClPairCaps {
            conjugator_radius: self.config.caps.p_radius,
            quotient_budget: self.config.caps.quotient_budget,
        }
    }

    fn conjugator_caps(&self) -> ConjugatorCaps {
        ConjugatorCaps {
            search_radius: self.config.caps.radius.min(4),
            exponent_cap: self.config.caps.exponent as i64,
            order_cutoff: self.config.caps.order_cutoff,
            root_radius: 3,
            root_exponent_cap: self.config.caps.order_cutoff,
            quotient_budget: self.config.caps.quotient_budget,
        }
    }

    fn sample_table(
        &self,
        kind: FunctionKind,
        engine: &AreaEngine,
        oracle: &dyn WordOracle,
    ) -> FunctionTable {
        let caps = self.config.caps;
        let caps_for = self.caps_for();
        let range = self.config.n_min..=self.config.n_max;
        let samples: Vec<Sample> = match kind {
            FunctionKind::Delta => {
                range.map(|n| dehn_function(engine, oracle, n, &caps_for)).collect()
            }
            FunctionKind::DeltaC => range
                .map(|n| {
                    rel_cyclics_function(
                        engine,
                        oracle,
                        n,
                        CyclicsVariant::C,
                        caps.order_cutoff,
                        &caps_for,
                    )
                })
                .collect(),
            FunctionKind::DeltaZ => range
                .map(|n| {
                    rel_cyclics_function(
                        engine,
                        oracle,
                        n,
                        CyclicsVariant::Z,
                        caps.order_cutoff,
                        &caps_for,
                    )
                })
                .collect(),
            FunctionKind::DeltaO => range
                .map(|n| {
                    rel_cyclics_function(
                        engine,
                        oracle,
                        n,
                        CyclicsVariant::O,
                        caps.order_cutoff,
                        &caps_for,
                    )
                })
                .collect(),
            FunctionKind::FrakM => {
                let ball = BallIndex::build(&self.work, oracle, caps.radius, caps.quotient_budget);
                range
                    .map(|n| return_of_cyclics(&ball, oracle, n, caps.exponent, caps.order_cutoff))
                    .collect()
            }
            FunctionKind::FrakT => {
                let ball = BallIndex::build(&self.work, oracle, caps.radius, caps.quotient_budget);
                range.map(|n| torsion_evolution(&ball, oracle, n, caps.order_cutoff)).collect()
            }
            FunctionKind::Dist => {
                let sys = self.system.as_ref().expect("validated: dist needs a system");
                let dcaps = self.dist_caps();
                range.map(|n| sys.distortion(n as usize, &dcaps)).collect()
            }
            FunctionKind::Cl => match &self.system {
                Some(sys) => {
                    let pcaps = self.pair_caps();
                    range
                        .map(|n| {
                            let s = cl_pair(sys, n, ClFlavor::PairIntrinsic, &pcaps);
                            Sample { n: s.n, value: s.value, exactness: s.exactness }
                        })
                        .collect()
                }
                None => {
                    let ccaps = ClCaps {
                        search_radius: caps.radius,
                        quotient_budget: caps.quotient_budget,
                    };
                    range
                        .map(|n| {
                            let s = cl_base(&self.work, oracle, n, &ccaps);
                            Sample { n: s.n, value: s.value, exactness: s.exactness }
                        })
                        .collect()
                }
            },
            FunctionKind::ClRel => {
                let sys = self.system.as_ref().expect("validated: cl_rel needs a system");
                let pcaps = self.pair_caps();
                range
                    .map(|n| {
                        let s = cl_pair(sys, n, ClFlavor::PairRelative, &pcaps);
                        Sample { n: s.n, value: s.value, exactness: s.exactness }
                    })
                    .collect()
            }
        };
        FunctionTable { name: kind, samples, budget: caps.budget_line() }
    }

    /// Samples every configured table and runs every configured audit.
    /// Deterministic given the config: the only randomized stage (the
    /// conjugated pairs inside `hard_pair_centralizer`) is seeded from the
    /// config's seed.
    pub fn run(&self) -> ExperimentReport {
        let engine = AreaEngine::new(&self.work);
        let oracle =
            strongest_oracle(&self.work, self.config.caps.radius, self.config.caps.moves);
        let kinds: Vec<FunctionKind> = self
            .config
            .functions
            .iter()
            .map(|name| FunctionKind::parse(name).expect("validated"))
            .collect();
        let pool = worker_pool();
        let tables: Vec<FunctionTable> = pool.install(|| {
            kinds
                .par_iter()
                .map(|&kind| self.sample_table(kind, &engine, oracle.as_ref()))
                .collect()
        });
        let mut audits = Vec::new();
        for id in &self.config.audits {
            audits.push(self.run_audit(id, &engine, oracle.as_ref()));
        }
        let mut logs = self.logs.clone();
        logs.push(format!("seed {}", self.config.seed));
        ExperimentReport {
            schema: REPORT_SCHEMA.to_string(),
            config: self.config.clone(),
            tables,
            audits,
            logs,
        }
    }

    fn run_audit(&self, id: &str, engine: &AreaEngine, oracle: &dyn WordOracle) -> AuditReport {
        match id {
            "delta_monotone" => self.audit_delta_monotone(engine, oracle),
            "delta_le_delta_o" => self.audit_delta_le_delta_o(engine, oracle),
            "pair_triangle" => self.audit_pair_triangle(),
            "half_length" => self.audit_half_length(),
            "lift_length_bound" => self.audit_lift_length_bound(),
            "witness_gap" => self.audit_witness_gap(),
            "cl_flavor_order" => self.audit_cl_flavor_order(),
            "hard_pair_centralizer" => self.audit_hard_pair_centralizer(),
            "hnn_dehn_window" => self.audit_hnn_dehn_window(oracle),
            "semigroup_vs_ball" => self.audit_semigroup_vs_ball(oracle),
            other => unreachable!("validated audit id {other:?}"),
        }
    }

    // -- audit: δ(n) ≤ δ(n+1) --------------------------------------------

    fn audit_delta_monotone(&self, engine: &AreaEngine, oracle: &dyn WordOracle) -> AuditReport {
        let mut report = AuditReport::new(
            "delta_monotone",
            "delta(n) <= delta(n+1): admissible null words only gain members as n grows",
            vec![],
        );
        let caps_for = self.caps_for();
        let samples: Vec<Sample> = (self.config.n_min..=self.config.n_max)
            .map(|n| dehn_function(engine, oracle, n, &caps_for))
            .collect();
        for pair in samples.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let status = check_le((a.value, a.exactness), (b.value, b.exactness));
            report.push(
                b.n,
                status,
                format!("window ({}, {})", a.n, b.n),
                format!(
                    "delta({})={} ({}) <= delta({})={} ({})",
                    a.n,
                    a.value,
                    a.exactness.as_str(),
                    b.n,
                    b.value,
                    b.exactness.as_str()
                ),
            );
        }
        report
    }

    // -- audit: δ(n−1) ≤ δ^o(n) and δ^c(n) ≤ δ^o(n) ------------------------

    fn audit_delta_le_delta_o(&self, engine: &AreaEngine, oracle: &dyn WordOracle) -> AuditReport {
        let mut report = AuditReport::new(
            "delta_le_delta_o",
            "delta(n-1) <= delta^o(n) and delta^c(n) <= delta^o(n): the plain Dehn function \
             embeds via exponent zero, and the half-order allowance is contained in the \
             full-order allowance",
            vec![constant("order_cutoff", self.config.caps.order_cutoff, "configured")],
        );
        let caps_for = self.caps_for();
        let cutoff = self.config.caps.order_cutoff;
        for n in self.config.n_min.max(1)..=self.config.n_max {
            let delta_o = rel_cyclics_function(engine, oracle, n, CyclicsVariant::O, cutoff, &caps_for);
            let delta = dehn_function(engine, oracle, n - 1, &caps_for);
            let status = check_le((delta.value, delta.exactness), (delta_o.value, delta_o.exactness));
            report.push(
                n,
                status,
                format!("delta({}) vs delta^o({})", n - 1, n),
                format!(
                    "delta({})={} ({}) <= delta^o({})={} ({})",
                    n - 1,
                    delta.value,
                    delta.exactness.as_str(),
                    n,
                    delta_o.value,
                    delta_o.exactness.as_str()
                ),
            );
            let delta_c = rel_cyclics_function(engine, oracle, n, CyclicsVariant::C, cutoff, &caps_for);
            let status = check_le((delta_c.value, delta_c.exactness), (delta_o.value, delta_o.exactness));
            report.push(
                n,
                status,
                format!("delta^c({n}) vs delta^o({n})"),
                format!(
                    "delta^c({})={} ({}) <= delta^o({})={} ({})",
                    n,
                    delta_c.value,
                    delta_c.exactness.as_str(),
                    n,
                    delta_o.value,
                    delta_o.exactness.as_str()
                ),
            );
        }
        report
    }

    // -- audit: |(g₁,g₂)|_P ≤ |(γ,1)|_P + |g₂| ------------------------------

    fn audit_pair_triangle(&self) -> AuditReport {
        let sys = self.system.as_ref().expect("validated");
        let mut report = AuditReport::new(
            "pair_triangle",
            "|(g1,g2)|_P <= |(g1 g2^-1, 1)|_P + |g2|: splitting a member into its one-sided \
             part and a diagonal",
            vec![constant("p_radius", self.config.caps.p_radius, "configured")],
        );
        let ball = sys.pair_ball(self.config.caps.p_radius);
        for n in self.config.n_min..=self.config.n_max {
            let mut worst: Option<(usize, String, String)> = None;
            let mut fail: Option<(String, String)> = None;
            let mut unknown: Option<String> = None;
            let mut checked = 0usize;
            for ((g1, g2), depth) in ball.entries() {
                if *depth as u64 > n {
                    continue;
                }
                let gamma = g1.concat(&g2.invert());
                let lhs = match sys.ball_lookup(&ball, g1, g2) {
                    Some(l) => l,
                    None => {
                        unknown.get_or_insert_with(|| render_pair(sys, g1, g2));
                        continue;
                    }
                };
                let rhs_gamma = match sys.ball_lookup(&ball, &gamma, &Word::empty()) {
                    Some(l) => l,
                    None => {
                        unknown.get_or_insert_with(|| render_pair(sys, g1, g2));
                        continue;
                    }
                };
                checked += 1;
                let rhs = rhs_gamma + g2.len();
                let detail = format!(
                    "|({}, {})|_P = {} <= {} + {} = {}",
                    render_word(sys.base(), g1),
                    render_word(sys.base(), g2),
                    lhs,
                    rhs_gamma,
                    g2.len(),
                    rhs
                );
                if lhs > rhs {
                    fail.get_or_insert((render_pair(sys, g1, g2), detail));
                } else if worst.as_ref().map_or(true, |(best, _, _)| lhs > *best) {
                    worst = Some((lhs, render_pair(sys, g1, g2), detail));
                }
            }
            if let Some((witness, detail)) = fail {
                report.push(n, AuditStatus::Fail, witness, detail);
            } else if let Some(witness) = unknown {
                report.push(
                    n,
                    AuditStatus::Unknown,
                    witness,
                    "a member's place in the pair metric was left uncertified".to_string(),
                );
            } else if let Some((_, witness, detail)) = worst {
                report.push(n, AuditStatus::Pass, witness, format!("{checked} pairs; deepest: {detail}"));
            } else {
                report.push(
                    n,
                    AuditStatus::Unknown,
                    String::new(),
                    "no member pairs within the ball at this scale".to_string(),
                );
            }
        }
        report
    }

    // -- audit: |g₁| + |g₂| ≤ 2·|(g₁,g₂)|_P --------------------------------

    fn audit_half_length(&self) -> AuditReport {
        let sys = self.system.as_ref().expect("validated");
        let mut report = AuditReport::new(
            "half_length",
            "|g1|_G + |g2|_G <= 2 |(g1,g2)|_P: each pair generator moves each coordinate by \
             at most one letter",
            vec![constant("p_radius", self.config.caps.p_radius, "configured")],
        );
        let ball = sys.pair_ball(self.config.caps.p_radius);
        let base_ball = BallIndex::build(
            sys.base(),
            sys.base_oracle(),
            self.config.caps.p_radius,
            self.config.caps.quotient_budget,
        );
        for n in self.config.n_min..=self.config.n_max {
            let mut worst: Option<(usize, String, String)> = None;
            let mut fail: Option<(String, String)> = None;
            let mut unknown: Option<String> = None;
            let mut checked = 0usize;
            for ((g1, g2), depth) in ball.entries() {
                if *depth as u64 > n {
                    continue;
                }
                let p_len = match sys.ball_lookup(&ball, g1, g2) {
                    Some(l) => l,
                    None => {
                        unknown.get_or_insert_with(|| render_pair(sys, g1, g2));
                        continue;
                    }
                };
                let (len1, len2) = match (
                    base_ball.geodesic_length(g1, sys.base_oracle()),
                    base_ball.geodesic_length(g2, sys.base_oracle()),
                ) {
                    (Some(a), Some(b)) => (a, b),
                    _ => {
                        unknown.get_or_insert_with(|| render_pair(sys, g1, g2));
                        continue;
                    }
                };
                checked += 1;
                let lhs = len1 + len2;
                let rhs = 2 * p_len;
                let detail = format!(
                    "|{}|_G + |{}|_G = {} <= 2*{} = {}",
                    render_word(sys.base(), g1),
                    render_word(sys.base(), g2),
                    lhs,
                    p_len,
                    rhs
                );
                if lhs > rhs {
                    fail.get_or_insert((render_pair(sys, g1, g2), detail));
                } else if worst.as_ref().map_or(true, |(best, _, _)| lhs > *best) {
                    worst = Some((lhs, render_pair(sys, g1, g2), detail));
                }
            }
            if let Some((witness, detail)) = fail {
                report.push(n, AuditStatus::Fail, witness, detail);
            } else if let Some(witness) = unknown {
                report.push(
                    n,
                    AuditStatus::Unknown,
                    witness,
                    "a coordinate's geodesic length was left uncertified".to_string(),
                );
            } else if let Some((_, witness, detail)) = worst {
                report.push(n, AuditStatus::Pass, witness, format!("{checked} pairs; tightest: {detail}"));
            } else {
                report.push(
                    n,
                    AuditStatus::Unknown,
                    String::new(),
                    "no member pairs within the ball at this scale".to_string(),
                );
            }
        }
        report
    }

    // -- audit: |(γ,1)|_P ≤ (L+1)·Area_Q(w) + |w| + n ----------------------

    fn audit_lift_length_bound(&self) -> AuditReport {
        let sys = self.system.as_ref().expect("validated");
        let big_l = sys.longest_relator() as u64;
        let mut report = AuditReport::new(
            "lift_length_bound",
            "|(gamma,1)|_P <= (L+1)*Area_Q(w) + |w| + n for the hardest certified kernel \
             element gamma at each scale, w its quotient expression",
            vec![
                constant("L", big_l, "computed"),
                constant("p_radius", self.config.caps.p_radius, "configured"),
            ],
        );
        let dcaps = self.dist_caps();
        let caps_for = self.caps_for();
        for n in self.config.n_min..=self.config.n_max {
            let witness = sys.hard_distortion_witness(n as usize, &dcaps);
            let gamma = match sys.base().alphabet().parse(&witness.gamma) {
                Ok(w) => w,
                Err(e) => {
                    report.push(
                        n,
                        AuditStatus::Unknown,
                        witness.gamma.clone(),
                        format!("witness failed to parse: {e}"),
                    );
                    continue;
                }
            };
            let p_len = match witness.p_len {
                Some(l) => l as u64,
                None => {
                    report.push(
                        n,
                        AuditStatus::Unknown,
                        witness.gamma.clone(),
                        "the witness's pair-metric length was left uncertified".to_string(),
                    );
                    continue;
                }
            };
            let image = sys.quotient_image(&gamma);
            let mut caps = caps_for(&image);
            caps.length_cap = caps.length_cap.max(image.len() + 2 * sys.longest_relator() + 4);
            match sys.quotient_engine().area(&image, &caps) {
                AreaOutcome::Found { area, exact, .. } => {
                    let rhs = (big_l + 1) * area + image.len() as u64 + n;
                    let lhs_tag = Exactness::Exact;
                    // a too-small area only shrinks the right side, so a pass
                    // against it implies a pass against the true bound; the
                    // exactness tag still gates pass vs unknown
                    let rhs_tag = if exact { Exactness::Exact } else { Exactness::LowerBound };
                    let status = check_le((p_len, lhs_tag), (rhs, rhs_tag));
                    report.push(
                        n,
                        status,
                        witness.gamma.clone(),
                        format!(
                            "|(gamma,1)|_P = {} <= ({}+1)*{} + {} + {} = {} (area {})",
                            p_len,
                            big_l,
                            area,
                            image.len(),
                            n,
                            rhs,
                            if exact { "exact" } else { "lower bound" }
                        ),
                    );
                }
                AreaOutcome::NotNull => {
                    report.push(
                        n,
                        AuditStatus::Fail,
                        witness.gamma.clone(),
                        "certified kernel element whose quotient expression the engine \
                         rejects as non-null"
                            .to_string(),
                    );
                }
                AreaOutcome::Exhausted { .. } => {
                    report.push(
                        n,
                        AuditStatus::Unknown,
                        witness.gamma.clone(),
                        "quotient area search exhausted its budget".to_string(),
                    );
                }
            }
        }
        report
    }

    // -- audit: witness depth never exceeds the sampled distortion ---------

    fn audit_witness_gap(&self) -> AuditReport {
        let sys = self.system.as_ref().expect("validated");
        let mut report = AuditReport::new(
            "witness_gap",
            "|(gamma,1)|_P <= Dist(n): the hardest one-sided member is one of the pairs the \
             distortion maximum ranges over",
            vec![constant("p_radius", self.config.caps.p_radius, "configured")],
        );
        let dcaps = self.dist_caps();
        for n in self.config.n_min..=self.config.n_max {
            let dist = sys.distortion(n as usize, &dcaps);
            let witness = sys.hard_distortion_witness(n as usize, &dcaps);
            let Some(p_len) = witness.p_len else {
                report.push(
                    n,
                    AuditStatus::Unknown,
                    witness.gamma.clone(),
                    "the witness's pair-metric length was left uncertified".to_string(),
                );
                continue;
            };
            // a certified witness length is included in the distortion scan,
            // so the inequality must hold regardless of exactness tags
            let status = if (p_len as u64) > dist.value {
                AuditStatus::Fail
            } else if dist.exactness == Exactness::Exact && witness.exact {
                AuditStatus::Pass
            } else {
                AuditStatus::Unknown
            };
            report.push(
                n,
                status,
                witness.gamma.clone(),
                format!(
                    "|(gamma,1)|_P = {} <= Dist({}) = {} ({})",
                    p_len,
                    n,
                    dist.value,
                    dist.exactness.as_str()
                ),
            );
        }
        report
    }

    // -- audit: CL_P(n) ≤ CL_P^{G×G}(2n) -----------------------------------

    fn audit_cl_flavor_order(&self) -> AuditReport {
        let sys = self.system.as_ref().expect("validated");
        let mut report = AuditReport::new(
            "cl_flavor_order",
            "CL_P(n) <= CL_P^rel(2n): a pair of intrinsic size n has ambient size at most 2n \
             and the same minimal conjugator",
            vec![constant("metric factor", 2, "computed")],
        );
        let pcaps = self.pair_caps();
        for n in self.config.n_min..=self.config.n_max {
            let intrinsic = cl_pair(sys, n, ClFlavor::PairIntrinsic, &pcaps);
            let relative = cl_pair(sys, 2 * n, ClFlavor::PairRelative, &pcaps);
            let status =
                check_le((intrinsic.value, intrinsic.exactness), (relative.value, relative.exactness));
            let witness = intrinsic
                .witness
                .as_ref()
                .map(|(u, v)| format!("U = {u}, V = {v}"))
                .unwrap_or_default();
            report.push(
                n,
                status,
                witness,
                format!(
                    "CL_P({}) = {} ({}) <= CL_P^rel({}) = {} ({})",
                    n,
                    intrinsic.value,
                    intrinsic.exactness.as_str(),
                    2 * n,
                    relative.value,
                    relative.exactness.as_str()
                ),
            );
        }
        report
    }

    // -- audit: the staged conjugator on hard and random instances ---------

    fn audit_hard_pair_centralizer(&self) -> AuditReport {
        let sys = self.system.as_ref().expect("validated");
        let mut report = AuditReport::new(
            "hard_pair_centralizer",
            "the staged conjugator verifies, never beats the brute-force minimum, keeps \
             |V|_P <= 2n+2 on hard instances, and keeps 2|p''| <= omega on torsion quotients",
            vec![
                constant("p_radius", self.config.caps.p_radius, "configured"),
                constant("seed", self.config.seed, "configured"),
            ],
        );
        let dcaps = self.dist_caps();
        let ccaps = self.conjugator_caps();
        let ball = sys.pair_ball(self.config.caps.p_radius);
        for n in self.config.n_min..=self.config.n_max {
            match hard_conjugacy_instance(sys, n as usize, &dcaps) {
                Ok(instance) => {
                    let (status, witness, detail) = self.judge_conjugator_instance(
                        sys,
                        &ball,
                        (&instance.u.0, &instance.u.1),
                        (&instance.v.0, &instance.v.1),
                        Some(&instance),
                        &ccaps,
                    );
                    report.push(n, status, witness, format!("hard instance: {detail}"));
                }
                Err(e) => {
                    report.push(
                        n,
                        AuditStatus::Unknown,
                        String::new(),
                        format!("hard instance unavailable: {e}"),
                    );
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed.wrapping_add(n));
            let (u, v) = random_conjugate_pair(sys, &mut rng, n as usize);
            let (status, witness, detail) = self.judge_conjugator_instance(
                sys,
                &ball,
                (&u.0, &u.1),
                (&v.0, &v.1),
                None,
                &ccaps,
            );
            report.push(n, status, witness, format!("seeded instance: {detail}"));
        }
        report
    }

    #[allow(clippy::too_many_arguments)]
    fn judge_conjugator_instance(
        &self,
        sys: &FibreSystem,
        ball: &crate::fibre::PairBall,
        u: (&Word, &Word),
        v: (&Word, &Word),
        hard: Option<&crate::conjugacy::HardInstance>,
        ccaps: &ConjugatorCaps,
    ) -> (AuditStatus, String, String) {
        let witness = format!(
            "U = ({}, {}), V = ({}, {})",
            render_word(sys.base(), u.0),
            render_word(sys.base(), u.1),
            render_word(sys.base(), v.0),
            render_word(sys.base(), v.1)
        );
        let brute = brute_force_conjugator(sys, ball, u, v);
        let outcome = match construct_p_conjugator(sys, u, v, ccaps) {
            Ok(outcome) => outcome,
            Err(e) => return (AuditStatus::Unknown, witness, format!("pipeline error: {e}")),
        };
        match outcome {
            ConjugatorOutcome::Certificate(cert) => {
                let og = sys.base_oracle();
                let (z1, z2) = &cert.zeta_coords;
                let conj1 = equal(og, &u.0.conjugate(z1), v.0);
                let conj2 = equal(og, &u.1.conjugate(z2), v.1);
                let member = sys.membership(z1, z2);
                if conj1 == Verdict::Nontrivial
                    || conj2 == Verdict::Nontrivial
                    || member == Verdict::Nontrivial
                {
                    return (
                        AuditStatus::Fail,
                        witness,
                        "certificate failed re-verification".to_string(),
                    );
                }
                if conj1 == Verdict::Unknown
                    || conj2 == Verdict::Unknown
                    || member == Verdict::Unknown
                {
                    return (
                        AuditStatus::Unknown,
                        witness,
                        "certificate re-verification was inconclusive".to_string(),
                    );
                }
                let mut notes = format!("zeta length {}", cert.zeta.len());
                match brute {
                    BruteForce::Minimum(min) => {
                        if cert.zeta.len() < min {
                            return (
                                AuditStatus::Fail,
                                witness,
                                format!(
                                    "certificate length {} beats the brute-force minimum {min}, \
                                     so one of the two is unsound",
                                    cert.zeta.len()
                                ),
                            );
                        }
                        let _ = write!(notes, ", brute-force minimum {min}");
                    }
                    BruteForce::NoneInBall => {
                        return (
                            AuditStatus::Unknown,
                            witness,
                            format!(
                                "{notes}; no conjugator within the brute-force ball, so the \
                                 minimum is unconfirmed"
                            ),
                        );
                    }
                    BruteForce::Inconclusive => {
                        return (
                            AuditStatus::Unknown,
                            witness,
                            format!("{notes}; the brute-force scan was inconclusive"),
                        );
                    }
                }
                if let Some(instance) = hard {
                    if !instance.bound_ok {
                        return (
                            AuditStatus::Fail,
                            witness,
                            format!("{notes}; |V|_P exceeds 2n+2 on a hard instance"),
                        );
                    }
                    let _ = write!(notes, ", |V|_P <= 2n+2 holds");
                }
                if let Some(omega) = cert.stages.omega {
                    if 2 * cert.stages.p_final.unsigned_abs() > omega {
                        return (
                            AuditStatus::Fail,
                            witness,
                            format!(
                                "{notes}; residual exponent {} escapes the torsion window \
                                 omega = {omega}",
                                cert.stages.p_final
                            ),
                        );
                    }
                    let _ = write!(notes, ", 2|p''| <= omega = {omega}");
                }
                (AuditStatus::Pass, witness, notes)
            }
            ConjugatorOutcome::NotConjugate => (
                AuditStatus::Fail,
                witness,
                "pipeline reports not conjugate on a pair conjugate by construction".to_string(),
            ),
            ConjugatorOutcome::Exhausted { stage } => (
                AuditStatus::Unknown,
                witness,
                format!("pipeline exhausted at stage {stage:?}"),
            ),
        }
    }

    // -- audit: δ_Γ(n) ≤ δ_Γ∗(n) for the trivial HNN extension -------------

    fn audit_hnn_dehn_window(&self, oracle: &dyn WordOracle) -> AuditReport {
        let mut report = AuditReport::new(
            "hnn_dehn_window",
            "delta_base(n) <= delta_hnn(n): killing the stable letter retracts the extension \
             onto the base, sending expressions to expressions",
            vec![],
        );
        let base_engine = AreaEngine::new(&self.base);
        let base_oracle =
            strongest_oracle(&self.base, self.config.caps.radius, self.config.caps.moves);
        let hnn_engine = AreaEngine::new(&self.work);
        let area_cap = self.config.caps.area;
        let base_caps = |w: &Word| {
            let mut caps = AreaCaps::default_for(w, &self.base);
            caps.area_cap = area_cap;
            caps
        };
        let hnn_caps = self.caps_for();
        for n in self.config.n_min..=self.config.n_max {
            let base = dehn_function(&base_engine, base_oracle.as_ref(), n, &base_caps);
            let hnn = dehn_function(&hnn_engine, oracle, n, &hnn_caps);
            let status = check_le((base.value, base.exactness), (hnn.value, hnn.exactness));
            report.push(
                n,
                status,
                format!("delta comparison at n = {n}"),
                format!(
                    "delta_base({}) = {} ({}) <= delta_hnn({}) = {} ({})",
                    n,
                    base.value,
                    base.exactness.as_str(),
                    n,
                    hnn.value,
                    hnn.exactness.as_str()
                ),
            );
        }
        report
    }

    // -- audit: semigroup membership vs exhaustive ball comparison ----------

    fn audit_semigroup_vs_ball(&self, oracle: &dyn WordOracle) -> AuditReport {
        let mut report = AuditReport::new(
            "semigroup_vs_ball",
            "cyclic_semigroup_membership(x, y, rho) agrees with exhaustively matching y^p \
             against ball representatives for every certified rho",
            vec![
                constant("pair radius", SEMIGROUP_PAIR_RADIUS, "configured"),
                constant("order_cutoff", self.config.caps.order_cutoff, "configured"),
            ],
        );
        let ball = BallIndex::build(
            &self.work,
            oracle,
            SEMIGROUP_PAIR_RADIUS,
            self.config.caps.quotient_budget,
        );
        if ball.len() > SEMIGROUP_BALL_CAP {
            report.push(
                self.config.n_min,
                AuditStatus::Unknown,
                String::new(),
                format!(
                    "ball holds {} elements; the exhaustive comparison is reserved for \
                     quotient-scale groups (cap {})",
                    ball.len(),
                    SEMIGROUP_BALL_CAP
                ),
            );
            return report;
        }
        let rank = self.work.alphabet().len();
        let relator_columns: Vec<Vec<i128>> =
            self.work.relators().iter().map(|r| abelianization(r, rank)).collect();
        let lattice_valid = relator_columns.iter().all(|c| c.iter().all(|&x| x == 0));
        for n in self.config.n_min..=self.config.n_max {
            let mut checked = 0usize;
            let mut skipped = 0usize;
            let mut fail: Option<(String, String)> = None;
            let mut unknown: Option<(String, String)> = None;
            for x in ball.elements() {
                for y in ball.elements() {
                    if (x.len() + y.len()) as u64 != n {
                        continue;
                    }
                    let Some((rho, how)) = certified_rho(
                        y,
                        oracle,
                        self.config.caps.order_cutoff,
                        lattice_valid,
                        x,
                        rank,
                    ) else {
                        skipped += 1;
                        continue;
                    };
                    let fast = cyclic_semigroup_membership(x, y, oracle, rho, true);
                    let slow = exhaustive_power_match(x, y, oracle, rho, &ball);
                    checked += 1;
                    let pair = format!(
                        "x = {}, y = {} (rho = {rho}, {how})",
                        render_word(&self.work, x),
                        render_word(&self.work, y)
                    );
                    match (fast, slow) {
                        (SemigroupMembership::Member { least_power: a }, ExhaustiveMatch::Member(b))
                            if a == b => {}
                        (SemigroupMembership::NonMember, ExhaustiveMatch::NonMember) => {}
                        (SemigroupMembership::Unknown, _) | (_, ExhaustiveMatch::Inconclusive) => {
                            unknown.get_or_insert((
                                pair,
                                "one side of the comparison was inconclusive".to_string(),
                            ));
                        }
                        (fast, slow) => {
                            fail.get_or_insert((
                                pair,
                                format!("membership scan said {fast:?}, ball matching said {slow:?}"),
                            ));
                        }
                    }
                }
            }
            if let Some((witness, detail)) = fail {
                report.push(n, AuditStatus::Fail, witness, detail);
            } else if let Some((witness, detail)) = unknown {
                report.push(n, AuditStatus::Unknown, witness, detail);
            } else if checked > 0 {
                report.push(
                    n,
                    AuditStatus::Pass,
                    format!("{checked} pairs with |x| + |y| = {n}"),
                    format!("{checked} agreements, {skipped} pairs without a certified rho"),
                );
            } else {
                report.push(
                    n,
                    AuditStatus::Unknown,
                    String::new(),
                    format!("no pairs with a certified rho at this scale ({skipped} skipped)"),
                );
            }
        }
        report
    }
}

const SEMIGROUP_PAIR_RADIUS: usize = 3;
const SEMIGROUP_BALL_CAP: usize = 64;

/// How far a brute-force conjugator scan got.
enum BruteForce {
    Minimum(usize),
    NoneInBall,
    Inconclusive,
}

/// Scans the pair ball in depth order for the shallowest coordinatewise
/// conjugator, certifying minimality when every shallower entry is
/// decisively ruled out.
fn brute_force_conjugator(
    sys: &FibreSystem,
    ball: &crate::fibre::PairBall,
    u: (&Word, &Word),
    v: (&Word, &Word),
) -> BruteForce {
    let og = sys.base_oracle();
    let mut inconclusive = false;
    let mut entries: Vec<&((Word, Word), usize)> = ball.entries().iter().collect();
    entries.sort_by_key(|(_, depth)| *depth);
    for ((z1, z2), depth) in entries.into_iter() {
        match (equal(og, &u.0.conjugate(z1), v.0), equal(og, &u.1.conjugate(z2), v.1)) {
            (Verdict::Trivial, Verdict::Trivial) => {
                return if inconclusive { BruteForce::Inconclusive } else { BruteForce::Minimum(*depth) };
            }
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => inconclusive = true,
            _ => {}
        }
    }
    if inconclusive {
        BruteForce::Inconclusive
    } else {
        BruteForce::NoneInBall
    }
}

/// A conjugate pair built by a seeded conjugation: U is a short diagonal,
/// V its conjugate by a random member of the pair ball.
fn random_conjugate_pair(
    sys: &FibreSystem,
    rng: &mut ChaCha8Rng,
    scale: usize,
) -> ((Word, Word), (Word, Word)) {
    let base_rank = sys.base().alphabet().len() as u32;
    let u_len = rng.gen_range(1..=2usize);
    let mut letters = Vec::new();
    for _ in 0..u_len {
        letters.push(crate::word::Letter::new(rng.gen_range(0..base_rank), rng.gen_bool(0.5)));
    }
    let u = Word::reduce(&letters);
    let pair_rank = sys.pair_generator_count() as u32;
    let zeta_len = scale.clamp(1, 3);
    let mut zeta_letters = Vec::new();
    for _ in 0..zeta_len {
        zeta_letters
            .push(crate::word::Letter::new(rng.gen_range(0..pair_rank), rng.gen_bool(0.5)));
    }
    let zeta = crate::fibre::PairWord::new(Word::reduce(&zeta_letters));
    let (z1, z2) = sys.transcribe(&zeta);
    let v = (u.conjugate(&z1), u.conjugate(&z2));
    ((u.clone(), u), v)
}

/// Certifies a power bound for the membership scan: a certified finite
/// order bounds the distinct powers outright; otherwise, when every relator
/// abelianizes to zero and y does not, the abelianized equation
/// ab(x) = p·ab(y) pins down the only exponent that could work.
fn certified_rho(
    y: &Word,
    oracle: &dyn WordOracle,
    order_cutoff: u64,
    lattice_valid: bool,
    x: &Word,
    rank: usize,
) -> Option<(u64, &'static str)> {
    if let ElementOrder::Finite(k) = order_of_nonempty(y, oracle, order_cutoff) {
        return Some((k, "finite order"));
    }
    if !lattice_valid {
        return None;
    }
    let ab_y = abelianization(y, rank);
    if ab_y.iter().all(|&c| c == 0) {
        return None;
    }
    let ab_x = abelianization(x, rank);
    let pivot = ab_y.iter().position(|&c| c != 0).expect("nonzero column");
    if ab_y[pivot] == 0 || ab_x[pivot] % ab_y[pivot] != 0 {
        return Some((1, "abelianized equation unsolvable"));
    }
    let p = ab_x[pivot] / ab_y[pivot];
    if p < 1 || (0..rank).any(|i| ab_y[i] * p != ab_x[i]) {
        return Some((1, "abelianized equation unsolvable"));
    }
    Some((p as u64, "abelianized equation pins the exponent"))
}

fn order_of_nonempty(y: &Word, oracle: &dyn WordOracle, cutoff: u64) -> ElementOrder {
    if y.is_empty() {
        return ElementOrder::Finite(1);
    }
    order_of(y, oracle, cutoff)
}

#[derive(Debug)]
enum ExhaustiveMatch {
    Member(u64),
    NonMember,
    Inconclusive,
}

/// The independent side of the semigroup audit: for each power, find y^p's
/// representative among the ball elements by oracle matching and compare it
/// with x's.
fn exhaustive_power_match(
    x: &Word,
    y: &Word,
    oracle: &dyn WordOracle,
    rho: u64,
    ball: &BallIndex,
) -> ExhaustiveMatch {
    let Some(x_rep) = ball_representative(x, oracle, ball) else {
        return ExhaustiveMatch::Inconclusive;
    };
    for p in 1..=rho {
        let power = y.power(p as i64);
        match ball_representative(&power, oracle, ball) {
            Some(rep) if rep == x_rep => return ExhaustiveMatch::Member(p),
            Some(_) => {}
            // outside a complete ball means longer than every ball element,
            // hence unequal to x; anything else is inconclusive
            None if ball.complete() && power.len() > ball.radius() => {}
            None => return ExhaustiveMatch::Inconclusive,
        }
    }
    ExhaustiveMatch::NonMember
}

fn ball_representative(w: &Word, oracle: &dyn WordOracle, ball: &BallIndex) -> Option<usize> {
    for (idx, e) in ball.elements().iter().enumerate() {
        match equal(oracle, w, e) {
            Verdict::Trivial => return Some(idx),
            Verdict::Nontrivial => {}
            Verdict::Unknown => return None,
        }
    }
    None
}

fn render_word(p: &Presentation, w: &Word) -> String {
    p.alphabet().format_word(w)
}

fn render_pair(sys: &FibreSystem, g1: &Word, g2: &Word) -> String {
    format!("({}, {})", render_word(sys.base(), g1), render_word(sys.base(), g2))
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

fn worker_pool() -> rayon::ThreadPool {
    let workers = std::env::var("FPG_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 1);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    builder.build().expect("worker pool")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn csv_for(table: &FunctionTable) -> String {
    let mut out = String::from("n,value,exactness\n");
    for s in &table.samples {
        let _ = writeln!(out, "{},{},{}", s.n, s.value, s.exactness.as_str());
    }
    out
}

/// Writes `report.json` plus one JSON and/or CSV file per table into
/// `out_dir`, creating it if needed. Tables sharing a name get `-2`, `-3`,
/// … suffixes in encounter order. Returns the files written. Identical
/// reports produce byte-identical files: emission adds no timestamps and
/// serializes no unordered containers.
pub fn emit(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut written = Vec::new();
    let report_path = out_dir.join("report.json");
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    write_file(&report_path, format!("{json}\n").as_bytes())?;
    written.push(report_path);
    let mut seen: HashMap<String, usize> = HashMap::new();
    for table in &report.tables {
        let base = table.name.as_str().to_string();
        let count = seen.entry(base.clone()).or_insert(0);
        *count += 1;
        let stem = if *count == 1 { base } else { format!("{base}-{count}") };
        if report.config.formats.iter().any(|f| f == "json") {
            let path = out_dir.join(format!("{stem}.json"));
            let json = serde_json::to_string_pretty(table).expect("table serializes");
            write_file(&path, format!("{json}\n").as_bytes())?;
            written.push(path);
        }
        if report.config.formats.iter().any(|f| f == "csv") {
            let path = out_dir.join(format!("{stem}.csv"));
            write_file(&path, csv_for(table).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

/// The process exit code a report earns: 2 when any audit sample failed,
/// 3 when everything held but some sample (table or audit) was left
/// uncertified, 0 when every value is exact and every audit passed.
pub fn exit_code(report: &ExperimentReport) -> i32 {
    if report.audits.iter().any(|a| a.failed > 0) {
        return 2;
    }
    let clipped_audit = report.audits.iter().any(|a| a.unknown > 0);
    let clipped_table = report
        .tables
        .iter()
        .any(|t| t.samples.iter().any(|s| s.exactness != Exactness::Exact));
    if clipped_audit || clipped_table {
        return 3;
    }
    0
}

/// Loads a config file, prepares and runs the experiment, and emits the
/// report next to the config: the complete `run` verb.
pub fn run_experiment(
    config_path: &Path,
) -> Result<(ExperimentReport, Vec<PathBuf>, i32), HarnessError> {
    let text = fs::read_to_string(config_path).map_err(|e| io_err(config_path, e))?;
    let config = ExperimentConfig::from_toml(&text)?;
    let base_dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let out_dir = base_dir.join(&config.output);
    let experiment = Experiment::prepare(config, base_dir)?;
    let report = experiment.run();
    let files = emit(&report, &out_dir)?;
    let code = exit_code(&report);
    Ok((report, files, code))
}
