//! Versioned JSON documents for instances, transcripts and run reports.
//!
//! Rationals are always `"p/q"` strings. Valuations are stored structurally.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{guarantee_report, AnalysisError, Check, GuaranteeReport, GuaranteeRow};
use crate::engine::{
    verify_transcript, AltruisticTrigger, GameConfig, GameMode, RoundRecord, TieBreakPolicy,
    Transcript, Violation, ViolationKind, VerifyError,
};
use crate::items::{Item, ItemSet};
use crate::model::{Agent, AgentId, Allocation, Instance, ModelError};
use crate::rational::{format_rational, parse_rational, ParseRationalError, Rational};
use crate::valuation::{
    AdditiveValuation, CoverageValuation, RowSubstitutesValuation, SubstituteRow, TableValuation,
    UnitDemandValuation, Valuation, ValuationError, XosValuation,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("{0}")]
    Invalid(String),
}

fn q(value: &Rational) -> String {
    format_rational(value)
}

fn p(text: &str) -> Result<Rational, IoError> {
    Ok(parse_rational(text)?)
}

fn check_version(version: u32) -> Result<(), IoError> {
    if version != FORMAT_VERSION {
        return Err(IoError::Version(version));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Valuations and instances.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDoc {
    pub weight: String,
    pub items: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntryDoc {
    pub items: Vec<u32>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValuationDoc {
    Additive { values: ItemValues },
    UnitDemand { values: ItemValues },
    Xos { clauses: Vec<ItemValues> },
    RowSubstitutes { rows: Vec<RowDoc> },
    Coverage { weights: Vec<String>, covers: Vec<(u32, Vec<usize>)> },
    Table { entries: Vec<TableEntryDoc> },
    Truncated { inner: Box<ValuationDoc>, cap: String },
    Scaled { inner: Box<ValuationDoc>, factor: String },
}

/// `[item, "p/q"]` pairs in item order. Integer-keyed maps do not survive
/// internally tagged enums.
pub type ItemValues = Vec<(u32, String)>;

fn values_doc(values: &BTreeMap<Item, Rational>) -> ItemValues {
    values.iter().map(|(e, v)| (e.0, q(v))).collect()
}

fn values_from(doc: &ItemValues) -> Result<BTreeMap<Item, Rational>, IoError> {
    doc.iter().map(|(e, v)| Ok((Item(*e), p(v)?))).collect()
}

impl ValuationDoc {
    pub fn from_valuation(v: &Valuation) -> Self {
        match v {
            Valuation::Additive(a) => ValuationDoc::Additive {
                values: values_doc(a.values()),
            },
            Valuation::UnitDemand(u) => ValuationDoc::UnitDemand {
                values: values_doc(u.values()),
            },
            Valuation::Xos(x) => ValuationDoc::Xos {
                clauses: x.clauses().iter().map(|c| values_doc(c.values())).collect(),
            },
            Valuation::RowSubstitutes(r) => ValuationDoc::RowSubstitutes {
                rows: r
                    .rows()
                    .iter()
                    .map(|row| RowDoc {
                        weight: q(&row.weight),
                        items: row.items.iter().map(|e| e.0).collect(),
                    })
                    .collect(),
            },
            Valuation::Coverage(c) => ValuationDoc::Coverage {
                weights: c.weights().iter().map(q).collect(),
                covers: c.covers().iter().map(|(e, s)| (e.0, s.clone())).collect(),
            },
            Valuation::Table(t) => ValuationDoc::Table {
                entries: t
                    .entries()
                    .iter()
                    .map(|(s, v)| TableEntryDoc {
                        items: s.iter().map(|e| e.0).collect(),
                        value: q(v),
                    })
                    .collect(),
            },
            Valuation::Truncated { inner, cap } => ValuationDoc::Truncated {
                inner: Box::new(Self::from_valuation(inner)),
                cap: q(cap),
            },
            Valuation::Scaled { inner, factor } => ValuationDoc::Scaled {
                inner: Box::new(Self::from_valuation(inner)),
                factor: q(factor),
            },
        }
    }

    pub fn to_valuation(&self) -> Result<Valuation, IoError> {
        Ok(match self {
            ValuationDoc::Additive { values } => AdditiveValuation::new(values_from(values)?)?.into(),
            ValuationDoc::UnitDemand { values } => {
                UnitDemandValuation::new(values_from(values)?)?.into()
            }
            ValuationDoc::Xos { clauses } => XosValuation::new(
                clauses
                    .iter()
                    .map(|c| Ok(AdditiveValuation::new(values_from(c)?)?))
                    .collect::<Result<_, IoError>>()?,
            )?
            .into(),
            ValuationDoc::RowSubstitutes { rows } => RowSubstitutesValuation::new(
                rows.iter()
                    .map(|r| {
                        Ok(SubstituteRow {
                            weight: p(&r.weight)?,
                            items: r.items.iter().copied().map(Item).collect(),
                        })
                    })
                    .collect::<Result<_, IoError>>()?,
            )?
            .into(),
            ValuationDoc::Coverage { weights, covers } => CoverageValuation::new(
                weights.iter().map(|w| p(w)).collect::<Result<_, _>>()?,
                covers.iter().map(|(e, s)| (Item(*e), s.clone())).collect(),
            )?
            .into(),
            ValuationDoc::Table { entries } => TableValuation::new(
                entries
                    .iter()
                    .map(|t| Ok((t.items.iter().copied().map(Item).collect(), p(&t.value)?)))
                    .collect::<Result<_, IoError>>()?,
            )
            .into(),
            ValuationDoc::Truncated { inner, cap } => inner.to_valuation()?.truncated(p(cap)?),
            ValuationDoc::Scaled { inner, factor } => inner.to_valuation()?.scaled(p(factor)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentDoc {
    pub id: u32,
    pub entitlement: String,
    pub valuation: ValuationDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub version: u32,
    pub items: Vec<u32>,
    pub agents: Vec<AgentDoc>,
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        Self {
            version: FORMAT_VERSION,
            items: instance.items().iter().map(|e| e.0).collect(),
            agents: instance
                .agents()
                .iter()
                .map(|a| AgentDoc {
                    id: a.id.0,
                    entitlement: q(&a.entitlement),
                    valuation: ValuationDoc::from_valuation(&a.valuation),
                })
                .collect(),
        }
    }

    /// Validates entitlements (positive, summing to 1) through [`Instance::new`].
    pub fn to_instance(&self) -> Result<Instance, IoError> {
        check_version(self.version)?;
        let agents = self
            .agents
            .iter()
            .map(|a| Ok(Agent::new(a.id, p(&a.entitlement)?, a.valuation.to_valuation()?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(Instance::new(
            self.items.iter().copied().map(Item).collect(),
            agents,
        )?)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    serde_json::from_str::<InstanceDoc>(text)?.to_instance()
}

pub fn write_instance(instance: &Instance) -> String {
    to_json(&InstanceDoc::from_instance(instance))
}

/// Pretty JSON with a trailing newline. Maps are ordered, so output is
/// byte-stable.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents always serialize");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Transcripts.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum TieBreakDoc {
    Lexicographic,
    Scripted { rounds: Vec<Vec<u32>> },
    SeededRandom,
    AdversarialAgainst { agent: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ModeDoc {
    Standard,
    Altruistic { rho: String, trigger: String },
    MultiPick,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub mode: ModeDoc,
    pub tie_breaker: TieBreakDoc,
    pub seed: u64,
}

impl ConfigDoc {
    pub fn from_config(config: &GameConfig) -> Self {
        Self {
            mode: match &config.mode {
                GameMode::Standard => ModeDoc::Standard,
                GameMode::MultiPick => ModeDoc::MultiPick,
                GameMode::Altruistic { rho, trigger } => ModeDoc::Altruistic {
                    rho: q(rho),
                    trigger: match trigger {
                        AltruisticTrigger::Exceeds => "exceeds",
                        AltruisticTrigger::Reaches => "reaches",
                    }
                    .into(),
                },
            },
            tie_breaker: match &config.tie_breaker {
                TieBreakPolicy::Lexicographic => TieBreakDoc::Lexicographic,
                TieBreakPolicy::SeededRandom => TieBreakDoc::SeededRandom,
                TieBreakPolicy::AdversarialAgainst(a) => {
                    TieBreakDoc::AdversarialAgainst { agent: a.0 }
                }
                TieBreakPolicy::Scripted(rounds) => TieBreakDoc::Scripted {
                    rounds: rounds
                        .iter()
                        .map(|r| r.iter().map(|a| a.0).collect())
                        .collect(),
                },
            },
            seed: config.seed,
        }
    }

    pub fn to_config(&self) -> Result<GameConfig, IoError> {
        let mode = match &self.mode {
            ModeDoc::Standard => GameMode::Standard,
            ModeDoc::MultiPick => GameMode::MultiPick,
            ModeDoc::Altruistic { rho, trigger } => GameMode::Altruistic {
                rho: p(rho)?,
                trigger: parse_trigger(trigger)?,
            },
        };
        let tie_breaker = match &self.tie_breaker {
            TieBreakDoc::Lexicographic => TieBreakPolicy::Lexicographic,
            TieBreakDoc::SeededRandom => TieBreakPolicy::SeededRandom,
            TieBreakDoc::AdversarialAgainst { agent } => {
                TieBreakPolicy::AdversarialAgainst(AgentId(*agent))
            }
            TieBreakDoc::Scripted { rounds } => TieBreakPolicy::Scripted(
                rounds
                    .iter()
                    .map(|r| r.iter().copied().map(AgentId).collect())
                    .collect(),
            ),
        };
        Ok(GameConfig {
            mode,
            tie_breaker,
            seed: self.seed,
        })
    }
}

pub fn parse_trigger(text: &str) -> Result<AltruisticTrigger, IoError> {
    match text {
        "exceeds" => Ok(AltruisticTrigger::Exceeds),
        "reaches" => Ok(AltruisticTrigger::Reaches),
        other => Err(IoError::Invalid(format!("unknown trigger {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundDoc {
    pub round: u32,
    pub bids: BTreeMap<u32, String>,
    pub winner: u32,
    pub items: Vec<u32>,
    pub payment: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub round: u32,
    pub agent: u32,
    pub kind: String,
    pub requested: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptDoc {
    pub config: ConfigDoc,
    pub rounds: Vec<RoundDoc>,
    pub allocation: BTreeMap<u32, Vec<u32>>,
    pub unallocated: Vec<u32>,
    pub violations: Vec<ViolationDoc>,
}

fn ids(set: &ItemSet) -> Vec<u32> {
    set.iter().map(|e| e.0).collect()
}

fn set_of(ids: &[u32]) -> ItemSet {
    ids.iter().copied().map(Item).collect()
}

impl TranscriptDoc {
    pub fn from_transcript(t: &Transcript) -> Self {
        Self {
            config: ConfigDoc::from_config(&t.config),
            rounds: t
                .rounds
                .iter()
                .map(|r| RoundDoc {
                    round: r.round,
                    bids: r.bids.iter().map(|(a, b)| (a.0, q(b))).collect(),
                    winner: r.winner.0,
                    items: r.items.iter().map(|e| e.0).collect(),
                    payment: q(&r.payment),
                })
                .collect(),
            allocation: t
                .allocation
                .bundles()
                .iter()
                .map(|(a, s)| (a.0, ids(s)))
                .collect(),
            unallocated: ids(&t.unallocated),
            violations: t
                .violations
                .iter()
                .map(|v| ViolationDoc {
                    round: v.round,
                    agent: v.agent.0,
                    kind: match v.kind {
                        ViolationKind::NegativeBid => "negative_bid",
                        ViolationKind::BidAboveBudget => "bid_above_budget",
                    }
                    .into(),
                    requested: q(&v.requested),
                })
                .collect(),
        }
    }

    pub fn to_transcript(&self) -> Result<Transcript, IoError> {
        let rounds = self
            .rounds
            .iter()
            .map(|r| {
                Ok(RoundRecord {
                    round: r.round,
                    bids: r
                        .bids
                        .iter()
                        .map(|(&a, b)| Ok((AgentId(a), p(b)?)))
                        .collect::<Result<_, IoError>>()?,
                    winner: AgentId(r.winner),
                    items: r.items.iter().copied().map(Item).collect(),
                    payment: p(&r.payment)?,
                })
            })
            .collect::<Result<_, IoError>>()?;
        let violations = self
            .violations
            .iter()
            .map(|v| {
                Ok(Violation {
                    round: v.round,
                    agent: AgentId(v.agent),
                    kind: match v.kind.as_str() {
                        "negative_bid" => ViolationKind::NegativeBid,
                        "bid_above_budget" => ViolationKind::BidAboveBudget,
                        other => return Err(IoError::Invalid(format!("unknown violation {other:?}"))),
                    },
                    requested: p(&v.requested)?,
                })
            })
            .collect::<Result<_, IoError>>()?;
        Ok(Transcript {
            config: self.config.to_config()?,
            rounds,
            allocation: Allocation::new(
                self.allocation
                    .iter()
                    .map(|(&a, s)| (AgentId(a), set_of(s)))
                    .collect(),
            )?,
            unallocated: set_of(&self.unallocated),
            violations,
        })
    }
}

// ---------------------------------------------------------------------------
// Reports.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeRowDoc {
    pub agent: u32,
    pub share: String,
    pub value: String,
    pub ratio: Option<String>,
    pub target: String,
    pub pass: bool,
}

impl From<&GuaranteeRow> for GuaranteeRowDoc {
    fn from(r: &GuaranteeRow) -> Self {
        Self {
            agent: r.agent.0,
            share: q(&r.share),
            value: q(&r.value),
            ratio: r.ratio.as_ref().map(q),
            target: q(&r.target),
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub agent: u32,
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckDoc {
    pub fn new(agent: AgentId, check: &Check) -> Self {
        Self {
            agent: agent.0,
            name: check.name.into(),
            pass: check.pass,
            detail: check.detail.clone(),
        }
    }
}

/// Output of `play` and `alloc`: everything needed to re-verify offline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    /// `"play"` or `"alloc"`.
    pub command: String,
    pub instance: InstanceDoc,
    pub transcript: TranscriptDoc,
    pub guarantee: Vec<GuaranteeRowDoc>,
    #[serde(default)]
    pub diagnostics: Vec<CheckDoc>,
    /// Guess vectors of each conditional call, for `alloc`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub guesses: Vec<BTreeMap<u32, String>>,
}

impl RunReport {
    pub fn new(
        command: &str,
        instance: &Instance,
        transcript: &Transcript,
        guarantee: &GuaranteeReport,
    ) -> Self {
        Self {
            version: FORMAT_VERSION,
            command: command.into(),
            instance: InstanceDoc::from_instance(instance),
            transcript: TranscriptDoc::from_transcript(transcript),
            guarantee: guarantee.rows.iter().map(Into::into).collect(),
            diagnostics: Vec::new(),
            guesses: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.guarantee.iter().all(|r| r.pass) && self.diagnostics.iter().all(|c| c.pass)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("transcript does not replay: {0}")]
    Transcript(#[from] VerifyError),
    #[error("guarantee rows do not match the transcript")]
    GuaranteeMismatch,
}

/// Replays the transcript under its own config and recomputes every
/// guarantee row from the recorded shares and targets. `Ok(pass)` reports
/// whether every guarantee holds.
pub fn verify_report(report: &RunReport) -> Result<bool, ReportError> {
    check_version(report.version)?;
    let instance = report.instance.to_instance()?;
    let transcript = report.transcript.to_transcript()?;
    verify_transcript(&transcript, &instance, &transcript.config)?;
    let mut shares = BTreeMap::new();
    let mut targets = BTreeMap::new();
    for row in &report.guarantee {
        shares.insert(AgentId(row.agent), p(&row.share)?);
        targets.insert(AgentId(row.agent), p(&row.target)?);
    }
    let recomputed = guarantee_report(&instance, &transcript.allocation, &shares, &targets)
        .map_err(IoError::from)?;
    let docs: Vec<GuaranteeRowDoc> = recomputed.rows.iter().map(Into::into).collect();
    if docs != report.guarantee {
        return Err(ReportError::GuaranteeMismatch);
    }
    Ok(recomputed.all_pass())
}
