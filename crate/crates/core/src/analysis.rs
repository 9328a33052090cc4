//! Guarantee reports, transcript diagnostics for the proportional strategy,
//! and the linear system bounding the altruistic guarantee.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::engine::{replay_states, GameState, Transcript, VerifyError};
use crate::items::ItemSet;
use crate::lp::{self, Constraint, LinearProgram, LpOutcome, Relation};
use crate::model::{residual_instance, AgentId, Allocation, FractionalPartition, Instance, ModelError};
use crate::rational::{self, int, rat, Rational};
use crate::shares::{aps_exact, verify_fractional_partition, ShareError, ShareWitness};
use crate::strategies::best_marginal;
use crate::valuation::{SizeGuard, Truncated, Valuation, ValuationOracle};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("z must exceed 5/2, got {0}")]
    ZTooSmall(String),
    #[error("n must be positive")]
    ZeroN,
    #[error("fractional partition does not certify the share")]
    BadWitness,
    #[error(transparent)]
    Replay(#[from] VerifyError),
    #[error(transparent)]
    Share(#[from] ShareError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

// ---------------------------------------------------------------------------
// The linear system over x1..x4, y, q.

/// Number of agents in the system; `Infinite` sets `1/n = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentCount {
    Finite(u64),
    Infinite,
}

impl AgentCount {
    pub fn inverse(&self) -> Rational {
        match self {
            AgentCount::Finite(n) => rat(1, *n as i64),
            AgentCount::Infinite => Rational::zero(),
        }
    }
}

impl fmt::Display for AgentCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentCount::Finite(n) => write!(f, "{n}"),
            AgentCount::Infinite => write!(f, "inf"),
        }
    }
}

pub const SYSTEM_VARIABLES: [&str; 6] = ["x1", "x2", "x3", "x4", "y", "q"];

/// Four `≤` constraints over nonnegative `x1, x2, x3, x4, y, q`.
/// Constraint 2 is strict: it encodes a final value below 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremSystem {
    pub z: Rational,
    pub n: AgentCount,
    pub rows: Vec<Constraint>,
    pub strict: Vec<bool>,
}

/// Builds the system for a fixed `z > 5/2`.
pub fn build_theorem_system(z: &Rational, n: AgentCount) -> Result<TheoremSystem, AnalysisError> {
    if *z <= rat(5, 2) {
        return Err(AnalysisError::ZTooSmall(rational::format_rational(z)));
    }
    if n == AgentCount::Finite(0) {
        return Err(AnalysisError::ZeroN);
    }
    let slope = z - rat(5, 2);
    let le = |coeffs: Vec<Rational>, rhs: Rational| Constraint::new(coeffs, Relation::Le, rhs);
    let rows = vec![
        le(
            vec![int(1), int(1), int(1), int(1), int(1), int(0)],
            int(1) - n.inverse(),
        ),
        le(
            vec![int(-2), rat(-3, 2), rat(-4, 3), rat(-5, 4), rat(-6, 5), int(1)],
            int(1) - z,
        ),
        le(vec![int(2), int(0), int(0), int(0), int(0), int(0)], int(1)),
        // (6/5)y + q ≥ (z − 5/2)(3 − 2x1 − 3x2 − 4x3 − 5x4), moved to ≤ form.
        le(
            vec![
                -(&slope * int(2)),
                -(&slope * int(3)),
                -(&slope * int(4)),
                -(&slope * int(5)),
                rat(-6, 5),
                int(-1),
            ],
            -(&slope * int(3)),
        ),
    ];
    Ok(TheoremSystem {
        z: z.clone(),
        n,
        rows,
        strict: vec![false, true, false, false],
    })
}

/// Nonnegative row multipliers and the combined inequality
/// `coeffs · (x, y, q) ≤ constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub multipliers: Vec<Rational>,
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl Certificate {
    fn from_multipliers(system: &TheoremSystem, multipliers: Vec<Rational>) -> Self {
        let mut coeffs = vec![Rational::zero(); SYSTEM_VARIABLES.len()];
        let mut constant = Rational::zero();
        for (row, u) in system.rows.iter().zip(&multipliers) {
            for (c, a) in coeffs.iter_mut().zip(&row.coeffs) {
                *c += u * a;
            }
            constant += u * &row.rhs;
        }
        Self {
            multipliers,
            coeffs,
            constant,
        }
    }

    /// The combination contradicts nonnegativity: coefficients are
    /// nonnegative and either the constant is negative, or it is zero and
    /// a strict row carries positive weight.
    pub fn verify(&self, system: &TheoremSystem) -> bool {
        let recomputed = Self::from_multipliers(system, self.multipliers.clone());
        if recomputed != *self || self.multipliers.len() != system.rows.len() {
            return false;
        }
        if self.multipliers.iter().any(Signed::is_negative)
            || self.coeffs.iter().any(Signed::is_negative)
        {
            return false;
        }
        self.constant.is_negative()
            || (self.constant.is_zero()
                && self
                    .multipliers
                    .iter()
                    .zip(&system.strict)
                    .any(|(u, s)| *s && u.is_positive()))
    }

    /// Multipliers divided by the first positive entry of `reference`'s
    /// support; equal to `reference` iff proportional to it.
    pub fn proportional_to(&self, reference: &[Rational]) -> bool {
        let Some(i) = reference.iter().position(Signed::is_positive) else {
            return false;
        };
        if !self.multipliers[i].is_positive() || reference.len() != self.multipliers.len() {
            return false;
        }
        let scale = &reference[i] / &self.multipliers[i];
        self.multipliers
            .iter()
            .zip(reference)
            .all(|(u, r)| u * &scale == *r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A point satisfying every row, with slack `margin > 0` on strict rows.
    Feasible { witness: Vec<Rational>, margin: Rational },
    Infeasible(Certificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// Decides feasibility exactly.
///
/// Feasible systems return a point maximising the slack on strict rows
/// (capped at 1). Infeasible systems return, when one exists, the
/// certificate with unit weight on the strict rows whose constant is
/// smallest; otherwise a Farkas certificate of the non-strict system.
pub fn check_feasible(system: &TheoremSystem) -> Feasibility {
    let vars = SYSTEM_VARIABLES.len();
    // Variables x (6) and slack t; maximise t.
    let mut primal = LinearProgram::new(vars + 1).with_objective({
        let mut c = vec![Rational::zero(); vars + 1];
        c[vars] = int(-1);
        c
    });
    for (row, strict) in system.rows.iter().zip(&system.strict) {
        let mut coeffs = row.coeffs.clone();
        coeffs.push(if *strict { int(1) } else { int(0) });
        primal.push(Constraint::new(coeffs, Relation::Le, row.rhs.clone()));
    }
    let mut cap = vec![Rational::zero(); vars + 1];
    cap[vars] = int(1);
    primal.push(Constraint::new(cap, Relation::Le, int(1)));

    match lp::solve(&primal) {
        LpOutcome::Optimal(sol) if sol.x[vars].is_positive() => {
            return Feasibility::Feasible {
                witness: sol.x[..vars].to_vec(),
                margin: sol.x[vars].clone(),
            }
        }
        LpOutcome::Optimal(_) => {}
        LpOutcome::Infeasible { farkas } => {
            if let Some(cert) = tightest_certificate(system) {
                return Feasibility::Infeasible(cert);
            }
            let u = farkas[..system.rows.len()].to_vec();
            return Feasibility::Infeasible(Certificate::from_multipliers(system, u));
        }
        LpOutcome::Unbounded => unreachable!("the slack is capped"),
    }
    Feasibility::Infeasible(
        tightest_certificate(system).expect("zero optimal slack implies a strict certificate"),
    )
}

/// `min Σ u_i b_i` over `u ≥ 0` with `Σ u_i A_i ≥ 0` and unit total weight
/// on strict rows; `None` unless the optimum exists and is `≤ 0`.
fn tightest_certificate(system: &TheoremSystem) -> Option<Certificate> {
    let rows = system.rows.len();
    if !system.strict.iter().any(|s| *s) {
        return None;
    }
    let objective = system.rows.iter().map(|r| r.rhs.clone()).collect();
    let mut dual = LinearProgram::new(rows).with_objective(objective);
    for j in 0..SYSTEM_VARIABLES.len() {
        let coeffs = system.rows.iter().map(|r| r.coeffs[j].clone()).collect();
        dual.push(Constraint::new(coeffs, Relation::Ge, Rational::zero()));
    }
    let strict_weight = system
        .strict
        .iter()
        .map(|s| if *s { int(1) } else { int(0) })
        .collect();
    dual.push(Constraint::new(strict_weight, Relation::Eq, int(1)));
    match lp::solve(&dual) {
        LpOutcome::Optimal(sol) if !sol.value.is_positive() => {
            Some(Certificate::from_multipliers(system, sol.x))
        }
        _ => None,
    }
}

/// The largest `z` in `grid` whose system is feasible.
pub fn largest_feasible_z(grid: &[Rational], n: AgentCount) -> Option<Rational> {
    grid.iter()
        .filter(|z| {
            build_theorem_system(z, n)
                .map(|s| check_feasible(&s).is_feasible())
                .unwrap_or(false)
        })
        .max()
        .cloned()
}

/// Multipliers that combine the system at `z = 27/10` into a contradiction.
pub fn reference_multipliers() -> Vec<Rational> {
    vec![rat(9, 5), int(1), rat(1, 5), rat(1, 2)]
}

// ---------------------------------------------------------------------------
// Guarantee reports.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeRow {
    pub agent: AgentId,
    pub share: Rational,
    pub value: Rational,
    /// `value / share`, absent for a zero share.
    pub ratio: Option<Rational>,
    pub target: Rational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeReport {
    pub rows: Vec<GuaranteeRow>,
}

impl GuaranteeReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GuaranteeRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Per agent in `shares`: pass iff `v_i(A_i) ≥ target_i · share_i`.
/// Agents without a target use target 1.
pub fn guarantee_report(
    instance: &Instance,
    allocation: &Allocation,
    shares: &BTreeMap<AgentId, Rational>,
    targets: &BTreeMap<AgentId, Rational>,
) -> Result<GuaranteeReport, AnalysisError> {
    let mut rows = Vec::with_capacity(shares.len());
    for (&agent, share) in shares {
        let value = allocation.value_of(instance, agent)?;
        let target = targets.get(&agent).cloned().unwrap_or_else(rational::one);
        let ratio = share.is_positive().then(|| &value / share);
        let pass = value >= &target * share;
        rows.push(GuaranteeRow {
            agent,
            share: share.clone(),
            value,
            ratio,
            target,
            pass,
        });
    }
    Ok(GuaranteeReport { rows })
}

// ---------------------------------------------------------------------------
// Diagnostics of a proportional-strategy run.

/// Quantities of a run observed from round `from` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundDiagnostics {
    /// Earliest round after which every other agent is inactive or no
    /// item remains.
    pub f: u32,
    /// Items `p` holds after round `f`.
    pub c: ItemSet,
    /// Items others won in rounds `from + 1 ..= f`.
    pub o: ItemSet,
    /// Items unallocated after round `f`.
    pub rest: ItemSet,
    /// `Σ λ_S v(S)`.
    pub l0: Rational,
    /// `Σ λ_S v(S∖O ∪ C | C)`.
    pub lf: Rational,
    pub v_c: Rational,
    /// `Σ_{e∈O} v(e | C)`.
    pub o_marginals: Rational,
    /// `v(C ∪ rest)`.
    pub v_c_rest: Rational,
}

/// Computes the diagnostics from replayed `states` (index `r` = after `r`
/// rounds), starting at round boundary `from`.
pub fn lower_bound_diagnostics<V: ValuationOracle + ?Sized>(
    states: &[GameState],
    transcript: &Transcript,
    from: usize,
    p: AgentId,
    v: &V,
    lambda: &FractionalPartition,
) -> LowerBoundDiagnostics {
    let last = states.len() - 1;
    let settled = |state: &GameState| {
        state.remaining().is_empty() || state.agents().all(|a| a.id == p || !a.active)
    };
    let f = (from..=last).find(|&r| settled(&states[r])).unwrap_or(last);
    let c = states[f].agent(p).bundle.clone();
    let o: ItemSet = transcript.rounds[from..f]
        .iter()
        .filter(|r| r.winner != p)
        .flat_map(|r| r.items.iter().copied())
        .collect();
    let rest = states[f].remaining().clone();
    let v_c = v.value(&c);
    let l0 = lambda
        .entries
        .iter()
        .fold(Rational::zero(), |acc, (s, w)| acc + w * v.value(s));
    let lf = lambda.entries.iter().fold(Rational::zero(), |acc, (s, w)| {
        acc + w * (v.value(&s.difference(&o).union(&c)) - &v_c)
    });
    let o_marginals = o
        .iter()
        .fold(Rational::zero(), |acc, e| acc + v.value(&c.with(e)) - &v_c);
    let v_c_rest = v.value(&c.union(&rest));
    LowerBoundDiagnostics {
        f: f as u32,
        c,
        o,
        rest,
        l0,
        lf,
        v_c,
        o_marginals,
        v_c_rest,
    }
}

/// One named check over a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub const OBS_DECREASING_BIDS: &str = "decreasing-bids";
pub const CLAIM_DICHOTOMY: &str = "bid-dichotomy";
pub const CLAIM_REST_BOUND: &str = "rest-value-bound";
pub const CLAIM_FINAL_BOUND: &str = "final-value-bound";
pub const CLAIM_L0_BOUND: &str = "l0-bound";
pub const CLAIM_PAYMENT_BOUND: &str = "others-marginal-bound";
pub const CLAIM_RESIDUAL_APS: &str = "residual-aps";
pub const GUARANTEE: &str = "guarantee";

#[derive(Debug, Clone)]
pub struct ProportionalAnalysis {
    /// Rounds played while a large item remained.
    pub s: u32,
    pub won_large_item: bool,
    pub gamma: Rational,
    pub b_hat: Rational,
    pub diagnostics: Option<LowerBoundDiagnostics>,
    pub checks: Vec<Check>,
}

impl ProportionalAnalysis {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(name: &'static str, pass: bool, detail: impl FnOnce() -> String) -> Check {
    Check {
        name,
        pass,
        detail: if pass { String::new() } else { detail() },
    }
}

/// Replays a run in which `p` played proportional(ρ) with target `share`
/// (her exact APS) and checks the structural properties the guarantee
/// rests on, on the residual instance after the large-item phase.
pub fn analyze_proportional_run(
    instance: &Instance,
    transcript: &Transcript,
    p: AgentId,
    rho: &Rational,
    share: &Rational,
    guard: SizeGuard,
) -> Result<ProportionalAnalysis, AnalysisError> {
    let states = replay_states(instance, transcript)?;
    let agent = instance.agent(p)?;
    let b = agent.entitlement.clone();
    let original: &Valuation = &agent.valuation;
    let v = Truncated::new(original, share.clone());
    let mut checks = Vec::new();

    let final_value = original.value(&states.last().expect("initial state").agent(p).bundle);
    checks.push(check(GUARANTEE, final_value >= rho * share, || {
        format!(
            "value {} below ρ·share = {}",
            rational::Q(&final_value),
            rational::Q(&(rho * share))
        )
    }));
    if !share.is_positive() {
        return Ok(ProportionalAnalysis {
            s: 0,
            won_large_item: false,
            gamma: rational::one(),
            b_hat: b,
            diagnostics: None,
            checks,
        });
    }

    let threshold = int(2) * rho * share;
    let has_large = |state: &GameState| {
        state
            .remaining()
            .iter()
            .any(|e| v.value(&ItemSet::singleton(e)) > threshold)
    };
    let rounds = transcript.rounds.len();
    let s = (0..rounds).take_while(|&r| has_large(&states[r])).count();
    let won_large_item = !states[s].agent(p).bundle.is_empty();
    let p_active = states[s].agent(p).active;
    if won_large_item || !p_active || s == rounds {
        let gamma = states[s].active_budget();
        return Ok(ProportionalAnalysis {
            s: s as u32,
            won_large_item,
            gamma,
            b_hat: b,
            diagnostics: None,
            checks,
        });
    }

    // Residual instance after round s, with p's valuation truncated.
    let (residual, gamma) = residual_instance(&states[s], instance, Some((p, share.clone())))?;
    let b_hat = &states[s].agent(p).budget / &gamma;
    let residual_aps = aps_exact(&v, &b_hat, residual.item_set(), guard)?;
    if s > 0 {
        checks.push(check(CLAIM_RESIDUAL_APS, residual_aps.value == *share, || {
            format!(
                "residual APS {} differs from {}",
                rational::Q(&residual_aps.value),
                rational::Q(share)
            )
        }));
    }
    let ShareWitness::Fractional(lambda) = &residual_aps.witness else {
        unreachable!("APS witnesses are fractional")
    };
    let z = rational::min(&residual_aps.value, share);
    if !verify_fractional_partition(lambda, &v, &b_hat, &z) {
        return Err(AnalysisError::BadWitness);
    }

    // Bids in rounds s+1.. while p is active.
    let scale = &gamma * &b_hat / (int(2) * rho * share);
    let mut previous: Option<Rational> = None;
    let mut decreasing = true;
    let mut dichotomy_failures = Vec::new();
    for r in s..rounds {
        let Some(bid) = transcript.rounds[r].bids.get(&p) else {
            continue;
        };
        if let Some(prev) = &previous {
            decreasing &= bid <= prev;
        }
        previous = Some(bid.clone());
        let state = &states[r];
        let bundle = &state.agent(p).bundle;
        let top = best_marginal(&v, bundle, state.remaining())
            .map(|(_, g)| g)
            .unwrap_or_else(Rational::zero);
        let formula = &scale * top;
        if *bid != formula && v.value(bundle) < rho * share {
            dichotomy_failures.push(r as u32 + 1);
        }
    }
    checks.push(check(OBS_DECREASING_BIDS, decreasing, || {
        "bids increased within the proportional phase".into()
    }));
    checks.push(check(CLAIM_DICHOTOMY, dichotomy_failures.is_empty(), || {
        format!("bid below the formula in rounds {dichotomy_failures:?}")
    }));

    let d = lower_bound_diagnostics(&states, transcript, s, p, &v, lambda);
    checks.push(check(CLAIM_REST_BOUND, d.v_c_rest >= &d.v_c + &d.lf, || {
        format!(
            "v(C ∪ rest) = {} < v(C) + L^f = {}",
            rational::Q(&d.v_c_rest),
            rational::Q(&(&d.v_c + &d.lf))
        )
    }));
    let final_truncated = v.value(&states.last().expect("state").agent(p).bundle);
    let floor = rational::min(&(&d.lf + &d.v_c), &threshold);
    checks.push(check(CLAIM_FINAL_BOUND, final_truncated >= floor, || {
        format!(
            "final {} < min(L^f + v(C), 2ρ·share) = {}",
            rational::Q(&final_truncated),
            rational::Q(&floor)
        )
    }));
    let l0_bound = &d.lf + &d.v_c + &b_hat * &d.o_marginals;
    checks.push(check(CLAIM_L0_BOUND, d.l0 <= l0_bound, || {
        format!(
            "L0 = {} > {}",
            rational::Q(&d.l0),
            rational::Q(&l0_bound)
        )
    }));
    if d.v_c < rho * share {
        let bound = int(2) * rho * (rational::one() - &b_hat) * share / &b_hat;
        checks.push(check(CLAIM_PAYMENT_BOUND, d.o_marginals <= bound, || {
            format!(
                "Σ v(e|C) = {} > {}",
                rational::Q(&d.o_marginals),
                rational::Q(&bound)
            )
        }));
    }

    Ok(ProportionalAnalysis {
        s: s as u32,
        won_large_item,
        gamma,
        b_hat,
        diagnostics: Some(d),
        checks,
    })
}
