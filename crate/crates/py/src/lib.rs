//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! documents as JSON text, so nothing is rounded.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use bidfair::analysis::{build_theorem_system, check_feasible, guarantee_report, AgentCount, Feasibility};
use bidfair::engine::{run_game, GameConfig, Strategy};
use bidfair::instance_gen::{gen_random_submodular, EntitlementKind};
use bidfair::io::{self, RunReport};
use bidfair::poly::{unconditional_allocate, ShareMode};
use bidfair::rational::{format_rational, parse_rational, Rational};
use bidfair::shares::{aps_of, mms_of};
use bidfair::strategies::{default_rho, make_proportional_aps};
use bidfair::valuation::SizeGuard;
use bidfair::{AgentId, TieBreakPolicy};

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(value_error)
}

/// An allocation instance: items, agents, entitlements and valuations.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: bidfair::Instance,
}

#[pymethods]
impl PyInstance {
    /// Parses an instance document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::parse_instance(text).map_err(value_error)?,
        })
    }

    /// Random weighted-coverage instance.
    #[staticmethod]
    #[pyo3(signature = (seed, n, m, universe = 6, equal = false))]
    fn random(seed: u64, n: usize, m: usize, universe: usize, equal: bool) -> PyResult<Self> {
        let kind = if equal {
            EntitlementKind::Equal
        } else {
            EntitlementKind::Random
        };
        Ok(Self {
            inner: gen_random_submodular(seed, n, m, universe, kind).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        io::write_instance(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn entitlements(&self) -> Vec<String> {
        self.inner
            .agents()
            .iter()
            .map(|a| format_rational(&a.entitlement))
            .collect()
    }

    /// Exact maximin share of `agent`.
    fn mms(&self, agent: u32) -> PyResult<String> {
        let r = mms_of(&self.inner, AgentId(agent), SizeGuard::from_env()).map_err(value_error)?;
        Ok(format_rational(&r.value))
    }

    /// Exact anyprice share of `agent`.
    fn aps(&self, agent: u32) -> PyResult<String> {
        let r = aps_of(&self.inner, AgentId(agent), SizeGuard::from_env()).map_err(value_error)?;
        Ok(format_rational(&r.value))
    }

    /// Every agent plays proportional bidding against her exact APS in the
    /// standard game. Returns the run report as JSON.
    #[pyo3(signature = (seed = 0, random_ties = false))]
    fn play(&self, seed: u64, random_ties: bool) -> PyResult<String> {
        let inst = &self.inner;
        let mut strategies: BTreeMap<AgentId, Box<dyn Strategy>> = BTreeMap::new();
        let mut shares = BTreeMap::new();
        let mut targets = BTreeMap::new();
        for a in inst.agents() {
            let aps = aps_of(inst, a.id, SizeGuard::from_env()).map_err(value_error)?.value;
            let rho = default_rho(&a.entitlement);
            strategies.insert(
                a.id,
                Box::new(make_proportional_aps(
                    a.valuation.clone(),
                    a.entitlement.clone(),
                    rho.clone(),
                    aps.clone(),
                )),
            );
            shares.insert(a.id, aps);
            targets.insert(a.id, rho);
        }
        let tie = if random_ties {
            TieBreakPolicy::SeededRandom
        } else {
            TieBreakPolicy::Lexicographic
        };
        let config = GameConfig::standard().with_tie_breaker(tie).with_seed(seed);
        let t = run_game(inst, &mut strategies, &config)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let g = guarantee_report(inst, &t.allocation, &shares, &targets).map_err(value_error)?;
        Ok(io::to_json(&RunReport::new("play", inst, &t, &g)))
    }

    /// Guess-refinement allocation. `mode` is `"aps"` or `"mms"`. Returns
    /// each agent's bundle as a list of item ids.
    #[pyo3(signature = (epsilon = "1/10", mode = "aps"))]
    fn allocate(&self, epsilon: &str, mode: &str) -> PyResult<BTreeMap<u32, Vec<u32>>> {
        let mode = match mode {
            "aps" => ShareMode::Aps,
            "mms" => ShareMode::Mms,
            other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
        };
        let out = unconditional_allocate(
            &self.inner,
            &rational(epsilon)?,
            None,
            mode,
            TieBreakPolicy::Lexicographic,
        )
        .map_err(value_error)?;
        Ok(out
            .allocation
            .bundles()
            .iter()
            .map(|(a, s)| (a.0, s.iter().map(|e| e.0).collect()))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// Replays a run report; True iff every recorded guarantee holds.
#[pyfunction]
fn verify_report(text: &str) -> PyResult<bool> {
    let report: RunReport = serde_json::from_str(text).map_err(value_error)?;
    io::verify_report(&report).map_err(value_error)
}

/// Feasibility of the guarantee-bounding linear system at `z` with `n`
/// agents (`None` for the limit). Returns `("feasible", witness)` or
/// `("infeasible", multipliers)`.
#[pyfunction]
#[pyo3(signature = (z, n = None))]
fn lp_certificate(z: &str, n: Option<u64>) -> PyResult<(String, Vec<String>)> {
    let count = n.map(AgentCount::Finite).unwrap_or(AgentCount::Infinite);
    let sys = build_theorem_system(&rational(z)?, count).map_err(value_error)?;
    let q = |v: &[Rational]| v.iter().map(format_rational).collect();
    Ok(match check_feasible(&sys) {
        Feasibility::Feasible { witness, .. } => ("feasible".into(), q(&witness)),
        Feasibility::Infeasible(cert) => ("infeasible".into(), q(&cert.multipliers)),
    })
}

/// `1/(3 − 2b)`.
#[pyfunction]
fn proportional_rho(b: &str) -> PyResult<String> {
    Ok(format_rational(&default_rho(&rational(b)?)))
}

#[pymodule]
fn bidfair_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(verify_report, m)?)?;
    m.add_function(wrap_pyfunction!(lp_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(proportional_rho, m)?)?;
    Ok(())
}
