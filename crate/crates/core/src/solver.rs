//! Exhaustive enumeration of perfect matchings, the definition-level
//! popularity check, and the exact min-cost solver.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;

use crate::clone::is_popular_perfect;
use crate::document::{cost_value, matching_document, MatchingDocument};
use crate::error::{Error, Result};
use crate::flow::admits_perfect_matching;
use crate::instance::{Cost, EdgeId, Instance, Matching, PerfectMatching, Side, Vertex};
use crate::voting::delta;

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000_000;
pub const ENUMERATION_LIMIT_VAR: &str = "POPMATCH_MAX_ENUM";

/// Reads the enumeration cap from `POPMATCH_MAX_ENUM`, falling back to the
/// default when unset.
pub fn enumeration_limit_from_env() -> Result<u64> {
    match std::env::var(ENUMERATION_LIMIT_VAR) {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!(
                "{ENUMERATION_LIMIT_VAR} must be a non-negative integer, got {text:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_ENUMERATION_LIMIT),
        Err(err) => Err(Error::InvalidArgument(format!(
            "{ENUMERATION_LIMIT_VAR}: {err}"
        ))),
    }
}

struct Enumerator<'a, F> {
    inst: &'a Instance,
    job_left: Vec<usize>,
    /// `reach[a][j]`: how many agents from `a` on are adjacent to job `j`.
    reach: Vec<Vec<usize>>,
    chosen: Vec<EdgeId>,
    limit: u64,
    count: u64,
    visit: F,
}

impl<F: FnMut(PerfectMatching) -> Result<()>> Enumerator<'_, F> {
    fn agent(&mut self, a: usize) -> Result<()> {
        if a == self.inst.agents().len() {
            if self.count == self.limit {
                return Err(Error::EnumerationLimit(self.limit));
            }
            self.count += 1;
            let m = Matching::from_set(self.chosen.iter().copied().collect());
            return (self.visit)(PerfectMatching::new(self.inst, m)?);
        }
        // every job must still be fillable by the agents not yet placed
        if (0..self.job_left.len()).any(|j| self.job_left[j] > self.reach[a][j]) {
            return Ok(());
        }
        let edges = self.inst.incident_edges(Vertex::Agent(a));
        self.choose(a, edges, 0, self.inst.agents()[a].capacity)
    }

    /// Picks `need` more edges for agent `a` from `edges[from..]`.
    fn choose(&mut self, a: usize, edges: &[EdgeId], from: usize, need: usize) -> Result<()> {
        if need == 0 {
            return self.agent(a + 1);
        }
        for i in from..edges.len() {
            if edges.len() - i < need {
                break;
            }
            let e = edges[i];
            let j = self.inst.edge(e).job;
            if self.job_left[j] == 0 {
                continue;
            }
            self.job_left[j] -= 1;
            self.chosen.push(e);
            let result = self.choose(a, edges, i + 1, need - 1);
            self.chosen.pop();
            self.job_left[j] += 1;
            result?;
        }
        Ok(())
    }
}

/// Calls `visit` on every perfect matching in a fixed order: agents in
/// document order, each choosing a subset of its edges in lexicographic order
/// of its preference list. Returns the number of matchings visited, or
/// [`Error::EnumerationLimit`] once more than `limit` exist.
pub fn visit_perfect_matchings(
    inst: &Instance,
    limit: u64,
    visit: impl FnMut(PerfectMatching) -> Result<()>,
) -> Result<u64> {
    let (agent_total, job_total) = (
        inst.total_capacity(Side::Agent),
        inst.total_capacity(Side::Job),
    );
    if agent_total != job_total {
        return Err(Error::Infeasible(format!(
            "agent capacities sum to {agent_total} but job capacities sum to {job_total}"
        )));
    }
    let agents = inst.agents().len();
    let mut reach = vec![vec![0usize; inst.jobs().len()]; agents + 1];
    for a in (0..agents).rev() {
        reach[a] = reach[a + 1].clone();
        for &e in inst.incident_edges(Vertex::Agent(a)) {
            reach[a][inst.edge(e).job] += 1;
        }
    }
    let mut enumerator = Enumerator {
        inst,
        job_left: inst.jobs().iter().map(|m| m.capacity).collect(),
        reach,
        chosen: Vec::new(),
        limit,
        count: 0,
        visit,
    };
    enumerator.agent(0)?;
    Ok(enumerator.count)
}

/// All perfect matchings, in [`visit_perfect_matchings`] order.
pub fn enumerate_perfect_matchings(inst: &Instance, limit: u64) -> Result<Vec<PerfectMatching>> {
    let mut all = Vec::new();
    visit_perfect_matchings(inst, limit, |m| {
        all.push(m);
        Ok(())
    })?;
    Ok(all)
}

/// Popularity straight from the definition: `delta(m, n) >= 0` for every
/// perfect matching `n`.
pub fn brute_force_is_popular_perfect(
    inst: &Instance,
    m: &PerfectMatching,
    limit: u64,
) -> Result<bool> {
    let mut popular = true;
    visit_perfect_matchings(inst, limit, |n| {
        if popular && delta(inst, m, &n)?.value < 0 {
            popular = false;
        }
        Ok(())
    })?;
    Ok(popular)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub matching: PerfectMatching,
    pub cost: Cost,
    pub enumerated: u64,
    pub popular_count: u64,
    pub certificate: String,
}

/// Ordering key for the tie-break: cost first, then the sorted edge list.
fn solve_key(inst: &Instance, m: &Matching) -> (Cost, Vec<EdgeId>) {
    (m.cost(inst), m.edges().collect())
}

/// Minimum-cost popular perfect matching, with the enumeration cap taken from
/// the environment.
pub fn solve_min_cost(inst: &Instance) -> Result<SolveReport> {
    solve_min_cost_with_limit(inst, enumeration_limit_from_env()?)
}

/// Enumerates every perfect matching, keeps the popular ones (decided by the
/// cycle test), and returns the cheapest; equal costs fall back to the
/// lexicographically smallest edge list.
pub fn solve_min_cost_with_limit(inst: &Instance, limit: u64) -> Result<SolveReport> {
    if !admits_perfect_matching(inst) {
        return Err(Error::Infeasible(
            "the instance has no perfect matching".into(),
        ));
    }
    let mut best: Option<((Cost, Vec<EdgeId>), PerfectMatching)> = None;
    let mut popular_count = 0;
    let enumerated = visit_perfect_matchings(inst, limit, |m| {
        if !is_popular_perfect(inst, &m)?.popular {
            return Ok(());
        }
        popular_count += 1;
        let key = solve_key(inst, &m);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, m));
        }
        Ok(())
    })?;
    let Some(((cost, _), matching)) = best else {
        return Err(Error::Invariant(
            "no popular perfect matching among the perfect matchings".into(),
        ));
    };
    Ok(SolveReport {
        matching,
        cost,
        enumerated,
        popular_count,
        certificate: "no alternating cycle of positive weight exists with respect to the canonical realization".into(),
    })
}

/// The popular perfect matchings among `all`, by the definition-level check.
pub fn brute_force_popular_set(
    inst: &Instance,
    all: &[PerfectMatching],
) -> Result<BTreeSet<Vec<EdgeId>>> {
    let mut popular = BTreeSet::new();
    for m in all {
        let mut ok = true;
        for n in all {
            if delta(inst, m, n)?.value < 0 {
                ok = false;
                break;
            }
        }
        if ok {
            popular.insert(m.edges().collect());
        }
    }
    Ok(popular)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReportDocument {
    pub matching: MatchingDocument,
    pub cost: Value,
    pub enumerated: u64,
    pub popular: u64,
    pub certificate: String,
}

pub fn solve_report_document(inst: &Instance, report: &SolveReport) -> SolveReportDocument {
    SolveReportDocument {
        matching: matching_document(inst, &report.matching),
        cost: cost_value(report.cost),
        enumerated: report.enumerated,
        popular: report.popular_count,
        certificate: report.certificate.clone(),
    }
}
