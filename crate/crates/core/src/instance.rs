//! Capacitated bipartite preference instances and matchings over them.
//!
//! Vertices are addressed by [`Vertex`], an index into the agent or job list
//! in document order. Edges are numbered by their `(agent, job)` index pair in
//! lexicographic order, so iterating a [`Matching`] always visits edges in the
//! canonical order used for tie-breaking.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Agent,
    Job,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Agent => Side::Job,
            Side::Job => Side::Agent,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Agent => "agent",
            Side::Job => "job",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Agent(usize),
    Job(usize),
}

impl Vertex {
    pub fn new(side: Side, index: usize) -> Vertex {
        match side {
            Side::Agent => Vertex::Agent(index),
            Side::Job => Vertex::Job(index),
        }
    }

    pub fn side(self) -> Side {
        match self {
            Vertex::Agent(_) => Side::Agent,
            Vertex::Job(_) => Side::Job,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Vertex::Agent(i) | Vertex::Job(i) => i,
        }
    }
}

pub type EdgeId = usize;

/// An exact edge cost, stored as an integer number of millionths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cost(i64);

impl Cost {
    pub const SCALE: i64 = 1_000_000;
    pub const ZERO: Cost = Cost(0);

    pub fn from_scaled(scaled: i64) -> Cost {
        Cost(scaled)
    }

    pub fn from_units(units: i64) -> Cost {
        Cost(units * Self::SCALE)
    }

    pub fn scaled(self) -> i64 {
        self.0
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl FromStr for Cost {
    type Err = Error;

    /// Parses a plain decimal with at most six fractional digits.
    fn from_str(text: &str) -> Result<Cost> {
        let invalid = || Error::InvalidCost(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (whole, fraction) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty()
            || !whole.bytes().all(|b| b.is_ascii_digit())
            || !fraction.bytes().all(|b| b.is_ascii_digit())
            || fraction.len() > 6
            || (body.contains('.') && fraction.is_empty())
        {
            return Err(invalid());
        }
        let whole: i64 = whole.parse().map_err(|_| invalid())?;
        let mut frac: i64 = 0;
        for (i, digit) in fraction.bytes().enumerate() {
            frac += i64::from(digit - b'0') * 10i64.pow(5 - i as u32);
        }
        let magnitude = whole
            .checked_mul(Self::SCALE)
            .and_then(|w| w.checked_add(frac))
            .ok_or_else(invalid)?;
        Ok(Cost(if negative { -magnitude } else { magnitude }))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let magnitude = self.0.unsigned_abs();
        let scale = Self::SCALE as u64;
        let (whole, frac) = (magnitude / scale, magnitude % scale);
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

/// An agent or job together with its capacity and strict preference list.
/// Preferences are indices into the opposite side, most preferred first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub name: String,
    pub capacity: usize,
    pub preferences: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub agent: usize,
    pub job: usize,
    /// Position of `job` in the agent's preference list.
    pub agent_rank: usize,
    /// Position of `agent` in the job's preference list.
    pub job_rank: usize,
    pub cost: Cost,
}

impl Edge {
    pub fn endpoint(&self, side: Side) -> usize {
        match side {
            Side::Agent => self.agent,
            Side::Job => self.job,
        }
    }

    pub fn rank(&self, side: Side) -> usize {
        match side {
            Side::Agent => self.agent_rank,
            Side::Job => self.job_rank,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    agents: Vec<Member>,
    jobs: Vec<Member>,
    edges: Vec<Edge>,
    lookup: HashMap<(usize, usize), EdgeId>,
    agent_edges: Vec<Vec<EdgeId>>,
    job_edges: Vec<Vec<EdgeId>>,
}

impl Instance {
    /// Validates and assembles an instance. `costs` entries refer to
    /// `(agent, job)` index pairs; edges without an entry cost zero.
    pub fn new(
        agents: Vec<Member>,
        jobs: Vec<Member>,
        costs: &[(usize, usize, Cost)],
    ) -> Result<Instance> {
        Self::build(agents, jobs, costs, true)
    }

    /// Auxiliary instances over clone vertices skip the naming and
    /// capacity-versus-degree checks; everything else is still validated.
    pub(crate) fn build(
        agents: Vec<Member>,
        jobs: Vec<Member>,
        costs: &[(usize, usize, Cost)],
        strict: bool,
    ) -> Result<Instance> {
        let mut seen = HashSet::new();
        for member in agents.iter().chain(&jobs).filter(|_| strict) {
            if member.name.is_empty() {
                return Err(Error::Syntax("vertex names must be non-empty".into()));
            }
            if !seen.insert(member.name.as_str()) {
                return Err(Error::DuplicateVertex(member.name.clone()));
            }
        }

        for (side, members, others) in [(Side::Agent, &agents, &jobs), (Side::Job, &jobs, &agents)]
        {
            for member in members.iter() {
                let mut listed = HashSet::new();
                for &u in &member.preferences {
                    let other = others
                        .get(u)
                        .ok_or_else(|| Error::UnknownVertex(format!("{side:?} neighbor #{u}")))?;
                    if !listed.insert(u) {
                        return Err(Error::DuplicatePreference {
                            vertex: member.name.clone(),
                            neighbor: other.name.clone(),
                        });
                    }
                }
            }
        }

        let mut job_rank: HashMap<(usize, usize), usize> = HashMap::new();
        for (j, job) in jobs.iter().enumerate() {
            for (rank, &a) in job.preferences.iter().enumerate() {
                job_rank.insert((a, j), rank);
            }
        }
        let mut pairs = Vec::new();
        for (a, agent) in agents.iter().enumerate() {
            for (rank, &j) in agent.preferences.iter().enumerate() {
                let Some(&jr) = job_rank.get(&(a, j)) else {
                    return Err(Error::AsymmetricPreference {
                        lister: agent.name.clone(),
                        listed: jobs[j].name.clone(),
                    });
                };
                pairs.push((a, j, rank, jr));
            }
        }
        if pairs.len() != job_rank.len() {
            for (j, job) in jobs.iter().enumerate() {
                for &a in &job.preferences {
                    if !agents[a].preferences.contains(&j) {
                        return Err(Error::AsymmetricPreference {
                            lister: job.name.clone(),
                            listed: agents[a].name.clone(),
                        });
                    }
                }
            }
        }

        for member in agents.iter().chain(&jobs) {
            let degree = member.preferences.len();
            if member.capacity == 0 || (strict && member.capacity > degree) {
                return Err(Error::CapacityOutOfRange {
                    name: member.name.clone(),
                    capacity: member.capacity as i64,
                    degree,
                });
            }
        }

        pairs.sort_unstable();
        let mut lookup = HashMap::with_capacity(pairs.len());
        let mut edges = Vec::with_capacity(pairs.len());
        for (id, &(agent, job, agent_rank, job_rank)) in pairs.iter().enumerate() {
            lookup.insert((agent, job), id);
            edges.push(Edge {
                agent,
                job,
                agent_rank,
                job_rank,
                cost: Cost::ZERO,
            });
        }
        let mut costed = HashSet::new();
        for &(a, j, cost) in costs {
            let id = *lookup.get(&(a, j)).ok_or_else(|| Error::EdgeNotFound {
                agent: agents
                    .get(a)
                    .map_or_else(|| format!("#{a}"), |m| m.name.clone()),
                job: jobs
                    .get(j)
                    .map_or_else(|| format!("#{j}"), |m| m.name.clone()),
            })?;
            if !costed.insert(id) {
                return Err(Error::InvalidCost(format!(
                    "duplicate cost entry for ({}, {})",
                    agents[a].name, jobs[j].name
                )));
            }
            edges[id].cost = cost;
        }

        let agent_edges = agents
            .iter()
            .enumerate()
            .map(|(a, m)| m.preferences.iter().map(|&j| lookup[&(a, j)]).collect())
            .collect();
        let job_edges = jobs
            .iter()
            .enumerate()
            .map(|(j, m)| m.preferences.iter().map(|&a| lookup[&(a, j)]).collect())
            .collect();

        Ok(Instance {
            agents,
            jobs,
            edges,
            lookup,
            agent_edges,
            job_edges,
        })
    }

    /// Builds an instance from `(name, capacity, preferences)` triples.
    /// Handy for fixtures and tests.
    pub fn from_names(
        agents: &[(&str, usize, &[&str])],
        jobs: &[(&str, usize, &[&str])],
        costs: &[(&str, &str, Cost)],
    ) -> Result<Instance> {
        let agent_index: HashMap<&str, usize> =
            agents.iter().enumerate().map(|(i, a)| (a.0, i)).collect();
        let job_index: HashMap<&str, usize> =
            jobs.iter().enumerate().map(|(i, b)| (b.0, i)).collect();
        let resolve = |names: &[&str], index: &HashMap<&str, usize>| -> Result<Vec<usize>> {
            names
                .iter()
                .map(|n| {
                    index
                        .get(n)
                        .copied()
                        .ok_or_else(|| Error::UnknownVertex(n.to_string()))
                })
                .collect()
        };
        let agent_members = agents
            .iter()
            .map(|&(name, capacity, prefs)| {
                Ok(Member {
                    name: name.to_string(),
                    capacity,
                    preferences: resolve(prefs, &job_index)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let job_members = jobs
            .iter()
            .map(|&(name, capacity, prefs)| {
                Ok(Member {
                    name: name.to_string(),
                    capacity,
                    preferences: resolve(prefs, &agent_index)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let costs = costs
            .iter()
            .map(|&(a, b, c)| {
                let a = *agent_index
                    .get(a)
                    .ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
                let b = *job_index
                    .get(b)
                    .ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
                Ok((a, b, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(agent_members, job_members, &costs)
    }

    pub fn agents(&self) -> &[Member] {
        &self.agents
    }

    pub fn jobs(&self) -> &[Member] {
        &self.jobs
    }

    pub fn members(&self, side: Side) -> &[Member] {
        match side {
            Side::Agent => &self.agents,
            Side::Job => &self.jobs,
        }
    }

    pub fn member(&self, v: Vertex) -> &Member {
        &self.members(v.side())[v.index()]
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.member(v).name
    }

    pub fn capacity(&self, v: Vertex) -> usize {
        self.member(v).capacity
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.member(v).preferences.len()
    }

    /// All vertices, agents first, each side in document order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.agents.len())
            .map(Vertex::Agent)
            .chain((0..self.jobs.len()).map(Vertex::Job))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_between(&self, agent: usize, job: usize) -> Option<EdgeId> {
        self.lookup.get(&(agent, job)).copied()
    }

    /// Edges incident to `v`, most preferred first.
    pub fn incident_edges(&self, v: Vertex) -> &[EdgeId] {
        match v {
            Vertex::Agent(a) => &self.agent_edges[a],
            Vertex::Job(j) => &self.job_edges[j],
        }
    }

    /// Position of neighbor `u` (an index on the opposite side) in `v`'s list.
    pub fn rank(&self, v: Vertex, u: usize) -> Option<usize> {
        let id = match v {
            Vertex::Agent(a) => self.edge_between(a, u)?,
            Vertex::Job(j) => self.edge_between(u, j)?,
        };
        Some(self.edges[id].rank(v.side()))
    }

    pub fn total_capacity(&self, side: Side) -> usize {
        self.members(side).iter().map(|m| m.capacity).sum()
    }

    pub fn edge_label(&self, id: EdgeId) -> (String, String) {
        let e = &self.edges[id];
        (
            self.agents[e.agent].name.clone(),
            self.jobs[e.job].name.clone(),
        )
    }

    pub fn find(&self, side: Side, name: &str) -> Option<usize> {
        self.members(side).iter().position(|m| m.name == name)
    }

    /// Returns a copy with every edge cost shifted by `delta`.
    pub fn with_cost_offset(&self, delta: Cost) -> Instance {
        let mut shifted = self.clone();
        for e in &mut shifted.edges {
            e.cost = e.cost + delta;
        }
        shifted
    }

    pub fn with_costs(&self, costs: impl IntoIterator<Item = (EdgeId, Cost)>) -> Result<Instance> {
        let mut updated = self.clone();
        for (id, cost) in costs {
            updated
                .edges
                .get_mut(id)
                .ok_or(Error::UnknownEdge(id))?
                .cost = cost;
        }
        Ok(updated)
    }
}

/// A set of edges with every vertex matched at most up to its capacity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    edges: BTreeSet<EdgeId>,
}

impl Matching {
    pub fn new(inst: &Instance, edges: impl IntoIterator<Item = EdgeId>) -> Result<Matching> {
        let mut set = BTreeSet::new();
        for id in edges {
            if id >= inst.edges().len() {
                return Err(Error::UnknownEdge(id));
            }
            if !set.insert(id) {
                let (agent, job) = inst.edge_label(id);
                return Err(Error::DuplicateEdge { agent, job });
            }
        }
        let matching = Matching { edges: set };
        matching.check_capacities(inst)?;
        Ok(matching)
    }

    /// Looks up edges by agent and job names.
    pub fn from_pairs(inst: &Instance, pairs: &[(&str, &str)]) -> Result<Matching> {
        let ids = pairs
            .iter()
            .map(|&(a, b)| {
                let agent = inst
                    .find(Side::Agent, a)
                    .ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
                let job = inst
                    .find(Side::Job, b)
                    .ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
                inst.edge_between(agent, job)
                    .ok_or_else(|| Error::EdgeNotFound {
                        agent: a.to_string(),
                        job: b.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Matching::new(inst, ids)
    }

    pub(crate) fn from_set(edges: BTreeSet<EdgeId>) -> Matching {
        Matching { edges }
    }

    fn check_capacities(&self, inst: &Instance) -> Result<()> {
        let loads = self.loads(inst);
        for v in inst.vertices() {
            if loads.get(v) > inst.capacity(v) {
                return Err(Error::CapacityExceeded(inst.name(v).to_string()));
            }
        }
        Ok(())
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeId> + DoubleEndedIterator + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<EdgeId> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.contains(&id)
    }

    /// Number of matched edges at every vertex.
    pub fn loads(&self, inst: &Instance) -> Loads {
        let mut loads = Loads {
            agents: vec![0; inst.agents().len()],
            jobs: vec![0; inst.jobs().len()],
        };
        for id in self.edges() {
            let e = inst.edge(id);
            loads.agents[e.agent] += 1;
            loads.jobs[e.job] += 1;
        }
        loads
    }

    /// Partners of every vertex, each list in that vertex's preference order.
    pub fn partners(&self, inst: &Instance) -> Partners {
        let mut agents = vec![Vec::new(); inst.agents().len()];
        let mut jobs = vec![Vec::new(); inst.jobs().len()];
        for (a, list) in agents.iter_mut().enumerate() {
            for &id in inst.incident_edges(Vertex::Agent(a)) {
                if self.contains(id) {
                    list.push(inst.edge(id).job);
                }
            }
        }
        for (j, list) in jobs.iter_mut().enumerate() {
            for &id in inst.incident_edges(Vertex::Job(j)) {
                if self.contains(id) {
                    list.push(inst.edge(id).agent);
                }
            }
        }
        Partners { agents, jobs }
    }

    pub fn cost(&self, inst: &Instance) -> Cost {
        self.edges().map(|id| inst.edge(id).cost).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loads {
    agents: Vec<usize>,
    jobs: Vec<usize>,
}

impl Loads {
    pub fn get(&self, v: Vertex) -> usize {
        match v {
            Vertex::Agent(a) => self.agents[a],
            Vertex::Job(j) => self.jobs[j],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partners {
    agents: Vec<Vec<usize>>,
    jobs: Vec<Vec<usize>>,
}

impl Partners {
    pub fn of(&self, v: Vertex) -> &[usize] {
        match v {
            Vertex::Agent(a) => &self.agents[a],
            Vertex::Job(j) => &self.jobs[j],
        }
    }
}

/// True iff every vertex is matched exactly up to its capacity.
pub fn is_perfect(inst: &Instance, m: &Matching) -> Result<bool> {
    if let Some(id) = m.edges().find(|&id| id >= inst.edges().len()) {
        return Err(Error::UnknownEdge(id));
    }
    let loads = m.loads(inst);
    Ok(inst.vertices().all(|v| loads.get(v) == inst.capacity(v)))
}

/// A matching that saturates every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PerfectMatching(Matching);

impl PerfectMatching {
    pub fn new(inst: &Instance, m: Matching) -> Result<PerfectMatching> {
        let loads = m.loads(inst);
        if let Some(v) = inst.vertices().find(|&v| loads.get(v) != inst.capacity(v)) {
            return Err(Error::NotPerfect(format!(
                "{} has {} of {} partners",
                inst.name(v),
                loads.get(v),
                inst.capacity(v)
            )));
        }
        Ok(PerfectMatching(m))
    }

    pub fn as_matching(&self) -> &Matching {
        &self.0
    }

    pub fn into_matching(self) -> Matching {
        self.0
    }
}

impl std::ops::Deref for PerfectMatching {
    type Target = Matching;

    fn deref(&self) -> &Matching {
        &self.0
    }
}
