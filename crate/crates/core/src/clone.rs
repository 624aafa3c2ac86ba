//! The cloned one-to-one instance and the alternating-cycle test for
//! popularity among perfect matchings.
//!
//! Every vertex `v` is split into `cap(v)` unit-capacity clones `v#1..`, and
//! each clone ranks the clones of its neighbors in the base order, clone 1
//! first. A perfect matching `M` is lifted to a one-to-one realization `M'`;
//! the subgraph `G'_M'` keeps `M'` plus every clone copy of the edges outside
//! `M`. Edge weights there are the sum of the two endpoint votes against their
//! `M'` partners, and `M` is popular among perfect matchings exactly when no
//! alternating cycle has positive total weight.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, Matching, Member, PerfectMatching, Side, Vertex};
use crate::voting::{self, vote, Candidate};

/// The one-to-one instance obtained by cloning every vertex `cap(v)` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClonedInstance {
    instance: Instance,
    /// `(base vertex, copy)` of every agent clone; copies count from 0.
    agent_origin: Vec<(usize, usize)>,
    job_origin: Vec<(usize, usize)>,
    agent_first: Vec<usize>,
    job_first: Vec<usize>,
}

pub fn clone_instance(inst: &Instance) -> ClonedInstance {
    let origins = |side: Side| {
        let mut origin = Vec::new();
        let mut first = Vec::new();
        for (v, m) in inst.members(side).iter().enumerate() {
            first.push(origin.len());
            origin.extend((0..m.capacity).map(|i| (v, i)));
        }
        (origin, first)
    };
    let (agent_origin, agent_first) = origins(Side::Agent);
    let (job_origin, job_first) = origins(Side::Job);

    let members = |side: Side, origin: &[(usize, usize)], other_first: &[usize]| -> Vec<Member> {
        let others = inst.members(side.opposite());
        origin
            .iter()
            .map(|&(v, i)| {
                let base = &inst.members(side)[v];
                let preferences = base
                    .preferences
                    .iter()
                    .flat_map(|&u| (0..others[u].capacity).map(move |j| other_first[u] + j))
                    .collect();
                Member {
                    name: format!("{}#{}", base.name, i + 1),
                    capacity: 1,
                    preferences,
                }
            })
            .collect()
    };
    let agents = members(Side::Agent, &agent_origin, &job_first);
    let jobs = members(Side::Job, &job_origin, &agent_first);
    let mut costs = Vec::new();
    for (a, &(base_a, _)) in agent_origin.iter().enumerate() {
        for &b in &agents[a].preferences {
            let base_b = job_origin[b].0;
            let id = inst
                .edge_between(base_a, base_b)
                .expect("clone edges come from base edges");
            costs.push((a, b, inst.edge(id).cost));
        }
    }
    let instance =
        Instance::build(agents, jobs, &costs, false).expect("cloning preserves validity");
    ClonedInstance {
        instance,
        agent_origin,
        job_origin,
        agent_first,
        job_first,
    }
}

impl ClonedInstance {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// Number of agent clones, `sum of cap(a)`.
    pub fn agent_clone_count(&self) -> usize {
        self.agent_origin.len()
    }

    /// Index of clone `copy` (0-based) of base vertex `v`.
    pub fn clone_of(&self, v: Vertex, copy: usize) -> usize {
        match v {
            Vertex::Agent(a) => self.agent_first[a] + copy,
            Vertex::Job(j) => self.job_first[j] + copy,
        }
    }

    /// Base vertex and copy index of a clone vertex.
    pub fn origin(&self, clone: Vertex) -> (Vertex, usize) {
        match clone {
            Vertex::Agent(a) => {
                let (v, i) = self.agent_origin[a];
                (Vertex::Agent(v), i)
            }
            Vertex::Job(j) => {
                let (v, i) = self.job_origin[j];
                (Vertex::Job(v), i)
            }
        }
    }

    /// Base edge underlying a clone edge.
    pub fn base_edge(&self, inst: &Instance, clone_edge: EdgeId) -> EdgeId {
        let e = self.instance.edge(clone_edge);
        let a = self.agent_origin[e.agent].0;
        let b = self.job_origin[e.job].0;
        inst.edge_between(a, b)
            .expect("clone edges come from base edges")
    }

    /// Replaces every clone edge by its base edge; duplicates collapse.
    pub fn project(&self, inst: &Instance, m: &Matching) -> Matching {
        Matching::from_set(m.edges().map(|e| self.base_edge(inst, e)).collect())
    }
}

/// A one-to-one matching over clones that projects back onto a matching of
/// the base instance, one clone edge per base edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    matching: Matching,
    /// `(base edge, clone edge)` pairs in base edge order.
    pairs: Vec<(EdgeId, EdgeId)>,
}

impl Realization {
    /// The realization as a matching of the cloned instance.
    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn pairs(&self) -> &[(EdgeId, EdgeId)] {
        &self.pairs
    }

    pub fn clone_edge_of(&self, base: EdgeId) -> Option<EdgeId> {
        self.pairs
            .iter()
            .find(|&&(b, _)| b == base)
            .map(|&(_, c)| c)
    }
}

/// Canonical realization of a perfect matching: every vertex hands its
/// clones `#1, #2, ...` to its partners in its own preference order.
pub fn realize(
    inst: &Instance,
    cloned: &ClonedInstance,
    m: &PerfectMatching,
) -> Result<Realization> {
    realize_matching(inst, cloned, m.as_matching())
}

/// [`realize`] for an arbitrary matching; clones beyond a vertex's load stay
/// unmatched.
pub fn realize_matching(
    inst: &Instance,
    cloned: &ClonedInstance,
    m: &Matching,
) -> Result<Realization> {
    let mut copy_at = vec![[0usize; 2]; inst.edges().len()];
    for v in inst.vertices() {
        let slot = usize::from(v.side() == Side::Job);
        let matched = inst.incident_edges(v).iter().filter(|&&e| m.contains(e));
        for (copy, &e) in matched.enumerate() {
            copy_at[e][slot] = copy;
        }
    }
    let mut pairs = Vec::with_capacity(m.len());
    for e in m.edges() {
        let edge = inst.edge(e);
        let a = cloned.clone_of(Vertex::Agent(edge.agent), copy_at[e][0]);
        let b = cloned.clone_of(Vertex::Job(edge.job), copy_at[e][1]);
        let clone_edge = cloned.instance.edge_between(a, b).ok_or_else(|| {
            Error::Invariant("realized clone edge missing from the cloned instance".into())
        })?;
        pairs.push((e, clone_edge));
    }
    let matching = Matching::new(&cloned.instance, pairs.iter().map(|&(_, c)| c))?;
    Ok(Realization { matching, pairs })
}

/// The subgraph `G'_M'`: the realized edges plus every clone copy of each
/// base edge outside the matching. It is an instance in its own right, over
/// the clone vertices, with preference lists restricted to its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphGM {
    instance: Instance,
    /// Base edge of every subgraph edge.
    origin: Vec<EdgeId>,
    /// Clone-instance edge of every subgraph edge.
    clone_edge: Vec<EdgeId>,
    realization: Matching,
    agent_mate: Vec<Option<EdgeId>>,
    job_mate: Vec<Option<EdgeId>>,
}

pub fn build_subgraph(
    inst: &Instance,
    cloned: &ClonedInstance,
    realization: &Realization,
) -> SubgraphGM {
    let base_matched: HashSet<EdgeId> = realization.pairs.iter().map(|&(b, _)| b).collect();
    let clone_inst = &cloned.instance;
    let keep: Vec<bool> = (0..clone_inst.edges().len())
        .map(|c| {
            realization.matching.contains(c) || !base_matched.contains(&cloned.base_edge(inst, c))
        })
        .collect();

    let restrict = |side: Side| -> Vec<Member> {
        clone_inst
            .members(side)
            .iter()
            .enumerate()
            .map(|(v, m)| Member {
                name: m.name.clone(),
                capacity: 1,
                preferences: clone_inst
                    .incident_edges(Vertex::new(side, v))
                    .iter()
                    .filter(|&&c| keep[c])
                    .map(|&c| clone_inst.edge(c).endpoint(side.opposite()))
                    .collect(),
            })
            .collect()
    };
    let instance = Instance::build(restrict(Side::Agent), restrict(Side::Job), &[], false)
        .expect("restricting a valid instance keeps it valid");

    let mut origin = Vec::with_capacity(instance.edges().len());
    let mut clone_edge = Vec::with_capacity(instance.edges().len());
    let mut matched = BTreeSet::new();
    for (id, e) in instance.edges().iter().enumerate() {
        let c = clone_inst
            .edge_between(e.agent, e.job)
            .expect("subgraph edges are clone edges");
        origin.push(cloned.base_edge(inst, c));
        clone_edge.push(c);
        if realization.matching.contains(c) {
            matched.insert(id);
        }
    }
    let mut agent_mate = vec![None; instance.agents().len()];
    let mut job_mate = vec![None; instance.jobs().len()];
    for &id in &matched {
        let e = instance.edge(id);
        agent_mate[e.agent] = Some(id);
        job_mate[e.job] = Some(id);
    }
    SubgraphGM {
        instance,
        origin,
        clone_edge,
        realization: Matching::from_set(matched),
        agent_mate,
        job_mate,
    }
}

impl SubgraphGM {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// `M'` expressed in subgraph edge ids.
    pub fn realization(&self) -> &Matching {
        &self.realization
    }

    pub fn base_edge(&self, e: EdgeId) -> EdgeId {
        self.origin[e]
    }

    pub fn clone_edge(&self, e: EdgeId) -> EdgeId {
        self.clone_edge[e]
    }

    /// Subgraph edge corresponding to a clone-instance edge, if kept.
    pub fn from_clone_edge(&self, c: EdgeId) -> Option<EdgeId> {
        let e = self.clone_edge.binary_search(&c).ok()?;
        Some(e)
    }

    /// The `M'` edge at a clone vertex.
    pub fn mate(&self, v: Vertex) -> Option<EdgeId> {
        match v {
            Vertex::Agent(a) => self.agent_mate[a],
            Vertex::Job(j) => self.job_mate[j],
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.agent_mate
            .iter()
            .chain(&self.job_mate)
            .all(Option::is_some)
    }

    /// Projection of a subgraph matching onto base edges.
    pub fn project(&self, m: &Matching) -> Matching {
        Matching::from_set(m.edges().map(|e| self.origin[e]).collect())
    }

    fn partner(&self, v: Vertex) -> Candidate {
        match self.mate(v) {
            Some(e) => Candidate::Neighbor(self.instance.edge(e).endpoint(v.side().opposite())),
            None => Candidate::Dummy,
        }
    }
}

/// Weight of a subgraph edge: +2 if it blocks `M'`, -2 if both endpoints
/// prefer their `M'` partners, 0 otherwise (in particular on `M'` itself).
pub fn wt(sub: &SubgraphGM, e: EdgeId) -> Result<i64> {
    if e >= sub.instance.edges().len() {
        return Err(Error::UnknownEdge(e));
    }
    let edge = sub.instance.edge(e);
    let (a, b) = (Vertex::Agent(edge.agent), Vertex::Job(edge.job));
    let agent_vote = vote(
        &sub.instance,
        a,
        Candidate::Neighbor(edge.job),
        sub.partner(a),
    )?;
    let job_vote = vote(
        &sub.instance,
        b,
        Candidate::Neighbor(edge.agent),
        sub.partner(b),
    )?;
    Ok(agent_vote.value() + job_vote.value())
}

/// Total weight of a set of subgraph edges.
pub fn weight_of(sub: &SubgraphGM, edges: impl IntoIterator<Item = EdgeId>) -> Result<i64> {
    edges.into_iter().map(|e| wt(sub, e)).sum()
}

/// An alternating cycle in `G'_M'`, listed as `m0, x0, m1, x1, ...` where
/// `m_t` is the `M'` edge of agent clone `t` and `x_t` joins that clone to the
/// job clone of `m_{t+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleWitness {
    pub edges: Vec<EdgeId>,
    pub weight: i64,
    /// No two edges share a base edge.
    pub valid: bool,
}

impl CycleWitness {
    /// Agent clones along the cycle with the outgoing non-matching edge of each.
    fn steps(&self, sub: &SubgraphGM) -> Vec<(usize, EdgeId)> {
        self.edges
            .chunks(2)
            .map(|pair| (sub.instance.edge(pair[0]).agent, pair[1]))
            .collect()
    }

    fn from_steps(sub: &SubgraphGM, steps: &[(usize, EdgeId)]) -> Result<CycleWitness> {
        let mut edges = Vec::with_capacity(2 * steps.len());
        for &(agent, x) in steps {
            let m = sub
                .mate(Vertex::Agent(agent))
                .ok_or_else(|| Error::Invariant("cycle visits an unmatched clone".into()))?;
            edges.push(m);
            edges.push(x);
        }
        let weight = weight_of(sub, edges.iter().copied())?;
        let mut seen = HashSet::new();
        let valid = edges.iter().all(|&e| seen.insert(sub.origin[e]));
        Ok(CycleWitness {
            edges,
            weight,
            valid,
        })
    }

    /// Checks that the edge list is a well-formed alternating cycle.
    fn check(&self, sub: &SubgraphGM) -> Result<()> {
        let malformed = |why: &str| {
            Err(Error::InvalidArgument(format!(
                "not an alternating cycle: {why}"
            )))
        };
        let n = self.edges.len();
        if n < 4 || !n.is_multiple_of(2) {
            return malformed("length must be even and at least 4");
        }
        if self.edges.iter().any(|&e| e >= sub.instance.edges().len()) {
            return malformed("unknown edge");
        }
        for t in 0..n / 2 {
            let (m, x) = (self.edges[2 * t], self.edges[2 * t + 1]);
            let next = self.edges[(2 * t + 2) % n];
            let (me, xe, ne) = (
                sub.instance.edge(m),
                sub.instance.edge(x),
                sub.instance.edge(next),
            );
            if !sub.realization.contains(m)
                || sub.realization.contains(x)
                || !sub.realization.contains(next)
            {
                return malformed("edges must alternate between M' and the rest");
            }
            if me.agent != xe.agent || xe.job != ne.job {
                return malformed("consecutive edges must share an endpoint");
            }
        }
        let agents: HashSet<usize> = self.steps(sub).iter().map(|&(a, _)| a).collect();
        if agents.len() != n / 2 {
            return malformed("a clone is visited twice");
        }
        Ok(())
    }
}

/// Finds an alternating cycle of positive weight with respect to `M'`.
///
/// Each agent clone is a node carrying its `M'` edge; a non-matching edge
/// `(a_i, b_l)` becomes an arc from `a_i` to the `M'` partner of `b_l` with the
/// edge's weight. Matched edges weigh 0, so positive directed cycles are
/// exactly the positive alternating cycles. Bellman-Ford on negated weights
/// from a virtual source finds one.
pub fn find_positive_alternating_cycle(sub: &SubgraphGM) -> Result<Option<CycleWitness>> {
    if !sub.is_perfect() {
        return Err(Error::NotPerfect("M' must match every clone".into()));
    }
    let n = sub.instance.agents().len();
    let mut arcs = Vec::new();
    for (id, e) in sub.instance.edges().iter().enumerate() {
        if sub.realization.contains(id) {
            continue;
        }
        let mate = sub.job_mate[e.job].expect("perfect");
        let to = sub.instance.edge(mate).agent;
        arcs.push((e.agent, to, -wt(sub, id)?, id));
    }

    let mut dist = vec![0i64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last_relaxed = None;
    for _ in 0..n {
        last_relaxed = None;
        for (k, &(from, to, cost, _)) in arcs.iter().enumerate() {
            if dist[from] + cost < dist[to] {
                dist[to] = dist[from] + cost;
                pred[to] = Some(k);
                last_relaxed = Some(to);
            }
        }
        if last_relaxed.is_none() {
            break;
        }
    }
    let Some(mut node) = last_relaxed else {
        return Ok(None);
    };

    let broken = || Error::Invariant("predecessor walk left the cycle".into());
    for _ in 0..n {
        node = arcs[pred[node].ok_or_else(broken)?].0;
    }
    let start = node;
    let mut backwards = Vec::new();
    loop {
        let arc = pred[node].ok_or_else(broken)?;
        backwards.push(arc);
        node = arcs[arc].0;
        if node == start {
            break;
        }
        if backwards.len() > n {
            return Err(broken());
        }
    }
    let steps: Vec<(usize, EdgeId)> = backwards
        .iter()
        .rev()
        .map(|&k| (arcs[k].0, arcs[k].3))
        .collect();
    let cycle = CycleWitness::from_steps(sub, &steps)?;
    if cycle.weight <= 0 {
        return Err(Error::Invariant(format!(
            "extracted cycle has weight {}, expected a positive one",
            cycle.weight
        )));
    }
    Ok(Some(cycle))
}

/// One chord split performed while repairing a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitRecord {
    pub whole: i64,
    pub first: i64,
    pub second: i64,
}

/// Turns a positive alternating cycle into a valid one (no repeated base
/// edge) that is still positive.
pub fn make_valid(sub: &SubgraphGM, cycle: &CycleWitness) -> Result<CycleWitness> {
    make_valid_traced(sub, cycle).map(|(c, _)| c)
}

/// [`make_valid`], also returning every split it performed.
///
/// Two non-matching copies `(a_i, b_j)` and `(a_k, b_l)` of one base edge are
/// swapped for the chords `(a_i, b_l)` and `(a_k, b_j)`, cutting the cycle in
/// two. Clones of one vertex rank everything else identically, so the two
/// chords carry the same total weight as the two copies and the parts add
/// up to the whole; at least one part stays positive.
pub fn make_valid_traced(
    sub: &SubgraphGM,
    cycle: &CycleWitness,
) -> Result<(CycleWitness, Vec<SplitRecord>)> {
    cycle.check(sub)?;
    let whole = weight_of(sub, cycle.edges.iter().copied())?;
    if whole <= 0 {
        return Err(Error::InvalidArgument(format!(
            "cycle weight {whole} is not positive"
        )));
    }
    let mut steps = cycle.steps(sub);
    let mut splits = Vec::new();
    loop {
        let repeated = (0..steps.len()).find_map(|p| {
            (p + 1..steps.len())
                .find(|&q| sub.origin[steps[p].1] == sub.origin[steps[q].1])
                .map(|q| (p, q))
        });
        let Some((p, q)) = repeated else {
            return Ok((CycleWitness::from_steps(sub, &steps)?, splits));
        };

        let k = steps.len();
        let job_after = |t: usize| sub.instance.edge(steps[t].1).job;
        let chord = |agent: usize, job: usize| {
            sub.instance
                .edge_between(agent, job)
                .ok_or_else(|| Error::Invariant("chord missing from the subgraph".into()))
        };
        let (agent_p, agent_q) = (steps[p].0, steps[q].0);
        let chord_p = chord(agent_p, job_after(q))?;
        let chord_q = chord(agent_q, job_after(p))?;

        let mut first: Vec<(usize, EdgeId)> = (q + 1..k).chain(0..=p).map(|t| steps[t]).collect();
        first.last_mut().expect("non-empty").1 = chord_p;
        let mut second: Vec<(usize, EdgeId)> = (p + 1..=q).map(|t| steps[t]).collect();
        second.last_mut().expect("non-empty").1 = chord_q;

        let weight = |s: &[(usize, EdgeId)]| weight_of(sub, s.iter().map(|&(_, x)| x));
        let record = SplitRecord {
            whole: weight(&steps)?,
            first: weight(&first)?,
            second: weight(&second)?,
        };
        if record.whole != record.first + record.second {
            return Err(Error::Invariant(format!(
                "chord split changed the cycle weight: {} != {} + {}",
                record.whole, record.first, record.second
            )));
        }
        splits.push(record);
        steps = if record.first > 0 {
            first
        } else if record.second > 0 {
            second
        } else {
            return Err(Error::Invariant(
                "neither part of a positive cycle is positive".into(),
            ));
        };
        if steps.len() < 2 {
            return Err(Error::Invariant(
                "chord split produced a degenerate cycle".into(),
            ));
        }
    }
}

/// A perfect matching that beats the one under test, with the cycle that
/// produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub matching: PerfectMatching,
    /// `delta(M, N)`, always negative.
    pub delta: i64,
    /// The valid cycle as `(agent clone, job clone)` names.
    pub cycle: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopularityVerdict {
    pub popular: bool,
    pub witness: Option<Witness>,
}

/// Decides whether `m` is popular among perfect matchings using the
/// canonical realization. A positive cycle under any realization refutes
/// popularity; its repaired form yields a strictly more popular matching.
pub fn is_popular_perfect(inst: &Instance, m: &PerfectMatching) -> Result<PopularityVerdict> {
    let cloned = clone_instance(inst);
    let realization = realize(inst, &cloned, m)?;
    let sub = build_subgraph(inst, &cloned, &realization);
    let Some(cycle) = find_positive_alternating_cycle(&sub)? else {
        return Ok(PopularityVerdict {
            popular: true,
            witness: None,
        });
    };
    let cycle = make_valid(&sub, &cycle)?;

    let mut swapped: BTreeSet<EdgeId> = sub.realization.edge_set().clone();
    for &e in &cycle.edges {
        if !swapped.remove(&e) {
            swapped.insert(e);
        }
    }
    let projected = sub.project(&Matching::from_set(swapped));
    let to_invariant =
        |e: Error| Error::Invariant(format!("witness is not a perfect matching: {e}"));
    let n = Matching::new(inst, projected.edges()).map_err(to_invariant)?;
    let n = PerfectMatching::new(inst, n).map_err(to_invariant)?;
    let delta = voting::delta(inst, m, &n)?.value;
    if delta >= 0 {
        return Err(Error::Invariant(format!(
            "witness does not beat the matching: delta = {delta}"
        )));
    }
    let names = cycle
        .edges
        .iter()
        .map(|&e| {
            let edge = sub.instance.edge(e);
            (
                sub.instance.agents()[edge.agent].name.clone(),
                sub.instance.jobs()[edge.job].name.clone(),
            )
        })
        .collect();
    Ok(PopularityVerdict {
        popular: false,
        witness: Some(Witness {
            matching: n,
            delta,
            cycle: names,
        }),
    })
}
