//! Blocking edges, stability and deferred acceptance over capacitated
//! bipartite preference systems, including multigraphs.
//!
//! Every edge carries a class tag; a matching may use at most one edge of each
//! class, and edges whose class already appears in a matching are never
//! considered blocking. For a simple graph each edge is its own class. For the
//! colorful multigraphs the class is the underlying uncolored edge.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::instance::{Instance, Side, Vertex};

pub type SystemEdge = usize;

/// A two-sided preference system. Sides are the agent (proposing) side and
/// the job side; vertices on each side are numbered from zero.
pub trait PreferenceSystem {
    fn side_len(&self, side: Side) -> usize;

    fn capacity(&self, side: Side, vertex: usize) -> usize;

    fn edge_count(&self) -> usize;

    /// `(agent, job)` endpoints of an edge.
    fn endpoints(&self, edge: SystemEdge) -> (usize, usize);

    fn class_of(&self, edge: SystemEdge) -> usize;

    /// Position of `edge` in the order of its endpoint on `side`; lower keys
    /// are preferred. Keys of edges at one vertex are distinct.
    fn preference_key(&self, side: Side, edge: SystemEdge) -> u64;

    /// Edges incident to a vertex, in any order.
    fn incident(&self, side: Side, vertex: usize) -> Vec<SystemEdge>;

    fn endpoint(&self, side: Side, edge: SystemEdge) -> usize {
        let (a, b) = self.endpoints(edge);
        match side {
            Side::Agent => a,
            Side::Job => b,
        }
    }
}

impl PreferenceSystem for Instance {
    fn side_len(&self, side: Side) -> usize {
        self.members(side).len()
    }

    fn capacity(&self, side: Side, vertex: usize) -> usize {
        Instance::capacity(self, Vertex::new(side, vertex))
    }

    fn edge_count(&self) -> usize {
        self.edges().len()
    }

    fn endpoints(&self, edge: SystemEdge) -> (usize, usize) {
        let e = self.edge(edge);
        (e.agent, e.job)
    }

    fn class_of(&self, edge: SystemEdge) -> usize {
        edge
    }

    fn preference_key(&self, side: Side, edge: SystemEdge) -> u64 {
        self.edge(edge).rank(side) as u64
    }

    fn incident(&self, side: Side, vertex: usize) -> Vec<SystemEdge> {
        self.incident_edges(Vertex::new(side, vertex)).to_vec()
    }
}

/// A set of system edges within capacities, at most one per class.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemMatching {
    edges: BTreeSet<SystemEdge>,
}

impl SystemMatching {
    pub fn new<S: PreferenceSystem + ?Sized>(
        sys: &S,
        edges: impl IntoIterator<Item = SystemEdge>,
    ) -> Result<SystemMatching> {
        let edges: BTreeSet<SystemEdge> = edges.into_iter().collect();
        let mut classes = HashSet::new();
        let mut loads = [
            vec![0usize; sys.side_len(Side::Agent)],
            vec![0usize; sys.side_len(Side::Job)],
        ];
        for &e in &edges {
            if e >= sys.edge_count() {
                return Err(Error::UnknownEdge(e));
            }
            if !classes.insert(sys.class_of(e)) {
                return Err(Error::InvalidArgument(format!(
                    "two edges of class {} in one matching",
                    sys.class_of(e)
                )));
            }
            let (a, b) = sys.endpoints(e);
            loads[0][a] += 1;
            loads[1][b] += 1;
        }
        for (side, load) in [(Side::Agent, &loads[0]), (Side::Job, &loads[1])] {
            if let Some(v) = (0..load.len()).find(|&v| load[v] > sys.capacity(side, v)) {
                return Err(Error::CapacityExceeded(format!("{} #{v}", side.as_str())));
            }
        }
        Ok(SystemMatching { edges })
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = SystemEdge> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, e: SystemEdge) -> bool {
        self.edges.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Per-vertex view of a matching: how many edges each vertex holds and the
/// key of its worst one.
struct Occupancy {
    load: [Vec<usize>; 2],
    worst: [Vec<Option<u64>>; 2],
    classes: HashSet<usize>,
}

fn slot(side: Side) -> usize {
    match side {
        Side::Agent => 0,
        Side::Job => 1,
    }
}

impl Occupancy {
    fn of<S: PreferenceSystem + ?Sized>(sys: &S, m: &SystemMatching) -> Occupancy {
        let mut occ = Occupancy {
            load: [
                vec![0; sys.side_len(Side::Agent)],
                vec![0; sys.side_len(Side::Job)],
            ],
            worst: [
                vec![None; sys.side_len(Side::Agent)],
                vec![None; sys.side_len(Side::Job)],
            ],
            classes: HashSet::new(),
        };
        for e in m.edges() {
            occ.classes.insert(sys.class_of(e));
            for side in [Side::Agent, Side::Job] {
                let v = sys.endpoint(side, e);
                let key = sys.preference_key(side, e);
                let s = slot(side);
                occ.load[s][v] += 1;
                occ.worst[s][v] = Some(occ.worst[s][v].map_or(key, |w| w.max(key)));
            }
        }
        occ
    }

    fn wants<S: PreferenceSystem + ?Sized>(&self, sys: &S, side: Side, e: SystemEdge) -> bool {
        let v = sys.endpoint(side, e);
        let s = slot(side);
        self.load[s][v] < sys.capacity(side, v)
            || self.worst[s][v].is_some_and(|w| sys.preference_key(side, e) < w)
    }

    fn blocks<S: PreferenceSystem + ?Sized>(&self, sys: &S, e: SystemEdge) -> bool {
        !self.classes.contains(&sys.class_of(e))
            && self.wants(sys, Side::Agent, e)
            && self.wants(sys, Side::Job, e)
    }
}

/// Whether `e` blocks `m`. Edges whose class is already used by `m`
/// (including the matched edges themselves) never block.
pub fn is_blocking<S: PreferenceSystem + ?Sized>(
    sys: &S,
    m: &SystemMatching,
    e: SystemEdge,
) -> Result<bool> {
    if e >= sys.edge_count() {
        return Err(Error::UnknownEdge(e));
    }
    Ok(Occupancy::of(sys, m).blocks(sys, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    /// The lowest-numbered blocking edge.
    BlockedBy(SystemEdge),
}

impl Stability {
    pub fn is_stable(self) -> bool {
        self == Stability::Stable
    }
}

pub fn check_stability<S: PreferenceSystem + ?Sized>(sys: &S, m: &SystemMatching) -> Stability {
    let occ = Occupancy::of(sys, m);
    match (0..sys.edge_count()).find(|&e| occ.blocks(sys, e)) {
        Some(e) => Stability::BlockedBy(e),
        None => Stability::Stable,
    }
}

pub fn is_stable<S: PreferenceSystem + ?Sized>(sys: &S, m: &SystemMatching) -> bool {
    check_stability(sys, m).is_stable()
}

/// Greedy best subset of `candidates` (already sorted best-first) under the
/// capacity bound and the one-edge-per-class rule.
fn greedy_choice<S: PreferenceSystem + ?Sized>(
    sys: &S,
    candidates: impl IntoIterator<Item = SystemEdge>,
    capacity: usize,
) -> Vec<SystemEdge> {
    let mut chosen = Vec::with_capacity(capacity);
    let mut classes = HashSet::new();
    for e in candidates {
        if chosen.len() == capacity {
            break;
        }
        if classes.insert(sys.class_of(e)) {
            chosen.push(e);
        }
    }
    chosen
}

/// Agent-proposing deferred acceptance in simultaneous-proposal form.
///
/// Every round each agent proposes its greedy best independent set among the
/// edges not yet rejected; each job keeps its greedy best independent subset
/// of the proposals it receives and rejects the rest for good. The process
/// stops when a round rejects nothing. Since each non-final round rejects at
/// least one edge there are at most `edge_count + 1` rounds.
pub fn deferred_acceptance<S: PreferenceSystem + ?Sized>(sys: &S) -> SystemMatching {
    let agents = sys.side_len(Side::Agent);
    let jobs = sys.side_len(Side::Job);
    let sorted = |side: Side, v: usize| {
        let mut list = sys.incident(side, v);
        list.sort_by_key(|&e| sys.preference_key(side, e));
        list
    };
    let agent_lists: Vec<Vec<SystemEdge>> = (0..agents).map(|a| sorted(Side::Agent, a)).collect();
    let mut rejected = vec![false; sys.edge_count()];

    loop {
        let mut received: Vec<Vec<SystemEdge>> = vec![Vec::new(); jobs];
        for (a, list) in agent_lists.iter().enumerate() {
            let open = list.iter().copied().filter(|&e| !rejected[e]);
            for e in greedy_choice(sys, open, sys.capacity(Side::Agent, a)) {
                received[sys.endpoint(Side::Job, e)].push(e);
            }
        }

        let mut any_rejected = false;
        let mut held = BTreeSet::new();
        for (b, mut proposals) in received.into_iter().enumerate() {
            proposals.sort_by_key(|&e| sys.preference_key(Side::Job, e));
            let kept = greedy_choice(sys, proposals.iter().copied(), sys.capacity(Side::Job, b));
            for &e in &proposals {
                if kept.contains(&e) {
                    held.insert(e);
                } else {
                    rejected[e] = true;
                    any_rejected = true;
                }
            }
        }
        if !any_rejected {
            return SystemMatching { edges: held };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{generate_instance, GeneratorConfig};
    use crate::instance::Matching;

    fn system_matching(inst: &Instance, pairs: &[(&str, &str)]) -> SystemMatching {
        let m = Matching::from_pairs(inst, pairs).unwrap();
        SystemMatching::new(inst, m.edges()).unwrap()
    }

    fn edge(inst: &Instance, a: &str, b: &str) -> SystemEdge {
        inst.edge_between(
            inst.find(Side::Agent, a).unwrap(),
            inst.find(Side::Job, b).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn f1_blocking() {
        let f1 = fixtures::f1();
        let m = system_matching(&f1, &[("a", "b'"), ("a'", "b")]);
        assert!(is_blocking(&f1, &m, edge(&f1, "a", "b")).unwrap());
        let s = system_matching(&f1, &[("a", "b")]);
        assert!(!is_blocking(&f1, &s, edge(&f1, "a", "b'")).unwrap());
        assert!(is_blocking(&f1, &s, 99).is_err());
    }

    #[test]
    fn f1_stability() {
        let f1 = fixtures::f1();
        assert!(is_stable(&f1, &system_matching(&f1, &[("a", "b")])));
        let m = system_matching(&f1, &[("a", "b'"), ("a'", "b")]);
        assert_eq!(
            check_stability(&f1, &m),
            Stability::BlockedBy(edge(&f1, "a", "b"))
        );
    }

    #[test]
    fn f2_full_matching_is_stable() {
        let f2 = fixtures::f2();
        let all = SystemMatching::new(&f2, 0..4).unwrap();
        for e in 0..4 {
            assert!(!is_blocking(&f2, &all, e).unwrap());
        }
        assert!(is_stable(&f2, &all));
    }

    #[test]
    fn deferred_acceptance_on_fixtures() {
        let f1 = fixtures::f1();
        assert_eq!(
            deferred_acceptance(&f1),
            system_matching(&f1, &[("a", "b")])
        );
        let f2 = fixtures::f2();
        let da = deferred_acceptance(&f2);
        assert_eq!(da.len(), 4);
        assert!(is_stable(&f2, &da));
    }

    #[test]
    fn matching_validation() {
        let f1 = fixtures::f1();
        assert!(SystemMatching::new(&f1, [0, 1]).is_err());
        assert!(SystemMatching::new(&f1, [5]).is_err());
    }

    #[test]
    fn deferred_acceptance_is_stable_on_random_instances() {
        for seed in 0..60 {
            let inst = generate_instance(&GeneratorConfig::new(seed, 4, 4, 3, 0.6)).unwrap();
            let da = deferred_acceptance(&inst);
            assert!(is_stable(&inst, &da), "seed {seed}");
            assert_eq!(da, deferred_acceptance(&inst));
        }
    }
}
