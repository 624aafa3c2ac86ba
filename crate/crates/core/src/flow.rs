//! Perfect-matchability via max flow: source -> agent (cap), agent -> job (1),
//! job -> sink (cap).

use std::collections::VecDeque;

use crate::instance::{Instance, Side, Vertex};

struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    residual: Vec<usize>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            residual: Vec::new(),
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, capacity: usize) {
        self.head[from].push(self.to.len());
        self.to.push(to);
        self.residual.push(capacity);
        self.head[to].push(self.to.len());
        self.to.push(from);
        self.residual.push(0);
    }

    /// Edmonds-Karp. Unit capacities on the middle layer keep this cheap.
    fn max_flow(&mut self, source: usize, sink: usize) -> usize {
        let mut total = 0;
        loop {
            let mut via = vec![usize::MAX; self.head.len()];
            let mut queue = VecDeque::from([source]);
            via[source] = usize::MAX - 1;
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &arc in &self.head[u] {
                    let v = self.to[arc];
                    if self.residual[arc] > 0 && via[v] == usize::MAX {
                        via[v] = arc;
                        queue.push_back(v);
                    }
                }
            }
            if via[sink] == usize::MAX {
                return total;
            }
            let mut bottleneck = usize::MAX;
            let mut v = sink;
            while v != source {
                let arc = via[v];
                bottleneck = bottleneck.min(self.residual[arc]);
                v = self.to[arc ^ 1];
            }
            let mut v = sink;
            while v != source {
                let arc = via[v];
                self.residual[arc] -= bottleneck;
                self.residual[arc ^ 1] += bottleneck;
                v = self.to[arc ^ 1];
            }
            total += bottleneck;
        }
    }
}

/// Size of a maximum matching respecting capacities.
pub fn max_matching_size(inst: &Instance) -> usize {
    let agents = inst.agents().len();
    let jobs = inst.jobs().len();
    let source = agents + jobs;
    let sink = source + 1;
    let mut net = Network::new(agents + jobs + 2);
    for a in 0..agents {
        net.add_arc(source, a, inst.capacity(Vertex::Agent(a)));
    }
    for e in inst.edges() {
        net.add_arc(e.agent, agents + e.job, 1);
    }
    for j in 0..jobs {
        net.add_arc(agents + j, sink, inst.capacity(Vertex::Job(j)));
    }
    net.max_flow(source, sink)
}

pub fn admits_perfect_matching(inst: &Instance) -> bool {
    let total = inst.total_capacity(Side::Agent);
    total == inst.total_capacity(Side::Job) && max_matching_size(inst) == total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_are_perfect_matchable() {
        for inst in [fixtures::f1(), fixtures::f2(), fixtures::f4()] {
            assert!(admits_perfect_matching(&inst));
        }
    }

    #[test]
    fn detects_infeasibility() {
        // both agents only like b
        let inst = Instance::from_names(
            &[("a1", 1, &["b"]), ("a2", 1, &["b", "c"])],
            &[("b", 1, &["a1", "a2"]), ("c", 1, &["a2"])],
            &[],
        )
        .unwrap();
        assert!(admits_perfect_matching(&inst));
        let inst = Instance::from_names(
            &[("a1", 1, &["b"]), ("a2", 1, &["b"])],
            &[("b", 1, &["a1", "a2"]), ("c", 1, &["a3"])],
            &[],
        );
        assert!(inst.is_err());
        let inst = Instance::from_names(
            &[("a1", 1, &["b"]), ("a2", 1, &["b"]), ("a3", 1, &["c"])],
            &[("b", 1, &["a1", "a2"]), ("c", 1, &["a3"])],
            &[],
        )
        .unwrap();
        assert_eq!(max_matching_size(&inst), 2);
        assert!(!admits_perfect_matching(&inst));
    }
}
