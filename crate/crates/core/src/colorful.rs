//! Colorful multigraphs: every edge is replaced by `n0` parallel copies, one
//! per color. Agents prefer lower colors, jobs prefer higher colors, and
//! within one color every vertex keeps its base order.
//!
//! `G*` is the colorful version of a many-to-many instance with
//! `n0 = sum of cap(a)`. `G0` is the colorful version of the one-to-one
//! subgraph `G'_M'` with `n0` equal to the number of agent clones. A
//! perfect matching is popular among perfect matchings exactly when some
//! coloring of it is stable in `G*`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::clone::{build_subgraph, clone_instance, realize_matching, SubgraphGM};
use crate::document::{EdgeDocument, MatchingDocument};
use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, Matching, PerfectMatching, Side, Vertex};
use crate::stability::{is_stable, PreferenceSystem, SystemEdge, SystemMatching};

/// A base instance together with a color count. Colored edge `(e, c)` has
/// system id `e * colors + (c - 1)`; its class is the base edge `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorfulInstance {
    base: Instance,
    colors: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredEdge {
    pub edge: EdgeId,
    /// 1-based color.
    pub color: usize,
}

/// `G*`: the colorful version of `inst` with one color per unit of agent
/// capacity.
pub fn build_colorful_many(inst: &Instance) -> ColorfulInstance {
    let colors = inst.total_capacity(Side::Agent);
    debug_assert!(colors <= inst.agents().len() * inst.jobs().len());
    ColorfulInstance {
        base: inst.clone(),
        colors,
    }
}

/// `G0`: the colorful version of the one-to-one subgraph `G'_M'`.
pub fn build_colorful_one(sub: &SubgraphGM) -> ColorfulInstance {
    let colors = sub.instance().agents().len();
    ColorfulInstance {
        base: sub.instance().clone(),
        colors,
    }
}

impl ColorfulInstance {
    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn id(&self, e: ColoredEdge) -> SystemEdge {
        e.edge * self.colors + (e.color - 1)
    }

    pub fn colored(&self, id: SystemEdge) -> ColoredEdge {
        ColoredEdge {
            edge: id / self.colors,
            color: id % self.colors + 1,
        }
    }

    fn key(&self, side: Side, edge: EdgeId, color: usize) -> u64 {
        let band = match side {
            Side::Agent => color - 1,
            Side::Job => self.colors - color,
        };
        ((band as u64) << 32) | self.base.edge(edge).rank(side) as u64
    }

    /// The full preference list of a vertex over colored edges, best first.
    pub fn preference_list(&self, v: Vertex) -> Vec<ColoredEdge> {
        let mut list: Vec<ColoredEdge> = self
            .base
            .incident_edges(v)
            .iter()
            .flat_map(|&edge| (1..=self.colors).map(move |color| ColoredEdge { edge, color }))
            .collect();
        list.sort_by_key(|e| self.key(v.side(), e.edge, e.color));
        list
    }
}

impl PreferenceSystem for ColorfulInstance {
    fn side_len(&self, side: Side) -> usize {
        self.base.members(side).len()
    }

    fn capacity(&self, side: Side, vertex: usize) -> usize {
        self.base.capacity(Vertex::new(side, vertex))
    }

    fn edge_count(&self) -> usize {
        self.base.edges().len() * self.colors
    }

    fn endpoints(&self, edge: SystemEdge) -> (usize, usize) {
        let e = self.base.edge(edge / self.colors);
        (e.agent, e.job)
    }

    fn class_of(&self, edge: SystemEdge) -> usize {
        edge / self.colors
    }

    fn preference_key(&self, side: Side, edge: SystemEdge) -> u64 {
        let c = self.colored(edge);
        self.key(side, c.edge, c.color)
    }

    fn incident(&self, side: Side, vertex: usize) -> Vec<SystemEdge> {
        self.base
            .incident_edges(Vertex::new(side, vertex))
            .iter()
            .flat_map(|&e| (0..self.colors).map(move |c| e * self.colors + c))
            .collect()
    }
}

/// A matching of a colorful instance: at most one copy of every base edge,
/// within capacities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColorfulMatching {
    edges: BTreeSet<ColoredEdge>,
}

impl ColorfulMatching {
    pub fn new(
        ci: &ColorfulInstance,
        edges: impl IntoIterator<Item = ColoredEdge>,
    ) -> Result<ColorfulMatching> {
        let edges: BTreeSet<ColoredEdge> = edges.into_iter().collect();
        for e in &edges {
            if e.edge >= ci.base.edges().len() {
                return Err(Error::UnknownEdge(e.edge));
            }
            if e.color == 0 || e.color > ci.colors {
                return Err(Error::InvalidArgument(format!(
                    "color {} outside 1..={}",
                    e.color, ci.colors
                )));
            }
        }
        SystemMatching::new(ci, edges.iter().map(|&e| ci.id(e)))?;
        Ok(ColorfulMatching { edges })
    }

    pub fn from_system(ci: &ColorfulInstance, m: &SystemMatching) -> ColorfulMatching {
        ColorfulMatching {
            edges: m.edges().map(|id| ci.colored(id)).collect(),
        }
    }

    pub fn to_system(&self, ci: &ColorfulInstance) -> SystemMatching {
        SystemMatching::new(ci, self.edges.iter().map(|&e| ci.id(e)))
            .expect("validated on construction")
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = ColoredEdge> + '_ {
        self.edges.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Drops the colors.
    pub fn project(&self) -> Matching {
        Matching::from_set(self.edges.iter().map(|e| e.edge).collect())
    }

    pub fn color_of(&self, edge: EdgeId) -> Option<usize> {
        self.edges.iter().find(|e| e.edge == edge).map(|e| e.color)
    }

    pub fn is_stable(&self, ci: &ColorfulInstance) -> bool {
        is_stable(ci, &self.to_system(ci))
    }
}

/// A one-to-one realization of a `G*` matching together with the colorful
/// one-to-one instance it lives in.
#[derive(Clone, Debug)]
pub struct ColorfulRealization {
    pub subgraph: SubgraphGM,
    pub instance: ColorfulInstance,
    pub matching: ColorfulMatching,
}

/// Realizes `m` (a matching of `G*` for `inst`) on clones: the projection is
/// realized canonically and every clone edge keeps the color of its base
/// edge.
pub fn realize_colorful(inst: &Instance, m: &ColorfulMatching) -> Result<ColorfulRealization> {
    let cloned = clone_instance(inst);
    let realization = realize_matching(inst, &cloned, &m.project())?;
    let subgraph = build_subgraph(inst, &cloned, &realization);
    let instance = build_colorful_one(&subgraph);
    let mut edges = Vec::with_capacity(m.len());
    for e in m.edges() {
        let clone_edge = realization
            .clone_edge_of(e.edge)
            .expect("every matched edge is realized");
        let edge = subgraph
            .from_clone_edge(clone_edge)
            .ok_or_else(|| Error::Invariant("realized edge missing from the subgraph".into()))?;
        edges.push(ColoredEdge {
            edge,
            color: e.color,
        });
    }
    let matching = ColorfulMatching::new(&instance, edges)?;
    Ok(ColorfulRealization {
        subgraph,
        instance,
        matching,
    })
}

/// Finds a coloring of the perfect matching `m` that is stable in `G*`, or
/// `None` if there is none. Colorings are tried in lexicographic order of
/// the color sequence over the matched edges, so the first stable one is
/// returned.
pub fn lift_to_stable(inst: &Instance, m: &PerfectMatching) -> Result<Option<ColorfulMatching>> {
    let gstar = build_colorful_many(inst);
    let mut search = LiftSearch::new(&gstar, m);
    if !search.extend(0) {
        return Ok(None);
    }
    let coloring = ColorfulMatching::new(
        &gstar,
        search
            .matched
            .iter()
            .zip(&search.colors)
            .map(|(&edge, &color)| ColoredEdge { edge, color }),
    )?;
    if !coloring.is_stable(&gstar) {
        return Err(Error::Invariant("lifted coloring is not stable".into()));
    }
    Ok(Some(coloring))
}

/// Backtracking state for [`lift_to_stable`]. Since the matching is perfect
/// every vertex is full, so a non-matching edge `(a, b)` blocks in some
/// color exactly when it beats the worst matched edge at both ends. Worst
/// keys only grow as more edges get colored, so a block visible on a
/// partial coloring survives every completion.
struct LiftSearch<'a> {
    gstar: &'a ColorfulInstance,
    matched: Vec<EdgeId>,
    in_matching: Vec<bool>,
    colors: Vec<usize>,
    /// `worst[side][v]`: stack of worst keys, one entry per colored edge at `v`.
    worst: [Vec<Vec<u64>>; 2],
}

impl<'a> LiftSearch<'a> {
    fn new(gstar: &'a ColorfulInstance, m: &PerfectMatching) -> LiftSearch<'a> {
        let base = gstar.base();
        let mut in_matching = vec![false; base.edges().len()];
        for e in m.edges() {
            in_matching[e] = true;
        }
        LiftSearch {
            gstar,
            matched: m.edges().collect(),
            in_matching,
            colors: Vec::with_capacity(m.len()),
            worst: [
                vec![Vec::new(); base.agents().len()],
                vec![Vec::new(); base.jobs().len()],
            ],
        }
    }

    fn current_worst(&self, v: Vertex) -> Option<u64> {
        self.worst[usize::from(v.side() == Side::Job)][v.index()]
            .last()
            .copied()
    }

    fn push(&mut self, e: EdgeId, color: usize) {
        let edge = self.gstar.base().edge(e);
        for v in [Vertex::Agent(edge.agent), Vertex::Job(edge.job)] {
            let key = self.gstar.key(v.side(), e, color);
            let next = self.current_worst(v).map_or(key, |w| w.max(key));
            self.worst[usize::from(v.side() == Side::Job)][v.index()].push(next);
        }
    }

    fn pop(&mut self, e: EdgeId) {
        let edge = self.gstar.base().edge(e);
        self.worst[0][edge.agent].pop();
        self.worst[1][edge.job].pop();
    }

    fn blocked(&self, e: EdgeId) -> bool {
        let edge = self.gstar.base().edge(e);
        let (Some(wa), Some(wb)) = (
            self.current_worst(Vertex::Agent(edge.agent)),
            self.current_worst(Vertex::Job(edge.job)),
        ) else {
            return false;
        };
        (1..=self.gstar.colors())
            .any(|c| self.gstar.key(Side::Agent, e, c) < wa && self.gstar.key(Side::Job, e, c) < wb)
    }

    fn touches_block(&self, e: EdgeId) -> bool {
        let base = self.gstar.base();
        let edge = base.edge(e);
        [Vertex::Agent(edge.agent), Vertex::Job(edge.job)]
            .iter()
            .flat_map(|&v| base.incident_edges(v).iter().copied())
            .any(|x| !self.in_matching[x] && self.blocked(x))
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.matched.len() {
            return true;
        }
        let e = self.matched[depth];
        for color in 1..=self.gstar.colors() {
            self.push(e, color);
            self.colors.push(color);
            if !self.touches_block(e) && self.extend(depth + 1) {
                return true;
            }
            self.colors.pop();
            self.pop(e);
        }
        false
    }
}

/// Document form of a colorful instance: members list their colored edges
/// best first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorfulInstanceDocument {
    pub colors: usize,
    pub agents: Vec<ColorfulMemberDocument>,
    pub jobs: Vec<ColorfulMemberDocument>,
    /// The matching the instance was built around, for `G0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realization: Option<MatchingDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorfulMemberDocument {
    pub name: String,
    pub capacity: usize,
    pub preferences: Vec<ColoredPreference>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColoredPreference {
    pub name: String,
    pub color: usize,
}

pub fn colorful_instance_document(ci: &ColorfulInstance) -> ColorfulInstanceDocument {
    let base = ci.base();
    let members = |side: Side| {
        (0..base.members(side).len())
            .map(|i| {
                let v = Vertex::new(side, i);
                ColorfulMemberDocument {
                    name: base.name(v).to_string(),
                    capacity: base.capacity(v),
                    preferences: ci
                        .preference_list(v)
                        .into_iter()
                        .map(|e| ColoredPreference {
                            name: base
                                .name(Vertex::new(
                                    side.opposite(),
                                    base.edge(e.edge).endpoint(side.opposite()),
                                ))
                                .to_string(),
                            color: e.color,
                        })
                        .collect(),
                }
            })
            .collect()
    };
    ColorfulInstanceDocument {
        colors: ci.colors(),
        agents: members(Side::Agent),
        jobs: members(Side::Job),
        realization: None,
    }
}

pub fn colorful_matching_document(ci: &ColorfulInstance, m: &ColorfulMatching) -> MatchingDocument {
    MatchingDocument {
        edges: m
            .edges()
            .map(|e| {
                let (agent, job) = ci.base().edge_label(e.edge);
                EdgeDocument {
                    agent,
                    job,
                    color: Some(e.color),
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::realize;
    use crate::fixtures;
    use crate::stability::deferred_acceptance;

    fn labels(ci: &ColorfulInstance, list: &[ColoredEdge]) -> Vec<(String, String, usize)> {
        list.iter()
            .map(|e| {
                let (a, b) = ci.base().edge_label(e.edge);
                (a, b, e.color)
            })
            .collect()
    }

    fn expected(list: &[(&str, &str, usize)]) -> Vec<(String, String, usize)> {
        list.iter()
            .map(|&(a, b, c)| (a.into(), b.into(), c))
            .collect()
    }

    fn perfect(inst: &Instance, pairs: &[(&str, &str)]) -> PerfectMatching {
        PerfectMatching::new(inst, Matching::from_pairs(inst, pairs).unwrap()).unwrap()
    }

    #[test]
    fn f4_orders() {
        let g = build_colorful_many(&fixtures::f4());
        assert_eq!(g.colors(), 2);
        assert_eq!(
            labels(&g, &g.preference_list(Vertex::Agent(0))),
            expected(&[
                ("a1", "b2", 1),
                ("a1", "b1", 1),
                ("a1", "b2", 2),
                ("a1", "b1", 2)
            ])
        );
        assert_eq!(
            labels(&g, &g.preference_list(Vertex::Job(0))),
            expected(&[
                ("a1", "b1", 2),
                ("a2", "b1", 2),
                ("a1", "b1", 1),
                ("a2", "b1", 1)
            ])
        );
    }

    #[test]
    fn sizes() {
        let g = build_colorful_many(&fixtures::f2());
        assert_eq!(g.colors(), 4);
        assert_eq!(g.edge_count(), 16);

        let single = Instance::from_names(&[("a", 1, &["b"])], &[("b", 1, &["a"])], &[]).unwrap();
        let g = build_colorful_many(&single);
        assert_eq!((g.colors(), g.edge_count()), (1, 1));

        let sub = |inst: &Instance, m: &PerfectMatching| {
            let cloned = clone_instance(inst);
            build_subgraph(inst, &cloned, &realize(inst, &cloned, m).unwrap())
        };
        let f1 = fixtures::f1();
        let g0 = build_colorful_one(&sub(&f1, &perfect(&f1, &[("a", "b'"), ("a'", "b")])));
        assert_eq!(g0.edge_count(), 6);
        let f4 = fixtures::f4();
        let g0 = build_colorful_one(&sub(&f4, &perfect(&f4, &[("a1", "b1"), ("a2", "b2")])));
        assert_eq!(g0.edge_count(), 8);
        let f2 = fixtures::f2();
        let all = PerfectMatching::new(&f2, Matching::new(&f2, 0..4).unwrap()).unwrap();
        let g0 = build_colorful_one(&sub(&f2, &all));
        assert_eq!(g0.edge_count(), 16);
    }

    #[test]
    fn projection() {
        let f4 = fixtures::f4();
        let g = build_colorful_many(&f4);
        let n = perfect(&f4, &[("a1", "b2"), ("a2", "b1")]);
        let colored =
            ColorfulMatching::new(&g, n.edges().map(|edge| ColoredEdge { edge, color: 1 }))
                .unwrap();
        assert_eq!(&colored.project(), n.as_matching());
        assert!(ColorfulMatching::new(&g, []).unwrap().project().is_empty());
    }

    #[test]
    fn at_most_one_copy_per_edge() {
        let g = build_colorful_many(&fixtures::f2());
        let twice = [
            ColoredEdge { edge: 0, color: 1 },
            ColoredEdge { edge: 0, color: 2 },
        ];
        assert!(ColorfulMatching::new(&g, twice).is_err());
        assert!(ColorfulMatching::new(&g, [ColoredEdge { edge: 0, color: 5 }]).is_err());
    }

    #[test]
    fn deferred_acceptance_on_f4_gstar() {
        let f4 = fixtures::f4();
        let g = build_colorful_many(&f4);
        let m = ColorfulMatching::from_system(&g, &deferred_acceptance(&g));
        assert_eq!(
            labels(&g, &m.edges().collect::<Vec<_>>()),
            expected(&[("a1", "b2", 1), ("a2", "b1", 1)])
        );
        assert!(m.is_stable(&g));
    }

    #[test]
    fn lifts() {
        let f4 = fixtures::f4();
        let n = perfect(&f4, &[("a1", "b2"), ("a2", "b1")]);
        let lifted = lift_to_stable(&f4, &n).unwrap().unwrap();
        assert!(lifted.edges().all(|e| e.color == 1));
        let m = perfect(&f4, &[("a1", "b1"), ("a2", "b2")]);
        assert_eq!(lift_to_stable(&f4, &m).unwrap(), None);

        let f2 = fixtures::f2();
        let all = PerfectMatching::new(&f2, Matching::new(&f2, 0..4).unwrap()).unwrap();
        let lifted = lift_to_stable(&f2, &all).unwrap().unwrap();
        assert_eq!(&lifted.project(), all.as_matching());
    }

    #[test]
    fn colorful_realization_preserves_stability() {
        let f4 = fixtures::f4();
        let g = build_colorful_many(&f4);
        for colors in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            for pairs in [[("a1", "b2"), ("a2", "b1")], [("a1", "b1"), ("a2", "b2")]] {
                let m = Matching::from_pairs(&f4, &pairs).unwrap();
                let edges: Vec<EdgeId> = m.edges().collect();
                let colored = ColorfulMatching::new(
                    &g,
                    [
                        ColoredEdge {
                            edge: edges[0],
                            color: colors.0,
                        },
                        ColoredEdge {
                            edge: edges[1],
                            color: colors.1,
                        },
                    ],
                )
                .unwrap();
                let r = realize_colorful(&f4, &colored).unwrap();
                assert_eq!(colored.is_stable(&g), r.matching.is_stable(&r.instance));
            }
        }
    }

    #[test]
    fn documents() {
        let f4 = fixtures::f4();
        let g = build_colorful_many(&f4);
        let doc = colorful_instance_document(&g);
        assert_eq!(doc.colors, 2);
        assert_eq!(
            doc.agents[0].preferences[0],
            ColoredPreference {
                name: "b2".into(),
                color: 1
            }
        );
        let m = ColorfulMatching::new(&g, [ColoredEdge { edge: 1, color: 2 }]).unwrap();
        let md = colorful_matching_document(&g, &m);
        assert_eq!(md.edges[0].color, Some(2));
    }
}
