//! Votes of single vertices and the matching comparison `delta`.
//!
//! A vertex compares two neighbor sets `S` and `T` by pairing the elements of
//! `S \ T` with those of `T \ S` (the shorter side padded with dummies that
//! rank below every real neighbor) and summing its pairwise votes. The pairing
//! is the one that minimizes this sum, i.e. the comparison is as unfavourable
//! to `S` as possible.

use std::collections::BTreeSet;

use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, Vertex};

/// A neighbor of some vertex, or the padding element used when the two
/// compared sets have different sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Candidate {
    Neighbor(usize),
    Dummy,
}

/// One vertex's vote between two candidates: +1, 0 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vote(i8);

impl Vote {
    pub const FOR: Vote = Vote(1);
    pub const ABSTAIN: Vote = Vote(0);
    pub const AGAINST: Vote = Vote(-1);

    pub fn value(self) -> i64 {
        i64::from(self.0)
    }
}

impl std::ops::Neg for Vote {
    type Output = Vote;

    fn neg(self) -> Vote {
        Vote(-self.0)
    }
}

fn rank_of(inst: &Instance, v: Vertex, u: Candidate) -> Result<usize> {
    match u {
        Candidate::Dummy => Ok(usize::MAX),
        Candidate::Neighbor(u) => inst.rank(v, u).ok_or_else(|| Error::NotNeighbor {
            vertex: inst.name(v).to_string(),
            candidate: inst
                .members(v.side().opposite())
                .get(u)
                .map_or_else(|| format!("#{u}"), |m| m.name.clone()),
        }),
    }
}

/// `v`'s vote for `u` against `w`: +1 if it prefers `u`, -1 if it prefers `w`.
pub fn vote(inst: &Instance, v: Vertex, u: Candidate, w: Candidate) -> Result<Vote> {
    let (ru, rw) = (rank_of(inst, v, u)?, rank_of(inst, v, w)?);
    Ok(match ru.cmp(&rw) {
        std::cmp::Ordering::Less => Vote::FOR,
        std::cmp::Ordering::Equal => Vote::ABSTAIN,
        std::cmp::Ordering::Greater => Vote::AGAINST,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetVote {
    pub value: i64,
    /// The minimizing pairing, elements of `S \ T` on the left. Both sides are
    /// listed in `v`'s preference order before pairing.
    pub pairing: Vec<(Candidate, Candidate)>,
}

/// `v`'s vote for neighbor set `s` against `t`.
pub fn vote_set(inst: &Instance, v: Vertex, s: &[usize], t: &[usize]) -> Result<SetVote> {
    let by_rank = |xs: &[usize]| -> Result<Vec<(usize, usize)>> {
        let mut ranked = xs
            .iter()
            .map(|&x| Ok((rank_of(inst, v, Candidate::Neighbor(x))?, x)))
            .collect::<Result<BTreeSet<_>>>()?
            .into_iter()
            .collect::<Vec<_>>();
        ranked.dedup();
        Ok(ranked)
    };
    let s = by_rank(s)?;
    let t = by_rank(t)?;
    let pad = |only: Vec<Candidate>, k: usize| -> Vec<Candidate> {
        let mut padded = only;
        padded.resize(k, Candidate::Dummy);
        padded
    };
    let s_only: Vec<Candidate> = s
        .iter()
        .filter(|x| !t.contains(x))
        .map(|&(_, x)| Candidate::Neighbor(x))
        .collect();
    let t_only: Vec<Candidate> = t
        .iter()
        .filter(|x| !s.contains(x))
        .map(|&(_, x)| Candidate::Neighbor(x))
        .collect();
    let k = s_only.len().max(t_only.len());
    let left = pad(s_only, k);
    let right = pad(t_only, k);

    let mut matrix = vec![vec![0i64; k]; k];
    for (i, &x) in left.iter().enumerate() {
        for (j, &y) in right.iter().enumerate() {
            matrix[i][j] = vote(inst, v, x, y)?.value();
        }
    }
    let assignment = min_cost_assignment(&matrix);
    let pairing = assignment
        .column_of_row
        .iter()
        .enumerate()
        .map(|(i, &j)| (left[i], right[j]))
        .collect();
    Ok(SetVote {
        value: assignment.total,
        pairing,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaValue {
    pub value: i64,
    /// Every vertex's vote, agents first, in document order.
    pub per_vertex: Vec<(Vertex, i64)>,
}

/// `delta(m, n) > 0` iff `m` is more popular than `n`.
pub fn delta(inst: &Instance, m: &Matching, n: &Matching) -> Result<DeltaValue> {
    let mp = m.partners(inst);
    let np = n.partners(inst);
    let per_vertex = inst
        .vertices()
        .map(|v| Ok((v, vote_set(inst, v, mp.of(v), np.of(v))?.value)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeltaValue {
        value: per_vertex.iter().map(|&(_, x)| x).sum(),
        per_vertex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn job(inst: &Instance, name: &str) -> usize {
        inst.find(crate::instance::Side::Job, name).unwrap()
    }

    fn ids(inst: &Instance, names: &[&str]) -> Vec<usize> {
        names.iter().map(|n| job(inst, n)).collect()
    }

    /// Minimum over every bijection, straight from the definition.
    fn brute_force_vote_set(inst: &Instance, v: Vertex, s: &[usize], t: &[usize]) -> i64 {
        let s_only: Vec<Candidate> = s
            .iter()
            .filter(|x| !t.contains(x))
            .map(|&x| Candidate::Neighbor(x))
            .collect();
        let t_only: Vec<Candidate> = t
            .iter()
            .filter(|x| !s.contains(x))
            .map(|&x| Candidate::Neighbor(x))
            .collect();
        let k = s_only.len().max(t_only.len());
        let mut left = s_only;
        left.resize(k, Candidate::Dummy);
        let mut right = t_only;
        right.resize(k, Candidate::Dummy);
        (0..k)
            .permutations(k)
            .map(|p| {
                (0..k)
                    .map(|i| vote(inst, v, left[i], right[p[i]]).unwrap().value())
                    .sum::<i64>()
            })
            .min()
            .unwrap_or(0)
    }

    #[test]
    fn pairwise_votes() {
        let f3 = fixtures::f3();
        let v = Vertex::Agent(0);
        let [u1, u2, u3, u6] = [0, 1, 2, 5].map(Candidate::Neighbor);
        assert_eq!(vote(&f3, v, u1, u6).unwrap(), Vote::FOR);
        assert_eq!(vote(&f3, v, u2, u2).unwrap(), Vote::ABSTAIN);
        assert_eq!(vote(&f3, v, u3, Candidate::Dummy).unwrap(), Vote::FOR);
        assert_eq!(vote(&f3, v, Candidate::Dummy, u3).unwrap(), Vote::AGAINST);
        assert_eq!(
            vote(&f3, v, Candidate::Dummy, Candidate::Dummy).unwrap(),
            Vote::ABSTAIN
        );
    }

    #[test]
    fn non_neighbor_is_rejected() {
        let f1 = fixtures::f1();
        // a' is not adjacent to b'
        let err = vote(
            &f1,
            Vertex::Agent(1),
            Candidate::Neighbor(1),
            Candidate::Neighbor(0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotNeighbor { .. }));
        assert!(vote_set(&f1, Vertex::Agent(1), &[1], &[]).is_err());
    }

    #[test]
    fn set_vote_example() {
        let f3 = fixtures::f3();
        let v = Vertex::Agent(0);
        let s = ids(&f3, &["u1", "u3", "u5"]);
        let t = ids(&f3, &["u2", "u4", "u6"]);
        let st = vote_set(&f3, v, &s, &t).unwrap();
        assert_eq!(st.value, -1);
        assert_eq!(st.value, brute_force_vote_set(&f3, v, &s, &t));
        let pair_sum: i64 = st
            .pairing
            .iter()
            .map(|&(x, y)| vote(&f3, v, x, y).unwrap().value())
            .sum();
        assert_eq!(pair_sum, -1);
        assert_eq!(vote_set(&f3, v, &t, &s).unwrap().value, -3);
        assert_eq!(
            vote_set(&f3, v, &s, &s).unwrap(),
            SetVote {
                value: 0,
                pairing: vec![]
            }
        );
    }

    #[test]
    fn unequal_sizes_pad_with_dummies() {
        let f3 = fixtures::f3();
        let v = Vertex::Agent(0);
        let sv = vote_set(&f3, v, &ids(&f3, &["u6"]), &[]).unwrap();
        assert_eq!(sv.value, 1);
        assert_eq!(sv.pairing, vec![(Candidate::Neighbor(5), Candidate::Dummy)]);
        assert_eq!(
            vote_set(&f3, v, &[], &ids(&f3, &["u6", "u1"]))
                .unwrap()
                .value,
            -2
        );
    }

    #[test]
    fn delta_f1() {
        let f1 = fixtures::f1();
        let m = Matching::from_pairs(&f1, &[("a", "b'"), ("a'", "b")]).unwrap();
        let s = Matching::from_pairs(&f1, &[("a", "b")]).unwrap();
        let d = delta(&f1, &m, &s).unwrap();
        assert_eq!(d.value, 0);
        let votes: Vec<i64> = d.per_vertex.iter().map(|&(_, x)| x).collect();
        // a, a', b, b'
        assert_eq!(votes, vec![-1, 1, -1, 1]);
        assert_eq!(delta(&f1, &m, &m).unwrap().value, 0);
    }

    #[test]
    fn delta_f4() {
        let f4 = fixtures::f4();
        let n = Matching::from_pairs(&f4, &[("a1", "b2"), ("a2", "b1")]).unwrap();
        let m = Matching::from_pairs(&f4, &[("a1", "b1"), ("a2", "b2")]).unwrap();
        assert_eq!(delta(&f4, &n, &m).unwrap().value, 2);
        assert_eq!(delta(&f4, &m, &n).unwrap().value, -2);
    }

    fn subset(mask: u8, n: usize) -> Vec<usize> {
        (0..n).filter(|i| mask & (1 << i) != 0).collect()
    }

    fn star(degree: usize) -> Instance {
        let names: Vec<String> = (1..=degree).map(|i| format!("u{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let jobs: Vec<(&str, usize, &[&str])> = refs.iter().map(|&u| (u, 1, &["v"][..])).collect();
        Instance::from_names(&[("v", 1, &refs)], &jobs, &[]).unwrap()
    }

    proptest! {
        #[test]
        fn assignment_matches_brute_force(order in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(), s in 0u8..64, t in 0u8..64) {
            // reorder the star's preference list
            let inst = star(6);
            let member = crate::instance::Member { name: "v".into(), capacity: 1, preferences: order };
            let jobs: Vec<_> = inst.jobs().to_vec();
            let inst = Instance::new(vec![member], jobs, &[]).unwrap();
            let v = Vertex::Agent(0);
            let (s, t) = (subset(s, 6), subset(t, 6));
            let st = vote_set(&inst, v, &s, &t).unwrap().value;
            let ts = vote_set(&inst, v, &t, &s).unwrap().value;
            prop_assert_eq!(st, brute_force_vote_set(&inst, v, &s, &t));
            prop_assert!(st + ts <= 0);
        }
    }
}
