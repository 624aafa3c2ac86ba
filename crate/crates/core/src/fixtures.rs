//! Small hand-written instances used throughout the tests and examples.

use crate::instance::{Cost, Instance};

/// One-to-one instance whose only stable matching is not perfect.
///
/// `a: b > b'`, `a': b`, `b: a > a'`, `b': a`, all capacities 1.
pub fn f1() -> Instance {
    Instance::from_names(
        &[("a", 1, &["b", "b'"]), ("a'", 1, &["b"])],
        &[("b", 1, &["a", "a'"]), ("b'", 1, &["a"])],
        &[],
    )
    .expect("f1 is valid")
}

/// Capacity-2 instance on a complete 2x2 graph; its only perfect matching
/// uses every edge.
pub fn f2() -> Instance {
    Instance::from_names(
        &[("a", 2, &["b", "b'"]), ("a'", 2, &["b'", "b"])],
        &[("b", 2, &["a", "a'"]), ("b'", 2, &["a'", "a"])],
        &[],
    )
    .expect("f2 is valid")
}

/// A single agent `v` with capacity 3 ranking six jobs `u1 > ... > u6`.
pub fn f3() -> Instance {
    let jobs = ["u1", "u2", "u3", "u4", "u5", "u6"];
    let job_rows: Vec<(&str, usize, &[&str])> = jobs.iter().map(|&u| (u, 1, &["v"][..])).collect();
    Instance::from_names(&[("v", 3, &jobs)], &job_rows, &[]).expect("f3 is valid")
}

/// Complete 2x2 one-to-one instance where both jobs rank `a1` first.
pub fn f4() -> Instance {
    f4_with_costs(&[])
}

/// [`f4`] with `cost(a1,b2) = cost(a2,b1) = 5`, all other edges free.
pub fn f4_costs() -> Instance {
    f4_with_costs(&[
        ("a1", "b2", Cost::from_units(5)),
        ("a2", "b1", Cost::from_units(5)),
    ])
}

fn f4_with_costs(costs: &[(&str, &str, Cost)]) -> Instance {
    Instance::from_names(
        &[("a1", 1, &["b2", "b1"]), ("a2", 1, &["b1", "b2"])],
        &[("b1", 1, &["a1", "a2"]), ("b2", 1, &["a1", "a2"])],
        costs,
    )
    .expect("f4 is valid")
}
