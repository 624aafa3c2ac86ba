//! Seeded random instances that are guaranteed to admit a perfect matching.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow;
use crate::instance::{Cost, Instance, Member};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub agents: usize,
    pub jobs: usize,
    pub max_capacity: usize,
    /// Probability that any given agent-job pair is an edge.
    pub density: f64,
    pub max_attempts: u32,
    /// Inclusive range of whole-unit edge costs.
    pub cost_range: (i64, i64),
}

impl GeneratorConfig {
    pub fn new(seed: u64, agents: usize, jobs: usize, max_capacity: usize, density: f64) -> Self {
        GeneratorConfig {
            seed,
            agents,
            jobs,
            max_capacity,
            density,
            max_attempts: 100_000,
            cost_range: (0, 9),
        }
    }
}

/// Rejection-samples instances, bumping the seed after every failed draw,
/// until one admits a perfect matching.
pub fn generate_instance(config: &GeneratorConfig) -> Result<Instance> {
    if config.agents == 0 || config.jobs == 0 {
        return Err(Error::InvalidArgument(
            "both sides need at least one vertex".into(),
        ));
    }
    if !(config.density > 0.0 && config.density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "density {} is outside (0, 1]",
            config.density
        )));
    }
    if config.max_capacity == 0 {
        return Err(Error::InvalidArgument(
            "maximum capacity must be positive".into(),
        ));
    }
    if config.cost_range.0 > config.cost_range.1 {
        return Err(Error::InvalidArgument("empty cost range".into()));
    }
    for attempt in 0..config.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(u64::from(attempt)));
        if let Some(inst) = draw(config, &mut rng) {
            if flow::admits_perfect_matching(&inst) {
                return Ok(inst);
            }
        }
    }
    Err(Error::GenerationFailed(config.max_attempts))
}

fn draw(config: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Option<Instance> {
    let mut agent_prefs = vec![Vec::new(); config.agents];
    let mut job_prefs = vec![Vec::new(); config.jobs];
    for (a, prefs) in agent_prefs.iter_mut().enumerate() {
        for (j, job) in job_prefs.iter_mut().enumerate() {
            if rng.gen_bool(config.density) {
                prefs.push(j);
                job.push(a);
            }
        }
    }
    if agent_prefs.iter().chain(&job_prefs).any(Vec::is_empty) {
        return None;
    }
    let mut members = |prefix: &str, prefs: Vec<Vec<usize>>| -> Vec<Member> {
        prefs
            .into_iter()
            .enumerate()
            .map(|(i, mut preferences)| {
                preferences.shuffle(rng);
                let capacity = rng.gen_range(1..=config.max_capacity.min(preferences.len()));
                Member {
                    name: format!("{prefix}{}", i + 1),
                    capacity,
                    preferences,
                }
            })
            .collect()
    };
    let agents = members("a", agent_prefs);
    let jobs = members("b", job_prefs);
    let agent_total: usize = agents.iter().map(|m| m.capacity).sum();
    let job_total: usize = jobs.iter().map(|m| m.capacity).sum();
    if agent_total != job_total {
        return None;
    }
    let mut costs = Vec::new();
    for (a, agent) in agents.iter().enumerate() {
        let mut sorted = agent.preferences.clone();
        sorted.sort_unstable();
        for j in sorted {
            let units = rng.gen_range(config.cost_range.0..=config.cost_range.1);
            costs.push((a, j, Cost::from_units(units)));
        }
    }
    Instance::new(agents, jobs, &costs).ok()
}
