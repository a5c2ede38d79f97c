//! Temperature-based sampling across corpora of different sizes.
//!
//! With temperature `T`, corpus `i` is drawn with probability
//! `p_i = n_i^(1/T) / sum_j n_j^(1/T)` and a budget `N` is split by
//! largest-remainder apportionment. `T = 1` is proportional sampling and large
//! `T` approaches uniform. [`Temperature::Concat`] keeps every corpus at its
//! own size, which is how a temperature of 0 ("no downsampling") is read.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Value(f64),
    Concat,
}

impl FromStr for Temperature {
    type Err = String;

    /// Accepts a number >= 1, or `concat` / `0` for plain concatenation.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("concat") {
            return Ok(Temperature::Concat);
        }
        let t: f64 = s.parse().map_err(|_| format!("invalid temperature {s:?}"))?;
        if t == 0.0 {
            Ok(Temperature::Concat)
        } else if t >= 1.0 && t.is_finite() {
            Ok(Temperature::Value(t))
        } else {
            Err(format!("temperature must be >= 1 or \"concat\", got {s}"))
        }
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Temperature::Value(t) => write!(f, "{t}"),
            Temperature::Concat => f.write_str("concat"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSpec {
    pub sizes: Vec<u64>,
    pub temperature: Temperature,
    pub budget: u64,
}

impl SamplingSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.sizes.is_empty() {
            return Err("at least one corpus is required".into());
        }
        if self.sizes.contains(&0) {
            return Err("corpus sizes must be positive".into());
        }
        if self.temperature != Temperature::Concat && self.budget == 0 {
            return Err("budget must be positive".into());
        }
        if let Temperature::Value(t) = self.temperature {
            if !(t >= 1.0 && t.is_finite()) {
                return Err(format!("temperature must be >= 1, got {t}"));
            }
        }
        Ok(())
    }
}

/// Sampling probabilities for a numeric temperature.
pub fn temperature_probabilities(sizes: &[u64], t: f64) -> Vec<f64> {
    let weights: Vec<f64> = sizes.iter().map(|&n| (n as f64).powf(1.0 / t)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

/// Largest-remainder apportionment of `budget` seats over `probs`.
/// Ties in the remainder go to the lower index.
pub fn largest_remainder(probs: &[f64], budget: u64) -> Vec<u64> {
    let quotas: Vec<f64> = probs.iter().map(|p| p * budget as f64).collect();
    let mut counts: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let assigned: u64 = counts.iter().sum();
    if assigned < budget {
        for &i in order.iter().cycle().take((budget - assigned) as usize) {
            counts[i] += 1;
        }
    } else {
        // floating-point overshoot: take back from the smallest remainders
        let mut excess = assigned - budget;
        for &i in order.iter().rev().cycle() {
            if excess == 0 {
                break;
            }
            if counts[i] > 0 {
                counts[i] -= 1;
                excess -= 1;
            }
        }
    }
    counts
}

/// Number of lines to draw from each corpus.
pub fn temperature_sample(spec: &SamplingSpec) -> Vec<u64> {
    match spec.temperature {
        Temperature::Concat => spec.sizes.clone(),
        Temperature::Value(t) => largest_remainder(&temperature_probabilities(&spec.sizes, t), spec.budget),
    }
}

/// Picks which line indices fill each count. Draws without replacement when
/// `count <= size` and with replacement otherwise. Indices come back sorted.
pub fn draw_indices(sizes: &[u64], counts: &[u64], seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .zip(counts)
        .map(|(&n, &c)| {
            let (n, c) = (n as usize, c as usize);
            let mut picked: Vec<usize> = if c == n {
                (0..n).collect()
            } else if c < n {
                index::sample(&mut rng, n, c).into_vec()
            } else {
                (0..c).map(|_| rng.gen_range(0..n)).collect()
            };
            picked.sort_unstable();
            picked
        })
        .collect()
}
