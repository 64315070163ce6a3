use serde::{Deserialize, Serialize};

use super::error::SynthesisError;
use crate::panel::PanelSpec;

/// How keys are counted when comparing hierarchies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HierarchyCost {
    /// Every stage has its own set of selection keys: cost is the sum.
    #[default]
    DistinctKeys,
    /// One keypad is reused at every stage: cost is the largest stage.
    ReusedKeypad,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchyPlan {
    pub branching: Vec<usize>,
    pub stages: usize,
    pub total_keys: usize,
    /// Keys on a keypad shared by all stages.
    pub keypad_keys: usize,
    pub capacity: u128,
    pub cost: HierarchyCost,
}

impl HierarchyPlan {
    fn new(branching: Vec<usize>, cost: HierarchyCost) -> Self {
        Self {
            stages: branching.len(),
            total_keys: branching.iter().sum(),
            keypad_keys: branching.iter().copied().max().unwrap_or(0),
            capacity: product(&branching),
            branching,
            cost,
        }
    }

    pub fn to_spec(&self, id: &str) -> PanelSpec {
        PanelSpec::hierarchical(id, self.branching.clone())
    }
}

fn product(factors: &[usize]) -> u128 {
    factors
        .iter()
        .fold(1u128, |acc, &f| acc.saturating_mul(f as u128))
}

/// Largest product of `k` integers summing to `sum`.
fn balanced_product(sum: usize, k: usize) -> u128 {
    if k == 0 {
        return if sum == 0 { 1 } else { 0 };
    }
    let q = (sum / k) as u128;
    let r = (sum % k) as u32;
    let base = q.saturating_pow(k as u32 - r);
    base.saturating_mul((q + 1).saturating_pow(r))
}

fn floor_root(n: usize, k: usize) -> usize {
    let mut r = (n as f64).powf(1.0 / k as f64).floor() as usize;
    while (r as u128).saturating_pow(k as u32) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).saturating_pow(k as u32) <= n as u128 {
        r += 1;
    }
    r
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Smallest key sum reaching `n` with exactly `k` factors of at least 2.
fn min_sum(n: usize, k: usize) -> usize {
    let mut sum = k * floor_root(n, k).max(2);
    while balanced_product(sum, k) < n as u128 {
        sum += 1;
    }
    sum
}

/// Lexicographically smallest `k` factors of at least 2 that sum to `sum`
/// with product at least `n`. Requires that such a list exists.
fn smallest_list(n: usize, k: usize, sum: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut need = n as u128;
    let mut left = sum;
    let mut lo = 2;
    for i in 0..k {
        let rest = k - i - 1;
        let f = if rest == 0 {
            left
        } else {
            (lo..=left)
                .find(|&f| {
                    left - f >= f * rest && balanced_product(left - f, rest) >= need.div_ceil(f as u128)
                })
                .expect("feasible list exists")
        };
        out.push(f);
        need = need.div_ceil(f as u128);
        left -= f;
        lo = f;
    }
    out
}

/// Multi-stage selection plan with the fewest selection keys able to reach
/// `n_units`. Ties go to fewer stages, then to the lexicographically smallest
/// branching list.
pub fn synthesize_hierarchy(
    n_units: usize,
    max_stages: Option<usize>,
) -> Result<HierarchyPlan, SynthesisError> {
    synthesize_hierarchy_with_cost(n_units, max_stages, HierarchyCost::DistinctKeys)
}

pub fn synthesize_hierarchy_with_cost(
    n_units: usize,
    max_stages: Option<usize>,
    cost: HierarchyCost,
) -> Result<HierarchyPlan, SynthesisError> {
    if n_units == 0 {
        return Err(SynthesisError::InvalidInput("unit count must be at least 1".into()));
    }
    if n_units == 1 {
        return Ok(HierarchyPlan::new(Vec::new(), cost));
    }
    let k_max = ceil_log2(n_units).min(max_stages.unwrap_or(usize::MAX));
    if k_max == 0 {
        return Err(SynthesisError::Infeasible(format!(
            "{n_units} units cannot be addressed with zero stages"
        )));
    }
    let branching = match cost {
        HierarchyCost::DistinctKeys => {
            // Among minimal-sum lists prefer factors of at most 4, then
            // fewer stages.
            (1..=k_max)
                .map(|k| {
                    let sum = min_sum(n_units, k);
                    let list = smallest_list(n_units, k, sum);
                    let wide = list.iter().any(|&f| f > 4);
                    ((sum, wide, k), list)
                })
                .min()
                .expect("k_max >= 1")
                .1
        }
        HierarchyCost::ReusedKeypad => {
            let keys = |k: usize| {
                let r = floor_root(n_units, k).max(2);
                if (r as u128).pow(k as u32) >= n_units as u128 {
                    r
                } else {
                    r + 1
                }
            };
            let (m, k) = (1..=k_max).map(|k| (keys(k), k)).min().expect("k_max >= 1");
            let mut need = n_units as u128;
            (0..k)
                .map(|i| {
                    let rest = (m as u128).pow((k - i - 1) as u32);
                    let f = (2..=m)
                        .find(|&f| (f as u128) * rest >= need)
                        .expect("m^k reaches n");
                    need = need.div_ceil(f as u128);
                    f
                })
                .collect()
        }
    };
    Ok(HierarchyPlan::new(branching, cost))
}
