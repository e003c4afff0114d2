use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use super::mi::{mi_sensitivity, CacheStats, HistogramCache};
use super::structure::{Dependency, PredictionMatrix, VisitOrder};
use crate::data::{Bounds, DiscretizedColumn, Discretizer, Table, DEFAULT_BINS};
use crate::error::{Error, Result};
use crate::mechanisms::exponential_select_index;

/// Tuning knobs for structure inference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceOptions {
    /// Bins per numerical column for MI estimation.
    pub n_bins: usize,
    /// Cap on scored (column, parent set) candidates per step; larger pools are subsampled.
    pub max_candidates: usize,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            n_bins: DEFAULT_BINS,
            max_candidates: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InferenceStats {
    /// Exponential-mechanism selections made (each charged an equal budget slice).
    pub selections: usize,
    pub candidates_scored: usize,
    pub cache: CacheStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub dependency: Dependency,
    pub stats: InferenceStats,
}

/// Discretizes every column of `table` against `bounds`.
pub fn discretize_table(table: &Table, bounds: &Bounds, n_bins: usize) -> Result<Vec<DiscretizedColumn>> {
    table
        .schema()
        .columns()
        .iter()
        .zip(table.columns())
        .map(|(def, col)| Discretizer::new(&def.name, def.ty, bounds.require(&def.name)?, n_bins)?.discretize(col))
        .collect()
}

fn prepare(
    table: &Table,
    bounds: &Bounds,
    epsilon: Option<f64>,
    opts: &InferenceOptions,
) -> Result<Vec<DiscretizedColumn>> {
    if table.schema().len() < 2 {
        return Err(Error::InvalidArgument(
            "structure inference needs at least two columns".into(),
        ));
    }
    if table.n_rows() == 0 {
        return Err(Error::EmptyTable);
    }
    if let Some(eps) = epsilon {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidEpsilon(eps));
        }
    }
    if opts.max_candidates == 0 {
        return Err(Error::InvalidArgument("max_candidates must be positive".into()));
    }
    discretize_table(table, bounds, opts.n_bins)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// `rank`-th k-subset of `0..n` in lexicographic order.
fn unrank_combination(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for remaining in (1..=k).rev() {
        for x in start..n {
            let count = binomial(n - x - 1, remaining - 1);
            if rank < count {
                out.push(x);
                start = x + 1;
                break;
            }
            rank -= count;
        }
    }
    out
}

/// Ranks of the candidates to score: all of them, or a uniform subsample of `cap`.
fn candidate_ranks<R: Rng + ?Sized>(total: u128, cap: usize, rng: &mut R) -> Vec<u128> {
    if total <= cap as u128 {
        return (0..total).collect();
    }
    let mut ranks: Vec<u128> = if total <= usize::MAX as u128 {
        rand::seq::index::sample(rng, total as usize, cap)
            .into_iter()
            .map(|i| i as u128)
            .collect()
    } else {
        let mut seen = HashSet::with_capacity(cap);
        while seen.len() < cap {
            seen.insert(rng.random_range(0..total));
        }
        seen.into_iter().collect()
    };
    ranks.sort_unstable();
    ranks
}

/// Greedy DP network construction over mutual information.
///
/// The first column is drawn uniformly (no budget). Each of the remaining `k − 1`
/// steps scores every (unvisited column, parent set) pair, parent sets being all
/// subsets of the visited columns of size `min(n_parents, |visited|)`, and picks one
/// with the exponential mechanism at `epsilon / (k − 1)`.
pub fn infer_network<R: Rng + ?Sized>(
    table: &Table,
    bounds: &Bounds,
    epsilon: Option<f64>,
    n_parents: usize,
    rng: &mut R,
) -> Result<Inference> {
    infer_network_with(table, bounds, epsilon, n_parents, &InferenceOptions::default(), rng)
}

pub fn infer_network_with<R: Rng + ?Sized>(
    table: &Table,
    bounds: &Bounds,
    epsilon: Option<f64>,
    n_parents: usize,
    opts: &InferenceOptions,
    rng: &mut R,
) -> Result<Inference> {
    if n_parents < 1 {
        return Err(Error::InvalidArgument("n_parents must be at least 1".into()));
    }
    let columns = prepare(table, bounds, epsilon, opts)?;
    let k = columns.len();
    let cache = HistogramCache::new(&columns);
    let sensitivity = mi_sensitivity(table.n_rows());
    let step_eps = epsilon.map(|e| e / (k - 1) as f64);

    let first = rng.random_range(0..k);
    let mut visited = vec![first];
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut stats = InferenceStats::default();

    while visited.len() < k {
        let mut pool: Vec<usize> = visited.clone();
        pool.sort_unstable();
        let unvisited: Vec<usize> = (0..k).filter(|c| !visited.contains(c)).collect();
        let size = n_parents.min(pool.len());
        let per_target = binomial(pool.len(), size);
        let total = per_target * unvisited.len() as u128;
        let candidates: Vec<(usize, Vec<usize>)> = candidate_ranks(total, opts.max_candidates, rng)
            .into_iter()
            .map(|r| {
                let target = unvisited[(r / per_target) as usize];
                let set = unrank_combination(r % per_target, pool.len(), size)
                    .into_iter()
                    .map(|i| pool[i])
                    .collect();
                (target, set)
            })
            .collect();

        // Parent-set histograms first, once each, so parallel scoring only reads them.
        let mut sets: Vec<&Vec<usize>> = candidates.iter().map(|(_, s)| s).collect();
        sets.sort();
        sets.dedup();
        sets.par_iter().for_each(|s| {
            cache.entropy(s);
        });
        let scores: Vec<f64> = candidates
            .par_iter()
            .map(|(t, s)| cache.mutual_information(*t, s))
            .collect();
        stats.candidates_scored += candidates.len();

        let pick = exponential_select_index(&scores, sensitivity, step_eps, rng)?;
        stats.selections += 1;
        let (target, set) = candidates[pick].clone();
        parents[target] = set;
        visited.push(target);
    }
    stats.cache = cache.stats();
    Ok(Inference {
        dependency: build(table, &visited, &parents)?,
        stats,
    })
}

/// Greedy DP chain: each step adds the unvisited column with the highest noisy
/// MI against all visited columns, and conditions it on all of them.
pub fn infer_chain<R: Rng + ?Sized>(
    table: &Table,
    bounds: &Bounds,
    epsilon: Option<f64>,
    rng: &mut R,
) -> Result<Inference> {
    infer_chain_with(table, bounds, epsilon, &InferenceOptions::default(), rng)
}

pub fn infer_chain_with<R: Rng + ?Sized>(
    table: &Table,
    bounds: &Bounds,
    epsilon: Option<f64>,
    opts: &InferenceOptions,
    rng: &mut R,
) -> Result<Inference> {
    let columns = prepare(table, bounds, epsilon, opts)?;
    let k = columns.len();
    let cache = HistogramCache::new(&columns);
    let sensitivity = mi_sensitivity(table.n_rows());
    let step_eps = epsilon.map(|e| e / (k - 1) as f64);

    let first = rng.random_range(0..k);
    let mut visited = vec![first];
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut stats = InferenceStats::default();

    while visited.len() < k {
        let mut set = visited.clone();
        set.sort_unstable();
        let unvisited: Vec<usize> = (0..k).filter(|c| !visited.contains(c)).collect();
        cache.entropy(&set);
        let scores: Vec<f64> = unvisited
            .par_iter()
            .map(|&t| cache.mutual_information(t, &set))
            .collect();
        stats.candidates_scored += unvisited.len();
        let pick = exponential_select_index(&scores, sensitivity, step_eps, rng)?;
        stats.selections += 1;
        let target = unvisited[pick];
        parents[target] = visited.clone();
        visited.push(target);
    }
    stats.cache = cache.stats();
    Ok(Inference {
        dependency: build(table, &visited, &parents)?,
        stats,
    })
}

fn build(table: &Table, visited: &[usize], parents: &[Vec<usize>]) -> Result<Dependency> {
    let names: Vec<String> = table.schema().names().map(str::to_string).collect();
    let order = VisitOrder::new(visited.iter().map(|&i| names[i].clone()).collect(), table.schema())?;
    let position = |c: usize| visited.iter().position(|&v| v == c).unwrap_or(usize::MAX);
    let matrix: PredictionMatrix = visited
        .iter()
        .map(|&c| {
            let mut ps = parents[c].clone();
            ps.sort_by_key(|&p| position(p));
            (names[c].clone(), ps.into_iter().map(|p| names[p].clone()).collect())
        })
        .collect();
    Dependency::new(order, &matrix)
}
