use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use crate::data::DiscretizedColumn;

/// MI values below this are treated as exact zeros, so that independent candidates
/// tie exactly and fall back to the deterministic tie-break.
const MI_FLOOR: f64 = 1e-12;

/// Dense joint-cell ids of a set of discretized columns, one per row.
///
/// Ids are relabelled to `0..cardinality` whenever the mixed-radix code would grow
/// past `4·n`, so cardinality never exceeds `max(4n, product of bin counts)`.
#[derive(Debug, Clone)]
pub struct JointCodes {
    codes: Vec<u32>,
    cardinality: usize,
}

impl JointCodes {
    pub fn empty(n: usize) -> Self {
        Self {
            codes: vec![0; n],
            cardinality: 1,
        }
    }

    pub fn of_column(col: &DiscretizedColumn) -> Self {
        Self {
            codes: col.bins.clone(),
            cardinality: col.n_bins().max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Joint codes of `self` with one more column.
    pub fn extend(&self, col: &DiscretizedColumn) -> Self {
        let radix = col.n_bins().max(1);
        let n = self.codes.len();
        let product = self.cardinality as u128 * radix as u128;
        if product <= (4 * n.max(1)) as u128 && product <= u32::MAX as u128 {
            let codes = self
                .codes
                .iter()
                .zip(&col.bins)
                .map(|(&a, &b)| a * radix as u32 + b)
                .collect();
            return Self {
                codes,
                cardinality: product as usize,
            };
        }
        let mut relabel: HashMap<u64, u32> = HashMap::with_capacity(n.min(1 << 16));
        let codes = self
            .codes
            .iter()
            .zip(&col.bins)
            .map(|(&a, &b)| {
                let key = a as u64 * radix as u64 + b as u64;
                let next = relabel.len() as u32;
                *relabel.entry(key).or_insert(next)
            })
            .collect();
        Self {
            codes,
            cardinality: relabel.len().max(1),
        }
    }

    pub fn of_columns(cols: &[&DiscretizedColumn], n: usize) -> Self {
        cols.iter().fold(Self::empty(n), |acc, c| acc.extend(c))
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_codes(self.codes.iter().copied(), self.cardinality, self.codes.len())
    }

    /// Entropy of the joint of `self` with `col`, without materializing the codes.
    pub fn entropy_with(&self, col: &DiscretizedColumn) -> f64 {
        let radix = col.n_bins().max(1);
        let product = self.cardinality as u128 * radix as u128;
        if product <= (1 << 24).max(8 * self.codes.len()) as u128 {
            entropy_of_codes(
                self.codes.iter().zip(&col.bins).map(|(&a, &b)| a * radix as u32 + b),
                product as usize,
                self.codes.len(),
            )
        } else {
            self.extend(col).entropy()
        }
    }
}

/// Shannon entropy in bits of the empirical distribution of `codes` over `0..cardinality`.
fn entropy_of_codes(codes: impl Iterator<Item = u32>, cardinality: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut counts = vec![0u32; cardinality];
    for c in codes {
        counts[c as usize] += 1;
    }
    entropy_of_counts(&counts, n)
}

pub(crate) fn entropy_of_counts(counts: &[u32], n: usize) -> f64 {
    let nf = n as f64;
    let s: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = c as f64;
            c * c.log2()
        })
        .sum();
    (nf.log2() - s / nf).max(0.0)
}

fn floor_mi(mi: f64) -> f64 {
    if mi < MI_FLOOR {
        0.0
    } else {
        mi
    }
}

/// Plugin mutual information I(target; parents) in bits. An empty parent set gives 0.
pub fn mutual_information(target: &DiscretizedColumn, parents: &[&DiscretizedColumn]) -> f64 {
    if parents.is_empty() {
        return 0.0;
    }
    let n = target.len();
    let pa = JointCodes::of_columns(parents, n);
    let h_x = JointCodes::of_column(target).entropy();
    floor_mi(h_x + pa.entropy() - pa.entropy_with(target))
}

/// Global sensitivity of the plugin MI score under add/remove-one on `n` rows.
pub fn mi_sensitivity(n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let n = n as f64;
    (2.0 / n) * ((n + 1.0) / 2.0).log2() + ((n - 1.0) / n) * ((n + 1.0) / (n - 1.0)).log2()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// Memoizes joint histograms of column subsets over one discretized table.
///
/// Parent-set codes are kept (they are reused as the prefix of every target's joint);
/// joint (target, parents) histograms are reduced to their entropy right away.
/// Readers share the maps; insertion takes the write lock.
pub struct HistogramCache<'a> {
    columns: &'a [DiscretizedColumn],
    n: usize,
    codes: RwLock<HashMap<Vec<usize>, Arc<JointCodes>>>,
    entropies: RwLock<HashMap<Vec<usize>, f64>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl<'a> HistogramCache<'a> {
    pub fn new(columns: &'a [DiscretizedColumn]) -> Self {
        let n = columns.first().map_or(0, DiscretizedColumn::len);
        Self {
            columns,
            n,
            codes: RwLock::new(HashMap::new()),
            entropies: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    /// Joint codes of a sorted column subset.
    pub fn codes(&self, subset: &[usize]) -> Arc<JointCodes> {
        if let Some(c) = self.codes.read().expect("cache lock").get(subset) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Arc::clone(c);
        }
        let built = match subset.split_last() {
            None => Arc::new(JointCodes::empty(self.n)),
            Some((&last, rest)) => {
                let prefix = self.codes(rest);
                Arc::new(prefix.extend(&self.columns[last]))
            }
        };
        self.misses.fetch_add(1, Ordering::Relaxed);
        let mut map = self.codes.write().expect("cache lock");
        Arc::clone(map.entry(subset.to_vec()).or_insert(built))
    }

    fn cached_entropy(&self, key: &[usize], compute: impl FnOnce() -> f64) -> f64 {
        if let Some(h) = self.entropies.read().expect("cache lock").get(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return *h;
        }
        let h = compute();
        self.misses.fetch_add(1, Ordering::Relaxed);
        *self
            .entropies
            .write()
            .expect("cache lock")
            .entry(key.to_vec())
            .or_insert(h)
    }

    pub fn entropy(&self, subset: &[usize]) -> f64 {
        self.cached_entropy(subset, || self.codes(subset).entropy())
    }

    /// I(target; parents) with every subset histogram computed at most once.
    ///
    /// `parents` must be sorted and must not contain `target`.
    pub fn mutual_information(&self, target: usize, parents: &[usize]) -> f64 {
        if parents.is_empty() {
            return 0.0;
        }
        let h_x = self.entropy(&[target]);
        let h_p = self.entropy(parents);
        let mut joint: Vec<usize> = parents.to_vec();
        let pos = joint.partition_point(|&p| p < target);
        joint.insert(pos, target);
        let h_xp = self.cached_entropy(&joint, || self.codes(parents).entropy_with(&self.columns[target]));
        floor_mi(h_x + h_p - h_xp)
    }
}
