use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encoding::{check_lengths, check_parent_columns, ColumnMeta, FitColumn};
use crate::data::{BinEdges, Column, Discretizer};
use crate::error::{Error, Result};
use crate::mechanisms::laplace_noise;

/// Hard cap on the number of cells of a dense conditional histogram.
pub const DEFAULT_CELL_CAP: u64 = 10_000_000;

/// Noisy histogram of the target's bins for every joint configuration of its parents.
///
/// `probs[c]` is the distribution of target bins given parent configuration `c`, where
/// `c` is the mixed-radix index of the parents' bins with the first parent most
/// significant. With no parents there is a single slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable {
    pub target: ColumnMeta,
    pub parents: Vec<ColumnMeta>,
    pub n_bins: usize,
    pub probs: Vec<Vec<f64>>,
}

fn discretizers(t: &ConditionalTable) -> Result<(Discretizer, Vec<Discretizer>)> {
    let target = t.target.discretizer(t.n_bins)?;
    let parents = t
        .parents
        .iter()
        .map(|p| p.discretizer(t.n_bins))
        .collect::<Result<Vec<_>>>()?;
    Ok((target, parents))
}

fn bins_of(d: &Discretizer, column: &Column) -> Result<Vec<u32>> {
    Ok(d.discretize(column)?.bins)
}

fn slice_index(parent_bins: &[Vec<u32>], radices: &[usize], r: usize) -> usize {
    parent_bins
        .iter()
        .zip(radices)
        .fold(0, |acc, (bins, &k)| acc * k + bins[r] as usize)
}

/// Fits `P(target | parents)` from a dense joint histogram, adding Laplace(1/ε) noise to
/// every cell (sensitivity 1), clipping negatives and normalizing each slice.
/// Slices whose noisy mass is zero become uniform.
pub fn fit_conditional<R: Rng + ?Sized>(
    target: &FitColumn<'_>,
    parents: &[FitColumn<'_>],
    epsilon: Option<f64>,
    n_bins: usize,
    cell_cap: u64,
    rng: &mut R,
) -> Result<ConditionalTable> {
    let n = check_lengths(target, parents)?;
    let target_meta = target.meta();
    let parent_meta: Vec<ColumnMeta> = parents.iter().map(FitColumn::meta).collect();
    let t_disc = target_meta.discretizer(n_bins)?;
    let p_disc = parent_meta
        .iter()
        .map(|p| p.discretizer(n_bins))
        .collect::<Result<Vec<_>>>()?;
    let k = t_disc.n_bins();
    let radices: Vec<usize> = p_disc.iter().map(Discretizer::n_bins).collect();
    let cells = radices.iter().fold(k as u128, |acc, &r| acc.saturating_mul(r as u128));
    if cells > cell_cap as u128 {
        return Err(Error::HistogramTooLarge {
            column: target.name.to_string(),
            cells,
            cap: cell_cap,
        });
    }
    let n_slices = cells as usize / k;

    let t_bins = bins_of(&t_disc, target.values)?;
    let p_bins = p_disc
        .iter()
        .zip(parents)
        .map(|(d, p)| bins_of(d, p.values))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![0.0f64; cells as usize];
    for (r, &b) in t_bins.iter().enumerate().take(n) {
        counts[slice_index(&p_bins, &radices, r) * k + b as usize] += 1.0;
    }
    if epsilon.is_some() {
        for c in counts.iter_mut() {
            *c = laplace_noise(*c, 1.0, epsilon, rng)?;
        }
    }
    let probs = counts
        .chunks(k)
        .map(|slice| {
            let clipped: Vec<f64> = slice.iter().map(|&c| c.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            if total > 0.0 && total.is_finite() {
                clipped.iter().map(|c| c / total).collect()
            } else {
                vec![1.0 / k as f64; k]
            }
        })
        .collect::<Vec<Vec<f64>>>();
    debug_assert_eq!(probs.len(), n_slices);
    Ok(ConditionalTable {
        target: target_meta,
        parents: parent_meta,
        n_bins,
        probs,
    })
}

fn draw_bin<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> u32 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u32;
        }
    }
    // Rounding left u above the running sum; take the last bin with mass.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1) as u32
}

impl ConditionalTable {
    pub fn sample<R: Rng + ?Sized>(&self, parents: &[&Column], n: usize, rng: &mut R) -> Result<Column> {
        check_parent_columns(&self.parents, parents, n)?;
        let (t_disc, p_disc) = discretizers(self)?;
        let radices: Vec<usize> = p_disc.iter().map(Discretizer::n_bins).collect();
        let p_bins = p_disc
            .iter()
            .zip(parents)
            .map(|(d, c)| bins_of(d, c))
            .collect::<Result<Vec<_>>>()?;
        match t_disc.edges() {
            BinEdges::Categorical(labels) => {
                let mut out = Vec::with_capacity(n);
                for r in 0..n {
                    let slice = &self.probs[slice_index(&p_bins, &radices, r)];
                    out.push(labels[draw_bin(slice, rng) as usize].clone());
                }
                Ok(Column::Categorical(out))
            }
            BinEdges::Numeric(_) => {
                let mut out = Vec::with_capacity(n);
                for r in 0..n {
                    let slice = &self.probs[slice_index(&p_bins, &radices, r)];
                    let b = draw_bin(slice, rng);
                    out.push(t_disc.undiscretize_numeric(b, rng));
                }
                Ok(Column::Numeric(out))
            }
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let (t, ps) = discretizers(self)?;
        let slices: usize = ps.iter().map(Discretizer::n_bins).product();
        let ok = self.probs.len() == slices
            && self.probs.iter().all(|s| {
                s.len() == t.n_bins()
                    && s.iter().all(|p| p.is_finite() && *p >= 0.0)
                    && (s.iter().sum::<f64>() - 1.0).abs() < 1e-6
            });
        if ok {
            Ok(())
        } else {
            Err(Error::MalformedModel(format!(
                "conditional table for \"{}\" has the wrong shape",
                self.target.name
            )))
        }
    }
}
