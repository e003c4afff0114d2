use crate::data::{Bounds, Column, ColumnBounds, Discretizer, Table};
use crate::error::{Error, Result};

fn frequencies(d: &Discretizer, column: &Column) -> Result<Vec<f64>> {
    let bins = d.discretize(column)?.bins;
    let mut counts = vec![0.0; d.n_bins()];
    for b in &bins {
        counts[*b as usize] += 1.0;
    }
    let n = bins.len().max(1) as f64;
    Ok(counts.into_iter().map(|c| c / n).collect())
}

/// Mean over columns of `1 − TV(real, synth)` on the discretized marginals.
pub fn marginal_similarity(real: &Table, synth: &Table, bounds: &Bounds, n_bins: usize) -> Result<f64> {
    if real.schema() != synth.schema() {
        return Err(Error::InvalidArgument("tables have different schemas".into()));
    }
    let mut total = 0.0;
    for (i, def) in real.schema().columns().iter().enumerate() {
        let d = Discretizer::new(&def.name, def.ty, bounds.require(&def.name)?, n_bins)?;
        let p = frequencies(&d, &real.columns()[i])?;
        let q = frequencies(&d, &synth.columns()[i])?;
        let tv: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
        total += 1.0 - tv;
    }
    Ok(total / real.schema().len() as f64)
}

/// Bounds covering both tables: `given` where present, otherwise the observed range or
/// the union of observed labels.
pub fn covering_bounds(tables: &[&Table], given: &Bounds) -> Result<Bounds> {
    let first = tables
        .first()
        .ok_or_else(|| Error::InvalidArgument("no tables".into()))?;
    let mut out = Bounds::new();
    for (i, def) in first.schema().columns().iter().enumerate() {
        if let Some(b) = given.get(&def.name) {
            out.insert(&def.name, b.clone());
            continue;
        }
        let b = match &first.columns()[i] {
            Column::Numeric(_) => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for t in tables {
                    for v in t.columns()[i].as_numeric().unwrap_or(&[]) {
                        lo = lo.min(*v);
                        hi = hi.max(*v);
                    }
                }
                if lo == hi {
                    ColumnBounds::numeric(&def.name, lo - 0.5, hi + 0.5)?
                } else {
                    ColumnBounds::numeric(&def.name, lo, hi)?
                }
            }
            Column::Categorical(_) => {
                let mut labels: Vec<String> = tables
                    .iter()
                    .flat_map(|t| t.columns()[i].as_categorical().unwrap_or(&[]).iter().cloned())
                    .collect();
                labels.sort();
                labels.dedup();
                ColumnBounds::categorical(&def.name, labels)?
            }
        };
        out.insert(&def.name, b);
    }
    Ok(out)
}
