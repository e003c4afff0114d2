use std::collections::HashMap;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::encoding::{check_lengths, check_parent_columns, ColumnMeta, FeatureEncoder, FitColumn};
use crate::data::{Column, Discretizer};
use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 0.01;

/// Multinomial logistic model over the target's bound categories.
///
/// `weights[c]` holds the intercept followed by the encoded features. A model fitted on a
/// single observed class keeps no weights and always returns `constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub target: ColumnMeta,
    pub parents: Vec<ColumnMeta>,
    pub classes: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
}

fn mismatch(meta: &ColumnMeta) -> Error {
    Error::MethodTypeMismatch {
        column: meta.name.clone(),
        method: "logistic_regression".into(),
        ty: meta.ty.name().into(),
    }
}

/// Encodes a row with a leading intercept and scales it to L2 norm at most 1.
fn features(encoder: &FeatureEncoder, columns: &[&Column], r: usize, buf: &mut [f64]) -> Result<()> {
    buf[0] = 1.0;
    encoder.encode(columns, r, &mut buf[1..])?;
    let norm = buf.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        buf.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(())
}

fn softmax_into(logits: &mut [f64]) {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - m).exp();
        s += *l;
    }
    logits.iter_mut().for_each(|l| *l /= s);
}

struct Objective {
    rows: Vec<(Vec<f64>, usize, f64)>,
    n: f64,
    classes: usize,
    dim: usize,
    lambda: f64,
}

impl Objective {
    fn eval(&self, w: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let (c, d) = (self.classes, self.dim);
        let mut loss = 0.0;
        let mut g = vec![0.0; c * d];
        let mut logits = vec![0.0; c];
        for (x, y, weight) in &self.rows {
            for (k, l) in logits.iter_mut().enumerate() {
                *l = w[k * d..(k + 1) * d].iter().zip(x).map(|(a, b)| a * b).sum();
            }
            let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + logits.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
            loss += weight * (lse - logits[*y]);
            for k in 0..c {
                let p = (logits[k] - lse).exp() - if k == *y { 1.0 } else { 0.0 };
                for (gj, xj) in g[k * d..(k + 1) * d].iter_mut().zip(x) {
                    *gj += weight * p * xj;
                }
            }
        }
        let reg: f64 = w.iter().map(|v| v * v).sum::<f64>() * self.lambda / 2.0;
        if let Some(out) = grad {
            for ((o, gi), wi) in out.iter_mut().zip(&g).zip(w) {
                *o = gi / self.n + self.lambda * wi;
            }
        }
        loss / self.n + reg
    }
}

impl CostFunction for Objective {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, w: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.eval(w, None))
    }
}

impl Gradient for Objective {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, w: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let mut g = vec![0.0; w.len()];
        self.eval(w, Some(&mut g));
        Ok(g)
    }
}

fn minimize(objective: Objective) -> Result<Vec<f64>> {
    let x0 = vec![0.0; objective.classes * objective.dim];
    let fail = |e: argmin::core::Error| Error::InvalidArgument(format!("logistic fit failed: {e}"));
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), 10)
        .with_tolerance_grad(1e-9)
        .map_err(fail)?
        .with_tolerance_cost(1e-15)
        .map_err(fail)?;
    let res = Executor::new(objective, solver)
        .configure(|s| s.param(x0).max_iters(1000))
        .run()
        .map_err(fail)?;
    res.state()
        .get_best_param()
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("logistic fit produced no parameters".into()))
}

/// Regularized multinomial logistic regression with output perturbation.
///
/// With ε each class's weight vector gets a noise vector of L2 norm drawn from
/// Gamma(d, 2/(n·λ·ε/C)) and uniform direction.
pub fn fit_logistic<R: Rng + ?Sized>(
    target: &FitColumn<'_>,
    parents: &[FitColumn<'_>],
    epsilon: Option<f64>,
    lambda: f64,
    rng: &mut R,
) -> Result<LogisticModel> {
    let n = check_lengths(target, parents)?;
    let target_meta = target.meta();
    let classes = target_meta
        .bounds
        .categories()
        .ok_or_else(|| mismatch(&target_meta))?
        .to_vec();
    let labels = target.values.as_categorical().ok_or_else(|| mismatch(&target_meta))?;
    let disc = target_meta.discretizer(1)?;
    let ys = labels
        .iter()
        .map(|l| disc.bin_of_label(l).map(|b| b as usize))
        .collect::<Result<Vec<_>>>()?;
    let parent_meta: Vec<ColumnMeta> = parents.iter().map(FitColumn::meta).collect();

    let first = ys[0];
    if ys.iter().all(|&y| y == first) {
        return Ok(LogisticModel {
            target: target_meta,
            parents: parent_meta,
            constant: Some(classes[first].clone()),
            classes,
            weights: Vec::new(),
        });
    }

    let encoder = FeatureEncoder::new(&parent_meta)?;
    let dim = encoder.width() + 1;
    let columns: Vec<&Column> = parents.iter().map(|p| p.values).collect();
    let mut buf = vec![0.0; dim];
    let mut index: HashMap<(Vec<u64>, usize), usize> = HashMap::new();
    let mut rows: Vec<(Vec<f64>, usize, f64)> = Vec::new();
    for (r, &y) in ys.iter().enumerate() {
        features(&encoder, &columns, r, &mut buf)?;
        let key = (buf.iter().map(|v| v.to_bits()).collect(), y);
        match index.get(&key) {
            Some(&i) => rows[i].2 += 1.0,
            None => {
                index.insert(key, rows.len());
                rows.push((buf.clone(), y, 1.0));
            }
        }
    }
    let c = classes.len();
    let w = minimize(Objective {
        rows,
        n: n as f64,
        classes: c,
        dim,
        lambda,
    })?;
    let mut weights: Vec<Vec<f64>> = w.chunks(dim).map(<[f64]>::to_vec).collect();
    if let Some(eps) = epsilon {
        crate::mechanisms::check_epsilon(eps)?;
        let eps_c = eps / c as f64;
        let gamma = Gamma::new(dim as f64, 2.0 / (n as f64 * lambda * eps_c))
            .map_err(|e| Error::InvalidMechanism(format!("noise norm: {e}")))?;
        for wc in weights.iter_mut() {
            let norm = gamma.sample(rng);
            let dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (wi, di) in wc.iter_mut().zip(&dir) {
                *wi += norm * di / len;
            }
        }
    }
    Ok(LogisticModel {
        target: target_meta,
        parents: parent_meta,
        classes,
        weights,
        constant: None,
    })
}

impl LogisticModel {
    /// Class probabilities per row, in the order of `classes`.
    pub fn predict_proba(&self, parents: &[&Column], n: usize) -> Result<Vec<Vec<f64>>> {
        check_parent_columns(&self.parents, parents, n)?;
        if let Some(label) = &self.constant {
            let mut p = vec![0.0; self.classes.len()];
            if let Some(i) = self.classes.iter().position(|c| c == label) {
                p[i] = 1.0;
            }
            return Ok(vec![p; n]);
        }
        let encoder = FeatureEncoder::new(&self.parents)?;
        let mut buf = vec![0.0; encoder.width() + 1];
        let mut out = Vec::with_capacity(n);
        for r in 0..n {
            features(&encoder, parents, r, &mut buf)?;
            let mut logits: Vec<f64> = self
                .weights
                .iter()
                .map(|w| w.iter().zip(&buf).map(|(a, b)| a * b).sum())
                .collect();
            softmax_into(&mut logits);
            out.push(logits);
        }
        Ok(out)
    }

    pub fn sample<R: Rng + ?Sized>(&self, parents: &[&Column], n: usize, rng: &mut R) -> Result<Column> {
        if let Some(label) = &self.constant {
            check_parent_columns(&self.parents, parents, n)?;
            return Ok(Column::Categorical(vec![label.clone(); n]));
        }
        let probs = self.predict_proba(parents, n)?;
        let out = probs
            .iter()
            .map(|p| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = p.len() - 1;
                for (i, q) in p.iter().enumerate() {
                    acc += q;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                self.classes[pick].clone()
            })
            .collect();
        Ok(Column::Categorical(out))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let disc: Discretizer = self.target.discretizer(1)?;
        let bad = || Error::MalformedModel(format!("logistic model for \"{}\" is malformed", self.target.name));
        if disc.n_bins() != self.classes.len() {
            return Err(bad());
        }
        match &self.constant {
            Some(label) if self.classes.contains(label) && self.weights.is_empty() => Ok(()),
            Some(_) => Err(bad()),
            None => {
                let dim = FeatureEncoder::new(&self.parents)?.width() + 1;
                let ok = self.weights.len() == self.classes.len()
                    && self
                        .weights
                        .iter()
                        .all(|w| w.len() == dim && w.iter().all(|v| v.is_finite()));
                if ok {
                    Ok(())
                } else {
                    Err(bad())
                }
            }
        }
    }
}
