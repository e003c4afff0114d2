use serde::{Deserialize, Serialize};

use crate::data::{Column, Table};
use crate::error::{Error, Result};

/// Settings of the CART classifier used for downstream accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalClassifier {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for EvalClassifier {
    fn default() -> Self {
        Self {
            max_depth: 5,
            min_leaf: 10,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(usize),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
enum Encoding {
    Numeric,
    Ordinal(Vec<String>),
}

impl Encoding {
    fn encode(&self, col: &Column, r: usize) -> f64 {
        match (self, col) {
            (Encoding::Numeric, Column::Numeric(v)) => v[r],
            (Encoding::Ordinal(labels), Column::Categorical(v)) => match labels.binary_search(&v[r]) {
                Ok(i) => i as f64,
                // Unseen labels sit between their sorted neighbours.
                Err(i) => i as f64 - 0.5,
            },
            _ => f64::NAN,
        }
    }
}

/// Gini CART over every non-target column; categorical features use their rank
/// among the sorted training labels.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    features: Vec<(usize, Encoding)>,
    target: usize,
    classes: Vec<String>,
}

fn sum_sq_over(counts: &[usize], n: usize) -> f64 {
    counts.iter().map(|&c| (c * c) as f64).sum::<f64>() / n as f64
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    k: usize,
    cfg: EvalClassifier,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &r in rows {
            c[self.y[r]] += 1;
        }
        c
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&rows);
        let majority = counts
            .iter()
            .enumerate()
            .fold(0, |best, (i, &c)| if c > counts[best] { i } else { best });
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(majority));
        let n = rows.len();
        if depth >= self.cfg.max_depth || n < 2 * self.cfg.min_leaf.max(1) || counts[majority] == n {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&rows, &counts) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[feature][i] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    // Maximizes Σl²/nl + Σr²/nr, equivalent to minimizing weighted Gini. Features and
    // thresholds are scanned in increasing order and only a strict improvement replaces
    // the incumbent, so ties go to the lower feature, then the lower threshold.
    fn best_split(&self, rows: &[usize], counts: &[usize]) -> Option<(usize, f64)> {
        let n = rows.len();
        let min_leaf = self.cfg.min_leaf.max(1);
        let mut best_score = sum_sq_over(counts, n) + 1e-12;
        let mut best = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);
        for (f, xf) in self.x.iter().enumerate() {
            sorted.clear();
            sorted.extend(rows.iter().map(|&r| (xf[r], self.y[r])));
            sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut left = vec![0usize; self.k];
            let mut right = counts.to_vec();
            for i in 0..n - 1 {
                let c = sorted[i].1;
                left[c] += 1;
                right[c] -= 1;
                let nl = i + 1;
                if sorted[i].0 == sorted[i + 1].0 || nl < min_leaf || n - nl < min_leaf {
                    continue;
                }
                let score = sum_sq_over(&left, nl) + sum_sq_over(&right, n - nl);
                if score > best_score {
                    best_score = score;
                    best = Some((f, (sorted[i].0 + sorted[i + 1].0) / 2.0));
                }
            }
        }
        best
    }
}

impl DecisionTree {
    pub fn fit(train: &Table, target: &str, cfg: EvalClassifier) -> Result<Self> {
        let t = train.schema().require(target)?;
        let labels = train.columns()[t]
            .as_categorical()
            .ok_or_else(|| Error::InvalidArgument(format!("target \"{target}\" must be categorical")))?;
        let mut classes = labels.to_vec();
        classes.sort();
        classes.dedup();
        let y: Vec<usize> = labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label present"))
            .collect();
        let features: Vec<(usize, Encoding)> = train
            .columns()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != t)
            .map(|(i, c)| {
                let enc = match c {
                    Column::Numeric(_) => Encoding::Numeric,
                    Column::Categorical(v) => {
                        let mut l = v.clone();
                        l.sort();
                        l.dedup();
                        Encoding::Ordinal(l)
                    }
                };
                (i, enc)
            })
            .collect();
        let n = train.n_rows();
        let x: Vec<Vec<f64>> = features
            .iter()
            .map(|(i, enc)| (0..n).map(|r| enc.encode(&train.columns()[*i], r)).collect())
            .collect();
        let mut b = Builder {
            x: &x,
            y: &y,
            k: classes.len(),
            cfg,
            nodes: Vec::new(),
        };
        b.grow((0..n).collect(), 0);
        Ok(Self {
            nodes: b.nodes,
            features,
            target: t,
            classes,
        })
    }

    pub fn predict_row(&self, table: &Table, r: usize) -> &str {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(c) => return &self.classes[*c],
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let (col, enc) = &self.features[*feature];
                    at = if enc.encode(&table.columns()[*col], r) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn accuracy(&self, test: &Table) -> Result<f64> {
        let labels = test.columns()[self.target]
            .as_categorical()
            .ok_or_else(|| Error::InvalidArgument("target must be categorical".into()))?;
        if labels.is_empty() {
            return Err(Error::EmptyTable);
        }
        let hits = labels
            .iter()
            .enumerate()
            .filter(|(r, l)| self.predict_row(test, *r) == l.as_str())
            .count();
        Ok(hits as f64 / labels.len() as f64)
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Accuracy on `test` of a CART trained on `train`.
pub fn downstream_accuracy(train: &Table, test: &Table, target: &str, cfg: EvalClassifier) -> Result<f64> {
    test.schema().require(target)?;
    if train.schema() != test.schema() {
        return Err(Error::InvalidArgument(
            "train and test tables have different schemas".into(),
        ));
    }
    DecisionTree::fit(train, target, cfg)?.accuracy(test)
}
