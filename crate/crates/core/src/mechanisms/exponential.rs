use rand::Rng;

use super::laplace::check_epsilon;
use crate::error::{Error, Result};

/// Selection probabilities of the exponential mechanism, `∝ exp(ε·score / 2Δ)`.
///
/// Without an epsilon the distribution is a point mass on the first maximal score.
pub fn selection_probabilities(scores: &[f64], sensitivity: f64, epsilon: Option<f64>) -> Result<Vec<f64>> {
    validate(scores, sensitivity, epsilon)?;
    let Some(eps) = epsilon else {
        let best = argmax(scores);
        return Ok((0..scores.len()).map(|i| if i == best { 1.0 } else { 0.0 }).collect());
    };
    let weights = weights(scores, sensitivity, eps);
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Index of the selected candidate. Consumes exactly one uniform draw when private.
pub fn exponential_select_index<R: Rng + ?Sized>(
    scores: &[f64],
    sensitivity: f64,
    epsilon: Option<f64>,
    rng: &mut R,
) -> Result<usize> {
    validate(scores, sensitivity, epsilon)?;
    let Some(eps) = epsilon else {
        return Ok(argmax(scores));
    };
    let weights = weights(scores, sensitivity, eps);
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return Ok(i);
        }
        u -= w;
    }
    // Only reachable through rounding in the running subtraction.
    Ok(weights.iter().rposition(|w| *w > 0.0).unwrap_or(0))
}

/// Picks one of `candidates` with the exponential mechanism over `scores`.
pub fn exponential_select<'a, T, R: Rng + ?Sized>(
    candidates: &'a [T],
    scores: &[f64],
    sensitivity: f64,
    epsilon: Option<f64>,
    rng: &mut R,
) -> Result<&'a T> {
    if candidates.len() != scores.len() {
        return Err(Error::InvalidMechanism(format!(
            "{} candidates but {} scores",
            candidates.len(),
            scores.len()
        )));
    }
    let i = exponential_select_index(scores, sensitivity, epsilon, rng)?;
    Ok(&candidates[i])
}

fn validate(scores: &[f64], sensitivity: f64, epsilon: Option<f64>) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidMechanism("scores must be finite".into()));
    }
    if !(sensitivity.is_finite() && sensitivity > 0.0) {
        return Err(Error::InvalidMechanism(format!(
            "sensitivity must be positive, got {sensitivity}"
        )));
    }
    if let Some(eps) = epsilon {
        check_epsilon(eps)?;
    }
    Ok(())
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

// Shifted by the maximum so the largest weight is exactly 1.
fn weights(scores: &[f64], sensitivity: f64, epsilon: f64) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .map(|s| (epsilon * (s - max) / (2.0 * sensitivity)).exp())
        .collect()
}
