use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::laplace::check_epsilon;
use crate::error::{Error, Result};

/// Total privacy budget. `None` runs every mechanism in its exact, non-private form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrivacyBudget(Option<f64>);

impl PrivacyBudget {
    pub fn new(epsilon: Option<f64>) -> Result<Self> {
        if let Some(eps) = epsilon {
            check_epsilon(eps)?;
        }
        Ok(Self(epsilon))
    }

    pub fn epsilon(eps: f64) -> Result<Self> {
        Self::new(Some(eps))
    }

    pub fn non_private() -> Self {
        Self(None)
    }

    pub fn get(&self) -> Option<f64> {
        self.0
    }

    pub fn is_private(&self) -> bool {
        self.0.is_some()
    }
}

/// User allocation of the budget, e.g. `{"dependency": 0.3, "methods": {"age": 1, "sex": 2}}`.
///
/// `dependency` is the fraction of the total spent on structure inference; `methods`
/// are relative weights over the remaining budget. Columns absent from `methods` weigh 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSplit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependency: Option<f64>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub methods: IndexMap<String, f64>,
}

/// Exact fraction of the total budget.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Share(BigRational);

impl Share {
    pub fn zero() -> Self {
        Share(BigRational::zero())
    }

    pub fn one() -> Self {
        Share(BigRational::one())
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Share)
    }

    /// Splits this share into `parts` equal pieces.
    pub fn divide(&self, parts: usize) -> Share {
        Share(&self.0 / BigRational::from_integer(BigInt::from(parts)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Epsilon this share amounts to out of `total`.
    pub fn of(&self, total: f64) -> f64 {
        total * self.to_f64()
    }
}

impl fmt::Display for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Share {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Share {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let (n, den) = text
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom("share must look like n/d"))?;
        let n: BigInt = n.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = den.parse().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Share(BigRational::new(n, den)))
    }
}

impl std::ops::Add<&Share> for &Share {
    type Output = Share;

    fn add(self, rhs: &Share) -> Share {
        Share(&self.0 + &rhs.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub epsilon: f64,
    pub share: Share,
}

/// Ordered record of every budget charge made during a fit.
///
/// Charges are stored as exact fractions of the total so that a completed fit sums to
/// the configured epsilon with no floating-point drift.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BudgetLedger {
    total: Option<f64>,
    entries: Vec<LedgerEntry>,
}

impl BudgetLedger {
    pub fn new(total: PrivacyBudget) -> Self {
        Self {
            total: total.get(),
            entries: Vec::new(),
        }
    }

    pub fn total_budget(&self) -> Option<f64> {
        self.total
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Records a charge. Fails if it would overdraw the total.
    pub fn charge(&mut self, label: impl Into<String>, share: &Share) -> Result<f64> {
        let Some(total) = self.total else {
            return Err(Error::InvalidMechanism("cannot charge a non-private ledger".into()));
        };
        let after = &self.spent_share() + share;
        if after > Share::one() {
            return Err(Error::InvalidMechanism(format!("charge {share} overdraws the budget")));
        }
        let epsilon = share.of(total);
        self.entries.push(LedgerEntry {
            label: label.into(),
            epsilon,
            share: share.clone(),
        });
        Ok(epsilon)
    }

    pub fn spent_share(&self) -> Share {
        self.entries.iter().fold(Share::zero(), |acc, e| &acc + &e.share)
    }

    /// Total epsilon spent; equals the configured total exactly once every share is charged.
    pub fn spent(&self) -> f64 {
        match self.total {
            Some(total) => self.spent_share().of(total),
            None => 0.0,
        }
    }

    pub fn is_complete(&self) -> bool {
        match self.total {
            Some(_) => self.spent_share() == Share::one(),
            None => self.entries.is_empty(),
        }
    }
}

/// Output of [`allocate_budget`]: per-step shares and the matching epsilons.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    budget: PrivacyBudget,
    dependency: Option<Share>,
    columns: IndexMap<String, Share>,
}

impl Allocation {
    pub fn budget(&self) -> PrivacyBudget {
        self.budget
    }

    /// Epsilon for the dependency step; `None` in non-private mode or when it spends nothing.
    pub fn dependency_epsilon(&self) -> Option<f64> {
        let total = self.budget.get()?;
        self.dependency.as_ref().map(|s| s.of(total))
    }

    pub fn dependency_share(&self) -> Option<&Share> {
        self.dependency.as_ref()
    }

    pub fn column_epsilon(&self, column: &str) -> Option<f64> {
        let total = self.budget.get()?;
        self.columns.get(column).map(|s| s.of(total))
    }

    pub fn column_share(&self, column: &str) -> Option<&Share> {
        self.columns.get(column)
    }

    /// Per-column epsilon map in column order (all `None` in non-private mode).
    pub fn column_epsilons(&self) -> IndexMap<String, Option<f64>> {
        self.columns
            .keys()
            .map(|c| (c.clone(), self.column_epsilon(c)))
            .collect()
    }

    pub fn ledger(&self) -> BudgetLedger {
        BudgetLedger::new(self.budget)
    }
}

/// Fraction of the budget given to dependency inference when no split says otherwise.
pub const DEFAULT_DEPENDENCY_SHARE: f64 = 0.5;

/// Splits the total budget between the dependency step and per-column methods.
///
/// Defaults: half to the dependency step when it consumes budget, the rest equally
/// across columns (sequential composition). An explicit split overrides either part.
pub fn allocate_budget(
    total: PrivacyBudget,
    split: Option<&BudgetSplit>,
    columns: &[String],
    dependency_consumes: bool,
) -> Result<Allocation> {
    if columns.is_empty() {
        return Err(Error::InvalidSplit("no columns to allocate budget to".into()));
    }
    let empty = BudgetSplit::default();
    let split = split.unwrap_or(&empty);
    for name in split.methods.keys() {
        if !columns.contains(name) {
            return Err(Error::InvalidSplit(format!("unknown column \"{name}\"")));
        }
    }
    for (name, w) in &split.methods {
        if !(w.is_finite() && *w > 0.0) {
            return Err(Error::InvalidSplit(format!(
                "weight for \"{name}\" must be positive, got {w}"
            )));
        }
    }
    let dependency = if dependency_consumes {
        let frac = split.dependency.unwrap_or(DEFAULT_DEPENDENCY_SHARE);
        if !(frac > 0.0 && frac < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "dependency share must lie strictly between 0 and 1, got {frac}"
            )));
        }
        Some(Share::from_f64(frac).expect("finite"))
    } else {
        match split.dependency {
            None => None,
            Some(0.0) => None,
            Some(d) => {
                return Err(Error::InvalidSplit(format!(
                    "dependency share {d} given but this dependency mode spends no budget"
                )))
            }
        }
    };
    let remaining = match &dependency {
        Some(d) => Share(BigRational::one() - &d.0),
        None => Share::one(),
    };
    let weights: Vec<BigRational> = columns
        .iter()
        .map(|c| {
            let w = split.methods.get(c).copied().unwrap_or(1.0);
            BigRational::from_float(w).expect("finite")
        })
        .collect();
    let weight_sum = weights.iter().fold(BigRational::zero(), |acc, w| acc + w);
    let shares = columns
        .iter()
        .zip(weights)
        .map(|(c, w)| (c.clone(), Share(&remaining.0 * w / &weight_sum)))
        .collect();
    Ok(Allocation {
        budget: total,
        dependency,
        columns: shares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn equal_division_without_dependency() {
        let a = allocate_budget(PrivacyBudget::epsilon(1.0).unwrap(), None, &names(5), false).unwrap();
        assert_eq!(a.dependency_epsilon(), None);
        for c in names(5) {
            assert!((a.column_epsilon(&c).unwrap() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn default_half_to_dependency() {
        let a = allocate_budget(PrivacyBudget::epsilon(1.0).unwrap(), None, &names(4), true).unwrap();
        assert_eq!(a.dependency_epsilon(), Some(0.5));
        for c in names(4) {
            assert_eq!(a.column_epsilon(&c), Some(0.125));
        }
    }

    #[test]
    fn non_private_allocates_nothing() {
        let a = allocate_budget(PrivacyBudget::non_private(), None, &names(3), true).unwrap();
        assert_eq!(a.dependency_epsilon(), None);
        assert!(a.column_epsilons().values().all(Option::is_none));
        assert!(a.ledger().is_complete());
    }

    #[test]
    fn explicit_split_weights() {
        let split: BudgetSplit =
            serde_json::from_str(r#"{"dependency": 0.3, "methods": {"age": 1, "sex": 2}}"#).unwrap();
        let cols = vec!["age".to_string(), "sex".to_string()];
        let a = allocate_budget(PrivacyBudget::epsilon(3.0).unwrap(), Some(&split), &cols, true).unwrap();
        assert!((a.dependency_epsilon().unwrap() - 0.9).abs() < 1e-12);
        assert!((a.column_epsilon("age").unwrap() - 0.7).abs() < 1e-12);
        assert!((a.column_epsilon("sex").unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn split_errors() {
        let cols = names(2);
        let eps = PrivacyBudget::epsilon(1.0).unwrap();
        let unknown = BudgetSplit {
            dependency: None,
            methods: [("zzz".to_string(), 1.0)].into_iter().collect(),
        };
        assert!(matches!(
            allocate_budget(eps, Some(&unknown), &cols, false),
            Err(Error::InvalidSplit(_))
        ));
        let dep = BudgetSplit {
            dependency: Some(0.4),
            methods: IndexMap::new(),
        };
        assert!(matches!(
            allocate_budget(eps, Some(&dep), &cols, false),
            Err(Error::InvalidSplit(_))
        ));
        let full = BudgetSplit {
            dependency: Some(1.0),
            methods: IndexMap::new(),
        };
        assert!(allocate_budget(eps, Some(&full), &cols, true).is_err());
    }

    #[test]
    fn ledger_sums_exactly() {
        for &eps in &[0.01, 0.3, 1.0, 7.0, 1000.0] {
            for k in 1..9 {
                let cols = names(k);
                let a = allocate_budget(PrivacyBudget::epsilon(eps).unwrap(), None, &cols, k > 1).unwrap();
                let mut ledger = a.ledger();
                if let Some(d) = a.dependency_share() {
                    let per = d.divide(k - 1);
                    for i in 0..k - 1 {
                        ledger.charge(format!("dependency/{i}"), &per).unwrap();
                    }
                }
                for c in &cols {
                    ledger.charge(c.clone(), a.column_share(c).unwrap()).unwrap();
                }
                assert!(ledger.is_complete());
                assert_eq!(ledger.spent(), eps);
            }
        }
    }

    #[test]
    fn overdraw_rejected() {
        let mut ledger = BudgetLedger::new(PrivacyBudget::epsilon(1.0).unwrap());
        ledger.charge("a", &Share::one()).unwrap();
        assert!(ledger.charge("b", &Share::one().divide(1000)).is_err());
    }

    #[test]
    fn share_serde_round_trip() {
        let s = Share::one().divide(7);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, "\"1/7\"");
        let back: Share = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
