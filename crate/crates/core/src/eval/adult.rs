//! Synthetic stand-in for the simplified Adult census table.
//!
//! Columns: age, education, marital-status, sex, hours-per-week, income. Marginals follow
//! the published Adult frequencies; the joint is a hand-built generative story (age drives
//! marital status and schooling, sex and age drive hours, income is logistic in all of them).

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Gamma, Normal};

use crate::data::{Bounds, Column, ColumnBounds, ColumnType, Schema, Table};

/// Row count of the full Adult table (train + test files).
pub const ADULT_ROWS: usize = 48_842;
pub const TARGET: &str = "income";

/// Education levels with their ordinal rank and marginal frequency.
pub const EDUCATION: [(&str, u32, f64); 16] = [
    ("Preschool", 1, 0.002),
    ("1st-4th", 2, 0.005),
    ("5th-6th", 3, 0.010),
    ("7th-8th", 4, 0.020),
    ("9th", 5, 0.016),
    ("10th", 6, 0.029),
    ("11th", 7, 0.037),
    ("12th", 8, 0.013),
    ("HS-grad", 9, 0.323),
    ("Some-college", 10, 0.222),
    ("Assoc-voc", 11, 0.042),
    ("Assoc-acdm", 12, 0.033),
    ("Bachelors", 13, 0.164),
    ("Masters", 14, 0.054),
    ("Prof-school", 15, 0.017),
    ("Doctorate", 16, 0.012),
];

pub const MARITAL: [&str; 7] = [
    "Married-civ-spouse",
    "Never-married",
    "Divorced",
    "Separated",
    "Widowed",
    "Married-spouse-absent",
    "Married-AF-spouse",
];

pub const SEX: [&str; 2] = ["Female", "Male"];
pub const INCOME: [&str; 2] = ["<=50K", ">50K"];

pub fn adult_schema() -> Schema {
    Schema::from_pairs([
        ("age", ColumnType::Integer),
        ("education", ColumnType::Category),
        ("marital-status", ColumnType::Category),
        ("sex", ColumnType::Category),
        ("hours-per-week", ColumnType::Integer),
        (TARGET, ColumnType::Category),
    ])
    .expect("static schema")
}

fn labels(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Public domain knowledge for every column (not read from data).
pub fn adult_bounds() -> Bounds {
    let cat = |name: &str, v: Vec<String>| ColumnBounds::categorical(name, v).expect("static bounds");
    Bounds::new()
        .with("age", ColumnBounds::numeric("age", 17.0, 90.0).expect("static bounds"))
        .with(
            "education",
            cat("education", EDUCATION.iter().map(|e| e.0.to_string()).collect()),
        )
        .with("marital-status", cat("marital-status", labels(&MARITAL)))
        .with("sex", cat("sex", labels(&SEX)))
        .with(
            "hours-per-week",
            ColumnBounds::numeric("hours-per-week", 1.0, 99.0).expect("static bounds"),
        )
        .with(TARGET, cat(TARGET, labels(&INCOME)))
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Draws `n` rows of the reconstruction.
pub fn adult_reconstruction(n: usize, seed: u64) -> Table {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let age_dist = Gamma::<f64>::new(2.2, 9.8).expect("valid gamma");
    let edu_dist = WeightedIndex::new(EDUCATION.iter().map(|e| e.2)).expect("valid weights");
    let noise = Normal::<f64>::new(0.0, 11.0).expect("valid normal");

    let mut age = Vec::with_capacity(n);
    let mut education = Vec::with_capacity(n);
    let mut marital = Vec::with_capacity(n);
    let mut sex = Vec::with_capacity(n);
    let mut hours = Vec::with_capacity(n);
    let mut income = Vec::with_capacity(n);
    for _ in 0..n {
        let a = (17.0 + age_dist.sample(&mut rng)).round().clamp(17.0, 90.0);
        let male = rng.random::<f64>() < 0.67;
        let mut e = edu_dist.sample(&mut rng);
        if a < 23.0 && e > 8 && rng.random::<f64>() < 0.85 {
            e = 8;
        }

        let p_never = logistic(-(a - 27.0) / 4.0) * 0.97 + 0.03;
        let m = if rng.random::<f64>() < p_never {
            1
        } else if rng.random::<f64>() < ((a - 50.0) / 40.0).clamp(0.0, 1.0) * if male { 0.1 } else { 0.35 } {
            4
        } else if rng.random::<f64>() < if male { 0.75 } else { 0.55 } {
            if rng.random::<f64>() < 0.003 {
                6
            } else {
                0
            }
        } else {
            let w: f64 = rng.random();
            if w < 0.72 {
                2
            } else if w < 0.88 {
                3
            } else {
                5
            }
        };

        let h = if rng.random::<f64>() < 0.45 {
            40.0
        } else {
            let mut mean: f64 = if male { 43.0 } else { 37.0 };
            if a < 25.0 {
                mean -= 8.0;
            }
            if a > 62.0 {
                mean -= 10.0;
            }
            (mean + noise.sample(&mut rng)).clamp(1.0, 99.0).round()
        };

        let married = if m == 0 || m == 6 { 1.0 } else { 0.0 };
        let z = -11.35
            + 3.2 * married
            + 0.55 * EDUCATION[e].1 as f64
            + 0.05 * (h - 40.0)
            + 0.05 * a.min(60.0)
            + if male { 0.3 } else { 0.0 };
        let rich = rng.random::<f64>() < logistic(z);

        age.push(a);
        education.push(EDUCATION[e].0.to_string());
        marital.push(MARITAL[m].to_string());
        sex.push(SEX[usize::from(male)].to_string());
        hours.push(h);
        income.push(INCOME[usize::from(rich)].to_string());
    }
    Table::new(
        adult_schema(),
        vec![
            Column::Numeric(age),
            Column::Categorical(education),
            Column::Categorical(marital),
            Column::Categorical(sex),
            Column::Numeric(hours),
            Column::Categorical(income),
        ],
    )
    .expect("generated rows conform")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_bounds() {
        let t = adult_reconstruction(5000, 1);
        assert_eq!(t.n_rows(), 5000);
        adult_bounds().check_table(&t).unwrap();
        let inc = t.column(TARGET).unwrap().as_categorical().unwrap();
        let pos = inc.iter().filter(|v| *v == ">50K").count() as f64 / 5000.0;
        assert!((0.19..0.29).contains(&pos), "{pos}");
    }

    #[test]
    fn seeded() {
        assert_eq!(adult_reconstruction(100, 3), adult_reconstruction(100, 3));
    }
}
