#![allow(dead_code)]

use dpart::data::{Bounds, Column, ColumnBounds, ColumnType, Schema, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const COLORS: [&str; 3] = ["red", "green", "blue"];
pub const SIZES: [&str; 2] = ["small", "large"];

/// Mixed table: two numerical columns and two categorical ones, with some dependence.
pub fn mixed_table(n: usize, seed: u64) -> Table {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut age = Vec::with_capacity(n);
    let mut income = Vec::with_capacity(n);
    let mut color = Vec::with_capacity(n);
    let mut size = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.random_range(18..=80) as f64;
        let c = COLORS[rng.random_range(0..3)];
        let s = if a > 45.0 && rng.random::<f64>() < 0.8 {
            "large"
        } else {
            SIZES[rng.random_range(0..2)]
        };
        let inc = (a * 1000.0 + rng.random_range(-5000.0..5000.0)).clamp(0.0, 100_000.0);
        age.push(a);
        income.push(inc);
        color.push(c.to_string());
        size.push(s.to_string());
    }
    Table::new(
        mixed_schema(),
        vec![
            Column::Numeric(age),
            Column::Numeric(income),
            Column::Categorical(color),
            Column::Categorical(size),
        ],
    )
    .unwrap()
}

pub fn mixed_schema() -> Schema {
    Schema::from_pairs([
        ("age", ColumnType::Integer),
        ("income", ColumnType::Float),
        ("color", ColumnType::Category),
        ("size", ColumnType::Category),
    ])
    .unwrap()
}

pub fn mixed_bounds() -> Bounds {
    Bounds::new()
        .with("age", ColumnBounds::numeric("age", 0.0, 100.0).unwrap())
        .with("income", ColumnBounds::numeric("income", 0.0, 100_000.0).unwrap())
        .with(
            "color",
            ColumnBounds::categorical("color", COLORS.map(String::from).to_vec()).unwrap(),
        )
        .with(
            "size",
            ColumnBounds::categorical("size", SIZES.map(String::from).to_vec()).unwrap(),
        )
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
