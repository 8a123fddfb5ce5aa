#![allow(dead_code)]

use num_complex::Complex64;

pub struct OracleRow {
    pub eta: f64,
    pub w: Complex64,
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub deta: Complex64,
}

/// Rows of tests/data/kummer_oracle.txt for one `[section]`.
pub fn kummer_oracle(section: &str) -> Vec<OracleRow> {
    let text = include_str!("../data/kummer_oracle.txt");
    let mut current = String::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.to_string();
            continue;
        }
        if current != section {
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().expect("oracle number"))
            .collect();
        assert_eq!(v.len(), 11, "oracle row width");
        let c = |i: usize| Complex64::new(v[i], v[i + 1]);
        rows.push(OracleRow {
            eta: v[0],
            w: c(1),
            value: c(3),
            d1: c(5),
            d2: c(7),
            deta: c(9),
        });
    }
    assert!(!rows.is_empty(), "no oracle rows in [{section}]");
    rows
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
