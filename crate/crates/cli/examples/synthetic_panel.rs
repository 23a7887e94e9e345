//! Writes the bundled synthetic 17-entity yield panel to stdout.
//!
//! `cargo run -p corrnet-cli --example synthetic_panel > crates/cli/tests/fixtures/synthetic_panel.csv`

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const ENTITIES: [(&str, f64, Group); 17] = [
    ("Austria", 0.45, Group::Core),
    ("Belgium", 0.70, Group::Core),
    ("Czech", 1.90, Group::Other),
    ("France", 0.60, Group::Core),
    ("Germany", 0.10, Group::Other),
    ("Greece", 3.90, Group::Periphery),
    ("Hungary", 2.50, Group::Other),
    ("Iceland", 4.60, Group::Other),
    ("Ireland", 0.85, Group::Periphery),
    ("Italy", 2.70, Group::Periphery),
    ("Netherlands", 0.35, Group::Core),
    ("Poland", 2.80, Group::Other),
    ("Portugal", 1.60, Group::Periphery),
    ("Romania", 4.50, Group::Other),
    ("Spain", 1.40, Group::Periphery),
    ("Switzerland", -0.20, Group::Other),
    ("UK", 1.25, Group::Other),
];

#[derive(Clone, Copy, PartialEq)]
enum Group {
    Core,
    Periphery,
    Other,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    let mut dates = Vec::new();
    let mut d = NaiveDate::from_ymd_opt(2019, 1, 2).unwrap();
    while dates.len() < 300 {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            dates.push(d);
        }
        d = d.succ_opt().unwrap();
    }
    let mut level: Vec<f64> = ENTITIES.iter().map(|e| e.1).collect();
    let loadings: Vec<f64> = (0..ENTITIES.len())
        .map(|_| 0.6 + 0.8 * rng.random::<f64>())
        .collect();
    let mut rows = Vec::new();
    for t in 0..dates.len() {
        let vol = if (150..200).contains(&t) { 2.5 } else { 1.0 };
        let common = 0.03 * vol * normal(&mut rng);
        let core = 0.015 * vol * normal(&mut rng);
        let periphery = 0.04 * vol * normal(&mut rng);
        let mut row = Vec::with_capacity(ENTITIES.len());
        for (k, (_, _, group)) in ENTITIES.iter().enumerate() {
            let g = match group {
                Group::Core => core,
                Group::Periphery => periphery,
                Group::Other => 0.0,
            };
            level[k] += loadings[k] * common + g + 0.012 * vol * normal(&mut rng);
            row.push(level[k]);
        }
        rows.push(row);
    }
    let missing = [(50, 6), (120, 8), (121, 8), (233, 15)];
    print!("date");
    for (name, _, _) in ENTITIES {
        print!(",{name}");
    }
    println!();
    for (t, row) in rows.iter().enumerate() {
        print!("{}", dates[t]);
        for (k, v) in row.iter().enumerate() {
            if missing.contains(&(t, k)) {
                print!(",");
            } else {
                print!(",{v:.3}");
            }
        }
        println!();
    }
}
