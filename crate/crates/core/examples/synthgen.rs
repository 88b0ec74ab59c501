//! Writes a synthetic DREBIN-shaped CSV for manual harness experiments.

use std::path::PathBuf;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let out = args
        .get(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("synthetic-215.csv"));
    let informative: Vec<usize> = (0..215).step_by(5).collect();
    let d = abc_select::dataset::generate_synthetic(3799, 215, &informative, 0.15, 99).unwrap();
    abc_select::dataset::write_csv(&d, &out, "class").unwrap();
    println!(
        "wrote {}: {} samples x {} features, {} positive",
        out.display(),
        d.n_samples(),
        d.n_features(),
        d.class_counts().1
    );
}
