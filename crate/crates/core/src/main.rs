//! Command-line experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use abc_select::classifier::EvaluatorKind;
use abc_select::harness::{emit_results, ExperimentConfig, ExperimentOutcome};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FitnessArg {
    Svm,
    Centroid,
}

impl From<FitnessArg> for EvaluatorKind {
    fn from(arg: FitnessArg) -> Self {
        match arg {
            FitnessArg::Svm => EvaluatorKind::Svm,
            FitnessArg::Centroid => EvaluatorKind::Centroid,
        }
    }
}

/// Feature selection by artificial bee colony search.
///
/// Runs one search over a cardinality window, or a sweep over fixed
/// subset sizes when --sweep is given, and writes results.json,
/// report.csv and (for sweeps) sweep.csv into the output directory.
#[derive(Parser, Debug)]
#[command(name = "abc-select", version)]
struct Cli {
    /// CSV dataset with a header row.
    #[arg(long)]
    data: PathBuf,

    /// Label column name, or a zero-based column index.
    #[arg(long = "label-col", default_value = "class")]
    label_col: String,

    /// Food sources (= employed bees).
    #[arg(long = "pop-size", default_value_t = 20)]
    pop_size: usize,

    /// Failed improvements a source survives before a scout replaces it.
    #[arg(long, default_value_t = 10)]
    limit: usize,

    /// Minimum subset cardinality (default 1).
    #[arg(long)]
    lower: Option<usize>,

    /// Maximum subset cardinality (default: all features).
    #[arg(long)]
    upper: Option<usize>,

    #[arg(long = "max-iter", default_value_t = 100)]
    max_iter: usize,

    /// Base RNG seed; sweeps derive per-size seeds as seed + size.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated subset sizes; presence switches to sweep mode.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,

    /// Classifier scoring each subset.
    #[arg(long, value_enum, default_value_t = FitnessArg::Svm)]
    fitness: FitnessArg,

    /// SVM regularization strength.
    #[arg(long = "svm-c", default_value_t = 1e-4)]
    svm_c: f64,

    #[arg(long = "svm-epochs", default_value_t = 30)]
    svm_epochs: usize,

    /// Train fraction of the fitness split.
    #[arg(long = "train-frac", default_value_t = 0.7)]
    train_frac: f64,

    /// Final holdout fraction, disjoint from all fitness data.
    #[arg(long = "test-frac", default_value_t = 0.2)]
    test_frac: f64,

    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Reference accuracy echoed into sweep.csv, e.g. a published
    /// full-feature baseline. Metadata only.
    #[arg(long = "baseline-accuracy")]
    baseline_accuracy: Option<f64>,
}

impl Cli {
    fn into_config(self, n_features: usize) -> ExperimentConfig {
        let mut config = ExperimentConfig::new(self.data, self.out);
        config.label_column = self.label_col;
        config.colony.population_size = self.pop_size;
        config.colony.limit = self.limit;
        config.colony.lower_bound = self.lower.unwrap_or(1);
        config.colony.upper_bound = self.upper.unwrap_or(n_features);
        config.colony.max_iterations = self.max_iter;
        config.protocol.evaluator = self.fitness.into();
        config.protocol.svm.regularization_strength = self.svm_c;
        config.protocol.svm.epochs = self.svm_epochs;
        config.protocol.split.train_fraction = self.train_frac;
        config.final_test_fraction = self.test_frac;
        config.sweep_sizes = self.sweep;
        config.baseline_accuracy = self.baseline_accuracy;
        config.with_seed(self.seed)
    }
}

fn execute(cli: Cli) -> abc_select::Result<()> {
    let dataset = abc_select::dataset::load_csv(&cli.data, &cli.label_col)?;
    println!(
        "loaded {} samples x {} features ({} positive)",
        dataset.n_samples(),
        dataset.n_features(),
        dataset.class_counts().1
    );
    let config = cli.into_config(dataset.n_features());

    let outcome = if config.sweep_sizes.is_some() {
        let sweep = abc_select::harness::run_sweep_on(&dataset, &config)?;
        for entry in &sweep.entries {
            println!(
                "size {:>4}  fitness {:.4}  holdout accuracy {:.4}  evaluations {}",
                entry.size, entry.run.best_fitness, entry.report.accuracy, entry.run.evaluations
            );
        }
        println!("chosen size: {}", sweep.chosen_size);
        ExperimentOutcome::Sweep(sweep)
    } else {
        let (run, report) = abc_select::harness::run_single_on(&dataset, &config)?;
        println!(
            "best subset: {} features, fitness {:.4}",
            run.best_mask.count_ones(),
            run.best_fitness
        );
        println!(
            "holdout: accuracy {:.4}  recall {:.4}  specificity {:.4}",
            report.accuracy, report.recall, report.specificity
        );
        ExperimentOutcome::Single { run, report }
    };

    for path in emit_results(&config, &outcome)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // One machine-parseable line on stderr.
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
