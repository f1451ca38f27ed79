//! The config-driven study workflow behind the `amisc` binary: run a study,
//! compare strategies, and inspect the CSV artifacts it writes.
//!
//! ```bash
//! cargo run --example study_workflow
//! ```

use amisc::studio::{compare_study, run_study, ModelConfig, Strategy, StudyConfig};

fn main() {
    let out_dir = std::env::temp_dir().join("amisc-study-workflow");
    let _ = std::fs::remove_dir_all(&out_dir);

    let cfg = StudyConfig {
        model: ModelConfig::CosineLadder {
            eps: vec![0.2, 0.1, 0.05],
        },
        strategy: Strategy::Multiindex,
        kappa: 0.5,
        tau: None,
        w_max: Some(60.0),
        max_steps: None,
        max_level: 8,
        validation_samples: 500,
        density_samples: 10_000,
        seed: 7,
        out_dir: out_dir.clone(),
        truth_alpha: None,
        checkpoint_ratio: 2f64.powf(0.25),
    };

    // the equivalent JSON config for the CLI
    println!("config as JSON (feed this to `amisc run --config ...`):");
    println!("{}\n", serde_json::to_string_pretty(&cfg).unwrap());

    let output = run_study(&cfg).unwrap();
    println!(
        "run: {} accepted indices, work {:.1}, stop {:?}",
        output.surrogate.accepted().len(),
        output.surrogate.work_total(),
        output.stop
    );
    println!("convergence checkpoints (work -> relative error):");
    for row in &output.convergence {
        println!("  {:8.2} -> {:.3e}", row.work, row.errors[0]);
    }

    let outputs = compare_study(&cfg, &[Strategy::Multiindex, Strategy::Single]).unwrap();
    println!("\ncompare: final errors per strategy");
    for o in &outputs {
        let last = o.convergence.last().unwrap();
        println!(
            "  {:10} work {:8.2} error {:.3e}",
            o.strategy.name(),
            last.work,
            last.errors[0]
        );
    }

    println!("\nartifacts:");
    for name in [
        "trace.csv",
        "convergence.csv",
        "allocation.csv",
        "accepted.txt",
        "compare.csv",
    ] {
        let path = out_dir.join(name);
        let lines = std::fs::read_to_string(&path)
            .map(|s| s.lines().count())
            .unwrap_or(0);
        println!("  {} ({lines} lines)", path.display());
    }
}
