//! Robustness to abrupt plant changes.
//!
//! The second built-in experiment switches the true coefficients twice
//! (a → b at step 200, b → c at step 1200) and compares how the inner
//! forgetting mode of the bank determines recovery: directional forgetting
//! tracks the changes, uniform (exponential) inner forgetting destroys the
//! information-matrix floor, and no inner forgetting leaves stale data
//! dominant forever.
//!
//! Run with: `cargo run --release --example parameter_change`

use tlf_rls::experiment::{run, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig::case2();
    let result = run(&cfg).expect("default config is valid");

    let checkpoints = [100usize, 199, 300, 500, 1100, 1300, 1500, 2400];
    print!("{:<26}", "method");
    for k in checkpoints {
        print!(" {:>10}", format!("k={k}"));
    }
    println!();
    for trace in &result.traces {
        print!("{:<26}", trace.label);
        for k in checkpoints {
            print!(" {:>10.2e}", trace.records[k - 1].param_err);
        }
        println!();
    }

    println!("\naverage covariance condition number over the final 900 steps:");
    for trace in &result.traces {
        let tail: Vec<f64> = trace
            .records
            .iter()
            .filter(|r| r.k >= 1500)
            .map(|r| r.cond_p)
            .collect();
        let avg = tail.iter().sum::<f64>() / tail.len() as f64;
        println!("  {:<26} {:>12.3e}", trace.label, avg);
    }
    println!(
        "\nDirectional inner forgetting keeps the covariance best conditioned, which is \
         what\nmakes the post-change re-convergence possible."
    );
}
