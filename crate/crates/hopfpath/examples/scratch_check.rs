use hopfpath::verify::{run_suite, SuiteOptions, SUITES};
use std::time::Instant;

fn main() {
    let opts = SuiteOptions { max_nodes: 4, dim: 2, seed: 0xB0C4, threads: 4 };
    let mut all_ok = true;
    for suite in SUITES {
        let t0 = Instant::now();
        let results = run_suite(suite, opts).unwrap();
        for r in &results {
            let mark = if r.passed { "ok  " } else { "FAIL" };
            println!("[{mark}] {suite}: {}", r.name);
            if !r.passed {
                println!("       {}", r.detail);
                all_ok = false;
            }
        }
        println!("  ({suite} took {:?})", t0.elapsed());
    }
    std::process::exit(if all_ok { 0 } else { 1 });
}
