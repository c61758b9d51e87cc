//! Per-query latency of both solvers as k grows, printed as CSV.

use hardstrings::cli::{bench, SolverKind, BENCH_HEADER};

fn main() {
    println!("{BENCH_HEADER}");
    for solver in [SolverKind::Brute, SolverKind::Trie] {
        for row in bench(solver, 0..=4, 16, 16 * 1024, 100, 0).unwrap() {
            println!("{}", row.csv_row());
        }
    }
}
