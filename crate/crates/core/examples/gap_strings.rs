//! Gap strings for several block lengths, plus a string that fails the
//! prefix/suffix check.

use hardstrings::gapstrings::{
    default_mismatch_gap, edit_gap, find_gap_violation, mismatch_gap, SearchStrategy,
};
use hardstrings::strings::SymbolString;

fn main() {
    for d in [2, 4, 8, 16] {
        let g = default_mismatch_gap(d).unwrap();
        println!("d = {d:2}: {g}");
    }
    let g = mismatch_gap(32, SearchStrategy::KWise, 1, 1 << 20).unwrap();
    println!("d = 32 (kwise): {g}");
    println!("edit gap d = 4: {}", edit_gap(4).unwrap());

    let bad: SymbolString = "$$##".parse().unwrap();
    match find_gap_violation(&bad, 2).unwrap() {
        Some(v) => println!("{bad} at d = 2 fails: {v}"),
        None => println!("{bad} at d = 2 passes"),
    }
}
