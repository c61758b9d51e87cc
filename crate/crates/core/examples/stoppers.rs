//! Hamming distance between binary strings becomes edit distance between
//! their transforms.

use hardstrings::stoppers::{stoppers_transform, transformed_len};
use hardstrings::strings::{edit_distance, hamming, SymbolString};

fn main() {
    let x: SymbolString = "01101001".parse().unwrap();
    let y: SymbolString = "11100011".parse().unwrap();
    let tx = stoppers_transform(&x).unwrap();
    let ty = stoppers_transform(&y).unwrap();

    println!("X  = {x}");
    println!("Y  = {y}");
    println!("tX = {}", tx.to_tokens());
    println!(
        "length {} -> {} (expected {})",
        x.len(),
        tx.len(),
        transformed_len(x.len())
    );
    println!("HAM(X, Y) = {}", hamming(&x, &y).unwrap());
    println!("ED(tX, tY) = {}", edit_distance(&tx, &ty));
}
