//! Dictionary lookup answered by text search over the interleaved text, in
//! both distance modes.

use hardstrings::reduction::{
    build_text, dict_lookup_via_text, transform_instance, wrap_query, Instance, Mode,
};
use hardstrings::stoppers::stoppers_transform;
use hardstrings::strings::SymbolString;

fn main() {
    let strings: Vec<SymbolString> = ["0110", "1100", "0011", "1111"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let k = 1;
    let dict = Instance::new(strings, 4, k, Mode::Hamming).unwrap();
    let art = build_text(&dict).unwrap();
    println!("gap     {}", art.gap());
    println!("text    {}", art.text());

    let q: SymbolString = "0111".parse().unwrap();
    println!("pattern {}", wrap_query(&q, art.gap()).unwrap());
    for a in dict_lookup_via_text(&art, &q, k, Mode::Hamming).unwrap() {
        println!(
            "  hamming: string {} at distance {}",
            a.dict_index, a.distance
        );
    }

    let edit = transform_instance(&dict).unwrap();
    let art = build_text(&edit).unwrap();
    let tq = stoppers_transform(&q).unwrap();
    println!("\nedit-mode text has {} symbols", art.text().len());
    for a in dict_lookup_via_text(&art, &tq, k, Mode::Edit).unwrap() {
        println!(
            "  edit: string {} at distance {} (window {:?})",
            a.dict_index, a.distance, a.evidence
        );
    }
}
