//! Trie search against a linear scan, and approximate search in a text.

use hardstrings::reduction::{Instance, Mode};
use hardstrings::solvers::{
    dict_lookup_brute_with_stats, text_search_edit, text_search_hamming, trie_build, trie_lookup,
};
use hardstrings::strings::SymbolString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = 20;
    let strings: Vec<SymbolString> = (0..2000)
        .map(|_| SymbolString::from_bits((0..d).map(|_| rng.gen::<bool>())))
        .collect();
    let q = strings[7].clone();
    let dict = Instance::new(strings, d, 0, Mode::Hamming).unwrap();
    let trie = trie_build(&dict);
    println!(
        "{} strings, trie has {} nodes",
        dict.len(),
        trie.node_count()
    );

    for k in 0..=4 {
        let (hits, stats) = trie_lookup(&trie, &q, k).unwrap();
        let (brute, bstats) = dict_lookup_brute_with_stats(&dict, &q, k, Mode::Hamming).unwrap();
        assert_eq!(hits, brute);
        println!(
            "k = {k}: {:3} answers, trie visits {:6} nodes in {:?}, scan {:?}",
            hits.len(),
            stats.nodes_visited,
            stats.wall_time,
            bstats.wall_time
        );
    }

    let (text, pattern) = ("abracadabra", "acab");
    let t = SymbolString::from_letters(text);
    let p = SymbolString::from_letters(pattern);
    println!(
        "\nHamming windows of {pattern} in {text}: {:?}",
        text_search_hamming(&t, &p, 1).unwrap()
    );
    for h in text_search_edit(&t, &p, 1) {
        println!(
            "edit match t[{}..={}] distance {}",
            h.start, h.end, h.distance
        );
    }
}
