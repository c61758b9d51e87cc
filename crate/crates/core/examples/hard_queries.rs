//! Query strings, base strings, ball counts and the intersection bound for a
//! small block configuration.

use hardstrings::hardgen::{
    argmax_w, count_queries_distinct, count_queries_formula, count_within_ball_brute,
    count_within_ball_closed_form, enumerate_base_strings, enumerate_queries, evaluate_bounds,
    generate_dictionary, intersection_profile, intersection_upper_bound, BlockParams,
    DictionaryConfig,
};

fn main() {
    let p = BlockParams::new(4, 16).unwrap();
    let queries = enumerate_queries(p).unwrap();
    let base = enumerate_base_strings(p).unwrap();
    println!("k = {}, d = {}, b = {}", p.k(), p.d(), p.b());
    println!("distinct query strings: {}", count_queries_distinct(p));
    println!("formula count:          {}", count_queries_formula(p));
    println!("base strings:           {}", base.len());

    let q = &queries[queries.len() / 3];
    let closed: u64 = (0..=p.k())
        .map(|delta| u64::try_from(count_within_ball_closed_form(q, delta).unwrap()).unwrap())
        .sum();
    println!("\nP = {}", q.to_symbol_string());
    println!(
        "base strings within distance k: closed form {closed}, brute {}",
        count_within_ball_brute(q, p.k()).unwrap()
    );

    let (s1, s2) = (&base[0], &base[base.len() / 2 + 5]);
    let z = s1.hamming(s2) / 2;
    println!(
        "\nS1 = {}\nS2 = {}  (z = {z}, argmax w = {})",
        s1.to_symbol_string(),
        s2.to_symbol_string(),
        argmax_w(z, p).unwrap()
    );
    for ((d1, d2), count) in intersection_profile(s1, s2, p.k(), &queries).unwrap() {
        let bound = intersection_upper_bound(z, d1, d2, p).unwrap();
        println!("  distances ({d1}, {d2}): {count} query strings, bound {bound}");
    }

    let n = 1u128 << 20;
    let cfg = DictionaryConfig::from_alpha(p, n, 42).unwrap();
    let dict = generate_dictionary(&cfg).unwrap();
    println!(
        "\ndictionary: select {} prune radius {} -> {} strings",
        cfg.select_prob,
        cfg.prune_radius,
        dict.len()
    );
    println!("\n{}", evaluate_bounds(n, p).unwrap());
}
