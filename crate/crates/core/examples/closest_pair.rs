//! The closest red/blue pair is the same before and after the transform.

use hardstrings::reduction::{bichromatic_closest_pair, bichromatic_closest_pair_grouped, Mode};
use hardstrings::stoppers::transform_set;
use hardstrings::strings::SymbolString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut set = |n: usize| -> Vec<SymbolString> {
        (0..n)
            .map(|_| SymbolString::from_bits((0..16).map(|_| rng.gen::<bool>())))
            .collect()
    };
    let red = set(12);
    let blue = set(12);

    let h = bichromatic_closest_pair(&red, &blue, Mode::Hamming).unwrap();
    println!(
        "hamming: red {} blue {} distance {}",
        h.red_index, h.blue_index, h.distance
    );

    let (tr, params) = transform_set(&red).unwrap();
    let (tb, _) = transform_set(&blue).unwrap();
    println!("transformed length {}", params.unwrap().output_len());
    let e = bichromatic_closest_pair(&tr, &tb, Mode::Edit).unwrap();
    println!(
        "edit:    red {} blue {} distance {}",
        e.red_index, e.blue_index, e.distance
    );

    let g = bichromatic_closest_pair_grouped(&red, &blue, Mode::Hamming, 4).unwrap();
    println!("grouped: distance {}", g.distance);
}
