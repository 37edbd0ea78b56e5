use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::SynthTuple;

/// Writes tuples as JSON lines after a seeded shuffle.
pub fn write_jsonl<W: Write>(tuples: &[SynthTuple], seed: u64, mut out: W) -> io::Result<()> {
    let mut order: Vec<&SynthTuple> = tuples.iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for t in order {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
