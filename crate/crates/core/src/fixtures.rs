//! Small reference datasets and synthetic generators shared by tests,
//! benchmarks and the CLI test-suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{parse_ntriples_str, ParseOptions, Term, Triple, TripleSet};

/// The drug/disease fragment used throughout the docs: arginine (A),
/// Alzheimer's disease (B), APOE (C) and urokinase (D), linked by
/// possibleDiseaseTarget (r), possibleDrug (s) and associatedGene (t).
pub const WORKED_EXAMPLE_NT: &str = "\
<urn:A> <urn:r> <urn:B> .
<urn:B> <urn:s> <urn:D> .
<urn:B> <urn:t> <urn:C> .
<urn:D> <urn:r> <urn:B> .
";

pub fn worked_example() -> TripleSet {
    parse_ntriples_str(WORKED_EXAMPLE_NT, "worked-example", ParseOptions { strict: true })
        .expect("fixture parses")
        .0
}

/// Watts-Strogatz style small world expressed as triples: a ring of `nodes`
/// entities, each linked to its `half_degree` clockwise successors, with
/// every link rewired to a random target with probability `rewire`. Each
/// link gets one of `predicates` predicates at random.
pub fn small_world(nodes: usize, half_degree: usize, rewire: f64, predicates: usize, seed: u64) -> TripleSet {
    assert!(nodes > 2 * half_degree, "ring too small for the requested degree");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node = |i: usize| Term::uri(format!("http://example.org/sw/n{i}"));
    let preds: Vec<Term> = (0..predicates.max(1))
        .map(|p| Term::uri(format!("http://example.org/sw/p{p}")))
        .collect();
    let mut set = TripleSet::new(format!("small-world-{nodes}"));
    for i in 0..nodes {
        for k in 1..=half_degree {
            let mut j = (i + k) % nodes;
            if rng.gen_bool(rewire) {
                j = rng.gen_range(0..nodes);
                if j == i {
                    j = (i + k) % nodes;
                }
            }
            let p = preds.choose(&mut rng).unwrap().clone();
            set.triples.insert(Triple::new(node(i), p, node(j)));
        }
    }
    set
}
