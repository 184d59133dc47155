use phpsynth::search::{synthesize, SearchConfig, TheoremStore, Theorem};
use phpsynth::specs::parse_spec;
use phpsynth::programs::simplify_cr1;
use std::time::Instant;

const SPECS: [&str; 10] = [
    "BETW(I,J,K)",
    "BETW(I,x,J)",
    "(LT(I,J)^EQ(I,x)) v (~LT(I,J)^EQ(J,x))",
    "FAC(I,J)",
    "FAC(x,I)",
    "PFAC(x,I)",
    "PRIME(I)",
    "FAC(x,I)^PRIME(x)",
    "PRIME(x)^BETW(I,x,J)",
    "PRIME(x)^BETW(\"1\",x,\"100\")",
];

fn main() {
    let mut store = TheoremStore::new();
    let cfg = SearchConfig::default();
    for (i, text) in SPECS.iter().enumerate() {
        let name = format!("{}", i + 1);
        let goal = parse_spec(text).unwrap();
        let t0 = Instant::now();
        match synthesize(&goal, &cfg, &store) {
            Ok(s) => {
                let mut j = s.judgment.clone();
                j.program = simplify_cr1(&j.program);
                println!("THM {} [{} ms, {} entries]: {}", name, t0.elapsed().as_millis(), s.derivation.entries.len(), j.program);
                store.insert(Theorem { name, judgment: j, derivation: s.derivation }).unwrap();
            }
            Err(e) => {
                println!("THM {} FAILED after {} ms: {}", name, t0.elapsed().as_millis(), e);
                std::process::exit(1);
            }
        }
    }
}
