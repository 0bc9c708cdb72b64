//! Benchmark-only crate; see `benches/repair.rs`.
//!
//! Shared helpers for the benchmark targets live here so the bench file
//! stays focused on measurement setup.

use trace_repair_core::code::{self, CodeParams};
use trace_repair_core::{Codeword, Fel, FieldTower, SplitMix64};

pub fn code_params(p: u64, m: u32, t: u32) -> CodeParams {
    CodeParams::new(FieldTower::new(p, m, t).expect("tower parameters"))
}

pub fn seeded_codeword(params: &CodeParams, seed: u64) -> Codeword {
    let mut rng = SplitMix64::new(seed);
    let msg: Vec<Fel> = (0..params.k())
        .map(|_| params.tower().element_at(rng.next_below(params.n() as u64) as usize))
        .collect();
    code::encode(params, &msg).expect("encode")
}
