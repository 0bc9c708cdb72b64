//! Verification suite: each test reproduces one published result or
//! closed-form guarantee and prints a PASS line (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! The two largest census rows run behind `--ignored`:
//! `cargo test --test acceptance -- --ignored`.

use trace_repair_core::analysis::{self, CENSUS_LARGE, CENSUS_SMALL};
use trace_repair_core::code::{self, CodeParams};
use trace_repair_core::field::FieldTower;
use trace_repair_core::linalg;
use trace_repair_core::repair::{self, ErasurePattern, NodeRef};
use trace_repair_core::{Codeword, Fel, SplitMix64};

/// The eight dual codewords repairing f(0) and f(1) in GF(16), k = 8:
/// rows p1..p4 (centered at 0, multipliers 1, x, x^2, x^3) and q1..q4
/// (centered at 1), evaluated at 0, 1, x, x^2, ..., x^14.
const GOLDEN_CHECKS: [(&str, &str, u64, [&str; 16]); 8] = [
    ("p1", "0", 0, ["1", "0", "0", "0", "x^12", "0", "0", "x^9", "x^8", "0", "x^6", "0", "x^4", "x^3", "x^2", "x^1"]),
    ("p2", "0", 1, ["x^1", "0", "0", "x^13", "0", "0", "x^10", "x^9", "0", "x^7", "0", "x^5", "x^4", "x^3", "x^2", "0"]),
    ("p3", "0", 2, ["x^2", "0", "x^14", "0", "0", "x^11", "x^10", "0", "x^8", "0", "x^6", "x^5", "x^4", "x^3", "0", "0"]),
    ("p4", "0", 3, ["x^3", "1", "0", "0", "x^12", "x^11", "0", "x^9", "0", "x^7", "x^6", "x^5", "x^4", "0", "0", "0"]),
    ("q1", "1", 0, ["0", "1", "0", "0", "x^1", "0", "0", "x^2", "x^6", "0", "x^8", "0", "x^3", "x^4", "x^9", "x^12"]),
    ("q2", "1", 1, ["0", "x^1", "0", "x^7", "0", "0", "x^5", "x^2", "0", "x^13", "0", "x^10", "x^3", "x^4", "x^9", "0"]),
    ("q3", "1", 2, ["0", "x^2", "x^11", "0", "0", "x^14", "x^5", "0", "x^6", "0", "x^8", "x^10", "x^3", "x^4", "0", "0"]),
    ("q4", "1", 3, ["1", "x^3", "x^11", "x^7", "0", "0", "x^5", "0", "x^6", "0", "0", "0", "0", "x^4", "x^9", "x^12"]),
];

fn gf16_code() -> CodeParams {
    CodeParams::new(FieldTower::new(2, 1, 4).unwrap())
}

fn random_codeword(params: &CodeParams, rng: &mut SplitMix64) -> Codeword {
    let msg: Vec<Fel> = (0..params.k())
        .map(|_| params.tower().element_at(rng.next_below(params.n() as u64) as usize))
        .collect();
    code::encode(params, &msg).unwrap()
}

fn assert_recovered(result: &repair::RepairResult, cw: &Codeword) {
    for &(pos, val) in &result.recovered {
        assert_eq!(val, cw.symbols[pos], "wrong recovery at position {pos}");
    }
}

#[test]
fn criterion_1_check_table_reproduction() {
    let params = gf16_code();
    let f = params.tower();
    let xi = f.generator();
    for (name, center, power, golden) in GOLDEN_CHECKS {
        let center = f.parse(center).unwrap();
        let chk = code::check_vector(&params, f.pow(xi, power), center).unwrap();
        let rendered: Vec<String> = chk.values.iter().map(|&v| f.format(v)).collect();
        assert_eq!(rendered, golden.to_vec(), "check row {name}");
    }
    println!("ACCEPTANCE C1 PASS: all 8 check rows regenerate bit-exactly at 16 points");
}

#[test]
fn criterion_2_census_reproduction_small_rows() {
    for (b, t, expect) in CENSUS_SMALL {
        let census = analysis::run_census_row(b, t).unwrap();
        assert_eq!(census.correctable, expect, "census row |B|={b}, t={t}");
        assert_eq!(census.total, b.pow(t) - 2);
    }
    println!("ACCEPTANCE C2 PASS: 12 census rows match the published counts");
}

#[test]
#[ignore = "large census rows; run with: cargo test --test acceptance -- --ignored"]
fn criterion_2_census_reproduction_large_rows() {
    for (b, t, expect) in CENSUS_LARGE {
        let census = analysis::run_census_row(b, t).unwrap();
        assert_eq!(census.correctable, expect, "census row |B|={b}, t={t}");
    }
    println!("ACCEPTANCE C2 PASS (large): |B|=8,t=6 and |B|=9,t=6 rows match");
}

#[test]
fn criterion_3_bandwidth_equalities_gf16() {
    let params = gf16_code();
    let n = params.n();
    let mut rng = SplitMix64::new(0xC3);
    let codewords: Vec<Codeword> = (0..20).map(|_| random_codeword(&params, &mut rng)).collect();

    // Singles: gw = 15 over every position.
    for cw in &codewords {
        for pos in 0..n {
            let pat = ErasurePattern::new(&[pos]).unwrap();
            let r = repair::repair_single_gw(&params, &cw.with_erasures(&pat)).unwrap();
            assert_recovered(&r, cw);
            assert_eq!(r.ledger.total(), 15);
        }
    }

    // Pairs, exhaustive and ordered: dist1 = 22 then 15, central2 = 28, dist2 = 30.
    for cw in &codewords {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pat = ErasurePattern::new(&[i, j]).unwrap();
                let view = cw.with_erasures(&pat);

                let d1 = repair::repair_two_distributed_one(&params, &view).unwrap();
                assert_recovered(&d1, cw);
                assert_eq!(d1.ledger.received_by(NodeRef::Replacement(i)), 22);
                assert_eq!(d1.ledger.received_by(NodeRef::Replacement(j)), 15);
                assert_eq!(d1.ledger.total(), 37);

                let c2 = repair::repair_two_centralized(&params, &view).unwrap();
                assert_recovered(&c2, cw);
                assert_eq!(c2.ledger.total(), 28);

                let d2 = repair::repair_two_distributed_two(&params, &view).unwrap();
                assert_recovered(&d2, cw);
                assert_eq!(d2.ledger.total(), 30);
            }
        }
    }

    // Triples, exhaustive (all are correctable here): central3 = 39, dist3 = 45.
    for cw in codewords.iter().take(20) {
        for i in 0..n {
            for j in (i + 1)..n {
                for l in (j + 1)..n {
                    let pat = ErasurePattern::new(&[i, j, l]).unwrap();
                    let view = cw.with_erasures(&pat);
                    let c3 = repair::repair_three_centralized(&params, &view).unwrap();
                    assert_recovered(&c3, cw);
                    assert_eq!(c3.ledger.total(), 39);
                    let d3 = repair::repair_three_distributed(&params, &view).unwrap();
                    assert_recovered(&d3, cw);
                    assert_eq!(d3.ledger.total(), 45);
                }
            }
        }
    }
    println!("ACCEPTANCE C3 PASS: ledger equalities 15/37/28/30/39/45 hold exhaustively");
}

#[test]
fn criterion_4_toy_field_transcripts() {
    let params = CodeParams::new(FieldTower::new(2, 1, 2).unwrap());
    let f = params.tower();
    let bits = |x: Fel| (x.0 & 1, x.0 >> 1);

    for a_code in 0..4u32 {
        for b_code in 0..4u32 {
            let a = Fel(a_code);
            let b = Fel(b_code);
            let (a1, a2) = bits(a);
            let (b1, b2) = bits(b);
            // Systematic encoding f(x) = a + (b - a)x.
            let cw = code::encode(&params, &[a, f.sub(b, a)]).unwrap();

            // Single failure of node 2: downloads a2, a2+b1, a2+b1+b2.
            let pat = ErasurePattern::new(&[1]).unwrap();
            let single = repair::repair_single_gw(&params, &cw.with_erasures(&pat)).unwrap();
            assert_recovered(&single, &cw);
            let downloads: Vec<u32> = single
                .ledger
                .transfers()
                .iter()
                .map(|t| t.value.unwrap().0)
                .collect();
            assert_eq!(downloads, vec![a2, (a2 ^ b1), (a2 ^ b1 ^ b2)]);

            // Double failure of nodes 2 and 3: two downloads per replacement
            // plus the two exchanged bits a2+b1 = a1 + (a1+a2+b1) and
            // b1+b2 = a2 + (a2+b1+b2).
            let pat2 = ErasurePattern::new(&[1, 2]).unwrap();
            let double =
                repair::repair_two_distributed_two(&params, &cw.with_erasures(&pat2)).unwrap();
            assert_recovered(&double, &cw);
            assert_eq!(double.ledger.total(), 6);
            let rows: Vec<(NodeRef, NodeRef, u32)> = double
                .ledger
                .transfers()
                .iter()
                .map(|t| (t.from, t.to, t.value.unwrap().0))
                .collect();
            assert_eq!(rows[0], (NodeRef::Node(0), NodeRef::Replacement(1), a2));
            assert_eq!(rows[1], (NodeRef::Node(3), NodeRef::Replacement(1), a2 ^ b1 ^ b2));
            assert_eq!(rows[2], (NodeRef::Node(0), NodeRef::Replacement(2), a1));
            assert_eq!(rows[3], (NodeRef::Node(3), NodeRef::Replacement(2), a1 ^ a2 ^ b1));
            assert_eq!(
                rows[4],
                (NodeRef::Replacement(2), NodeRef::Replacement(1), a1 ^ (a1 ^ a2 ^ b1))
            );
            assert_eq!(
                rows[5],
                (NodeRef::Replacement(1), NodeRef::Replacement(2), a2 ^ (a2 ^ b1 ^ b2))
            );
        }
    }
    println!("ACCEPTANCE C4 PASS: toy-field bit transcripts exact for all 16 messages");
}

#[test]
fn criterion_5_cross_tower_recovery() {
    let towers: [(u64, u32, u32); 3] = [(2, 1, 6), (2, 2, 4), (3, 1, 6)];
    let mut rng = SplitMix64::new(0xC5);
    for (p, m, t) in towers {
        let params = CodeParams::new(FieldTower::new(p, m, t).unwrap());
        let f = params.tower();
        let n = params.n() as u64;
        let codewords: Vec<Codeword> =
            (0..10).map(|_| random_codeword(&params, &mut rng)).collect();

        let mut singles = Vec::new();
        let mut pairs = Vec::new();
        let mut triples = Vec::new();
        while singles.len() < 10 {
            let i = rng.next_below(n) as usize;
            if !singles.contains(&i) {
                singles.push(i);
            }
        }
        while pairs.len() < 10 {
            let (i, j) = (rng.next_below(n) as usize, rng.next_below(n) as usize);
            if i != j && !pairs.contains(&(i, j)) {
                pairs.push((i, j));
            }
        }
        while triples.len() < 10 {
            let (i, j, l) = (
                rng.next_below(n) as usize,
                rng.next_below(n) as usize,
                rng.next_below(n) as usize,
            );
            if i == j || j == l || i == l || triples.contains(&(i, j, l)) {
                continue;
            }
            if !repair::is_correctable_triple(f, params.point(i), params.point(j), params.point(l))
                .unwrap()
            {
                continue;
            }
            triples.push((i, j, l));
        }

        for cw in &codewords {
            for &i in &singles {
                let pat = ErasurePattern::new(&[i]).unwrap();
                let view = cw.with_erasures(&pat);
                assert_recovered(&code::naive_repair(&params, &view).unwrap(), cw);
                assert_recovered(&repair::repair_single_gw(&params, &view).unwrap(), cw);
            }
            for &(i, j) in &pairs {
                let pat = ErasurePattern::new(&[i, j]).unwrap();
                let view = cw.with_erasures(&pat);
                assert_recovered(&repair::repair_two_distributed_one(&params, &view).unwrap(), cw);
                assert_recovered(&repair::repair_two_centralized(&params, &view).unwrap(), cw);
                assert_recovered(&repair::repair_two_distributed_two(&params, &view).unwrap(), cw);
            }
            for &(i, j, l) in &triples {
                let pat = ErasurePattern::new(&[i, j, l]).unwrap();
                let view = cw.with_erasures(&pat);
                assert_recovered(&repair::repair_three_centralized(&params, &view).unwrap(), cw);
                assert_recovered(&repair::repair_three_distributed(&params, &view).unwrap(), cw);
            }
        }
    }

    // Distributed I also runs where the characteristic does not divide t.
    let params8 = CodeParams::new(FieldTower::new(2, 1, 3).unwrap());
    assert!(!params8.tower().char_divides_t());
    for _ in 0..10 {
        let cw = random_codeword(&params8, &mut rng);
        for (i, j) in [(0usize, 1usize), (3, 6), (5, 2)] {
            let pat = ErasurePattern::new(&[i, j]).unwrap();
            let r = repair::repair_two_distributed_one(&params8, &cw.with_erasures(&pat)).unwrap();
            assert_recovered(&r, &cw);
            assert_eq!(r.ledger.total(), 17);
        }
    }
    println!("ACCEPTANCE C5 PASS: exact recovery across GF(64), GF(256)/GF(4), GF(729)/GF(3), GF(8)");
}

#[test]
fn criterion_6a_dual_verification() {
    let towers: [(u64, u32, u32); 4] = [(2, 1, 4), (2, 1, 6), (2, 2, 4), (3, 1, 6)];
    let mut rng = SplitMix64::new(0xC6);
    for (p, m, t) in towers {
        let params = CodeParams::new(FieldTower::new(p, m, t).unwrap());
        let f = params.tower();
        let n = params.n() as u64;
        for _ in 0..100 {
            let u = f.element_at(1 + rng.next_below(n - 1) as usize);
            let alpha = f.element_at(rng.next_below(n) as usize);
            let cw = random_codeword(&params, &mut rng);
            let chk = code::check_vector(&params, u, alpha).unwrap();
            assert!(code::verify_dual(&params, &chk, &cw).unwrap());
        }
    }
    println!("ACCEPTANCE C6a PASS: 100 random checks annihilate random codewords per tower");
}

#[test]
fn criterion_6b_trace_kernel_dimension_exhaustive() {
    let primes: [u64; 18] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];
    let mut towers = 0;
    for p in primes {
        let mut deg = 1u32;
        while p.pow(deg) <= 4096 {
            // Every factorization deg = m * t.
            for m in 1..=deg {
                if !deg.is_multiple_of(m) {
                    continue;
                }
                let t = deg / m;
                let tower = FieldTower::new(p, m, t).unwrap();
                let kernel = linalg::trace_kernel(&tower);
                assert_eq!(kernel.dim() as u32, t - 1, "tower ({p},{m},{t})");
                let zeros = tower.elements().filter(|&a| tower.trace(a).is_zero()).count();
                assert_eq!(zeros as u64, tower.subfield_order().pow(t - 1));
                towers += 1;
            }
            deg += 1;
        }
    }
    println!("ACCEPTANCE C6b PASS: kernel dimension t-1 on {towers} towers up to |F| = 4096");
}

#[test]
fn criterion_6c_cancellation_and_cycle_oracles() {
    // Engine-extracted traces must equal direct trace computations that only
    // the test may perform on the erased content.
    let towers: [(u64, u32, u32); 3] = [(2, 1, 4), (2, 2, 4), (3, 1, 6)];
    let mut rng = SplitMix64::new(0x6C);
    for (p, m, t) in towers {
        let params = CodeParams::new(FieldTower::new(p, m, t).unwrap());
        let f = params.tower();
        let n = params.n() as u64;
        for _ in 0..5 {
            let cw = random_codeword(&params, &mut rng);
            // Two erasures: interference cancellation in the centralized scheme.
            let (i, j) = (rng.next_below(n) as usize, rng.next_below(n) as usize);
            if i == j {
                continue;
            }
            let pat = ErasurePattern::new(&[i, j]).unwrap();
            let r2 = repair::repair_two_centralized(&params, &cw.with_erasures(&pat)).unwrap();
            for row in &r2.transcript {
                let center_pos = if row.check.starts_with('p') { i } else { j };
                let direct = f.trace(f.mul(row.center_value, cw.symbols[center_pos]));
                assert_eq!(row.extracted, direct, "trace mismatch in {}", row.check);
                for cancel in &row.cancels {
                    let at = params.point(cancel.at_position);
                    let center = params.point(center_pos);
                    let delta = f.sub(at, center);
                    let chk_val =
                        f.mul(f.trace(f.mul(row.center_value, delta)), f.inv(delta).unwrap());
                    let direct_interf =
                        f.trace(f.mul(chk_val, cw.symbols[cancel.at_position]));
                    assert_eq!(cancel.value, direct_interf);
                }
            }
            // Three erasures: cycle closure in both cycle orders.
            let mut l = rng.next_below(n) as usize;
            loop {
                if l != i
                    && l != j
                    && repair::is_correctable_triple(
                        f,
                        params.point(i),
                        params.point(j),
                        params.point(l),
                    )
                    .unwrap_or(false)
                {
                    break;
                }
                l = rng.next_below(n) as usize;
            }
            let pat3 = ErasurePattern::new(&[i, j, l]).unwrap();
            let r3 = repair::repair_three_centralized(&params, &cw.with_erasures(&pat3)).unwrap();
            for row in &r3.transcript {
                let center_pos = match row.check.as_bytes()[0] {
                    b'p' => i,
                    b'q' => j,
                    _ => l,
                };
                let direct = f.trace(f.mul(row.center_value, cw.symbols[center_pos]));
                assert_eq!(row.extracted, direct, "cycle trace mismatch in {}", row.check);
            }
        }
    }
    println!("ACCEPTANCE C6c PASS: cancellation and cycle traces equal the direct oracle");
}

#[test]
fn criterion_6d_lower_bound_and_optimality() {
    let bound = analysis::repair_lower_bound(16, 8, 2, 4).unwrap();
    assert!((bound - 15.0).abs() < 1e-12);

    let params = gf16_code();
    let mut rng = SplitMix64::new(0x6D);
    let cw = random_codeword(&params, &mut rng);
    let pat2 = ErasurePattern::new(&[4, 9]).unwrap();
    let d2 = repair::repair_two_distributed_two(&params, &cw.with_erasures(&pat2)).unwrap();
    assert_eq!(d2.ledger.total(), 2 * 15);
    let pat3 = ErasurePattern::new(&[4, 9, 13]).unwrap();
    let d3 = repair::repair_three_distributed(&params, &cw.with_erasures(&pat3)).unwrap();
    assert_eq!(d3.ledger.total(), 3 * 15);
    println!("ACCEPTANCE C6d PASS: bound 15 exact; distributed schemes meet e(n-1)");
}
