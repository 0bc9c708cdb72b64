//! Built-in golden data and the `selftest` subcommand: regenerates the
//! check table for repairing f(0) and f(1) over GF(16), replays the
//! four-node toy example bit by bit, and reruns the correctable-triple
//! census rows. Any mismatch is reported as an itemized diff.

use anyhow::bail;
use trace_repair_core::analysis::{self, CENSUS_LARGE, CENSUS_SMALL};
use trace_repair_core::code::{self, CodeParams};
use trace_repair_core::field::FieldTower;
use trace_repair_core::repair::{self, ErasurePattern, NodeRef};
use trace_repair_core::Fel;

/// The eight dual codewords used to repair f(0) and f(1) in GF(16) with
/// k = 8, evaluated at 0, 1, x, ..., x^14. Rows p1..p4 are centered at 0
/// with multipliers 1, x, x^2, x^3; rows q1..q4 at 1.
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

fn check_table(failures: &mut Vec<String>) {
    let params = CodeParams::new(FieldTower::new(2, 1, 4).expect("GF(16)"));
    let f = params.tower();
    let xi = f.generator();
    for (name, center, power, golden) in GOLDEN_CHECKS {
        let center = f.parse(center).expect("golden center");
        let chk = code::check_vector(&params, f.pow(xi, power), center).expect("check");
        let rendered: Vec<String> = chk.values.iter().map(|&v| f.format(v)).collect();
        let mut ok = true;
        for (col, (got, want)) in rendered.iter().zip(golden.iter()).enumerate() {
            if got != want {
                failures.push(format!(
                    "check-table {name} column {col}: expected {want}, got {got}"
                ));
                ok = false;
            }
        }
        if ok {
            println!("check-table {name} ok");
        }
    }
}

fn toy_example(failures: &mut Vec<String>) {
    let params = CodeParams::new(FieldTower::new(2, 1, 2).expect("GF(4)"));
    let f = params.tower();
    let bits = |x: Fel| (x.0 & 1, x.0 >> 1);
    let mut single_ok = 0;
    let mut double_ok = 0;

    for a_code in 0..4u32 {
        for b_code in 0..4u32 {
            let label = format!("message a={a_code:02b} b={b_code:02b}");
            let a = Fel(a_code);
            let b = Fel(b_code);
            let (a1, a2) = bits(a);
            let (b1, b2) = bits(b);
            let cw = code::encode(&params, &[a, f.sub(b, a)]).expect("encode");

            // Node 2 fails alone: the downloads are a2, a2+b1, a2+b1+b2.
            let pat = ErasurePattern::new(&[1]).expect("pattern");
            let single =
                repair::repair_single_gw(&params, &cw.with_erasures(&pat)).expect("repair");
            let downloads: Vec<u32> = single
                .ledger
                .transfers()
                .iter()
                .map(|t| t.value.expect("trace value").0)
                .collect();
            let expect = vec![a2, a2 ^ b1, a2 ^ b1 ^ b2];
            if downloads != expect || single.recovered[0].1 != b {
                failures.push(format!(
                    "toy single-failure {label}: expected downloads {expect:?}, got {downloads:?}"
                ));
            } else {
                single_ok += 1;
            }

            // Nodes 2 and 3 fail: each replacement downloads two bits and the
            // exchanged bits satisfy a2+b1 = a1+(a1+a2+b1), b1+b2 = a2+(a2+b1+b2).
            let pat2 = ErasurePattern::new(&[1, 2]).expect("pattern");
            let double = repair::repair_two_distributed_two(&params, &cw.with_erasures(&pat2))
                .expect("repair");
            let rows: Vec<(NodeRef, NodeRef, u32)> = double
                .ledger
                .transfers()
                .iter()
                .map(|t| (t.from, t.to, t.value.expect("trace value").0))
                .collect();
            let expect_rows = vec![
                (NodeRef::Node(0), NodeRef::Replacement(1), a2),
                (NodeRef::Node(3), NodeRef::Replacement(1), a2 ^ b1 ^ b2),
                (NodeRef::Node(0), NodeRef::Replacement(2), a1),
                (NodeRef::Node(3), NodeRef::Replacement(2), a1 ^ a2 ^ b1),
                (NodeRef::Replacement(2), NodeRef::Replacement(1), a2 ^ b1),
                (NodeRef::Replacement(1), NodeRef::Replacement(2), b1 ^ b2),
            ];
            let recovered_ok = double.recovered.iter().all(|&(pos, v)| cw.symbols[pos] == v);
            if rows != expect_rows || !recovered_ok {
                failures.push(format!(
                    "toy exchange {label}: expected rows {expect_rows:?}, got {rows:?}"
                ));
            } else {
                double_ok += 1;
            }
        }
    }
    println!("toy-example single-failure ok ({single_ok}/16 messages)");
    println!("toy-example exchange ok ({double_ok}/16 messages)");
}

fn census(full: bool, failures: &mut Vec<String>) {
    let mut rows: Vec<(u64, u32, u64)> = CENSUS_SMALL.to_vec();
    if full {
        rows.extend(CENSUS_LARGE);
    }
    for (b, t, expect) in rows {
        match analysis::run_census_row(b, t) {
            Ok(census) => {
                if census.correctable == expect {
                    println!(
                        "census |B|={b} t={t} {}/{} ok",
                        census.correctable, census.total
                    );
                } else {
                    failures.push(format!(
                        "census |B|={b} t={t}: expected {expect}, got {}",
                        census.correctable
                    ));
                }
            }
            Err(e) => failures.push(format!("census |B|={b} t={t}: {e}")),
        }
    }
}

pub(crate) fn cmd_selftest(full: bool) -> anyhow::Result<()> {
    let mut failures = Vec::new();
    check_table(&mut failures);
    toy_example(&mut failures);
    census(full, &mut failures);
    if failures.is_empty() {
        println!("selftest PASS");
        Ok(())
    } else {
        for f in &failures {
            println!("MISMATCH {f}");
        }
        bail!("selftest failed with {} mismatch(es)", failures.len());
    }
}
