//! CLI-level verification: byte-identical reports for repeated runs, the
//! documented subcommand outputs, and the exit-code contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trace-repair"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "command {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

#[test]
fn criterion_7_selftest_runs_are_byte_identical() {
    let first = run(&["selftest"]);
    let second = run(&["selftest"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);
    assert!(String::from_utf8_lossy(&first.stdout).contains("selftest PASS"));
    println!("ACCEPTANCE C7 PASS: selftest output is byte-identical across runs");
}

#[test]
fn criterion_7_seeded_scenario_is_byte_identical() {
    let args = [
        "repair", "--p", "2", "--m", "1", "--t", "4", "--k", "8", "--erasures", "0,1",
        "--scheme", "central2", "--trials", "20", "--seed", "9",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);

    // Every trial succeeds at the closed-form bandwidth.
    let text = String::from_utf8_lossy(&first.stdout);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 20);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(*row, format!("central2,16,8,0;1,{i},28,true"));
    }
    println!("ACCEPTANCE C7 PASS: seeded scenario reports are byte-identical");
}

#[test]
fn repair_report_files_match_stdout() {
    let dir = std::env::temp_dir().join(format!("trace-repair-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path: PathBuf = dir.join("report.csv");
    let transcript_path: PathBuf = dir.join("transcript.txt");
    let output = bin()
        .args([
            "repair", "--p", "2", "--m", "1", "--t", "2", "--erasures", "1,2", "--scheme",
            "dist2", "--trials", "3", "--seed", "5",
        ])
        .arg("--out")
        .arg(&out_path)
        .arg("--transcript")
        .arg(&transcript_path)
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let file = std::fs::read(&out_path).unwrap();
    assert_eq!(file, output.stdout);
    let transcript = std::fs::read_to_string(&transcript_path).unwrap();
    assert!(transcript.contains("=== trial 0 ==="));
    assert!(transcript.contains("scheme = dist2"));
    assert!(transcript.contains("check q2"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn count_triples_rows_match_published_counts() {
    let out = stdout_of(&["count-triples", "--p", "2", "--m", "1", "--t", "4"]);
    assert_eq!(out, "tower,fixed_pair,correctable,total\nGF(16)/GF(2),0;1,14,14\n");
    let out = stdout_of(&["count-triples", "--p", "3", "--m", "1", "--t", "3"]);
    assert_eq!(out, "tower,fixed_pair,correctable,total\nGF(27)/GF(3),0;1,19,25\n");
    let out = stdout_of(&["count-triples", "--p", "2", "--m", "2", "--t", "4"]);
    assert_eq!(out, "tower,fixed_pair,correctable,total\nGF(256)/GF(4),0;1,158,254\n");
}

#[test]
fn compare_table_gf16() {
    let out = stdout_of(&["compare", "--p", "2", "--m", "1", "--t", "4"]);
    let expect = "\
tower = GF(16)/GF(2)
n = 16
k = 8
scheme,erasures,bandwidth_subsymbols,conditions
naive,1,32,-
gw,1,15,-
dist1,2,37,-
central2,2,28,char | t
dist2,2,30,char | t
central3,3,39,char | t; correctable triple
dist3,3,45,char | t; correctable triple
lower_bound_single,1,15.000000,-
dist1 < naive+gw: 37 < 47 = true (threshold t >= 3.00)
central2 < naive: 28 < 32 = true (threshold t >= 4.00)
";
    assert_eq!(out, expect);
}

#[test]
fn compare_toy_field_gives_dist2_six() {
    let out = stdout_of(&["compare", "--p", "2", "--m", "1", "--t", "2"]);
    assert!(out.contains("dist2,2,6,char | t"));
    assert!(out.contains("lower_bound_single,1,3.000000,-"));
}

#[test]
fn divisibility_mismatch_is_a_diagnostic_with_nonzero_exit() {
    let out = run(&[
        "repair", "--p", "2", "--m", "1", "--t", "3", "--erasures", "0,1", "--scheme",
        "central2",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not divisible"), "stderr: {err}");
}

#[test]
fn auto_falls_back_on_non_correctable_triples() {
    // Positions 22 and 43 are the two non-correctable third points for the
    // fixed pair (0, 1) over GF(64).
    let out = run(&[
        "repair", "--p", "2", "--m", "1", "--t", "6", "--erasures", "0,1,22", "--scheme",
        "auto", "--trials", "2", "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for line in text.lines().skip(1) {
        assert!(line.starts_with("central3-fallback,64,32,0;1;22,"));
        assert!(line.ends_with(",316,true"));
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("fallback=true"));

    // The same pattern under an explicit central3 is refused.
    let strict = run(&[
        "repair", "--p", "2", "--m", "1", "--t", "6", "--erasures", "0,1,22", "--scheme",
        "central3",
    ]);
    assert!(!strict.status.success());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join(format!("trace-repair-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("scenario.cfg");
    std::fs::write(
        &cfg,
        "# toy scenario\np = 2\nm = 1\nt = 4\nerasures = 0,1\nscheme = dist2\ntrials = 4\nseed = 11\n",
    )
    .unwrap();
    let out = bin().arg("repair").arg("--config").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(1).unwrap().starts_with("dist2,16,8,0;1,0,30,true"));

    // A flag overrides the config value.
    let out2 = bin()
        .args(["repair", "--scheme", "central2"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out2.status.success());
    assert!(String::from_utf8_lossy(&out2.stdout)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("central2,16,8,0;1,0,28,true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn erasures_accept_element_notation() {
    // The enumeration runs 0, 1, x, x^2, x^3, ... so x^3 sits at position 4.
    // The message mixes power and coefficient notation ([1,1,0,0] = x^4).
    let out = run(&[
        "repair", "--p", "2", "--m", "1", "--t", "4", "--erasures", "0,x^3", "--scheme",
        "central2", "--message", "x^3,[1,1,0,0],0,x^7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().nth(1).unwrap().starts_with("central2,16,8,0;4,0,28,true"));
}

#[test]
fn field_cap_env_override() {
    // GF(2^21) exceeds the default cap; the env var lifts it.
    let denied = run(&["compare", "--p", "2", "--m", "1", "--t", "21"]);
    assert!(!denied.status.success());
    let allowed = bin()
        .args(["compare", "--p", "2", "--m", "1", "--t", "21"])
        .env("TRACE_REPAIR_MAX_FIELD", "4194304")
        .output()
        .unwrap();
    assert!(
        allowed.status.success(),
        "{}",
        String::from_utf8_lossy(&allowed.stderr)
    );
}
