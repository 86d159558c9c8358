use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strip-homology")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn betti_of_three_disks() {
    assert_eq!(stdout(&["betti", "--n", "3", "--w", "2"]).trim(), "1,7");
    assert_eq!(stdout(&["betti", "--n", "3", "--w", "2", "--oracle"]).trim(), "1,7");
    let rows = stdout(&["betti", "--n", "4", "--w", "1..4"]);
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines, vec!["w,b0,b1,b2,b3", "1,24,0,0,0", "2,1,31,6,0", "3,1,6,29,0", "4,1,6,11,6"]);
    let json = stdout(&["betti", "--n", "3", "--w", "2", "--format", "json"]);
    assert!(json.contains('7'), "{json}");
}

#[test]
fn width_one_is_discrete() {
    assert_eq!(stdout(&["betti", "--n", "5", "--w", "1"]).trim(), "120");
}

#[test]
fn formula_evaluation() {
    assert_eq!(stdout(&["formula", "--j", "1", "--w", "2", "--eval", "3"]).trim(), "7");
    assert_eq!(stdout(&["formula", "--j", "1", "--w", "2", "--eval", "12"]).trim(), "114687");
    let text = stdout(&["formula", "--j", "1", "--w", "2"]);
    assert!(text.contains("C(n,"), "{text}");
}

#[test]
fn barcode_json_for_twelve_disks() {
    let json = stdout(&["barcode", "--n", "12", "--degrees", "0..1", "--format", "json"]);
    assert!(json.contains("\"479001599\""), "{json}");
    assert!(json.contains("\"114621\""));
    assert!(json.contains("\"66\""));
    assert!(!json.contains("\"degree\": 2"));
    let svg = stdout(&["barcode", "--n", "4", "--format", "svg"]);
    assert!(svg.starts_with("<svg"));
}

#[test]
fn unordered_table() {
    let csv = stdout(&["unordered", "--n", "3", "--w", "2", "--p", "2"]);
    assert_eq!(csv.lines().next(), Some("degree,dim"));
    assert!(csv.contains("0,1") && csv.contains("1,2"), "{csv}");
}

#[test]
fn critical_counts_and_triplets() {
    let csv = stdout(&["critical", "--kind", "strip", "--n", "3", "--w", "2"]);
    assert!(csv.contains("1,7"), "{csv}");
    let t = stdout(&["critical", "--kind", "strip", "--n", "3", "--w", "2", "--boundary", "1"]);
    assert!(t.starts_with("1 6 12 24"), "{t}");
    let wt = stdout(&["critical", "--kind", "weighted", "--weights", "1,1,1", "--k", "2"]);
    assert!(wt.lines().count() >= 2, "{wt}");
}

#[test]
fn snf_of_exported_triplets() {
    let dir = std::env::temp_dir().join(format!("strip-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d1.txt");
    let p = path.to_str().unwrap();
    stdout(&["critical", "--n", "3", "--w", "2", "--boundary", "1", "-o", p]);
    let snf = stdout(&["snf", "--input", p]);
    assert!(snf.contains("\"rank\":5") || snf.contains("\"rank\": 5"), "{snf}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn basis_listing() {
    let count = stdout(&["basis", "--n", "3", "--w", "2", "--j", "1", "--count"]);
    assert_eq!(count.trim(), "7");
    let json = stdout(&["basis", "--n", "3", "--w", "2", "--j", "1"]);
    assert!(json.contains("\"factors\""));
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [&["barcode", "--n", "7", "--format", "csv"][..], &["betti", "--n", "6", "--w", "1..6"][..]] {
        let one = stdout(&[args, &["--threads", "1"]].concat());
        assert_eq!(one, stdout(args));
    }
}

#[test]
fn quick_self_check_passes() {
    let text = stdout(&["verify", "--level", "quick"]);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn bad_input_exits_nonzero() {
    for args in [
        &["betti", "--n", "3", "--w", "5..2"][..],
        &["betti", "--n", "3", "--w", "x"],
        &["formula", "--j", "1", "--w", "1"],
        &["critical", "--kind", "weighted", "--weights", "2,1", "--k", "2"],
        &["snf", "--input", "/nonexistent/triplets"],
        &["nosuchcommand"],
    ] {
        let out = run(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn cell_limit_flag_reaches_the_oracle() {
    let out = run(&["--cell-limit", "10", "betti", "--n", "4", "--w", "2", "--oracle"]);
    assert_eq!(out.status.code(), Some(2));
}
