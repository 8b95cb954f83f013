use std::path::{Path, PathBuf};
use std::process::Command;

use hypiso_cli::report::{find_certificate, read_records, Record};

fn worked() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/worked.toml")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn hypiso(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hypiso")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn worked_system_combines_to_f2g2() {
    let w = worked();
    let (status, table) = hypiso(&["combine", "-i", path(&w)]);
    assert_eq!(status, 0, "{table}");
    assert!(table.contains("certificate: f^2 g^2"));

    let (status, text) = hypiso(&["combine", "-i", path(&w), "--format", "records"]);
    assert_eq!(status, 0);
    let records = read_records(&text).unwrap();
    let cert = find_certificate(&records).unwrap();
    assert_eq!(cert.word.to_string(), "f^2 g^2");
    assert_eq!(records.last(), Some(&Record::Exit { status: 0 }));
}

#[test]
fn records_are_byte_identical_across_runs() {
    let w = worked();
    for cmd in ["classify", "combine", "delta", "dynamics"] {
        let a = hypiso(&[cmd, "-i", path(&w), "--format", "records", "--seed", "5"]);
        let b = hypiso(&[cmd, "-i", path(&w), "--format", "records", "--seed", "5"]);
        assert_eq!(a, b, "{cmd}");
    }
}

#[test]
fn certificates_round_trip_and_reverify() {
    let w = worked();
    let (_, text) = hypiso(&["combine", "-i", path(&w), "--format", "records"]);
    let records = read_records(&text).unwrap();
    let again = read_records(&hypiso_cli::report::write_records(&records)).unwrap();
    assert_eq!(records, again);

    let rec = scratch("worked.records", &text);
    let (status, table) = hypiso(&["--verify", path(&rec), "-i", path(&w)]);
    assert_eq!(status, 0, "{table}");
    assert!(table.contains("verified"));

    let forged = text.replacen(r#""cosh":"47/2""#, r#""cosh":"49/2""#, 1);
    assert_ne!(forged, text, "record layout changed");
    let rec = scratch("forged.records", &forged);
    let (status, _) = hypiso(&["--verify", path(&rec), "-i", path(&w)]);
    assert_eq!(status, 1);
}

#[test]
fn tree_actions_have_zero_delta() {
    let cfg = scratch(
        "trees.toml",
        r#"
format = "hypiso-config v1"
generators = ["f", "g"]

[[action]]
model = "bass-serre"
m = 2
n = 3
images = { f = "s t", g = "s" }

[[action]]
model = "cayley-tree"
rank = 2
images = { f = "a", g = "b" }
"#,
    );
    let (status, text) = hypiso(&["delta", "-i", path(&cfg), "--format", "records"]);
    assert_eq!(status, 0);
    let deltas: Vec<_> = read_records(&text)
        .unwrap()
        .into_iter()
        .filter_map(|r| match r {
            Record::Delta { four_point, insize, .. } => Some((four_point.delta, insize.delta)),
            _ => None,
        })
        .collect();
    assert_eq!(deltas, vec![(0.0, 0.0), (0.0, 0.0)]);
}

#[test]
fn parabolic_generators_stop_the_search() {
    let cfg = scratch(
        "parabolic.toml",
        r#"
format = "hypiso-config v1"
generators = ["f", "g"]

[[action]]
name = "cusp"
model = "half-plane"
images = { f = [[1, 1], [0, 1]], g = [[2, 1], [1, 1]] }
"#,
    );
    let (status, table) = hypiso(&["combine", "-i", path(&cfg)]);
    assert_eq!(status, 3, "{table}");
    assert!(table.contains("cusp"), "{table}");
    assert!(table.contains('f'), "{table}");
}

#[test]
fn bad_determinant_is_a_validation_error() {
    let text = std::fs::read_to_string(worked()).unwrap().replacen(r#"[["2", "1"], ["1", "1"]]"#, r#"[["2", "1"], ["1", "2"]]"#, 1);
    let cfg = scratch("det3.toml", &text);
    let (status, text) = hypiso(&["classify", "-i", path(&cfg), "--format", "records"]);
    assert_eq!(status, 1);
    let records = read_records(&text).unwrap();
    assert!(records.iter().any(|r| matches!(r,
        Record::Error { kind, message } if kind == "config" && message.contains("action[0].images.f"))));
}

#[test]
fn unknown_generators_are_rejected() {
    let text = std::fs::read_to_string(worked()).unwrap().replace("generators = [\"f\", \"g\"]", "generators = [\"f\", \"g\"]\nwords = [\"f h\"]");
    let cfg = scratch("unknown.toml", &text);
    let (status, table) = hypiso(&["classify", "-i", path(&cfg)]);
    assert_eq!(status, 1);
    assert!(table.contains("words[0]") && table.contains("\"h\""), "{table}");
}

#[test]
fn flags_override_the_schedule() {
    let text = std::fs::read_to_string(worked()).unwrap() + "\n[schedule]\nmax_exponent = 7\nseed = 9\n";
    let cfg = scratch("schedule.toml", &text);
    let (_, out) = hypiso(&["classify", "-i", path(&cfg), "--format", "records", "--seed", "3"]);
    let records = read_records(&out).unwrap();
    match &records[1] {
        Record::Command { max_exponent, seed, .. } => assert_eq!((*max_exponent, *seed), (7, 3)),
        other => panic!("{other:?}"),
    }
}
