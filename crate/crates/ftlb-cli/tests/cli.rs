use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ftlb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftlb")).args(args).env_remove("FTLB_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const C5: &str = "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n";

fn write_c5(dir: &Path) -> String {
    let p = dir.join("c5.txt");
    fs::write(&p, C5).unwrap();
    p.to_str().unwrap().to_owned()
}

fn build(dir: &Path, input: &str, scheme: &str, extra: &[&str]) -> (Output, String) {
    let out = dir.join(format!("{scheme}.ftlb")).to_str().unwrap().to_owned();
    let mut args = vec!["build", "--scheme", scheme, "--input", input, "--out", &out];
    args.extend_from_slice(extra);
    (ftlb(&args), out)
}

#[test]
fn build_reports_and_writes_five_records() {
    let d = tempfile::tempdir().unwrap();
    let g = write_c5(d.path());
    let (o, out) = build(d.path(), &g, "2vft", &[]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!(line.starts_with("n=5 m=5 scheme=2vft max_bits="), "{line}");
    let labels = ftlabel::archive::Labels::from_archive(
        &mut ftlabel::archive::ArchiveReader::open(std::io::Cursor::new(fs::read(out).unwrap())).unwrap(),
    )
    .unwrap();
    assert_eq!(labels.n(), 5);
}

#[test]
fn query_from_archive_alone() {
    let d = tempfile::tempdir().unwrap();
    let g = write_c5(d.path());
    let (_, out) = build(d.path(), &g, "2vft", &[]);
    fs::remove_file(&g).unwrap();
    let q = |u: &str, v: &str, fail: &str| {
        let mut a = vec!["query", "--labels", &out, "--u", u, "--v", v];
        if !fail.is_empty() {
            a.extend(["--fail", fail]);
        }
        ftlb(&a)
    };
    let o = q("0", "3", "1,2");
    assert_eq!((code(&o), stdout(&o).trim()), (0, "connected"));
    let o = q("0", "2", "1,3");
    assert_eq!((code(&o), stdout(&o).trim()), (1, "disconnected"));
    let o = q("2", "2", "");
    assert_eq!((code(&o), stdout(&o).trim()), (0, "connected"));
    assert_eq!(code(&q("0", "3", "1,2,4")), 3);
    assert_eq!(code(&q("0", "9", "")), 4);
}

#[test]
fn randomized_schemes_need_seed() {
    let d = tempfile::tempdir().unwrap();
    let g = write_c5(d.path());
    let (o, _) = build(d.path(), &g, "fvft", &["--f", "3"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    let (o, _) = build(d.path(), &g, "2vft", &["--f", "3"]);
    assert_eq!(code(&o), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_ftlb"))
        .args(["build", "--scheme", "fvft", "--f", "3", "--input", &g, "--out"])
        .arg(d.path().join("env.ftlb"))
        .env("FTLB_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn rebuild_is_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let g = write_c5(d.path());
    for (scheme, extra) in [("2vft", vec![]), ("fvft", vec!["--f", "3", "--seed", "11"]), ("eft", vec!["--seed", "11"])] {
        let (_, a) = build(d.path(), &g, scheme, &extra);
        let first = fs::read(&a).unwrap();
        let (_, b) = build(d.path(), &g, scheme, &extra);
        assert_eq!(first, fs::read(&b).unwrap(), "{scheme}");
    }
}

#[test]
fn parse_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("bad.txt");
    fs::write(&p, "3 2\n0 1\n").unwrap();
    let (o, _) = build(d.path(), p.to_str().unwrap(), "1vft", &[]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&ftlb(&["build", "--scheme", "nope"])), 2);
}

fn gnp_file(dir: &Path, n: usize, p: f64, seed: u64) -> String {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = ftlabel::gen::gnp(n, p, &mut rng);
    let path = dir.join(format!("g{n}.txt"));
    fs::write(&path, g.to_edge_list()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn verify_exhaustive_2vft() {
    let d = tempfile::tempdir().unwrap();
    let g = gnp_file(d.path(), 18, 0.25, 3);
    let o = ftlb(&["verify", "--scheme", "2vft", "--input", &g, "--exhaustive"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("mismatches=0"), "{s}");
    assert!(s.contains("coverage C2="), "{s}");
}

#[test]
fn verify_samples_fvft_reports_rate() {
    let d = tempfile::tempdir().unwrap();
    let g = gnp_file(d.path(), 30, 0.2, 4);
    let o = ftlb(&["verify", "--scheme", "fvft", "--f", "3", "--seed", "2", "--input", &g, "--samples", "10000"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("queries=10000") && s.contains("error_rate="), "{s}");
}

#[test]
fn verify_refuses_large_exhaustive_and_flags_corruption() {
    let d = tempfile::tempdir().unwrap();
    let big = gnp_file(d.path(), 30, 0.2, 5);
    assert_eq!(code(&ftlb(&["verify", "--scheme", "2vft", "--input", &big, "--exhaustive"])), 3);
    let g = gnp_file(d.path(), 12, 0.3, 6);
    let o = ftlb(&["verify", "--scheme", "2vft", "--input", &g, "--exhaustive", "--corrupt", "3"]);
    assert_ne!(code(&o), 0);
}

#[test]
fn stats_csv() {
    let o = ftlb(&["stats", "--scheme", "1vft", "--family", "cycle", "--n-list", "64,256"]);
    assert_eq!(code(&o), 0);
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap().get(8), Some("predicted_ratio"));
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let max: Vec<usize> = rows.iter().map(|x| x[4].parse().unwrap()).collect();
    assert!(max[1] < 2 * max[0], "{max:?}");
    let o = ftlb(&["bench", "--scheme", "fvft", "--f", "3", "--family", "wheel", "--n-list", "32,64"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("slope"));
}
