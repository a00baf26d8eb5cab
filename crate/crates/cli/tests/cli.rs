//! End-to-end checks of the `evidential` binary: argument handling, exit
//! codes, stream separation (documents on stdout, diagnostics on stderr),
//! and byte-level determinism of the benchmark reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use evidential::approx::{bayesian, ApproxMethod};
use evidential::doc::{format_bpa, parse_bpa};

const EXAMPLE: &str = "frame: a b c d e\n\
                       mass 0.50 set a,b\n\
                       mass 0.30 set a,c,d\n\
                       mass 0.10 set c\n\
                       mass 0.05 set c,d\n\
                       mass 0.05 set d,e\n";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_evidential"));
    // Tests control the seed explicitly; the ambient environment must not.
    cmd.env_remove("EVIDENTIAL_SEED");
    cmd
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(mut cmd: Command) -> Run {
    let output = cmd.output().expect("spawning the binary");
    Run {
        code: output.status.code().expect("binary exited without a code"),
        stdout: String::from_utf8(output.stdout).expect("stdout is utf-8"),
        stderr: String::from_utf8(output.stderr).expect("stderr is utf-8"),
    }
}

fn write_doc(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).expect("writing test document");
    path
}

#[test]
fn combine_folds_left_and_reports_each_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let m1 = write_doc(
        dir.path(),
        "m1.bpa",
        "frame: a b\nmass 0.6 set a\nmass 0.4 set a,b\n",
    );
    let m2 = write_doc(
        dir.path(),
        "m2.bpa",
        "frame: a b\nmass 0.5 set b\nmass 0.5 set a,b\n",
    );

    let mut cmd = bin();
    cmd.arg("combine").arg(&m1).arg(&m2);
    let out = run(cmd);

    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    assert_eq!(out.stderr, "step 1: conflict 0.3\n");
    let expected = parse_bpa("frame: a b\nmass 0.6 set a\nmass 0.4 set a,b\n")
        .unwrap()
        .combine(&parse_bpa("frame: a b\nmass 0.5 set b\nmass 0.5 set a,b\n").unwrap())
        .unwrap();
    assert_eq!(out.stdout, format_bpa(&expected));
}

#[test]
fn combine_accepts_more_than_two_documents() {
    let dir = tempfile::tempdir().unwrap();
    let example = write_doc(dir.path(), "m.bpa", EXAMPLE);
    let vacuous = write_doc(
        dir.path(),
        "v.bpa",
        "frame: a b c d e\nmass 1 set a,b,c,d,e\n",
    );

    let mut cmd = bin();
    cmd.arg("combine").arg(&example).arg(&vacuous).arg(&vacuous);
    let out = run(cmd);

    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    assert_eq!(out.stderr, "step 1: conflict 0\nstep 2: conflict 0\n");
    let parsed = parse_bpa(&out.stdout).expect("output parses back");
    assert_eq!(parsed.focal_count(), 5);
    assert!((parsed.total_mass() - 1.0).abs() < 1e-9);
}

#[test]
fn combine_total_conflict_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let m1 = write_doc(dir.path(), "m1.bpa", "frame: a b\nmass 1 set a\n");
    let m2 = write_doc(dir.path(), "m2.bpa", "frame: a b\nmass 1 set b\n");

    let mut cmd = bin();
    cmd.arg("combine").arg(&m1).arg(&m2);
    let out = run(cmd);

    assert_eq!(out.code, 3);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.starts_with("error:"), "stderr: {}", out.stderr);
    assert!(
        out.stderr.contains("total conflict"),
        "stderr: {}",
        out.stderr
    );
}

#[test]
fn combine_rejects_mismatched_frames() {
    let dir = tempfile::tempdir().unwrap();
    let m1 = write_doc(dir.path(), "m1.bpa", "frame: a b\nmass 1 set a\n");
    let m2 = write_doc(dir.path(), "m2.bpa", "frame: a c\nmass 1 set a\n");

    let mut cmd = bin();
    cmd.arg("combine").arg(&m1).arg(&m2);
    let out = run(cmd);

    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("different frames"),
        "stderr: {}",
        out.stderr
    );
}

#[test]
fn malformed_document_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_doc(dir.path(), "bad.bpa", "frame: a b\nmass x set a\n");

    let mut cmd = bin();
    cmd.arg("combine").arg(&bad).arg(&bad);
    let out = run(cmd);

    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("bad.bpa"), "stderr: {}", out.stderr);
    assert!(
        out.stderr.contains("line 2, column 6"),
        "stderr: {}",
        out.stderr
    );
}

#[test]
fn unnormalized_document_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_doc(dir.path(), "low.bpa", "frame: a b\nmass 0.9 set a\n");

    let mut cmd = bin();
    cmd.arg("approx").arg(&bad).args(["--method", "bayes"]);
    let out = run(cmd);

    assert_eq!(out.code, 3);
    assert!(
        out.stderr.contains("masses sum to"),
        "stderr: {}",
        out.stderr
    );
}

#[test]
fn missing_input_exits_one() {
    let mut cmd = bin();
    cmd.arg("combine")
        .arg("/nonexistent/a.bpa")
        .arg("/nonexistent/b.bpa");
    let out = run(cmd);

    assert_eq!(out.code, 1);
    assert!(
        out.stderr.contains("/nonexistent/a.bpa"),
        "stderr: {}",
        out.stderr
    );
}

#[test]
fn approx_bayes_matches_the_library_and_prints_stats() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(dir.path(), "m.bpa", EXAMPLE);

    let mut cmd = bin();
    cmd.arg("approx")
        .arg(&doc)
        .args(["--method", "bayes", "--stats"]);
    let out = run(cmd);

    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    let expected = bayesian(&parse_bpa(EXAMPLE).unwrap());
    assert_eq!(out.stdout, format_bpa(&expected));
    assert_eq!(
        out.stderr,
        "n_original=5\nn_approx=5\nerror1=0.0454545\nerror2=0\nerror3=0\n"
    );
}

#[test]
fn approx_applies_each_reduction_like_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(dir.path(), "m.bpa", EXAMPLE);
    let original = parse_bpa(EXAMPLE).unwrap();
    let cases: [(&[&str], ApproxMethod); 3] = [
        (
            &["--method", "klx", "--k", "2", "--l", "3", "--x", "0.1"],
            ApproxMethod::Klx {
                k: 2,
                l: Some(3),
                x: 0.1,
            },
        ),
        (
            &["--method", "summarize", "--k", "3"],
            ApproxMethod::Summarize { k: 3 },
        ),
        (&["--method", "d1", "--k", "3"], ApproxMethod::D1 { k: 3 }),
    ];

    for (args, method) in cases {
        let mut cmd = bin();
        cmd.arg("approx").arg(&doc).args(args);
        let out = run(cmd);
        assert_eq!(out.code, 0, "args {args:?} stderr: {}", out.stderr);
        assert_eq!(
            out.stdout,
            format_bpa(&method.apply(&original)),
            "args {args:?}"
        );
    }
}

#[test]
fn approx_klx_treats_inf_as_no_upper_cap() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(dir.path(), "m.bpa", EXAMPLE);

    let mut explicit = bin();
    explicit
        .arg("approx")
        .arg(&doc)
        .args(["--method", "klx", "--k", "2", "--l", "inf"]);
    let mut omitted = bin();
    omitted
        .arg("approx")
        .arg(&doc)
        .args(["--method", "klx", "--k", "2"]);

    let explicit = run(explicit);
    let omitted = run(omitted);
    assert_eq!(explicit.code, 0);
    assert_eq!(omitted.code, 0);
    assert_eq!(explicit.stdout, omitted.stdout);
}

#[test]
fn approx_rejects_inapplicable_or_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(dir.path(), "m.bpa", EXAMPLE);
    let rejected: [&[&str]; 7] = [
        &["--method", "klx"],
        &["--method", "summarize"],
        &["--method", "d1"],
        &["--method", "bayes", "--k", "3"],
        &["--method", "summarize", "--k", "3", "--l", "4"],
        &["--method", "d1", "--k", "3", "--x", "0.1"],
        &["--method", "klx", "--k", "2", "--l", "soon"],
    ];

    for args in rejected {
        let mut cmd = bin();
        cmd.arg("approx").arg(&doc).args(args);
        let out = run(cmd);
        assert_eq!(out.code, 2, "args {args:?} stderr: {}", out.stderr);
    }

    // Size bounds below the algorithm's minimum are caught before any work.
    let mut cmd = bin();
    cmd.arg("approx")
        .arg(&doc)
        .args(["--method", "d1", "--k", "1"]);
    let out = run(cmd);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("invalid parameter"),
        "stderr: {}",
        out.stderr
    );
}

#[test]
fn gen_is_deterministic_per_seed() {
    let mut first = bin();
    first.args(["gen", "--seed", "7"]);
    let mut second = bin();
    second.args(["gen", "--seed", "7"]);
    let mut other = bin();
    other.args(["gen", "--seed", "8"]);

    let first = run(first);
    let second = run(second);
    let other = run(other);
    assert_eq!(first.code, 0);
    assert_eq!(first.stdout, second.stdout);
    assert_ne!(first.stdout, other.stdout);

    let bpa = parse_bpa(&first.stdout).expect("generated document parses back");
    assert_eq!(bpa.frame().size(), 32);
    assert_eq!(bpa.focal_count(), 8);
    assert!((bpa.total_mass() - 1.0).abs() < 1e-9);
}

#[test]
fn gen_seed_precedence_is_flag_env_default() {
    let mut flagged = bin();
    flagged.args(["gen", "--seed", "7"]);
    let flagged = run(flagged);

    let mut from_env = bin();
    from_env.args(["gen"]).env("EVIDENTIAL_SEED", "7");
    let from_env = run(from_env);
    assert_eq!(from_env.stdout, flagged.stdout);

    let mut flag_beats_env = bin();
    flag_beats_env
        .args(["gen", "--seed", "7"])
        .env("EVIDENTIAL_SEED", "9");
    let flag_beats_env = run(flag_beats_env);
    assert_eq!(flag_beats_env.stdout, flagged.stdout);

    let mut defaulted = bin();
    defaulted.arg("gen");
    let defaulted = run(defaulted);
    let mut zero = bin();
    zero.args(["gen", "--seed", "0"]);
    let zero = run(zero);
    assert_eq!(defaulted.stdout, zero.stdout);
}

#[test]
fn gen_rejects_impossible_shapes_and_bad_env() {
    let mut too_many = bin();
    too_many.args(["gen", "--frame-size", "2", "--focal-count", "9"]);
    let out = run(too_many);
    assert_eq!(out.code, 2, "stderr: {}", out.stderr);

    let mut empty_frame = bin();
    empty_frame.args(["gen", "--frame-size", "0"]);
    let out = run(empty_frame);
    assert_eq!(out.code, 2, "stderr: {}", out.stderr);

    let mut bad_env = bin();
    bad_env.arg("gen").env("EVIDENTIAL_SEED", "soon");
    let out = run(bad_env);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("EVIDENTIAL_SEED"),
        "stderr: {}",
        out.stderr
    );
}

fn bench_in(dir: &Path, extra: &[&str]) -> Run {
    let mut cmd = bin();
    cmd.arg("bench").args(["--trials", "6", "--seed", "11"]);
    cmd.arg("--out").arg(dir);
    cmd.args(extra);
    run(cmd)
}

fn read_reports(dir: &Path) -> (String, String) {
    (
        fs::read_to_string(dir.join("trials.csv")).expect("trials.csv exists"),
        fs::read_to_string(dir.join("stats.csv")).expect("stats.csv exists"),
    )
}

#[test]
fn bench_reports_are_deterministic_across_runs_and_thread_counts() {
    let root = tempfile::tempdir().unwrap();
    let dirs: Vec<PathBuf> = ["a", "b", "seq", "three"]
        .iter()
        .map(|name| root.path().join(name))
        .collect();

    let out = bench_in(&dirs[0], &[]);
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("wrote"), "stderr: {}", out.stderr);
    assert_eq!(bench_in(&dirs[1], &[]).code, 0);
    assert_eq!(bench_in(&dirs[2], &["--threads", "1"]).code, 0);
    assert_eq!(bench_in(&dirs[3], &["--threads", "3"]).code, 0);

    let baseline = read_reports(&dirs[0]);
    for dir in &dirs[1..] {
        assert_eq!(read_reports(dir), baseline, "{} diverged", dir.display());
    }

    let (trials, stats) = baseline;
    let mut trial_lines = trials.lines();
    assert_eq!(
        trial_lines.next(),
        Some("method,step,trial,n_original,n_approx,error1,error2,error3")
    );
    assert_eq!(trials.lines().count(), 1 + 6 * 5 * 7);

    let mut stat_lines = stats.lines();
    let meta = stat_lines.next().expect("metadata line");
    assert!(
        meta.starts_with("# seed=11 rng=chacha8 track=cumulative "),
        "meta: {meta}"
    );
    assert!(meta.contains("frame_size=32 focal_count=8 lambda=1 combinations=5 trials=6"));
    let header = stat_lines.next().expect("header line");
    assert!(header.starts_with("method,step,trials,orig_mean,orig_min,orig_max,"));
    assert_eq!(stats.lines().count(), 2 + 5 * 7);
}

#[test]
fn bench_stats_cover_every_method_and_step() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bench_in(dir.path(), &[]).code, 0);
    let (_, stats) = read_reports(dir.path());

    let mut seen = Vec::new();
    for line in stats.lines().skip(2) {
        let mut fields = line.split(',');
        let method = fields.next().unwrap().to_string();
        let step: usize = fields.next().unwrap().parse().unwrap();
        seen.push((method, step));
    }
    for method in [
        "D1_8", "D1_30", "Summ_8", "Summ_30", "Bayes", "klx_01", "klx_30",
    ] {
        for step in 1..=5 {
            assert!(
                seen.contains(&(method.to_string(), step)),
                "missing row for {method} step {step}"
            );
        }
    }
}

#[test]
fn bench_track_mode_changes_errors_but_not_the_exact_sizes() {
    let root = tempfile::tempdir().unwrap();
    let cumulative = root.path().join("cumulative");
    let from_exact = root.path().join("from-exact");
    assert_eq!(bench_in(&cumulative, &[]).code, 0);
    assert_eq!(bench_in(&from_exact, &["--track", "from-exact"]).code, 0);

    let (cum_trials, _) = read_reports(&cumulative);
    let (exact_trials, exact_stats) = read_reports(&from_exact);
    assert!(exact_stats
        .lines()
        .next()
        .unwrap()
        .contains("track=from-exact"));

    let mut some_error_differs = false;
    for (left, right) in cum_trials.lines().zip(exact_trials.lines()).skip(1) {
        let left: Vec<&str> = left.split(',').collect();
        let right: Vec<&str> = right.split(',').collect();
        // method, step, trial, and the unreduced size all agree by construction.
        assert_eq!(left[..4], right[..4]);
        if left[5..] != right[5..] {
            some_error_differs = true;
        }
    }
    assert!(
        some_error_differs,
        "both track modes produced identical errors"
    );
}

#[test]
fn bench_config_file_applies_under_flag_overrides() {
    let root = tempfile::tempdir().unwrap();
    let config = write_doc(
        root.path(),
        "run.conf",
        "# small smoke run\n\
         frame_size = 16\n\
         focal_count = 5\n\
         seed = 5\n\
         lambda = 1.5\n\
         combinations = 3\n\
         trials = 4\n\
         track = from-exact\n\
         methods = Bayes, Summ_8\n",
    );

    let configured = root.path().join("configured");
    let mut cmd = bin();
    cmd.arg("bench")
        .arg("--config")
        .arg(&config)
        .args(["--seed", "6"]);
    cmd.arg("--out").arg(&configured);
    let out = run(cmd);
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);

    let flagged = root.path().join("flagged");
    let mut cmd = bin();
    cmd.args([
        "bench",
        "--frame-size",
        "16",
        "--focal-count",
        "5",
        "--seed",
        "6",
        "--lambda",
        "1.5",
        "--combinations",
        "3",
        "--trials",
        "4",
        "--track",
        "from-exact",
        "--methods",
        "Bayes,Summ_8",
    ]);
    cmd.arg("--out").arg(&flagged);
    assert_eq!(run(cmd).code, 0);

    assert_eq!(read_reports(&configured), read_reports(&flagged));
    let (_, stats) = read_reports(&configured);
    assert!(stats.lines().next().unwrap().starts_with("# seed=6 "));
}

#[test]
fn bench_seed_precedence_is_flag_config_env() {
    let root = tempfile::tempdir().unwrap();
    let small = ["--trials", "3", "--combinations", "2", "--methods", "Bayes"];

    let reference = root.path().join("reference");
    let mut cmd = bin();
    cmd.arg("bench").args(["--seed", "5"]).args(small);
    cmd.arg("--out").arg(&reference);
    assert_eq!(run(cmd).code, 0);

    let via_env = root.path().join("via-env");
    let mut cmd = bin();
    cmd.arg("bench").args(small).env("EVIDENTIAL_SEED", "5");
    cmd.arg("--out").arg(&via_env);
    assert_eq!(run(cmd).code, 0);
    assert_eq!(read_reports(&via_env), read_reports(&reference));

    let config = write_doc(root.path(), "seed.conf", "seed = 3\n");
    let config_over_env = root.path().join("config-over-env");
    let mut cmd = bin();
    cmd.arg("bench").arg("--config").arg(&config).args(small);
    cmd.env("EVIDENTIAL_SEED", "5");
    cmd.arg("--out").arg(&config_over_env);
    assert_eq!(run(cmd).code, 0);

    let reference3 = root.path().join("reference3");
    let mut cmd = bin();
    cmd.arg("bench").args(["--seed", "3"]).args(small);
    cmd.arg("--out").arg(&reference3);
    assert_eq!(run(cmd).code, 0);
    assert_eq!(read_reports(&config_over_env), read_reports(&reference3));
}

#[test]
fn bench_rejects_bad_configuration() {
    let root = tempfile::tempdir().unwrap();

    let unknown = write_doc(root.path(), "bad.conf", "trials = 4\nworkers = 2\n");
    let mut cmd = bin();
    cmd.arg("bench")
        .arg("--config")
        .arg(&unknown)
        .arg("--out")
        .arg(root.path());
    let out = run(cmd);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "stderr: {}", out.stderr);

    for args in [
        &["--threads", "0"][..],
        &["--track", "sideways"][..],
        &["--methods", "Bayes,Mystery"][..],
    ] {
        let mut cmd = bin();
        cmd.arg("bench").args(args).arg("--out").arg(root.path());
        let out = run(cmd);
        assert_eq!(out.code, 2, "args {args:?} stderr: {}", out.stderr);
    }
}
