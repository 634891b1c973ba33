use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use compreader::corpus::write_corpus;
use compreader::embeddings::EmbeddingStore;
use compreader::synthetic::{author_id, synthetic_corpus, SyntheticConfig};
use tempfile::TempDir;

const SMALL_MODEL: &str = r#"
[model]
mode = "compositional_reader"
d_model = 8
n_heads = 2
d_k = 4
d_v = 4
n_layers = 1
head_hidden = 8

[train]
epochs_per_query_batch = 2
max_batches = 1
tasks = ["authorship"]

[grade_predict]
folds = 3
seeds = [5]
hidden = 8
epochs = 5
learning_rate = 0.01
momentum = 0.4
"#;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let cfg = SyntheticConfig {
            authors: 6,
            ..SyntheticConfig::default()
        };
        write_corpus(&synthetic_corpus(&cfg).unwrap(), dir.path().join("corpus")).unwrap();
        fs::write(dir.path().join("pipeline.toml"), SMALL_MODEL).unwrap();
        let grades: String = (0..6)
            .map(|a| format!("{},NRA,{}\n", author_id(a), ["A+", "F"][a % 2]))
            .collect();
        fs::write(dir.path().join("grades.csv"), format!("politician,source,grade\n{grades}")).unwrap();
        Fixture { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn run(&self, out: &str, args: &[&str]) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_compreader"));
        cmd.env_remove("COMPREADER_OUT")
            .arg("--config")
            .arg(self.path("pipeline.toml"))
            .arg("--corpus")
            .arg(self.path("corpus"))
            .arg("--out")
            .arg(self.path(out))
            .args(args);
        cmd.output().unwrap()
    }

    fn ok(&self, out: &str, args: &[&str]) -> String {
        let o = self.run(out, args);
        assert!(
            o.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        String::from_utf8(o.stdout).unwrap()
    }
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.clone(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn validate_corpus_prints_summary() {
    let f = Fixture::new();
    let stdout = f.ok("out", &["validate-corpus"]);
    assert!(stdout.contains("documents\t"), "{stdout}");
    assert!(stdout.contains("author_entities\t6"), "{stdout}");
    assert_eq!(fs::read_to_string(f.path("out/corpus_summary.tsv")).unwrap(), stdout);
}

/// Burst days exceed mean plus population standard deviation; a start locks
/// out the following `skip` days; events end before the next start and span
/// at most ten days.
fn brute_force_events(counts: &[i64], skip: usize) -> Vec<(usize, usize)> {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<i64>() as f64 / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n;
    let thr = mean + var.sqrt();
    let mut starts = Vec::new();
    let mut day = 0;
    while day < counts.len() {
        if counts[day] as f64 > thr {
            starts.push(day);
            day += skip + 1;
        } else {
            day += 1;
        }
    }
    let mut events = Vec::new();
    for (k, &s) in starts.iter().enumerate() {
        let mut end = (s + 9).min(counts.len() - 1);
        if k + 1 < starts.len() {
            end = end.min(starts[k + 1] - 1);
        }
        events.push((s, end));
    }
    events
}

#[test]
fn detect_events_matches_brute_force() {
    let f = Fixture::new();
    let counts: Vec<i64> = vec![1, 2, 9, 8, 1, 0, 2, 1, 1, 7, 1, 1, 12, 1, 0, 1, 2, 1, 9, 1];
    let start = chrono::NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let mut tsv = String::new();
    for (i, c) in counts.iter().enumerate() {
        tsv.push_str(&format!("guns\t{}\t{c}\n", start + chrono::Days::new(i as u64)));
    }
    fs::write(f.path("counts.tsv"), tsv).unwrap();
    let stdout = f.ok(
        "out",
        &["detect-events", "--skip-days", "7", "--counts", f.path("counts.tsv").to_str().unwrap()],
    );
    let expected: Vec<String> = brute_force_events(&counts, 7)
        .iter()
        .enumerate()
        .map(|(k, (s, e))| {
            format!(
                "guns\t{k}\t{}\t{}",
                start + chrono::Days::new(*s as u64),
                start + chrono::Days::new(*e as u64)
            )
        })
        .collect();
    assert!(!expected.is_empty());
    let got: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(got, expected);
}

#[test]
fn train_twice_gives_identical_artifacts() {
    let f = Fixture::new();
    f.ok("a", &["train", "--seed", "4056"]);
    f.ok("b", &["train", "--seed", "4056"]);
    for name in ["metrics.tsv", "checkpoint.bin", "splits.tsv"] {
        let a = fs::read(f.path(&format!("a/{name}"))).unwrap();
        let b = fs::read(f.path(&format!("b/{name}"))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs");
    }
    let log = fs::read_to_string(f.path("a/metrics.tsv")).unwrap();
    assert!(log.starts_with("batch\tepoch\tsplit\ttask\tsamples\tloss\taccuracy\tf1_positive\n"));
    assert!(log.contains("\tbest\t"));
}

#[test]
fn unseeded_train_and_trim_are_errors() {
    let f = Fixture::new();
    let o = f.run("out", &["train"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    let o = f.run(
        "out",
        &["build-graph", "--issue", "iss0", "--entity", "pol00", "--keep-fraction", "0.5"],
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let f = Fixture::new();
    let o = f.run("out", &["validate-corpus", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flag_overrides_config_seed_and_is_logged() {
    let f = Fixture::new();
    let with_seed = format!("seed = 1\n{SMALL_MODEL}");
    fs::write(f.path("seeded.toml"), with_seed).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_compreader"))
        .env_remove("COMPREADER_OUT")
        .args(["--config", f.path("seeded.toml").to_str().unwrap()])
        .args(["--corpus", f.path("corpus").to_str().unwrap()])
        .args(["--out", f.path("flag").to_str().unwrap()])
        .args(["train", "--seed", "4056"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed 4056 overrides config value 1"));
    f.ok("plain", &["train", "--seed", "4056"]);
    assert_eq!(
        fs::read(f.path("flag/checkpoint.bin")).unwrap(),
        fs::read(f.path("plain/checkpoint.bin")).unwrap()
    );
}

#[test]
fn environment_sets_output_root() {
    let f = Fixture::new();
    let o = Command::new(env!("CARGO_BIN_EXE_compreader"))
        .env("COMPREADER_OUT", f.path("from_env"))
        .args(["--corpus", f.path("corpus").to_str().unwrap()])
        .arg("validate-corpus")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(f.path("from_env/corpus_summary.tsv").exists());
}

#[test]
fn seeded_graph_build_is_idempotent() {
    let f = Fixture::new();
    let args = [
        "build-graph", "--issue", "iss0", "--entity", "pol00,pol01", "--event", "0",
        "--keep-fraction", "0.5", "--seed", "3",
    ];
    f.ok("a", &args);
    f.ok("b", &args);
    for name in ["graph.tsv", "adjacency.txt"] {
        assert_eq!(
            fs::read(f.path(&format!("a/{name}"))).unwrap(),
            fs::read(f.path(&format!("b/{name}"))).unwrap()
        );
    }
}

#[test]
fn evaluation_commands_run_and_leave_corpus_untouched() {
    let f = Fixture::new();
    let before = snapshot(&f.path("corpus"));
    f.ok("t", &["train", "--seed", "4056"]);
    let ckpt = f.path("t/checkpoint.bin");
    let ckpt = ckpt.to_str().unwrap();
    let grades = f.path("grades.csv");
    let grades = grades.to_str().unwrap();

    let stdout = f.ok(
        "e",
        &[
            "evaluate-paraphrase", "--checkpoint", ckpt, "--grades", grades, "--issue", "iss0",
            "--entity", "ent00", "--positive", "i support ent00", "--negative", "i oppose ent00",
        ],
    );
    assert!(stdout.starts_with("accuracy\t"), "{stdout}");
    let rows = fs::read_to_string(f.path("e/paraphrase.tsv")).unwrap();
    assert_eq!(rows.lines().count(), 7);

    let stdout = f.ok("e", &["evaluate-grades", "--checkpoint", ckpt, "--grades", grades, "--issue", "iss0"]);
    assert!(stdout.contains("test_mean"));

    let stdout = f.ok("e", &["descriptors", "--checkpoint", ckpt, "--issue", "iss0", "--entity", "pol00"]);
    assert!(stdout.lines().count() > 1, "{stdout}");

    let stdout = f.ok("e", &["project", "--checkpoint", ckpt, "--issue", "iss1"]);
    assert_eq!(stdout.lines().count(), 6);

    f.ok("e", &["export-embeddings", "--checkpoint", ckpt]);
    let store = EmbeddingStore::open(f.path("e/legislators.emb")).unwrap();
    assert_eq!(store.len(), 6);
    assert_eq!(store.get("pol03").unwrap().dim(), (1, 8));

    let stdout = f.ok("e", &["ablate", "--grades", grades, "--issue", "iss0"]);
    assert_eq!(stdout.lines().count(), 8, "{stdout}");

    let stdout = f.ok("e2", &["ablate", "--grades", grades, "--issue", "iss0", "--exclude-doc-types", "tweet"]);
    assert!(stdout.contains("custom\ttweet\t"));

    assert_eq!(before, snapshot(&f.path("corpus")));
}

#[test]
fn ablating_every_author_type_fails() {
    let f = Fixture::new();
    let o = f.run(
        "out",
        &[
            "build-graph", "--issue", "iss0", "--entity", "pol00",
            "--exclude-doc-types", "tweet,press_release,perspective",
        ],
    );
    assert!(!o.status.success());
}
