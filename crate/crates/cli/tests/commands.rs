use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use ccdm::ranker::{bits_to_value, encode_index, unrank};
use ccdm::{CodeParams, Symbol, TypeIndex};
use ccdm_cli::files::{BitBlockFile, SymbolBlockFile};
use ccdm_cli::selftest::{self, Config};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const TARGET: &str = "0.0722\n0.1654\n0.3209\n0.4415\n";

fn ccdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccdm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace {
            dir: TempDir::new().unwrap(),
        };
        ws.put("target.txt", TARGET.as_bytes());
        ws.put("half.txt", b"[0.5, 0.5]");
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }

    fn put(&self, name: &str, data: &[u8]) {
        fs::write(self.path(name), data).unwrap();
    }

    fn get(&self, name: &str) -> Vec<u8> {
        fs::read(self.path(name)).unwrap()
    }

    fn run(&self, args: &[&str]) -> Output {
        let owned: Vec<String> = args
            .iter()
            .map(|a| match a.strip_prefix('@') {
                Some(name) => self.arg(name),
                None => a.to_string(),
            })
            .collect();
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        ccdm(&refs)
    }
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn quantize_reports_the_code_parameters() {
    let ws = Workspace::new();
    let out = ws.run(&["--json", "quantize", "--dist", "@target.txt", "--n", "10"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["counts"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(v["m"], 13);
    assert_eq!(v["type_class_size"], "12600");

    let v = stdout_json(&ws.run(&["--json", "quantize", "--dist", "@half.txt", "--n", "4"]));
    assert_eq!(v["counts"], serde_json::json!([2, 2]));
    assert_eq!(v["m"], 2);

    assert_eq!(
        code(&ws.run(&["quantize", "--dist", "@half.txt", "--n", "0"])),
        2
    );
    assert_eq!(
        code(&ws.run(&["quantize", "--dist", "@missing.txt", "--n", "4"])),
        1
    );
    ws.put("bad.txt", b"0.5\nx\n");
    assert_eq!(
        code(&ws.run(&["quantize", "--dist", "@bad.txt", "--n", "4"])),
        2
    );
    ws.put("neg.txt", b"1.5\n-0.5\n");
    assert_eq!(
        code(&ws.run(&["quantize", "--dist", "@neg.txt", "--n", "4"])),
        2
    );
    assert_eq!(code(&ws.run(&["quantize", "--n", "4"])), 2);
}

#[test]
fn worked_example_through_files() {
    let ws = Workspace::new();
    ws.put("in.bits", b"m=2 blocks=1\n\x40");
    let out = ws.run(&[
        "encode",
        "--dist",
        "@half.txt",
        "--n",
        "4",
        "--in",
        "@in.bits",
        "--out",
        "@out.sym",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(ws.get("out.sym"), b"n=4 k=2 blocks=1\n\x00\x01\x01\x00");

    ws.put("q.sym", b"n=4 k=2 blocks=1\n\x01\x00\x00\x01");
    let out = ws.run(&[
        "decode",
        "--dist",
        "@half.txt",
        "--n",
        "4",
        "--in",
        "@q.sym",
        "--out",
        "@q.bits",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(ws.get("q.bits"), b"m=2 blocks=1\n\x80");

    ws.put("bad.sym", b"n=4 k=2 blocks=1\n\x00\x01\x00\x01");
    let args = [
        "--json",
        "decode",
        "--dist",
        "@half.txt",
        "--n",
        "4",
        "--in",
        "@bad.sym",
        "--out",
        "@bad.bits",
    ];
    assert_eq!(code(&ws.run(&args[1..])), 3);
    let mut lenient = args.to_vec();
    lenient.push("--lenient");
    let out = ws.run(&lenient);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["warnings"], 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn empty_input_gives_empty_output() {
    let ws = Workspace::new();
    ws.put("in.bits", b"m=2 blocks=0\n");
    let out = ws.run(&[
        "encode",
        "--dist",
        "@half.txt",
        "--n",
        "4",
        "--in",
        "@in.bits",
        "--out",
        "@out.sym",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(ws.get("out.sym"), b"n=4 k=2 blocks=0\n");
}

fn random_bits(m: u64, blocks: usize, rng: &mut impl Rng) -> BitBlockFile {
    BitBlockFile {
        m,
        blocks: (0..blocks)
            .map(|_| (0..m).map(|_| rng.gen()).collect())
            .collect(),
    }
}

#[test]
fn pipeline_is_the_identity() {
    let ws = Workspace::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (dist, n, blocks) in [
        ("target.txt", 1000u64, 100usize),
        ("target.txt", 37, 50),
        ("half.txt", 4, 20),
    ] {
        let v = stdout_json(&ws.run(&[
            "--json",
            "quantize",
            "--dist",
            &format!("@{dist}"),
            "--n",
            &n.to_string(),
        ]));
        let m = v["m"].as_u64().unwrap();
        let input = random_bits(m, blocks, &mut rng).to_bytes();
        ws.put("in.bits", &input);
        let n = n.to_string();
        let d = format!("@{dist}");
        let out = ws.run(&[
            "encode", "--dist", &d, "--n", &n, "--in", "@in.bits", "--out", "@mid.sym",
        ]);
        assert_eq!(code(&out), 0);
        let mid = SymbolBlockFile::parse(&ws.get("mid.sym")).expect("encoder output re-parses");
        assert_eq!(mid.blocks.len(), blocks);
        let out = ws.run(&[
            "decode",
            "--dist",
            &d,
            "--n",
            &n,
            "--in",
            "@mid.sym",
            "--out",
            "@back.bits",
        ]);
        assert_eq!(code(&out), 0);
        assert_eq!(ws.get("back.bits"), input);
    }
}

#[test]
fn corrupted_files_are_rejected_with_format_errors() {
    let ws = Workspace::new();
    let enc = |file: &str| {
        code(&ws.run(&[
            "encode",
            "--dist",
            "@half.txt",
            "--n",
            "4",
            "--in",
            &format!("@{file}"),
            "--out",
            "@o",
        ]))
    };
    let dec = |file: &str| {
        code(&ws.run(&[
            "decode",
            "--dist",
            "@half.txt",
            "--n",
            "4",
            "--in",
            &format!("@{file}"),
            "--out",
            "@o",
        ]))
    };
    for (i, data) in [
        &b"m=3 blocks=1\n\x40"[..],
        b"m=2 blocks=1\n\x41",
        b"m=2 blocks=2\n\x40",
        b"m=2 blocks=1\n\x40\x00",
        b"m=2 blocks=1",
        b"blocks=1 m=2\n\x40",
        b"",
    ]
    .iter()
    .enumerate()
    {
        let name = format!("b{i}");
        ws.put(&name, data);
        assert_eq!(enc(&name), 2, "{:?}", String::from_utf8_lossy(data));
    }
    for (i, data) in [
        &b"n=4 k=2 blocks=1\n\x00\x01\x02\x00"[..],
        b"n=4 k=3 blocks=1\n\x00\x01\x01\x00",
        b"n=5 k=2 blocks=1\n\x00\x01\x01\x00\x00",
        b"n=4 k=2 blocks=1\n\x00\x01\x01",
        b"n=4 k=2\n\x00\x01\x01\x00",
    ]
    .iter()
    .enumerate()
    {
        let name = format!("s{i}");
        ws.put(&name, data);
        assert_eq!(dec(&name), 2, "{:?}", String::from_utf8_lossy(data));
    }
    ws.put("wrongcomp", b"n=4 k=2 blocks=1\n\x00\x00\x00\x01");
    assert_eq!(dec("wrongcomp"), 3);
    assert_eq!(enc("nothere"), 1);
}

#[test]
fn sweep_writes_reports() {
    let ws = Workspace::new();
    let out = ws.run(&[
        "sweep",
        "--dist",
        "@target.txt",
        "--grid",
        "preset",
        "--format",
        "csv",
        "--out",
        "@r.csv",
    ]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(ws.get("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 51);
    assert!(lines[1].starts_with("10,13,1.3,"));
    assert!(lines[1].contains(",0.562126661727604,"));

    let out = ws.run(&[
        "sweep",
        "--dist",
        "@half.txt",
        "--grid",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["rate"], 0.5);

    ws.put("bad.txt", b"[0.5, oops]");
    assert_eq!(code(&ws.run(&["sweep", "--dist", "@bad.txt"])), 2);
    assert_eq!(
        code(&ws.run(&["sweep", "--dist", "@half.txt", "--grid", "4,0"])),
        2
    );
    assert_eq!(
        code(&ws.run(&["sweep", "--dist", "@half.txt", "--format", "xml"])),
        2
    );
}

#[test]
fn selftest_passes_and_shows_the_worked_example() {
    let out = ccdm(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let out = ccdm(&["selftest", "--max-n", "4"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("codebook 0011 0110 1001 1100"));
}

/// Picks the class member at `floor(j |T| / 2^m)` instead of rounding up.
fn floor_encoder(bits: &[bool], params: &CodeParams) -> ccdm::Result<Vec<Symbol>> {
    let ceil = encode_index(&bits_to_value(bits), params).0;
    let exact = (&ceil << params.m()) == bits_to_value(bits) * params.type_class_size();
    let i = if exact || ceil == 0u32.into() {
        ceil
    } else {
        ceil - 1u32
    };
    unrank(&TypeIndex(i), params.composition())
}

#[test]
fn selftest_catches_a_floor_encoder() {
    let report = selftest::run(&Config::default(), floor_encoder);
    assert_eq!(report.exit_code(), 1);
    let oracle = &report.suites[0];
    assert!(oracle.failures > 0);
    assert!(oracle.first_failure.is_some());
    assert_eq!(
        selftest::run(&Config::default(), selftest::STREAMING).exit_code(),
        0
    );
}
