mod common;

use std::collections::BTreeSet;
use std::fs;

use common::golden;

#[test]
fn outputs_match_checked_in_files() {
    let bad = golden::mismatches();
    assert!(bad.is_empty(), "golden mismatches: {bad:?}");
}

#[test]
fn corpus_covers_every_subcommand_in_both_formats() {
    let subcommands = ["check", "fv", "fs", "rename", "subst", "msubst", "interpret", "wf", "sheaf-report"];
    let mut seen = BTreeSet::new();
    for cmd in golden::cases() {
        let text = fs::read_to_string(&cmd).unwrap();
        let args: Vec<&str> = text.lines().collect();
        let json = args.contains(&"--json");
        for s in subcommands {
            if args.contains(&s) {
                seen.insert((s, json));
            }
        }
    }
    for s in subcommands {
        assert!(seen.contains(&(s, false)), "{s} lacks a text case");
        assert!(seen.contains(&(s, true)), "{s} lacks a --json case");
    }
}

#[test]
fn json_output_is_one_sorted_object() {
    for cmd in golden::cases() {
        let text = fs::read_to_string(&cmd).unwrap();
        if !text.lines().any(|l| l == "--json") {
            continue;
        }
        let out = golden::render(&cmd);
        let stdout = out.split("--- stdout\n").nth(1).unwrap().split("--- stderr\n").next().unwrap();
        let v: serde_json::Value = serde_json::from_str(stdout).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["diagnostics", "ok", "result"], "{}", cmd.display());
        assert_eq!(golden::render(&cmd), out);
    }
}
