//! Runs every example binary that `cargo test` built alongside this test.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn examples_dir() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?.join("examples");
    dir.is_dir().then_some(dir)
}

#[test]
fn examples_run_cleanly() {
    let sources = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let Some(bin_dir) = examples_dir() else {
        eprintln!("no example binaries found; skipping");
        return;
    };
    let mut names: Vec<String> = fs::read_dir(&sources)
        .unwrap()
        .filter_map(|e| e.ok()?.path().file_stem()?.to_str().map(str::to_owned))
        .collect();
    names.sort();
    let mut ran = 0;
    for name in names {
        let bin = bin_dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
        if !bin.exists() {
            eprintln!("{name}: not built; skipping");
            continue;
        }
        let out = Command::new(&bin).output().unwrap();
        assert!(
            out.status.success(),
            "{name} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
        ran += 1;
    }
    eprintln!("ran {ran} examples");
}
