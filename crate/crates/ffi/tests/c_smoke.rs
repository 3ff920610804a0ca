//! Compiles `smoke.c` against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn static_lib() -> Option<PathBuf> {
    // Test binaries live in target/<profile>/deps.
    let exe = std::env::current_exe().ok()?;
    let profile = exe.parent()?.parent()?;
    let lib = profile.join("libcablevqe_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        eprintln!("skipping: static library not built");
        return;
    };
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler ({cc})");
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cablevqe_smoke");
    let status = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(root.join("tests/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("compiler runs");
    assert!(status.success(), "compile failed");
    let out = Command::new(&exe).output().expect("smoke binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.starts_with("cables=4 dim=11 "), "{stdout}");
    assert!(stdout.contains("missing=5"), "{stdout}");
}
