//! Every example runs to completion. `cargo test` builds the examples next to
//! the test binaries; when they are absent (a filtered build) this test says
//! so and does nothing.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: &[&str] = &[
    "clifford_algebra",
    "field_io",
    "riesz_hilbert",
    "decompose_paravector",
    "decompose_homogeneous",
    "quaternionic_split",
    "half_space_extension",
    "silent_magnetization",
];

fn examples_dir() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    Some(profile_dir.join("examples"))
}

#[test]
fn examples_run() {
    let Some(dir) = examples_dir() else {
        eprintln!("examples directory not found; skipped");
        return;
    };
    let suffix = std::env::consts::EXE_SUFFIX;
    for name in EXAMPLES {
        let path = dir.join(format!("{name}{suffix}"));
        if !path.exists() {
            eprintln!("{} not built; skipped", path.display());
            continue;
        }
        let out = Command::new(&path).output().unwrap();
        assert!(
            out.status.success(),
            "{name} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}
