//! Compiles a small C program against the generated header and links it to
//! the static library. Skipped when no C compiler is on the path.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "conelab.h"

int main(void) {
    ConelabBody *body = NULL;
    if (conelab_body_from_recipe("kind = \"square\"", &body) != CONELAB_STATUS_OK) return 10;
    ConelabCone *cone = NULL;
    if (conelab_cone_new(body, CONELAB_NORM_L2, &cone) != CONELAB_STATUS_OK) return 11;
    double x[2] = {0.0, 0.0};
    double t = 0.0;
    int exact = 0;
    if (conelab_thickness(cone, x, 2, 0, 0, &t, &exact) != CONELAB_STATUS_OK) return 12;
    double far[2] = {2.0, 0.0};
    double c = 0.0;
    ConelabStatus st = conelab_max_chord(body, far, 2, CONELAB_NORM_L2, &c);
    printf("%.6f %d %d %s\n", t, exact, (int)st, conelab_status_string(st));
    conelab_cone_free(cone);
    conelab_body_free(body);
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipped");
        return;
    }
    let lib = profile_dir().join("libconelab_ffi.a");
    if !lib.is_file() {
        eprintln!("static library not built at {}; skipped", lib.display());
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), "0.707107 1 10 not in the body");
}
