use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kdiv.h")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct KdivElement KdivElement;",
        "KDIV_STATUS_HYPOTHESIS_VIOLATED = 3",
        "kdiv_k_curve(",
        "kdiv_divide(",
        "kdiv_run(",
        "kdiv_last_error(void)",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    if !have_cc() {
        eprintln!("no C compiler; skipped");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(&src, "#include \"kdiv.h\"\nint main(void) { return kdiv_status_name(KDIV_STATUS_OK) == 0; }\n").unwrap();
    let inc = header().parent().unwrap().to_path_buf();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&inc)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// Links a small C program against the static library when cargo has built it.
#[test]
fn c_program_runs() {
    let lib = Path::new(env!("CARGO_TARGET_TMPDIR")).parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" }).join("libkdiv_ffi.a");
    if !have_cc() || !lib.exists() || !cfg!(target_os = "linux") {
        eprintln!("static library or C compiler unavailable; skipped");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "kdiv.h"
int main(void) {
    KdivCouple *c = NULL;
    KdivElement *x = NULL;
    double v = 0;
    if (kdiv_couple_from_json("{\"kind\":\"sequence_lp\",\"p\":1,\"q\":\"inf\"}", &c) != KDIV_STATUS_OK) return 1;
    double xs[3] = {3.0, 1.0, 0.5};
    if (kdiv_element_from_values(xs, 3, &x) != KDIV_STATUS_OK) return 2;
    if (kdiv_k_value(x, c, 1.5, 1e-9, &v) != KDIV_STATUS_OK) return 3;
    printf("%.17g\n", v);
    kdiv_element_free(x);
    kdiv_couple_free(c);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let out = Command::new("cc")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success());
    // int_0^1.5 x* = 3 + 0.5
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "3.5");
}
