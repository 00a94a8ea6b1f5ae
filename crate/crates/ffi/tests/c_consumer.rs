//! Compiles and runs a small C program against the generated header and
//! the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "ion_cavity.h"

int main(void) {
    IcConfig *cfg = NULL;
    IcReport *rep = NULL;
    double g1r, g1i, g2;
    if (ic_config_default(3, 3, IC_MODEL_EFFECTIVE, &cfg) != IC_STATUS_OK) return 1;
    if (ic_truth_table(cfg, &rep) != IC_STATUS_OK) return 2;
    if (ic_report_makhlin(rep, &g1r, &g1i, &g2) != IC_STATUS_OK) return 3;
    if (fabs(g1r) > 1e-9 || fabs(g1i) > 1e-9 || fabs(g2 - 1.0) > 1e-9) return 4;
    if (ic_config_from_json("{", &cfg) != IC_STATUS_PARSE || ic_last_error() == NULL) return 5;
    ic_report_free(rep);
    ic_config_free(cfg);
    printf("ok %s\n", ic_version());
    return 0;
}
"#;

/// The test binary lives in `<target>/<profile>/deps`; cargo leaves the
/// static library either there or one level up.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    [deps, deps.parent().unwrap()]
        .iter()
        .map(|d| d.join("libion_cavity_ffi.a"))
        .find(|p| p.exists())
        .expect("static library built alongside the tests")
}

#[test]
fn header_declares_the_api() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ion_cavity.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "ic_config_from_json",
        "ic_config_default",
        "ic_truth_table",
        "ic_report_to_json",
        "ic_string_free",
        "ic_last_error",
        "typedef struct IcConfig IcConfig;",
        "IC_STATUS_NULL_POINTER = 6",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_lib();
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
