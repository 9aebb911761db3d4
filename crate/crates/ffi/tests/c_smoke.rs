//! Compiles a C program against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "teamflow.h"

int main(void) {
    TfScenario *sc = NULL;
    if (tf_scenario_bundled("toy_13", &sc) != TF_STATUS_OK) return 10;
    size_t n = 0;
    tf_scenario_num_paths(sc, &n);
    if (n != 2) return 11;
    double u[2];
    TfSolveInfo info;
    if (tf_solve(sc, TF_MODE_TEAM, u, n, &info) != TF_STATUS_OK) return 12;
    if (!info.converged || u[0] < 1.49 || u[0] > 1.51) return 13;
    TfScenario *bad = sc;
    if (tf_scenario_from_json("not json", &bad) != TF_STATUS_INVALID_INPUT || bad != NULL) return 14;
    if (tf_last_error() == NULL || strlen(tf_last_error()) == 0) return 15;
    char *json = NULL;
    TfScenario *toy = NULL;
    tf_scenario_bundled("theta_zero", &toy);
    if (tf_deviation_json(toy, &json) != TF_STATUS_OK) return 16;
    printf("%s\n", json);
    tf_string_free(json);
    tf_scenario_free(toy);
    tf_scenario_free(sc);
    return 0;
}
"#;

/// Static library built alongside this test; the copy one level up is only
/// refreshed by `cargo build`.
fn static_lib() -> PathBuf {
    std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .join("libteamflow_ffi.a")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_compiles_as_c_and_cpp() {
    if !have_cc() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("h.c");
    std::fs::write(
        &src,
        "#include \"teamflow.h\"\nint main(void) { return TF_STATUS_OK; }\n",
    )
    .unwrap();
    for lang in ["c", "c++"] {
        let st = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg("-I")
            .arg(&include)
            .arg(&src)
            .status()
            .unwrap();
        assert!(st.success(), "{lang}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_lib();
    if !have_cc() || !lib.exists() {
        eprintln!("skipping: no C compiler or {} missing", lib.display());
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let st = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success(), "link failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta"], 0.0);
}
