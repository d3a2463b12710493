//! The generated header must compile as C and as C++.

use std::path::PathBuf;
use std::process::Command;

fn header_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn compiles(compiler: &str, lang: &str, extra: &[&str]) -> Option<bool> {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"twostroke.h\"\n\
         int main(void) {\n\
           TsEngine *e = NULL;\n\
           TsCycleReport r;\n\
           if (ts_engine_new(1.0, 3.0, 1.0, 0.5, &e) != TS_STATUS_OK) return 1;\n\
           ts_engine_otto_report(e, &r);\n\
           ts_engine_free(e);\n\
           return (r.modes & TS_MODE_ENGINE) ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let status = Command::new(compiler)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
        .args(extra)
        .arg("-I")
        .arg(header_dir())
        .arg(&src)
        .status()
        .ok()?;
    Some(status.success())
}

#[test]
fn header_is_valid_c() {
    assert!(header_dir().join("twostroke.h").exists());
    match compiles("cc", "c", &["-std=c99"]) {
        Some(ok) => assert!(ok),
        None => eprintln!("no C compiler; skipped"),
    }
}

#[test]
fn header_is_valid_cpp() {
    match compiles("c++", "c++", &[]) {
        Some(ok) => assert!(ok),
        None => eprintln!("no C++ compiler; skipped"),
    }
}
