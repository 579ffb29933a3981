//! The generated header must parse as C and as C++.

use std::path::Path;
use std::process::Command;

fn compiles(compiler: &str, lang: &str) -> Option<bool> {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pairlaser.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join(format!("probe.{}", if lang == "c" { "c" } else { "cpp" }));
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ PlModel *m = 0; PlStatus s = pl_model_new_coherent(4, 1, 1, 2, 0, 1, &m); pl_model_free(m); return (int)s; }}\n",
            header.display()
        ),
    )
    .unwrap();
    let status = Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror"]).arg(&src).status().ok()?;
    Some(status.success())
}

#[test]
fn header_is_valid_c_and_cpp() {
    match compiles("cc", "c") {
        Some(ok) => assert!(ok, "header rejected by the C compiler"),
        None => eprintln!("no C compiler found; header check skipped"),
    }
    if let Some(ok) = compiles("c++", "cpp") {
        assert!(ok, "header rejected by the C++ compiler");
    }
}
