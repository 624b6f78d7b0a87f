use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let header = PathBuf::from(&crate_dir).join("include").join("ezplan.h");
    std::fs::create_dir_all(header.parent().unwrap()).expect("create include directory");

    cbindgen::generate(&crate_dir)
        .expect("generate C bindings")
        .write_to_file(&header);

    println!("cargo:rerun-if-changed=cbindgen.toml");
    println!("cargo:rerun-if-changed=src/lib.rs");
}
