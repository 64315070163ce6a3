//! Regenerates the JSON files under `fixtures/` from the builders.
//!
//! cargo run -p cscp-core --example gen_fixtures

use std::path::{Path, PathBuf};

use cscp_core::fixtures::build;
use cscp_core::io::{serialize_document, session_text, write_atomic, Document};

fn write<T: Document>(dir: &Path, name: &str, doc: &T) {
    let path = dir.join(name);
    write_atomic(&path, serialize_document(doc).expect("fixture serializes").as_bytes())
        .expect("fixture written");
    println!("{}", path.display());
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for p in build::plants() {
        write(&root.join("plants"), &format!("{}.plant.json", p.id), &p);
    }
    for p in build::panels() {
        write(&root.join("panels"), &format!("{}.panel.json", p.id), &p);
    }
    for s in build::scenarios() {
        write(&root.join("scenarios"), &format!("{}.scn.json", s.id), &s);
    }
    for c in build::lint_cases() {
        write(&root.join("lint"), &format!("{}.lint.json", c.id), &c);
    }
    for (name, record) in build::sessions() {
        let path = root.join("sessions").join(format!("{name}.log.json"));
        write_atomic(&path, session_text(&record).as_bytes()).expect("session written");
        println!("{}", path.display());
    }
}
