//! The synthetic fixtures under `fixtures/synthetic` are reproducible:
//! rebuilding them from their seeds gives byte-identical files. Run with
//! `PW1_REGENERATE=1` to rewrite them.

use std::path::{Path, PathBuf};

use pw1_core::arithmetic::{BaseField, TruncationBound};
use pw1_core::data_io::{emit_space, load_space, write_text, SpaceFixture};
use pw1_core::synthetic::{certification_spaces, planted_search};

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic")
}

fn check(name: &str, space: &SpaceFixture) {
    let path = dir().join(name);
    let text = emit_space(space).unwrap();
    if std::env::var_os("PW1_REGENERATE").is_some() {
        std::fs::create_dir_all(dir()).unwrap();
        write_text(&path, &text).unwrap();
    }
    let shipped = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(shipped == text, "{name} is stale; rerun with PW1_REGENERATE=1");
    let loaded = load_space(&path).unwrap();
    assert_eq!(loaded.dimension, space.dimension);
    assert_eq!(emit_space(&loaded).unwrap(), shipped);
}

#[test]
fn synthetic_fixtures_are_reproducible() {
    let f = BaseField::new(5).unwrap();
    let bounds: Vec<TruncationBound> = (5..=7).map(|b| TruncationBound::integers(&f, b, b).unwrap()).collect();
    let s = planted_search(&f, 2, 2, bounds, 11).unwrap();
    check("weight_6_2_level_14.pw1", &s.numerators);
    let (high, aux) = certification_spaces(&s, &TruncationBound::integers(&f, 7, 7).unwrap(), 3, 1, 5).unwrap();
    check("weight_18_6_level_14.pw1", &high);
    check("weight_14_2_level_14.pw1", &aux);
}
