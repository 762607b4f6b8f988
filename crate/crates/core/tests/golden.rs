//! Golden SVG output. Set `UPDATE_GOLDEN=1` to rewrite the fixtures.

use std::path::PathBuf;

use fractal_core::geometry::iterate_additive;
use fractal_core::registry::builtin;
use fractal_core::render::{render_chain, Style};
use fractal_core::ElementCap;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/golden")
        .join(name)
}

fn check_golden(name: &str, rendered: &str) {
    let path = fixture(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, rendered).unwrap();
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", path.display()));
    assert!(
        expected == rendered,
        "{} differs from the rendered output",
        path.display()
    );
}

#[test]
fn koch_snowflake_depth_three() {
    let chain = iterate_additive(
        &builtin("koch-snowflake").unwrap(),
        3,
        ElementCap::default(),
    )
    .unwrap();
    let svg = render_chain(&chain, &Style::default()).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
    check_golden("koch-snowflake-3.svg", &svg);
}
