//! Search over axis-aligned lattice generators (step 1/3) for ones whose
//! square-based chain is simple at depth 1 but collides at depth 2.

use std::collections::HashSet;

use fractal_core::geometry::{iterate_chain, GeneratorTemplate, Point, Shape};
use fractal_core::overlap::{check_simple, segments_properly_intersect};
use fractal_core::registry::load_construction;
use fractal_core::{ElementCap, Rat};

const MAX_PIECES: usize = 7;
const MAX_HEIGHT: i64 = 2;

fn extend(path: &mut Vec<(i64, i64)>, out: &mut Vec<Vec<(i64, i64)>>) {
    let &(x, y) = path.last().unwrap();
    if (x, y) == (3, 0) {
        out.push(path.clone());
        return;
    }
    if path.len() > MAX_PIECES {
        return;
    }
    for (dx, dy) in [(1, 0), (0, 1), (0, -1), (-1, 0)] {
        let next = (x + dx, y + dy);
        let inside = (0..=3).contains(&next.0) && (0..=MAX_HEIGHT).contains(&next.1);
        if inside && !path.contains(&next) {
            path.push(next);
            extend(path, out);
            path.pop();
        }
    }
}

fn template(path: &[(i64, i64)]) -> Option<GeneratorTemplate> {
    let v = path
        .iter()
        .map(|&(x, y)| Point::rational(Rat::new(x, 3), Rat::new(y, 3)))
        .collect();
    GeneratorTemplate::new(v, 3).ok()
}

#[test]
fn tall_bump_is_found_and_collides() {
    let mut paths = Vec::new();
    extend(&mut vec![(0, 0)], &mut paths);
    let cap = ElementCap::default();
    let mut colliding = HashSet::new();
    for path in &paths {
        let Some(g) = template(path) else { continue };
        let d1 = iterate_chain(Shape::Square, &g, 1, cap).unwrap();
        if !check_simple(&d1, cap).unwrap().simple {
            continue;
        }
        let d2 = iterate_chain(Shape::Square, &g, 2, cap).unwrap();
        let report = check_simple(&d2, cap).unwrap();
        if let Some((i, j)) = report.witness {
            let (a1, a2) = d2.segment(i);
            let (b1, b2) = d2.segment(j);
            assert!(segments_properly_intersect(a1, a2, b1, b2).unwrap());
            colliding.insert(path.clone());
        }
    }
    let tall = vec![
        (0, 0),
        (1, 0),
        (1, 1),
        (1, 2),
        (2, 2),
        (2, 1),
        (2, 0),
        (3, 0),
    ];
    assert!(
        colliding.contains(&tall),
        "{} colliding generators, tall bump not among them",
        colliding.len()
    );
    // The koch-square generator is in the search space and does not collide.
    let koch_square = vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 0), (3, 0)];
    assert!(paths.contains(&koch_square));
    assert!(!colliding.contains(&koch_square));
}

#[test]
fn shipped_fixture_matches() {
    let text = include_str!("fixtures/colliding-tower.json");
    let spec = load_construction(text).unwrap();
    let fractal_core::registry::Rule::Generator { template: g, base } = spec.rule() else {
        panic!("fixture is additive");
    };
    assert_eq!(*base, Shape::Square);
    let d2 = iterate_chain(*base, g, 2, ElementCap::default()).unwrap();
    assert!(!check_simple(&d2, ElementCap::default()).unwrap().simple);
}
