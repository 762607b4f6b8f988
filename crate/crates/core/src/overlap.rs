//! Finite-depth non-overlap certification for additive constructions.
//!
//! A depth is certified when its iterated chain bounds a region (no two
//! segments cross or run along each other) and the exact shoelace area of
//! that chain equals the closed-form series value. Chains may touch
//! themselves at isolated points without crossing; such touches are counted
//! and reported but do not fail the check.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{rewrite_chain, shoelace_area, Chain, Point};
use crate::limits::ElementCap;
use crate::qfield::QuadExt;
use crate::registry::{ConstructionSpec, Rule};
use crate::series::{area_at_additive, AdditiveAreaBasis};

fn cross(o: &Point, a: &Point, b: &Point) -> QuadExt {
    let (ax, ay) = a.sub(o);
    let (bx, by) = b.sub(o);
    &(&ax * &by) - &(&ay * &bx)
}

fn orient(o: &Point, a: &Point, b: &Point) -> i32 {
    cross(o, a, b).sign()
}

/// `p` is known to be collinear with `s1, s2`.
fn within(p: &Point, s1: &Point, s2: &Point) -> bool {
    let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
    lo <= p && p <= hi
}

/// How two closed segments meet.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Contact {
    Disjoint,
    /// Transversal crossing at a point interior to both.
    Cross,
    /// Exactly one common point.
    Touch(Point),
    /// Collinear with a common stretch of positive length.
    Overlap,
}

pub fn classify(a1: &Point, a2: &Point, b1: &Point, b2: &Point) -> Result<Contact> {
    if a1 == a2 || b1 == b2 {
        return Err(Error::DegenerateSegment);
    }
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);

    if d1 == 0 && d2 == 0 {
        let (alo, ahi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let (blo, bhi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let lo = alo.max(blo);
        let hi = ahi.min(bhi);
        return Ok(match lo.cmp(hi) {
            Ordering::Greater => Contact::Disjoint,
            Ordering::Equal => Contact::Touch(lo.clone()),
            Ordering::Less => Contact::Overlap,
        });
    }
    if d1 == 0 && within(a1, b1, b2) {
        return Ok(Contact::Touch(a1.clone()));
    }
    if d2 == 0 && within(a2, b1, b2) {
        return Ok(Contact::Touch(a2.clone()));
    }
    if d3 == 0 && within(b1, a1, a2) {
        return Ok(Contact::Touch(b1.clone()));
    }
    if d4 == 0 && within(b2, a1, a2) {
        return Ok(Contact::Touch(b2.clone()));
    }
    if d1 * d2 < 0 && d3 * d4 < 0 {
        Ok(Contact::Cross)
    } else {
        Ok(Contact::Disjoint)
    }
}

/// Whether the closed segments share any point besides the common endpoint
/// of two consecutive chain segments (`a2 = b1` or `a1 = b2`).
pub fn segments_properly_intersect(a1: &Point, a2: &Point, b1: &Point, b2: &Point) -> Result<bool> {
    Ok(match classify(a1, a2, b1, b2)? {
        Contact::Disjoint => false,
        Contact::Cross | Contact::Overlap => true,
        Contact::Touch(p) => !((a2 == b1 && p == *a2) || (a1 == b2 && p == *a1)),
    })
}

/// Outcome of a simplicity check on one chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicityCheck {
    /// No crossing and no collinear overlap anywhere.
    pub simple: bool,
    /// Additionally, non-adjacent segments never meet at all.
    pub strictly_simple: bool,
    /// Points where the chain meets itself without crossing, sorted.
    pub touch_points: Vec<Point>,
    /// Lexicographically smallest failing segment pair.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Visit {
    /// The chain passes through its own vertex `k`.
    Vertex(usize),
    /// The point lies strictly inside segment `s`.
    Interior(usize),
}

fn visit_at(chain: &Chain, seg: usize, p: &Point) -> Visit {
    let n = chain.segment_count();
    let (a, b) = chain.segment(seg);
    if p == a {
        Visit::Vertex(seg)
    } else if p == b {
        Visit::Vertex((seg + 1) % n)
    } else {
        Visit::Interior(seg)
    }
}

/// The two directions leaving `p` along a visit, and the segments involved.
fn visit_rays(chain: &Chain, v: Visit, p: &Point) -> ([(QuadExt, QuadExt); 2], usize) {
    let n = chain.segment_count();
    let pts = chain.points();
    let (u, w, seg) = match v {
        Visit::Vertex(k) => (&pts[(k + n - 1) % n], &pts[(k + 1) % n], (k + n - 1) % n),
        Visit::Interior(s) => (&pts[s], &pts[(s + 1) % n], s),
    };
    ([u.sub(p), w.sub(p)], seg)
}

fn half(d: &(QuadExt, QuadExt)) -> u8 {
    let (sx, sy) = (d.0.sign(), d.1.sign());
    if sy > 0 || (sy == 0 && sx > 0) {
        0
    } else {
        1
    }
}

/// Counter-clockwise angle order of directions, starting at +x.
fn angle_cmp(a: &(QuadExt, QuadExt), b: &(QuadExt, QuadExt)) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| {
        let c = &(&a.0 * &b.1) - &(&a.1 * &b.0);
        0.cmp(&c.sign())
    })
}

/// Strictly inside the counter-clockwise sweep from `from` to `to`.
fn between(from: &(QuadExt, QuadExt), to: &(QuadExt, QuadExt), v: &(QuadExt, QuadExt)) -> bool {
    let after_from = angle_cmp(from, v) == Ordering::Less;
    let before_to = angle_cmp(v, to) == Ordering::Less;
    if angle_cmp(from, to) == Ordering::Less {
        after_from && before_to
    } else {
        after_from || before_to
    }
}

fn visits_cross(a: &[(QuadExt, QuadExt); 2], b: &[(QuadExt, QuadExt); 2]) -> bool {
    between(&a[0], &a[1], &b[0]) != between(&a[0], &a[1], &b[1])
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

fn evaluate(chain: &Chain, candidates: &[(usize, usize)]) -> Result<SimplicityCheck> {
    let n = chain.segment_count();
    let contacts: Vec<(usize, usize, Contact)> = candidates
        .par_iter()
        .map(|&(i, j)| {
            let (a1, a2) = chain.segment(i);
            let (b1, b2) = chain.segment(j);
            classify(a1, a2, b1, b2).map(|c| (i, j, c))
        })
        .filter(|r| !matches!(r, Ok((_, _, Contact::Disjoint))))
        .collect::<Result<_>>()?;

    let mut failures: Vec<(usize, usize)> = Vec::new();
    let mut touches: HashMap<Point, BTreeSet<Visit>> = HashMap::new();
    for (i, j, c) in contacts {
        let adjacent = j == i + 1 || (i == 0 && j + 1 == n);
        match c {
            Contact::Disjoint => {}
            Contact::Cross | Contact::Overlap => failures.push((i, j)),
            Contact::Touch(_) if adjacent => {}
            Contact::Touch(p) => {
                let vi = visit_at(chain, i, &p);
                let vj = visit_at(chain, j, &p);
                let entry = touches.entry(p).or_default();
                entry.insert(vi);
                entry.insert(vj);
            }
        }
    }

    let mut touch_points: Vec<Point> = touches.keys().cloned().collect();
    touch_points.sort();
    for p in &touch_points {
        let visits: Vec<_> = touches[p]
            .iter()
            .map(|&v| visit_rays(chain, v, p))
            .collect();
        for (x, (ra, sa)) in visits.iter().enumerate() {
            for (rb, sb) in &visits[x + 1..] {
                if visits_cross(ra, rb) {
                    failures.push(ordered(*sa, *sb));
                }
            }
        }
    }

    let witness = failures.into_iter().min();
    Ok(SimplicityCheck {
        simple: witness.is_none(),
        strictly_simple: witness.is_none() && touch_points.is_empty(),
        touch_points,
        witness,
    })
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

fn check_chain_size(chain: &Chain, cap: ElementCap) -> Result<()> {
    if chain.segment_count() < 3 {
        return Err(Error::InvalidParameter(
            "a closed chain needs at least 3 segments".into(),
        ));
    }
    cap.check(&BigUint::from(chain.segment_count()))
}

/// Reference check over every segment pair; quadratic.
pub fn check_simple_all_pairs(chain: &Chain, cap: ElementCap) -> Result<SimplicityCheck> {
    check_chain_size(chain, cap)?;
    evaluate(chain, &all_pairs(chain.segment_count()))
}

// Boxes are widened well beyond the error of converting a coordinate to f64,
// so binning can only admit extra pairs.
const BOX_PAD: f64 = 1e-9;

/// Candidate pairs whose padded bounding boxes share a grid cell.
fn grid_candidates(chain: &Chain) -> Vec<(usize, usize)> {
    let n = chain.segment_count();
    let approx: Vec<(f64, f64)> = chain.points().par_iter().map(Point::to_f64).collect();
    let boxes: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let (a, b) = (approx[i], approx[(i + 1) % n]);
            [
                a.0.min(b.0) - BOX_PAD,
                a.1.min(b.1) - BOX_PAD,
                a.0.max(b.0) + BOX_PAD,
                a.1.max(b.1) + BOX_PAD,
            ]
        })
        .collect();
    let (min_x, min_y) = boxes
        .iter()
        .fold((f64::INFINITY, f64::INFINITY), |(x, y), b| {
            (x.min(b[0]), y.min(b[1]))
        });
    let cell = chain.segment_length_sq().to_f64().sqrt();
    let index = |v: f64, lo: f64| ((v - lo) / cell).floor() as u64;

    let mut keyed: Vec<(u64, u64, u32)> = Vec::with_capacity(n * 2);
    for (s, b) in boxes.iter().enumerate() {
        for cx in index(b[0], min_x)..=index(b[2], min_x) {
            for cy in index(b[1], min_y)..=index(b[3], min_y) {
                keyed.push((cx, cy, s as u32));
            }
        }
    }
    keyed.par_sort_unstable();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for run in keyed.chunk_by(|a, b| (a.0, a.1) == (b.0, b.1)) {
        for (x, a) in run.iter().enumerate() {
            for b in &run[x + 1..] {
                let (i, j) = (a.2 as usize, b.2 as usize);
                let (bi, bj) = (&boxes[i], &boxes[j]);
                if bi[0] <= bj[2] && bj[0] <= bi[2] && bi[1] <= bj[3] && bj[1] <= bi[3] {
                    pairs.push(ordered(i, j));
                }
            }
        }
    }
    // Consecutive segments always meet at their shared vertex; include them
    // explicitly so a fold-back is never missed.
    pairs.extend((0..n).map(|i| ordered(i, (i + 1) % n)));
    pairs.par_sort_unstable();
    pairs.dedup();
    pairs
}

/// Exact simplicity check with grid pruning of candidate pairs.
pub fn check_simple(chain: &Chain, cap: ElementCap) -> Result<SimplicityCheck> {
    check_chain_size(chain, cap)?;
    evaluate(chain, &grid_candidates(chain))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapReport {
    pub depth: u32,
    /// `None` once an earlier depth has failed.
    #[serde(rename = "simple")]
    pub simple_curve: Option<bool>,
    pub strictly_simple: Option<bool>,
    pub touch_points: Option<usize>,
    #[serde(rename = "area_match")]
    pub area_matches_series: Option<bool>,
    pub certified: bool,
    pub witness: Option<(usize, usize)>,
    pub skipped: bool,
}

impl OverlapReport {
    fn skipped(depth: u32) -> Self {
        OverlapReport {
            depth,
            simple_curve: None,
            strictly_simple: None,
            touch_points: None,
            area_matches_series: None,
            certified: false,
            witness: None,
            skipped: true,
        }
    }
}

/// Reports for depths `0..=max_depth`. Once a depth fails, deeper ones are
/// marked skipped.
pub fn verify_nonoverlap(
    spec: &ConstructionSpec,
    max_depth: u32,
    cap: ElementCap,
) -> Result<Vec<OverlapReport>> {
    let (template, base) = match spec.rule() {
        Rule::Generator { template, base } => (template, *base),
        Rule::SeriesOnly { .. } => return Err(Error::NotRealizable(spec.name().to_string())),
        Rule::Subdivision(_) => {
            return Err(Error::InvalidParameter(format!(
                "`{}` is subtractive; overlap verification applies to additive constructions",
                spec.name()
            )))
        }
    };
    cap.check(
        &(BigUint::from(base.side_count()) * BigUint::from(template.n_pieces()).pow(max_depth)),
    )?;
    let basis = spec
        .area_basis()?
        .expect("generator constructions have an area basis");

    let mut reports = Vec::new();
    let mut chain = Chain::from_shape(base);
    let mut failed = false;
    for depth in 0..=max_depth {
        if depth > 0 && !failed {
            chain = rewrite_chain(&chain, template, cap)?;
        }
        if failed {
            reports.push(OverlapReport::skipped(depth));
            continue;
        }
        let check = check_simple(&chain, cap)?;
        let area_match = shoelace_area(&chain) == area_at_additive(&basis, depth);
        let certified = check.simple && area_match;
        failed = !certified;
        reports.push(OverlapReport {
            depth,
            simple_curve: Some(check.simple),
            strictly_simple: Some(check.strictly_simple),
            touch_points: Some(check.touch_points.len()),
            area_matches_series: Some(area_match),
            certified,
            witness: check.witness,
            skipped: false,
        });
    }
    Ok(reports)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubadditivityBound {
    pub bound: QuadExt,
}

/// `A_0 + C/(1 − beta)`: the total of the base area and all bump areas.
pub fn subadditivity_bound(basis: &AdditiveAreaBasis) -> Result<SubadditivityBound> {
    let one = crate::rat::Rat::one();
    if *basis.beta() >= one {
        return Err(Error::Unbounded {
            beta: basis.beta().clone(),
        });
    }
    let tail = basis.c().scale(&(&one - basis.beta()).recip()?);
    Ok(SubadditivityBound {
        bound: basis.a0() + &tail,
    })
}

pub fn reports_to_json(reports: &[OverlapReport]) -> String {
    let mut text = serde_json::to_string_pretty(reports).expect("reports serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{iterate_chain, GeneratorTemplate, Shape};
    use crate::rat::Rat;
    use crate::registry::builtin;

    fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
        Point::rational(Rat::new(x.0, x.1), Rat::new(y.0, y.1))
    }

    #[test]
    fn predicate_examples() {
        let o = pt((0, 1), (0, 1));
        assert!(!segments_properly_intersect(
            &o,
            &pt((1, 1), (0, 1)),
            &pt((0, 1), (1, 1)),
            &pt((1, 1), (1, 1))
        )
        .unwrap());
        assert!(segments_properly_intersect(
            &o,
            &pt((1, 1), (1, 1)),
            &pt((0, 1), (1, 1)),
            &pt((1, 1), (0, 1))
        )
        .unwrap());
        let apex = Point::new(
            QuadExt::from(Rat::new(1, 2)),
            QuadExt::new(Rat::zero(), Rat::new(1, 6)),
        );
        assert!(
            segments_properly_intersect(&o, &pt((1, 1), (0, 1)), &pt((1, 2), (0, 1)), &apex)
                .unwrap()
        );
    }

    #[test]
    fn shared_endpoint_permitted_only_for_chain_order() {
        let (a, b, c) = (pt((0, 1), (0, 1)), pt((1, 1), (0, 1)), pt((1, 1), (1, 1)));
        assert!(!segments_properly_intersect(&a, &b, &b, &c).unwrap());
        assert!(!segments_properly_intersect(&b, &c, &a, &b).unwrap());
        // Same corner reached from both segments' starts.
        assert!(segments_properly_intersect(&b, &a, &b, &c).unwrap());
        // Fold-back along the same line.
        assert!(segments_properly_intersect(&a, &b, &b, &pt((1, 2), (0, 1))).unwrap());
    }

    #[test]
    fn degenerate_segment() {
        let a = pt((0, 1), (0, 1));
        assert!(matches!(
            segments_properly_intersect(&a, &a, &a, &pt((1, 1), (0, 1))),
            Err(Error::DegenerateSegment)
        ));
    }

    #[test]
    fn base_shapes_are_strictly_simple() {
        for shape in [Shape::Triangle, Shape::Square] {
            let c = check_simple(&Chain::from_shape(shape), ElementCap::default()).unwrap();
            assert!(c.simple && c.strictly_simple);
        }
    }

    #[test]
    fn figure_eight_fails() {
        // (0,0) → (0,1) → (1,0) → (1,1): segments 1 and 3 cross.
        let pts = vec![
            pt((0, 1), (0, 1)),
            pt((0, 1), (1, 1)),
            pt((1, 1), (0, 1)),
            pt((1, 1), (1, 1)),
        ];
        let chain = Chain::from_parts(pts, 0, Rat::one());
        let c = check_simple_all_pairs(&chain, ElementCap::default()).unwrap();
        assert!(!c.simple);
        assert_eq!(c.witness, Some((1, 3)));
    }

    #[test]
    fn touching_without_crossing_is_simple() {
        // Two squares sharing the corner (1,1), traced as one closed chain.
        let pts = vec![
            pt((0, 1), (0, 1)),
            pt((0, 1), (1, 1)),
            pt((1, 1), (1, 1)),
            pt((1, 1), (2, 1)),
            pt((2, 1), (2, 1)),
            pt((2, 1), (1, 1)),
            pt((1, 1), (1, 1)),
            pt((1, 1), (0, 1)),
        ];
        let chain = Chain::from_parts(pts, 0, Rat::one());
        for c in [
            check_simple(&chain, ElementCap::default()).unwrap(),
            check_simple_all_pairs(&chain, ElementCap::default()).unwrap(),
        ] {
            assert!(c.simple);
            assert!(!c.strictly_simple);
            assert_eq!(c.touch_points, vec![pt((1, 1), (1, 1))]);
        }
    }

    #[test]
    fn koch_square_touches_but_stays_simple() {
        let spec = builtin("koch-square").unwrap();
        let Rule::Generator { template, base } = spec.rule() else {
            unreachable!()
        };
        let c2 = check_simple(
            &iterate_chain(*base, template, 2, ElementCap::default()).unwrap(),
            ElementCap::default(),
        )
        .unwrap();
        assert!(c2.simple);
        assert!(c2.touch_points.contains(&pt((2, 9), (-1, 9))));
    }

    fn tall_bump() -> GeneratorTemplate {
        let v = [
            (0, 0),
            (1, 0),
            (1, 1),
            (1, 2),
            (2, 2),
            (2, 1),
            (2, 0),
            (3, 0),
        ]
        .iter()
        .map(|&(x, y)| pt((x, 3), (y, 3)))
        .collect();
        GeneratorTemplate::new(v, 3).unwrap()
    }

    #[test]
    fn tall_bump_collides() {
        let g = tall_bump();
        let d1 = iterate_chain(Shape::Square, &g, 1, ElementCap::default()).unwrap();
        assert!(check_simple(&d1, ElementCap::default()).unwrap().simple);
        let d2 = iterate_chain(Shape::Square, &g, 2, ElementCap::default()).unwrap();
        let c = check_simple(&d2, ElementCap::default()).unwrap();
        assert!(!c.simple);
        let (i, j) = c.witness.unwrap();
        let (a1, a2) = d2.segment(i);
        let (b1, b2) = d2.segment(j);
        assert!(segments_properly_intersect(a1, a2, b1, b2).unwrap());
        assert_eq!(
            c,
            check_simple_all_pairs(&d2, ElementCap::default()).unwrap()
        );
    }

    #[test]
    fn bounds() {
        let b = |name: &str| {
            subadditivity_bound(&builtin(name).unwrap().area_basis().unwrap().unwrap())
                .unwrap()
                .bound
        };
        assert_eq!(b("koch-square"), QuadExt::from(2));
        assert_eq!(
            b("koch-snowflake"),
            QuadExt::new(Rat::zero(), Rat::new(2, 5))
        );
        assert_eq!(b("add-6-4"), QuadExt::from(Rat::new(7, 5)));
        let unbounded = AdditiveAreaBasis::new(QuadExt::one(), QuadExt::one(), Rat::one()).unwrap();
        assert!(matches!(
            subadditivity_bound(&unbounded),
            Err(Error::Unbounded { .. })
        ));
    }

    #[test]
    fn verify_reports() {
        let r = verify_nonoverlap(
            &builtin("koch-snowflake").unwrap(),
            2,
            ElementCap::default(),
        )
        .unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|x| x.certified && x.witness.is_none()));
        let r0 =
            verify_nonoverlap(&builtin("koch-square").unwrap(), 0, ElementCap::default()).unwrap();
        assert!(r0[0].certified);
        assert!(matches!(
            verify_nonoverlap(&builtin("add-10-3").unwrap(), 1, ElementCap::default()),
            Err(Error::NotRealizable(_))
        ));
    }

    #[test]
    fn json_shape() {
        let r = verify_nonoverlap(
            &builtin("koch-snowflake").unwrap(),
            1,
            ElementCap::default(),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&reports_to_json(&r)).unwrap();
        assert_eq!(v[1]["simple"], true);
        assert_eq!(v[1]["area_match"], true);
        assert_eq!(v[1]["witness"], serde_json::Value::Null);
    }
}
