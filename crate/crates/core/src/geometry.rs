//! Exact construction engine.
//!
//! Additive constructions rewrite every directed segment of a closed chain
//! with a generator polyline; subtractive constructions subdivide a shape and
//! keep a fixed subset of the cells. All coordinates live in ℚ(√3), and the
//! measurements here (shoelace area, chain length, piece totals) are computed
//! from the points themselves, independently of the closed forms in
//! [`crate::series`].

use std::fmt::Write as _;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::ElementCap;
use crate::qfield::QuadExt;
use crate::rat::Rat;
use crate::registry::{ConstructionSpec, Rule, Violation};
use crate::series::AdditiveAreaBasis;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: QuadExt,
    pub y: QuadExt,
}

impl Point {
    pub fn new(x: QuadExt, y: QuadExt) -> Self {
        Point { x, y }
    }

    pub fn rational(x: Rat, y: Rat) -> Self {
        Point::new(x.into(), y.into())
    }

    pub fn origin() -> Self {
        Point::default()
    }

    pub fn sub(&self, other: &Point) -> (QuadExt, QuadExt) {
        (&self.x - &other.x, &self.y - &other.y)
    }

    pub fn translate(&self, dx: &QuadExt, dy: &QuadExt) -> Point {
        Point::new(&self.x + dx, &self.y + dy)
    }

    pub fn scale(&self, k: &Rat) -> Point {
        Point::new(self.x.scale(k), self.y.scale(k))
    }

    pub fn dist_sq(&self, other: &Point) -> QuadExt {
        let (dx, dy) = self.sub(other);
        &(&dx * &dx) + &(&dy * &dy)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// Unit-side base figures. Vertex order is clockwise so that the left side
/// of every directed edge faces outward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Triangle,
    Square,
}

impl Shape {
    pub fn vertices(&self) -> Vec<Point> {
        let r = |n, d| QuadExt::from(Rat::new(n, d));
        match self {
            Shape::Triangle => vec![
                Point::origin(),
                Point::new(r(1, 2), QuadExt::new(Rat::zero(), Rat::new(1, 2))),
                Point::new(r(1, 1), r(0, 1)),
            ],
            Shape::Square => vec![
                Point::origin(),
                Point::new(r(0, 1), r(1, 1)),
                Point::new(r(1, 1), r(1, 1)),
                Point::new(r(1, 1), r(0, 1)),
            ],
        }
    }

    pub fn side_count(&self) -> u64 {
        match self {
            Shape::Triangle => 3,
            Shape::Square => 4,
        }
    }
}

/// A polyline from `(0,0)` to `(1,0)` made of `N` segments of length `1/r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorTemplate {
    vertices: Vec<Point>,
    scale: u32,
}

impl GeneratorTemplate {
    pub fn new(vertices: Vec<Point>, scale: u32) -> Result<Self> {
        let g = GeneratorTemplate::unchecked(vertices, scale);
        let violations = g.violations(g.n_pieces());
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::Validation(violations))
        }
    }

    /// Builds a template without checking it; pair with [`Self::violations`].
    pub fn unchecked(vertices: Vec<Point>, scale: u32) -> Self {
        GeneratorTemplate { vertices, scale }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn n_pieces(&self) -> u64 {
        self.vertices.len().saturating_sub(1) as u64
    }

    /// Every broken template invariant, given the declared piece count.
    pub fn violations(&self, declared_n: u64) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.scale < 2 {
            out.push(Violation::ScaleTooSmall { r: self.scale });
        }
        let expected = declared_n as usize + 1;
        if self.vertices.len() != expected {
            out.push(Violation::VertexCount {
                expected,
                found: self.vertices.len(),
            });
        }
        let (Some(first), Some(last)) = (self.vertices.first(), self.vertices.last()) else {
            return out;
        };
        if *first != Point::origin() {
            out.push(Violation::StartNotOrigin);
        }
        if *last != Point::rational(Rat::one(), Rat::zero()) {
            out.push(Violation::EndNotUnit);
        }
        if self.scale >= 1 {
            let expected_sq = Rat::new(1, self.scale as i64 * self.scale as i64);
            for (i, w) in self.vertices.windows(2).enumerate() {
                let found = w[0].dist_sq(&w[1]);
                if found != QuadExt::from(expected_sq.clone()) {
                    out.push(Violation::SegmentLength {
                        index: i,
                        found,
                        expected: expected_sq.clone(),
                    });
                }
            }
        }
        let interior = &self.vertices[1..self.vertices.len().saturating_sub(1).max(1)];
        for (i, v) in interior.iter().enumerate() {
            if v.y.sign() < 0 {
                out.push(Violation::BelowBaseline { index: i + 1 });
            }
        }
        if interior.iter().all(|v| v.y.sign() <= 0) {
            out.push(Violation::DegenerateGenerator);
        }
        out
    }
}

/// A closed polyline whose segments all share one squared length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    points: Vec<Point>,
    depth: u32,
    segment_length_sq: Rat,
}

impl Chain {
    pub fn from_shape(shape: Shape) -> Self {
        Chain {
            points: shape.vertices(),
            depth: 0,
            segment_length_sq: Rat::one(),
        }
    }

    pub fn from_parts(points: Vec<Point>, depth: u32, segment_length_sq: Rat) -> Self {
        Chain {
            points,
            depth,
            segment_length_sq,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn segment_length_sq(&self) -> &Rat {
        &self.segment_length_sq
    }

    pub fn segment_count(&self) -> usize {
        self.points.len()
    }

    /// Segment `i` runs from point `i` to point `i + 1` (wrapping).
    pub fn segment(&self, i: usize) -> (&Point, &Point) {
        let n = self.points.len();
        (&self.points[i], &self.points[(i + 1) % n])
    }
}

/// Replaces every segment `(p, q)` by the generator mapped through the
/// similarity taking `(0,0) → p` and `(1,0) → q`. Output order follows input
/// segment order regardless of thread scheduling.
pub fn rewrite_chain(chain: &Chain, g: &GeneratorTemplate, cap: ElementCap) -> Result<Chain> {
    let n = chain.points.len();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cannot rewrite an empty chain".into(),
        ));
    }
    let k = g.n_pieces() as usize;
    cap.check(&(BigUint::from(n) * BigUint::from(k)))?;
    // The final generator vertex coincides with the next segment's start.
    let body = &g.vertices[1..k];
    let points = &chain.points;
    let out: Vec<Point> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let p = &points[i];
            let (dx, dy) = points[(i + 1) % n].sub(p);
            std::iter::once(p.clone()).chain(body.iter().map(move |v| {
                Point::new(
                    &(&p.x + &(&dx * &v.x)) - &(&dy * &v.y),
                    &(&p.y + &(&dx * &v.y)) + &(&dy * &v.x),
                )
            }))
        })
        .collect();
    let r2 = Rat::from_integer(g.scale as i64 * g.scale as i64);
    Ok(Chain {
        points: out,
        depth: chain.depth + 1,
        segment_length_sq: &chain.segment_length_sq / &r2,
    })
}

/// The base figure rewritten `depth` times.
pub fn iterate_chain(
    base: Shape,
    g: &GeneratorTemplate,
    depth: u32,
    cap: ElementCap,
) -> Result<Chain> {
    let total = BigUint::from(base.side_count()) * BigUint::from(g.n_pieces()).pow(depth);
    cap.check(&total)?;
    let mut chain = Chain::from_shape(base);
    for _ in 0..depth {
        chain = rewrite_chain(&chain, g, cap)?;
    }
    Ok(chain)
}

/// Iterated boundary of an additive construction.
pub fn iterate_additive(spec: &ConstructionSpec, depth: u32, cap: ElementCap) -> Result<Chain> {
    match spec.rule() {
        Rule::Generator { template, base } => iterate_chain(*base, template, depth, cap),
        Rule::SeriesOnly { .. } => Err(Error::NotRealizable(spec.name().to_string())),
        Rule::Subdivision(_) => Err(Error::InvalidParameter(format!(
            "`{}` is subtractive; it has no boundary chain",
            spec.name()
        ))),
    }
}

/// Clockwise-positive signed area of a closed polygon.
pub fn polygon_area(points: &[Point]) -> QuadExt {
    let n = points.len();
    let twice: QuadExt = (0..n)
        .into_par_iter()
        .map(|i| {
            let (p, q) = (&points[i], &points[(i + 1) % n]);
            &(&q.x * &p.y) - &(&p.x * &q.y)
        })
        .reduce(QuadExt::zero, |a, b| a + b);
    twice.scale(&Rat::new(1, 2))
}

/// Exact signed area enclosed by the chain, positive for clockwise chains.
pub fn shoelace_area(chain: &Chain) -> QuadExt {
    polygon_area(&chain.points)
}

/// Chain length, after checking that every segment has the declared length.
pub fn measured_perimeter(chain: &Chain) -> Result<QuadExt> {
    let expected = QuadExt::from(chain.segment_length_sq.clone());
    let bad = (0..chain.points.len()).into_par_iter().find_first(|&i| {
        let (p, q) = chain.segment(i);
        p.dist_sq(q) != expected
    });
    if let Some(i) = bad {
        let (p, q) = chain.segment(i);
        return Err(Error::BrokenInvariant {
            segment: i,
            message: format!(
                "squared length {} differs from {}",
                p.dist_sq(q),
                chain.segment_length_sq
            ),
        });
    }
    let len = chain
        .segment_length_sq
        .sqrt_exact()
        .ok_or_else(|| Error::BrokenInvariant {
            segment: 0,
            message: format!(
                "segment length² {} is not a rational square",
                chain.segment_length_sq
            ),
        })?;
    Ok(QuadExt::from(
        &len * &Rat::from_integer(chain.points.len() as i64),
    ))
}

/// Area basis of an additive construction, derived from its generator.
pub fn bump_basis(spec: &ConstructionSpec) -> Result<AdditiveAreaBasis> {
    match spec.rule() {
        Rule::Generator { template, base } => generator_basis(*base, template),
        Rule::SeriesOnly { .. } => Err(Error::NotRealizable(spec.name().to_string())),
        Rule::Subdivision(_) => Err(Error::InvalidParameter(format!(
            "`{}` is subtractive; it has no bump basis",
            spec.name()
        ))),
    }
}

/// `A_0`, `C` and `beta` read off the generator geometry: `C` is the bump
/// area of the unit generator times the sum of squared base edge lengths.
pub fn generator_basis(base: Shape, g: &GeneratorTemplate) -> Result<AdditiveAreaBasis> {
    let base_pts = base.vertices();
    let a0 = polygon_area(&base_pts);
    let unit_bump = polygon_area(&g.vertices);
    if unit_bump.sign() <= 0 {
        return Err(Error::DegenerateGenerator);
    }
    let n = base_pts.len();
    let edge_sq: QuadExt = (0..n)
        .map(|i| base_pts[i].dist_sq(&base_pts[(i + 1) % n]))
        .sum();
    let r = g.scale as i64;
    let beta = Rat::new(g.n_pieces() as i64, r * r);
    AdditiveAreaBasis::new(a0, &unit_bump * &edge_sq, beta)
}

/// Which cells of a subdivided parent survive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subdivision {
    /// `r × r` grid of squares; `mask[row][col]`, row 0 at the top.
    SquareGrid { r: u32, mask: Vec<Vec<bool>> },
    /// Midpoint subdivision of a triangle keeping the three corner cells.
    Triangle4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionRule {
    archetype: Subdivision,
}

impl SubdivisionRule {
    pub fn new(archetype: Subdivision) -> Self {
        SubdivisionRule { archetype }
    }

    pub fn archetype(&self) -> &Subdivision {
        &self.archetype
    }

    pub fn shape(&self) -> Shape {
        match self.archetype {
            Subdivision::SquareGrid { .. } => Shape::Square,
            Subdivision::Triangle4 => Shape::Triangle,
        }
    }

    pub fn scale(&self) -> u32 {
        match &self.archetype {
            Subdivision::SquareGrid { r, .. } => *r,
            Subdivision::Triangle4 => 2,
        }
    }

    pub fn n_pieces(&self) -> u64 {
        match &self.archetype {
            Subdivision::SquareGrid { mask, .. } => {
                mask.iter().flatten().filter(|&&keep| keep).count() as u64
            }
            Subdivision::Triangle4 => 3,
        }
    }

    /// Lower-left corners of the retained cells of a unit parent, in
    /// row-major (grid) or corner-index (triangle) order.
    pub fn child_offsets(&self) -> Vec<Point> {
        match &self.archetype {
            Subdivision::SquareGrid { r, mask } => {
                let r = *r as i64;
                let mut out = Vec::new();
                for (row, cells) in mask.iter().enumerate() {
                    for (col, &keep) in cells.iter().enumerate() {
                        if keep {
                            out.push(Point::rational(
                                Rat::new(col as i64, r),
                                Rat::new(r - 1 - row as i64, r),
                            ));
                        }
                    }
                }
                out
            }
            Subdivision::Triangle4 => vec![
                Point::origin(),
                Point::rational(Rat::new(1, 2), Rat::zero()),
                Point::new(
                    QuadExt::from(Rat::new(1, 4)),
                    QuadExt::new(Rat::zero(), Rat::new(1, 4)),
                ),
            ],
        }
    }

    pub fn violations(&self, declared_n: u64, declared_r: u32) -> Vec<Violation> {
        let mut out = Vec::new();
        match &self.archetype {
            Subdivision::SquareGrid { r, mask } => {
                if *r < 2 {
                    out.push(Violation::ScaleTooSmall { r: *r });
                }
                if *r != declared_r {
                    out.push(Violation::ScaleMismatch {
                        declared: declared_r,
                        rule: *r,
                    });
                }
                if mask.len() != *r as usize || mask.iter().any(|row| row.len() != *r as usize) {
                    out.push(Violation::MaskShape { r: *r });
                }
            }
            Subdivision::Triangle4 => {
                if declared_r != 2 || declared_n != 3 {
                    out.push(Violation::TriangleRule {
                        n: declared_n,
                        r: declared_r,
                    });
                }
            }
        }
        let found = self.n_pieces();
        if found != declared_n {
            out.push(Violation::MaskPopcount {
                expected: declared_n,
                found,
            });
        }
        if found == 0 {
            out.push(Violation::EmptyRule);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceTransform {
    pub scale_exponent: u32,
    pub translation: Point,
}

/// Retained cells at some depth: each is the archetype shape scaled by
/// `r^(-scale_exponent)` and translated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceSet {
    depth: u32,
    shape: Shape,
    scale: u32,
    transforms: Vec<PieceTransform>,
}

impl PieceSet {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn transforms(&self) -> &[PieceTransform] {
        &self.transforms
    }

    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transforms.is_empty()
    }

    pub fn piece_side(&self, t: &PieceTransform) -> Rat {
        Rat::new(1, self.scale as i64).pow(t.scale_exponent)
    }

    pub fn piece_vertices(&self, t: &PieceTransform) -> Vec<Point> {
        let side = self.piece_side(t);
        self.shape
            .vertices()
            .iter()
            .map(|v| {
                let s = v.scale(&side);
                s.translate(&t.translation.x, &t.translation.y)
            })
            .collect()
    }
}

pub fn iterate_subtractive(
    rule: &SubdivisionRule,
    depth: u32,
    cap: ElementCap,
) -> Result<PieceSet> {
    cap.check(&BigUint::from(rule.n_pieces()).pow(depth))?;
    let offsets = rule.child_offsets();
    let inv_r = Rat::new(1, rule.scale() as i64);
    let mut translations = vec![Point::origin()];
    let mut side = Rat::one();
    for _ in 0..depth {
        let offsets = &offsets;
        let side_ref = &side;
        translations = translations
            .par_iter()
            .flat_map_iter(|t| {
                offsets.iter().map(move |o| {
                    let o = o.scale(side_ref);
                    t.translate(&o.x, &o.y)
                })
            })
            .collect();
        side = &side * &inv_r;
    }
    Ok(PieceSet {
        depth,
        shape: rule.shape(),
        scale: rule.scale(),
        transforms: translations
            .into_iter()
            .map(|translation| PieceTransform {
                scale_exponent: depth,
                translation,
            })
            .collect(),
    })
}

/// Total edge length and total area, measured piece by piece.
pub fn pieceset_measures(ps: &PieceSet) -> Result<(QuadExt, QuadExt)> {
    let per_piece = |t: &PieceTransform| -> Result<(QuadExt, QuadExt)> {
        let v = ps.piece_vertices(t);
        let n = v.len();
        let mut edge = Rat::zero();
        for i in 0..n {
            let sq = v[i].dist_sq(&v[(i + 1) % n]);
            let len = sq.as_rational().and_then(Rat::sqrt_exact).ok_or_else(|| {
                Error::BrokenInvariant {
                    segment: i,
                    message: format!("piece edge length² {sq} has no rational root"),
                }
            })?;
            edge += &len;
        }
        Ok((QuadExt::from(edge), polygon_area(&v).abs()))
    };
    ps.transforms.par_iter().map(per_piece).try_reduce(
        || (QuadExt::zero(), QuadExt::zero()),
        |a, b| Ok((a.0 + b.0, a.1 + b.1)),
    )
}

/// One `x y` pair per line in the ℚ(√3) text form.
pub fn dump_points(points: &[Point]) -> String {
    let mut out = String::new();
    for p in points {
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    out
}
