//! Built-in constructions and the JSON construction file format.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    generator_basis, polygon_area, GeneratorTemplate, Point, Shape, Subdivision, SubdivisionRule,
};
use crate::params::{diagnose, ClassTag, Diagnosis, ParamPoint};
use crate::qfield::QuadExt;
use crate::rat::Rat;
use crate::series::{AdditiveAreaBasis, AreaLimit};

pub const BUILTIN_NAMES: [&str; 8] = [
    "sierpinski-triangle",
    "sierpinski-carpet",
    "koch-snowflake",
    "koch-square",
    "sub-2-3",
    "add-6-4",
    "add-10-3",
    "sub-5-3",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Generator {
        template: GeneratorTemplate,
        base: Shape,
    },
    Subdivision(SubdivisionRule),
    /// Parameters known, geometry not fixed. `c` stays unset unless a value
    /// can be justified; the series then carries only `A_0`.
    SeriesOnly {
        base: Shape,
        c: Option<QuadExt>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    BuiltIn,
    UserFile(Option<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionSpec {
    name: String,
    params: ParamPoint,
    rule: Rule,
    provenance: Provenance,
}

impl ConstructionSpec {
    /// Assembles and validates a construction.
    pub fn new(name: impl Into<String>, params: ParamPoint, rule: Rule) -> Result<Self> {
        let spec = ConstructionSpec {
            name: name.into(),
            params,
            rule,
            provenance: Provenance::UserFile(None),
        };
        validate(&spec).map_err(Error::Validation)?;
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &ParamPoint {
        &self.params
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn base_shape(&self) -> Shape {
        match &self.rule {
            Rule::Generator { base, .. } | Rule::SeriesOnly { base, .. } => *base,
            Rule::Subdivision(rule) => rule.shape(),
        }
    }

    pub fn is_realizable(&self) -> bool {
        !matches!(self.rule, Rule::SeriesOnly { .. })
    }

    /// Segments of the base polygon (additive) or the single initial piece.
    pub fn initial_element_count(&self) -> u64 {
        match self.params.class() {
            ClassTag::Additive => self.base_shape().side_count(),
            ClassTag::Subtractive => 1,
        }
    }

    pub fn initial_element_length(&self) -> Result<Rat> {
        Ok(Rat::one())
    }

    pub fn initial_perimeter(&self) -> Result<QuadExt> {
        Ok(QuadExt::from(self.base_shape().side_count() as i64))
    }

    pub fn initial_area(&self) -> Result<QuadExt> {
        Ok(polygon_area(&self.base_shape().vertices()))
    }

    /// `A_0`, `C`, `beta` for additive constructions; `None` for subtractive
    /// ones and for series-only entries without a bump constant.
    pub fn area_basis(&self) -> Result<Option<AdditiveAreaBasis>> {
        match &self.rule {
            Rule::Generator { template, base } => generator_basis(*base, template).map(Some),
            Rule::SeriesOnly { c: Some(c), .. } => {
                let beta = crate::params::growth_ratios(&self.params).beta;
                AdditiveAreaBasis::new(self.initial_area()?, c.clone(), beta).map(Some)
            }
            Rule::SeriesOnly { c: None, .. } | Rule::Subdivision(_) => Ok(None),
        }
    }

    /// Diagnosis with every value this construction can supply attached.
    pub fn diagnose(&self) -> Result<Diagnosis> {
        let basis = self.area_basis()?;
        let mut d = diagnose(&self.params, basis.as_ref());
        if let AreaLimit::ConstantA0(None) = d.area {
            d.area = AreaLimit::ConstantA0(Some(self.initial_area()?));
        }
        Ok(d)
    }
}

/// One broken construction invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    InvalidParams(String),
    NonIntegerScale,
    ScaleTooSmall {
        r: u32,
    },
    ScaleMismatch {
        declared: u32,
        rule: u32,
    },
    ClassMismatch {
        declared: ClassTag,
    },
    VertexCount {
        expected: usize,
        found: usize,
    },
    StartNotOrigin,
    EndNotUnit,
    SegmentLength {
        index: usize,
        found: QuadExt,
        expected: Rat,
    },
    BelowBaseline {
        index: usize,
    },
    DegenerateGenerator,
    MaskShape {
        r: u32,
    },
    MaskPopcount {
        expected: u64,
        found: u64,
    },
    EmptyRule,
    TriangleRule {
        n: u64,
        r: u32,
    },
    MissingRule,
    ConflictingRule,
    SeriesOnlyNotFlagged,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
            Violation::NonIntegerScale => write!(f, "geometric constructions need an integer r"),
            Violation::ScaleTooSmall { r } => write!(f, "scale r = {r} must be at least 2"),
            Violation::ScaleMismatch { declared, rule } => {
                write!(f, "declared r = {declared} but the rule uses r = {rule}")
            }
            Violation::ClassMismatch { declared } => {
                write!(f, "rule does not fit declared class {declared}")
            }
            Violation::VertexCount { expected, found } => {
                write!(
                    f,
                    "generator needs N+1 = {expected} vertices, found {found}"
                )
            }
            Violation::StartNotOrigin => write!(f, "generator must start at (0,0)"),
            Violation::EndNotUnit => write!(f, "generator must end at (1,0)"),
            Violation::SegmentLength {
                index,
                found,
                expected,
            } => write!(
                f,
                "segment {index} has squared length {found}, expected {expected}"
            ),
            Violation::BelowBaseline { index } => {
                write!(f, "generator vertex {index} lies below the baseline")
            }
            Violation::DegenerateGenerator => {
                write!(
                    f,
                    "degenerate generator: no interior vertex above the baseline"
                )
            }
            Violation::MaskShape { r } => write!(f, "mask must be {r}×{r}"),
            Violation::MaskPopcount { expected, found } => {
                write!(f, "mask keeps {found} cells but N = {expected}")
            }
            Violation::EmptyRule => write!(f, "rule keeps no pieces"),
            Violation::TriangleRule { n, r } => write!(
                f,
                "triangle subdivision has N = 3, r = 2; declared N = {n}, r = {r}"
            ),
            Violation::MissingRule => write!(f, "no generator, mask or series_only flag given"),
            Violation::ConflictingRule => write!(f, "more than one rule given"),
            Violation::SeriesOnlyNotFlagged => {
                write!(f, "series-only constructions must be flagged as such")
            }
        }
    }
}

fn integer_scale(p: &ParamPoint) -> Option<u32> {
    let r = p.scale();
    if r.is_integer() {
        u32::try_from(r.numer()).ok()
    } else {
        None
    }
}

/// Every broken invariant of `spec`; empty means valid.
pub fn violations(spec: &ConstructionSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let p = &spec.params;
    let Some(r) = integer_scale(p) else {
        return vec![Violation::NonIntegerScale];
    };
    match &spec.rule {
        Rule::Generator { template, .. } => {
            if p.class() != ClassTag::Additive {
                out.push(Violation::ClassMismatch {
                    declared: p.class(),
                });
            }
            if template.scale() != r {
                out.push(Violation::ScaleMismatch {
                    declared: r,
                    rule: template.scale(),
                });
            }
            out.extend(template.violations(p.n_pieces()));
        }
        Rule::Subdivision(rule) => {
            if p.class() != ClassTag::Subtractive {
                out.push(Violation::ClassMismatch {
                    declared: p.class(),
                });
            }
            out.extend(rule.violations(p.n_pieces(), r));
        }
        Rule::SeriesOnly { .. } => {
            if p.class() != ClassTag::Additive {
                out.push(Violation::ClassMismatch {
                    declared: p.class(),
                });
            }
            if r < 2 {
                out.push(Violation::ScaleTooSmall { r });
            }
        }
    }
    out
}

pub fn validate(spec: &ConstructionSpec) -> std::result::Result<(), Vec<Violation>> {
    let v = violations(spec);
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

fn q(a: (i64, i64), b: (i64, i64)) -> QuadExt {
    QuadExt::new(Rat::new(a.0, a.1), Rat::new(b.0, b.1))
}

fn rational_polyline(coords: &[(i64, i64, i64, i64)]) -> Vec<Point> {
    coords
        .iter()
        .map(|&(xn, xd, yn, yd)| Point::rational(Rat::new(xn, xd), Rat::new(yn, yd)))
        .collect()
}

fn grid(r: u32, keep: &[(usize, usize)]) -> Subdivision {
    let mut mask = vec![vec![false; r as usize]; r as usize];
    for &(row, col) in keep {
        mask[row][col] = true;
    }
    Subdivision::SquareGrid { r, mask }
}

/// One of the eight built-in constructions by name.
pub fn builtin(name: &str) -> Result<ConstructionSpec> {
    let params = |n: u64, r: i64, class| {
        ParamPoint::new(n, Rat::from_integer(r), class).expect("built-in parameters are valid")
    };
    let (p, rule) = match name {
        "sierpinski-triangle" => (
            params(3, 2, ClassTag::Subtractive),
            Rule::Subdivision(SubdivisionRule::new(Subdivision::Triangle4)),
        ),
        "sierpinski-carpet" => {
            let cells: Vec<_> = (0..3)
                .flat_map(|row| (0..3).map(move |col| (row, col)))
                .filter(|&c| c != (1, 1))
                .collect();
            (
                params(8, 3, ClassTag::Subtractive),
                Rule::Subdivision(SubdivisionRule::new(grid(3, &cells))),
            )
        }
        "koch-snowflake" => {
            let vertices = vec![
                Point::origin(),
                Point::rational(Rat::new(1, 3), Rat::zero()),
                Point::new(q((1, 2), (0, 1)), q((0, 1), (1, 6))),
                Point::rational(Rat::new(2, 3), Rat::zero()),
                Point::rational(Rat::one(), Rat::zero()),
            ];
            (
                params(4, 3, ClassTag::Additive),
                Rule::Generator {
                    template: GeneratorTemplate::unchecked(vertices, 3),
                    base: Shape::Triangle,
                },
            )
        }
        "koch-square" => (
            params(5, 3, ClassTag::Additive),
            Rule::Generator {
                template: GeneratorTemplate::unchecked(
                    rational_polyline(&[
                        (0, 1, 0, 1),
                        (1, 3, 0, 1),
                        (1, 3, 1, 3),
                        (2, 3, 1, 3),
                        (2, 3, 0, 1),
                        (1, 1, 0, 1),
                    ]),
                    3,
                ),
                base: Shape::Square,
            },
        ),
        "sub-2-3" => (
            params(2, 3, ClassTag::Subtractive),
            Rule::Subdivision(SubdivisionRule::new(grid(3, &[(0, 0), (2, 2)]))),
        ),
        "add-6-4" => (
            params(6, 4, ClassTag::Additive),
            Rule::Generator {
                template: GeneratorTemplate::unchecked(
                    rational_polyline(&[
                        (0, 1, 0, 1),
                        (1, 4, 0, 1),
                        (1, 2, 0, 1),
                        (1, 2, 1, 4),
                        (3, 4, 1, 4),
                        (3, 4, 0, 1),
                        (1, 1, 0, 1),
                    ]),
                    4,
                ),
                base: Shape::Square,
            },
        ),
        "add-10-3" => (
            params(10, 3, ClassTag::Additive),
            Rule::SeriesOnly {
                base: Shape::Square,
                c: None,
            },
        ),
        "sub-5-3" => (
            params(5, 3, ClassTag::Subtractive),
            Rule::Subdivision(SubdivisionRule::new(grid(
                3,
                &[(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)],
            ))),
        ),
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(ConstructionSpec {
        name: name.to_string(),
        params: p,
        rule,
        provenance: Provenance::BuiltIn,
    })
}

pub fn builtins() -> Vec<ConstructionSpec> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("listed built-in"))
        .collect()
}

/// Coordinate `a + b√3` written as `[a, b]`.
type CoordDoc = (Rat, Rat);

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstructionDoc {
    name: String,
    class: ClassTag,
    #[serde(rename = "N")]
    n: u64,
    r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Vec<(CoordDoc, CoordDoc)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    series_only: bool,
}

fn coord(v: &QuadExt) -> CoordDoc {
    (v.rational().clone(), v.surd().clone())
}

fn from_document(doc: ConstructionDoc) -> Result<ConstructionSpec> {
    let params = ParamPoint::new(doc.n, Rat::from(doc.r), doc.class)
        .map_err(|e| Error::Validation(vec![Violation::InvalidParams(e.to_string())]))?;
    let given = doc.generator.is_some() as u8 + doc.mask.is_some() as u8 + doc.series_only as u8;
    if given > 1 {
        return Err(Error::Validation(vec![Violation::ConflictingRule]));
    }
    let rule = match (doc.class, doc.generator, doc.mask, doc.series_only) {
        (_, Some(g), _, _) => Rule::Generator {
            template: GeneratorTemplate::unchecked(
                g.into_iter()
                    .map(|((xa, xb), (ya, yb))| {
                        Point::new(QuadExt::new(xa, xb), QuadExt::new(ya, yb))
                    })
                    .collect(),
                doc.r,
            ),
            base: doc.base.unwrap_or(Shape::Square),
        },
        (_, None, Some(mask), _) => {
            let mask = mask
                .into_iter()
                .map(|row| row.into_iter().map(|c| c != 0).collect())
                .collect();
            if doc.base == Some(Shape::Triangle) {
                return Err(Error::Validation(vec![Violation::ConflictingRule]));
            }
            Rule::Subdivision(SubdivisionRule::new(Subdivision::SquareGrid {
                r: doc.r,
                mask,
            }))
        }
        (_, None, None, true) => Rule::SeriesOnly {
            base: doc.base.unwrap_or(Shape::Square),
            c: None,
        },
        (ClassTag::Subtractive, None, None, false) if doc.base == Some(Shape::Triangle) => {
            Rule::Subdivision(SubdivisionRule::new(Subdivision::Triangle4))
        }
        _ => return Err(Error::Validation(vec![Violation::MissingRule])),
    };
    ConstructionSpec::new(doc.name, params, rule)
}

/// Parses and validates a construction file.
pub fn load_construction(document: &str) -> Result<ConstructionSpec> {
    let doc: ConstructionDoc = serde_json::from_str(document).map_err(|e| Error::Document {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_document(doc)
}

/// Pretty JSON in the construction file format, newline terminated.
pub fn serialize(spec: &ConstructionSpec) -> String {
    let p = &spec.params;
    let r = integer_scale(p).unwrap_or(0);
    let mut doc = ConstructionDoc {
        name: spec.name.clone(),
        class: p.class(),
        n: p.n_pieces(),
        r,
        base: None,
        generator: None,
        mask: None,
        series_only: false,
    };
    match &spec.rule {
        Rule::Generator { template, base } => {
            doc.base = Some(*base);
            doc.generator = Some(
                template
                    .vertices()
                    .iter()
                    .map(|v| (coord(&v.x), coord(&v.y)))
                    .collect(),
            );
        }
        Rule::Subdivision(rule) => match rule.archetype() {
            Subdivision::SquareGrid { mask, .. } => {
                doc.base = Some(Shape::Square);
                doc.mask = Some(
                    mask.iter()
                        .map(|row| row.iter().map(|&k| k as u8).collect())
                        .collect(),
                );
            }
            Subdivision::Triangle4 => doc.base = Some(Shape::Triangle),
        },
        Rule::SeriesOnly { base, .. } => {
            doc.base = Some(*base);
            doc.series_only = true;
        }
    }
    write_document(&doc)
}

/// Pretty layout with one vertex or mask row per line.
fn write_document(doc: &ConstructionDoc) -> String {
    fn json<T: Serialize + ?Sized>(v: &T) -> String {
        serde_json::to_string(v).expect("construction documents serialize")
    }
    let mut fields = vec![
        format!("\"name\": {}", json(&doc.name)),
        format!("\"class\": {}", json(&doc.class)),
        format!("\"N\": {}", doc.n),
        format!("\"r\": {}", doc.r),
    ];
    if let Some(base) = &doc.base {
        fields.push(format!("\"base\": {}", json(base)));
    }
    let block =
        |key: &str, rows: Vec<String>| format!("\"{key}\": [\n    {}\n  ]", rows.join(",\n    "));
    if let Some(g) = &doc.generator {
        fields.push(block(
            "generator",
            g.iter().map(|v| json(v).replace(",", ", ")).collect(),
        ));
    }
    if let Some(mask) = &doc.mask {
        fields.push(block(
            "mask",
            mask.iter()
                .map(|row| json(row).replace(",", ", "))
                .collect(),
        ));
    }
    if doc.series_only {
        fields.push("\"series_only\": true".into());
    }
    format!("{{\n  {}\n}}\n", fields.join(",\n  "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Regime;

    #[test]
    fn all_builtins_validate() {
        for spec in builtins() {
            assert_eq!(validate(&spec), Ok(()), "{}", spec.name());
        }
    }

    #[test]
    fn builtin_params() {
        let k = builtin("koch-snowflake").unwrap();
        assert_eq!(k.params().n_pieces(), 4);
        assert_eq!(*k.params().scale(), Rat::from_integer(3));
        assert_eq!(k.params().class(), ClassTag::Additive);
        let s = builtin("sub-5-3").unwrap();
        assert_eq!(
            (s.params().n_pieces(), s.params().class()),
            (5, ClassTag::Subtractive)
        );
    }

    #[test]
    fn carpet_mask_drops_centre() {
        let Rule::Subdivision(rule) = builtin("sierpinski-carpet").unwrap().rule().clone() else {
            panic!("carpet is a subdivision");
        };
        let Subdivision::SquareGrid { r, mask } = rule.archetype() else {
            panic!("carpet is a grid");
        };
        assert_eq!(*r, 3);
        for (row, cells) in mask.iter().enumerate() {
            for (col, &keep) in cells.iter().enumerate() {
                assert_eq!(keep, (row, col) != (1, 1));
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin("dragon"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn round_trip_all() {
        for spec in builtins() {
            let text = serialize(&spec);
            let back = load_construction(&text).unwrap();
            assert_eq!(serialize(&back), text);
            assert_eq!(back.rule(), spec.rule());
            assert_eq!(back.params(), spec.params());
        }
    }

    #[test]
    fn arity_violation() {
        let text = r#"{"name":"x","class":"additive","N":5,"r":3,"base":"square",
            "generator":[[["0","0"],["0","0"]],[["1/3","0"],["0","0"]],[["1/3","0"],["1/3","0"]],
            [["2/3","0"],["1/3","0"]],[["1","0"],["0","0"]]]}"#;
        let Err(Error::Validation(v)) = load_construction(text) else {
            panic!("expected a validation error");
        };
        assert!(v.contains(&Violation::VertexCount {
            expected: 6,
            found: 5
        }));
    }

    #[test]
    fn perturbed_segment_named() {
        let mut doc: serde_json::Value =
            serde_json::from_str(&serialize(&builtin("koch-snowflake").unwrap())).unwrap();
        doc["generator"][2] = serde_json::json!([["1/2", "0"], ["1/6", "0"]]);
        let Err(Error::Validation(v)) = load_construction(&doc.to_string()) else {
            panic!("expected a validation error");
        };
        // (1/3,0)→(1/2,1/6): 1/36 + 1/36 = 1/18.
        assert!(v.contains(&Violation::SegmentLength {
            index: 1,
            found: QuadExt::from(Rat::new(1, 18)),
            expected: Rat::new(1, 9),
        }));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::SegmentLength { index: 2, .. })));
    }

    #[test]
    fn popcount_violation() {
        let mut doc: serde_json::Value =
            serde_json::from_str(&serialize(&builtin("sierpinski-carpet").unwrap())).unwrap();
        doc["mask"][0][0] = serde_json::json!(0);
        let Err(Error::Validation(v)) = load_construction(&doc.to_string()) else {
            panic!("expected a validation error");
        };
        assert!(v.contains(&Violation::MaskPopcount {
            expected: 8,
            found: 7
        }));
    }

    #[test]
    fn flat_generator_violation() {
        let text = r#"{"name":"flat","class":"additive","N":3,"r":3,"base":"square",
            "generator":[[["0","0"],["0","0"]],[["1/3","0"],["0","0"]],[["2/3","0"],["0","0"]],[["1","0"],["0","0"]]]}"#;
        let Err(Error::Validation(v)) = load_construction(text) else {
            panic!("expected a validation error");
        };
        assert_eq!(v, vec![Violation::DegenerateGenerator]);
    }

    #[test]
    fn document_errors_carry_position() {
        let err = load_construction("{\n  \"name\": 3\n}").unwrap_err();
        assert!(matches!(err, Error::Document { line: 2, .. }));
        let err = load_construction(r#"{"name":"x","class":"additive","N":1,"r":2,"bogus":1}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Document { .. }));
        let err = load_construction(
            r#"{"name":"x","class":"additive","N":1,"r":2,"generator":[[["1/0","0"],["0","0"]]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Document { .. }));
    }

    #[test]
    fn koch_document_equals_builtin() {
        let text = serialize(&builtin("koch-snowflake").unwrap()).replace("koch-snowflake", "mine");
        let spec = load_construction(&text).unwrap();
        assert_eq!(spec.name(), "mine");
        assert_eq!(
            spec.with_name("koch-snowflake")
                .with_provenance(Provenance::BuiltIn),
            builtin("koch-snowflake").unwrap()
        );
    }

    #[test]
    fn regimes_of_builtins() {
        let regimes: Vec<_> = builtins()
            .iter()
            .map(|s| s.diagnose().unwrap().regime)
            .collect();
        use Regime::*;
        assert_eq!(
            regimes,
            vec![
                Intermediate,
                Intermediate,
                Intermediate,
                Intermediate,
                Subcritical,
                Intermediate,
                Supercritical,
                Intermediate
            ]
        );
    }

    #[test]
    fn series_only_not_realizable_by_geometry() {
        let spec = builtin("add-10-3").unwrap();
        assert!(!spec.is_realizable());
        assert_eq!(spec.area_basis().unwrap(), None);
    }
}
