//! The `(N, r, class)` parameter space: growth ratios, similarity dimension,
//! regime classification and the joint perimeter/area diagnosis.
//!
//! Every decision in this module is made with exact rational comparisons
//! (`N` against `r` and `r²`). The similarity dimension is computed in
//! floating point for display only.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::QuadExt;
use crate::rat::Rat;
use crate::series::{self, AdditiveAreaBasis, AreaLimit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassTag {
    Additive,
    Subtractive,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::Additive => "additive",
            ClassTag::Subtractive => "subtractive",
        })
    }
}

impl std::str::FromStr for ClassTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(ClassTag::Additive),
            "subtractive" => Ok(ClassTag::Subtractive),
            other => Err(Error::InvalidParameter(format!("unknown class `{other}`"))),
        }
    }
}

/// A point `(N, r, class)`: `N` pieces, each scaled by `1/r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamPoint {
    n_pieces: u64,
    scale: Rat,
    class: ClassTag,
}

impl ParamPoint {
    pub fn new(n_pieces: u64, scale: Rat, class: ClassTag) -> Result<Self> {
        if n_pieces == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if scale <= Rat::one() {
            return Err(Error::InvalidParameter(format!(
                "r must exceed 1, got {scale}"
            )));
        }
        Ok(ParamPoint {
            n_pieces,
            scale,
            class,
        })
    }

    pub fn n_pieces(&self) -> u64 {
        self.n_pieces
    }

    pub fn scale(&self) -> &Rat {
        &self.scale
    }

    pub fn class(&self) -> ClassTag {
        self.class
    }

    pub fn with_class(&self, class: ClassTag) -> Self {
        ParamPoint {
            class,
            ..self.clone()
        }
    }

    fn n_rat(&self) -> Rat {
        Rat::from(BigInt::from(self.n_pieces))
    }
}

/// `alpha = N/r` (perimeter ratio per step), `beta = N/r²` (area ratio).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRatios {
    pub alpha: Rat,
    pub beta: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Intermediate,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Intermediate => "intermediate",
            Regime::Supercritical => "supercritical",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerimeterVerdict {
    TendsToZero,
    Constant,
    Divergent,
}

impl fmt::Display for PerimeterVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerimeterVerdict::TendsToZero => "tends to zero",
            PerimeterVerdict::Constant => "constant",
            PerimeterVerdict::Divergent => "divergent",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Note {
    /// The finite area value holds only if added bumps never overlap.
    #[serde(rename = "conditional_on_nonoverlap")]
    ConditionalOnNonOverlap,
    /// A positive finite limit exists but its value needs a generator.
    LimitValueNeedsGenerator,
    /// Supercritical additive: what diverges is the area series counted with
    /// multiplicity, not necessarily the area of a planar realization.
    CountsWithMultiplicity,
    /// `N = 1` lies outside the constructions the regime table was stated
    /// for; the inequalities are applied verbatim.
    SinglePieceExtension,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnosis {
    pub params: ParamPoint,
    pub ratios: GrowthRatios,
    pub dimension: f64,
    pub regime: Regime,
    pub perimeter: PerimeterVerdict,
    pub area: AreaLimit,
    pub notes: Vec<Note>,
}

impl Diagnosis {
    pub fn conditional_on_nonoverlap(&self) -> bool {
        self.notes.contains(&Note::ConditionalOnNonOverlap)
    }
}

pub fn growth_ratios(p: &ParamPoint) -> GrowthRatios {
    let n = p.n_rat();
    let alpha = &n / &p.scale;
    let beta = &alpha / &p.scale;
    GrowthRatios { alpha, beta }
}

fn ln_big(x: &BigInt) -> f64 {
    // Shift very large integers into f64 range before taking the log.
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 900;
        let top: BigInt = x >> shift;
        top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `log N / log r`.
pub fn similarity_dimension(p: &ParamPoint) -> f64 {
    let ln_n = (p.n_pieces as f64).ln();
    let ln_r = ln_big(&p.scale.numer()) - ln_big(&p.scale.denom());
    ln_n / ln_r
}

/// Renders a dimension with a fixed number of decimals.
pub fn format_dimension(d: f64, decimals: usize) -> String {
    format!("{d:.decimals$}")
}

/// `N ≤ r` subcritical, `r < N < r²` intermediate, `N ≥ r²` supercritical.
pub fn classify_regime(p: &ParamPoint) -> Regime {
    let n = p.n_rat();
    let r = &p.scale;
    if n <= *r {
        Regime::Subcritical
    } else if n < r * r {
        Regime::Intermediate
    } else {
        Regime::Supercritical
    }
}

pub fn perimeter_verdict(ratios: &GrowthRatios) -> PerimeterVerdict {
    match ratios.alpha.cmp(&Rat::one()) {
        std::cmp::Ordering::Less => PerimeterVerdict::TendsToZero,
        std::cmp::Ordering::Equal => PerimeterVerdict::Constant,
        std::cmp::Ordering::Greater => PerimeterVerdict::Divergent,
    }
}

/// Joint perimeter/area diagnosis. With an additive area basis the finite
/// limit carries its exact value; without one it is reported qualitatively.
pub fn diagnose(p: &ParamPoint, basis: Option<&AdditiveAreaBasis>) -> Diagnosis {
    let ratios = growth_ratios(p);
    let area = series::area_limit(p, basis);
    let mut notes = Vec::new();
    if p.class == ClassTag::Additive {
        match &area {
            AreaLimit::Finite(value) => {
                notes.push(Note::ConditionalOnNonOverlap);
                if value.is_none() {
                    notes.push(Note::LimitValueNeedsGenerator);
                }
            }
            AreaLimit::LinearGrowth(_) => notes.push(Note::ConditionalOnNonOverlap),
            AreaLimit::Infinite => notes.push(Note::CountsWithMultiplicity),
            _ => {}
        }
    }
    if p.n_pieces == 1 {
        notes.push(Note::SinglePieceExtension);
    }
    Diagnosis {
        dimension: similarity_dimension(p),
        regime: classify_regime(p),
        perimeter: perimeter_verdict(&ratios),
        params: p.clone(),
        ratios,
        area,
        notes,
    }
}

/// JSON shape of a diagnosis.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosisReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub r: String,
    pub class: ClassTag,
    pub alpha: String,
    pub beta: String,
    pub dimension: f64,
    pub regime: Regime,
    pub perimeter: PerimeterVerdict,
    pub area: AreaReport,
    pub conditional_on_nonoverlap: bool,
    pub notes: Vec<Note>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaReport {
    pub verdict: &'static str,
    pub exact: Option<String>,
    pub decimal: Option<String>,
}

impl AreaReport {
    fn new(area: &AreaLimit) -> Self {
        let value: Option<&QuadExt> = area.value();
        AreaReport {
            verdict: area.tag(),
            exact: value.map(|v| v.to_string()),
            decimal: value.map(|v| v.to_decimal(12)),
        }
    }
}

impl From<&Diagnosis> for DiagnosisReport {
    fn from(d: &Diagnosis) -> Self {
        DiagnosisReport {
            n: d.params.n_pieces,
            r: d.params.scale.to_string(),
            class: d.params.class,
            alpha: d.ratios.alpha.to_string(),
            beta: d.ratios.beta.to_string(),
            dimension: d.dimension,
            regime: d.regime,
            perimeter: d.perimeter,
            area: AreaReport::new(&d.area),
            conditional_on_nonoverlap: d.conditional_on_nonoverlap(),
            notes: d.notes.clone(),
        }
    }
}
