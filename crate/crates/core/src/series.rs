//! Closed-form perimeter and area sequences and their limits.
//!
//! Perimeter follows `P_n = P_0·alpha^n` under both conventions (arc length
//! for additive curves, total edge length for subtractive piece sets).
//! Subtractive area is `A_0·beta^n`; additive area is the partial geometric
//! sum `A_0 + C·Σ_{k=1..n} beta^(k−1)`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::ElementCap;
use crate::params::{growth_ratios, ClassTag, ParamPoint};
use crate::qfield::QuadExt;
use crate::rat::Rat;
use crate::registry::ConstructionSpec;

/// Initial area `A_0`, first-step bump total `C`, and area ratio `beta` of an
/// additive construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveAreaBasis {
    a0: QuadExt,
    c: QuadExt,
    beta: Rat,
}

impl AdditiveAreaBasis {
    pub fn new(a0: QuadExt, c: QuadExt, beta: Rat) -> Result<Self> {
        if a0.sign() <= 0 || c.sign() <= 0 {
            return Err(Error::InvalidParameter(
                "additive area basis needs A0 > 0 and C > 0".into(),
            ));
        }
        Ok(AdditiveAreaBasis { a0, c, beta })
    }

    pub fn a0(&self) -> &QuadExt {
        &self.a0
    }

    pub fn c(&self) -> &QuadExt {
        &self.c
    }

    pub fn beta(&self) -> &Rat {
        &self.beta
    }
}

/// Asymptotic area outcome. Values are attached when they are computable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AreaLimit {
    Zero,
    /// Subtractive with `beta = 1`: the area stays at `A_0`.
    ConstantA0(Option<QuadExt>),
    /// Additive with `beta < 1`: `A_0 + C/(1 − beta)`.
    Finite(Option<QuadExt>),
    /// Additive with `beta = 1`; the payload is the per-step slope `C`.
    LinearGrowth(Option<QuadExt>),
    Infinite,
    /// Subtractive with `beta > 1`.
    NotRealizable,
}

impl AreaLimit {
    pub fn value(&self) -> Option<&QuadExt> {
        match self {
            AreaLimit::ConstantA0(v) | AreaLimit::Finite(v) | AreaLimit::LinearGrowth(v) => {
                v.as_ref()
            }
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            AreaLimit::Zero => "zero",
            AreaLimit::ConstantA0(_) => "constant_a0",
            AreaLimit::Finite(_) => "finite_limit",
            AreaLimit::LinearGrowth(_) => "linear_growth",
            AreaLimit::Infinite => "divergent",
            AreaLimit::NotRealizable => "not_realizable",
        }
    }
}

pub fn perimeter_at(p: &ParamPoint, p0: &QuadExt, n: u32) -> QuadExt {
    p0.scale(&growth_ratios(p).alpha.pow(n))
}

pub fn area_at_subtractive(a0: &QuadExt, beta: &Rat, n: u32) -> QuadExt {
    a0.scale(&beta.pow(n))
}

pub fn area_at_additive(basis: &AdditiveAreaBasis, n: u32) -> QuadExt {
    let one = Rat::one();
    let partial = if basis.beta == one {
        Rat::from(n)
    } else {
        &(&one - &basis.beta.pow(n)) / &(&one - &basis.beta)
    };
    &basis.a0 + &basis.c.scale(&partial)
}

pub fn area_limit(p: &ParamPoint, basis: Option<&AdditiveAreaBasis>) -> AreaLimit {
    let beta = growth_ratios(p).beta;
    let one = Rat::one();
    match (p.class(), beta.cmp(&one)) {
        (ClassTag::Subtractive, std::cmp::Ordering::Less) => AreaLimit::Zero,
        (ClassTag::Subtractive, std::cmp::Ordering::Equal) => AreaLimit::ConstantA0(None),
        (ClassTag::Subtractive, std::cmp::Ordering::Greater) => AreaLimit::NotRealizable,
        (ClassTag::Additive, std::cmp::Ordering::Less) => AreaLimit::Finite(basis.map(|b| {
            let tail = b.c.scale(&(&one - &b.beta).recip().expect("beta < 1"));
            &b.a0 + &tail
        })),
        (ClassTag::Additive, std::cmp::Ordering::Equal) => {
            AreaLimit::LinearGrowth(basis.map(|b| b.c.clone()))
        }
        (ClassTag::Additive, std::cmp::Ordering::Greater) => AreaLimit::Infinite,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesRow {
    pub depth: u32,
    #[serde(serialize_with = "as_text")]
    pub element_count: BigUint,
    pub element_length: Rat,
    pub perimeter: QuadExt,
    /// Absent when the construction carries no area constant (series-only
    /// generators beyond depth 0).
    pub area: Option<QuadExt>,
}

fn as_text<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Rows `0..=max_depth` of exact perimeter and area values.
pub fn series_table(
    spec: &ConstructionSpec,
    max_depth: u32,
    cap: ElementCap,
) -> Result<Vec<SeriesRow>> {
    let p = spec.params();
    let n_pieces = BigUint::from(p.n_pieces());
    let s0 = BigUint::from(spec.initial_element_count());
    cap.check(&(&s0 * n_pieces.pow(max_depth)))?;

    let ratios = growth_ratios(p);
    let p0 = spec.initial_perimeter()?;
    let a0 = spec.initial_area()?;
    let l0 = spec.initial_element_length()?;
    let basis = match p.class() {
        ClassTag::Additive => spec.area_basis()?,
        ClassTag::Subtractive => None,
    };
    let r = spec.params().scale();

    Ok((0..=max_depth)
        .map(|n| {
            let area = match (p.class(), &basis) {
                (ClassTag::Subtractive, _) => Some(area_at_subtractive(&a0, &ratios.beta, n)),
                (ClassTag::Additive, Some(b)) => Some(area_at_additive(b, n)),
                (ClassTag::Additive, None) => (n == 0).then(|| a0.clone()),
            };
            SeriesRow {
                depth: n,
                element_count: &s0 * n_pieces.pow(n),
                element_length: &l0 / &r.pow(n),
                perimeter: perimeter_at(p, &p0, n),
                area,
            }
        })
        .collect())
}
