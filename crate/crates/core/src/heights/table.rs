use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::HeightError;
use crate::pmgraph::{PmGraph, RawGraph};
use crate::rational::{format_rational, parse_rational, serde_rational_opt, to_f64, Rational};
use crate::siegel::OmegaFile;

/// A real number written as an exact rational plus a float.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mixed {
    pub exact: Rational,
    pub float: f64,
}

impl Mixed {
    pub fn exact(r: Rational) -> Mixed {
        Mixed { exact: r, float: 0.0 }
    }

    pub fn float(x: f64) -> Mixed {
        Mixed {
            exact: Rational::zero(),
            float: x,
        }
    }

    pub fn zero() -> Mixed {
        Mixed::default()
    }

    pub fn total(&self) -> f64 {
        to_f64(&self.exact) + self.float
    }

    pub fn scale(&self, r: &Rational) -> Mixed {
        Mixed {
            exact: &self.exact * r,
            float: self.float * to_f64(r),
        }
    }

    /// `self * log Nv`.
    pub fn weighted(&self, w: &LogNv) -> Mixed {
        match w {
            LogNv::Exact(l) => self.scale(l),
            LogNv::Float(x) => Mixed::float(self.total() * x),
        }
    }

    /// Exact parts equal and float parts within `tol` relative to the larger magnitude (at least one).
    pub fn approx_eq(&self, other: &Mixed, tol: f64) -> bool {
        let scale = self.float.abs().max(other.float.abs()).max(1.0);
        self.exact == other.exact && (self.float - other.float).abs() <= tol * scale
    }
}

impl Add for Mixed {
    type Output = Mixed;
    fn add(self, o: Mixed) -> Mixed {
        Mixed {
            exact: self.exact + o.exact,
            float: self.float + o.float,
        }
    }
}

impl AddAssign for Mixed {
    fn add_assign(&mut self, o: Mixed) {
        self.exact += o.exact;
        self.float += o.float;
    }
}

impl Sub for Mixed {
    type Output = Mixed;
    fn sub(self, o: Mixed) -> Mixed {
        self + (-o)
    }
}

impl Neg for Mixed {
    type Output = Mixed;
    fn neg(self) -> Mixed {
        Mixed {
            exact: -self.exact,
            float: -self.float,
        }
    }
}

impl std::iter::Sum for Mixed {
    fn sum<I: Iterator<Item = Mixed>>(iter: I) -> Mixed {
        iter.fold(Mixed::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Mixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {:e}", format_rational(&self.exact), self.float)
    }
}

impl Serialize for Mixed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Mixed", 3)?;
        st.serialize_field("exact", &format_rational(&self.exact))?;
        st.serialize_field("float", &self.float)?;
        st.serialize_field("total", &self.total())?;
        st.end()
    }
}

/// `log Nv`: JSON integers and `"p/q"` strings are exact, JSON floats are floats.
#[derive(Debug, Clone, PartialEq)]
pub enum LogNv {
    Exact(Rational),
    Float(f64),
}

impl LogNv {
    pub fn value(&self) -> f64 {
        match self {
            LogNv::Exact(r) => to_f64(r),
            LogNv::Float(x) => *x,
        }
    }

    pub fn one() -> LogNv {
        LogNv::Exact(Rational::from_integer(1.into()))
    }

    fn is_positive(&self) -> bool {
        match self {
            LogNv::Exact(r) => r.is_positive(),
            LogNv::Float(x) => *x > 0.0,
        }
    }
}

impl Serialize for LogNv {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LogNv::Exact(r) => s.serialize_str(&format_rational(r)),
            LogNv::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for LogNv {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<LogNv, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(LogNv::Exact(Rational::from_integer(n.into()))),
            Raw::Float(x) => Ok(LogNv::Float(x)),
            Raw::Str(s) => parse_rational(&s).map(LogNv::Exact).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFinitePlace")]
pub struct FinitePlace {
    pub label: String,
    pub log_nv: LogNv,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub ord: Option<Rational>,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Rational>,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rational>,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub phi: Option<Rational>,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub delta: Option<Rational>,
    /// `delta_0, delta_1, ...`.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_q_vec")]
    pub delta_by_type: Option<Vec<Rational>>,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub h: Option<Rational>,
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub ord_lower_bound: Option<Rational>,
    /// `ord_lower_bound / 18 - lambda`.
    #[serde(with = "serde_rational_opt", skip_serializing_if = "Option::is_none")]
    pub local_bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PmGraph>,
}

fn ser_q_vec<S: serde::Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
    let strings: Option<Vec<String>> = v.as_ref().map(|v| v.iter().map(format_rational).collect());
    strings.serialize(s)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFinitePlace {
    label: String,
    #[serde(default)]
    log_nv: Option<LogNv>,
    /// Residue field size; `log_nv = ln(norm)` when `log_nv` is absent.
    #[serde(default)]
    norm: Option<u64>,
    #[serde(default, with = "serde_rational_opt")]
    ord: Option<Rational>,
    #[serde(default, with = "serde_rational_opt")]
    lambda: Option<Rational>,
    #[serde(default, with = "serde_rational_opt")]
    epsilon: Option<Rational>,
    #[serde(default, with = "serde_rational_opt")]
    phi: Option<Rational>,
    #[serde(default, with = "serde_rational_opt")]
    delta: Option<Rational>,
    #[serde(default)]
    delta_by_type: Option<Vec<String>>,
    #[serde(default, with = "serde_rational_opt")]
    h: Option<Rational>,
    #[serde(default, with = "serde_rational_opt")]
    ord_lower_bound: Option<Rational>,
    #[serde(default, with = "serde_rational_opt")]
    local_bound: Option<Rational>,
    #[serde(default)]
    graph: Option<RawGraph>,
}

impl TryFrom<RawFinitePlace> for FinitePlace {
    type Error = String;

    fn try_from(r: RawFinitePlace) -> Result<FinitePlace, String> {
        let log_nv = match (r.log_nv, r.norm) {
            (Some(l), None) => l,
            (None, Some(n)) if n >= 2 => LogNv::Float((n as f64).ln()),
            (None, Some(n)) => return Err(format!("place {}: norm {n} < 2", r.label)),
            (Some(_), Some(_)) => return Err(format!("place {}: give log_nv or norm, not both", r.label)),
            (None, None) => return Err(format!("place {}: missing log_nv", r.label)),
        };
        let delta_by_type = r
            .delta_by_type
            .map(|v| v.iter().map(|s| parse_rational(s).map_err(|e| e.to_string())).collect())
            .transpose()?;
        let graph = r
            .graph
            .map(|g| PmGraph::validate(&g).map_err(|e| format!("place {}: {e}", r.label)))
            .transpose()?;
        Ok(FinitePlace {
            label: r.label,
            log_nv,
            ord: r.ord,
            lambda: r.lambda,
            epsilon: r.epsilon,
            phi: r.phi,
            delta: r.delta,
            delta_by_type,
            h: r.h,
            ord_lower_bound: r.ord_lower_bound,
            local_bound: r.local_bound,
            graph,
        })
    }
}

impl FinitePlace {
    pub fn new(label: &str, log_nv: LogNv) -> FinitePlace {
        FinitePlace {
            label: label.to_string(),
            log_nv,
            ord: None,
            lambda: None,
            epsilon: None,
            phi: None,
            delta: None,
            delta_by_type: None,
            h: None,
            ord_lower_bound: None,
            local_bound: None,
            graph: None,
        }
    }

    pub(crate) fn require<'a>(
        &self,
        field: &'static str,
        value: &'a Option<Rational>,
    ) -> Result<&'a Rational, HeightError> {
        value.as_ref().ok_or_else(|| HeightError::MissingField {
            place: self.label.clone(),
            field,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfinitePlace {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_norm_chi18: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Period matrix; `log_norm_chi18` is computed from it when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaFile>,
}

impl InfinitePlace {
    pub fn new(label: &str) -> InfinitePlace {
        InfinitePlace {
            label: label.to_string(),
            ..Default::default()
        }
    }

    pub(crate) fn require(&self, field: &'static str, value: Option<f64>) -> Result<f64, HeightError> {
        value.ok_or_else(|| HeightError::MissingField {
            place: self.label.clone(),
            field,
        })
    }
}

/// All places of a curve over a number field, with optional global quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceTable {
    pub g: u32,
    /// `[k : Q]`.
    #[serde(default = "one_u32")]
    pub degree: u32,
    #[serde(default)]
    pub finite: Vec<FinitePlace>,
    #[serde(default)]
    pub infinite: Vec<InfinitePlace>,
    /// Admissible self-intersection of the dualizing sheaf.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_hat_sq: Option<f64>,
    /// Arakelov self-intersection of the dualizing sheaf.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_bar_sq: Option<f64>,
    /// Stable Faltings height `deg det f_* omega`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faltings_degree: Option<f64>,
    /// Neron-Tate height of `x_alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nt_height: Option<f64>,
}

fn one_u32() -> u32 {
    1
}

impl PlaceTable {
    pub fn new(g: u32) -> PlaceTable {
        PlaceTable {
            g,
            degree: 1,
            finite: Vec::new(),
            infinite: Vec::new(),
            omega_hat_sq: None,
            omega_bar_sq: None,
            faltings_degree: None,
            nt_height: None,
        }
    }

    pub fn validate(&self) -> Result<(), HeightError> {
        if self.g < 2 {
            return Err(HeightError::WrongGenus(self.g));
        }
        if self.degree == 0 {
            return Err(HeightError::Parse("degree [k:Q] must be positive".into()));
        }
        for p in &self.finite {
            if !p.log_nv.is_positive() {
                return Err(HeightError::NonPositiveLogNorm { place: p.label.clone() });
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<PlaceTable, HeightError> {
        let table: PlaceTable = serde_json::from_str(text).map_err(|e| HeightError::Parse(e.to_string()))?;
        table.validate()?;
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("place table serializes")
    }

    pub(crate) fn require_global(&self, field: &'static str, value: Option<f64>) -> Result<f64, HeightError> {
        value.ok_or_else(|| HeightError::MissingField {
            place: "<table>".into(),
            field,
        })
    }
}
