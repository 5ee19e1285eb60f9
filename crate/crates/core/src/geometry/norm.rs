use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm2;

/// A norm on R^d. `P(1.0)` is the sum norm, the dual of `Maximum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpec", into = "NormSpec")]
pub enum Norm {
    Euclidean,
    Maximum,
    P(f64),
}

/// Wire format: `{"kind": "euclidean" | "maximum" | "p", "p": number}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl TryFrom<NormSpec> for Norm {
    type Error = Error;

    fn try_from(s: NormSpec) -> Result<Self> {
        match s.kind.as_str() {
            "euclidean" => Ok(Norm::Euclidean),
            "maximum" => Ok(Norm::Maximum),
            "p" => Norm::p(s.p.ok_or_else(|| Error::invalid("p-norm without exponent"))?),
            other => Err(Error::invalid(format!("unknown norm kind `{other}`"))),
        }
    }
}

impl From<Norm> for NormSpec {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Euclidean => NormSpec { kind: "euclidean".into(), p: None },
            Norm::Maximum => NormSpec { kind: "maximum".into(), p: None },
            Norm::P(p) => NormSpec { kind: "p".into(), p: Some(p) },
        }
    }
}

enum Kind {
    Two,
    Inf,
    One,
    General(f64),
}

impl Norm {
    pub fn p(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::invalid(format!("p-norm exponent {p} must be finite and >= 1")));
        }
        Ok(Norm::P(p))
    }

    pub const SUM: Norm = Norm::P(1.0);

    fn kind(&self) -> Kind {
        match *self {
            Norm::Euclidean => Kind::Two,
            Norm::Maximum => Kind::Inf,
            Norm::P(p) if p == 1.0 => Kind::One,
            Norm::P(p) if p == 2.0 => Kind::Two,
            Norm::P(p) => Kind::General(p),
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        match self.kind() {
            Kind::Two => norm2(v),
            Kind::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Kind::One => v.iter().map(|x| x.abs()).sum(),
            Kind::General(p) => {
                let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }

    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.norm(&d)
    }

    pub fn dual(&self) -> Norm {
        match self.kind() {
            Kind::Two => Norm::Euclidean,
            Kind::Inf => Norm::SUM,
            Kind::One => Norm::Maximum,
            Kind::General(p) => Norm::P(p / (p - 1.0)),
        }
    }

    pub fn dual_norm(&self, v: &[f64]) -> f64 {
        self.dual().norm(v)
    }

    /// Maximum and sum norms: their unit balls are polytopes.
    pub fn is_polyhedral(&self) -> bool {
        matches!(self.kind(), Kind::Inf | Kind::One)
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind(), Kind::Two)
    }

    pub fn is_maximum(&self) -> bool {
        matches!(self.kind(), Kind::Inf)
    }

    pub fn is_sum(&self) -> bool {
        matches!(self.kind(), Kind::One)
    }

    /// A functional `g` with dual norm 1 and `<g, v> = ||v||`.
    /// Ties pick the lowest coordinate; zero entries get sign +1.
    pub fn subgradient(&self, v: &[f64]) -> Vec<f64> {
        let d = v.len();
        let nv = self.norm(v);
        if nv == 0.0 {
            let mut g = vec![0.0; d];
            if d > 0 {
                match self.kind() {
                    Kind::One => g.iter_mut().for_each(|x| *x = 1.0),
                    _ => g[0] = 1.0,
                }
            }
            return g;
        }
        match self.kind() {
            Kind::Two => v.iter().map(|x| x / nv).collect(),
            Kind::Inf => {
                let j = (0..d).find(|&j| v[j].abs() == nv).unwrap_or(0);
                let mut g = vec![0.0; d];
                g[j] = if v[j] < 0.0 { -1.0 } else { 1.0 };
                g
            }
            Kind::One => v.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect(),
            Kind::General(p) => v
                .iter()
                .map(|&x| x.signum() * (x.abs() / nv).powf(p - 1.0))
                .collect(),
        }
    }

    /// A primal unit vector `u` with `<xs, u> = ||xs||_*`.
    pub fn aligned(&self, xs: &[f64]) -> Vec<f64> {
        self.dual().subgradient(xs)
    }

    /// Constant `c` with `||v|| <= c ||v||_2` in R^d.
    pub fn euclid_factor(&self, d: usize) -> f64 {
        let d = d.max(1) as f64;
        match self.kind() {
            Kind::Two | Kind::Inf => 1.0,
            Kind::One => d.sqrt(),
            Kind::General(p) => d.powf(1.0 / p - 0.5).max(1.0),
        }
    }

    /// Constant `c` with `||v||_2 <= c ||v||` in R^d.
    pub fn euclid_dominance(&self, d: usize) -> f64 {
        let d = d.max(1) as f64;
        match self.kind() {
            Kind::Two | Kind::One => 1.0,
            Kind::Inf => d.sqrt(),
            Kind::General(p) => d.powf(0.5 - 1.0 / p).max(1.0),
        }
    }

    pub fn label(&self) -> String {
        match self.kind() {
            Kind::Two => "euclidean".into(),
            Kind::Inf => "maximum".into(),
            Kind::One => "sum".into(),
            Kind::General(p) => format!("p={p}"),
        }
    }
}
