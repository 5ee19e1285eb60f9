//! Scene files: a dimension, a norm, named sets, an optional reference point and
//! command parameters.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Norm, SetRep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSet {
    pub name: String,
    pub set: SetRep,
}

/// Optional parameters shared by the commands; each command reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub eps: Option<f64>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
    pub tau: Option<f64>,
    pub samples: Option<usize>,
    pub budget: Option<usize>,
    /// Distance to compute: `d1`, `d2`, `d3`, `localized` or `all`.
    pub which: Option<String>,
    /// Dual form `D1`..`D6`, or `sum-norm` / `cone-distance` for `alpha-sup`.
    pub form: Option<String>,
    /// Normal cone kind: `frechet`, `clarke` or `convex`.
    pub kind: Option<String>,
    /// Sub-operation of `translate`, `ekeland`, `certify` and `oracle`.
    pub mode: Option<String>,
    /// Primal condition `P1`..`P10` for `translate --param mode="check"`.
    pub condition: Option<String>,
    pub points: Option<Vec<Vec<f64>>>,
    pub shifts: Option<Vec<Vec<f64>>>,
    pub duals: Option<Vec<Vec<f64>>>,
    /// Function values for the finite Ekeland principle.
    pub f: Option<Vec<f64>>,
    /// Index of the starting point for the finite Ekeland principle.
    pub start: Option<usize>,
    pub anchor: Option<SetRep>,
    /// Box `[lower, upper]` for the emptiness oracle.
    pub region: Option<(Vec<f64>, Vec<f64>)>,
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub dimension: usize,
    pub norm: Norm,
    pub sets: Vec<NamedSet>,
    #[serde(default)]
    pub x_bar: Option<Vec<f64>>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
}

impl Scene {
    /// Parses a scene and applies `key=value` parameter overrides (values are JSON, bare
    /// words are taken as strings). Schema errors name the offending path.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Scene> {
        let mut raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed scene JSON: {e}")))?;
        if !overrides.is_empty() {
            let obj = raw.as_object_mut().ok_or_else(|| Error::invalid("scene must be a JSON object"))?;
            let params = obj.entry("params").or_insert_with(|| serde_json::json!({}));
            let params = params.as_object_mut().ok_or_else(|| Error::invalid("`params` must be an object"))?;
            for (k, v) in overrides {
                let val = serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.clone()));
                params.insert(k.clone(), val);
            }
        }
        let scene: Scene = serde_path_to_error::deserialize(raw).map_err(|e| Error::invalid(format!("scene schema violation at `{}`: {}", e.path(), e.inner())))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sets.is_empty() {
            return Err(Error::invalid("scene has no sets"));
        }
        for ns in &self.sets {
            ns.set.validate()?;
            if ns.set.dim() != self.dimension {
                return Err(Error::invalid(format!("set `{}` has dimension {}, scene has {}", ns.name, ns.set.dim(), self.dimension)));
            }
        }
        if let Some(x) = &self.x_bar {
            if x.len() != self.dimension {
                return Err(Error::invalid("x_bar has the wrong dimension"));
            }
        }
        Ok(())
    }

    pub fn sets(&self) -> Vec<SetRep> {
        self.sets.iter().map(|s| s.set.clone()).collect()
    }

    /// SHA-256 of the canonical rendering of the scene.
    pub fn digest(&self) -> Result<String> {
        let canon = super::emit::json(&super::emit::to_value(self)?);
        let hash = Sha256::digest(canon.as_bytes());
        Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINES: &str = r#"{
        "dimension": 2,
        "norm": {"kind": "maximum"},
        "sets": [
            {"name": "x-axis", "set": {"variant": "affine", "base": [0, 0], "directions": [[1, 0]]}},
            {"name": "y-axis", "set": {"variant": "affine", "base": [0, 0], "directions": [[0, 1]]}}
        ],
        "x_bar": [0, 0]
    }"#;

    #[test]
    fn minimal_scene_and_overrides() {
        let s = Scene::parse(LINES, &[("eps".into(), "0.25".into()), ("form".into(), "D2".into())]).unwrap();
        assert_eq!(s.sets.len(), 2);
        assert_eq!(s.params.eps, Some(0.25));
        assert_eq!(s.params.form.as_deref(), Some("D2"));
        assert_eq!(s.digest().unwrap().len(), 64);
    }

    #[test]
    fn schema_errors_name_the_path() {
        let bad = LINES.replace("\"base\": [0, 0], \"directions\": [[0, 1]]", "\"base\": [0, \"a\"], \"directions\": [[0, 1]]");
        let err = Scene::parse(&bad, &[]).unwrap_err().to_string();
        assert!(err.contains("sets[1]"), "{err}");
        assert!(Scene::parse("{", &[]).is_err());
    }

    #[test]
    fn dimension_is_checked() {
        let bad = LINES.replace("\"dimension\": 2", "\"dimension\": 3");
        assert!(Scene::parse(&bad, &[]).is_err());
    }
}
