use std::fmt;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use dca_warmstart::energy::EnergyInstance;
use dca_warmstart::matching::MatchingInstance;
use dca_warmstart::matroid::WeightedMIInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Matching,
    Matroid,
    Energy,
    /// An energy objective minimized with the exhaustive local oracle.
    Generic,
}

impl ProblemKind {
    pub fn tag(self) -> &'static str {
        match self {
            ProblemKind::Matching => "matching",
            ProblemKind::Matroid => "matroid",
            ProblemKind::Energy => "energy",
            ProblemKind::Generic => "generic",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Any instance the harness can solve. Files carry a `"type"` field naming the kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Matching(MatchingInstance),
    Matroid(WeightedMIInstance),
    Energy(EnergyInstance),
    Generic(EnergyInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Matching(_) => ProblemKind::Matching,
            Instance::Matroid(_) => ProblemKind::Matroid,
            Instance::Energy(_) => ProblemKind::Energy,
            Instance::Generic(_) => ProblemKind::Generic,
        }
    }

    /// Dimension of the point the descent runs on.
    pub fn dim(&self) -> usize {
        match self {
            Instance::Matching(m) => m.dim(),
            Instance::Matroid(m) => m.dim(),
            Instance::Energy(e) | Instance::Generic(e) => e.dim(),
        }
    }

    pub fn from_value(mut v: Value) -> Result<Self> {
        let obj = v.as_object_mut().ok_or_else(|| anyhow!("instance file must hold a JSON object"))?;
        let tag = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("instance file has no \"type\" field"))?
            .to_string();
        Ok(match tag.as_str() {
            "matching" => {
                obj.remove("type");
                Instance::Matching(serde_json::from_value(v).context("invalid matching instance")?)
            }
            "matroid" => {
                obj.remove("type");
                Instance::Matroid(serde_json::from_value(v).context("invalid matroid instance")?)
            }
            "energy" => Instance::Energy(serde_json::from_value(v).context("invalid energy instance")?),
            "generic" => {
                obj.insert("type".into(), Value::from("energy"));
                Instance::Generic(serde_json::from_value(v).context("invalid generic instance")?)
            }
            other => bail!("unknown instance type `{other}`"),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text).context("instance file is not valid JSON")?)
    }

    pub fn to_value(&self) -> Value {
        let mut v = match self {
            Instance::Matching(m) => serde_json::to_value(m),
            Instance::Matroid(m) => serde_json::to_value(m),
            Instance::Energy(e) | Instance::Generic(e) => serde_json::to_value(e),
        }
        .expect("instances serialize");
        v.as_object_mut()
            .expect("instances serialize to objects")
            .insert("type".into(), Value::from(self.kind().tag()));
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("instances serialize")
    }
}

/// Reads a prediction file: a bare array of numbers or an object with a `p_hat` array.
pub fn parse_prediction(text: &str) -> Result<Vec<f64>> {
    let v: Value = serde_json::from_str(text).context("prediction file is not valid JSON")?;
    let arr = match &v {
        Value::Array(_) => &v,
        Value::Object(o) => o.get("p_hat").ok_or_else(|| anyhow!("prediction object has no \"p_hat\" field"))?,
        _ => bail!("prediction must be an array or an object with \"p_hat\""),
    };
    let out: Vec<f64> = serde_json::from_value(arr.clone()).context("prediction entries must be numbers")?;
    Ok(out)
}
