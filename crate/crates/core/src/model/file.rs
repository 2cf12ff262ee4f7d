use std::path::Path;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::lifetime::{LifetimeLaw, LightTail, ParetoTail, SlowlyVarying};
use super::offspring::{OffspringLaw, Outcome};
use super::BranchingModel;
use crate::error::{Error, Result};

/// Probability as a JSON number or an exact `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Probability {
    Float(f64),
    Text(String),
}

impl Probability {
    pub fn exact(&self) -> Result<Rational64> {
        match self {
            Probability::Float(x) => Rational64::approximate_float(*x)
                .ok_or_else(|| Error::InvalidModel(format!("probability {x} not representable"))),
            Probability::Text(s) => {
                let s = s.trim();
                let parsed = match s.split_once('/') {
                    Some((p, q)) => p
                        .trim()
                        .parse::<i64>()
                        .ok()
                        .zip(q.trim().parse::<i64>().ok())
                        .filter(|&(_, q)| q != 0)
                        .map(|(p, q)| Rational64::new(p, q)),
                    None => s.parse::<i64>().ok().map(Rational64::from_integer),
                };
                parsed.ok_or_else(|| Error::InvalidModel(format!("cannot parse probability {s:?}")))
            }
        }
    }

    pub fn value(&self) -> Result<f64> {
        match self {
            Probability::Float(x) => Ok(*x),
            Probability::Text(_) => {
                let r = self.exact()?;
                Ok(*r.numer() as f64 / *r.denom() as f64)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpec {
    pub k: [u32; 2],
    pub p: Probability,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffspringSpec {
    pub outcomes: Vec<OutcomeSpec>,
}

fn default_ell() -> SlowlyVarying {
    SlowlyVarying::Constant { c: 1.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LifetimeSpec {
    Exponential {
        rate: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Pareto {
        beta: f64,
        scale: f64,
        #[serde(default = "default_ell")]
        slowly_varying: SlowlyVarying,
    },
}

impl From<&LifetimeSpec> for LifetimeLaw {
    fn from(spec: &LifetimeSpec) -> Self {
        match *spec {
            LifetimeSpec::Exponential { rate } => {
                LifetimeLaw::Light(LightTail::Exponential { rate })
            }
            LifetimeSpec::Uniform { a, b } => LifetimeLaw::Light(LightTail::Uniform { a, b }),
            LifetimeSpec::Pareto {
                beta,
                scale,
                slowly_varying,
            } => LifetimeLaw::Pareto(ParetoTail {
                beta,
                scale,
                ell: slowly_varying,
            }),
        }
    }
}

impl From<&LifetimeLaw> for LifetimeSpec {
    fn from(law: &LifetimeLaw) -> Self {
        match *law {
            LifetimeLaw::Light(LightTail::Exponential { rate }) => {
                LifetimeSpec::Exponential { rate }
            }
            LifetimeLaw::Light(LightTail::Uniform { a, b }) => LifetimeSpec::Uniform { a, b },
            LifetimeLaw::Pareto(p) => LifetimeSpec::Pareto {
                beta: p.beta,
                scale: p.scale,
                slowly_varying: p.ell,
            },
        }
    }
}

/// On-disk model description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub offspring: [OffspringSpec; 2],
    pub lifetimes: [LifetimeSpec; 2],
}

impl ModelFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    fn lifetimes(&self) -> [LifetimeLaw; 2] {
        [(&self.lifetimes[0]).into(), (&self.lifetimes[1]).into()]
    }

    fn law<T>(spec: &OffspringSpec, prob: impl Fn(&Probability) -> Result<T>) -> Result<OffspringLaw<T>>
    where
        T: crate::scalar::Scalar,
    {
        let outcomes = spec
            .outcomes
            .iter()
            .map(|o| {
                Ok(Outcome {
                    children: o.k,
                    prob: prob(&o.p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        OffspringLaw::new(outcomes)
    }

    pub fn model(&self) -> Result<BranchingModel<f64>> {
        Ok(BranchingModel::new(
            [
                Self::law(&self.offspring[0], Probability::value)?,
                Self::law(&self.offspring[1], Probability::value)?,
            ],
            self.lifetimes(),
        ))
    }

    pub fn exact_model(&self) -> Result<BranchingModel<Rational64>> {
        Ok(BranchingModel::new(
            [
                Self::law(&self.offspring[0], Probability::exact)?,
                Self::law(&self.offspring[1], Probability::exact)?,
            ],
            self.lifetimes(),
        ))
    }

    pub fn from_model(model: &BranchingModel<Rational64>, name: Option<String>) -> Self {
        let spec = |law: &OffspringLaw<Rational64>| OffspringSpec {
            outcomes: law
                .outcomes()
                .iter()
                .map(|o| OutcomeSpec {
                    k: o.children,
                    p: Probability::Text(format!("{}/{}", o.prob.numer(), o.prob.denom())),
                })
                .collect(),
        };
        ModelFile {
            name,
            offspring: [spec(&model.offspring[0]), spec(&model.offspring[1])],
            lifetimes: [(&model.lifetimes[0]).into(), (&model.lifetimes[1]).into()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"{
        "name": "reference",
        "offspring": [
            {"outcomes": [{"k": [0, 1], "p": 1}]},
            {"outcomes": [
                {"k": [0, 0], "p": "1/4"}, {"k": [1, 0], "p": "1/4"},
                {"k": [1, 1], "p": 0.25}, {"k": [0, 1], "p": "1/4"}
            ]}
        ],
        "lifetimes": [
            {"kind": "exponential", "rate": 1.0},
            {"kind": "pareto", "beta": 0.5, "scale": 1.0}
        ]
    }"#;

    #[test]
    fn parses_mixed_probabilities() {
        let file = ModelFile::parse(REFERENCE).unwrap();
        assert_eq!(file.exact_model().unwrap(), BranchingModel::reference(0.5));
        assert_eq!(file.model().unwrap(), BranchingModel::reference(0.5));
    }

    #[test]
    fn round_trip_through_json() {
        let model = BranchingModel::<Rational64>::reference(0.25);
        let file = ModelFile::from_model(&model, Some("x".into()));
        let back = ModelFile::parse(&file.to_json()).unwrap();
        assert_eq!(back.exact_model().unwrap(), model);
    }

    #[test]
    fn rejects_malformed_probability() {
        let bad = REFERENCE.replace("\"1/4\"", "\"one quarter\"");
        assert!(ModelFile::parse(&bad).unwrap().exact_model().is_err());
        let unnormalized = REFERENCE.replace("0.25", "0.5");
        assert!(ModelFile::parse(&unnormalized).unwrap().model().is_err());
    }

    #[test]
    fn log_power_slowly_varying_factor() {
        let text = REFERENCE.replace(
            r#""scale": 1.0}"#,
            r#""scale": 2.0, "slowly_varying": {"kind": "log_power", "c": 0.5, "p": -1.0}}"#,
        );
        let model = ModelFile::parse(&text).unwrap().model().unwrap();
        let tail = model.heavy_tail().unwrap();
        assert_eq!(tail.ell, SlowlyVarying::LogPower { c: 0.5, p: -1.0 });
    }
}
