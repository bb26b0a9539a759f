use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gpr::ARD_CAP;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gpr,
    Elm,
    Mlp,
    Svr,
    Gam,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Gpr,
        ModelKind::Elm,
        ModelKind::Mlp,
        ModelKind::Svr,
        ModelKind::Gam,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Gpr => "gpr",
            ModelKind::Elm => "elm",
            ModelKind::Mlp => "mlp",
            ModelKind::Svr => "svr",
            ModelKind::Gam => "gam",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model kind `{s}`")))
    }
}

/// A named, bounded hyperparameter. Log-scaled parameters are searched in
/// log10 space; integer parameters are rounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameter {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub log_scale: bool,
    #[serde(default)]
    pub integer: bool,
}

impl Hyperparameter {
    fn real(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Hyperparameter {
            name: name.into(),
            value,
            lo,
            hi,
            log_scale: false,
            integer: false,
        }
    }

    fn log(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Hyperparameter {
            log_scale: true,
            ..Hyperparameter::real(name, value, lo, hi)
        }
    }

    fn int(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Hyperparameter {
            integer: true,
            ..Hyperparameter::real(name, value, lo, hi)
        }
    }

    fn fixed(name: &str, value: f64) -> Self {
        Hyperparameter::int(name, value, value, value)
    }

    pub fn is_free(&self) -> bool {
        self.hi > self.lo
    }

    /// Search coordinate of `value`.
    pub fn encode(&self, value: f64) -> f64 {
        if self.log_scale {
            value.log10()
        } else {
            value
        }
    }

    pub fn decode(&self, coordinate: f64) -> f64 {
        let v = if self.log_scale {
            10f64.powf(coordinate)
        } else {
            coordinate
        };
        let v = if self.integer { v.round() } else { v };
        v.clamp(self.lo, self.hi)
    }
}

/// Model kind, hyperparameters with bounds, and the seed for stochastic fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSpec {
    pub kind: ModelKind,
    pub hyperparameters: Vec<Hyperparameter>,
    pub seed: u64,
}

impl RegressorSpec {
    /// Defaults and search bounds for `kind` on `inputs` model inputs.
    pub fn default_for(kind: ModelKind, inputs: usize) -> Self {
        let hyperparameters = match kind {
            ModelKind::Gpr => {
                let mut hp = vec![
                    Hyperparameter::log("alpha", 1.174, 0.05, 20.0),
                    Hyperparameter::log("sigma_f", 0.160, 0.01, 10.0),
                    Hyperparameter::log("sigma_n", 1e-2, 1e-6, 1.0),
                    Hyperparameter::log("lengthscale", 1.0, 0.05, 20.0),
                    // 0 = none, 1 = constant, 2 = linear
                    Hyperparameter::fixed("basis", 2.0),
                ];
                for i in 0..inputs.min(ARD_CAP) {
                    hp.push(Hyperparameter::log(&format!("ard_{i}"), 1.0, 0.25, 4.0));
                }
                hp
            }
            ModelKind::Elm => vec![
                Hyperparameter::int("hidden", 40.0, 5.0, 200.0),
                Hyperparameter::log("lambda", 1e-3, 1e-8, 10.0),
                // 0 = sigmoid, 1 = tanh
                Hyperparameter::int("activation", 0.0, 0.0, 1.0),
            ],
            ModelKind::Mlp => vec![
                Hyperparameter::int("hidden", 16.0, 2.0, 32.0),
                Hyperparameter::fixed("layers", 1.0),
                Hyperparameter::log("step", 0.1, 1e-3, 0.5),
                Hyperparameter::fixed("epochs", 100.0),
                Hyperparameter::fixed("batch", 16.0),
                // 0 = relu, 1 = sigmoid, 2 = tanh
                Hyperparameter::int("activation", 2.0, 0.0, 2.0),
            ],
            ModelKind::Svr => vec![
                Hyperparameter::log("c", 1.0, 1e-2, 1e3),
                Hyperparameter::real("epsilon", 0.01, 0.0, 0.2),
                Hyperparameter::log("gamma", 0.5, 1e-3, 1e2),
                // 0 = rbf, 1 = linear
                Hyperparameter::fixed("kernel", 0.0),
            ],
            ModelKind::Gam => vec![
                Hyperparameter::int("rounds", 300.0, 10.0, 2000.0),
                Hyperparameter::real("learning_rate", 0.1, 0.01, 1.0),
            ],
        };
        RegressorSpec {
            kind,
            hyperparameters,
            seed: 0,
        }
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.hyperparameters
            .iter()
            .find(|h| h.name == name)
            .map(|h| h.value)
            .ok_or_else(|| {
                Error::InvalidConfig(format!("{} spec lacks hyperparameter `{name}`", self.kind))
            })
    }

    pub fn get_or(&self, name: &str, default: f64) -> f64 {
        self.get(name).unwrap_or(default)
    }

    /// Set a value, leaving its bounds untouched.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let h = self
            .hyperparameters
            .iter_mut()
            .find(|h| h.name == name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown hyperparameter `{name}`")))?;
        h.value = value;
        Ok(())
    }

    /// Fix a hyperparameter at `value`, collapsing its bounds.
    pub fn pin(&mut self, name: &str, value: f64) -> Result<()> {
        self.set(name, value)?;
        let h = self
            .hyperparameters
            .iter_mut()
            .find(|h| h.name == name)
            .expect("set succeeded");
        h.lo = value;
        h.hi = value;
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for h in &self.hyperparameters {
            if !(h.lo <= h.hi) {
                return Err(Error::InvalidConfig(format!(
                    "hyperparameter `{}` has bounds [{}, {}]",
                    h.name, h.lo, h.hi
                )));
            }
            if !(h.value >= h.lo && h.value <= h.hi) {
                return Err(Error::InvalidConfig(format!(
                    "hyperparameter `{}` = {} outside [{}, {}]",
                    h.name, h.value, h.lo, h.hi
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for kind in ModelKind::ALL {
            RegressorSpec::default_for(kind, 12).validate().unwrap();
            assert_eq!(kind.name().parse::<ModelKind>().unwrap(), kind);
        }
        let gpr = RegressorSpec::default_for(ModelKind::Gpr, 20);
        assert_eq!(gpr.get("alpha").unwrap(), 1.174);
        assert_eq!(gpr.get("sigma_f").unwrap(), 0.160);
        assert_eq!(
            gpr.hyperparameters.iter().filter(|h| h.name.starts_with("ard_")).count(),
            ARD_CAP
        );
    }

    #[test]
    fn encode_decode() {
        let h = Hyperparameter::log("x", 1.0, 1e-3, 1e3);
        assert!((h.decode(h.encode(0.5)) - 0.5).abs() < 1e-15);
        assert_eq!(h.decode(10.0), 1e3);
        let i = Hyperparameter::int("n", 3.0, 1.0, 9.0);
        assert_eq!(i.decode(4.6), 5.0);
    }

    #[test]
    fn out_of_bounds_rejected() {
        let mut s = RegressorSpec::default_for(ModelKind::Gam, 2);
        s.set("learning_rate", 2.0).unwrap();
        assert!(s.validate().is_err());
        assert!(s.set("nope", 1.0).is_err());
        s.pin("learning_rate", 2.0).unwrap();
        s.validate().unwrap();
    }
}
