use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(format!("unknown format '{other}' (expected json or markdown)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Markdown => "markdown",
        })
    }
}

/// Numerical tolerances by name. Exact checks carry no tolerance.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("null", 1e-10),
    ("killing", 1e-9),
    ("contraction", 1e-8),
    ("chi", 1e-9),
    ("beta_spread", 1e-7),
    ("beta_product", 1e-8),
    ("k3", 1e-8),
    ("tractor", 1e-8),
    ("felipe", 1e-8),
    ("weyl_model", 1e-8),
    ("rescale", 1e-7),
    ("weyl_fefferman", 1e-6),
    ("vertical", 1e-8),
    ("qc_structure", 1e-10),
    ("divergence", 1e-6),
    ("weyl_trace", 1e-9),
    ("covariance", 1e-7),
    ("schouten", 1e-10),
    ("sphere", 1e-9),
    ("flat", 0.0),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, key: &str) -> f64 {
        match self.0.get(key) {
            Some(v) => *v,
            None => panic!("no tolerance named {key}"),
        }
    }

    /// Apply `KEY=VAL` overrides; unknown keys and non-finite or negative
    /// values are rejected.
    pub fn with_overrides(mut self, overrides: &[String]) -> Result<Self, String> {
        for o in overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| format!("tolerance '{o}' is not KEY=VAL"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("tolerance value '{v}' is not a number"))?;
            if !v.is_finite() || v < 0.0 {
                return Err(format!("tolerance {k} must be finite and non-negative"));
            }
            match self.0.get_mut(k.trim()) {
                Some(slot) => *slot = v,
                None => {
                    let known: Vec<&str> = self.0.keys().map(|s| s.as_str()).collect();
                    return Err(format!("unknown tolerance '{k}' (known: {})", known.join(", ")));
                }
            }
        }
        Ok(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: String,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SuiteConfig {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteConfig {
            suite: suite.into(),
            n: 1,
            seed: 0,
            samples: 20,
            tolerances: Tolerances::default(),
            out: None,
            format: Format::Json,
        }
    }

    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances.get(key)
    }
}
