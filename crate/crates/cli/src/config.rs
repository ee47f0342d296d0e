use std::fmt;

use persuasion::{Error, Params};

/// Why a configuration was rejected. All map to exit code 2; the kind is
/// part of the message.
#[derive(Debug)]
pub enum ConfigError {
    Unreadable(String),
    Malformed(String),
    Missing(String),
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Unreadable(m) => write!(f, "config unreadable: {m}"),
            ConfigError::Malformed(m) => write!(f, "config malformed: {m}"),
            ConfigError::Missing(m) => write!(f, "config incomplete: {m}"),
            ConfigError::Invalid(v) => write!(f, "config invalid: {}", v.join("; ")),
        }
    }
}

pub fn load_params(source: Option<&str>) -> Result<Params, ConfigError> {
    let Some(src) = source else { return Ok(Params::baseline()) };
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(src).map_err(|e| ConfigError::Unreadable(format!("{src}: {e}")))?
    };
    serde_json::from_str::<Params>(&text).map_err(|e| {
        if e.is_data() && e.to_string().starts_with("missing field") {
            ConfigError::Missing(e.to_string())
        } else {
            ConfigError::Malformed(e.to_string())
        }
    })
}

/// Collect every range violation, then the ordering check.
pub fn check(p: &Params) -> Result<(), ConfigError> {
    let mut issues = Vec::new();
    let positive = [
        ("p0", p.p0),
        ("lambda", p.lambda),
        ("r_P", p.r_p),
        ("r_A", p.r_a),
        ("y_L", p.y_l),
        ("y_H", p.y_h),
        ("z", p.z),
        ("Y", p.big_y),
        ("Z", p.big_z),
        ("mu0", p.mu0),
    ];
    for (name, v) in positive {
        if !(v.is_finite() && v > 0.0) {
            issues.push(format!("{name} = {v} must be positive and finite"));
        }
    }
    for (name, v) in [("p0", p.p0), ("mu0", p.mu0)] {
        if v >= 1.0 {
            issues.push(format!("{name} = {v} must lie in (0, 1)"));
        }
    }
    if p.y_h <= p.y_l {
        issues.push(format!("y_H = {} must exceed y_L = {}", p.y_h, p.y_l));
    }
    if !issues.is_empty() {
        return Err(ConfigError::Invalid(issues));
    }
    match p.validate() {
        Ok(()) => Ok(()),
        Err(Error::AssumptionViolated(m)) => Err(ConfigError::Invalid(vec![format!(
            "stopping-time ordering violated (need y_L/z < Y/Z < y_H/z): {m}"
        )])),
        Err(e) => Err(ConfigError::Invalid(vec![e.to_string()])),
    }
}
