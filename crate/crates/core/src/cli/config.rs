//! Run configuration: a TOML file with one table per subcommand, overridable
//! through NLD_<SECTION>_<KEY> environment variables.

use crate::kernel::{Family, KernelPair};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

pub const ENV_PREFIX: &str = "NLD_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// worker threads, 0 for one per core
    pub jobs: usize,
    pub relax: RelaxSection,
    pub ml: MlSection,
    pub ode: OdeSection,
    pub pde: PdeSection,
    pub plap: PlapSection,
    pub pme: PmeSection,
    pub asympt: AsymptSection,
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxSection {
    pub alphas: Vec<f64>,
    pub mus: Vec<f64>,
    pub t_end: f64,
    pub n: usize,
    pub families: Vec<Family>,
    pub bound_mus: Vec<f64>,
    pub bound_t_end: f64,
    pub bound_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlSection {
    pub n_alpha: usize,
    pub n_x: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdeSection {
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub nu: f64,
    pub u0: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeSection {
    pub length: f64,
    pub m: usize,
    pub nu: f64,
    pub t_end: f64,
    pub n: usize,
    pub families: Vec<Family>,
    pub random_data: usize,
    pub oracle_alphas: Vec<f64>,
    pub oracle_m: usize,
    pub oracle_n: usize,
    pub temporal_levels: Vec<usize>,
    pub spatial_levels: Vec<usize>,
    pub sweep_families: Vec<Family>,
    pub sweep_m: usize,
    pub sweep_t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlapSection {
    pub ps: Vec<f64>,
    pub alphas: Vec<f64>,
    pub length: f64,
    pub m: usize,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PmeSection {
    pub ms: Vec<f64>,
    pub alphas: Vec<f64>,
    pub length: f64,
    pub m: usize,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymptSection {
    pub mu: f64,
    pub t_end: f64,
    pub families: Vec<Family>,
    pub reciprocal_mus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub trials: usize,
    pub identity_alphas: Vec<f64>,
    pub identity_n0: usize,
    pub maps: Vec<String>,
}

fn catalog() -> Vec<Family> {
    KernelPair::catalog().into_iter().map(|p| p.family).collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 20240601,
            jobs: 0,
            relax: RelaxSection::default(),
            ml: MlSection::default(),
            ode: OdeSection::default(),
            pde: PdeSection::default(),
            plap: PlapSection::default(),
            pme: PmeSection::default(),
            asympt: AsymptSection::default(),
            verify: VerifySection::default(),
        }
    }
}

impl Default for RelaxSection {
    fn default() -> Self {
        Self {
            alphas: vec![0.3, 0.5, 0.7],
            mus: vec![0.5, 1.0, 4.0],
            t_end: 50.0,
            n: 2000,
            families: catalog(),
            bound_mus: vec![0.1, 1.0, 10.0],
            bound_t_end: 50.0,
            bound_n: 1000,
        }
    }
}

impl Default for MlSection {
    fn default() -> Self {
        Self { n_alpha: 20, n_x: 20 }
    }
}

impl Default for OdeSection {
    fn default() -> Self {
        Self { alphas: vec![0.3, 0.5, 0.7], gammas: vec![0.5, 1.0, 2.0, 3.0], nu: 1.0, u0: 1.0, t_end: 1e4 }
    }
}

impl Default for PdeSection {
    fn default() -> Self {
        Self {
            length: PI,
            m: 63,
            nu: 0.5,
            t_end: 10.0,
            n: 300,
            families: vec![Family::Fractional { alpha: 0.5 }, Family::FractionalExp { alpha: 0.5, gamma: 1.0 }, Family::DistributedOrder],
            random_data: 10,
            oracle_alphas: vec![0.3, 0.5],
            oracle_m: 63,
            oracle_n: 400,
            temporal_levels: vec![100, 200, 400, 800],
            spatial_levels: vec![15, 31, 63, 127],
            sweep_families: catalog(),
            sweep_m: 15,
            sweep_t_end: 1e6,
        }
    }
}

impl Default for PlapSection {
    fn default() -> Self {
        Self { ps: vec![1.5, 2.5, 3.0], alphas: vec![0.4, 0.6], length: 1.0, m: 31, t_end: 1e4 }
    }
}

impl Default for PmeSection {
    fn default() -> Self {
        Self { ms: vec![0.5, 2.0, 3.0], alphas: vec![0.4, 0.6], length: 1.0, m: 31, t_end: 1e4 }
    }
}

impl Default for AsymptSection {
    fn default() -> Self {
        Self { mu: 1.0, t_end: 1e6, families: catalog(), reciprocal_mus: vec![0.1, 1.0, 10.0] }
    }
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { trials: 10_000, identity_alphas: vec![0.3, 0.5, 0.7], identity_n0: 40, maps: vec!["square".into(), "power:3".into(), "positive:0.1".into()] }
    }
}

/// One violated field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<FieldError>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn field_error(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError(vec![FieldError { field: field.into(), message: message.into() }])
}

/// Parse an override value as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

const SECTIONS: [&str; 8] = ["relax", "ml", "ode", "pde", "plap", "pme", "asympt", "verify"];

/// Apply NLD_* overrides, in sorted order, to a parsed table.
pub fn apply_overrides(table: &mut toml::Table, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), ConfigError> {
    let mut vars: Vec<(String, String)> = vars.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    let mut errors = Vec::new();
    for (key, raw) in vars {
        let rest = key[ENV_PREFIX.len()..].to_ascii_lowercase();
        let value = parse_value(&raw);
        match rest.split_once('_') {
            Some((section, field)) if SECTIONS.contains(&section) => {
                let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
                match entry.as_table_mut() {
                    Some(t) => {
                        t.insert(field.to_string(), value);
                    }
                    None => errors.push(FieldError { field: section.into(), message: "is not a table".into() }),
                }
            }
            _ if rest == "seed" || rest == "jobs" => {
                table.insert(rest, value);
            }
            _ => errors.push(FieldError { field: key.clone(), message: "does not name a configuration key".into() }),
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ConfigError(errors))
    }
}

impl RunConfig {
    /// Parse TOML text after applying overrides, then validate.
    pub fn from_toml(text: &str, vars: impl IntoIterator<Item = (String, String)>) -> Result<Self, ConfigError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| field_error("config", e.message().to_string()))?;
        apply_overrides(&mut table, vars)?;
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| field_error("config", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read the file if given, else start from defaults; environment overrides apply either way.
    pub fn load(path: Option<&Path>) -> Result<Self, LoadError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| LoadError::Io(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml(&text, std::env::vars()).map_err(LoadError::Config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut v = Validator::default();
        v.positive_count("jobs", self.jobs, 0);

        let r = &self.relax;
        v.alphas("relax.alphas", &r.alphas);
        v.positives("relax.mus", &r.mus);
        v.positive("relax.t_end", r.t_end);
        v.positive_count("relax.n", r.n, 2);
        v.families("relax.families", &r.families);
        v.positives("relax.bound_mus", &r.bound_mus);
        v.positive("relax.bound_t_end", r.bound_t_end);
        v.positive_count("relax.bound_n", r.bound_n, 4);

        v.positive_count("ml.n_alpha", self.ml.n_alpha, 1);
        v.positive_count("ml.n_x", self.ml.n_x, 2);

        let o = &self.ode;
        v.alphas("ode.alphas", &o.alphas);
        v.positives("ode.gammas", &o.gammas);
        v.positive("ode.nu", o.nu);
        v.positive("ode.u0", o.u0);
        v.greater("ode.t_end", o.t_end, 1.0);

        let p = &self.pde;
        v.positive("pde.length", p.length);
        v.positive_count("pde.m", p.m, 3);
        v.positive("pde.nu", p.nu);
        v.positive("pde.t_end", p.t_end);
        v.positive_count("pde.n", p.n, 2);
        v.families("pde.families", &p.families);
        v.positive_count("pde.random_data", p.random_data, 1);
        v.alphas("pde.oracle_alphas", &p.oracle_alphas);
        v.positive_count("pde.oracle_m", p.oracle_m, 3);
        v.positive_count("pde.oracle_n", p.oracle_n, 2);
        v.levels("pde.temporal_levels", &p.temporal_levels, 2);
        v.levels("pde.spatial_levels", &p.spatial_levels, 3);
        v.families("pde.sweep_families", &p.sweep_families);
        v.positive_count("pde.sweep_m", p.sweep_m, 3);
        v.greater("pde.sweep_t_end", p.sweep_t_end, 1.0);

        v.nonempty("plap.ps", self.plap.ps.len());
        for (i, &x) in self.plap.ps.iter().enumerate() {
            if !(x > 1.0) || !x.is_finite() {
                v.push(&format!("plap.ps[{i}]"), format!("{x} must exceed 1"));
            }
        }
        v.alphas("plap.alphas", &self.plap.alphas);
        v.positive("plap.length", self.plap.length);
        v.positive_count("plap.m", self.plap.m, 3);
        v.greater("plap.t_end", self.plap.t_end, 1.0);

        v.positives("pme.ms", &self.pme.ms);
        v.alphas("pme.alphas", &self.pme.alphas);
        v.positive("pme.length", self.pme.length);
        v.positive_count("pme.m", self.pme.m, 3);
        v.greater("pme.t_end", self.pme.t_end, 1.0);

        let a = &self.asympt;
        v.positive("asympt.mu", a.mu);
        v.greater("asympt.t_end", a.t_end, 1.0);
        v.families("asympt.families", &a.families);
        v.positives("asympt.reciprocal_mus", &a.reciprocal_mus);

        let q = &self.verify;
        v.positive_count("verify.trials", q.trials, 1);
        v.alphas("verify.identity_alphas", &q.identity_alphas);
        v.positive_count("verify.identity_n0", q.identity_n0, 4);
        v.nonempty("verify.maps", q.maps.len());
        for (i, m) in q.maps.iter().enumerate() {
            if let Err(e) = crate::calculus::ConvexMap::from_name(m) {
                v.push(&format!("verify.maps[{i}]"), e.to_string());
            }
        }
        v.finish()
    }
}

#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Config(ConfigError),
}

#[derive(Default)]
struct Validator {
    errors: Vec<FieldError>,
}

impl Validator {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.errors.push(FieldError { field: field.into(), message: message.into() });
    }

    fn nonempty(&mut self, field: &str, len: usize) {
        if len == 0 {
            self.push(field, "must not be empty");
        }
    }

    fn positive(&mut self, field: &str, x: f64) {
        if !(x > 0.0) || !x.is_finite() {
            self.push(field, format!("{x} must be positive and finite"));
        }
    }

    fn greater(&mut self, field: &str, x: f64, lo: f64) {
        if !(x > lo) || !x.is_finite() {
            self.push(field, format!("{x} must be finite and exceed {lo}"));
        }
    }

    fn positive_count(&mut self, field: &str, x: usize, min: usize) {
        if x < min {
            self.push(field, format!("{x} is below the minimum {min}"));
        }
    }

    fn positives(&mut self, field: &str, xs: &[f64]) {
        self.nonempty(field, xs.len());
        for (i, &x) in xs.iter().enumerate() {
            if !(x > 0.0) || !x.is_finite() {
                self.push(&format!("{field}[{i}]"), format!("{x} must be positive and finite"));
            }
        }
    }

    fn alphas(&mut self, field: &str, xs: &[f64]) {
        self.nonempty(field, xs.len());
        for (i, &x) in xs.iter().enumerate() {
            if !(x > 0.0 && x < 1.0) {
                self.push(&format!("{field}[{i}]"), format!("{x} outside (0, 1)"));
            }
        }
    }

    fn levels(&mut self, field: &str, xs: &[usize], min: usize) {
        if xs.len() < 2 {
            self.push(field, "needs at least two refinement levels");
        }
        for (i, &x) in xs.iter().enumerate() {
            if x < min {
                self.push(&format!("{field}[{i}]"), format!("{x} is below the minimum {min}"));
            }
        }
    }

    fn families(&mut self, field: &str, fs: &[Family]) {
        self.nonempty(field, fs.len());
        for (i, f) in fs.iter().enumerate() {
            if let Err(e) = KernelPair::new(f.clone()) {
                self.push(&format!("{field}[{i}]"), e.to_string());
            }
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(self.errors))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> Vec<(String, String)> {
        Vec::new()
    }

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
        assert_eq!(RunConfig::from_toml("", none()).unwrap(), RunConfig::default());
    }

    #[test]
    fn empty_mu_list_names_the_field() {
        let e = RunConfig::from_toml("[relax]\nmus = []\n", none()).unwrap_err();
        assert!(e.0.iter().any(|f| f.field == "relax.mus"), "{e}");
    }

    #[test]
    fn every_violation_is_listed() {
        let e = RunConfig::from_toml("[relax]\nalphas = [0.5, 1.5]\nn = 1\n[pde]\nm = 2\n", none()).unwrap_err();
        let fields: Vec<&str> = e.0.iter().map(|f| f.field.as_str()).collect();
        assert_eq!(fields, ["relax.alphas[1]", "relax.n", "pde.m"]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[relax]\nmu = 1\n", none()).is_err());
    }

    #[test]
    fn environment_overrides() {
        let vars = vec![("NLD_RELAX_BOUND_MUS".to_string(), "[2.0]".to_string()), ("NLD_SEED".into(), "7".into()), ("OTHER".into(), "x".into())];
        let c = RunConfig::from_toml("[relax]\nbound_mus = [1.0]\n", vars).unwrap();
        assert_eq!(c.relax.bound_mus, vec![2.0]);
        assert_eq!(c.seed, 7);
        assert!(RunConfig::from_toml("", vec![("NLD_NOPE_X".into(), "1".into())]).is_err());
    }

    #[test]
    fn families_from_tables() {
        let c = RunConfig::from_toml("[[asympt.families]]\nfamily = \"fractional\"\nalpha = 0.25\n", none()).unwrap();
        assert_eq!(c.asympt.families, vec![Family::Fractional { alpha: 0.25 }]);
        assert!(RunConfig::from_toml("[[asympt.families]]\nfamily = \"fractional\"\nalpha = 2.0\n", none()).is_err());
    }
}
