//! Experiment configuration: a TOML file with domain records, a seed and one
//! optional table per experiment kind.

use std::fmt;

use serde::Deserialize;
use toml::Spanned;
use weyl_lab::geometry::{parse_domain_at, Domain};
use weyl_lab::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Spectrum,
    Riesz,
    WeylRemainder,
    ConvexBound,
    Geometry,
    Goodset,
    Regions,
    Partition,
    ConeTrace,
    Defect,
    CheckAll,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::Riesz => "riesz",
            Kind::WeylRemainder => "weyl-remainder",
            Kind::ConvexBound => "convex-bound",
            Kind::Geometry => "geometry",
            Kind::Goodset => "goodset",
            Kind::Regions => "regions",
            Kind::Partition => "partition",
            Kind::ConeTrace => "cone-trace",
            Kind::Defect => "defect",
            Kind::CheckAll => "check-all",
        }
    }

    pub fn uses_monte_carlo(&self) -> bool {
        matches!(self, Kind::Goodset | Kind::Regions | Kind::CheckAll)
    }
}

/// Problems with the configuration; the runner exits with status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<(usize, usize)>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    fn at(text: &str, offset: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line_column(text, offset)),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some((l, c)) => write!(f, "config error at line {l}, column {c}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    Exact,
    Fd,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    #[serde(default)]
    pub source: Source,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_cutoff() -> f64 {
    1e3
}

fn default_resolution() -> usize {
    255
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self {
            source: Source::Exact,
            cutoff: default_cutoff(),
            resolution: default_resolution(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszParams {
    pub lambdas: Vec<f64>,
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
}

fn default_gammas() -> Vec<f64> {
    vec![0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemainderParams {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
}

fn default_per_decade() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryParams {
    /// Collar widths as fractions of the inradius.
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodsetParams {
    pub epsilon: f64,
    pub r: f64,
    pub s: Vec<f64>,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsParams {
    pub epsilon: f64,
    pub r: f64,
    pub l0: f64,
    pub samples: u64,
    /// Points per side of the label grid written to labels.csv; 0 skips it.
    #[serde(default = "default_label_grid")]
    pub label_grid: usize,
}

fn default_label_grid() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionParams {
    pub l0: f64,
    pub points: Vec<[f64; 2]>,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_refine")]
    pub refine: usize,
}

fn default_cells() -> usize {
    8
}

fn default_refine() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideName {
    Cone,
    Complement,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeParamsToml {
    pub epsilon: Vec<f64>,
    #[serde(default = "default_sides")]
    pub sides: Vec<SideName>,
    #[serde(default = "default_l")]
    pub l: f64,
    #[serde(default)]
    pub center: [f64; 2],
    /// `l / h` values.
    pub ladder: Vec<f64>,
    #[serde(default = "default_grid_ratio")]
    pub grid_ratio: f64,
    #[serde(default = "default_refinement")]
    pub refinement: f64,
}

fn default_sides() -> Vec<SideName> {
    vec![SideName::Cone]
}

fn default_l() -> f64 {
    1.0
}

fn default_grid_ratio() -> f64 {
    8.0
}

fn default_refinement() -> f64 {
    1.5
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectParams {
    pub h: Vec<f64>,
    pub resolution: Vec<usize>,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_eps0() -> f64 {
    0.5
}

fn default_order() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    pub criteria: Option<Vec<u8>>,
    pub fd_resolution: Option<usize>,
    pub fd_cutoff: Option<f64>,
    pub random_lambdas: Option<usize>,
    pub random_polygons: Option<usize>,
    pub mc_samples: Option<u64>,
    pub cone_ladder: Option<Vec<f64>>,
    pub cone_grid_ratio: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    domains: Vec<Spanned<String>>,
    seed: Option<u64>,
    out: Option<String>,
    spectrum: Option<SpectrumParams>,
    riesz: Option<RieszParams>,
    remainder: Option<RemainderParams>,
    geometry: Option<GeometryParams>,
    goodset: Option<GoodsetParams>,
    regions: Option<RegionsParams>,
    partition: Option<PartitionParams>,
    cone: Option<ConeParamsToml>,
    defect: Option<DefectParams>,
    check: Option<CheckParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub domains: Vec<Domain>,
    /// Domain records as written, for the summary.
    pub records: Vec<String>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub spectrum: SpectrumParams,
    pub riesz: Option<RieszParams>,
    pub remainder: Option<RemainderParams>,
    pub geometry: Option<GeometryParams>,
    pub goodset: Option<GoodsetParams>,
    pub regions: Option<RegionsParams>,
    pub partition: Option<PartitionParams>,
    pub cone: Option<ConeParamsToml>,
    pub defect: Option<DefectParams>,
    pub check: CheckParams,
}

impl ExperimentConfig {
    /// `seed` overrides the file's seed.
    pub fn parse(kind: Kind, text: &str, seed: Option<u64>) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => ConfigError::at(text, span.start, e.message().trim()),
            None => ConfigError::new(e.message().trim()),
        })?;
        let mut domains = Vec::with_capacity(raw.domains.len());
        let mut records = Vec::with_capacity(raw.domains.len());
        for rec in &raw.domains {
            let (line, col) = line_column(text, rec.span().start);
            match parse_domain_at(rec.get_ref(), line) {
                Ok(d) => domains.push(d),
                // column inside the record, shifted past the opening quote
                Err(Error::Parse { column, message, .. }) => {
                    return Err(ConfigError {
                        line: Some((line, col + column)),
                        message: format!("bad domain record `{}`: {message}", rec.get_ref()),
                    })
                }
                Err(e) => return Err(ConfigError::at(text, rec.span().start, e.to_string())),
            }
            records.push(rec.get_ref().clone());
        }
        let cfg = Self {
            kind,
            domains,
            records,
            seed: seed.or(raw.seed),
            out: raw.out,
            spectrum: raw.spectrum.unwrap_or_default(),
            riesz: raw.riesz,
            remainder: raw.remainder,
            geometry: raw.geometry,
            goodset: raw.goodset,
            regions: raw.regions,
            partition: raw.partition,
            cone: raw.cone,
            defect: raw.defect,
            check: raw.check.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let needs_domains = !matches!(self.kind, Kind::ConeTrace | Kind::CheckAll);
        if needs_domains && self.domains.is_empty() {
            return Err(ConfigError::new(format!("`{}` needs at least one entry in `domains`", self.kind.as_str())));
        }
        if self.kind.uses_monte_carlo() && self.seed.is_none() {
            return Err(ConfigError::new(format!(
                "`{}` uses Monte Carlo sampling and needs a `seed`",
                self.kind.as_str()
            )));
        }
        let table = |present: bool, name: &str| {
            if present {
                Ok(())
            } else {
                Err(ConfigError::new(format!("`{}` needs a [{name}] table", self.kind.as_str())))
            }
        };
        match self.kind {
            Kind::Riesz => table(self.riesz.is_some(), "riesz"),
            Kind::WeylRemainder | Kind::ConvexBound => table(self.remainder.is_some(), "remainder"),
            Kind::Geometry => table(self.geometry.is_some(), "geometry"),
            Kind::Goodset => table(self.goodset.is_some(), "goodset"),
            Kind::Regions => table(self.regions.is_some(), "regions"),
            Kind::Partition => table(self.partition.is_some(), "partition"),
            Kind::ConeTrace => table(self.cone.is_some(), "cone"),
            Kind::Defect => table(self.defect.is_some(), "defect"),
            Kind::Spectrum | Kind::CheckAll => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_errors_point_into_the_file() {
        let text = "seed = 1\ndomains = [\"rect 1 1\", \"disk x\"]\n";
        let err = ExperimentConfig::parse(Kind::Spectrum, text, None).unwrap_err();
        assert_eq!(err.line, Some((2, 30)));
        assert_eq!(&text.lines().nth(1).unwrap()[29..30], "x");
    }

    #[test]
    fn toml_errors_carry_positions() {
        let err = ExperimentConfig::parse(Kind::Spectrum, "domains = [\"rect 1 1\"]\nbogus = 3\n", None).unwrap_err();
        assert_eq!(err.line.map(|p| p.0), Some(2));
    }

    #[test]
    fn monte_carlo_kinds_need_a_seed() {
        let text = "domains = [\"rect 1 1\"]\n[regions]\nepsilon = 0.5\nr = 0.2\nl0 = 0.02\nsamples = 10\n";
        assert!(ExperimentConfig::parse(Kind::Regions, text, None).is_err());
        assert!(ExperimentConfig::parse(Kind::Regions, text, Some(3)).is_ok());
    }
}
