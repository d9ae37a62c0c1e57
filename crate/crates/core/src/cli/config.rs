use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierElement;
use crate::instance::InstanceSpec;
use crate::lift::Parity;
use crate::operator::Cutoff;
use crate::C64;

/// A run read from a TOML file. Every field but `instance` has a default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub instance: String,
    pub connexion: String,
    /// Falls back to the instance's default parity.
    pub parity: Option<Parity>,
    pub seed: u64,
    pub cutoff: CutoffSpec,
    /// Truncation ladder as `"K1xM1,K2xM2,..."`.
    pub ladder: String,
    /// Random samples per check.
    pub samples: usize,
    pub tolerances: Tolerances,
    pub params: InstanceSpec,
    pub heat: HeatSpec,
    pub norm1: Norm1Spec,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            instance: "flat-torus".into(),
            connexion: "grassmann".into(),
            parity: None,
            seed: 7,
            cutoff: CutoffSpec::default(),
            ladder: "3x4,4x6,5x8".into(),
            samples: 5,
            tolerances: Tolerances::default(),
            params: InstanceSpec::default(),
            heat: HeatSpec::default(),
            norm1: Norm1Spec::default(),
            output: OutputSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutoffSpec {
    pub k: usize,
    pub m: usize,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { k: 2, m: 4 }
    }
}

impl From<CutoffSpec> for Cutoff {
    fn from(c: CutoffSpec) -> Self {
        Cutoff { k: c.k, m: c.m }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Algebraic identities: module, product, connexion, frames.
    pub algebra: f64,
    pub clifford: f64,
    pub selfadjoint: f64,
    /// Relative variation allowed along the ladder.
    pub stability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebra: 1e-9, clifford: 1e-12, selfadjoint: 1e-12, stability: 1e-2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatSpec {
    pub t: Vec<f64>,
}

impl Default for HeatSpec {
    fn default() -> Self {
        Self { t: vec![0.01, 0.05, 0.1, 0.5, 1.0] }
    }
}

/// The base element whose norm is tracked along the ladder; empty means `e_(1,0,...)`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Norm1Spec {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub mode: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Norm1Spec {
    pub fn element(&self, n: usize) -> Result<FourierElement> {
        if self.terms.is_empty() {
            let mut k = vec![0; n];
            k[0] = 1;
            return Ok(FourierElement::monomial(&k, C64::new(1.0, 0.0)));
        }
        FourierElement::from_pairs(n, self.terms.iter().map(|t| (t.mode.clone(), C64::new(t.re, t.im))))
            .map_err(|e| Error::Config(format!("norm1.terms: {e}")))
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub ladder: Option<String>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(d) = &o.out {
            self.output.dir = Some(d.clone());
        }
        if let Some(l) = &o.ladder {
            self.ladder = l.clone();
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(t) = o.tolerance {
            self.tolerances.algebra = t;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        parse_ladder(&self.ladder)?;
        let t = &self.tolerances;
        for (name, v) in [
            ("algebra", t.algebra),
            ("clifford", t.clifford),
            ("selfadjoint", t.selfadjoint),
            ("stability", t.stability),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if let Some(t) = self.heat.t.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Config(format!("heat.t must be positive, got {t}")));
        }
        Ok(())
    }

    pub fn ladder(&self) -> Result<Vec<Cutoff>> {
        parse_ladder(&self.ladder)
    }
}

/// Parses `"3x4,4x6"` into cutoffs; the ladder must be non-empty and strictly
/// increasing in both coordinates.
pub fn parse_ladder(s: &str) -> Result<Vec<Cutoff>> {
    let mut out: Vec<Cutoff> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, m) = part
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Config(format!("ladder rung '{part}' is not of the form KxM")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("ladder rung '{part}' is not of the form KxM")))
        };
        let rung = Cutoff { k: parse(k)?, m: parse(m)? };
        if let Some(prev) = out.last() {
            if rung.k <= prev.k || rung.m <= prev.m {
                return Err(Error::Config(format!("ladder must increase strictly, '{part}' does not")));
            }
        }
        out.push(rung);
    }
    if out.is_empty() {
        return Err(Error::Config("ladder is empty".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_strings() {
        let l = parse_ladder("3x4, 4x6,5X8").unwrap();
        assert_eq!(l, vec![Cutoff { k: 3, m: 4 }, Cutoff { k: 4, m: 6 }, Cutoff { k: 5, m: 8 }]);
        assert!(parse_ladder("").is_err());
        assert!(parse_ladder("3x4,3x6").is_err());
        assert!(parse_ladder("3x4,4x4").is_err());
        assert!(parse_ladder("3-4").is_err());
        assert!(parse_ladder("ax4").is_err());
    }

    #[test]
    fn full_file() {
        let cfg = RunConfig::parse(
            r#"
            instance = "twisted-module"
            connexion = "perturbed"
            parity = "odd-odd"
            seed = 11
            ladder = "2x3,3x5"
            [cutoff]
            k = 1
            m = 3
            [tolerances]
            algebra = 1e-8
            [params]
            n = 2
            shift = [1, 0]
            shift_den = 8
            frame = "character"
            [params.qhm]
            c = 1
            [heat]
            t = [0.1]
            [[norm1.terms]]
            mode = [1, 0]
            re = 0.5
            "#,
        )
        .unwrap();
        assert_eq!(cfg.parity, Some(Parity::OddOdd));
        assert_eq!(cfg.ladder().unwrap().len(), 2);
        assert_eq!(cfg.tolerances.clifford, 1e-12);
        assert_eq!(cfg.params.qhm.c, 1);
        assert_eq!(cfg.norm1.element(2).unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(RunConfig::parse("instance = \"flat-torus\"\nbogus = 1").is_err());
        assert!(RunConfig::parse("ladder = \"\"").is_err());
        assert!(RunConfig::parse("[tolerances]\nalgebra = -1.0").is_err());
        assert!(RunConfig::parse("[heat]\nt = [0.0]").is_err());
        assert!(RunConfig::parse("parity = \"even-even\"").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::default();
        cfg.apply(&Overrides { ladder: Some("1x2".into()), seed: Some(3), tolerance: Some(1e-6), out: None })
            .unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.tolerances.algebra, 1e-6);
        assert!(cfg.apply(&Overrides { tolerance: Some(0.0), ..Default::default() }).is_err());
    }
}
