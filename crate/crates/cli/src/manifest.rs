use std::path::Path;

use mcycle::algebra::{parse_poly, Ctx, MultiPoly, PointQ, VarContext};
use mcycle::campaign::Family;
use mcycle::forms::{d_of, OneForm};
use mcycle::group::{SigmaSet, Subtorus, TorusPoint};
use mcycle::oracle::VectorField;
use serde::Deserialize;

use crate::CliError;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Frobenius,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub family: String,
    pub count: usize,
    pub seed: Option<u64>,
    pub points: Option<usize>,
}

/// Instance description shared by all subcommands; each command reads the
/// fields it needs and validates them before computing anything.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: Option<u32>,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default)]
    pub forms: Vec<Vec<String>>,
    #[serde(default)]
    pub exact_potentials: Vec<String>,
    #[serde(default)]
    pub points: Vec<PointQ>,
    #[serde(default)]
    pub mode: Mode,
    pub seed: Option<u64>,
    pub cap: Option<u32>,
    pub budget: Option<usize>,
    pub truncation: Option<u32>,
    pub trials: Option<u32>,
    pub n_exp: Option<u32>,
    #[serde(rename = "P")]
    pub p: Option<String>,
    pub xi: Option<Vec<String>>,
    pub q_degree: Option<u32>,
    pub r: Option<usize>,
    pub sigma: Option<Vec<TorusPoint>>,
    pub subgroups: Option<Vec<Vec<Vec<i64>>>>,
    pub height: Option<u32>,
    pub d: Option<u64>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub weight: Option<String>,
    pub campaign: Option<CampaignSpec>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Manifest, CliError> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("manifest: {e}")))?;
        if let Some(v) = m.version {
            if v != MANIFEST_VERSION {
                return Err(CliError::Invalid(format!("unsupported manifest version {v}")));
            }
        }
        Ok(m)
    }

    pub fn space(&self) -> Result<Ctx, CliError> {
        if self.variables.is_empty() {
            return Err(CliError::Invalid("`variables` must be a nonempty list".into()));
        }
        Ok(VarContext::new(&self.variables)?)
    }

    /// Functions in the `(x, e)` context; they may mention `e`.
    pub fn functions(&self, x: &Ctx) -> Result<Vec<MultiPoly>, CliError> {
        if self.functions.is_empty() {
            return Err(CliError::Invalid("`functions` must be a nonempty list".into()));
        }
        let xe = x.extend_e();
        Ok(self
            .functions
            .iter()
            .map(|s| parse_poly(s, &xe))
            .collect::<Result<_, _>>()?)
    }

    /// The Pfaffian system: explicit coefficient rows, or differentials of the
    /// potentials in exact mode.
    pub fn forms(&self, x: &Ctx) -> Result<Vec<OneForm>, CliError> {
        match self.mode {
            Mode::Exact => {
                if !self.forms.is_empty() {
                    return Err(CliError::Invalid(
                        "exact mode takes `exact_potentials`, not `forms`".into(),
                    ));
                }
                Ok(self.potentials(x)?.iter().map(d_of).collect())
            }
            Mode::Frobenius => {
                if !self.exact_potentials.is_empty() {
                    return Err(CliError::Invalid(
                        "`exact_potentials` requires \"mode\": \"exact\"".into(),
                    ));
                }
                self.forms
                    .iter()
                    .map(|row| {
                        if row.len() != x.arity() {
                            return Err(CliError::Invalid(format!(
                                "form has {} coefficients, expected {}",
                                row.len(),
                                x.arity()
                            )));
                        }
                        let coeffs = row.iter().map(|s| parse_poly(s, x)).collect::<Result<_, _>>()?;
                        Ok(OneForm::new(x, coeffs)?)
                    })
                    .collect()
            }
        }
    }

    pub fn potentials(&self, x: &Ctx) -> Result<Vec<MultiPoly>, CliError> {
        Ok(self
            .exact_potentials
            .iter()
            .map(|s| parse_poly(s, x))
            .collect::<Result<_, _>>()?)
    }

    pub fn points(&self, n: usize) -> Result<Vec<PointQ>, CliError> {
        if let Some(p) = self.points.iter().find(|p| p.dim() != n) {
            return Err(CliError::Invalid(format!(
                "point {:?} does not have {n} coordinates",
                p.coords()
            )));
        }
        Ok(self.points.clone())
    }

    pub fn vector_problem(&self, x: &Ctx) -> Result<(MultiPoly, VectorField), CliError> {
        let p = self.p.as_ref().ok_or_else(|| CliError::Invalid("missing `P`".into()))?;
        let xi = self
            .xi
            .as_ref()
            .ok_or_else(|| CliError::Invalid("missing `xi`".into()))?;
        if xi.len() != x.arity() {
            return Err(CliError::Invalid(format!("`xi` needs {} components", x.arity())));
        }
        let comps = xi.iter().map(|s| parse_poly(s, x)).collect::<Result<_, _>>()?;
        Ok((parse_poly(p, x)?, VectorField::new(x, comps)?))
    }

    pub fn sigma(&self, n: usize) -> Result<SigmaSet, CliError> {
        let pts = self
            .sigma
            .clone()
            .ok_or_else(|| CliError::Invalid("missing `sigma`".into()))?;
        if pts.iter().any(|p| p.dim() != n) {
            return Err(CliError::Invalid(format!("`sigma` points need {n} coordinates")));
        }
        Ok(SigmaSet::new(pts)?)
    }

    pub fn subgroups(&self, n: usize) -> Result<Option<Vec<Subtorus>>, CliError> {
        self.subgroups
            .as_ref()
            .map(|list| list.iter().map(|rows| Ok(Subtorus::new(n, rows.clone())?)).collect())
            .transpose()
    }

    pub fn family(&self) -> Result<(Family, &CampaignSpec), CliError> {
        let spec = self
            .campaign
            .as_ref()
            .ok_or_else(|| CliError::Invalid("missing `campaign`".into()))?;
        Ok((spec.family.parse()?, spec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pfaffian_instance() {
        let m = Manifest::parse(
            r#"{"version": 1, "variables": ["x", "y"], "functions": ["y - 1 - x"],
                "forms": [["-y", "1"]], "points": [["0", "1"]]}"#,
        )
        .unwrap();
        let x = m.space().unwrap();
        assert_eq!(m.functions(&x).unwrap().len(), 1);
        assert_eq!(m.forms(&x).unwrap().len(), 1);
        assert_eq!(m.points(2).unwrap()[0], PointQ::from_ints(&[0, 1]));
    }

    #[test]
    fn rejects_bad_shapes() {
        let m = Manifest::parse(r#"{"variables": ["x", "y"], "functions": ["x"], "forms": [["1"]]}"#).unwrap();
        assert!(m.forms(&m.space().unwrap()).is_err());
        assert!(Manifest::parse(r#"{"variables": ["x"], "bogus": 1}"#).is_err());
        assert!(Manifest::parse(r#"{"version": 7}"#).is_err());
        let m = Manifest::parse(r#"{"variables": ["x"], "functions": ["z"]}"#).unwrap();
        assert!(m.functions(&m.space().unwrap()).is_err());
    }

    #[test]
    fn exact_mode_differentiates() {
        let m = Manifest::parse(
            r#"{"variables": ["x", "y"], "functions": ["y"], "mode": "exact", "exact_potentials": ["x*y"]}"#,
        )
        .unwrap();
        let w = m.forms(&m.space().unwrap()).unwrap();
        assert_eq!(w[0].coeffs()[0].to_string(), "y");
    }
}
