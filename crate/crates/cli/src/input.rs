//! Problem, roots and series files.

use std::path::Path;

use gaudinlab::bethe::BetheConfiguration;
use gaudinlab::gaudin::GaudinProblem;
use gaudinlab::repcore::{Algebra, Weight};
use gaudinlab::C64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSpec {
    pub z: C64,
    pub weight: Weight,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub starts: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub algebra: Algebra,
    pub sites: Vec<SiteSpec>,
    #[serde(default)]
    pub mu: Option<Vec<C64>>,
    #[serde(default)]
    pub solver: SolverOverrides,
}

impl ProblemFile {
    pub fn problem(&self, path: &Path) -> Result<GaudinProblem, CliError> {
        for (i, site) in self.sites.iter().enumerate() {
            if site.weight.algebra() != self.algebra {
                return Err(CliError::Input(format!(
                    "{}: sites[{i}].weight: {} does not match algebra {:?}",
                    path.display(),
                    site.weight,
                    self.algebra
                )));
            }
        }
        if let Some(mu) = &self.mu {
            if mu.len() != self.sites.len() {
                return Err(CliError::Input(format!("{}: mu: expected {} entries", path.display(), self.sites.len())));
            }
        }
        GaudinProblem::new(self.sites.iter().map(|s| s.z).collect(), self.sites.iter().map(|s| s.weight).collect())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootsFile {
    roots: Vec<C64>,
    #[serde(default)]
    colors: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SeriesFile {
    Bare(Vec<C64>),
    Object { coeffs: Vec<C64> },
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Deserializes with a field path and line/column in the diagnostic.
pub fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        // serde_json's message already ends with the line and column.
        CliError::Input(format!("{}: field `{}`: {}", path.display(), e.path(), e.inner()))
    })
}

pub fn load_problem(path: &Path, text: &str) -> Result<(ProblemFile, GaudinProblem), CliError> {
    let file: ProblemFile = parse(path, text)?;
    let problem = file.problem(path)?;
    Ok((file, problem))
}

/// Configurations from a roots file `{"roots": [...], "colors": [...]}` or
/// from a report written by `bethe solve` or `bethe audit`.
pub fn load_roots(path: &Path, text: &str, algebra: Algebra) -> Result<Vec<BetheConfiguration>, CliError> {
    let value: Value = parse(path, text)?;
    let configs = if value.get("roots").is_some() {
        let file: RootsFile = parse(path, text)?;
        let colors = match (file.colors, algebra) {
            (Some(c), _) => c,
            (None, Algebra::Sl2) => vec![1; file.roots.len()],
            (None, Algebra::Sl3) => return Err(CliError::Input(format!("{}: sl3 roots need `colors`", path.display()))),
        };
        if colors.len() != file.roots.len() {
            return Err(CliError::Input(format!("{}: `colors` and `roots` differ in length", path.display())));
        }
        vec![BetheConfiguration::colored(file.roots, colors)]
    } else if let Some(result) = value.get("result") {
        let mut found = Vec::new();
        if let Some(list) = result.get("configurations") {
            found.push(list.clone());
        }
        if let Some(sectors) = result.get("sectors").and_then(Value::as_array) {
            found.extend(sectors.iter().filter_map(|s| s.get("configurations").cloned()));
        }
        if found.is_empty() {
            return Err(CliError::Input(format!("{}: report carries no configurations", path.display())));
        }
        let mut out = Vec::new();
        for list in found {
            let configs: Vec<BetheConfiguration> = parse(path, &list.to_string())?;
            out.extend(configs);
        }
        out
    } else {
        return Err(CliError::Input(format!("{}: expected `roots` or a report with configurations", path.display())));
    };
    Ok(configs)
}

pub fn load_series(path: &Path, text: &str) -> Result<Vec<C64>, CliError> {
    Ok(match parse::<SeriesFile>(path, text)? {
        SeriesFile::Bare(c) | SeriesFile::Object { coeffs: c } => c,
    })
}

/// `"2"` for sl2 or `"1,0"` for sl3.
pub fn parse_weight(text: &str, algebra: Algebra) -> Result<Weight, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<u32>().map_err(|_| CliError::Input(format!("invalid weight `{text}`")));
    match (algebra, parts.as_slice()) {
        (Algebra::Sl2, [a]) => Ok(Weight::Sl2(num(a)?)),
        (Algebra::Sl3, [a, b]) => Ok(Weight::Sl3(num(a)?, num(b)?)),
        _ => Err(CliError::Input(format!("weight `{text}` does not fit algebra {algebra:?}"))),
    }
}

/// `"RE,IM"`.
pub fn parse_complex(text: &str) -> Result<C64, CliError> {
    let bad = || CliError::Input(format!("expected RE,IM but got `{text}`"));
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    Ok(C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

/// Either a JSON list of `[re, im]` pairs or comma-separated reals.
pub fn parse_coefficients(text: &str) -> Result<Vec<C64>, CliError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(|e| CliError::Input(format!("coefficients `{text}`: {e}")));
    }
    trimmed
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map(|x| C64::new(x, 0.0))
                .map_err(|_| CliError::Input(format!("invalid coefficient `{s}`")))
        })
        .collect()
}

pub fn parse_colors(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| CliError::Input(format!("invalid color `{s}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_name_the_field() {
        let text = "{\n  \"algebra\": \"sl2\",\n  \"sites\": [\n    {\"z\": [0, 0], \"weight\": 1},\n    {\"z\": [1, 0], \"weight\": \"x\"}\n  ]\n}";
        let err = load_problem(Path::new("p.json"), text).unwrap_err().to_string();
        assert!(err.contains("sites[1].weight"), "{err}");
        assert!(err.contains("line 5"), "{err}");
    }

    #[test]
    fn weights_must_match_algebra() {
        let text = r#"{"algebra": "sl3", "sites": [{"z": [0, 0], "weight": 1}, {"z": [1, 0], "weight": [1, 0]}]}"#;
        assert!(matches!(load_problem(Path::new("p.json"), text), Err(CliError::Input(_))));
    }

    #[test]
    fn small_parsers() {
        assert_eq!(parse_weight("1,0", Algebra::Sl3).unwrap(), Weight::Sl3(1, 0));
        assert!(parse_weight("1,0", Algebra::Sl2).is_err());
        assert_eq!(parse_complex("0.5,-1").unwrap(), C64::new(0.5, -1.0));
        assert_eq!(parse_coefficients("1,2").unwrap(), vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!(parse_coefficients("[[0,1]]").unwrap(), vec![C64::new(0.0, 1.0)]);
        assert_eq!(parse_colors("1, 2").unwrap(), vec![1, 2]);
    }
}
