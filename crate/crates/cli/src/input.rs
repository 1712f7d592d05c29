use crate::error::{CliError, Context};
use crate::{DataArgs, ModelArgs};
use mpr_core::{parse_dataset, Column, ColumnKind, CovariateProfile, Dataset, ModelSpec, ProfileValue};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub fn load_dataset(args: &DataArgs) -> Result<Dataset, CliError> {
    let text = fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let mut hints = BTreeMap::new();
    for c in &args.categorical {
        hints.insert(c.clone(), ColumnKind::Categorical);
    }
    for c in &args.numeric {
        if hints.insert(c.clone(), ColumnKind::Numeric).is_some() {
            return Err(CliError::Usage(format!("column `{c}` declared both numeric and categorical")));
        }
    }
    let ds = parse_dataset(&text, &args.time, &args.status, &hints)
        .context(format!("reading {}", args.input.display()))?;
    log::info!(
        "{}: {} subjects, {} events, covariates {:?}",
        args.input.display(),
        ds.n(),
        ds.n_events(),
        ds.covariate_names()
    );
    Ok(ds)
}

fn terms(list: &[String], flag: &str) -> Result<Vec<String>, CliError> {
    let list: Vec<String> = list.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if list.iter().any(|s| s == "1") {
        if list.len() > 1 {
            return Err(CliError::Usage(format!("--{flag} 1 cannot be combined with covariates")));
        }
        return Ok(Vec::new());
    }
    Ok(list)
}

pub fn model_spec(args: &ModelArgs, ds: &Dataset) -> Result<ModelSpec, CliError> {
    let mut spec = ModelSpec::new(terms(&args.scale, "scale")?, terms(&args.shape, "shape")?);
    for r in &args.references {
        let (factor, level) = r
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--reference expects FACTOR=LEVEL, got `{r}`")))?;
        spec = spec.with_reference(factor.trim(), level.trim());
    }
    spec.validate(ds).context("model specification")?;
    Ok(spec)
}

/// Profile from `NAME=VALUE` pairs, typed by the dataset's columns.
pub fn profile(pairs: &[String], ds: &Dataset) -> Result<CovariateProfile, CliError> {
    let mut p = CovariateProfile::reference();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--at expects NAME=VALUE, got `{pair}`")))?;
        let (name, value) = (name.trim(), value.trim());
        let v = match ds.column(name) {
            Some(Column::Numeric(_)) => ProfileValue::Numeric(
                value
                    .parse()
                    .map_err(|_| CliError::Usage(format!("--at {name}: `{value}` is not a number")))?,
            ),
            Some(Column::Categorical { .. }) => ProfileValue::Level(value.to_string()),
            None => return Err(CliError::Usage(format!("--at: unknown covariate `{name}`"))),
        };
        p = p.set(name, v);
    }
    Ok(p)
}

pub fn output_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// File-name-safe rendering of an effect such as `treatment[C+R]`.
pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

/// CSV text with quoting handled by the `csv` writer.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
