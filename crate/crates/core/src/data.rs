//! Right-censored survival data, CSV ingestion and dummy-coded design matrices.

use crate::error::{MprError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;

/// Level assigned to empty cells of a categorical column.
pub const MISSING_LEVEL: &str = "Missing";

/// Relative pivot tolerance used by the rank check.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Column {
    Numeric(Vec<f64>),
    /// `codes[i]` indexes into `levels`.
    Categorical { levels: Vec<String>, codes: Vec<usize> },
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            Column::Numeric(_) => ColumnKind::Numeric,
            Column::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    /// Builds a categorical column from string cells: levels in order of
    /// first appearance, empty cells mapped to a trailing `Missing` level.
    pub fn categorical_from_cells<S: AsRef<str>>(cells: &[S]) -> Self {
        let mut levels: Vec<String> = Vec::new();
        let mut saw_missing = false;
        for c in cells {
            let c = c.as_ref().trim();
            if c.is_empty() || c == MISSING_LEVEL {
                saw_missing = true;
            } else if !levels.iter().any(|l| l == c) {
                levels.push(c.to_string());
            }
        }
        if saw_missing {
            levels.push(MISSING_LEVEL.to_string());
        }
        let codes = cells
            .iter()
            .map(|c| {
                let c = c.as_ref().trim();
                let key = if c.is_empty() { MISSING_LEVEL } else { c };
                levels.iter().position(|l| l == key).expect("level registered")
            })
            .collect();
        Column::Categorical { levels, codes }
    }
}

/// Right-censored observations with named covariate columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    time: Vec<f64>,
    status: Vec<bool>,
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Dataset {
    /// Validates and assembles a dataset. `status[i] == true` marks an event.
    pub fn new(
        time: Vec<f64>,
        status: Vec<bool>,
        covariates: Vec<(String, Column)>,
    ) -> Result<Self> {
        let n = time.len();
        if n == 0 {
            return Err(MprError::EmptyData);
        }
        if status.len() != n {
            return Err(MprError::Dimension(format!(
                "{} times but {} status values",
                n,
                status.len()
            )));
        }
        for (row, &t) in time.iter().enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(MprError::NonPositiveTime { row, value: t });
            }
        }
        if !status.iter().any(|&s| s) {
            return Err(MprError::NoEvents);
        }
        let mut seen = HashSet::new();
        let mut names = Vec::with_capacity(covariates.len());
        let mut columns = Vec::with_capacity(covariates.len());
        for (name, col) in covariates {
            if !seen.insert(name.clone()) {
                return Err(MprError::DuplicateColumn(name));
            }
            if col.len() != n {
                return Err(MprError::Dimension(format!(
                    "column `{}` has {} rows, expected {}",
                    name,
                    col.len(),
                    n
                )));
            }
            names.push(name);
            columns.push(col);
        }
        Ok(Self {
            time,
            status,
            names,
            columns,
        })
    }

    pub fn n(&self) -> usize {
        self.time.len()
    }

    pub fn time(&self) -> &[f64] {
        &self.time
    }

    pub fn status(&self) -> &[bool] {
        &self.status
    }

    pub fn n_events(&self) -> usize {
        self.status.iter().filter(|&&s| s).count()
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.columns[i])
    }

    /// Levels of a categorical column, `None` for numeric or unknown columns.
    pub fn levels(&self, name: &str) -> Option<&[String]> {
        match self.column(name)? {
            Column::Categorical { levels, .. } => Some(levels),
            Column::Numeric(_) => None,
        }
    }

    /// Keeps only the rows in `rows`, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let cols = self
            .names
            .iter()
            .zip(&self.columns)
            .map(|(name, col)| {
                let col = match col {
                    Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
                    Column::Categorical { levels, codes } => Column::Categorical {
                        levels: levels.clone(),
                        codes: rows.iter().map(|&i| codes[i]).collect(),
                    },
                };
                (name.clone(), col)
            })
            .collect();
        Dataset::new(
            rows.iter().map(|&i| self.time[i]).collect(),
            rows.iter().map(|&i| self.status[i]).collect(),
            cols,
        )
    }

    /// Serialises back to CSV with the given time/status header names.
    pub fn to_csv(&self, time_col: &str, status_col: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![time_col.to_string(), status_col.to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.n() {
            let mut rec = vec![
                format!("{}", self.time[i]),
                if self.status[i] { "1" } else { "0" }.to_string(),
            ];
            for col in &self.columns {
                rec.push(match col {
                    Column::Numeric(v) => format!("{}", v[i]),
                    Column::Categorical { levels, codes } => {
                        let l = &levels[codes[i]];
                        if l == MISSING_LEVEL {
                            String::new()
                        } else {
                            l.clone()
                        }
                    }
                });
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| MprError::Csv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| MprError::Csv(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> MprError {
    MprError::Csv(e.to_string())
}

/// A CSV file as header plus string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Reads RFC-4180 CSV text with a mandatory header row.
pub fn read_table(csv_text: &str) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(MprError::Csv("missing header row".into()));
    }
    let mut seen = HashSet::new();
    for h in &header {
        if h.is_empty() {
            return Err(MprError::Csv("empty header name".into()));
        }
        if !seen.insert(h) {
            return Err(MprError::DuplicateColumn(h.clone()));
        }
    }
    let rows = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()
        .map_err(csv_err)?;
    Ok(RawTable { header, rows })
}

/// Parses survival data from CSV text.
///
/// Columns other than `time_col`/`status_col` become covariates. A column's
/// kind comes from `type_hints` when present; otherwise it is numeric when
/// every cell parses as a number and categorical otherwise.
pub fn parse_dataset(
    csv_text: &str,
    time_col: &str,
    status_col: &str,
    type_hints: &BTreeMap<String, ColumnKind>,
) -> Result<Dataset> {
    let table = read_table(csv_text)?;
    let ti = table
        .column_index(time_col)
        .ok_or_else(|| MprError::MissingColumn(time_col.to_string()))?;
    let si = table
        .column_index(status_col)
        .ok_or_else(|| MprError::MissingColumn(status_col.to_string()))?;
    for name in type_hints.keys() {
        if table.column_index(name).is_none() {
            return Err(MprError::MissingColumn(name.clone()));
        }
    }

    let mut time = Vec::with_capacity(table.rows.len());
    let mut status = Vec::with_capacity(table.rows.len());
    for (row, rec) in table.rows.iter().enumerate() {
        let raw = rec[ti].trim();
        let t: f64 = raw.parse().map_err(|_| MprError::UnparsableNumber {
            row,
            column: time_col.to_string(),
            value: raw.to_string(),
        })?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(MprError::NonPositiveTime { row, value: t });
        }
        time.push(t);
        status.push(match rec[si].trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(MprError::InvalidStatus {
                    row,
                    value: other.to_string(),
                })
            }
        });
    }

    let mut covariates = Vec::new();
    for (j, name) in table.header.iter().enumerate() {
        if j == ti || j == si {
            continue;
        }
        let cells: Vec<&str> = table.rows.iter().map(|r| r[j].as_str()).collect();
        let kind = type_hints.get(name).copied().unwrap_or_else(|| {
            let numeric = cells
                .iter()
                .all(|c| !c.trim().is_empty() && c.trim().parse::<f64>().is_ok());
            if numeric {
                ColumnKind::Numeric
            } else {
                ColumnKind::Categorical
            }
        });
        let col = match kind {
            ColumnKind::Categorical => Column::categorical_from_cells(&cells),
            ColumnKind::Numeric => {
                let mut v = Vec::with_capacity(cells.len());
                for (row, c) in cells.iter().enumerate() {
                    let c = c.trim();
                    if c.is_empty() {
                        return Err(MprError::EmptyNumeric {
                            row,
                            column: name.clone(),
                        });
                    }
                    v.push(c.parse().map_err(|_| MprError::UnparsableNumber {
                        row,
                        column: name.clone(),
                        value: c.to_string(),
                    })?);
                }
                Column::Numeric(v)
            }
        };
        covariates.push((name.clone(), col));
    }
    Dataset::new(time, status, covariates)
}

/// Scale (`x`) and shape (`z`) covariate sets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub scale_terms: Vec<String>,
    pub shape_terms: Vec<String>,
    #[serde(default)]
    pub reference_levels: BTreeMap<String, String>,
}

impl ModelSpec {
    pub fn new<S: Into<String>>(
        scale: impl IntoIterator<Item = S>,
        shape: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            scale_terms: scale.into_iter().map(Into::into).collect(),
            shape_terms: shape.into_iter().map(Into::into).collect(),
            reference_levels: BTreeMap::new(),
        }
    }

    pub fn null() -> Self {
        Self::default()
    }

    pub fn with_reference(mut self, factor: &str, level: &str) -> Self {
        self.reference_levels
            .insert(factor.to_string(), level.to_string());
        self
    }

    pub fn terms(&self, component: Component) -> &[String] {
        match component {
            Component::Scale => &self.scale_terms,
            Component::Shape => &self.shape_terms,
        }
    }

    /// True when every term of `self` also appears in `other`, per component.
    pub fn is_nested_in(&self, other: &ModelSpec) -> bool {
        self.scale_terms.iter().all(|t| other.scale_terms.contains(t))
            && self.shape_terms.iter().all(|t| other.shape_terms.contains(t))
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        for t in self.scale_terms.iter().chain(&self.shape_terms) {
            if ds.column(t).is_none() {
                return Err(MprError::UnknownTerm(t.clone()));
            }
        }
        for (factor, level) in &self.reference_levels {
            let levels = ds
                .levels(factor)
                .ok_or_else(|| MprError::UnknownTerm(factor.clone()))?;
            if !levels.contains(level) {
                return Err(MprError::UnknownLevel {
                    factor: factor.clone(),
                    level: level.clone(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[String]| {
            if v.is_empty() {
                "1".to_string()
            } else {
                v.join(" + ")
            }
        };
        write!(
            f,
            "M(x = {}, z = {})",
            show(&self.scale_terms),
            show(&self.shape_terms)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Scale,
    Shape,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Component::Scale => "scale",
            Component::Shape => "shape",
        })
    }
}

/// Maps a design column back to the covariate (and level) it encodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnLabel {
    /// `None` for the intercept.
    pub term: Option<String>,
    /// Non-reference level for a dummy column.
    pub level: Option<String>,
}

impl ColumnLabel {
    pub fn intercept() -> Self {
        Self {
            term: None,
            level: None,
        }
    }

    pub fn is_intercept(&self) -> bool {
        self.term.is_none()
    }

    pub fn belongs_to(&self, term: &str) -> bool {
        self.term.as_deref() == Some(term)
    }
}

impl fmt::Display for ColumnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.term, &self.level) {
            (None, _) => f.write_str("(Intercept)"),
            (Some(t), None) => f.write_str(t),
            (Some(t), Some(l)) => write!(f, "{t}[{l}]"),
        }
    }
}

/// Scale design `X`, shape design `Z` and the response.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrices<T> {
    pub x: Matrix<T>,
    pub z: Matrix<T>,
    pub x_labels: Vec<ColumnLabel>,
    pub z_labels: Vec<ColumnLabel>,
    pub time: Vec<T>,
    pub status: Vec<bool>,
    pub spec: ModelSpec,
}

impl<T: Scalar> DesignMatrices<T> {
    pub fn n(&self) -> usize {
        self.time.len()
    }

    /// Number of scale covariate columns (excluding the intercept).
    pub fn p(&self) -> usize {
        self.x.ncols() - 1
    }

    pub fn q(&self) -> usize {
        self.z.ncols() - 1
    }

    pub fn n_params(&self) -> usize {
        self.x.ncols() + self.z.ncols()
    }

    /// Builds a design directly from matrices whose first column is the intercept.
    pub fn from_matrices(x: Matrix<T>, z: Matrix<T>, time: Vec<T>, status: Vec<bool>) -> Result<Self> {
        let n = time.len();
        if x.nrows() != n || z.nrows() != n || status.len() != n {
            return Err(MprError::Dimension("design rows disagree with response".into()));
        }
        if x.ncols() == 0 || z.ncols() == 0 {
            return Err(MprError::Dimension("designs need an intercept column".into()));
        }
        let labels = |m: &Matrix<T>, prefix: &str| {
            (0..m.ncols())
                .map(|j| {
                    if j == 0 {
                        ColumnLabel::intercept()
                    } else {
                        ColumnLabel {
                            term: Some(format!("{prefix}{j}")),
                            level: None,
                        }
                    }
                })
                .collect::<Vec<_>>()
        };
        let x_labels = labels(&x, "x");
        let z_labels = labels(&z, "z");
        let spec = ModelSpec {
            scale_terms: x_labels.iter().skip(1).map(|l| l.to_string()).collect(),
            shape_terms: z_labels.iter().skip(1).map(|l| l.to_string()).collect(),
            reference_levels: BTreeMap::new(),
        };
        Ok(Self {
            x,
            z,
            x_labels,
            z_labels,
            time,
            status,
            spec,
        })
    }
}

/// Reference level chosen for `factor`: the override if any, else the first level.
pub fn reference_level<'a>(spec: &'a ModelSpec, factor: &str, levels: &'a [String]) -> &'a str {
    spec.reference_levels
        .get(factor)
        .map(String::as_str)
        .unwrap_or_else(|| levels[0].as_str())
}

/// Column labels contributed by `terms`, intercept first.
pub fn labels_for_terms(ds: &Dataset, spec: &ModelSpec, terms: &[String]) -> Result<Vec<ColumnLabel>> {
    let mut labels = vec![ColumnLabel::intercept()];
    for term in terms {
        match ds.column(term).ok_or_else(|| MprError::UnknownTerm(term.clone()))? {
            Column::Numeric(_) => labels.push(ColumnLabel {
                term: Some(term.clone()),
                level: None,
            }),
            Column::Categorical { levels, .. } => {
                let reference = reference_level(spec, term, levels);
                for l in levels.iter().filter(|l| l.as_str() != reference) {
                    labels.push(ColumnLabel {
                        term: Some(term.clone()),
                        level: Some(l.clone()),
                    });
                }
            }
        }
    }
    Ok(labels)
}

/// Value of design column `label` for row `i`.
fn cell(ds: &Dataset, label: &ColumnLabel, i: usize) -> Result<f64> {
    let Some(term) = &label.term else {
        return Ok(1.0);
    };
    match (ds.column(term).ok_or_else(|| MprError::UnknownTerm(term.clone()))?, &label.level) {
        (Column::Numeric(v), None) => Ok(v[i]),
        (Column::Categorical { levels, codes }, Some(level)) => {
            Ok(if &levels[codes[i]] == level { 1.0 } else { 0.0 })
        }
        _ => Err(MprError::UnknownCoefficient(label.to_string())),
    }
}

/// Evaluates the given labelled columns on every row of `ds`.
pub fn encode_with_labels<T: Scalar>(ds: &Dataset, labels: &[ColumnLabel]) -> Result<Matrix<T>> {
    let mut data = Vec::with_capacity(ds.n() * labels.len());
    for i in 0..ds.n() {
        for l in labels {
            data.push(T::lit(cell(ds, l, i)?));
        }
    }
    Matrix::from_row_major(ds.n(), labels.len(), data)
}

fn check_rank<T: Scalar>(m: &Matrix<T>, labels: &[ColumnLabel], component: Component) -> Result<()> {
    if m.ncols() > m.nrows() {
        return Err(MprError::RankDeficient {
            component: component.to_string(),
            columns: labels.iter().map(ToString::to_string).collect(),
        });
    }
    let (perm, diag) = m.map(Scalar::as_f64).pivoted_qr_diagonal();
    let lead = diag.first().copied().unwrap_or(0.0);
    let bad: Vec<String> = perm
        .iter()
        .zip(&diag)
        .filter(|(_, &d)| !(d > RANK_TOLERANCE * lead))
        .map(|(&j, _)| labels[j].to_string())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(MprError::RankDeficient {
            component: component.to_string(),
            columns: bad,
        })
    }
}

/// Dummy-codes the scale and shape terms of `spec` into design matrices.
///
/// A categorical covariate with `L` observed levels contributes `L - 1`
/// indicator columns (reference dropped); numeric covariates pass through.
pub fn encode_design<T: Scalar>(ds: &Dataset, spec: &ModelSpec) -> Result<DesignMatrices<T>> {
    spec.validate(ds)?;
    let x_labels = labels_for_terms(ds, spec, &spec.scale_terms)?;
    let z_labels = labels_for_terms(ds, spec, &spec.shape_terms)?;
    let x = encode_with_labels(ds, &x_labels)?;
    let z = encode_with_labels(ds, &z_labels)?;
    check_rank(&x, &x_labels, Component::Scale)?;
    check_rank(&z, &z_labels, Component::Shape)?;
    Ok(DesignMatrices {
        x,
        z,
        x_labels,
        z_labels,
        time: ds.time().iter().map(|&t| T::lit(t)).collect(),
        status: ds.status().to_vec(),
        spec: spec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hints() -> BTreeMap<String, ColumnKind> {
        BTreeMap::new()
    }

    #[test]
    fn parses_small_categorical_file() {
        let ds = parse_dataset("t,d,sex\n1.0,1,M\n2.0,0,F\n", "t", "d", &hints()).unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.covariate_names(), ["sex"]);
        assert_eq!(ds.levels("sex").unwrap(), ["M", "F"]);
        assert_eq!(ds.status(), [true, false]);
    }

    #[test]
    fn empty_categorical_cell_becomes_missing_level() {
        let ds = parse_dataset("t,d,who\n1,1,\n2,1,a\n3,0,b\n", "t", "d", &hints()).unwrap();
        assert_eq!(ds.levels("who").unwrap(), ["a", "b", MISSING_LEVEL]);
        match ds.column("who").unwrap() {
            Column::Categorical { codes, .. } => assert_eq!(codes, &[2, 0, 1]),
            _ => panic!("expected categorical"),
        }
    }

    #[test]
    fn rejects_non_positive_time() {
        let err = parse_dataset("t,d\n-1,1\n", "t", "d", &hints()).unwrap_err();
        assert!(matches!(err, MprError::NonPositiveTime { row: 0, .. }));
        assert!(err.to_string().contains("non-positive time"));
    }

    #[test]
    fn rejects_bad_status_and_headers() {
        assert!(matches!(
            parse_dataset("t,d\n1,2\n", "t", "d", &hints()),
            Err(MprError::InvalidStatus { .. })
        ));
        assert!(matches!(
            parse_dataset("t,d\n1,1\n", "time", "d", &hints()),
            Err(MprError::MissingColumn(_))
        ));
        assert!(matches!(
            parse_dataset("t,d,d\n1,1,1\n", "t", "d", &hints()),
            Err(MprError::DuplicateColumn(_))
        ));
        assert!(matches!(
            parse_dataset("t,d\n1,0\n2,0\n", "t", "d", &hints()),
            Err(MprError::NoEvents)
        ));
    }

    #[test]
    fn numeric_hint_rejects_empty_and_garbage() {
        let mut h = hints();
        h.insert("age".into(), ColumnKind::Numeric);
        assert!(matches!(
            parse_dataset("t,d,age\n1,1,\n", "t", "d", &h),
            Err(MprError::EmptyNumeric { .. })
        ));
        assert!(matches!(
            parse_dataset("t,d,age\n1,1,old\n", "t", "d", &h),
            Err(MprError::UnparsableNumber { .. })
        ));
    }

    fn treatment_data() -> Dataset {
        let levels = ["P", "S", "C", "R", "CR"];
        let cells: Vec<&str> = (0..20).map(|i| levels[i % 5]).collect();
        Dataset::new(
            (1..=20).map(|i| i as f64).collect(),
            (0..20).map(|i| i % 3 != 0).collect(),
            vec![
                ("treatment".into(), Column::categorical_from_cells(&cells)),
                ("c".into(), Column::Numeric((0..20).map(|i| (i / 10) as f64).collect())),
            ],
        )
        .unwrap()
    }

    #[test]
    fn five_level_factor_gives_four_columns_each() {
        let ds = treatment_data();
        let d: DesignMatrices<f64> =
            encode_design(&ds, &ModelSpec::new(["treatment"], ["treatment"])).unwrap();
        assert_eq!((d.p(), d.q()), (4, 4));
        assert!(d.x.column(0).iter().all(|&v| v == 1.0));
        assert_eq!(d.x_labels[1].to_string(), "treatment[S]");
    }

    #[test]
    fn null_spec_is_intercept_only() {
        let d: DesignMatrices<f64> = encode_design(&treatment_data(), &ModelSpec::null()).unwrap();
        assert_eq!((d.x.ncols(), d.z.ncols()), (1, 1));
        assert_eq!(d.n(), 20);
    }

    #[test]
    fn shape_only_numeric_covariate() {
        let d: DesignMatrices<f64> =
            encode_design(&treatment_data(), &ModelSpec::new(vec![], vec!["c"])).unwrap();
        assert_eq!(d.x.ncols(), 1);
        assert_eq!(d.z.ncols(), 2);
        let want: Vec<f64> = (0..20).map(|i| (i / 10) as f64).collect();
        assert_eq!(d.z.column(1), want);
    }

    #[test]
    fn reference_override_changes_dropped_level() {
        let spec = ModelSpec::new(["treatment"], Vec::<&str>::new()).with_reference("treatment", "R");
        let d: DesignMatrices<f64> = encode_design(&treatment_data(), &spec).unwrap();
        let names: Vec<String> = d.x_labels.iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            ["(Intercept)", "treatment[P]", "treatment[S]", "treatment[C]", "treatment[CR]"]
        );
    }

    #[test]
    fn unknown_term_and_rank_deficiency() {
        let ds = treatment_data();
        assert!(matches!(
            encode_design::<f64>(&ds, &ModelSpec::new(["nope"], Vec::<&str>::new())),
            Err(MprError::UnknownTerm(_))
        ));
        let dup = Dataset::new(
            ds.time().to_vec(),
            ds.status().to_vec(),
            vec![
                ("a".into(), Column::Numeric((0..20).map(|i| i as f64).collect())),
                ("b".into(), Column::Numeric((0..20).map(|i| 2.0 * i as f64 + 3.0).collect())),
            ],
        )
        .unwrap();
        let err = encode_design::<f64>(&dup, &ModelSpec::new(["a", "b"], Vec::<&str>::new())).unwrap_err();
        match err {
            MprError::RankDeficient { component, columns } => {
                assert_eq!(component, "scale");
                assert_eq!(columns.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_roundtrip_keeps_missing() {
        let text = "t,d,who\n1,1,\n2,1,a\n3,0,b\n";
        let ds = parse_dataset(text, "t", "d", &hints()).unwrap();
        let back = parse_dataset(&ds.to_csv("t", "d").unwrap(), "t", "d", &hints()).unwrap();
        assert_eq!(ds, back);
    }
}
