//! Schema-typed tabular data, CSV ingestion and stratified folds.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Records parsed per batch when loading CSV files.
const LOAD_BATCH_ROWS: usize = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {source}")]
    Csv {
        line: u64,
        #[source]
        source: csv::Error,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column '{column}': non-numeric token '{token}'")]
    NonNumeric {
        line: u64,
        column: String,
        token: String,
    },
    #[error("line {line}, column '{column}': non-finite value '{token}'")]
    NonFinite {
        line: u64,
        column: String,
        token: String,
    },
    #[error("line {line}, column '{column}': missing value")]
    MissingValue { line: u64, column: String },
    #[error("line {line}, column '{column}': unknown category '{value}'")]
    UnknownCategory {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: unknown class label '{value}'")]
    UnknownClass { line: u64, value: String },
    #[error("schema line {line}: {message}")]
    SchemaSyntax { line: usize, message: String },
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("dataset has no rows")]
    Empty,
    #[error("at least two class labels are required, found {0}")]
    TooFewClasses(usize),
    #[error("invalid dataset: {0}")]
    Invariant(String),
    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),
    #[error("class '{label}' has {count} examples, fewer than {k} folds")]
    ClassTooSmall {
        label: String,
        count: usize,
        k: usize,
    },
    #[error("fold {fold} out of range for {k} folds")]
    FoldOutOfRange { fold: usize, k: usize },
    #[error("fold assignment covers {found} rows, dataset has {expected}")]
    FoldLengthMismatch { expected: usize, found: usize },
    #[error("fold file line {line}: {message}")]
    FoldSyntax { line: usize, message: String },
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

/// Type of a single attribute column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "categories", rename_all = "lowercase")]
pub enum AttributeKind {
    Continuous,
    Categorical(Vec<String>),
}

impl AttributeKind {
    pub fn is_continuous(&self) -> bool {
        matches!(self, AttributeKind::Continuous)
    }

    /// Number of admissible categories, or `None` for continuous attributes.
    pub fn category_count(&self) -> Option<usize> {
        match self {
            AttributeKind::Continuous => None,
            AttributeKind::Categorical(c) => Some(c.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub index: usize,
    #[serde(flatten)]
    pub kind: AttributeKind,
}

/// Checks index contiguity and categorical list validity.
pub fn validate_schema(schema: &[AttributeSchema]) -> Result<()> {
    for (i, attr) in schema.iter().enumerate() {
        if attr.index != i {
            return Err(DatasetError::InvalidSchema(format!(
                "attribute '{}' has index {}, expected {}",
                attr.name, attr.index, i
            )));
        }
        if let AttributeKind::Categorical(cats) = &attr.kind {
            if cats.is_empty() {
                return Err(DatasetError::InvalidSchema(format!(
                    "categorical attribute '{}' has no categories",
                    attr.name
                )));
            }
            if let Some(dup) = first_duplicate(cats) {
                return Err(DatasetError::InvalidSchema(format!(
                    "categorical attribute '{}' lists '{}' twice",
                    attr.name, dup
                )));
            }
        }
    }
    Ok(())
}

fn first_duplicate(items: &[String]) -> Option<&str> {
    let mut seen = std::collections::HashSet::new();
    items
        .iter()
        .find(|s| !seen.insert(s.as_str()))
        .map(String::as_str)
}

/// One attribute column, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Continuous(Vec<f64>),
    /// Indices into the attribute's category list.
    Categorical(Vec<u32>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Continuous(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Continuous(v) => Column::Continuous(rows.iter().map(|&r| v[r]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&r| v[r]).collect()),
        }
    }
}

/// A single attribute value of an example.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Continuous(f64),
    /// Category index. Indices outside the schema's list are "unseen".
    Categorical(usize),
}

/// Immutable labelled dataset. Rows are stored column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    schema: Vec<AttributeSchema>,
    class_labels: Vec<String>,
    columns: Vec<Column>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(
        schema: Vec<AttributeSchema>,
        class_labels: Vec<String>,
        columns: Vec<Column>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        validate_schema(&schema)?;
        if class_labels.len() < 2 {
            return Err(DatasetError::TooFewClasses(class_labels.len()));
        }
        if let Some(dup) = first_duplicate(&class_labels) {
            return Err(DatasetError::Invariant(format!(
                "class label '{dup}' listed twice"
            )));
        }
        if labels.is_empty() {
            return Err(DatasetError::Empty);
        }
        if columns.len() != schema.len() {
            return Err(DatasetError::Invariant(format!(
                "{} columns for {} attributes",
                columns.len(),
                schema.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_labels.len()) {
            return Err(DatasetError::Invariant(format!(
                "class index {bad} out of range"
            )));
        }
        for (attr, col) in schema.iter().zip(&columns) {
            if col.len() != labels.len() {
                return Err(DatasetError::Invariant(format!(
                    "column '{}' has {} rows, expected {}",
                    attr.name,
                    col.len(),
                    labels.len()
                )));
            }
            match (&attr.kind, col) {
                (AttributeKind::Continuous, Column::Continuous(v)) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(DatasetError::Invariant(format!(
                            "column '{}' holds a non-finite value",
                            attr.name
                        )));
                    }
                }
                (AttributeKind::Categorical(cats), Column::Categorical(v)) => {
                    if v.iter().any(|&c| c as usize >= cats.len()) {
                        return Err(DatasetError::Invariant(format!(
                            "column '{}' holds an unknown category index",
                            attr.name
                        )));
                    }
                }
                _ => {
                    return Err(DatasetError::Invariant(format!(
                        "column '{}' storage does not match its kind",
                        attr.name
                    )))
                }
            }
        }
        Ok(Self {
            schema,
            class_labels,
            columns,
            labels,
        })
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn num_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.schema.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn column(&self, attribute: usize) -> &Column {
        &self.columns[attribute]
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Class index of every row.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Attribute values of one row.
    pub fn row(&self, index: usize) -> Vec<Value> {
        self.columns
            .iter()
            .map(|c| match c {
                Column::Continuous(v) => Value::Continuous(v[index]),
                Column::Categorical(v) => Value::Categorical(v[index] as usize),
            })
            .collect()
    }

    /// Per-class example counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_labels.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// New dataset with the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        Dataset::new(
            self.schema.clone(),
            self.class_labels.clone(),
            self.columns.iter().map(|c| c.select(rows)).collect(),
            rows.iter().map(|&r| self.labels[r]).collect(),
        )
    }

    /// Same schema and labels with the attribute columns replaced.
    pub fn with_columns(&self, columns: Vec<Column>) -> Result<Dataset> {
        Dataset::new(
            self.schema.clone(),
            self.class_labels.clone(),
            columns,
            self.labels.clone(),
        )
    }

    /// Writes the dataset as CSV with the class column last.
    pub fn write_csv<W: Write>(&self, writer: W, header: bool) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        if header {
            let mut names: Vec<&str> = self.schema.iter().map(|a| a.name.as_str()).collect();
            names.push("class");
            out.write_record(&names)?;
        }
        let mut record = Vec::with_capacity(self.schema.len() + 1);
        for row in 0..self.num_rows() {
            record.clear();
            for (attr, col) in self.schema.iter().zip(&self.columns) {
                record.push(match (col, &attr.kind) {
                    (Column::Continuous(v), _) => format!("{}", v[row]),
                    (Column::Categorical(v), AttributeKind::Categorical(cats)) => {
                        cats[v[row] as usize].clone()
                    }
                    _ => unreachable!("column storage checked at construction"),
                });
            }
            record.push(self.class_labels[self.labels[row]].clone());
            out.write_record(&record)?;
        }
        out.flush()
    }
}

/// Role of one CSV column in a schema declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnRole {
    Attribute(AttributeKind),
    /// The class column; labels are inferred (sorted) when not declared.
    Class(Option<Vec<String>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub role: ColumnRole,
}

/// Declaration of CSV column kinds and the class column.
///
/// Text form, one line per column in file order:
///
/// ```text
/// # comment
/// age,continuous
/// colour,categorical,red|green|blue
/// outcome,class,pos|neg
/// ```
///
/// Without a `class` line the class is the last CSV column, after the
/// declared attributes, with labels inferred from the data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaSpec {
    pub columns: Vec<ColumnSpec>,
}

impl SchemaSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut columns = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| DatasetError::SchemaSyntax {
                line: line_no,
                message,
            };
            let mut parts = line.splitn(3, ',').map(str::trim);
            let name = parts.next().unwrap_or_default();
            let kind = parts
                .next()
                .ok_or_else(|| syntax("expected 'name,kind[,values]'".into()))?;
            let values = parts.next().map(|v| {
                v.split('|')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect::<Vec<_>>()
            });
            if name.is_empty() {
                return Err(syntax("empty column name".into()));
            }
            let role = match kind.to_ascii_lowercase().as_str() {
                "continuous" => {
                    if values.is_some() {
                        return Err(syntax("continuous columns take no value list".into()));
                    }
                    ColumnRole::Attribute(AttributeKind::Continuous)
                }
                "categorical" => {
                    let cats = values
                        .filter(|v| !v.is_empty())
                        .ok_or_else(|| syntax("categorical columns need 'a|b|...'".into()))?;
                    ColumnRole::Attribute(AttributeKind::Categorical(cats))
                }
                "class" => ColumnRole::Class(values.filter(|v| !v.is_empty())),
                other => return Err(syntax(format!("unknown kind '{other}'"))),
            };
            columns.push(ColumnSpec {
                name: name.to_string(),
                role,
            });
        }
        let spec = SchemaSpec { columns };
        spec.check()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Schema declaration matching `Dataset::write_csv` output.
    pub fn for_dataset(ds: &Dataset) -> Self {
        let mut columns: Vec<ColumnSpec> = ds
            .schema()
            .iter()
            .map(|a| ColumnSpec {
                name: a.name.clone(),
                role: ColumnRole::Attribute(a.kind.clone()),
            })
            .collect();
        columns.push(ColumnSpec {
            name: "class".into(),
            role: ColumnRole::Class(Some(ds.class_labels().to_vec())),
        });
        SchemaSpec { columns }
    }

    fn check(&self) -> Result<()> {
        let classes = self
            .columns
            .iter()
            .filter(|c| matches!(c.role, ColumnRole::Class(_)))
            .count();
        if classes > 1 {
            return Err(DatasetError::InvalidSchema(
                "more than one class column".into(),
            ));
        }
        if self.attribute_schema().is_empty() {
            return Err(DatasetError::InvalidSchema("no attribute columns".into()));
        }
        validate_schema(&self.attribute_schema())?;
        if let Some(ColumnRole::Class(Some(labels))) = self.class_role() {
            if let Some(dup) = first_duplicate(labels) {
                return Err(DatasetError::InvalidSchema(format!(
                    "class label '{dup}' listed twice"
                )));
            }
        }
        Ok(())
    }

    fn class_role(&self) -> Option<&ColumnRole> {
        self.columns
            .iter()
            .map(|c| &c.role)
            .find(|r| matches!(r, ColumnRole::Class(_)))
    }

    /// Position of the class column within a CSV record.
    pub fn class_position(&self) -> usize {
        self.columns
            .iter()
            .position(|c| matches!(c.role, ColumnRole::Class(_)))
            .unwrap_or(self.columns.len())
    }

    /// Number of fields every CSV record must have.
    pub fn record_width(&self) -> usize {
        match self.class_role() {
            Some(_) => self.columns.len(),
            None => self.columns.len() + 1,
        }
    }

    /// Declared class labels, if any.
    pub fn class_labels(&self) -> Option<&[String]> {
        match self.class_role() {
            Some(ColumnRole::Class(Some(labels))) => Some(labels),
            _ => None,
        }
    }

    pub fn attribute_schema(&self) -> Vec<AttributeSchema> {
        self.columns
            .iter()
            .filter_map(|c| match &c.role {
                ColumnRole::Attribute(kind) => Some((c.name.clone(), kind.clone())),
                ColumnRole::Class(_) => None,
            })
            .enumerate()
            .map(|(index, (name, kind))| AttributeSchema { name, index, kind })
            .collect()
    }
}

impl fmt::Display for SchemaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.columns {
            match &c.role {
                ColumnRole::Attribute(AttributeKind::Continuous) => {
                    writeln!(f, "{},continuous", c.name)?
                }
                ColumnRole::Attribute(AttributeKind::Categorical(cats)) => {
                    writeln!(f, "{},categorical,{}", c.name, cats.join("|"))?
                }
                ColumnRole::Class(None) => writeln!(f, "{},class", c.name)?,
                ColumnRole::Class(Some(labels)) => {
                    writeln!(f, "{},class,{}", c.name, labels.join("|"))?
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CsvOptions {
    /// Skip the first line as a header.
    pub has_header: bool,
}

/// A parsed record before class labels are resolved.
struct ParsedRow {
    values: Vec<ParsedValue>,
    class: String,
    line: u64,
}

#[derive(Clone, Copy)]
enum ParsedValue {
    Num(f64),
    Cat(u32),
}

/// Loads a CSV file, typing columns according to `spec`. Row order is kept.
pub fn load_csv(path: &Path, spec: &SchemaSpec, options: CsvOptions) -> Result<Dataset> {
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(BufReader::new(file), spec, options)
}

pub fn read_csv<R: Read>(reader: R, spec: &SchemaSpec, options: CsvOptions) -> Result<Dataset> {
    let schema = spec.attribute_schema();
    let class_pos = spec.class_position();
    let width = spec.record_width();

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows: Vec<ParsedRow> = Vec::new();
    let mut batch: Vec<csv::StringRecord> = Vec::with_capacity(LOAD_BATCH_ROWS);
    let mut records = rdr.records();
    loop {
        batch.clear();
        for rec in records.by_ref().take(LOAD_BATCH_ROWS) {
            let rec = rec.map_err(|source| DatasetError::Csv {
                line: source.position().map_or(0, |p| p.line()),
                source,
            })?;
            // blank lines are skipped by the csv reader
            batch.push(rec);
        }
        if batch.is_empty() {
            break;
        }
        let parsed: Vec<Result<ParsedRow>> = batch
            .par_iter()
            .map(|rec| parse_record(rec, &schema, class_pos, width))
            .collect();
        for row in parsed {
            rows.push(row?);
        }
        if batch.len() < LOAD_BATCH_ROWS {
            break;
        }
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }

    let class_labels = match spec.class_labels() {
        Some(declared) => declared.to_vec(),
        None => {
            let mut labels: Vec<String> = rows.iter().map(|r| r.class.clone()).collect();
            labels.sort();
            labels.dedup();
            labels
        }
    };
    let lookup: std::collections::HashMap<&str, usize> = class_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let mut labels = Vec::with_capacity(rows.len());
    for r in &rows {
        match lookup.get(r.class.as_str()) {
            Some(&i) => labels.push(i),
            None => {
                return Err(DatasetError::UnknownClass {
                    line: r.line,
                    value: r.class.clone(),
                })
            }
        }
    }

    let columns = schema
        .iter()
        .map(|attr| match attr.kind {
            AttributeKind::Continuous => Column::Continuous(
                rows.iter()
                    .map(|r| match r.values[attr.index] {
                        ParsedValue::Num(x) => x,
                        ParsedValue::Cat(_) => unreachable!(),
                    })
                    .collect(),
            ),
            AttributeKind::Categorical(_) => Column::Categorical(
                rows.iter()
                    .map(|r| match r.values[attr.index] {
                        ParsedValue::Cat(c) => c,
                        ParsedValue::Num(_) => unreachable!(),
                    })
                    .collect(),
            ),
        })
        .collect();

    Dataset::new(schema, class_labels, columns, labels)
}

fn parse_record(
    rec: &csv::StringRecord,
    schema: &[AttributeSchema],
    class_pos: usize,
    width: usize,
) -> Result<ParsedRow> {
    let line = rec.position().map_or(0, |p| p.line());
    if rec.len() != width {
        return Err(DatasetError::RaggedRow {
            line,
            expected: width,
            found: rec.len(),
        });
    }
    let mut values = Vec::with_capacity(schema.len());
    let mut attrs = schema.iter();
    let mut class = String::new();
    for (pos, token) in rec.iter().enumerate() {
        if pos == class_pos {
            class = token.to_string();
            continue;
        }
        let attr = attrs.next().expect("record width checked");
        if token.is_empty() {
            return Err(DatasetError::MissingValue {
                line,
                column: attr.name.clone(),
            });
        }
        values.push(match &attr.kind {
            AttributeKind::Continuous => {
                let x: f64 = token.parse().map_err(|_| DatasetError::NonNumeric {
                    line,
                    column: attr.name.clone(),
                    token: token.to_string(),
                })?;
                if !x.is_finite() {
                    return Err(DatasetError::NonFinite {
                        line,
                        column: attr.name.clone(),
                        token: token.to_string(),
                    });
                }
                ParsedValue::Num(x)
            }
            AttributeKind::Categorical(cats) => match cats.iter().position(|c| c == token) {
                Some(i) => ParsedValue::Cat(i as u32),
                None => {
                    return Err(DatasetError::UnknownCategory {
                        line,
                        column: attr.name.clone(),
                        value: token.to_string(),
                    })
                }
            },
        });
    }
    if class.is_empty() {
        return Err(DatasetError::MissingValue {
            line,
            column: "class".into(),
        });
    }
    Ok(ParsedRow {
        values,
        class,
        line,
    })
}

/// Fold index per row for k-fold cross-validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldAssignment {
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(DatasetError::InvalidFoldCount(k));
        }
        if let Some(&fold) = assignment.iter().find(|&&f| f >= k) {
            return Err(DatasetError::FoldOutOfRange { fold, k });
        }
        Ok(Self { k, assignment })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Row indices assigned to `fold`, ascending.
    pub fn rows_in(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// Writes `row_index,fold` lines after a header line.
    pub fn write_to<W: Write>(&self, mut writer: W) -> io::Result<()> {
        writeln!(writer, "row_index,fold")?;
        for (i, f) in self.assignment.iter().enumerate() {
            writeln!(writer, "{i},{f}")?;
        }
        Ok(())
    }

    /// Reads the format produced by [`FoldAssignment::write_to`].
    pub fn read_from<R: BufRead>(reader: R, k: usize) -> Result<Self> {
        let mut assignment = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|source| DatasetError::Io {
                path: PathBuf::from("<fold assignment>"),
                source,
            })?;
            let line = line.trim();
            if line.is_empty() || (line_no == 1 && line == "row_index,fold") {
                continue;
            }
            let syntax = |message: &str| DatasetError::FoldSyntax {
                line: line_no,
                message: message.to_string(),
            };
            let (row, fold) = line
                .split_once(',')
                .ok_or_else(|| syntax("expected 'row_index,fold'"))?;
            let row: usize = row.trim().parse().map_err(|_| syntax("bad row index"))?;
            let fold: usize = fold.trim().parse().map_err(|_| syntax("bad fold"))?;
            if row != assignment.len() {
                return Err(syntax("row indices must be consecutive from 0"));
            }
            assignment.push(fold);
        }
        Self::new(k, assignment)
    }
}

/// Seeded per-class shuffle followed by round-robin dealing into `k` folds.
///
/// The deal continues across classes from where the previous class stopped,
/// which also balances total fold sizes. The result depends only on the
/// class sequence, `k` and `seed`.
pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    stratified_folds_for_labels(ds.labels(), ds.class_labels(), k, seed)
}

pub fn stratified_folds_for_labels(
    labels: &[usize],
    class_labels: &[String],
    k: usize,
    seed: u64,
) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(DatasetError::InvalidFoldCount(k));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); class_labels.len()];
    for (row, &label) in labels.iter().enumerate() {
        by_class[label].push(row);
    }
    for (label, rows) in class_labels.iter().zip(&by_class) {
        // Declared labels absent from the data do not constrain the folds.
        if !rows.is_empty() && rows.len() < k {
            return Err(DatasetError::ClassTooSmall {
                label: label.clone(),
                count: rows.len(),
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for rows in &mut by_class {
        rows.shuffle(&mut rng);
        for &row in rows.iter() {
            assignment[row] = next;
            next = (next + 1) % k;
        }
    }
    FoldAssignment::new(k, assignment)
}

/// Splits into (train, test) with `test_fold` held out. Row order is kept.
pub fn split_by_fold(
    ds: &Dataset,
    folds: &FoldAssignment,
    test_fold: usize,
) -> Result<(Dataset, Dataset)> {
    if test_fold >= folds.k() {
        return Err(DatasetError::FoldOutOfRange {
            fold: test_fold,
            k: folds.k(),
        });
    }
    if folds.assignment().len() != ds.num_rows() {
        return Err(DatasetError::FoldLengthMismatch {
            expected: ds.num_rows(),
            found: folds.assignment().len(),
        });
    }
    let (test, train): (Vec<usize>, Vec<usize>) =
        (0..ds.num_rows()).partition(|&i| folds.assignment()[i] == test_fold);
    Ok((ds.subset(&train)?, ds.subset(&test)?))
}
