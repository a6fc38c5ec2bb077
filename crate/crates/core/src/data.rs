//! Co-culture dataset schema, label rules, CSV ingestion/export and splitting.
//!
//! Records are canonicalized so that `species_x < species_y`; both one-way
//! labels live on the single canonical record. Species ids follow the order of
//! the phylogeny header, condition ids the order of first appearance.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{self, Stream};

/// Tolerance for phylogeny symmetry and zero-diagonal checks.
pub const PHYLO_TOLERANCE: f64 = 1e-9;

pub const RECORD_COLUMNS: [&str; 11] = [
    "species_x",
    "species_y",
    "condition",
    "monoGrow_x",
    "monoGrow_y",
    "monoGrow24_x",
    "monoGrow24_y",
    "coYield_x",
    "coYield_y",
    "label_xy",
    "label_yx",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpeciesId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionId(pub usize);

/// Sign of a one-way effect. Class index 0 is `Negative`, the majority class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignLabel {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "+")]
    Positive,
}

impl SignLabel {
    pub const ALL: [SignLabel; 2] = [SignLabel::Negative, SignLabel::Positive];

    pub fn class_index(self) -> usize {
        match self {
            SignLabel::Negative => 0,
            SignLabel::Positive => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SignLabel::Negative => "-",
            SignLabel::Positive => "+",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "+" => Some(SignLabel::Positive),
            "-" => Some(SignLabel::Negative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwoWayLabel {
    Mutualism,
    Competition,
    Parasitism,
}

impl TwoWayLabel {
    pub const ALL: [TwoWayLabel; 3] = [
        TwoWayLabel::Mutualism,
        TwoWayLabel::Competition,
        TwoWayLabel::Parasitism,
    ];

    pub fn class_index(self) -> usize {
        match self {
            TwoWayLabel::Mutualism => 0,
            TwoWayLabel::Competition => 1,
            TwoWayLabel::Parasitism => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TwoWayLabel::Mutualism => "mutualism",
            TwoWayLabel::Competition => "competition",
            TwoWayLabel::Parasitism => "parasitism",
        }
    }
}

/// One pairwise co-culture experiment under one carbon condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocultureRecord {
    pub species_x: SpeciesId,
    pub species_y: SpeciesId,
    pub condition: ConditionId,
    pub mono_grow_x: f64,
    pub mono_grow_y: f64,
    pub mono_grow24_x: f64,
    pub mono_grow24_y: f64,
    pub co_yield_x: Option<f64>,
    pub co_yield_y: Option<f64>,
    /// Effect of y on x.
    pub label_xy: SignLabel,
    /// Effect of x on y.
    pub label_yx: SignLabel,
}

impl CocultureRecord {
    pub fn two_way(&self) -> TwoWayLabel {
        derive_two_way(self.label_xy, self.label_yx)
    }

    fn swapped(&self) -> Self {
        Self {
            species_x: self.species_y,
            species_y: self.species_x,
            condition: self.condition,
            mono_grow_x: self.mono_grow_y,
            mono_grow_y: self.mono_grow_x,
            mono_grow24_x: self.mono_grow24_y,
            mono_grow24_y: self.mono_grow24_x,
            co_yield_x: self.co_yield_y,
            co_yield_y: self.co_yield_x,
            label_xy: self.label_yx,
            label_yx: self.label_xy,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    species_names: Vec<String>,
    condition_names: Vec<String>,
    records: Vec<CocultureRecord>,
    mono_profile: Matrix,
    mono24_profile: Matrix,
    phylo_distance: Matrix,
}

impl Dataset {
    /// Validates and canonicalizes records and derives the species × condition
    /// monoculture profiles. Profile cells no record covers are left at zero.
    pub fn new(
        species_names: Vec<String>,
        condition_names: Vec<String>,
        records: Vec<CocultureRecord>,
        phylo_distance: Matrix,
    ) -> Result<Self> {
        let s = species_names.len();
        let c = condition_names.len();
        if phylo_distance.shape() != (s, s) {
            return Err(Error::shape(
                format!("{s}x{s} phylogeny"),
                format!("{:?}", phylo_distance.shape()),
            ));
        }
        check_phylo(&phylo_distance)?;

        let mut seen = HashSet::new();
        let mut mono = Matrix::zeros(s, c);
        let mut mono24 = Matrix::zeros(s, c);
        let mut covered = vec![false; s * c];
        let mut canonical = Vec::with_capacity(records.len());

        for (i, rec) in records.into_iter().enumerate() {
            let rec = if rec.species_x > rec.species_y {
                rec.swapped()
            } else {
                rec
            };
            let line = i + 2;
            if rec.species_x == rec.species_y {
                return Err(Error::MalformedRow {
                    line,
                    reason: "species_x equals species_y".into(),
                });
            }
            if rec.species_y.0 >= s {
                return Err(Error::UnknownSpecies(format!("#{}", rec.species_y.0)));
            }
            if rec.condition.0 >= c {
                return Err(Error::UnknownCondition(format!("#{}", rec.condition.0)));
            }
            let yields = [
                rec.mono_grow_x,
                rec.mono_grow_y,
                rec.mono_grow24_x,
                rec.mono_grow24_y,
            ];
            let optional = [rec.co_yield_x, rec.co_yield_y];
            for v in yields.into_iter().chain(optional.into_iter().flatten()) {
                if !v.is_finite() {
                    return Err(Error::MalformedRow {
                        line,
                        reason: format!("non-finite yield {v}"),
                    });
                }
                if v < 0.0 {
                    return Err(Error::NegativeYield(v));
                }
            }
            if !seen.insert((rec.species_x, rec.species_y, rec.condition)) {
                return Err(Error::DuplicatePair {
                    species_x: species_names[rec.species_x.0].clone(),
                    species_y: species_names[rec.species_y.0].clone(),
                    condition: condition_names[rec.condition.0].clone(),
                });
            }
            for (sp, m, m24) in [
                (rec.species_x, rec.mono_grow_x, rec.mono_grow24_x),
                (rec.species_y, rec.mono_grow_y, rec.mono_grow24_y),
            ] {
                let cell = sp.0 * c + rec.condition.0;
                let idx = (sp.0, rec.condition.0);
                if covered[cell] {
                    if mono[idx] != m || mono24[idx] != m24 {
                        return Err(Error::InconsistentProfile {
                            species: species_names[sp.0].clone(),
                            condition: condition_names[rec.condition.0].clone(),
                        });
                    }
                } else {
                    covered[cell] = true;
                    mono[idx] = m;
                    mono24[idx] = m24;
                }
            }
            canonical.push(rec);
        }

        Ok(Self {
            species_names,
            condition_names,
            records: canonical,
            mono_profile: mono,
            mono24_profile: mono24,
            phylo_distance,
        })
    }

    /// Re-derives one-way labels from co-culture yields at a new threshold.
    /// Records without yields keep their labels.
    pub fn relabel(&self, epsilon: f64) -> Result<Self> {
        let mut out = self.clone();
        for r in &mut out.records {
            if let Some(co) = r.co_yield_x {
                r.label_xy = label_one_way(r.mono_grow_x, co, epsilon)?;
            }
            if let Some(co) = r.co_yield_y {
                r.label_yx = label_one_way(r.mono_grow_y, co, epsilon)?;
            }
        }
        Ok(out)
    }

    pub fn species_count(&self) -> usize {
        self.species_names.len()
    }

    pub fn condition_count(&self) -> usize {
        self.condition_names.len()
    }

    pub fn records(&self) -> &[CocultureRecord] {
        &self.records
    }

    pub fn species_names(&self) -> &[String] {
        &self.species_names
    }

    pub fn condition_names(&self) -> &[String] {
        &self.condition_names
    }

    /// Species × condition monoculture yields.
    pub fn mono_profile(&self) -> &Matrix {
        &self.mono_profile
    }

    /// Species × condition 24-hour monoculture yields.
    pub fn mono24_profile(&self) -> &Matrix {
        &self.mono24_profile
    }

    pub fn phylo_distance(&self) -> &Matrix {
        &self.phylo_distance
    }

    /// Count of records per two-way class, in `TwoWayLabel::ALL` order.
    pub fn two_way_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for r in &self.records {
            counts[r.two_way().class_index()] += 1;
        }
        counts
    }

    pub fn write_records_csv<W: Write>(&self, out: W, comment: Option<&str>) -> Result<()> {
        let mut out = out;
        if let Some(c) = comment {
            writeln!(out, "# {c}").map_err(|e| Error::io("<records>", e))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RECORD_COLUMNS)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                self.species_names[r.species_x.0].clone(),
                self.species_names[r.species_y.0].clone(),
                self.condition_names[r.condition.0].clone(),
                r.mono_grow_x.to_string(),
                r.mono_grow_y.to_string(),
                r.mono_grow24_x.to_string(),
                r.mono_grow24_y.to_string(),
                opt(r.co_yield_x),
                opt(r.co_yield_y),
                r.label_xy.symbol().to_string(),
                r.label_yx.symbol().to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<records>", e))?;
        Ok(())
    }

    pub fn write_phylo_csv<W: Write>(&self, out: W, comment: Option<&str>) -> Result<()> {
        let mut out = out;
        if let Some(c) = comment {
            writeln!(out, "# {c}").map_err(|e| Error::io("<phylo>", e))?;
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.species_names.iter().cloned());
        w.write_record(&header)?;
        for (i, name) in self.species_names.iter().enumerate() {
            let mut row = vec![name.clone()];
            row.extend(self.phylo_distance.row(i).iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<phylo>", e))?;
        Ok(())
    }
}

fn check_phylo(d: &Matrix) -> Result<()> {
    let n = d.rows();
    for i in 0..n {
        if !d[(i, i)].is_finite() || d[(i, i)].abs() > PHYLO_TOLERANCE {
            return Err(Error::MalformedRow {
                line: i + 2,
                reason: format!("phylogenetic self-distance {} is not zero", d[(i, i)]),
            });
        }
        for j in (i + 1)..n {
            let (a, b) = (d[(i, j)], d[(j, i)]);
            if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
                return Err(Error::MalformedRow {
                    line: i + 2,
                    reason: "phylogenetic distances must be finite and nonnegative".into(),
                });
            }
            if (a - b).abs() > PHYLO_TOLERANCE {
                return Err(Error::AsymmetricPhylo {
                    row: i,
                    col: j,
                    forward: a,
                    backward: b,
                });
            }
        }
    }
    Ok(())
}

/// Sign of the effect of a partner on a focal species' yield.
///
/// Positive only when the co-culture yield exceeds the monoculture yield by
/// more than `epsilon`; ties go to `Negative`.
pub fn label_one_way(mono_yield: f64, co_yield: f64, epsilon: f64) -> Result<SignLabel> {
    if mono_yield < 0.0 {
        return Err(Error::NegativeYield(mono_yield));
    }
    if co_yield < 0.0 {
        return Err(Error::NegativeYield(co_yield));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    Ok(if co_yield - mono_yield > epsilon {
        SignLabel::Positive
    } else {
        SignLabel::Negative
    })
}

/// (+,+) mutualism, (−,−) competition, mixed signs parasitism.
pub fn derive_two_way(sign_xy: SignLabel, sign_yx: SignLabel) -> TwoWayLabel {
    use SignLabel::*;
    match (sign_xy, sign_yx) {
        (Positive, Positive) => TwoWayLabel::Mutualism,
        (Negative, Negative) => TwoWayLabel::Competition,
        (Positive, Negative) | (Negative, Positive) => TwoWayLabel::Parasitism,
    }
}

/// Disjoint train/test masks over `n` items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<bool>,
    pub test: Vec<bool>,
}

impl Split {
    pub fn train_count(&self) -> usize {
        self.train.iter().filter(|&&b| b).count()
    }

    pub fn test_count(&self) -> usize {
        self.test.iter().filter(|&&b| b).count()
    }
}

/// Seeded Fisher–Yates shuffle of `0..n` whose first `round(fraction·n)`
/// entries form the training set.
pub fn split_train_test(n: usize, train_fraction: f64, seed: u64) -> Result<Split> {
    if !train_fraction.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "train_fraction must be finite, got {train_fraction}"
        )));
    }
    let n_train = (train_fraction * n as f64).round().clamp(0.0, n as f64) as usize;
    if n < 2 || n_train == 0 || n_train == n {
        return Err(Error::DegenerateSplit {
            n,
            train: n_train,
            test: n.saturating_sub(n_train),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, Stream::Split));
    let mut train = vec![false; n];
    for &i in &order[..n_train] {
        train[i] = true;
    }
    let test = train.iter().map(|&t| !t).collect();
    Ok(Split { train, test })
}

/// Reads the records and phylogeny CSVs into a [`Dataset`].
///
/// Lines starting with `#` are ignored. When co-culture yields are present
/// the corresponding label is derived with [`label_one_way`]; a label column
/// that contradicts the derived sign is rejected.
pub fn ingest_csv<R1: Read, R2: Read>(records: R1, phylo: R2, epsilon: f64) -> Result<Dataset> {
    let (species_names, phylo_distance) = read_phylo(phylo)?;
    let species_index: HashMap<&str, usize> = species_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(records);

    let header = rdr.headers()?.clone();
    let width = header.len();
    let header_line = header.position().map_or(1, |p| p.line() as usize);
    if !(width == 9 || width == 11)
        || header
            .iter()
            .zip(RECORD_COLUMNS.iter())
            .any(|(got, want)| got != *want)
    {
        return Err(Error::MalformedRow {
            line: header_line,
            reason: format!(
                "header must be the first 9 or 11 of {}",
                RECORD_COLUMNS.join(",")
            ),
        });
    }

    let mut condition_names: Vec<String> = Vec::new();
    let mut condition_index: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::new();

    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let bad = |reason: String| Error::MalformedRow { line, reason };
        if row.len() != width {
            return Err(bad(format!("expected {width} columns, found {}", row.len())));
        }
        let species = |col: usize| -> Result<SpeciesId> {
            species_index
                .get(&row[col])
                .map(|&i| SpeciesId(i))
                .ok_or_else(|| Error::UnknownSpecies(row[col].to_string()))
        };
        let species_x = species(0)?;
        let species_y = species(1)?;
        if species_x == species_y {
            return Err(bad(format!("self-pair `{}`", &row[0])));
        }
        let cond_name = row[2].to_string();
        if cond_name.is_empty() {
            return Err(bad("empty condition".into()));
        }
        let condition = match condition_index.get(&cond_name) {
            Some(&c) => ConditionId(c),
            None => {
                let c = condition_names.len();
                condition_index.insert(cond_name.clone(), c);
                condition_names.push(cond_name);
                ConditionId(c)
            }
        };

        let number = |col: usize| -> Result<Option<f64>> {
            let cell = &row[col];
            if cell.is_empty() {
                return Ok(None);
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| bad(format!("{} is not numeric: `{cell}`", RECORD_COLUMNS[col])))?;
            if !v.is_finite() || v < 0.0 {
                return Err(bad(format!(
                    "{} must be a finite nonnegative yield, got {v}",
                    RECORD_COLUMNS[col]
                )));
            }
            Ok(Some(v))
        };
        let required = |col: usize| -> Result<f64> {
            number(col)?.ok_or_else(|| bad(format!("missing {}", RECORD_COLUMNS[col])))
        };

        let mono_grow_x = required(3)?;
        let mono_grow_y = required(4)?;
        let mono_grow24_x = required(5)?;
        let mono_grow24_y = required(6)?;
        let co_yield_x = number(7)?;
        let co_yield_y = number(8)?;

        let given = |col: usize| -> Result<Option<SignLabel>> {
            if col >= width || row[col].is_empty() {
                return Ok(None);
            }
            SignLabel::parse(&row[col])
                .map(Some)
                .ok_or_else(|| bad(format!("{} must be + or -", RECORD_COLUMNS[col])))
        };
        let resolve = |mono: f64, co: Option<f64>, label_col: usize| -> Result<SignLabel> {
            let stated = given(label_col)?;
            match (co, stated) {
                (Some(co), stated) => {
                    let derived = label_one_way(mono, co, epsilon)?;
                    if stated.is_some_and(|s| s != derived) {
                        return Err(bad(format!(
                            "{} contradicts the co-culture yield",
                            RECORD_COLUMNS[label_col]
                        )));
                    }
                    Ok(derived)
                }
                (None, Some(s)) => Ok(s),
                (None, None) => Err(bad(format!(
                    "neither a co-culture yield nor {} given",
                    RECORD_COLUMNS[label_col]
                ))),
            }
        };
        let label_xy = resolve(mono_grow_x, co_yield_x, 9)?;
        let label_yx = resolve(mono_grow_y, co_yield_y, 10)?;

        out.push(CocultureRecord {
            species_x,
            species_y,
            condition,
            mono_grow_x,
            mono_grow_y,
            mono_grow24_x,
            mono_grow24_y,
            co_yield_x,
            co_yield_y,
            label_xy,
            label_yx,
        });
    }

    Dataset::new(species_names, condition_names, out, phylo_distance)
}

fn read_phylo<R: Read>(phylo: R) -> Result<(Vec<String>, Matrix)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(phylo);
    let header = rdr.headers()?.clone();
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let s = names.len();
    if s < 2 {
        return Err(Error::MalformedRow {
            line: 1,
            reason: "phylogeny needs at least two species".into(),
        });
    }
    let unique: HashSet<&String> = names.iter().collect();
    if unique.len() != s || names.iter().any(|n| n.is_empty()) {
        return Err(Error::MalformedRow {
            line: 1,
            reason: "phylogeny species names must be unique and non-empty".into(),
        });
    }

    let mut data = Vec::with_capacity(s * s);
    let mut rows = 0;
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if rows >= s {
            return Err(Error::MalformedRow {
                line,
                reason: format!("phylogeny has more than {s} rows"),
            });
        }
        if row.len() != s + 1 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected {} columns, found {}", s + 1, row.len()),
            });
        }
        if row[0] != names[rows] {
            return Err(Error::MalformedRow {
                line,
                reason: format!("row `{}` out of order, expected `{}`", &row[0], names[rows]),
            });
        }
        for cell in row.iter().skip(1) {
            let v: f64 = cell.parse().map_err(|_| Error::MalformedRow {
                line,
                reason: format!("phylogenetic distance `{cell}` is not numeric"),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    if rows != s {
        return Err(Error::MalformedRow {
            line: rows + 2,
            reason: format!("phylogeny has {rows} rows for {s} species"),
        });
    }
    let m = Matrix::from_vec(s, s, data)?;
    check_phylo(&m)?;
    Ok((names, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER9: &str = "species_x,species_y,condition,monoGrow_x,monoGrow_y,monoGrow24_x,monoGrow24_y,coYield_x,coYield_y";
    const PHYLO2: &str = ",A,B\nA,0,0\nB,0,0\n";

    fn ingest(records: &str, phylo: &str) -> Result<Dataset> {
        ingest_csv(records.as_bytes(), phylo.as_bytes(), 0.0)
    }

    #[test]
    fn minimal_record_ingests() {
        let csv = format!("{HEADER9}\nA,B,cond0,1.0,2.0,0.5,0.8,1.5,1.9\n");
        let ds = ingest(&csv, PHYLO2).unwrap();
        assert_eq!(ds.species_count(), 2);
        assert_eq!(ds.condition_count(), 1);
        assert_eq!(ds.records().len(), 1);
        let r = &ds.records()[0];
        assert_eq!(r.label_xy, SignLabel::Positive);
        assert_eq!(r.label_yx, SignLabel::Negative);
        assert_eq!(ds.mono_profile()[(1, 0)], 2.0);
    }

    #[test]
    fn self_pair_is_malformed() {
        let csv = format!("{HEADER9}\nA,A,cond0,1.0,2.0,0.5,0.8,1.5,1.9\n");
        assert!(matches!(ingest(&csv, PHYLO2), Err(Error::MalformedRow { line: 2, .. })));
    }

    #[test]
    fn ingestion_errors() {
        let wrong_cols = format!("{HEADER9}\nA,B,cond0,1.0,2.0,0.5,0.8\n");
        assert!(matches!(ingest(&wrong_cols, PHYLO2), Err(Error::MalformedRow { .. })));

        let non_numeric = format!("{HEADER9}\nA,B,cond0,x,2.0,0.5,0.8,1.5,1.9\n");
        assert!(matches!(ingest(&non_numeric, PHYLO2), Err(Error::MalformedRow { .. })));

        let dup = format!(
            "{HEADER9}\nA,B,cond0,1.0,2.0,0.5,0.8,1.5,1.9\nB,A,cond0,2.0,1.0,0.8,0.5,1.9,1.5\n"
        );
        assert!(matches!(ingest(&dup, PHYLO2), Err(Error::DuplicatePair { .. })));

        let unknown = format!("{HEADER9}\nA,C,cond0,1.0,2.0,0.5,0.8,1.5,1.9\n");
        assert!(matches!(ingest(&unknown, PHYLO2), Err(Error::UnknownSpecies(s)) if s == "C"));

        let asym = ",A,B\nA,0,1\nB,1.5,0\n";
        let ok = format!("{HEADER9}\nA,B,cond0,1.0,2.0,0.5,0.8,1.5,1.9\n");
        assert!(matches!(ingest(&ok, asym), Err(Error::AsymmetricPhylo { .. })));

        let missing = format!("{HEADER9}\nA,B,cond0,,2.0,0.5,0.8,1.5,1.9\n");
        assert!(matches!(ingest(&missing, PHYLO2), Err(Error::MalformedRow { .. })));
    }

    #[test]
    fn reversed_pair_is_canonicalized() {
        let csv = format!("{HEADER9}\nB,A,cond0,2.0,1.0,0.8,0.5,1.9,1.5\n");
        let ds = ingest(&csv, PHYLO2).unwrap();
        let r = &ds.records()[0];
        assert_eq!((r.species_x, r.species_y), (SpeciesId(0), SpeciesId(1)));
        assert_eq!(r.mono_grow_x, 1.0);
        assert_eq!(r.label_xy, SignLabel::Positive);
    }

    #[test]
    fn explicit_labels_and_contradictions() {
        let header = RECORD_COLUMNS.join(",");
        let labels_only = format!("{header}\nA,B,c,1,1,1,1,,,+,-\n");
        let ds = ingest(&labels_only, PHYLO2).unwrap();
        assert_eq!(ds.records()[0].two_way(), TwoWayLabel::Parasitism);

        let contradiction = format!("{header}\nA,B,c,1,1,1,1,2,0.5,-,-\n");
        assert!(matches!(ingest(&contradiction, PHYLO2), Err(Error::MalformedRow { .. })));

        let unlabeled = format!("{header}\nA,B,c,1,1,1,1,,,,\n");
        assert!(matches!(ingest(&unlabeled, PHYLO2), Err(Error::MalformedRow { .. })));
    }

    #[test]
    fn inconsistent_monoculture_rejected() {
        let phylo = ",A,B,C\nA,0,1,2\nB,1,0,2\nC,2,2,0\n";
        let csv = format!("{HEADER9}\nA,B,c,1,1,1,1,1,1\nA,C,c,3,1,1,1,1,1\n");
        assert!(matches!(ingest(&csv, phylo), Err(Error::InconsistentProfile { .. })));
    }

    #[test]
    fn one_way_rule() {
        assert_eq!(label_one_way(1.0, 1.5, 0.0).unwrap(), SignLabel::Positive);
        assert_eq!(label_one_way(1.0, 1.0, 0.0).unwrap(), SignLabel::Negative);
        assert_eq!(label_one_way(2.0, 1.2, 0.05).unwrap(), SignLabel::Negative);
        assert_eq!(label_one_way(1.0, 1.04, 0.05).unwrap(), SignLabel::Negative);
        assert!(matches!(label_one_way(-1.0, 1.0, 0.0), Err(Error::NegativeYield(_))));
        assert!(matches!(label_one_way(1.0, -0.1, 0.0), Err(Error::NegativeYield(_))));
    }

    #[test]
    fn two_way_taxonomy() {
        use SignLabel::*;
        assert_eq!(derive_two_way(Positive, Positive), TwoWayLabel::Mutualism);
        assert_eq!(derive_two_way(Negative, Negative), TwoWayLabel::Competition);
        assert_eq!(derive_two_way(Negative, Positive), TwoWayLabel::Parasitism);
        assert_eq!(derive_two_way(Positive, Negative), TwoWayLabel::Parasitism);
        for a in SignLabel::ALL {
            for b in SignLabel::ALL {
                assert_eq!(derive_two_way(a, b), derive_two_way(b, a));
            }
        }
    }

    #[test]
    fn split_cardinality_and_determinism() {
        let s = split_train_test(10, 0.8, 1).unwrap();
        assert_eq!((s.train_count(), s.test_count()), (8, 2));
        assert!(s.train.iter().zip(&s.test).all(|(a, b)| a ^ b));
        assert_eq!(s, split_train_test(10, 0.8, 1).unwrap());

        let big = split_train_test(7600, 0.8, 42).unwrap();
        assert_eq!((big.train_count(), big.test_count()), (6080, 1520));
    }

    #[test]
    fn degenerate_splits() {
        assert!(matches!(split_train_test(10, 1.0, 1), Err(Error::DegenerateSplit { .. })));
        assert!(matches!(split_train_test(10, 0.01, 1), Err(Error::DegenerateSplit { .. })));
        assert!(matches!(split_train_test(1, 0.5, 1), Err(Error::DegenerateSplit { .. })));
    }
}
