//! The 13-slot per-interaction feature vector and its standardization.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::{CocultureRecord, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pca::{pca_fit, pca_project, PcaModel};

pub const FEATURE_DIM: usize = 13;

pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "monoGrow_x",
    "monoGrow_y",
    "monoGrow24_x",
    "monoGrow24_y",
    "metDis",
    "carbon_component_0",
    "carbon_component_1",
    "carbon_component_2",
    "carbon_component_3",
    "phy_strain_component_0_x",
    "phy_strain_component_1_x",
    "phy_strain_component_0_y",
    "phy_strain_component_1_y",
];

pub const PHYLO_VARIANCE: f64 = 0.95;
pub const PHYLO_COMPONENTS: usize = 2;
pub const CARBON_VARIANCE: f64 = 0.90;
pub const CARBON_COMPONENTS: usize = 4;

/// Lower bound on a fitted standard deviation.
pub const STD_FLOOR: f64 = 1e-12;

/// Slot permutation taking an XY vector to its YX counterpart.
pub const SWAP_PERMUTATION: [usize; FEATURE_DIM] = [1, 0, 3, 2, 4, 5, 6, 7, 8, 11, 12, 9, 10];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn values(&self) -> &[f64; FEATURE_DIM] {
        &self.0
    }

    /// Applies [`SWAP_PERMUTATION`].
    pub fn swapped(&self) -> Self {
        let mut out = [0.0; FEATURE_DIM];
        for (slot, &src) in SWAP_PERMUTATION.iter().enumerate() {
            out[slot] = self.0[src];
        }
        FeatureVector(out)
    }
}

/// Which species of a record plays the focal (`_x`) role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    XY,
    YX,
}

pub fn metabolic_dissimilarity(profile_x: &[f64], profile_y: &[f64]) -> Result<f64> {
    if profile_x.len() != profile_y.len() {
        return Err(Error::DimensionMismatch {
            expected: profile_x.len(),
            actual: profile_y.len(),
        });
    }
    Ok(profile_x
        .iter()
        .zip(profile_y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Fitted embeddings shared by every record of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureContext {
    pub phylo_pca: PcaModel,
    pub carbon_pca: PcaModel,
    /// Species × 2 phylogenetic scores, zero-padded past `phylo_pca.k()`.
    pub phylo_embedding: Matrix,
    /// Condition × 4 carbon scores, zero-padded past `carbon_pca.k()`.
    pub carbon_embedding: Matrix,
    /// Species × species Euclidean distance of monoculture profiles.
    pub metabolic_distance: Matrix,
}

impl FeatureContext {
    pub fn species_count(&self) -> usize {
        self.phylo_embedding.rows()
    }

    pub fn condition_count(&self) -> usize {
        self.carbon_embedding.rows()
    }
}

fn capped_embedding(model: &PcaModel, data: &Matrix, cap: usize) -> Result<Matrix> {
    let mut out = Matrix::zeros(data.rows(), cap);
    for i in 0..data.rows() {
        let scores = pca_project(model, data.row(i))?;
        for (dst, s) in out.row_mut(i).iter_mut().zip(scores) {
            *dst = s;
        }
    }
    Ok(out)
}

/// Fits the phylogeny PCA on rows of the species distance matrix and the
/// carbon PCA on the condition × species monoculture matrix.
pub fn build_feature_context(dataset: &Dataset) -> Result<FeatureContext> {
    let phylo = dataset.phylo_distance();
    let phylo_pca = pca_fit(phylo, PHYLO_VARIANCE)?;
    let phylo_embedding = capped_embedding(&phylo_pca, phylo, PHYLO_COMPONENTS)?;

    let by_condition = dataset.mono_profile().transpose();
    let carbon_pca = pca_fit(&by_condition, CARBON_VARIANCE)?;
    let carbon_embedding = capped_embedding(&carbon_pca, &by_condition, CARBON_COMPONENTS)?;

    let profile = dataset.mono_profile();
    let s = dataset.species_count();
    let mut metabolic_distance = Matrix::zeros(s, s);
    for x in 0..s {
        for y in (x + 1)..s {
            let d = metabolic_dissimilarity(profile.row(x), profile.row(y))?;
            metabolic_distance[(x, y)] = d;
            metabolic_distance[(y, x)] = d;
        }
    }

    Ok(FeatureContext {
        phylo_pca,
        carbon_pca,
        phylo_embedding,
        carbon_embedding,
        metabolic_distance,
    })
}

pub fn assemble_features(
    record: &CocultureRecord,
    direction: Direction,
    ctx: &FeatureContext,
) -> Result<FeatureVector> {
    let (x, y) = (record.species_x.0, record.species_y.0);
    for sp in [x, y] {
        if sp >= ctx.species_count() {
            return Err(Error::UnknownSpecies(format!("#{sp}")));
        }
    }
    let c = record.condition.0;
    if c >= ctx.condition_count() {
        return Err(Error::UnknownCondition(format!("#{c}")));
    }
    let carbon = ctx.carbon_embedding.row(c);
    let px = ctx.phylo_embedding.row(x);
    let py = ctx.phylo_embedding.row(y);
    let xy = FeatureVector([
        record.mono_grow_x,
        record.mono_grow_y,
        record.mono_grow24_x,
        record.mono_grow24_y,
        ctx.metabolic_distance[(x, y)],
        carbon[0],
        carbon[1],
        carbon[2],
        carbon[3],
        px[0],
        px[1],
        py[0],
        py[1],
    ]);
    if !xy.0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("feature vector"));
    }
    Ok(match direction {
        Direction::XY => xy,
        Direction::YX => xy.swapped(),
    })
}

/// Per-column affine scaling fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Population mean and standard deviation over the rows selected by `mask`.
pub fn fit_standardizer(rows: &Matrix, mask: &[bool]) -> Result<Standardizer> {
    if mask.len() != rows.rows() {
        return Err(Error::DimensionMismatch {
            expected: rows.rows(),
            actual: mask.len(),
        });
    }
    let selected: Vec<&[f64]> = (0..rows.rows())
        .filter(|&i| mask[i])
        .map(|i| rows.row(i))
        .collect();
    if selected.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: selected.len(),
        });
    }
    let n = selected.len() as f64;
    let d = rows.cols();
    let mut mean = vec![0.0; d];
    let mut std = vec![0.0; d];
    for j in 0..d {
        let first = selected[0][j];
        if selected.iter().all(|r| r[j] == first) {
            // Exact mean so a constant column maps to exact zeros.
            mean[j] = first;
            std[j] = STD_FLOOR;
            continue;
        }
        let m = selected.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = selected.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n;
        mean[j] = m;
        std[j] = var.sqrt().max(STD_FLOOR);
    }
    Ok(Standardizer { mean, std })
}

impl Standardizer {
    /// `(value − mean)/std` per slot. Not idempotent.
    pub fn apply(&self, row: &FeatureVector) -> FeatureVector {
        let mut out = row.0;
        for (j, v) in out.iter_mut().enumerate() {
            *v = (*v - self.mean[j]) / self.std[j];
        }
        FeatureVector(out)
    }

    pub fn apply_matrix(&self, rows: &mut Matrix) -> Result<()> {
        if rows.cols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                actual: rows.cols(),
            });
        }
        for i in 0..rows.rows() {
            for (j, v) in rows.row_mut(i).iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.std[j];
            }
        }
        Ok(())
    }
}

/// One row per (record, direction), in record order with XY before YX.
pub fn write_features_csv<W: Write>(
    dataset: &Dataset,
    ctx: &FeatureContext,
    out: W,
    comment: Option<&str>,
) -> Result<()> {
    let mut out = out;
    if let Some(c) = comment {
        writeln!(out, "# {c}").map_err(|e| Error::io("<features>", e))?;
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["record", "direction", "species_x", "species_y", "condition"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    let species = dataset.species_names();
    let conditions = dataset.condition_names();
    for (i, r) in dataset.records().iter().enumerate() {
        for direction in [Direction::XY, Direction::YX] {
            let f = assemble_features(r, direction, ctx)?;
            let (fx, fy) = match direction {
                Direction::XY => (r.species_x, r.species_y),
                Direction::YX => (r.species_y, r.species_x),
            };
            let mut row = vec![
                i.to_string(),
                format!("{direction:?}"),
                species[fx.0].clone(),
                species[fy.0].clone(),
                conditions[r.condition.0].clone(),
            ];
            row.extend(f.0.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::io("<features>", e))?;
    Ok(())
}
