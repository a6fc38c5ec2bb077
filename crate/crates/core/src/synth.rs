//! Seeded consumer-resource surrogate that produces labeled co-culture datasets.
//!
//! Species fall into two taxonomic clusters. Each carbon condition favours
//! one cluster, which shapes the uptake matrix. Cross-feeding links the most
//! dissimilar niches, and one-way effects combine niche-overlap competition
//! with the partner's byproduct benefit:
//!
//! ```text
//! m(s,c)     = max(0, uptake[s,c] + N(0,σ))
//! Δ(x←y,c)   = −α·min(uptake[x,c], uptake[y,c]) + β·crossfeed[x,y]·uptake[y,c] + N(0,σ)
//! co_yield_x = max(0, m(x,c) + Δ(x←y,c))
//! ```

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{label_one_way, CocultureRecord, ConditionId, Dataset, SpeciesId};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{self, Rng, Stream};

/// Fraction of the monoculture yield reached at the 24-hour read-out.
const YIELD_24H_FRACTION: f64 = 0.6;
/// Multiplier on uptake for species in a condition's favoured cluster (and its
/// mirror for the other cluster).
const PREFERENCE_GAIN: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub species_count: usize,
    pub condition_count: usize,
    /// Expected fraction of nonzero uptake entries.
    pub uptake_sparsity: f64,
    /// α, niche-overlap competition.
    pub competition_strength: f64,
    /// β, byproduct benefit.
    pub crossfeed_strength: f64,
    /// Fraction of species pairs that cross-feed.
    pub crossfeed_density: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            species_count: 20,
            condition_count: 40,
            uptake_sparsity: 1.0,
            competition_strength: 1.0,
            crossfeed_strength: 1.0,
            crossfeed_density: 0.5,
            noise_sigma: 0.05,
            seed: 42,
        }
    }
}

impl WorldConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.species_count < 2 {
            return bad(format!("species_count must be >= 2, got {}", self.species_count));
        }
        if self.condition_count < 1 {
            return bad("condition_count must be >= 1".into());
        }
        if !(self.uptake_sparsity > 0.0 && self.uptake_sparsity <= 1.0) {
            return bad(format!("uptake_sparsity must be in (0,1], got {}", self.uptake_sparsity));
        }
        if !(self.crossfeed_density >= 0.0 && self.crossfeed_density <= 1.0) {
            return bad(format!(
                "crossfeed_density must be in [0,1], got {}",
                self.crossfeed_density
            ));
        }
        for (name, v) in [
            ("competition_strength", self.competition_strength),
            ("crossfeed_strength", self.crossfeed_strength),
            ("noise_sigma", self.noise_sigma),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    /// Species × condition resource-use efficiency.
    pub uptake: Matrix,
    /// `crossfeed[x][y]`: benefit x draws from y's byproducts. Zero diagonal.
    pub crossfeed: Matrix,
    /// Ultrametric distances from a random binary tree per cluster.
    pub phylo_distance: Matrix,
    /// Taxonomic cluster (0 or 1) per species.
    pub clusters: Vec<u8>,
}

pub fn generate_world(config: &WorldConfig) -> Result<World> {
    config.validate()?;
    let s = config.species_count;
    let c = config.condition_count;
    let mut rng = rng::stream(config.seed, Stream::World);

    let mut order: Vec<usize> = (0..s).collect();
    order.shuffle(&mut rng);
    let mut clusters = vec![0u8; s];
    for &i in &order[s / 2..] {
        clusters[i] = 1;
    }

    // Each condition favours one cluster: higher occupancy and larger uptake.
    let p = config.uptake_sparsity;
    let shift = 0.3 * p.min(1.0 - p);
    let preferred: Vec<u8> = (0..c).map(|_| rng.gen_range(0..2u8)).collect();
    let mut uptake = Matrix::zeros(s, c);
    for sp in 0..s {
        for (cond, &pref) in preferred.iter().enumerate() {
            let favoured = clusters[sp] == pref;
            let occupancy = if favoured { p + shift } else { p - shift };
            let present = rng.gen::<f64>() < occupancy;
            let magnitude = rng.gen_range(0.2..1.0);
            let gain = if favoured {
                1.0 + PREFERENCE_GAIN
            } else {
                1.0 - PREFERENCE_GAIN
            };
            if present {
                uptake[(sp, cond)] = magnitude * gain;
            }
        }
    }

    let crossfeed = crossfeed_matrix(&uptake, config.crossfeed_density);
    let phylo_distance = phylogeny(&clusters, &mut rng);

    Ok(World {
        uptake,
        crossfeed,
        phylo_distance,
        clusters,
    })
}

/// Pairs are ranked by the Euclidean distance between their uptake profiles;
/// the top `density` fraction cross-feed with strength proportional to that
/// distance, normalized so the largest is 1.
fn crossfeed_matrix(uptake: &Matrix, density: f64) -> Matrix {
    let s = uptake.rows();
    let mut pairs = Vec::with_capacity(s * (s - 1) / 2);
    for x in 0..s {
        for y in (x + 1)..s {
            let d: f64 = uptake
                .row(x)
                .iter()
                .zip(uptake.row(y))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            pairs.push((d, x, y));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let keep = (density * pairs.len() as f64).round() as usize;
    let max = pairs.first().map_or(0.0, |p| p.0);
    let mut cf = Matrix::zeros(s, s);
    if max > 0.0 {
        for &(d, x, y) in &pairs[..keep] {
            cf[(x, y)] = d / max;
            cf[(y, x)] = d / max;
        }
    }
    cf
}

/// Random agglomerative binary tree inside each cluster, joined under a root
/// strictly above both cluster roots. Distance = 2 × height of the lowest
/// common ancestor.
fn phylogeny(clusters: &[u8], rng: &mut Rng) -> Matrix {
    let s = clusters.len();
    let mut d = Matrix::zeros(s, s);
    let mut root_heights = [0.0f64; 2];
    for (k, root) in root_heights.iter_mut().enumerate() {
        // (members, height) of each current subtree
        let mut subtrees: Vec<(Vec<usize>, f64)> = (0..s)
            .filter(|&i| clusters[i] as usize == k)
            .map(|i| (vec![i], 0.0))
            .collect();
        while subtrees.len() > 1 {
            let a = rng.gen_range(0..subtrees.len());
            let (ma, ha) = subtrees.swap_remove(a);
            let b = rng.gen_range(0..subtrees.len());
            let (mb, hb) = subtrees.swap_remove(b);
            let h = ha.max(hb) + rng.gen_range(0.1..1.0);
            for &i in &ma {
                for &j in &mb {
                    d[(i, j)] = 2.0 * h;
                    d[(j, i)] = 2.0 * h;
                }
            }
            let mut merged = ma;
            merged.extend(mb);
            subtrees.push((merged, h));
        }
        *root = subtrees.first().map_or(0.0, |t| t.1);
    }
    let top = root_heights[0].max(root_heights[1]) + rng.gen_range(0.5..1.5);
    for i in 0..s {
        for j in 0..s {
            if clusters[i] != clusters[j] {
                d[(i, j)] = 2.0 * top;
            }
        }
    }
    d
}

pub fn species_name(i: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len().max(2);
    format!("sp{i:0width$}")
}

pub fn condition_name(i: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len().max(2);
    format!("c{i:0width$}")
}

/// Emits every unordered species pair under every condition, condition-major.
pub fn simulate_dataset(world: &World, config: &WorldConfig) -> Result<Dataset> {
    config.validate()?;
    let s = config.species_count;
    let c = config.condition_count;
    if world.uptake.shape() != (s, c) || world.crossfeed.shape() != (s, s) {
        return Err(Error::InvalidConfig(format!(
            "world is {:?} but config asks for {s} species x {c} conditions",
            world.uptake.shape()
        )));
    }
    let sigma = config.noise_sigma;
    let alpha = config.competition_strength;
    let beta = config.crossfeed_strength;
    let mut rng = rng::stream(config.seed, Stream::Dataset);
    let mut noise = move || sigma * rng.sample::<f64, _>(StandardNormal);

    let uptake = &world.uptake;
    let mut mono = Matrix::zeros(s, c);
    let mut mono24 = Matrix::zeros(s, c);
    for sp in 0..s {
        for cond in 0..c {
            mono[(sp, cond)] = (uptake[(sp, cond)] + noise()).max(0.0);
        }
    }
    for sp in 0..s {
        for cond in 0..c {
            mono24[(sp, cond)] = (YIELD_24H_FRACTION * uptake[(sp, cond)] + noise()).max(0.0);
        }
    }

    let mut records = Vec::with_capacity(s * (s - 1) / 2 * c);
    for cond in 0..c {
        for x in 0..s {
            for y in (x + 1)..s {
                let (ux, uy) = (uptake[(x, cond)], uptake[(y, cond)]);
                let overlap = alpha * ux.min(uy);
                let effect_on_x = -overlap + beta * world.crossfeed[(x, y)] * uy + noise();
                let effect_on_y = -overlap + beta * world.crossfeed[(y, x)] * ux + noise();
                let (mx, my) = (mono[(x, cond)], mono[(y, cond)]);
                let co_x = (mx + effect_on_x).max(0.0);
                let co_y = (my + effect_on_y).max(0.0);
                records.push(CocultureRecord {
                    species_x: SpeciesId(x),
                    species_y: SpeciesId(y),
                    condition: ConditionId(cond),
                    mono_grow_x: mx,
                    mono_grow_y: my,
                    mono_grow24_x: mono24[(x, cond)],
                    mono_grow24_y: mono24[(y, cond)],
                    co_yield_x: Some(co_x),
                    co_yield_y: Some(co_y),
                    label_xy: label_one_way(mx, co_x, 0.0)?,
                    label_yx: label_one_way(my, co_y, 0.0)?,
                });
            }
        }
    }

    Dataset::new(
        (0..s).map(|i| species_name(i, s)).collect(),
        (0..c).map(|i| condition_name(i, c)).collect(),
        records,
        world.phylo_distance.clone(),
    )
}

/// Generates the world and its dataset in one step.
pub fn synthesize(config: &WorldConfig) -> Result<(World, Dataset)> {
    let world = generate_world(config)?;
    let dataset = simulate_dataset(&world, config)?;
    Ok((world, dataset))
}
