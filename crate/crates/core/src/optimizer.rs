//! Concentration-based immune network over locus-encoded partitions.
//!
//! Every cell carries a genome of length |V| whose entry `i` names a node
//! sharing i's community; communities are the connected components of the
//! links `i -> genome[i]`. Each iteration clones every cell, hypermutates
//! the clones (more for weak or sparse cells), keeps the best of each
//! family, raises concentration with fitness, and lowers the concentration
//! of cells that are too similar to a better one. Cells whose concentration
//! reaches zero die, and by default fresh random cells refill the freed
//! slots so the search keeps exploring.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::fitness::Objective;
use crate::graph::Graph;
use crate::metrics::nmi_disjoint;
use crate::partition::Partition;

/// Concentration given to freshly created cells.
pub const INITIAL_CONCENTRATION: f64 = 0.5;

/// Concentration floor of the current best cell, which is never removed.
const BEST_FLOOR: f64 = 1e-6;

/// Graphs at least this large evaluate clones on the rayon pool.
const PARALLEL_MIN_NODES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Similarity above which a worse cell is suppressed by a better one.
    pub sigma_s: f64,
    pub max_iterations: usize,
    /// Mutation intensity at the first iteration.
    pub alpha_ini: f64,
    /// Mutation intensity at the last iteration.
    pub alpha_end: f64,
    pub initial_population: usize,
    pub max_population: usize,
    /// Clones of a cell at full concentration.
    pub clones_per_cell: usize,
    pub suppression_rate: f64,
    pub concentration_gain: f64,
    /// Refill the population with random cells up to `max_population` after
    /// each suppression step.
    pub insert_cells: bool,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            sigma_s: 0.2,
            max_iterations: 1500,
            alpha_ini: 10.0,
            alpha_end: 1.0,
            initial_population: 4,
            max_population: 6,
            clones_per_cell: 4,
            suppression_rate: 0.3,
            concentration_gain: 0.1,
            insert_cells: true,
            rng_seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sigma_s) {
            return invalid(format!("sigma_s must lie in [0, 1], got {}", self.sigma_s));
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be at least 1");
        }
        if !(self.alpha_end >= 1.0 && self.alpha_ini >= self.alpha_end) {
            return invalid(format!(
                "need alpha_ini >= alpha_end >= 1, got {} and {}",
                self.alpha_ini, self.alpha_end
            ));
        }
        if self.initial_population == 0 || self.initial_population > self.max_population {
            return invalid(format!(
                "need 1 <= initial_population <= max_population, got {} and {}",
                self.initial_population, self.max_population
            ));
        }
        if self.clones_per_cell == 0 {
            return invalid("clones_per_cell must be at least 1");
        }
        if !(0.0..).contains(&self.suppression_rate) || !(0.0..).contains(&self.concentration_gain)
        {
            return invalid("suppression_rate and concentration_gain must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub genome: Vec<usize>,
    pub partition: Partition,
    pub fitness: f64,
    pub concentration: f64,
}

impl Cell {
    fn evaluate(
        genome: Vec<usize>,
        g: &Graph,
        objective: &dyn Objective,
        concentration: f64,
    ) -> Cell {
        let partition = decode_unchecked(&genome);
        let fitness = objective.evaluate(g, &partition);
        Cell {
            genome,
            partition,
            fitness,
            concentration,
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn decode_unchecked(genome: &[usize]) -> Partition {
    let mut parent: Vec<usize> = (0..genome.len()).collect();
    for (i, &j) in genome.iter().enumerate() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let roots: Vec<usize> = (0..genome.len()).map(|i| find(&mut parent, i)).collect();
    Partition::from_labels(&roots)
}

/// Communities are the connected components of the links `i -- genome[i]`.
pub fn decode(genome: &[usize]) -> Result<Partition> {
    if let Some((i, &v)) = genome.iter().enumerate().find(|(_, &v)| v >= genome.len()) {
        return domain(format!("genome entry {i} = {v} is out of range"));
    }
    Ok(decode_unchecked(genome))
}

/// Links each node to the first member of its community.
pub fn encode(p: &Partition) -> Vec<usize> {
    (0..p.node_count())
        .map(|i| p.communities()[p.community_of(i)][0])
        .collect()
}

/// Replacement values and their weights for every locus.
///
/// For locus `i` the candidates are the nodes sharing at least one neighbor
/// with `i` plus `i`'s own neighbors, weighted by `|N(i) ∩ N(k)|` (at least 1
/// for neighbors). An isolated node can only point at itself.
#[derive(Debug, Clone)]
pub struct MutationTable {
    candidates: Vec<Vec<usize>>,
    weights: Vec<Vec<u32>>,
    pickers: Vec<Option<WeightedIndex<u32>>>,
}

impl MutationTable {
    pub fn new(g: &Graph) -> MutationTable {
        let n = g.node_count();
        let mut shared = vec![0u32; n];
        let mut touched = Vec::new();
        let mut candidates = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut pickers = Vec::with_capacity(n);
        for i in 0..n {
            for &j in g.neighbors(i) {
                for &k in g.neighbors(j) {
                    if k != i {
                        if shared[k] == 0 {
                            touched.push(k);
                        }
                        shared[k] += 1;
                    }
                }
            }
            for &j in g.neighbors(i) {
                if shared[j] == 0 {
                    touched.push(j);
                    shared[j] = 1;
                }
            }
            touched.sort_unstable();
            let w: Vec<u32> = touched.iter().map(|&k| shared[k]).collect();
            for &k in &touched {
                shared[k] = 0;
            }
            pickers.push(if w.is_empty() {
                None
            } else {
                Some(WeightedIndex::new(&w).expect("positive weights"))
            });
            candidates.push(std::mem::take(&mut touched));
            weights.push(w);
        }
        MutationTable {
            candidates,
            weights,
            pickers,
        }
    }

    /// Candidate replacement values of locus `i` and their weights.
    pub fn candidates(&self, i: usize) -> (&[usize], &[u32]) {
        (&self.candidates[i], &self.weights[i])
    }

    pub fn draw<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> usize {
        match &self.pickers[i] {
            Some(picker) => self.candidates[i][picker.sample(rng)],
            None => i,
        }
    }
}

/// Returns a copy of `parent` with `n_mut` distinct random loci redrawn
/// from the mutation table.
pub fn hypermutate<R: Rng + ?Sized>(
    parent: &[usize],
    table: &MutationTable,
    n_mut: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n_mut == 0 {
        return domain("hypermutation needs at least one locus");
    }
    let mut genome = parent.to_vec();
    let amount = n_mut.min(genome.len());
    for locus in rand::seq::index::sample(rng, genome.len(), amount).iter() {
        genome[locus] = table.draw(locus, rng);
    }
    Ok(genome)
}

/// Intensity schedule, linear from `alpha_ini` at iteration 0 to `alpha_end`
/// at `max_iterations`.
pub fn mutation_intensity(iteration: usize, config: &OptimizerConfig) -> f64 {
    let t = (iteration as f64 / config.max_iterations as f64).min(1.0);
    config.alpha_ini + (config.alpha_end - config.alpha_ini) * t
}

/// `max(1, round(intensity(t) * (1 - f_hat * concentration)))`.
pub fn mutation_budget(
    concentration: f64,
    iteration: usize,
    config: &OptimizerConfig,
    f_hat: f64,
) -> usize {
    let raw = mutation_intensity(iteration, config) * (1.0 - f_hat * concentration);
    (raw.round() as usize).max(1)
}

/// Clones spawned by a cell at the given concentration.
pub fn clone_count(concentration: f64, config: &OptimizerConfig) -> usize {
    ((concentration * config.clones_per_cell as f64).round() as usize).max(1)
}

/// Min-max normalized fitness; all ones when every cell ties.
pub fn normalized_fitness(population: &[Cell]) -> Vec<f64> {
    let lo = population
        .iter()
        .map(|c| c.fitness)
        .fold(f64::INFINITY, f64::min);
    let hi = population
        .iter()
        .map(|c| c.fitness)
        .fold(f64::NEG_INFINITY, f64::max);
    population
        .iter()
        .map(|c| {
            if hi > lo {
                (c.fitness - lo) / (hi - lo)
            } else {
                1.0
            }
        })
        .collect()
}

/// Ranks cell `a` below cell `b`: lower fitness, or equal fitness and a
/// later position.
fn is_worse(pop: &[Cell], a: usize, b: usize) -> bool {
    pop[a].fitness < pop[b].fitness || (pop[a].fitness == pop[b].fitness && a > b)
}

/// Lowers the concentration of every cell by `rate * similarity` for each
/// better cell whose decoded partition is more similar than `sigma_s`, then
/// drops cells at or below zero. The best cell is never touched.
pub fn suppress(mut population: Vec<Cell>, sigma_s: f64, rate: f64) -> Vec<Cell> {
    let n = population.len();
    let mut penalty = vec![0.0; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let sim =
                nmi_disjoint(&population[a].partition, &population[b].partition).unwrap_or(0.0);
            if sim > sigma_s {
                let worse = if is_worse(&population, a, b) { a } else { b };
                penalty[worse] += rate * sim;
            }
        }
    }
    for (cell, p) in population.iter_mut().zip(&penalty) {
        cell.concentration -= p;
    }
    population.retain(|c| c.concentration > 0.0);
    population
}

/// SplitMix64 finalizer folded over `parts`; gives independent,
/// reproducible streams per (iteration, cell, clone).
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

fn initial_genome<R: Rng>(g: &Graph, rng: &mut R) -> Vec<usize> {
    (0..g.node_count())
        .map(|i| {
            let nbrs = g.neighbors(i);
            let pick = rng.random_range(0..=nbrs.len());
            if pick == nbrs.len() {
                i
            } else {
                nbrs[pick]
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub best_fitness: f64,
    pub population: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub best: Cell,
    pub history: Vec<IterationRecord>,
}

const INIT_STREAM: u64 = u64::MAX;

pub fn run(g: &Graph, objective: &dyn Objective, config: &OptimizerConfig) -> Result<RunOutcome> {
    config.validate()?;
    if g.node_count() == 0 {
        return domain("cannot optimize an empty graph");
    }
    let table = MutationTable::new(g);
    let seed = config.rng_seed;

    let mut population: Vec<Cell> = (0..config.initial_population.min(config.max_population))
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[INIT_STREAM, c as u64]));
            Cell::evaluate(
                initial_genome(g, &mut rng),
                g,
                objective,
                INITIAL_CONCENTRATION,
            )
        })
        .collect();

    let mut best = best_of(&population).clone();
    let mut history = Vec::with_capacity(config.max_iterations);

    for t in 0..config.max_iterations {
        let f_hat = normalized_fitness(&population);
        let jobs: Vec<(usize, usize, usize)> = population
            .iter()
            .enumerate()
            .flat_map(|(c, cell)| {
                let n_mut = mutation_budget(cell.concentration, t, config, f_hat[c]);
                (0..clone_count(cell.concentration, config)).map(move |k| (c, k, n_mut))
            })
            .collect();
        let spawn = |&(c, k, n_mut): &(usize, usize, usize)| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(seed, &[t as u64, c as u64, k as u64]));
            let genome = hypermutate(&population[c].genome, &table, n_mut, &mut rng)
                .expect("budget is at least one");
            (
                c,
                Cell::evaluate(genome, g, objective, population[c].concentration),
            )
        };
        let clones: Vec<(usize, Cell)> = if g.node_count() >= PARALLEL_MIN_NODES {
            jobs.par_iter().map(spawn).collect()
        } else {
            jobs.iter().map(spawn).collect()
        };

        // best of each family replaces the parent; ties favor the clone
        let mut champion: Vec<Option<Cell>> = vec![None; population.len()];
        for (c, clone) in clones {
            let slot = &mut champion[c];
            if slot.as_ref().is_none_or(|cur| clone.fitness > cur.fitness) {
                *slot = Some(clone);
            }
        }
        for (cell, champ) in population.iter_mut().zip(champion) {
            if let Some(champ) = champ {
                if champ.fitness >= cell.fitness {
                    *cell = champ;
                }
            }
        }

        let f_hat = normalized_fitness(&population);
        for (cell, f) in population.iter_mut().zip(f_hat) {
            cell.concentration = (cell.concentration + config.concentration_gain * f).min(1.0);
        }

        let top = best_index(&population);
        population[top].concentration = population[top].concentration.max(BEST_FLOOR);
        population = suppress(population, config.sigma_s, config.suppression_rate);
        if config.insert_cells {
            for slot in population.len()..config.max_population {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                    seed,
                    &[INIT_STREAM, t as u64, slot as u64],
                ));
                population.push(Cell::evaluate(
                    initial_genome(g, &mut rng),
                    g,
                    objective,
                    INITIAL_CONCENTRATION,
                ));
            }
        }

        let current = best_of(&population);
        if current.fitness > best.fitness {
            best = current.clone();
        }
        history.push(IterationRecord {
            iteration: t,
            best_fitness: best.fitness,
            population: population.len(),
        });
    }

    Ok(RunOutcome { best, history })
}

fn best_index(population: &[Cell]) -> usize {
    let mut top = 0;
    for (i, c) in population.iter().enumerate() {
        if c.fitness > population[top].fitness {
            top = i;
        }
    }
    top
}

fn best_of(population: &[Cell]) -> &Cell {
    &population[best_index(population)]
}
