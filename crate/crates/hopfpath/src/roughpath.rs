//! Two-parameter truncated group-valued traces on time grids: canonical
//! lifts of sampled paths, sampled Brownian enhancements, Chen-defect and
//! Hoelder-norm diagnostics, and the pointwise translation action.
//!
//! Coefficients here are floats; every algebraic operator applied to a
//! trace is first materialized exactly on the basis and then pushed through
//! the float coefficients. A trace stores its consecutive-step group
//! elements (so Chen holds by construction) plus an override table that
//! lets tests corrupt individual pairs.

use std::collections::BTreeMap;

use crate::bhz::rational_to_f64;
use crate::error::TraceError;
use crate::forest::{ck_antipode_value, ck_coproduct, iota};
use crate::freevec::LinComb;
use crate::tensor::{words_up_to, TensorPoly, Word, WordTranslation};
use crate::translation::TreeTranslation;
use crate::tree::{trees_up_to, Forest, LabeledTree};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flavor {
    Geometric,
    Branched,
}

/// A basis key of a trace level: a word (geometric) or a tree (branched).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum TraceKey {
    Word(Word),
    Tree(LabeledTree),
}

impl TraceKey {
    pub fn grade(&self) -> usize {
        match self {
            TraceKey::Word(w) => w.len(),
            TraceKey::Tree(t) => t.nodes(),
        }
    }

    pub fn zero_count(&self) -> usize {
        match self {
            TraceKey::Word(w) => w.zero_count(),
            TraceKey::Tree(t) => t.zero_count(),
        }
    }
}

pub type CoeffMap = BTreeMap<TraceKey, f64>;

fn get(map: &CoeffMap, k: &TraceKey) -> f64 {
    map.get(k).copied().unwrap_or(0.0)
}

fn eval_forest(map: &CoeffMap, f: &Forest) -> f64 {
    f.trees()
        .iter()
        .map(|t| get(map, &TraceKey::Tree(t.clone())))
        .product()
}

/// A sampled rough-path trace: grid times plus level data up to a node or
/// length bound.
#[derive(Clone, Debug)]
pub struct RoughPathTrace {
    grid: Vec<f64>,
    flavor: Flavor,
    dim: usize,
    level: usize,
    alpha: f64,
    steps: Vec<CoeffMap>,
    prefix: Vec<CoeffMap>,
    overrides: BTreeMap<(usize, usize), CoeffMap>,
}

impl RoughPathTrace {
    fn keys(level: usize, dim: usize, flavor: Flavor) -> Vec<TraceKey> {
        match flavor {
            Flavor::Geometric => words_up_to(level, dim).into_iter().map(TraceKey::Word).collect(),
            Flavor::Branched => trees_up_to(level, dim).into_iter().map(TraceKey::Tree).collect(),
        }
    }

    fn compose(&self, a: &CoeffMap, b: &CoeffMap) -> CoeffMap {
        compose_maps(a, b, self.level, self.dim, self.flavor)
    }

    fn from_steps(
        grid: Vec<f64>,
        flavor: Flavor,
        dim: usize,
        level: usize,
        alpha: f64,
        steps: Vec<CoeffMap>,
    ) -> Result<Self, TraceError> {
        if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TraceError::DegenerateGrid);
        }
        debug_assert_eq!(steps.len() + 1, grid.len());
        let mut trace = RoughPathTrace {
            grid,
            flavor,
            dim,
            level,
            alpha,
            steps,
            prefix: Vec::new(),
            overrides: BTreeMap::new(),
        };
        trace.rebuild_prefix();
        Ok(trace)
    }

    fn rebuild_prefix(&mut self) {
        let mut prefix = vec![CoeffMap::new()];
        let mut acc = CoeffMap::new();
        for s in &self.steps {
            acc = self.compose(&acc, s);
            prefix.push(acc.clone());
        }
        self.prefix = prefix;
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn steps(&self) -> usize {
        self.steps.len()
    }

    /// The group element of the grid pair `(i, j)`, `i < j`.
    pub fn pair(&self, i: usize, j: usize) -> CoeffMap {
        assert!(i < j && j < self.grid.len());
        if let Some(o) = self.overrides.get(&(i, j)) {
            return o.clone();
        }
        if j == i + 1 {
            return self.steps[i].clone();
        }
        let inv = invert_map(&self.prefix[i], self.level, self.dim, self.flavor);
        self.compose(&inv, &self.prefix[j])
    }

    /// Coefficient of one key on one grid pair.
    pub fn coeff(&self, i: usize, j: usize, key: &TraceKey) -> f64 {
        get(&self.pair(i, j), key)
    }

    /// Overwrites a single coefficient of one pair (fault injection and
    /// import paths; the trace invariants are deliberately not re-checked).
    pub fn set_coeff(&mut self, i: usize, j: usize, key: TraceKey, value: f64) {
        let map = self
            .overrides
            .remove(&(i, j))
            .unwrap_or_else(|| self.pair(i, j));
        let mut map = map;
        map.insert(key, value);
        self.overrides.insert((i, j), map);
    }

    /// Maximum Chen violation over consecutive triples and stored keys.
    pub fn chen_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.steps.len().saturating_sub(1) {
            let left = self.compose(&self.pair(i, i + 1), &self.pair(i + 1, i + 2));
            let direct = self.pair(i, i + 2);
            for key in Self::keys(self.level, self.dim, self.flavor) {
                worst = worst.max((get(&left, &key) - get(&direct, &key)).abs());
            }
        }
        worst
    }

    /// Maximum group-likeness violation over consecutive steps: products of
    /// lower keys against their product key (branched traces are
    /// multiplicative by construction, so this checks geometric shuffles).
    pub fn grouplike_defect(&self) -> f64 {
        match self.flavor {
            Flavor::Branched => 0.0,
            Flavor::Geometric => {
                let words = words_up_to(self.level, self.dim);
                let mut worst: f64 = 0.0;
                for s in &self.steps {
                    for u in &words {
                        for v in &words {
                            if u.len() + v.len() > self.level || u > v {
                                continue;
                            }
                            let sh = crate::tensor::shuffle(
                                &TensorPoly::new(LinComb::basis(u.clone()), self.level, self.dim).unwrap(),
                                &TensorPoly::new(LinComb::basis(v.clone()), self.level, self.dim).unwrap(),
                            )
                            .unwrap();
                            let mut lhs = 0.0;
                            for (w, c) in sh.value().iter() {
                                lhs += rational_to_f64(c) * get(s, &TraceKey::Word(w.clone()));
                            }
                            let rhs = get(s, &TraceKey::Word(u.clone()))
                                * get(s, &TraceKey::Word(v.clone()));
                            worst = worst.max((lhs - rhs).abs());
                        }
                    }
                }
                worst
            }
        }
    }

    /// Inhomogeneous Hoelder norm: the grid supremum of
    /// `|<X_{u,v}, w>| / |v-u|^{|w| alpha}` over all stored keys.
    pub fn holder_norm(&self, alpha: f64) -> f64 {
        self.norm_with(|key| key.grade() as f64 * alpha)
    }

    /// Mixed-regularity norm: the time-carrying letters scale with
    /// exponent 1 instead of alpha, i.e. `(1-alpha)|w|_0 + alpha |w|`.
    pub fn mixed_norm(&self, alpha: f64) -> f64 {
        self.norm_with(|key| {
            (1.0 - alpha) * key.zero_count() as f64 + alpha * key.grade() as f64
        })
    }

    fn norm_with(&self, exponent: impl Fn(&TraceKey) -> f64) -> f64 {
        let keys = Self::keys(self.level, self.dim, self.flavor);
        let mut worst: f64 = 0.0;
        let inverses: Vec<CoeffMap> = self
            .prefix
            .iter()
            .map(|p| invert_map(p, self.level, self.dim, self.flavor))
            .collect();
        for i in 0..self.grid.len() {
            for j in i + 1..self.grid.len() {
                let map = if let Some(o) = self.overrides.get(&(i, j)) {
                    o.clone()
                } else if j == i + 1 {
                    self.steps[i].clone()
                } else {
                    self.compose(&inverses[i], &self.prefix[j])
                };
                let dt = self.grid[j] - self.grid[i];
                for key in &keys {
                    let v = get(&map, key).abs();
                    if v == 0.0 {
                        continue;
                    }
                    worst = worst.max(v / dt.powf(exponent(key)));
                }
            }
        }
        worst
    }

    /// Restricts the grid to every `stride`-th point (dyadic coarsening).
    pub fn coarsened(&self, stride: usize) -> Result<RoughPathTrace, TraceError> {
        assert!(stride >= 1 && (self.steps.len() % stride == 0));
        let mut grid = Vec::new();
        let mut steps = Vec::new();
        let mut acc = CoeffMap::new();
        grid.push(self.grid[0]);
        for (i, s) in self.steps.iter().enumerate() {
            acc = self.compose(&acc, s);
            if (i + 1) % stride == 0 {
                grid.push(self.grid[i + 1]);
                steps.push(std::mem::take(&mut acc));
            }
        }
        Self::from_steps(grid, self.flavor, self.dim, self.level, self.alpha, steps)
    }

    /// Pointwise translation of a branched trace: the dual operator is
    /// materialized exactly on the tree basis and applied to every stored
    /// pair.
    pub fn translate_branched(&self, v: &TreeTranslation) -> Result<RoughPathTrace, TraceError> {
        if self.flavor != Flavor::Branched {
            return Err(TraceError::FlavorMismatch { expected: "branched" });
        }
        if v.trunc() > self.level {
            return Err(TraceError::LevelShortfall { have: self.level, need: v.trunc() });
        }
        let trees = trees_up_to(self.level, self.dim);
        let mut rows: Vec<(LabeledTree, Vec<(LabeledTree, f64)>)> = Vec::new();
        for t in &trees {
            let poly = crate::forest::ForestPoly::tree(t.clone(), self.level, self.dim)
                .map_err(TraceError::Algebra)?;
            let image = crate::translation::dual_translate(v, &poly).map_err(TraceError::Algebra)?;
            let row = image
                .value()
                .iter()
                .map(|(f, c)| {
                    let single = f.as_single_tree().expect("dual of a tree is a tree series");
                    (single.clone(), rational_to_f64(c))
                })
                .collect();
            rows.push((t.clone(), row));
        }
        let apply = |map: &CoeffMap| -> CoeffMap {
            let mut out = CoeffMap::new();
            for (t, row) in &rows {
                let mut v = 0.0;
                for (src, c) in row {
                    v += c * get(map, &TraceKey::Tree(src.clone()));
                }
                if v != 0.0 {
                    out.insert(TraceKey::Tree(t.clone()), v);
                }
            }
            out
        };
        let steps = self.steps.iter().map(&apply).collect();
        let mut out = Self::from_steps(
            self.grid.clone(),
            self.flavor,
            self.dim,
            self.level,
            self.alpha,
            steps,
        )?;
        for (k, map) in &self.overrides {
            out.overrides.insert(*k, apply(map));
        }
        Ok(out)
    }

    /// Pointwise translation of a geometric trace.
    pub fn translate_geometric(&self, v: &WordTranslation) -> Result<RoughPathTrace, TraceError> {
        if self.flavor != Flavor::Geometric {
            return Err(TraceError::FlavorMismatch { expected: "geometric" });
        }
        let words = words_up_to(self.level, self.dim);
        let mut rows: Vec<(Word, Vec<(Word, f64)>)> = Vec::new();
        for w in &words {
            let poly = TensorPoly::new(LinComb::basis(w.clone()), self.level, self.dim)
                .map_err(TraceError::Algebra)?;
            let image = crate::tensor::dual_translate(v, &poly).map_err(TraceError::Algebra)?;
            let row = image
                .value()
                .iter()
                .filter(|(u, _)| !u.is_empty())
                .map(|(u, c)| (u.clone(), rational_to_f64(c)))
                .collect();
            rows.push((w.clone(), row));
        }
        let apply = |map: &CoeffMap| -> CoeffMap {
            let mut out = CoeffMap::new();
            for (w, row) in &rows {
                let mut v = 0.0;
                for (src, c) in row {
                    v += c * get(map, &TraceKey::Word(src.clone()));
                }
                if v != 0.0 {
                    out.insert(TraceKey::Word(w.clone()), v);
                }
            }
            out
        };
        let steps = self.steps.iter().map(&apply).collect();
        let mut out = Self::from_steps(
            self.grid.clone(),
            self.flavor,
            self.dim,
            self.level,
            self.alpha,
            steps,
        )?;
        for (k, map) in &self.overrides {
            out.overrides.insert(*k, apply(map));
        }
        Ok(out)
    }

    /// JSON export: every grid pair against every stored key, printed in
    /// the element grammar.
    pub fn to_json(&self) -> serde_json::Value {
        let mut pairs = serde_json::Map::new();
        for i in 0..self.grid.len() {
            for j in i + 1..self.grid.len() {
                let map = self.pair(i, j);
                let mut entry = serde_json::Map::new();
                for (k, v) in &map {
                    let name = match k {
                        TraceKey::Word(w) => crate::expr::print_word(w),
                        TraceKey::Tree(t) => crate::expr::print_tree(t),
                    };
                    entry.insert(name, serde_json::json!(v));
                }
                pairs.insert(format!("{i}-{j}"), serde_json::Value::Object(entry));
            }
        }
        serde_json::json!({
            "flavor": match self.flavor { Flavor::Geometric => "geometric", Flavor::Branched => "branched" },
            "dim": self.dim,
            "level": self.level,
            "alpha": self.alpha,
            "grid": self.grid,
            "pairs": pairs,
        })
    }
}

fn compose_maps(a: &CoeffMap, b: &CoeffMap, level: usize, dim: usize, flavor: Flavor) -> CoeffMap {
    let mut out = CoeffMap::new();
    match flavor {
        Flavor::Geometric => {
            for w in words_up_to(level, dim) {
                let letters = w.letters();
                let mut v = 0.0;
                for cut in 0..=letters.len() {
                    let left = &letters[..cut];
                    let right = &letters[cut..];
                    let lv = if left.is_empty() {
                        1.0
                    } else {
                        get(a, &TraceKey::Word(Word(left.to_vec())))
                    };
                    let rv = if right.is_empty() {
                        1.0
                    } else {
                        get(b, &TraceKey::Word(Word(right.to_vec())))
                    };
                    v += lv * rv;
                }
                if v != 0.0 {
                    out.insert(TraceKey::Word(w), v);
                }
            }
        }
        Flavor::Branched => {
            for t in trees_up_to(level, dim) {
                let cop = ck_coproduct(&Forest::single(t.clone()));
                let mut v = 0.0;
                for ((branches, trunk), c) in cop.iter() {
                    let lv = eval_forest(a, branches);
                    let rv = eval_forest(b, trunk);
                    v += rational_to_f64(c) * lv * rv;
                }
                if v != 0.0 {
                    out.insert(TraceKey::Tree(t), v);
                }
            }
        }
    }
    out
}

fn invert_map(a: &CoeffMap, level: usize, dim: usize, flavor: Flavor) -> CoeffMap {
    let mut out = CoeffMap::new();
    match flavor {
        Flavor::Geometric => {
            for w in words_up_to(level, dim) {
                let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
                let v = sign * get(a, &TraceKey::Word(w.reversed()));
                if v != 0.0 {
                    out.insert(TraceKey::Word(w), v);
                }
            }
        }
        Flavor::Branched => {
            for t in trees_up_to(level, dim) {
                let anti = ck_antipode_value(&LinComb::basis(Forest::single(t.clone())));
                let mut v = 0.0;
                for (f, c) in anti.iter() {
                    v += rational_to_f64(c) * eval_forest(a, f);
                }
                if v != 0.0 {
                    out.insert(TraceKey::Tree(t), v);
                }
            }
        }
    }
    out
}

/// The canonical geometric segment element: `<exp(sum inc_i letter_i), w> =
/// prod(inc) / |w|!`.
fn geometric_segment(increments: &[f64], level: usize, dim: usize) -> CoeffMap {
    let mut out = CoeffMap::new();
    let mut factorial = vec![1.0; level + 1];
    for k in 1..=level {
        factorial[k] = factorial[k - 1] * k as f64;
    }
    for w in words_up_to(level, dim) {
        let mut v = 1.0;
        for &l in w.letters() {
            v *= increments[usize::from(l)];
        }
        v /= factorial[w.len()];
        if v != 0.0 {
            out.insert(TraceKey::Word(w), v);
        }
    }
    out
}

/// The canonical branched segment element: the product of the node
/// increments divided by the tree factorial.
fn branched_segment(increments: &[f64], level: usize, dim: usize) -> CoeffMap {
    let mut out = CoeffMap::new();
    for t in trees_up_to(level, dim) {
        let mut v = 1.0;
        fn walk(t: &LabeledTree, inc: &[f64], v: &mut f64) {
            *v *= inc[usize::from(t.label())];
            for c in t.children() {
                walk(c, inc, v);
            }
        }
        walk(&t, increments, &mut v);
        use num_traits::ToPrimitive;
        v /= t.tree_factorial().to_f64().unwrap();
        if v != 0.0 {
            out.insert(TraceKey::Tree(t), v);
        }
    }
    out
}

/// Canonical lift of a sampled path in R^(1+d): rows are `(t, x_1..x_d)`
/// and the zeroth component is the time itself. Each segment lifts to the
/// exponential of its increment; grid pairs then satisfy Chen by
/// construction.
pub fn lift_piecewise_linear(
    rows: &[(f64, Vec<f64>)],
    level: usize,
    alpha: f64,
) -> Result<RoughPathTrace, TraceError> {
    if rows.len() < 2 {
        return Err(TraceError::DegenerateGrid);
    }
    let dim = rows[0].1.len();
    let grid: Vec<f64> = rows.iter().map(|(t, _)| *t).collect();
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TraceError::DegenerateGrid);
    }
    let mut steps = Vec::with_capacity(rows.len() - 1);
    for w in rows.windows(2) {
        let (t0, x0) = &w[0];
        let (t1, x1) = &w[1];
        let mut inc = Vec::with_capacity(dim + 1);
        inc.push(t1 - t0);
        for k in 0..dim {
            inc.push(x1[k] - x0[k]);
        }
        steps.push(geometric_segment(&inc, level, dim));
    }
    RoughPathTrace::from_steps(grid, Flavor::Geometric, dim, level, alpha, steps)
}

/// Canonical branched lift of a sampled path (the image of the geometric
/// lift under the tensor-to-forest embedding, built directly from segment
/// exponentials).
pub fn lift_branched_piecewise_linear(
    rows: &[(f64, Vec<f64>)],
    level: usize,
    alpha: f64,
) -> Result<RoughPathTrace, TraceError> {
    if rows.len() < 2 {
        return Err(TraceError::DegenerateGrid);
    }
    let dim = rows[0].1.len();
    let grid: Vec<f64> = rows.iter().map(|(t, _)| *t).collect();
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TraceError::DegenerateGrid);
    }
    let mut steps = Vec::with_capacity(rows.len() - 1);
    for w in rows.windows(2) {
        let (t0, x0) = &w[0];
        let (t1, x1) = &w[1];
        let mut inc = Vec::with_capacity(dim + 1);
        inc.push(t1 - t0);
        for k in 0..dim {
            inc.push(x1[k] - x0[k]);
        }
        steps.push(branched_segment(&inc, level, dim));
    }
    RoughPathTrace::from_steps(grid, Flavor::Branched, dim, level, alpha, steps)
}

/// Applies the tensor-to-forest embedding pointwise: tree coefficients are
/// the embedded word coefficients, computed through the exact embedding
/// matrix.
pub fn lift_branched_via_iota(g: &RoughPathTrace) -> Result<RoughPathTrace, TraceError> {
    if g.flavor != Flavor::Geometric {
        return Err(TraceError::FlavorMismatch { expected: "geometric" });
    }
    let words = words_up_to(g.level, g.dim);
    // column w of the embedding: tree coefficients of iota(w)
    let mut cols: Vec<(Word, Vec<(LabeledTree, f64)>)> = Vec::new();
    for w in &words {
        let poly = TensorPoly::new(LinComb::basis(w.clone()), g.level, g.dim)
            .map_err(TraceError::Algebra)?;
        let image = iota(&poly).map_err(TraceError::Algebra)?;
        let col = image
            .value()
            .iter()
            .filter_map(|(f, c)| f.as_single_tree().map(|t| (t.clone(), rational_to_f64(c))))
            .collect();
        cols.push((w.clone(), col));
    }
    let apply = |map: &CoeffMap| -> CoeffMap {
        let mut out = CoeffMap::new();
        for (w, col) in &cols {
            let x = get(map, &TraceKey::Word(w.clone()));
            if x == 0.0 {
                continue;
            }
            for (t, c) in col {
                *out.entry(TraceKey::Tree(t.clone())).or_insert(0.0) += c * x;
            }
        }
        out.retain(|_, v| *v != 0.0);
        out
    };
    let steps = g.steps.iter().map(&apply).collect();
    let mut out = RoughPathTrace::from_steps(
        g.grid.clone(),
        Flavor::Branched,
        g.dim,
        g.level,
        g.alpha,
        steps,
    )?;
    for (k, map) in &g.overrides {
        out.overrides.insert(*k, apply(map));
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BrownianScheme {
    Ito,
    Stratonovich,
}

/// A sampled Brownian enhancement on a grid: label 0 carries time, the
/// noise labels carry independent Brownian increments. Ito steps keep only
/// the increments (left-point sums after composition); Stratonovich steps
/// are segment exponentials (trapezoid sums at level two). Deterministic in
/// the seed.
pub fn brownian_lift(
    seed: u64,
    grid: &[f64],
    dim: usize,
    scheme: BrownianScheme,
    level: usize,
    alpha: f64,
) -> Result<RoughPathTrace, TraceError> {
    if level > 3 {
        return Err(TraceError::UnsupportedLevel(level));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TraceError::DegenerateGrid);
    }
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(grid.len() - 1);
    for w in grid.windows(2) {
        let h = w[1] - w[0];
        let mut inc = Vec::with_capacity(dim + 1);
        inc.push(h);
        for _ in 0..dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            inc.push(z * h.sqrt());
        }
        let step = match scheme {
            BrownianScheme::Stratonovich => branched_segment(&inc, level, dim),
            BrownianScheme::Ito => {
                let mut map = CoeffMap::new();
                for (l, &v) in inc.iter().enumerate() {
                    if v != 0.0 {
                        map.insert(TraceKey::Tree(LabeledTree::leaf(l as u8)), v);
                    }
                }
                map
            }
        };
        steps.push(step);
    }
    RoughPathTrace::from_steps(grid.to_vec(), Flavor::Branched, dim, level, alpha, steps)
}

/// Uniform grid `0, T/n, ..., T`.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_rows(n: usize) -> Vec<(f64, Vec<f64>)> {
        // x_t = t along the first space direction
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                (t, vec![t])
            })
            .collect()
    }

    #[test]
    fn straight_line_lift_is_exponential() {
        let x = lift_piecewise_linear(&line_rows(4), 3, 1.0).unwrap();
        // <X_{0,1}, e1...1 (k letters)> = 1/k!
        for k in 1..=3usize {
            let w = TraceKey::Word(Word(vec![1; k]));
            let mut fact = 1.0;
            for i in 1..=k {
                fact *= i as f64;
            }
            let got = x.coeff(0, x.grid().len() - 1, &w);
            assert!((got - 1.0 / fact).abs() < 1e-12, "k={k}: {got}");
        }
    }

    #[test]
    fn constant_path_lifts_to_unit() {
        let rows: Vec<(f64, Vec<f64>)> = (0..=3).map(|i| (i as f64, vec![2.5])).collect();
        let x = lift_piecewise_linear(&rows, 2, 1.0).unwrap();
        // all space keys vanish; time keys carry powers of the interval
        assert_eq!(x.coeff(0, 3, &TraceKey::Word(Word(vec![1]))), 0.0);
        assert!((x.coeff(0, 3, &TraceKey::Word(Word(vec![0]))) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn chen_holds_by_construction_and_breaks_under_injection() {
        let mut x = lift_piecewise_linear(&line_rows(8), 3, 1.0).unwrap();
        assert!(x.chen_defect() < 1e-12);
        let key = TraceKey::Word(Word(vec![1, 1]));
        let old = x.coeff(0, 2, &key);
        x.set_coeff(0, 2, key, old + 0.25);
        assert!(x.chen_defect() > 0.1);
    }

    #[test]
    fn holder_norm_example() {
        // X_t = t e1 at alpha = 1, L = 2: norm = max(1, 1/2) = 1
        let x = lift_piecewise_linear(&line_rows(8), 2, 1.0).unwrap();
        let n = x.holder_norm(1.0);
        assert!((n - 1.0).abs() < 1e-12, "{n}");
        // unit trace has zero norm
        let rows: Vec<(f64, Vec<f64>)> = (0..=2).map(|i| (i as f64, vec![0.0])).collect();
        let u = lift_piecewise_linear(&rows, 2, 1.0).unwrap();
        // time keys still carry mass; the space-only part vanishes
        assert!(u.holder_norm(1.0) >= 1.0 - 1e-12); // time letter scales exactly
    }

    #[test]
    fn iota_embedding_matches_direct_branched_lift() {
        let rows: Vec<(f64, Vec<f64>)> = (0..=6)
            .map(|i| {
                let t = i as f64 / 6.0;
                (t, vec![t * t, (3.1 * t).sin()])
            })
            .collect();
        let g = lift_piecewise_linear(&rows, 3, 0.5).unwrap();
        let b1 = lift_branched_via_iota(&g).unwrap();
        let b2 = lift_branched_piecewise_linear(&rows, 3, 0.5).unwrap();
        let m = rows.len() - 1;
        for t in trees_up_to(3, 2) {
            let k = TraceKey::Tree(t.clone());
            let a = b1.coeff(0, m, &k);
            let b = b2.coeff(0, m, &k);
            assert!((a - b).abs() < 1e-10, "mismatch at {t:?}: {a} vs {b}");
        }
    }

    #[test]
    fn linear_tree_coefficients_match_words() {
        let rows: Vec<(f64, Vec<f64>)> = (0..=5)
            .map(|i| {
                let t = i as f64 / 5.0;
                (t, vec![t.exp() - 1.0])
            })
            .collect();
        let g = lift_piecewise_linear(&rows, 3, 0.9).unwrap();
        let b = lift_branched_via_iota(&g).unwrap();
        // ladder over letters (i1, i2): leaf letter first
        let ladder = LabeledTree::node(1, vec![LabeledTree::node(0, vec![LabeledTree::leaf(1)])]);
        let word = Word(vec![1, 0, 1]);
        let a = b.coeff(0, 5, &TraceKey::Tree(ladder));
        let w = g.coeff(0, 5, &TraceKey::Word(word));
        assert!((a - w).abs() < 1e-12);
    }

    #[test]
    fn translate_zero_is_identity() {
        let rows = line_rows(4);
        let b = lift_branched_piecewise_linear(&rows, 3, 1.0).unwrap();
        let v = TreeTranslation::zero(3, 1);
        let tb = b.translate_branched(&v).unwrap();
        for i in 0..4 {
            for t in trees_up_to(3, 1) {
                let k = TraceKey::Tree(t);
                assert!((b.coeff(i, i + 1, &k) - tb.coeff(i, i + 1, &k)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn translation_preserves_chen() {
        let rows: Vec<(f64, Vec<f64>)> = (0..=6)
            .map(|i| {
                let t = i as f64 / 6.0;
                (t, vec![(2.0 * t).cos() - 1.0])
            })
            .collect();
        let b = lift_branched_piecewise_linear(&rows, 4, 0.5).unwrap();
        let v = TreeTranslation::ito_strat(2, 1);
        let tb = b.translate_branched(&v).unwrap();
        assert!(tb.chen_defect() <= b.chen_defect() + 1e-9);
    }

    #[test]
    fn ito_to_strat_on_level_two() {
        // translated Ito equals Strat up to the discrete quadratic variation
        let grid = uniform_grid(1.0, 256);
        let ito = brownian_lift(7, &grid, 1, BrownianScheme::Ito, 2, 0.4).unwrap();
        let strat = brownian_lift(7, &grid, 1, BrownianScheme::Stratonovich, 2, 0.4).unwrap();
        let v = TreeTranslation::ito_strat(2, 1);
        let conv = ito.translate_branched(&v).unwrap();
        let key = TraceKey::Tree(LabeledTree::node(1, vec![LabeledTree::leaf(1)]));
        let m = grid.len() - 1;
        let diff = (conv.coeff(0, m, &key) - strat.coeff(0, m, &key)).abs();
        // RMS scale at n = 256 is about 1/sqrt(2 n) ~ 0.044
        assert!(diff < 0.25, "diff = {diff}");
        // the increments themselves agree exactly
        let b1 = TraceKey::Tree(LabeledTree::leaf(1));
        assert!((conv.coeff(0, m, &b1) - strat.coeff(0, m, &b1)).abs() < 1e-12);
    }
}
