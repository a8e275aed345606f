//! Polynomial vector fields, symbolic elementary differentials, translated
//! fields, and the branched Euler scheme used for the driver-vs-field
//! equivalence experiments.
//!
//! The per-tree scheme weight is calibrated once against exact smooth
//! flows and committed as a fixture; with the basis-delta pairing used
//! throughout this crate it is the inverse symmetry factor, and the same
//! normalization makes the tree-to-field assignment a pre-Lie morphism.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{AlgebraError, TraceError};
use crate::freevec::{LinComb, Rational};
use crate::poly::MultiPoly;
use crate::roughpath::{RoughPathTrace, TraceKey};
use crate::translation::TreeTranslation;
use crate::tree::{trees_up_to, LabeledTree};

/// A collection `f_0, ..., f_d` of polynomial vector fields on R^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    state_dim: usize,
    components: Vec<Vec<MultiPoly>>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Vec<MultiPoly>>, state_dim: usize) -> Result<Self, AlgebraError> {
        for comp in &components {
            if comp.len() != state_dim {
                return Err(AlgebraError::DimensionMismatch(comp.len(), state_dim));
            }
            for p in comp {
                if p.vars() != state_dim {
                    return Err(AlgebraError::DimensionMismatch(p.vars(), state_dim));
                }
            }
        }
        Ok(PolyVectorField { state_dim, components })
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    /// Number of driver directions (including the time direction 0).
    pub fn directions(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: u8) -> &[MultiPoly] {
        &self.components[usize::from(i)]
    }
}

/// `(a.D) |> (b.D) = (a.D b).D`: the pre-Lie product of vector fields.
pub fn field_pre_lie(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let e = a.len();
    (0..e)
        .map(|k| {
            let mut out = MultiPoly::zero(e);
            for j in 0..e {
                out = out.add(&b[k].partial(j).mul(&a[j]));
            }
            out
        })
        .collect()
}

/// Lie bracket of vector fields.
pub fn field_bracket(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let ab = field_pre_lie(a, b);
    let ba = field_pre_lie(b, a);
    ab.iter().zip(&ba).map(|(x, y)| x.sub(y)).collect()
}

/// Caches the elementary differentials of one vector field collection.
pub struct ElementaryDifferentials<'a> {
    field: &'a PolyVectorField,
    cache: HashMap<LabeledTree, Vec<MultiPoly>>,
}

impl<'a> ElementaryDifferentials<'a> {
    pub fn new(field: &'a PolyVectorField) -> Self {
        ElementaryDifferentials { field, cache: HashMap::new() }
    }

    /// The recursive elementary differential: a single node is its own
    /// direction field, and a branching node evaluates the corresponding
    /// derivative of its root's field on the children's differentials.
    pub fn get(&mut self, tau: &LabeledTree) -> Result<Vec<MultiPoly>, AlgebraError> {
        if usize::from(tau.label()) >= self.field.directions() {
            return Err(AlgebraError::LabelOutOfRange {
                label: tau.label(),
                max: (self.field.directions() - 1) as u8,
            });
        }
        if let Some(hit) = self.cache.get(tau) {
            return Ok(hit.clone());
        }
        let e = self.field.state_dim;
        let base = self.field.component(tau.label()).to_vec();
        let result = if tau.children().is_empty() {
            base
        } else {
            let children: Vec<Vec<MultiPoly>> = tau
                .children()
                .iter()
                .map(|c| self.get(c))
                .collect::<Result<_, _>>()?;
            let n = children.len();
            // sum over derivative multi-indices of the root's field
            let mut out = vec![MultiPoly::zero(e); e];
            let mut index = vec![0usize; n];
            loop {
                for k in 0..e {
                    let mut term = base[k].clone();
                    for &j in &index {
                        term = term.partial(j);
                        if term.is_zero() {
                            break;
                        }
                    }
                    if term.is_zero() {
                        continue;
                    }
                    for (m, &j) in index.iter().enumerate() {
                        term = term.mul(&children[m][j]);
                        if term.is_zero() {
                            break;
                        }
                    }
                    out[k] = out[k].add(&term);
                }
                // next multi-index
                let mut m = 0;
                while m < n {
                    index[m] += 1;
                    if index[m] < e {
                        break;
                    }
                    index[m] = 0;
                    m += 1;
                }
                if m == n {
                    break;
                }
            }
            out
        };
        self.cache.insert(tau.clone(), result.clone());
        Ok(result)
    }

    /// The canonical morphism into vector fields: the sum of the series'
    /// elementary differentials weighted by the inverse symmetry factors.
    pub fn of_series(&mut self, x: &LinComb<LabeledTree>) -> Result<Vec<MultiPoly>, AlgebraError> {
        let e = self.field.state_dim;
        let mut out = vec![MultiPoly::zero(e); e];
        for (t, c) in x.iter() {
            let diff = self.get(t)?;
            let w = c / Rational::from_integer(t.symmetry_factor());
            for k in 0..e {
                out[k] = out[k].add(&diff[k].scaled(&w));
            }
        }
        Ok(out)
    }
}

/// Convenience wrapper for a single elementary differential.
pub fn elementary_differential(
    field: &PolyVectorField,
    tau: &LabeledTree,
) -> Result<Vec<MultiPoly>, AlgebraError> {
    ElementaryDifferentials::new(field).get(tau)
}

/// The translated field: each direction picks up the canonical field of
/// its translation series.
pub fn translated_field(
    field: &PolyVectorField,
    v: &TreeTranslation,
) -> Result<PolyVectorField, AlgebraError> {
    if v.dim() + 1 != field.directions() {
        return Err(AlgebraError::DimensionMismatch(v.dim() + 1, field.directions()));
    }
    let mut diffs = ElementaryDifferentials::new(field);
    let mut components = Vec::with_capacity(field.directions());
    for i in 0..field.directions() {
        let extra = diffs.of_series(v.entry(i as u8))?;
        let comp = field
            .component(i as u8)
            .iter()
            .zip(&extra)
            .map(|(a, b)| a.add(b))
            .collect();
        components.push(comp);
    }
    PolyVectorField::new(components, field.state_dim)
}

const CALIBRATION: &str = include_str!("../fixtures/euler_calibration.json");

/// The committed per-shape scheme weight. The fixture pins the calibrated
/// convention; the value for any labelled tree is computed from its own
/// symmetry factor, which agrees with the fixture on the single-label
/// shapes it lists.
pub fn euler_coefficient(tau: &LabeledTree) -> Rational {
    match calibration_convention() {
        EulerConvention::InverseSymmetry => {
            Rational::new(1.into(), tau.symmetry_factor())
        }
        EulerConvention::Unit => Rational::one(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EulerConvention {
    InverseSymmetry,
    Unit,
}

pub fn calibration_convention() -> EulerConvention {
    let value: serde_json::Value =
        serde_json::from_str(CALIBRATION).expect("fixture parses");
    match value["convention"].as_str() {
        Some("inverse_symmetry") => EulerConvention::InverseSymmetry,
        Some("unit") => EulerConvention::Unit,
        other => panic!("unknown calibration convention {other:?}"),
    }
}

/// The fixture's explicit shape table (single-label trees).
pub fn calibration_shapes() -> Vec<(LabeledTree, Rational)> {
    let value: serde_json::Value = serde_json::from_str(CALIBRATION).expect("fixture parses");
    value["shapes"]
        .as_object()
        .expect("shapes table")
        .iter()
        .map(|(k, v)| {
            let tree = crate::expr::parse_tree(k).expect("fixture tree parses");
            let c = crate::freevec::parse_rational(v.as_str().expect("string value"))
                .expect("fixture value parses");
            (tree, c)
        })
        .collect()
}

/// One explicit step of the branched Euler scheme on a sampled trace:
/// `y + sum over trees of c(tau) <X_{k,k+1}, tau> f_tau(y)`.
pub fn euler_step(
    field: &PolyVectorField,
    diffs: &mut ElementaryDifferentials,
    trace: &RoughPathTrace,
    k: usize,
    y: &[f64],
    level: usize,
) -> Result<Vec<f64>, TraceError> {
    if level > trace.level() {
        return Err(TraceError::LevelShortfall { have: trace.level(), need: level });
    }
    let _ = field;
    let pair = trace.pair(k, k + 1);
    let mut out = y.to_vec();
    for tau in trees_up_to(level, trace.dim()) {
        let x = match pair.get(&TraceKey::Tree(tau.clone())) {
            Some(v) => *v,
            None => continue,
        };
        if x == 0.0 {
            continue;
        }
        let c = crate::bhz::rational_to_f64(&euler_coefficient(&tau));
        let f_tau = diffs.get(&tau).map_err(TraceError::Algebra)?;
        for (i, p) in f_tau.iter().enumerate() {
            out[i] += c * x * p.eval_f64(y);
        }
    }
    Ok(out)
}

/// Exact-arithmetic Euler step against an exact group element (used by the
/// smooth-driver calibration checks).
pub fn euler_step_exact(
    field: &PolyVectorField,
    element: &LinComb<crate::tree::Forest>,
    y: &[Rational],
    level: usize,
    dim: usize,
) -> Result<Vec<Rational>, AlgebraError> {
    let mut diffs = ElementaryDifferentials::new(field);
    let mut out = y.to_vec();
    for tau in trees_up_to(level, dim) {
        let x = element.coeff(&crate::tree::Forest::single(tau.clone()));
        if x.is_zero() {
            continue;
        }
        let c = euler_coefficient(&tau);
        let f_tau = diffs.get(&tau)?;
        for (i, p) in f_tau.iter().enumerate() {
            out[i] += &c * &x * p.eval_rational(y);
        }
    }
    Ok(out)
}

/// Steps the scheme across the whole grid; returns the trajectory.
pub fn solve(
    field: &PolyVectorField,
    trace: &RoughPathTrace,
    y0: &[f64],
    level: usize,
) -> Result<Vec<Vec<f64>>, TraceError> {
    let mut diffs = ElementaryDifferentials::new(field);
    let mut out = Vec::with_capacity(trace.steps() + 1);
    let mut y = y0.to_vec();
    out.push(y.clone());
    for k in 0..trace.steps() {
        y = euler_step(field, &mut diffs, trace, k, &y, level)?;
        out.push(y.clone());
    }
    Ok(out)
}

/// Runs both sides of the driver-vs-field equivalence on one trace:
/// translate the driver and solve with the original field (at
/// `driver_level`), or keep the driver and solve with the translated field
/// (at `field_level`). Returns the maximum state discrepancy along the
/// trajectory.
pub fn equivalence_experiment(
    field: &PolyVectorField,
    v: &TreeTranslation,
    trace: &RoughPathTrace,
    y0: &[f64],
    driver_level: usize,
    field_level: usize,
) -> Result<f64, TraceError> {
    let translated_trace = trace.translate_branched(v)?;
    let side_a = solve(field, &translated_trace, y0, driver_level)?;
    let fv = translated_field(field, v).map_err(TraceError::Algebra)?;
    let side_b = solve(&fv, trace, y0, field_level)?;
    let mut worst: f64 = 0.0;
    for (a, b) in side_a.iter().zip(&side_b) {
        for (x, y) in a.iter().zip(b) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

/// Exact group element of the constant-speed time segment: the dual-product
/// exponential of `h` times the time node, truncated.
pub fn time_segment_exact(
    h: &Rational,
    level: usize,
) -> Result<LinComb<crate::tree::Forest>, AlgebraError> {
    let x = crate::forest::ForestPoly::new(
        LinComb::term(crate::tree::Forest::single(LabeledTree::leaf(0)), h.clone()),
        level,
        0,
    )?;
    Ok(crate::forest::exp_star(&x)?.value().clone())
}

/// Estimated convergence order from a sequence of (step count, error)
/// pairs: the least-squares slope of log2(error) against log2(n), negated.
pub fn observed_order(samples: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(n, e)| ((*n as f64).log2(), e.log2()))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    -((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freevec::{rat, rat_int};
    use crate::roughpath::lift_branched_piecewise_linear;

    fn leaf(i: u8) -> LabeledTree {
        LabeledTree::leaf(i)
    }

    fn node(i: u8, c: Vec<LabeledTree>) -> LabeledTree {
        LabeledTree::node(i, c)
    }

    fn scalar_field(polys: &[&str]) -> PolyVectorField {
        let components = polys
            .iter()
            .map(|p| vec![MultiPoly::parse(p, 1).unwrap()])
            .collect();
        PolyVectorField::new(components, 1).unwrap()
    }

    #[test]
    fn elementary_differential_examples() {
        // f_{[o1]_{o2}} = f1 |> f2 on a two-direction field over R^2
        let f1 = vec![MultiPoly::parse("y2", 2).unwrap(), MultiPoly::parse("y1^2", 2).unwrap()];
        let f2 = vec![MultiPoly::parse("y1*y2", 2).unwrap(), MultiPoly::parse("1", 2).unwrap()];
        let f0 = vec![MultiPoly::constant(rat_int(0), 2), MultiPoly::constant(rat_int(0), 2)];
        let field = PolyVectorField::new(vec![f0, f1.clone(), f2.clone()], 2).unwrap();
        let got = elementary_differential(&field, &node(2, vec![leaf(1)])).unwrap();
        assert_eq!(got, field_pre_lie(&f1, &f2));

        // linear fields kill any tree with a branching node
        let lin = scalar_field(&["2*y1"]);
        let bushy = node(0, vec![leaf(0), leaf(0)]);
        assert!(elementary_differential(&lin, &bushy).unwrap()[0].is_zero());

        // e = 1, f = y^2: f_{[o]_o} = 2 y^3
        let sq = scalar_field(&["y1^2"]);
        let got = elementary_differential(&sq, &node(0, vec![leaf(0)])).unwrap();
        assert_eq!(got[0], MultiPoly::parse("2*y1^3", 1).unwrap());
    }

    #[test]
    fn attach_graft_morphism_raw() {
        // raw differentials are a pre-Lie morphism for the vertex-attach
        // grafting
        let field = scalar_field(&["1/2*y1^2 + 1", "y1^3 - y1"]);
        let mut diffs = ElementaryDifferentials::new(&field);
        for s in trees_up_to(2, 1) {
            for t in trees_up_to(2, 1) {
                if s.nodes() + t.nodes() > 3 {
                    continue;
                }
                let grafted = crate::forest::attach_graft(&s, &t);
                let mut lhs = vec![MultiPoly::zero(1); 1];
                for (g, c) in grafted.iter() {
                    let d = diffs.get(g).unwrap();
                    lhs[0] = lhs[0].add(&d[0].scaled(c));
                }
                let rhs = field_pre_lie(&diffs.get(&s).unwrap(), &diffs.get(&t).unwrap());
                assert_eq!(lhs[0], rhs[0], "raw morphism fails at {s:?} -> {t:?}");
            }
        }
    }

    #[test]
    fn cut_graft_morphism_normalized() {
        // the sigma-normalized assignment is a pre-Lie morphism for the
        // cut-counting grafting
        let field = scalar_field(&["1/2*y1^2 + 1", "y1^3 - y1"]);
        let mut diffs = ElementaryDifferentials::new(&field);
        for s in trees_up_to(2, 1) {
            for t in trees_up_to(2, 1) {
                if s.nodes() + t.nodes() > 3 {
                    continue;
                }
                let grafted = crate::forest::graft(&s, &t);
                let lhs = diffs.of_series(&grafted).unwrap();
                let fs = diffs.of_series(&LinComb::basis(s.clone())).unwrap();
                let ft = diffs.of_series(&LinComb::basis(t.clone())).unwrap();
                let rhs = field_pre_lie(&fs, &ft);
                assert_eq!(lhs[0], rhs[0], "normalized morphism fails at {s:?} -> {t:?}");
            }
        }
    }

    #[test]
    fn translated_field_examples() {
        let f1 = vec![MultiPoly::parse("y2", 2).unwrap(), MultiPoly::parse("y1", 2).unwrap()];
        let f2 = vec![MultiPoly::parse("y1*y2", 2).unwrap(), MultiPoly::parse("y2", 2).unwrap()];
        let f0 = vec![MultiPoly::parse("1", 2).unwrap(), MultiPoly::parse("0", 2).unwrap()];
        let field = PolyVectorField::new(vec![f0.clone(), f1.clone(), f2.clone()], 2).unwrap();

        // v = 0 leaves the field alone
        let z = TreeTranslation::zero(2, 2);
        assert_eq!(translated_field(&field, &z).unwrap(), field);

        // v0 = [o1]_{o2}: time direction picks up f1 |> f2
        let v = TreeTranslation::special(
            LinComb::basis(node(2, vec![leaf(1)])),
            2,
            2,
        )
        .unwrap();
        let fv = translated_field(&field, &v).unwrap();
        let want = field_pre_lie(&f1, &f2);
        for k in 0..2 {
            assert_eq!(fv.component(0)[k], f0[k].add(&want[k]));
            assert_eq!(fv.component(1)[k], f1[k]);
        }
    }

    #[test]
    fn calibration_fixture_is_inverse_symmetry() {
        assert_eq!(calibration_convention(), EulerConvention::InverseSymmetry);
        for (tree, c) in calibration_shapes() {
            assert_eq!(euler_coefficient(&tree), c, "fixture mismatch at {tree:?}");
        }
    }

    #[test]
    fn euler_reproduces_exponential_exactly() {
        // f0 = y, driver = time: the step equals the truncated exponential
        // series, exactly, at every level up to 4
        let field = scalar_field(&["y1"]);
        for level in 1..=4usize {
            let h = rat(1, 3);
            let seg = time_segment_exact(&h, level).unwrap();
            let y = vec![rat(5, 7)];
            let got = euler_step_exact(&field, &seg, &y, level, 0).unwrap();
            let mut want = Rational::zero();
            let mut term = y[0].clone();
            let mut k = 0usize;
            loop {
                want += &term;
                k += 1;
                if k > level {
                    break;
                }
                term = term * &h / rat_int(k as i64);
            }
            assert_eq!(got[0], want, "level {level}");
        }
    }

    #[test]
    fn euler_order_on_riccati() {
        // f0 = y^2, time driver: exact flow y/(1 - h y); observed order >= L
        let field = scalar_field(&["y1^2"]);
        let level = 2usize;
        let y0 = 1.0f64;
        let t_max = 0.5;
        let mut samples = Vec::new();
        for &n in &[16usize, 32, 64, 128] {
            let rows: Vec<(f64, Vec<f64>)> = (0..=n)
                .map(|i| (t_max * i as f64 / n as f64, vec![]))
                .collect();
            let trace = lift_branched_piecewise_linear(&rows, level, 1.0).unwrap();
            let traj = solve(&field, &trace, &[y0], level).unwrap();
            let yt = traj.last().unwrap()[0];
            let exact = y0 / (1.0 - t_max * y0);
            samples.push((n, (yt - exact).abs()));
        }
        let order = observed_order(&samples);
        assert!(order >= level as f64 - 0.1, "observed order {order}");
    }

    #[test]
    fn equivalence_zero_translation_is_exact() {
        let f0 = vec![MultiPoly::parse("1", 2).unwrap(), MultiPoly::parse("0", 2).unwrap()];
        let f1 = vec![MultiPoly::parse("y2", 2).unwrap(), MultiPoly::parse("y1", 2).unwrap()];
        let f2 = vec![MultiPoly::parse("0.2*y1", 2).unwrap(), MultiPoly::parse("0.1", 2).unwrap()];
        let field = PolyVectorField::new(vec![f0, f1, f2], 2).unwrap();
        let rows: Vec<(f64, Vec<f64>)> = (0..=16)
            .map(|i| {
                let t = i as f64 / 16.0;
                (t, vec![(2.0 * t).sin(), t * t])
            })
            .collect();
        let trace = lift_branched_piecewise_linear(&rows, 3, 1.0).unwrap();
        let v = TreeTranslation::zero(3, 2);
        let disc = equivalence_experiment(&field, &v, &trace, &[0.1, 0.2], 3, 3).unwrap();
        assert_eq!(disc, 0.0);
    }

    #[test]
    fn equivalence_detects_symmetric_normalization() {
        // a direction with a symmetric tree (sigma = 2) probes the 1/sigma
        // weight in the translated field; the discrepancy must shrink at
        // second order under refinement
        let field = scalar_field(&["1", "1/4*y1^2 - 1/2"]);
        let v = TreeTranslation::special(
            LinComb::term(node(1, vec![leaf(1), leaf(1)]), rat(1, 2)),
            3,
            1,
        )
        .unwrap();
        let mut samples = Vec::new();
        for &n in &[16usize, 32, 64] {
            let rows: Vec<(f64, Vec<f64>)> = (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    (t, vec![(1.3 * t).sin()])
                })
                .collect();
            let trace = lift_branched_piecewise_linear(&rows, 6, 1.0).unwrap();
            let disc = equivalence_experiment(&field, &v, &trace, &[0.3], 6, 2).unwrap();
            samples.push((n, disc));
        }
        let order = observed_order(&samples);
        assert!(order >= 1.5, "observed order {order}, samples {samples:?}");
    }
}
