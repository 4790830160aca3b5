//! Discrete causal models: a DAG plus one conditional probability table per
//! variable, and the exact joint distribution they induce.
//!
//! The joint is the Markov factorization `P(V) = Π_v P(v | parents(v))`,
//! evaluated by direct summation rather than sampling, so model-generated
//! distributions are exact (to the backend's arithmetic) and usable as
//! ground truth.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::dist::{AxisSpec, JointDistribution, NORMALIZATION_TOL};
use crate::error::{Error, Result};
use crate::graph::{CausalGraph, VariableSpec};
use crate::scalar::Scalar;

/// Conditional probability table for one variable: one distribution row per
/// assignment of its parents (row-major over the parents in graph index
/// order).
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Cpt<T> {
    pub fn new(rows: Vec<Vec<T>>, tolerance: f64) -> Result<Self> {
        let tol = T::from_f64(tolerance);
        for row in &rows {
            for (index, v) in row.iter().enumerate() {
                if *v < T::zero() {
                    return Err(Error::NegativeEntry { index });
                }
            }
            let sum = row.iter().fold(T::zero(), |acc, v| acc + v.clone());
            if (sum.clone() - T::one()).abs() > tol {
                return Err(Error::NotNormalized { sum: sum.to_f64() });
            }
        }
        Ok(Cpt { rows })
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteModel<T> {
    graph: CausalGraph,
    cpts: Vec<Cpt<T>>,
}

impl<T: Scalar> DiscreteModel<T> {
    /// Validates that each variable has a table of the right shape: one row
    /// per parent assignment, one entry per value of the variable.
    pub fn new(graph: CausalGraph, cpts: Vec<Cpt<T>>) -> Result<Self> {
        if cpts.len() != graph.len() {
            return Err(Error::ShapeMismatch { expected: graph.len(), got: cpts.len() });
        }
        for (i, cpt) in cpts.iter().enumerate() {
            let expected_rows: usize =
                graph.parents(i).iter().map(|&p| graph.variable(p).cardinality).product();
            if cpt.rows.len() != expected_rows {
                return Err(Error::ShapeMismatch { expected: expected_rows, got: cpt.rows.len() });
            }
            let card = graph.variable(i).cardinality;
            for row in &cpt.rows {
                if row.len() != card {
                    return Err(Error::ShapeMismatch { expected: card, got: row.len() });
                }
            }
        }
        Ok(DiscreteModel { graph, cpts })
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    /// Exact joint distribution over all variables, axes in declaration
    /// order.
    pub fn joint(&self) -> JointDistribution<T> {
        let axes: Vec<AxisSpec> = self
            .graph
            .variables()
            .iter()
            .map(|v| AxisSpec::new(v.name.clone(), v.cardinality))
            .collect();
        let cards: Vec<usize> = axes.iter().map(|a| a.cardinality).collect();
        let mut values = Vec::with_capacity(cards.iter().product());
        for assignment in crate::dist::Assignments::new(&cards) {
            let mut p = T::one();
            for (i, cpt) in self.cpts.iter().enumerate() {
                let mut row = 0;
                for &parent in self.graph.parents(i) {
                    row = row * self.graph.variable(parent).cardinality + assignment[parent];
                }
                p = p * cpt.rows[row][assignment[i]].clone();
            }
            values.push(p);
        }
        JointDistribution::from_values(axes, values, NORMALIZATION_TOL)
            .expect("normalized rows multiply to a normalized joint")
    }

    /// Model with every table row drawn from the backend's random simplex:
    /// uniform weights normalized exactly. Rational models use small random
    /// integer weights, so the joint stays exactly representable.
    pub fn random(graph: CausalGraph, rng: &mut impl Rng) -> Self {
        let cpts = graph
            .variables()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let rows_count: usize =
                    graph.parents(i).iter().map(|&p| graph.variable(p).cardinality).product();
                let rows = (0..rows_count)
                    .map(|_| random_simplex::<T>(v.cardinality, rng))
                    .collect();
                Cpt { rows }
            })
            .collect();
        DiscreteModel { graph, cpts }
    }
}

/// Random distribution over `n` values with exactly representable entries:
/// integer weights in `1..=16` normalized by their sum.
pub fn random_simplex<T: Scalar>(n: usize, rng: &mut impl Rng) -> Vec<T> {
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=16)).collect();
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| T::from_ratio(w, total)).collect()
}

/// Random DAG over `n` observed variables named `V0..`, with cardinalities
/// in `2..=max_card` and each forward edge present with probability ~1/2.
pub fn random_dag(n: usize, max_card: usize, rng: &mut impl Rng) -> CausalGraph {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let variables: Vec<VariableSpec> = (0..n)
        .map(|i| VariableSpec::observed(alloc::format!("V{i}"), rng.gen_range(2..=max_card)))
        .collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((order[i], order[j]));
            }
        }
    }
    let names: Vec<(String, String)> = edges
        .iter()
        .map(|&(f, t)| (variables[f].name.clone(), variables[t].name.clone()))
        .collect();
    let edge_refs: Vec<(&str, &str)> =
        names.iter().map(|(f, t)| (f.as_str(), t.as_str())).collect();
    CausalGraph::build(variables, &edge_refs).expect("forward edges cannot form a cycle")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn fork_joint_matches_hand_sum() {
        // Z -> X, Z -> Y with |Z|=2: P(x,y) = sum_z P(z) P(x|z) P(y|z).
        let graph = CausalGraph::build(
            vec![
                VariableSpec::observed("X", 2),
                VariableSpec::observed("Y", 2),
                VariableSpec::hidden("Z", 2),
            ],
            &[("Z", "X"), ("Z", "Y")],
        )
        .unwrap();
        let p_z = vec![rat(1, 4), rat(3, 4)];
        let x_given_z = vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 3), rat(2, 3)]];
        let y_given_z = vec![vec![rat(1, 5), rat(4, 5)], vec![rat(2, 5), rat(3, 5)]];
        let model = DiscreteModel::new(
            graph,
            vec![
                Cpt::new(x_given_z.clone(), 0.0).unwrap(),
                Cpt::new(y_given_z.clone(), 0.0).unwrap(),
                Cpt::new(vec![p_z.clone()], 0.0).unwrap(),
            ],
        )
        .unwrap();
        let joint = model.joint();
        let marginal = joint.marginalize(&["X", "Y"]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let expected: Rational = (0..2)
                    .map(|z| p_z[z].clone() * x_given_z[z][x].clone() * y_given_z[z][y].clone())
                    .fold(rat(0, 1), |a, b| a + b);
                assert_eq!(*marginal.prob(&[x, y]), expected);
            }
        }
    }

    #[test]
    fn cpt_shape_validated() {
        let graph = CausalGraph::build(
            vec![VariableSpec::observed("A", 2), VariableSpec::observed("B", 2)],
            &[("A", "B")],
        )
        .unwrap();
        // B needs 2 rows (one per value of A).
        let bad = DiscreteModel::new(
            graph,
            vec![
                Cpt::new(vec![vec![rat(1, 2), rat(1, 2)]], 0.0).unwrap(),
                Cpt::new(vec![vec![rat(1, 2), rat(1, 2)]], 0.0).unwrap(),
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn random_models_are_exactly_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let g = random_dag(5, 3, &mut rng);
            let model = DiscreteModel::<Rational>::random(g, &mut rng);
            let joint = model.joint();
            let total: Rational =
                joint.values().iter().fold(rat(0, 1), |a, b| a + b.clone());
            assert_eq!(total, rat(1, 1));
        }
    }
}
