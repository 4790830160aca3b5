//! Finite discrete joint distributions as dense nonnegative tensors.
//!
//! A [`JointDistribution`] stores one probability per assignment of its
//! labeled axes, row-major with the last axis fastest. Slicing,
//! marginalization and the moment conversions for ±1-valued binary
//! variables are defined for both numeric backends; exact rationals make
//! the round-trip identities hold with equality rather than tolerance.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Default normalization tolerance for float-valued inputs. Far below any
/// factorization residual threshold, so normalization never masks error.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Binary encoding convention: axis index 0 is +1, index 1 is -1.
pub fn sign_of_index(index: usize) -> i8 {
    if index == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisSpec {
    pub name: String,
    pub cardinality: usize,
}

impl AxisSpec {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Self {
        AxisSpec { name: name.into(), cardinality }
    }
}

/// Iterates all index tuples of a shape, last axis fastest.
pub struct Assignments {
    cards: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Assignments {
    pub fn new(cards: &[usize]) -> Self {
        let done = cards.iter().any(|&c| c == 0);
        Assignments { cards: cards.to_vec(), current: vec![0; cards.len()], done }
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut i = self.cards.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.cards[i] {
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    axes: Vec<AxisSpec>,
    values: Vec<T>,
}

impl<T: Scalar> JointDistribution<T> {
    /// Validates and normalizes a dense probability tensor.
    ///
    /// Entries must be nonnegative and sum to 1 within `tolerance`; the
    /// stored values are rescaled so they sum to 1 exactly (up to the
    /// backend's arithmetic).
    pub fn from_values(axes: Vec<AxisSpec>, values: Vec<T>, tolerance: f64) -> Result<Self> {
        let mut seen = alloc::collections::BTreeSet::new();
        for axis in &axes {
            if axis.cardinality == 0 {
                return Err(Error::ZeroCardinality(axis.name.clone()));
            }
            if !seen.insert(axis.name.clone()) {
                return Err(Error::DuplicateName(axis.name.clone()));
            }
        }
        let expected: usize = axes.iter().map(|a| a.cardinality).product();
        if values.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: values.len() });
        }
        for (index, v) in values.iter().enumerate() {
            if *v < T::zero() {
                return Err(Error::NegativeEntry { index });
            }
        }
        let sum = values.iter().fold(T::zero(), |acc, v| acc + v.clone());
        let deviation = (sum.clone() - T::one()).abs().to_f64();
        if !(deviation <= tolerance) {
            return Err(Error::NotNormalized { sum: sum.to_f64() });
        }
        let values = values.into_iter().map(|v| v / sum.clone()).collect();
        Ok(JointDistribution { axes, values })
    }

    /// Two-axis distribution from a matrix; rows are the first axis.
    pub fn from_matrix(
        row_axis: AxisSpec,
        col_axis: AxisSpec,
        matrix: &Mat<T>,
        tolerance: f64,
    ) -> Result<Self> {
        if matrix.rows() != row_axis.cardinality || matrix.cols() != col_axis.cardinality {
            return Err(Error::ShapeMismatch {
                expected: row_axis.cardinality * col_axis.cardinality,
                got: matrix.rows() * matrix.cols(),
            });
        }
        Self::from_values(vec![row_axis, col_axis], matrix.values().to_vec(), tolerance)
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.cardinality).collect()
    }

    fn flat_index(&self, assignment: &[usize]) -> usize {
        debug_assert_eq!(assignment.len(), self.axes.len());
        let mut idx = 0;
        for (i, &v) in assignment.iter().enumerate() {
            debug_assert!(v < self.axes[i].cardinality);
            idx = idx * self.axes[i].cardinality + v;
        }
        idx
    }

    pub fn prob(&self, assignment: &[usize]) -> &T {
        &self.values[self.flat_index(assignment)]
    }

    pub fn assignments(&self) -> Assignments {
        Assignments::new(&self.shape())
    }

    /// Interprets a two-axis distribution as a matrix (rows = first axis).
    pub fn as_matrix(&self) -> Result<Mat<T>> {
        if self.axes.len() != 2 {
            return Err(Error::ShapeMismatch { expected: 2, got: self.axes.len() });
        }
        Mat::new(self.axes[0].cardinality, self.axes[1].cardinality, self.values.clone())
    }

    /// Sums out every axis not named in `keep`; axis order is preserved.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointDistribution<T>> {
        for name in keep {
            self.axis_index(name)?;
        }
        let kept: Vec<usize> = (0..self.axes.len())
            .filter(|&i| keep.iter().any(|k| *k == self.axes[i].name))
            .collect();
        let new_axes: Vec<AxisSpec> = kept.iter().map(|&i| self.axes[i].clone()).collect();
        let new_len: usize = new_axes.iter().map(|a| a.cardinality).product();
        let mut values = vec![T::zero(); new_len.max(1)];
        for assignment in self.assignments() {
            let mut idx = 0;
            for &axis in &kept {
                idx = idx * self.axes[axis].cardinality + assignment[axis];
            }
            values[idx] = values[idx].clone() + self.prob(&assignment).clone();
        }
        Ok(JointDistribution { axes: new_axes, values })
    }

    /// Marginal probability of one assignment of a subset of axes.
    pub fn event_prob(&self, event: &[(&str, usize)]) -> Result<T> {
        let mut indices = Vec::with_capacity(event.len());
        for (name, value) in event {
            let axis = self.axis_index(name)?;
            if *value >= self.axes[axis].cardinality {
                return Err(Error::ShapeMismatch {
                    expected: self.axes[axis].cardinality,
                    got: *value,
                });
            }
            indices.push((axis, *value));
        }
        let mut total = T::zero();
        for assignment in self.assignments() {
            if indices.iter().all(|&(axis, value)| assignment[axis] == value) {
                total = total + self.prob(&assignment).clone();
            }
        }
        Ok(total)
    }

    /// Conditions on `variable = value` and renormalizes the rest.
    pub fn condition(&self, variable: &str, value: usize) -> Result<ConditionalSlice<T>> {
        let axis = self.axis_index(variable)?;
        if value >= self.axes[axis].cardinality {
            return Err(Error::ShapeMismatch { expected: self.axes[axis].cardinality, got: value });
        }
        let weight = self.event_prob(&[(variable, value)])?;
        if weight.is_zero() {
            return Err(Error::ZeroConditioningEvent {
                variable: variable.to_string(),
                value,
            });
        }
        let new_axes: Vec<AxisSpec> =
            self.axes.iter().enumerate().filter(|&(i, _)| i != axis).map(|(_, a)| a.clone()).collect();
        let new_len: usize = new_axes.iter().map(|a| a.cardinality).product();
        let mut values = vec![T::zero(); new_len.max(1)];
        for assignment in self.assignments() {
            if assignment[axis] != value {
                continue;
            }
            let mut idx = 0;
            for (i, &v) in assignment.iter().enumerate() {
                if i == axis {
                    continue;
                }
                idx = idx * self.axes[i].cardinality + v;
            }
            values[idx] = values[idx].clone() + self.prob(&assignment).clone() / weight.clone();
        }
        Ok(ConditionalSlice {
            variable: variable.to_string(),
            value,
            weight,
            dist: JointDistribution { axes: new_axes, values },
        })
    }

    /// Checks `X ⊥ Y | Z` by comparing `P(x,y,z)·P(z)` with `P(x,z)·P(y,z)`
    /// on every assignment. Exact when the backend is exact and
    /// `tolerance == 0`.
    pub fn conditionally_independent(
        &self,
        x_set: &[&str],
        y_set: &[&str],
        given: &[&str],
        tolerance: f64,
    ) -> Result<bool> {
        let mut union: Vec<&str> = Vec::new();
        union.extend_from_slice(x_set);
        union.extend_from_slice(y_set);
        union.extend_from_slice(given);
        let joint = self.marginalize(&union)?;

        let mut xz: Vec<&str> = x_set.to_vec();
        xz.extend_from_slice(given);
        let mut yz: Vec<&str> = y_set.to_vec();
        yz.extend_from_slice(given);
        let p_xz = joint.marginalize(&xz)?;
        let p_yz = joint.marginalize(&yz)?;
        let p_z = joint.marginalize(given)?;

        let tol = T::from_f64(tolerance);
        for assignment in joint.assignments() {
            let pick = |dist: &JointDistribution<T>| -> T {
                let sub: Vec<usize> = dist
                    .axes
                    .iter()
                    .map(|a| {
                        let i = joint.axis_index(&a.name).expect("axis subset");
                        assignment[i]
                    })
                    .collect();
                dist.prob(&sub).clone()
            };
            let lhs = joint.prob(&assignment).clone() * pick(&p_z);
            let rhs = pick(&p_xz) * pick(&p_yz);
            if (lhs - rhs).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_f64(&self) -> JointDistribution<f64> {
        JointDistribution {
            axes: self.axes.clone(),
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// A distribution conditioned on one value of one variable.
#[derive(Debug, Clone)]
pub struct ConditionalSlice<T> {
    pub variable: String,
    pub value: usize,
    /// Probability of the conditioning event in the base distribution.
    pub weight: T,
    pub dist: JointDistribution<T>,
}

/// Moments of ±1-valued binary variables: one expectation value per
/// nonempty subset of the variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationTable<T> {
    names: Vec<String>,
    /// Indexed by subset bitmask minus one (mask 1..2^n).
    moments: Vec<T>,
}

impl<T: Scalar> ExpectationTable<T> {
    pub fn new(names: Vec<String>, moments: Vec<T>) -> Result<Self> {
        let n = names.len();
        let expected = (1usize << n) - 1;
        if moments.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: moments.len() });
        }
        for m in &moments {
            if m.abs() > T::one() {
                return Err(Error::OutOfRange { value: m.to_f64() });
            }
        }
        Ok(ExpectationTable { names, moments })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    /// Moment of the subset given by variable indices, e.g. `[0, 2]` for
    /// ⟨V₁V₃⟩.
    pub fn moment(&self, vars: &[usize]) -> &T {
        let mut mask = 0usize;
        for &v in vars {
            mask |= 1 << v;
        }
        assert!(mask != 0, "empty subset has no moment");
        &self.moments[mask - 1]
    }
}

/// Moments from probabilities: ⟨V_{i₁}…V_{i_k}⟩ = Σ_v v_{i₁}…v_{i_k} P(v).
pub fn probs_to_expectations<T: Scalar>(
    dist: &JointDistribution<T>,
) -> Result<ExpectationTable<T>> {
    let n = dist.axes().len();
    for axis in dist.axes() {
        if axis.cardinality != 2 {
            return Err(Error::NonBinaryAxis {
                axis: axis.name.clone(),
                cardinality: axis.cardinality,
            });
        }
    }
    let mut moments = vec![T::zero(); (1 << n) - 1];
    for assignment in dist.assignments() {
        let p = dist.prob(&assignment).clone();
        for mask in 1usize..(1 << n) {
            let mut sign = 1i8;
            for (i, &v) in assignment.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sign *= sign_of_index(v);
                }
            }
            let term = if sign > 0 { p.clone() } else { -p.clone() };
            moments[mask - 1] = moments[mask - 1].clone() + term;
        }
    }
    let names = dist.axes().iter().map(|a| a.name.clone()).collect();
    ExpectationTable::new(names, moments)
}

/// Probabilities from moments:
/// P(v₁…vₙ) = 2⁻ⁿ (1 + Σ_k Σ_{i₁<…<i_k} v_{i₁}…v_{i_k} ⟨V_{i₁}…V_{i_k}⟩).
///
/// Fails with `InfeasibleMoments` when any induced probability is below
/// `-tolerance`; values within the tolerance band are clamped to zero.
pub fn expectations_to_probs<T: Scalar>(
    table: &ExpectationTable<T>,
    tolerance: f64,
) -> Result<JointDistribution<T>> {
    let n = table.n();
    let tol = T::from_f64(tolerance);
    let scale = T::from_ratio(1, 1 << n);
    let mut values = Vec::with_capacity(1 << n);
    for assignment in Assignments::new(&vec![2; n]) {
        let mut acc = T::one();
        for mask in 1usize..(1 << n) {
            let mut sign = 1i8;
            for (i, &v) in assignment.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sign *= sign_of_index(v);
                }
            }
            let m = table.moments()[mask - 1].clone();
            acc = if sign > 0 { acc + m } else { acc - m };
        }
        let p = scale.clone() * acc;
        if p < -tol.clone() {
            return Err(Error::InfeasibleMoments { probability: p.to_f64() });
        }
        values.push(if p < T::zero() { T::zero() } else { p });
    }
    let axes = table.names().iter().map(|name| AxisSpec::new(name.clone(), 2)).collect();
    JointDistribution::from_values(axes, values, tolerance.max(NORMALIZATION_TOL))
}
