//! Toom-Cook transform generation from root points.
//!
//! A point set of size n_h + n_o − 1 (optionally containing the pseudo-point
//! ∞, the "modified" variant) yields the three transforms of
//! F(n_o×n_o, n_h×n_h): evaluation matrices are plain Vandermonde rows
//! [p⁰ … p^{k−1}] (with [0,…,0,1] for ∞), and the reconstruction matrix is
//! the exact inverse of the square evaluation matrix — Lagrange
//! interpolation done once, exactly. Any row rescaling of these matrices
//! yields another valid algorithm; correctness is bound to the composed
//! exactness oracle, not to a display convention.
//!
//! The same generator doubles as the sub-solver for superlinear moduli
//! (`winograd` builds F(d×d, d×d) algorithms over residue polynomials).

use std::fmt;

use num::traits::{One, Zero};

use crate::exact::{format_rational, parse_rational, rat, Rational};
use crate::matrix::Matrix;
use crate::winograd::{Modulus, TransformSet};
use crate::{Error, Result};

/// A root point: a rational evaluation point or the pseudo-point ∞.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RootPoint {
    Finite(Rational),
    Infinity,
}

impl RootPoint {
    pub fn finite(num: i64, den: i64) -> Self {
        RootPoint::Finite(rat(num, den))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, RootPoint::Infinity)
    }

    /// Parses `"inf"`/`"∞"` or a rational literal.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            Ok(RootPoint::Infinity)
        } else {
            Ok(RootPoint::Finite(parse_rational(t)?))
        }
    }
}

impl fmt::Display for RootPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootPoint::Finite(r) => write!(f, "{}", format_rational(r)),
            RootPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Ordered, duplicate-free list of root points with at most one ∞.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointSet {
    points: Vec<RootPoint>,
}

impl PointSet {
    pub fn new(points: Vec<RootPoint>) -> Result<Self> {
        let mut infinities = 0usize;
        for (i, p) in points.iter().enumerate() {
            if p.is_infinity() {
                infinities += 1;
                if infinities > 1 {
                    return Err(Error::InvalidArgument(
                        "point set contains more than one infinity".into(),
                    ));
                }
            }
            if let Some(dup) = points[..i].iter().find(|q| *q == p) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate point {dup} in point set"
                )));
            }
        }
        Ok(PointSet { points })
    }

    pub fn parse_all(strs: &[String]) -> Result<Self> {
        let points = strs
            .iter()
            .map(|s| RootPoint::parse(s))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(points)
    }

    pub fn points(&self) -> &[RootPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_infinity(&self) -> bool {
        self.points.iter().any(RootPoint::is_infinity)
    }

    pub fn finite_points(&self) -> impl Iterator<Item = &Rational> {
        self.points.iter().filter_map(|p| match p {
            RootPoint::Finite(r) => Some(r),
            RootPoint::Infinity => None,
        })
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Root points with small numerators/denominators keep transform entries
/// tame; this list is ordered from best to worst.
pub fn good_points() -> Vec<Rational> {
    [
        (0, 1),
        (-1, 1),
        (1, 1),
        (-1, 2),
        (2, 1),
        (1, 2),
        (-2, 1),
        (-1, 4),
        (4, 1),
    ]
    .iter()
    .map(|&(n, d)| rat(n, d))
    .collect()
}

/// The default modified point set: ∞ followed by the first `n_points − 1`
/// good points. Supports 2 ≤ n_points ≤ 10.
pub fn default_point_set(n_points: usize) -> Result<PointSet> {
    if !(2..=10).contains(&n_points) {
        return Err(Error::InvalidArgument(format!(
            "default_point_set supports 2..=10 points, got {n_points}"
        )));
    }
    let mut points = vec![RootPoint::Infinity];
    points.extend(
        good_points()
            .into_iter()
            .take(n_points - 1)
            .map(RootPoint::Finite),
    );
    PointSet::new(points)
}

/// One evaluation-matrix row of the given width: [p⁰ … p^{width−1}] for a
/// finite point, [0, …, 0, 1] for ∞ (the leading-coefficient pick).
pub(crate) fn eval_row(point: &RootPoint, width: usize) -> Vec<Rational> {
    match point {
        RootPoint::Finite(p) => {
            let mut row = Vec::with_capacity(width);
            let mut acc = Rational::one();
            for _ in 0..width {
                row.push(acc.clone());
                acc *= p;
            }
            row
        }
        RootPoint::Infinity => {
            let mut row = vec![Rational::zero(); width];
            if let Some(last) = row.last_mut() {
                *last = Rational::one();
            }
            row
        }
    }
}

/// Raw Toom-Cook matrices before the matrix-exchange role assignment.
pub(crate) struct TcMatrices {
    /// Kernel evaluation, μ×n_h.
    pub g: Matrix<Rational>,
    /// Reconstruction: exact inverse of the square evaluation matrix, n_x×μ.
    pub b: Matrix<Rational>,
}

pub(crate) fn eval_matrix(points: &PointSet, width: usize) -> Matrix<Rational> {
    Matrix::from_rows(
        points
            .points()
            .iter()
            .map(|p| eval_row(p, width))
            .collect(),
    )
    .expect("uniform row width")
}

pub(crate) fn tc_matrices(points: &PointSet, n_h: usize, n_o: usize) -> Result<TcMatrices> {
    if n_h == 0 || n_o == 0 {
        return Err(Error::InvalidArgument(
            "kernel and output sizes must be at least 1".into(),
        ));
    }
    let n_x = n_h + n_o - 1;
    if points.len() != n_x {
        return Err(Error::InvalidArgument(format!(
            "point set {points} has {} points; F({n_o},{n_h}) needs {n_x}",
            points.len()
        )));
    }
    let g = eval_matrix(points, n_h);
    let v = eval_matrix(points, n_x);
    // Distinct points make the evaluation matrix invertible; a failure here
    // would be a constructor bug, not a user error.
    let b = v
        .inverse()
        .map_err(|_| Error::ConstructionBug(format!("evaluation matrix for {points} singular")))?;
    Ok(TcMatrices { g, b })
}

/// Builds the full F(n_o×n_o, n_h×n_h) Toom-Cook algorithm from
/// `n_h + n_o − 1` distinct points, with roles assigned per the matrix
/// exchange: the reconstruction matrix (transposed) becomes the input
/// transform and a width-n_o evaluation matrix (transposed) becomes the
/// output transform, turning the linear-convolution construction into valid
/// correlation.
pub fn toom_cook_transforms(points: &PointSet, n_h: usize, n_o: usize) -> Result<TransformSet> {
    let tc = tc_matrices(points, n_h, n_o)?;
    let a_out = eval_matrix(points, n_o);
    let moduli: Vec<Modulus> = points
        .points()
        .iter()
        .map(|p| match p {
            RootPoint::Finite(r) => Modulus::linear(r.clone()),
            RootPoint::Infinity => Modulus::Infinity,
        })
        .collect();
    let ts = TransformSet::assemble(n_h, n_o, moduli, tc.g, tc.b, a_out)?;
    Ok(ts)
}
