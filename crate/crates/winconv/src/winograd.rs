//! Construction of Winograd-family convolution algorithms from modulus
//! polynomials, including superlinear (degree-2) moduli.
//!
//! An [`AlgorithmConfig`] is an ordered list of pairwise-coprime moduli:
//! linear root points `a − p`, irreducible quadratics with their own
//! sub-solver point sets, and optionally the pseudo-point ∞. The kernel and
//! output evaluation matrices stack one row per linear modulus (Vandermonde
//! powers of the root), a (2d−1)-row block per degree-d modulus — the
//! sub-solver's evaluation matrix times the matrix of monomial residues
//! `vec(R_m[a^j])` — and a final `[0,…,0,1]` row for ∞. The input
//! reconstruction matrix is assembled per modulus from the CRT basis
//! `N_i·M_i` (for degree-d moduli, the residue-domain block E_i·C_i built
//! from the sub-solver's reconstruction columns), with `vec(M)` for ∞.
//! Column groups follow the modulus order exactly, so ∞ may appear anywhere
//! in the list.
//!
//! Role assignment is fixed by the matrix exchange: the reconstruction
//! matrix transposed becomes the *input* transform and a width-n_o
//! evaluation matrix transposed becomes the *output* transform, producing
//! valid correlation. Every assembled [`TransformSet`] is smoke-tested
//! against direct convolution before it is returned.

use std::fmt;

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

use crate::exact::{
    ext_euclid, format_rational, poly_divmod, poly_gcd, poly_mul, rat, rational_to_f64,
    vec_coeffs, Polynomial, Rational,
};
use crate::matrix::Matrix;
use crate::toomcook::{default_point_set, eval_row, good_points, tc_matrices, PointSet, RootPoint};
use crate::{Error, Result};

/// One modulus of the CRT decomposition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Modulus {
    /// `a − root`.
    Linear { root: Rational },
    /// Irreducible polynomial of degree ≥ 2 plus the point set for its
    /// F(d×d, d×d) sub-solver (which needs 2d−1 points).
    Superlinear {
        poly: Polynomial,
        sub_points: PointSet,
    },
    /// The pseudo-point ∞: contributes the leading-coefficient row/column.
    Infinity,
}

impl Modulus {
    pub fn linear(root: Rational) -> Self {
        Modulus::Linear { root }
    }

    pub fn superlinear(poly: Polynomial, sub_points: PointSet) -> Self {
        Modulus::Superlinear { poly, sub_points }
    }

    /// Degree contributed to the finite modulus product (∞ contributes 0).
    pub fn degree(&self) -> usize {
        match self {
            Modulus::Linear { .. } => 1,
            Modulus::Superlinear { poly, .. } => poly.degree().unwrap_or(0),
            Modulus::Infinity => 0,
        }
    }

    /// The polynomial itself; `None` for ∞.
    pub fn poly(&self) -> Option<Polynomial> {
        match self {
            Modulus::Linear { root } => Some(Polynomial::from_root(root)),
            Modulus::Superlinear { poly, .. } => Some(poly.clone()),
            Modulus::Infinity => None,
        }
    }

    /// Elementwise multiplications this modulus contributes: 1 for linear
    /// and ∞, 2d−1 for degree d (the sub-solver's count).
    pub fn mult_count(&self) -> usize {
        match self {
            Modulus::Linear { .. } | Modulus::Infinity => 1,
            Modulus::Superlinear { poly, .. } => 2 * poly.degree().unwrap_or(0) - 1,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Linear { root } => write!(f, "{}", Polynomial::from_root(root)),
            Modulus::Superlinear { poly, .. } => write!(f, "{poly}"),
            Modulus::Infinity => write!(f, "inf"),
        }
    }
}

/// Full specification of one generated algorithm: F(n_o×n_o, n_h×n_h) from
/// an ordered modulus list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgorithmConfig {
    pub n_h: usize,
    pub n_o: usize,
    pub moduli: Vec<Modulus>,
}

impl AlgorithmConfig {
    pub fn new(n_h: usize, n_o: usize, moduli: Vec<Modulus>) -> Self {
        AlgorithmConfig { n_h, n_o, moduli }
    }

    /// Input tile size per dimension.
    pub fn n_x(&self) -> usize {
        self.n_h + self.n_o - 1
    }

    pub fn has_infinity(&self) -> bool {
        self.moduli.iter().any(|m| matches!(m, Modulus::Infinity))
    }

    pub fn quadratic_count(&self) -> usize {
        self.moduli
            .iter()
            .filter(|m| matches!(m, Modulus::Superlinear { .. }))
            .count()
    }
}

/// One validation failure; the message names the offending moduli.
#[derive(Clone, Debug)]
pub struct Violation {
    pub message: String,
}

impl Violation {
    fn new(message: String) -> Self {
        Violation { message }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn is_perfect_square(v: &BigInt) -> bool {
    if v.is_negative() {
        return false;
    }
    let root = v.sqrt();
    &root * &root == *v
}

/// A nonnegative rational is a square in Q iff its reduced numerator and
/// denominator are both perfect integer squares.
fn is_rational_square(r: &Rational) -> bool {
    !r.is_negative() && is_perfect_square(r.numer()) && is_perfect_square(r.denom())
}

/// Checks all structural invariants; an empty list means the config is
/// buildable. Degree sums: `n_h + n_o − 2` plus one ∞ (the modified
/// algorithm), or `n_h + n_o − 1` with no ∞.
pub fn validate_config(config: &AlgorithmConfig) -> Vec<Violation> {
    let mut v = Vec::new();
    if config.n_h == 0 {
        v.push(Violation::new("kernel size n_h must be at least 1".into()));
    }
    if config.n_o == 0 {
        v.push(Violation::new("output size n_o must be at least 1".into()));
    }
    if config.moduli.is_empty() {
        v.push(Violation::new("modulus list is empty".into()));
        return v;
    }
    let inf_count = config
        .moduli
        .iter()
        .filter(|m| matches!(m, Modulus::Infinity))
        .count();
    if inf_count > 1 {
        v.push(Violation::new(
            "the infinity pseudo-point appears more than once".into(),
        ));
    }
    for m in &config.moduli {
        let Modulus::Superlinear { poly, sub_points } = m else {
            continue;
        };
        let Some(d) = poly.degree() else {
            v.push(Violation::new("zero polynomial used as modulus".into()));
            continue;
        };
        if d < 2 {
            v.push(Violation::new(format!(
                "modulus {poly} has degree {d}; use a linear root point instead"
            )));
            continue;
        }
        if d > 2 {
            v.push(Violation::new(format!(
                "modulus {poly}: degree {d} is unsupported (irreducibility \
                 validation is limited to degree 2)"
            )));
            continue;
        }
        if !poly.is_monic() {
            v.push(Violation::new(format!("modulus {poly} must be monic")));
            continue;
        }
        // Monic a² + b·a + c is reducible over Q iff b² − 4c is a square.
        let b = poly.coeff(1);
        let c = poly.coeff(0);
        let disc = &b * &b - rat(4, 1) * &c;
        if is_rational_square(&disc) {
            v.push(Violation::new(format!(
                "modulus {poly} is reducible over the rationals"
            )));
        }
        let need = 2 * d - 1;
        if sub_points.len() != need {
            v.push(Violation::new(format!(
                "modulus {poly}: sub-solver needs {need} points, got {} ({})",
                sub_points.len(),
                sub_points
            )));
        }
    }
    // Pairwise coprimality among finite moduli. Sub-solver points may reuse
    // top-level roots, so only this level is checked.
    for i in 0..config.moduli.len() {
        for j in (i + 1)..config.moduli.len() {
            let (a, b) = (&config.moduli[i], &config.moduli[j]);
            match (a, b) {
                (Modulus::Linear { root: ra }, Modulus::Linear { root: rb }) if ra == rb => {
                    v.push(Violation::new(format!(
                        "duplicate root point {}",
                        format_rational(ra)
                    )));
                }
                _ => {
                    let (Some(pa), Some(pb)) = (a.poly(), b.poly()) else {
                        continue;
                    };
                    let g = poly_gcd(&pa, &pb);
                    if g.degree().is_some_and(|d| d >= 1) {
                        v.push(Violation::new(format!(
                            "moduli {a} and {b} are not coprime (common factor {g})"
                        )));
                    }
                }
            }
        }
    }
    if config.n_h >= 1 && config.n_o >= 1 {
        let sum: usize = config.moduli.iter().map(Modulus::degree).sum();
        let with_inf = config.n_h + config.n_o - 2;
        let without_inf = config.n_h + config.n_o - 1;
        if inf_count == 1 && sum != with_inf {
            v.push(Violation::new(format!(
                "finite modulus degrees sum to {sum}; with the infinity \
                 pseudo-point they must sum to n_h + n_o - 2 = {with_inf}"
            )));
        }
        if inf_count == 0 && sum != without_inf {
            v.push(Violation::new(format!(
                "finite modulus degrees sum to {sum}; without the infinity \
                 pseudo-point they must sum to n_h + n_o - 1 = {without_inf}"
            )));
        }
    }
    v
}

/// Elementwise multiplication count μ: each linear modulus and ∞ cost one
/// multiplication, a degree-d modulus costs 2d−1.
pub fn multiplication_count(config: &AlgorithmConfig) -> usize {
    config.moduli.iter().map(Modulus::mult_count).sum()
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Dims {
    One,
    Two,
}

/// Elementwise multiplications per output point: μ/n_o in 1D, μ²/n_o² in 2D.
pub fn ratio(config: &AlgorithmConfig, dims: Dims) -> Rational {
    let mu = multiplication_count(config) as i64;
    let n_o = config.n_o as i64;
    match dims {
        Dims::One => rat(mu, n_o),
        Dims::Two => rat(mu * mu, n_o * n_o),
    }
}

/// Table formatting: integers print bare, everything else rounds to two
/// decimals (e.g. 49/16 → "3.06", 25/9 → "2.78").
pub fn format_ratio(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{:.2}", rational_to_f64(r))
    }
}

/// The three transforms of one algorithm, in as-applied orientation:
/// `output_transform · ((kernel_transform·h) ⊙ (input_transform·x))` is
/// valid correlation, exactly, for all rational h, x.
#[derive(Clone, PartialEq, Debug)]
pub struct TransformSet {
    /// μ×n_h kernel evaluation (G).
    pub kernel_transform: Matrix<Rational>,
    /// μ×n_x input transform (the reconstruction matrix transposed, Bᵀ).
    pub input_transform: Matrix<Rational>,
    /// n_o×μ output transform (width-n_o evaluation matrix transposed, Aᵀ).
    pub output_transform: Matrix<Rational>,
    pub mu: usize,
    pub n_h: usize,
    pub n_o: usize,
    /// The originating moduli (root points for Toom-Cook-built sets). Empty
    /// when a set is loaded from matrix files without provenance.
    pub moduli: Vec<Modulus>,
}

impl TransformSet {
    pub fn n_x(&self) -> usize {
        self.n_h + self.n_o - 1
    }

    /// Assembles a set from raw construction output (kernel evaluation G,
    /// reconstruction B, width-n_o evaluation A), applying the matrix
    /// exchange and smoke-testing the result against direct convolution.
    pub(crate) fn assemble(
        n_h: usize,
        n_o: usize,
        moduli: Vec<Modulus>,
        g: Matrix<Rational>,
        b: Matrix<Rational>,
        a_out: Matrix<Rational>,
    ) -> Result<TransformSet> {
        let mu = g.rows();
        let ts = TransformSet {
            kernel_transform: g,
            input_transform: b.transpose(),
            output_transform: a_out.transpose(),
            mu,
            n_h,
            n_o,
            moduli,
        };
        let n_x = ts.n_x();
        if ts.kernel_transform.cols() != n_h
            || ts.input_transform.rows() != mu
            || ts.input_transform.cols() != n_x
            || ts.output_transform.rows() != n_o
            || ts.output_transform.cols() != mu
        {
            return Err(Error::ConstructionBug(format!(
                "transform shapes inconsistent for mu={mu}, n_h={n_h}, n_o={n_o}"
            )));
        }
        ts.sanity_check()?;
        Ok(ts)
    }

    /// Three deterministic rational trials against the sliding dot product;
    /// any construction defect that survives this is caught later by the
    /// full verification oracle, but most die here, at build time.
    fn sanity_check(&self) -> Result<()> {
        let n_x = self.n_x();
        for t in 0..3i64 {
            let h: Vec<Rational> = (0..self.n_h as i64)
                .map(|i| rat((7 * i + 3 * t + 2) % 17 - 8, (i + t).rem_euclid(3) + 1))
                .collect();
            let x: Vec<Rational> = (0..n_x as i64)
                .map(|i| rat((5 * i + 11 * t + 1) % 19 - 9, (i + 2 * t).rem_euclid(4) + 1))
                .collect();
            let got = self.apply_1d_exact(&h, &x)?;
            let mut want = Vec::with_capacity(self.n_o);
            for j in 0..self.n_o {
                let mut acc = Rational::zero();
                for (k, hk) in h.iter().enumerate() {
                    acc += hk * &x[j + k];
                }
                want.push(acc);
            }
            if got != want {
                return Err(Error::ConstructionBug(format!(
                    "assembled transforms disagree with direct convolution \
                     on smoke trial {t}"
                )));
            }
        }
        Ok(())
    }

    /// Composed 1D algorithm in exact arithmetic.
    pub fn apply_1d_exact(&self, h: &[Rational], x: &[Rational]) -> Result<Vec<Rational>> {
        if h.len() != self.n_h || x.len() != self.n_x() {
            return Err(Error::ShapeMismatch(format!(
                "expected kernel {} and input {}, got {} and {}",
                self.n_h,
                self.n_x(),
                h.len(),
                x.len()
            )));
        }
        let gh = self.kernel_transform.mul_vec(h)?;
        let bx = self.input_transform.mul_vec(x)?;
        let had: Vec<Rational> = gh.iter().zip(&bx).map(|(a, b)| a * b).collect();
        self.output_transform.mul_vec(&had)
    }

    /// Composed 2D algorithm in exact arithmetic: Aᵀ(GHGᵀ ⊙ BᵀXB)A.
    pub fn apply_2d_exact(
        &self,
        h: &Matrix<Rational>,
        x: &Matrix<Rational>,
    ) -> Result<Matrix<Rational>> {
        if h.rows() != self.n_h || h.cols() != self.n_h {
            return Err(Error::ShapeMismatch(format!(
                "kernel must be {0}x{0}",
                self.n_h
            )));
        }
        if x.rows() != self.n_x() || x.cols() != self.n_x() {
            return Err(Error::ShapeMismatch(format!(
                "input tile must be {0}x{0}",
                self.n_x()
            )));
        }
        let g = &self.kernel_transform;
        let bt = &self.input_transform;
        let at = &self.output_transform;
        let k = g.mul(h)?.mul(&g.transpose())?;
        let d = bt.mul(x)?.mul(&bt.transpose())?;
        let s = k.hadamard(&d)?;
        at.mul(&s)?.mul(&at.transpose())
    }
}

/// Residues vec(R_m[a^j]) for j = 0..width−1 as the columns of a
/// deg(m)×width matrix: the per-modulus projection a superlinear block
/// composes with its sub-solver.
fn monomial_residues(m: &Polynomial, width: usize) -> Result<Matrix<Rational>> {
    let d = m.degree().ok_or_else(|| {
        Error::InvalidArgument("zero polynomial used as modulus".into())
    })?;
    let mut cols = Vec::with_capacity(width);
    for j in 0..width {
        let (_, r) = poly_divmod(&Polynomial::monomial(j, Rational::one()), m)?;
        cols.push(vec_coeffs(&r, d)?);
    }
    Ok(Matrix::from_fn(d, width, |i, j| cols[j][i].clone()))
}

/// Stacks the evaluation matrix of the given width: one Vandermonde row per
/// linear modulus, the sub-solver block per superlinear modulus, [0,…,0,1]
/// for ∞, in modulus order.
fn build_eval(config: &AlgorithmConfig, width: usize) -> Result<Matrix<Rational>> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for m in &config.moduli {
        match m {
            Modulus::Linear { root } => {
                rows.push(eval_row(&RootPoint::Finite(root.clone()), width));
            }
            Modulus::Infinity => rows.push(eval_row(&RootPoint::Infinity, width)),
            Modulus::Superlinear { poly, sub_points } => {
                let d = poly.degree().expect("validated nonzero");
                let sub = tc_matrices(sub_points, d, d)?;
                let block = sub.g.mul(&monomial_residues(poly, width)?)?;
                for i in 0..block.rows() {
                    rows.push(block.row(i).to_vec());
                }
            }
        }
    }
    Matrix::from_rows(rows)
}

/// Builds the reconstruction matrix B (n_x×μ) column group by column group,
/// in modulus order: vec(R_M[Nᵢ·Mᵢ]) for a linear modulus, Eᵢ·Cᵢ for a
/// degree-d modulus, vec(M) for ∞.
fn build_b(config: &AlgorithmConfig) -> Result<Matrix<Rational>> {
    let n_x = config.n_x();
    let big_m = config
        .moduli
        .iter()
        .filter_map(Modulus::poly)
        .fold(Polynomial::one(), |acc, p| poly_mul(&acc, &p));
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    for m in &config.moduli {
        match m {
            Modulus::Infinity => cols.push(vec_coeffs(&big_m, n_x)?),
            Modulus::Linear { root } => {
                let m_i = Polynomial::from_root(root);
                let (complement, rem) = poly_divmod(&big_m, &m_i)?;
                debug_assert!(rem.is_zero());
                let (n_cap, _) = ext_euclid(&m_i, &complement)?;
                cols.push(vec_coeffs(&poly_mul(&n_cap, &complement), n_x)?);
            }
            Modulus::Superlinear { poly, sub_points } => {
                let d = poly.degree().expect("validated nonzero");
                let (complement, rem) = poly_divmod(&big_m, poly)?;
                debug_assert!(rem.is_zero());
                let (n_cap, _) = ext_euclid(poly, &complement)?;
                let base = poly_mul(&n_cap, &complement);
                // E_i: residues of a^k·N_i·M_i modulo M, k = 0..d−1.
                let mut e_cols = Vec::with_capacity(d);
                for k in 0..d {
                    let shifted = poly_mul(&Polynomial::monomial(k, Rational::one()), &base);
                    let (_, red) = poly_divmod(&shifted, &big_m)?;
                    e_cols.push(vec_coeffs(&red, n_x)?);
                }
                let e_mat = Matrix::from_fn(n_x, d, |i, j| e_cols[j][i].clone());
                // C_i: the sub-solver's reconstruction columns reduced mod m_i.
                let sub = tc_matrices(sub_points, d, d)?;
                let mu_sub = 2 * d - 1;
                let mut c_cols = Vec::with_capacity(mu_sub);
                for j in 0..mu_sub {
                    let b_j = Polynomial::new(
                        (0..sub.b.rows()).map(|i| sub.b.get(i, j).clone()).collect(),
                    );
                    let (_, red) = poly_divmod(&b_j, poly)?;
                    c_cols.push(vec_coeffs(&red, d)?);
                }
                let c_mat = Matrix::from_fn(d, mu_sub, |i, j| c_cols[j][i].clone());
                let block = e_mat.mul(&c_mat)?;
                for j in 0..block.cols() {
                    cols.push((0..n_x).map(|i| block.get(i, j).clone()).collect());
                }
            }
        }
    }
    Ok(Matrix::from_fn(n_x, cols.len(), |i, j| cols[j][i].clone()))
}

fn validated(config: &AlgorithmConfig) -> Result<()> {
    let violations = validate_config(config);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(violations))
    }
}

/// The kernel evaluation matrix G (μ×n_h) and the wide evaluation matrix A
/// (μ×n_x, the display form whose monomial-residue columns span
/// j = 0..n_h+n_o−2).
pub fn build_kernel_output_transforms(
    config: &AlgorithmConfig,
) -> Result<(Matrix<Rational>, Matrix<Rational>)> {
    validated(config)?;
    Ok((
        build_eval(config, config.n_h)?,
        build_eval(config, config.n_x())?,
    ))
}

/// The reconstruction matrix B (n_x×μ).
pub fn build_input_transform(config: &AlgorithmConfig) -> Result<Matrix<Rational>> {
    validated(config)?;
    build_b(config)
}

/// Validates, constructs all three matrices, applies the matrix-exchange
/// role assignment, and smoke-tests the assembled algorithm.
pub fn build_transform_set(config: &AlgorithmConfig) -> Result<TransformSet> {
    validated(config)?;
    let g = build_eval(config, config.n_h)?;
    let a_out = build_eval(config, config.n_o)?;
    let b = build_b(config)?;
    let ts = TransformSet::assemble(
        config.n_h,
        config.n_o,
        config.moduli.clone(),
        g,
        b,
        a_out,
    )?;
    let mu = multiplication_count(config);
    if ts.mu != mu {
        return Err(Error::ConstructionBug(format!(
            "matrix row count {} disagrees with multiplication count {mu}",
            ts.mu
        )));
    }
    Ok(ts)
}

/// The three irreducible quadratics with coefficients in {0, ±1}:
/// a²+1, a²+a+1, a²−a+1 (ordered by observed floating-point quality).
pub fn quadratic_candidates() -> Vec<Polynomial> {
    vec![
        Polynomial::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]),
        Polynomial::new(vec![rat(1, 1), rat(1, 1), rat(1, 1)]),
        Polynomial::new(vec![rat(1, 1), rat(-1, 1), rat(1, 1)]),
    ]
}

/// Default sub-solver points {0, −1, ∞} for degree-2 moduli.
pub fn default_sub_points() -> PointSet {
    PointSet::new(vec![
        RootPoint::Finite(Rational::zero()),
        RootPoint::Finite(-Rational::one()),
        RootPoint::Infinity,
    ])
    .expect("static point set")
}

/// All-linear modified Toom-Cook config on the default point set
/// (∞ first, then good points), as an AlgorithmConfig.
pub fn toom_cook_config(n_h: usize, n_o: usize) -> Result<AlgorithmConfig> {
    let points = default_point_set(n_h + n_o - 1)?;
    let moduli = points
        .points()
        .iter()
        .map(|p| match p {
            RootPoint::Finite(r) => Modulus::linear(r.clone()),
            RootPoint::Infinity => Modulus::Infinity,
        })
        .collect();
    Ok(AlgorithmConfig::new(n_h, n_o, moduli))
}

/// Config with one quadratic modulus: good-point linear roots, then the
/// quadratic (default sub-points), then ∞.
pub fn one_quadratic_config(
    n_h: usize,
    n_o: usize,
    quad: Polynomial,
) -> Result<AlgorithmConfig> {
    let linear_needed = (n_h + n_o)
        .checked_sub(4)
        .ok_or_else(|| Error::InvalidArgument("tile too small for a quadratic".into()))?;
    let good = good_points();
    if linear_needed > good.len() {
        return Err(Error::InvalidArgument(format!(
            "not enough root points for {linear_needed} linear moduli"
        )));
    }
    let mut moduli: Vec<Modulus> = good[..linear_needed]
        .iter()
        .cloned()
        .map(Modulus::linear)
        .collect();
    moduli.push(Modulus::superlinear(quad, default_sub_points()));
    moduli.push(Modulus::Infinity);
    Ok(AlgorithmConfig::new(n_h, n_o, moduli))
}

/// One row of the multiplication-ratio table. The linear column counts ∞
/// among the linear factors.
#[derive(Clone, Debug)]
pub struct Table1Row {
    pub n_o: usize,
    pub linear: usize,
    pub quadratic: usize,
    pub mu: usize,
    pub ratio_2d: Rational,
}

/// The 12 tabulated 2D ratios for 3×3 kernels and output tiles 2/4/6 with
/// every linear/quadratic split of the modulus budget.
pub fn table1() -> Vec<Table1Row> {
    let cells: &[(usize, &[(usize, usize)])] = &[
        (2, &[(4, 0), (2, 1), (0, 2)]),
        (4, &[(6, 0), (4, 1), (2, 2), (0, 3)]),
        (6, &[(8, 0), (6, 1), (4, 2), (2, 3), (0, 4)]),
    ];
    let mut rows = Vec::new();
    for &(n_o, splits) in cells {
        for &(linear, quadratic) in splits {
            let mu = linear + 3 * quadratic;
            rows.push(Table1Row {
                n_o,
                linear,
                quadratic,
                mu,
                ratio_2d: rat((mu * mu) as i64, (n_o * n_o) as i64),
            });
        }
    }
    rows
}

/// The enumerated verification family: n_h = 3, n_o ∈ {2,4,6,8}, every
/// choice of 0–2 distinct quadratics, linear roots drawn in order from the
/// good-point list, in both with-∞ and without-∞ variants where the point
/// budget allows. 52 configurations.
pub fn enumerate_family() -> Vec<(String, AlgorithmConfig)> {
    let n_h = 3usize;
    let quads = quadratic_candidates();
    let quad_choices: Vec<(String, Vec<usize>)> = vec![
        ("q0".into(), vec![]),
        ("q1".into(), vec![0]),
        ("q2".into(), vec![1]),
        ("q3".into(), vec![2]),
        ("q1q2".into(), vec![0, 1]),
        ("q1q3".into(), vec![0, 2]),
        ("q2q3".into(), vec![1, 2]),
    ];
    let good = good_points();
    let mut family = Vec::new();
    for n_o in [2usize, 4, 6, 8] {
        for (tag, quad_idx) in &quad_choices {
            for with_inf in [true, false] {
                let finite_budget = if with_inf {
                    n_h + n_o - 2
                } else {
                    n_h + n_o - 1
                };
                let Some(linear_count) = finite_budget.checked_sub(2 * quad_idx.len()) else {
                    continue;
                };
                if linear_count > good.len() {
                    continue;
                }
                let mut moduli: Vec<Modulus> = good[..linear_count]
                    .iter()
                    .cloned()
                    .map(Modulus::linear)
                    .collect();
                for &qi in quad_idx {
                    moduli.push(Modulus::superlinear(
                        quads[qi].clone(),
                        default_sub_points(),
                    ));
                }
                if with_inf {
                    moduli.push(Modulus::Infinity);
                }
                let id = format!(
                    "no{n_o}_{tag}_{}",
                    if with_inf { "inf" } else { "noinf" }
                );
                family.push((id, AlgorithmConfig::new(n_h, n_o, moduli)));
            }
        }
    }
    family
}
