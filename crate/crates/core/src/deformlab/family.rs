use std::fmt;
use std::sync::Arc;

use faer::Mat;

use crate::error::{invalid, Error, Result};

/// `(x, u) -> (omega_1, ..., omega_n)`.
pub type ComponentFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
/// `(x, u) -> d omega / du` as an `n x k` matrix.
pub type JacobianFn = Arc<dyn Fn(&[f64], &[f64]) -> Mat<f64> + Send + Sync>;

pub const DEFAULT_STEP: f64 = 1e-4;
pub const DEFAULT_ADMISSIBILITY_THRESHOLD: f64 = 1e-3;

/// A `k`-parameter family of one-forms on an `n`-dimensional space.
#[derive(Clone)]
pub struct MagneticFamily {
    space_dim: usize,
    param_dim: usize,
    components: ComponentFn,
    jacobian: Option<JacobianFn>,
}

impl fmt::Debug for MagneticFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MagneticFamily")
            .field("space_dim", &self.space_dim)
            .field("param_dim", &self.param_dim)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl MagneticFamily {
    pub fn new(space_dim: usize, param_dim: usize, components: ComponentFn) -> Result<Self> {
        if space_dim == 0 || param_dim < space_dim {
            return invalid(format!(
                "need 0 < n <= k, got n = {space_dim}, k = {param_dim}"
            ));
        }
        Ok(Self {
            space_dim,
            param_dim,
            components,
            jacobian: None,
        })
    }

    pub fn with_jacobian(mut self, jacobian: JacobianFn) -> Self {
        self.jacobian = Some(jacobian);
        self
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x, u)?;
        let w = (self.components)(x, u);
        if w.len() != self.space_dim {
            return invalid("component function returned the wrong length");
        }
        Ok(w)
    }

    fn check_point(&self, x: &[f64], u: &[f64]) -> Result<()> {
        if x.len() != self.space_dim || u.len() != self.param_dim {
            return invalid(format!(
                "expected x in R^{} and u in R^{}, got {} and {}",
                self.space_dim,
                self.param_dim,
                x.len(),
                u.len()
            ));
        }
        Ok(())
    }

    /// Largest `|omega(x, 0)|` over the given points; zero for a valid family.
    pub fn defect_at_zero(&self, xs: &[Vec<f64>]) -> Result<f64> {
        let zero = vec![0.0; self.param_dim];
        let mut worst = 0.0f64;
        for x in xs {
            for w in self.eval(x, &zero)? {
                worst = worst.max(w.abs());
            }
        }
        Ok(worst)
    }

    /// `omega_j = u_j`.
    pub fn constant_forms(n: usize) -> Result<Self> {
        let jac: JacobianFn = Arc::new(move |_, _| Mat::<f64>::identity(n, n));
        Ok(Self::new(n, n, Arc::new(|_, u| u.to_vec()))?.with_jacobian(jac))
    }

    /// `omega = (u_1, u_1)`, whose Jacobian has rank one.
    pub fn degenerate_pair() -> Self {
        let jac: JacobianFn =
            Arc::new(|_, _| Mat::from_fn(2, 2, |_, j| if j == 0 { 1.0 } else { 0.0 }));
        Self::new(2, 2, Arc::new(|_, u| vec![u[0], u[0]]))
            .expect("valid dimensions")
            .with_jacobian(jac)
    }

    /// `omega = (u_1 (1 + x_1^2), u_2 exp(x_1))`.
    pub fn weighted_pair() -> Self {
        let jac: JacobianFn = Arc::new(|x, _| {
            let d = [1.0 + x[0] * x[0], x[0].exp()];
            Mat::from_fn(2, 2, |i, j| if i == j { d[i] } else { 0.0 })
        });
        Self::new(
            2,
            2,
            Arc::new(|x, u| vec![u[0] * (1.0 + x[0] * x[0]), u[1] * x[0].exp()]),
        )
        .expect("valid dimensions")
        .with_jacobian(jac)
    }

    /// `omega = (u_1 + u_3, u_2)` with three parameters on a 2-D space.
    pub fn redundant_triple() -> Self {
        let jac: JacobianFn = Arc::new(|_, _| {
            let rows = [[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
            Mat::from_fn(2, 3, |i, j| rows[i][j])
        });
        Self::new(2, 3, Arc::new(|_, u| vec![u[0] + u[2], u[1]]))
            .expect("valid dimensions")
            .with_jacobian(jac)
    }
}

/// Central-difference `d omega_i / d u_j`, cross-checked against the
/// analytic Jacobian when the family has one.
pub fn jacobian_du(family: &MagneticFamily, x: &[f64], u: &[f64], step: f64) -> Result<Mat<f64>> {
    if !(1e-7..=1e-3).contains(&step) {
        return invalid(format!("difference step {step} outside [1e-7, 1e-3]"));
    }
    family.check_point(x, u)?;
    let (n, k) = (family.space_dim, family.param_dim);
    let mut jac = Mat::<f64>::zeros(n, k);
    let mut probe = u.to_vec();
    for j in 0..k {
        probe[j] = u[j] + step;
        let plus = family.eval(x, &probe)?;
        probe[j] = u[j] - step;
        let minus = family.eval(x, &probe)?;
        probe[j] = u[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    if let Some(analytic) = &family.jacobian {
        let exact = analytic(x, u);
        if exact.nrows() != n || exact.ncols() != k {
            return invalid("analytic Jacobian has the wrong shape");
        }
        let mut scale = 1.0f64;
        let mut discrepancy = 0.0f64;
        for j in 0..k {
            for i in 0..n {
                scale = scale.max(exact[(i, j)].abs());
                discrepancy = discrepancy.max((exact[(i, j)] - jac[(i, j)]).abs());
            }
        }
        let allowed = 10.0 * step * step * scale;
        if discrepancy > allowed {
            return Err(Error::InconsistentFamily {
                discrepancy,
                allowed,
            });
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub min_singular_value: f64,
    /// `(x, u)` where the smallest singular value occurs.
    pub worst_point: (Vec<f64>, Vec<f64>),
    /// Zero-based parameter indices of the best-conditioned `n` columns at the
    /// worst point.
    pub chosen_subset: Vec<usize>,
    pub threshold: f64,
    pub admissible: bool,
}

/// Smallest singular value of `d omega / du` over all sample pairs.
pub fn admissibility_check(
    family: &MagneticFamily,
    x_samples: &[Vec<f64>],
    u_samples: &[Vec<f64>],
    threshold: f64,
) -> Result<AdmissibilityReport> {
    if x_samples.is_empty() || u_samples.is_empty() {
        return invalid("admissibility needs at least one x and one u sample");
    }
    if !(threshold > 0.0) {
        return invalid("admissibility threshold must be positive");
    }
    let mut worst: Option<(f64, &Vec<f64>, &Vec<f64>, Mat<f64>)> = None;
    for x in x_samples {
        for u in u_samples {
            let jac = jacobian_du(family, x, u, DEFAULT_STEP)?;
            let sigma = smallest_singular_value(&jac)?;
            if worst.as_ref().map_or(true, |w| sigma < w.0) {
                worst = Some((sigma, x, u, jac));
            }
        }
    }
    let (sigma, x, u, jac) = worst.expect("samples are nonempty");
    Ok(AdmissibilityReport {
        min_singular_value: sigma,
        worst_point: (x.clone(), u.clone()),
        chosen_subset: best_subset(&jac),
        threshold,
        admissible: sigma >= threshold,
    })
}

pub(crate) fn smallest_singular_value(m: &Mat<f64>) -> Result<f64> {
    let s = m
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(s.into_iter().fold(f64::INFINITY, f64::min))
}

/// Columns maximizing `|det|`; ties within round-off keep the
/// lexicographically smallest index tuple.
fn best_subset(jac: &Mat<f64>) -> Vec<usize> {
    let (n, k) = (jac.nrows(), jac.ncols());
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in combinations(k, n) {
        let sub = Mat::from_fn(n, n, |i, j| jac[(i, subset[j])]);
        let det = sub.as_ref().determinant().abs();
        let better = match &best {
            None => true,
            Some((b, _)) => det > b + 1e-9 * b.max(1.0),
        };
        if better {
            best = Some((det, subset));
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

/// `r`-element subsets of `0..k` in lexicographic order.
fn combinations(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..r).collect();
    if r > k {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] < k - r + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `p_u(x, xi) = sum (xi_i + omega_i) g^ij (xi_j + omega_j) + V(x)`.
#[derive(Clone)]
pub struct OperatorSymbol {
    family: MagneticFamily,
    inverse_metric: Arc<dyn Fn(&[f64]) -> Mat<f64> + Send + Sync>,
    potential: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for OperatorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSymbol")
            .field("family", &self.family)
            .finish_non_exhaustive()
    }
}

impl OperatorSymbol {
    pub fn new(
        family: MagneticFamily,
        inverse_metric: Arc<dyn Fn(&[f64]) -> Mat<f64> + Send + Sync>,
        potential: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    ) -> Self {
        Self {
            family,
            inverse_metric,
            potential,
        }
    }

    /// `((xi - u)^2 + x^2) / 2` in one dimension, written with
    /// `omega = -u`, `g^11 = 1/2` and `V = x^2 / 2`.
    pub fn harmonic_oscillator() -> Self {
        let family = MagneticFamily::new(1, 1, Arc::new(|_, u| vec![-u[0]]))
            .expect("valid dimensions")
            .with_jacobian(Arc::new(|_, _| Mat::from_fn(1, 1, |_, _| -1.0)));
        Self::new(
            family,
            Arc::new(|_| Mat::from_fn(1, 1, |_, _| 0.5)),
            Arc::new(|x| 0.5 * x[0] * x[0]),
        )
    }

    pub fn family(&self) -> &MagneticFamily {
        &self.family
    }

    pub fn potential(&self, x: &[f64]) -> f64 {
        (self.potential)(x)
    }

    pub fn eval(&self, x: &[f64], xi: &[f64], u: &[f64]) -> Result<f64> {
        let n = self.family.space_dim;
        if xi.len() != n {
            return invalid("covector has the wrong dimension");
        }
        let w = self.family.eval(x, u)?;
        let g = (self.inverse_metric)(x);
        if g.nrows() != n || g.ncols() != n {
            return invalid("metric has the wrong shape");
        }
        let p: Vec<f64> = xi.iter().zip(&w).map(|(a, b)| a + b).collect();
        let mut kinetic = 0.0;
        for i in 0..n {
            for j in 0..n {
                kinetic += p[i] * g[(i, j)] * p[j];
            }
        }
        Ok(kinetic + (self.potential)(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat<f64>, rows: &[&[f64]], tol: f64) -> bool {
        rows.iter().enumerate().all(|(i, r)| {
            r.iter()
                .enumerate()
                .all(|(j, v)| (a[(i, j)] - v).abs() <= tol)
        })
    }

    #[test]
    fn constant_forms_have_identity_jacobian() {
        let f = MagneticFamily::constant_forms(3).unwrap();
        let j = jacobian_du(&f, &[0.1, 0.2, 0.3], &[0.0, 0.1, -0.1], 1e-4).unwrap();
        assert!(close(
            &j,
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
            1e-10
        ));
    }

    #[test]
    fn degenerate_pair_jacobian() {
        let j = jacobian_du(
            &MagneticFamily::degenerate_pair(),
            &[0.0, 0.0],
            &[0.2, 0.1],
            1e-5,
        )
        .unwrap();
        assert!(close(&j, &[&[1.0, 0.0], &[1.0, 0.0]], 1e-10));
    }

    #[test]
    fn weighted_pair_jacobian_is_diagonal() {
        let j = jacobian_du(
            &MagneticFamily::weighted_pair(),
            &[0.5, -1.0],
            &[0.1, 0.3],
            1e-4,
        )
        .unwrap();
        assert!(close(&j, &[&[1.25, 0.0], &[0.0, 0.5f64.exp()]], 1e-9));
    }

    #[test]
    fn inconsistent_analytic_jacobian_is_caught() {
        let f = MagneticFamily::new(1, 1, Arc::new(|_, u| vec![u[0] * u[0]]))
            .unwrap()
            .with_jacobian(Arc::new(|_, _| Mat::from_fn(1, 1, |_, _| 1.0)));
        assert!(matches!(
            jacobian_du(&f, &[0.0], &[0.3], 1e-4),
            Err(Error::InconsistentFamily { .. })
        ));
    }

    #[test]
    fn step_and_shape_checks() {
        let f = MagneticFamily::weighted_pair();
        assert!(jacobian_du(&f, &[0.0, 0.0], &[0.0, 0.0], 1e-2).is_err());
        assert!(jacobian_du(&f, &[0.0, 0.0], &[0.0, 0.0], 1e-9).is_err());
        assert!(jacobian_du(&f, &[0.0], &[0.0, 0.0], 1e-4).is_err());
        assert!(MagneticFamily::new(3, 2, Arc::new(|_, u| u.to_vec())).is_err());
    }

    #[test]
    fn example_families_vanish_at_zero() {
        let xs = vec![vec![0.0, 0.0], vec![0.5, -1.0], vec![-2.0, 3.0]];
        for f in [
            MagneticFamily::constant_forms(2).unwrap(),
            MagneticFamily::degenerate_pair(),
            MagneticFamily::weighted_pair(),
            MagneticFamily::redundant_triple(),
        ] {
            assert_eq!(f.defect_at_zero(&xs).unwrap(), 0.0);
        }
    }

    fn samples(k: usize) -> Vec<Vec<f64>> {
        (0..5)
            .map(|i| (0..k).map(|j| 0.1 * (i as f64) - 0.05 * j as f64).collect())
            .collect()
    }

    #[test]
    fn classification_of_examples() {
        let xs = vec![vec![0.0, 0.0], vec![0.3, -0.2]];
        let c = admissibility_check(
            &MagneticFamily::constant_forms(2).unwrap(),
            &xs,
            &samples(2),
            1e-3,
        )
        .unwrap();
        assert!((c.min_singular_value - 1.0).abs() < 1e-10 && c.admissible);
        let d = admissibility_check(&MagneticFamily::degenerate_pair(), &xs, &samples(2), 1e-3)
            .unwrap();
        assert!(d.min_singular_value < 1e-10 && !d.admissible);
        let t = admissibility_check(&MagneticFamily::redundant_triple(), &xs, &samples(3), 1e-3)
            .unwrap();
        assert!((t.min_singular_value - 1.0).abs() < 1e-10);
        assert_eq!(t.chosen_subset, vec![0, 1]);
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn subset_prefers_larger_determinant() {
        let j = Mat::from_fn(2, 3, |i, k| [[0.5, 0.0, 2.0], [0.0, 1.0, 0.0]][i][k]);
        assert_eq!(best_subset(&j), vec![1, 2]);
    }

    fn rotated(family: MagneticFamily, q: Mat<f64>) -> MagneticFamily {
        let k = family.param_dim();
        let inner = family.clone();
        MagneticFamily::new(
            family.space_dim(),
            k,
            Arc::new(move |x, u| {
                let v: Vec<f64> = (0..k)
                    .map(|i| (0..k).map(|j| q[(i, j)] * u[j]).sum())
                    .collect();
                inner.eval(x, &v).expect("dimensions fixed above")
            }),
        )
        .unwrap()
    }

    fn givens(k: usize, angles: &[f64]) -> Mat<f64> {
        let mut q = Mat::<f64>::identity(k, k);
        let mut a = angles.iter();
        for p in 0..k {
            for r in p + 1..k {
                let t = *a.next().unwrap_or(&0.0);
                let g = Mat::from_fn(k, k, |i, j| match (i, j) {
                    _ if i == p && j == p || i == r && j == r => t.cos(),
                    _ if i == p && j == r => -t.sin(),
                    _ if i == r && j == p => t.sin(),
                    _ if i == j => 1.0,
                    _ => 0.0,
                });
                q = &q * &g;
            }
        }
        q
    }

    proptest::proptest! {
        #[test]
        fn min_singular_value_is_orthogonally_invariant(
            angles in proptest::collection::vec(-3.2f64..3.2, 3),
            x1 in -1.0f64..1.0,
        ) {
            let xs = vec![vec![x1, 0.2]];
            for family in [MagneticFamily::weighted_pair(), MagneticFamily::redundant_triple()] {
                let k = family.param_dim();
                let us = vec![vec![0.0; k], vec![0.1; k]];
                let base = admissibility_check(&family, &xs, &us, 1e-3).unwrap();
                let turned = rotated(family, givens(k, &angles));
                let rot = admissibility_check(&turned, &xs, &us, 1e-3).unwrap();
                proptest::prop_assert!((base.min_singular_value - rot.min_singular_value).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn oscillator_symbol() {
        let p = OperatorSymbol::harmonic_oscillator();
        let v = p.eval(&[0.3], &[1.0], &[0.4]).unwrap();
        assert!((v - 0.5 * ((1.0f64 - 0.4).powi(2) + 0.09)).abs() < 1e-15);
        for xi in [-2.0, 0.0, 0.4, 3.0] {
            assert!(p.eval(&[0.7], &[xi], &[0.4]).unwrap() >= p.potential(&[0.7]));
        }
    }
}
