use faer::{c64, Mat};
use num_complex::Complex64;

use super::eigen::{hermitian_eigs, symmetric_eigs, HermitianEigen};
use super::grid::{UniformGrid, WaveField};
use crate::error::{invalid, Result};

/// Extra structure an operator is known to carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetry {
    #[default]
    None,
    /// Commutes with the antiunitary map `psi(x) -> conj(psi(-x))` on a
    /// reflection-symmetric grid. The eigenproblem is then real symmetric in
    /// the basis of `conj(psi(-x)) = psi(x)` vectors.
    ReflectionConjugation,
}

/// Dense Hermitian matrix acting on samples of a periodic grid.
#[derive(Debug, Clone)]
pub struct HermitianOperatorDense {
    matrix: Mat<c64>,
    grid: UniformGrid,
    hbar: f64,
    symmetry: Symmetry,
}

impl HermitianOperatorDense {
    pub fn new(matrix: Mat<c64>, grid: UniformGrid, hbar: f64, symmetry: Symmetry) -> Result<Self> {
        let n = grid.count();
        if matrix.nrows() != n || matrix.ncols() != n {
            return invalid("operator matrix does not match the grid size");
        }
        if symmetry == Symmetry::ReflectionConjugation && !grid.is_reflection_symmetric() {
            return invalid("reflection symmetry declared on a grid that is not symmetric");
        }
        Ok(Self {
            matrix,
            grid,
            hbar,
            symmetry,
        })
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn dim(&self) -> usize {
        self.grid.count()
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for j in 0..m.ncols() {
            for i in 0..=j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn apply(&self, psi: &WaveField) -> Result<WaveField> {
        self.check_field(psi)?;
        let v = column(psi.values());
        let out = &self.matrix * &v;
        WaveField::new(
            self.grid,
            (0..out.nrows()).map(|i| out[i]).collect(),
            psi.hbar(),
        )
    }

    pub(crate) fn check_field(&self, psi: &WaveField) -> Result<()> {
        if psi.grid() != &self.grid {
            return invalid("field and operator live on different grids");
        }
        Ok(())
    }

    /// Eigendecomposition, through the real reduction when the operator
    /// carries [`Symmetry::ReflectionConjugation`].
    pub fn eigen(&self) -> Result<HermitianEigen> {
        match self.symmetry {
            Symmetry::None => hermitian_eigs(&self.matrix),
            Symmetry::ReflectionConjugation => self.reduced_eigen(),
        }
    }

    fn reduced_eigen(&self) -> Result<HermitianEigen> {
        let n = self.dim();
        let basis = ReflectionBasis::new(n);
        let h = &self.matrix;
        let mut real = Mat::<f64>::zeros(n, n);
        let mut worst_imag = 0.0f64;
        let mut scale = 0.0f64;
        for b in 0..n {
            for a in 0..=b {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(i, ci) in basis.entries(a) {
                    for &(j, cj) in basis.entries(b) {
                        acc += ci.conj() * h[(i, j)] * cj;
                    }
                }
                worst_imag = worst_imag.max(acc.im.abs());
                scale = scale.max(acc.re.abs());
                real[(a, b)] = acc.re;
                real[(b, a)] = acc.re;
            }
        }
        if worst_imag > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return invalid(format!(
                "operator does not commute with reflection-conjugation (imaginary residue {worst_imag:.3e})"
            ));
        }
        let evd = symmetric_eigs(&real)?;
        let mut vectors = Mat::<c64>::zeros(n, n);
        for col in 0..n {
            for a in 0..n {
                let w = evd.vectors[(a, col)];
                for &(i, ci) in basis.entries(a) {
                    vectors[(i, col)] += ci * w;
                }
            }
        }
        Ok(HermitianEigen {
            values: evd.values,
            vectors,
        })
    }
}

/// Orthonormal basis of vectors with `v[mirror(i)] = conj(v[i])`.
struct ReflectionBasis {
    entries: Vec<Vec<(usize, Complex64)>>,
}

impl ReflectionBasis {
    fn new(n: usize) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut entries = vec![
            vec![(0, Complex64::new(1.0, 0.0))],
            vec![(n / 2, Complex64::new(1.0, 0.0))],
        ];
        for j in 1..n / 2 {
            let m = n - j;
            entries.push(vec![
                (j, Complex64::new(r, 0.0)),
                (m, Complex64::new(r, 0.0)),
            ]);
            entries.push(vec![
                (j, Complex64::new(0.0, r)),
                (m, Complex64::new(0.0, -r)),
            ]);
        }
        Self { entries }
    }

    fn entries(&self, a: usize) -> &[(usize, Complex64)] {
        &self.entries[a]
    }
}

pub(crate) fn column(values: &[Complex64]) -> faer::Col<c64> {
    faer::Col::from_fn(values.len(), |i| values[i])
}

/// Largest `|(A v)_i - lambda_i v_i|_2` over all eigenpairs.
#[cfg(test)]
pub(crate) fn max_residual(matrix: &Mat<c64>, eig: &HermitianEigen) -> f64 {
    let av = matrix * &eig.vectors;
    let n = matrix.nrows();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| (av[(i, k)] - eig.vectors[(i, k)] * eig.values[k]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random Hermitian matrix averaged with its reflection-conjugate.
    fn random_symmetric_operator(n: usize) -> Mat<c64> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mirror = |i: usize| (n - i) % n;
        let mut a = Mat::<c64>::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let z = if i == j {
                    c64::new(rng.gen_range(-1.0..1.0), 0.0)
                } else {
                    c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                };
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        Mat::from_fn(n, n, |i, j| {
            (a[(i, j)] + a[(mirror(i), mirror(j))].conj()) * 0.5
        })
    }

    #[test]
    fn reduced_and_full_eigensolves_agree() {
        let n = 32;
        let grid = UniformGrid::periodic_centered(2.0, n).unwrap();
        let m = random_symmetric_operator(n);
        let full = HermitianOperatorDense::new(m.clone(), grid, 1.0, Symmetry::None).unwrap();
        let sym =
            HermitianOperatorDense::new(m, grid, 1.0, Symmetry::ReflectionConjugation).unwrap();
        let a = full.eigen().unwrap();
        let b = sym.eigen().unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(max_residual(sym.matrix(), &b) < 1e-12);
        let gram = b.vectors.adjoint() * &b.vectors;
        for j in 0..n {
            for i in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)].re - want).abs() < 1e-12 && gram[(i, j)].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn false_symmetry_claim_is_rejected() {
        let n = 8;
        let grid = UniformGrid::periodic_centered(2.0, n).unwrap();
        let mut m = Mat::<c64>::zeros(n, n);
        m[(1, 2)] = c64::new(0.0, 1.0);
        m[(2, 1)] = c64::new(0.0, -1.0);
        let op =
            HermitianOperatorDense::new(m, grid, 1.0, Symmetry::ReflectionConjugation).unwrap();
        assert!(op.eigen().is_err());
    }
}
