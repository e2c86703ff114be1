//! Dense complex linear algebra for operators on tensor-product Hilbert
//! spaces of total dimension at most 256.
//!
//! Everything here is exact-shape and double precision: matrices are square
//! row-major `Vec<Complex64>` buffers, kets are amplitude vectors, and a
//! [`DensityMatrix`] is a matrix plus the list of tensor-factor dimensions it
//! acts on. All values are immutable after construction and safe to share
//! across threads.

use num_complex::Complex64;

use crate::eigen;
use crate::error::{Error, Result};

/// Hermiticity tolerance for density-matrix construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density-matrix construction.
pub const TRACE_TOL: f64 = 1e-12;
/// Lowest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Hermiticity tolerance for operator-level checks (inner products, eig).
pub const OP_HERMITIAN_TOL: f64 = 1e-10;
/// Ket normalization tolerance.
pub const KET_NORM_TOL: f64 = 1e-12;
/// Largest supported total Hilbert-space dimension.
pub const MAX_DIM: usize = 256;

pub(crate) const C_ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const C_ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64 { re, im }
}

#[inline]
pub(crate) fn cr(re: f64) -> Complex64 {
    Complex64 { re, im: 0.0 }
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C_ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C_ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Builds a matrix from real-valued rows (imaginary parts zero).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend(row.iter().map(|&re| cr(re)));
        }
        Ok(Self { dim, entries })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.entries[i * n + k];
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += aik * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.entries[j * n + i].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum of |a_ij - conj(a_ji)| over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > tol {
            Err(Error::NotHermitian { deviation: dev })
        } else {
            Ok(())
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for ia in 0..na {
            for ja in 0..na {
                let a = self.entries[ia * na + ja];
                if a == C_ZERO {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        out.entries[(ia * nb + ib) * n + (ja * nb + jb)] =
                            a * other.entries[ib * nb + jb];
                    }
                }
            }
        }
        out
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

/// Pure-state amplitude vector, normalized on construction.
#[derive(Clone, PartialEq, Debug)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    /// Normalizes the amplitudes; errors on a zero vector.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut k = Self { amplitudes };
        k.normalize()?;
        Ok(k)
    }

    pub fn from_reals(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&re| cr(re)).collect())
    }

    /// Computational basis state |index⟩.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C_ZERO; dim];
        amplitudes[index] = C_ONE;
        Self { amplitudes }
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.amplitudes[i]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < 1e-200 {
            return Err(Error::ZeroNorm);
        }
        if (n - 1.0).abs() > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product of amplitudes: index `i*dim_b + j` holds `a_i * b_j`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    /// Projector Π(ψ) = |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }

    /// ⟨ψ|m|ψ⟩ for Hermitian `m`; imaginary part discarded.
    pub fn expectation(&self, m: &ComplexMatrix) -> Result<f64> {
        if self.dim() != m.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: m.dim(),
            });
        }
        let n = self.dim();
        let mut acc = C_ZERO;
        for i in 0..n {
            let mut row = C_ZERO;
            for j in 0..n {
                row += m.get(i, j) * self.amplitudes[j];
            }
            acc += self.amplitudes[i].conj() * row;
        }
        Ok(acc.re)
    }
}

/// Density matrix with explicit tensor factorization.
///
/// Construction enforces Hermiticity (1e-12), unit trace (1e-12), and
/// positive semidefiniteness (min eigenvalue ≥ -1e-10).
#[derive(Clone, PartialEq, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    factor_dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(&factor_dims, matrix.dim())?;
        matrix.check_hermitian(HERMITIAN_TOL)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        check_psd(&matrix)?;
        Ok(Self {
            matrix,
            factor_dims,
        })
    }

    /// For operations that provably preserve the invariants (permutations,
    /// convex mixtures of validated states).
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, factor_dims: Vec<usize>) -> Self {
        debug_assert_eq!(factor_dims.iter().product::<usize>(), matrix.dim());
        Self {
            matrix,
            factor_dims,
        }
    }

    /// Π(ψ) with the given factorization.
    pub fn from_pure(ket: &Ket, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(&factor_dims, ket.dim())?;
        Ok(Self {
            matrix: ket.projector(),
            factor_dims,
        })
    }

    /// 𝟙/d on the given factors.
    pub fn maximally_mixed(factor_dims: Vec<usize>) -> Result<Self> {
        let dim: usize = factor_dims.iter().product();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimTooLarge { dim });
        }
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
            factor_dims,
        })
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.matrix
            .entries()
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn fidelity_pure(&self, ket: &Ket) -> Result<f64> {
        ket.expectation(&self.matrix)
    }

    /// ρ ⊗ σ with concatenated factor dimensions.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > MAX_DIM {
            return Err(Error::DimTooLarge { dim });
        }
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        Ok(Self::new_unchecked(
            self.matrix.tensor(&other.matrix),
            dims,
        ))
    }

    /// Convex mixture Σ wᵢ ρᵢ; weights must be nonnegative and sum to 1.
    pub fn mix(terms: &[(f64, DensityMatrix)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptyKeep)?;
        let dim = first.dim();
        let mut out = ComplexMatrix::zeros(dim);
        let mut total = 0.0;
        for (w, rho) in terms {
            if rho.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::ParamOutOfRange {
                    name: "mixture weight",
                    value: *w,
                });
            }
            total += w;
            out = out.add(&rho.matrix.scale(*w))?;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidTrace { trace: total });
        }
        Ok(Self::new_unchecked(out, first.factor_dims.clone()))
    }

    /// Transposes the indices of one tensor factor only.
    pub fn partial_transpose(&self, subsystem_index: usize) -> Result<ComplexMatrix> {
        partial_transpose_matrix(&self.matrix, &self.factor_dims, subsystem_index)
    }

    /// Traces out every factor not listed in `keep`; `keep` is sorted and
    /// deduplicated, and the kept factors stay in canonical order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let nf = self.factor_dims.len();
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= nf) {
            return Err(Error::FactorOutOfRange {
                index: bad,
                count: nf,
            });
        }
        if keep.len() == nf {
            return Ok(self.clone());
        }

        let traced: Vec<usize> = (0..nf).filter(|k| !keep.contains(k)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&k| self.factor_dims[k]).collect();
        let trace_dims: Vec<usize> = traced.iter().map(|&k| self.factor_dims[k]).collect();
        let dk: usize = keep_dims.iter().product();
        let dt: usize = trace_dims.iter().product();

        // Flat index of the full space from (kept multi-index, traced multi-index).
        let strides = strides_for(&self.factor_dims);
        let embed = |kept: usize, tr: usize| -> usize {
            let mut idx = 0;
            let mut rem = kept;
            for (pos, &k) in keep.iter().enumerate().rev() {
                let d = keep_dims[pos];
                idx += (rem % d) * strides[k];
                rem /= d;
            }
            let mut rem = tr;
            for (pos, &k) in traced.iter().enumerate().rev() {
                let d = trace_dims[pos];
                idx += (rem % d) * strides[k];
                rem /= d;
            }
            idx
        };

        let mut out = ComplexMatrix::zeros(dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = C_ZERO;
                for t in 0..dt {
                    acc += self.matrix.get(embed(i, t), embed(j, t));
                }
                out.set(i, j, acc);
            }
        }
        Ok(DensityMatrix::new_unchecked(out, keep_dims))
    }

    /// Reorders tensor factors; `perm[old_slot] = new_slot`.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let (m, dims) = permute_matrix(&self.matrix, &self.factor_dims, perm)?;
        Ok(DensityMatrix::new_unchecked(m, dims))
    }

    /// Smallest eigenvalue, via the Hermitian eigensolver.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = eigen::eigenvalues(&self.matrix)?;
        Ok(vals[0])
    }
}

fn check_factor_dims(factor_dims: &[usize], dim: usize) -> Result<()> {
    let prod: usize = factor_dims.iter().product();
    if factor_dims.is_empty() || prod != dim {
        return Err(Error::DimMismatch {
            left: prod,
            right: dim,
        });
    }
    if dim > MAX_DIM {
        return Err(Error::DimTooLarge { dim });
    }
    Ok(())
}

/// PSD check: a Cholesky factorization of `m + PSD_TOL·𝟙` certifies
/// min eig > -PSD_TOL cheaply; borderline cases fall back to eigenvalues.
fn check_psd(m: &ComplexMatrix) -> Result<()> {
    if cholesky_ok(m, PSD_TOL) {
        return Ok(());
    }
    let vals = eigen::eigenvalues(m)?;
    if vals[0] < -PSD_TOL {
        return Err(Error::NotPositive { min_eig: vals[0] });
    }
    Ok(())
}

fn cholesky_ok(m: &ComplexMatrix, shift: f64) -> bool {
    let n = m.dim();
    let mut l = vec![C_ZERO; n * n];
    for j in 0..n {
        let mut d = m.get(j, j).re + shift;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
        }
        let dj = d.sqrt();
        l[j * n + j] = cr(dj);
        for i in (j + 1)..n {
            let mut v = m.get(i, j);
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = v / dj;
        }
    }
    true
}

pub(crate) fn strides_for(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

pub(crate) fn partial_transpose_matrix(
    m: &ComplexMatrix,
    factor_dims: &[usize],
    subsystem_index: usize,
) -> Result<ComplexMatrix> {
    if subsystem_index >= factor_dims.len() {
        return Err(Error::FactorOutOfRange {
            index: subsystem_index,
            count: factor_dims.len(),
        });
    }
    let dim = m.dim();
    let strides = strides_for(factor_dims);
    let s = strides[subsystem_index];
    let d = factor_dims[subsystem_index];
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        let ik = (i / s) % d;
        for j in 0..dim {
            let jk = (j / s) % d;
            // Swap the chosen factor's components between row and column.
            let i2 = i - ik * s + jk * s;
            let j2 = j - jk * s + ik * s;
            out.set(i2, j2, m.get(i, j));
        }
    }
    Ok(out)
}

/// Builds the flat index map for a factor permutation; `perm[old] = new`.
/// Returns (map old flat index -> new flat index, permuted dims).
pub fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = dims.len();
    if perm.len() != n {
        return Err(Error::DimMismatch {
            left: perm.len(),
            right: n,
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidCut(format!(
                "slot map {perm:?} is not a permutation"
            )));
        }
        seen[p] = true;
    }
    let mut new_dims = vec![0usize; n];
    for (old, &new) in perm.iter().enumerate() {
        new_dims[new] = dims[old];
    }
    let old_strides = strides_for(dims);
    let new_strides = strides_for(&new_dims);
    let total: usize = dims.iter().product();
    let mut map = vec![0usize; total];
    for (flat, slot) in map.iter_mut().enumerate() {
        let mut new_flat = 0;
        for k in 0..n {
            let component = (flat / old_strides[k]) % dims[k];
            new_flat += component * new_strides[perm[k]];
        }
        *slot = new_flat;
    }
    Ok((map, new_dims))
}

/// Reorders the tensor factors of a ket; `perm[old_slot] = new_slot`.
pub fn permute_ket(ket: &Ket, dims: &[usize], perm: &[usize]) -> Result<(Ket, Vec<usize>)> {
    let (map, new_dims) = permutation_index_map(dims, perm)?;
    if ket.dim() != map.len() {
        return Err(Error::DimMismatch {
            left: ket.dim(),
            right: map.len(),
        });
    }
    let mut amps = vec![C_ZERO; ket.dim()];
    for (old, &new) in map.iter().enumerate() {
        amps[new] = ket.get(old);
    }
    Ok((Ket::from_raw(amps), new_dims))
}

/// Reorders the tensor factors of a square matrix; `perm[old_slot] = new_slot`.
pub fn permute_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let (map, new_dims) = permutation_index_map(dims, perm)?;
    if m.dim() != map.len() {
        return Err(Error::DimMismatch {
            left: m.dim(),
            right: map.len(),
        });
    }
    let mut out = ComplexMatrix::zeros(m.dim());
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            out.set(map[i], map[j], m.get(i, j));
        }
    }
    Ok((out, new_dims))
}

/// Hilbert-Schmidt inner product Tr(a·b) of two Hermitian matrices.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    a.check_hermitian(OP_HERMITIAN_TOL)?;
    b.check_hermitian(OP_HERMITIAN_TOL)?;
    let n = a.dim();
    let mut acc = C_ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a.get(i, k) * b.get(k, i);
        }
    }
    debug_assert!(acc.im.abs() <= OP_HERMITIAN_TOL * (1.0 + acc.re.abs()));
    Ok(acc.re)
}

/// Hilbert-Schmidt distance √Tr((a-b)(a-b)†) — the Frobenius norm of a-b.
pub fn hs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut acc = 0.0;
    for (x, y) in a.entries().iter().zip(b.entries()) {
        acc += (x - y).norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Squared Hilbert-Schmidt distance.
pub fn hs_distance_sq(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let d = hs_distance(a, b)?;
    Ok(d * d)
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Ket>)> {
    eigen::hermitian_eig(m)
}

/// Rectangular complex matrix; used for local maps and projections.
#[derive(Clone, PartialEq, Debug)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl RectMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if r == 0 || c == 0 {
            return Err(Error::EmptyKeep);
        }
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimMismatch {
                    left: c,
                    right: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries,
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&re| cr(re)).collect())
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![C_ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C_ONE;
        }
        Self {
            rows: dim,
            cols: dim,
            entries,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    /// Kronecker product.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![C_ZERO; rows * cols];
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.get(ia, ja);
                if a == C_ZERO {
                    continue;
                }
                for ib in 0..other.rows {
                    for jb in 0..other.cols {
                        entries[(ia * other.rows + ib) * cols + (ja * other.cols + jb)] =
                            a * other.get(ib, jb);
                    }
                }
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// K m K† for square `m` with dim = cols.
    pub fn conjugate_with(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.dim() != self.cols {
            return Err(Error::DimMismatch {
                left: m.dim(),
                right: self.cols,
            });
        }
        // tmp = K m  (rows x cols)
        let mut tmp = vec![C_ZERO; self.rows * self.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let kik = self.get(i, k);
                if kik == C_ZERO {
                    continue;
                }
                for j in 0..self.cols {
                    tmp[i * self.cols + j] += kik * m.get(k, j);
                }
            }
        }
        // out = tmp K†
        let mut out = ComplexMatrix::zeros(self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                let mut acc = C_ZERO;
                for k in 0..self.cols {
                    acc += tmp[i * self.cols + k] * self.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Matrix product self · other.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut entries = vec![C_ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// K applied to raw amplitudes (no normalization).
    pub fn apply_raw(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        if amps.len() != self.cols {
            return Err(Error::DimMismatch {
                left: amps.len(),
                right: self.cols,
            });
        }
        let mut out = vec![C_ZERO; self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i] += self.get(i, j) * amps[j];
            }
        }
        Ok(out)
    }

    /// Largest singular value, via the top eigenvalue of K K†.
    pub fn operator_norm(&self) -> Result<f64> {
        let mut gram = ComplexMatrix::zeros(self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                let mut acc = C_ZERO;
                for k in 0..self.cols {
                    acc += self.get(i, k) * self.get(j, k).conj();
                }
                gram.set(i, j, acc);
            }
        }
        let vals = eigen::eigenvalues(&gram)?;
        Ok(vals.last().copied().unwrap_or(0.0).max(0.0).sqrt())
    }
}
