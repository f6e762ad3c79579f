//! Dense complex matrix arithmetic for 2×2 and 4×4 matrices.
//!
//! Every operator in the protocol — observables, Kraus operators, POVM
//! effects, density matrices — is carried by [`ComplexMat`]. Dimensions are
//! fixed to 2 (one qubit on Bob's side) and 4 (the shared two-qubit state),
//! with Alice as the left tensor factor in the computational basis ordering
//! |00⟩, |01⟩, |10⟩, |11⟩.

use crate::error::{Error, Result};
use num_complex::Complex;
use std::fmt;

/// Complex scalar used throughout: double precision, finite by construction.
pub type C64 = Complex<f64>;

/// Default comparison tolerance for matrix predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Dense complex square matrix of dimension 2 or 4, row-major storage.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMat {
    dim: usize,
    entries: [C64; 16],
}

impl ComplexMat {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 2 || dim == 4 {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension(dim))
        }
    }

    /// All-zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            entries: [c64(0.0, 0.0); 16],
        })
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = c64(1.0, 0.0);
        }
        Ok(m)
    }

    /// Build from a row-major slice of `dim * dim` entries.
    pub fn from_entries(dim: usize, entries: &[C64]) -> Result<Self> {
        Self::check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let mut m = Self {
            dim,
            entries: [c64(0.0, 0.0); 16],
        };
        m.entries[..dim * dim].copy_from_slice(entries);
        Ok(m)
    }

    /// 2×2 matrix from rows.
    pub fn mat2(rows: [[C64; 2]; 2]) -> Self {
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::from_entries(2, &flat).expect("2x2 literal")
    }

    /// 4×4 matrix from rows.
    pub fn mat4(rows: [[C64; 4]; 4]) -> Self {
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::from_entries(4, &flat).expect("4x4 literal")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, z: C64) {
        self.entries[r * self.dim + c] = z;
    }

    /// Pauli σx.
    pub fn pauli_x() -> Self {
        Self::mat2([
            [c64(0.0, 0.0), c64(1.0, 0.0)],
            [c64(1.0, 0.0), c64(0.0, 0.0)],
        ])
    }

    /// Pauli σy.
    pub fn pauli_y() -> Self {
        Self::mat2([
            [c64(0.0, 0.0), c64(0.0, -1.0)],
            [c64(0.0, 1.0), c64(0.0, 0.0)],
        ])
    }

    /// Pauli σz.
    pub fn pauli_z() -> Self {
        Self::mat2([
            [c64(1.0, 0.0), c64(0.0, 0.0)],
            [c64(0.0, 0.0), c64(-1.0, 0.0)],
        ])
    }

    /// Checked matrix product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        Ok(self.mm(rhs))
    }

    /// Unchecked product for internal use where dimensions are known equal.
    pub(crate) fn mm(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self {
            dim: n,
            entries: [c64(0.0, 0.0); 16],
        };
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += a * rhs.entries[k * n + c];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let mut out = *self;
        for i in 0..self.dim * self.dim {
            out.entries[i] += rhs.entries[i];
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let mut out = *self;
        for i in 0..self.dim * self.dim {
            out.entries[i] -= rhs.entries[i];
        }
        Ok(out)
    }

    /// Scale by a real factor.
    pub fn scale(&self, factor: f64) -> Self {
        let mut out = *self;
        for e in out.entries.iter_mut() {
            *e *= factor;
        }
        out
    }

    /// Scale by a complex factor.
    pub fn scale_c(&self, factor: C64) -> Self {
        let mut out = *self;
        for e in out.entries.iter_mut() {
            *e *= factor;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self {
            dim: n,
            entries: [c64(0.0, 0.0); 16],
        };
        for r in 0..n {
            for c in 0..n {
                out.entries[r * n + c] = self.entries[c * n + r].conj();
            }
        }
        out
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// Kronecker product of two 2×2 matrices, left factor most significant.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim,
            });
        }
        if rhs.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rhs.dim,
            });
        }
        let mut out = Self::zeros(4)?;
        for ar in 0..2 {
            for ac in 0..2 {
                for br in 0..2 {
                    for bc in 0..2 {
                        out.entries[(2 * ar + br) * 4 + (2 * ac + bc)] =
                            self.at(ar, ac) * rhs.at(br, bc);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Trace over the second (Bob) tensor factor of a 4×4 matrix.
    pub fn partial_trace_bob(&self) -> Result<Self> {
        if self.dim != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: self.dim,
            });
        }
        let mut out = Self::zeros(2)?;
        for a in 0..2 {
            for ap in 0..2 {
                let mut z = c64(0.0, 0.0);
                for b in 0..2 {
                    z += self.at(2 * a + b, 2 * ap + b);
                }
                out.set(a, ap, z);
            }
        }
        Ok(out)
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim, "max_abs_diff dimension mismatch");
        (0..self.dim * self.dim)
            .map(|i| (self.entries[i] - rhs.entries[i]).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise approximate equality.
    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.dim == rhs.dim && self.max_abs_diff(rhs) <= tol
    }

    /// True iff the matrix equals its conjugate transpose within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
    ///
    /// Accuracy is well below 1e-12 on the O(1)-scaled Hermitian matrices the
    /// protocol produces. Returns values sorted ascending.
    pub fn hermitian_eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        if !self.is_hermitian(tol) {
            return Err(Error::NotHermitian(tol));
        }
        let n = self.dim;
        let mut a = *self;
        // Work on the exactly Hermitian part so rotations stay consistent.
        let adj = a.adjoint();
        for i in 0..n * n {
            a.entries[i] = (a.entries[i] + adj.entries[i]) * 0.5;
        }

        let scale = (0..n * n)
            .map(|i| a.entries[i].norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let stop = 1e-15 * scale;

        for _sweep in 0..60 {
            let mut max_off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.at(p, q);
                    let r = apq.norm();
                    max_off = max_off.max(r);
                    if r <= stop {
                        continue;
                    }
                    let u = apq / r;
                    let alpha = a.at(p, p).re;
                    let beta = a.at(q, q).re;
                    let m = (alpha - beta) / (2.0 * r);
                    // small-magnitude root of t^2 + 2mt - 1 = 0
                    let t = if m >= 0.0 {
                        1.0 / (m + (1.0 + m * m).sqrt())
                    } else {
                        -1.0 / (-m + (1.0 + m * m).sqrt())
                    };
                    let cth = 1.0 / (1.0 + t * t).sqrt();
                    let sth = t * cth;

                    // A <- V† A V with V the (p,q) complex rotation block
                    // [[c, -s·u], [s·conj(u), c]].
                    for i in 0..n {
                        let aip = a.at(i, p);
                        let aiq = a.at(i, q);
                        a.set(i, p, aip * cth + aiq * (u.conj() * sth));
                        a.set(i, q, aiq * cth - aip * (u * sth));
                    }
                    for j in 0..n {
                        let apj = a.at(p, j);
                        let aqj = a.at(q, j);
                        a.set(p, j, apj * cth + aqj * (u * sth));
                        a.set(q, j, aqj * cth - apj * (u.conj() * sth));
                    }
                    a.set(p, q, c64(0.0, 0.0));
                    a.set(q, p, c64(0.0, 0.0));
                    a.set(p, p, c64(a.at(p, p).re, 0.0));
                    a.set(q, q, c64(a.at(q, q).re, 0.0));
                }
            }
            if max_off <= stop {
                break;
            }
        }

        let mut eigs: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(eigs)
    }

    /// Positive semidefiniteness: Hermitian within `tol` and minimal
    /// eigenvalue at least `-tol`. Non-Hermitian input yields `false`.
    pub fn is_psd(&self, tol: f64) -> bool {
        match self.hermitian_eigenvalues(tol) {
            Ok(eigs) => eigs.first().map(|&e| e >= -tol).unwrap_or(false),
            Err(_) => false,
        }
    }
}

impl fmt::Debug for ComplexMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMat {}x{} [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.at(r, c);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phi_plus_projector() -> ComplexMat {
        // |Φ+⟩ = (|00⟩ + |11⟩)/√2
        let h = c64(0.5, 0.0);
        let z = c64(0.0, 0.0);
        ComplexMat::mat4([[h, z, z, h], [z, z, z, z], [z, z, z, z], [h, z, z, h]])
    }

    #[test]
    fn mul_identity_and_pauli_algebra() {
        let i2 = ComplexMat::identity(2).unwrap();
        let sx = ComplexMat::pauli_x();
        let sy = ComplexMat::pauli_y();
        let sz = ComplexMat::pauli_z();

        assert!(i2.mul(&sx).unwrap().approx_eq(&sx, 0.0));
        // σz σx = iσy
        let prod = sz.mul(&sx).unwrap();
        assert!(prod.approx_eq(&sy.scale_c(c64(0.0, 1.0)), 1e-15));
    }

    #[test]
    fn mul_alice_observables_at_quarter_pi() {
        // A0·A1 at δ = π/4 equals cos(π/2)·I + i·sin(π/2)·σy = iσy
        let d = std::f64::consts::FRAC_PI_4;
        let sx = ComplexMat::pauli_x();
        let sz = ComplexMat::pauli_z();
        let a0 = sz.scale(d.sin()).add(&sx.scale(d.cos())).unwrap();
        let a1 = sz.scale(-d.sin()).add(&sx.scale(d.cos())).unwrap();
        let prod = a0.mul(&a1).unwrap();
        let expected = ComplexMat::pauli_y().scale_c(c64(0.0, 1.0));
        assert!(prod.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn mul_dimension_mismatch() {
        let i2 = ComplexMat::identity(2).unwrap();
        let i4 = ComplexMat::identity(4).unwrap();
        assert!(matches!(
            i2.mul(&i4),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 4
            })
        ));
    }

    #[test]
    fn tensor_basics() {
        let i2 = ComplexMat::identity(2).unwrap();
        let i4 = ComplexMat::identity(4).unwrap();
        assert!(i2.tensor(&i2).unwrap().approx_eq(&i4, 0.0));

        // σz⊗σz leaves |00⟩⟨00| invariant
        let sz = ComplexMat::pauli_z();
        let zz = sz.tensor(&sz).unwrap();
        let mut p00 = ComplexMat::zeros(4).unwrap();
        p00.set(0, 0, c64(1.0, 0.0));
        let out = zz.mul(&p00).unwrap().mul(&zz.adjoint()).unwrap();
        assert!(out.approx_eq(&p00, 1e-15));

        // (σx⊗σx)|Φ+⟩⟨Φ+| = |Φ+⟩⟨Φ+|  (eigenvalue +1)
        let sx = ComplexMat::pauli_x();
        let xx = sx.tensor(&sx).unwrap();
        let phi = phi_plus_projector();
        assert!(xx.mul(&phi).unwrap().approx_eq(&phi, 1e-15));
    }

    #[test]
    fn adjoint_examples() {
        let sy = ComplexMat::pauli_y();
        assert!(sy.adjoint().approx_eq(&sy, 0.0));
        let isy = sy.scale_c(c64(0.0, 1.0));
        assert!(isy.adjoint().approx_eq(&sy.scale_c(c64(0.0, -1.0)), 0.0));
    }

    #[test]
    fn trace_examples() {
        assert_eq!(ComplexMat::identity(4).unwrap().trace(), c64(4.0, 0.0));
        assert_eq!(ComplexMat::pauli_x().trace(), c64(0.0, 0.0));
        let tr = phi_plus_projector().trace();
        assert!((tr.re - 1.0).abs() < 1e-15 && tr.im.abs() < 1e-15);
    }

    #[test]
    fn hermiticity_and_psd() {
        let i2 = ComplexMat::identity(2).unwrap();
        assert!(i2.is_hermitian(0.0));
        assert!(i2.is_psd(DEFAULT_TOL));

        let sz = ComplexMat::pauli_z();
        assert!(sz.is_hermitian(0.0));
        assert!(!sz.is_psd(DEFAULT_TOL)); // eigenvalue -1

        // E-|1 = α B-|1 with α = 0.5 is a nonnegative multiple of a projector
        let mut b_minus = ComplexMat::zeros(2).unwrap();
        b_minus.set(1, 1, c64(0.5, 0.0));
        assert!(b_minus.is_psd(DEFAULT_TOL));

        // is_psd on a non-Hermitian input
        let mut nh = ComplexMat::zeros(2).unwrap();
        nh.set(0, 1, c64(1.0, 0.0));
        assert!(!nh.is_psd(DEFAULT_TOL));
    }

    #[test]
    fn eigenvalues_known_cases() {
        let sz = ComplexMat::pauli_z();
        let e = sz.hermitian_eigenvalues(1e-12).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);

        let sy = ComplexMat::pauli_y();
        let e = sy.hermitian_eigenvalues(1e-12).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);

        // |Φ+⟩⟨Φ+| is a rank-1 projector: eigenvalues {0,0,0,1}
        let e = phi_plus_projector().hermitian_eigenvalues(1e-12).unwrap();
        assert!(e[..3].iter().all(|x| x.abs() < 1e-13));
        assert!((e[3] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn partial_trace_examples() {
        let i4 = ComplexMat::identity(4).unwrap().scale(0.25);
        let half_i2 = ComplexMat::identity(2).unwrap().scale(0.5);
        assert!(i4.partial_trace_bob().unwrap().approx_eq(&half_i2, 1e-15));

        let mut p00 = ComplexMat::zeros(4).unwrap();
        p00.set(0, 0, c64(1.0, 0.0));
        let mut p0 = ComplexMat::zeros(2).unwrap();
        p0.set(0, 0, c64(1.0, 0.0));
        assert!(p00.partial_trace_bob().unwrap().approx_eq(&p0, 1e-15));

        // |ψ⟩ = cosθ|00⟩ + sinθ|11⟩ at θ = π/6 → marginal diag(3/4, 1/4)
        let th = std::f64::consts::FRAC_PI_6;
        let (ct, st) = (th.cos(), th.sin());
        let z = c64(0.0, 0.0);
        let psi = ComplexMat::mat4([
            [c64(ct * ct, 0.0), z, z, c64(ct * st, 0.0)],
            [z, z, z, z],
            [z, z, z, z],
            [c64(ct * st, 0.0), z, z, c64(st * st, 0.0)],
        ]);
        let marg = psi.partial_trace_bob().unwrap();
        assert!((marg.at(0, 0).re - 0.75).abs() < 1e-12);
        assert!((marg.at(1, 1).re - 0.25).abs() < 1e-12);
        assert!(marg.at(0, 1).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_entries() {
        let bad = vec![c64(f64::NAN, 0.0); 4];
        assert!(matches!(
            ComplexMat::from_entries(2, &bad),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            ComplexMat::zeros(3),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c64(re, im))
    }

    fn arb_mat(dim: usize) -> impl Strategy<Value = ComplexMat> {
        prop::collection::vec(arb_c64(), dim * dim)
            .prop_map(move |v| ComplexMat::from_entries(dim, &v).unwrap())
    }

    proptest! {
        #[test]
        fn mul_associative(a in arb_mat(4), b in arb_mat(4), c in arb_mat(4)) {
            let ab_c = a.mm(&b).mm(&c);
            let a_bc = a.mm(&b.mm(&c));
            prop_assert!(ab_c.max_abs_diff(&a_bc) < 1e-12);
        }

        #[test]
        fn tensor_trace_multiplicative(a in arb_mat(2), b in arb_mat(2)) {
            let t = a.tensor(&b).unwrap();
            let lhs = t.trace();
            let rhs = a.trace() * b.trace();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn adjoint_involution(a in arb_mat(4)) {
            prop_assert!(a.adjoint().adjoint().approx_eq(&a, 0.0));
        }

        #[test]
        fn hermitian_eigs_real_and_sum_to_trace(a in arb_mat(4)) {
            // h = (a + a†)/2 is Hermitian
            let h = a.add(&a.adjoint()).unwrap().scale(0.5);
            let eigs = h.hermitian_eigenvalues(1e-10).unwrap();
            let sum: f64 = eigs.iter().sum();
            prop_assert!((sum - h.trace().re).abs() < 1e-10);
            prop_assert!(h.trace().im.abs() < 1e-12);
        }

        #[test]
        fn partial_trace_of_product(a in arb_mat(2), b in arb_mat(2)) {
            let t = a.tensor(&b).unwrap();
            let reduced = t.partial_trace_bob().unwrap();
            let expected = a.scale_c(b.trace());
            prop_assert!(reduced.max_abs_diff(&expected) < 1e-12);
        }
    }
}
