//! Two-qubit KAK synthesis: any 4x4 unitary as four layers of single-site
//! `U3` gates interleaved with three CNOTs (control on the first site).

use super::gate::{u3, GateKind};
use super::program::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{kron, unitary_deviation};
use crate::scalar::{cr, cx, lit, to_f64, CMatrix, Cx, Real};
use nalgebra::{ComplexField, DMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct U3Params<T> {
    pub theta: T,
    pub phi: T,
    pub lambda: T,
}

impl<T: Real> U3Params<T> {
    pub fn matrix(&self) -> CMatrix<T> {
        u3(self.theta, self.phi, self.lambda)
    }

    pub fn gate(&self) -> GateKind<T> {
        GateKind::U3(self.theta, self.phi, self.lambda)
    }
}

/// Writes a 2x2 unitary as `exp(i gamma) U3(theta, phi, lambda)`.
pub fn u3_from_unitary<T: Real>(u: &CMatrix<T>) -> (U3Params<T>, T) {
    let eps: T = lit(1e-14);
    let (c, s) = (u[(0, 0)].modulus(), u[(1, 0)].modulus());
    let theta = s.atan2(c) * lit(2.0);
    let arg = |z: Cx<T>| z.im.atan2(z.re);
    let (gamma, phi, lambda) = if s <= eps {
        let g = arg(u[(0, 0)]);
        (g, T::zero(), arg(u[(1, 1)]) - g)
    } else if c <= eps {
        let g = arg(u[(1, 0)]);
        (g, T::zero(), arg(-u[(0, 1)]) - g)
    } else {
        let g = arg(u[(0, 0)]);
        (g, arg(u[(1, 0)]) - g, arg(-u[(0, 1)]) - g)
    };
    (U3Params { theta, phi, lambda }, gamma)
}

/// Result of [`kak_decompose`]. `locals[layer] = [first site, second site]`;
/// a CNOT from the first to the second site separates consecutive layers.
#[derive(Clone, Debug, PartialEq)]
pub struct KakDecomposition<T> {
    pub locals: [[U3Params<T>; 2]; 4],
    /// Coefficients `(a, b, c)` of `exp(i (a XX + b YY + c ZZ))`.
    pub interaction: [T; 3],
    pub global_phase: T,
}

impl<T: Real> KakDecomposition<T> {
    pub fn cnot_placements(&self) -> [(usize, usize); 3] {
        [(0, 1); 3]
    }

    /// Appends the gates to `circuit` with the first and second sites at
    /// `q0` and `q1`.
    pub fn append_to(&self, circuit: &mut Circuit<T>, q0: usize, q1: usize) -> Result<()> {
        for (layer, pair) in self.locals.iter().enumerate() {
            circuit.push(super::Gate::new(pair[0].gate(), vec![q0]))?;
            circuit.push(super::Gate::new(pair[1].gate(), vec![q1]))?;
            if layer < 3 {
                circuit.cnot(q0, q1)?;
            }
        }
        Ok(())
    }

    pub fn to_circuit(&self) -> Result<Circuit<T>> {
        let mut c = Circuit::new(2)?;
        self.append_to(&mut c, 0, 1)?;
        Ok(c)
    }

    /// `exp(i global_phase)` times the circuit unitary.
    pub fn unitary(&self) -> Result<CMatrix<T>> {
        let u = super::circuit_unitary(&self.to_circuit()?)?;
        Ok(u * Cx::new(self.global_phase.cos(), self.global_phase.sin()))
    }
}

fn magic<T: Real>() -> CMatrix<T> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (o, l, i) = (cx::<T>(0.0, 0.0), cx::<T>(r, 0.0), cx::<T>(0.0, r));
    CMatrix::from_row_slice(4, 4, &[l, o, o, i, o, i, l, o, o, i, -l, o, l, o, o, -i])
}

fn ry<T: Real>(theta: T) -> CMatrix<T> {
    u3(theta, T::zero(), T::zero())
}

fn rz<T: Real>(theta: T) -> CMatrix<T> {
    GateKind::Rz(theta).matrix()
}

/// Splits a local 4x4 operator into `(second site, first site)` factors.
fn factor_local<T: Real>(m: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let block = |i: usize, j: usize| m.view((2 * i, 2 * j), (2, 2)).into_owned();
    let (mut bi, mut bj, mut best) = (0, 0, T::zero());
    for i in 0..2 {
        for j in 0..2 {
            let n = block(i, j).norm();
            if n > best {
                (bi, bj, best) = (i, j, n);
            }
        }
    }
    let b0 = block(bi, bj);
    let det = b0.determinant();
    let root = ComplexField::sqrt(det);
    let low = b0 / root;
    let mut high = CMatrix::<T>::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            high[(i, j)] = (low.adjoint() * block(i, j)).trace() * cx::<T>(0.5, 0.0);
        }
    }
    (high, low)
}

fn real_orthogonal_diagonalizer<T: Real>(m: &CMatrix<T>) -> DMatrix<T> {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let mut best: Option<(T, DMatrix<T>)> = None;
    for k in 0..32 {
        // A generic mix of the two commuting symmetric parts shares their
        // eigenvectors while (almost surely) splitting degeneracies.
        let r: T = lit((0.37 + 0.618_033_988_749_895 * k as f64).fract());
        let mix = &re * r + &im * (T::one() - r);
        let mix = (&mix + mix.transpose()) * lit::<T>(0.5);
        let mut p = mix.symmetric_eigen().eigenvectors;
        if p.determinant() < T::zero() {
            let c = -p.column(0);
            p.set_column(0, &c);
        }
        let pc = p.map(cr);
        let d = pc.transpose() * m * &pc;
        let mut off = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    off = off.max(d[(i, j)].modulus());
                }
            }
        }
        if off < lit(1e-13) {
            return p;
        }
        if best.as_ref().is_none_or(|(o, _)| off < *o) {
            best = Some((off, p));
        }
    }
    best.expect("at least one attempt").1
}

/// Decomposes a 4x4 unitary. The first site is the low bit of the index.
pub fn kak_decompose<T: Real>(u: &CMatrix<T>) -> Result<KakDecomposition<T>> {
    if u.shape() != (4, 4) {
        return Err(Error::DimensionMismatch { expected: 4, found: u.nrows() });
    }
    let dev = unitary_deviation(u);
    let tol = lit::<T>(1e-12).max(T::default_epsilon() * lit(1e3));
    if !(dev <= tol) {
        return Err(Error::NotUnitary(to_f64(dev)));
    }
    let det = u.determinant();
    let quarter = det.im.atan2(det.re) * lit(0.25);
    let su = u * Cx::new(quarter.cos(), -quarter.sin());

    let b = magic::<T>();
    let up = b.adjoint() * &su * &b;
    let m2 = up.transpose() * &up;
    let p = real_orthogonal_diagonalizer(&m2);
    let pc = p.map(cr);
    let d = pc.transpose() * &m2 * &pc;

    // Put the branch cut of the half-angle where no eigenvalue sits.
    let args: Vec<T> = (0..4).map(|k| d[(k, k)].im.atan2(d[(k, k)].re)).collect();
    let mut cut = T::zero();
    let mut best_gap = -T::one();
    for j in 0..64 {
        let a: T = lit(std::f64::consts::TAU * j as f64 / 64.0 - std::f64::consts::PI);
        let gap = args.iter().fold(T::pi(), |g, &x| {
            let mut diff = (x - a).abs() % T::two_pi();
            if diff > T::pi() {
                diff = T::two_pi() - diff;
            }
            g.min(diff)
        });
        if gap > best_gap {
            (best_gap, cut) = (gap, a);
        }
    }
    let centre = cut + T::pi();
    let mut theta: Vec<T> = args
        .iter()
        .map(|&x| {
            let mut y = x - centre;
            while y > T::pi() {
                y -= T::two_pi();
            }
            while y <= -T::pi() {
                y += T::two_pi();
            }
            (centre + y) * lit(0.5)
        })
        .collect();

    let phase_diag = |th: &[T], sign: T| {
        CMatrix::<T>::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            th.iter().map(|&t| Cx::new(t.cos(), sign * t.sin())),
        ))
    };
    let mut k1m = &up * &pc * phase_diag(&theta, -T::one());
    if k1m.map(|z| z.re).determinant() < T::zero() {
        let c = -k1m.column(0);
        k1m.set_column(0, &c);
        theta[0] += T::pi();
    }
    let k1 = &b * &k1m * b.adjoint();
    let k2 = &b * pc.transpose() * b.adjoint();

    let quarter_sum = |w: [f64; 4]| (0..4).fold(T::zero(), |acc, k| acc + theta[k] * lit(w[k])) * lit(0.25);
    let a = quarter_sum([1.0, 1.0, -1.0, -1.0]);
    let bb = quarter_sum([-1.0, 1.0, -1.0, 1.0]);
    let c = quarter_sum([1.0, -1.0, -1.0, 1.0]);

    let half_pi = T::frac_pi_2();
    let id = CMatrix::<T>::identity(2, 2);
    let h = GateKind::<T>::H.matrix();
    let hh = kron(&h, &h);
    let layers = [
        &hh * kron(&rz(-half_pi), &id) * &k2,
        kron(&ry(half_pi + a * lit(2.0)), &rz(-c * lit(2.0) - half_pi)) * &hh,
        &hh * kron(&ry(-bb * lit(2.0) - half_pi), &id),
        &k1 * kron(&id, &rz(half_pi)) * &hh,
    ];
    let mut locals = [[U3Params { theta: T::zero(), phi: T::zero(), lambda: T::zero() }; 2]; 4];
    for (slot, layer) in locals.iter_mut().zip(layers.iter()) {
        let (high, low) = factor_local(layer);
        *slot = [u3_from_unitary(&low).0, u3_from_unitary(&high).0];
    }
    let mut out = KakDecomposition { locals, interaction: [a, bb, c], global_phase: T::zero() };
    let built = out.unitary()?;
    let overlap = (0..16).fold(Cx::new(T::zero(), T::zero()), |acc, i| {
        acc + built.as_slice()[i].conj() * u.as_slice()[i]
    });
    out.global_phase = overlap.im.atan2(overlap.re);
    Ok(out)
}
