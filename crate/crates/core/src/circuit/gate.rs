use crate::error::{Error, Result};
use crate::scalar::{cx, lit, phase_factor, CMatrix, Cx, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind<T: Real> {
    X,
    H,
    Z,
    Rx(T),
    Rz(T),
    /// `U3(theta, phi, lambda)`.
    U3(T, T, T),
    /// Sites `[control, target]`.
    Cnot,
    /// Controlled `Rx(theta)`, sites `[control, target]`.
    CRx(T),
    /// Identity for a duration in ns; only noise acts during it.
    Delay(T),
    /// Arbitrary unitary; `sites[0]` is its least significant bit.
    Unitary(CMatrix<T>),
}

impl<T: Real> GateKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Z => "Z",
            GateKind::Rx(_) => "RX",
            GateKind::Rz(_) => "RZ",
            GateKind::U3(..) => "U3",
            GateKind::Cnot => "CNOT",
            GateKind::CRx(_) => "CRX",
            GateKind::Delay(_) => "DELAY",
            GateKind::Unitary(_) => "UNITARY",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::CRx(_) => 2,
            GateKind::Unitary(m) => m.nrows().trailing_zeros() as usize,
            _ => 1,
        }
    }

    pub fn params(&self) -> Vec<T> {
        match self {
            GateKind::Rx(a) | GateKind::Rz(a) | GateKind::CRx(a) | GateKind::Delay(a) => vec![*a],
            GateKind::U3(a, b, c) => vec![*a, *b, *c],
            GateKind::Unitary(m) => m.transpose().iter().flat_map(|z| [z.re, z.im]).collect(),
            _ => Vec::new(),
        }
    }

    pub fn matrix(&self) -> CMatrix<T> {
        let (o, l) = (cx::<T>(0.0, 0.0), cx::<T>(1.0, 0.0));
        let m2 = |a, b, c, d| CMatrix::from_row_slice(2, 2, &[a, b, c, d]);
        match self {
            GateKind::X => m2(o, l, l, o),
            GateKind::H => {
                let r = cx::<T>(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                m2(r, r, r, -r)
            }
            GateKind::Z => m2(l, o, o, -l),
            GateKind::Rx(theta) => rx(*theta),
            GateKind::Rz(theta) => {
                let half = *theta * lit(0.5);
                m2(phase_factor(half), o, o, phase_factor(-half))
            }
            GateKind::U3(theta, phi, lambda) => u3(*theta, *phi, *lambda),
            GateKind::Cnot => controlled(&m2(o, l, l, o)),
            GateKind::CRx(theta) => controlled(&rx(*theta)),
            GateKind::Delay(_) => CMatrix::identity(2, 2),
            GateKind::Unitary(m) => m.clone(),
        }
    }

    /// Whether the gate is the identity on the state (noise aside).
    pub fn is_idle(&self) -> bool {
        matches!(self, GateKind::Delay(_))
    }
}

fn rx<T: Real>(theta: T) -> CMatrix<T> {
    let half = theta * lit(0.5);
    let (c, s) = (Cx::new(half.cos(), T::zero()), Cx::new(T::zero(), -half.sin()));
    CMatrix::from_row_slice(2, 2, &[c, s, s, c])
}

/// `[[cos, -e^{i lambda} sin], [e^{i phi} sin, e^{i(phi+lambda)} cos]]`.
pub(crate) fn u3<T: Real>(theta: T, phi: T, lambda: T) -> CMatrix<T> {
    let half = theta * lit(0.5);
    let (c, s) = (half.cos(), half.sin());
    let e = |a: T| Cx::new(a.cos(), a.sin());
    CMatrix::from_row_slice(
        2,
        2,
        &[Cx::new(c, T::zero()), -e(lambda) * s, e(phi) * s, e(phi + lambda) * c],
    )
}

/// Two-site matrix on `[control, target]` (control is the low bit).
fn controlled<T: Real>(op: &CMatrix<T>) -> CMatrix<T> {
    let mut m = CMatrix::<T>::identity(4, 4);
    for (r, gr) in [(0, 1), (1, 3)] {
        for (c, gc) in [(0, 1), (1, 3)] {
            m[(gr, gc)] = op[(r, c)];
        }
    }
    m
}

/// A gate placed on sites, optionally present only with probability `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T: Real> {
    pub kind: GateKind<T>,
    pub sites: Vec<usize>,
    pub probability: Option<T>,
}

impl<T: Real> Gate<T> {
    pub fn new(kind: GateKind<T>, sites: Vec<usize>) -> Self {
        Gate { kind, sites, probability: None }
    }

    pub fn with_probability(mut self, p: T) -> Self {
        self.probability = Some(p);
        self
    }

    pub fn validate(&self, site_count: usize) -> Result<()> {
        if self.sites.len() != self.kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} acts on {} sites, got {}",
                self.kind.name(),
                self.kind.arity(),
                self.sites.len()
            )));
        }
        crate::linalg::check_sites(&self.sites, site_count)?;
        if self.kind.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGate(format!("{} has a non-finite parameter", self.kind.name())));
        }
        if let GateKind::Delay(d) = self.kind {
            if d < T::zero() {
                return Err(Error::InvalidGate(format!("negative delay {d}")));
            }
        }
        if let GateKind::Unitary(m) = &self.kind {
            if m.nrows() != m.ncols() || !m.nrows().is_power_of_two() || m.nrows() < 2 {
                return Err(Error::InvalidGate("unitary must be square with power-of-two size".into()));
            }
            let dev = crate::scalar::to_f64(crate::linalg::unitary_deviation(m));
            if dev > 1e-9 {
                return Err(Error::NotUnitary(dev));
            }
        }
        if let Some(p) = self.probability {
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::InvalidGate(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}
