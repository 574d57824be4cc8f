//! Linear Gaussian dynamics of the six-mode four-wave-mixing process.
//!
//! A spatially structured pump drives seven parametric-gain channels between
//! six output modes: four single-pump channels and three double-pump
//! channels. Each channel `g (a_i† a_j† + a_i a_j)` couples one mode pair, so
//! the interaction is fully described by a symmetric 6×6 coupling matrix.
//! In the quadrature basis `X_i = a_i + a_i†`, `Y_i = i(a_i† − a_i)` the
//! Heisenberg equations are linear, `dX/dt = A X` and `dY/dt = −A Y`, and the
//! vacuum-input covariance matrix is `σ = S Sᵀ` with the symplectic
//! propagator `S = diag(e^{At}, e^{−At})`.
//!
//! The vacuum covariance matrix is the identity in this normalization.

use nalgebra::{Matrix6, SMatrix, Vector6};

use crate::error::{Error, Result};

/// Number of optical modes.
pub const N_MODES: usize = 6;

pub type Mat6 = Matrix6<f64>;
pub type Mat12 = SMatrix<f64, 12, 12>;

/// Relative accuracy demanded of the symmetric eigendecomposition that backs
/// the matrix exponential.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// The seven coupled mode pairs (1-based) and which strength drives each:
/// single-pump-1 pairs carry `g1`, single-pump-2 pairs carry `g2`, and
/// double-pump pairs carry `g3`.
pub const COUPLED_PAIRS: [(usize, usize, CouplingKind); 7] = [
    (1, 2, CouplingKind::G1),
    (3, 5, CouplingKind::G1),
    (1, 4, CouplingKind::G2),
    (3, 6, CouplingKind::G2),
    (1, 3, CouplingKind::G3),
    (4, 5, CouplingKind::G3),
    (2, 6, CouplingKind::G3),
];

/// Which of the three interaction strengths drives a coupled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    G1,
    G2,
    G3,
}

/// The three interaction strengths and the interaction time.
///
/// All fields are dimensionless rates/times and must be finite and
/// non-negative; operations validate on entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingStrengths {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub t: f64,
}

impl CouplingStrengths {
    pub fn new(g1: f64, g2: f64, g3: f64, t: f64) -> Result<Self> {
        let c = Self { g1, g2, g3, t };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g1", self.g1),
            ("g2", self.g2),
            ("g3", self.g3),
            ("t", self.t),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be finite and non-negative"
                )));
            }
        }
        Ok(())
    }

    fn kind_value(&self, kind: CouplingKind) -> f64 {
        match kind {
            CouplingKind::G1 => self.g1,
            CouplingKind::G2 => self.g2,
            CouplingKind::G3 => self.g3,
        }
    }
}

/// Symmetric zero-diagonal 6×6 matrix of pairwise interaction strengths; the
/// generator of the `X`-quadrature dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix(Mat6);

impl CouplingMatrix {
    pub fn entries(&self) -> &Mat6 {
        &self.0
    }

    /// Orthogonal eigendecomposition `A = V D Vᵀ`, with the residual
    /// `‖A V − V D‖_max` checked against [`EIGEN_RESIDUAL_TOL`].
    pub fn eigendecompose(&self) -> Result<(Vector6<f64>, Mat6)> {
        let eig = self.0.symmetric_eigen();
        let residual = (self.0 * eig.eigenvectors
            - eig.eigenvectors * Mat6::from_diagonal(&eig.eigenvalues))
        .amax();
        let scale = self.0.amax().max(1.0);
        if residual > EIGEN_RESIDUAL_TOL * scale {
            return Err(Error::NumericalFailure(format!(
                "coupling-matrix eigendecomposition residual {residual:.3e} exceeds {:.3e}",
                EIGEN_RESIDUAL_TOL * scale
            )));
        }
        Ok((eig.eigenvalues, eig.eigenvectors))
    }
}

/// Build the coupling matrix from the interaction strengths.
pub fn build_coupling_matrix(c: &CouplingStrengths) -> Result<CouplingMatrix> {
    c.validate()?;
    let mut m = Mat6::zeros();
    for &(i, j, kind) in &COUPLED_PAIRS {
        let g = c.kind_value(kind);
        m[(i - 1, j - 1)] = g;
        m[(j - 1, i - 1)] = g;
    }
    Ok(CouplingMatrix(m))
}

/// How the twelve quadratures are arranged in a 12×12 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureOrdering {
    /// `(X₁,…,X₆, Y₁,…,Y₆)` — the internal convention; block-diagonalizes σ.
    Grouped,
    /// `(X₁,Y₁,…,X₆,Y₆)` — the conventional export layout.
    Interleaved,
}

impl QuadratureOrdering {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureOrdering::Grouped => "grouped",
            QuadratureOrdering::Interleaved => "interleaved",
        }
    }
}

/// Index permutation taking a grouped position to its interleaved position.
fn grouped_to_interleaved(i: usize) -> usize {
    if i < N_MODES {
        2 * i
    } else {
        2 * (i - N_MODES) + 1
    }
}

/// Symplectic propagator `S = diag(e^{At}, e^{−At})` in grouped ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    s: Mat12,
}

impl Propagator {
    pub fn matrix(&self) -> &Mat12 {
        &self.s
    }

    /// Max-norm of `S Ω Sᵀ − Ω`; zero up to eigensolver error.
    pub fn symplectic_residual(&self) -> f64 {
        let omega = omega12_grouped();
        (self.s * omega * self.s.transpose() - omega).amax()
    }
}

/// Symplectic form Ω in grouped ordering: `[[0, I₆], [−I₆, 0]]`.
pub fn omega12_grouped() -> Mat12 {
    let mut w = Mat12::zeros();
    for i in 0..N_MODES {
        w[(i, N_MODES + i)] = 1.0;
        w[(N_MODES + i, i)] = -1.0;
    }
    w
}

fn exp_from_eigen(vals: &Vector6<f64>, vecs: &Mat6, scale: f64) -> Mat6 {
    let d = Mat6::from_diagonal(&vals.map(|v| (scale * v).exp()));
    vecs * d * vecs.transpose()
}

/// Evolve the quadratures for time `t` via the spectral matrix exponential.
pub fn propagator(c: &CouplingStrengths) -> Result<Propagator> {
    let ax = build_coupling_matrix(c)?;
    let (vals, vecs) = ax.eigendecompose()?;
    let ep = exp_from_eigen(&vals, &vecs, c.t);
    let em = exp_from_eigen(&vals, &vecs, -c.t);
    let mut s = Mat12::zeros();
    for i in 0..N_MODES {
        for j in 0..N_MODES {
            s[(i, j)] = ep[(i, j)];
            s[(N_MODES + i, N_MODES + j)] = em[(i, j)];
        }
    }
    Ok(Propagator { s })
}

/// 12×12 covariance matrix of quadrature second moments, tagged with its
/// quadrature ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    sigma: Mat12,
    ordering: QuadratureOrdering,
}

impl CovarianceMatrix {
    /// Wrap an externally produced matrix. The matrix is symmetrized; no
    /// physicality check is performed here.
    pub fn from_matrix(sigma: Mat12, ordering: QuadratureOrdering) -> Self {
        let sym = (sigma + sigma.transpose()) * 0.5;
        Self {
            sigma: sym,
            ordering,
        }
    }

    pub fn matrix(&self) -> &Mat12 {
        &self.sigma
    }

    pub fn ordering(&self) -> QuadratureOrdering {
        self.ordering
    }

    /// Permutation-conjugate into the target ordering. Reordering twice is
    /// the exact identity.
    pub fn reordered(&self, target: QuadratureOrdering) -> CovarianceMatrix {
        if self.ordering == target {
            return self.clone();
        }
        let mut out = Mat12::zeros();
        // The grouped<->interleaved permutation is an involution on index
        // pairs, so the same map serves both directions.
        for r in 0..12 {
            for c in 0..12 {
                out[(grouped_to_interleaved(r), grouped_to_interleaved(c))] = self.sigma[(r, c)];
            }
        }
        CovarianceMatrix {
            sigma: out,
            ordering: target,
        }
    }

    /// X-quadrature block; requires grouped ordering.
    pub fn x_block(&self) -> Result<Mat6> {
        self.require_grouped()?;
        Ok(self.sigma.fixed_view::<6, 6>(0, 0).into_owned())
    }

    /// Y-quadrature block; requires grouped ordering.
    pub fn y_block(&self) -> Result<Mat6> {
        self.require_grouped()?;
        Ok(self.sigma.fixed_view::<6, 6>(6, 6).into_owned())
    }

    fn require_grouped(&self) -> Result<()> {
        if self.ordering != QuadratureOrdering::Grouped {
            return Err(Error::InvalidParameter(
                "operation requires grouped quadrature ordering".into(),
            ));
        }
        Ok(())
    }

    /// Max over `|eig(σ_X σ_Y) − 1|`; zero for a pure state.
    pub fn purity_defect(&self) -> Result<f64> {
        let g = self.reordered(QuadratureOrdering::Grouped);
        let prod = g.x_block()? * g.y_block()?;
        // σ_X σ_Y is similar to the SPD matrix L_Y^T σ_X L_Y, so its
        // eigenvalues are real; complex_eigenvalues keeps this honest.
        let eigs = prod.complex_eigenvalues();
        let mut worst: f64 = 0.0;
        for e in eigs.iter() {
            worst = worst.max((e.re - 1.0).abs().max(e.im.abs()));
        }
        Ok(worst)
    }
}

/// Covariance matrix of the output state for vacuum input, `σ = S Sᵀ`, in
/// grouped ordering.
pub fn covariance(c: &CouplingStrengths) -> Result<CovarianceMatrix> {
    let s = propagator(c)?;
    let sigma = s.matrix() * s.matrix().transpose();
    Ok(CovarianceMatrix::from_matrix(
        sigma,
        QuadratureOrdering::Grouped,
    ))
}

/// The mode relabeling `(1↔3, 2↔5, 4↔6)` that leaves the coupling graph
/// invariant; the source of all steering symmetry identities.
pub const SYMMETRY_PERMUTATION: [usize; 6] = [3, 5, 1, 6, 2, 4];

#[cfg(test)]
mod tests {
    use super::*;

    fn strengths(g1: f64, g2: f64, g3: f64, t: f64) -> CouplingStrengths {
        CouplingStrengths { g1, g2, g3, t }
    }

    #[test]
    fn coupling_matrix_zero_without_interaction() {
        let m = build_coupling_matrix(&strengths(0.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(m.entries().amax(), 0.0);
    }

    #[test]
    fn coupling_matrix_entries_follow_pump_assignment() {
        let m = build_coupling_matrix(&strengths(1.0, 1.2, 2.0, 0.3)).unwrap();
        let a = m.entries();
        let expected = [
            ((1, 2), 1.0),
            ((1, 4), 1.2),
            ((1, 3), 2.0),
            ((2, 6), 2.0),
            ((3, 5), 1.0),
            ((3, 6), 1.2),
            ((4, 5), 2.0),
        ];
        let mut nonzero = 0;
        for (i, j) in (0..6).flat_map(|i| (0..6).map(move |j| (i, j))) {
            let want = expected
                .iter()
                .find(|((p, q), _)| (p - 1, q - 1) == (i, j) || (q - 1, p - 1) == (i, j))
                .map(|&(_, g)| g)
                .unwrap_or(0.0);
            assert_eq!(a[(i, j)], want, "entry ({},{})", i + 1, j + 1);
            if want != 0.0 {
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 14);
    }

    #[test]
    fn coupling_matrix_symmetric_traceless() {
        let m = build_coupling_matrix(&strengths(0.7, 1.9, 0.4, 0.2)).unwrap();
        assert_eq!(m.entries(), &m.entries().transpose());
        assert_eq!(m.entries().trace(), 0.0);
    }

    #[test]
    fn rejects_negative_and_non_finite_parameters() {
        assert!(build_coupling_matrix(&strengths(-1.0, 0.0, 0.0, 0.1)).is_err());
        assert!(build_coupling_matrix(&strengths(0.0, f64::NAN, 0.0, 0.1)).is_err());
        assert!(build_coupling_matrix(&strengths(0.0, 0.0, f64::INFINITY, 0.1)).is_err());
        assert!(CouplingStrengths::new(1.0, 1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn propagator_is_identity_at_t_zero() {
        let s = propagator(&strengths(1.3, 0.4, 2.2, 0.0)).unwrap();
        assert!((s.matrix() - Mat12::identity()).amax() < 1e-14);
    }

    #[test]
    fn propagator_matches_two_mode_squeezer_closed_form() {
        // Single g1 edge between modes 1 and 2: e^{At} restricted to that
        // pair is [[cosh(rt), sinh(rt)], [sinh(rt), cosh(rt)]].
        let (r, t) = (0.9, 0.4);
        let s = propagator(&strengths(r, 0.0, 0.0, t)).unwrap();
        let (ch, sh) = ((r * t).cosh(), (r * t).sinh());
        assert!((s.matrix()[(0, 0)] - ch).abs() < 1e-12);
        assert!((s.matrix()[(0, 1)] - sh).abs() < 1e-12);
        assert!((s.matrix()[(1, 0)] - sh).abs() < 1e-12);
        assert!((s.matrix()[(1, 1)] - ch).abs() < 1e-12);
        // Y sector evolves with the opposite sign of the generator.
        assert!((s.matrix()[(6, 7)] + sh).abs() < 1e-12);
        // Unrelated modes stay untouched.
        assert!((s.matrix()[(3, 3)] - 1.0).abs() < 1e-14);
        assert!(s.matrix()[(0, 2)].abs() < 1e-14);
    }

    #[test]
    fn propagator_is_symplectic() {
        for &(g1, g2, g3, t) in &[
            (1.0, 1.2, 2.0, 0.3),
            (5.0, 0.0, 3.0, 2.0),
            (0.3, 4.1, 0.9, 1.3),
        ] {
            let s = propagator(&strengths(g1, g2, g3, t)).unwrap();
            assert!(
                s.symplectic_residual() < 1e-10,
                "residual {} at ({g1},{g2},{g3},{t})",
                s.symplectic_residual()
            );
        }
    }

    #[test]
    fn covariance_is_identity_for_vacuum() {
        let sigma = covariance(&strengths(2.0, 1.0, 0.5, 0.0)).unwrap();
        assert!((sigma.matrix() - Mat12::identity()).amax() < 1e-14);
    }

    #[test]
    fn covariance_matches_two_mode_squeezed_vacuum() {
        let (r, t) = (1.0, 0.3);
        let sigma = covariance(&strengths(r, 0.0, 0.0, t)).unwrap();
        let (ch, sh) = ((2.0 * r * t).cosh(), (2.0 * r * t).sinh());
        let m = sigma.matrix();
        assert!((m[(0, 0)] - ch).abs() < 1e-12);
        assert!((m[(0, 1)] - sh).abs() < 1e-12);
        assert!((m[(6, 6)] - ch).abs() < 1e-12);
        assert!((m[(6, 7)] + sh).abs() < 1e-12);
        assert!((m[(2, 2)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn covariance_is_pure_and_positive() {
        let sigma = covariance(&strengths(1.2, 1.2, 2.0, 0.3)).unwrap();
        assert!(sigma.purity_defect().unwrap() < 1e-8);
        let min_eig = sigma
            .matrix()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min_eig > 0.0);
    }

    #[test]
    fn reorder_is_an_involution_and_permutes_entries() {
        let sigma = covariance(&strengths(1.0, 1.2, 2.0, 0.3)).unwrap();
        let inter = sigma.reordered(QuadratureOrdering::Interleaved);
        assert_eq!(inter.ordering(), QuadratureOrdering::Interleaved);
        let back = inter.reordered(QuadratureOrdering::Grouped);
        assert_eq!(sigma.matrix(), back.matrix());
        // Grouped (X1, X2) lands at interleaved (row 0, col 2).
        assert_eq!(sigma.matrix()[(0, 1)], inter.matrix()[(0, 2)]);
        // Grouped (X1, Y1) lands at interleaved (row 0, col 1).
        assert_eq!(sigma.matrix()[(0, 6)], inter.matrix()[(0, 1)]);
        // Identity is ordering-independent.
        let id = CovarianceMatrix::from_matrix(Mat12::identity(), QuadratureOrdering::Grouped);
        assert_eq!(
            id.reordered(QuadratureOrdering::Interleaved).matrix(),
            &Mat12::identity()
        );
    }

    #[test]
    fn symmetry_permutation_preserves_coupling_matrix() {
        let m = build_coupling_matrix(&strengths(0.8, 1.7, 2.3, 0.3)).unwrap();
        let a = m.entries();
        for i in 0..6 {
            for j in 0..6 {
                let (pi, pj) = (SYMMETRY_PERMUTATION[i] - 1, SYMMETRY_PERMUTATION[j] - 1);
                assert_eq!(a[(i, j)], a[(pi, pj)]);
            }
        }
    }
}
