//! EPR steering quantification between groups of modes.
//!
//! The steerability of party B by party A is computed from the conditional
//! covariance matrix of B given Gaussian measurements on A — the Schur
//! complement of A's block — as `max{0, −Σ ln ν̄ⱼ}` over the conditional
//! symplectic eigenvalues ν̄ⱼ below 1. Values are in nats; 0 means no
//! steering.

use nalgebra::{DMatrix, Matrix6};

use crate::error::{Error, Result};
use crate::model::{CovarianceMatrix, QuadratureOrdering, N_MODES};

/// Default threshold for deciding that a steerability is nonzero; the
/// eigensolver noise floor.
pub const DEFAULT_ZERO_EPS: f64 = 1e-9;

/// A set of distinct mode indices in `1..=6`, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSet(Vec<usize>);

impl ModeSet {
    pub fn new(modes: impl Into<Vec<usize>>) -> Result<Self> {
        let mut v: Vec<usize> = modes.into();
        if v.is_empty() {
            return Err(Error::InvalidModes("mode set must be non-empty".into()));
        }
        v.sort_unstable();
        for pair in v.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidModes(format!("duplicate mode {}", pair[0])));
            }
        }
        if v[0] < 1 || v[v.len() - 1] > N_MODES {
            return Err(Error::InvalidModes(format!(
                "mode indices must lie in 1..={N_MODES}, got {v:?}"
            )));
        }
        Ok(Self(v))
    }

    pub fn single(mode: usize) -> Result<Self> {
        Self::new(vec![mode])
    }

    pub fn modes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.0.contains(&mode)
    }

    pub fn is_disjoint(&self, other: &ModeSet) -> bool {
        self.0.iter().all(|m| !other.contains(*m))
    }

    /// Compact label such as `"234"`.
    pub fn label(&self) -> String {
        self.0.iter().map(|m| m.to_string()).collect()
    }

    /// Union of two disjoint sets.
    pub fn union(&self, other: &ModeSet) -> Result<ModeSet> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ModeSet::new(v)
    }

    /// The set with one mode removed; errors if that would leave it empty.
    pub fn without(&self, mode: usize) -> Result<ModeSet> {
        let v: Vec<usize> = self.0.iter().copied().filter(|&m| m != mode).collect();
        ModeSet::new(v)
    }

    /// Image under a 1-based mode permutation.
    pub fn permuted(&self, perm: &[usize; N_MODES]) -> Result<ModeSet> {
        ModeSet::new(self.0.iter().map(|&m| perm[m - 1]).collect::<Vec<_>>())
    }
}

impl std::str::FromStr for ModeSet {
    type Err = Error;

    /// Accepts `"2,3,4"` as well as the compact `"234"`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_one = |tok: &str| -> Result<usize> {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidModes(format!("cannot parse mode '{tok}'")))
        };
        let modes: Vec<usize> = if s.contains(',') {
            s.split(',').map(parse_one).collect::<Result<_>>()?
        } else if s.trim().len() > 1 {
            s.trim()
                .chars()
                .map(|c| parse_one(&c.to_string()))
                .collect::<Result<_>>()?
        } else {
            vec![parse_one(s)?]
        };
        ModeSet::new(modes)
    }
}

impl std::fmt::Display for ModeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// An ordered pair of disjoint mode groups: the steering party and the
/// steered party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    steering: ModeSet,
    steered: ModeSet,
}

impl Bipartition {
    pub fn new(steering: ModeSet, steered: ModeSet) -> Result<Self> {
        if !steering.is_disjoint(&steered) {
            return Err(Error::InvalidModes(format!(
                "steering party {} overlaps steered party {}",
                steering.label(),
                steered.label()
            )));
        }
        Ok(Self { steering, steered })
    }

    /// Convenience constructor from plain index lists.
    pub fn from_indices(steering: &[usize], steered: &[usize]) -> Result<Self> {
        Self::new(ModeSet::new(steering.to_vec())?, ModeSet::new(steered.to_vec())?)
    }

    pub fn steering_party(&self) -> &ModeSet {
        &self.steering
    }

    pub fn steered_party(&self) -> &ModeSet {
        &self.steered
    }

    pub fn reversed(&self) -> Bipartition {
        Bipartition {
            steering: self.steered.clone(),
            steered: self.steering.clone(),
        }
    }

    /// Label such as `"234->1"`.
    pub fn label(&self) -> String {
        format!("{}->{}", self.steering.label(), self.steered.label())
    }
}

/// A non-negative steerability in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SteeringValue(f64);

impl SteeringValue {
    /// Clamp at zero, as the quantifier demands.
    pub fn from_raw(v: f64) -> Self {
        Self(v.max(0.0))
    }

    /// `max{0, −Σ ln ν̄ⱼ}` over eigenvalues strictly below 1.
    pub fn from_symplectic_eigenvalues(nus: &[f64]) -> Self {
        let sum: f64 = nus.iter().filter(|&&nu| nu < 1.0).map(|nu| -nu.ln()).sum();
        Self::from_raw(sum)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_positive(self, eps: f64) -> bool {
        self.0 > eps
    }
}

/// Which directions of a bipartition carry steering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringDirection {
    None,
    OneWayAToB,
    OneWayBToA,
    TwoWay,
}

impl SteeringDirection {
    pub fn classify(a_to_b: SteeringValue, b_to_a: SteeringValue, eps: f64) -> Self {
        match (a_to_b.is_positive(eps), b_to_a.is_positive(eps)) {
            (true, true) => SteeringDirection::TwoWay,
            (true, false) => SteeringDirection::OneWayAToB,
            (false, true) => SteeringDirection::OneWayBToA,
            (false, false) => SteeringDirection::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SteeringDirection::None => "none",
            SteeringDirection::OneWayAToB => "one_way_a_to_b",
            SteeringDirection::OneWayBToA => "one_way_b_to_a",
            SteeringDirection::TwoWay => "two_way",
        }
    }
}

/// Both steering directions of a bipartition and their classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringReport {
    pub a_to_b: SteeringValue,
    pub b_to_a: SteeringValue,
    pub direction: SteeringDirection,
    /// Signed difference `a_to_b − b_to_a`; crosses zero at symmetric points.
    pub asymmetry: f64,
}

/// The 2k×2k submatrix of σ on the selected modes (both quadratures per
/// mode), preserving the ordering tag of the input.
pub fn reduced_cm(sigma: &CovarianceMatrix, modes: &ModeSet) -> Result<DMatrix<f64>> {
    let k = modes.len();
    let mut idx = Vec::with_capacity(2 * k);
    match sigma.ordering() {
        QuadratureOrdering::Grouped => {
            idx.extend(modes.modes().iter().map(|m| m - 1));
            idx.extend(modes.modes().iter().map(|m| N_MODES + m - 1));
        }
        QuadratureOrdering::Interleaved => {
            for m in modes.modes() {
                idx.push(2 * (m - 1));
                idx.push(2 * (m - 1) + 1);
            }
        }
    }
    let full = sigma.matrix();
    Ok(DMatrix::from_fn(2 * k, 2 * k, |r, c| {
        full[(idx[r], idx[c])]
    }))
}

/// Which block of a joint covariance matrix to condition on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionedOn {
    /// Condition on the leading `dim_a × dim_a` block.
    A,
    /// Condition on the trailing block.
    B,
}

/// Schur complement of a joint covariance matrix `[[𝒜, 𝒞], [𝒞ᵀ, ℬ]]` with the
/// leading block of size `dim_a`: conditioning on A yields `ℬ − 𝒞ᵀ𝒜⁻¹𝒞`, the
/// conditional state of B after Gaussian measurements on A.
pub fn schur_complement(
    sigma_ab: &DMatrix<f64>,
    dim_a: usize,
    on: ConditionedOn,
) -> Result<DMatrix<f64>> {
    let n = sigma_ab.nrows();
    if sigma_ab.ncols() != n || dim_a == 0 || dim_a >= n {
        return Err(Error::InvalidParameter(format!(
            "schur_complement: invalid block split {dim_a} of {n}"
        )));
    }
    let dim_b = n - dim_a;
    let (keep, cond, cross) = match on {
        ConditionedOn::A => (
            sigma_ab.view((dim_a, dim_a), (dim_b, dim_b)).into_owned(),
            sigma_ab.view((0, 0), (dim_a, dim_a)).into_owned(),
            sigma_ab.view((0, dim_a), (dim_a, dim_b)).into_owned(),
        ),
        ConditionedOn::B => (
            sigma_ab.view((0, 0), (dim_a, dim_a)).into_owned(),
            sigma_ab.view((dim_a, dim_a), (dim_b, dim_b)).into_owned(),
            sigma_ab.view((dim_a, 0), (dim_b, dim_a)).into_owned(),
        ),
    };
    let chol = nalgebra::Cholesky::new(cond).ok_or_else(|| {
        Error::NotPositiveDefinite("conditioning block is not positive definite".into())
    })?;
    let solved = chol.solve(&cross);
    let out = &keep - cross.transpose() * solved;
    // Symmetrize away factorization roundoff.
    Ok((&out + out.transpose()) * 0.5)
}

/// Symplectic form для `k` modes in the given ordering.
pub fn omega(n_modes: usize, ordering: QuadratureOrdering) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    match ordering {
        QuadratureOrdering::Grouped => {
            for i in 0..n_modes {
                w[(i, n_modes + i)] = 1.0;
                w[(n_modes + i, i)] = -1.0;
            }
        }
        QuadratureOrdering::Interleaved => {
            for i in 0..n_modes {
                w[(2 * i, 2 * i + 1)] = 1.0;
                w[(2 * i + 1, 2 * i)] = -1.0;
            }
        }
    }
    w
}

fn check_spd(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
        return Err(Error::InvalidParameter(format!(
            "symplectic eigenvalues need a square even-dimensional matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    nalgebra::Cholesky::new(m.clone())
        .map(|_| ())
        .ok_or_else(|| Error::NotPositiveDefinite("matrix has a non-positive eigenvalue".into()))
}

/// Symplectic eigenvalues of a covariance-like matrix, ascending, one per
/// mode. Uses the structured X/Y product path when the matrix is grouped and
/// block-diagonal, the generic `|eig(iΩm)|` path otherwise.
pub fn symplectic_eigenvalues(
    m: &DMatrix<f64>,
    ordering: QuadratureOrdering,
) -> Result<Vec<f64>> {
    check_spd(m)?;
    if ordering == QuadratureOrdering::Grouped {
        let k = m.nrows() / 2;
        let cross = m.view((0, k), (k, k)).amax();
        if cross <= 1e-12 * m.amax().max(1.0) {
            return symplectic_eigenvalues_structured(m);
        }
    }
    symplectic_eigenvalues_generic(m, ordering)
}

/// Structured path for grouped block-diagonal matrices: `√eig(m_X m_Y)`,
/// computed through a Cholesky congruence to stay symmetric.
pub fn symplectic_eigenvalues_structured(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_spd(m)?;
    let k = m.nrows() / 2;
    let mx = m.view((0, 0), (k, k)).into_owned();
    let my = m.view((k, k), (k, k)).into_owned();
    let chol = nalgebra::Cholesky::new(my)
        .ok_or_else(|| Error::NotPositiveDefinite("Y block is not positive definite".into()))?;
    let l = chol.l();
    // eig(m_X m_Y) = eig(Lᵀ m_X L) with m_Y = L Lᵀ.
    let p = l.transpose() * mx * &l;
    let sym = (&p + p.transpose()) * 0.5;
    let mut eigs: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().cloned().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if eigs[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(
            "X block is not positive definite".into(),
        ));
    }
    Ok(eigs.into_iter().map(f64::sqrt).collect())
}

/// Generic path: moduli of the eigenvalues of `Ω m`, which come in pairs
/// `±iν̄ⱼ`; each pair is reported once.
pub fn symplectic_eigenvalues_generic(
    m: &DMatrix<f64>,
    ordering: QuadratureOrdering,
) -> Result<Vec<f64>> {
    check_spd(m)?;
    let k = m.nrows() / 2;
    let w = omega(k, ordering) * m;
    let eigs = w.complex_eigenvalues();
    let scale = m.amax().max(1.0);
    let mut mods: Vec<f64> = Vec::with_capacity(2 * k);
    for e in eigs.iter() {
        // Eigenvalues of Ωm are purely imaginary for SPD m; a real residue
        // signals a numerical breakdown.
        if e.re.abs() > 1e-8 * scale {
            return Err(Error::NumericalFailure(format!(
                "symplectic eigenvalue has real residue {:.3e}",
                e.re
            )));
        }
        mods.push((e.re * e.re + e.im * e.im).sqrt());
    }
    mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((0..k).map(|j| 0.5 * (mods[2 * j] + mods[2 * j + 1])).collect())
}

/// Joint covariance matrix of a bipartition with the steering party's
/// quadratures in the leading block: `(X_A, Y_A, X_B, Y_B)`.
fn party_block_cm(grouped: &CovarianceMatrix, p: &Bipartition) -> DMatrix<f64> {
    let mut idx = Vec::with_capacity(2 * (p.steering.len() + p.steered.len()));
    for party in [&p.steering, &p.steered] {
        idx.extend(party.modes().iter().map(|m| m - 1));
        idx.extend(party.modes().iter().map(|m| N_MODES + m - 1));
    }
    let full = grouped.matrix();
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| full[(idx[r], idx[c])])
}

/// Gaussian steerability of the steered party by the steering party.
pub fn steerability(sigma: &CovarianceMatrix, p: &Bipartition) -> Result<SteeringValue> {
    let grouped = sigma.reordered(QuadratureOrdering::Grouped);
    let joint = party_block_cm(&grouped, p);
    let conditional = schur_complement(&joint, 2 * p.steering.len(), ConditionedOn::A)?;
    // The conditional block inherits (X_B…, Y_B…) layout, i.e. grouped.
    let nus = symplectic_eigenvalues(&conditional, QuadratureOrdering::Grouped)?;
    Ok(SteeringValue::from_symplectic_eigenvalues(&nus))
}

/// Both directions of a bipartition, classified with the default zero
/// threshold.
pub fn steering_report(sigma: &CovarianceMatrix, p: &Bipartition) -> Result<SteeringReport> {
    steering_report_with(sigma, p, DEFAULT_ZERO_EPS)
}

/// Both directions of a bipartition, classified with an explicit zero
/// threshold.
pub fn steering_report_with(
    sigma: &CovarianceMatrix,
    p: &Bipartition,
    eps: f64,
) -> Result<SteeringReport> {
    let a_to_b = steerability(sigma, p)?;
    let b_to_a = steerability(sigma, &p.reversed())?;
    Ok(SteeringReport {
        a_to_b,
        b_to_a,
        direction: SteeringDirection::classify(a_to_b, b_to_a, eps),
        asymmetry: a_to_b.value() - b_to_a.value(),
    })
}

/// A table of steerabilities keyed by party labels. Rows are steering
/// parties, columns steered parties; cells not covered by any requested
/// bipartition are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

/// Evaluate a family of bipartitions into a label-keyed table. Labels are
/// ordered by party size, then lexicographically.
pub fn steering_matrix(
    sigma: &CovarianceMatrix,
    partitions: &[Bipartition],
) -> Result<SteeringTable> {
    let mut rows: Vec<String> = Vec::new();
    let mut cols: Vec<String> = Vec::new();
    let mut cells: Vec<(String, String, f64)> = Vec::with_capacity(partitions.len());
    for p in partitions {
        let v = steerability(sigma, p)?.value();
        let (r, c) = (p.steering_party().label(), p.steered_party().label());
        if !rows.contains(&r) {
            rows.push(r.clone());
        }
        if !cols.contains(&c) {
            cols.push(c.clone());
        }
        cells.push((r, c, v));
    }
    let order = |a: &String, b: &String| (a.len(), a.clone()).cmp(&(b.len(), b.clone()));
    rows.sort_by(order);
    cols.sort_by(order);
    let mut values = vec![vec![None; cols.len()]; rows.len()];
    for (r, c, v) in cells {
        let ri = rows.iter().position(|x| *x == r).unwrap();
        let ci = cols.iter().position(|x| *x == c).unwrap();
        values[ri][ci] = Some(v);
    }
    Ok(SteeringTable {
        row_labels: rows,
        col_labels: cols,
        values,
    })
}

/// All 30 ordered single-mode bipartitions.
pub fn single_mode_partitions() -> Vec<Bipartition> {
    let mut out = Vec::with_capacity(30);
    for i in 1..=N_MODES {
        for j in 1..=N_MODES {
            if i != j {
                out.push(Bipartition::from_indices(&[i], &[j]).unwrap());
            }
        }
    }
    out
}

/// All ordered bipartitions with `n_steering`-mode steering parties and
/// `n_steered`-mode steered parties.
pub fn group_partitions(n_steering: usize, n_steered: usize) -> Vec<Bipartition> {
    fn subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &m) in pool.iter().enumerate() {
            for mut rest in subsets(&pool[i + 1..], k - 1) {
                rest.insert(0, m);
                out.push(rest);
            }
        }
        out
    }
    let all: Vec<usize> = (1..=N_MODES).collect();
    let mut out = Vec::new();
    for a in subsets(&all, n_steering) {
        let rest: Vec<usize> = all.iter().copied().filter(|m| !a.contains(m)).collect();
        for b in subsets(&rest, n_steered) {
            out.push(Bipartition::from_indices(&a, &b).unwrap());
        }
    }
    out
}

/// The full 6×6 single-mode steering matrix: entry `(i, j)` is the
/// steerability of mode `j` by mode `i`, with a zero diagonal.
pub fn single_mode_matrix(sigma: &CovarianceMatrix) -> Result<Matrix6<f64>> {
    let mut m = Matrix6::zeros();
    for i in 1..=N_MODES {
        for j in 1..=N_MODES {
            if i != j {
                let p = Bipartition::from_indices(&[i], &[j])?;
                m[(i - 1, j - 1)] = steerability(sigma, &p)?.value();
            }
        }
    }
    Ok(m)
}
