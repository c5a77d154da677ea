//! Problem representation: group partitions, regression data, Gram
//! summaries, mixed norms and multi-task assembly.
//!
//! Columns are indexed from 0. A multi-task problem with `T` tasks and
//! `M` variables per task is laid out task-major: column `t * M + j`
//! holds variable `j` of task `t`, and group `j` collects that variable
//! across all tasks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide that the Gram diagonal is constant.
pub const CONSTANT_DIAGONAL_RTOL: f64 = 1e-10;

/// A partition of `{0, .., K-1}` into non-empty, pairwise disjoint groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct GroupPartition {
    groups: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    groups: Vec<Vec<usize>>,
    dim: usize,
}

impl TryFrom<PartitionRepr> for GroupPartition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        GroupPartition::new(r.groups, r.dim)
    }
}

impl From<GroupPartition> for PartitionRepr {
    fn from(p: GroupPartition) -> Self {
        let dim = p.dim();
        PartitionRepr {
            groups: p.groups,
            dim,
        }
    }
}

impl GroupPartition {
    /// Validates `groups` as a partition of `{0, .., dim-1}`. Group order is
    /// preserved, as is the order of indices inside each group.
    pub fn new(groups: Vec<Vec<usize>>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("partition dimension must be at least 1".into()));
        }
        if groups.is_empty() {
            return Err(Error::Coverage("no groups given".into()));
        }
        let mut owner = vec![usize::MAX; dim];
        for (j, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::EmptyGroup { group: j });
            }
            for &i in g {
                if i >= dim {
                    return Err(Error::Coverage(format!(
                        "index {i} in group {j} is outside 0..{dim}"
                    )));
                }
                if owner[i] != usize::MAX {
                    return Err(Error::Overlap { index: i });
                }
                owner[i] = j;
            }
        }
        if let Some(missing) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Coverage(format!("index {missing} is not in any group")));
        }
        Ok(Self { groups, owner })
    }

    /// Every coordinate in its own group; the ordinary Lasso structure.
    pub fn singletons(dim: usize) -> Self {
        Self {
            groups: (0..dim).map(|i| vec![i]).collect(),
            owner: (0..dim).collect(),
        }
    }

    /// Contiguous groups with the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut next = 0;
        let groups = sizes
            .iter()
            .map(|&k| {
                let g: Vec<usize> = (next..next + k).collect();
                next += k;
                g
            })
            .collect();
        Self::new(groups, next)
    }

    /// Number of groups `M`.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Total number of coordinates `K`.
    pub fn dim(&self) -> usize {
        self.owner.len()
    }

    pub fn group(&self, j: usize) -> &[usize] {
        &self.groups[j]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// Group that owns coordinate `i`.
    pub fn owner(&self, i: usize) -> usize {
        self.owner[i]
    }

    pub fn max_group_size(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub(crate) fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension(format!(
                "{what} has length {len}, partition covers {} coordinates",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Euclidean norm of block `j` of `v`.
    pub fn block_norm(&self, v: &[f64], j: usize) -> f64 {
        self.groups[j].iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt()
    }

    /// Per-group Euclidean norms `‖v^j‖`.
    pub fn group_norms(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|j| self.block_norm(v, j)).collect()
    }

    /// Indices of groups with a nonzero block, in increasing order.
    pub fn support(&self, v: &[f64]) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.groups[j].iter().any(|&i| v[i] != 0.0))
            .collect()
    }

    /// Columns belonging to the given groups, in group order.
    pub fn columns_of(&self, groups: &[usize]) -> Vec<usize> {
        groups.iter().flat_map(|&j| self.groups[j].iter().copied()).collect()
    }
}

/// Mixed `(2,p)`-norm: the `ℓ_p` norm of the vector of group norms.
/// `p = f64::INFINITY` gives the largest group norm.
pub fn mixed_norm(beta: &[f64], partition: &GroupPartition, p: f64) -> Result<f64> {
    partition.check_len("beta", beta.len())?;
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("mixed norm exponent must be in [1, inf], got {p}")));
    }
    let norms = partition.group_norms(beta);
    Ok(lp_norm(&norms, p))
}

pub(crate) fn lp_norm(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        values.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        values.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        values.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Design, response and partition of an unpenalized regression.
#[derive(Debug, Clone)]
pub struct RegressionData {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub partition: GroupPartition,
}

impl RegressionData {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, partition: GroupPartition) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but response has length {}",
                x.nrows(),
                y.len()
            )));
        }
        if x.nrows() == 0 {
            return Err(Error::Dimension("design has no rows".into()));
        }
        partition.check_len("design column set", x.ncols())?;
        Ok(Self { x, y, partition })
    }

    /// Sample count `N`.
    pub fn n_obs(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn with_lambda(self, lambda: Vec<f64>) -> Result<Problem> {
        Problem::new(self, lambda)
    }
}

/// A Group Lasso instance: regression data plus one penalty level per group.
#[derive(Debug, Clone)]
pub struct Problem {
    pub data: RegressionData,
    pub lambda: Vec<f64>,
}

impl Problem {
    pub fn new(data: RegressionData, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != data.partition.len() {
            return Err(Error::Dimension(format!(
                "{} penalty levels for {} groups",
                lambda.len(),
                data.partition.len()
            )));
        }
        if let Some(bad) = lambda.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            return Err(Error::Domain(format!("penalty levels must be finite and >= 0, got {bad}")));
        }
        Ok(Self { data, lambda })
    }

    pub fn partition(&self) -> &GroupPartition {
        &self.data.partition
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.iter().cloned().fold(0.0, f64::max)
    }
}

/// `T` regression tasks sharing `M` candidate variables and `n` samples each.
#[derive(Debug, Clone)]
pub struct MultiTaskSpec {
    designs: Vec<DMatrix<f64>>,
    responses: Vec<DVector<f64>>,
}

impl MultiTaskSpec {
    pub fn new(designs: Vec<DMatrix<f64>>, responses: Vec<DVector<f64>>) -> Result<Self> {
        let first = designs
            .first()
            .ok_or_else(|| Error::ShapeMismatch("no tasks given".into()))?;
        let (n, m) = first.shape();
        if n == 0 || m == 0 {
            return Err(Error::ShapeMismatch(format!("task 0 design is {n}x{m}")));
        }
        for (t, x) in designs.iter().enumerate() {
            if x.shape() != (n, m) {
                return Err(Error::ShapeMismatch(format!(
                    "task {t} design is {}x{}, task 0 is {n}x{m}",
                    x.nrows(),
                    x.ncols()
                )));
            }
        }
        if responses.len() != designs.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} designs but {} responses",
                designs.len(),
                responses.len()
            )));
        }
        for (t, y) in responses.iter().enumerate() {
            if y.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "task {t} response has length {}, expected {n}",
                    y.len()
                )));
            }
        }
        Ok(Self { designs, responses })
    }

    pub fn tasks(&self) -> usize {
        self.designs.len()
    }

    /// Samples per task `n`.
    pub fn samples(&self) -> usize {
        self.designs[0].nrows()
    }

    /// Variables per task.
    pub fn vars(&self) -> usize {
        self.designs[0].ncols()
    }

    pub fn designs(&self) -> &[DMatrix<f64>] {
        &self.designs
    }

    pub fn responses(&self) -> &[DVector<f64>] {
        &self.responses
    }

    /// Partition of the stacked coefficient vector into variables across tasks.
    pub fn partition(&self) -> GroupPartition {
        multitask_partition(self.vars(), self.tasks())
    }
}

/// Group `j` = `{t * vars + j : t < tasks}`.
pub fn multitask_partition(vars: usize, tasks: usize) -> GroupPartition {
    let groups = (0..vars)
        .map(|j| (0..tasks).map(|t| t * vars + j).collect())
        .collect();
    GroupPartition::new(groups, vars * tasks).expect("multi-task layout is a partition")
}

/// Stacks the tasks into a single block-diagonal regression.
pub fn assemble_multitask(spec: &MultiTaskSpec) -> RegressionData {
    let (n, m, t_count) = (spec.samples(), spec.vars(), spec.tasks());
    let mut x = DMatrix::zeros(n * t_count, m * t_count);
    let mut y = DVector::zeros(n * t_count);
    for (t, (xt, yt)) in spec.designs().iter().zip(spec.responses()).enumerate() {
        x.view_mut((t * n, t * m), (n, m)).copy_from(xt);
        y.rows_mut(t * n, n).copy_from(yt);
    }
    RegressionData::new(x, y, spec.partition()).expect("assembled shapes are consistent")
}

/// Normalized Gram matrix `Ψ = XᵀX/N` and the per-group quantities derived
/// from it.
#[derive(Debug, Clone)]
pub struct GramSummary {
    pub psi: DMatrix<f64>,
    /// `tr(Ψ_j)` per group.
    pub group_trace: Vec<f64>,
    /// Spectral norm `|||Ψ_j|||` per group.
    pub group_spectral: Vec<f64>,
    /// Largest eigenvalue of `Ψ`.
    pub phi_max: f64,
    /// Common diagonal value, `None` when the diagonal is not constant.
    pub phi: Option<f64>,
    pub diag_min: f64,
    pub diag_max: f64,
}

/// `Ψ = XᵀX/N` with per-group traces and spectral norms.
pub fn gram_summary(x: &DMatrix<f64>, partition: &GroupPartition) -> Result<GramSummary> {
    if x.nrows() == 0 {
        return Err(Error::Dimension("design has no rows".into()));
    }
    partition.check_len("design column set", x.ncols())?;
    let psi = x.tr_mul(x) / x.nrows() as f64;
    Ok(GramSummary::from_psi(psi, partition))
}

impl GramSummary {
    /// Builds the summary from a precomputed `Ψ`, running a full
    /// symmetric eigen-solve for `φ_max`.
    pub fn from_psi(psi: DMatrix<f64>, partition: &GroupPartition) -> Self {
        let phi_max = max_eigenvalue(&psi);
        Self::with_phi_max(psi, partition, phi_max)
    }

    /// Builds the summary when `φ_max` is already known (e.g. from the
    /// diagonal blocks of a block-diagonal design).
    pub fn with_phi_max(psi: DMatrix<f64>, partition: &GroupPartition, phi_max: f64) -> Self {
        let m = partition.len();
        let mut group_trace = Vec::with_capacity(m);
        let mut group_spectral = Vec::with_capacity(m);
        for j in 0..m {
            let block = principal_submatrix(&psi, partition.group(j));
            group_trace.push(block.trace());
            group_spectral.push(max_eigenvalue(&block).max(0.0));
        }
        let diag = psi.diagonal();
        let diag_min = diag.min();
        let diag_max = diag.max();
        let phi = if diag_max - diag_min <= CONSTANT_DIAGONAL_RTOL * diag_max.abs() {
            Some(diag.mean())
        } else {
            None
        };
        Self {
            psi,
            group_trace,
            group_spectral,
            phi_max,
            phi,
            diag_min,
            diag_max,
        }
    }

    pub fn dim(&self) -> usize {
        self.psi.nrows()
    }

    /// `Ψ_j`, the principal block on group `j`.
    pub fn group_block(&self, partition: &GroupPartition, j: usize) -> DMatrix<f64> {
        principal_submatrix(&self.psi, partition.group(j))
    }

    /// `Ψ[j, j']`, rows from group `j`, columns from group `j'`.
    pub fn cross_block(&self, partition: &GroupPartition, j: usize, jp: usize) -> DMatrix<f64> {
        let (rows, cols) = (partition.group(j), partition.group(jp));
        DMatrix::from_fn(rows.len(), cols.len(), |a, b| self.psi[(rows[a], cols[b])])
    }

    /// `ΔᵀΨΔ`, equal to `‖XΔ‖²/N`.
    pub fn quadratic(&self, delta: &[f64]) -> f64 {
        let d = DVector::from_column_slice(delta);
        d.dot(&(&self.psi * &d))
    }
}

/// Gram summary of a multi-task problem computed task by task: `Ψ` is
/// block diagonal, so `φ_max` is the largest eigenvalue over the `T`
/// blocks `X_tᵀX_t / (nT)`.
pub fn multitask_gram_summary(spec: &MultiTaskSpec) -> GramSummary {
    let (n, m, t_count) = (spec.samples(), spec.vars(), spec.tasks());
    let big_n = (n * t_count) as f64;
    let k = m * t_count;
    let mut psi = DMatrix::zeros(k, k);
    let mut phi_max = 0.0_f64;
    for (t, xt) in spec.designs().iter().enumerate() {
        let block = xt.tr_mul(xt) / big_n;
        phi_max = phi_max.max(max_eigenvalue(&block));
        psi.view_mut((t * m, t * m), (m, m)).copy_from(&block);
    }
    GramSummary::with_phi_max(psi, &spec.partition(), phi_max)
}

pub(crate) fn principal_submatrix(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| a[(idx[r], idx[c])])
}

pub(crate) fn max_eigenvalue(a: &DMatrix<f64>) -> f64 {
    match a.nrows() {
        0 => 0.0,
        1 => a[(0, 0)],
        _ => SymmetricEigen::new(a.clone()).eigenvalues.max(),
    }
}

pub(crate) fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    match a.nrows() {
        0 => 0.0,
        1 => a[(0, 0)],
        _ => SymmetricEigen::new(a.clone()).eigenvalues.min(),
    }
}
