use channels::{kraus_to_choi, tensor_channels, ChoiOperator, KrausChannel};
use matrix_core::{
    c64, herm_eig, kron, permute_factors, trace_and_replace, ComplexMatrix, TensorDims,
};
use metrics::cj_fidelity_choi;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::SdpError;

/// Causal class of a process: how its slots may be wired together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    /// All slots are called in parallel on one shot.
    Parallel,
    /// Slots are called in a fixed order, with signalling from earlier
    /// to later slots only.
    Sequential,
    /// No causal ordering is imposed beyond process validity.
    NonCausal,
}

/// Tensor-factor dimensions of a process Choi operator, in the fixed
/// factor order `in, out, 1_1..1_N, 2_1..2_N`: the produced channel's
/// input and output, then every slot's input wire, then every slot's
/// output wire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessDims {
    pub d_in: usize,
    pub d_out: usize,
    /// Per-slot `(d_1, d_2)` wire dimensions.
    pub slots: Vec<(usize, usize)>,
}

impl ProcessDims {
    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    /// Factor dimensions in the fixed order.
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.d_in, self.d_out];
        dims.extend(self.slots.iter().map(|&(d1, _)| d1));
        dims.extend(self.slots.iter().map(|&(_, d2)| d2));
        dims
    }

    pub fn tensor_dims(&self) -> TensorDims {
        TensorDims::new(&self.factor_dims())
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims().iter().product()
    }

    /// Product of all slot-output wire dimensions.
    pub fn d2_prod(&self) -> usize {
        self.slots.iter().map(|&(_, d2)| d2).product()
    }

    /// Product of all slot wire dimensions (the trailing factors).
    pub fn slot_dim(&self) -> usize {
        self.slots.iter().map(|&(d1, d2)| d1 * d2).product()
    }

    /// Trace every valid process Choi must carry: `d_in * prod d_2`.
    pub fn required_trace(&self) -> f64 {
        (self.d_in * self.d2_prod()) as f64
    }
}

/// The orthogonal projector onto the linear span of valid process Choi
/// operators of a causal class, as an alternating sum of
/// trace-and-replace maps `X -> tr_A(X) (x) 1_A / d_A`.
///
/// Term lists are derived by demanding that inserting any tuple of
/// trace-preserving maps into the slots yields a trace-preserving
/// channel; each resulting linear condition removes one family of
/// operator types, and the surviving indicator expands into the listed
/// subsets. For one slot all three classes coincide.
#[derive(Clone, Debug)]
pub struct ProcessProjector {
    tdims: TensorDims,
    terms: Vec<(f64, Vec<usize>)>,
}

impl ProcessProjector {
    pub fn new(kind: ProcessKind, dims: &ProcessDims) -> Result<Self, SdpError> {
        let n = dims.n_slots();
        // Factor indices in the fixed order.
        let (inp, out) = (0usize, 1usize);
        let s1 = |i: usize| 2 + i;
        let s2 = |i: usize| 2 + n + i;
        let chain_terms = |chain: Vec<Vec<usize>>| -> Vec<(f64, Vec<usize>)> {
            let mut sign = 1.0;
            let mut terms = vec![(1.0, Vec::new())];
            for set in chain {
                sign = -sign;
                terms.push((sign, set));
            }
            terms
        };
        let terms = match (n, kind) {
            (1, _) => chain_terms(vec![
                vec![out],
                vec![s2(0), out],
                vec![s1(0), s2(0), out],
                vec![inp, s1(0), s2(0), out],
            ]),
            (2, ProcessKind::Parallel) => chain_terms(vec![
                vec![out],
                vec![s2(0), s2(1), out],
                vec![s1(0), s1(1), s2(0), s2(1), out],
                vec![inp, s1(0), s1(1), s2(0), s2(1), out],
            ]),
            (2, ProcessKind::Sequential) => chain_terms(vec![
                vec![out],
                vec![s2(1), out],
                vec![s1(1), s2(1), out],
                vec![s2(0), s1(1), s2(1), out],
                vec![s1(0), s2(0), s1(1), s2(1), out],
                vec![inp, s1(0), s2(0), s1(1), s2(1), out],
            ]),
            (2, ProcessKind::NonCausal) => vec![
                (1.0, vec![]),
                (-1.0, vec![out]),
                (1.0, vec![s2(1), out]),
                (-1.0, vec![s1(1), s2(1), out]),
                (1.0, vec![s2(0), out]),
                (-1.0, vec![s2(0), s2(1), out]),
                (1.0, vec![s2(0), s1(1), s2(1), out]),
                (-1.0, vec![s1(0), s2(0), out]),
                (1.0, vec![s1(0), s2(0), s2(1), out]),
                (-1.0, vec![s1(0), s2(0), s1(1), s2(1), out]),
                (1.0, vec![inp, s1(0), s2(0), s1(1), s2(1), out]),
            ],
            (n, _) => return Err(SdpError::UnsupportedSlots(n)),
        };
        Ok(Self {
            tdims: dims.tensor_dims(),
            terms,
        })
    }

    /// Applies the projector to a matrix on the full process space.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, SdpError> {
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for (sign, subset) in &self.terms {
            let term = if subset.is_empty() {
                x.clone()
            } else {
                trace_and_replace(x, &self.tdims, subset)?
            };
            out = &out + &term.scaled_re(*sign);
        }
        Ok(out)
    }
}

/// A process as the Choi operator of its induced map on channel Choi
/// operators, on `H_in (x) H_out (x) H_1 (x) H_2` in that factor order.
///
/// Validity means PSD, trace `d_in * prod d_2`, and invariance under the
/// causal class's [`ProcessProjector`].
#[derive(Clone, Debug)]
pub struct ProcessChoi {
    dims: ProcessDims,
    kind: ProcessKind,
    matrix: ComplexMatrix,
}

/// Serialized form of a [`ProcessChoi`]: entries as `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct ProcessChoiJson {
    dims: ProcessDims,
    kind: ProcessKind,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl ProcessChoi {
    /// Wraps a matrix; only dimensions are checked here, see
    /// [`validate`](Self::validate) for the validity invariants.
    pub fn new(
        dims: ProcessDims,
        kind: ProcessKind,
        matrix: ComplexMatrix,
    ) -> Result<Self, SdpError> {
        if !matrix.is_square() || matrix.rows() != dims.total_dim() {
            return Err(SdpError::DimensionMismatch(format!(
                "process matrix is {}x{} but dims give {}",
                matrix.rows(),
                matrix.cols(),
                dims.total_dim()
            )));
        }
        Ok(Self { dims, kind, matrix })
    }

    pub fn dims(&self) -> &ProcessDims {
        &self.dims
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Checks the three validity invariants at tolerance `tol`: smallest
    /// eigenvalue `>= -tol`, trace within `tol` of `d_in * prod d_2`,
    /// and projector fixed point within `tol` entrywise.
    pub fn validate(&self, tol: f64) -> Result<(), SdpError> {
        let scale = self.matrix.max_abs().max(1.0);
        let (eigs, _) = herm_eig(&self.matrix)?;
        if let Some(min) = eigs.last() {
            if *min < -tol * scale {
                return Err(SdpError::BadProblem(format!(
                    "process matrix has eigenvalue {min:.3e}"
                )));
            }
        }
        let tr = self.matrix.trace();
        let target = self.dims.required_trace();
        if (tr.re - target).abs() > tol * target.max(1.0) || tr.im.abs() > tol * target.max(1.0) {
            return Err(SdpError::BadProblem(format!(
                "process trace {tr} differs from {target}"
            )));
        }
        let projector = ProcessProjector::new(self.kind, &self.dims)?;
        let fixed = projector.apply(&self.matrix)?;
        let dev = fixed.max_abs_diff(&self.matrix);
        if dev > tol * scale {
            return Err(SdpError::BadProblem(format!(
                "projector fixed-point deviation {dev:.3e}"
            )));
        }
        Ok(())
    }

    /// One-slot process that routes the produced channel's input
    /// straight into the slot and the slot's output straight out, so
    /// applying it reproduces the inserted channel.
    pub fn routing(d: usize) -> Self {
        let dims = ProcessDims {
            d_in: d,
            d_out: d,
            slots: vec![(d, d)],
        };
        let total = dims.total_dim();
        let matrix = ComplexMatrix::from_fn(total, total, |r, c| {
            let (i, o, a, b) = split4(r, d, d, d, d);
            let (j, p, x, y) = split4(c, d, d, d, d);
            if i == a && o == b && j == x && p == y {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        Self {
            dims,
            kind: ProcessKind::Parallel,
            matrix,
        }
    }

    /// One-slot process that feeds the maximally mixed state into the
    /// slot, discards the slot's output, and produces the fixed channel
    /// `lambda` regardless of what is inserted.
    pub fn constant(lambda: &ChoiOperator, slot: (usize, usize)) -> Self {
        let dims = ProcessDims {
            d_in: lambda.d_in(),
            d_out: lambda.d_out(),
            slots: vec![slot],
        };
        let mixed = ComplexMatrix::identity(slot.0).scaled_re(1.0 / slot.0 as f64);
        let lam = lambda.unnormalized();
        let matrix = kron(&kron(lam.matrix(), &mixed), &ComplexMatrix::identity(slot.1));
        Self {
            dims,
            kind: ProcessKind::Parallel,
            matrix,
        }
    }

    /// One-slot process that routes the slot through as the first
    /// output factor and runs the fixed channel on the second, so
    /// inserting `E` yields `E (x) fixed`.
    pub fn route_with(fixed: &ChoiOperator, slot: (usize, usize)) -> Self {
        let (d1, d2) = slot;
        let (fin, fout) = (fixed.d_in(), fixed.d_out());
        let dims = ProcessDims {
            d_in: d1 * fin,
            d_out: d2 * fout,
            slots: vec![slot],
        };
        let fbar = fixed.unnormalized();
        let total = dims.total_dim();
        let matrix = ComplexMatrix::from_fn(total, total, |r, c| {
            let (i, o, u, v) = split4(r, d1 * fin, d2 * fout, d1, d2);
            let (j, p, w, q) = split4(c, d1 * fin, d2 * fout, d1, d2);
            let (ia, ib) = (i / fin, i % fin);
            let (oa, ob) = (o / fout, o % fout);
            let (ja, jb) = (j / fin, j % fin);
            let (pa, pb) = (p / fout, p % fout);
            if ia == u && ja == w && oa == v && pa == q {
                fbar.matrix()[(ib * fout + ob, jb * fout + pb)]
            } else {
                c64(0.0, 0.0)
            }
        });
        Self {
            dims,
            kind: ProcessKind::Parallel,
            matrix,
        }
    }

    pub fn to_json(&self) -> String {
        let matrix = (0..self.matrix.rows())
            .map(|r| {
                (0..self.matrix.cols())
                    .map(|c| {
                        let z = self.matrix[(r, c)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        serde_json::to_string(&ProcessChoiJson {
            dims: self.dims.clone(),
            kind: self.kind,
            matrix,
        })
        .expect("process serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, SdpError> {
        let raw: ProcessChoiJson =
            serde_json::from_str(text).map_err(|e| SdpError::BadProblem(e.to_string()))?;
        let n = raw.dims.total_dim();
        if raw.matrix.len() != n || raw.matrix.iter().any(|row| row.len() != n) {
            return Err(SdpError::BadProblem(
                "matrix shape does not match dims".into(),
            ));
        }
        let matrix =
            ComplexMatrix::from_fn(n, n, |r, c| c64(raw.matrix[r][c][0], raw.matrix[r][c][1]));
        Self::new(raw.dims, raw.kind, matrix)
    }
}

fn split4(idx: usize, d0: usize, d1: usize, d2: usize, d3: usize) -> (usize, usize, usize, usize) {
    let k3 = idx % d3;
    let rest = idx / d3;
    let k2 = rest % d2;
    let rest = rest / d2;
    let k1 = rest % d1;
    let k0 = rest / d1;
    debug_assert!(k0 < d0);
    (k0, k1, k2, k3)
}

/// Unnormalized Choi of the slot-wise tensor of the given channel
/// Chois, reordered to the process slot layout `1_1..1_N, 2_1..2_N`.
pub(crate) fn slot_choi(chois: &[ChoiOperator]) -> Result<ComplexMatrix, SdpError> {
    let mut joint = ComplexMatrix::identity(1);
    let mut dims = Vec::new();
    for c in chois {
        joint = kron(&joint, c.unnormalized().matrix());
        dims.push(c.d_in());
        dims.push(c.d_out());
    }
    if chois.len() == 1 {
        return Ok(joint);
    }
    let n = chois.len();
    let perm: Vec<usize> = (0..2 * n)
        .map(|p| if p < n { 2 * p } else { 2 * (p - n) + 1 })
        .collect();
    let (permuted, _) = permute_factors(&joint, &TensorDims::new(&dims), &perm)?;
    Ok(permuted)
}

/// Contracts the slot factors of a process matrix against a slot-space
/// operator `r`, giving `tr_slots[(1 (x) r^T) m] / d_in` on
/// `H_in (x) H_out`.
pub(crate) fn contract_slots(
    m: &ComplexMatrix,
    r: &ComplexMatrix,
    d_io: usize,
    d_in: usize,
) -> ComplexMatrix {
    let ds = r.rows();
    let inv = 1.0 / d_in as f64;
    ComplexMatrix::from_fn(d_io, d_io, |x, y| {
        let mut acc = Complex64::ZERO;
        for u in 0..ds {
            for v in 0..ds {
                let ruv = r[(u, v)];
                if ruv != Complex64::ZERO {
                    acc += ruv * m[(x * ds + u, y * ds + v)];
                }
            }
        }
        acc * inv
    })
}

/// Applies a process to channels inserted in its slots, returning the
/// normalized Choi operator of the produced channel.
pub fn apply_process(p: &ProcessChoi, chois: &[ChoiOperator]) -> Result<ChoiOperator, SdpError> {
    if chois.len() != p.dims.n_slots() {
        return Err(SdpError::DimensionMismatch(format!(
            "{} channels inserted into {} slots",
            chois.len(),
            p.dims.n_slots()
        )));
    }
    for (c, &(d1, d2)) in chois.iter().zip(&p.dims.slots) {
        if c.d_in() != d1 || c.d_out() != d2 {
            return Err(SdpError::DimensionMismatch(format!(
                "slot expects {}->{}, channel is {}->{}",
                d1,
                d2,
                c.d_in(),
                c.d_out()
            )));
        }
    }
    let r = slot_choi(chois)?;
    let out = contract_slots(
        &p.matrix,
        &r,
        p.dims.d_in * p.dims.d_out,
        p.dims.d_in,
    );
    Ok(ChoiOperator::new(p.dims.d_in, p.dims.d_out, out, true)?)
}

/// Rounds away the tiny negative eigenvalues a converged-but-inexact
/// iterate can carry, then renormalizes to unit trace, so that fidelity
/// evaluation does not reject it.
pub(crate) fn sanitized(choi: &ChoiOperator) -> Result<ChoiOperator, SdpError> {
    let clipped = matrix_core::clip_to_psd(choi.normalized().matrix())?;
    let tr = clipped.trace().re;
    Ok(ChoiOperator::new(
        choi.d_in(),
        choi.d_out(),
        clipped.scaled_re(1.0 / tr),
        true,
    )?)
}

/// Per-channel Choi fidelity of a process's output against `E^(x)m`,
/// one value per evaluation-net channel, each inserted into every slot.
pub fn evaluate_each(
    p: &ProcessChoi,
    eval_net: &[KrausChannel],
    m: usize,
) -> Result<Vec<f64>, SdpError> {
    if eval_net.is_empty() {
        return Err(SdpError::EmptyNet);
    }
    let mut out = Vec::with_capacity(eval_net.len());
    for channel in eval_net {
        let choi = kraus_to_choi(channel, false);
        let slots = vec![choi; p.dims.n_slots()];
        let produced = apply_process(p, &slots)?;
        let mut target = channel.clone();
        for _ in 1..m {
            target = tensor_channels(&target, channel);
        }
        out.push(cj_fidelity_choi(
            &sanitized(&produced)?,
            &kraus_to_choi(&target, true),
        )?);
    }
    Ok(out)
}

/// Worst-case and average Choi fidelity of a process's output against
/// `E^(x)m` over an evaluation net of channels, each inserted into
/// every slot.
pub fn evaluate_process(
    p: &ProcessChoi,
    eval_net: &[KrausChannel],
    m: usize,
) -> Result<(f64, f64), SdpError> {
    let fids = evaluate_each(p, eval_net, m)?;
    let min = fids.iter().copied().fold(f64::INFINITY, f64::min);
    let avg = fids.iter().sum::<f64>() / fids.len() as f64;
    Ok((min, avg))
}
