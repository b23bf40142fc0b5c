use matrix_core::{c64, kron, ComplexMatrix};
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;

/// Entrywise tolerance for the trace-preservation check.
const TP_TOL: f64 = 1e-10;

/// A CPTP map given by its Kraus operators (each `d_out x d_in`).
#[derive(Clone, Debug)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds a channel, checking shapes and trace preservation.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let first = kraus.first().ok_or_else(|| {
            ChannelError::DimensionMismatch("channel needs at least one Kraus operator".into())
        })?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(ChannelError::DimensionMismatch(
                "all Kraus operators must share one shape".into(),
            ));
        }
        let ch = Self { d_in, d_out, kraus };
        let deviation = ch.tp_deviation();
        if deviation > TP_TOL {
            return Err(ChannelError::NotTracePreserving { deviation });
        }
        Ok(ch)
    }

    /// Largest entry of `sum K^dag K - 1`.
    pub fn tp_deviation(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            acc = &acc + &(&k.dagger() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.d_in))
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Applies the channel to a state: `sum_n K_n rho K_n^dag`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if rho.rows() != self.d_in || rho.cols() != self.d_in {
            return Err(ChannelError::DimensionMismatch(format!(
                "state is {}x{}, channel input dimension is {}",
                rho.rows(),
                rho.cols(),
                self.d_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &(&(k * rho) * &k.dagger());
        }
        Ok(out)
    }
}

/// Tensor product of two channels, with Kraus set `{A_i (x) B_j}`.
pub fn tensor_channels(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let kraus = a
        .kraus()
        .iter()
        .flat_map(|ka| b.kraus().iter().map(move |kb| kron(ka, kb)))
        .collect();
    KrausChannel::new(kraus).expect("tensor product of CPTP maps is CPTP")
}

/// Composition `after o before`, with Kraus set `{A_i B_j}`.
pub fn compose_channels(after: &KrausChannel, before: &KrausChannel) -> Result<KrausChannel, ChannelError> {
    if after.d_in() != before.d_out() {
        return Err(ChannelError::DimensionMismatch(format!(
            "cannot compose: after.d_in = {} but before.d_out = {}",
            after.d_in(),
            before.d_out()
        )));
    }
    let kraus = after
        .kraus()
        .iter()
        .flat_map(|ka| before.kraus().iter().map(move |kb| ka * kb))
        .collect();
    Ok(KrausChannel::new(kraus).expect("composition of CPTP maps is CPTP"))
}

/// JSON form of a channel: Kraus operators as row-major `[re, im]` lists.
#[derive(Serialize, Deserialize)]
struct KrausChannelJson {
    d_in: usize,
    d_out: usize,
    kraus: Vec<Vec<[f64; 2]>>,
}

impl Serialize for KrausChannel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.data().iter().map(|z| [z.re, z.im]).collect())
            .collect();
        KrausChannelJson { d_in: self.d_in, d_out: self.d_out, kraus }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KrausChannel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = KrausChannelJson::deserialize(deserializer)?;
        let mut kraus = Vec::with_capacity(raw.kraus.len());
        for flat in &raw.kraus {
            if flat.len() != raw.d_out * raw.d_in {
                return Err(serde::de::Error::custom(format!(
                    "Kraus operator has {} entries, expected {}",
                    flat.len(),
                    raw.d_out * raw.d_in
                )));
            }
            kraus.push(ComplexMatrix::from_fn(raw.d_out, raw.d_in, |i, j| {
                let [re, im] = flat[i * raw.d_in + j];
                c64(re, im)
            }));
        }
        KrausChannel::new(kraus).map_err(serde::de::Error::custom)
    }
}
