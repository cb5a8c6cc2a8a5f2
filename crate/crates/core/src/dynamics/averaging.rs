use super::{ElectronTrace, SeriesKind, TimeSeries};
use crate::error::{Error, Result};
use crate::hamiltonian::SectorPadding;
use crate::scalar::{lit, Real};
use crate::spin::{spin_addition_counts, HalfInt};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldRegime {
    Zero,
    High,
}

/// States per total spin: `mult(I) (2I + 1)`.
pub fn zero_field_weights(nuclei: usize) -> Result<BTreeMap<HalfInt, u64>> {
    Ok(spin_addition_counts(nuclei)?.into_iter().map(|(i, c)| (i, c * i.multiplicity() as u64)).collect())
}

/// States per `|m|`: every multiplet with `I >= |m|` contributes one state
/// for `m = 0` and two otherwise.
pub fn high_field_weights(nuclei: usize) -> Result<BTreeMap<HalfInt, u64>> {
    let row = spin_addition_counts(nuclei)?;
    let mut out = BTreeMap::new();
    for (&spin, &count) in &row {
        for m in spin.projections().filter(|m| m.twice() >= 0) {
            let copies = if m == HalfInt::ZERO { 1 } else { 2 };
            *out.entry(m).or_insert(0) += count * copies;
        }
    }
    Ok(out)
}

/// Weighted average of representative traces keyed by `I` (zero field) or
/// `|m|` (high field).
pub fn weighted_average_one_group<T: Real>(
    nuclei: usize,
    traces: &BTreeMap<HalfInt, TimeSeries<T>>,
    regime: FieldRegime,
) -> Result<TimeSeries<T>> {
    let weights = match regime {
        FieldRegime::Zero => zero_field_weights(nuclei)?,
        FieldRegime::High => high_field_weights(nuclei)?,
    };
    let total: u64 = weights.values().sum();
    let first = traces.values().next().ok_or_else(|| Error::MissingSector("any sector".into()))?;
    let mut values = vec![T::zero(); first.len()];
    for (key, &w) in &weights {
        let trace = traces.get(key).ok_or_else(|| Error::MissingSector(format!("{key}")))?;
        first.check_grid(trace)?;
        let f: T = lit(w as f64 / total as f64);
        for (acc, v) in values.iter_mut().zip(trace.values()) {
            *acc += f * *v;
        }
    }
    TimeSeries::new(first.times().to_vec(), values, "S(t)", SeriesKind::Probability)
}

fn total_states(padding: &BTreeMap<HalfInt, SectorPadding>) -> u64 {
    padding.values().map(|p| p.degeneracy * (p.sector_dim - p.padded_count) as u64).sum()
}

/// Sector traces to the full `S(t)`: remove the padding contribution of each
/// sector, weight by its size and degeneracy and normalize.
pub fn reassemble_two_group<T: Real>(
    traces: &BTreeMap<HalfInt, TimeSeries<T>>,
    padding: &BTreeMap<HalfInt, SectorPadding>,
) -> Result<TimeSeries<T>> {
    let total = total_states(padding) as f64;
    let first = traces.values().next().ok_or_else(|| Error::MissingSector("any sector".into()))?;
    let mut values = vec![T::zero(); first.len()];
    for (key, pad) in padding {
        let trace = traces.get(key).ok_or_else(|| Error::MissingSector(format!("I2 = {key}")))?;
        first.check_grid(trace)?;
        let dim = pad.sector_dim as f64;
        let shift: T = lit(pad.padded_count as f64 / dim);
        let scale: T = lit(dim * pad.degeneracy as f64 / total);
        for (acc, v) in values.iter_mut().zip(trace.values()) {
            *acc += (*v - shift) * scale;
        }
    }
    if let Some(extra) = traces.keys().find(|k| !padding.contains_key(k)) {
        return Err(Error::InvalidArgument(format!("no padding record for I2 = {extra}")));
    }
    TimeSeries::new(first.times().to_vec(), values, "S(t)", SeriesKind::Probability)
}

/// Density-level version of [`reassemble_two_group`]: padded slots hold the
/// untouched singlet, which is subtracted before weighting.
pub fn reassemble_electron_traces<T: Real>(sectors: &[(ElectronTrace<T>, SectorPadding)]) -> Result<ElectronTrace<T>> {
    let total: u64 = sectors.iter().map(|(_, p)| p.degeneracy * (p.sector_dim - p.padded_count) as u64).sum();
    let first = sectors.first().ok_or_else(|| Error::MissingSector("any sector".into()))?;
    let singlet = ElectronTrace::constant_singlet(first.0.times());
    let mut parts: Vec<(T, &ElectronTrace<T>)> = Vec::new();
    let mut pad_weight = 0.0;
    for (trace, pad) in sectors {
        parts.push((lit(pad.sector_dim as f64 * pad.degeneracy as f64 / total as f64), trace));
        pad_weight += pad.padded_count as f64 * pad.degeneracy as f64 / total as f64;
    }
    parts.push((lit(-pad_weight), &singlet));
    ElectronTrace::weighted_sum(&parts)
}
