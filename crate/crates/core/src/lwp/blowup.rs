use crate::scalar::Real;
use crate::wave::TrajectoryRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupSource {
    /// the running X-norm reached the threshold
    XNorm,
    /// the solver's sup-norm guard tripped first
    SupGuard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupSignal<T> {
    pub t: T,
    pub source: BlowupSource,
}

/// First saved time at which the running X-norm `‖u‖_{X([0,t])}` reaches
/// `threshold`. The X-norm decides; the sup-norm guard is reported only
/// when the record ended before the X-norm crossed.
pub fn detect_blowup<T: Real>(record: &TrajectoryRecord<T>, threshold: T) -> Option<BlowupSignal<T>> {
    let crossing = record
        .running_x()
        .iter()
        .zip(&record.times)
        .find(|(x, _)| **x >= threshold)
        .map(|(_, &t)| BlowupSignal { t, source: BlowupSource::XNorm });
    crossing.or(record.blow_up.map(|t| BlowupSignal { t, source: BlowupSource::SupGuard }))
}
