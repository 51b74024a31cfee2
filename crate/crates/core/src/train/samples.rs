use crate::data::WindowSet;

/// Windows of a dataset as seen by training and evaluation. Each window
/// contributes one sample per scored channel.
pub trait SampleSet: Sync {
    fn n_windows(&self) -> usize;
    fn seq_len(&self) -> usize;
    fn pred_len(&self) -> usize;
    /// Channels that are fed to the model and scored.
    fn channels(&self) -> &[usize];
    fn input(&self, window: usize, channel: usize) -> &[f64];
    /// Look-back followed by the true future.
    fn span(&self, window: usize, channel: usize) -> &[f64];
}

/// Channel-independent models only need the scored channels: in `MS` mode the
/// extra input channels never reach the target's forecast.
impl SampleSet for WindowSet {
    fn n_windows(&self) -> usize {
        self.len()
    }
    fn seq_len(&self) -> usize {
        WindowSet::seq_len(self)
    }
    fn pred_len(&self) -> usize {
        WindowSet::pred_len(self)
    }
    fn channels(&self) -> &[usize] {
        self.target_channels()
    }
    fn input(&self, window: usize, channel: usize) -> &[f64] {
        WindowSet::input(self, window, channel)
    }
    fn span(&self, window: usize, channel: usize) -> &[f64] {
        WindowSet::span(self, window, channel)
    }
}

/// In-memory samples, mostly for tests and synthetic studies. Every row of
/// `spans` is one channel of one window.
#[derive(Debug, Clone)]
pub struct SpanSet {
    seq_len: usize,
    pred_len: usize,
    channels: Vec<usize>,
    /// `spans[w][c]` has `seq_len + pred_len` values.
    spans: Vec<Vec<Vec<f64>>>,
}

impl SpanSet {
    pub fn new(seq_len: usize, pred_len: usize, spans: Vec<Vec<Vec<f64>>>) -> Self {
        let n_ch = spans.first().map_or(0, |w| w.len());
        assert!(
            spans.iter().all(|w| w.len() == n_ch && w.iter().all(|s| s.len() == seq_len + pred_len)),
            "every window needs the same channels of seq_len + pred_len values"
        );
        Self {
            seq_len,
            pred_len,
            channels: (0..n_ch).collect(),
            spans,
        }
    }

    /// Stride-1 windows over a single series.
    pub fn sliding(series: &[f64], seq_len: usize, pred_len: usize) -> Self {
        let w = seq_len + pred_len;
        let spans = series.windows(w).map(|s| vec![s.to_vec()]).collect();
        Self::new(seq_len, pred_len, spans)
    }
}

impl SampleSet for SpanSet {
    fn n_windows(&self) -> usize {
        self.spans.len()
    }
    fn seq_len(&self) -> usize {
        self.seq_len
    }
    fn pred_len(&self) -> usize {
        self.pred_len
    }
    fn channels(&self) -> &[usize] {
        &self.channels
    }
    fn input(&self, window: usize, channel: usize) -> &[f64] {
        &self.spans[window][channel][..self.seq_len]
    }
    fn span(&self, window: usize, channel: usize) -> &[f64] {
        &self.spans[window][channel]
    }
}
