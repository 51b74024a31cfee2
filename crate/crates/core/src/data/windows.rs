use serde::{Deserialize, Serialize};

use super::frame::SeriesFrame;
use crate::error::{Error, Result};

/// Which channels feed the model and which are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Target channel in, target channel out.
    S,
    /// All channels in, target channel out.
    MS,
    /// All channels in, all channels out.
    M,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(Mode::S),
            "MS" | "ms" => Ok(Mode::MS),
            "M" | "m" => Ok(Mode::M),
            _ => Err(Error::InvalidInput(format!("unknown mode {s:?} (expected S, MS or M)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::S => "S",
            Mode::MS => "MS",
            Mode::M => "M",
        })
    }
}

/// Stride-1 sliding windows over a frame. Window `i` reads rows
/// `i .. i + seq_len` and is scored on rows `i + seq_len .. i + seq_len + pred_len`.
/// Windows are slices into the owned frame; nothing is copied.
#[derive(Debug, Clone)]
pub struct WindowSet {
    frame: SeriesFrame,
    seq_len: usize,
    pred_len: usize,
    mode: Mode,
    inputs: Vec<usize>,
    targets: Vec<usize>,
}

pub fn make_windows(frame: SeriesFrame, seq_len: usize, pred_len: usize, mode: Mode) -> Result<WindowSet> {
    if seq_len == 0 || pred_len == 0 {
        return Err(Error::InvalidInput("seq_len and pred_len must be positive".into()));
    }
    if seq_len + pred_len > frame.len() {
        return Err(Error::EmptySplit(format!(
            "{} rows cannot hold a window of {seq_len} + {pred_len}",
            frame.len()
        )));
    }
    let all: Vec<usize> = (0..frame.n_channels()).collect();
    let (inputs, targets) = match mode {
        Mode::S => (vec![frame.target], vec![frame.target]),
        Mode::MS => (all, vec![frame.target]),
        Mode::M => (all.clone(), all),
    };
    Ok(WindowSet {
        frame,
        seq_len,
        pred_len,
        mode,
        inputs,
        targets,
    })
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.frame.len() - self.seq_len - self.pred_len + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    pub fn pred_len(&self) -> usize {
        self.pred_len
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn frame(&self) -> &SeriesFrame {
        &self.frame
    }

    /// Frame channel indices fed to the model.
    pub fn input_channels(&self) -> &[usize] {
        &self.inputs
    }

    /// Frame channel indices that are scored.
    pub fn target_channels(&self) -> &[usize] {
        &self.targets
    }

    pub fn start(&self, window: usize) -> usize {
        window
    }

    /// Look-back values of frame channel `channel` for `window`.
    pub fn input(&self, window: usize, channel: usize) -> &[f64] {
        &self.frame.channels[channel][window..window + self.seq_len]
    }

    /// Future values of frame channel `channel` for `window`.
    pub fn target(&self, window: usize, channel: usize) -> &[f64] {
        let s = window + self.seq_len;
        &self.frame.channels[channel][s..s + self.pred_len]
    }

    /// Look-back and future values together.
    pub fn span(&self, window: usize, channel: usize) -> &[f64] {
        &self.frame.channels[channel][window..window + self.seq_len + self.pred_len]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(n: usize, ch: usize) -> SeriesFrame {
        let cols = (0..ch).map(|c| format!("c{c}")).collect();
        let data = (0..ch).map(|c| (0..n).map(|i| (i * 10 + c) as f64).collect()).collect();
        SeriesFrame::new("w", cols, data).unwrap()
    }

    #[test]
    fn counts_and_slices() {
        let w = make_windows(frame(100, 3), 10, 5, Mode::M).unwrap();
        assert_eq!(w.len(), 86);
        assert_eq!(w.input_channels().len(), 3);
        assert_eq!(w.target_channels().len(), 3);
        assert_eq!(w.input(4, 1)[0], 41.0);
        assert_eq!(w.target(4, 1), &[141.0, 151.0, 161.0, 171.0, 181.0]);
        assert!(make_windows(frame(14, 1), 10, 5, Mode::S).is_err());
    }

    #[test]
    fn mode_channels() {
        let s = make_windows(frame(30, 3), 5, 2, Mode::S).unwrap();
        assert_eq!((s.input_channels(), s.target_channels()), (&[2][..], &[2][..]));
        let ms = make_windows(frame(30, 3), 5, 2, Mode::MS).unwrap();
        assert_eq!((ms.input_channels().len(), ms.target_channels()), (3, &[2][..]));
        assert_eq!("MS".parse::<Mode>().unwrap(), Mode::MS);
        assert!("X".parse::<Mode>().is_err());
    }
}
