use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::frame::SeriesFrame;
use crate::error::{Error, Result};

/// Chronological train/validation/test proportions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub ratios: [f64; 3],
}

impl SplitSpec {
    /// 70:10:20.
    pub fn standard() -> Self {
        Self { ratios: [0.7, 0.1, 0.2] }
    }

    /// 60:20:20, used for the ETT datasets.
    pub fn ett() -> Self {
        Self { ratios: [0.6, 0.2, 0.2] }
    }

    pub fn new(ratios: [f64; 3]) -> Result<Self> {
        let s = Self { ratios };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ratios.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidInput(format!("negative split ratio in {:?}", self.ratios)));
        }
        let sum: f64 = self.ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("split ratios sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Row ranges of the three parts; boundaries at `floor(cumulative ratio · len)`.
    pub fn ranges(&self, len: usize) -> Result<[Range<usize>; 3]> {
        self.validate()?;
        // Guard against 0.7 * 100 = 69.99999… style rounding.
        let cut = |r: f64| ((r * len as f64) + 1e-9).floor() as usize;
        let b1 = cut(self.ratios[0]).min(len);
        let b2 = cut(self.ratios[0] + self.ratios[1]).clamp(b1, len);
        Ok([0..b1, b1..b2, b2..len])
    }
}

/// The three parts of a frame. Validation and test frames are extended back
/// by `context` rows so their first windows have a full look-back.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: SeriesFrame,
    pub val: SeriesFrame,
    pub test: SeriesFrame,
    /// Row ranges of the parts before any context is added.
    pub ranges: [Range<usize>; 3],
}

pub fn split(frame: &SeriesFrame, spec: &SplitSpec, context: usize) -> Result<Splits> {
    let ranges = spec.ranges(frame.len())?;
    let names = ["train", "validation", "test"];
    for (r, n) in ranges.iter().zip(names) {
        if r.is_empty() {
            return Err(Error::EmptySplit(format!("{n} split of {} rows is empty", frame.len())));
        }
    }
    let with_context = |r: &Range<usize>| r.start.saturating_sub(context)..r.end;
    Ok(Splits {
        train: frame.slice(ranges[0].clone())?,
        val: frame.slice(with_context(&ranges[1]))?,
        test: frame.slice(with_context(&ranges[2]))?,
        ranges,
    })
}

/// Minimum std used when scaling a channel.
pub const SCALE_FLOOR: f64 = 1e-8;

/// Per-channel affine scaling fitted on one frame and applied to others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Channel means and population standard deviations (floored).
    pub fn fit(frame: &SeriesFrame) -> Self {
        let (mean, std) = frame
            .channels
            .iter()
            .map(|c| {
                let n = c.len() as f64;
                let m = c.iter().sum::<f64>() / n;
                let v = c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
                (m, v.sqrt().max(SCALE_FLOOR))
            })
            .unzip();
        Self { mean, std }
    }

    fn check(&self, frame: &SeriesFrame) -> Result<()> {
        if frame.n_channels() != self.mean.len() {
            return Err(Error::Shape(format!(
                "scaler fitted on {} channels, frame has {}",
                self.mean.len(),
                frame.n_channels()
            )));
        }
        Ok(())
    }

    pub fn transform(&self, frame: &SeriesFrame) -> Result<SeriesFrame> {
        self.check(frame)?;
        let mut out = frame.clone();
        for ((c, &m), &s) in out.channels.iter_mut().zip(&self.mean).zip(&self.std) {
            c.iter_mut().for_each(|v| *v = (*v - m) / s);
        }
        Ok(out)
    }

    pub fn inverse(&self, frame: &SeriesFrame) -> Result<SeriesFrame> {
        self.check(frame)?;
        let mut out = frame.clone();
        for ((c, &m), &s) in out.channels.iter_mut().zip(&self.mean).zip(&self.std) {
            c.iter_mut().for_each(|v| *v = *v * s + m);
        }
        Ok(out)
    }

    /// Undoes the scaling of channel `c` on a single series.
    pub fn inverse_channel(&self, c: usize, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| v * self.std[c] + self.mean[c]).collect()
    }
}

/// Scales all three parts with statistics of the training part only.
pub fn standardize(splits: &Splits) -> Result<(Splits, Scaler)> {
    let scaler = Scaler::fit(&splits.train);
    Ok((
        Splits {
            train: scaler.transform(&splits.train)?,
            val: scaler.transform(&splits.val)?,
            test: scaler.transform(&splits.test)?,
            ranges: splits.ranges.clone(),
        },
        scaler,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_boundaries() {
        let r = SplitSpec::standard().ranges(100).unwrap();
        assert_eq!(r, [0..70, 70..80, 80..100]);
        let r = SplitSpec::ett().ranges(17420).unwrap();
        assert_eq!(r, [0..10452, 10452..13936, 13936..17420]);
        assert!(SplitSpec::new([0.5, 0.2, 0.2]).is_err());
    }

    #[test]
    fn context_borrowed_from_previous_part() {
        let f = SeriesFrame::new("x", vec!["OT".into()], vec![(0..100).map(f64::from).collect()]).unwrap();
        let s = split(&f, &SplitSpec::standard(), 5).unwrap();
        assert_eq!(s.train.len(), 70);
        assert_eq!(s.val.len(), 15);
        assert_eq!(s.val.channels[0][0], 65.0);
        assert_eq!(s.test.channels[0][0], 75.0);
    }

    #[test]
    fn constant_train_channel() {
        let f = SeriesFrame::new("x", vec!["OT".into()], vec![vec![3.0; 10]]).unwrap();
        let sc = Scaler::fit(&f);
        assert_eq!(sc.std[0], SCALE_FLOOR);
        assert!(sc.transform(&f).unwrap().channels[0].iter().all(|&v| v == 0.0));
    }
}
