//! CSV ingestion, cleaning, chronological splits, scaling, sliding windows and
//! synthetic signals.

mod frame;
mod split;
mod synth;
mod windows;

pub use frame::{clean_sentinels, load_csv, read_csv, save_csv, write_csv, SeriesFrame, DEFAULT_TARGET};
pub use split::{split, standardize, Scaler, SplitSpec, Splits, SCALE_FLOOR};
pub use synth::{synth_generate, Component, SynthSpec};
pub use windows::{make_windows, Mode, WindowSet};
