use super::{apply_exclusion, build_graph, prune_and_order, thin, BaseHint, BinaryMask};
use crate::error::{Error, Result};
use crate::kinematics::MidlineSequence;
use crate::midline::Midline;
use crate::parallel;

/// A frame that produced no midline.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGap {
    pub frame: usize,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub sequence: MidlineSequence,
    pub gaps: Vec<FrameGap>,
}

/// Full per-frame pipeline: exclusion, thinning, graph, prune and order.
pub fn extract_frame(
    mask: &BinaryMask,
    fixture: &BinaryMask,
    pitch: f64,
    base_hint: BaseHint,
) -> Result<Midline> {
    let arm = apply_exclusion(mask, fixture)?;
    let skeleton = thin(&arm)?;
    prune_and_order(&build_graph(&skeleton), pitch, base_hint)
}

/// Extract every frame (in parallel when enabled) and assemble them in frame
/// order. Frames whose topology cannot be resolved become gaps; only a
/// dimension mismatch or a run with no usable frame is an error.
pub fn extract_sequence(
    masks: &[BinaryMask],
    fixture: &BinaryMask,
    dt: f64,
    pitch: f64,
    base_hint: BaseHint,
) -> Result<Extraction> {
    let (frames, gaps) = extract_frames(masks, fixture, dt, pitch, base_hint)?;
    if frames.is_empty() {
        return Err(Error::EmptySequence(format!(
            "all {} frames failed extraction",
            masks.len()
        )));
    }
    Ok(Extraction {
        sequence: MidlineSequence::new(frames, dt)?,
        gaps,
    })
}

/// Like [`extract_sequence`] but returns the raw frames and gaps, so a
/// caller can still report gaps when no frame survives.
pub fn extract_frames(
    masks: &[BinaryMask],
    fixture: &BinaryMask,
    dt: f64,
    pitch: f64,
    base_hint: BaseHint,
) -> Result<(Vec<Midline>, Vec<FrameGap>)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("dt must be > 0, got {dt}")));
    }
    if !(pitch > 0.0 && pitch.is_finite()) {
        return Err(Error::invalid(format!("pitch must be > 0, got {pitch}")));
    }
    if masks.is_empty() {
        return Err(Error::EmptySequence("no mask frames".into()));
    }
    for (i, m) in masks.iter().enumerate() {
        if (m.width(), m.height()) != (fixture.width(), fixture.height()) {
            return Err(Error::invalid(format!(
                "frame {i} is {}x{}, fixture is {}x{}",
                m.width(),
                m.height(),
                fixture.width(),
                fixture.height()
            )));
        }
    }
    let indexed: Vec<(usize, &BinaryMask)> = masks.iter().enumerate().collect();
    let results = parallel::map(&indexed, |&(i, m)| {
        extract_frame(m, fixture, pitch, base_hint).map(|ml| ml.with_time(i as f64 * dt))
    });

    let mut frames = Vec::new();
    let mut gaps = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(m) => frames.push(m),
            Err(e) => gaps.push(FrameGap {
                frame: i,
                kind: e.kind().to_string(),
                message: e.to_string(),
            }),
        }
    }
    Ok((frames, gaps))
}
