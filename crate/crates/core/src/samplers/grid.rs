use crate::search_space::{grid_points, ParamPoint, ParamValue, SearchSpace};

use super::SamplerError;

/// Enumeration state over the Cartesian product of per-dimension grids.
///
/// The first declared parameter varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCursor {
    space: SearchSpace,
    resolution: usize,
    axes: Vec<Vec<ParamValue>>,
    position: usize,
}

impl GridCursor {
    pub fn new(space: &SearchSpace, resolution: usize) -> Result<Self, SamplerError> {
        let axes = space
            .iter()
            .map(|(_, d)| grid_points(d, resolution))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridCursor {
            space: space.clone(),
            resolution,
            axes,
            position: 0,
        })
    }

    /// Total number of grid points.
    pub fn total(&self) -> usize {
        self.axes
            .iter()
            .fold(1usize, |acc, a| acc.saturating_mul(a.len()))
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn is_exhausted(&self) -> bool {
        self.position >= self.total()
    }

    /// Moves the cursor to an absolute position.
    pub fn seek(&mut self, position: usize) {
        self.position = position;
    }

    fn point_at(&self, mut index: usize) -> ParamPoint {
        let mut values = vec![None; self.axes.len()];
        for (slot, axis) in values.iter_mut().zip(&self.axes).rev() {
            *slot = Some(axis[index % axis.len()].clone());
            index /= axis.len();
        }
        self.space
            .names()
            .zip(values)
            .map(|(n, v)| (n, v.expect("filled")))
            .collect()
    }
}

/// Returns the next grid point and advances `cursor`, or `None` once every
/// point has been produced.
pub fn grid_next(
    space: &SearchSpace,
    resolution: usize,
    cursor: &mut GridCursor,
) -> Result<Option<ParamPoint>, SamplerError> {
    if cursor.resolution != resolution || cursor.space != *space {
        return Err(SamplerError::CursorMismatch);
    }
    if cursor.is_exhausted() {
        return Ok(None);
    }
    let p = cursor.point_at(cursor.position);
    cursor.position += 1;
    Ok(Some(p))
}
