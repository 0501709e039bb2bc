//! Panel geometry and super-column grouping.

use crate::channel::Point3;
use crate::error::{Error, Result};
use crate::model::ReflectionModel;

/// A rectangular RIS panel centered on the origin in the z = 0 plane.
///
/// Elements are indexed row-major: `n = r * cols + c`. Columns are grouped
/// into contiguous super-columns of `group_cols` columns that share one
/// control signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    group_cols: usize,
    positions: Vec<Point3>,
    cell_model: ReflectionModel,
}

pub fn build_panel(
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    group_cols: usize,
    cell_model: ReflectionModel,
) -> Result<Panel> {
    if rows == 0 || cols == 0 {
        return Err(Error::config(format!("panel needs at least one row and column, got {rows}x{cols}")));
    }
    if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
        return Err(Error::config(format!("element spacing must be positive, got dx={dx}, dy={dy}")));
    }
    if group_cols == 0 || !cols.is_multiple_of(group_cols) {
        return Err(Error::config(format!(
            "{cols} columns cannot be split into super-columns of {group_cols}"
        )));
    }
    cell_model.validate()?;
    let xc = (cols as f64 - 1.0) / 2.0;
    let yc = (rows as f64 - 1.0) / 2.0;
    let positions = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| [(c as f64 - xc) * dx, (r as f64 - yc) * dy, 0.0]))
        .collect();
    Ok(Panel {
        rows,
        cols,
        dx,
        dy,
        group_cols,
        positions,
        cell_model,
    })
}

impl Panel {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn group_cols(&self) -> usize {
        self.group_cols
    }

    pub fn element_count(&self) -> usize {
        self.positions.len()
    }

    /// Number of super-columns.
    pub fn groups(&self) -> usize {
        self.cols / self.group_cols
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn cell_model(&self) -> &ReflectionModel {
        &self.cell_model
    }

    /// Super-column of element `n`.
    pub fn group_of(&self, n: usize) -> usize {
        (n % self.cols) / self.group_cols
    }

    /// x coordinate of the centre of super-column `g`.
    pub fn group_center_x(&self, g: usize) -> f64 {
        let first = (g * self.group_cols) as f64;
        let mid_col = first + (self.group_cols as f64 - 1.0) / 2.0;
        (mid_col - (self.cols as f64 - 1.0) / 2.0) * self.dx
    }

    /// Same geometry with a different cell model.
    pub fn with_model(&self, cell_model: ReflectionModel) -> Result<Panel> {
        cell_model.validate()?;
        Ok(Panel {
            cell_model,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element_at_origin() {
        let p = build_panel(1, 1, 0.01, 0.01, 1, ReflectionModel::ideal_pin()).unwrap();
        assert_eq!(p.positions(), &[[0.0, 0.0, 0.0]]);
    }

    #[test]
    fn two_by_two_is_symmetric() {
        let p = build_panel(2, 2, 0.02, 0.02, 2, ReflectionModel::ideal_pin()).unwrap();
        let xs: Vec<f64> = p.positions().iter().map(|q| q[0]).collect();
        assert_eq!(xs, vec![-0.01, 0.01, -0.01, 0.01]);
        assert_eq!(p.groups(), 1);
    }

    #[test]
    fn two_column_super_columns() {
        let p = build_panel(8, 8, 0.035, 0.035, 2, ReflectionModel::ideal_varactor()).unwrap();
        assert_eq!(p.groups(), 4);
        assert_eq!(p.element_count(), 64);
        let groups: Vec<usize> = (0..8).map(|n| p.group_of(n)).collect();
        assert_eq!(groups, vec![0, 0, 1, 1, 2, 2, 3, 3]);
        // Row-major: element 8 starts the second row.
        assert_eq!(p.group_of(8), 0);
        assert!((p.group_center_x(0) - (-3.0 * 0.035)).abs() < 1e-15);
    }

    #[test]
    fn seven_column_super_columns() {
        let p = build_panel(28, 28, 0.0055, 0.0055, 7, ReflectionModel::ideal_pin()).unwrap();
        assert_eq!(p.groups(), 4);
        assert_eq!(p.group_of(6), 0);
        assert_eq!(p.group_of(7), 1);
    }

    #[test]
    fn indivisible_grouping_rejected() {
        let err = build_panel(8, 8, 0.01, 0.01, 3, ReflectionModel::ideal_pin()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(build_panel(0, 8, 0.01, 0.01, 2, ReflectionModel::ideal_pin()).is_err());
        assert!(build_panel(8, 8, -0.01, 0.01, 2, ReflectionModel::ideal_pin()).is_err());
    }
}
