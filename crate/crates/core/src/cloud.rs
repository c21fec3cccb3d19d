use crate::error::{Error, Result};

/// `N` points in `R^m`, optionally paired with coordinates in a reference
/// (intrinsic) space used for base-geometry comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    intrinsic: Option<(usize, Vec<f64>)>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_rows(&points, "points")?;
        Ok(Self {
            dim,
            coords: points.concat(),
            intrinsic: None,
        })
    }

    pub fn with_intrinsic(mut self, intrinsic: Vec<Vec<f64>>) -> Result<Self> {
        if intrinsic.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "{} intrinsic coordinates for {} points",
                intrinsic.len(),
                self.len()
            )));
        }
        let dim = check_rows(&intrinsic, "intrinsic coordinates")?;
        self.intrinsic = Some((dim, intrinsic.concat()));
        Ok(self)
    }

    pub(crate) fn from_flat(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && coords.len().is_multiple_of(dim));
        Self {
            dim,
            coords,
            intrinsic: None,
        }
    }

    pub(crate) fn set_intrinsic_flat(&mut self, dim: usize, coords: Vec<f64>) {
        debug_assert_eq!(coords.len(), dim * self.len());
        self.intrinsic = Some((dim, coords));
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Ambient dimension `m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub(crate) fn points_mut(&mut self) -> std::slice::ChunksExactMut<'_, f64> {
        self.coords.chunks_exact_mut(self.dim)
    }

    pub fn intrinsic_dim(&self) -> Option<usize> {
        self.intrinsic.as_ref().map(|(d, _)| *d)
    }

    pub fn intrinsic(&self, i: usize) -> Option<&[f64]> {
        self.intrinsic.as_ref().map(|(d, c)| &c[i * d..(i + 1) * d])
    }

    /// The intrinsic coordinates as a point cloud of their own.
    pub fn intrinsic_cloud(&self) -> Option<PointCloud> {
        self.intrinsic
            .as_ref()
            .map(|(d, c)| PointCloud::from_flat(*d, c.clone()))
    }

    /// Sub-cloud on `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let coords = indices.iter().flat_map(|&i| self.point(i).to_vec()).collect();
        let mut out = PointCloud::from_flat(self.dim, coords);
        if let Some((d, _)) = &self.intrinsic {
            let c = indices
                .iter()
                .flat_map(|&i| self.intrinsic(i).unwrap().to_vec())
                .collect();
            out.intrinsic = Some((*d, c));
        }
        out
    }
}

fn check_rows(rows: &[Vec<f64>], what: &str) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Err(Error::InvalidInput(format!("{what}: need at least one point")));
    };
    let dim = first.len();
    if dim == 0 {
        return Err(Error::InvalidInput(format!("{what}: zero-dimensional points")));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::InvalidInput(format!(
                "{what}: point {i} has dimension {}, expected {dim}",
                r.len()
            )));
        }
        if let Some(v) = r.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{what}: point {i} has non-finite coordinate {v}"
            )));
        }
    }
    Ok(dim)
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
