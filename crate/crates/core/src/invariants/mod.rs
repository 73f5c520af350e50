//! Surface point classification and the genus of closed digital surfaces.
//!
//! A boundary vertex with `m` incident quads has angle sum `m · π/2`, so its
//! angle defect is `2π − m·π/2 = (4 − m) · π/2`. Curvature is therefore kept
//! as an exact integer count of quarter turns. Summed over a closed surface,
//! the defects equal `2π(2 − 2g)`, i.e. `8 − 8g` quarter turns, which gives
//!
//! ```text
//! g = 1 + (|M5| + 2|M6| − |M3|) / 8
//! ```
//!
//! Type-4 points carry no curvature and do not enter the formula.

pub mod mesh;

use serde::Serialize;

use crate::boundary::BoundarySurface;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("vertex with {0} incident faces; surface points have 3 to 6")]
    BadIncidence(u8),
    #[error("corrupt surface: m3 - m5 - 2*m6 = {residue} is not divisible by 8")]
    NotDivisible { residue: i64 },
    #[error("corrupt surface: counts give negative genus {0}")]
    NegativeGenus(i64),
}

/// Counts of surface points by number of incident faces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SurfaceClassification {
    pub m3: u64,
    pub m4: u64,
    pub m5: u64,
    pub m6: u64,
}

impl SurfaceClassification {
    pub fn total(&self) -> u64 {
        self.m3 + self.m4 + self.m5 + self.m6
    }

    /// Total curvature in quarter turns, `m3 − m5 − 2·m6`.
    pub fn total_curvature(&self) -> i64 {
        self.m3 as i64 - self.m5 as i64 - 2 * self.m6 as i64
    }

    pub fn add(&mut self, m: u8) -> Result<(), InvariantError> {
        match m {
            3 => self.m3 += 1,
            4 => self.m4 += 1,
            5 => self.m5 += 1,
            6 => self.m6 += 1,
            _ => return Err(InvariantError::BadIncidence(m)),
        }
        Ok(())
    }
}

/// Discrete Gaussian curvature in units of π/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurvatureUnits {
    pub quarter_turns: i64,
}

impl CurvatureUnits {
    pub fn radians(self) -> f64 {
        self.quarter_turns as f64 * std::f64::consts::FRAC_PI_2
    }
}

/// Angle defect of a point where `m` quads meet: `4 − m` quarter turns.
pub fn vertex_curvature(m: u8) -> Result<CurvatureUnits, InvariantError> {
    if !(3..=6).contains(&m) {
        return Err(InvariantError::BadIncidence(m));
    }
    Ok(CurvatureUnits {
        quarter_turns: 4 - i64::from(m),
    })
}

pub fn classify(s: &BoundarySurface) -> Result<SurfaceClassification, InvariantError> {
    let mut c = SurfaceClassification::default();
    for v in &s.vertices {
        c.add(v.incident_faces)?;
    }
    Ok(c)
}

/// Genus from point-type counts. Fails when the counts cannot come from a
/// closed orientable surface.
pub fn genus(c: &SurfaceClassification) -> Result<u32, InvariantError> {
    let residue = c.total_curvature();
    if residue.rem_euclid(8) != 0 {
        return Err(InvariantError::NotDivisible { residue });
    }
    let g = 1 - residue / 8;
    if g < 0 {
        return Err(InvariantError::NegativeGenus(g));
    }
    Ok(g as u32)
}

/// Checks the discrete Gauss-Bonnet identity for `s` with genus `g` by two
/// exact routes: summed vertex curvature `Σ(4 − m) = 8 − 8g`, and the cell
/// count `V − E + F = 2 − 2g`.
pub fn gauss_bonnet_check(s: &BoundarySurface, g: u32) -> bool {
    let g = i64::from(g);
    let curvature: i64 = s
        .vertices
        .iter()
        .map(|v| 4 - i64::from(v.incident_faces))
        .sum();
    curvature == 8 - 8 * g && s.euler_characteristic() == 2 - 2 * g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::extract_boundary;
    use crate::volume::{foreground_components, VoxelCoord, VoxelVolume};

    fn counts(m3: u64, m4: u64, m5: u64, m6: u64) -> SurfaceClassification {
        SurfaceClassification { m3, m4, m5, m6 }
    }

    fn first_surface(v: &VoxelVolume) -> BoundarySurface {
        extract_boundary(v, &foreground_components(v)).unwrap().remove(0)
    }

    #[test]
    fn curvature_table() {
        let q = |m| vertex_curvature(m).unwrap().quarter_turns;
        assert_eq!((q(3), q(4), q(5), q(6)), (1, 0, -1, -2));
        assert!((vertex_curvature(3).unwrap().radians() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((vertex_curvature(6).unwrap().radians() + std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(vertex_curvature(2), Err(InvariantError::BadIncidence(2)));
        assert_eq!(vertex_curvature(7), Err(InvariantError::BadIncidence(7)));
    }

    #[test]
    fn genus_from_counts() {
        assert_eq!(genus(&counts(8, 0, 0, 0)), Ok(0));
        assert_eq!(genus(&counts(8, 16, 8, 0)), Ok(1));
        assert_eq!(genus(&counts(8, 24, 16, 0)), Ok(2));
        assert_eq!(genus(&counts(16, 0, 16, 0)), Ok(1));
        assert_eq!(genus(&counts(8, 0, 0, 4)), Ok(1));
    }

    #[test]
    fn corrupt_counts_are_errors() {
        assert_eq!(
            genus(&counts(8, 0, 7, 0)),
            Err(InvariantError::NotDivisible { residue: 1 })
        );
        assert_eq!(genus(&counts(16, 0, 0, 0)), Err(InvariantError::NegativeGenus(-1)));
    }

    #[test]
    fn classify_unit_cube() {
        let mut v = VoxelVolume::new(1, 1, 1).unwrap();
        v.set(VoxelCoord::new(0, 0, 0), true).unwrap();
        let s = first_surface(&v);
        let c = classify(&s).unwrap();
        assert_eq!(c, counts(8, 0, 0, 0));
        assert_eq!(genus(&c), Ok(0));
        assert!(gauss_bonnet_check(&s, 0));
        assert!(!gauss_bonnet_check(&s, 1));
    }

    #[test]
    fn classify_ring() {
        let mut v = VoxelVolume::new(3, 3, 1).unwrap();
        v.fill_box(VoxelCoord::new(0, 0, 0), [3, 3, 1], true).unwrap();
        v.set(VoxelCoord::new(1, 1, 0), false).unwrap();
        let s = first_surface(&v);
        let c = classify(&s).unwrap();
        assert_eq!((c.m3, c.m5, c.m6), (8, 8, 0));
        assert_eq!(c.total(), s.vertex_count as u64);
        assert_eq!(genus(&c), Ok(1));
        assert!(gauss_bonnet_check(&s, 1));
    }

    #[test]
    fn classify_rejects_bad_incidence() {
        let mut s = first_surface(&VoxelVolume::from_coords([1, 1, 1], [VoxelCoord::new(0, 0, 0)]).unwrap());
        s.vertices[0].incident_faces = 7;
        assert_eq!(classify(&s), Err(InvariantError::BadIncidence(7)));
    }
}
