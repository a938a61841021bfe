//! Room geometry: device placements, surface normals, the mirror grid, and
//! the cosine factors entering the Lambertian channel gains.

use crate::{Error, Result};

/// A point or direction in meters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn normalized(&self) -> Result<Vec3> {
        let n = self.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize vector ({}, {}, {})",
                self.x, self.y, self.z
            )));
        }
        Ok(self.scaled(1.0 / n))
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// A position plus the unit normal of the surface sitting there.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OrientedPoint {
    pub position: Vec3,
    pub normal: Vec3,
}

impl OrientedPoint {
    /// Builds an oriented point, normalizing `normal`.
    pub fn new(position: Vec3, normal: Vec3) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::InvalidParameter("non-finite position".into()));
        }
        Ok(Self { position, normal: normal.normalized()? })
    }
}

/// Cosine factors and distance for one optical hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Cosine of the irradiance angle at the source, clamped to [0, 1].
    pub cos_irradiance: f64,
    /// Cosine of the incidence angle at the destination, clamped to [0, 1].
    pub cos_incidence: f64,
    /// Euclidean distance in meters.
    pub distance: f64,
}

/// Computes the irradiance/incidence cosines and distance from `src` to `dst`.
///
/// Negative cosines clamp to zero: a surface neither emits nor receives from
/// behind.
pub fn link_cosines(src: &OrientedPoint, dst: &OrientedPoint) -> Result<LinkGeometry> {
    let delta = dst.position - src.position;
    let distance = delta.norm();
    if distance == 0.0 {
        let p = src.position;
        return Err(Error::CoincidentPoints(p.x, p.y, p.z));
    }
    let u = delta.scaled(1.0 / distance);
    let cos_irradiance = src.normal.dot(&u).clamp(0.0, 1.0);
    let cos_incidence = (-dst.normal.dot(&u)).clamp(0.0, 1.0);
    Ok(LinkGeometry { cos_irradiance, cos_incidence, distance })
}

/// Regular grid of square mirror elements, coplanar with a wall.
///
/// Rows run along the horizontal in-plane axis and columns along the vertical
/// one, so a 50 x 30 grid of 0.1 m elements covers 5.0 m horizontally by
/// 3.0 m vertically. Element ordering is row-major with the row index varying
/// slowest.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CrisGrid {
    pub center: Vec3,
    pub rows: usize,
    pub cols: usize,
    /// Side of one square element (m).
    pub element_side: f64,
    /// Unit normal of the mirror plane, pointing into the room.
    pub normal: Vec3,
}

/// Upper bound on mirror elements; keeps bad configurations from requesting
/// absurd allocations before the room-bounds check can reject them.
pub const MAX_GRID_ELEMENTS: usize = 1_000_000;

impl CrisGrid {
    pub fn new(center: Vec3, rows: usize, cols: usize, element_side: f64, normal: Vec3) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("grid needs at least one row and column".into()));
        }
        match rows.checked_mul(cols) {
            Some(n) if n <= MAX_GRID_ELEMENTS => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "{rows} x {cols} elements exceeds the supported maximum of {MAX_GRID_ELEMENTS}"
                )));
            }
        }
        if !(element_side > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "element side must be > 0, got {element_side}"
            )));
        }
        Ok(Self { center, rows, cols, element_side, normal: normal.normalized()? })
    }

    pub fn n_elements(&self) -> usize {
        self.rows * self.cols
    }

    /// Area of one element (m^2).
    pub fn element_area(&self) -> f64 {
        self.element_side * self.element_side
    }

    /// In-plane axes: `(row_axis, col_axis)` with the column axis chosen
    /// as the projection of +z onto the plane (vertical) and the row axis
    /// completing a right-handed frame (horizontal).
    fn plane_axes(&self) -> Result<(Vec3, Vec3)> {
        let n = self.normal;
        let z = Vec3::new(0.0, 0.0, 1.0);
        let col_axis = (z - n.scaled(z.dot(&n))).normalized().map_err(|_| {
            Error::InvalidParameter("grid normal may not be vertical".into())
        })?;
        let row_axis = col_axis.cross(&n).normalized()?;
        Ok((row_axis, col_axis))
    }

    /// Centers of all elements in row-major order (row index slowest).
    ///
    /// Fails if any center falls outside the axis-aligned room box
    /// `[0, room.x] x [0, room.y] x [0, room.z]`.
    pub fn element_centers(&self, room: Vec3) -> Result<Vec<Vec3>> {
        let (row_axis, col_axis) = self.plane_axes()?;
        let row_mid = (self.rows as f64 - 1.0) / 2.0;
        let col_mid = (self.cols as f64 - 1.0) / 2.0;
        let mut centers = Vec::with_capacity(self.n_elements());
        for r in 0..self.rows {
            let row_offset = (r as f64 - row_mid) * self.element_side;
            for c in 0..self.cols {
                let col_offset = (c as f64 - col_mid) * self.element_side;
                let p = self.center + row_axis.scaled(row_offset) + col_axis.scaled(col_offset);
                if !inside_room(&p, &room) {
                    return Err(Error::GridOutsideRoom(format!(
                        "element ({r}, {c}) center ({:.3}, {:.3}, {:.3}) outside {:.1} x {:.1} x {:.1} m room",
                        p.x, p.y, p.z, room.x, room.y, room.z
                    )));
                }
                centers.push(p);
            }
        }
        Ok(centers)
    }

    /// Element centers paired with the shared plane normal.
    pub fn element_points(&self, room: Vec3) -> Result<Vec<OrientedPoint>> {
        Ok(self
            .element_centers(room)?
            .into_iter()
            .map(|position| OrientedPoint { position, normal: self.normal })
            .collect())
    }
}

fn inside_room(p: &Vec3, room: &Vec3) -> bool {
    let eps = 1e-9;
    (-eps..=room.x + eps).contains(&p.x)
        && (-eps..=room.y + eps).contains(&p.y)
        && (-eps..=room.z + eps).contains(&p.z)
}

/// The full static scene: room box, transmitter, receiver, and mirror grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Scene {
    /// Room dimensions (m); the room occupies `[0, room.x] x [0, room.y] x [0, room.z]`.
    pub room: Vec3,
    /// Legitimate transmitter, ceiling-mounted, facing down.
    pub alice: OrientedPoint,
    /// Verifier's photodetector bank, facing the mirror wall.
    pub bob: OrientedPoint,
    pub grid: CrisGrid,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("alice", &self.alice.position), ("bob", &self.bob.position)] {
            if !inside_room(p, &self.room) {
                return Err(Error::InvalidParameter(format!(
                    "{name} at ({}, {}, {}) outside the room",
                    p.x, p.y, p.z
                )));
            }
        }
        self.grid.element_centers(self.room)?;
        Ok(())
    }

    /// True if `p` lies inside the room box.
    pub fn contains(&self, p: &Vec3) -> bool {
        inside_room(p, &self.room)
    }
}
