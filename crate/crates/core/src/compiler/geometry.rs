use serde::{Deserialize, Serialize};
use std::fmt;

use crate::circuit::QCrankConfig;

/// Integer trap-site coordinate. `x` is the column, `y` the grid row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// Atom placement on the single-zone grid.
///
/// Columns `0..n_a` form the array; columns outside it are staging columns
/// used while address atoms wrap around. Data row `r` sits at grid row
/// `2r + 1` and the address row interacts with it from grid row `2r`, so the
/// address row starts at grid row 0, directly above data row 0. An address
/// atom at `(x, 2r)` and the data atom at `(x, 2r + 1)` form a CZ pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    cfg: QCrankConfig,
    positions: Vec<Site>,
}

impl Geometry {
    pub fn cfg(&self) -> QCrankConfig {
        self.cfg
    }

    pub fn columns(&self) -> usize {
        self.cfg.n_a()
    }

    pub fn data_rows(&self) -> usize {
        self.cfg.data_rows()
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    /// Position of atom `atom` (atom ids equal qubit ids).
    pub fn position(&self, atom: usize) -> Site {
        self.positions[atom]
    }

    pub fn positions(&self) -> &[Site] {
        &self.positions
    }

    pub fn occupant(&self, site: Site) -> Option<usize> {
        self.positions.iter().position(|&s| s == site)
    }

    pub fn is_address(&self, atom: usize) -> bool {
        self.cfg.is_address(atom)
    }

    pub(crate) fn set_position(&mut self, atom: usize, site: Site) {
        self.positions[atom] = site;
    }

    /// Grid row of data row `r`.
    pub fn data_y(row: usize) -> i32 {
        2 * row as i32 + 1
    }

    /// Grid row from which the address row interacts with data row `r`.
    pub fn address_y(row: usize) -> i32 {
        2 * row as i32
    }

    /// Data row the address row currently faces, if it is level on one.
    pub fn address_row_of(y: i32) -> Option<usize> {
        (y >= 0 && y % 2 == 0).then_some((y / 2) as usize)
    }

    /// The data atom an address atom at `site` would pair with.
    pub fn partner_site(site: Site) -> Site {
        Site::new(site.x, site.y + 1)
    }

    pub fn in_array(&self, site: Site) -> bool {
        site.x >= 0 && (site.x as usize) < self.columns()
    }
}

/// Initial layout: data qubit `j` at column `j mod n_a` of data row
/// `j div n_a`, address qubit `b` at column `b` facing data row 0.
pub fn plan_layout(cfg: QCrankConfig) -> Geometry {
    let n_a = cfg.n_a();
    let address = (0..n_a).map(|b| Site::new(b as i32, Geometry::address_y(0)));
    let data = (0..cfg.n_d()).map(|j| Site::new((j % n_a) as i32, Geometry::data_y(j / n_a)));
    Geometry {
        cfg,
        positions: address.chain(data).collect(),
    }
}
