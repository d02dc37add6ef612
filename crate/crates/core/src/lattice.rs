//! Honeycomb geometry: sites, neighbor tables and boundary-wrap bookkeeping.
//!
//! Primitive vectors are `a1 = (√3, 0)` and `a2 = (√3/2, 3/2)` with unit bond
//! length. Sublattice A sits at the cell origin, B at `(0, 1)` above it. The
//! three nearest neighbors of `A(cx, cy)` are the B sites of cells
//! `(cx, cy)`, `(cx, cy - 1)` and `(cx + 1, cy - 1)`.
//!
//! Positions used by the invariants are integer cell indices, so both sites of
//! a cell share one coordinate and `e^{2πi r/L}` is single-valued on the torus.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// NN displacements (in cells) from an A site to its three B neighbors.
pub(crate) const NN_CELL_OFFSETS: [(i64, i64); 3] = [(0, 0), (0, -1), (1, -1)];

/// NNN displacements with positive (clockwise) orientation on sublattice A:
/// `-a1`, `a1 - a2`, `a2`. Sublattice B uses the negated set. With this
/// choice the lower Haldane band at `Φ = π/2`, `Δ0 = 0` has `C = +1`.
pub(crate) const NNN_POSITIVE_A: [(i64, i64); 3] = [(-1, 0), (1, -1), (0, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    /// Staggering sign `ξ`: +1 on A, -1 on B.
    pub fn xi(self) -> f64 {
        match self {
            Sublattice::A => 1.0,
            Sublattice::B => -1.0,
        }
    }

    fn index(self) -> usize {
        match self {
            Sublattice::A => 0,
            Sublattice::B => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Eigenvalue of `σz`.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub cx: usize,
    pub cy: usize,
    pub sublattice: Sublattice,
    pub spin: Option<Spin>,
}

/// A directed hop between two orbitals (spatial sites, spin not included).
///
/// `cell(to) = cell(from) + (dx, dy) - (Lx·wrap_x, Ly·wrap_y)`, where
/// `(dx, dy)` is the true short-range displacement in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    pub dx: i64,
    pub dy: i64,
    pub wrap_x: i64,
    pub wrap_y: i64,
    /// +1 for every stored NNN bond (the hop runs along the positive
    /// orientation); 0 for NN bonds.
    pub orientation: i8,
}

impl Bond {
    pub fn wraps(&self) -> bool {
        self.wrap_x != 0 || self.wrap_y != 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGeometry {
    lx: usize,
    ly: usize,
    spinful: bool,
    sites: Vec<Site>,
    nn_bonds: Vec<Bond>,
    nnn_bonds: Vec<Bond>,
}

impl LatticeGeometry {
    pub fn lx(&self) -> usize {
        self.lx
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn is_spinful(&self) -> bool {
        self.spinful
    }

    pub fn num_cells(&self) -> usize {
        self.lx * self.ly
    }

    /// Spatial sites, two per cell.
    pub fn num_orbitals(&self) -> usize {
        2 * self.num_cells()
    }

    /// Basis dimension `N` (orbitals times spin multiplicity).
    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn spin_multiplicity(&self) -> usize {
        if self.spinful {
            2
        } else {
            1
        }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// Undirected NN bonds, each stored once as A → B.
    pub fn nn_bonds(&self) -> &[Bond] {
        &self.nn_bonds
    }

    /// Undirected NNN bonds, each stored once in its positive orientation.
    pub fn nnn_bonds(&self) -> &[Bond] {
        &self.nnn_bonds
    }

    pub fn orbital_index(&self, cx: usize, cy: usize, sublattice: Sublattice) -> usize {
        2 * (cy * self.lx + cx) + sublattice.index()
    }

    /// Basis index of `(orbital, spin)`; `spin` is ignored for spinless
    /// geometries.
    pub fn site_index(&self, orbital: usize, spin: Spin) -> usize {
        if self.spinful {
            2 * orbital
                + match spin {
                    Spin::Up => 0,
                    Spin::Down => 1,
                }
        } else {
            orbital
        }
    }

    pub fn orbital_cell(&self, orbital: usize) -> (usize, usize) {
        let cell = orbital / 2;
        (cell % self.lx, cell / self.lx)
    }

    pub fn orbital_sublattice(&self, orbital: usize) -> Sublattice {
        if orbital % 2 == 0 {
            Sublattice::A
        } else {
            Sublattice::B
        }
    }

    /// Cartesian position of an orbital in an unwrapped cell frame.
    pub fn cartesian(&self, cx: f64, cy: f64, sublattice: Sublattice) -> (f64, f64) {
        let x = SQRT3 * cx + 0.5 * SQRT3 * cy;
        let y = 1.5 * cy
            + match sublattice {
                Sublattice::A => 0.0,
                Sublattice::B => 1.0,
            };
        (x, y)
    }

    /// Cartesian vector of a bond, computed from its short-range cell
    /// displacement (independent of wrapping).
    pub fn bond_vector(&self, bond: &Bond) -> (f64, f64) {
        let (fx, fy) = self.cartesian(0.0, 0.0, self.orbital_sublattice(bond.from));
        let (tx, ty) = self.cartesian(
            bond.dx as f64,
            bond.dy as f64,
            self.orbital_sublattice(bond.to),
        );
        (tx - fx, ty - fy)
    }
}

/// Builds the `Lx × Ly` honeycomb torus. Site order is row-major in
/// `(cy, cx, sublattice, spin)`.
pub fn build_honeycomb(lx: usize, ly: usize, spinful: bool) -> Result<LatticeGeometry> {
    if lx < 3 || ly < 3 {
        return Err(Error::LatticeTooSmall { lx, ly });
    }
    let spins: &[Option<Spin>] = if spinful {
        &[Some(Spin::Up), Some(Spin::Down)]
    } else {
        &[None]
    };
    let mut sites = Vec::with_capacity(2 * lx * ly * spins.len());
    for cy in 0..ly {
        for cx in 0..lx {
            for sublattice in [Sublattice::A, Sublattice::B] {
                for &spin in spins {
                    sites.push(Site {
                        cx,
                        cy,
                        sublattice,
                        spin,
                    });
                }
            }
        }
    }

    let mut geom = LatticeGeometry {
        lx,
        ly,
        spinful,
        sites,
        nn_bonds: Vec::with_capacity(3 * lx * ly),
        nnn_bonds: Vec::with_capacity(6 * lx * ly),
    };

    // (target coordinate, wrap count) for a displaced coordinate
    let shift = |c: usize, d: i64, len: usize| -> (usize, i64) {
        let raw = c as i64 + d;
        let len = len as i64;
        let wrap = raw.div_euclid(len);
        ((raw - wrap * len) as usize, wrap)
    };

    for cy in 0..ly {
        for cx in 0..lx {
            let a = geom.orbital_index(cx, cy, Sublattice::A);
            for &(dx, dy) in &NN_CELL_OFFSETS {
                let (tx, wx) = shift(cx, dx, lx);
                let (ty, wy) = shift(cy, dy, ly);
                geom.nn_bonds.push(Bond {
                    from: a,
                    to: geom.orbital_index(tx, ty, Sublattice::B),
                    dx,
                    dy,
                    wrap_x: wx,
                    wrap_y: wy,
                    orientation: 0,
                });
            }
        }
    }

    for cy in 0..ly {
        for cx in 0..lx {
            for sublattice in [Sublattice::A, Sublattice::B] {
                let from = geom.orbital_index(cx, cy, sublattice);
                for &(ax, ay) in &NNN_POSITIVE_A {
                    let (dx, dy) = match sublattice {
                        Sublattice::A => (ax, ay),
                        Sublattice::B => (-ax, -ay),
                    };
                    let (tx, wx) = shift(cx, dx, lx);
                    let (ty, wy) = shift(cy, dy, ly);
                    geom.nnn_bonds.push(Bond {
                        from,
                        to: geom.orbital_index(tx, ty, sublattice),
                        dx,
                        dy,
                        wrap_x: wx,
                        wrap_y: wy,
                        orientation: 1,
                    });
                }
            }
        }
    }

    Ok(geom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_small_lattices() {
        let g = build_honeycomb(3, 3, false).unwrap();
        assert_eq!(g.num_sites(), 18);
        assert_eq!(g.nn_bonds().len(), 27);
        assert_eq!(g.nnn_bonds().len(), 54);
        assert_eq!(build_honeycomb(11, 11, false).unwrap().num_sites(), 242);
        assert_eq!(build_honeycomb(3, 3, true).unwrap().num_sites(), 36);
    }

    #[test]
    fn rejects_small_sizes() {
        assert_eq!(
            build_honeycomb(2, 5, false),
            Err(Error::LatticeTooSmall { lx: 2, ly: 5 })
        );
        assert!(build_honeycomb(4, 1, true).is_err());
    }

    #[test]
    fn row_major_site_order() {
        let g = build_honeycomb(4, 3, true).unwrap();
        for (k, s) in g.sites().iter().enumerate() {
            let spin = if s.spin == Some(Spin::Down) { 1 } else { 0 };
            let sub = if s.sublattice == Sublattice::B { 1 } else { 0 };
            assert_eq!(k, ((s.cy * 4 + s.cx) * 2 + sub) * 2 + spin);
        }
    }

    #[test]
    fn neighbor_degrees() {
        for (lx, ly) in [(3, 3), (4, 5), (7, 3)] {
            let g = build_honeycomb(lx, ly, false).unwrap();
            let mut nn = alloc::vec![0usize; g.num_orbitals()];
            let mut nnn = alloc::vec![0usize; g.num_orbitals()];
            for b in g.nn_bonds() {
                nn[b.from] += 1;
                nn[b.to] += 1;
            }
            for b in g.nnn_bonds() {
                nnn[b.from] += 1;
                nnn[b.to] += 1;
            }
            assert!(nn.iter().all(|&d| d == 3));
            assert!(nnn.iter().all(|&d| d == 6));
        }
    }

    #[test]
    fn nnn_pairs_are_distinct() {
        let g = build_honeycomb(3, 3, false).unwrap();
        let mut pairs: Vec<(usize, usize)> = g
            .nnn_bonds()
            .iter()
            .map(|b| (b.from.min(b.to), b.from.max(b.to)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), 54);
    }

    #[test]
    fn wrap_flags_only_on_boundary_bonds() {
        let g = build_honeycomb(5, 4, false).unwrap();
        for b in g.nn_bonds().iter().chain(g.nnn_bonds()) {
            let (fx, fy) = g.orbital_cell(b.from);
            let (tx, ty) = g.orbital_cell(b.to);
            assert_eq!(tx as i64, fx as i64 + b.dx - 5 * b.wrap_x);
            assert_eq!(ty as i64, fy as i64 + b.dy - 4 * b.wrap_y);
            let crosses_x = fx as i64 + b.dx < 0 || fx as i64 + b.dx >= 5;
            let crosses_y = fy as i64 + b.dy < 0 || fy as i64 + b.dy >= 4;
            assert_eq!(b.wrap_x != 0, crosses_x);
            assert_eq!(b.wrap_y != 0, crosses_y);
            assert!(b.dx.abs() <= 1 && b.dy.abs() <= 1);
        }
    }

    #[test]
    fn bond_lengths() {
        let g = build_honeycomb(4, 4, false).unwrap();
        for b in g.nn_bonds() {
            let (x, y) = g.bond_vector(b);
            assert!((x * x + y * y - 1.0).abs() < 1e-12);
        }
        for b in g.nnn_bonds() {
            let (x, y) = g.bond_vector(b);
            assert!((x * x + y * y - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_orientation_turns_clockwise() {
        // Going A → B → A' along the two NN bonds that make up a positive NNN
        // hop must turn right (negative cross product).
        let g = build_honeycomb(4, 4, false).unwrap();
        for b in g.nnn_bonds().iter().filter(|b| g.orbital_sublattice(b.from) == Sublattice::A) {
            let (dx, dy) = g.bond_vector(b);
            let nn: Vec<(f64, f64)> = NN_CELL_OFFSETS
                .iter()
                .map(|&(ox, oy)| {
                    let (x, y) = g.cartesian(ox as f64, oy as f64, Sublattice::B);
                    (x, y)
                })
                .collect();
            // find the intermediate B site
            let mid = nn
                .iter()
                .find(|&&(mx, my)| {
                    let (rx, ry) = (dx - mx, dy - my);
                    (rx * rx + ry * ry - 1.0).abs() < 1e-9
                })
                .copied()
                .unwrap();
            let second = (dx - mid.0, dy - mid.1);
            let cross = mid.0 * second.1 - mid.1 * second.0;
            assert!(cross < 0.0, "bond {b:?} turns counterclockwise");
        }
    }
}
