//! Lattice rounding: separated sets in a slab onto a refined lattice,
//! separated nets onto Z^d, and extension of maps from sub-nets of Z^d.

mod extend;
mod lattice;
mod slab;

pub use extend::{
    check_extension, covering_radius, extend_from_subnet, LatticeExtension, SubnetMap,
};
pub use lattice::{
    check_lattice_rounding, net_to_lattice, net_to_lattice_at, net_to_lattice_smallest, LatticeRounding, SeparatedNet,
};
pub(crate) use slab::close_pairs;
pub use slab::{
    cell_capacity, check_rounding, inj_round, random_slab_net, RoundingMaps, RoundingReport,
    SlabNet,
};
