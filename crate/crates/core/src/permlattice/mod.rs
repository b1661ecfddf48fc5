//! Lattice permutations with bounded displacement: decomposition into
//! tile-local rounds and realisation of tile shuffles by tube-spins.

mod decompose;
mod perm;
mod realize;

pub use decompose::{
    block_of, check_decomposition, check_decomposition_1d, check_round, decompose, decompose_1d,
    offsets, single_round, tile_of, tile_sites, Decomposition, Decomposition1d, RoundState, Tile,
};
pub use perm::{
    apply_sequence, box_points, random_bounded_permutation, random_tile_permutation, Site,
    WindowPermutation,
};
pub use realize::{
    bubble_sort_transpositions, realize_tile_shuffle, snake_order, tile_points, TileShuffle,
    TransposeProgram,
};
