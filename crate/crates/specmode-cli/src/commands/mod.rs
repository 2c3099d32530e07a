pub mod figure;
pub mod phard;
pub mod simulate;
