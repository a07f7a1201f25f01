pub mod chamber;
pub mod lattice;
pub mod oracle;
pub mod roots;
pub mod relations;
pub mod surface;
