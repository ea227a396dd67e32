pub mod fan;
pub mod hull;
pub mod lattice;
pub mod localization;
pub mod monodromy;
pub mod poly;
pub mod report;
pub mod subdivision;
pub mod svg;
pub mod tropical;
