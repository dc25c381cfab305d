pub mod closeness;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod kcenter_asym;
pub mod kcenter_sym;
pub mod local_search;
pub mod metric;
pub mod objectives;
pub mod stability;
