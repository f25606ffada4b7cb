//! Exact symbolic construction of GKLO difference-operator representations
//! of shifted twisted Yangians from quiver-with-involution data, and
//! mechanical verification of the defining relations.

pub mod diffop;
pub mod field;
pub mod gklo;
pub mod monopole;
pub mod poly;
pub mod quiver;
pub mod relations;
pub mod render;
pub mod ratfunc;
pub mod vars;
