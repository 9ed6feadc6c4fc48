pub mod error;
pub mod geom;
pub mod halving;
pub mod induced;
pub mod io;
pub mod lines;
pub mod oracle;
pub mod rayshoot;
pub mod scalar;
pub mod solver;
pub mod spawn;
