pub mod cayley;
pub mod cli;
pub mod constants;
pub mod error;
pub mod freesets;
pub mod hypgeom;
pub mod rational;
pub mod shortening;
pub mod smallcancel;
pub mod words;
