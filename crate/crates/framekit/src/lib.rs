//! Computing with finite frames: filters, sublocales, polarities, and a
//! machine-checked law suite.

pub mod bitset;
pub mod catalog;
pub mod extensions;
pub mod filters;
pub mod lattice;
pub mod polarity;
pub mod sublocales;
pub mod theorems;
pub mod format;
