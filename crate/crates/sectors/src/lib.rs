//! Homotopy classification of maps between low-dimensional CW complexes.
//!
//! Maps `M → X` are modelled by homomorphisms of crossed modules (dimension 2)
//! and crossed squares (dimension 3); homotopies become integer-linear
//! conditions, so every classification reduces to Smith normal forms.

pub mod words;
pub mod zlinalg;
pub mod complexes;
pub mod xmod;
pub mod classify2d;
pub mod cohomology;
pub mod dim3;
