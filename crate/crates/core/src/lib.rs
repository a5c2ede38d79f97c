//! Core library of the English-Livonian translation toolkit: dense linear
//! algebra, cross-lingual embedding alignment, corpus filtering and sampling,
//! BLEU evaluation, pivot synthesis and output post-processing.

pub mod cmea;
pub mod corpus;
pub mod embed;
pub mod eval;
pub mod matrix;
pub mod pivot;
pub mod postproc;
pub mod translate;
