//! Graded Betti numbers of points on curves over prime fields.
//!
//! The crate computes Betti diagrams of finite point sets and of curves
//! through Koszul cohomology in a function-space model, compares the last
//! rows of generic diagrams with the predictions of the minimal resolution
//! conjecture, and checks a family of divisor-class and enumerative
//! identities in exact arithmetic.
//!
//! Module overview:
//!
//! * [`ffla`]: prime fields and dense linear algebra.
//! * [`polyring`]: homogeneous forms and monomial bases.
//! * [`curves`]: curve models, rational points, re-embeddings.
//! * [`pointsets`]: Hilbert functions and quotient bases of point sets.
//! * [`koszul`]: Koszul differentials and Betti diagrams.
//! * [`mrc`]: predictions, generic diagrams and verdicts.
//! * [`class_calculus`]: exact class and count identities.
//! * [`cli`]: the `mrclab` command-line front end.

pub mod class_calculus;
pub mod cli;
pub mod curves;
pub mod ffla;
pub mod koszul;
pub mod mrc;
pub mod pointsets;
pub mod polyring;
pub mod seeding;

pub use curves::{CurveModel, CurvePoints, EmbeddedPointSet, HilbertData, ProjectivePointRep};
pub use ffla::{FieldElement, MatrixGF, PrimeModulus};
pub use koszul::{BettiDiagram, FunctionModule};
pub use mrc::{MRCReport, TailPrediction};
