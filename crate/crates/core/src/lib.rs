pub mod calculus;
pub mod corpus;
pub mod definability;
pub mod generate;
pub mod kripke;
pub mod matrix;
pub mod parser;
pub mod quasi;
pub mod syntax;
