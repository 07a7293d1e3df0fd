pub mod exactla;
pub mod koszul;
pub mod curve;
pub mod limitmhs;
pub mod corpus;
pub mod motive;
pub mod selfcheck;
pub mod cli;
