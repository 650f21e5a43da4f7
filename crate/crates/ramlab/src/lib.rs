//! Exact finite-precision machinery for valuation theory over concrete
//! valued-field models: ordered value groups and the delta/Delta value
//! calculus, series and p-adic field arithmetic with pessimistic precision
//! tracking, one-unit p-th-power-class manipulation, approximation-type
//! streams, Artin-Schreier and Kummer normal forms with re-verifiable
//! witnesses, and ramification/defect invariants of finite extensions.

pub mod ordval;
pub mod fq;
pub mod fieldcore;
pub mod poly;
pub mod approx;
pub mod asnf;
pub mod kummer;
pub mod extcheck;
pub mod parse;
pub mod report;
pub mod suites;
pub mod cli;
