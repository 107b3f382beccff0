//! Template-based automated program repair over MiniJ, a small Java-like
//! language.

pub mod ast;
pub mod catalog;
pub mod donor;
pub mod driver;
pub mod fl;
pub mod harness;
pub mod lang;
pub mod site;
