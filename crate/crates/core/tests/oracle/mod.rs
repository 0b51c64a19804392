//! Reference implementations shared by the integration and acceptance tests.
//! Nothing here calls into the algorithm under test.
#![allow(dead_code)]

pub mod router;
pub mod gen;
pub mod retrieval;
pub mod session;
pub mod surgery;
