//! Shared front-end plumbing for the qsym command-line tool and the Python
//! bindings: circuit/channel file schemas, observable specs, and JSON
//! output shapes.

pub mod errors;
pub mod observable;
pub mod output;
pub mod schema;
