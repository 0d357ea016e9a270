//! On-disk formats: MQlib-style instance files and the instance catalog.

pub mod catalog;
pub mod instance;

pub use catalog::{load_catalog, Catalog, CatalogEntry, CatalogError};
pub use instance::{parse_instance, parse_instance_str, write_instance, InstanceFormat, ParseError};
