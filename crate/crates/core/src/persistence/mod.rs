//! Persistent homology of super-level filtrations: diagrams, reduction,
//! bottleneck distance and barcodes.

pub mod barcode;
pub mod bottleneck;
pub mod diagram;
pub mod reduce;
pub mod rips;

pub use barcode::{render_barcode, BarcodeFormat};
pub use bottleneck::bottleneck;
pub use diagram::{parse_tsv, write_tsv, Pair, PersistenceDiagram};
pub use reduce::reduce;
pub use rips::filtered_rips_persistence;
