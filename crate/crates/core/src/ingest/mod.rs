//! Parsing, sign handling, bundling and export of exposure data.

mod bundle;
mod export;
mod records;

pub use bundle::{build_bundle, build_panel, periods, NetworkBundle};
pub use export::{capitals_csv, export_network, exposures_csv, ExportFormat};
pub use records::{
    apply_sign_policy, parse_capitals, parse_date, parse_exposures, parse_factors, CapitalRecord, ExposureRecord,
    FactorObservation,
};
