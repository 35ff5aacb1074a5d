//! File formats: Matrix Market for matrices and digraphs, a JSON sidecar for
//! cycle lists, and CSV for spectra, curves and density fields.

mod csv_files;
mod matrix_market;

pub use csv_files::{
    read_curve_csv, read_density_csv, read_spectrum_csv, write_curve_csv, write_density_csv,
    write_spectrum_csv,
};
pub use matrix_market::{
    read_matrix_market, write_matrix_market_dense, write_matrix_market_digraph, CycleSidecar,
    MatrixMarket,
};
