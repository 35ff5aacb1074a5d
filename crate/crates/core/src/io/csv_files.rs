use std::io::{Read, Write};

use num_complex::Complex;

use crate::boundary::{BoundaryCurve, CurveSample, DensityField};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectra::Spectrum;

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line, message: format!("{other:?}") },
    }
}

fn write_rows<W: Write, const N: usize>(
    w: W,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Rows of `N` numbers under the exact `header`.
fn read_rows<T: Scalar, const N: usize>(r: impl Read, header: [&str; N]) -> Result<Vec<[T; N]>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let found = rdr.headers().map_err(csv_err)?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}, found {}", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != N {
            return Err(Error::Parse { line, message: format!("expected {N} fields, found {}", rec.len()) });
        }
        let mut row = [T::zero(); N];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse number from {field:?}"),
            })?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_spectrum_csv<T: Scalar>(s: &Spectrum<T>, w: impl Write) -> Result<()> {
    write_rows(w, ["re", "im"], s.eigenvalues.iter().map(|z| [z.re.to_string(), z.im.to_string()]))
}

pub fn read_spectrum_csv<T: Scalar>(r: impl Read) -> Result<Vec<Complex<T>>> {
    Ok(read_rows::<T, 2>(r, ["re", "im"])?.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
}

pub fn write_curve_csv<T: Scalar>(c: &BoundaryCurve<T>, w: impl Write) -> Result<()> {
    write_rows(
        w,
        ["phi", "re", "im"],
        c.samples.iter().map(|s| [s.phi.to_string(), s.z.re.to_string(), s.z.im.to_string()]),
    )
}

pub fn read_curve_csv<T: Scalar>(r: impl Read) -> Result<Vec<CurveSample<T>>> {
    Ok(read_rows::<T, 3>(r, ["phi", "re", "im"])?
        .into_iter()
        .map(|[phi, re, im]| CurveSample { phi, z: Complex::new(re, im) })
        .collect())
}

pub fn write_density_csv<T: Scalar>(f: &DensityField<T>, w: impl Write) -> Result<()> {
    write_rows(
        w,
        ["re", "im", "mu"],
        f.points.iter().map(|p| [p.z.re.to_string(), p.z.im.to_string(), p.mu.to_string()]),
    )
}

pub fn read_density_csv<T: Scalar>(r: impl Read) -> Result<Vec<(Complex<T>, T)>> {
    Ok(read_rows::<T, 3>(r, ["re", "im", "mu"])?
        .into_iter()
        .map(|[re, im, mu]| (Complex::new(re, im), mu))
        .collect())
}
