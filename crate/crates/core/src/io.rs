//! Point-cloud CSV: a header `x1,…,xd` with an optional trailing `y`, one
//! row per sample, numbers written with 17 significant digits so they read
//! back bit for bit.

use crate::error::{invalid, Error, Result};
use crate::geometry::PointCloud;
use crate::kernels::LabeledSample;

fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(sample: &LabeledSample) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let d = sample.dim();
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    if sample.responses.is_some() {
        header.push("y".into());
    }
    w.write_record(&header).map_err(csv_error)?;
    let mut row = Vec::with_capacity(d + 1);
    for (i, p) in sample.points.iter().enumerate() {
        row.clear();
        row.extend(p.iter().map(|&x| fmt_value(x)));
        if let Some(ys) = &sample.responses {
            row.push(fmt_value(ys[i]));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Reads a sample. Responses come from a final `y` column; `y_max` is left
/// unset.
pub fn read_csv(text: &[u8]) -> Result<LabeledSample> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text);
    let header = r.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = header.iter().collect();
    let has_y = names.last() == Some(&"y");
    let d = names.len() - usize::from(has_y);
    if d == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "header names no coordinate columns".into(),
        });
    }
    for (i, name) in names[..d].iter().enumerate() {
        if *name != format!("x{}", i + 1) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected column `x{}`, found `{name}`", i + 1),
            });
        }
    }
    let mut coords = Vec::new();
    let mut ys = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != names.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", names.len(), rec.len()),
            });
        }
        for (j, field) in rec.iter().enumerate() {
            let x: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{field}` is not a number"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("`{field}` is not finite"),
                });
            }
            if j < d {
                coords.push(x);
            } else {
                ys.push(x);
            }
        }
    }
    if coords.is_empty() {
        return Err(invalid("no data rows"));
    }
    LabeledSample::new(PointCloud::new(d, coords)?, has_y.then_some(ys), None)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, Family, GenSpec};
    use proptest::prelude::*;

    #[test]
    fn header_and_label_column() {
        let s = generate(&GenSpec::new(Family::ThreeRings, 3, 7)).unwrap();
        let text = String::from_utf8(write_csv(&s).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2");
        assert_eq!(lines.len(), 4);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 2));

        let s = generate(&GenSpec::new(Family::AnnulusClassification, 50, 7)).unwrap();
        let text = String::from_utf8(write_csv(&s).unwrap()).unwrap();
        assert!(text.starts_with("x1,x2,y\n"));
        let back = read_csv(text.as_bytes()).unwrap();
        assert!(back
            .responses
            .unwrap()
            .iter()
            .all(|&y| y == 0.0 || y == 1.0));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = read_csv(b"x1,x2\n1,2\n3,oops\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!(matches!(
            read_csv(b"a,b\n1,2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(read_csv(b"x1,x2\n").is_err());
        assert!(matches!(
            read_csv(b"x1\n1\n2,3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(rows in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>()), 1..30), labeled: bool) {
            let rows: Vec<(f64, f64, f64)> = rows.into_iter().filter(|(a, b, c)| a.is_finite() && b.is_finite() && c.is_finite()).collect();
            prop_assume!(!rows.is_empty());
            let coords = rows.iter().flat_map(|r| [r.0, r.1]).collect();
            let ys = labeled.then(|| rows.iter().map(|r| r.2).collect());
            let s = LabeledSample::new(PointCloud::new(2, coords).unwrap(), ys, None).unwrap();
            let back = read_csv(&write_csv(&s).unwrap()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
