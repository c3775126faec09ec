use std::io::{Read, Write};

use super::{FeatureError, FeatureVector, FEATURE_CODES, N_FEATURES};

/// `%.9g`-style formatting: nine significant digits, trailing zeros
/// dropped, exponent form below 1e-4 and from 1e9 up.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn header() -> Vec<&'static str> {
    std::iter::once("article_id").chain(FEATURE_CODES).collect()
}

pub fn write_features<W: Write>(out: W, vectors: &[FeatureVector]) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for v in vectors {
        let mut row = vec![v.article_id.clone()];
        row.extend(v.values.iter().map(|&x| format_sig(x)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features<R: Read>(input: R) -> Result<Vec<FeatureVector>, FeatureError> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header() {
        return Err(FeatureError::Table(format!(
            "expected header `{}`, found `{}`",
            header().join(","),
            found.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let mut values = [0.0; N_FEATURES];
        for (slot, field) in values.iter_mut().zip(record.iter().skip(1)) {
            *slot = field
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| FeatureError::Table(format!("line {line}: bad value `{field}`")))?;
        }
        out.push(FeatureVector {
            article_id: record[0].to_string(),
            values,
        });
    }
    Ok(out)
}
