//! Result records and their CSV / JSON encodings.

use std::io::Write;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(i64::from(x))
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Str(x.to_owned())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Null, Into::into)
    }
}

pub type Fields = Vec<(String, Value)>;

/// One result: echoed inputs, named outputs and run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub command: String,
    pub inputs: Fields,
    pub outputs: Fields,
    pub meta: Fields,
}

impl Record {
    pub fn new(command: &str, inputs: Fields) -> Self {
        Self {
            command: command.to_owned(),
            inputs,
            outputs: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn out(mut self, name: impl Into<String>, v: impl Into<Value>) -> Self {
        self.outputs.push((name.into(), v.into()));
        self
    }

    pub fn meta(mut self, name: impl Into<String>, v: impl Into<Value>) -> Self {
        self.meta.push((name.into(), v.into()));
        self
    }

    fn columns(&self) -> Vec<&str> {
        std::iter::once("command")
            .chain(self.inputs.iter().map(|(k, _)| k.as_str()))
            .chain(self.outputs.iter().map(|(k, _)| k.as_str()))
            .chain(self.meta.iter().map(|(k, _)| k.as_str()))
            .collect()
    }
}

/// C-style `%.{prec}g`: `prec` significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 ≤ |x| < 10^prec`.
pub fn format_g(x: f64, prec: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", prec - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("`e` formatting has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= prec as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (prec as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

const JSON_DIGITS: usize = 17;
const CSV_DIGITS: usize = 12;

fn json_value(v: &Value) -> String {
    match v {
        Value::Float(x) if x.is_finite() => format_g(*x, JSON_DIGITS),
        Value::Float(x) => serde_json::to_string(&format_g(*x, JSON_DIGITS)).expect("string"),
        Value::Int(i) => i.to_string(),
        Value::Str(s) => serde_json::to_string(s).expect("string"),
        Value::Bool(b) => b.to_string(),
        Value::Null => "null".into(),
    }
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Float(x) => format_g(*x, CSV_DIGITS),
        Value::Int(i) => i.to_string(),
        Value::Str(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
    }
}

fn json_object(fields: &Fields) -> String {
    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).expect("string"), json_value(v)))
        .collect();
    format!("{{{}}}", body.join(","))
}

/// One JSON object, no trailing newline.
pub fn to_json(r: &Record) -> String {
    format!(
        "{{\"command\":{},\"inputs\":{},\"outputs\":{},\"meta\":{}}}",
        serde_json::to_string(&r.command).expect("string"),
        json_object(&r.inputs),
        json_object(&r.outputs),
        json_object(&r.meta)
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Streams records; CSV gets a header row from the first record.
pub struct RecordSink {
    format: Format,
    csv: Option<csv::Writer<Box<dyn Write>>>,
    json: Option<Box<dyn Write>>,
    header: Option<Vec<String>>,
}

impl RecordSink {
    pub fn new(format: Format, out: Box<dyn Write>) -> Self {
        match format {
            Format::Csv => Self {
                format,
                csv: Some(csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out)),
                json: None,
                header: None,
            },
            Format::Json => Self {
                format,
                csv: None,
                json: Some(out),
                header: None,
            },
        }
    }

    pub fn write(&mut self, r: &Record) -> Result<(), CliError> {
        match self.format {
            Format::Json => {
                let out = self.json.as_mut().expect("json sink");
                writeln!(out, "{}", to_json(r))?;
            }
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv sink");
                let cols: Vec<String> = r.columns().into_iter().map(str::to_owned).collect();
                match &self.header {
                    None => {
                        w.write_record(&cols).map_err(csv_io)?;
                        self.header = Some(cols);
                    }
                    Some(h) if *h != cols => {
                        return Err(CliError::Validation(format!(
                            "record columns changed mid-stream: {cols:?} vs {h:?}"
                        )))
                    }
                    Some(_) => {}
                }
                let row = std::iter::once(r.command.clone())
                    .chain(r.inputs.iter().map(|(_, v)| csv_value(v)))
                    .chain(r.outputs.iter().map(|(_, v)| csv_value(v)))
                    .chain(r.meta.iter().map(|(_, v)| csv_value(v)));
                w.write_record(row).map_err(csv_io)?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        if let Some(mut w) = self.csv.take() {
            w.flush()?;
        }
        if let Some(mut w) = self.json.take() {
            w.flush()?;
        }
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn format_g_matches_c_printf() {
        let cases = [
            (0.1, 17, "0.10000000000000001"),
            (0.5, 17, "0.5"),
            (55.0 / 105.0, 12, "0.52380952381"),
            (100.0, 12, "100"),
            (1e-5, 12, "1e-05"),
            (1.5e20, 17, "1.5e+20"),
            (-0.0465200, 6, "-0.04652"),
            (123456.0, 6, "123456"),
            (1234567.0, 6, "1.23457e+06"),
            (9.9999999, 3, "10"),
            (0.0001, 12, "0.0001"),
        ];
        for (x, p, want) in cases {
            assert_eq!(format_g(x, p), want, "{x} at {p}");
        }
        assert_eq!(format_g(f64::INFINITY, 17), "inf");
        assert_eq!(format_g(f64::NEG_INFINITY, 12), "-inf");
    }

    #[test]
    fn json_record_shape() {
        let r = Record::new("actinfo.single-draw", vec![("N".into(), 100u32.into()), ("base".into(), "nats".into())])
            .out("active_nats", 0.25)
            .out("closed_form_nats", Value::Null)
            .meta("version", "0.1.0");
        let s = to_json(&r);
        assert_eq!(
            s,
            r#"{"command":"actinfo.single-draw","inputs":{"N":100,"base":"nats"},"outputs":{"active_nats":0.25,"closed_form_nats":null},"meta":{"version":"0.1.0"}}"#
        );
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["outputs"]["active_nats"], 0.25);
        let r = Record::new("x", vec![]).out("v", f64::NEG_INFINITY);
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(v["outputs"]["v"], "-inf");
    }

    #[test]
    fn csv_quotes_and_rejects_column_drift() {
        let buf = std::sync::Arc::new(std::sync::Mutex::new(Vec::<u8>::new()));
        struct Shared(std::sync::Arc<std::sync::Mutex<Vec<u8>>>);
        impl Write for Shared {
            fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
                self.0.lock().unwrap().write(b)
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        let mut sink = RecordSink::new(Format::Csv, Box::new(Shared(buf.clone())));
        let r = Record::new("a", vec![("note".into(), "x,y".into())]).out("v", 1.0 / 3.0);
        sink.write(&r).unwrap();
        sink.write(&r).unwrap();
        let bad = Record::new("a", vec![]).out("w", 1.0);
        assert!(sink.write(&bad).is_err());
        sink.finish().unwrap();
        let text = String::from_utf8(buf.lock().unwrap().clone()).unwrap();
        assert_eq!(text, "command,note,v\r\na,\"x,y\",0.333333333333\r\na,\"x,y\",0.333333333333\r\n");
    }

    proptest! {
        #[test]
        fn json_numbers_round_trip_bit_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let s = format_g(x, JSON_DIGITS);
            let back: f64 = serde_json::from_str::<serde_json::Value>(&s).unwrap().as_f64().unwrap();
            prop_assert_eq!(back.to_bits(), if x == 0.0 { back.to_bits() } else { x.to_bits() });
            let parsed: f64 = s.parse().unwrap();
            prop_assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }
}
