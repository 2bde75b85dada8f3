//! JSON output with 17 significant digits per number.

use std::io;

use curvjet_core::{MetricAtPoint, Tensor, Variance};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

/// Pretty printer that writes every float as `{:.16e}`. Non-finite floats
/// never reach it: serde_json turns them into `null`.
struct Precise<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for Precise<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, Precise(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// `f64` that serializes as `null` when not finite.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

fn variance_name(v: Variance) -> &'static str {
    match v {
        Variance::Co => "co",
        Variance::Contra => "contra",
    }
}

/// `{dimension, variance, components}` with `components` nested one array
/// level per slot (a bare number for rank 0).
pub fn tensor(t: &Tensor) -> Value {
    fn nest(data: &[f64], dim: usize, rank: usize) -> Value {
        if rank == 0 {
            return number(data[0]);
        }
        let stride = data.len() / dim;
        Value::Array((0..dim).map(|i| nest(&data[i * stride..(i + 1) * stride], dim, rank - 1)).collect())
    }
    json!({
        "dimension": t.dim(),
        "variance": t.variance().iter().map(|v| variance_name(*v)).collect::<Vec<_>>(),
        "components": nest(t.data(), t.dim(), t.rank()),
    })
}

pub fn metric(m: &MetricAtPoint) -> Value {
    json!({
        "signature": m.signature().name(),
        "g": tensor(m.g()),
        "g_inv": tensor(m.g_inv()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_and_null() {
        let s = to_string(&json!({"a": 0.1, "b": f64::NAN, "c": [1.0, -2.5e-300]}));
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("null"));
        assert!(s.contains("-2.5000000000000000e-300"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn tensor_nesting() {
        let t = Tensor::from_fn(2, vec![Variance::Co, Variance::Contra], |i| (10 * i[0] + i[1]) as f64);
        let v = tensor(&t);
        assert_eq!(v["components"][1][0].as_f64(), Some(10.0));
        assert_eq!(v["variance"], json!(["co", "contra"]));
        assert_eq!(tensor(&Tensor::scalar(3.0))["components"].as_f64(), Some(3.0));
    }
}
