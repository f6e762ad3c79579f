//! Report structures and deterministic CSV/JSON rendering.
//!
//! Numbers are printed with 12 significant digits (printf `%.12g` style), so
//! repeated runs with identical inputs produce byte-identical files. JSON
//! objects use sorted keys; the timestamp honours `SOURCE_DATE_EPOCH` when
//! set.

use crate::synthesis::SynthesisResult;
use serde_json::{json, Map, Value};

/// Render with `sig` significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (_, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= sig as i32 {
        let (mant, _) = sci.split_once('e').expect("exponent marker");
        format!("{}e{}", trim_zeros(mant), exp)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Fixed output precision of the tool.
pub fn fmt12(x: f64) -> String {
    fmt_sig(x, 12)
}

/// The same value rounded through the 12-digit representation, for JSON
/// number fields.
pub fn round12(x: f64) -> f64 {
    fmt12(x).parse().unwrap_or(x)
}

fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` wins when set so runs
/// can be made byte-reproducible.
pub fn timestamp_unix() -> u64 {
    if let Ok(s) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(t) = s.trim().parse::<u64>() {
            return t;
        }
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn metadata() -> Value {
    let mut m = Map::new();
    m.insert(
        "version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    m.insert("timestamp_unix".into(), Value::from(timestamp_unix()));
    m.insert("tolerance".into(), json_num(1e-9));
    Value::Object(m)
}

/// One Bob's line of a simulation report.
#[derive(Debug, Clone)]
pub struct SimulationRow {
    pub index: usize,
    pub chsh_closed_form: f64,
    pub chsh_bruteforce: Option<f64>,
    pub violated: bool,
}

impl SimulationRow {
    pub fn abs_diff(&self) -> Option<f64> {
        self.chsh_bruteforce
            .map(|b| (self.chsh_closed_form - b).abs())
    }
}

/// Full simulation report: configuration echo plus per-Bob rows.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scheme: String,
    pub k: usize,
    pub delta: f64,
    pub theta: f64,
    pub v: f64,
    pub alphas: Vec<f64>,
    pub rows: Vec<SimulationRow>,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let oracle = self.rows.iter().any(|r| r.chsh_bruteforce.is_some());
        let mut out = String::new();
        if oracle {
            out.push_str("index,chsh_closed_form,chsh_bruteforce,abs_diff,violated\r\n");
        } else {
            out.push_str("index,chsh_closed_form,violated\r\n");
        }
        for r in &self.rows {
            if oracle {
                out.push_str(&format!(
                    "{},{},{},{},{}\r\n",
                    r.index,
                    fmt12(r.chsh_closed_form),
                    fmt12(r.chsh_bruteforce.unwrap_or(f64::NAN)),
                    fmt12(r.abs_diff().unwrap_or(f64::NAN)),
                    r.violated
                ));
            } else {
                out.push_str(&format!(
                    "{},{},{}\r\n",
                    r.index,
                    fmt12(r.chsh_closed_form),
                    r.violated
                ));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("index".into(), Value::from(r.index));
                m.insert("chsh_closed_form".into(), json_num(r.chsh_closed_form));
                if let Some(b) = r.chsh_bruteforce {
                    m.insert("chsh_bruteforce".into(), json_num(b));
                    m.insert("abs_diff".into(), json_num(r.abs_diff().unwrap()));
                }
                m.insert("violated".into(), Value::Bool(r.violated));
                Value::Object(m)
            })
            .collect();
        json!({
            "config": {
                "scheme": self.scheme,
                "k": self.k,
                "delta": json_num(self.delta),
                "theta": json_num(self.theta),
                "v": json_num(self.v),
                "alphas": self.alphas.iter().map(|&a| json_num(a)).collect::<Vec<_>>(),
            },
            "metadata": metadata(),
            "rows": rows,
        })
    }
}

/// CSV rendering of a synthesis result: one line per computed sequence term.
pub fn synthesis_to_csv(r: &SynthesisResult) -> String {
    let mut out = String::from("index,s,chsh,margin,violated\r\n");
    for (i, &s) in r.sequence.iter().enumerate() {
        let (chsh, margin, violated) = match (r.per_bob_chsh.get(i), r.per_bob_margin.get(i)) {
            (Some(&c), Some(&m)) => (fmt12(c), fmt12(m), (m > 0.0).to_string()),
            _ => (String::new(), String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\r\n",
            i + 1,
            fmt12(s),
            chsh,
            margin,
            violated
        ));
    }
    out
}

pub fn synthesis_to_json(r: &SynthesisResult) -> Value {
    json!({
        "config": {
            "theorem": r.theorem.name(),
            "k": r.k,
            "delta": json_num(r.delta),
            "theta": json_num(r.theta),
            "v": json_num(r.v),
            "epsilon": json_num(r.epsilon),
        },
        "concurrence": json_num(r.concurrence),
        "feasible": r.feasible,
        "infeasible_at": r.infeasible_at,
        "infeasible_reason": r.infeasible_reason,
        "metadata": metadata(),
        "per_bob_chsh": r.per_bob_chsh.iter().map(|&x| json_num(x)).collect::<Vec<_>>(),
        "per_bob_margin": r.per_bob_margin.iter().map(|&x| json_num(x)).collect::<Vec<_>>(),
        "sequence": r.sequence.iter().map(|&x| json_num(x)).collect::<Vec<_>>(),
    })
}

/// One point of a trade-off curve table.
#[derive(Debug, Clone)]
pub struct TradeoffRow {
    pub curve: &'static str,
    pub anticomm: f64,
    pub eta_critical: f64,
}

pub fn tradeoff_to_csv(rows: &[TradeoffRow]) -> String {
    let mut out = String::from("curve,anticomm,eta_critical\r\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\r\n",
            r.curve,
            fmt12(r.anticomm),
            fmt12(r.eta_critical)
        ));
    }
    out
}

pub fn tradeoff_to_json(rows: &[TradeoffRow]) -> Value {
    json!({
        "metadata": metadata(),
        "rows": rows
            .iter()
            .map(|r| {
                json!({
                    "curve": r.curve,
                    "anticomm": json_num(r.anticomm),
                    "eta_critical": json_num(r.eta_critical),
                })
            })
            .collect::<Vec<_>>(),
    })
}
