//! On-disk model format.
//!
//! Every file is a UTF-8 JSON object with `"schema_version"` and `"kind"`.
//! Probabilities are decimal strings parsed at full binary precision;
//! matrices are row-major lists of rows; words are little-endian mixed-radix
//! integer ids.
//!
//! Kinds: `avwc_family`, `gavwc`, `v_theta` (generator shorthand expanding
//! to a GAVWC with identity main), `code`, `system` (a code plus a model),
//! and `report` (accepted by validation only).

use std::path::Path;

use semsec_core::counterexample::{v_theta_channel, ThetaSubset};
use semsec_core::{AvwcFamily, Channel, GavwcInstance, ModelError, RandomEncoderCode, StatePair};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1.0";
pub const SUPPORTED_MAJOR: u64 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("missing or malformed schema_version")]
    MissingVersion,
    #[error("schema_version {found} is newer than supported major {SUPPORTED_MAJOR}")]
    UnsupportedVersion { found: String },
    #[error("field `{path}`: `{value}` is not a decimal probability")]
    Number { path: String, value: String },
    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: ModelError,
    },
}

fn model_err(context: impl Into<String>) -> impl FnOnce(ModelError) -> FormatError {
    let context = context.into();
    move |source| FormatError::Model { context, source }
}

type Matrix = Vec<Vec<String>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    main: Matrix,
    wiretap: Matrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeDoc {
    /// Stochastic encoder rows, one per message.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    encoder: Option<Matrix>,
    /// Deterministic shorthand: the word id sent for each message.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    words: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_size: Option<usize>,
    decoder: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Body {
    AvwcFamily {
        states: Vec<StateDoc>,
    },
    Gavwc {
        block_length: usize,
        mains: Vec<Matrix>,
        wiretaps: Vec<Matrix>,
    },
    VTheta {
        n: usize,
        thetas: Vec<Vec<usize>>,
    },
    Code(CodeDoc),
    System {
        code: CodeDoc,
        model: Box<Body>,
    },
}

#[derive(Debug, Clone, Serialize)]
struct Document {
    schema_version: String,
    #[serde(flatten)]
    body: Body,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyPayload {
    states: Vec<StateDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GavwcPayload {
    block_length: usize,
    mains: Vec<Matrix>,
    wiretaps: Vec<Matrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VThetaPayload {
    n: usize,
    thetas: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemPayload {
    code: CodeDoc,
    model: serde_json::Value,
}

enum Parsed {
    Body(Body),
    Report(serde_json::Map<String, serde_json::Value>),
}

fn payload<T: serde::de::DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T, FormatError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        FormatError::Field {
            path: if inner == "." { prefix.trim_end_matches('.').to_owned() } else { format!("{prefix}{inner}") },
            message: e.inner().to_string(),
        }
    })
}

/// Dispatches on `kind` so that field paths survive into diagnostics.
fn parse_body(value: serde_json::Value, prefix: &str) -> Result<Parsed, FormatError> {
    let serde_json::Value::Object(mut map) = value else {
        return Err(FormatError::Field {
            path: prefix.trim_end_matches('.').to_owned(),
            message: "expected an object".into(),
        });
    };
    map.remove("schema_version");
    let kind = match map.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        _ => {
            return Err(FormatError::Field {
                path: format!("{prefix}kind"),
                message: "missing or not a string".into(),
            })
        }
    };
    let rest = serde_json::Value::Object(map);
    let body = match kind.as_str() {
        "avwc_family" => Body::AvwcFamily {
            states: payload::<FamilyPayload>(rest, prefix)?.states,
        },
        "gavwc" => {
            let g: GavwcPayload = payload(rest, prefix)?;
            Body::Gavwc {
                block_length: g.block_length,
                mains: g.mains,
                wiretaps: g.wiretaps,
            }
        }
        "v_theta" => {
            let v: VThetaPayload = payload(rest, prefix)?;
            Body::VTheta { n: v.n, thetas: v.thetas }
        }
        "code" => Body::Code(payload(rest, prefix)?),
        "system" => {
            let s: SystemPayload = payload(rest, prefix)?;
            let model = match parse_body(s.model, &format!("{prefix}model."))? {
                Parsed::Body(b) => b,
                Parsed::Report(_) => {
                    return Err(FormatError::Field {
                        path: format!("{prefix}model.kind"),
                        message: "expected a model kind".into(),
                    })
                }
            };
            Body::System {
                code: s.code,
                model: Box::new(model),
            }
        }
        "report" => {
            let serde_json::Value::Object(map) = rest else { unreachable!() };
            return Ok(Parsed::Report(map));
        }
        other => {
            return Err(FormatError::Field {
                path: format!("{prefix}kind"),
                message: format!("unknown kind `{other}`"),
            })
        }
    };
    Ok(Parsed::Body(body))
}

/// A wiretap model: per-letter family or explicit per-block instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Family(AvwcFamily),
    Gavwc(GavwcInstance),
}

impl Model {
    /// Main and wiretap channels acting on inputs of `input_size` symbols.
    /// A family whose letter alphabet does not match is expanded over every
    /// state sequence of the matching block length.
    pub fn channels_for(&self, input_size: usize) -> Result<(Vec<Channel>, Vec<Channel>), ModelError> {
        match self {
            Model::Gavwc(g) => {
                let x = g.mains()[0].input_size();
                if x != input_size {
                    return Err(ModelError::invalid(format!("code uses {input_size} inputs, model has {x}")));
                }
                Ok((g.mains().to_vec(), g.wiretaps().to_vec()))
            }
            Model::Family(f) => {
                let n = block_length_for(f.input_size(), input_size).ok_or_else(|| {
                    ModelError::invalid(format!(
                        "code uses {input_size} inputs, not a power of the family's {}",
                        f.input_size()
                    ))
                })?;
                let g = f.to_gavwc(n)?;
                Ok((g.mains().to_vec(), g.wiretaps().to_vec()))
            }
        }
    }

    pub fn block_length(&self, input_size: usize) -> Option<usize> {
        match self {
            Model::Gavwc(g) => Some(g.block_length()),
            Model::Family(f) => block_length_for(f.input_size(), input_size),
        }
    }
}

fn block_length_for(letter: usize, input_size: usize) -> Option<usize> {
    if letter < 2 {
        return (input_size == letter).then_some(1);
    }
    let (mut size, mut n) = (letter, 1);
    while size < input_size {
        size = size.checked_mul(letter)?;
        n += 1;
    }
    (size == input_size).then_some(n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Model(Model),
    Code(RandomEncoderCode),
    System { code: RandomEncoderCode, model: Model },
    Report(serde_json::Map<String, serde_json::Value>),
}

fn parse_matrix(m: &Matrix, path: &str) -> Result<Channel, FormatError> {
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| {
                    s.trim().parse::<f64>().map_err(|_| FormatError::Number {
                        path: format!("{path}[{i}][{j}]"),
                        value: s.clone(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Channel::new(rows).map_err(|e| model_err(path)(e.into()))
}

/// Shortest decimal that parses back to the same `f64`.
fn render(x: f64) -> String {
    format!("{x}")
}

fn matrix_doc(ch: &Channel) -> Matrix {
    ch.rows().map(|r| r.iter().copied().map(render).collect()).collect()
}

fn code_from_doc(doc: &CodeDoc, path: &str) -> Result<RandomEncoderCode, FormatError> {
    let field = |name: &str, message: &str| FormatError::Field {
        path: format!("{path}{name}"),
        message: message.to_owned(),
    };
    match (&doc.encoder, &doc.words) {
        (Some(m), None) => {
            if doc.input_size.is_some() {
                return Err(field("input_size", "only allowed together with `words`"));
            }
            let enc = parse_matrix(m, &format!("{path}encoder"))?;
            RandomEncoderCode::new(enc, doc.decoder.clone()).map_err(model_err(format!("{path}decoder")))
        }
        (None, Some(words)) => {
            let x = doc.input_size.ok_or_else(|| field("input_size", "required with `words`"))?;
            RandomEncoderCode::deterministic(words, x, doc.decoder.clone()).map_err(model_err(format!("{path}words")))
        }
        _ => Err(field("encoder", "give exactly one of `encoder` and `words`")),
    }
}

/// Word ids when every encoder row is a point mass.
fn deterministic_words(code: &RandomEncoderCode) -> Option<Vec<usize>> {
    code.encoder()
        .rows()
        .map(|r| {
            let w = r.iter().position(|&p| p == 1.0)?;
            r.iter().enumerate().all(|(i, &p)| i == w || p == 0.0).then_some(w)
        })
        .collect()
}

fn code_doc(code: &RandomEncoderCode) -> CodeDoc {
    match deterministic_words(code) {
        Some(words) => CodeDoc {
            encoder: None,
            words: Some(words),
            input_size: Some(code.input_size()),
            decoder: code.decoder().to_vec(),
        },
        None => CodeDoc {
            encoder: Some(matrix_doc(code.encoder())),
            words: None,
            input_size: None,
            decoder: code.decoder().to_vec(),
        },
    }
}

fn model_from_body(body: &Body, path: &str) -> Result<Model, FormatError> {
    match body {
        Body::AvwcFamily { states } => {
            let pairs = states
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Ok(StatePair {
                        main: parse_matrix(&s.main, &format!("{path}states[{i}].main"))?,
                        wiretap: parse_matrix(&s.wiretap, &format!("{path}states[{i}].wiretap"))?,
                    })
                })
                .collect::<Result<Vec<_>, FormatError>>()?;
            Ok(Model::Family(
                AvwcFamily::new(pairs).map_err(model_err(format!("{path}states")))?,
            ))
        }
        Body::Gavwc {
            block_length,
            mains,
            wiretaps,
        } => {
            let parse_all = |list: &[Matrix], name: &str| {
                list.iter()
                    .enumerate()
                    .map(|(i, m)| parse_matrix(m, &format!("{path}{name}[{i}]")))
                    .collect::<Result<Vec<_>, FormatError>>()
            };
            let g = GavwcInstance::new(*block_length, parse_all(mains, "mains")?, parse_all(wiretaps, "wiretaps")?)
                .map_err(model_err(format!("{path}gavwc")))?;
            Ok(Model::Gavwc(g))
        }
        Body::VTheta { n, thetas } => Ok(Model::Gavwc(
            v_theta_instance(*n, thetas).map_err(model_err(format!("{path}thetas")))?,
        )),
        _ => Err(FormatError::Field {
            path: format!("{path}kind"),
            message: "expected a model kind (avwc_family, gavwc, v_theta)".into(),
        }),
    }
}

/// Noiseless main channel over `2^n` words with one `V_Θ` wiretap per subset.
pub fn v_theta_instance(n: usize, thetas: &[Vec<usize>]) -> Result<GavwcInstance, ModelError> {
    let wiretaps = thetas
        .iter()
        .map(|t| v_theta_channel(&ThetaSubset::new(n, t.iter().copied())?))
        .collect::<Result<Vec<_>, _>>()?;
    GavwcInstance::new(n, vec![Channel::identity(1 << n)?], wiretaps)
}

fn check_version(value: &serde_json::Value) -> Result<(), FormatError> {
    let v = value
        .get("schema_version")
        .and_then(|v| v.as_str())
        .ok_or(FormatError::MissingVersion)?;
    let major: u64 = v
        .split('.')
        .next()
        .and_then(|m| m.parse().ok())
        .ok_or(FormatError::MissingVersion)?;
    if major > SUPPORTED_MAJOR {
        return Err(FormatError::UnsupportedVersion { found: v.to_owned() });
    }
    Ok(())
}

pub fn load_str(text: &str) -> Result<Loaded, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    check_version(&value)?;
    let body = match parse_body(value, "")? {
        Parsed::Report(rest) => return Ok(Loaded::Report(rest)),
        Parsed::Body(b) => b,
    };
    match &body {
        Body::Code(c) => Ok(Loaded::Code(code_from_doc(c, "")?)),
        Body::System { code, model } => Ok(Loaded::System {
            code: code_from_doc(code, "code.")?,
            model: model_from_body(model, "model.")?,
        }),
        body => Ok(Loaded::Model(model_from_body(body, "")?)),
    }
}

pub fn load_path(path: &Path) -> Result<Loaded, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_str(&text)
}

pub fn load_family(path: &Path) -> Result<Model, FormatError> {
    match load_path(path)? {
        Loaded::Model(m) => Ok(m),
        _ => Err(FormatError::Field {
            path: "kind".into(),
            message: "expected a model file".into(),
        }),
    }
}

fn model_body(model: &Model) -> Body {
    match model {
        Model::Family(f) => Body::AvwcFamily {
            states: f
                .states()
                .iter()
                .map(|s| StateDoc {
                    main: matrix_doc(&s.main),
                    wiretap: matrix_doc(&s.wiretap),
                })
                .collect(),
        },
        Model::Gavwc(g) => Body::Gavwc {
            block_length: g.block_length(),
            mains: g.mains().iter().map(matrix_doc).collect(),
            wiretaps: g.wiretaps().iter().map(matrix_doc).collect(),
        },
    }
}

fn render_doc(body: Body) -> String {
    let doc = Document {
        schema_version: SCHEMA_VERSION.to_owned(),
        body,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn save_model(model: &Model) -> String {
    render_doc(model_body(model))
}

pub fn save_code(code: &RandomEncoderCode) -> String {
    render_doc(Body::Code(code_doc(code)))
}

/// A system whose model is written in the `v_theta` shorthand.
pub fn save_v_theta_system(code: &RandomEncoderCode, n: usize, thetas: &[Vec<usize>]) -> String {
    render_doc(Body::System {
        code: code_doc(code),
        model: Box::new(Body::VTheta {
            n,
            thetas: thetas.to_vec(),
        }),
    })
}

pub fn save_v_theta(n: usize, thetas: &[Vec<usize>]) -> String {
    render_doc(Body::VTheta {
        n,
        thetas: thetas.to_vec(),
    })
}

pub fn save_system(code: &RandomEncoderCode, model: &Model) -> String {
    render_doc(Body::System {
        code: code_doc(code),
        model: Box::new(model_body(model)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_length_detection() {
        assert_eq!(block_length_for(2, 8), Some(3));
        assert_eq!(block_length_for(3, 3), Some(1));
        assert_eq!(block_length_for(2, 6), None);
    }

    #[test]
    fn decimal_rendering_round_trips() {
        for x in [0.1, 1.0 / 3.0, 0.0, 1.0, 2f64.powi(-40)] {
            assert_eq!(render(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn version_gate() {
        let future = r#"{"schema_version": "2.0", "kind": "code", "encoder": [["1"]], "decoder": [0]}"#;
        assert!(matches!(load_str(future), Err(FormatError::UnsupportedVersion { .. })));
        let minor = r#"{"schema_version": "1.7", "kind": "code", "encoder": [["1"]], "decoder": [0]}"#;
        assert!(matches!(load_str(minor), Ok(Loaded::Code(_))));
        assert!(matches!(load_str(r#"{"kind": "code"}"#), Err(FormatError::MissingVersion)));
    }
}
