//! Finite algebras over the carrier `0..n`.
//!
//! Operation tables are flat and row-major with the leftmost argument as the
//! most significant digit: for an `m`-ary operation `f` on an `n`-element
//! carrier, `f(a_0, .., a_{m-1})` sits at index `a_0 n^{m-1} + .. + a_{m-1}`.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for every construction that can blow up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest carrier accepted for a parsed input algebra.
    pub max_carrier: usize,
    /// Largest element count of a free algebra (and of closures computed on it).
    pub max_free_elements: usize,
    /// Largest carrier of a materialized power or of a pair space `A^2`.
    pub max_power_carrier: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_carrier: 64,
            max_free_elements: 200_000,
            max_power_carrier: 1_000_000,
        }
    }
}

/// One basic operation of an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<u32>,
}

/// A finite algebra with carrier `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    ops: Vec<Operation>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    name: String,
    size: usize,
    operations: Vec<OperationDoc>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct OperationDoc {
    name: String,
    arity: usize,
    table: Vec<u64>,
}

/// `base^exp`, or `None` on overflow.
pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl FiniteAlgebra {
    /// Builds an algebra, checking every structural invariant.
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAlgebra("carrier must be nonempty".into()));
        }
        let mut seen = HashSet::new();
        for op in &ops {
            if !seen.insert(op.name.as_str()) {
                return Err(Error::DuplicateOperation(op.name.clone()));
            }
            let expected = checked_pow(size, op.arity).ok_or_else(|| {
                Error::InvalidAlgebra(format!("table of `{}` is too large", op.name))
            })?;
            if op.table.len() != expected {
                return Err(Error::TableLength {
                    op: op.name.clone(),
                    arity: op.arity,
                    expected,
                    found: op.table.len(),
                });
            }
            if let Some((index, &value)) = op
                .table
                .iter()
                .enumerate()
                .find(|(_, &v)| v as usize >= size)
            {
                return Err(Error::EntryOutOfRange {
                    op: op.name.clone(),
                    index,
                    value: value as usize,
                    size,
                });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            size,
            ops,
        })
    }

    /// Parses the JSON algebra document with the default caps.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_caps(text, &Caps::default())
    }

    pub fn parse_with_caps(text: &str, caps: &Caps) -> Result<Self> {
        let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| Error::Malformed {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if doc.size > caps.max_carrier {
            return Err(Error::cap("carrier size", caps.max_carrier, doc.size));
        }
        let mut ops = Vec::with_capacity(doc.operations.len());
        for op in doc.operations {
            if let Some((index, &value)) = op
                .table
                .iter()
                .enumerate()
                .find(|(_, &v)| v >= doc.size as u64)
            {
                return Err(Error::EntryOutOfRange {
                    op: op.name,
                    index,
                    value: value as usize,
                    size: doc.size,
                });
            }
            ops.push(Operation {
                name: op.name,
                arity: op.arity,
                table: op.table.into_iter().map(|v| v as u32).collect(),
            });
        }
        Self::new(doc.name, doc.size, ops)
    }

    pub fn from_file(path: impl AsRef<Path>, caps: &Caps) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed {
            line: 0,
            column: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::parse_with_caps(&text, caps)
    }

    /// Serializes back to the interchange document.
    pub fn to_document(&self) -> String {
        let doc = AlgebraDoc {
            name: self.name.clone(),
            size: self.size,
            operations: self
                .ops
                .iter()
                .map(|op| OperationDoc {
                    name: op.name.clone(),
                    arity: op.arity,
                    table: op.table.iter().map(|&v| v as u64).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("algebra documents always serialize")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn operations(&self) -> &[Operation] {
        &self.ops
    }

    pub fn arities(&self) -> Vec<usize> {
        self.ops.iter().map(|op| op.arity).collect()
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|op| op.name == name)
    }

    pub fn op_names(&self) -> Vec<String> {
        self.ops.iter().map(|op| op.name.clone()).collect()
    }

    /// Same operation names and arities in the same order.
    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        self.ops.len() == other.ops.len()
            && self
                .ops
                .iter()
                .zip(&other.ops)
                .all(|(a, b)| a.name == b.name && a.arity == b.arity)
    }

    /// Applies operation `op` to `args`; arguments must be in range.
    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let op = &self.ops[op];
        debug_assert_eq!(op.arity, args.len());
        let mut idx = 0;
        for &a in args {
            idx = idx * self.size + a;
        }
        op.table[idx] as usize
    }

    /// Like [`apply`](Self::apply) with argument validation.
    pub fn apply_checked(&self, op: usize, args: &[usize]) -> Result<usize> {
        let operation = self
            .ops
            .get(op)
            .ok_or_else(|| Error::UnknownOperation(format!("#{op}")))?;
        if operation.arity != args.len() {
            return Err(Error::ArityMismatch {
                op: operation.name.clone(),
                expected: operation.arity,
                found: args.len(),
            });
        }
        if let Some(&bad) = args.iter().find(|&&a| a >= self.size) {
            return Err(Error::ElementOutOfRange {
                element: bad,
                size: self.size,
            });
        }
        Ok(self.apply(op, args))
    }

    /// Materializes `self^k`. Tuple `(t_0, .., t_{k-1})` has flat index
    /// `t_0 n^{k-1} + .. + t_{k-1}` (see [`encode_tuple`](Self::encode_tuple)).
    pub fn product_power(&self, k: usize, caps: &Caps) -> Result<FiniteAlgebra> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "power exponent must be positive".into(),
            ));
        }
        let n = self.size;
        let size = checked_pow(n, k)
            .filter(|&s| s <= caps.max_power_carrier)
            .ok_or_else(|| {
                Error::cap(
                    "power carrier",
                    caps.max_power_carrier,
                    checked_pow(n, k).unwrap_or(usize::MAX),
                )
            })?;
        let mut ops = Vec::with_capacity(self.ops.len());
        for (oi, op) in self.ops.iter().enumerate() {
            let len = checked_pow(size, op.arity)
                .filter(|&l| l <= caps.max_power_carrier)
                .ok_or_else(|| {
                    Error::cap(
                        format!("table of `{}` in power", op.name),
                        caps.max_power_carrier,
                        checked_pow(size, op.arity).unwrap_or(usize::MAX),
                    )
                })?;
            let mut table = Vec::with_capacity(len);
            let mut args = vec![0usize; op.arity];
            let mut coord_args = vec![0usize; op.arity];
            for flat in 0..len {
                let mut rest = flat;
                for slot in (0..op.arity).rev() {
                    args[slot] = rest % size;
                    rest /= size;
                }
                let mut out = 0;
                for c in 0..k {
                    let shift = checked_pow(n, k - 1 - c).unwrap();
                    for (slot, &a) in args.iter().enumerate() {
                        coord_args[slot] = (a / shift) % n;
                    }
                    out = out * n + self.apply(oi, &coord_args);
                }
                table.push(out as u32);
            }
            ops.push(Operation {
                name: op.name.clone(),
                arity: op.arity,
                table,
            });
        }
        FiniteAlgebra::new(format!("{}^{}", self.name, k), size, ops)
    }

    /// Flat index of a tuple in `self^k`.
    pub fn encode_tuple(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &t| acc * self.size + t)
    }

    /// Inverse of [`encode_tuple`](Self::encode_tuple).
    pub fn decode_tuple(&self, mut index: usize, k: usize) -> Vec<usize> {
        let mut out = vec![0; k];
        for slot in (0..k).rev() {
            out[slot] = index % self.size;
            index /= self.size;
        }
        out
    }

    /// Restriction to a subuniverse. Returns the subalgebra (elements
    /// renumbered in increasing order) and its embedding into `self`.
    pub fn subalgebra(&self, universe: &[usize]) -> Result<(FiniteAlgebra, Vec<usize>)> {
        let mut embedding: Vec<usize> = universe.to_vec();
        embedding.sort_unstable();
        embedding.dedup();
        if embedding.is_empty() {
            return Err(Error::InvalidArgument("empty subuniverse".into()));
        }
        let mut position = vec![usize::MAX; self.size];
        for (i, &e) in embedding.iter().enumerate() {
            if e >= self.size {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    size: self.size,
                });
            }
            position[e] = i;
        }
        let m = embedding.len();
        let mut ops = Vec::with_capacity(self.ops.len());
        for (oi, op) in self.ops.iter().enumerate() {
            let len = checked_pow(m, op.arity).unwrap();
            let mut table = Vec::with_capacity(len);
            let mut args = vec![0; op.arity];
            for flat in 0..len {
                let mut rest = flat;
                for slot in (0..op.arity).rev() {
                    args[slot] = embedding[rest % m];
                    rest /= m;
                }
                let image = position[self.apply(oi, &args)];
                if image == usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "elements are not closed under `{}`",
                        op.name
                    )));
                }
                table.push(image as u32);
            }
            ops.push(Operation {
                name: op.name.clone(),
                arity: op.arity,
                table,
            });
        }
        let alg = FiniteAlgebra::new(format!("{}|{:?}", self.name, embedding), m, ops)?;
        Ok((alg, embedding))
    }

    /// Renames the algebra.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEMILATTICE2: &str =
        r#"{"name":"sl2","size":2,"operations":[{"name":"meet","arity":2,"table":[0,0,0,1]}]}"#;

    #[test]
    fn parses_meet_semilattice() {
        let alg = FiniteAlgebra::parse(SEMILATTICE2).unwrap();
        assert_eq!(alg.size(), 2);
        assert_eq!(alg.apply(0, &[0, 1]), 0);
        assert_eq!(alg.apply(0, &[1, 1]), 1);
    }

    #[test]
    fn parses_z3() {
        let text = r#"{"name":"z3","size":3,"operations":[{"name":"add","arity":2,"table":[0,1,2,1,2,0,2,0,1]}]}"#;
        let alg = FiniteAlgebra::parse(text).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(alg.apply(0, &[a, b]), (a + b) % 3);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_entry() {
        let text =
            r#"{"name":"bad","size":3,"operations":[{"name":"f","arity":1,"table":[0,5,1]}]}"#;
        let err = FiniteAlgebra::parse(text).unwrap_err();
        assert!(matches!(
            err,
            Error::EntryOutOfRange {
                index: 1,
                value: 5,
                ..
            }
        ));
        assert!(err.to_string().contains("entry out of range"));
    }

    #[test]
    fn rejects_table_length_and_unknown_fields() {
        let short =
            r#"{"name":"bad","size":2,"operations":[{"name":"f","arity":2,"table":[0,1,1]}]}"#;
        assert!(matches!(
            FiniteAlgebra::parse(short),
            Err(Error::TableLength {
                expected: 4,
                found: 3,
                ..
            })
        ));
        let extra = r#"{"name":"bad","size":1,"operations":[],"comment":"x"}"#;
        assert!(matches!(
            FiniteAlgebra::parse(extra),
            Err(Error::Malformed { line: 1, .. })
        ));
        let dup = r#"{"name":"bad","size":1,"operations":[{"name":"f","arity":0,"table":[0]},{"name":"f","arity":0,"table":[0]}]}"#;
        assert!(matches!(
            FiniteAlgebra::parse(dup),
            Err(Error::DuplicateOperation(_))
        ));
    }

    #[test]
    fn document_round_trip() {
        let alg = FiniteAlgebra::parse(SEMILATTICE2).unwrap();
        assert_eq!(FiniteAlgebra::parse(&alg.to_document()).unwrap(), alg);
    }

    #[test]
    fn square_of_z2_is_coordinatewise_xor() {
        let z2 = FiniteAlgebra::new(
            "z2",
            2,
            vec![Operation {
                name: "add".into(),
                arity: 2,
                table: vec![0, 1, 1, 0],
            }],
        )
        .unwrap();
        let sq = z2.product_power(2, &Caps::default()).unwrap();
        assert_eq!(sq.size(), 4);
        let a = z2.encode_tuple(&[0, 1]);
        let b = z2.encode_tuple(&[1, 1]);
        assert_eq!(z2.decode_tuple(sq.apply(0, &[a, b]), 2), vec![1, 0]);

        let same = z2.product_power(1, &Caps::default()).unwrap();
        assert_eq!(same.operations(), z2.operations());
    }

    #[test]
    fn power_cap_is_enforced() {
        let text = r#"{"name":"t","size":3,"operations":[]}"#;
        let alg = FiniteAlgebra::parse(text).unwrap();
        let caps = Caps {
            max_power_carrier: 10_000,
            ..Caps::default()
        };
        let err = alg.product_power(9, &caps).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                what: "power carrier".into(),
                limit: 10_000,
                reached: 19_683
            }
        );
    }

    #[test]
    fn subalgebra_restricts_tables() {
        let text = r#"{"name":"sl3","size":3,"operations":[{"name":"meet","arity":2,"table":[0,0,0,0,1,1,0,1,2]}]}"#;
        let alg = FiniteAlgebra::parse(text).unwrap();
        let (sub, emb) = alg.subalgebra(&[2, 1]).unwrap();
        assert_eq!(emb, vec![1, 2]);
        assert_eq!(sub.operations()[0].table, vec![0, 0, 0, 1]);
    }
}
