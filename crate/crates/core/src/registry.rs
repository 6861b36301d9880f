//! Named constructors for knots and complexes, selected at runtime from
//! strings like `torus:2,5` or `staircase:2`.

use std::collections::BTreeMap;

use crate::alexander::{torus_knot, LSpaceKnotModel, LaurentPolynomial};
use crate::cfk::{acyclic_box, staircase, BifilteredComplex};
use crate::error::{Error, Result};

pub trait Source: Send + Sync {
    fn name(&self) -> &'static str;
    /// Usage line, e.g. `torus:A,B`.
    fn usage(&self) -> &'static str;
}

pub trait KnotSource: Source {
    fn build(&self, args: Option<&str>) -> Result<LSpaceKnotModel>;
}

pub trait ComplexSource: Source {
    fn build(&self, args: Option<&str>) -> Result<BifilteredComplex>;
}

pub struct Registry<T: ?Sized> {
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized + Source> Registry<T> {
    pub fn empty() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, source: Box<T>) {
        self.entries.insert(source.name(), source);
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries.get(name).map(|b| &**b)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn usages(&self) -> Vec<&'static str> {
        self.entries.values().map(|s| s.usage()).collect()
    }

    /// Split `name:args` and look up `name`.
    pub fn lookup<'a>(&self, source: &'a str) -> Result<(&T, Option<&'a str>)> {
        let (name, args) = match source.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (source, None),
        };
        let source = self.get(name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown source {name:?}; expected one of {}",
                self.usages().join(", ")
            ))
        })?;
        Ok((source, args))
    }
}

impl Registry<dyn KnotSource> {
    pub fn knots() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(TorusSource));
        r.register(Box::new(UnknotSource));
        r.register(Box::new(AlexanderSource));
        r
    }

    pub fn build(&self, source: &str) -> Result<LSpaceKnotModel> {
        let (s, args) = self.lookup(source)?;
        s.build(args)
    }
}

impl Registry<dyn ComplexSource> {
    pub fn complexes() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(StaircaseSource));
        r.register(Box::new(UnknotSource));
        r.register(Box::new(BoxSource));
        r.register(Box::new(FileSource));
        r
    }

    pub fn build(&self, source: &str) -> Result<BifilteredComplex> {
        let (s, args) = self.lookup(source)?;
        s.build(args)
    }
}

fn required<'a>(source: &str, args: Option<&'a str>) -> Result<&'a str> {
    args.filter(|a| !a.is_empty())
        .ok_or_else(|| Error::InvalidInput(format!("{source} needs arguments")))
}

fn no_args(name: &str, args: Option<&str>) -> Result<()> {
    match args {
        None | Some("") => Ok(()),
        Some(a) => Err(Error::InvalidInput(format!(
            "{name} takes no arguments, got {a:?}"
        ))),
    }
}

fn ints(source: &str, args: &str, count: usize) -> Result<Vec<i64>> {
    let v: Vec<i64> = args
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("{source}: bad integer list {args:?}")))?;
    if v.len() != count {
        return Err(Error::Parse(format!(
            "{source}: expected {count} integers, got {}",
            v.len()
        )));
    }
    Ok(v)
}

pub struct TorusSource;

impl Source for TorusSource {
    fn name(&self) -> &'static str {
        "torus"
    }
    fn usage(&self) -> &'static str {
        "torus:A,B"
    }
}

impl KnotSource for TorusSource {
    fn build(&self, args: Option<&str>) -> Result<LSpaceKnotModel> {
        let v = ints(self.usage(), required(self.usage(), args)?, 2)?;
        torus_knot(v[0], v[1])
    }
}

pub struct UnknotSource;

impl Source for UnknotSource {
    fn name(&self) -> &'static str {
        "unknot"
    }
    fn usage(&self) -> &'static str {
        "unknot"
    }
}

impl KnotSource for UnknotSource {
    fn build(&self, args: Option<&str>) -> Result<LSpaceKnotModel> {
        no_args("unknot", args)?;
        Ok(LSpaceKnotModel::unknot())
    }
}

impl ComplexSource for UnknotSource {
    fn build(&self, args: Option<&str>) -> Result<BifilteredComplex> {
        no_args("unknot", args)?;
        Ok(BifilteredComplex::unknot())
    }
}

/// An L-space knot given by its symmetrized Alexander polynomial in `e:c,...` form.
pub struct AlexanderSource;

impl Source for AlexanderSource {
    fn name(&self) -> &'static str {
        "alexander"
    }
    fn usage(&self) -> &'static str {
        "alexander:E:C,E:C,..."
    }
}

impl KnotSource for AlexanderSource {
    fn build(&self, args: Option<&str>) -> Result<LSpaceKnotModel> {
        let args = required(self.usage(), args)?;
        let poly = LaurentPolynomial::parse_machine_form(args)?;
        LSpaceKnotModel::new(format!("alexander({args})"), poly)
    }
}

pub struct StaircaseSource;

impl Source for StaircaseSource {
    fn name(&self) -> &'static str {
        "staircase"
    }
    fn usage(&self) -> &'static str {
        "staircase:N"
    }
}

impl ComplexSource for StaircaseSource {
    fn build(&self, args: Option<&str>) -> Result<BifilteredComplex> {
        let n = ints(self.usage(), required(self.usage(), args)?, 1)?[0];
        let n = u32::try_from(n).map_err(|_| Error::InvalidInput(format!("staircase:{n}")))?;
        staircase(n)
    }
}

pub struct BoxSource;

impl Source for BoxSource {
    fn name(&self) -> &'static str {
        "box"
    }
    fn usage(&self) -> &'static str {
        "box:I,J,GR"
    }
}

impl ComplexSource for BoxSource {
    fn build(&self, args: Option<&str>) -> Result<BifilteredComplex> {
        let v = match args {
            None | Some("") => vec![1, 1, 1],
            Some(a) => ints(self.usage(), a, 3)?,
        };
        Ok(acyclic_box(v[0], v[1], v[2]))
    }
}

/// A complex in the plain-text `gen`/`arrow` format.
pub struct FileSource;

impl Source for FileSource {
    fn name(&self) -> &'static str {
        "file"
    }
    fn usage(&self) -> &'static str {
        "file:PATH"
    }
}

impl ComplexSource for FileSource {
    fn build(&self, args: Option<&str>) -> Result<BifilteredComplex> {
        let path = required(self.usage(), args)?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?;
        BifilteredComplex::parse(&text)
    }
}
