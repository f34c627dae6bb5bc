use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Name of the sentence goal type.
pub const GOAL_TYPE: &str = "t";

/// Spelling of the daughter metavariable in annotation templates.
pub const METAVARIABLE: &str = "v";

/// An atomic resource type. Contentful types (`e`, `t`) carry meaning;
/// vacuous ones (`NOM`, `ACC`, ...) are pure features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub contentful: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclsError {
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("`{0}` is reserved for the daughter metavariable")]
    Reserved(String),
}

/// Declaration table shared by grammars and the f-term parser.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decls {
    types: BTreeMap<String, TypeDecl>,
    attrs: BTreeSet<String>,
    cats: BTreeSet<String>,
    consts: BTreeSet<String>,
}

impl Decls {
    pub fn new() -> Self {
        Self::default()
    }

    /// The usual English/Icelandic table: `e`, `t` contentful, `NOM`,
    /// `ACC` vacuous, with the attributes `SUBJ`, `OBJ`, `XCOMP`.
    pub fn standard() -> Self {
        let mut d = Decls::new();
        for (name, contentful) in [("e", true), ("t", true), ("NOM", false), ("ACC", false)] {
            d.declare_type(name, contentful).unwrap();
        }
        for attr in ["SUBJ", "OBJ", "XCOMP"] {
            d.declare_attr(attr).unwrap();
        }
        d
    }

    fn check_fresh(&self, name: &str) -> Result<(), DeclsError> {
        if name == METAVARIABLE {
            return Err(DeclsError::Reserved(name.to_string()));
        }
        if self.types.contains_key(name)
            || self.attrs.contains(name)
            || self.cats.contains(name)
            || self.consts.contains(name)
        {
            return Err(DeclsError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn declare_type(&mut self, name: &str, contentful: bool) -> Result<(), DeclsError> {
        self.check_fresh(name)?;
        self.types.insert(
            name.to_string(),
            TypeDecl {
                name: name.to_string(),
                contentful,
            },
        );
        Ok(())
    }

    pub fn declare_attr(&mut self, name: &str) -> Result<(), DeclsError> {
        self.check_fresh(name)?;
        self.attrs.insert(name.to_string());
        Ok(())
    }

    pub fn declare_cat(&mut self, name: &str) -> Result<(), DeclsError> {
        self.check_fresh(name)?;
        self.cats.insert(name.to_string());
        Ok(())
    }

    pub fn declare_const(&mut self, name: &str) -> Result<(), DeclsError> {
        self.check_fresh(name)?;
        self.consts.insert(name.to_string());
        Ok(())
    }

    pub fn type_decl(&self, name: &str) -> Option<&TypeDecl> {
        self.types.get(name)
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeDecl> {
        self.types.values()
    }

    pub fn is_type(&self, name: &str) -> bool {
        self.types.contains_key(name)
    }

    pub fn is_attr(&self, name: &str) -> bool {
        self.attrs.contains(name)
    }

    pub fn is_cat(&self, name: &str) -> bool {
        self.cats.contains(name)
    }

    pub fn is_const(&self, name: &str) -> bool {
        self.consts.contains(name)
    }

    pub fn attrs(&self) -> impl Iterator<Item = &str> {
        self.attrs.iter().map(String::as_str)
    }

    pub fn goal(&self) -> Option<&TypeDecl> {
        self.types.get(GOAL_TYPE)
    }
}
