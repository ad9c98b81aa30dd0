use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::index::Field;

/// Field names accepted in the query language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryField {
    /// Title tokens, subjects, persons and source tokens.
    All,
    Title,
    Keyword,
    Person,
    Source,
    Institution,
    Year,
    Location,
    Type,
    Database,
}

impl QueryField {
    pub const ALL: [QueryField; 10] = [
        QueryField::All,
        QueryField::Title,
        QueryField::Keyword,
        QueryField::Person,
        QueryField::Source,
        QueryField::Institution,
        QueryField::Year,
        QueryField::Location,
        QueryField::Type,
        QueryField::Database,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QueryField::All => "all",
            QueryField::Title => "title",
            QueryField::Keyword => "keyword",
            QueryField::Person => "person",
            QueryField::Source => "source",
            QueryField::Institution => "institution",
            QueryField::Year => "year",
            QueryField::Location => "location",
            QueryField::Type => "type",
            QueryField::Database => "database",
        }
    }

    /// Index field backing this query field; `None` for the `all` pseudo-field.
    pub fn index_field(self) -> Option<Field> {
        Some(match self {
            QueryField::All => return None,
            QueryField::Title => Field::Title,
            QueryField::Keyword => Field::Subjects,
            QueryField::Person => Field::Persons,
            QueryField::Source => Field::Source,
            QueryField::Institution => Field::Institutions,
            QueryField::Year => Field::Year,
            QueryField::Location => Field::Locations,
            QueryField::Type => Field::InfoType,
            QueryField::Database => Field::Database,
        })
    }

    /// Whether bare values are split into word tokens.
    pub fn is_tokenized(self) -> bool {
        matches!(
            self,
            QueryField::All | QueryField::Title | QueryField::Source
        )
    }
}

impl fmt::Display for QueryField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QueryField {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QueryField::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or(())
    }
}

/// Parsed Boolean field query. Values are stored case-folded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum QueryAst {
    And {
        children: Vec<QueryAst>,
    },
    Or {
        children: Vec<QueryAst>,
    },
    Not {
        child: Box<QueryAst>,
    },
    FieldTerm {
        field: QueryField,
        value: String,
    },
    Phrase {
        field: QueryField,
        words: Vec<String>,
    },
    YearRange {
        from: i32,
        to: i32,
    },
    MatchAll,
}

impl QueryAst {
    pub fn and(children: Vec<QueryAst>) -> Self {
        QueryAst::And { children }
    }

    pub fn or(children: Vec<QueryAst>) -> Self {
        QueryAst::Or { children }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: QueryAst) -> Self {
        QueryAst::Not {
            child: Box::new(child),
        }
    }

    pub fn term(field: QueryField, value: impl Into<String>) -> Self {
        QueryAst::FieldTerm {
            field,
            value: value.into(),
        }
    }

    pub fn phrase<I, S>(field: QueryField, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        QueryAst::Phrase {
            field,
            words: words.into_iter().map(Into::into).collect(),
        }
    }
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        if c == '"' || c == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("\"")
}

/// Prints query syntax that parses back to an equal tree, with only the
/// parentheses needed to preserve structure.
impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAst::And { children } => write_joined(f, " AND ", children, |c| {
                matches!(c, QueryAst::And { .. } | QueryAst::Or { .. })
            }),
            QueryAst::Or { children } => {
                write_joined(f, " OR ", children, |c| matches!(c, QueryAst::Or { .. }))
            }
            QueryAst::Not { child } => {
                f.write_str("NOT ")?;
                write_child(
                    f,
                    child,
                    matches!(**child, QueryAst::And { .. } | QueryAst::Or { .. }),
                )
            }
            QueryAst::FieldTerm { field, value } => {
                write!(f, "{field}:")?;
                write_quoted(f, value)
            }
            QueryAst::Phrase { field, words } => {
                write!(f, "{field}:")?;
                write_quoted(f, &words.join(" "))
            }
            QueryAst::YearRange { from, to } => write!(f, "year:[{from} TO {to}]"),
            QueryAst::MatchAll => Ok(()),
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &QueryAst, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

fn write_joined(
    f: &mut fmt::Formatter<'_>,
    sep: &str,
    children: &[QueryAst],
    needs_parens: impl Fn(&QueryAst) -> bool,
) -> fmt::Result {
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write_child(f, c, needs_parens(c))?;
    }
    Ok(())
}
