//! Strict query-string parsing. Every endpoint declares the parameters it
//! accepts; anything else is a 400.

use std::str::FromStr;

use scoutbench_core::analytics::{PlayerFilter, Range, SortKey, DEFAULT_DECAY};
use scoutbench_core::roles::Role;

use crate::error::ApiError;

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 10_000;

pub struct QueryParams {
    pairs: Vec<(String, String)>,
}

impl QueryParams {
    pub fn parse(raw: Option<&str>) -> Self {
        let pairs = raw
            .map(|q| url::form_urlencoded::parse(q.as_bytes()).into_owned().collect())
            .unwrap_or_default();
        Self { pairs }
    }

    /// All values given for `name`, removing them.
    pub fn take_all(&mut self, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        self.pairs.retain(|(k, v)| {
            if k == name {
                out.push(v.clone());
                false
            } else {
                true
            }
        });
        out
    }

    pub fn take(&mut self, name: &str) -> Result<Option<String>, ApiError> {
        let mut values = self.take_all(name);
        match values.len() {
            0 => Ok(None),
            1 => Ok(values.pop()),
            _ => Err(ApiError::bad_param(name, format!("parameter '{name}' given more than once"))),
        }
    }

    pub fn take_parsed<T: FromStr>(&mut self, name: &str) -> Result<Option<T>, ApiError> {
        match self.take(name)? {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| ApiError::bad_param(name, format!("invalid value '{v}' for '{name}'"))),
        }
    }

    pub fn take_f64(&mut self, name: &str) -> Result<Option<f64>, ApiError> {
        match self.take_parsed::<f64>(name)? {
            Some(v) if !v.is_finite() => {
                Err(ApiError::bad_param(name, format!("'{name}' must be finite")))
            }
            other => Ok(other),
        }
    }

    pub fn take_role(&mut self, name: &str) -> Result<Option<Role>, ApiError> {
        self.take(name)?
            .map(|v| parse_role(name, &v))
            .transpose()
    }

    pub fn take_decay(&mut self) -> Result<f64, ApiError> {
        let decay = self.take_f64("lambda")?.unwrap_or(DEFAULT_DECAY);
        if !(decay > 0.0 && decay <= 1.0) {
            return Err(ApiError::bad_param("lambda", "lambda must lie in (0, 1]"));
        }
        Ok(decay)
    }

    /// Fails on any parameter not consumed so far.
    pub fn finish(self) -> Result<(), ApiError> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(ApiError::new(
                axum::http::StatusCode::BAD_REQUEST,
                "unknown_parameter",
                format!("unknown query parameter '{k}'"),
            )
            .with_detail(k.clone())),
        }
    }
}

fn parse_role(param: &str, text: &str) -> Result<Role, ApiError> {
    text.trim()
        .parse()
        .map_err(|_| ApiError::bad_param(param, format!("unknown role '{text}'")))
}

/// Parsed `/players` request.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayersQuery {
    pub filter: PlayerFilter,
    pub sort: Vec<SortKey>,
    pub profile: Option<String>,
    pub decay: f64,
    pub limit: usize,
    pub offset: usize,
}

impl PlayersQuery {
    pub fn from_params(mut p: QueryParams) -> Result<Self, ApiError> {
        let mut roles = Vec::new();
        for value in p.take_all("role") {
            for part in value.split(',').filter(|s| !s.trim().is_empty()) {
                let role = parse_role("role", part)?;
                if !roles.contains(&role) {
                    roles.push(role);
                }
            }
        }
        let filter = PlayerFilter {
            name_substring: p.take("name_like")?.filter(|s| !s.is_empty()),
            roles,
            age: Range::new(p.take_f64("age_min")?, p.take_f64("age_max")?),
            trend_percentage: Range::new(p.take_f64("trend_min")?, p.take_f64("trend_max")?),
            min_matches: p.take_parsed("min_matches")?,
        };
        filter
            .validate()
            .map_err(|e| ApiError::bad_param("range", e.to_string()))?;
        let sort = match p.take("sort")? {
            Some(spec) => SortKey::parse_list(&spec)
                .map_err(|e| ApiError::bad_param("sort", e.to_string()))?,
            None => SortKey::DEFAULT.to_vec(),
        };
        let limit = p.take_parsed("limit")?.unwrap_or(DEFAULT_LIMIT);
        if limit == 0 || limit > MAX_LIMIT {
            return Err(ApiError::bad_param(
                "limit",
                format!("limit must lie in [1, {MAX_LIMIT}]"),
            ));
        }
        let query = Self {
            filter,
            sort,
            profile: p.take("profile")?,
            decay: p.take_decay()?,
            limit,
            offset: p.take_parsed("offset")?.unwrap_or(0),
        };
        p.finish()?;
        Ok(query)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use scoutbench_core::analytics::SortField;

    fn parse(q: &str) -> Result<PlayersQuery, ApiError> {
        PlayersQuery::from_params(QueryParams::parse(Some(q)))
    }

    #[test]
    fn scout_query() {
        let q = parse("age_max=21&trend_min=0&min_matches=5&sort=trend_pct:desc,age:asc,mean:desc")
            .unwrap();
        assert_eq!(q.filter.age, Range::new(None, Some(21.0)));
        assert_eq!(q.filter.trend_percentage, Range::new(Some(0.0), None));
        assert_eq!(q.filter.min_matches, Some(5));
        assert_eq!(q.sort, SortKey::DEFAULT.to_vec());
        assert_eq!((q.limit, q.offset), (DEFAULT_LIMIT, 0));
    }

    #[test]
    fn roles_repeat_and_comma() {
        let q = parse("role=central_FW,left_CB&role=central%20forward").unwrap();
        assert_eq!(q.filter.roles, vec![Role::CentralFw, Role::LeftCb]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse("age_max=old").unwrap_err().code, "invalid_parameter");
        assert_eq!(parse("age_min=30&age_max=20").unwrap_err().code, "invalid_parameter");
        assert_eq!(parse("colour=red").unwrap_err().code, "unknown_parameter");
        assert_eq!(parse("limit=0").unwrap_err().code, "invalid_parameter");
        assert_eq!(parse("lambda=2").unwrap_err().code, "invalid_parameter");
        assert_eq!(parse("sort=height").unwrap_err().code, "invalid_parameter");
        assert_eq!(parse("age_max=1&age_max=2").unwrap_err().code, "invalid_parameter");
        assert_eq!(parse("trend_min=NaN").unwrap_err().code, "invalid_parameter");
    }

    #[test]
    fn sort_override() {
        let q = parse("sort=name:asc").unwrap();
        assert_eq!(q.sort, vec![SortKey::asc(SortField::Name)]);
    }
}
