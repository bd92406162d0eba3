use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Set of allowed out-degrees for every vertex removed during decomposition.
///
/// The last vertex of a decomposition always has out-degree zero, so a policy
/// excluding zero yields graphs with exactly one sink rather than none.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DegreePolicy {
    All,
    Positive,
    AtMost(usize),
    Set(BTreeSet<usize>),
}

impl DegreePolicy {
    pub fn contains(&self, degree: usize) -> bool {
        match self {
            DegreePolicy::All => true,
            DegreePolicy::Positive => degree > 0,
            DegreePolicy::AtMost(d) => degree <= *d,
            DegreePolicy::Set(set) => set.contains(&degree),
        }
    }

    /// Allowed degrees in `0..=max`, strictly increasing.
    pub fn degrees_upto(&self, max: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            DegreePolicy::All => Box::new(0..=max),
            DegreePolicy::Positive => Box::new(1..=max),
            DegreePolicy::AtMost(d) => Box::new(0..=max.min(*d)),
            DegreePolicy::Set(set) => Box::new(set.range(..=max).copied()),
        }
    }

    /// Largest allowed degree, if the policy is bounded.
    pub fn max_degree(&self) -> Option<usize> {
        match self {
            DegreePolicy::All | DegreePolicy::Positive => None,
            DegreePolicy::AtMost(d) => Some(*d),
            DegreePolicy::Set(set) => Some(set.last().copied().unwrap_or(0)),
        }
    }

    /// Checks a full out-degree sequence listed in decomposition order: every
    /// vertex but the last must have an allowed degree, the last one is a sink.
    pub fn admits_sequence(&self, degrees: &[usize]) -> bool {
        match degrees.split_last() {
            None => true,
            Some((&last, rest)) => last == 0 && rest.iter().all(|&d| self.contains(d)),
        }
    }
}

impl fmt::Display for DegreePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreePolicy::All => f.write_str("all"),
            DegreePolicy::Positive => f.write_str("positive"),
            DegreePolicy::AtMost(d) => write!(f, "max:{d}"),
            DegreePolicy::Set(set) => {
                f.write_str("set:")?;
                for (idx, d) in set.iter().enumerate() {
                    if idx > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for DegreePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad degree policy `{s}` (expected all | positive | max:<d> | set:<d1,d2,...>)"));
        match s {
            "all" => Ok(DegreePolicy::All),
            "positive" => Ok(DegreePolicy::Positive),
            _ => {
                if let Some(d) = s.strip_prefix("max:") {
                    d.parse().map(DegreePolicy::AtMost).map_err(|_| bad())
                } else if let Some(list) = s.strip_prefix("set:") {
                    let set = list
                        .split(',')
                        .map(|x| x.trim().parse::<usize>())
                        .collect::<std::result::Result<BTreeSet<_>, _>>()
                        .map_err(|_| bad())?;
                    Ok(DegreePolicy::Set(set))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn policies() -> impl Strategy<Value = DegreePolicy> {
        prop_oneof![
            Just(DegreePolicy::All),
            Just(DegreePolicy::Positive),
            (0usize..12).prop_map(DegreePolicy::AtMost),
            proptest::collection::btree_set(0usize..15, 1..6).prop_map(DegreePolicy::Set),
        ]
    }

    proptest! {
        #[test]
        fn iterator_agrees_with_membership(policy in policies(), max in 0usize..20) {
            let listed: Vec<usize> = policy.degrees_upto(max).collect();
            let filtered: Vec<usize> = (0..=max).filter(|&d| policy.contains(d)).collect();
            prop_assert_eq!(&listed, &filtered);
            prop_assert!(listed.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn display_parses_back(policy in policies()) {
            let text = policy.to_string();
            prop_assert_eq!(text.parse::<DegreePolicy>().unwrap(), policy);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("max:".parse::<DegreePolicy>().is_err());
        assert!("set:1,x".parse::<DegreePolicy>().is_err());
        assert!("bounded".parse::<DegreePolicy>().is_err());
        assert_eq!("max:3".parse::<DegreePolicy>().unwrap(), DegreePolicy::AtMost(3));
    }

    #[test]
    fn positive_policy_sequences_have_one_sink() {
        let p = DegreePolicy::Positive;
        assert!(p.admits_sequence(&[2, 1, 0]));
        assert!(!p.admits_sequence(&[2, 0, 0]));
        assert!(DegreePolicy::All.admits_sequence(&[0, 0, 0]));
    }
}
