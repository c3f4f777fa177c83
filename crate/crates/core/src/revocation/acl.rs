use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::cert::Role;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Permission {
    IssueRl,
    IssueCert,
    CollapseCert,
    ReportInjection,
}

impl Permission {
    pub const ALL: [Permission; 4] =
        [Permission::IssueRl, Permission::IssueCert, Permission::CollapseCert, Permission::ReportInjection];

    pub fn name(self) -> &'static str {
        match self {
            Permission::IssueRl => "ISSUE_RL",
            Permission::IssueCert => "ISSUE_CERT",
            Permission::CollapseCert => "COLLAPSE_CERT",
            Permission::ReportInjection => "REPORT_INJECTION",
        }
    }
}

impl FromStr for Permission {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Permission::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown permission {s:?}")))
    }
}

/// Role to permission map. `ISSUE_RL` can only ever be held by the
/// maintainer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessControlList {
    permissions: BTreeMap<Role, BTreeSet<Permission>>,
}

impl AccessControlList {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Maintainer: revocation, issuance, collapse. Production line:
    /// issuance. Manufacturer and operator: injection reports.
    pub fn standard() -> Self {
        let mut acl = Self::empty();
        for p in [Permission::IssueRl, Permission::IssueCert, Permission::CollapseCert] {
            acl.grant(Role::Maintainer, p).expect("maintainer may hold every permission");
        }
        acl.grant(Role::ProductionLine, Permission::IssueCert).expect("allowed");
        acl.grant(Role::Manufacturer, Permission::ReportInjection).expect("allowed");
        acl.grant(Role::Operator, Permission::ReportInjection).expect("allowed");
        acl
    }

    pub fn grant(&mut self, role: Role, permission: Permission) -> Result<()> {
        if permission == Permission::IssueRl && role != Role::Maintainer {
            return Err(Error::param(format!("ISSUE_RL may only be granted to MAINTAINER, not {role}")));
        }
        self.permissions.entry(role).or_default().insert(permission);
        Ok(())
    }

    pub fn allows(&self, role: Role, permission: Permission) -> bool {
        self.permissions.get(&role).is_some_and(|set| set.contains(&permission))
    }

    pub fn require(&self, role: Role, permission: Permission) -> Result<()> {
        if self.allows(role, permission) {
            Ok(())
        } else {
            Err(Error::AclDenied(format!("{role} lacks {}", permission.name())))
        }
    }

    /// Parses `ROLE=PERM,PERM` lines; blank lines and `#` comments are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut acl = Self::empty();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (role, perms) =
                line.split_once('=').ok_or_else(|| Error::param(format!("ACL line without '=': {line:?}")))?;
            let role: Role = role.parse()?;
            acl.permissions.entry(role).or_default();
            for p in perms.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                acl.grant(role, p.parse()?)?;
            }
        }
        Ok(acl)
    }
}

impl fmt::Display for AccessControlList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (role, perms) in &self.permissions {
            let names: Vec<_> = perms.iter().map(|p| p.name()).collect();
            writeln!(f, "{role}={}", names.join(","))?;
        }
        Ok(())
    }
}
