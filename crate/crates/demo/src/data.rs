//! Fake account and incident data. Fixed seed values only, so runs are
//! reproducible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub iban: String,
    pub name: String,
    pub balance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub name: String,
    pub iban: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncidentStatus {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incident {
    pub id: u64,
    pub kind: String,
    pub status: IncidentStatus,
    /// Form values at the time of submission.
    pub fields: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoData {
    pub accounts: Vec<Account>,
    pub contacts: Vec<Contact>,
    pub incidents: Vec<Incident>,
}

impl DemoData {
    pub fn seeded() -> Self {
        let contact = |name: &str, iban: &str| Contact {
            name: name.into(),
            iban: iban.into(),
        };
        let incident = |id, kind: &str, status, fields: &[(&str, Value)]| Incident {
            id,
            kind: kind.into(),
            status,
            fields: fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            resolution: None,
        };
        Self {
            accounts: vec![
                Account {
                    iban: "NL91DEMO0417164300".into(),
                    name: "Checking".into(),
                    balance: 2450.75,
                },
                Account {
                    iban: "NL20DEMO0123456789".into(),
                    name: "Savings".into(),
                    balance: 12800.0,
                },
            ],
            contacts: vec![
                contact("Robert", "NL02DEMO0000000101"),
                contact("Mary", "NL02DEMO0000000102"),
                contact("Alice", "NL02DEMO0000000103"),
                contact("Sanne", "NL02DEMO0000000104"),
            ],
            incidents: vec![
                incident(
                    1,
                    "report_power_failure",
                    IncidentStatus::Closed,
                    &[("location", "room 2".into()), ("scope", "row".into())],
                ),
                incident(
                    2,
                    "report_water_leak",
                    IncidentStatus::Open,
                    &[("location", "rack C04".into()), ("leak_rate", "drip".into())],
                ),
            ],
        }
    }

    pub fn contact(&self, name: &str) -> Option<&Contact> {
        self.contacts.iter().find(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn next_incident_id(&self) -> u64 {
        self.incidents.iter().map(|i| i.id).max().unwrap_or(0) + 1
    }
}
