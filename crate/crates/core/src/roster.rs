//! Players, positions and biographic data.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    QB,
    RB,
    WR,
    TE,
    K,
    DST,
}

impl Position {
    pub const ALL: [Position; 6] = [Position::QB, Position::RB, Position::WR, Position::TE, Position::K, Position::DST];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Position::QB => "QB",
            Position::RB => "RB",
            Position::WR => "WR",
            Position::TE => "TE",
            Position::K => "K",
            Position::DST => "DST",
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Position::ALL
            .iter()
            .copied()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown position {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerBio {
    pub player_id: String,
    pub name: String,
    pub team: String,
    pub position: Position,
    pub age: f64,
    pub seasons_pro: f64,
    pub height_cm: f64,
    pub weight_kg: f64,
}

impl PlayerBio {
    pub fn validate(&self) -> Result<()> {
        let numbers = [self.age, self.seasons_pro, self.height_cm, self.weight_kg];
        if numbers.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::invalid(format!("bio for {} has non-positive fields", self.player_id)));
        }
        Ok(())
    }
}

pub const ROSTER_HEADER: &str = "player_id,name,team,position,age,seasons_pro,height_cm,weight_kg";

pub fn parse_roster(input: &str) -> Result<Vec<PlayerBio>> {
    table::rows(input, "player_id")
        .iter()
        .map(|r| {
            let bio = PlayerBio {
                player_id: r.str(0)?.to_string(),
                name: r.str(1)?.to_string(),
                team: r.str(2)?.to_string(),
                position: r.parse(3)?,
                age: r.parse(4)?,
                seasons_pro: r.parse(5)?,
                height_cm: r.parse(6)?,
                weight_kg: r.parse(7)?,
            };
            bio.validate()?;
            Ok(bio)
        })
        .collect()
}

pub fn format_roster(roster: &[PlayerBio]) -> Result<String> {
    let mut out = format!("{ROSTER_HEADER}\n");
    for b in roster {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            table::check_field(&b.player_id)?,
            table::check_field(&b.name)?,
            table::check_field(&b.team)?,
            b.position,
            b.age,
            b.seasons_pro,
            b.height_cm,
            b.weight_kg
        ));
    }
    Ok(out)
}
