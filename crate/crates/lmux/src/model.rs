//! Transfer-unit alphabets, the unit/value mapping, and the PHY profile
//! catalog shared by the search engine and the frame codecs.
//!
//! A transfer unit is one payload element per octet time: a data octet, a
//! control code, an event position code, or (only in the integral spare
//! slot) a filler. The alphabet fixes the value bands: data first, then
//! control, then event, then any unassigned extras.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Split a modulus into its odd root and power-of-two bypass factors.
///
/// The bypass factor is the largest power-of-two divisor, so the root is
/// always odd and `root * bypass == n`.
pub fn decompose(n: u32) -> (u32, u32) {
    assert!(n >= 1, "modulus must be positive");
    let bypass = 1u32 << n.trailing_zeros();
    (n / bypass, bypass)
}

/// A transfer-unit value space of `modulus` items: 256 data octets plus
/// control, event, and unassigned extra bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    modulus: u32,
    root_modulus: u32,
    bypass_modulus: u32,
    ctrl_codes: u32,
    event_codes: u32,
}

impl Alphabet {
    pub fn new(modulus: u32, ctrl_codes: u32, event_codes: u32) -> Result<Self> {
        if modulus < 256 {
            return Err(Error::InvalidAlphabet {
                reason: format!("modulus {modulus} is below the 256 data octet values"),
            });
        }
        let extras = modulus - 256;
        if extras > 0 && ctrl_codes == 0 {
            return Err(Error::InvalidAlphabet {
                reason: "at least one control code is required when extras exist".into(),
            });
        }
        if ctrl_codes + event_codes > extras {
            return Err(Error::InvalidAlphabet {
                reason: format!(
                    "{ctrl_codes} control + {event_codes} event codes exceed the {extras} extras"
                ),
            });
        }
        let (root_modulus, bypass_modulus) = decompose(modulus);
        Ok(Alphabet {
            modulus,
            root_modulus,
            bypass_modulus,
            ctrl_codes,
            event_codes,
        })
    }

    /// The catalog convention: split the extra items evenly between the
    /// control and event bands, control taking the odd one out.
    pub fn with_default_bands(modulus: u32) -> Result<Self> {
        let extras = modulus.saturating_sub(256);
        let event_codes = extras / 2;
        Alphabet::new(modulus, extras - event_codes, event_codes)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn root_modulus(&self) -> u32 {
        self.root_modulus
    }

    pub fn bypass_modulus(&self) -> u32 {
        self.bypass_modulus
    }

    /// Bits bypassed per unit: log2 of the bypass modulus.
    pub fn bypass_width(&self) -> u32 {
        self.bypass_modulus.trailing_zeros()
    }

    pub fn ctrl_codes(&self) -> u32 {
        self.ctrl_codes
    }

    pub fn event_codes(&self) -> u32 {
        self.event_codes
    }

    /// Map a unit onto its value band: data at 0..256, control at 256..,
    /// events after the controls. Fillers carry no value.
    pub fn unit_value(&self, unit: &TransferUnit) -> Result<u32> {
        match *unit {
            TransferUnit::Data(octet) => Ok(octet as u32),
            TransferUnit::Ctrl(code) => {
                let code = code as u32;
                if code >= self.ctrl_codes {
                    return Err(Error::UnitOutOfBand {
                        kind: "ctrl",
                        code,
                        limit: self.ctrl_codes,
                    });
                }
                Ok(256 + code)
            }
            TransferUnit::Event(code) => {
                let code = code as u32;
                if code >= self.event_codes {
                    return Err(Error::UnitOutOfBand {
                        kind: "event",
                        code,
                        limit: self.event_codes,
                    });
                }
                Ok(256 + self.ctrl_codes + code)
            }
            TransferUnit::Filler => Err(Error::FillerHasNoValue),
        }
    }

    /// Inverse of [`unit_value`]. Values past the event band are
    /// unassigned extras and rejected by name.
    ///
    /// [`unit_value`]: Alphabet::unit_value
    pub fn value_unit(&self, value: u32) -> Result<TransferUnit> {
        if value >= self.modulus {
            return Err(Error::UnitValueOutOfRange {
                value,
                modulus: self.modulus,
            });
        }
        if value < 256 {
            Ok(TransferUnit::Data(value as u8))
        } else if value < 256 + self.ctrl_codes {
            Ok(TransferUnit::Ctrl((value - 256) as u16))
        } else if value < 256 + self.ctrl_codes + self.event_codes {
            Ok(TransferUnit::Event((value - 256 - self.ctrl_codes) as u16))
        } else {
            Err(Error::UnassignedUnitValue { value })
        }
    }

    pub fn is_event_value(&self, value: u32) -> bool {
        let start = 256 + self.ctrl_codes;
        value >= start && value < start + self.event_codes
    }
}

/// One duty item observed at the service interface during an octet time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TransferUnit {
    Data(u8),
    Ctrl(u16),
    Event(u16),
    Filler,
}

impl TransferUnit {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TransferUnit::Data(_) => "data",
            TransferUnit::Ctrl(_) => "ctrl",
            TransferUnit::Event(_) => "event",
            TransferUnit::Filler => "filler",
        }
    }
}

pub const PROFILE_T1_1000: &str = "t1-1000";
pub const PROFILE_T_10G: &str = "t-10g";
pub const PROFILE_KR_10G: &str = "kr-10g";

/// Payload geometry and timing constants of one PHY microframe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    /// Duty scope: transfer units per frame.
    pub units_per_frame: u32,
    /// Payload volume: settable bits per frame.
    pub payload_bits: u32,
    pub frame_time_ps: u64,
    pub octet_time_ps: u64,
}

impl Profile {
    pub fn new(
        name: &str,
        units_per_frame: u32,
        payload_bits: u32,
        frame_time_ps: u64,
        octet_time_ps: u64,
    ) -> Result<Self> {
        let profile = Profile {
            name: name.to_string(),
            units_per_frame,
            payload_bits,
            frame_time_ps,
            octet_time_ps,
        };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<()> {
        let product = self.units_per_frame as u64 * self.octet_time_ps;
        if product != self.frame_time_ps {
            return Err(Error::ProfileParse {
                line: 0,
                reason: format!(
                    "profile {:?}: {} units x {} ps = {} ps, frame time says {} ps",
                    self.name,
                    self.units_per_frame,
                    self.octet_time_ps,
                    product,
                    self.frame_time_ps
                ),
            });
        }
        Ok(())
    }

    pub fn frame_time_ns(&self) -> f64 {
        self.frame_time_ps as f64 / 1000.0
    }
}

/// The compiled-in profile rows plus any file overrides.
#[derive(Debug, Clone)]
pub struct ProfileCatalog {
    profiles: Vec<Profile>,
}

impl ProfileCatalog {
    pub fn builtin() -> Self {
        ProfileCatalog {
            profiles: vec![
                Profile::new(PROFILE_T1_1000, 450, 3645, 3_600_000, 8000).unwrap(),
                Profile::new(PROFILE_T_10G, 400, 3250, 320_000, 800).unwrap(),
                Profile::new(PROFILE_KR_10G, 256, 2080, 204_800, 800).unwrap(),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Result<&Profile> {
        self.profiles
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownProfile(name.to_string()))
    }

    pub fn all(&self) -> &[Profile] {
        &self.profiles
    }

    /// Merge override records of the form
    /// `name n_p v frame_time_ns octet_time_ps`, one per line, `#` comments
    /// allowed. A record with a known name replaces the catalog row.
    pub fn merge_records(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let record = raw.split('#').next().unwrap_or("").trim();
            if record.is_empty() {
                continue;
            }
            let fields: Vec<&str> = record.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::ProfileParse {
                    line,
                    reason: format!("expected 5 fields, got {}", fields.len()),
                });
            }
            let parse_u32 = |field: &str, what: &str| {
                field.parse::<u32>().map_err(|_| Error::ProfileParse {
                    line,
                    reason: format!("bad {what}: {field:?}"),
                })
            };
            let units = parse_u32(fields[1], "unit count")?;
            let bits = parse_u32(fields[2], "payload volume")?;
            let frame_ns: f64 = fields[3].parse().map_err(|_| Error::ProfileParse {
                line,
                reason: format!("bad frame time: {:?}", fields[3]),
            })?;
            let octet_ps = fields[4].parse::<u64>().map_err(|_| Error::ProfileParse {
                line,
                reason: format!("bad octet time: {:?}", fields[4]),
            })?;
            let frame_ps = (frame_ns * 1000.0).round() as u64;
            let profile = Profile::new(fields[0], units, bits, frame_ps, octet_ps)
                .map_err(|e| match e {
                    Error::ProfileParse { reason, .. } => Error::ProfileParse { line, reason },
                    other => other,
                })?;
            match self.profiles.iter_mut().find(|p| p.name == profile.name) {
                Some(slot) => *slot = profile,
                None => self.profiles.push(profile),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_table_rows() {
        assert_eq!(decompose(272), (17, 16));
        assert_eq!(decompose(257), (257, 1));
        assert_eq!(decompose(256), (1, 256));
        assert_eq!(decompose(264), (33, 8));
        assert_eq!(decompose(274), (137, 2));
        assert_eq!(decompose(1), (1, 1));
    }

    #[test]
    fn decompose_root_always_odd() {
        for n in 1..=4096u32 {
            let (root, bypass) = decompose(n);
            assert_eq!(root % 2, 1, "even root for {n}");
            assert!(bypass.is_power_of_two());
            assert_eq!(root * bypass, n);
            // bypass is the largest power-of-two divisor
            assert!(n % (bypass * 2) != 0 || bypass * 2 > n);
        }
    }

    #[test]
    fn value_bands() {
        let a = Alphabet::new(272, 8, 8).unwrap();
        assert_eq!(a.unit_value(&TransferUnit::Data(0xAB)).unwrap(), 171);
        assert_eq!(a.unit_value(&TransferUnit::Ctrl(0)).unwrap(), 256);
        assert_eq!(a.unit_value(&TransferUnit::Event(5)).unwrap(), 269);
        assert_eq!(a.value_unit(263).unwrap(), TransferUnit::Ctrl(7));
        assert_eq!(a.value_unit(271).unwrap(), TransferUnit::Event(7));
        assert_eq!(a.value_unit(0).unwrap(), TransferUnit::Data(0));

        let idle_only = Alphabet::new(257, 1, 0).unwrap();
        assert_eq!(idle_only.unit_value(&TransferUnit::Ctrl(0)).unwrap(), 256);
    }

    #[test]
    fn value_band_errors() {
        let a = Alphabet::new(264, 8, 0).unwrap();
        assert_eq!(
            a.unit_value(&TransferUnit::Filler),
            Err(Error::FillerHasNoValue)
        );
        assert!(matches!(
            a.unit_value(&TransferUnit::Ctrl(8)),
            Err(Error::UnitOutOfBand { .. })
        ));
        assert!(matches!(
            a.unit_value(&TransferUnit::Event(0)),
            Err(Error::UnitOutOfBand { .. })
        ));
        assert_eq!(
            a.value_unit(300),
            Err(Error::UnitValueOutOfRange {
                value: 300,
                modulus: 264
            })
        );
        // 264 with 8 ctrl and 0 event codes leaves no unassigned extras,
        // but a narrower split does
        let narrow = Alphabet::new(264, 4, 2).unwrap();
        assert_eq!(
            narrow.value_unit(263),
            Err(Error::UnassignedUnitValue { value: 263 })
        );
    }

    #[test]
    fn roundtrip_exhaustive_small_alphabets() {
        for modulus in [256u32, 257, 258, 260, 264, 272, 274, 279, 288] {
            let a = Alphabet::with_default_bands(modulus).unwrap();
            for value in 0..modulus {
                match a.value_unit(value) {
                    Ok(unit) => assert_eq!(a.unit_value(&unit).unwrap(), value),
                    Err(Error::UnassignedUnitValue { .. }) => {}
                    Err(other) => panic!("unexpected error for {value}: {other}"),
                }
            }
        }
    }

    #[test]
    fn default_bands_match_catalog_splits() {
        let a = Alphabet::with_default_bands(272).unwrap();
        assert_eq!((a.ctrl_codes(), a.event_codes()), (8, 8));
        let a = Alphabet::with_default_bands(258).unwrap();
        assert_eq!((a.ctrl_codes(), a.event_codes()), (1, 1));
        let a = Alphabet::with_default_bands(257).unwrap();
        assert_eq!((a.ctrl_codes(), a.event_codes()), (1, 0));
    }

    #[test]
    fn builtin_profiles_are_exact() {
        let catalog = ProfileCatalog::builtin();
        let t1 = catalog.get(PROFILE_T1_1000).unwrap();
        assert_eq!((t1.units_per_frame, t1.payload_bits), (450, 3645));
        assert_eq!((t1.frame_time_ps, t1.octet_time_ps), (3_600_000, 8000));
        let t10 = catalog.get(PROFILE_T_10G).unwrap();
        assert_eq!((t10.units_per_frame, t10.payload_bits), (400, 3250));
        assert_eq!((t10.frame_time_ps, t10.octet_time_ps), (320_000, 800));
        let kr = catalog.get(PROFILE_KR_10G).unwrap();
        assert_eq!((kr.units_per_frame, kr.payload_bits), (256, 2080));
        assert_eq!((kr.frame_time_ps, kr.octet_time_ps), (204_800, 800));
        // the redundancy the whole toolkit exploits exists
        for profile in catalog.all() {
            assert!(profile.payload_bits > 8 * profile.units_per_frame);
        }
    }

    #[test]
    fn profile_overrides_parse_and_validate() {
        let mut catalog = ProfileCatalog::builtin();
        catalog
            .merge_records("# comment\nkr-10g 256 2080 204.8 800\nx-100g 640 5140 51.2 80\n")
            .unwrap();
        let custom = catalog.get("x-100g").unwrap();
        assert_eq!(custom.frame_time_ps, 51_200);
        // timing identity violations are rejected
        let err = catalog.merge_records("bad 100 900 100 800");
        assert!(matches!(err, Err(Error::ProfileParse { line: 1, .. })));
    }
}
