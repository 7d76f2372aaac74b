//! Bit-exact microframe payload codecs: a frame plan binds a profile and
//! a multiplexing configuration to one of three event-embedding modes.
//!
//! Canonical layout: rounds in order, each round holding its root bits
//! (least-significant first) then its affix bits; the partial round after
//! the complete rounds; the spare bits trailing at `v-s..v`.

use serde::Serialize;

use crate::bits::Bits;
use crate::engine::{decode_round, encode_round, RoundCodeword};
use crate::error::{Error, Result};
use crate::model::{
    Alphabet, Profile, ProfileCatalog, TransferUnit, PROFILE_KR_10G, PROFILE_T1_1000,
    PROFILE_T_10G,
};
use crate::plan::{configure, MuxConfig};

/// How event information rides inside the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedMode {
    /// Event position stamped into the spare bits; the duty stream is
    /// carried untouched.
    SpareStamp,
    /// Event unit substituted into the stream; the pushed-off last unit
    /// is kept in a 10-bit save box inside the spare bits.
    SaveBox,
    /// Event unit inserted into an extended stream with one integral
    /// spare unit slot at the end.
    IntegralUnit,
}

/// An event observation to embed, or the lack of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum EventStamp {
    Absent,
    /// Position within the frame period, spare-stamp coded.
    Frame { position: u64 },
    /// Octet index in the stream plus the position code within that
    /// octet time.
    Octet { index: u32, code: u8 },
}

/// The transfer unit pushed off the stream end by a save-box insertion.
///
/// Wire form is a 10-bit record: bit 9 occupancy, bit 8 type (0 data,
/// 1 ctrl), bits 0..8 the payload. Unused bits are zeroed on encode and
/// ignored on decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaveBox {
    Empty,
    Data(u8),
    Ctrl(u8),
}

pub const SAVE_BOX_BITS: usize = 10;

impl SaveBox {
    pub fn to_bits(self) -> Bits {
        let mut bits = Bits::zeros(SAVE_BOX_BITS);
        match self {
            SaveBox::Empty => {}
            SaveBox::Data(octet) => {
                bits.store_u64(0, 8, octet as u64);
                bits.set(9, true);
            }
            SaveBox::Ctrl(code) => {
                bits.store_u64(0, 3, (code & 0x7) as u64);
                bits.set(8, true);
                bits.set(9, true);
            }
        }
        bits
    }

    pub fn from_bits(bits: &Bits) -> Result<SaveBox> {
        if bits.len() != SAVE_BOX_BITS {
            return Err(Error::SaveBoxMismatch {
                reason: "save box field must be 10 bits",
            });
        }
        if !bits.get(9) {
            return Ok(SaveBox::Empty);
        }
        if bits.get(8) {
            Ok(SaveBox::Ctrl(bits.load_u64(0, 3) as u8))
        } else {
            Ok(SaveBox::Data(bits.load_u64(0, 8) as u8))
        }
    }

    fn keep(unit: TransferUnit) -> Result<SaveBox> {
        match unit {
            TransferUnit::Data(octet) => Ok(SaveBox::Data(octet)),
            TransferUnit::Ctrl(code) => Ok(SaveBox::Ctrl(code as u8)),
            _ => Err(Error::SaveBoxMismatch {
                reason: "only data/ctrl units can be kept",
            }),
        }
    }

    fn unit(self) -> Option<TransferUnit> {
        match self {
            SaveBox::Empty => None,
            SaveBox::Data(octet) => Some(TransferUnit::Data(octet)),
            SaveBox::Ctrl(code) => Some(TransferUnit::Ctrl(code as u16)),
        }
    }
}

/// A profile-bound bit layout: where every round's root and affix bits
/// and every spare bit live inside the payload.
#[derive(Debug, Clone)]
pub struct FramePlan {
    pub name: String,
    pub profile: Profile,
    pub alphabet: Alphabet,
    pub config: MuxConfig,
    pub mode: EmbedMode,
}

impl FramePlan {
    pub fn build(
        name: &str,
        profile: Profile,
        alphabet: Alphabet,
        config: MuxConfig,
        mode: EmbedMode,
    ) -> Result<FramePlan> {
        if alphabet.modulus() != config.modulus {
            return Err(Error::PlanMismatch {
                reason: format!(
                    "alphabet modulus {} vs config modulus {}",
                    alphabet.modulus(),
                    config.modulus
                ),
            });
        }
        if profile.payload_bits != config.payload_bits {
            return Err(Error::PlanMismatch {
                reason: format!(
                    "profile payload {} bits vs config payload {} bits",
                    profile.payload_bits, config.payload_bits
                ),
            });
        }
        if config.gather != 1 {
            return Err(Error::PlanMismatch {
                reason: "frame codecs treat units individually (gathering factor 1)".into(),
            });
        }
        let expected_stream = match mode {
            EmbedMode::SpareStamp | EmbedMode::SaveBox => profile.units_per_frame,
            EmbedMode::IntegralUnit => profile.units_per_frame + 1,
        };
        if config.stream_units != expected_stream {
            return Err(Error::PlanMismatch {
                reason: format!(
                    "mode needs a stream of {} units, config covers {}",
                    expected_stream, config.stream_units
                ),
            });
        }
        match mode {
            EmbedMode::SpareStamp => {
                if config.spare_bits == 0 || config.spare_bits > 64 {
                    return Err(Error::PlanMismatch {
                        reason: format!(
                            "spare stamp needs 1..=64 spare bits, plan has {}",
                            config.spare_bits
                        ),
                    });
                }
            }
            EmbedMode::SaveBox => {
                if config.spare_bits as usize != SAVE_BOX_BITS {
                    return Err(Error::PlanMismatch {
                        reason: format!(
                            "save box needs exactly {SAVE_BOX_BITS} spare bits, plan has {}",
                            config.spare_bits
                        ),
                    });
                }
                if alphabet.event_codes() == 0 {
                    return Err(Error::PlanMismatch {
                        reason: "save box insertion needs an event band".into(),
                    });
                }
            }
            EmbedMode::IntegralUnit => {
                if alphabet.event_codes() == 0 {
                    return Err(Error::PlanMismatch {
                        reason: "integral insertion needs an event band".into(),
                    });
                }
            }
        }
        let plan = FramePlan {
            name: name.to_string(),
            profile,
            alphabet,
            config,
            mode,
        };
        plan.audit_layout()?;
        Ok(plan)
    }

    /// Rounds in the stream: `k` complete ones plus the partial one.
    pub fn round_count(&self) -> usize {
        (self.config.complete_rounds + self.config.partial_rounds) as usize
    }

    /// Geometry of one round: (payload offset, unit count, root bits,
    /// affix bits). The partial round is the last index.
    fn round_geometry(&self, round: usize) -> (usize, usize, usize, usize) {
        let cfg = &self.config;
        let complete = cfg.complete_rounds as usize;
        if round < complete {
            (
                round * cfg.bits_per_round as usize,
                cfg.units_per_round as usize,
                cfg.root_bits as usize,
                (cfg.bits_per_round - cfg.root_bits) as usize,
            )
        } else {
            debug_assert!(round == complete && cfg.partial_rounds == 1);
            (
                complete * cfg.bits_per_round as usize,
                cfg.partial_units as usize,
                cfg.partial_root as usize,
                (cfg.partial_bits - cfg.partial_root) as usize,
            )
        }
    }

    pub fn spare_offset(&self) -> usize {
        (self.config.payload_bits - self.config.spare_bits) as usize
    }

    pub fn spare_len(&self) -> usize {
        self.config.spare_bits as usize
    }

    /// Every payload bit must be owned by exactly one round field or
    /// spare slot; the canonical layout is sequential, so the audit is a
    /// coverage count plus per-round bound checks.
    fn audit_layout(&self) -> Result<()> {
        let mut covered = 0usize;
        let mut units = 0usize;
        for round in 0..self.round_count() {
            let (offset, count, root_bits, affix_bits) = self.round_geometry(round);
            if offset != covered {
                return Err(Error::PlanMismatch {
                    reason: format!("round {round} starts at {offset}, expected {covered}"),
                });
            }
            if affix_bits != count * self.alphabet.bypass_width() as usize {
                return Err(Error::PlanMismatch {
                    reason: format!("round {round} affix field does not match its unit count"),
                });
            }
            covered += root_bits + affix_bits;
            units += count;
        }
        if covered != self.spare_offset() || covered + self.spare_len() != self.config.payload_bits as usize
        {
            return Err(Error::PlanMismatch {
                reason: format!(
                    "layout covers {covered}+{} bits of {}",
                    self.spare_len(),
                    self.config.payload_bits
                ),
            });
        }
        if units != self.config.stream_units as usize {
            return Err(Error::PlanMismatch {
                reason: format!(
                    "rounds cover {units} units, target scope is {}",
                    self.config.stream_units
                ),
            });
        }
        Ok(())
    }

    pub fn payload_len(&self) -> usize {
        self.config.payload_bits as usize
    }
}

pub const PLAN_T1_1000: &str = "t1-1000";
pub const PLAN_T_10G: &str = "t-10g";
pub const PLAN_KR_10G: &str = "kr-10g";

pub const BUILTIN_PLAN_NAMES: [&str; 3] = [PLAN_T1_1000, PLAN_T_10G, PLAN_KR_10G];

/// The three shipped plans, one per profile and embedding mode.
pub fn builtin_plans() -> Vec<FramePlan> {
    let catalog = ProfileCatalog::builtin();
    let t1 = FramePlan::build(
        PLAN_T1_1000,
        catalog.get(PROFILE_T1_1000).unwrap().clone(),
        Alphabet::new(264, 8, 0).unwrap(),
        configure(3645, 264, 1, 1, 18, 450).unwrap(),
        EmbedMode::SpareStamp,
    )
    .unwrap();
    let t10 = FramePlan::build(
        PLAN_T_10G,
        catalog.get(PROFILE_T_10G).unwrap().clone(),
        Alphabet::new(272, 8, 8).unwrap(),
        configure(3250, 272, 1, 1, 10, 400).unwrap(),
        EmbedMode::SaveBox,
    )
    .unwrap();
    let kr = FramePlan::build(
        PLAN_KR_10G,
        catalog.get(PROFILE_KR_10G).unwrap().clone(),
        Alphabet::new(272, 8, 8).unwrap(),
        configure(2080, 272, 1, 1, 11, 257).unwrap(),
        EmbedMode::IntegralUnit,
    )
    .unwrap();
    vec![t1, t10, kr]
}

pub fn builtin_plan(name: &str) -> Result<FramePlan> {
    builtin_plans()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPlan(name.to_string()))
}

/// Substitute an event unit at `index`, shifting the tail right by one;
/// the last unit goes into the save box instead of being lost.
pub fn insert_event_savebox(
    stream: &[u32],
    index: usize,
    code: u8,
    alphabet: &Alphabet,
) -> Result<(Vec<u32>, SaveBox)> {
    if index >= stream.len() {
        return Err(Error::EventIndexOutOfRange {
            index,
            limit: stream.len(),
        });
    }
    let event_value = alphabet.unit_value(&TransferUnit::Event(code as u16))?;
    let kept = alphabet.value_unit(stream[stream.len() - 1])?;
    let mut shifted = Vec::with_capacity(stream.len());
    shifted.extend_from_slice(&stream[..index]);
    shifted.push(event_value);
    shifted.extend_from_slice(&stream[index..stream.len() - 1]);
    Ok((shifted, SaveBox::keep(kept)?))
}

/// A restored duty value stream plus the event found in it, if any.
pub type ExtractedStream = (Vec<u32>, Option<(usize, u8)>);

/// Inverse of [`insert_event_savebox`]: locate the single event unit,
/// close the gap, and append the boxed unit. With no event the box must
/// be empty and the stream passes through.
pub fn extract_event_savebox(
    stream: &[u32],
    savebox: &SaveBox,
    alphabet: &Alphabet,
) -> Result<ExtractedStream> {
    let event_at = find_single_event(stream, alphabet)?;
    match event_at {
        None => {
            if *savebox != SaveBox::Empty {
                return Err(Error::SaveBoxMismatch {
                    reason: "box holds a unit but the stream has no event",
                });
            }
            Ok((stream.to_vec(), None))
        }
        Some(index) => {
            let boxed = savebox.unit().ok_or(Error::SaveBoxMismatch {
                reason: "stream has an event but the box is empty",
            })?;
            let code = (stream[index] - 256 - alphabet.ctrl_codes()) as u8;
            let mut restored = Vec::with_capacity(stream.len());
            restored.extend_from_slice(&stream[..index]);
            restored.extend_from_slice(&stream[index + 1..]);
            restored.push(alphabet.unit_value(&boxed)?);
            Ok((restored, Some((index, code))))
        }
    }
}

/// Insert an event unit at `index` of an extended stream one unit longer
/// than the duty; without an event the spare slot takes a zero filler.
pub fn insert_event_integral(
    duty: &[u32],
    event: Option<(usize, u8)>,
    alphabet: &Alphabet,
) -> Result<Vec<u32>> {
    let mut extended = Vec::with_capacity(duty.len() + 1);
    match event {
        None => {
            extended.extend_from_slice(duty);
            // filler serializes as value 0; position disambiguates it
            extended.push(0);
        }
        Some((index, code)) => {
            if index >= duty.len() {
                return Err(Error::EventIndexOutOfRange {
                    index,
                    limit: duty.len(),
                });
            }
            let event_value = alphabet.unit_value(&TransferUnit::Event(code as u16))?;
            extended.extend_from_slice(&duty[..index]);
            extended.push(event_value);
            extended.extend_from_slice(&duty[index..]);
        }
    }
    Ok(extended)
}

/// Inverse of [`insert_event_integral`]: the event unit itself is the
/// shift marker. With no event unit anywhere, the spare slot is ignored.
pub fn extract_event_integral(extended: &[u32], alphabet: &Alphabet) -> Result<ExtractedStream> {
    assert!(!extended.is_empty());
    let duty_len = extended.len() - 1;
    match find_single_event(extended, alphabet)? {
        None => Ok((extended[..duty_len].to_vec(), None)),
        Some(index) => {
            if index == duty_len {
                return Err(Error::EventInSpareSlot);
            }
            let code = (extended[index] - 256 - alphabet.ctrl_codes()) as u8;
            let mut duty = Vec::with_capacity(duty_len);
            duty.extend_from_slice(&extended[..index]);
            duty.extend_from_slice(&extended[index + 1..]);
            Ok((duty, Some((index, code))))
        }
    }
}

fn find_single_event(stream: &[u32], alphabet: &Alphabet) -> Result<Option<usize>> {
    let mut found = None;
    for (index, &value) in stream.iter().enumerate() {
        if alphabet.is_event_value(value) {
            match found {
                None => found = Some(index),
                Some(first) => {
                    return Err(Error::MultipleEvents {
                        first,
                        second: index,
                    })
                }
            }
        }
    }
    Ok(found)
}

/// Pack an event position into `width` spare bits: bit 0 presence, the
/// rest the position, least-significant first. Absent packs to zeros.
pub fn pack_stamp(width: usize, stamp: &EventStamp) -> Result<Bits> {
    let mut bits = Bits::zeros(width);
    match *stamp {
        EventStamp::Absent => {}
        EventStamp::Frame { position } => {
            let field = width - 1;
            if field < 64 && position >> field != 0 {
                return Err(Error::StampOverflow {
                    position,
                    width: field as u32,
                });
            }
            bits.set(0, true);
            bits.store_u64(1, field, position);
        }
        EventStamp::Octet { .. } => {
            return Err(Error::EventModeMismatch {
                reason: "spare-stamp plans take a frame position, not an octet index",
            })
        }
    }
    Ok(bits)
}

/// Inverse of [`pack_stamp`]. Position bits are ignored when the
/// presence bit is clear.
pub fn unpack_stamp(bits: &Bits) -> Result<EventStamp> {
    if bits.is_empty() {
        return Err(Error::PlanMismatch {
            reason: "stamp field is empty".into(),
        });
    }
    if !bits.get(0) {
        return Ok(EventStamp::Absent);
    }
    Ok(EventStamp::Frame {
        position: bits.load_u64(1, bits.len() - 1),
    })
}

/// Everything a payload decodes into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame {
    pub duty: Vec<TransferUnit>,
    pub event: EventStamp,
    pub spare: Bits,
}

/// Encode one frame: run the mode pre-pass over the duty, write every
/// round through the representation engine, then the spare bits.
pub fn encode_frame(plan: &FramePlan, duty: &[TransferUnit], event: &EventStamp) -> Result<Bits> {
    let expected = plan.profile.units_per_frame as usize;
    if duty.len() != expected {
        return Err(Error::DutyLengthMismatch {
            expected,
            actual: duty.len(),
        });
    }
    let mut values = Vec::with_capacity(duty.len());
    for (index, unit) in duty.iter().enumerate() {
        match unit {
            TransferUnit::Data(_) | TransferUnit::Ctrl(_) => values.push(plan.alphabet.unit_value(unit)?),
            other => {
                return Err(Error::IllegalDutyKind {
                    index,
                    kind: other.kind_name(),
                })
            }
        }
    }

    let octet_event = |stamp: &EventStamp| -> Result<Option<(usize, u8)>> {
        match *stamp {
            EventStamp::Absent => Ok(None),
            EventStamp::Octet { index, code } => {
                if code as u32 >= plan.alphabet.event_codes() {
                    return Err(Error::EventCodeOutOfRange {
                        code: code as u32,
                        limit: plan.alphabet.event_codes(),
                    });
                }
                Ok(Some((index as usize, code)))
            }
            EventStamp::Frame { .. } => Err(Error::EventModeMismatch {
                reason: "this plan takes an octet index and position code",
            }),
        }
    };

    let (stream, spare) = match plan.mode {
        EmbedMode::SpareStamp => (values, pack_stamp(plan.spare_len(), event)?),
        EmbedMode::SaveBox => match octet_event(event)? {
            None => (values, SaveBox::Empty.to_bits()),
            Some((index, code)) => {
                let (stream, savebox) =
                    insert_event_savebox(&values, index, code, &plan.alphabet)?;
                (stream, savebox.to_bits())
            }
        },
        EmbedMode::IntegralUnit => (
            insert_event_integral(&values, octet_event(event)?, &plan.alphabet)?,
            Bits::zeros(plan.spare_len()),
        ),
    };
    debug_assert_eq!(stream.len(), plan.config.stream_units as usize);

    let mut payload = Bits::zeros(plan.payload_len());
    let mut consumed = 0usize;
    for round in 0..plan.round_count() {
        let (offset, count, root_bits, _) = plan.round_geometry(round);
        let codeword = encode_round(&stream[consumed..consumed + count], &plan.alphabet)?;
        payload.store_uint(offset, root_bits, &codeword.root);
        payload.copy_from(offset + root_bits, &codeword.affix);
        consumed += count;
    }
    payload.copy_from(plan.spare_offset(), &spare);
    Ok(payload)
}

/// Exact inverse of [`encode_frame`] for every legal input. Non-native
/// roots report their round index; unassigned unit values surface from
/// the value mapping.
pub fn decode_frame(plan: &FramePlan, payload: &Bits) -> Result<DecodedFrame> {
    if payload.len() != plan.payload_len() {
        return Err(Error::PayloadLengthMismatch {
            expected: plan.payload_len(),
            actual: payload.len(),
        });
    }
    let mut stream = Vec::with_capacity(plan.config.stream_units as usize);
    for round in 0..plan.round_count() {
        let (offset, count, root_bits, affix_bits) = plan.round_geometry(round);
        let codeword = RoundCodeword {
            root: payload.load_uint(offset, root_bits),
            affix: payload.slice(offset + root_bits, affix_bits),
            count,
        };
        let values = decode_round(&codeword, &plan.alphabet).map_err(|e| match e {
            Error::RootNotNative => Error::FrameRootNotNative { round },
            other => Error::RoundDecode {
                round,
                source: Box::new(other),
            },
        })?;
        stream.extend(values);
    }
    let spare = payload.slice(plan.spare_offset(), plan.spare_len());

    let (duty_values, event) = match plan.mode {
        EmbedMode::SpareStamp => {
            if find_single_event(&stream, &plan.alphabet)?.is_some() {
                return Err(Error::EventModeMismatch {
                    reason: "spare-stamp streams must not carry event units",
                });
            }
            (stream, unpack_stamp(&spare)?)
        }
        EmbedMode::SaveBox => {
            let savebox = SaveBox::from_bits(&spare)?;
            let (duty, event) = extract_event_savebox(&stream, &savebox, &plan.alphabet)?;
            (duty, octet_stamp(event))
        }
        EmbedMode::IntegralUnit => {
            let (duty, event) = extract_event_integral(&stream, &plan.alphabet)?;
            (duty, octet_stamp(event))
        }
    };

    let mut duty = Vec::with_capacity(duty_values.len());
    for value in duty_values {
        duty.push(plan.alphabet.value_unit(value)?);
    }
    Ok(DecodedFrame { duty, event, spare })
}

fn octet_stamp(event: Option<(usize, u8)>) -> EventStamp {
    match event {
        None => EventStamp::Absent,
        Some((index, code)) => EventStamp::Octet {
            index: index as u32,
            code,
        },
    }
}

/// Helper for tests and harnesses: the all-zero duty of a plan.
pub fn zero_duty(plan: &FramePlan) -> Vec<TransferUnit> {
    vec![TransferUnit::Data(0); plan.profile.units_per_frame as usize]
}
