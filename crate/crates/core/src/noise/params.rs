use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::channel::{PauliChannel1Q, PauliChannel2Q};
use crate::error::{Error, Result};

/// Noise strengths of every DPQA operation, stored unscaled together with a
/// global multiplier. Accessors return the scaled channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Local single-qubit gate, depolarizing `p` (each of X, Y, Z at `p`).
    lue: f64,
    /// Global single-qubit gate, depolarizing `p`.
    gue: f64,
    /// Per atom per move step.
    mve: PauliChannel1Q,
    /// Unpaired atom during a global CZ pulse.
    spe: PauliChannel1Q,
    /// Each CZ pair.
    cz: PauliChannel2Q,
    /// Before readout.
    spam: PauliChannel1Q,
    scale: f64,
}

/// Keys of the flat config format, in write order.
pub const CONFIG_KEYS: [&str; 13] = [
    "lue.p",
    "gue.p",
    "mve.px",
    "mve.py",
    "mve.pz",
    "spe.px",
    "spe.py",
    "spe.pz",
    "cz.pz_class",
    "cz.other_class",
    "spam.px",
    "spam.py",
    "spam.pz",
];

impl NoiseParams {
    pub fn new(
        lue: f64,
        gue: f64,
        mve: PauliChannel1Q,
        spe: PauliChannel1Q,
        cz: PauliChannel2Q,
        spam: PauliChannel1Q,
    ) -> Result<Self> {
        let p = Self {
            lue,
            gue,
            mve,
            spe,
            cz,
            spam,
            scale: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// All channels off.
    pub fn zero() -> Self {
        Self {
            lue: 0.0,
            gue: 0.0,
            mve: PauliChannel1Q::identity(),
            spe: PauliChannel1Q::identity(),
            cz: PauliChannel2Q::identity(),
            spam: PauliChannel1Q::identity(),
            scale: 1.0,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn lue(&self) -> PauliChannel1Q {
        PauliChannel1Q {
            px: self.lue,
            py: self.lue,
            pz: self.lue,
        }
        .scaled(self.scale)
    }

    pub fn gue(&self) -> PauliChannel1Q {
        PauliChannel1Q {
            px: self.gue,
            py: self.gue,
            pz: self.gue,
        }
        .scaled(self.scale)
    }

    pub fn mve(&self) -> PauliChannel1Q {
        self.mve.scaled(self.scale)
    }

    pub fn spe(&self) -> PauliChannel1Q {
        self.spe.scaled(self.scale)
    }

    pub fn cz(&self) -> PauliChannel2Q {
        self.cz.scaled(self.scale)
    }

    pub fn spam(&self) -> PauliChannel1Q {
        self.spam.scaled(self.scale)
    }

    /// Scaled depolarizing parameter of local gates.
    pub fn lue_p(&self) -> f64 {
        self.lue * self.scale
    }

    pub fn gue_p(&self) -> f64 {
        self.gue * self.scale
    }

    pub fn is_noiseless(&self) -> bool {
        self.scale == 0.0
            || [self.lue(), self.gue(), self.mve(), self.spe(), self.spam()]
                .iter()
                .all(|c| c.error_probability() == 0.0)
                && self.cz().error_probability() == 0.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(Error::InvalidNoise(format!(
                "scale {} must be finite and >= 0",
                self.scale
            )));
        }
        self.lue().validate()?;
        self.gue().validate()?;
        self.mve().validate()?;
        self.spe().validate()?;
        self.cz().validate()?;
        self.spam().validate()
    }

    /// Flat `key = value` text; values are unscaled, `scale` is written last.
    pub fn to_config_string(&self) -> Result<String> {
        let (pz, other) = self.cz.class_values().ok_or_else(|| {
            Error::InvalidNoise("CZ channel is not Z-biased; cannot write class values".into())
        })?;
        let values = [
            self.lue,
            self.gue,
            self.mve.px,
            self.mve.py,
            self.mve.pz,
            self.spe.px,
            self.spe.py,
            self.spe.pz,
            pz,
            other,
            self.spam.px,
            self.spam.py,
            self.spam.pz,
        ];
        let mut s = String::new();
        for (k, v) in CONFIG_KEYS.iter().zip(values) {
            writeln!(s, "{k} = {v:e}").unwrap();
        }
        writeln!(s, "scale = {}", self.scale).unwrap();
        Ok(s)
    }

    /// Parses the flat format. Keys absent from `text` keep their value in
    /// `base`; `scale`, when present, multiplies the base scale.
    pub fn from_config_str(text: &str, base: &NoiseParams) -> Result<Self> {
        let mut p = *base;
        let (mut pz, mut other) = base.cz.class_values().unwrap_or((0.0, 0.0));
        let mut cz_touched = false;
        let mut scale = 1.0;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: n + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| err(format!("bad number for {key}: {e}")))?;
            match key {
                "lue.p" => p.lue = value,
                "gue.p" => p.gue = value,
                "mve.px" => p.mve.px = value,
                "mve.py" => p.mve.py = value,
                "mve.pz" => p.mve.pz = value,
                "spe.px" => p.spe.px = value,
                "spe.py" => p.spe.py = value,
                "spe.pz" => p.spe.pz = value,
                "cz.pz_class" => (pz, cz_touched) = (value, true),
                "cz.other_class" => (other, cz_touched) = (value, true),
                "spam.px" => p.spam.px = value,
                "spam.py" => p.spam.py = value,
                "spam.pz" => p.spam.pz = value,
                "scale" => scale = value,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if cz_touched {
            p.cz = PauliChannel2Q::z_biased(pz, other)?;
        }
        p.validate()?;
        scale_params(&p, scale)
    }
}

/// Baseline DPQA noise strengths.
pub fn baseline_params() -> NoiseParams {
    NoiseParams {
        lue: 4e-3,
        gue: 4e-4,
        mve: PauliChannel1Q {
            px: 3e-5,
            py: 3e-5,
            pz: 3e-3,
        },
        spe: PauliChannel1Q {
            px: 5e-4,
            py: 5e-4,
            pz: 2.5e-3,
        },
        cz: PauliChannel2Q::z_biased(1.5e-3, 1.5e-4).expect("baseline CZ channel is valid"),
        spam: PauliChannel1Q {
            px: 6e-3,
            py: 0.0,
            pz: 0.0,
        },
        scale: 1.0,
    }
}

/// Multiplies every probability by `s`.
pub fn scale_params(params: &NoiseParams, s: f64) -> Result<NoiseParams> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidNoise(format!(
            "scale factor {s} must be finite and >= 0"
        )));
    }
    let p = NoiseParams {
        scale: params.scale * s,
        ..*params
    };
    p.validate()?;
    Ok(p)
}
