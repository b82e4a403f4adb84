//! Problem specifications, shells and electronic configurations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::dot;
use crate::radial::{
    dirac_channel_matrix, schrodinger_channel_matrix, Channel, ChannelOperator, ChannelSpace, Layout,
    NuclearModel, RadialGrid,
};

/// One-body model: Dirac with speed of light `c`, or Schrödinger.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hamiltonian {
    Dirac { c: f64 },
    Schrodinger,
}

impl Hamiltonian {
    pub fn layout(&self) -> Layout {
        match self {
            Hamiltonian::Dirac { .. } => Layout::Dirac,
            Hamiltonian::Schrodinger => Layout::Schrodinger,
        }
    }

    pub fn c(&self) -> Option<f64> {
        match self {
            Hamiltonian::Dirac { c } => Some(*c),
            Hamiltonian::Schrodinger => None,
        }
    }

    /// Rest energy per electron (`c²` or 0).
    pub fn rest_energy(&self) -> f64 {
        self.c().map(|c| c * c).unwrap_or(0.0)
    }
}

/// Channels the solvers accept.
pub const SUPPORTED_DIRAC: [i32; 3] = [-1, 1, -2];
pub const SUPPORTED_SCHRODINGER: [u32; 2] = [0, 1];

pub fn check_supported(channel: Channel) -> Result<()> {
    let ok = match channel {
        Channel::Dirac(k) => SUPPORTED_DIRAC.contains(&k),
        Channel::Schrodinger(l) => SUPPORTED_SCHRODINGER.contains(&l),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedChannel(format!(
            "{channel:?} (supported: kappa in {SUPPORTED_DIRAC:?}, l in {SUPPORTED_SCHRODINGER:?})"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub n: u32,
    pub channel: Channel,
    pub occupation: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScfControls {
    pub mixing: f64,
    pub tol_energy: f64,
    pub tol_orbital: f64,
    pub max_iter: usize,
    pub level_shift: f64,
}

impl Default for ScfControls {
    fn default() -> Self {
        Self {
            mixing: 0.5,
            tol_energy: 1e-10,
            tol_orbital: 1e-8,
            max_iter: 200,
            level_shift: 0.0,
        }
    }
}

/// Everything needed to set up a self-consistent calculation.
#[derive(Clone, Debug)]
pub struct Problem {
    pub nuclear: NuclearModel,
    pub hamiltonian: Hamiltonian,
    pub grid: RadialGrid,
    pub shells: Vec<ShellSpec>,
    pub controls: ScfControls,
    space: Arc<ChannelSpace>,
}

impl Problem {
    pub fn new(
        nuclear: NuclearModel,
        hamiltonian: Hamiltonian,
        grid: RadialGrid,
        shells: Vec<ShellSpec>,
        controls: ScfControls,
    ) -> Result<Self> {
        if let Hamiltonian::Dirac { c } = hamiltonian {
            if !(c > 0.0) || !c.is_finite() {
                return Err(invalid(format!("speed of light must be positive, got {c}")));
            }
        }
        validate_shells(&shells, hamiltonian.layout(), nuclear.z, false)?;
        Self::build(nuclear, hamiltonian, grid, shells, controls)
    }

    /// Like [`Problem::new`] but one shell may be partially filled. Such a
    /// problem is only meaningful for the Fock-space open-shell experiment;
    /// its energy is the average over the configuration.
    pub fn open_shell(
        nuclear: NuclearModel,
        hamiltonian: Hamiltonian,
        grid: RadialGrid,
        shells: Vec<ShellSpec>,
        controls: ScfControls,
    ) -> Result<Self> {
        if let Hamiltonian::Dirac { c } = hamiltonian {
            if !(c > 0.0) || !c.is_finite() {
                return Err(invalid(format!("speed of light must be positive, got {c}")));
            }
        }
        validate_shells(&shells, hamiltonian.layout(), nuclear.z, true)?;
        Self::build(nuclear, hamiltonian, grid, shells, controls)
    }

    fn build(
        nuclear: NuclearModel,
        hamiltonian: Hamiltonian,
        grid: RadialGrid,
        shells: Vec<ShellSpec>,
        controls: ScfControls,
    ) -> Result<Self> {
        if !(controls.mixing > 0.0 && controls.mixing <= 1.0) {
            return Err(invalid(format!("mixing must lie in (0, 1], got {}", controls.mixing)));
        }
        if controls.max_iter == 0 {
            return Err(invalid("max_iter must be positive"));
        }
        let space = Arc::new(ChannelSpace::new(&grid, hamiltonian.layout()));
        Ok(Self {
            nuclear,
            hamiltonian,
            grid,
            shells,
            controls,
            space,
        })
    }

    pub fn space(&self) -> &Arc<ChannelSpace> {
        &self.space
    }

    pub fn electron_count(&self) -> usize {
        self.shells.iter().map(|s| s.occupation).sum()
    }

    /// Same problem at a different speed of light.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(
            self.nuclear,
            Hamiltonian::Dirac { c },
            self.grid.clone(),
            self.shells.clone(),
            self.controls,
        )
    }

    /// Channels carrying occupied shells, in first-appearance order.
    pub fn occupied_channels(&self) -> Vec<Channel> {
        let mut out: Vec<Channel> = Vec::new();
        for s in &self.shells {
            if !out.contains(&s.channel) {
                out.push(s.channel);
            }
        }
        out
    }

    /// Bare one-body operator of a channel (nuclear potential only).
    pub fn one_body(&self, channel: Channel) -> Result<ChannelOperator> {
        self.one_body_with(channel, &self.nuclear)
    }

    pub fn one_body_with(&self, channel: Channel, nuclear: &NuclearModel) -> Result<ChannelOperator> {
        let v: Vec<f64> = self.space.radii().iter().map(|&r| nuclear.potential_at(r)).collect();
        match (self.hamiltonian, channel) {
            (Hamiltonian::Dirac { c }, Channel::Dirac(k)) => dirac_channel_matrix(&self.grid, k, c, &v),
            (Hamiltonian::Schrodinger, Channel::Schrodinger(l)) => {
                schrodinger_channel_matrix(&self.grid, l as i64, &v)
            }
            _ => Err(Error::UnsupportedChannel(format!(
                "{channel:?} does not match the {:?} Hamiltonian",
                self.hamiltonian
            ))),
        }
    }

    /// True for the one-electron configuration.
    pub fn is_single_electron(&self) -> bool {
        self.electron_count() == 1
    }

    /// True when a shell is partially filled and there is more than one
    /// electron (see [`Problem::open_shell`]).
    pub fn has_open_shell(&self) -> bool {
        !self.is_single_electron() && self.shells.iter().any(|s| s.occupation != s.channel.capacity())
    }
}

fn validate_shells(shells: &[ShellSpec], layout: Layout, z: f64, allow_open: bool) -> Result<()> {
    let n_el: usize = shells.iter().map(|s| s.occupation).sum();
    if n_el as f64 >= z + 1.0 {
        return Err(Error::Domain(format!(
            "N = {n_el} violates N < Z + 1 with Z = {z}"
        )));
    }
    for (i, s) in shells.iter().enumerate() {
        if s.channel.layout() != layout {
            return Err(invalid(format!(
                "shell {i} ({:?}) does not match the Hamiltonian",
                s.channel
            )));
        }
        check_supported(s.channel)?;
        let cap = s.channel.capacity();
        let single = n_el == 1 && s.occupation == 1;
        let partial = allow_open && s.occupation > 0 && s.occupation < cap;
        if s.occupation != cap && !single && !partial {
            return Err(invalid(format!(
                "shell {i}: occupation {} must equal {} (closed shell); a single electron is the only open shell allowed",
                s.occupation, cap
            )));
        }
    }
    if allow_open && n_el > 1 {
        let partial = shells.iter().filter(|s| s.occupation != s.channel.capacity()).count();
        if partial != 1 {
            return Err(invalid(format!("an open-shell problem needs exactly one partially filled shell, got {partial}")));
        }
    }
    // principal numbers: n > l, distinct within a channel, and consecutive
    // (ground configuration) unless a single electron is placed on purpose
    let mut channels: Vec<Channel> = shells.iter().map(|s| s.channel).collect();
    channels.sort();
    channels.dedup();
    for ch in channels {
        let mut ns: Vec<u32> = shells.iter().filter(|s| s.channel == ch).map(|s| s.n).collect();
        ns.sort_unstable();
        if ns[0] <= ch.l() || ns.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid(format!(
                "channel {ch}: principal numbers must be distinct and exceed l = {}, got {ns:?}",
                ch.l()
            )));
        }
        if n_el > 1 && ns.iter().enumerate().any(|(i, n)| *n != ch.l() + 1 + i as u32) {
            return Err(invalid(format!(
                "channel {ch}: closed-shell configurations must fill levels from n = {} upward, got {ns:?}",
                ch.l() + 1
            )));
        }
    }
    Ok(())
}

/// An occupied radial orbital.
#[derive(Clone, Debug, PartialEq)]
pub struct Shell {
    pub n: u32,
    pub channel: Channel,
    pub occupation: usize,
    /// Coordinate vector (see [`ChannelSpace`]).
    pub coords: Vec<f64>,
    /// Eigenvalue minus the rest energy (`ε - c²`, or `ε` for Schrödinger).
    pub binding: f64,
}

impl Shell {
    pub fn label(&self) -> String {
        format!("{}{}", self.n, self.channel)
    }
}

/// Orbitals plus the problem they belong to.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub problem: Problem,
    pub shells: Vec<Shell>,
}

pub type ElectronicConfiguration = Configuration;

impl Configuration {
    pub fn electron_count(&self) -> usize {
        self.shells.iter().map(|s| s.occupation).sum()
    }

    pub fn space(&self) -> &Arc<ChannelSpace> {
        self.problem.space()
    }

    pub fn rest_energy(&self) -> f64 {
        self.problem.hamiltonian.rest_energy()
    }

    /// Physical eigenvalue of shell `i`.
    pub fn epsilon(&self, i: usize) -> f64 {
        self.shells[i].binding + self.rest_energy()
    }

    /// Largest deviation of the channel-wise Gram matrix from the identity.
    pub fn gram_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.shells.iter().enumerate() {
            for b in &self.shells[..=i] {
                if a.channel != b.channel {
                    continue;
                }
                let g = dot(&a.coords, &b.coords);
                let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Large-component samples on the nodes.
    pub fn large(&self, i: usize) -> Vec<f64> {
        self.space().large(&self.shells[i].coords)
    }

    /// Small-component samples on the midpoints.
    pub fn small(&self, i: usize) -> Vec<f64> {
        self.space().small(&self.shells[i].coords)
    }
}

/// Flips the sign so that the large component starts out positive.
pub(crate) fn fix_sign(space: &ChannelSpace, x: &mut [f64]) {
    let large = space.large_coordinates(x);
    let peak = large.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(first) = large.iter().find(|v| v.abs() > 1e-3 * peak) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Number of sign changes of the large component, ignoring negligible values.
pub fn node_count(space: &ChannelSpace, x: &[f64]) -> usize {
    let large = space.large_coordinates(x);
    let peak = large.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut last = 0.0;
    let mut nodes = 0;
    for v in large {
        if v.abs() < 1e-6 * peak {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            nodes += 1;
        }
        last = v.signum();
    }
    nodes
}
