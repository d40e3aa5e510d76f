//! Restoration network F(y, z): two downsampling branches (degraded
//! image y and noise map z), residual-unit stacks, channel fusion, an
//! aggregation stack, and a shift-and-average deconvolution back to
//! full resolution. The noise input makes the mapping one-to-many:
//! different z draws yield different restorations of the same y.

use crate::error::{TensorError, TensorResult};
use crate::nn::{BnMode, Conv2d, Deconv2d, Padding, ParamMap, ResidualUnit};
use crate::rng::Rng;
use crate::tensor::{Real, Tensor};

pub const PROPOSAL_WIDTH: usize = 64;
pub const PROPOSAL_BRANCH_UNITS: usize = 5;
pub const PROPOSAL_AGG_UNITS: usize = 10;

pub struct ProposalNet<T: Real = f32> {
    y_down: Conv2d<T>,
    z_down: Conv2d<T>,
    y_res: Vec<ResidualUnit<T>>,
    z_res: Vec<ResidualUnit<T>>,
    fuse: Conv2d<T>,
    agg: Vec<ResidualUnit<T>>,
    up: Deconv2d<T>,
    channels: usize,
}

impl<T: Real> ProposalNet<T> {
    pub fn new(rng: &mut Rng, channels: usize) -> TensorResult<Self> {
        Self::with_units(
            rng,
            channels,
            PROPOSAL_BRANCH_UNITS,
            PROPOSAL_AGG_UNITS,
        )
    }

    /// Same topology with configurable stack depths; shallow variants
    /// keep receptive fields small for local-behaviour tests.
    pub fn with_units(
        rng: &mut Rng,
        channels: usize,
        branch_units: usize,
        agg_units: usize,
    ) -> TensorResult<Self> {
        let w = PROPOSAL_WIDTH;
        let y_down = Conv2d::new(rng, channels, w, 4, 2, Padding::Same)?;
        let z_down = Conv2d::new(rng, 1, w, 4, 2, Padding::Same)?;
        let mut y_res = Vec::new();
        let mut z_res = Vec::new();
        for _ in 0..branch_units {
            y_res.push(ResidualUnit::new(rng, w)?);
        }
        for _ in 0..branch_units {
            z_res.push(ResidualUnit::new(rng, w)?);
        }
        let fuse = Conv2d::new(rng, 2 * w, w, 1, 1, Padding::Same)?;
        let mut agg = Vec::new();
        for _ in 0..agg_units {
            agg.push(ResidualUnit::new(rng, w)?);
        }
        let up = Deconv2d::new(rng, w, channels, 4, 2)?;
        Ok(ProposalNet {
            y_down,
            z_down,
            y_res,
            z_res,
            fuse,
            agg,
            up,
            channels,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn set_mode(&self, mode: BnMode) {
        for u in self.y_res.iter().chain(&self.z_res).chain(&self.agg) {
            u.set_mode(mode);
        }
    }

    /// y is the degraded image in model range, z a one-channel noise
    /// map of the same spatial size. Both spatial dims must be even.
    pub fn forward(&self, y: &Tensor<T>, z: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let ys = y.shape();
        let zs = z.shape();
        if ys.len() != 4 || ys[1] != self.channels {
            return Err(TensorError::BadShape {
                op: "proposal",
                expected: format!("rank-4 NCHW with {} channels", self.channels),
                got: ys,
            });
        }
        if zs.len() != 4 || zs[0] != ys[0] || zs[1] != 1 || zs[2] != ys[2] || zs[3] != ys[3] {
            return Err(TensorError::BadShape {
                op: "proposal",
                expected: format!("noise [{}, 1, {}, {}]", ys[0], ys[2], ys[3]),
                got: zs,
            });
        }
        if ys[2] % 2 != 0 || ys[3] % 2 != 0 || ys[2] < 8 || ys[3] < 8 {
            return Err(TensorError::BadArg {
                op: "proposal",
                msg: format!("spatial dims {}×{} must be even and ≥ 8", ys[2], ys[3]),
            });
        }
        let mut hy = self.y_down.forward(y)?;
        for u in &self.y_res {
            hy = u.forward(&hy)?;
        }
        let mut hz = self.z_down.forward(z)?;
        for u in &self.z_res {
            hz = u.forward(&hz)?;
        }
        let mut h = self.fuse.forward(&hy.concat_ch(&hz)?)?;
        for u in &self.agg {
            h = u.forward(&h)?;
        }
        self.up.forward(&h)
    }

    pub fn param_map(&self) -> ParamMap<T> {
        let mut map = ParamMap::new();
        self.y_down.register("y_down", &mut map);
        self.z_down.register("z_down", &mut map);
        for (i, u) in self.y_res.iter().enumerate() {
            u.register(&format!("y_res{i}"), &mut map);
        }
        for (i, u) in self.z_res.iter().enumerate() {
            u.register(&format!("z_res{i}"), &mut map);
        }
        self.fuse.register("fuse", &mut map);
        for (i, u) in self.agg.iter().enumerate() {
            u.register(&format!("agg{i}"), &mut map);
        }
        self.up.register("up", &mut map);
        map
    }
}
