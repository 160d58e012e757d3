//! Named graph families selectable with `--family`.

use clap::{Args, ValueEnum};
use serde::Serialize;

use asdim::generators::{
    first_construction, grid, grid_ball, ptree, rescaled_grid_ball, star_line, t_tree, x_family,
    x_union, y_family, DEFAULT_CAP,
};
use asdim::graph::{Graph, LongEdgeGraph};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
#[allow(clippy::enum_variant_names)]
pub enum Family {
    /// `k`-dimensional grid with `side` vertices per axis.
    Grid,
    /// Grid with wrap-around, side >= 3.
    Torus,
    /// Path on `side` vertices.
    Path,
    /// Binary tree, `depth` levels, level-`l` edges of length 2^floor(l/k).
    Ptree,
    /// Path 0..=n with `i` pendant leaves at vertex `i`.
    StarLine,
    /// Unit lattice ball of radius `k` in dimension `n`.
    GridBall,
    /// Lattice ball of radius `k` in dimension `n`, edges of length 2^k.
    RescaledGridBall,
    /// Tree with 2n equidistant leaves.
    TTree,
    XFamily,
    YFamily,
    XUnion,
    FirstConstruction,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub side: Option<usize>,
    #[arg(long)]
    pub depth: Option<u32>,
    /// Refuse to materialize more vertices than this.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap_vertices: usize,
}

pub enum Built {
    Unit(Graph),
    Long(LongEdgeGraph),
}

impl Built {
    pub fn into_graph(self, cap: usize) -> Result<Graph, CliError> {
        match self {
            Built::Unit(g) if g.vertex_count() > cap => Err(CliError::Core(asdim::Error::CapExceeded {
                what: "vertex count",
                size: g.vertex_count() as u128,
                cap: cap as u128,
            })),
            Built::Unit(g) => Ok(g),
            Built::Long(g) => Ok(g.subdivide(cap)?),
        }
    }
}

impl FamilyArgs {
    fn side(&self) -> Result<usize, CliError> {
        self.side.ok_or_else(|| CliError::Usage("this family needs --side".into()))
    }

    fn n_or(&self, default: u32) -> u32 {
        self.n.unwrap_or(default)
    }

    pub fn ptree_params(&self) -> (u32, u32) {
        (self.k.unwrap_or(2), self.depth.unwrap_or(8))
    }

    pub fn ball_params(&self) -> (u32, u32) {
        (self.n_or(2), self.k.unwrap_or(2))
    }

    pub fn label(&self) -> String {
        let name = self
            .family
            .and_then(|f| f.to_possible_value())
            .map_or("graph".to_string(), |v| v.get_name().to_string());
        let mut parts = vec![name];
        for (key, value) in [
            ("n", self.n.map(|v| v as u64)),
            ("k", self.k.map(|v| v as u64)),
            ("side", self.side.map(|v| v as u64)),
            ("depth", self.depth.map(|v| v as u64)),
        ] {
            if let Some(v) = value {
                parts.push(format!("{key}={v}"));
            }
        }
        parts.join(" ")
    }

    pub fn build(&self) -> Result<Built, CliError> {
        let cap = self.cap_vertices;
        let family = self
            .family
            .ok_or_else(|| CliError::Usage("either --graph or --family is required".into()))?;
        let built = match family {
            Family::Grid => Built::Unit(grid(self.k.unwrap_or(2), self.side()?, false, cap)?),
            Family::Torus => Built::Unit(grid(self.k.unwrap_or(2), self.side()?, true, cap)?),
            Family::Path => Built::Unit(grid(1, self.side()?, false, cap)?),
            Family::Ptree => {
                let (k, depth) = self.ptree_params();
                Built::Long(ptree(k, depth, cap)?)
            }
            Family::StarLine => {
                let n = self.n_or(8) as u128;
                let total = n + 1 + n * (n + 1) / 2;
                if total > cap as u128 {
                    return Err(CliError::Core(asdim::Error::CapExceeded {
                        what: "vertex count",
                        size: total,
                        cap: cap as u128,
                    }));
                }
                Built::Unit(star_line(n as usize)?)
            }
            Family::GridBall => {
                let (n, k) = self.ball_params();
                Built::Long(grid_ball(n, k as u64, 1, cap)?)
            }
            Family::RescaledGridBall => {
                let (n, k) = self.ball_params();
                Built::Long(rescaled_grid_ball(n, k, cap)?)
            }
            Family::TTree => Built::Long(t_tree(self.n_or(4))?),
            Family::XFamily => Built::Long(x_family(self.n_or(2), self.k.unwrap_or(3))?),
            Family::YFamily => Built::Long(y_family(self.n_or(2), self.k.unwrap_or(3))?),
            Family::XUnion => Built::Long(x_union(self.n_or(2), self.k.unwrap_or(3))?),
            Family::FirstConstruction => Built::Long(first_construction(self.n_or(2))?),
        };
        Ok(built)
    }
}
