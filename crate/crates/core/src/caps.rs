//! Work caps for the exhaustive routines.
//!
//! Defaults are sized so each oracle finishes in seconds. They can be
//! overridden through the `HGP_CAPS` environment variable, e.g.
//! `HGP_CAPS="mis_vertices=28,price_enum_work=5000000"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CAPS_ENV: &str = "HGP_CAPS";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub mis_vertices: usize,
    pub im_vertices: usize,
    pub sim_all_orders_vertices: usize,
    pub sim_vertices: usize,
    pub bbis_vertices: usize,
    pub exact_bipartite_side: usize,
    pub general_block_work: u64,
    pub maxsat_vars: usize,
    pub fglss_vertices: usize,
    pub disperser_side: usize,
    pub disperser_subsets: u64,
    pub lemma_vertices: usize,
    pub udp_oracle_items: usize,
    pub udp_oracle_budgets: usize,
    pub smp_oracle_groups: usize,
    pub smp_oracle_items: usize,
    pub price_enum_work: u64,
}

impl Caps {
    pub const DESK: Caps = Caps {
        mis_vertices: 24,
        im_vertices: 24,
        sim_all_orders_vertices: 10,
        sim_vertices: 48,
        bbis_vertices: 20,
        exact_bipartite_side: 20,
        general_block_work: 10_000_000,
        maxsat_vars: 20,
        fglss_vertices: 4096,
        disperser_side: 24,
        disperser_subsets: 5_000_000,
        lemma_vertices: 20,
        udp_oracle_items: 6,
        udp_oracle_budgets: 8,
        smp_oracle_groups: 10,
        smp_oracle_items: 6,
        price_enum_work: 2_000_000,
    };

    /// Desk defaults with overrides from `HGP_CAPS` applied.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::DESK.with_overrides(&spec),
            Err(_) => Ok(Caps::DESK),
        }
    }

    /// Applies comma-separated `name=value` overrides.
    pub fn with_overrides(mut self, spec: &str) -> Result<Caps> {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::input(format!("cap override `{part}` is not name=value")))?;
            let value: u64 = value.trim().parse().map_err(|_| {
                Error::input(format!("cap override `{part}` has a non-integer value"))
            })?;
            let small = value as usize;
            match name.trim() {
                "mis_vertices" => self.mis_vertices = small,
                "im_vertices" => self.im_vertices = small,
                "sim_all_orders_vertices" => self.sim_all_orders_vertices = small,
                "sim_vertices" => self.sim_vertices = small,
                "bbis_vertices" => self.bbis_vertices = small,
                "exact_bipartite_side" => self.exact_bipartite_side = small,
                "general_block_work" => self.general_block_work = value,
                "maxsat_vars" => self.maxsat_vars = small,
                "fglss_vertices" => self.fglss_vertices = small,
                "disperser_side" => self.disperser_side = small,
                "disperser_subsets" => self.disperser_subsets = value,
                "lemma_vertices" => self.lemma_vertices = small,
                "udp_oracle_items" => self.udp_oracle_items = small,
                "udp_oracle_budgets" => self.udp_oracle_budgets = small,
                "smp_oracle_groups" => self.smp_oracle_groups = small,
                "smp_oracle_items" => self.smp_oracle_items = small,
                "price_enum_work" => self.price_enum_work = value,
                other => return Err(Error::input(format!("unknown cap `{other}`"))),
            }
        }
        // bitmask-based oracles cannot go past 64 vertices
        if self.mis_vertices > 64 || self.im_vertices > 64 || self.sim_vertices > 64 {
            return Err(Error::input("vertex caps above 64 are not supported"));
        }
        if self.exact_bipartite_side > 32 || self.disperser_side > 64 || self.maxsat_vars > 32 {
            return Err(Error::input("cap exceeds the bitmask width of its oracle"));
        }
        Ok(self)
    }
}

impl Default for Caps {
    fn default() -> Self {
        Caps::DESK
    }
}

/// Refuses when `actual > cap`.
pub(crate) fn ensure(what: &str, actual: u64, cap: u64) -> Result<()> {
    if actual > cap {
        Err(Error::refused(what, actual, cap))
    } else {
        Ok(())
    }
}
