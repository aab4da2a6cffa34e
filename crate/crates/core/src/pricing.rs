//! Unit-demand (UDP) and single-minded (SMP) item pricing with weighted
//! consumer groups: revenue evaluation, exhaustive optima, and the
//! approximation algorithms (uniform price, geometric price enumeration and
//! the partition scheme).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::caps::{ensure, Caps};
use crate::error::{Error, Result};
use crate::lp;
use crate::rational::{self, Rational};

/// A nonnegative exact price or the "never affordable" price.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Price {
    Finite(Rational),
    Infinite,
}

impl Price {
    pub fn zero() -> Price {
        Price::Finite(Rational::zero())
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Price::Finite(v) => Some(v),
            Price::Infinite => None,
        }
    }

    pub fn parse(text: &str) -> Result<Price> {
        let text = text.trim();
        if matches!(text, "inf" | "infinity" | "∞") {
            return Ok(Price::Infinite);
        }
        let value = rational::parse(text)?;
        if value < Rational::zero() {
            return Err(Error::input(format!("price {text} is negative")));
        }
        Ok(Price::Finite(value))
    }
}

impl Ord for Price {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Price::Finite(a), Price::Finite(b)) => a.cmp(b),
            (Price::Finite(_), Price::Infinite) => Ordering::Less,
            (Price::Infinite, Price::Finite(_)) => Ordering::Greater,
            (Price::Infinite, Price::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Price {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::Finite(v) => write!(f, "{}", rational::format(v)),
            Price::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Price {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Price {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Price::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PriceFunction {
    pub prices: Vec<Price>,
}

impl PriceFunction {
    pub fn uniform(items: usize, price: Price) -> PriceFunction {
        PriceFunction {
            prices: vec![price; items],
        }
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuyingRule {
    Udp,
    Smp,
}

impl BuyingRule {
    /// Price given to items outside a solved sub-instance.
    pub fn neutral_price(self) -> Price {
        match self {
            BuyingRule::Udp => Price::Infinite,
            BuyingRule::Smp => Price::zero(),
        }
    }
}

impl fmt::Display for BuyingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuyingRule::Udp => "udp",
            BuyingRule::Smp => "smp",
        })
    }
}

/// `multiplicity` identical consumers sharing one bundle and budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub bundle: Vec<usize>,
    #[serde(with = "rational::string")]
    pub budget: Rational,
    #[serde(with = "rational::biguint_string")]
    pub multiplicity: BigUint,
}

impl Group {
    pub fn new(bundle: Vec<usize>, budget: Rational, multiplicity: BigUint) -> Group {
        Group {
            bundle,
            budget,
            multiplicity,
        }
    }

    pub fn single(bundle: Vec<usize>, budget: Rational) -> Group {
        Group::new(bundle, budget, BigUint::from(1u32))
    }

    fn weight(&self) -> Rational {
        rational::from_biguint(&self.multiplicity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct PricingInstance {
    items: usize,
    rule: BuyingRule,
    groups: Vec<Group>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    items: usize,
    rule: BuyingRule,
    groups: Vec<Group>,
}

impl TryFrom<RawInstance> for PricingInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        PricingInstance::new(raw.items, raw.rule, raw.groups)
    }
}

impl From<PricingInstance> for RawInstance {
    fn from(inst: PricingInstance) -> Self {
        RawInstance {
            items: inst.items,
            rule: inst.rule,
            groups: inst.groups,
        }
    }
}

impl PricingInstance {
    /// Bundles are sorted and deduplicated; they must be nonempty and in range.
    pub fn new(items: usize, rule: BuyingRule, mut groups: Vec<Group>) -> Result<PricingInstance> {
        if items == 0 {
            return Err(Error::input("an instance needs at least one item"));
        }
        for (index, g) in groups.iter_mut().enumerate() {
            g.bundle.sort_unstable();
            g.bundle.dedup();
            if g.bundle.is_empty() {
                return Err(Error::input(format!("group {index} has an empty bundle")));
            }
            if let Some(&i) = g.bundle.iter().find(|&&i| i >= items) {
                return Err(Error::input(format!(
                    "group {index} refers to item {i}, but there are {items} items"
                )));
            }
            if g.budget < Rational::zero() {
                return Err(Error::input(format!("group {index} has a negative budget")));
            }
            if g.multiplicity.is_zero() {
                return Err(Error::input(format!("group {index} has multiplicity 0")));
            }
        }
        let k = groups.iter().map(|g| g.bundle.len()).max().unwrap_or(0);
        Ok(PricingInstance {
            items,
            rule,
            groups,
            k,
        })
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn rule(&self) -> BuyingRule {
        self.rule
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Largest bundle size.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn with_rule(&self, rule: BuyingRule) -> PricingInstance {
        PricingInstance {
            rule,
            ..self.clone()
        }
    }

    /// Total number of consumers, `Σ multiplicity`.
    pub fn consumer_count(&self) -> BigUint {
        self.groups.iter().map(|g| &g.multiplicity).sum()
    }

    /// Largest budget, 0 without groups.
    pub fn max_budget(&self) -> Rational {
        self.groups
            .iter()
            .map(|g| g.budget.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Random instance with budgets `a/b`, `1 <= a <= 8`, `b in {1, 2, 4}`,
    /// bundles of size `1..=max_bundle` and multiplicities `1..=max_multiplicity`.
    pub fn random(
        items: usize,
        groups: usize,
        max_bundle: usize,
        max_multiplicity: u32,
        rule: BuyingRule,
        seed: u64,
    ) -> Result<PricingInstance> {
        use rand::Rng;
        if items == 0 || max_bundle == 0 || max_multiplicity == 0 {
            return Err(Error::input(
                "items, bundle size and multiplicity must be positive",
            ));
        }
        let mut rng = crate::seed::rng(seed);
        let list = (0..groups)
            .map(|_| {
                let size = rng.gen_range(1..=max_bundle.min(items));
                let bundle = rand::seq::index::sample(&mut rng, items, size).into_vec();
                let budget = rational::frac(rng.gen_range(1..=8), [1, 2, 4][rng.gen_range(0..3)]);
                let mult = BigUint::from(rng.gen_range(1..=max_multiplicity));
                Group::new(bundle, budget, mult)
            })
            .collect();
        PricingInstance::new(items, rule, list)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSale {
    pub buys: bool,
    /// The item bought under UDP (least index among the cheapest).
    pub item: Option<usize>,
    /// Amount paid by one consumer of the group.
    #[serde(with = "rational::string")]
    pub per_consumer: Rational,
    /// `per_consumer × multiplicity`.
    #[serde(with = "rational::string")]
    pub contribution: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaleReport {
    pub groups: Vec<GroupSale>,
    #[serde(with = "rational::string")]
    pub revenue: Rational,
}

fn check_prices(inst: &PricingInstance, p: &PriceFunction) -> Result<()> {
    if p.len() != inst.items {
        return Err(Error::input(format!(
            "price function has {} entries for {} items",
            p.len(),
            inst.items
        )));
    }
    if inst.rule == BuyingRule::Smp && p.prices.contains(&Price::Infinite) {
        return Err(Error::input("infinite prices are not allowed under SMP"));
    }
    Ok(())
}

fn group_sale(rule: BuyingRule, g: &Group, p: &PriceFunction) -> GroupSale {
    let no_sale = GroupSale {
        buys: false,
        item: None,
        per_consumer: Rational::zero(),
        contribution: Rational::zero(),
    };
    let paid = match rule {
        BuyingRule::Udp => {
            let (item, price) = g
                .bundle
                .iter()
                .map(|&i| (i, &p.prices[i]))
                .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
                .expect("bundles are nonempty");
            match price {
                Price::Finite(v) if *v <= g.budget => Some((Some(item), v.clone())),
                _ => None,
            }
        }
        BuyingRule::Smp => {
            let sum: Rational = g
                .bundle
                .iter()
                .map(|&i| p.prices[i].finite().cloned().unwrap_or_default())
                .sum();
            (sum <= g.budget).then_some((None, sum))
        }
    };
    match paid {
        Some((item, per_consumer)) => GroupSale {
            buys: true,
            item,
            contribution: &per_consumer * g.weight(),
            per_consumer,
        },
        None => no_sale,
    }
}

/// Revenue of `p` under the instance's buying rule. Affordability is `<= budget`.
pub fn evaluate_revenue(inst: &PricingInstance, p: &PriceFunction) -> Result<SaleReport> {
    check_prices(inst, p)?;
    let groups: Vec<GroupSale> = inst
        .groups
        .iter()
        .map(|g| group_sale(inst.rule, g, p))
        .collect();
    let revenue = groups.iter().map(|s| &s.contribution).sum();
    Ok(SaleReport { groups, revenue })
}

pub fn revenue(inst: &PricingInstance, p: &PriceFunction) -> Result<Rational> {
    Ok(evaluate_revenue(inst, p)?.revenue)
}

/// An algorithm's answer: the price function and its exact revenue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Priced {
    #[serde(with = "rational::string")]
    pub revenue: Rational,
    pub prices: PriceFunction,
}

/// Exhaustive search over per-item candidate lists (each sorted ascending).
///
/// Items are fixed in index order and candidates in list order, and the best
/// is replaced only on strict improvement, so among optimal vectors the
/// lexicographically least is returned. A branch is cut when an upper bound
/// on its revenue cannot beat the best found.
fn search_prices(inst: &PricingInstance, candidates: &[Vec<Price>]) -> Priced {
    let n = inst.items;
    let mut groups_of_item = vec![Vec::new(); n];
    for (gi, g) in inst.groups.iter().enumerate() {
        for &i in &g.bundle {
            groups_of_item[i].push(gi);
        }
    }
    let weights: Vec<Rational> = inst.groups.iter().map(Group::weight).collect();
    let caps: Vec<Rational> = inst
        .groups
        .iter()
        .zip(&weights)
        .map(|(g, w)| &g.budget * w)
        .collect();
    let bound = caps.iter().sum();
    let mut search = Search {
        inst,
        candidates,
        groups_of_item,
        last_item: inst
            .groups
            .iter()
            .map(|g| *g.bundle.last().unwrap())
            .collect(),
        weights,
        state: vec![None; inst.groups.len()],
        ub: caps,
        bound,
        current: Vec::with_capacity(n),
        best: None,
    };
    search.run();
    let (revenue, prices) = search.best.expect("every item has a candidate");
    Priced {
        revenue,
        prices: PriceFunction { prices },
    }
}

struct Search<'a> {
    inst: &'a PricingInstance,
    candidates: &'a [Vec<Price>],
    groups_of_item: Vec<Vec<usize>>,
    last_item: Vec<usize>,
    weights: Vec<Rational>,
    /// UDP: cheapest price so far; SMP: price sum so far (always finite).
    state: Vec<Option<Price>>,
    /// Per-group revenue upper bound given the assigned prices.
    ub: Vec<Rational>,
    bound: Rational,
    current: Vec<Price>,
    best: Option<(Rational, Vec<Price>)>,
}

impl Search<'_> {
    fn group_bound(&self, gi: usize, state: &Option<Price>, resolved: bool) -> Rational {
        let g = &self.inst.groups[gi];
        let w = &self.weights[gi];
        match (self.inst.rule, state) {
            (BuyingRule::Udp, Some(Price::Finite(v))) if *v <= g.budget => v * w,
            (BuyingRule::Udp, _) if resolved => Rational::zero(),
            (BuyingRule::Udp, _) => &g.budget * w,
            (BuyingRule::Smp, Some(Price::Finite(s))) if *s > g.budget => Rational::zero(),
            (BuyingRule::Smp, Some(Price::Finite(s))) if resolved => s * w,
            (BuyingRule::Smp, _) => &g.budget * w,
        }
    }

    fn run(&mut self) {
        let item = self.current.len();
        if let Some((best, _)) = &self.best {
            if self.bound <= *best {
                return;
            }
        }
        if item == self.inst.items {
            self.best = Some((self.bound.clone(), self.current.clone()));
            return;
        }
        let options = if self.groups_of_item[item].is_empty() {
            &self.candidates[item][..1]
        } else {
            &self.candidates[item][..]
        };
        for price in options {
            let mut undo = Vec::with_capacity(self.groups_of_item[item].len());
            for idx in 0..self.groups_of_item[item].len() {
                let gi = self.groups_of_item[item][idx];
                let next = match (self.inst.rule, &self.state[gi]) {
                    (BuyingRule::Udp, Some(old)) => Some(old.clone().min(price.clone())),
                    (BuyingRule::Smp, Some(Price::Finite(s))) => {
                        Some(Price::Finite(s + price.finite().expect("finite under SMP")))
                    }
                    _ => Some(price.clone()),
                };
                let ub = self.group_bound(gi, &next, self.last_item[gi] == item);
                self.bound += &ub - &self.ub[gi];
                let old_state = std::mem::replace(&mut self.state[gi], next);
                let old_ub = std::mem::replace(&mut self.ub[gi], ub);
                undo.push((gi, old_state, old_ub));
            }
            self.current.push(price.clone());
            self.run();
            self.current.pop();
            for (gi, old_state, old_ub) in undo.into_iter().rev() {
                self.bound += &old_ub - &self.ub[gi];
                self.state[gi] = old_state;
                self.ub[gi] = old_ub;
            }
        }
    }
}

fn enumeration_size(choices: usize, items: usize) -> u128 {
    (choices as u128)
        .checked_pow(items as u32)
        .unwrap_or(u128::MAX)
}

/// Exact UDP optimum: every item priced at one of the distinct budgets or ∞.
pub fn opt_udp_bruteforce(inst: &PricingInstance, caps: &Caps) -> Result<Priced> {
    if inst.rule != BuyingRule::Udp {
        return Err(Error::input("opt_udp_bruteforce needs a UDP instance"));
    }
    ensure(
        "UDP oracle items",
        inst.items as u64,
        caps.udp_oracle_items as u64,
    )?;
    let mut budgets: Vec<Rational> = inst.groups.iter().map(|g| g.budget.clone()).collect();
    budgets.sort();
    budgets.dedup();
    ensure(
        "UDP oracle distinct budgets",
        budgets.len() as u64,
        caps.udp_oracle_budgets as u64,
    )?;
    let mut list: Vec<Price> = budgets.into_iter().map(Price::Finite).collect();
    list.push(Price::Infinite);
    Ok(search_prices(inst, &vec![list; inst.items]))
}

/// Exact SMP optimum: for every set W of buying groups, maximize the revenue
/// from W subject to each W-bundle staying affordable (a linear program
/// solved exactly), then score the LP optimum on the whole instance.
pub fn opt_smp_bruteforce(inst: &PricingInstance, caps: &Caps) -> Result<Priced> {
    if inst.rule != BuyingRule::Smp {
        return Err(Error::input("opt_smp_bruteforce needs an SMP instance"));
    }
    ensure(
        "SMP oracle groups",
        inst.groups.len() as u64,
        caps.smp_oracle_groups as u64,
    )?;
    ensure(
        "SMP oracle items",
        inst.items as u64,
        caps.smp_oracle_items as u64,
    )?;
    let n = inst.items;
    let caps_of: Vec<Rational> = inst.groups.iter().map(|g| &g.budget * g.weight()).collect();
    let mut best = Priced {
        revenue: Rational::zero(),
        prices: PriceFunction::uniform(n, Price::zero()),
    };
    for winners in 1u32..1 << inst.groups.len() {
        let members: Vec<usize> = (0..inst.groups.len())
            .filter(|&g| winners >> g & 1 == 1)
            .collect();
        let ceiling: Rational = members.iter().map(|&g| &caps_of[g]).sum();
        if ceiling < best.revenue {
            continue;
        }
        let mut objective = vec![Rational::zero(); n];
        let mut rows = Vec::with_capacity(members.len());
        let mut rhs = Vec::with_capacity(members.len());
        for &gi in &members {
            let g = &inst.groups[gi];
            let mut row = vec![Rational::zero(); n];
            for &i in &g.bundle {
                row[i] = rational::int(1);
                objective[i] += g.weight();
            }
            rows.push(row);
            rhs.push(g.budget.clone());
        }
        let solution = lp::maximize(&objective, &rows, &rhs)?
            .ok_or_else(|| Error::input("SMP winner program is unbounded"))?;
        let prices = PriceFunction {
            prices: solution.x.into_iter().map(Price::Finite).collect(),
        };
        let value = revenue(inst, &prices)?;
        if value > best.revenue || (value == best.revenue && prices < best.prices) {
            best = Priced {
                revenue: value,
                prices,
            };
        }
    }
    Ok(best)
}

/// The oracle for the instance's rule.
pub fn opt_bruteforce(inst: &PricingInstance, caps: &Caps) -> Result<Priced> {
    match inst.rule {
        BuyingRule::Udp => opt_udp_bruteforce(inst, caps),
        BuyingRule::Smp => opt_smp_bruteforce(inst, caps),
    }
}

/// Best single price for all items among every budget and every budget
/// divided by its bundle size. Ties go to the smaller price.
pub fn uniform_price_approx(inst: &PricingInstance) -> Result<Priced> {
    let mut values: Vec<Rational> = inst
        .groups
        .iter()
        .flat_map(|g| {
            let size = Rational::from_integer(g.bundle.len().into());
            [g.budget.clone(), &g.budget / size]
        })
        .collect();
    values.sort();
    values.dedup();
    if values.is_empty() {
        values.push(Rational::zero());
    }
    let mut best: Option<Priced> = None;
    for v in values {
        let prices = PriceFunction::uniform(inst.items, Price::Finite(v));
        let value = revenue(inst, &prices)?;
        if best.as_ref().is_none_or(|b| value > b.revenue) {
            best = Some(Priced {
                revenue: value,
                prices,
            });
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// `{W, W/α, ..., W/α^J} ∪ {0}` in ascending order, `W` the largest budget
/// and `J` the least integer with `α^J >= α·n·m`.
pub fn geometric_price_set(inst: &PricingInstance, alpha: &Rational) -> Result<Vec<Rational>> {
    if *alpha <= rational::int(1) {
        return Err(Error::input("alpha must exceed 1"));
    }
    let w = inst.max_budget();
    let mut set = vec![Rational::zero()];
    if w.is_zero() {
        return Ok(set);
    }
    let target = alpha
        * Rational::from_integer(inst.items.into())
        * rational::from_biguint(&inst.consumer_count());
    let mut power = rational::int(1);
    let mut values = vec![w.clone()];
    while power < target {
        power *= alpha;
        values.push(&w / &power);
    }
    values.reverse();
    set.extend(values);
    Ok(set)
}

/// Best price function with every price in [`geometric_price_set`].
pub fn geometric_enum_approx(
    inst: &PricingInstance,
    alpha: &Rational,
    caps: &Caps,
) -> Result<Priced> {
    let set = geometric_price_set(inst, alpha)?;
    let work = enumeration_size(set.len(), inst.items);
    if work > u128::from(caps.price_enum_work) {
        return Err(Error::refused(
            format!(
                "geometric price enumeration {}^{} (try a larger alpha or the partition scheme)",
                set.len(),
                inst.items
            ),
            work,
            caps.price_enum_work,
        ));
    }
    let list: Vec<Price> = set.into_iter().map(Price::Finite).collect();
    Ok(search_prices(inst, &vec![list; inst.items]))
}

/// Sets every item outside `items` to ∞ (UDP) or 0 (SMP); `p_sub[j]` prices `items[j]`.
pub fn extend_prices(
    inst: &PricingInstance,
    items: &[usize],
    p_sub: &PriceFunction,
) -> Result<PriceFunction> {
    if items.len() != p_sub.len() {
        return Err(Error::input(
            "sub-instance prices do not match its item list",
        ));
    }
    let mut prices = vec![inst.rule.neutral_price(); inst.items];
    for (&i, p) in items.iter().zip(&p_sub.prices) {
        if i >= inst.items {
            return Err(Error::input(format!("item {i} is out of range")));
        }
        prices[i] = p.clone();
    }
    Ok(PriceFunction { prices })
}

/// A block of items with every group restricted to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubInstance {
    /// Original index of each sub-instance item.
    pub items: Vec<usize>,
    pub instance: PricingInstance,
}

/// `q` contiguous blocks of near-equal size (the first `n mod q` one larger).
/// Groups keep their budget and multiplicity; a group whose bundle misses
/// the block is dropped.
pub fn partition_items(inst: &PricingInstance, q: usize) -> Result<Vec<SubInstance>> {
    let n = inst.items;
    if q == 0 || q > n {
        return Err(Error::input(format!("block count {q} is not in 1..={n}")));
    }
    let mut start = 0;
    let mut blocks = Vec::with_capacity(q);
    for j in 0..q {
        let len = n / q + usize::from(j < n % q);
        let items: Vec<usize> = (start..start + len).collect();
        let groups = inst
            .groups
            .iter()
            .filter_map(|g| {
                let bundle: Vec<usize> = g
                    .bundle
                    .iter()
                    .filter(|&&i| (start..start + len).contains(&i))
                    .map(|&i| i - start)
                    .collect();
                (!bundle.is_empty())
                    .then(|| Group::new(bundle, g.budget.clone(), g.multiplicity.clone()))
            })
            .collect();
        blocks.push(SubInstance {
            items,
            instance: PricingInstance::new(len, inst.rule, groups)?,
        });
        start += len;
    }
    Ok(blocks)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum SchemeBranch {
    /// `n^δ > log2 m`: the uniform-price algorithm ran on the whole instance.
    Uniform,
    /// Items split into `blocks` parts; `best_block` won.
    Partition { blocks: usize, best_block: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeResult {
    #[serde(flatten)]
    pub priced: Priced,
    #[serde(flatten)]
    pub branch: SchemeBranch,
}

/// True when the scheme takes the uniform-price branch: `n^δ > log2 m`.
pub fn scheme_uses_uniform(inst: &PricingInstance, delta: &Rational) -> bool {
    let m = inst.consumer_count();
    let log_m = if m.is_zero() {
        f64::NEG_INFINITY
    } else {
        let bits = m.bits();
        if bits <= 1000 {
            m.to_f64().unwrap_or(f64::INFINITY).log2()
        } else {
            bits as f64
        }
    };
    (inst.items as f64).powf(rational::to_f64(delta)) > log_m
}

/// If `n^δ > log2 m`, the best uniform price. Otherwise split the items into
/// `ceil(n^δ)` blocks, run geometric enumeration on each, keep the best block
/// and price everything else at ∞ (UDP) or 0 (SMP).
pub fn approximation_scheme(
    inst: &PricingInstance,
    delta: &Rational,
    alpha: &Rational,
    caps: &Caps,
) -> Result<SchemeResult> {
    if *delta < Rational::zero() || *delta > rational::int(1) {
        return Err(Error::input("delta must be in [0, 1]"));
    }
    if scheme_uses_uniform(inst, delta) {
        return Ok(SchemeResult {
            priced: uniform_price_approx(inst)?,
            branch: SchemeBranch::Uniform,
        });
    }
    let q = rational::ceil_root_power(inst.items as u64, delta)? as usize;
    let blocks = partition_items(inst, q.min(inst.items))?;
    let mut best: Option<(usize, Priced)> = None;
    for (j, block) in blocks.iter().enumerate() {
        let solved = geometric_enum_approx(&block.instance, alpha, caps)?;
        if best.as_ref().is_none_or(|b| solved.revenue > b.1.revenue) {
            best = Some((j, solved));
        }
    }
    let (best_block, solved) = best.expect("at least one block");
    let prices = extend_prices(inst, &blocks[best_block].items, &solved.prices)?;
    Ok(SchemeResult {
        priced: Priced {
            revenue: revenue(inst, &prices)?,
            prices,
        },
        branch: SchemeBranch::Partition {
            blocks: blocks.len(),
            best_block,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn fin(v: Rational) -> Price {
        Price::Finite(v)
    }

    fn inst(
        items: usize,
        rule: BuyingRule,
        groups: &[(&[usize], Rational, u32)],
    ) -> PricingInstance {
        PricingInstance::new(
            items,
            rule,
            groups
                .iter()
                .map(|(b, budget, m)| Group::new(b.to_vec(), budget.clone(), BigUint::from(*m)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn revenue_rules() {
        let p = PriceFunction {
            prices: vec![fin(int(3)), fin(int(2))],
        };
        let udp = inst(2, BuyingRule::Udp, &[(&[0, 1], int(4), 1)]);
        let report = evaluate_revenue(&udp, &p).unwrap();
        assert_eq!(report.revenue, int(2));
        assert_eq!(report.groups[0].item, Some(1));
        let smp = udp.with_rule(BuyingRule::Smp);
        assert_eq!(revenue(&smp, &p).unwrap(), int(0));
        let weighted = inst(1, BuyingRule::Udp, &[(&[0], int(1), 7)]);
        assert_eq!(
            revenue(&weighted, &PriceFunction::uniform(1, fin(int(1)))).unwrap(),
            int(7)
        );
        assert!(revenue(&smp, &PriceFunction::uniform(2, Price::Infinite)).is_err());
    }

    #[test]
    fn udp_tie_takes_least_index() {
        let udp = inst(3, BuyingRule::Udp, &[(&[0, 1, 2], int(4), 1)]);
        let p = PriceFunction {
            prices: vec![fin(int(3)), fin(int(1)), fin(int(1))],
        };
        assert_eq!(evaluate_revenue(&udp, &p).unwrap().groups[0].item, Some(1));
    }

    #[test]
    fn oracle_examples() {
        let caps = Caps::DESK;
        let one = inst(1, BuyingRule::Udp, &[(&[0], frac(5, 2), 1)]);
        assert_eq!(opt_udp_bruteforce(&one, &caps).unwrap().revenue, frac(5, 2));
        let shared = inst(1, BuyingRule::Udp, &[(&[0], int(1), 1), (&[0], int(10), 1)]);
        assert_eq!(opt_udp_bruteforce(&shared, &caps).unwrap().revenue, int(10));
        let smp = inst(1, BuyingRule::Smp, &[(&[0], int(2), 1), (&[0], int(3), 1)]);
        let best = opt_smp_bruteforce(&smp, &caps).unwrap();
        assert_eq!(best.revenue, int(4));
        assert_eq!(best.prices.prices, vec![fin(int(2))]);
        let disjoint = inst(
            2,
            BuyingRule::Udp,
            &[(&[0], int(1), 1), (&[0], int(3), 1), (&[1], int(2), 1)],
        );
        assert_eq!(
            opt_udp_bruteforce(&disjoint, &caps).unwrap().revenue,
            int(5)
        );
    }

    #[test]
    fn oracle_prefers_lex_least() {
        // price 2 or 4 both earn 4 (two buyers at 2, one at 4)
        let udp = inst(1, BuyingRule::Udp, &[(&[0], int(2), 1), (&[0], int(4), 1)]);
        let best = opt_udp_bruteforce(&udp, &Caps::DESK).unwrap();
        assert_eq!(best.prices.prices, vec![fin(int(2))]);
    }

    #[test]
    fn geometric_set_shape() {
        let one = inst(1, BuyingRule::Udp, &[(&[0], int(8), 1)]);
        let set = geometric_price_set(&one, &int(2)).unwrap();
        assert_eq!(set, vec![int(0), int(4), int(8)]);
        let priced = geometric_enum_approx(&one, &int(2), &Caps::DESK).unwrap();
        assert_eq!(priced.revenue, int(8));
        assert!(geometric_price_set(&one, &int(1)).is_err());
    }

    #[test]
    fn scheme_branches() {
        let caps = Caps::DESK;
        let many = inst(
            4,
            BuyingRule::Udp,
            &[(&[0, 1], int(3), 1), (&[2, 3], int(1), 1)],
        );
        // m = 2, log2 m = 1 < 4^δ for δ > 0
        let r = approximation_scheme(&many, &frac(1, 2), &int(2), &caps).unwrap();
        assert_eq!(r.branch, SchemeBranch::Uniform);
        let heavy = inst(
            4,
            BuyingRule::Smp,
            &[(&[0, 1], int(3), 64), (&[2, 3], int(1), 64)],
        );
        let r = approximation_scheme(&heavy, &frac(1, 2), &int(2), &caps).unwrap();
        assert_eq!(
            r.branch,
            SchemeBranch::Partition {
                blocks: 2,
                best_block: 0
            }
        );
        assert_eq!(r.priced.revenue, revenue(&heavy, &r.priced.prices).unwrap());
        let r = approximation_scheme(&heavy, &int(0), &int(2), &caps).unwrap();
        assert_eq!(
            r.branch,
            SchemeBranch::Partition {
                blocks: 1,
                best_block: 0
            }
        );
    }

    #[test]
    fn partition_and_extension() {
        let i = inst(
            5,
            BuyingRule::Udp,
            &[(&[0, 4], int(2), 1), (&[1], int(1), 2)],
        );
        let parts = partition_items(&i, 2).unwrap();
        assert_eq!(parts[0].items, vec![0, 1, 2]);
        assert_eq!(parts[1].items, vec![3, 4]);
        assert_eq!(parts[1].instance.groups()[0].bundle, vec![1]);
        assert_eq!(parts[1].instance.groups().len(), 1);
        let ext = extend_prices(&i, &[1], &PriceFunction::uniform(1, fin(int(1)))).unwrap();
        assert_eq!(ext.prices[0], Price::Infinite);
        assert_eq!(ext.prices[1], fin(int(1)));
        assert!(partition_items(&i, 6).is_err());
    }

    #[test]
    fn json_shapes() {
        let text = r#"{"items":2,"rule":"smp","groups":[{"bundle":[0,1],"budget":"3/4","multiplicity":"125"}]}"#;
        let i: PricingInstance = serde_json::from_str(text).unwrap();
        assert_eq!(i.groups()[0].budget, frac(3, 4));
        assert_eq!(serde_json::to_string(&i).unwrap(), text);
        let p: PriceFunction = serde_json::from_str(r#"{"prices":["1/8","inf","0"]}"#).unwrap();
        assert_eq!(p.prices[1], Price::Infinite);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"prices":["1/8","inf","0"]}"#
        );
        assert!(serde_json::from_str::<PricingInstance>(
            r#"{"items":1,"rule":"udp","groups":[{"bundle":[3],"budget":"1","multiplicity":"1"}]}"#
        )
        .is_err());
    }
}
