//! Asset values under recurring value taxes.
//!
//! An asset yielding a constant pre-tax flow `y` and paying a constant tax
//! flow `T` is worth the perpetuity `(y - T) / rho`. When the tax is a share
//! `t` of value per period, the value solves `V = (y - t V) / rho`, so
//! `V = y / (t + rho)`: income discounted at the sum of the tax rate and the
//! after-tax discount rate. All rates are per payment period; `t` and `rho`
//! must be quoted for the same period.
//!
//! A quoted capture example such as "(V/0.5 - V/15.5) / (V/0.5)" uses
//! percent-denominated rates. Read with fractions it is
//! `(y/0.005 - y/0.155) / (y/0.005) = 30/31`, which is what
//! [`captured_share`] returns for `t = 0.15`, `rho = 0.005`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationInput {
    /// Pre-tax income per period.
    pub income_flow: f64,
    /// Fixed tax flow per period, used by the flow form.
    #[serde(default)]
    pub tax_flow: f64,
    /// Tax as a fraction of value per period.
    pub tax_rate: f64,
    /// After-tax discount rate per period.
    pub discount_rate: f64,
    pub periods_per_year: u32,
}

impl ValuationInput {
    pub fn new(income_flow: f64, tax_rate: f64, discount_rate: f64, periods_per_year: u32) -> Result<Self> {
        let input = Self { income_flow, tax_flow: 0.0, tax_rate, discount_rate, periods_per_year };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.discount_rate > 0.0) {
            return Err(Error::domain("discount rate must be positive"));
        }
        if !(self.tax_rate >= 0.0) {
            return Err(Error::domain("tax rate must be nonnegative"));
        }
        if !(self.income_flow >= 0.0) {
            return Err(Error::domain("income flow must be nonnegative"));
        }
        if self.periods_per_year < 1 {
            return Err(Error::domain("periods per year must be at least 1"));
        }
        Ok(())
    }

    /// Value with the tax set as a share of value.
    pub fn value(&self) -> Result<f64> {
        asset_value_rate(self.income_flow, self.tax_rate, self.discount_rate)
    }

    /// Value with the fixed tax flow.
    pub fn value_with_flow(&self) -> Result<f64> {
        asset_value_flows(self.income_flow, self.tax_flow, self.discount_rate)
    }

    /// Tax paid per period at the rate-form value.
    pub fn tax_per_period(&self) -> Result<f64> {
        Ok(self.tax_rate * self.value()?)
    }

    pub fn captured_share(&self) -> Result<f64> {
        captured_share(self.tax_rate, self.discount_rate)
    }

    pub fn annual_tax_rate(&self) -> f64 {
        annualize(self.tax_rate, self.periods_per_year)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MortgagedAsset {
    pub asset_value: f64,
    pub mortgage_value: f64,
    /// Tax bill per period.
    pub tax_bill: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaxSplit {
    pub owner_portion: f64,
    pub mortgagor_portion: f64,
}

/// Present value of `y - T` received in perpetuity at discount rate `rho`.
///
/// Negative when `T > y`; the result is not clamped.
pub fn asset_value_flows(income_flow: f64, tax_flow: f64, discount_rate: f64) -> Result<f64> {
    if !(discount_rate > 0.0) {
        return Err(Error::domain("discount rate must be positive"));
    }
    Ok((income_flow - tax_flow) / discount_rate)
}

/// Value of an asset taxed at `tax_rate` of its value per period.
pub fn asset_value_rate(income_flow: f64, tax_rate: f64, discount_rate: f64) -> Result<f64> {
    if !(discount_rate > 0.0) || !(tax_rate >= 0.0) {
        return Err(Error::domain("need discount rate > 0 and tax rate >= 0"));
    }
    let denom = tax_rate + discount_rate;
    if denom == 0.0 {
        return Err(Error::domain("tax rate plus discount rate is zero"));
    }
    Ok(income_flow / denom)
}

/// Fraction of the untaxed value taken by a value tax: `t / (t + rho)`.
///
/// Both rates must be quoted per the same period; a mismatch cannot be
/// detected here.
pub fn captured_share(tax_rate: f64, discount_rate: f64) -> Result<f64> {
    if !(discount_rate > 0.0) || !(tax_rate >= 0.0) {
        return Err(Error::domain("need discount rate > 0 and tax rate >= 0"));
    }
    Ok(tax_rate / (tax_rate + discount_rate))
}

/// Per-period tax rate that captures `target_share` of value.
pub fn required_rate(target_share: f64, discount_rate: f64) -> Result<f64> {
    if !(discount_rate > 0.0) {
        return Err(Error::domain("discount rate must be positive"));
    }
    if !(0.0..1.0).contains(&target_share) {
        return Err(Error::domain(format!(
            "target share {target_share} must lie in [0, 1); full capture needs an infinite rate"
        )));
    }
    Ok(discount_rate * target_share / (1.0 - target_share))
}

/// Simple (non-compounded) scaling of a per-period rate to a yearly rate.
///
/// The product is rounded to 15 significant digits so that quoted decimal
/// rates scale to the quoted decimal result (0.15 x 12 gives 1.8, not
/// 1.7999999999999998).
pub fn annualize(per_period_rate: f64, periods_per_year: u32) -> f64 {
    let raw = per_period_rate * f64::from(periods_per_year);
    if raw == 0.0 || !raw.is_finite() {
        return raw;
    }
    format!("{raw:.14e}").parse().unwrap_or(raw)
}

/// Divides a tax bill between owner and mortgage holder in proportion to the
/// mortgage's share of value. A mortgage above value assigns the whole bill
/// to the mortgage holder.
pub fn split_tax_bill(asset: &MortgagedAsset) -> Result<TaxSplit> {
    if !(asset.asset_value > 0.0) {
        return Err(Error::domain("asset value must be positive"));
    }
    if !(asset.mortgage_value >= 0.0) || !(asset.tax_bill >= 0.0) {
        return Err(Error::domain("mortgage value and tax bill must be nonnegative"));
    }
    let share = asset.mortgage_value.min(asset.asset_value) / asset.asset_value;
    let mortgagor_portion = asset.tax_bill * share;
    Ok(TaxSplit { owner_portion: asset.tax_bill - mortgagor_portion, mortgagor_portion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Composite Simpson on the truncated perpetuity integral, independent of
    /// the closed forms above.
    fn perpetuity_by_quadrature(y: f64, tax: f64, rho: f64) -> f64 {
        let horizon = (1e10f64).ln() / rho;
        let n = 200_000;
        let h = horizon / n as f64;
        let f = |tau: f64| (y - tax) * (-rho * tau).exp();
        let mut s = f(0.0) + f(horizon);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn flow_form_examples() {
        assert_eq!(asset_value_flows(100.0, 0.0, 0.05).unwrap(), 2000.0);
        assert_eq!(asset_value_flows(100.0, 100.0, 0.05).unwrap(), 0.0);
        let v = asset_value_flows(100.0, 40.0, 0.05).unwrap();
        let oracle = perpetuity_by_quadrature(100.0, 40.0, 0.05);
        assert!((oracle - 1200.0).abs() / 1200.0 < 1e-8);
        assert!((v - 1200.0).abs() < 1e-9);
    }

    #[test]
    fn negative_value_is_not_clamped() {
        assert_eq!(asset_value_flows(10.0, 20.0, 0.1).unwrap(), -100.0);
    }

    #[test]
    fn nonpositive_discount_is_rejected() {
        assert!(asset_value_flows(1.0, 0.0, 0.0).is_err());
        assert!(asset_value_rate(1.0, 0.1, -0.01).is_err());
        assert!(captured_share(0.1, 0.0).is_err());
    }

    #[test]
    fn rate_form_examples() {
        assert_eq!(asset_value_rate(100.0, 0.0, 0.05).unwrap(), 2000.0);
        let v = asset_value_rate(100.0, 0.10, 0.05).unwrap();
        assert!((v - 2000.0 / 3.0).abs() < 1e-10);
        assert!((asset_value_flows(100.0, 0.10 * v, 0.05).unwrap() - v).abs() < 1e-10);
        let v = asset_value_rate(1.0, 0.15, 0.005).unwrap();
        assert!((v - 1.0 / 0.155).abs() < 1e-12);
        assert!((asset_value_flows(1.0, 0.15 * v, 0.005).unwrap() - v).abs() < 1e-10);
    }

    #[test]
    fn capture_examples() {
        assert!((captured_share(0.15, 0.005).unwrap() - 30.0 / 31.0).abs() < 1e-12);
        assert!((captured_share(0.05, 0.005).unwrap() - 10.0 / 11.0).abs() < 1e-12);
        assert_eq!(captured_share(0.0, 0.005).unwrap(), 0.0);
    }

    #[test]
    fn required_rate_examples() {
        assert!((required_rate(30.0 / 31.0, 0.005).unwrap() - 0.15).abs() < 1e-12);
        assert_eq!(required_rate(0.0, 0.01).unwrap(), 0.0);
        let t = required_rate(0.5, 0.02).unwrap();
        assert!((t - 0.02).abs() < 1e-15);
        assert!((captured_share(t, 0.02).unwrap() - 0.5).abs() < 1e-15);
        assert!(required_rate(1.0, 0.01).is_err());
        assert!(required_rate(1.5, 0.01).is_err());
    }

    #[test]
    fn annualize_examples() {
        assert_eq!(annualize(0.15, 12), 1.80);
        assert_eq!(annualize(0.02, 1), 0.02);
        assert_eq!(annualize(0.02, 100), 2.00);
    }

    #[test]
    fn split_examples() {
        let s = split_tax_bill(&MortgagedAsset { asset_value: 100.0, mortgage_value: 0.0, tax_bill: 10.0 }).unwrap();
        assert_eq!((s.owner_portion, s.mortgagor_portion), (10.0, 0.0));
        let s = split_tax_bill(&MortgagedAsset { asset_value: 100.0, mortgage_value: 100.0, tax_bill: 10.0 }).unwrap();
        assert_eq!((s.owner_portion, s.mortgagor_portion), (0.0, 10.0));
        let s = split_tax_bill(&MortgagedAsset { asset_value: 200.0, mortgage_value: 50.0, tax_bill: 8.0 }).unwrap();
        assert_eq!(s.owner_portion + s.mortgagor_portion, 8.0);
        assert!((s.mortgagor_portion / 8.0 - 0.25).abs() < 1e-15);
        assert_eq!((s.owner_portion, s.mortgagor_portion), (6.0, 2.0));
    }

    #[test]
    fn over_mortgaged_asset_sends_whole_bill_to_mortgagor() {
        let s = split_tax_bill(&MortgagedAsset { asset_value: 100.0, mortgage_value: 150.0, tax_bill: 10.0 }).unwrap();
        assert_eq!((s.owner_portion, s.mortgagor_portion), (0.0, 10.0));
        assert!(split_tax_bill(&MortgagedAsset { asset_value: 0.0, mortgage_value: 0.0, tax_bill: 1.0 }).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(ValuationInput::new(100.0, 0.05, 0.005, 12).is_ok());
        assert!(ValuationInput::new(-1.0, 0.05, 0.005, 12).is_err());
        assert!(ValuationInput::new(1.0, -0.05, 0.005, 12).is_err());
        assert!(ValuationInput::new(1.0, 0.05, 0.0, 12).is_err());
        assert!(ValuationInput::new(1.0, 0.05, 0.005, 0).is_err());
        let v = ValuationInput::new(110.0, 0.05, 0.005, 12).unwrap();
        assert!((v.tax_per_period().unwrap() - 100.0).abs() < 1e-9);
        assert!((v.annual_tax_rate() - 0.6).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn rate_form_is_fixed_point_of_flow_form(y in 0.0..1e6f64, t in 0.0..2.0f64, rho in 1e-4..0.5f64) {
            let v = asset_value_rate(y, t, rho).unwrap();
            let back = asset_value_flows(y, t * v, rho).unwrap();
            prop_assert!((back - v).abs() <= 1e-10 * v.abs().max(1e-300));
        }

        #[test]
        fn share_monotone_and_bounded(t in 0.0..10.0f64, dt in 1e-6..1.0f64, rho in 1e-4..0.5f64, drho in 1e-6..0.5f64) {
            let s = captured_share(t, rho).unwrap();
            prop_assert!((0.0..1.0).contains(&s));
            prop_assert!(captured_share(t + dt, rho).unwrap() > s);
            if t > 0.0 {
                prop_assert!(captured_share(t, rho + drho).unwrap() < s);
            }
        }

        #[test]
        fn required_rate_inverts_share(t in 0.0..100.0f64, rho in 1e-3..0.5f64) {
            let back = required_rate(captured_share(t, rho).unwrap(), rho).unwrap();
            prop_assert!((back - t).abs() <= 1e-9 * t.max(1e-12));
        }

        #[test]
        fn split_is_exact(value in 1e-3..1e9f64, mortgage in 0.0..2e9f64, bill in 0.0..1e7f64) {
            let s = split_tax_bill(&MortgagedAsset { asset_value: value, mortgage_value: mortgage, tax_bill: bill }).unwrap();
            prop_assert!(s.owner_portion >= 0.0 && s.mortgagor_portion >= 0.0);
            let sum = s.owner_portion + s.mortgagor_portion;
            prop_assert!((sum - bill).abs() <= f64::EPSILON * bill);
        }

        #[test]
        fn payment_frequency_leaves_share_unchanged(t in 0.0..5.0f64, rho in 1e-3..0.5f64, n in 1u32..1000) {
            let annual = captured_share(t, rho).unwrap();
            let per = captured_share(t / f64::from(n), rho / f64::from(n)).unwrap();
            prop_assert!((annual - per).abs() <= 1e-12);
        }
    }
}
