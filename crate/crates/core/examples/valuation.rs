//! Capitalized values under a recurring value tax, and how much of the
//! untaxed value the tax captures.

use assettax::valuation::{annualize, captured_share, required_rate, split_tax_bill, MortgagedAsset, ValuationInput};

fn main() -> assettax::Result<()> {
    let rho = 0.005;
    for (label, rent, t) in [("medallion", 155.0, 0.15), ("city lot", 110.0, 0.05)] {
        let input = ValuationInput::new(rent, t, rho, 12)?;
        println!(
            "{label:>9}: value {:>8.2}, tax {:>6.2}/month, captured {:.6}, {:.0}% a year",
            input.value()?,
            input.tax_per_period()?,
            input.captured_share()?,
            annualize(t, 12) * 100.0,
        );
    }

    let target = 30.0 / 31.0;
    println!("rate capturing {target:.6}: {:.6}/month", required_rate(target, rho)?);

    println!("\ncaptured share by monthly rate:");
    for t in [0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.15] {
        println!("  {t:>5.3} -> {:.4}", captured_share(t, rho)?);
    }

    let split = split_tax_bill(&MortgagedAsset { asset_value: 2000.0, mortgage_value: 500.0, tax_bill: 100.0 })?;
    println!("\nmortgaged lot: owner pays {}, lender pays {}", split.owner_portion, split.mortgagor_portion);
    Ok(())
}
