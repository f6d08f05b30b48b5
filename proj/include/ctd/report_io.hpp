#pragma once

#include <string>

#include "ctd/pricing.hpp"
#include "ctd/transcribe.hpp"
#include "ctd/verify.hpp"

namespace ctd {

/// Decimal text of v with 17 significant digits ("nan" for NaN).
std::string format_double(double v);

/// Node-by-node table: t,y,lambda, then per unit
/// x_<id>,mu_hi_<id>,mu_lo_<id>,gamma_hi_<id>,gamma_lo_<id>,beta_<id>.
/// Ramp duals are interpolated from their staggered grid to the nodes.
std::string schedule_csv(const Schedule& sched, const MultiplierTrajectories& m);

/// hour,e_<id>,... energy per clock hour in MWh, one row per hour.
std::string hourly_csv(const HourlyAggregate& agg);

std::string price_report_json(const PriceReport& rep);

std::string verification_report_json(const VerificationReport& rep);

void write_file(const std::string& path, const std::string& content);

}  // namespace ctd
