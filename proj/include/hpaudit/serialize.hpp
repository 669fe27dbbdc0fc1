#pragma once

// JSON and CSV renderings of the report types. Key order and number
// formatting are fixed, so identical reports serialize to identical bytes.

#include <string>
#include <vector>

#include "json.hpp"

#include "hpaudit/audit.hpp"
#include "hpaudit/combinatorics.hpp"
#include "hpaudit/core_model.hpp"
#include "hpaudit/experiment.hpp"
#include "hpaudit/signaling.hpp"

namespace hpaudit {

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

nlohmann::json to_json(const Direction& d);
nlohmann::json to_json(const HiddenSource& s);
nlohmann::json to_json(const BoundedValue& v);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const ChannelConfig& c);
nlohmann::json to_json(const ChannelReport& r);
nlohmann::json to_json(const DivisibilityResult& r);
nlohmann::json to_json(const PermIntegrality& r);
nlohmann::json to_json(const FamilyValidation& r);
nlohmann::json to_json(const CensusReport& r);
nlohmann::json to_json(const CoverageTable& t);
nlohmann::json to_json(const MomentEstimate& m);

/// CSV columns: ax,ay,az,bx,by,bz,trials,emp_A,emp_B,emp_AB,exact_A,exact_B,exact_AB,z_A,z_B,z_AB
std::string moments_csv(const std::vector<MomentEstimate>& rows);

/// CSV columns: condition,model,station,lambda,a_index,b_index,alt_index,
/// quantity,outcome,lhs,rhs,violation
std::string audit_csv_header();
std::string audit_csv_rows(const AuditReport& r);

/// CSV columns: n,divisible,worst_prime,needed,available
std::string scan_csv(const std::vector<DivisibilityResult>& table);

/// CSV columns: family,n,ax,ay,az,bx,by,bz,census_E_A,formula_lo,formula_hi,consistent
std::string census_csv(const std::vector<CensusReport>& reports);

/// Fixed-width table: k, trials, empirical, analytic, z-score.
std::string channel_table(const ChannelReport& r);

}  // namespace hpaudit
