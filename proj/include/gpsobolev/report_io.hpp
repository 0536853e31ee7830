#pragma once

#include "gpsobolev/kernel_spec.hpp"
#include "gpsobolev/verdict.hpp"

namespace gpsobolev {

// Stable key order; doubles are written with round-trip precision, so
// parse(to_json(r)) == r. Non-finite numbers are rejected.
Json to_json(const RegularityReport& r);
RegularityReport regularity_report_from_json(const Json& j);

Json to_json(const IdentityReport& r);
IdentityReport identity_report_from_json(const Json& j);

Json to_json(const NuclearReport& r);
NuclearReport nuclear_report_from_json(const Json& j);

Json to_json(const Box& b);
Box box_from_json(const Json& j);

}  // namespace gpsobolev
