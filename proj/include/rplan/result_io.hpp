#pragma once

#include <iosfwd>

#include "rplan/ap.hpp"
#include "rplan/search.hpp"

namespace rplan {

/* Plan JSON: symbols appear as sorted proposition-name arrays, dropped
   tracks as null.  read_result_json accepts exactly what write_result_json
   emits and throws ParseError on anything malformed. */
void write_result_json(const PlanResult& r, const ApInterner& aps, std::ostream& out);
PlanResult read_result_json(ApInterner& aps, std::istream& in);

} // namespace rplan
