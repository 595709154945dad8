#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stclf/bounds.hpp"
#include "stclf/scenarios.hpp"
#include "stclf/sim.hpp"

namespace stclf {

// Plot-ready data exchange.  CSV uses a '.' decimal separator, a mandatory
// header row, and %.17g formatting so that parsing an emitted trace
// reproduces the in-memory doubles bit-exactly.  NaN is written as an empty
// field and read back as NaN.

void write_trace_csv(std::ostream& os, int n, int m, const std::vector<TraceRecord>& trace);

struct TraceFile {
  int n = 0;
  int m = 0;
  std::vector<TraceRecord> records;
};

// Parses a trace written by write_trace_csv; throws ConfigError on malformed
// input.
TraceFile read_trace_csv(std::istream& is);

// Grid of admissible-error bounds with a commented footer carrying the field
// minimum (or an emptiness warning).  winning_subset is 1-based and
// semicolon-joined.
void write_field_csv(std::ostream& os, int n, const FieldResult& field);

// Flat schema-versioned JSON documents.  No wall-clock content: identical
// runs emit identical bytes.
void write_summary_json(std::ostream& os, const std::string& scenario, const SimSummary& s);
void write_prepared_json(std::ostream& os, const std::string& scenario, const Prepared& p);

// Human-readable verification report.
void write_verify_report(std::ostream& os, const std::string& scenario,
                         const VerifyReport& report);

}  // namespace stclf
