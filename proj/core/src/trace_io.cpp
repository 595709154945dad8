#include "stclf/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace stclf {

namespace {

// Shortest representation that round-trips a double exactly; NaN becomes an
// empty CSV field.
std::string fmt(double v) {
  if (std::isnan(v)) return std::string();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt(v);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_field(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) {
    throw ConfigError("malformed numeric field '" + s + "' in trace");
  }
  return v;
}

std::string trace_header(int n, int m) {
  std::string h = "t";
  for (int i = 1; i <= n; ++i) h += ",x_true_" + std::to_string(i);
  for (int i = 1; i <= n; ++i) h += ",x_model_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) h += ",u_" + std::to_string(i);
  h += ",V_true,V_model,eps_bar,delta_k,event";
  return h;
}

}  // namespace

void write_trace_csv(std::ostream& os, int n, int m, const std::vector<TraceRecord>& trace) {
  os << trace_header(n, m) << '\n';
  for (const TraceRecord& r : trace) {
    os << fmt(r.t);
    for (int i = 0; i < n; ++i) os << ',' << fmt(r.x_true[i]);
    for (int i = 0; i < n; ++i) os << ',' << fmt(r.x_model[i]);
    for (int i = 0; i < m; ++i) os << ',' << fmt(r.u[i]);
    os << ',' << fmt(r.V_true) << ',' << fmt(r.V_model) << ',' << fmt(r.eps_bar) << ','
       << fmt(r.delta) << ',' << r.event << '\n';
  }
}

TraceFile read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trace file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  TraceFile tf;
  {
    const std::vector<std::string> cols = split_line(line);
    for (const std::string& c : cols) {
      if (c.rfind("x_true_", 0) == 0) ++tf.n;
      if (c.rfind("u_", 0) == 0) ++tf.m;
    }
    if (tf.n < 1 || tf.m < 1 || line != trace_header(tf.n, tf.m)) {
      throw ConfigError("unrecognized trace header: " + line);
    }
  }

  const std::size_t numeric = static_cast<std::size_t>(2 * tf.n + tf.m + 5);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_line(line);
    if (f.size() < numeric + 1) throw ConfigError("short trace row: " + line);

    TraceRecord r;
    std::size_t k = 0;
    r.t = parse_field(f[k++]);
    r.x_true.resize(tf.n);
    for (int i = 0; i < tf.n; ++i) r.x_true[i] = parse_field(f[k++]);
    r.x_model.resize(tf.n);
    for (int i = 0; i < tf.n; ++i) r.x_model[i] = parse_field(f[k++]);
    r.u.resize(tf.m);
    for (int i = 0; i < tf.m; ++i) r.u[i] = parse_field(f[k++]);
    r.V_true = parse_field(f[k++]);
    r.V_model = parse_field(f[k++]);
    r.eps_bar = parse_field(f[k++]);
    r.delta = parse_field(f[k++]);
    r.event = f[k++];
    while (k < f.size()) r.event += "," + f[k++];
    tf.records.push_back(std::move(r));
  }
  return tf;
}

void write_field_csv(std::ostream& os, int n, const FieldResult& field) {
  for (int i = 1; i <= n; ++i) os << (i > 1 ? "," : "") << "x_" << i;
  os << ",eps_bar,eps0,eps1,winning_subset\n";
  for (const FieldPoint& pt : field.points) {
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << fmt(pt.x[i]);
    os << ',' << fmt(pt.eps_bar) << ',' << (pt.eps0 ? fmt(*pt.eps0) : std::string()) << ','
       << (pt.eps1 ? fmt(*pt.eps1) : std::string()) << ',';
    for (std::size_t j = 0; j < pt.winning_subset.size(); ++j) {
      if (j) os << ';';
      os << pt.winning_subset[j] + 1;
    }
    os << '\n';
  }
  if (field.points.empty()) {
    os << "# warning: field sweep is empty (operating region inside the core ball)\n";
    return;
  }
  os << "# minimum eps_bar = " << fmt(field.min_eps_bar) << " at [";
  for (int i = 0; i < field.argmin.size(); ++i) os << (i ? ", " : "") << fmt(field.argmin[i]);
  os << "]\n";
  os << "# minimum eps_bar uncapped = " << fmt(field.min_eps_bar_raw) << '\n';
  os << "# required accuracy = " << fmt(field.required_accuracy)
     << " (half the uncapped minimum)\n";
}

void write_summary_json(std::ostream& os, const std::string& scenario, const SimSummary& s) {
  os << "{\n";
  os << "  \"schema\": \"stclf-summary-1\",\n";
  os << "  \"scenario\": " << json_string(scenario) << ",\n";
  os << "  \"contained\": " << (s.contained ? "true" : "false") << ",\n";
  os << "  \"failure\": " << (s.failure.empty() ? "null" : json_string(s.failure)) << ",\n";
  os << "  \"entry_time\": " << (s.entry_time ? json_number(*s.entry_time) : "null") << ",\n";
  os << "  \"max_dist_after_entry\": " << json_number(s.max_dist_after_entry) << ",\n";
  os << "  \"final_dist\": " << json_number(s.final_dist) << ",\n";
  os << "  \"violations\": " << s.violations << ",\n";
  os << "  \"measurements\": " << s.measurements << ",\n";
  os << "  \"min_dwell\": " << json_number(s.min_dwell) << ",\n";
  os << "  \"mean_dwell\": " << json_number(s.mean_dwell) << ",\n";
  os << "  \"core_dwell_count\": " << s.core_dwell_count << ",\n";
  os << "  \"fallback_count\": " << s.fallback_count << ",\n";
  os << "  \"decay_band_violations\": " << s.decay_band_violations << ",\n";
  os << "  \"level_set_violations\": " << s.level_set_violations << ",\n";
  os << "  \"displacement_violations\": " << s.displacement_violations << ",\n";
  os << "  \"consistency_violations\": " << s.consistency_violations << ",\n";
  os << "  \"region_exit_count\": " << s.region_exit_count << ",\n";
  os << "  \"horizon\": " << json_number(s.horizon) << ",\n";
  os << "  \"h\": " << json_number(s.h) << ",\n";
  os << "  \"eps\": " << json_number(s.eps) << ",\n";
  os << "  \"seed\": " << s.seed << ",\n";
  os << "  \"noise\": " << json_string(s.noise) << ",\n";
  os << "  \"strategy\": " << json_string(s.strategy) << ",\n";
  os << "  \"warnings\": [";
  for (std::size_t i = 0; i < s.warnings.size(); ++i) {
    os << (i ? ", " : "") << json_string(s.warnings[i]);
  }
  os << "]\n}\n";
}

void write_prepared_json(std::ostream& os, const std::string& scenario, const Prepared& p) {
  os << "{\n";
  os << "  \"schema\": \"stclf-prepared-1\",\n";
  os << "  \"scenario\": " << json_string(scenario) << ",\n";
  os << "  \"max_init_dist\": " << json_number(p.max_init_dist) << ",\n";
  os << "  \"Rhat\": " << json_number(p.ctx.ws.Rhat) << ",\n";
  os << "  \"Vhat\": " << json_number(p.ctx.ws.Vhat) << ",\n";
  os << "  \"Rhat_star\": " << json_number(p.ctx.ws.Rhat_star) << ",\n";
  os << "  \"L\": [";
  for (int i = 0; i < p.ctx.L.size(); ++i) os << (i ? ", " : "") << json_number(p.ctx.L[i]);
  os << "],\n";
  os << "  \"wbar\": " << json_number(p.ctx.wbar) << ",\n";
  os << "  \"Fbar\": " << json_number(p.ctx.Fbar) << ",\n";
  os << "  \"Fbar0\": " << json_number(p.ctx.Fbar0) << ",\n";
  os << "  \"eps_min\": " << json_number(p.ctx.eps_min) << ",\n";
  os << "  \"r\": " << json_number(p.geom.r) << ",\n";
  os << "  \"V_r\": " << json_number(p.geom.V_r) << ",\n";
  os << "  \"r_tilde\": " << json_number(p.geom.r_tilde) << ",\n";
  os << "  \"r_star\": " << json_number(p.geom.r_star) << ",\n";
  os << "  \"field_points\": " << p.field.points.size() << ",\n";
  os << "  \"field_min_eps_bar\": " << json_number(p.field.min_eps_bar) << ",\n";
  os << "  \"field_min_eps_bar_uncapped\": " << json_number(p.field.min_eps_bar_raw) << ",\n";
  os << "  \"required_accuracy\": " << json_number(p.field.required_accuracy) << ",\n";
  os << "  \"report\": [";
  for (std::size_t i = 0; i < p.report.rows.size(); ++i) {
    const VerifyRow& row = p.report.rows[i];
    os << (i ? ", " : "") << "{\"name\": " << json_string(row.name)
       << ", \"pass\": " << (row.pass ? "true" : "false")
       << ", \"required\": " << (row.required ? "true" : "false")
       << ", \"detail\": " << json_string(row.detail) << "}";
  }
  os << "]\n}\n";
}

void write_verify_report(std::ostream& os, const std::string& scenario,
                         const VerifyReport& report) {
  os << "hypothesis verification: " << scenario << '\n';
  for (const VerifyRow& row : report.rows) {
    os << "  [" << (row.pass ? "PASS" : "FAIL") << "] " << row.name;
    if (!row.required) os << " (informational)";
    os << ": " << row.detail << '\n';
  }
  os << "required rows: " << (report.all_required_pass() ? "PASS" : "FAIL") << '\n';
}

}  // namespace stclf
