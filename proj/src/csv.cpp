#include "tvnet/csv.hpp"

#include <cstdio>
#include <ostream>

namespace tvnet {

std::string format_real(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_header(std::ostream& os, const HeaderEntries& header) {
  for (const auto& [key, value] : header) os << "# " << key << '=' << value << '\n';
}

void write_run_csv(std::ostream& os, const RunRecord& record, const HeaderEntries& header) {
  write_header(os, header);
  os << "k,grad_queries,comm_rounds,grad_norm_sq,loss,consensus_err\n";
  for (const RunRow& r : record.rows)
    os << r.k << ',' << r.grad_queries << ',' << r.comm_rounds << ',' << format_real(r.grad_norm_sq) << ','
       << format_real(r.loss) << ',' << format_real(r.consensus_err) << '\n';
}

void write_progression_csv(std::ostream& os, const zero_chain::ProgressionReport& report,
                           const HeaderEntries& header) {
  write_header(os, header);
  os << "comm_rounds,max_prog,bound\n";
  for (const auto& r : report.rows) os << r.comm_rounds << ',' << r.max_prog << ',' << r.bound << '\n';
  os << "# distance=" << report.distance << '\n';
  os << "# violations=" << report.violations.size() << '\n';
  os << "# result=" << (report.ok() ? "PASS" : "FAIL") << '\n';
}

}  // namespace tvnet
