#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tvnet/hard_instances.hpp"
#include "tvnet/optimizers.hpp"

namespace tvnet {

// Ordered key/value pairs echoed as "# key=value" comment lines.
using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

// 17 significant digits, C locale.
std::string format_real(double v);

void write_header(std::ostream& os, const HeaderEntries& header);

// k,grad_queries,comm_rounds,grad_norm_sq,loss,consensus_err
void write_run_csv(std::ostream& os, const RunRecord& record, const HeaderEntries& header = {});

// comm_rounds,max_prog,bound followed by a "# result=PASS" or "# result=FAIL" trailer.
void write_progression_csv(std::ostream& os, const zero_chain::ProgressionReport& report,
                           const HeaderEntries& header = {});

}  // namespace tvnet
