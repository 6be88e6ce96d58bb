#pragma once

// CSV emission for replication records and aggregate summaries. Numbers are
// written in shortest round-trip form, so identical in-memory results always
// serialize to identical bytes.

#include <ostream>
#include <string>
#include <vector>

#include "fahs/simulate.hpp"

namespace fahs {

// Shortest representation that parses back to the same double; "nan" for NaN.
std::string format_double(double value);

inline constexpr const char* kRecordsHeader =
    "setting_id,replication,seed,procedure,s,gamma,rho,m,R,FD,TD,fdp,power,xi_hat,pdc_tail,"
    "wall_ms";

void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);
void write_records_csv(const std::string& path, const std::vector<ReplicationRecord>& records);

void write_summary_csv(std::ostream& out, const AggregateSummary& summary);
void write_summary_csv(const std::string& path, const AggregateSummary& summary);

// Single numeric column (optional header line tolerated).
std::vector<double> read_numeric_column(const std::string& path);

}  // namespace fahs
