#include "fahs/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fahs/errors.hpp"

namespace fahs {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
    out << kRecordsHeader << '\n';
    for (const auto& r : records) {
        out << r.setting_id << ',' << r.replication << ',' << r.seed << ',' << r.procedure
            << ',' << format_double(r.s) << ',' << format_double(r.gamma) << ','
            << format_double(r.rho) << ',' << r.m << ',' << r.R << ',' << r.FD << ',' << r.TD
            << ',' << format_double(r.fdp) << ',' << format_double(r.power) << ','
            << opt_field(r.xi_hat) << ',' << opt_field(r.pdc_tail) << ',' << r.wall_ms
            << '\n';
    }
}

void write_records_csv(const std::string& path, const std::vector<ReplicationRecord>& records) {
    auto out = open_or_throw(path);
    write_records_csv(out, records);
}

void write_summary_csv(std::ostream& out, const AggregateSummary& summary) {
    out << "setting_id,procedure,s,gamma,rho,m,n,fdr,mean_power,mean_xi_hat,"
           "fdp_min,fdp_q1,fdp_median,fdp_q3,fdp_max,fdp_lo_whisker,fdp_hi_whisker,"
           "n_outliers\n";
    for (const auto& c : summary.cells) {
        out << c.setting_id << ',' << c.procedure << ',' << format_double(c.s) << ','
            << format_double(c.gamma) << ',' << format_double(c.rho) << ',' << c.m << ','
            << c.n << ',' << format_double(c.fdr) << ',' << format_double(c.mean_power) << ','
            << opt_field(c.mean_xi_hat) << ',' << format_double(c.fdp_box.min) << ','
            << format_double(c.fdp_box.q1) << ',' << format_double(c.fdp_box.median) << ','
            << format_double(c.fdp_box.q3) << ',' << format_double(c.fdp_box.max) << ','
            << format_double(c.fdp_box.lo_whisker) << ','
            << format_double(c.fdp_box.hi_whisker) << ',' << c.fdp_box.outliers.size()
            << '\n';
    }
}

void write_summary_csv(const std::string& path, const AggregateSummary& summary) {
    auto out = open_or_throw(path);
    write_summary_csv(out, summary);
}

std::vector<double> read_numeric_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        try {
            std::size_t consumed = 0;
            const double v = std::stod(field, &consumed);
            if (consumed != field.size()) throw std::invalid_argument(field);
            values.push_back(v);
        } catch (...) {
            if (line_no == 1) continue;  // header
            throw io_error("non-numeric value '" + field + "'", line_no);
        }
    }
    if (values.empty()) throw io_error("no numeric values in '" + path + "'");
    return values;
}

}  // namespace fahs
