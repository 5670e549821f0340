#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rpsvm/experiments.hpp"
#include "rpsvm/matrix.hpp"

namespace rpsvm {

struct Dataset {
    SparseMatrix x;
    std::vector<double> y;
};

// LIBSVM sparse text format: one "label idx:val idx:val ..." line per point,
// 1-based strictly increasing indices. Blank lines are skipped; explicit
// zeros are dropped. dim_override of 0 means use the largest index seen.
Dataset parse_libsvm(std::istream& in, size_t dim_override = 0);
Dataset parse_libsvm_file(const std::string& path, size_t dim_override = 0);

void write_libsvm(std::ostream& out, const DataMatrix& x, const std::vector<double>& y);
void write_libsvm_file(const std::string& path, const DataMatrix& x, const std::vector<double>& y);

// Dense CSV with the label in the first column.
Dataset parse_dense_csv(std::istream& in);
Dataset parse_dense_csv_file(const std::string& path);

// Report writers. CSV header: kind,r,metric,mean,std. include_timings=false
// drops the wall-clock rows (t_rp, t_run) so reruns are byte-identical.
void write_report_csv(std::ostream& out, const ExperimentReport& report,
                      bool include_timings = true);
std::string report_to_json(const ExperimentReport& report, bool include_timings = true);
void write_raw_log_jsonl(std::ostream& out, const ExperimentReport& report);

}  // namespace rpsvm
