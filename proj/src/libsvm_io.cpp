#include "rpsvm/libsvm_io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rpsvm/errors.hpp"

namespace rpsvm {

namespace {

bool blank(const std::string& s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

double parse_double_token(const std::string& tok, size_t line) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        throw parse_error("malformed numeric token '" + tok + "'", line);
    }
    return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, size_t dim_override) {
    Dataset ds;
    SparseMatrix& m = ds.x;
    std::string line;
    size_t lineno = 0;
    size_t max_index = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        double label = parse_double_token(tok, lineno);
        ds.y.push_back(label);
        size_t prev_index = 0;
        while (ls >> tok) {
            size_t colon = tok.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 >= tok.size()) {
                throw parse_error("expected idx:val, got '" + tok + "'", lineno);
            }
            std::string idx_s = tok.substr(0, colon);
            for (char c : idx_s) {
                if (!std::isdigit(static_cast<unsigned char>(c))) {
                    throw parse_error("malformed feature index '" + idx_s + "'", lineno);
                }
            }
            errno = 0;
            unsigned long long idx = std::strtoull(idx_s.c_str(), nullptr, 10);
            if (errno == ERANGE || idx == 0) {
                throw parse_error("feature index must be a positive integer, got '" + idx_s + "'",
                                  lineno);
            }
            if (idx <= prev_index) {
                throw parse_error("feature indices must be strictly increasing, got " + idx_s,
                                  lineno);
            }
            prev_index = idx;
            double value = parse_double_token(tok.substr(colon + 1), lineno);
            if (dim_override > 0 && idx > dim_override) {
                throw parse_error("feature index " + idx_s + " exceeds forced dimension " +
                                      std::to_string(dim_override),
                                  lineno);
            }
            if (value != 0.0) {
                m.col_idx.push_back(static_cast<uint32_t>(idx - 1));
                m.values.push_back(value);
            }
            if (idx > max_index) max_index = idx;
        }
        m.row_ptr.push_back(m.values.size());
    }
    m.rows = ds.y.size();
    m.cols = dim_override > 0 ? dim_override : max_index;
    if (m.rows == 0) throw parse_error("no data rows found (empty matrix)", lineno);
    m.validate();
    return ds;
}

Dataset parse_libsvm_file(const std::string& path, size_t dim_override) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_libsvm(in, dim_override);
}

void write_libsvm(std::ostream& out, const DataMatrix& x, const std::vector<double>& y) {
    if (y.size() != x.rows()) throw std::invalid_argument("write_libsvm: label count mismatch");
    char buf[64];
    for (size_t i = 0; i < x.rows(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", y[i]);
        out << buf;
        x.for_each_in_row(i, [&](uint32_t c, double v) {
            std::snprintf(buf, sizeof(buf), " %u:%.17g", c + 1, v);
            out << buf;
        });
        out << '\n';
    }
}

void write_libsvm_file(const std::string& path, const DataMatrix& x, const std::vector<double>& y) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_libsvm(out, x, y);
}

Dataset parse_dense_csv(std::istream& in) {
    std::string line;
    size_t lineno = 0;
    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        std::vector<double> vals;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) vals.push_back(parse_double_token(cell, lineno));
        if (vals.size() < 2) throw parse_error("need a label and at least one feature", lineno);
        if (width == 0) width = vals.size();
        if (vals.size() != width) throw parse_error("inconsistent column count", lineno);
        labels.push_back(vals[0]);
        vals.erase(vals.begin());
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw parse_error("no data rows found (empty matrix)", lineno);
    Dataset ds;
    SparseMatrix& m = ds.x;
    m.rows = rows.size();
    m.cols = width - 1;
    for (const auto& r : rows) {
        for (size_t j = 0; j < r.size(); ++j) {
            if (r[j] != 0.0) {
                m.col_idx.push_back(static_cast<uint32_t>(j));
                m.values.push_back(r[j]);
            }
        }
        m.row_ptr.push_back(m.values.size());
    }
    ds.y = std::move(labels);
    m.validate();
    return ds;
}

Dataset parse_dense_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_dense_csv(in);
}

namespace {

bool timing_metric(const std::string& m) { return m == "t_rp" || m == "t_run"; }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const ExperimentReport& report, bool include_timings) {
    out << "kind,r,metric,mean,std\n";
    for (const CellRow& row : report.rows) {
        if (!include_timings && timing_metric(row.metric)) continue;
        out << row.kind << ',' << row.r << ',' << row.metric << ',' << fmt(row.mean) << ','
            << fmt(row.stddev) << '\n';
    }
}

std::string report_to_json(const ExperimentReport& report, bool include_timings) {
    nlohmann::json rows = nlohmann::json::array();
    for (const CellRow& row : report.rows) {
        if (!include_timings && timing_metric(row.metric)) continue;
        rows.push_back({{"kind", row.kind},
                        {"r", row.r},
                        {"metric", row.metric},
                        {"mean", row.mean},
                        {"std", row.stddev}});
    }
    return nlohmann::json{{"cells", rows}}.dump(2);
}

void write_raw_log_jsonl(std::ostream& out, const ExperimentReport& report) {
    for (const RunRecord& rec : report.raw) {
        nlohmann::json j{{"kind", rec.kind},         {"r", rec.r},
                         {"sketch_rep", rec.sketch_rep}, {"cv_rep", rec.cv_rep},
                         {"fold", rec.fold},         {"skipped", rec.skipped},
                         {"eps_in", rec.eps_in},     {"eps_out", rec.eps_out},
                         {"mse", rec.mse},           {"beta", rec.beta},
                         {"gamma", rec.gamma},       {"t_rp", rec.t_rp},
                         {"t_train", rec.t_train},   {"n_train", rec.n_train},
                         {"n_test", rec.n_test}};
        out << j.dump() << '\n';
    }
}

}  // namespace rpsvm
