#include "okrig/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace okrig {

namespace {

using json = nlohmann::json;

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_number(const std::string& cell, const std::string& path, int line_no,
                    int col_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError(path + ":" + std::to_string(line_no) + ": column " +
                         std::to_string(col_no) + ": cannot parse number '" + cell + "'");
    return v;
}

struct TableFile {
    std::vector<std::string> marker_ids;
    std::vector<std::string> sample_ids;
    MatrixXd values;
    BoolArray missing;
};

TableFile read_table(const std::string& path, bool dosage) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    strip_cr(line);
    auto header = split_tabs(line);
    if (header.empty() || header[0] != "ID")
        throw ParseError(path + ":1: header must start with 'ID'");
    TableFile table;
    table.marker_ids.assign(header.begin() + 1, header.end());
    const int m = static_cast<int>(table.marker_ids.size());
    if (m == 0) throw ParseError(path + ":1: no marker columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::vector<bool>> row_missing;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (static_cast<int>(cells.size()) != m + 1)
            throw ParseError(path + ":" + std::to_string(line_no) + ": row for '" +
                             cells[0] + "' has " + std::to_string(cells.size() - 1) +
                             " values, expected " + std::to_string(m));
        table.sample_ids.push_back(cells[0]);
        std::vector<double> vals(static_cast<std::size_t>(m), 0.0);
        std::vector<bool> miss(static_cast<std::size_t>(m), false);
        for (int c = 0; c < m; ++c) {
            const std::string& cell = cells[static_cast<std::size_t>(c) + 1];
            if (cell == "NA") {
                miss[static_cast<std::size_t>(c)] = true;
                continue;
            }
            double v = parse_number(cell, path, line_no, c + 2);
            if (dosage && (v < 0.0 || v > 2.0))
                throw RangeError(path + ":" + std::to_string(line_no) + ": dosage " + cell +
                                 " outside [0,2] for marker " +
                                 table.marker_ids[static_cast<std::size_t>(c)]);
            vals[static_cast<std::size_t>(c)] = v;
        }
        rows.push_back(std::move(vals));
        row_missing.push_back(std::move(miss));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");

    const int n = static_cast<int>(rows.size());
    table.values.resize(n, m);
    table.missing.resize(n, m);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            table.values(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            table.missing(i, c) =
                row_missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        }
    return table;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

OmicDataset read_dosage_tsv(const std::string& path) {
    TableFile table = read_table(path, true);
    OmicDataset d;
    d.registry = std::make_shared<const SampleRegistry>(std::move(table.sample_ids));
    d.kind = OmicKind::GenotypeDosage;
    d.values = std::move(table.values);
    d.missing = std::move(table.missing);
    d.marker_ids = std::move(table.marker_ids);
    d.allele_freqs = dosage_allele_freqs(d.values, d.missing);
    d.validate();
    return d;
}

OmicDataset read_continuous_tsv(const std::string& path) {
    TableFile table = read_table(path, false);
    OmicDataset d;
    d.registry = std::make_shared<const SampleRegistry>(std::move(table.sample_ids));
    d.kind = OmicKind::Continuous;
    d.values = std::move(table.values);
    d.missing = std::move(table.missing);
    d.marker_ids = std::move(table.marker_ids);
    d.validate();
    return d;
}

void write_dataset_tsv(const OmicDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "ID";
    for (const auto& id : data.marker_ids) out << '\t' << id;
    out << '\n';
    for (int i = 0; i < data.n_samples(); ++i) {
        out << data.registry->id(i);
        for (int c = 0; c < data.n_markers(); ++c) {
            out << '\t';
            if (data.missing(i, c))
                out << "NA";
            else
                out << format_double(data.values(i, c));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

Cohort read_phenotype_tsv(const std::string& path, TraitKind kind) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    std::vector<std::string> ids;
    std::vector<double> phenos;
    std::vector<std::vector<double>> covs;
    std::string line;
    int line_no = 0;
    int n_cov = -1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (line_no == 1 && cells[0] == "ID") continue;  // optional header
        if (cells.size() < 2)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected at least sample id and phenotype");
        if (n_cov < 0)
            n_cov = static_cast<int>(cells.size()) - 2;
        else if (static_cast<int>(cells.size()) - 2 != n_cov)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": inconsistent column count");
        ids.push_back(cells[0]);
        double y = parse_number(cells[1], path, line_no, 2);
        if (kind == TraitKind::Binary && y != 0.0 && y != 1.0)
            throw CodingError(path + ":" + std::to_string(line_no) +
                              ": binary phenotype must be 0 or 1, got '" + cells[1] + "'");
        phenos.push_back(y);
        std::vector<double> row;
        for (int c = 0; c < n_cov; ++c)
            row.push_back(parse_number(cells[static_cast<std::size_t>(c) + 2], path,
                                       line_no, c + 3));
        covs.push_back(std::move(row));
    }
    if (ids.empty()) throw ParseError(path + ": no data rows");

    Cohort cohort;
    cohort.registry = std::make_shared<const SampleRegistry>(std::move(ids));
    cohort.trait_kind = kind;
    cohort.phenotype.resize(static_cast<int>(phenos.size()));
    for (std::size_t i = 0; i < phenos.size(); ++i)
        cohort.phenotype(static_cast<int>(i)) = phenos[i];
    if (n_cov > 0) {
        cohort.covariates.resize(static_cast<int>(covs.size()), n_cov);
        for (std::size_t i = 0; i < covs.size(); ++i)
            for (int c = 0; c < n_cov; ++c)
                cohort.covariates(static_cast<int>(i), c) = covs[i][static_cast<std::size_t>(c)];
    }
    cohort.validate();
    return cohort;
}

void write_phenotype_tsv(const Cohort& cohort, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (int i = 0; i < cohort.size(); ++i) {
        out << cohort.registry->id(i) << '\t' << format_double(cohort.phenotype(i));
        for (int c = 0; c < cohort.covariates.cols(); ++c)
            out << '\t' << format_double(cohort.covariates(i, c));
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

VectorXd read_frequency_tsv(const std::string& path,
                            const std::vector<std::string>& marker_ids) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::unordered_map<std::string, double> freq;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (cells.size() != 2)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected marker id and frequency");
        double p = parse_number(cells[1], path, line_no, 2);
        if (!(p > 0.0 && p < 1.0))
            throw RangeError(path + ":" + std::to_string(line_no) +
                             ": frequency must lie strictly in (0,1)");
        freq[cells[0]] = p;
    }
    VectorXd out(static_cast<int>(marker_ids.size()));
    for (std::size_t l = 0; l < marker_ids.size(); ++l) {
        auto it = freq.find(marker_ids[l]);
        if (it == freq.end())
            throw ValidationError("no external frequency for marker '" + marker_ids[l] + "'");
        out(static_cast<int>(l)) = it->second;
    }
    return out;
}

// ---- GCTA GRM triplet ------------------------------------------------

namespace {

void write_triangle_f32(const MatrixXd& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const int n = static_cast<int>(m.rows());
    std::vector<float> buf;
    buf.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) buf.push_back(static_cast<float>(m(i, j)));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw IoError("failed writing '" + path + "'");
}

MatrixXd read_triangle_f32(const std::string& path, int n) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    const std::uint64_t expected =
        4ull * static_cast<std::uint64_t>(n) * (static_cast<std::uint64_t>(n) + 1) / 2;
    std::uint64_t actual = std::filesystem::file_size(path);
    if (actual != expected)
        throw SizeMismatch("'" + path + "' is " + std::to_string(actual) +
                           " bytes, expected 4*n(n+1)/2 = " + std::to_string(expected) +
                           " for n = " + std::to_string(n));
    std::vector<float> buf(static_cast<std::size_t>(n) * (n + 1) / 2);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw IoError("failed reading '" + path + "'");
    MatrixXd m(n, n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            m(i, j) = m(j, i) = static_cast<double>(buf[k]);
            ++k;
        }
    return m;
}

}  // namespace

GrmFileSet write_grm_gcta(const SimilarityMatrix& matrix, const MatrixXd& counts,
                          const std::string& prefix) {
    matrix.validate();
    GrmFileSet files{prefix};

    std::ofstream ids(files.id_file());
    if (!ids) throw IoError("cannot open '" + files.id_file() + "' for writing");
    for (const auto& id : matrix.registry->ids()) ids << id << '\t' << id << '\n';
    if (!ids) throw IoError("failed writing '" + files.id_file() + "'");

    write_triangle_f32(matrix.values, files.bin_file());
    if (counts.rows() != matrix.values.rows() || counts.cols() != matrix.values.cols())
        throw ValidationError("pair count matrix shape does not match the GRM");
    write_triangle_f32(counts, files.n_file());
    return files;
}

GrmReadResult read_grm_gcta(const std::string& prefix) {
    GrmFileSet files{prefix};

    std::ifstream ids(files.id_file());
    if (!ids) throw IoError("cannot open '" + files.id_file() + "' for reading");
    std::vector<std::string> sample_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(ids, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (cells.size() < 2)
            throw ParseError(files.id_file() + ":" + std::to_string(line_no) +
                             ": expected family and individual id");
        sample_ids.push_back(cells[1]);
    }
    if (sample_ids.empty()) throw ParseError(files.id_file() + ": no ids");
    const int n = static_cast<int>(sample_ids.size());

    GrmReadResult out;
    out.matrix.registry = std::make_shared<const SampleRegistry>(std::move(sample_ids));
    out.matrix.values = read_triangle_f32(files.bin_file(), n);
    out.matrix.provenance = Provenance::Loaded;
    out.matrix.validate_or_symmetrize();
    if (std::filesystem::exists(files.n_file()))
        out.counts = read_triangle_f32(files.n_file(), n);
    return out;
}

// ---- JSON evaluation report -------------------------------------------

namespace {

json nan_to_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double null_to_nan(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

json weights_to_json(const WeightConfig& w) {
    json obj = json::object();
    for (const auto& [name, theta] : w.component_weights) obj[name] = theta;
    obj["nugget"] = w.nugget();
    return obj;
}

std::string grid_key(const WeightConfig& w) {
    std::string key;
    for (std::size_t s = 0; s < w.component_weights.size(); ++s) {
        if (s) key += ',';
        key += format_double(w.component_weights[s].second);
    }
    return key;
}

}  // namespace

json report_to_json(const EvaluationReport& report) {
    if (report.per_repeat_values.empty())
        throw ValidationError("report has no repeat values");
    json j;
    j["seed"] = report.seed;
    j["k_folds"] = report.k_folds;
    j["n_repeats"] = report.n_repeats;
    j["metric_name"] = metric_name(report.metric);
    json values = json::array();
    for (double v : report.per_repeat_values) values.push_back(nan_to_null(v));
    j["per_repeat_values"] = std::move(values);
    j["mean"] = nan_to_null(report.mean);
    j["ci"] = json::array({nan_to_null(report.ci_lo), nan_to_null(report.ci_hi)});
    j["best_weights"] = weights_to_json(report.weights);
    json grid = json::object();
    for (const auto& point : report.grid) {
        json entry;
        entry["mean"] = nan_to_null(point.mean);
        entry["ci"] = json::array({nan_to_null(point.ci_lo), nan_to_null(point.ci_hi)});
        entry["degenerate_repeats"] = point.degenerate_repeats;
        grid[grid_key(point.weights)] = std::move(entry);
    }
    j["grid"] = std::move(grid);
    j["fold_assignments"] = report.fold_assignments;
    j["degenerate_repeats"] = report.degenerate_repeats;
    return j;
}

EvaluationReport report_from_json(const json& j) {
    EvaluationReport report;
    report.seed = j.at("seed").get<std::uint64_t>();
    report.k_folds = j.at("k_folds").get<int>();
    report.n_repeats = j.at("n_repeats").get<int>();
    report.metric = metric_from_name(j.at("metric_name").get<std::string>());
    for (const auto& v : j.at("per_repeat_values"))
        report.per_repeat_values.push_back(null_to_nan(v));
    report.mean = null_to_nan(j.at("mean"));
    report.ci_lo = null_to_nan(j.at("ci").at(0));
    report.ci_hi = null_to_nan(j.at("ci").at(1));
    for (const auto& [name, theta] : j.at("best_weights").items())
        if (name != "nugget")
            report.weights.component_weights.emplace_back(name, theta.get<double>());
    report.fold_assignments = j.at("fold_assignments").get<std::vector<int>>();
    report.degenerate_repeats = j.at("degenerate_repeats").get<int>();
    return report;
}

void write_report_json(const EvaluationReport& report, const std::string& path) {
    json j = report_to_json(report);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

EvaluationReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return report_from_json(j);
}

}  // namespace okrig
