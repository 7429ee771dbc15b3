#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "okrig/evaluation.hpp"
#include "okrig/types.hpp"

namespace okrig {

// ---- TSV data files --------------------------------------------------
//
// UTF-8, tab separated, "NA" for missing. Header row: "ID" followed by
// marker ids; body rows: sample id followed by one value per marker.

/// Dosage matrix in [0, 2]. Allele frequencies are the in-sample
/// estimates p = mean(dosage)/2 over non-missing entries (NaN when a
/// marker is entirely missing).
OmicDataset read_dosage_tsv(const std::string& path);

OmicDataset read_continuous_tsv(const std::string& path);

void write_dataset_tsv(const OmicDataset& data, const std::string& path);

/// Columns: sample id, phenotype, then optional covariate columns in
/// file order. Binary phenotypes must be coded 0/1.
Cohort read_phenotype_tsv(const std::string& path, TraitKind kind);

void write_phenotype_tsv(const Cohort& cohort, const std::string& path);

/// Optional external allele frequencies: two columns, marker id and
/// frequency in (0,1), no header.
VectorXd read_frequency_tsv(const std::string& path,
                            const std::vector<std::string>& marker_ids);

// ---- GCTA GRM triplet ------------------------------------------------
//
// <prefix>.grm.id   two tab-separated columns (family id, individual id)
// <prefix>.grm.bin  lower triangle including the diagonal, row-major by
//                   (i, j <= i), IEEE-754 single precision little endian
// <prefix>.grm.N.bin  per-pair marker counts, same layout and encoding

struct GrmFileSet {
    std::string prefix;
    std::string id_file() const { return prefix + ".grm.id"; }
    std::string bin_file() const { return prefix + ".grm.bin"; }
    std::string n_file() const { return prefix + ".grm.N.bin"; }
};

GrmFileSet write_grm_gcta(const SimilarityMatrix& matrix, const MatrixXd& counts,
                          const std::string& prefix);

struct GrmReadResult {
    SimilarityMatrix matrix;
    MatrixXd counts;  // 0 x 0 when the N file is absent
};

GrmReadResult read_grm_gcta(const std::string& prefix);

// ---- JSON evaluation report -------------------------------------------
//
// {seed, k_folds, n_repeats, metric_name, per_repeat_values[], mean,
//  ci:[lo,hi], best_weights{}, grid{}, fold_assignments[],
//  degenerate_repeats}. Keys are emitted in sorted order; undefined
// metric values appear as null. Serialization is deterministic.

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

void write_report_json(const EvaluationReport& report, const std::string& path);
EvaluationReport read_report_json(const std::string& path);

/// Shortest round-trip decimal form of a double (also used for TSV).
std::string format_double(double v);

}  // namespace okrig
