#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "okrig/errors.hpp"

namespace okrig {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Ordered set of unique sample identifiers with an id -> row lookup.
/// Immutable after construction; shared read-only between objects.
class SampleRegistry {
public:
    explicit SampleRegistry(std::vector<std::string> ids);

    int size() const { return static_cast<int>(ids_.size()); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(int i) const { return ids_.at(static_cast<std::size_t>(i)); }

    /// Row of an id, or -1 when absent.
    int find(const std::string& id) const;
    bool contains(const std::string& id) const { return find(id) >= 0; }

    bool operator==(const SampleRegistry& other) const { return ids_ == other.ids_; }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, int> index_;
};

using RegistryPtr = std::shared_ptr<const SampleRegistry>;

enum class OmicKind { GenotypeDosage, Continuous };

/// Sample-by-marker data matrix. Dosage datasets carry per-marker
/// reference allele frequencies; entries are NaN for markers whose
/// frequency is undefined (all values missing).
struct OmicDataset {
    RegistryPtr registry;
    OmicKind kind = OmicKind::Continuous;
    MatrixXd values;      // n_samples x n_markers, 0 where missing
    BoolArray missing;    // same shape, true where value is absent
    std::vector<std::string> marker_ids;
    VectorXd allele_freqs;  // dosage only; size n_markers or 0

    int n_samples() const { return static_cast<int>(values.rows()); }
    int n_markers() const { return static_cast<int>(values.cols()); }
    bool has_missing() const { return missing.any(); }

    void validate() const;
};

/// Recompute in-sample allele frequencies p_l = mean(dosage_l)/2 over
/// non-missing entries; NaN for all-missing markers.
VectorXd dosage_allele_freqs(const MatrixXd& values, const BoolArray& missing);

enum class Provenance { GRM, Correlation, Composite, Identity, Loaded };

struct SimilarityMatrix {
    RegistryPtr registry;
    MatrixXd values;  // n x n symmetric
    Provenance provenance = Provenance::Loaded;
    std::optional<double> marker_count;  // markers used in construction

    int size() const { return static_cast<int>(values.rows()); }

    /// Checks the symmetry invariant (1e-10 relative). Loaded matrices
    /// slightly off are symmetrized as (S + S^T)/2 with a warning; a
    /// larger violation throws ValidationError.
    void validate_or_symmetrize();
    void validate() const;
};

SimilarityMatrix identity_similarity(RegistryPtr registry);

enum class TraitKind { Quantitative, Binary };

struct Cohort {
    RegistryPtr registry;
    VectorXd phenotype;
    TraitKind trait_kind = TraitKind::Quantitative;
    MatrixXd covariates;  // n x p; 0 columns when none

    int size() const { return static_cast<int>(phenotype.size()); }
    bool has_covariates() const { return covariates.cols() > 0; }

    void validate() const;
};

/// Non-negative component weights summing to <= 1; the remainder is the
/// environmental nugget on the identity.
struct WeightConfig {
    std::vector<std::pair<std::string, double>> component_weights;

    double sum() const;
    double nugget() const;
    std::size_t size() const { return component_weights.size(); }

    void validate() const;  // throws WeightSumExceedsOne / BadTheta
};

// ---- sample alignment ----------------------------------------------------

/// Sorted intersection of the given registries. Throws EmptyIntersection
/// when no id is shared by all of them.
RegistryPtr intersect_registries(const std::vector<const SampleRegistry*>& registries);

/// Row-select an object onto a target registry (every target id must be
/// present in the source). Value-by-id pairs are preserved.
OmicDataset align_to(const OmicDataset& d, const RegistryPtr& target);
SimilarityMatrix align_to(const SimilarityMatrix& s, const RegistryPtr& target);
Cohort align_to(const Cohort& c, const RegistryPtr& target);

}  // namespace okrig
