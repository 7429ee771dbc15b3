#include "okrig/types.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <set>

namespace okrig {

SampleRegistry::SampleRegistry(std::vector<std::string> ids) : ids_(std::move(ids)) {
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i].empty())
            throw ValidationError("sample id at position " + std::to_string(i) + " is empty");
        auto [it, inserted] = index_.emplace(ids_[i], static_cast<int>(i));
        if (!inserted) throw DuplicateId("duplicate sample id '" + ids_[i] + "'");
    }
}

int SampleRegistry::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

void OmicDataset::validate() const {
    if (!registry) throw ValidationError("dataset has no sample registry");
    if (values.rows() != registry->size())
        throw ValidationError("dataset row count does not match registry size");
    if (static_cast<std::size_t>(values.cols()) != marker_ids.size())
        throw ValidationError("dataset column count does not match marker id count");
    if (missing.rows() != values.rows() || missing.cols() != values.cols())
        throw ValidationError("missing mask shape does not match values");
    std::set<std::string> seen(marker_ids.begin(), marker_ids.end());
    if (seen.size() != marker_ids.size()) throw ValidationError("duplicate marker ids");
    if (kind == OmicKind::GenotypeDosage) {
        for (int j = 0; j < values.cols(); ++j)
            for (int i = 0; i < values.rows(); ++i)
                if (!missing(i, j) && (values(i, j) < 0.0 || values(i, j) > 2.0))
                    throw RangeError("dosage " + std::to_string(values(i, j)) +
                                     " outside [0,2] at sample " + registry->id(i) +
                                     ", marker " + marker_ids[static_cast<std::size_t>(j)]);
        if (allele_freqs.size() != 0 && allele_freqs.size() != values.cols())
            throw ValidationError("allele frequency count does not match marker count");
        for (int j = 0; j < allele_freqs.size(); ++j) {
            double p = allele_freqs(j);
            if (!std::isnan(p) && (p < 0.0 || p > 1.0))
                throw ValidationError("allele frequency outside [0,1] for marker " +
                                      marker_ids[static_cast<std::size_t>(j)]);
        }
    } else if (allele_freqs.size() != 0) {
        throw ValidationError("continuous dataset must not carry allele frequencies");
    }
}

VectorXd dosage_allele_freqs(const MatrixXd& values, const BoolArray& missing) {
    VectorXd p(values.cols());
    for (int j = 0; j < values.cols(); ++j) {
        double sum = 0.0;
        int n = 0;
        for (int i = 0; i < values.rows(); ++i) {
            if (missing(i, j)) continue;
            sum += values(i, j);
            ++n;
        }
        p(j) = n > 0 ? sum / (2.0 * n) : std::numeric_limits<double>::quiet_NaN();
    }
    return p;
}

namespace {

double max_asymmetry(const MatrixXd& m) {
    double worst = 0.0;
    for (int j = 0; j < m.cols(); ++j)
        for (int i = j + 1; i < m.rows(); ++i) {
            double denom = std::max({std::abs(m(i, j)), std::abs(m(j, i)), 1.0});
            worst = std::max(worst, std::abs(m(i, j) - m(j, i)) / denom);
        }
    return worst;
}

}  // namespace

void SimilarityMatrix::validate() const {
    if (!registry) throw ValidationError("similarity matrix has no sample registry");
    if (values.rows() != values.cols())
        throw ValidationError("similarity matrix is not square");
    if (values.rows() != registry->size())
        throw ValidationError("similarity matrix dimension does not match registry size");
    if (max_asymmetry(values) > 1e-10)
        throw ValidationError("similarity matrix is not symmetric within 1e-10");
}

void SimilarityMatrix::validate_or_symmetrize() {
    if (!registry) throw ValidationError("similarity matrix has no sample registry");
    if (values.rows() != values.cols())
        throw ValidationError("similarity matrix is not square");
    if (values.rows() != registry->size())
        throw ValidationError("similarity matrix dimension does not match registry size");
    double asym = max_asymmetry(values);
    if (asym > 1e-10) {
        if (asym > 1e-6)
            throw ValidationError("matrix asymmetry " + std::to_string(asym) +
                                  " too large to repair");
        std::cerr << "warning: symmetrizing similarity matrix (max relative asymmetry "
                  << asym << ")\n";
        values = ((values + values.transpose()) * 0.5).eval();
    }
}

SimilarityMatrix identity_similarity(RegistryPtr registry) {
    SimilarityMatrix s;
    s.values = MatrixXd::Identity(registry->size(), registry->size());
    s.registry = std::move(registry);
    s.provenance = Provenance::Identity;
    return s;
}

void Cohort::validate() const {
    if (!registry) throw ValidationError("cohort has no sample registry");
    if (phenotype.size() != registry->size())
        throw ValidationError("phenotype length does not match registry size");
    if (trait_kind == TraitKind::Binary) {
        for (int i = 0; i < phenotype.size(); ++i)
            if (phenotype(i) != 0.0 && phenotype(i) != 1.0)
                throw CodingError("binary phenotype for sample " + registry->id(i) +
                                  " is " + std::to_string(phenotype(i)) +
                                  ", expected 0 or 1");
    }
    if (covariates.cols() > 0 && covariates.rows() != registry->size())
        throw ValidationError("covariate row count does not match registry size");
}

double WeightConfig::sum() const {
    double s = 0.0;
    for (const auto& [name, theta] : component_weights) s += theta;
    return s;
}

double WeightConfig::nugget() const { return std::max(0.0, 1.0 - sum()); }

void WeightConfig::validate() const {
    for (const auto& [name, theta] : component_weights) {
        if (!(theta >= 0.0))
            throw BadTheta("weight for component '" + name + "' must be non-negative, got " +
                           std::to_string(theta));
    }
    if (sum() > 1.0 + 1e-12)
        throw WeightSumExceedsOne("component weights sum to " + std::to_string(sum()) +
                                  " > 1");
}

RegistryPtr intersect_registries(const std::vector<const SampleRegistry*>& registries) {
    if (registries.empty()) throw ValidationError("no registries to intersect");
    std::vector<std::string> shared;
    for (const auto& id : registries.front()->ids()) {
        bool everywhere = true;
        for (std::size_t r = 1; r < registries.size(); ++r)
            if (!registries[r]->contains(id)) {
                everywhere = false;
                break;
            }
        if (everywhere) shared.push_back(id);
    }
    if (shared.empty()) throw EmptyIntersection("registries share no sample ids");
    std::sort(shared.begin(), shared.end());
    return std::make_shared<const SampleRegistry>(std::move(shared));
}

namespace {

std::vector<int> source_rows(const SampleRegistry& source, const SampleRegistry& target) {
    std::vector<int> rows;
    rows.reserve(static_cast<std::size_t>(target.size()));
    for (const auto& id : target.ids()) {
        int r = source.find(id);
        if (r < 0) throw ValidationError("sample '" + id + "' missing from source registry");
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

OmicDataset align_to(const OmicDataset& d, const RegistryPtr& target) {
    auto rows = source_rows(*d.registry, *target);
    OmicDataset out;
    out.registry = target;
    out.kind = d.kind;
    out.marker_ids = d.marker_ids;
    out.values.resize(static_cast<int>(rows.size()), d.values.cols());
    out.missing.resize(static_cast<int>(rows.size()), d.missing.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.values.row(static_cast<int>(i)) = d.values.row(rows[i]);
        out.missing.row(static_cast<int>(i)) = d.missing.row(rows[i]);
    }
    if (d.kind == OmicKind::GenotypeDosage)
        out.allele_freqs = dosage_allele_freqs(out.values, out.missing);
    return out;
}

SimilarityMatrix align_to(const SimilarityMatrix& s, const RegistryPtr& target) {
    auto rows = source_rows(*s.registry, *target);
    SimilarityMatrix out;
    out.registry = target;
    out.provenance = s.provenance;
    out.marker_count = s.marker_count;
    int n = static_cast<int>(rows.size());
    out.values.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.values(i, j) = s.values(rows[static_cast<std::size_t>(i)],
                                        rows[static_cast<std::size_t>(j)]);
    return out;
}

Cohort align_to(const Cohort& c, const RegistryPtr& target) {
    auto rows = source_rows(*c.registry, *target);
    Cohort out;
    out.registry = target;
    out.trait_kind = c.trait_kind;
    out.phenotype.resize(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.phenotype(static_cast<int>(i)) = c.phenotype(rows[i]);
    if (c.covariates.cols() > 0) {
        out.covariates.resize(static_cast<int>(rows.size()), c.covariates.cols());
        for (std::size_t i = 0; i < rows.size(); ++i)
            out.covariates.row(static_cast<int>(i)) = c.covariates.row(rows[i]);
    }
    return out;
}

}  // namespace okrig
