#include "okrig/simulate.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "okrig/rng.hpp"

namespace okrig {

namespace {

std::vector<std::string> make_ids(const char* stem, int n) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    int width = static_cast<int>(std::to_string(n).size());
    for (int i = 1; i <= n; ++i) {
        std::string num = std::to_string(i);
        ids.push_back(stem + std::string(static_cast<std::size_t>(width) - num.size(), '0') +
                      num);
    }
    return ids;
}

OmicDataset empty_dataset(const RegistryPtr& registry, OmicKind kind, const char* stem,
                          int n_markers) {
    OmicDataset d;
    d.registry = registry;
    d.kind = kind;
    d.values.resize(registry->size(), n_markers);
    d.missing = BoolArray::Constant(registry->size(), n_markers, false);
    d.marker_ids = make_ids(stem, n_markers);
    return d;
}

// Dosage column from binomial(2, p) draws, redrawn while monomorphic in
// sample so every simulated marker survives the GRM frequency filter.
void draw_genotype_column(Rng& rng, double p, Eigen::Ref<VectorXd> col) {
    const int n = static_cast<int>(col.size());
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            col(i) = rng.bernoulli(p) + rng.bernoulli(p);
            sum += col(i);
        }
        if (sum > 0.0 && sum < 2.0 * n) return;
    }
    throw BadTheta("could not draw a polymorphic genotype column");
}

// Standardization used for both simulation and the model covariance.
MatrixXd standardized(const OmicDataset& d) {
    if (d.missing.any())
        throw ValidationError("standardization requires a complete dataset");
    const int n = d.n_samples();
    MatrixXd x = d.values;
    if (d.kind == OmicKind::GenotypeDosage) {
        VectorXd p = d.allele_freqs.size() == d.n_markers()
                         ? d.allele_freqs
                         : dosage_allele_freqs(d.values, d.missing);
        for (int l = 0; l < x.cols(); ++l) {
            if (std::isnan(p(l)) || p(l) <= 0.0 || p(l) >= 1.0)
                throw ValidationError("monomorphic marker " +
                                      d.marker_ids[static_cast<std::size_t>(l)] +
                                      " cannot be standardized");
            x.col(l) = (x.col(l).array() - 2.0 * p(l)) / std::sqrt(2.0 * p(l) * (1.0 - p(l)));
        }
    } else {
        for (int l = 0; l < x.cols(); ++l) {
            double mean = x.col(l).mean();
            double var = (x.col(l).array() - mean).square().sum() / n;
            if (var <= 0.0)
                throw ValidationError("constant omic marker " +
                                      d.marker_ids[static_cast<std::size_t>(l)] +
                                      " cannot be standardized");
            x.col(l) = (x.col(l).array() - mean) / std::sqrt(var);
        }
    }
    return x;
}

}  // namespace

SimResult simulate_cohort(const SimConfig& config) {
    if (config.n_samples < 2) throw ValidationError("simulation needs at least 2 samples");
    config.theta.validate();

    struct Component {
        const char* name;
        OmicKind kind;
        int n_markers;
        const char* marker_stem;
    };
    std::vector<Component> active;
    if (config.m_genetic > 0)
        active.push_back({"G", OmicKind::GenotypeDosage, config.m_genetic, "snp"});
    if (config.l_expression > 0)
        active.push_back({"T", OmicKind::Continuous, config.l_expression, "gene"});
    if (config.l_other > 0)
        active.push_back({"O", OmicKind::Continuous, config.l_other, "omic"});
    if (active.size() != config.theta.size())
        throw BadTheta("theta has " + std::to_string(config.theta.size()) +
                       " entries but " + std::to_string(active.size()) +
                       " components are active");

    Rng rng(config.seed);
    auto registry = std::make_shared<const SampleRegistry>(make_ids("sim", config.n_samples));
    const int n = config.n_samples;

    SimResult out;
    out.cohort.registry = registry;
    out.cohort.trait_kind = config.trait_kind;
    VectorXd y = VectorXd::Zero(n);

    for (std::size_t s = 0; s < active.size(); ++s) {
        const auto& comp = active[s];
        double theta = config.theta.component_weights[s].second;
        OmicDataset d = empty_dataset(registry, comp.kind, comp.marker_stem, comp.n_markers);
        if (comp.kind == OmicKind::GenotypeDosage) {
            for (int l = 0; l < comp.n_markers; ++l) {
                double p = rng.uniform(0.05, 0.95);
                draw_genotype_column(rng, p, d.values.col(l));
            }
            d.allele_freqs = dosage_allele_freqs(d.values, d.missing);
        } else {
            for (int l = 0; l < comp.n_markers; ++l)
                for (int i = 0; i < n; ++i) d.values(i, l) = rng.normal();
        }

        // beta_l ~ N(0, theta / n_markers): the component contributes
        // variance theta in expectation.
        VectorXd beta(comp.n_markers);
        double sd = std::sqrt(theta / comp.n_markers);
        for (int l = 0; l < comp.n_markers; ++l) beta(l) = sd * rng.normal();

        VectorXd component_value = standardized(d) * beta;
        y += component_value;

        out.truth.component_names.emplace_back(comp.name);
        out.truth.betas.push_back(std::move(beta));
        out.truth.components.push_back(std::move(component_value));
        out.datasets.push_back(std::move(d));
        out.names.emplace_back(comp.name);
    }

    double noise_sd = std::sqrt(config.theta.nugget());
    out.truth.noise.resize(n);
    for (int i = 0; i < n; ++i) out.truth.noise(i) = noise_sd * rng.normal();
    y += out.truth.noise;
    out.truth.liability = y;

    if (config.trait_kind == TraitKind::Binary) {
        if (!(config.case_fraction > 0.0 && config.case_fraction < 1.0))
            throw ValidationError("case fraction must lie in (0,1)");
        boost::math::normal std_normal;
        out.truth.threshold =
            boost::math::quantile(std_normal, 1.0 - config.case_fraction);
        out.cohort.phenotype.resize(n);
        for (int i = 0; i < n; ++i)
            out.cohort.phenotype(i) = y(i) > out.truth.threshold ? 1.0 : 0.0;
    } else {
        out.cohort.phenotype = y;
    }
    return out;
}

SimilarityMatrix theoretical_covariance(const std::vector<OmicDataset>& datasets,
                                        const WeightConfig& theta) {
    if (datasets.size() != theta.size())
        throw ValidationError("dataset count does not match theta entries");
    theta.validate();
    if (datasets.empty()) throw ValidationError("no datasets given");

    std::vector<SimilarityMatrix> crosses;
    crosses.reserve(datasets.size());
    for (const auto& d : datasets) {
        MatrixXd x = standardized(d);
        SimilarityMatrix s;
        s.registry = d.registry;
        s.provenance = d.kind == OmicKind::GenotypeDosage ? Provenance::GRM
                                                          : Provenance::Loaded;
        s.marker_count = static_cast<double>(d.n_markers());
        s.values = (x * x.transpose()) / static_cast<double>(d.n_markers());
        crosses.push_back(std::move(s));
    }
    SimilarityMatrix sigma = compose(crosses, theta);
    sigma.provenance = Provenance::Composite;
    return sigma;
}

}  // namespace okrig
