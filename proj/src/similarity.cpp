#include "okrig/similarity.hpp"

#include <cmath>
#include <iostream>

#include "okrig/parallel.hpp"

namespace okrig {

GrmResult build_grm(const OmicDataset& data, const GrmOptions& opts) {
    if (data.kind != OmicKind::GenotypeDosage)
        throw ValidationError("build_grm requires a genotype dosage dataset");
    data.validate();
    const int n = data.n_samples();
    const int m_all = data.n_markers();

    VectorXd p = data.allele_freqs.size() == m_all
                     ? data.allele_freqs
                     : dosage_allele_freqs(data.values, data.missing);

    std::vector<int> kept;
    kept.reserve(static_cast<std::size_t>(m_all));
    for (int l = 0; l < m_all; ++l)
        if (!std::isnan(p(l)) && p(l) > opts.maf_min && p(l) < 1.0 - opts.maf_min)
            kept.push_back(l);
    if (kept.empty())
        throw NoPolymorphicMarkers("no polymorphic markers left after frequency filter");
    const int m = static_cast<int>(kept.size());

    // Centered dosages (zeroed at missing entries) and reciprocal marker
    // variances: each pair term is (x_i - 2p)(x_j - 2p) / (2p(1-p)), the
    // product divided once so hand-computable cases come out exact.
    MatrixXd centered = MatrixXd::Zero(n, m);
    VectorXd inv_var(m);
    BoolArray obs(n, m);
    for (int c = 0; c < m; ++c) {
        int l = kept[static_cast<std::size_t>(c)];
        inv_var(c) = 1.0 / (2.0 * p(l) * (1.0 - p(l)));
        for (int i = 0; i < n; ++i) {
            bool miss = data.missing(i, l);
            obs(i, c) = !miss;
            if (!miss) centered(i, c) = data.values(i, l) - 2.0 * p(l);
        }
    }
    const bool complete = !data.missing.any();

    GrmResult out;
    out.markers_used = m;
    out.markers_excluded = m_all - m;
    out.matrix.registry = data.registry;
    out.matrix.provenance = Provenance::GRM;
    out.matrix.marker_count = static_cast<double>(m);
    out.matrix.values.resize(n, n);
    out.pair_counts.resize(n, n);

    std::atomic<int> empty_pairs{0};
    parallel_for(n, opts.threads, [&](int i) {
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            int cnt;
            if (complete) {
                for (int c = 0; c < m; ++c) acc += centered(i, c) * centered(j, c) * inv_var(c);
                cnt = m;
            } else {
                cnt = 0;
                for (int c = 0; c < m; ++c) {
                    if (!(obs(i, c) && obs(j, c))) continue;
                    acc += centered(i, c) * centered(j, c) * inv_var(c);
                    ++cnt;
                }
            }
            double value = 0.0;
            if (cnt > 0) {
                value = acc / cnt;
            } else {
                empty_pairs.fetch_add(1);
            }
            out.matrix.values(i, j) = out.matrix.values(j, i) = value;
            out.pair_counts(i, j) = out.pair_counts(j, i) = cnt;
        }
    });
    out.all_missing_pairs = empty_pairs.load();
    if (out.all_missing_pairs > 0)
        std::cerr << "warning: " << out.all_missing_pairs
                  << " sample pair(s) share no observed marker; GRM entries set to 0\n";
    return out;
}

SimilarityMatrix build_correlation_similarity(const OmicDataset& data, int threads) {
    data.validate();
    const int n = data.n_samples();
    const int m = data.n_markers();
    if (m < 2) throw ValidationError("correlation similarity needs at least 2 markers");

    const bool complete = !data.missing.any();

    SimilarityMatrix out;
    out.registry = data.registry;
    out.provenance = Provenance::Correlation;
    out.marker_count = static_cast<double>(m);
    out.values.resize(n, n);

    if (complete) {
        // Center each sample's profile by its own row mean; no column
        // scaling. The result is the Pearson correlation between rows.
        MatrixXd centered = data.values.colwise() - data.values.rowwise().mean();
        VectorXd norms(n);
        for (int i = 0; i < n; ++i) {
            norms(i) = centered.row(i).norm();
            if (norms(i) == 0.0)
                throw ZeroVarianceRow("sample " + data.registry->id(i) +
                                      " has zero variance across markers");
        }
        parallel_for(n, threads, [&](int i) {
            for (int j = 0; j < i; ++j) {
                double v = centered.row(i).dot(centered.row(j)) / (norms(i) * norms(j));
                out.values(i, j) = out.values(j, i) = v;
            }
            out.values(i, i) = 1.0;
        });
        return out;
    }

    // Pairwise-complete: per pair, means and norms are taken over the
    // markers observed in both samples.
    parallel_for(n, threads, [&](int i) {
        for (int j = 0; j <= i; ++j) {
            double sx = 0.0, sy = 0.0;
            int cnt = 0;
            for (int l = 0; l < m; ++l) {
                if (data.missing(i, l) || data.missing(j, l)) continue;
                sx += data.values(i, l);
                sy += data.values(j, l);
                ++cnt;
            }
            if (cnt < 2)
                throw ZeroVarianceRow("samples " + data.registry->id(i) + " and " +
                                      data.registry->id(j) +
                                      " share fewer than 2 observed markers");
            double mx = sx / cnt, my = sy / cnt;
            double sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int l = 0; l < m; ++l) {
                if (data.missing(i, l) || data.missing(j, l)) continue;
                double dx = data.values(i, l) - mx;
                double dy = data.values(j, l) - my;
                sxx += dx * dx;
                syy += dy * dy;
                sxy += dx * dy;
            }
            if (sxx == 0.0)
                throw ZeroVarianceRow("sample " + data.registry->id(i) +
                                      " has zero variance across markers");
            if (syy == 0.0)
                throw ZeroVarianceRow("sample " + data.registry->id(j) +
                                      " has zero variance across markers");
            double v = (i == j) ? 1.0 : sxy / std::sqrt(sxx * syy);
            out.values(i, j) = out.values(j, i) = v;
        }
    });
    return out;
}

SimilarityMatrix compose(const CompositeSpec& spec) {
    if (spec.components.empty())
        throw ValidationError("composite needs at least one component");
    WeightConfig wc;
    for (std::size_t s = 0; s < spec.components.size(); ++s)
        wc.component_weights.emplace_back("component" + std::to_string(s),
                                          spec.components[s].second);
    wc.validate();

    const SimilarityMatrix* first = spec.components.front().first;
    const int n = first->size();
    for (const auto& [mat, theta] : spec.components) {
        if (!mat->registry || !first->registry || !(*mat->registry == *first->registry))
            throw RegistryMismatch("composite components cover different sample sets");
    }

    SimilarityMatrix out;
    out.registry = first->registry;
    out.provenance = Provenance::Composite;
    out.values = MatrixXd::Identity(n, n) * wc.nugget();
    for (const auto& [mat, theta] : spec.components)
        if (theta != 0.0) out.values.noalias() += theta * mat->values;
    return out;
}

SimilarityMatrix compose(const std::vector<SimilarityMatrix>& components,
                         const WeightConfig& weights) {
    if (components.size() != weights.size())
        throw ValidationError("weight count does not match component count");
    CompositeSpec spec;
    for (std::size_t s = 0; s < components.size(); ++s)
        spec.components.emplace_back(&components[s], weights.component_weights[s].second);
    return compose(spec);
}

}  // namespace okrig
