// omickriging: kriging-based phenotype prediction from weighted
// combinations of omic similarity matrices, with cross-validated grid
// search, polygenic-score baselines and a cohort simulator.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "okrig/baseline.hpp"
#include "okrig/grid.hpp"
#include "okrig/io.hpp"
#include "okrig/parallel.hpp"
#include "okrig/rng.hpp"
#include "okrig/simulate.hpp"

using json = nlohmann::json;
using namespace okrig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    int k = 16;
    int repeats = 500;
    std::uint64_t seed = 42;
    int threads = 0;  // 0: OMICKRIG_THREADS or hardware
    std::string metric = "auto";
    std::string out;
    bool simple_kriging = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--k", opts.k, "Cross-validation fold count")->capture_default_str();
    cmd->add_option("--repeats", opts.repeats, "Random partitions to evaluate")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Master RNG seed")->capture_default_str();
    cmd->add_option("--threads", opts.threads,
                    "Worker threads (0 = OMICKRIG_THREADS or hardware)")
        ->capture_default_str();
    cmd->add_option("--metric", opts.metric, "signed-r2, r2, auc, or auto by trait")
        ->capture_default_str();
    cmd->add_option("--out", opts.out, "Output path prefix")->required();
}

Metric pick_metric(const std::string& name, TraitKind kind) {
    if (name == "auto") return default_metric(kind);
    return metric_from_name(name);
}

TraitKind parse_trait(const std::string& name) {
    if (name == "quantitative") return TraitKind::Quantitative;
    if (name == "binary") return TraitKind::Binary;
    throw ValidationError("trait must be 'quantitative' or 'binary', got '" + name + "'");
}

// "NAME=PREFIX" (or bare PREFIX, named by its basename)
std::pair<std::string, std::string> parse_component(const std::string& arg) {
    auto eq = arg.find('=');
    if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
    return {std::filesystem::path(arg).stem().string(), arg};
}

struct LoadedComponents {
    std::vector<std::string> names;
    std::vector<SimilarityMatrix> matrices;
    Cohort cohort;
};

// Load GRM triplets and the phenotype file, restrict everything to the
// shared (sorted) sample set.
LoadedComponents load_and_align(const std::vector<std::string>& component_args,
                                const std::string& pheno_path, TraitKind kind) {
    LoadedComponents out;
    std::vector<SimilarityMatrix> raw;
    for (const auto& arg : component_args) {
        auto [name, prefix] = parse_component(arg);
        for (const auto& existing : out.names)
            if (existing == name)
                throw ValidationError("duplicate component name '" + name + "'");
        out.names.push_back(name);
        raw.push_back(read_grm_gcta(prefix).matrix);
    }
    Cohort cohort = read_phenotype_tsv(pheno_path, kind);

    std::vector<const SampleRegistry*> regs;
    for (const auto& m : raw) regs.push_back(m.registry.get());
    regs.push_back(cohort.registry.get());
    RegistryPtr shared = intersect_registries(regs);

    for (const auto& m : raw) out.matrices.push_back(align_to(m, shared));
    out.cohort = align_to(cohort, shared);
    return out;
}

WeightConfig parse_weights(const std::string& csv, const std::vector<std::string>& names) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= csv.size()) {
        auto comma = csv.find(',', start);
        std::string cell =
            comma == std::string::npos ? csv.substr(start) : csv.substr(start, comma - start);
        try {
            values.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ValidationError("cannot parse weight '" + cell + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.size() != names.size())
        throw ValidationError("got " + std::to_string(values.size()) + " weights for " +
                              std::to_string(names.size()) + " components");
    WeightConfig wc;
    for (std::size_t s = 0; s < names.size(); ++s)
        wc.component_weights.emplace_back(names[s], values[s]);
    wc.validate();
    return wc;
}

void write_predictions_tsv(const std::string& path, const Cohort& cohort,
                           const std::vector<int>& folds, const VectorXd& preds) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "ID\tfold\ttrue\tpredicted\n";
    for (int i = 0; i < cohort.size(); ++i)
        out << cohort.registry->id(i) << '\t' << folds[static_cast<std::size_t>(i)] << '\t'
            << format_double(cohort.phenotype(i)) << '\t' << format_double(preds(i)) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

// ---- subcommands -------------------------------------------------------

int cmd_make_grm(const std::string& dosage_path, const std::string& out_prefix,
                 double maf, const std::string& freq_path, int threads) {
    OmicDataset data = read_dosage_tsv(dosage_path);
    if (!freq_path.empty()) data.allele_freqs = read_frequency_tsv(freq_path, data.marker_ids);
    GrmOptions opts;
    opts.maf_min = maf;
    opts.threads = resolve_threads(threads);
    GrmResult grm = build_grm(data, opts);
    write_grm_gcta(grm.matrix, grm.pair_counts, out_prefix);
    std::cout << "samples: " << data.n_samples() << "\nmarkers used: " << grm.markers_used
              << "\nmarkers excluded: " << grm.markers_excluded
              << "\nwrote: " << out_prefix << ".grm.{id,bin,N.bin}\n";
    return kExitOk;
}

int cmd_make_similarity(const std::string& expr_path, const std::string& out_prefix,
                        int threads) {
    OmicDataset data = read_continuous_tsv(expr_path);
    SimilarityMatrix sim = build_correlation_similarity(data, resolve_threads(threads));
    // pairwise-complete marker counts for the N file
    MatrixXd counts(data.n_samples(), data.n_samples());
    for (int i = 0; i < data.n_samples(); ++i)
        for (int j = 0; j <= i; ++j) {
            int c = 0;
            for (int l = 0; l < data.n_markers(); ++l)
                if (!data.missing(i, l) && !data.missing(j, l)) ++c;
            counts(i, j) = counts(j, i) = c;
        }
    write_grm_gcta(sim, counts, out_prefix);
    std::cout << "samples: " << data.n_samples() << "\nmarkers: " << data.n_markers()
              << "\nwrote: " << out_prefix << ".grm.{id,bin,N.bin}\n";
    return kExitOk;
}

int run_krige(const std::vector<std::string>& component_args, const std::string& pheno_path,
              const std::string& trait, const std::string& weights_csv, bool do_grid,
              double step, int search_repeats, const CommonOpts& common) {
    TraitKind kind = parse_trait(trait);
    LoadedComponents loaded = load_and_align(component_args, pheno_path, kind);
    Metric metric = pick_metric(common.metric, kind);
    CovariateMode mode =
        common.simple_kriging ? CovariateMode::Simple : CovariateMode::Intercept;
    int threads = resolve_threads(common.threads);

    EvaluationReport report;
    WeightConfig weights;
    if (do_grid) {
        GridSpec spec;
        spec.n_components = static_cast<int>(loaded.matrices.size());
        spec.step = step;
        GridSearchResult result =
            grid_search(loaded.matrices, loaded.names, loaded.cohort, common.k,
                        search_repeats, common.repeats, common.seed, spec, metric, mode,
                        threads);
        report = std::move(result.final_report);
        weights = result.best;
        std::cout << "grid points: " << report.grid.size() << "\n";
    } else {
        weights = parse_weights(weights_csv, loaded.names);
        SimilarityMatrix sigma = compose(loaded.matrices, weights);
        report = repeat_and_summarize(sigma, loaded.cohort, weights, common.k,
                                      common.repeats, common.seed, metric, mode, threads);
    }

    write_report_json(report, common.out + ".report.json");

    // out-of-sample predictions from the first repeat
    SimilarityMatrix sigma = compose(loaded.matrices, weights);
    VectorXd preds;
    cross_validate(sigma, loaded.cohort, common.k, mix_seed(common.seed, 0), report.metric,
                   mode, &preds);
    write_predictions_tsv(common.out + ".predictions.tsv", loaded.cohort,
                          report.fold_assignments, preds);

    std::cout << "metric: " << metric_name(report.metric) << "\n";
    if (std::isnan(report.mean))
        std::cout << "mean: degenerate (metric undefined in every repeat)\n";
    else
        std::cout << "mean: " << format_double(report.mean) << "  ci: ["
                  << format_double(report.ci_lo) << ", " << format_double(report.ci_hi)
                  << "]\n";
    if (report.degenerate_repeats > 0)
        std::cout << "degenerate repeats: " << report.degenerate_repeats << "\n";
    std::cout << "wrote: " << common.out << ".report.json, " << common.out
              << ".predictions.tsv\n";
    return kExitOk;
}

int cmd_polyscore(const std::string& data_path, bool data_is_dosage,
                  const std::string& pheno_path, const std::string& trait,
                  const std::string& mode_name, std::optional<int> top_k,
                  std::optional<double> alpha, int n_pcs, const std::string& pc_grm_prefix,
                  const CommonOpts& common) {
    TraitKind kind = parse_trait(trait);
    OmicDataset data =
        data_is_dosage ? read_dosage_tsv(data_path) : read_continuous_tsv(data_path);
    Cohort cohort = read_phenotype_tsv(pheno_path, kind);

    std::vector<const SampleRegistry*> regs{data.registry.get(), cohort.registry.get()};
    std::optional<GrmReadResult> pc_grm_loaded;
    if (n_pcs > 0 && !pc_grm_prefix.empty()) {
        pc_grm_loaded = read_grm_gcta(pc_grm_prefix);
        regs.push_back(pc_grm_loaded->matrix.registry.get());
    }
    RegistryPtr shared = intersect_registries(regs);
    data = align_to(data, shared);
    cohort = align_to(cohort, shared);

    PolyscoreConfig config;
    config.mode = mode_name == "joint" ? ScoreMode::Joint : ScoreMode::Marginal;
    config.top_k = top_k;
    config.bonferroni_alpha = alpha;
    config.n_pcs = n_pcs;

    SimilarityMatrix pc_grm;
    GrmResult built;
    if (n_pcs > 0) {
        if (pc_grm_loaded) {
            pc_grm = align_to(pc_grm_loaded->matrix, shared);
        } else {
            if (data.kind != OmicKind::GenotypeDosage)
                throw ValidationError(
                    "--n-pcs needs --pc-grm when the data file is not dosage");
            GrmOptions opts;
            opts.threads = resolve_threads(common.threads);
            built = build_grm(data, opts);
            pc_grm = built.matrix;
        }
        config.pc_grm = &pc_grm;
    }

    Metric metric = pick_metric(common.metric, kind);
    EvaluationReport report =
        polyscore_cross_validate(data, cohort, config, common.k, common.repeats,
                                 common.seed, metric, resolve_threads(common.threads));
    write_report_json(report, common.out + ".report.json");
    std::cout << "metric: " << metric_name(report.metric) << "\n";
    if (std::isnan(report.mean))
        std::cout << "mean: degenerate (metric undefined in every repeat)\n";
    else
        std::cout << "mean: " << format_double(report.mean) << "  ci: ["
                  << format_double(report.ci_lo) << ", " << format_double(report.ci_hi)
                  << "]\n";
    std::cout << "wrote: " << common.out << ".report.json\n";
    return kExitOk;
}

int cmd_simulate(int n, int m_genetic, int l_expression, int l_other,
                 const std::string& theta_csv, std::uint64_t seed, const std::string& trait,
                 double case_fraction, const std::string& out_prefix) {
    SimConfig config;
    config.n_samples = n;
    config.m_genetic = m_genetic;
    config.l_expression = l_expression;
    config.l_other = l_other;
    config.seed = seed;
    config.trait_kind = parse_trait(trait);
    config.case_fraction = case_fraction;

    std::vector<std::string> names;
    if (m_genetic > 0) names.emplace_back("G");
    if (l_expression > 0) names.emplace_back("T");
    if (l_other > 0) names.emplace_back("O");
    config.theta = parse_weights(theta_csv, names);

    SimResult sim = simulate_cohort(config);

    for (std::size_t s = 0; s < sim.datasets.size(); ++s) {
        std::string suffix = sim.names[s] == "G"   ? ".genotypes.tsv"
                             : sim.names[s] == "T" ? ".expression.tsv"
                                                   : ".other.tsv";
        write_dataset_tsv(sim.datasets[s], out_prefix + suffix);
        std::cout << "wrote: " << out_prefix << suffix << "\n";
    }
    write_phenotype_tsv(sim.cohort, out_prefix + ".pheno.tsv");
    std::cout << "wrote: " << out_prefix << ".pheno.tsv\n";

    json truth;
    truth["seed"] = config.seed;
    truth["trait"] = trait;
    json theta = json::object();
    for (const auto& [name, value] : config.theta.component_weights) theta[name] = value;
    theta["nugget"] = config.theta.nugget();
    truth["theta"] = std::move(theta);
    for (std::size_t s = 0; s < sim.truth.component_names.size(); ++s) {
        json comp;
        comp["beta"] = std::vector<double>(
            sim.truth.betas[s].data(), sim.truth.betas[s].data() + sim.truth.betas[s].size());
        comp["values"] = std::vector<double>(
            sim.truth.components[s].data(),
            sim.truth.components[s].data() + sim.truth.components[s].size());
        truth["components"][sim.truth.component_names[s]] = std::move(comp);
    }
    truth["noise"] = std::vector<double>(sim.truth.noise.data(),
                                         sim.truth.noise.data() + sim.truth.noise.size());
    truth["liability"] = std::vector<double>(
        sim.truth.liability.data(), sim.truth.liability.data() + sim.truth.liability.size());
    if (config.trait_kind == TraitKind::Binary) truth["threshold"] = sim.truth.threshold;
    std::ofstream tf(out_prefix + ".truth.json");
    if (!tf) throw IoError("cannot open '" + out_prefix + ".truth.json' for writing");
    tf << truth.dump(2) << '\n';
    std::cout << "wrote: " << out_prefix << ".truth.json\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OmicKriging: poly-omic phenotype prediction"};
    app.require_subcommand(1);

    // make-grm
    auto* make_grm = app.add_subcommand("make-grm", "Build a GRM from a dosage TSV");
    std::string mg_dosage, mg_out, mg_freqs;
    double mg_maf = 0.001;
    int mg_threads = 0;
    make_grm->add_option("--dosage", mg_dosage, "Dosage TSV")
        ->required()
        ->check(CLI::ExistingFile);
    make_grm->add_option("--out", mg_out, "Output GRM prefix")->required();
    make_grm->add_option("--maf", mg_maf, "Exclude markers with p outside (maf, 1-maf)")
        ->capture_default_str();
    make_grm->add_option("--freqs", mg_freqs, "External allele frequencies (id<TAB>p)")
        ->check(CLI::ExistingFile);
    make_grm->add_option("--threads", mg_threads, "Worker threads")->capture_default_str();

    // make-similarity
    auto* make_sim =
        app.add_subcommand("make-similarity", "Build a correlation similarity matrix");
    std::string ms_expr, ms_out;
    int ms_threads = 0;
    make_sim->add_option("--expression", ms_expr, "Continuous omic TSV")
        ->required()
        ->check(CLI::ExistingFile);
    make_sim->add_option("--out", ms_out, "Output prefix")->required();
    make_sim->add_option("--threads", ms_threads, "Worker threads")->capture_default_str();

    // krige
    auto* krige = app.add_subcommand("krige", "Cross-validated kriging prediction");
    std::vector<std::string> kr_components;
    std::string kr_pheno, kr_trait = "quantitative", kr_weights;
    bool kr_grid = false;
    double kr_step = 0.1;
    int kr_search_repeats = 50;
    CommonOpts kr_common;
    krige->add_option("--component", kr_components, "GRM prefix (NAME=PREFIX), repeatable")
        ->required();
    krige->add_option("--pheno", kr_pheno, "Phenotype TSV")
        ->required()
        ->check(CLI::ExistingFile);
    krige->add_option("--trait", kr_trait, "quantitative or binary")->capture_default_str();
    krige->add_option("--weights", kr_weights, "Component weights, comma separated");
    krige->add_flag("--grid-search", kr_grid, "Search weights instead of fixing them");
    krige->add_option("--step", kr_step, "Grid step")->capture_default_str();
    krige->add_option("--search-repeats", kr_search_repeats,
                      "Partitions per grid point during search")
        ->capture_default_str();
    krige->add_flag("--simple-kriging", kr_common.simple_kriging,
                    "No intercept (pure covariance weighting)");
    add_common(krige, kr_common);

    // gridsearch (alias for krige --grid-search)
    auto* gridsearch = app.add_subcommand("gridsearch", "Grid search over component weights");
    std::vector<std::string> gs_components;
    std::string gs_pheno, gs_trait = "quantitative";
    double gs_step = 0.1;
    int gs_search_repeats = 50;
    CommonOpts gs_common;
    gridsearch
        ->add_option("--component", gs_components, "GRM prefix (NAME=PREFIX), repeatable")
        ->required();
    gridsearch->add_option("--pheno", gs_pheno, "Phenotype TSV")
        ->required()
        ->check(CLI::ExistingFile);
    gridsearch->add_option("--trait", gs_trait, "quantitative or binary")
        ->capture_default_str();
    gridsearch->add_option("--step", gs_step, "Grid step")->capture_default_str();
    gridsearch
        ->add_option("--search-repeats", gs_search_repeats,
                     "Partitions per grid point during search")
        ->capture_default_str();
    gridsearch->add_flag("--simple-kriging", gs_common.simple_kriging,
                         "No intercept (pure covariance weighting)");
    add_common(gridsearch, gs_common);

    // polyscore
    auto* polyscore = app.add_subcommand("polyscore", "Polygenic-score baseline");
    std::string ps_data, ps_pheno, ps_trait = "quantitative", ps_mode, ps_pc_grm;
    bool ps_continuous = false;
    int ps_top_k = -1, ps_n_pcs = 0;
    double ps_alpha = -1.0;
    CommonOpts ps_common;
    polyscore->add_option("--data", ps_data, "Marker TSV (dosage unless --continuous)")
        ->required()
        ->check(CLI::ExistingFile);
    polyscore->add_flag("--continuous", ps_continuous, "Treat --data as continuous values");
    polyscore->add_option("--pheno", ps_pheno, "Phenotype TSV")
        ->required()
        ->check(CLI::ExistingFile);
    polyscore->add_option("--trait", ps_trait, "quantitative or binary")
        ->capture_default_str();
    polyscore->add_option("--mode", ps_mode, "marginal or joint")
        ->required()
        ->check(CLI::IsMember({"marginal", "joint"}));
    polyscore->add_option("--top-k", ps_top_k, "Select the top k markers by p-value");
    polyscore->add_option("--bonferroni-alpha", ps_alpha,
                          "Select markers with p < alpha / n_markers");
    polyscore->add_option("--n-pcs", ps_n_pcs, "Principal components to include")
        ->capture_default_str();
    polyscore->add_option("--pc-grm", ps_pc_grm, "GRM prefix for the PCs");
    add_common(polyscore, ps_common);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic poly-omic cohort");
    int sm_n = 500, sm_m = 1000, sm_lt = 0, sm_lo = 0;
    std::string sm_theta = "0.5", sm_trait = "quantitative", sm_out;
    std::uint64_t sm_seed = 42;
    double sm_case_fraction = 0.5;
    simulate->add_option("--n", sm_n, "Sample count")->capture_default_str();
    simulate->add_option("--m-genetic", sm_m, "Genetic markers (0 disables)")
        ->capture_default_str();
    simulate->add_option("--l-expression", sm_lt, "Expression markers (0 disables)")
        ->capture_default_str();
    simulate->add_option("--l-other", sm_lo, "Other omic markers (0 disables)")
        ->capture_default_str();
    simulate->add_option("--theta", sm_theta, "Component variance weights, comma separated")
        ->capture_default_str();
    simulate->add_option("--seed", sm_seed, "RNG seed")->capture_default_str();
    simulate->add_option("--trait", sm_trait, "quantitative or binary")
        ->capture_default_str();
    simulate->add_option("--case-fraction", sm_case_fraction, "Binary case fraction")
        ->capture_default_str();
    simulate->add_option("--out", sm_out, "Output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (make_grm->parsed())
            return cmd_make_grm(mg_dosage, mg_out, mg_maf, mg_freqs, mg_threads);
        if (make_sim->parsed()) return cmd_make_similarity(ms_expr, ms_out, ms_threads);
        if (krige->parsed()) {
            if (!kr_grid && kr_weights.empty())
                throw ValidationError("krige needs --weights or --grid-search");
            return run_krige(kr_components, kr_pheno, kr_trait, kr_weights, kr_grid,
                             kr_step, kr_search_repeats, kr_common);
        }
        if (gridsearch->parsed())
            return run_krige(gs_components, gs_pheno, gs_trait, "", true, gs_step,
                             gs_search_repeats, gs_common);
        if (polyscore->parsed()) {
            std::optional<int> top_k;
            if (ps_top_k >= 0) top_k = ps_top_k;
            std::optional<double> alpha;
            if (ps_alpha >= 0.0) alpha = ps_alpha;
            return cmd_polyscore(ps_data, !ps_continuous, ps_pheno, ps_trait, ps_mode,
                                 top_k, alpha, ps_n_pcs, ps_pc_grm, ps_common);
        }
        if (simulate->parsed())
            return cmd_simulate(sm_n, sm_m, sm_lt, sm_lo, sm_theta, sm_seed, sm_trait,
                                sm_case_fraction, sm_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
