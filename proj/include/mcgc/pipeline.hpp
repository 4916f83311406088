#pragma once

// End-to-end runs: load or generate data -> standardize -> lag -> train ->
// extract scores -> evaluate, plus persistence of every artifact and a run
// manifest.

#include "config.hpp"
#include "csv_io.hpp"
#include "generators.hpp"
#include "granger.hpp"
#include "metrics.hpp"
#include "svg.hpp"
#include "training.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace mcgc {

namespace fs = std::filesystem;

/// A failure inside a named pipeline stage. `bad_input` separates invalid
/// data or settings (malformed CSV, too-short series) from numeric or I/O
/// failures.
class StageError : public std::runtime_error {
  public:
    StageError(std::string stage, const std::string& what, bool bad_input = false)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), bad_input_(bad_input) {}
    const std::string& stage() const { return stage_; }
    bool bad_input() const { return bad_input_; }

  private:
    std::string stage_;
    bool bad_input_;
};

struct StageTimer {
    std::vector<std::pair<std::string, double>> seconds;

    template <typename F>
    auto run(const std::string& stage, F&& body) {
        const auto start = std::chrono::steady_clock::now();
        auto record = [&] {
            seconds.emplace_back(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        };
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                record();
            } else {
                auto out = body();
                record();
                return out;
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const StageError&) {
            throw;
        } catch (const ParseError& e) {
            throw StageError(stage, e.what(), true);
        } catch (const std::invalid_argument& e) {
            throw StageError(stage, e.what(), true);
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
    }
};

/// Seeds for the independent random consumers of one run, all derived from
/// ExperimentConfig::seed (TrainConfig::seed is overwritten).
struct RunSeeds {
    std::uint64_t init;
    std::uint64_t train;
    std::uint64_t extract;

    static RunSeeds from(std::uint64_t seed) {
        const auto s = derive_seeds(seed, 3);
        return {s[0], s[1], s[2]};
    }
};

struct PreparedData {
    MultivariateSeries series;  // as generated / loaded
    std::optional<AdjacencyMatrix> truth;
    std::optional<StandardizationStats> stats;
    LaggedDataset train;
    LaggedDataset val;
    LaggedDataset test;
};

inline LoadedDataset materialize_dataset(const DatasetSpec& spec) {
    return std::visit(
        [](const auto& s) -> LoadedDataset {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, TriadSpec>) {
                auto [series, adj] = gen_triad(s);
                return {std::move(series), std::move(adj)};
            } else if constexpr (std::is_same_v<T, VarSpec>) {
                auto sys = gen_var(s);
                return {std::move(sys.series), std::move(sys.adjacency)};
            } else if constexpr (std::is_same_v<T, LorenzSpec>) {
                auto [series, adj] = gen_lorenz96(s);
                return {std::move(series), std::move(adj)};
            } else {
                std::optional<fs::path> adj;
                if (s.adjacency) adj = *s.adjacency;
                return load_csv_dataset(s.path, adj);
            }
        },
        spec);
}

inline PreparedData prepare_data(LoadedDataset loaded, const ExperimentConfig& cfg) {
    PreparedData out;
    out.series = std::move(loaded.series);
    out.truth = std::move(loaded.adjacency);
    out.series.validate();
    const auto split = chronological_split(out.series, cfg.split);
    for (const auto* seg : {&split.train, &split.val, &split.test}) {
        if (seg->length() <= cfg.lags)
            throw ConfigError("a split segment has " + std::to_string(seg->length()) +
                              " steps, not enough for K=" + std::to_string(cfg.lags) + " lags");
    }
    auto standardize = [&](const MultivariateSeries& s) { return out.stats ? apply_standardizer(s, *out.stats) : s; };
    if (cfg.standardize) out.stats = fit_standardizer(split.train);
    out.train = make_lagged_dataset(standardize(split.train), cfg.lags);
    out.val = make_lagged_dataset(standardize(split.val), cfg.lags);
    out.test = make_lagged_dataset(standardize(split.test), cfg.lags);
    return out;
}

struct ExperimentResult {
    ExperimentConfig config;
    PreparedData data;
    MlpRegressor model;
    TrainHistory history;
    GcScoreMatrix scores;
    std::vector<std::uint64_t> extraction_seeds;
    std::optional<MetricReport> metrics;        // convention from config.include_diagonal
    std::optional<MetricReport> other_metrics;  // the opposite diagonal convention
    StageTimer timer;
};

inline std::optional<MetricReport> try_evaluate(const GcScoreMatrix& scores, const AdjacencyMatrix& truth,
                                                bool include_diagonal) {
    try {
        return evaluate(scores, truth, include_diagonal);
    } catch (const std::invalid_argument&) {
        return std::nullopt;  // single-class truth under this convention
    }
}

/// Runs every stage in memory. Deterministic in (config, data).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       std::optional<LoadedDataset> preloaded = std::nullopt) {
    cfg.validate();
    ExperimentResult r;
    const auto seeds = RunSeeds::from(cfg.seed);
    r.config = cfg;
    r.config.train.seed = seeds.train;  // echo the seed actually used

    auto loaded = r.timer.run("data", [&] { return preloaded ? std::move(*preloaded) : materialize_dataset(cfg.dataset); });
    r.data = r.timer.run("prepare", [&] { return prepare_data(std::move(loaded), cfg); });
    const int p = static_cast<int>(r.data.series.channels());
    if (p < 2) throw ConfigError("Granger analysis needs at least 2 channels");

    r.timer.run("train", [&] {
        auto model = MlpRegressor::create(cfg.lags, p, cfg.hidden, cfg.activation, cfg.train.alpha, seeds.init);
        auto trained = train(std::move(model), r.data.train, r.data.val, r.config.train);
        r.model = std::move(trained.model);
        r.history = std::move(trained.history);
    });
    r.timer.run("extract", [&] {
        r.extraction_seeds = derive_seeds(seeds.extract, static_cast<std::size_t>(cfg.passes));
        r.scores = gc_matrix(r.model, r.data.test, r.extraction_seeds, cfg.threads);
        r.scores.diagonal_included = cfg.include_diagonal;
    });
    if (r.data.truth) {
        r.timer.run("evaluate", [&] {
            r.metrics = try_evaluate(r.scores, *r.data.truth, cfg.include_diagonal);
            r.other_metrics = try_evaluate(r.scores, *r.data.truth, !cfg.include_diagonal);
        });
    }
    return r;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline fs::path resolve_output_dir(const std::string& dir) {
    fs::path p(dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv("MCGC_OUTPUT_ROOT"); root && *root) p = fs::path(root) / p;
    }
    return p;
}

inline std::string file_digest(const fs::path& path) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(read_text_file(path))));
    return buf;
}

/// Writes manifest.json via a temporary file and rename, so a manifest is
/// either absent or complete.
inline void write_manifest(const fs::path& dir, const nlohmann::json& config_echo, const StageTimer& timer,
                           const std::vector<fs::path>& outputs) {
    nlohmann::json digests = nlohmann::json::object();
    for (const auto& f : outputs) digests[fs::relative(f, dir).generic_string()] = {{"fnv1a64", file_digest(f)}};
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& [stage, secs] : timer.seconds) timings[stage] = secs;
    const nlohmann::json manifest{
        {"software", "mcgc"}, {"version", kVersion}, {"config", config_echo}, {"stage_seconds", timings}, {"outputs", digests}};
    const auto tmp = dir / "manifest.json.tmp";
    write_text_file(tmp, manifest.dump(2) + "\n");
    fs::rename(tmp, dir / "manifest.json");
}

inline void claim_output_dir(const fs::path& dir) {
    if (fs::exists(dir / "manifest.json"))
        throw ConfigError("output directory " + dir.string() + " already holds a completed run");
    fs::create_directories(dir);
}

inline nlohmann::json metrics_json(const ExperimentResult& r) {
    nlohmann::json j = r.metrics ? nlohmann::json(*r.metrics) : nlohmann::json::object();
    if (!r.metrics) j["skipped"] = "metrics undefined: ground truth has a single class";
    if (r.other_metrics) j["other_convention"] = *r.other_metrics;
    j["regime"] = r.config.train.regime;
    j["passes"] = r.config.passes;
    return j;
}

inline nlohmann::json scores_json(const ExperimentResult& r) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < r.scores.scores.rows(); ++i) {
        rows.emplace_back();
        for (Eigen::Index j = 0; j < r.scores.scores.cols(); ++j) rows.back().push_back(r.scores.scores(i, j));
    }
    return {{"layout", "scores[effect][cause]"},
            {"channels", r.data.series.channel_names},
            {"scores", rows},
            {"diagonal_included", r.scores.diagonal_included},
            {"passes", r.config.passes},
            {"seeds_digest", seeds_digest(r.extraction_seeds)},
            {"alpha", r.model.dropout_rate},
            {"regime", r.config.train.regime}};
}

/// Persists a finished run into `dir` and returns the written file list.
inline std::vector<fs::path> write_run_outputs(ExperimentResult& r, const fs::path& dir) {
    claim_output_dir(dir);
    std::vector<fs::path> files;
    r.timer.run("write", [&] {
        auto put = [&](const std::string& name, const std::string& text) {
            write_text_file(dir / name, text);
            files.push_back(dir / name);
        };
        put("config.json", config_to_json(r.config).dump(2) + "\n");
        put("model.json", model_to_json(r.model).dump() + "\n");
        std::ostringstream csv;
        write_matrix_csv(csv, r.scores.scores);
        put("scores.csv", csv.str());
        put("scores.json", scores_json(r).dump(2) + "\n");
        if (r.data.truth) {
            put("metrics.json", metrics_json(r).dump(2) + "\n");
            std::ostringstream truth;
            write_matrix_csv(truth, r.data.truth->entries);
            put("truth.csv", truth.str());
        }
        std::ostringstream hist;
        hist << "epoch,train_loss,val_mse\n";
        for (std::size_t e = 0; e < r.history.train_loss.size(); ++e) {
            hist << e << "," << detail::format_real(r.history.train_loss[e]) << ",";
            if (e < r.history.val_mse.size()) hist << detail::format_real(r.history.val_mse[e]);
            hist << "\n";
        }
        put("history.csv", hist.str());
        HeatmapOptions opt;
        opt.labels = r.data.series.channel_names;
        opt.title = "Granger scores (" + regime_name(r.config.train.regime) + ")";
        put("scores.svg", heatmap_svg(r.scores.scores, opt));
    });
    write_manifest(dir, config_to_json(r.config), r.timer, files);
    return files;
}

// ---------------------------------------------------------------------------
// Replicated experiments
// ---------------------------------------------------------------------------

struct Summary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single value
    std::size_t n = 0;
};

inline Summary summarize(const std::vector<double>& v) {
    Summary s;
    s.n = v.size();
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

struct ReplicateMetrics {
    std::vector<double> auroc;
    std::vector<double> auprc;
    std::size_t skipped = 0;
};

/// Runs fn(0..n-1) on up to `jobs` threads. Results keep index order, and
/// the first exception (by index) is rethrown.
template <typename F>
auto parallel_map(int n, int jobs, F&& fn) -> std::vector<decltype(fn(0))> {
    using R = decltype(fn(0));
    std::vector<std::optional<R>> slots(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < n; k = next++) {
            try {
                slots[static_cast<std::size_t>(k)] = fn(k);
            } catch (...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min(jobs, n));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(slots.size());
    for (auto& v : slots) out.push_back(std::move(*v));
    return out;
}

/// Runs `replicates` experiments; replicate r uses seed base.seed + r for
/// both the dataset and the run. Independent replicates may run on `jobs`
/// threads without changing any result.
inline ReplicateMetrics run_replicates(const ExperimentConfig& base, int replicates, int jobs = 1) {
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    const auto reports = parallel_map(replicates, jobs, [&](int rep) {
        ExperimentConfig cfg = base;
        cfg.seed = base.seed + static_cast<std::uint64_t>(rep);
        set_dataset_seed(cfg.dataset, cfg.seed);
        return run_experiment(cfg).metrics;
    });
    ReplicateMetrics out;
    for (const auto& m : reports) {
        if (!m) {
            ++out.skipped;
            continue;
        }
        out.auroc.push_back(m->auroc);
        out.auprc.push_back(m->auprc);
    }
    return out;
}

inline std::string format_pm(const Summary& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f", s.mean, s.std);
    return buf;
}

struct RegimeComparison {
    std::vector<Regime> regimes;
    std::vector<ReplicateMetrics> results;

    std::string csv() const {
        std::ostringstream os;
        os << "regime,auroc_mean,auroc_std,auprc_mean,auprc_std,runs,skipped\n";
        for (std::size_t k = 0; k < regimes.size(); ++k) {
            const auto a = summarize(results[k].auroc), p = summarize(results[k].auprc);
            os << regime_name(regimes[k]) << "," << detail::format_real(a.mean) << "," << detail::format_real(a.std)
               << "," << detail::format_real(p.mean) << "," << detail::format_real(p.std) << "," << a.n << ","
               << results[k].skipped << "\n";
        }
        return os.str();
    }

    /// Markdown table: one row per regime, AUROC and AUPRC as mean ± std.
    std::string markdown() const {
        std::ostringstream os;
        os << "| Training | AUROC | AUPRC |\n|---|---|---|\n";
        for (std::size_t k = 0; k < regimes.size(); ++k)
            os << "| " << regime_name(regimes[k]) << " | " << format_pm(summarize(results[k].auroc)) << " | "
               << format_pm(summarize(results[k].auprc)) << " |\n";
        return os.str();
    }
};

inline RegimeComparison compare_regimes(const ExperimentConfig& base, const std::vector<Regime>& regimes,
                                        int replicates, int jobs = 1) {
    RegimeComparison out{regimes, {}};
    for (auto regime : regimes) {
        ExperimentConfig cfg = base;
        cfg.train.regime = regime;
        out.results.push_back(run_replicates(cfg, replicates, jobs));
    }
    return out;
}

inline std::vector<double> default_sparsity_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }

struct SparsitySweep {
    std::vector<double> levels;
    std::vector<ReplicateMetrics> results;

    std::string csv() const {
        std::ostringstream os;
        os << "sparsity,auroc_mean,auroc_std,auprc_mean,auprc_std,runs,skipped\n";
        for (std::size_t k = 0; k < levels.size(); ++k) {
            const auto a = summarize(results[k].auroc), p = summarize(results[k].auprc);
            os << detail::format_real(levels[k]) << "," << detail::format_real(a.mean) << ","
               << detail::format_real(a.std) << "," << detail::format_real(p.mean) << "," << detail::format_real(p.std)
               << "," << a.n << "," << results[k].skipped << "\n";
        }
        return os.str();
    }

    /// One curve per metric, mean with sample-std error bars.
    std::string svg() const {
        LineSeries roc{"AUROC", {}, {}, {}}, prc{"AUPRC", {}, {}, {}};
        for (std::size_t k = 0; k < levels.size(); ++k) {
            if (results[k].auroc.empty()) continue;
            const auto a = summarize(results[k].auroc), p = summarize(results[k].auprc);
            roc.x.push_back(levels[k]);
            roc.y.push_back(a.mean);
            roc.error.push_back(a.std);
            prc.x.push_back(levels[k]);
            prc.y.push_back(p.mean);
            prc.error.push_back(p.std);
        }
        LineChartOptions opt;
        opt.title = "VAR sparsity sweep";
        opt.x_label = "sparsity (off-diagonal edge fraction)";
        opt.y_label = "score";
        opt.y_range = std::pair{0.0, 1.0};
        return line_chart_svg({roc, prc}, opt);
    }
};

inline SparsitySweep sweep_sparsity(const ExperimentConfig& base, const std::vector<double>& levels, int replicates,
                                    int jobs = 1) {
    if (!std::holds_alternative<VarSpec>(base.dataset)) throw ConfigError("sparsity sweeps need the var preset");
    SparsitySweep out{levels, {}};
    for (double level : levels) {
        ExperimentConfig cfg = base;
        std::get<VarSpec>(cfg.dataset).sparsity = level;
        cfg.validate();
        out.results.push_back(run_replicates(cfg, replicates, jobs));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Group analysis
// ---------------------------------------------------------------------------

inline constexpr double kGroupThreshold = 0.85;
inline constexpr int kGroupLags = 10;

struct SubjectResult {
    std::string name;
    GcScoreMatrix scores;
};

struct GroupResult {
    std::string name;
    std::vector<SubjectResult> subjects;
    GcScoreMatrix mean;
    AdjacencyMatrix binary;
    ThresholdCurve curve;
};

struct GroupAnalysis {
    std::vector<std::string> channels;
    std::vector<GroupResult> groups;
    double threshold = kGroupThreshold;
    /// difference_mask(groups[a].binary, groups[b].binary) for a < b.
    std::vector<std::tuple<std::size_t, std::size_t, DifferenceMask>> differences;
};

/// Subject files are <root>/<group>/<subject>.csv; groups and subjects are
/// processed in lexicographic order. Every subject must have the same
/// channel names.
inline std::map<std::string, std::vector<fs::path>> discover_groups(const fs::path& root) {
    if (!fs::is_directory(root)) throw ConfigError("dataset directory " + root.string() + " does not exist");
    std::map<std::string, std::vector<fs::path>> groups;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(entry.path()))
            if (f.is_regular_file() && f.path().extension() == ".csv") files.push_back(f.path());
        std::sort(files.begin(), files.end());
        if (!files.empty()) groups[entry.path().filename().string()] = std::move(files);
    }
    if (groups.empty()) throw ConfigError("no group subdirectories with subject CSV files under " + root.string());
    return groups;
}

inline GroupAnalysis group_analysis(const fs::path& root, const ExperimentConfig& base, double threshold,
                                    const std::vector<double>& curve_grid, int jobs = 1,
                                    const std::function<void(const std::string&)>& progress = {}) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
    const auto groups = discover_groups(root);
    GroupAnalysis out;
    out.threshold = threshold;
    for (const auto& [group, files] : groups) {
        GroupResult g;
        g.name = group;
        std::vector<LoadedDataset> subjects;
        for (const auto& file : files) {
            subjects.push_back(load_csv_dataset(file));
            const auto& names = subjects.back().series.channel_names;
            if (out.channels.empty()) out.channels = names;
            if (names != out.channels)
                throw ConfigError("channel mismatch: " + file.string() + " differs from the first subject");
        }
        auto matrices = parallel_map(static_cast<int>(files.size()), jobs, [&](int k) {
            const auto& file = files[static_cast<std::size_t>(k)];
            if (progress) progress(group + "/" + file.filename().string());
            ExperimentConfig cfg = base;
            cfg.dataset = CsvSource{file.string(), std::nullopt};
            return run_experiment(cfg, std::move(subjects[static_cast<std::size_t>(k)])).scores;
        });
        for (std::size_t k = 0; k < files.size(); ++k) g.subjects.push_back({files[k].stem().string(), matrices[k]});
        g.mean = group_mean_connectivity(matrices);
        g.binary = threshold_matrix(g.mean.scores, threshold);
        g.curve = connections_vs_threshold(g.mean.scores, curve_grid, base.include_diagonal);
        out.groups.push_back(std::move(g));
    }
    for (std::size_t a = 0; a < out.groups.size(); ++a)
        for (std::size_t b = a + 1; b < out.groups.size(); ++b)
            out.differences.emplace_back(a, b, difference_mask(out.groups[a].binary, out.groups[b].binary));
    return out;
}

inline std::vector<fs::path> write_group_outputs(const GroupAnalysis& ga, const fs::path& dir) {
    std::vector<fs::path> files;
    auto put = [&](const std::string& name, const std::string& text) {
        write_text_file(dir / name, text);
        files.push_back(dir / name);
    };
    auto matrix_text = [](const Matrix& m) {
        std::ostringstream os;
        write_matrix_csv(os, m);
        return os.str();
    };
    for (const auto& g : ga.groups) {
        for (const auto& s : g.subjects) put("subjects/" + g.name + "/" + s.name + "_scores.csv", matrix_text(s.scores.scores));
        put(g.name + "_mean.csv", matrix_text(g.mean.scores));
        put(g.name + "_binary.csv", matrix_text(g.binary.entries));
        std::ostringstream curve;
        curve << "threshold,count\n";
        for (std::size_t k = 0; k < g.curve.thresholds.size(); ++k)
            curve << detail::format_real(g.curve.thresholds[k]) << "," << g.curve.counts[k] << "\n";
        put(g.name + "_curve.csv", curve.str());
        HeatmapOptions opt;
        opt.labels = ga.channels;
        opt.title = g.name + ": mean Granger scores";
        put(g.name + "_mean.svg", heatmap_svg(g.mean.scores, opt));
        opt.title = g.name + ": scores > " + detail::format_real(ga.threshold);
        put(g.name + "_binary.svg", heatmap_svg(g.binary.entries, opt));
    }
    std::vector<LineSeries> curves;
    std::ostringstream all_curves;
    all_curves << "group,threshold,count\n";
    for (const auto& g : ga.groups) {
        LineSeries line{g.name, g.curve.thresholds, {}, {}};
        for (std::size_t k = 0; k < g.curve.counts.size(); ++k) {
            line.y.push_back(static_cast<double>(g.curve.counts[k]));
            all_curves << g.name << "," << detail::format_real(g.curve.thresholds[k]) << "," << g.curve.counts[k] << "\n";
        }
        curves.push_back(std::move(line));
    }
    put("threshold_curves.csv", all_curves.str());
    LineChartOptions curve_opt;
    curve_opt.title = "Connections vs threshold";
    curve_opt.x_label = "threshold";
    curve_opt.y_label = "connections";
    put("threshold_curves.svg", line_chart_svg(curves, curve_opt));
    for (const auto& [a, b, mask] : ga.differences) {
        const auto& ga_ = ga.groups[a];
        const auto& gb = ga.groups[b];
        const std::string stem = "difference_" + ga_.name + "_vs_" + gb.name;
        put(stem + ".csv", matrix_text(mask.cast<double>()));
        HeatmapOptions opt;
        opt.labels = ga.channels;
        opt.title = ga_.name + " (binary) vs " + gb.name + ": outlined cells differ";
        opt.overlay = mask;
        put(stem + ".svg", heatmap_svg(ga_.binary.entries, opt));
    }
    return files;
}

}  // namespace mcgc
