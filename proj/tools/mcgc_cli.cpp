// mcgc: generate benchmark data, train and extract Granger scores, sweep,
// analyze groups and render matrices.
//
// Exit codes: 0 success, 2 configuration / input error, 3 runtime or numeric
// failure.

#include <mcgc/pipeline.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

/// Flags shared by every command that builds an ExperimentConfig. Unset
/// flags leave the config file (or built-in default) untouched.
struct Overrides {
    std::string config_path;
    std::optional<std::string> preset, structure, data, truth, regime, activation, out;
    std::optional<int> length, channels, var_lags, lags, epochs, batch_size, patience, passes, threads;
    std::optional<double> sigma, sparsity, forcing, coupling, alpha, lr;
    std::optional<std::uint64_t> seed, data_seed;
    std::vector<int> hidden;
    bool linear = false;
    bool no_diagonal = false;
    bool no_standardize = false;
};

void add_dataset_flags(CLI::App* app, Overrides& o) {
    app->add_option("--preset", o.preset, "Dataset preset")
        ->check(CLI::IsMember({"triad", "var", "lorenz96", "csv"}));
    app->add_option("--structure", o.structure, "Triad structure")->check(CLI::IsMember({"chain", "fork", "collider"}));
    app->add_flag("--linear", o.linear, "Linear triad couplings (default nonlinear)");
    app->add_option("--T,--length", o.length, "Series length")->check(CLI::PositiveNumber);
    app->add_option("--p,--channels", o.channels, "Channel count (var, lorenz96)")->check(CLI::PositiveNumber);
    app->add_option("--var-lags", o.var_lags, "VAR order")->check(CLI::PositiveNumber);
    app->add_option("--sigma", o.sigma, "Noise standard deviation");
    app->add_option("--sparsity", o.sparsity, "VAR off-diagonal edge fraction");
    app->add_option("--coupling", o.coupling, "VAR coupling magnitude");
    app->add_option("--F,--forcing", o.forcing, "Lorenz-96 forcing");
    app->add_option("--data-seed", o.data_seed, "Generator seed (defaults to --seed)");
}

void add_run_flags(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config_path, "JSON experiment config; flags override it")->check(CLI::ExistingFile);
    add_dataset_flags(app, o);
    app->add_option("--data", o.data, "Series CSV (implies --preset csv)");
    app->add_option("--truth", o.truth, "Ground-truth adjacency CSV for --data");
    app->add_option("--lags,-K", o.lags, "Input lags K");
    app->add_option("--hidden", o.hidden, "Hidden layer sizes, e.g. 64,64")->delimiter(',');
    app->add_option("--activation", o.activation, "relu | tanh | identity");
    app->add_option("--regime", o.regime, "Training regime")->check(CLI::IsMember({"NoILD", "DPILD", "ILD"}));
    app->add_option("--alpha", o.alpha, "Dropout rate");
    app->add_option("--epochs", o.epochs, "Maximum epochs");
    app->add_option("--batch-size", o.batch_size, "Minibatch size");
    app->add_option("--lr", o.lr, "Adam learning rate");
    app->add_option("--patience", o.patience, "Early-stopping patience, 0 disables");
    app->add_option("--passes,-Q", o.passes, "Stochastic passes per mask");
    app->add_option("--seed", o.seed, "Master seed");
    app->add_option("--threads", o.threads, "Extraction threads per run");
    app->add_flag("--no-diagonal", o.no_diagonal, "Primary metrics exclude self-loops");
    app->add_flag("--no-standardize", o.no_standardize, "Skip per-channel standardization");
    app->add_option("--out", o.out, "Output directory (relative paths resolve under $MCGC_OUTPUT_ROOT)");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mcgc::ConfigError("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw mcgc::ConfigError(path + ": " + e.what());
    }
}

void apply_dataset_overrides(json& d, const Overrides& o) {
    if (o.preset && d.value("preset", std::string("triad")) != *o.preset) d = json{{"preset", *o.preset}};
    if (o.structure) d["structure"] = *o.structure;
    if (o.linear) d["nonlinear"] = false;
    if (o.length) d["length"] = *o.length;
    if (o.channels) d["channels"] = *o.channels;
    if (o.var_lags) d["lags"] = *o.var_lags;
    if (o.sigma) d["sigma_e"] = *o.sigma;
    if (o.sparsity) d["sparsity"] = *o.sparsity;
    if (o.coupling) d["coupling"] = *o.coupling;
    if (o.forcing) d["forcing"] = *o.forcing;
    if (o.seed) d["seed"] = *o.seed;
    if (o.data_seed) d["seed"] = *o.data_seed;
}

json base_json(const Overrides& o) {
    return o.config_path.empty() ? json::object() : read_json_file(o.config_path);
}

mcgc::ExperimentConfig build_config(const Overrides& o, json j) {
    json d = j.contains("dataset") ? j["dataset"] : json::object();
    if (o.data) {
        d = json{{"preset", "csv"}, {"path", *o.data}};
        if (o.truth) d["adjacency"] = *o.truth;
    } else if (o.truth) {
        if (d.value("preset", std::string()) != "csv") throw mcgc::ConfigError("--truth needs --data");
        d["adjacency"] = *o.truth;
    }
    apply_dataset_overrides(d, o);
    if (d.value("preset", std::string("triad")) == "csv") d.erase("seed");
    j["dataset"] = d;
    if (o.seed) j["seed"] = *o.seed;
    if (o.lags) j["lags"] = *o.lags;
    if (!o.hidden.empty()) j["hidden"] = o.hidden;
    if (o.activation) j["activation"] = *o.activation;
    if (o.passes) j["passes"] = *o.passes;
    if (o.threads) j["threads"] = *o.threads;
    if (o.no_diagonal) j["include_diagonal"] = false;
    if (o.no_standardize) j["standardize"] = false;
    if (o.out) j["output_dir"] = *o.out;
    json& t = j["train"];
    if (t.is_null()) t = json::object();
    if (o.regime) t["regime"] = *o.regime;
    if (o.alpha) t["alpha"] = *o.alpha;
    if (o.epochs) t["epochs"] = *o.epochs;
    if (o.batch_size) t["batch_size"] = *o.batch_size;
    if (o.lr) t["learning_rate"] = *o.lr;
    if (o.patience) t["early_stop_patience"] = *o.patience;
    auto cfg = mcgc::config_from_json(j);
    cfg.validate();
    return cfg;
}

void print_report(const char* label, const std::optional<mcgc::MetricReport>& m) {
    if (!m) {
        std::cout << label << ": undefined (single-class ground truth)\n";
        return;
    }
    std::printf("%s: AUROC %.4f  AUPRC %.4f  (%zu positive, %zu negative)\n", label, m->auroc, m->auprc,
                m->n_positive, m->n_negative);
}

int cmd_generate(const Overrides& o, const std::string& name) {
    json d = json{{"preset", o.preset.value_or("triad")}};
    if (*o.preset == "csv") throw mcgc::ConfigError("generate needs a synthetic preset");
    apply_dataset_overrides(d, o);
    if (!d.contains("seed")) d["seed"] = 0;
    const auto spec = mcgc::dataset_from_json(d);
    mcgc::ExperimentConfig probe;
    probe.dataset = spec;
    probe.validate();
    auto loaded = mcgc::materialize_dataset(spec);
    const auto dir = mcgc::resolve_output_dir(o.out.value_or("data"));
    const std::string stem = name.empty() ? mcgc::preset_name(spec) : name;
    json meta = mcgc::dataset_to_json(spec);
    meta["software"] = "mcgc";
    meta["version"] = mcgc::kVersion;
    if (loaded.series.dt) meta["dt"] = *loaded.series.dt;
    const auto files = mcgc::write_dataset(dir, stem, loaded.series, *loaded.adjacency, meta);
    std::cout << files.series.string() << "\n" << files.adjacency.string() << "\n" << files.metadata.string() << "\n";
    return 0;
}

int cmd_run(const Overrides& o, int replicates, bool sweep_regimes, int jobs) {
    auto cfg = build_config(o, base_json(o));
    const auto dir = mcgc::resolve_output_dir(cfg.output_dir);
    if (replicates > 1 || sweep_regimes) {
        std::vector<mcgc::Regime> regimes{cfg.train.regime};
        if (sweep_regimes) regimes = {mcgc::Regime::no_ild, mcgc::Regime::dp_ild, mcgc::Regime::ild};
        const auto table = mcgc::compare_regimes(cfg, regimes, replicates, jobs);
        mcgc::claim_output_dir(dir);
        mcgc::StageTimer timer;
        const std::vector<fs::path> files{dir / "regimes.csv", dir / "regimes.md"};
        mcgc::write_text_file(files[0], table.csv());
        mcgc::write_text_file(files[1], table.markdown());
        json echo = mcgc::config_to_json(cfg);
        echo["replicates"] = replicates;
        mcgc::write_manifest(dir, echo, timer, files);
        std::cout << table.markdown();
        return 0;
    }
    auto result = mcgc::run_experiment(cfg);
    mcgc::write_run_outputs(result, dir);
    std::cout << "run written to " << dir.string() << "\n";
    if (result.data.truth) {
        print_report(cfg.include_diagonal ? "with diagonal" : "off-diagonal", result.metrics);
        print_report(cfg.include_diagonal ? "off-diagonal" : "with diagonal", result.other_metrics);
    }
    return 0;
}

int cmd_sweep(const Overrides& o, std::vector<double> levels, int replicates, int jobs) {
    json j = base_json(o);
    if (!o.preset && !o.data && !j.contains("dataset")) j["dataset"] = json{{"preset", "var"}};
    Overrides with_out = o;
    if (!with_out.out && !j.contains("output_dir")) with_out.out = "sweep";
    const auto cfg = build_config(with_out, j);
    if (levels.empty()) levels = mcgc::default_sparsity_grid();
    const auto dir = mcgc::resolve_output_dir(cfg.output_dir);
    const auto sweep = mcgc::sweep_sparsity(cfg, levels, replicates, jobs);
    mcgc::claim_output_dir(dir);
    const std::vector<fs::path> files{dir / "sparsity_sweep.csv", dir / "sparsity_sweep.svg"};
    mcgc::write_text_file(files[0], sweep.csv());
    mcgc::write_text_file(files[1], sweep.svg());
    json echo = mcgc::config_to_json(cfg);
    echo["replicates"] = replicates;
    echo["sparsity_levels"] = levels;
    mcgc::write_manifest(dir, echo, mcgc::StageTimer{}, files);
    std::cout << sweep.csv();
    return 0;
}

int cmd_group(const Overrides& o, const std::string& data_dir, double threshold, std::vector<double> grid, int jobs) {
    json j = base_json(o);
    if (!j.contains("lags") && !o.lags) j["lags"] = mcgc::kGroupLags;
    Overrides with_out = o;
    if (!with_out.out && !j.contains("output_dir")) with_out.out = "groups";
    // Subjects are loaded from data_dir; a placeholder CSV source keeps the
    // config valid until then.
    if (!j.contains("dataset") && !o.data) j["dataset"] = json{{"preset", "csv"}, {"path", data_dir}};
    const auto cfg = build_config(with_out, j);
    if (grid.empty()) grid = mcgc::default_threshold_grid();
    std::sort(grid.begin(), grid.end());
    const auto dir = mcgc::resolve_output_dir(cfg.output_dir);
    if (fs::exists(dir / "manifest.json"))
        throw mcgc::ConfigError("output directory " + dir.string() + " already holds a completed run");
    std::mutex log_mutex;
    const auto ga = mcgc::group_analysis(data_dir, cfg, threshold, grid, jobs, [&](const std::string& s) {
        std::lock_guard lock(log_mutex);
        std::cerr << "subject " << s << "\n";
    });
    mcgc::claim_output_dir(dir);
    const auto files = mcgc::write_group_outputs(ga, dir);
    json echo = mcgc::config_to_json(cfg);
    echo["data_dir"] = data_dir;
    echo["threshold"] = threshold;
    echo["threshold_grid"] = grid;
    mcgc::write_manifest(dir, echo, mcgc::StageTimer{}, files);
    for (const auto& g : ga.groups)
        std::cout << g.name << ": " << g.subjects.size() << " subjects, "
                  << static_cast<long>(g.binary.entries.sum()) << " connections above " << threshold << "\n";
    std::cout << "group analysis written to " << dir.string() << "\n";
    return 0;
}

int cmd_render(const std::string& matrix_path, const std::string& out, const std::string& title,
               const std::vector<std::string>& labels, const std::string& compare, std::optional<double> threshold,
               double min_value, double max_value) {
    mcgc::Matrix m = mcgc::read_matrix_csv(fs::path(matrix_path));
    mcgc::HeatmapOptions opt;
    opt.title = title;
    opt.labels = labels;
    opt.min_value = min_value;
    opt.max_value = max_value;
    auto binarize = [&](const mcgc::Matrix& x) {
        return threshold ? mcgc::threshold_matrix(x, *threshold) : mcgc::AdjacencyMatrix{x};
    };
    if (!compare.empty()) {
        const auto a = binarize(m);
        const auto b = binarize(mcgc::read_matrix_csv(fs::path(compare)));
        if (!a.is_binary() || !b.is_binary())
            throw mcgc::ConfigError("--compare needs binary matrices or a --threshold");
        opt.overlay = mcgc::difference_mask(a, b);
        m = a.entries;
    } else if (threshold) {
        m = binarize(m).entries;
    }
    const auto path = mcgc::resolve_output_dir(out);
    mcgc::render_heatmap(m, path, opt);
    std::cout << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo dropout Granger causality"};
    app.set_version_flag("--version", std::string(mcgc::kVersion));
    app.require_subcommand(1);

    Overrides gen_o;
    std::string gen_name;
    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset (CSV, adjacency, metadata)");
    add_dataset_flags(gen, gen_o);
    gen->get_option("--preset")->required();
    gen->add_option("--seed", gen_o.seed, "Generator seed");
    gen->add_option("--name", gen_name, "File stem (defaults to the preset name)");
    gen->add_option("--out", gen_o.out, "Output directory");

    Overrides run_o;
    int replicates = 1, jobs = 1;
    bool sweep_regimes = false;
    auto* run = app.add_subcommand("run", "Train, extract Granger scores and evaluate");
    add_run_flags(run, run_o);
    run->add_option("--replicates", replicates, "Seeds seed..seed+N-1; N > 1 writes a summary table")
        ->check(CLI::PositiveNumber);
    run->add_flag("--sweep-regimes", sweep_regimes, "Compare NoILD, DPILD and ILD");
    run->add_option("--jobs", jobs, "Concurrent replicate runs")->check(CLI::PositiveNumber);

    Overrides sweep_o;
    std::vector<double> levels;
    int sweep_reps = 5, sweep_jobs = 1;
    auto* sweep = app.add_subcommand("sweep-sparsity", "AUROC/AUPRC versus VAR sparsity");
    add_run_flags(sweep, sweep_o);
    sweep->add_option("--levels", levels, "Sparsity grid, e.g. 0.1,0.2")->delimiter(',');
    sweep->add_option("--replicates", sweep_reps, "Seeds per level")->check(CLI::PositiveNumber);
    sweep->add_option("--jobs", sweep_jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    Overrides group_o;
    std::string data_dir;
    double threshold = mcgc::kGroupThreshold;
    std::vector<double> grid;
    int group_jobs = 1;
    auto* group = app.add_subcommand("group-analysis", "Per-subject scores, group means and differences");
    add_run_flags(group, group_o);
    group->add_option("--data-dir", data_dir, "Directory of <group>/<subject>.csv")->required();
    group->add_option("--threshold", threshold, "Binarization threshold")->check(CLI::Range(0.0, 1.0));
    group->add_option("--grid", grid, "Threshold-curve grid, e.g. 0.5,0.6")->delimiter(',');
    group->add_option("--jobs", group_jobs, "Concurrent subject runs")->check(CLI::PositiveNumber);

    std::string matrix_path, render_out, title, compare;
    std::vector<std::string> labels;
    std::optional<double> render_threshold;
    double min_value = 0.0, max_value = 1.0;
    auto* render = app.add_subcommand("render", "Render a matrix CSV as an SVG heatmap");
    render->add_option("--matrix", matrix_path, "Matrix CSV")->required()->check(CLI::ExistingFile);
    render->add_option("--out", render_out, "SVG path")->required();
    render->add_option("--title", title, "Title");
    render->add_option("--labels", labels, "Channel labels, comma separated")->delimiter(',');
    render->add_option("--compare", compare, "Second matrix; outlines cells that differ")->check(CLI::ExistingFile);
    render->add_option("--threshold", render_threshold, "Binarize at this threshold first");
    render->add_option("--min", min_value, "Color scale minimum");
    render->add_option("--max", max_value, "Color scale maximum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*gen) return cmd_generate(gen_o, gen_name);
        if (*run) return cmd_run(run_o, replicates, sweep_regimes, jobs);
        if (*sweep) return cmd_sweep(sweep_o, levels, sweep_reps, sweep_jobs);
        if (*group) return cmd_group(group_o, data_dir, threshold, grid, group_jobs);
        if (*render) return cmd_render(matrix_path, render_out, title, labels, compare, render_threshold, min_value,
                                       max_value);
    } catch (const mcgc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mcgc::StageError& e) {
        std::cerr << "error in stage " << e.what() << "\n";
        return e.bad_input() ? kExitConfig : kExitRuntime;
    } catch (const mcgc::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
