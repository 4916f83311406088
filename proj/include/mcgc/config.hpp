#pragma once

// Experiment configuration: what data to use, how to lag and split it, the
// model and training settings, and how many Monte-Carlo passes to extract
// scores with. Serializes to and from JSON; missing keys keep defaults.

#include "generators.hpp"
#include "mlp.hpp"
#include "series.hpp"
#include "training.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mcgc {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid user configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct CsvSource {
    std::string path;
    std::optional<std::string> adjacency;
};

using DatasetSpec = std::variant<TriadSpec, VarSpec, LorenzSpec, CsvSource>;

inline std::string preset_name(const DatasetSpec& d) {
    switch (d.index()) {
        case 0: return "triad";
        case 1: return "var";
        case 2: return "lorenz96";
        default: return "csv";
    }
}

struct ExperimentConfig {
    DatasetSpec dataset = TriadSpec{};
    int lags = 5;
    SplitSpec split;
    std::vector<int> hidden = {64, 64};
    Activation activation = Activation::relu;
    TrainConfig train;
    int passes = 100;  // Q
    std::uint64_t seed = 0;
    bool standardize = true;
    bool include_diagonal = true;
    int threads = 1;
    std::string output_dir = "run";

    void validate() const {
        if (lags < 1) throw ConfigError("lags must be positive");
        if (passes < 2) throw ConfigError("passes (Q) must be at least 2");
        if (threads < 1) throw ConfigError("threads must be at least 1");
        for (int h : hidden)
            if (h < 1) throw ConfigError("hidden layer sizes must be positive");
        try {
            split.validate();
            train.validate();
            std::visit(
                [](const auto& spec) {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(spec)>, CsvSource>) spec.validate();
                },
                dataset);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (const auto* csv = std::get_if<CsvSource>(&dataset); csv && csv->path.empty())
            throw ConfigError("csv dataset needs a path");
    }
};

/// Generator presets carry their own seed; CSV sources ignore it.
inline void set_dataset_seed(DatasetSpec& d, std::uint64_t seed) {
    std::visit(
        [seed](auto& spec) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(spec)>, CsvSource>) spec.seed = seed;
        },
        d);
}

inline nlohmann::json dataset_to_json(const DatasetSpec& d) {
    nlohmann::json j = std::visit(
        [](const auto& spec) -> nlohmann::json {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, CsvSource>) {
                nlohmann::json c{{"path", spec.path}};
                if (spec.adjacency) c["adjacency"] = *spec.adjacency;
                return c;
            } else {
                return spec;
            }
        },
        d);
    j["preset"] = preset_name(d);
    return j;
}

namespace detail {

template <typename Spec>
Spec spec_with_defaults(const nlohmann::json& j) {
    nlohmann::json merged = Spec{};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "preset") merged[it.key()] = it.value();
    return merged.get<Spec>();
}

}  // namespace detail

inline DatasetSpec dataset_from_json(const nlohmann::json& j) {
    const auto preset = j.value("preset", std::string("triad"));
    try {
        if (preset == "triad") {
            if (j.contains("structure")) parse_triad_structure(j.at("structure").get<std::string>());
            return detail::spec_with_defaults<TriadSpec>(j);
        }
        if (preset == "var") return detail::spec_with_defaults<VarSpec>(j);
        if (preset == "lorenz96") return detail::spec_with_defaults<LorenzSpec>(j);
        if (preset == "csv") {
            CsvSource c{j.at("path").get<std::string>(), std::nullopt};
            if (j.contains("adjacency") && !j.at("adjacency").is_null()) c.adjacency = j.at("adjacency").get<std::string>();
            return c;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("dataset: ") + e.what());
    }
    throw ConfigError("unknown dataset preset '" + preset + "'");
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    return {{"dataset", dataset_to_json(c.dataset)},
            {"lags", c.lags},
            {"split", {c.split.train_frac, c.split.val_frac, c.split.test_frac}},
            {"hidden", c.hidden},
            {"activation", c.activation},
            {"train", c.train},
            {"passes", c.passes},
            {"seed", c.seed},
            {"standardize", c.standardize},
            {"include_diagonal", c.include_diagonal},
            {"threads", c.threads},
            {"output_dir", c.output_dir}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.seed = j.value("seed", c.seed);
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            c.dataset = dataset_from_json(d);
            if (!d.contains("seed")) set_dataset_seed(c.dataset, c.seed);
        }
        c.lags = j.value("lags", c.lags);
        if (j.contains("split")) {
            const auto s = j.at("split").get<std::vector<double>>();
            if (s.size() != 3) throw ConfigError("split needs three fractions");
            c.split = {s[0], s[1], s[2]};
        }
        c.hidden = j.value("hidden", c.hidden);
        if (j.contains("activation")) c.activation = parse_activation(j.at("activation").get<std::string>());
        if (j.contains("train")) {
            const auto& t = j.at("train");
            if (t.contains("regime")) parse_regime(t.at("regime").get<std::string>());
            c.train = t.get<TrainConfig>();
        }
        c.passes = j.value("passes", c.passes);
        c.standardize = j.value("standardize", c.standardize);
        c.include_diagonal = j.value("include_diagonal", c.include_diagonal);
        c.threads = j.value("threads", c.threads);
        c.output_dir = j.value("output_dir", c.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

}  // namespace mcgc
