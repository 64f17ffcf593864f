#pragma once

#include "rotlab/irrational.hpp"
#include "rotlab/phi.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rotlab {

/// Flat text config:
///
///     # comment
///     [section]
///     key = value
///
/// Sections and keys are checked against what each command understands;
/// anything else is a ConfigError naming the offending key.
struct IniDocument {
    /// section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sections;

    static IniDocument parse(const std::string& text);
};

struct PhiConfig {
    std::string kind = "constant";
    Rational c{4};
    int depth = 1;
    std::optional<std::uint64_t> onset;
    Rational exponent{1};
    std::vector<Rational> values;
    Rational floor{4};
    std::shared_ptr<PhiConfig> base;

    PhiSpec build() const;
};

struct ThetaConfig {
    std::string kind = "golden";
    BigInt a{1};
    std::vector<BigInt> values;
    std::string name;
    std::shared_ptr<ThetaConfig> tail;  // explicit: defaults to golden
    std::size_t k = 20;                 // squares: number of built quotients
    std::shared_ptr<PhiConfig> phi;     // squares: phi used by the builder

    IrrationalSpec build() const;
};

struct RunConfig {
    std::uint64_t seed = 1;
    unsigned precision_bits = 128;
    std::size_t cap_k = 100000;
    std::size_t cap_arcs = 1000000;
    unsigned threads = 0;
};

struct CfConfig {
    std::size_t k_max = 20;
};

struct CriterionConfig {
    std::size_t k_max = 200;
    std::vector<std::string> series{"main", "shifted"};
    Rational d{1};
};

struct MeasureConfig {
    std::optional<std::size_t> k_min;
    std::size_t k_max = 10;
    std::string pairs = "auto";  // "auto", "none" or "l:k,l:k,..."
    std::vector<std::size_t> dk_k;
    std::size_t dk_arcs = 0;
    bool export_sets = false;
};

struct SimulateConfig {
    std::string mode = "liminf";  // liminf | minkowski | borel_cantelli
    std::size_t samples = 100;
    std::vector<std::uint64_t> checkpoints{1000, 10000, 100000};
    std::uint64_t n_max = 100000;
    std::size_t k_min = 1;
    std::size_t k_max = 10;
    std::size_t cross_check_samples = 200;
};

struct BuildThetaConfig {
    std::size_t k = 20;
};

struct ExperimentConfig {
    ThetaConfig theta;
    PhiConfig phi;
    RunConfig run;
    std::optional<CfConfig> cf;
    std::optional<CriterionConfig> criterion;
    std::optional<MeasureConfig> measure;
    std::optional<SimulateConfig> simulate;
    std::optional<BuildThetaConfig> build_theta;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    /// Canonical text; parse(to_text()) reproduces the same config.
    std::string to_text() const;
};

}  // namespace rotlab
