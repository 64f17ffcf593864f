#include "rotlab/cli.hpp"

#include "rotlab/config.hpp"
#include "rotlab/criterion.hpp"
#include "rotlab/errors.hpp"
#include "rotlab/measure.hpp"
#include "rotlab/simulate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace rotlab::cli {

namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> precision_bits;
    std::optional<std::size_t> cap_k;
    std::optional<std::size_t> cap_arcs;
};

class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + (dir_ / name).string());
        f << content;
        files_.push_back(name);
    }
    void write_json(const std::string& name, const nlohmann::ordered_json& j) { write(name, j.dump(2) + "\n"); }

    const std::vector<std::string>& files() const { return files_; }
    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ExperimentConfig load_config(const Flags& f) {
    ExperimentConfig cfg = ExperimentConfig::load(f.config);
    if (f.seed) cfg.run.seed = *f.seed;
    if (f.precision_bits) cfg.run.precision_bits = *f.precision_bits;
    if (f.cap_k) cfg.run.cap_k = *f.cap_k;
    if (f.cap_arcs) cfg.run.cap_arcs = *f.cap_arcs;
    return cfg;
}

int cmd_cf(const ExperimentConfig& cfg, Outputs& out, std::ostream& log) {
    const std::size_t k_max = cfg.cf ? cfg.cf->k_max : CfConfig{}.k_max;
    ConvergentTable table(cfg.theta.build());
    table.extend_to(k_max + 1, cfg.run.cap_k);
    std::ostringstream csv;
    csv << "k,a_k,p_k,q_k,ratio,ratio_exact\n";
    for (std::size_t k = 0; k <= k_max; ++k) {
        Rational ratio(table.q(k + 1), table.q(k));
        ratio.canonicalize();
        csv << k << ',' << table.a(k).get_str() << ',' << table.p(k).get_str() << ',' << table.q(k).get_str() << ','
            << decimal_str(ratio, 12) << ',' << rational_str(ratio) << '\n';
    }
    out.write("cf.csv", csv.str());
    const auto violations = verify_table_invariants(table);
    for (const auto& v : violations) log << "invariant violated: " << v << '\n';
    log << "cf: " << table.spec().describe() << " k = 0.." << k_max << ", q_" << k_max << " = "
        << table.q(k_max).get_str() << '\n';
    return violations.empty() ? kOk : kAuditFailure;
}

int cmd_criterion(const ExperimentConfig& cfg, Outputs& out, std::ostream& log) {
    const CriterionConfig c = cfg.criterion.value_or(CriterionConfig{});
    const IrrationalSpec theta = cfg.theta.build();
    const PhiSpec phi = cfg.phi.build();
    CriterionOptions opt;
    opt.precision_bits = cfg.run.precision_bits;
    opt.cap_k = cfg.run.cap_k;

    nlohmann::ordered_json summary;
    summary["theta"] = theta.describe();
    summary["phi"] = phi.describe();
    summary["K_max"] = c.k_max;
    std::optional<Trend> main_trend;
    std::optional<Trend> shifted_trend;
    for (const auto& s : c.series) {
        if (s == "main" || s == "shifted" || s == "inverse_log") {
            SeriesReport r = s == "main"      ? main_series(theta, phi, c.k_max, opt)
                             : s == "shifted" ? shifted_series(theta, phi, c.k_max, opt)
                                              : inverse_log_series(theta, c.k_max, opt);
            out.write_json("criterion_" + s + ".json", to_json(r));
            out.write("criterion_" + s + ".csv", to_csv(r));
            summary[s] = to_string(r.classification);
            if (s == "main") main_trend = r.classification;
            if (s == "shifted") shifted_trend = r.classification;
            log << s << ": " << to_string(r.classification) << ", S_K = " << r.partial_sums.front().second.to_string()
                << '\n';
        } else if (s == "condition_i") {
            ConditionIReport r = condition_i_check(theta, c.k_max, opt);
            out.write_json("condition_i.json", to_json(r));
            summary[s] = to_string(r.trend);
            log << "condition_i: fitted C = " << r.fitted_c.to_string() << ", " << to_string(r.trend) << '\n';
        } else if (s == "condition_ii") {
            ConditionIIReport r = condition_ii_check(theta, c.k_max, c.d, opt);
            nlohmann::ordered_json j = to_json(r);
            j["D"] = rational_str(c.d);
            out.write_json("condition_ii.json", j);
            summary[s] = {{"violations", r.violations.size()}, {"undecided", r.undecided.size()}};
            log << "condition_ii: fitted D = " << r.fitted_d.to_string() << ", " << r.violations.size()
                << " violations of D = " << rational_str(c.d) << '\n';
        }
    }
    if (main_trend && shifted_trend) {
        const bool contradiction = (*main_trend == Trend::Diverging && *shifted_trend == Trend::Converging) ||
                                   (*main_trend == Trend::Converging && *shifted_trend == Trend::Diverging);
        summary["main_shifted_consistent"] = !contradiction;
    }
    out.write_json("criterion_summary.json", summary);
    return kOk;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& spec, std::size_t k_min,
                                                             std::size_t k_max) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (spec == "none") return out;
    if (spec == "auto") {
        for (std::size_t k = k_min + 1; k <= k_max; ++k) {
            for (std::size_t l = k_min; l < k; ++l) out.emplace_back(l, k);
        }
        return out;
    }
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("[measure] malformed pair '" + item + "' in 'pairs'");
        try {
            out.emplace_back(std::stoul(item.substr(0, colon)), std::stoul(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("[measure] malformed pair '" + item + "' in 'pairs'");
        }
    }
    return out;
}

int cmd_measure(const ExperimentConfig& cfg, Outputs& out, std::ostream& log) {
    const MeasureConfig c = cfg.measure.value_or(MeasureConfig{});
    MeasureOptions opt;
    opt.precision_bits = cfg.run.precision_bits;
    opt.cap_k = cfg.run.cap_k;
    opt.cap_arcs = cfg.run.cap_arcs;
    MeasureLab lab(cfg.theta.build(), cfg.phi.build(), opt);
    lab.require(c.k_max);
    const std::size_t k_min = c.k_min.value_or(first_nondegenerate_index(lab.table()));
    if (c.k_max < k_min) throw ConfigError("[measure] k_max below k_min");

    nlohmann::ordered_json j;
    j["theta"] = lab.table().spec().describe();
    j["phi"] = lab.phi().describe();
    j["k_min"] = k_min;
    j["k_max"] = c.k_max;
    std::size_t failures = 0;
    std::size_t undecided = 0;
    auto tally = [&](Certainty h) {
        if (h == Certainty::False) ++failures;
        if (h == Certainty::Undecided) ++undecided;
    };

    nlohmann::ordered_json audits = nlohmann::ordered_json::array();
    for (const auto& r : lab.audit_inequalities(k_min, c.k_max)) {
        tally(r.holds);
        audits.push_back(to_json(r));
    }
    j["audits"] = audits;

    nlohmann::ordered_json quasi = nlohmann::ordered_json::array();
    for (const auto& r : lab.quasi_independence(parse_pairs(c.pairs, k_min, c.k_max))) {
        tally(r.holds);
        quasi.push_back(to_json(r));
    }
    j["quasi_independence"] = quasi;

    nlohmann::ordered_json dk = nlohmann::ordered_json::array();
    SplitMix64 rng(cfg.run.seed);
    for (std::size_t k : c.dk_k) {
        std::vector<std::pair<Rational, Rational>> arcs{{Rational(0), Rational(1)}};
        for (std::size_t i = 0; i < c.dk_arcs; ++i) {
            Rational start(BigInt(static_cast<unsigned long>(rng.next())), BigInt(1) << 64);
            Rational length(BigInt(static_cast<unsigned long>(rng.next() | 1)), BigInt(1) << 64);
            start.canonicalize();
            length.canonicalize();
            arcs.emplace_back(start, length);
        }
        for (const auto& [start, length] : arcs) {
            DenjoyKoksmaResult r = lab.denjoy_koksma_count(start, length, k);
            if (!r.holds) ++failures;
            nlohmann::ordered_json e = to_json(r);
            e["arc_start"] = rational_str(start);
            e["arc_length"] = rational_str(length);
            dk.push_back(e);
        }
    }
    j["denjoy_koksma"] = dk;

    nlohmann::ordered_json gks = nlohmann::ordered_json::array();
    for (std::size_t k = k_min; k <= c.k_max; ++k) {
        if (lab.table().q(k) == lab.table().q(k + 1)) continue;
        const GkStructure& g = lab.build_Gk(k);
        gks.push_back(to_json(g));
        if (c.export_sets) {
            out.write("E_" + std::to_string(k) + ".csv", lab.build_Ek(k).set.to_csv());
            out.write("G_" + std::to_string(k) + ".csv", g.all.set.to_csv());
        }
    }
    j["G_k"] = gks;
    j["summary"] = {{"audit_records", audits.size()},
                    {"quasi_pairs", quasi.size()},
                    {"denjoy_koksma_arcs", dk.size()},
                    {"failures", failures},
                    {"undecided", undecided}};
    out.write_json("measure_audit.json", j);
    log << "measure: " << audits.size() << " audit records, " << quasi.size() << " pairs, " << dk.size()
        << " Denjoy-Koksma arcs; " << failures << " failures, " << undecided << " undecided\n";
    return failures + undecided == 0 ? kOk : kAuditFailure;
}

int cmd_simulate(const ExperimentConfig& cfg, Outputs& out, std::ostream& log) {
    const SimulateConfig c = cfg.simulate.value_or(SimulateConfig{});
    const IrrationalSpec theta = cfg.theta.build();
    SimulationOptions opt;
    opt.threads = cfg.run.threads;
    opt.cap_k = cfg.run.cap_k;
    if (c.mode == "liminf" || c.mode == "minkowski") {
        SimulationResult r = c.mode == "liminf"
                                 ? run_liminf_experiment(theta, cfg.phi.build(), c.samples, c.checkpoints,
                                                         cfg.run.seed, opt)
                                 : minkowski_check(theta, c.samples, c.n_max, cfg.run.seed, opt);
        out.write_json(c.mode + ".json", to_json(r));
        out.write(c.mode + "_quantiles.csv", quantiles_csv(r));
        if (!r.r_quantiles.empty()) {
            log << c.mode << ": median R_N at N = " << r.checkpoints.back() << " is " << r.r_quantiles.back().median
                << '\n';
        }
        return kOk;
    }
    BorelCantelliOptions bo;
    bo.cross_check_samples = c.cross_check_samples;
    bo.measure.precision_bits = cfg.run.precision_bits;
    bo.measure.cap_k = cfg.run.cap_k;
    bo.measure.cap_arcs = cfg.run.cap_arcs;
    BorelCantelliResult r =
        borel_cantelli_statistic(theta, cfg.phi.build(), c.k_min, c.k_max, c.samples, cfg.run.seed, bo);
    out.write_json("borel_cantelli.json", to_json(r));
    out.write("borel_cantelli.csv", to_csv(r));
    log << "borel_cantelli: " << r.fraction_within() * 100 << "% of k within the Wilson interval, "
        << r.disagreements << " cross-check disagreements\n";
    return r.disagreements == 0 ? kOk : kAuditFailure;
}

int cmd_build_theta(const ExperimentConfig& cfg, Outputs& out, std::ostream& log) {
    const std::size_t k = cfg.build_theta ? cfg.build_theta->k : BuildThetaConfig{}.k;
    ThetaBuildOptions opt;
    opt.precision_bits = cfg.run.precision_bits;
    ThetaBuild b = theta_builder_squares(cfg.phi.build(), k, opt);
    out.write_json("theta.json", to_json(b));
    ExperimentConfig built;
    built.theta.kind = "explicit";
    built.theta.values = b.quotients;
    built.theta.tail = std::make_shared<ThetaConfig>();
    built.phi = cfg.phi;
    built.run = cfg.run;
    out.write("theta.cfg", built.to_text());
    log << "build-theta: " << k << " partial quotients, q_" << k << " has "
        << mpz_sizeinbase(b.q.back().get_mpz_t(), 10) << " digits\n";
    return kOk;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
    if (const auto* re = dynamic_cast<const Error*>(&e)) {
        switch (re->kind()) {
        case ErrorKind::Config:
        case ErrorKind::Validation: return kConfig;
        case ErrorKind::Resource:
        case ErrorKind::Construction: return kResource;
        case ErrorKind::Precision: return kPrecision;
        case ErrorKind::Consistency: return kAuditFailure;
        case ErrorKind::Index: return kInternal;
        }
    }
    return kInternal;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rotation-orbit shrinking target experiments"};
    app.require_subcommand(1, 1);
    Flags flags;
    struct Command {
        const char* name;
        const char* help;
        int (*fn)(const ExperimentConfig&, Outputs&, std::ostream&);
    };
    const Command commands[] = {
        {"cf", "dump the convergent table", cmd_cf},
        {"criterion", "evaluate and classify the criterion series", cmd_criterion},
        {"measure", "build the ball unions and audit the measure inequalities", cmd_measure},
        {"simulate", "Monte Carlo over random targets", cmd_simulate},
        {"build-theta", "greedy theta with phi(q_k) > k^2", cmd_build_theta},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", flags.config, "config file")->required();
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--seed", flags.seed, "seed override");
        sub->add_option("--precision-bits", flags.precision_bits, "working precision override")
            ->check(CLI::Range(64u, 8192u));
        sub->add_option("--cap-k", flags.cap_k, "largest convergent index");
        sub->add_option("--cap-arcs", flags.cap_arcs, "largest number of balls per set");
    }

    std::vector<std::string> argv_store{"rotlab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream e2;
        const int rc = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return rc == 0 ? kOk : kConfig;
    }

    const Command* chosen = nullptr;
    for (const auto& c : commands) {
        if (app.got_subcommand(c.name)) chosen = &c;
    }
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    int rc = kInternal;
    std::string message;
    std::optional<Outputs> outputs;
    std::string canonical;
    try {
        ExperimentConfig cfg = load_config(flags);
        canonical = cfg.to_text();
        outputs.emplace(flags.out);
        rc = chosen->fn(cfg, *outputs, out);
    } catch (const std::exception& e) {
        rc = exit_code_for(e);
        message = e.what();
        const char* label = rc == kConfig      ? "config error"
                            : rc == kResource  ? "resource cap exceeded"
                            : rc == kPrecision ? "precision failure"
                            : rc == kAuditFailure ? "audit failure"
                                                  : "internal error";
        err << label << ": " << message << '\n';
    }
    if (outputs) {
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        nlohmann::ordered_json meta;
        meta["command"] = chosen->name;
        meta["args"] = args;
        meta["started_utc"] = started;
        meta["finished_utc"] = utc_now();
        meta["elapsed_seconds"] = elapsed;
        meta["exit_code"] = rc;
        if (!message.empty()) meta["error"] = message;
        meta["config"] = canonical;
        meta["files"] = outputs->files();
        std::ofstream f(outputs->dir() / (std::string(chosen->name) + ".meta.json"));
        f << meta.dump(2) << '\n';
    }
    return rc;
}

}  // namespace rotlab::cli
