#include "rotlab/config.hpp"

#include "rotlab/errors.hpp"
#include "rotlab/simulate.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace rotlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ",";
        out += f(xs[i]);
    }
    return out;
}

/// Reads keys of one section, remembering which ones were consumed.
class SectionReader {
public:
    SectionReader(const IniDocument& doc, std::string name, std::set<std::string>& seen)
        : name_(std::move(name)) {
        if (auto it = doc.sections.find(name_); it != doc.sections.end()) {
            entries_ = &it->second;
            seen.insert(name_);
        }
    }

    bool present() const { return entries_ != nullptr; }

    std::optional<std::string> get(const std::string& key) {
        if (entries_ == nullptr) return std::nullopt;
        auto it = entries_->find(key);
        if (it == entries_->end()) return std::nullopt;
        used_.insert(key);
        return it->second.first;
    }

    template <class F>
    auto get_as(const std::string& key, F&& convert) -> std::optional<decltype(convert(std::string()))> {
        auto v = get(key);
        if (!v) return std::nullopt;
        try {
            return convert(*v);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("[" + name_ + "] invalid value for '" + key + "' (line " +
                              std::to_string(line(key)) + "): " + e.what());
        }
    }

    void finish() const {
        if (entries_ == nullptr) return;
        for (const auto& [key, vl] : *entries_) {
            if (!used_.count(key)) {
                throw ConfigError("[" + name_ + "] unknown key '" + key + "' (line " +
                                  std::to_string(vl.second) + ")");
            }
        }
    }

    const std::string& name() const { return name_; }

private:
    int line(const std::string& key) const { return entries_->at(key).second; }

    std::string name_;
    const std::map<std::string, std::pair<std::string, int>>* entries_ = nullptr;
    std::set<std::string> used_;
};

std::uint64_t to_u64(const std::string& s) {
    BigInt v = parse_bigint(s);
    if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) throw ValidationError("not an unsigned 64-bit integer");
    BigInt hi = v >> 32;
    BigInt lo = v - (hi << 32);
    return (static_cast<std::uint64_t>(hi.get_ui()) << 32) | static_cast<std::uint64_t>(lo.get_ui());
}

std::size_t to_size(const std::string& s) { return static_cast<std::size_t>(to_u64(s)); }

bool to_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ValidationError("expected true or false");
}

std::string u64_str(std::uint64_t v) { return std::to_string(v); }

PhiConfig read_phi(const IniDocument& doc, const std::string& section, std::set<std::string>& seen) {
    SectionReader r(doc, section, seen);
    PhiConfig p;
    if (!r.present()) return p;
    p.kind = r.get("kind").value_or("constant");
    if (p.kind == "constant") {
        if (auto v = r.get_as("c", parse_rational)) p.c = *v;
    } else if (p.kind == "logstack") {
        if (auto v = r.get_as("depth", to_u64)) p.depth = static_cast<int>(*v);
        p.onset = r.get_as("onset", to_u64);
    } else if (p.kind == "power") {
        if (auto v = r.get_as("exponent", parse_rational)) p.exponent = *v;
    } else if (p.kind == "table") {
        auto v = r.get_as("values", [](const std::string& s) {
            std::vector<Rational> out;
            for (const auto& x : split_list(s)) out.push_back(parse_rational(x));
            return out;
        });
        if (!v) throw ConfigError("[" + section + "] kind = table requires 'values'");
        p.values = *v;
    } else if (p.kind == "shifted") {
        if (auto v = r.get_as("floor", parse_rational)) p.floor = *v;
        p.base = std::make_shared<PhiConfig>(read_phi(doc, section + ".base", seen));
    } else {
        throw ConfigError("[" + section + "] unknown phi kind '" + p.kind + "'");
    }
    r.finish();
    return p;
}

ThetaConfig read_theta(const IniDocument& doc, const std::string& section, std::set<std::string>& seen) {
    SectionReader r(doc, section, seen);
    ThetaConfig t;
    if (!r.present()) return t;
    t.kind = r.get("kind").value_or("golden");
    if (t.kind == "golden" || t.kind == "linear" || t.kind == "loglog_power") {
    } else if (t.kind == "constant") {
        if (auto v = r.get_as("a", parse_bigint)) t.a = *v;
    } else if (t.kind == "explicit") {
        auto v = r.get_as("values", [](const std::string& s) {
            std::vector<BigInt> out;
            for (const auto& x : split_list(s)) out.push_back(parse_bigint(x));
            return out;
        });
        if (!v) throw ConfigError("[" + section + "] kind = explicit requires 'values'");
        t.values = *v;
        if (doc.sections.count(section + ".tail")) {
            t.tail = std::make_shared<ThetaConfig>(read_theta(doc, section + ".tail", seen));
        }
    } else if (t.kind == "custom") {
        auto v = r.get("name");
        if (!v) throw ConfigError("[" + section + "] kind = custom requires 'name'");
        t.name = *v;
    } else if (t.kind == "squares") {
        if (auto v = r.get_as("k", to_size)) t.k = *v;
        t.phi = std::make_shared<PhiConfig>(read_phi(doc, section + ".phi", seen));
    } else {
        throw ConfigError("[" + section + "] unknown theta kind '" + t.kind + "'");
    }
    r.finish();
    return t;
}

void write_phi(std::ostream& out, const PhiConfig& p, const std::string& section) {
    out << "[" << section << "]\nkind = " << p.kind << "\n";
    if (p.kind == "constant") {
        out << "c = " << rational_str(p.c) << "\n";
    } else if (p.kind == "logstack") {
        out << "depth = " << p.depth << "\n";
        if (p.onset) out << "onset = " << *p.onset << "\n";
    } else if (p.kind == "power") {
        out << "exponent = " << rational_str(p.exponent) << "\n";
    } else if (p.kind == "table") {
        out << "values = " << join<Rational>(p.values, rational_str) << "\n";
    } else if (p.kind == "shifted") {
        out << "floor = " << rational_str(p.floor) << "\n\n";
        write_phi(out, p.base ? *p.base : PhiConfig{}, section + ".base");
        return;
    }
    out << "\n";
}

void write_theta(std::ostream& out, const ThetaConfig& t, const std::string& section) {
    out << "[" << section << "]\nkind = " << t.kind << "\n";
    if (t.kind == "constant") {
        out << "a = " << t.a.get_str() << "\n";
    } else if (t.kind == "explicit") {
        out << "values = " << join<BigInt>(t.values, [](const BigInt& b) { return b.get_str(); }) << "\n";
        if (t.tail) {
            out << "\n";
            write_theta(out, *t.tail, section + ".tail");
            return;
        }
    } else if (t.kind == "custom") {
        out << "name = " << t.name << "\n";
    } else if (t.kind == "squares") {
        out << "k = " << t.k << "\n\n";
        write_phi(out, t.phi ? *t.phi : PhiConfig{}, section + ".phi");
        return;
    }
    out << "\n";
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text) {
    IniDocument doc;
    std::stringstream in(text);
    std::string raw;
    std::string current;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header at line " + std::to_string(line_no));
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) throw ConfigError("empty section name at line " + std::to_string(line_no));
            if (doc.sections.count(current)) {
                throw ConfigError("duplicate section [" + current + "] at line " + std::to_string(line_no));
            }
            doc.sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value' at line " + std::to_string(line_no));
        if (current.empty()) throw ConfigError("key outside any section at line " + std::to_string(line_no));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
        if (value.empty()) throw ConfigError("[" + current + "] empty value for '" + key + "'");
        auto& sec = doc.sections[current];
        if (sec.count(key)) throw ConfigError("[" + current + "] duplicate key '" + key + "'");
        sec[key] = {value, line_no};
    }
    return doc;
}

PhiSpec PhiConfig::build() const {
    try {
        if (kind == "constant") return PhiSpec::constant(c);
        if (kind == "logstack") return onset ? PhiSpec::log_stack(depth, *onset) : PhiSpec::log_stack(depth);
        if (kind == "power") return PhiSpec::power(exponent);
        if (kind == "table") return PhiSpec::table(values);
        if (kind == "shifted") return PhiSpec::shifted(base ? base->build() : PhiConfig{}.build(), floor);
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("phi: ") + e.what());
    }
    throw ConfigError("unknown phi kind '" + kind + "'");
}

IrrationalSpec ThetaConfig::build() const {
    try {
        if (kind == "golden") return IrrationalSpec::golden();
        if (kind == "constant") return IrrationalSpec::constant(a);
        if (kind == "linear") return IrrationalSpec::linear();
        if (kind == "loglog_power") return IrrationalSpec::loglog_power();
        if (kind == "explicit") {
            return IrrationalSpec::explicit_list(values, tail ? tail->build() : IrrationalSpec::golden());
        }
        if (kind == "custom") return IrrationalSpec::named_custom(name);
        if (kind == "squares") return theta_builder_squares(phi ? phi->build() : PhiConfig{}.build(), k).spec;
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("theta: ") + e.what());
    }
    throw ConfigError("unknown theta kind '" + kind + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    const IniDocument doc = IniDocument::parse(text);
    std::set<std::string> seen;
    ExperimentConfig cfg;
    cfg.theta = read_theta(doc, "theta", seen);
    cfg.phi = read_phi(doc, "phi", seen);
    {
        SectionReader r(doc, "run", seen);
        if (auto v = r.get_as("seed", to_u64)) cfg.run.seed = *v;
        if (auto v = r.get_as("precision_bits", to_u64)) cfg.run.precision_bits = static_cast<unsigned>(*v);
        if (auto v = r.get_as("cap_k", to_size)) cfg.run.cap_k = *v;
        if (auto v = r.get_as("cap_arcs", to_size)) cfg.run.cap_arcs = *v;
        if (auto v = r.get_as("threads", to_u64)) cfg.run.threads = static_cast<unsigned>(*v);
        r.finish();
        if (cfg.run.precision_bits < 64 || cfg.run.precision_bits > 8192) {
            throw ConfigError("[run] precision_bits must be in [64, 8192]");
        }
    }
    if (SectionReader r(doc, "cf", seen); r.present()) {
        CfConfig c;
        if (auto v = r.get_as("k_max", to_size)) c.k_max = *v;
        r.finish();
        cfg.cf = c;
    }
    if (SectionReader r(doc, "criterion", seen); r.present()) {
        CriterionConfig c;
        if (auto v = r.get_as("k_max", to_size)) c.k_max = *v;
        if (auto v = r.get("series")) {
            c.series = split_list(*v);
            static const std::set<std::string> known{"main", "shifted", "inverse_log", "condition_i", "condition_ii"};
            for (const auto& s : c.series) {
                if (!known.count(s)) throw ConfigError("[criterion] unknown series '" + s + "' in 'series'");
            }
        }
        if (auto v = r.get_as("d", parse_rational)) c.d = *v;
        r.finish();
        cfg.criterion = c;
    }
    if (SectionReader r(doc, "measure", seen); r.present()) {
        MeasureConfig c;
        c.k_min = r.get_as("k_min", to_size);
        if (auto v = r.get_as("k_max", to_size)) c.k_max = *v;
        if (auto v = r.get("pairs")) c.pairs = *v;
        if (auto v = r.get_as("dk_k", [](const std::string& s) {
                std::vector<std::size_t> out;
                for (const auto& x : split_list(s)) out.push_back(to_size(x));
                return out;
            })) {
            c.dk_k = *v;
        }
        if (auto v = r.get_as("dk_arcs", to_size)) c.dk_arcs = *v;
        if (auto v = r.get_as("export_sets", to_bool)) c.export_sets = *v;
        r.finish();
        cfg.measure = c;
    }
    if (SectionReader r(doc, "simulate", seen); r.present()) {
        SimulateConfig c;
        if (auto v = r.get("mode")) c.mode = *v;
        if (c.mode != "liminf" && c.mode != "minkowski" && c.mode != "borel_cantelli") {
            throw ConfigError("[simulate] unknown mode '" + c.mode + "' for 'mode'");
        }
        if (auto v = r.get_as("samples", to_size)) c.samples = *v;
        if (auto v = r.get_as("checkpoints", [](const std::string& s) {
                std::vector<std::uint64_t> out;
                for (const auto& x : split_list(s)) out.push_back(to_u64(x));
                return out;
            })) {
            c.checkpoints = *v;
        }
        if (auto v = r.get_as("n_max", to_u64)) c.n_max = *v;
        if (auto v = r.get_as("k_min", to_size)) c.k_min = *v;
        if (auto v = r.get_as("k_max", to_size)) c.k_max = *v;
        if (auto v = r.get_as("cross_check_samples", to_size)) c.cross_check_samples = *v;
        r.finish();
        cfg.simulate = c;
    }
    if (SectionReader r(doc, "build_theta", seen); r.present()) {
        BuildThetaConfig c;
        if (auto v = r.get_as("k", to_size)) c.k = *v;
        r.finish();
        cfg.build_theta = c;
    }
    for (const auto& [name, entries] : doc.sections) {
        if (!seen.count(name)) {
            std::string where = entries.empty() ? "" : " (line " + std::to_string(entries.begin()->second.second) + ")";
            throw ConfigError("unknown section [" + name + "]" + where);
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    write_theta(out, theta, "theta");
    write_phi(out, phi, "phi");
    out << "[run]\nseed = " << run.seed << "\nprecision_bits = " << run.precision_bits << "\ncap_k = " << run.cap_k
        << "\ncap_arcs = " << run.cap_arcs << "\nthreads = " << run.threads << "\n";
    if (cf) out << "\n[cf]\nk_max = " << cf->k_max << "\n";
    if (criterion) {
        out << "\n[criterion]\nk_max = " << criterion->k_max << "\nseries = "
            << join<std::string>(criterion->series, [](const std::string& s) { return s; })
            << "\nd = " << rational_str(criterion->d) << "\n";
    }
    if (measure) {
        out << "\n[measure]\n";
        if (measure->k_min) out << "k_min = " << *measure->k_min << "\n";
        out << "k_max = " << measure->k_max << "\npairs = " << measure->pairs << "\n";
        if (!measure->dk_k.empty()) {
            out << "dk_k = "
                << join<std::size_t>(measure->dk_k, [](const std::size_t& k) { return std::to_string(k); }) << "\n";
        }
        out << "dk_arcs = " << measure->dk_arcs << "\nexport_sets = " << (measure->export_sets ? "true" : "false")
            << "\n";
    }
    if (simulate) {
        out << "\n[simulate]\nmode = " << simulate->mode << "\nsamples = " << simulate->samples
            << "\ncheckpoints = " << join<std::uint64_t>(simulate->checkpoints, u64_str)
            << "\nn_max = " << simulate->n_max << "\nk_min = " << simulate->k_min << "\nk_max = " << simulate->k_max
            << "\ncross_check_samples = " << simulate->cross_check_samples << "\n";
    }
    if (build_theta) out << "\n[build_theta]\nk = " << build_theta->k << "\n";
    return out.str();
}

}  // namespace rotlab
