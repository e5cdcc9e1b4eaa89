#include "specgraph/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "specgraph/errors.hpp"
#include "specgraph/standing_wave.hpp"

namespace specgraph {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    auto b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

using KvMap = std::map<std::string, std::string>;  // "section.key" -> value

KvMap parse_kv(const std::string& text) {
    KvMap kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("bad section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        kv[section.empty() ? key : section + "." + key] = val;
    }
    return kv;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(item, key));
    }
    return out;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

struct Reader {
    const KvMap& kv;
    double num(const std::string& key, double dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : to_double(it->second, key);
    }
    int integer(const std::string& key, int dflt) const {
        return static_cast<int>(num(key, dflt));
    }
    bool boolean(const std::string& key, bool dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : to_bool(it->second, key);
    }
    std::string str(const std::string& key, const std::string& dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second;
    }
    bool has(const std::string& key) const { return kv.count(key) > 0; }
};

}  // namespace

void Scenario::validate() const {
    if (kind == Kind::StarWave) {
        if (center_slopes.empty())
            throw ConfigError("star_wave scenario needs center_slopes");
        if (!(p > 0.0)) throw ConfigError("nonlinearity exponent must be positive");
    } else {
        if (!(length > 0.0)) throw ConfigError("interval scenarios need a positive length");
    }
    if (n_lambda < 2 || n_t < 2) throw ConfigError("window resolutions must be >= 2");
    if (!(t_min > 0.0) || !(t_max > t_min))
        throw ConfigError("window t-range must satisfy 0 < t_min < t_max");
    if (lambda_max != 0.0 && !(lambda_max > lambda_min))
        throw ConfigError("window lambda-range is empty");
    if (!std::isfinite(lambda_min) || !std::isfinite(lambda_max) ||
        !std::isfinite(t_min) || !std::isfinite(t_max))
        throw ConfigError("window bounds must be finite");
}

Scenario scenario_from_string(const std::string& text) {
    KvMap kv = parse_kv(text);
    Reader r{kv};
    Scenario s;
    std::string kind = r.str("scenario.kind", "star_wave");
    if (kind == "star_wave")
        s.kind = Scenario::Kind::StarWave;
    else if (kind == "interval_rotating")
        s.kind = Scenario::Kind::IntervalRotating;
    else if (kind == "interval_wave")
        s.kind = Scenario::Kind::IntervalWave;
    else
        throw ConfigError("unknown scenario kind: " + kind);

    s.name = r.str("scenario.name", "custom");
    s.beta = r.num("scenario.beta", s.beta);
    s.p = r.num("scenario.p", s.p);
    s.alpha = r.num("scenario.alpha", s.alpha);
    s.center_value = r.num("scenario.center_value", s.center_value);
    if (r.has("scenario.center_slopes"))
        s.center_slopes = to_list(kv.at("scenario.center_slopes"), "center_slopes");
    s.length = r.num("scenario.length", s.length);
    s.rotate_left = r.boolean("scenario.rotate_left", s.rotate_left);
    s.rotate_right = r.boolean("scenario.rotate_right", s.rotate_right);
    if (r.has("scenario.amplitude"))
        s.amplitude = r.num("scenario.amplitude", 0.0);

    s.lambda_min = r.num("window.lambda_min", s.lambda_min);
    s.lambda_max = r.num("window.lambda_max", s.lambda_max);
    s.t_min = r.num("window.t_min", s.t_min);
    s.t_max = r.num("window.t_max", s.t_max);
    s.n_lambda = r.integer("window.n_lambda", s.n_lambda);
    s.n_t = r.integer("window.n_t", s.n_t);

    s.index.eps0 = r.num("index.eps0", s.index.eps0);
    s.index.corner_delta = r.num("index.corner_delta", s.index.corner_delta);
    s.index.lambda_eps_frac = r.num("index.lambda_eps_frac", s.index.lambda_eps_frac);
    s.index.scan_resolution = r.integer("index.scan_resolution", s.index.scan_resolution);
    s.index.gamma3_resolution =
        r.integer("index.gamma3_resolution", s.index.gamma3_resolution);
    s.index.concavity.delta = r.num("index.concavity_delta", s.index.concavity.delta);

    s.threads = r.integer("run.threads", s.threads);
    s.seed = static_cast<unsigned>(r.num("run.seed", s.seed));
    s.validate();
    return s;
}

Scenario scenario_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_string(ss.str());
}

const std::map<std::string, std::string>& preset_texts() {
    static const std::map<std::string, std::string> presets = {
        {"fig1_b5", R"(# 3-star standing wave, b = 5 (stable side)
[scenario]
name = fig1_b5
kind = star_wave
beta = -1.0
p = 3.0
alpha = 0.0
center_value = 1.0
# slopes (-a-b, -a-3, 2a+3+b) with a = 0.8660, b = 5
center_slopes = -5.8660, -3.8660, 9.7320
[window]
lambda_min = -8.0
lambda_max = 40.0
t_min = 0.02
t_max = 1.05
n_lambda = 160
n_t = 120
)"},
        {"fig1_b3", R"(# 3-star standing wave, b = 3
[scenario]
name = fig1_b3
kind = star_wave
beta = -1.0
p = 3.0
alpha = 0.0
center_value = 1.0
center_slopes = -3.8660, -3.8660, 7.7320
[window]
lambda_min = -8.0
lambda_max = 40.0
t_min = 0.02
t_max = 1.05
n_lambda = 160
n_t = 120
)"},
        {"fig1_b1", R"(# 3-star standing wave, b = 1 (unstable side)
[scenario]
name = fig1_b1
kind = star_wave
beta = -1.0
p = 3.0
alpha = 0.0
center_value = 1.0
center_slopes = -1.8660, -3.8660, 5.7320
[window]
lambda_min = -8.0
lambda_max = 40.0
t_min = 0.02
t_max = 1.05
n_lambda = 160
n_t = 120
)"},
        {"fig2_item1", R"(# free interval, rotating plane at x = l, F = G = 0
[scenario]
name = fig2_item1
kind = interval_rotating
length = 3.14159265358979323846
rotate_left = false
rotate_right = true
[window]
lambda_min = 0.0
lambda_max = 12.0
t_min = 0.05
t_max = 1.95
n_lambda = 160
n_t = 160
)"},
        {"fig2_item2", R"(# periodic arch on [0, T/2], p = 3, rotating plane at x = l
[scenario]
name = fig2_item2
kind = interval_wave
beta = -2.0
p = 3.0
length = 3.28418
rotate_left = false
rotate_right = true
[window]
lambda_min = 0.0
lambda_max = 12.0
t_min = 0.05
t_max = 1.95
n_lambda = 160
n_t = 160
)"},
        {"fig2_item3", R"(# periodic arch on [0, T/2], p = 1, rotating planes at both ends
[scenario]
name = fig2_item3
kind = interval_wave
beta = -2.0
p = 1.0
length = 1.09868
rotate_left = true
rotate_right = true
[window]
lambda_min = 0.0
lambda_max = 24.0
t_min = 0.05
t_max = 1.95
n_lambda = 160
n_t = 160
)"},
    };
    return presets;
}

Scenario preset_scenario(const std::string& name) {
    const auto& presets = preset_texts();
    auto it = presets.find(name);
    if (it == presets.end()) throw ConfigError("unknown preset: " + name);
    return scenario_from_string(it->second);
}

Problem build_problem(const Scenario& scenario) {
    scenario.validate();
    switch (scenario.kind) {
        case Scenario::Kind::StarWave: {
            WaveParams params;
            params.beta = scenario.beta;
            params.p = scenario.p;
            params.center_value = scenario.center_value;
            params.center_slopes = scenario.center_slopes;
            ProfileOptions popts;
            popts.extension_factor = std::max(1.25, scenario.t_max * 1.05);
            WaveProfile prof = integrate_profile(params, scenario.alpha, popts);
            return star_problem(std::move(prof), scenario.alpha);
        }
        case Scenario::Kind::IntervalRotating: {
            auto pot = std::make_shared<ConstantPotentials>(
                std::vector<double>{scenario.length}, 0.0, 0.0);
            return interval_problem(
                pot, scenario.rotate_left ? EndCondition::Rotating : EndCondition::Dirichlet,
                scenario.rotate_right ? EndCondition::Rotating : EndCondition::Dirichlet);
        }
        case Scenario::Kind::IntervalWave: {
            double amp = scenario.amplitude
                             ? *scenario.amplitude
                             : amplitude_for_half_period(scenario.beta, scenario.p,
                                                         scenario.length);
            double energy = 0.5 * scenario.beta * amp * amp +
                            std::pow(amp, 2.0 * scenario.p + 2.0) /
                                (2.0 * scenario.p + 2.0);
            WaveParams params;
            params.beta = scenario.beta;
            params.p = scenario.p;
            params.center_value = 0.0;
            params.center_slopes = {std::sqrt(2.0 * energy)};
            ProfileOptions popts;
            popts.extension_factor = std::max(1.25, scenario.t_max * 1.05);
            WaveProfile prof = integrate_profile(params, 0.0, popts);
            if (std::abs(prof.lengths[0] - scenario.length) > 1e-5 * scenario.length)
                throw ComputationError("arch half-period does not match the target length");
            return interval_problem(
                std::make_shared<WavePotentials>(std::move(prof)),
                scenario.rotate_left ? EndCondition::Rotating : EndCondition::Dirichlet,
                scenario.rotate_right ? EndCondition::Rotating : EndCondition::Dirichlet);
        }
    }
    throw ConfigError("unreachable scenario kind");
}

}  // namespace specgraph
