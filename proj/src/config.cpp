#include "clockforge/config.hpp"

#include "clockforge/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace clockforge {

bool ScenarioConfig::wants(std::string_view output) const {
    return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

double parse_real(std::string_view text, int line, std::string_view key) {
    double value = 0.0;
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("'{}': expected a real number, got '{}'", key, text), line);
    }
    return value;
}

std::uint64_t parse_unsigned(std::string_view text, int line, std::string_view key) {
    std::uint64_t value = 0;
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("'{}': expected a non-negative integer, got '{}'", key, text),
                          line);
    }
    return value;
}

Component parse_component(std::string_view text, int line) {
    if (text == "phase") {
        return Component::phase;
    }
    if (text == "frequency") {
        return Component::frequency;
    }
    if (text == "drift") {
        return Component::drift;
    }
    throw ConfigError(
        fmt::format("'component': expected phase, frequency or drift, got '{}'", text), line);
}

struct Entry {
    std::string value;
    int line = 0;
};

// One [section] occurrence with its key/value pairs.
struct Block {
    std::string name;
    int line = 0;
    std::map<std::string, Entry, std::less<>> entries;

    [[nodiscard]] const Entry *find(std::string_view key) const {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const Entry &require(std::string_view key) const {
        const Entry *e = find(key);
        if (e == nullptr) {
            throw ConfigError(fmt::format("[{}] is missing required key '{}'", name, key), line);
        }
        return *e;
    }

    [[nodiscard]] double real(std::string_view key) const {
        const Entry &e = require(key);
        return parse_real(e.value, e.line, key);
    }

    void real_or(std::string_view key, double &target) const {
        if (const Entry *e = find(key)) {
            target = parse_real(e->value, e->line, key);
        }
    }

    void allow_only(std::initializer_list<std::string_view> keys) const {
        for (const auto &[k, e] : entries) {
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
                throw ConfigError(fmt::format("[{}] has unknown key '{}'", name, k), e.line);
            }
        }
    }
};

std::vector<Block> tokenize(std::string_view text) {
    std::vector<Block> blocks;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(fmt::format("malformed section header '{}'", line), line_no);
            }
            blocks.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("expected 'key = value', got '{}'", line), line_no);
        }
        if (blocks.empty()) {
            throw ConfigError("key/value pair before any [section]", line_no);
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("empty key", line_no);
        }
        auto &block = blocks.back();
        if (!block.entries.emplace(key, Entry{value, line_no}).second) {
            throw ConfigError(fmt::format("duplicate key '{}' in [{}]", key, block.name), line_no);
        }
    }
    return blocks;
}

} // namespace

std::vector<double> parse_real_list(std::string_view text, int line) {
    std::vector<double> values;
    for (auto part : split(text, ',')) {
        values.push_back(parse_real(part, line, "list"));
    }
    return values;
}

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig cfg;
    std::set<std::string, std::less<>> seen;
    bool have_grid = false;
    std::array<std::optional<double>, 3> burst;

    for (const Block &b : tokenize(text)) {
        const bool singleton =
            b.name == "params" || b.name == "init" || b.name == "grid" || b.name == "run";
        if (singleton && !seen.insert(b.name).second) {
            throw ConfigError(fmt::format("section [{}] appears more than once", b.name), b.line);
        }

        if (b.name == "params") {
            b.allow_only({"mu1", "mu2", "mu3", "sigma1", "sigma2", "sigma3", "sigma1p", "sigma2p",
                          "sigma3p"});
            b.real_or("mu1", cfg.params.mu1);
            b.real_or("mu2", cfg.params.mu2);
            b.real_or("mu3", cfg.params.mu3);
            b.real_or("sigma1", cfg.params.sigma.sigma1);
            b.real_or("sigma2", cfg.params.sigma.sigma2);
            b.real_or("sigma3", cfg.params.sigma.sigma3);
            static constexpr std::array<std::string_view, 3> kBurst{"sigma1p", "sigma2p",
                                                                    "sigma3p"};
            for (std::size_t i = 0; i < 3; ++i) {
                if (const Entry *e = b.find(kBurst[i])) {
                    burst[i] = parse_real(e->value, e->line, kBurst[i]);
                }
            }
        } else if (b.name == "init") {
            b.allow_only({"c1", "c2", "c3"});
            b.real_or("c1", cfg.init.c1);
            b.real_or("c2", cfg.init.c2);
            b.real_or("c3", cfg.init.c3);
        } else if (b.name == "grid") {
            b.allow_only({"tau", "n_steps", "horizon"});
            cfg.grid.tau = b.real("tau");
            if (!(cfg.grid.tau > 0.0)) {
                throw ConfigError(fmt::format("'tau' must be > 0, got {}", cfg.grid.tau),
                                  b.require("tau").line);
            }
            const Entry *steps = b.find("n_steps");
            const Entry *horizon = b.find("horizon");
            if ((steps == nullptr) == (horizon == nullptr)) {
                throw ConfigError("[grid] needs exactly one of 'n_steps' or 'horizon'", b.line);
            }
            if (steps != nullptr) {
                cfg.grid.n_steps = parse_unsigned(steps->value, steps->line, "n_steps");
            } else {
                const double h = parse_real(horizon->value, horizon->line, "horizon");
                const double k = std::round(h / cfg.grid.tau);
                if (!(h > 0.0) || std::abs(h - k * cfg.grid.tau) > 1e-9 * cfg.grid.tau) {
                    throw ConfigError(
                        fmt::format("'horizon' {} is not a positive multiple of tau {}", h,
                                    cfg.grid.tau),
                        horizon->line);
                }
                cfg.grid.n_steps = static_cast<std::size_t>(k);
            }
            if (cfg.grid.n_steps < 1) {
                throw ConfigError("grid needs at least one step", b.line);
            }
            have_grid = true;
        } else if (b.name == "run") {
            b.allow_only({"n_paths", "seed", "outputs", "t", "level", "taus"});
            if (const Entry *e = b.find("n_paths")) {
                cfg.n_paths = parse_unsigned(e->value, e->line, "n_paths");
                if (cfg.n_paths < 1) {
                    throw ConfigError("'n_paths' must be >= 1", e->line);
                }
            }
            if (const Entry *e = b.find("seed")) {
                cfg.seed = parse_unsigned(e->value, e->line, "seed");
            }
            if (const Entry *e = b.find("outputs")) {
                for (auto part : split(e->value, ',')) {
                    if (part != "paths" && part != "moments" && part != "density") {
                        throw ConfigError(
                            fmt::format("unknown output '{}' (expected paths, moments, density)",
                                        part),
                            e->line);
                    }
                    cfg.outputs.emplace_back(part);
                }
            }
            if (const Entry *e = b.find("t")) {
                cfg.predict_epochs = parse_real_list(e->value, e->line);
            }
            b.real_or("level", cfg.level);
            if (const Entry *e = b.find("taus")) {
                cfg.allan_taus = parse_real_list(e->value, e->line);
            }
        } else if (b.name == "jump") {
            b.allow_only({"component", "amplitude", "theta"});
            const Entry &c = b.require("component");
            cfg.schedule.instant_jumps.push_back(
                {parse_component(c.value, c.line), b.real("amplitude"), b.real("theta")});
        } else if (b.name == "paired_jump") {
            b.allow_only({"a", "theta0", "theta1"});
            cfg.schedule.paired_jumps.push_back({b.real("a"), b.real("theta0"), b.real("theta1")});
        } else if (b.name == "variance_window") {
            b.allow_only({"theta0", "theta1"});
            cfg.schedule.variance_windows.push_back({b.real("theta0"), b.real("theta1")});
        } else {
            throw ConfigError(fmt::format("unknown section [{}]", b.name), b.line);
        }
    }

    if (!have_grid) {
        throw ConfigError("missing required section [grid]");
    }
    const auto n_burst = std::count_if(burst.begin(), burst.end(),
                                       [](const auto &v) { return v.has_value(); });
    if (n_burst != 0 && n_burst != 3) {
        throw ConfigError("burst sigmas must be given together: sigma1p, sigma2p, sigma3p");
    }
    if (n_burst == 3) {
        cfg.params.burst = Diffusion{*burst[0], *burst[1], *burst[2]};
    }
    if (cfg.outputs.empty()) {
        cfg.outputs = {"paths", "moments"};
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError &e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void validate_config(const ScenarioConfig &config) {
    config.grid.check();
    if (config.n_paths < 1) {
        throw DomainError("n_paths must be >= 1");
    }
    check_scenario(config.params, config.schedule);
    (void)validate_schedule(config.schedule, config.grid);
}

} // namespace clockforge
