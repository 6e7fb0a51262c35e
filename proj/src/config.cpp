#include "ipid/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ipid {

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Fields {
public:
    explicit Fields(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(std::size_t line, const std::string& key, const std::string& msg) const {
        std::ostringstream out;
        out << source_;
        if (line > 0) out << ':' << line;
        out << ": field '" << key << "': " << msg;
        throw Error(ErrorKind::Parse, out.str());
    }

    void add(const std::string& key, std::string value, std::size_t line) {
        if (const auto it = entries_.find(key); it != entries_.end())
            fail(line, key, "repeated (first set on line " + std::to_string(it->second.line) + ")");
        entries_[key] = {std::move(value), line};
    }

    const Entry* find(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t line_of(const std::string& key) const {
        const Entry* e = find(key);
        return e ? e->line : 0;
    }

    const Entry& need(const std::string& key) const {
        const Entry* e = find(key);
        if (!e) fail(0, key, "missing required field");
        return *e;
    }

    double number(const std::string& key, const std::string& token, std::size_t line) const {
        double v = 0.0;
        const char* first = token.data();
        const char* last = first + token.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v))
            fail(line, key, "expected a number, got '" + token + "'");
        return v;
    }

    std::vector<double> list(const std::string& key) const {
        const Entry& e = need(key);
        std::string text = e.value;
        for (char& c : text)
            if (c == ',') c = ' ';
        std::istringstream in(text);
        std::vector<double> out;
        std::string token;
        while (in >> token) out.push_back(number(key, token, e.line));
        if (out.empty()) fail(e.line, key, "empty list");
        return out;
    }

    double scalar(const std::string& key) const {
        const Entry& e = need(key);
        return number(key, e.value, e.line);
    }

    std::uint64_t count(const std::string& key) const {
        const Entry& e = need(key);
        std::uint64_t v = 0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            fail(e.line, key, "expected a non-negative integer, got '" + e.value + "'");
        return v;
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
};

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "name",   "label",      "period",      "pre_mean",   "pre_var",          "post_mean",
        "post_var", "rho",      "lambda",      "delay",      "grid",             "tol",
        "max_cycles", "paths",  "horizon",     "seed",       "alignment",        "output_dir",
        "thresholds", "sweep_grid", "alphas", "published_single", "published_optimal"};
    return keys;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    Fields fields(source);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream out;
            out << source << ':' << line_no << ": expected 'key = value', got '" << line << "'";
            throw Error(ErrorKind::Parse, out.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            fields.fail(line_no, key, "unknown field");
        if (value.empty()) fields.fail(line_no, key, "empty value");
        fields.add(key, value, line_no);
    }

    ExperimentConfig c;
    auto has = [&](const char* key) { return fields.find(key) != nullptr; };
    auto check = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) fields.fail(fields.line_of(key), key, msg);
    };

    if (has("name")) c.name = fields.find("name")->value;
    if (has("label")) c.label = fields.find("label")->value;

    c.period = fields.count("period");
    check(c.period >= 1, "period", "must be >= 1");
    const std::size_t T = c.period;

    auto sized = [&](const std::string& key, std::vector<double> v) {
        check(v.size() == T, key,
              "expected " + std::to_string(T) + " values (one per stage), got " +
                  std::to_string(v.size()));
        return v;
    };
    c.pre_mean = sized("pre_mean", fields.list("pre_mean"));
    c.post_mean = sized("post_mean", fields.list("post_mean"));
    c.pre_var = has("pre_var") ? sized("pre_var", fields.list("pre_var")) : std::vector<double>(T, 1.0);
    c.post_var =
        has("post_var") ? sized("post_var", fields.list("post_var")) : std::vector<double>(T, 1.0);
    for (const char* key : {"pre_var", "post_var"}) {
        const auto& v = std::string(key) == "pre_var" ? c.pre_var : c.post_var;
        for (double x : v) check(x > 0.0, key, "variances must be > 0");
    }

    if (has("rho")) c.rho = fields.scalar("rho");
    check(c.rho > 0.0 && c.rho < 1.0, "rho", "must lie in (0, 1)");

    c.lambda = sized("lambda", fields.list("lambda"));
    for (double x : c.lambda) check(x > 0.0, "lambda", "false-alarm penalties must be > 0");
    c.delay = sized("delay", fields.list("delay"));
    for (double x : c.delay) check(x >= 0.0, "delay", "delay penalties must be >= 0");

    if (has("grid")) c.grid = fields.count("grid");
    check(c.grid >= 2, "grid", "must be >= 2");
    if (has("tol")) c.tol = fields.scalar("tol");
    check(c.tol > 0.0, "tol", "must be > 0");
    if (has("max_cycles")) c.max_cycles = fields.count("max_cycles");
    check(c.max_cycles >= 1, "max_cycles", "must be >= 1");

    if (has("paths")) c.paths = fields.count("paths");
    check(c.paths >= 1, "paths", "must be >= 1");
    if (has("horizon")) c.horizon = static_cast<std::int64_t>(fields.count("horizon"));
    if (has("seed")) c.seed = fields.count("seed");
    if (has("alignment")) {
        try {
            c.alignment = parse_alignment(fields.find("alignment")->value);
        } catch (const Error& e) {
            fields.fail(fields.line_of("alignment"), "alignment", e.what());
        }
    }
    if (has("output_dir")) c.output_dir = fields.find("output_dir")->value;

    if (has("thresholds")) {
        c.thresholds = fields.list("thresholds");
        check(c.thresholds->size() == 1 || c.thresholds->size() == T, "thresholds",
              "expected 1 or " + std::to_string(T) + " values");
        for (double a : *c.thresholds)
            check(a >= 0.0 && a <= 1.0, "thresholds", "thresholds must lie in [0, 1]");
    }
    if (has("sweep_grid")) {
        c.sweep_grid = fields.list("sweep_grid");
        for (double a : *c.sweep_grid)
            check(a >= 0.0 && a <= 1.0, "sweep_grid", "thresholds must lie in [0, 1]");
    }
    if (has("alphas")) {
        c.alphas = fields.list("alphas");
        for (double a : c.alphas) check(a > 0.0 && a < 1.0, "alphas", "alphas must lie in (0, 1)");
    }
    if (has("published_single")) c.published_single = fields.scalar("published_single");
    if (has("published_optimal")) c.published_optimal = fields.scalar("published_optimal");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, path + ": cannot open config file");
    return parse_config(in, path);
}

IpidScenario ExperimentConfig::scenario() const {
    return IpidScenario::gaussian(pre_mean, pre_var, post_mean, post_var);
}

DetectionCostSpec ExperimentConfig::costs() const { return DetectionCostSpec{lambda, delay, rho}; }

DetectionSolveOptions ExperimentConfig::solve_options() const {
    DetectionSolveOptions o;
    o.grid_points = grid;
    o.tol = tol;
    o.max_cycles = max_cycles;
    return o;
}

SimulationOptions ExperimentConfig::simulation_options() const {
    SimulationOptions o;
    o.paths = paths;
    o.horizon = horizon;
    o.seed = seed;
    o.alignment = alignment;
    return o;
}

}  // namespace ipid
