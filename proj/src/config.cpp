#include "blowfly/workbench.hpp"

#include "blowfly/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace blowfly {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model", {"length", "n_points", "a", "d", "r", "tau_hat", "tau", "p", "delta", "p_csv", "delta_csv"}},
        {"hopf", {"n_max", "n_steps", "r_cap"}},
        {"normalform", {"n_max"}},
        {"simulate", {"t_end", "dt", "history_factor", "snapshot_stride", "field_stride", "tail_fraction"}},
        {"average-dde", {"tau_check", "tau_check_factor", "history_factor", "t_end", "dt", "tail_fraction"}},
        {"sweep", {"r_list"}},
        {"output", {"dir"}},
    };
    return keys;
}

[[noreturn]] void config_error(const std::string& detail) { throw ConfigError("workbench-cli", "config", detail); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

// Drops a trailing "# ..." or "; ..." that sits outside quotes after whitespace.
std::string strip_inline_comment(const std::string& line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quote) {
            if (ch == quote) quote = 0;
        } else if (ch == '"' || ch == '\'') {
            quote = ch;
        } else if ((ch == '#' || ch == ';') && i > 0 && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
            return line.substr(0, i);
        }
    }
    return line;
}

void check_key(const std::string& full) {
    const auto dot = full.find('.');
    if (dot == std::string::npos) config_error("key '" + full + "' must have the form section.key");
    const auto section = full.substr(0, dot);
    const auto key = full.substr(dot + 1);
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) config_error("unknown section [" + section + "]");
    if (!it->second.count(key)) config_error("unknown key '" + key + "' in section [" + section + "]");
}

class Reader {
public:
    explicit Reader(const ConfigEntries& e) : entries_(e) {}

    std::optional<std::string> text(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<double> number(const std::string& key) const {
        const auto t = text(key);
        if (!t) return std::nullopt;
        try {
            std::size_t used = 0;
            const double v = std::stod(*t, &used);
            if (trim(std::string_view(*t).substr(used)).empty()) return v;
        } catch (const std::exception&) {
        }
        config_error(key + ": expected a number, got '" + *t + "'");
    }

    std::optional<int> integer(const std::string& key) const {
        const auto t = text(key);
        if (!t) return std::nullopt;
        try {
            std::size_t used = 0;
            const long v = std::stol(*t, &used);
            if (trim(std::string_view(*t).substr(used)).empty()) return static_cast<int>(v);
        } catch (const std::exception&) {
        }
        config_error(key + ": expected an integer, got '" + *t + "'");
    }

    std::vector<double> number_list(const std::string& key) const {
        std::vector<double> out;
        const auto t = text(key);
        if (!t) return out;
        std::string item;
        std::istringstream is(*t);
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                config_error(key + ": expected a comma-separated list of numbers, got '" + *t + "'");
            }
        }
        return out;
    }

private:
    const ConfigEntries& entries_;
};

ProfileSpec read_profile(const Reader& in, const std::string& name, const std::filesystem::path& base_dir) {
    const auto text = in.text("model." + name);
    const auto csv = in.text("model." + name + "_csv");
    if (text && csv) config_error("give either model." + name + " or model." + name + "_csv, not both");
    if (!text && !csv) config_error("missing coefficient model." + name + " (or model." + name + "_csv)");
    if (text) return parse_profile(*text);
    std::filesystem::path path(*csv);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return read_profile_csv(path);
}

void require(bool ok, const std::string& detail) {
    if (!ok) config_error(detail);
}

}  // namespace

std::string to_string(Task t) {
    switch (t) {
        case Task::Steady: return "steady";
        case Task::Hopf: return "hopf";
        case Task::NormalForm: return "normalform";
        case Task::Simulate: return "simulate";
        case Task::AverageDde: return "average-dde";
        case Task::Sweep: return "sweep";
        case Task::Reproduce: return "reproduce";
    }
    return "unknown";
}

Task parse_task(std::string_view name) {
    for (Task t : {Task::Steady, Task::Hopf, Task::NormalForm, Task::Simulate, Task::AverageDde, Task::Sweep,
                   Task::Reproduce}) {
        if (to_string(t) == name) return t;
    }
    config_error("unknown task '" + std::string(name) + "'");
}

ConfigEntries parse_config_text(std::string_view text) {
    ConfigEntries entries;
    std::string section;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        line = trim(strip_inline_comment(line));
        if (line.front() == '[') {
            if (line.back() != ']') config_error("line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!known_keys().count(section)) config_error("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_error("line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty()) config_error("line " + std::to_string(line_no) + ": key outside of any section");
        const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
        check_key(key);
        entries[key] = unquote(trim(std::string_view(line).substr(eq + 1)));
    }
    return entries;
}

ConfigEntries load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

void apply_override(ConfigEntries& entries, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) config_error("--set expects section.key=value, got '" + std::string(assignment) + "'");
    const std::string key = trim(assignment.substr(0, eq));
    check_key(key);
    entries[key] = unquote(trim(assignment.substr(eq + 1)));
}

RunConfig make_run_config(Task task, const ConfigEntries& entries, const std::filesystem::path& base_dir) {
    const Reader in(entries);
    RunConfig cfg;
    cfg.task = task;
    cfg.echo = entries;
    cfg.echo["task"] = to_string(task);

    cfg.length = in.number("model.length").value_or(cfg.length);
    cfg.n_points = in.integer("model.n_points").value_or(cfg.n_points);
    cfg.a = in.number("model.a").value_or(cfg.a);
    cfg.d = in.number("model.d");
    cfg.r = in.number("model.r");
    cfg.tau_hat = in.number("model.tau_hat");
    cfg.tau = in.number("model.tau");
    if (auto dir = in.text("output.dir")) cfg.out_dir = *dir;

    require(cfg.length > 0.0, "model.length must be positive");
    require(cfg.n_points >= 3, "model.n_points must be at least 3");
    require(cfg.a > 0.0, "model.a must be positive");
    require(!(cfg.d && cfg.r), "give exactly one of model.d and model.r");
    require(!(cfg.tau_hat && cfg.tau), "give exactly one of model.tau_hat and model.tau");
    if (cfg.d) require(*cfg.d > 0.0, "model.d must be positive");
    if (cfg.r) require(*cfg.r > 0.0, "model.r must be positive");
    if (cfg.tau_hat) require(*cfg.tau_hat >= 0.0, "model.tau_hat must be nonnegative");
    if (cfg.tau) require(*cfg.tau >= 0.0, "model.tau must be nonnegative");

    if (task == Task::Reproduce) return cfg;

    cfg.coeffs = CoefficientSpec{read_profile(in, "p", base_dir), read_profile(in, "delta", base_dir)};

    const bool needs_r = task != Task::Sweep && task != Task::AverageDde;
    if (needs_r) require(cfg.d || cfg.r, "give exactly one of model.d and model.r");
    if (task == Task::Simulate) require(cfg.tau_hat || cfg.tau, "simulate needs model.tau_hat or model.tau");

    cfg.n_steps = in.integer("hopf.n_steps").value_or(cfg.n_steps);
    cfg.r_cap = in.number("hopf.r_cap").value_or(cfg.r_cap);
    require(cfg.n_steps >= 1, "hopf.n_steps must be >= 1");
    require(cfg.r_cap > 0.0, "hopf.r_cap must be positive");
    cfg.n_max = in.integer(task == Task::NormalForm ? "normalform.n_max" : "hopf.n_max").value_or(0);
    require(cfg.n_max >= 0, "n_max must be >= 0");

    const std::string sim = task == Task::AverageDde ? "average-dde." : "simulate.";
    cfg.sim.t_end = in.number(sim + "t_end").value_or(cfg.sim.t_end);
    cfg.sim.dt = in.number(sim + "dt").value_or(cfg.sim.dt);
    cfg.history_factor = in.number(sim + "history_factor").value_or(cfg.history_factor);
    cfg.tail_fraction = in.number(sim + "tail_fraction").value_or(cfg.tail_fraction);
    cfg.sim.snapshot_stride = in.integer("simulate.snapshot_stride").value_or(0);
    cfg.field_stride = in.integer("simulate.field_stride").value_or(0);
    require(cfg.sim.t_end > 0.0, sim + "t_end must be positive");
    require(cfg.sim.dt > 0.0, sim + "dt must be positive");
    require(cfg.history_factor > 0.0, sim + "history_factor must be positive");
    require(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 0.5, sim + "tail_fraction must lie in (0, 0.5]");
    require(cfg.sim.snapshot_stride >= 0 && cfg.field_stride >= 0, "strides must be nonnegative");

    if (task == Task::AverageDde) {
        cfg.tau_check = in.number("average-dde.tau_check");
        cfg.tau_check_factor = in.number("average-dde.tau_check_factor");
        require(cfg.tau_check.has_value() != cfg.tau_check_factor.has_value(),
                "give exactly one of average-dde.tau_check and average-dde.tau_check_factor");
        if (cfg.tau_check) require(*cfg.tau_check >= 0.0, "average-dde.tau_check must be nonnegative");
        if (cfg.tau_check_factor) require(*cfg.tau_check_factor >= 0.0, "average-dde.tau_check_factor must be nonnegative");
    }

    if (task == Task::Sweep) {
        cfg.r_list = in.number_list("sweep.r_list");
        require(!cfg.r_list.empty(), "sweep.r_list is empty");
        for (std::size_t i = 0; i < cfg.r_list.size(); ++i) {
            require(cfg.r_list[i] > 0.0, "sweep.r_list entries must be positive");
            if (i > 0) require(cfg.r_list[i] < cfg.r_list[i - 1], "sweep.r_list must be sorted descending");
        }
    }
    return cfg;
}

ModelParams build_model(const RunConfig& cfg) {
    if (!cfg.coeffs) config_error("no coefficient specification");
    const Grid1D grid(cfg.length, cfg.n_points);
    const CoefficientField field = build_coefficients(*cfg.coeffs, grid);
    const double r = cfg.r ? *cfg.r : (cfg.d ? 1.0 / *cfg.d : 0.0);
    double tau = 0.0;
    if (cfg.tau) {
        tau = *cfg.tau;
    } else if (cfg.tau_hat) {
        if (!(r > 0.0)) config_error("model.tau_hat needs model.d or model.r");
        tau = *cfg.tau_hat / r;
    }
    return ModelParams{r, cfg.a, tau, grid, field};
}

}  // namespace blowfly
