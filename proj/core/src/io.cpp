#include "nqlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nqlab/errors.hpp"

namespace nqlab::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\r\n";
}

namespace {

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": invalid JSON: " + e.what());
    }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
    if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": bad field '" + key + "': " + e.what());
    }
}

Grid grid_from(const json& j, const char* what) {
    const json g = field<json>(j, "grid", what);
    return Grid(field<double>(g, "L", what), field<int>(g, "M", what));
}

json grid_json(const Grid& g) { return {{"L", g.L}, {"M", g.M}, {"dx", g.dx()}}; }

}  // namespace

std::string spectrum_json(const Spectrum& s) {
    json j = {{"kind", to_string(s.kind)}, {"N_b", s.N_b},       {"U0", s.U0},
              {"energies", s.energies},    {"labels", s.labels}, {"holes", s.holes}};
    return j.dump(2) + "\n";
}

Spectrum spectrum_from_json(const std::string& text) {
    const json j = parse_json(text, "spectrum");
    Spectrum s;
    s.kind = sequence_kind_from_string(field<std::string>(j, "kind", "spectrum"));
    s.U0 = field<double>(j, "U0", "spectrum");
    s.energies = field<std::vector<double>>(j, "energies", "spectrum");
    s.N_b = j.contains("N_b") ? j["N_b"].get<int>() : static_cast<int>(s.energies.size());
    if (j.contains("labels")) s.labels = j["labels"].get<std::vector<long>>();
    if (j.contains("holes")) s.holes = j["holes"].get<std::vector<int>>();
    if (s.labels.empty())
        for (std::size_t i = 0; i < s.energies.size(); ++i) s.labels.push_back(static_cast<long>(i) + 1);
    if (s.labels.size() != s.energies.size()) throw ConfigError("spectrum: labels and energies differ in length");
    for (std::size_t i = 1; i < s.energies.size(); ++i)
        if (!(s.energies[i] > s.energies[i - 1])) throw ConfigError("spectrum: energies must be strictly ascending");
    return s;
}

std::string potential_json(const Potential& p) {
    json j = {{"grid", grid_json(p.grid)}, {"threshold", p.threshold}, {"values", p.values}};
    return j.dump() + "\n";
}

Potential potential_from_json(const std::string& text) {
    const json j = parse_json(text, "potential");
    Potential p;
    p.grid = grid_from(j, "potential");
    p.threshold = field<double>(j, "threshold", "potential");
    p.values = field<std::vector<double>>(j, "values", "potential");
    if (static_cast<int>(p.values.size()) != p.grid.M) throw ConfigError("potential: value count differs from M");
    return p;
}

std::string potential_csv(const Potential& p) {
    std::string out = csv_row({"x", "U"});
    for (int i = 0; i < p.grid.M; ++i) out += csv_row({format_double(p.grid.x(i)), format_double(p.values[i])});
    return out;
}

std::string basis_json(const EigenBasis& b) {
    json states = json::array();
    for (int n = 0; n < b.size(); ++n) {
        const auto col = b.state(n);
        states.push_back(std::vector<double>(col.data(), col.data() + col.size()));
    }
    json j = {{"grid", grid_json(b.grid)}, {"count", b.count}, {"energies", b.energies}, {"states", states}};
    return j.dump() + "\n";
}

EigenBasis basis_from_json(const std::string& text) {
    const json j = parse_json(text, "basis");
    EigenBasis b;
    b.grid = grid_from(j, "basis");
    b.count = field<int>(j, "count", "basis");
    b.energies = field<std::vector<double>>(j, "energies", "basis");
    const auto states = field<std::vector<std::vector<double>>>(j, "states", "basis");
    if (states.size() != b.energies.size()) throw ConfigError("basis: state count differs from energies");
    b.wavefunctions.resize(b.grid.M, static_cast<Eigen::Index>(states.size()));
    for (std::size_t n = 0; n < states.size(); ++n) {
        if (static_cast<int>(states[n].size()) != b.grid.M) throw ConfigError("basis: state length differs from M");
        for (int i = 0; i < b.grid.M; ++i) b.wavefunctions(i, static_cast<Eigen::Index>(n)) = states[n][i];
    }
    return b;
}

std::string basis_csv(const EigenBasis& b, int states) {
    states = std::min(states, b.size());
    std::vector<std::string> head{"x"};
    for (int n = 0; n < states; ++n) head.push_back("psi_" + std::to_string(n));
    std::string out = csv_row(head);
    for (int i = 0; i < b.grid.M; ++i) {
        std::vector<std::string> row{format_double(b.grid.x(i))};
        for (int n = 0; n < states; ++n) row.push_back(format_double(b.wavefunctions(i, n)));
        out += csv_row(row);
    }
    return out;
}

std::string synthesis_report_json(const SynthesisReport& r) {
    json j = {{"iterations", r.iterations},         {"initial_residual", r.initial_residual},
              {"final_residual", r.final_residual}, {"converged", r.converged},
              {"bound_count", r.bound_count},       {"threshold", r.threshold},
              {"residual_history", r.residual_history}, {"message", r.message}};
    return j.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& tr, const std::vector<std::string>& names) {
    if (names.size() != tr.tracked.size()) throw DomainError("trajectory_csv: one name per tracked state");
    std::vector<std::string> head{"t", "E", "norm", "cascade_fraction", "bound_population"};
    for (const auto& n : names) head.push_back("P_" + n);
    std::string out = csv_row(head);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        std::vector<std::string> row{format_double(tr.times[k]), format_double(tr.energy[k]), format_double(tr.norm[k]),
                                     format_double(tr.cascade_fraction[k]), format_double(tr.bound_population[k])};
        for (std::size_t j = 0; j < names.size(); ++j)
            row.push_back(format_double(tr.populations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j))));
        out += csv_row(row);
    }
    return out;
}

std::string pulse_csv(const ControlPulse& p) {
    std::string out = csv_row({"t", "b"});
    for (int k = 0; k < p.n_steps; ++k) out += csv_row({format_double(k * p.dt), format_double(p.values[k])});
    return out;
}

ControlPulse pulse_from_csv(const std::string& text, DriveForm form, double beta) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> t, b;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line == "t,b") continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("pulse: expected 't,b' rows");
        try {
            t.push_back(std::stod(line.substr(0, comma)));
            b.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError("pulse: unreadable row '" + line + "'");
        }
    }
    if (t.size() < 2) throw ConfigError("pulse: need at least two samples");
    ControlPulse p;
    p.n_steps = static_cast<int>(b.size());
    p.dt = t[1] - t[0];
    p.values = b;
    p.form = form;
    p.beta = beta;
    for (std::size_t k = 1; k < t.size(); ++k)
        if (std::abs(t[k] - t[0] - k * p.dt) > 1e-9 * (1.0 + std::abs(t[k])))
            throw ConfigError("pulse: samples must be uniformly spaced");
    p.validate();
    return p;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (c.values_.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
        c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) { return parse(read_file(path)); }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("config: '" + key + "' is not a number");
    return v;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    int v = 0;
    const auto& s = it->second;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("config: '" + key + "' is not an integer");
    return v;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
    std::string s = get_string(key);
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        double v = 0.0;
        auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || end != tok.data() + tok.size())
            throw ConfigError("config: '" + key + "' has a non-numeric entry '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

void KeyValueConfig::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("config: unknown key '" + k + "'");
}

SynthesisOptions synthesis_options_from(const KeyValueConfig& cfg, SynthesisOptions base) {
    cfg.require_known({"tolerance", "max_iters", "regularization", "init"});
    base.tolerance = cfg.get_double("tolerance", base.tolerance);
    base.max_iters = cfg.get_int("max_iters", base.max_iters);
    base.regularization = cfg.get_double("regularization", base.regularization);
    const auto init = cfg.get_string("init", base.init == SynthesisOptions::Init::Darboux ? "darboux" : "classical");
    if (init == "darboux") base.init = SynthesisOptions::Init::Darboux;
    else if (init == "classical") base.init = SynthesisOptions::Init::Classical;
    else throw ConfigError("config: init must be 'darboux' or 'classical'");
    if (!(base.tolerance > 0) || base.max_iters < 0 || base.regularization < 0)
        throw ConfigError("config: synthesis options out of range");
    return base;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace nqlab::io
