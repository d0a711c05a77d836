#include "iadas/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace iadas {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"constraint_mode", "channel_model", "snr_db", "trials", "seed", "output", "threads"}},
        {"shape", {"users", "tx_antennas", "rx_antennas", "streams", "rrus"}},
        {"power", {"total_power_dbm", "noise_power_dbm"}},
        {"geometry",
         {"cell_radius_m", "pathloss_exponent", "reference_loss_db", "shadow_std_db", "min_distance_m",
          "distance_bins_m", "grid_step_m", "colocated_per_antenna_constraints"}},
        {"solver", {"tol", "max_iters", "tie_break"}},
        {"backoff", {"exponent_variant", "chi_square_convention"}},
        {"properness", {"users", "tx_antennas", "rx_antennas", "streams", "rrus"}},
    };
    return keys;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    boost::split(parts, value, boost::is_any_of(","));
    std::vector<std::string> out;
    for (auto& p : parts) {
        boost::trim(p);
        if (!p.empty()) out.push_back(p);
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
    }
}

long long to_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': expected an integer, got '" + text + "'");
    }
}

int to_int(const std::string& key, const std::string& text) {
    const long long v = to_integer(key, text);
    if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw ConfigError("'" + key + "': value out of range");
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, std::string text) {
    boost::to_lower(text);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("'" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
    return out;
}

/// Comma list of integers or inclusive ranges "a-b".
std::vector<int> to_int_list(const std::string& key, const std::string& text, bool allow_per_antenna = false) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) {
        if (allow_per_antenna && item == "per_antenna") {
            out.push_back(0);
            continue;
        }
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const int lo = to_int(key, item.substr(0, dash));
            const int hi = to_int(key, item.substr(dash + 1));
            if (hi < lo) throw ConfigError("'" + key + "': empty range '" + item + "'");
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(to_int(key, item));
        }
    }
    return out;
}

PowerMode to_power_mode(const std::string& text) {
    if (text == "unconstrained") return PowerMode::unconstrained;
    if (text == "max_power_backoff") return PowerMode::max_power_backoff;
    if (text == "strict_per_rru") return PowerMode::strict_per_rru;
    throw ConfigError("unknown constraint_mode '" + text + "'");
}

}  // namespace

const char* to_string(PowerMode m) {
    switch (m) {
        case PowerMode::unconstrained: return "unconstrained";
        case PowerMode::max_power_backoff: return "max_power_backoff";
        case PowerMode::strict_per_rru: return "strict_per_rru";
    }
    return "?";
}

const char* to_string(ChannelModel m) { return m == ChannelModel::rayleigh ? "rayleigh" : "das"; }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void ExperimentConfig::validate() const {
    try {
        shape.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (modes.empty()) throw ConfigError("at least one constraint_mode is required");
    if (snr_grid_db.empty()) throw ConfigError("snr grid must be non-empty");
    if (!(solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
    if (solver.max_iters < 0) throw ConfigError("solver.max_iters must be >= 0");
    if (channel_model == ChannelModel::das) {
        if (shape.users != kClusterCells) throw ConfigError("das experiments need users = 7");
        if (shape.rrus != 5) throw ConfigError("das experiments need rrus = 5 (centre + four remote units)");
        if (!(geometry.cell_radius > 0.0)) throw ConfigError("cell_radius_m must be positive");
        if (geometry.distance_bins_m.size() < 2) throw ConfigError("distance_bins_m needs at least two edges");
        for (std::size_t i = 1; i < geometry.distance_bins_m.size(); ++i)
            if (!(geometry.distance_bins_m[i] > geometry.distance_bins_m[i - 1]))
                throw ConfigError("distance_bins_m must be strictly increasing");
        if (geometry.distance_bins_m.front() < 0.0) throw ConfigError("distance bins must be non-negative");
        if (geometry.distance_bins_m[geometry.distance_bins_m.size() - 2] >= geometry.cell_radius)
            throw ConfigError("every distance bin must start inside the cell");
        if (!(geometry.grid_step_m > 0.0)) throw ConfigError("grid_step_m must be positive");
        if (geometry.propagation.shadow_std_db < 0.0) throw ConfigError("shadow_std_db must be >= 0");
        if (!(geometry.propagation.min_distance_m > 0.0)) throw ConfigError("min_distance_m must be positive");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    ExperimentConfig cfg;
    bool tol_given = false;
    const auto& allowed = allowed_keys();
    for (const auto& [section, body] : tree) {
        const auto sec = allowed.find(section);
        if (sec == allowed.end()) throw ConfigError("unknown config section [" + section + "]");
        if (body.empty() && !body.data().empty())
            throw ConfigError("top-level key '" + section + "' outside any section");
        for (const auto& [key, node] : body) {
            if (!sec->second.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            const std::string value = boost::trim_copy(node.data());
            const std::string name = section + "." + key;

            if (section == "experiment") {
                if (key == "constraint_mode") {
                    cfg.modes.clear();
                    for (const auto& m : split_list(value)) cfg.modes.push_back(to_power_mode(m));
                } else if (key == "channel_model") {
                    if (value == "rayleigh") cfg.channel_model = ChannelModel::rayleigh;
                    else if (value == "das") cfg.channel_model = ChannelModel::das;
                    else throw ConfigError("unknown channel_model '" + value + "'");
                } else if (key == "snr_db") {
                    cfg.snr_grid_db = to_double_list(name, value);
                } else if (key == "trials") {
                    cfg.trials = to_int(name, value);
                } else if (key == "seed") {
                    const long long s = to_integer(name, value);
                    if (s < 0) throw ConfigError("seed must be non-negative");
                    cfg.master_seed = static_cast<std::uint64_t>(s);
                } else if (key == "output") {
                    cfg.output_path = value;
                } else if (key == "threads") {
                    cfg.threads = to_int(name, value);
                }
            } else if (section == "shape") {
                const int v = to_int(name, value);
                if (key == "users") cfg.shape.users = v;
                else if (key == "tx_antennas") cfg.shape.tx_antennas = v;
                else if (key == "rx_antennas") cfg.shape.rx_antennas = v;
                else if (key == "streams") cfg.shape.streams = v;
                else if (key == "rrus") cfg.shape.rrus = v;
            } else if (section == "power") {
                const double v = to_double(name, value);
                if (key == "total_power_dbm") cfg.total_power_dbm = v;
                else cfg.noise_power_dbm = v;
            } else if (section == "geometry") {
                auto& g = cfg.geometry;
                if (key == "cell_radius_m") g.cell_radius = to_double(name, value);
                else if (key == "pathloss_exponent") g.propagation.pathloss_exponent = to_double(name, value);
                else if (key == "reference_loss_db") g.propagation.reference_loss_db = to_double(name, value);
                else if (key == "shadow_std_db") g.propagation.shadow_std_db = to_double(name, value);
                else if (key == "min_distance_m") g.propagation.min_distance_m = to_double(name, value);
                else if (key == "distance_bins_m") g.distance_bins_m = to_double_list(name, value);
                else if (key == "grid_step_m") g.grid_step_m = to_double(name, value);
                else if (key == "colocated_per_antenna_constraints") g.colocated_per_antenna = to_bool(name, value);
            } else if (section == "solver") {
                if (key == "tol") {
                    cfg.solver.tol = to_double(name, value);
                    tol_given = true;
                } else if (key == "max_iters") {
                    cfg.solver.max_iters = to_int(name, value);
                } else if (key == "tie_break") {
                    if (value == "track_iterate") cfg.solver.tie_break = NullSpaceTieBreak::track_iterate;
                    else if (value == "index_order") cfg.solver.tie_break = NullSpaceTieBreak::index_order;
                    else throw ConfigError("unknown tie_break '" + value + "'");
                }
            } else if (section == "backoff") {
                if (key == "exponent_variant") {
                    if (value == "nt") cfg.backoff_exponent = ExponentVariant::tx_antennas;
                    else if (value == "n_rru") cfg.backoff_exponent = ExponentVariant::rrus;
                    else throw ConfigError("unknown exponent_variant '" + value + "'");
                } else {
                    if (value == "complex") cfg.backoff_convention = ChiSquareConvention::complex;
                    else if (value == "real") cfg.backoff_convention = ChiSquareConvention::real;
                    else throw ConfigError("unknown chi_square_convention '" + value + "'");
                }
            } else if (section == "properness") {
                auto& g = cfg.properness;
                if (key == "users") g.users = to_int_list(name, value);
                else if (key == "tx_antennas") g.tx_antennas = to_int_list(name, value);
                else if (key == "rx_antennas") g.rx_antennas = to_int_list(name, value);
                else if (key == "streams") g.streams = to_int_list(name, value);
                else if (key == "rrus") g.rrus = to_int_list(name, value, true);
            }
        }
    }
    if (cfg.channel_model == ChannelModel::das && !tol_given) cfg.solver.tol = 1e-6;
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace iadas
