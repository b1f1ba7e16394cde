#include "ccnet/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "ccnet/errors.hpp"

namespace ccnet {
namespace {

std::string trim(std::string const& s)
{
    auto const first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

int bracket_balance(std::string const& s)
{
    int depth = 0;
    for (char c : s) {
        depth += (c == '[') - (c == ']');
    }
    return depth;
}

using Entries = std::map<std::string, std::string>;

void check_known(std::string const& key, std::string const& where)
{
    auto const& keys = known_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError(key, "unknown key" + (where.empty() ? std::string{} : " (" + where + ")"));
    }
}

Entries parse_entries(std::string const& text, std::string const& source)
{
    Entries entries;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        int const start_line = line_no;
        auto strip = [](std::string s) {
            auto const hash = s.find('#');
            return trim(hash == std::string::npos ? s : s.substr(0, hash));
        };
        std::string stmt = strip(line);
        if (stmt.empty()) {
            continue;
        }
        // Bracketed values may continue over several lines.
        while (bracket_balance(stmt) > 0 && std::getline(in, line)) {
            ++line_no;
            stmt += " " + strip(line);
        }
        auto const where = source + ":" + std::to_string(start_line);
        auto const eq = stmt.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", where + ": expected 'key = value'");
        }
        std::string key = trim(stmt.substr(0, eq));
        std::string value = trim(stmt.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(key, where + ": empty key or value");
        }
        if (bracket_balance(value) != 0) {
            throw ConfigError(key, where + ": unbalanced brackets");
        }
        check_known(key, where);
        if (entries.count(key)) {
            throw ConfigError(key, where + ": duplicate key");
        }
        entries[key] = value;
    }
    return entries;
}

double to_number(std::string const& key, std::string const& token)
{
    std::string const t = trim(token);
    double x = 0.0;
    auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "'" + t + "' is not a number");
    }
    return x;
}

long long to_integer(std::string const& key, std::string const& token)
{
    double const x = to_number(key, token);
    if (x != std::floor(x) || std::abs(x) > 9.0e15) {
        throw ConfigError(key, "'" + trim(token) + "' is not an integer");
    }
    return static_cast<long long>(x);
}

bool to_bool(std::string const& key, std::string const& token)
{
    std::string const t = trim(token);
    if (t == "true" || t == "yes" || t == "1" || t == "on") {
        return true;
    }
    if (t == "false" || t == "no" || t == "0" || t == "off") {
        return false;
    }
    throw ConfigError(key, "'" + t + "' is not a boolean");
}

// Splits the top level of "[a, b, [c, d]]" into its items. Scalars become a
// one-element list.
std::vector<std::string> split_list(std::string const& key, std::string const& value)
{
    std::string const v = trim(value);
    if (v.empty() || v.front() != '[') {
        return {v};
    }
    if (v.back() != ']') {
        throw ConfigError(key, "list must end with ']'");
    }
    std::string const inner = trim(v.substr(1, v.size() - 2));
    std::vector<std::string> items;
    if (inner.empty()) {
        return items;
    }
    int depth = 0;
    std::string current;
    for (char c : inner) {
        if (c == ',' && depth == 0) {
            items.push_back(trim(current));
            current.clear();
            continue;
        }
        depth += (c == '[') - (c == ']');
        current += c;
    }
    items.push_back(trim(current));
    for (auto const& item : items) {
        if (item.empty()) {
            throw ConfigError(key, "empty list item");
        }
    }
    return items;
}

std::vector<double> to_numbers(std::string const& key, std::string const& value)
{
    std::vector<double> out;
    for (auto const& item : split_list(key, value)) {
        out.push_back(to_number(key, item));
    }
    return out;
}

Matrix to_matrix(std::string const& key, std::string const& value)
{
    auto const rows = split_list(key, value);
    if (rows.empty()) {
        throw ConfigError(key, "matrix must have at least one row");
    }
    std::vector<std::vector<double>> data;
    for (auto const& row : rows) {
        if (row.front() != '[') {
            throw ConfigError(key, "matrix rows must be bracketed lists");
        }
        data.push_back(to_numbers(key, row));
    }
    auto const cols = data.front().size();
    Matrix m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].size() != cols || cols == 0) {
            throw ConfigError(key, "matrix rows must have equal, non-zero length");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i][j];
        }
    }
    return m;
}

Vector to_vector(std::string const& key, std::string const& value)
{
    auto const xs = to_numbers(key, value);
    Vector v(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = xs[i];
    }
    return v;
}

template <class F>
auto guarded(std::string const& key, F&& f)
{
    try {
        return f();
    } catch (ConfigError const&) {
        throw;
    } catch (std::exception const& e) {
        throw ConfigError(key, e.what());
    }
}

class Reader
{
  public:
    explicit Reader(Entries entries) : entries_(std::move(entries)) {}

    std::optional<std::string> take(std::string const& key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    void exclusive(std::string const& a, std::string const& b)
    {
        if (entries_.count(a) && entries_.count(b)) {
            throw ConfigError(b, "conflicts with '" + a + "'; give only one");
        }
    }

  private:
    Entries entries_;
};

std::string join_numbers(std::vector<double> const& xs)
{
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s += (i ? ", " : "") + format_number(xs[i]);
    }
    return s + "]";
}

std::string format_vector(Vector const& v)
{
    return join_numbers(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string format_matrix(Matrix const& m)
{
    std::string s = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Vector const row = m.row(i).transpose();
        s += (i ? ", " : "") + format_vector(row);
    }
    return s + "]";
}

}  // namespace

std::string format_number(double x)
{
    char buf[64];
    auto const [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::vector<std::string> const& known_config_keys()
{
    static std::vector<std::string> const keys{
        "lambda",          "window_radius",   "r0",
        "tx_power_dbm",    "tx_power_w",      "noise_power_dbm",
        "noise_power_w",   "bandwidth_hz",    "noise_figure_db",
        "carrier_hz",      "rho",             "alpha",
        "gamma_db",        "gamma",           "protocol",
        "system",          "q",               "q_grid",
        "arms",            "betas",           "meta_q",
        "T",               "v",               "K",
        "num_realizations", "seed",           "geometry_mode",
        "A",               "B",               "x_des",
        "x0",              "process_noise_std", "quad_rel_tol",
        "quad_abs_tol",    "quad_max_subdivisions", "quad_max_frequency",
        "quad_cf_tol",     "infinite_plane",  "reward",
        "snapshot_every",  "threads",
    };
    return keys;
}

ExperimentConfig parse_config(std::string const& text, std::vector<std::string> const& overrides,
                              std::string const& source)
{
    Entries entries = parse_entries(text, source);
    for (auto const& o : overrides) {
        auto const eq = o.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", "override '" + o + "' must look like key=value");
        }
        std::string const key = trim(o.substr(0, eq));
        std::string const value = trim(o.substr(eq + 1));
        check_known(key, "override");
        if (value.empty()) {
            throw ConfigError(key, "override has an empty value");
        }
        entries[key] = value;
    }
    if (entries.count("q") && entries.count("q_grid")) {
        throw ConfigError("q", "conflicts with 'q_grid'; give only one");
    }

    Reader in(std::move(entries));
    ExperimentConfig c;

    if (auto v = in.take("lambda")) {
        c.lambdas = to_numbers("lambda", *v);
    }
    if (auto v = in.take("window_radius")) {
        c.window_radius = trim(*v) == "auto" ? 0.0 : to_number("window_radius", *v);
        if (trim(*v) != "auto" && !(c.window_radius > 0.0)) {
            throw ConfigError("window_radius", "must be > 0 or auto");
        }
    }
    if (auto v = in.take("r0")) {
        c.typical_distance = to_number("r0", *v);
    }

    in.exclusive("tx_power_dbm", "tx_power_w");
    in.exclusive("noise_power_dbm", "noise_power_w");
    in.exclusive("carrier_hz", "rho");
    in.exclusive("gamma_db", "gamma");
    if (auto v = in.take("tx_power_dbm")) {
        c.channel.tx_power = dbm_to_watts(to_number("tx_power_dbm", *v));
    }
    if (auto v = in.take("tx_power_w")) {
        c.channel.tx_power = to_number("tx_power_w", *v);
    }
    if (auto v = in.take("noise_power_w")) {
        c.channel.noise_power = to_number("noise_power_w", *v);
    } else if (auto v = in.take("noise_power_dbm")) {
        c.channel.noise_power = dbm_to_watts(to_number("noise_power_dbm", *v));
    } else {
        double bw = 200e6;
        double nf = 0.0;
        if (auto b = in.take("bandwidth_hz")) {
            bw = to_number("bandwidth_hz", *b);
            if (!(bw > 0.0)) {
                throw ConfigError("bandwidth_hz", "must be > 0");
            }
        }
        if (auto f = in.take("noise_figure_db")) {
            nf = to_number("noise_figure_db", *f);
        }
        c.channel.noise_power = dbm_to_watts(thermal_noise_dbm(bw, nf));
    }
    if (auto v = in.take("rho")) {
        c.channel.pathloss_const = to_number("rho", *v);
    } else if (auto f = in.take("carrier_hz")) {
        double const fc = to_number("carrier_hz", *f);
        if (!(fc > 0.0)) {
            throw ConfigError("carrier_hz", "must be > 0");
        }
        c.channel.pathloss_const = free_space_gain(fc);
    }
    if (auto v = in.take("alpha")) {
        c.channel.pathloss_exp = to_number("alpha", *v);
    }
    if (auto v = in.take("gamma")) {
        c.channel.sinr_threshold = to_number("gamma", *v);
    }
    if (auto v = in.take("gamma_db")) {
        c.channel.sinr_threshold = db_to_linear(to_number("gamma_db", *v));
    }

    if (auto v = in.take("protocol")) {
        c.protocols.clear();
        for (auto const& item : split_list("protocol", *v)) {
            c.protocols.push_back(guarded("protocol", [&] { return parse_protocol(item); }));
        }
    }
    if (auto v = in.take("system")) {
        c.systems.clear();
        for (auto const& item : split_list("system", *v)) {
            c.systems.push_back(guarded("system", [&] { return parse_system(item); }));
        }
    }
    if (auto v = in.take("q")) {
        c.q_grid = to_numbers("q", *v);
        for (double q : c.q_grid) {
            if (!(q >= 0.0 && q <= 1.0)) {
                throw ConfigError("q", "must lie in [0, 1]");
            }
        }
    }
    if (auto v = in.take("q_grid")) {
        c.q_grid = to_numbers("q_grid", *v);
    }
    if (auto v = in.take("arms")) {
        c.arms = to_numbers("arms", *v);
    }
    if (auto v = in.take("betas")) {
        c.betas = to_numbers("betas", *v);
    }
    if (auto v = in.take("meta_q")) {
        c.meta_q = to_numbers("meta_q", *v);
    }
    if (auto v = in.take("T")) {
        c.T = static_cast<int>(to_integer("T", *v));
    }
    if (auto v = in.take("v")) {
        c.horizons.clear();
        for (auto const& item : split_list("v", *v)) {
            c.horizons.push_back(static_cast<int>(to_integer("v", item)));
        }
    }
    if (auto v = in.take("K")) {
        c.K = static_cast<int>(to_integer("K", *v));
    }
    if (auto v = in.take("num_realizations")) {
        c.num_realizations = static_cast<int>(to_integer("num_realizations", *v));
    }
    if (auto v = in.take("seed")) {
        std::string const t = trim(*v);
        std::uint64_t seed = 0;
        auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), seed);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw ConfigError("seed", "'" + t + "' is not an unsigned 64-bit integer");
        }
        c.seed = seed;
    }
    if (auto v = in.take("geometry_mode")) {
        c.geometry = guarded("geometry_mode", [&] { return parse_geometry_mode(trim(*v)); });
    }
    if (auto v = in.take("A")) {
        c.plant.a = to_matrix("A", *v);
    }
    if (auto v = in.take("B")) {
        c.plant.b = to_matrix("B", *v);
    }
    if (auto v = in.take("x_des")) {
        c.plant.x_des = to_vector("x_des", *v);
    }
    if (auto v = in.take("x0")) {
        c.plant.x0 = to_vector("x0", *v);
    }
    if ((c.plant.a.size() == 0) != (c.plant.b.size() == 0)) {
        throw ConfigError(c.plant.a.size() ? "B" : "A", "A and B must be given together");
    }
    if (c.plant.a.size() == 0 && (c.plant.x_des.size() || c.plant.x0.size())) {
        throw ConfigError(c.plant.x_des.size() ? "x_des" : "x0", "needs an explicit plant (A and B)");
    }
    if (c.plant.a.size() && c.plant.x0.size() && c.plant.x0.size() != c.plant.a.rows()) {
        throw ConfigError("x0", "dimension does not match A");
    }
    if (auto v = in.take("process_noise_std")) {
        c.plant.process_noise_std = to_number("process_noise_std", *v);
    }
    if (auto v = in.take("quad_rel_tol")) {
        c.quad.rel_tol = to_number("quad_rel_tol", *v);
    }
    if (auto v = in.take("quad_abs_tol")) {
        c.quad.abs_tol = to_number("quad_abs_tol", *v);
    }
    if (auto v = in.take("quad_max_subdivisions")) {
        c.quad.max_subdivisions = static_cast<int>(to_integer("quad_max_subdivisions", *v));
    }
    if (auto v = in.take("quad_max_frequency")) {
        c.quad.max_frequency = to_number("quad_max_frequency", *v);
    }
    if (auto v = in.take("quad_cf_tol")) {
        c.quad.cf_tol = to_number("quad_cf_tol", *v);
    }
    if (auto v = in.take("infinite_plane")) {
        c.quad.infinite_plane = to_bool("infinite_plane", *v);
    }
    if (auto v = in.take("reward")) {
        std::string const t = trim(*v);
        if (t == "typical") {
            c.reward = RewardMode::TypicalPair;
        } else if (t == "network") {
            c.reward = RewardMode::NetworkAverage;
        } else {
            throw ConfigError("reward", "expected typical or network");
        }
    }
    if (auto v = in.take("snapshot_every")) {
        c.snapshot_every = static_cast<int>(to_integer("snapshot_every", *v));
    }
    if (auto v = in.take("threads")) {
        long long const t = to_integer("threads", *v);
        if (t < 1) {
            throw ConfigError("threads", "must be >= 1");
        }
        c.threads = static_cast<unsigned>(t);
    }

    c.validate();
    return c;
}

ExperimentConfig load_config(std::filesystem::path const& path, std::vector<std::string> const& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "cannot read config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), overrides, path.string());
}

std::string to_config_text(ExperimentConfig const& c)
{
    std::ostringstream out;
    auto line = [&](char const* key, std::string const& value) { out << key << " = " << value << "\n"; };
    auto ints = [](std::vector<int> const& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            s += (i ? ", " : "") + std::to_string(xs[i]);
        }
        return s + "]";
    };
    auto names = [](auto const& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            s += (i ? ", " : "") + to_string(xs[i]);
        }
        return s + "]";
    };

    line("lambda", join_numbers(c.lambdas));
    line("window_radius", c.window_radius > 0.0 ? format_number(c.window_radius) : "auto");
    line("r0", format_number(c.typical_distance));
    line("tx_power_w", format_number(c.channel.tx_power));
    line("rho", format_number(c.channel.pathloss_const));
    line("noise_power_w", format_number(c.channel.noise_power));
    line("alpha", format_number(c.channel.pathloss_exp));
    line("gamma", format_number(c.channel.sinr_threshold));
    line("protocol", names(c.protocols));
    line("system", names(c.systems));
    line("q_grid", join_numbers(c.q_grid));
    line("arms", join_numbers(c.arms));
    line("betas", join_numbers(c.betas));
    line("meta_q", join_numbers(c.meta_q));
    line("T", std::to_string(c.T));
    line("v", ints(c.horizons));
    line("K", std::to_string(c.K));
    line("num_realizations", std::to_string(c.num_realizations));
    line("seed", std::to_string(c.seed));
    line("geometry_mode", to_string(c.geometry));
    if (c.plant.a.size()) {
        line("A", format_matrix(c.plant.a));
        line("B", format_matrix(c.plant.b));
        if (c.plant.x_des.size()) {
            line("x_des", format_vector(c.plant.x_des));
        }
        if (c.plant.x0.size()) {
            line("x0", format_vector(c.plant.x0));
        }
    }
    line("process_noise_std", format_number(c.plant.process_noise_std));
    line("quad_rel_tol", format_number(c.quad.rel_tol));
    line("quad_abs_tol", format_number(c.quad.abs_tol));
    line("quad_max_subdivisions", std::to_string(c.quad.max_subdivisions));
    line("quad_max_frequency", format_number(c.quad.max_frequency));
    line("quad_cf_tol", format_number(c.quad.cf_tol));
    line("infinite_plane", c.quad.infinite_plane ? "true" : "false");
    line("reward", c.reward == RewardMode::TypicalPair ? "typical" : "network");
    line("snapshot_every", std::to_string(c.snapshot_every));
    return out.str();
}

}  // namespace ccnet
