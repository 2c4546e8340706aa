#include "cco/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cco/random.hpp"

namespace cco {

namespace {

using Section = std::vector<std::pair<std::string, std::string>>;
using IniData = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

IniData parse_ini(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    IniData data;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(t.substr(1, t.size() - 2));
            data[section];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        data[section].emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return data;
}

const Section& require_section(const IniData& data, const std::string& name,
                               const std::string& path) {
    auto it = data.find(name);
    if (it == data.end())
        throw ConfigError(path + ": missing required section [" + name + "]");
    return it->second;
}

std::optional<std::string> find_key(const Section& s, const std::string& key) {
    for (const auto& [k, v] : s)
        if (k == key) return v;
    return std::nullopt;
}

double get_double(const Section& s, const std::string& key, double fallback) {
    auto v = find_key(s, key);
    return v ? std::stod(*v) : fallback;
}

long get_long(const Section& s, const std::string& key, long fallback) {
    auto v = find_key(s, key);
    return v ? std::stol(*v) : fallback;
}

std::string get_string(const Section& s, const std::string& key, const std::string& fallback) {
    auto v = find_key(s, key);
    return v ? *v : fallback;
}

std::vector<double> split_doubles(const std::string& s) {
    std::istringstream is(s);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    IniData data = parse_ini(path);
    ExperimentConfig cfg;

    const Section& env = require_section(data, "environment", path);
    cfg.seed = static_cast<std::uint64_t>(get_long(env, "seed", 0));
    double width = get_double(env, "width_m", 1200.0);
    double height = get_double(env, "height_m", 1200.0);
    double res = get_double(env, "resolution_m", 10.0);
    cfg.layout = default_layout();
    cfg.layout.grid = GridSpec::make(width, height, res);
    cfg.layout.reference_power_dbm = get_double(env, "reference_power_dbm", 40.0);
    cfg.layout.pathloss.pl0_db = get_double(env, "pl0_db", 68.4);
    cfg.layout.pathloss.exponent = get_double(env, "pathloss_exponent", 3.76);
    cfg.layout.pathloss.d0_m = get_double(env, "pathloss_d0_m", 1.0);
    cfg.layout.pathloss.min_distance_m = get_double(env, "pathloss_min_distance_m", 10.0);
    cfg.layout.shadowing.sigma_db = get_double(env, "shadowing_sigma_db", 8.0);
    cfg.layout.shadowing.decorrelation_m = get_double(env, "shadowing_decorrelation_m", 50.0);

    std::vector<SiteSpec> sites;
    for (const auto& [k, v] : env) {
        if (k != "site") continue;
        auto nums = split_doubles(v);
        if (nums.size() != 6)
            throw ConfigError(path + ": site entries need 6 numbers (x y z az1 az2 az3)");
        sites.push_back({nums[0], nums[1], nums[2], {nums[3], nums[4], nums[5]}});
    }
    if (!sites.empty()) cfg.layout.sites = sites;

    if (auto it = data.find("thresholds"); it != data.end()) {
        cfg.thresholds.gamma_w_dbm = get_double(it->second, "gamma_w_dbm", -110.0);
        cfg.thresholds.gamma_o_db = get_double(it->second, "gamma_o_db", 6.0);
        cfg.thresholds.sigmoid_temperature_db =
            get_double(it->second, "sigmoid_temperature_db", 1.0);
        if (cfg.thresholds.sigmoid_temperature_db <= 0.0)
            throw ConfigError(path + ": sigmoid_temperature_db must be positive");
    }

    if (auto it = data.find("method"); it != data.end()) {
        const Section& m = it->second;
        cfg.method.name = get_string(m, "name", "random");
        cfg.method.budget = get_long(m, "budget", 164);
        cfg.method.n_init = static_cast<int>(get_long(m, "n_init", 64));
        cfg.method.n_iterations = static_cast<int>(get_long(m, "n_iterations", 100));
        cfg.method.iterations_per_lambda = get_long(m, "iterations_per_lambda", 1000);
        cfg.method.lambda_stride = get_double(m, "lambda_stride", 0.1);
        if (cfg.method.name != "random" && cfg.method.name != "bo" && cfg.method.name != "ddpg")
            throw ConfigError(path + ": unknown method '" + cfg.method.name + "'");
        if (planned_evaluations(cfg.method) <= 0)
            throw ConfigError(path + ": method budget must be positive");
    }

    if (auto it = data.find("output"); it != data.end()) {
        const Section& o = it->second;
        cfg.output.environment = get_string(o, "environment", cfg.output.environment);
        cfg.output.tensor = get_string(o, "tensor", cfg.output.tensor);
        cfg.output.history = get_string(o, "history", cfg.output.history);
        cfg.output.front = get_string(o, "front", cfg.output.front);
    }
    return cfg;
}

void write_environment_file(const RadioEnvironment& env, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "[environment]\n";
    os << "seed = " << env.seed << "\n";
    os << "width_m = " << fmt(env.grid.width_m) << "\n";
    os << "height_m = " << fmt(env.grid.height_m) << "\n";
    os << "resolution_m = " << fmt(env.grid.resolution_m) << "\n";
    os << "reference_power_dbm = " << fmt(env.reference_power_dbm) << "\n";
    os << "pl0_db = " << fmt(env.pathloss.pl0_db) << "\n";
    os << "pathloss_exponent = " << fmt(env.pathloss.exponent) << "\n";
    os << "pathloss_d0_m = " << fmt(env.pathloss.d0_m) << "\n";
    os << "pathloss_min_distance_m = " << fmt(env.pathloss.min_distance_m) << "\n";
    os << "shadowing_sigma_db = " << fmt(env.shadowing.sigma_db) << "\n";
    os << "shadowing_decorrelation_m = " << fmt(env.shadowing.decorrelation_m) << "\n";
    os << "downtilts =";
    for (int d : env.downtilts_deg) os << " " << d;
    os << "\n";
    for (const auto& a : env.antennas) {
        os << "antenna = " << a.site_id << " " << fmt(a.x_m) << " " << fmt(a.y_m) << " "
           << fmt(a.z_m) << " " << fmt(a.azimuth_deg) << " " << fmt(a.max_gain_dbi) << " "
           << fmt(a.h_beamwidth_deg) << " " << fmt(a.v_beamwidth_deg) << " "
           << fmt(a.front_back_ratio_db) << " " << fmt(a.sla_v_db) << "\n";
    }
}

RadioEnvironment read_environment_file(const std::string& path) {
    IniData data = parse_ini(path);
    const Section& env = require_section(data, "environment", path);

    RadioEnvironment out;
    out.seed = static_cast<std::uint64_t>(get_long(env, "seed", 0));
    out.grid = GridSpec::make(get_double(env, "width_m", 1200.0),
                              get_double(env, "height_m", 1200.0),
                              get_double(env, "resolution_m", 10.0));
    out.reference_power_dbm = get_double(env, "reference_power_dbm", 40.0);
    out.pathloss.pl0_db = get_double(env, "pl0_db", 68.4);
    out.pathloss.exponent = get_double(env, "pathloss_exponent", 3.76);
    out.pathloss.d0_m = get_double(env, "pathloss_d0_m", 1.0);
    out.pathloss.min_distance_m = get_double(env, "pathloss_min_distance_m", 10.0);
    out.shadowing.sigma_db = get_double(env, "shadowing_sigma_db", 8.0);
    out.shadowing.decorrelation_m = get_double(env, "shadowing_decorrelation_m", 50.0);

    auto tilts = find_key(env, "downtilts");
    if (!tilts) throw ConfigError(path + ": missing downtilts");
    for (double v : split_doubles(*tilts)) out.downtilts_deg.push_back(static_cast<int>(v));

    for (const auto& [k, v] : env) {
        if (k != "antenna") continue;
        auto n = split_doubles(v);
        if (n.size() != 10) throw ConfigError(path + ": antenna entries need 10 numbers");
        SectorAntenna a;
        a.site_id = static_cast<int>(n[0]);
        a.x_m = n[1];
        a.y_m = n[2];
        a.z_m = n[3];
        a.azimuth_deg = n[4];
        a.max_gain_dbi = n[5];
        a.h_beamwidth_deg = n[6];
        a.v_beamwidth_deg = n[7];
        a.front_back_ratio_db = n[8];
        a.sla_v_db = n[9];
        out.antennas.push_back(a);
    }
    if (out.antennas.empty()) throw ConfigError(path + ": no antennas listed");

    out.shadowing_fields.resize(out.antennas.size());
    for (std::size_t i = 0; i < out.antennas.size(); ++i)
        out.shadowing_fields[i] =
            shadowing_field(out.grid, out.shadowing.sigma_db, out.shadowing.decorrelation_m,
                            out.seed, static_cast<int>(i));
    return out;
}

std::vector<HistoryRow> random_search(const CoverageTensor& tensor, const Thresholds& th,
                                      long n, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x8A2D));
    std::vector<HistoryRow> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        Configuration c;
        c.settings.resize(tensor.n_sectors);
        for (auto& s : c.settings) {
            s.downtilt_deg = static_cast<int>(rng.index(tensor.downtilts_deg.size()));
            s.downtilt_deg = tensor.downtilts_deg[s.downtilt_deg];
            s.power_dbm = rng.uniform(kMinPowerDbm, kMaxPowerDbm);
        }
        HistoryRow row;
        row.iteration = i;
        row.method = "random";
        row.pair = evaluate(c, tensor, th);
        row.config = std::move(c);
        rows.push_back(std::move(row));
    }
    return rows;
}

long planned_evaluations(const MethodConfig& m) {
    if (m.name == "random") return m.budget;
    if (m.name == "bo") return static_cast<long>(m.n_init) + m.n_iterations;
    if (m.name == "ddpg") {
        long n_lambdas = std::lround(1.0 / m.lambda_stride) + 1;
        return n_lambdas * m.iterations_per_lambda;
    }
    throw ConfigError("unknown method '" + m.name + "'");
}

std::vector<HistoryRow> run_method(const ExperimentConfig& cfg, const CoverageTensor& tensor) {
    std::vector<HistoryRow> rows;
    if (cfg.method.name == "random") {
        rows = random_search(tensor, cfg.thresholds, cfg.method.budget, cfg.seed);
    } else if (cfg.method.name == "bo") {
        BoState state = bo_loop(tensor, cfg.thresholds,
                                {cfg.method.n_init, cfg.method.n_iterations}, cfg.seed);
        long i = 0;
        for (auto& [config, pair] : state.history)
            rows.push_back({i++, "bo", std::nullopt, std::move(config), pair});
    } else if (cfg.method.name == "ddpg") {
        if (std::abs(cfg.method.lambda_stride - 0.1) > 1e-12)
            throw ConfigError("ddpg lambda_stride other than 0.1 is not supported");
        auto history = lambda_sweep(tensor, cfg.thresholds, cfg.method.iterations_per_lambda,
                                    cfg.seed);
        long i = 0;
        for (auto& rec : history)
            rows.push_back({i++, "ddpg", rec.lambda, std::move(rec.config), rec.pair});
    } else {
        throw ConfigError("unknown method '" + cfg.method.name + "'");
    }
    return rows;
}

namespace {

std::string csv_header(int n_sectors) {
    std::string h = "iteration,method,lambda";
    for (int i = 0; i < n_sectors; ++i) h += ",d" + std::to_string(i);
    for (int i = 0; i < n_sectors; ++i) h += ",p" + std::to_string(i);
    h += ",under_cov,over_cov,under_pct,over_pct,hypervolume";
    return h;
}

}  // namespace

void write_history_csv(const std::vector<HistoryRow>& rows, double cell_count,
                       const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    if (rows.empty()) {
        os << csv_header(kNumSectors) << "\n";
        return;
    }
    os << csv_header(static_cast<int>(rows.front().config.settings.size())) << "\n";

    std::vector<std::array<double, 2>> pts;
    for (const auto& r : rows) {
        pts.push_back({r.pair.under_cov / cell_count, r.pair.over_cov / cell_count});
        double hv = hypervolume_2d(non_dominated(pts), kDefaultRefPoint);
        os << r.iteration << "," << r.method << ",";
        if (r.lambda) os << fmt(*r.lambda);
        for (const auto& s : r.config.settings) os << "," << s.downtilt_deg;
        for (const auto& s : r.config.settings) os << "," << fmt(s.power_dbm);
        os << "," << fmt(r.pair.under_cov) << "," << fmt(r.pair.over_cov) << ","
           << fmt(r.pair.under_pct) << "," << fmt(r.pair.over_pct) << "," << fmt(hv) << "\n";
    }
}

ParetoFront front_of(const std::vector<HistoryRow>& rows, double cell_count) {
    std::vector<std::array<double, 2>> pts;
    pts.reserve(rows.size());
    for (const auto& r : rows)
        pts.push_back({r.pair.under_cov / cell_count, r.pair.over_cov / cell_count});
    return non_dominated(pts);
}

void write_front_csv(const std::vector<HistoryRow>& rows, double cell_count,
                     const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    const int n = rows.empty() ? kNumSectors
                               : static_cast<int>(rows.front().config.settings.size());
    os << "under_norm,over_norm";
    for (int i = 0; i < n; ++i) os << ",d" << i;
    for (int i = 0; i < n; ++i) os << ",p" << i;
    os << "\n";

    ParetoFront front = front_of(rows, cell_count);
    for (std::size_t i = 0; i < front.size(); ++i) {
        const auto& r = rows[front.config_index[i]];
        os << fmt(front.points[i][0]) << "," << fmt(front.points[i][1]);
        for (const auto& s : r.config.settings) os << "," << s.downtilt_deg;
        for (const auto& s : r.config.settings) os << "," << fmt(s.power_dbm);
        os << "\n";
    }
}

HistoryFile read_history_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    HistoryFile hf;
    hf.path = path;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(path + ": empty history file");
    int n_sectors = 0;
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ','))
            if (col.size() >= 2 && col[0] == 'd' &&
                std::isdigit(static_cast<unsigned char>(col[1])))
                ++n_sectors;
    }
    if (n_sectors == 0) throw std::runtime_error(path + ": header has no config columns");

    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        const std::size_t expected = 3 + 2 * n_sectors + 5;
        if (fields.size() != expected)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(expected) + " fields, got " +
                                     std::to_string(fields.size()));
        HistoryRow r;
        r.iteration = std::stol(fields[0]);
        r.method = fields[1];
        if (!fields[2].empty()) r.lambda = std::stod(fields[2]);
        r.config.settings.resize(n_sectors);
        for (int i = 0; i < n_sectors; ++i)
            r.config.settings[i].downtilt_deg = std::stoi(fields[3 + i]);
        for (int i = 0; i < n_sectors; ++i)
            r.config.settings[i].power_dbm = std::stod(fields[3 + n_sectors + i]);
        std::size_t o = 3 + 2 * static_cast<std::size_t>(n_sectors);
        r.pair.under_cov = std::stod(fields[o]);
        r.pair.over_cov = std::stod(fields[o + 1]);
        r.pair.under_pct = std::stod(fields[o + 2]);
        r.pair.over_pct = std::stod(fields[o + 3]);
        hf.hypervolume.push_back(std::stod(fields[o + 4]));
        hf.rows.push_back(std::move(r));
    }
    return hf;
}

void write_coverage_raster(const std::string& path, const CoverageTensor& tensor,
                           const Configuration& config, const Thresholds& th) {
    RsrpStack stack = apply_configuration(tensor, config);
    AttachmentGrid att = attach(stack);
    std::vector<double> interf = interference_db(stack, att);

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "P5\n" << att.cols << " " << att.rows << "\n255\n";
    for (std::size_t i = 0; i < att.cell_count(); ++i) {
        unsigned char v = 128;  // covered
        if (interf[i] - att.serving_rsrp_dbm[i] + th.gamma_o_db > 0.0) v = 255;
        if (att.serving_rsrp_dbm[i] < th.gamma_w_dbm) v = 0;
        os.put(static_cast<char>(v));
    }
}

}  // namespace cco
