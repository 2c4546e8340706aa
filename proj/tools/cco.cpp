#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cco/experiment.hpp"

namespace fs = std::filesystem;
using namespace cco;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::uint64_t payload_checksum(const std::vector<float>& values) {
    // FNV-1a over the raw float bytes
    std::uint64_t h = 1469598103934665603ULL;
    const unsigned char* p = reinterpret_cast<const unsigned char*>(values.data());
    for (std::size_t i = 0; i < values.size() * sizeof(float); ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

ExperimentConfig load_config(const CommonOpts& opts) {
    ExperimentConfig cfg = ExperimentConfig::from_file(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
}

int cmd_gen_env(const CommonOpts& opts, const std::string& out_override) {
    ExperimentConfig cfg = load_config(opts);
    RadioEnvironment env = generate_environment(cfg.layout, cfg.seed);
    std::string out = out_override.empty() ? cfg.output.environment : out_override;
    write_environment_file(env, out);
    std::cout << "wrote " << out << " (" << env.antennas.size() << " antennas, seed "
              << env.seed << ")\n";
    return 0;
}

int cmd_precompute(const std::string& env_path, const std::string& out_path) {
    RadioEnvironment env = read_environment_file(env_path);
    CoverageTensor tensor = precompute_coverage(env);
    tensor.save(out_path);
    std::cout << "wrote " << out_path << ": " << tensor.n_sectors << " x "
              << tensor.n_downtilts << " x " << tensor.grid.rows << " x " << tensor.grid.cols
              << " float32, checksum " << std::hex << payload_checksum(tensor.rsrp_dbm)
              << std::dec << "\n";
    return 0;
}

int cmd_run(const CommonOpts& opts, const std::string& method_override, long budget_override,
            double lambda_stride_override, const std::string& out_override) {
    ExperimentConfig cfg = load_config(opts);
    if (!method_override.empty()) cfg.method.name = method_override;
    if (budget_override > 0) {
        cfg.method.budget = budget_override;
        cfg.method.iterations_per_lambda = budget_override;
    }
    if (lambda_stride_override > 0) cfg.method.lambda_stride = lambda_stride_override;
    if (!out_override.empty()) cfg.output.history = out_override;

    if (!fs::exists(cfg.output.tensor))
        throw ConfigError("coverage tensor not found: " + cfg.output.tensor +
                          " (run gen-env and precompute first)");
    CoverageTensor tensor = CoverageTensor::load(cfg.output.tensor);

    std::vector<HistoryRow> rows = run_method(cfg, tensor);
    double cells = static_cast<double>(tensor.grid.cell_count());
    write_history_csv(rows, cells, cfg.output.history);
    write_front_csv(rows, cells, cfg.output.front);
    std::cout << "method " << cfg.method.name << ": " << rows.size() << " evaluations, front "
              << front_of(rows, cells).size() << " points\n";
    std::cout << "wrote " << cfg.output.history << " and " << cfg.output.front << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& history_paths, const std::string& tensor_path,
               double render_lambda, const std::string& out_dir) {
    fs::create_directories(out_dir);

    std::optional<CoverageTensor> tensor;
    if (!tensor_path.empty()) tensor = CoverageTensor::load(tensor_path);
    double cells = tensor ? static_cast<double>(tensor->grid.cell_count()) : 14400.0;

    std::vector<NamedFront> fronts;
    std::vector<HistoryFile> files;
    for (const auto& path : history_paths) {
        HistoryFile hf = read_history_csv(path);
        NamedFront nf;
        nf.name = fs::path(path).stem().string();
        nf.front = front_of(hf.rows, cells);
        nf.evaluations = hf.rows.size();
        fronts.push_back(std::move(nf));
        files.push_back(std::move(hf));
    }

    // per-method hypervolume-vs-evaluations curves
    for (std::size_t f = 0; f < files.size(); ++f) {
        fs::path out = fs::path(out_dir) / (fronts[f].name + "_hv.csv");
        std::ofstream os(out);
        os << "evaluations,hypervolume\n";
        for (std::size_t i = 0; i < files[f].hypervolume.size(); ++i)
            os << (i + 1) << "," << files[f].hypervolume[i] << "\n";
    }

    std::ostringstream table;
    table << "front            evals   hypervolume\n";
    for (const auto& nf : fronts) {
        table << nf.name;
        for (std::size_t i = nf.name.size(); i < 17; ++i) table << ' ';
        table << nf.evaluations << "   " << hypervolume_2d(nf.front, kDefaultRefPoint) << "\n";
    }
    if (fronts.size() >= 2) {
        FrontierComparison cmp = compare_frontiers(fronts, kDefaultRefPoint);
        table << "\nmean staircase improvement of row over column (objective units):\n";
        for (std::size_t a = 0; a < cmp.names.size(); ++a) {
            table << cmp.names[a] << ":";
            for (std::size_t b = 0; b < cmp.names.size(); ++b)
                table << " " << cmp.improvement[a][b];
            table << "\n";
        }
        for (const auto& n : cmp.notices) table << "note: " << n << "\n";
    }
    std::cout << table.str();
    std::ofstream(fs::path(out_dir) / "comparison.txt") << table.str();

    if (tensor) {
        for (std::size_t f = 0; f < files.size(); ++f) {
            if (files[f].rows.empty()) continue;
            // render the best configuration under the requested scalarization
            std::size_t best = 0;
            double best_v = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < files[f].rows.size(); ++i) {
                double v = scalarize(files[f].rows[i].pair, render_lambda);
                if (v < best_v) {
                    best_v = v;
                    best = i;
                }
            }
            fs::path out = fs::path(out_dir) / (fronts[f].name + "_coverage.pgm");
            write_coverage_raster(out.string(), *tensor, files[f].rows[best].config,
                                  Thresholds{});
            std::cout << "wrote " << out.string() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cellular coverage optimization benchmark"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string out_override, method, env_path, tensor_out, tensor_path, out_dir = "report";
    long budget = 0;
    double lambda_stride = 0.0, render_lambda = 0.5;
    std::vector<std::string> histories;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "experiment config file")->required();
        sub->add_option("--seed", common.seed, "override the config seed");
    };

    CLI::App* gen = app.add_subcommand("gen-env", "generate a radio environment file");
    add_common(gen);
    gen->add_option("--out", out_override, "environment file path");

    CLI::App* pre = app.add_subcommand("precompute", "precompute the coverage tensor");
    pre->add_option("--env", env_path, "environment file from gen-env")->required();
    pre->add_option("--out", tensor_out, "tensor output path")->required();

    CLI::App* run = app.add_subcommand("run", "run an optimization method");
    add_common(run);
    run->add_option("--method", method, "random | bo | ddpg");
    run->add_option("--budget", budget, "evaluations (random) or iterations per lambda (ddpg)");
    run->add_option("--lambda-stride", lambda_stride, "ddpg lambda stride");
    run->add_option("--out", out_override, "history CSV path");

    CLI::App* rep = app.add_subcommand("report", "compare histories and render maps");
    rep->add_option("histories", histories, "history CSV files")->required();
    rep->add_option("--tensor", tensor_path, "coverage tensor for rasters");
    rep->add_option("--render-lambda", render_lambda, "scalarization for raster selection");
    rep->add_option("--out", out_dir, "report output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_env(common, out_override);
        if (pre->parsed()) return cmd_precompute(env_path, tensor_out);
        if (run->parsed())
            return cmd_run(common, method, budget, lambda_stride, out_override);
        if (rep->parsed()) return cmd_report(histories, tensor_path, render_lambda, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
