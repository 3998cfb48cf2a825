#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hiker/studies.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split_csv(s)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::runtime_error(what + ": not a number: " + tok);
        }
    }
    return out;
}

// Flat key=value configuration file; '#' starts a comment line. Values from
// the file act as defaults, so explicit command-line flags win.
class ConfigFile {
public:
    static ConfigFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        ConfigFile cfg;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected key=value");
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return cfg;
    }

    void take(const std::string& key, std::string& var) {
        if (auto it = values_.find(key); it != values_.end()) {
            var = it->second;
            used_.insert(key);
        }
    }
    void take(const std::string& key, int& var) {
        std::string s;
        take(key, s);
        if (!s.empty()) var = std::stoi(s);
    }
    void take(const std::string& key, std::uint64_t& var) {
        std::string s;
        take(key, s);
        if (!s.empty()) var = std::stoull(s);
    }
    void take(const std::string& key, bool& var) {
        std::string s;
        take(key, s);
        if (!s.empty()) var = s == "1" || s == "true" || s == "yes";
    }

    void reject_unused() const {
        for (const auto& [key, value] : values_)
            if (!used_.contains(key))
                throw std::runtime_error("unknown config key: " + key);
    }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

struct StudyFlags {
    std::string kernels = "stan,arc,ico,icocor,imp,imparc";
    int reps = 20;
    std::uint64_t seed = 1;
    std::string grid_b = "0,0.1";
    std::string grid_c = "0.2,0.4,0.6,0.8";
    std::string grid_d = "0.1,0.3,0.5,0.7,0.9";
    std::string out = "results.csv";
    int workers = 0;
    int lik_budget = 200;
    bool timing = false;

    void apply(ConfigFile& cfg) {
        cfg.take("kernels", kernels);
        cfg.take("reps", reps);
        cfg.take("seed", seed);
        cfg.take("grid-b", grid_b);
        cfg.take("grid-c", grid_c);
        cfg.take("grid-d", grid_d);
        cfg.take("out", out);
        cfg.take("workers", workers);
        cfg.take("lik-budget", lik_budget);
        cfg.take("timing", timing);
    }
};

void add_study_flags(CLI::App* cmd, StudyFlags& f) {
    cmd->add_option("--kernels", f.kernels, "Comma-separated kernel names")
        ->capture_default_str();
    cmd->add_option("--reps", f.reps, "Replications per grid cell")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
    cmd->add_option("--grid-b", f.grid_b, "Comma-separated b values")->capture_default_str();
    cmd->add_option("--grid-c", f.grid_c, "Comma-separated c values")->capture_default_str();
    cmd->add_option("--grid-d", f.grid_d, "Comma-separated d values")->capture_default_str();
    cmd->add_option("--out", f.out, "Results CSV path")->capture_default_str();
    cmd->add_option("--workers", f.workers, "Worker threads (0 = all cores)")
        ->capture_default_str();
    cmd->add_option("--lik-budget", f.lik_budget, "Likelihood evaluations per model fit")
        ->capture_default_str();
    cmd->add_flag("--timing", f.timing,
                  "Record measured wall times (output is no longer byte-stable)");
}

hiker::StudyConfig to_config(const StudyFlags& f) {
    hiker::StudyConfig config;
    config.grid = hiker::make_grid(parse_doubles(f.grid_b, "--grid-b"),
                                   parse_doubles(f.grid_c, "--grid-c"),
                                   parse_doubles(f.grid_d, "--grid-d"));
    for (const auto& name : split_csv(f.kernels))
        config.kernels.push_back(hiker::kernel_from_name(name));
    config.replications = f.reps;
    config.master_seed = f.seed;
    config.workers = f.workers;
    config.likelihood_budget = f.lik_budget;
    config.record_time = f.timing;
    return config;
}

void write_results(const std::string& path, const std::vector<hiker::StudyRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    hiker::write_records_csv(out, records);
    if (!out) throw std::runtime_error("failed writing " + path);
    std::cout << "wrote " << records.size() << " records to " << path << "\n";
}

int run_analyze(const std::string& results_path, const std::string& scope,
                const std::string& out_path) {
    std::optional<hiker::Situation> situation;
    if (scope != "overall") {
        if (scope.size() != 1 || scope[0] < 'A' || scope[0] > 'E')
            throw std::runtime_error("--scope: expected overall or one of A..E");
        situation = static_cast<hiker::Situation>(scope[0] - 'A');
    }

    std::ifstream in(results_path);
    if (!in) throw std::runtime_error("cannot open results file: " + results_path);
    const auto records = hiker::read_records_csv(in);
    const auto analysis = hiker::analyze_records(records, situation);

    std::ofstream ranks(out_path, std::ios::binary);
    if (!ranks) throw std::runtime_error("cannot open output file: " + out_path);
    ranks << "kernel,mean_rank,blocks,scope\n";
    for (std::size_t j = 0; j < analysis.kernels.size(); ++j) {
        ranks << analysis.kernels[j] << ',' << hiker::format_double(analysis.nemenyi.mean_ranks[j])
              << ',' << analysis.table.blocks() << ',' << scope << '\n';
    }

    const std::string edges_path =
        out_path.size() > 4 && out_path.ends_with(".csv")
            ? out_path.substr(0, out_path.size() - 4) + "_edges.txt"
            : out_path + "_edges.txt";
    std::ofstream edges(edges_path, std::ios::binary);
    if (!edges) throw std::runtime_error("cannot open output file: " + edges_path);
    for (const auto& e : analysis.nemenyi.edges) {
        edges << analysis.kernels[e.from] << " -> " << analysis.kernels[e.to]
              << " level=" << hiker::format_double(e.level) << '\n';
    }

    std::cout << "scope " << scope << ": " << analysis.table.blocks() << " blocks, "
              << analysis.kernels.size() << " kernels\n";
    std::cout << "friedman statistic " << analysis.friedman.statistic << ", p "
              << analysis.friedman.p_value << "\n";
    if (analysis.failed_rows > 0)
        std::cout << analysis.failed_rows << " failed rows imputed with block-worst metrics\n";
    if (analysis.dropped_blocks > 0)
        std::cout << analysis.dropped_blocks << " incomplete blocks dropped\n";
    for (std::size_t j = 0; j < analysis.kernels.size(); ++j)
        std::cout << "  " << analysis.kernels[j] << " mean rank "
                  << analysis.nemenyi.mean_ranks[j] << "\n";
    std::cout << "wrote " << out_path << " and " << edges_path << "\n";
    return 0;
}

// Pulls --config PATH (or --config=PATH) out of the raw arguments before
// CLI11 sees them; the file only supplies defaults.
std::optional<std::string> extract_config_path(std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw std::runtime_error("--config needs a file path");
            const std::string path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            return path;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            const std::string path = args[i].substr(9);
            args.erase(args.begin() + i);
            return path;
        }
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    try {
        StudyFlags mq_flags, smbo_flags;
        int train_size = 10, test_size = 1000;
        int budget = 10, init = 3, infill = 10000;
        std::string results_path, scope = "overall", ranks_out = "ranks.csv";

        const auto config_path = extract_config_path(args);
        if (config_path) {
            ConfigFile cfg = ConfigFile::load(*config_path);
            mq_flags.apply(cfg);
            smbo_flags.apply(cfg);
            cfg.take("train", train_size);
            cfg.take("test", test_size);
            cfg.take("budget", budget);
            cfg.take("init", init);
            cfg.take("infill", infill);
            cfg.take("results", results_path);
            cfg.take("scope", scope);
            cfg.take("out", ranks_out);
            cfg.reject_unused();
        }

        CLI::App app{"Kriging benchmark harness for hierarchical search spaces"};
        app.require_subcommand(1);

        auto add_config_stub = [](CLI::App* cmd) {
            // handled by extract_config_path; declared so --help documents it
            cmd->add_option("--config", "Read defaults from a key=value file");
        };

        auto* mq = app.add_subcommand("model-quality", "RMSE study of the six kernels");
        add_study_flags(mq, mq_flags);
        add_config_stub(mq);
        mq->add_option("--train", train_size, "Training samples per fit")->capture_default_str();
        mq->add_option("--test", test_size, "Test samples per fit")->capture_default_str();

        auto* smbo = app.add_subcommand("smbo", "Optimization (suboptimality) study");
        add_study_flags(smbo, smbo_flags);
        add_config_stub(smbo);
        smbo->add_option("--budget", budget, "Objective evaluations per run")
            ->capture_default_str();
        smbo->add_option("--init", init, "Initial uniform samples")->capture_default_str();
        smbo->add_option("--infill", infill, "EI evaluations per iteration")
            ->capture_default_str();

        auto* analyze = app.add_subcommand("analyze", "Blocked Friedman/Nemenyi rank analysis");
        add_config_stub(analyze);
        auto* results_opt =
            analyze->add_option("results", results_path, "Results CSV to analyze");
        if (results_path.empty()) results_opt->required();
        analyze->add_option("--scope", scope, "overall or a situation A..E")
            ->capture_default_str();
        analyze->add_option("--out", ranks_out, "Mean-rank CSV path")->capture_default_str();

        try {
            std::reverse(args.begin(), args.end());  // CLI11 consumes args back to front
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            return app.exit(e);
        }

        if (mq->parsed()) {
            auto config = to_config(mq_flags);
            config.train_size = train_size;
            config.test_size = test_size;
            write_results(mq_flags.out, hiker::run_model_quality(config));
        } else if (smbo->parsed()) {
            auto config = to_config(smbo_flags);
            config.smbo_budget = budget;
            config.smbo_init = init;
            config.infill_budget = infill;
            write_results(smbo_flags.out, hiker::run_smbo_study(config));
        } else if (analyze->parsed()) {
            return run_analyze(results_path, scope, ranks_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
