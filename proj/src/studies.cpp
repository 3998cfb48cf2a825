#include "hiker/studies.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "hiker/gp.hpp"
#include "hiker/smbo.hpp"

namespace hiker {
namespace {

std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

struct Job {
    int spec_index = 0;
    int kernel_index = 0;
    int replication = 0;
};

// Runs one job per index on a small worker pool; results land in
// pre-assigned slots so the output order is independent of scheduling.
template <typename Fn>
void run_jobs(int count, int workers, Fn&& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, count));

    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<Job> enumerate_jobs(const StudyConfig& config) {
    std::vector<Job> jobs;
    jobs.reserve(config.grid.size() * config.kernels.size() * config.replications);
    for (int s = 0; s < static_cast<int>(config.grid.size()); ++s)
        for (int k = 0; k < static_cast<int>(config.kernels.size()); ++k)
            for (int r = 0; r < config.replications; ++r) jobs.push_back({s, k, r});
    return jobs;
}

void check_config(const StudyConfig& config) {
    if (config.grid.empty()) throw std::invalid_argument("study grid is empty");
    if (config.kernels.empty()) throw std::invalid_argument("kernel list is empty");
    if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
    for (const auto& spec : config.grid) classify_situation(spec);  // throws on bad constants
}

}  // namespace

const char* study_name(StudyKind study) {
    return study == StudyKind::ModelQuality ? "model_quality" : "smbo";
}

std::uint64_t job_seed(std::uint64_t master, StudyKind study, const TestFunctionSpec& spec,
                       int replication) {
    const std::uint64_t study_tag = study == StudyKind::ModelQuality ? 1 : 2;
    std::uint64_t cell = mix_seed(mix_seed(double_bits(spec.b), double_bits(spec.c)),
                                  double_bits(spec.d));
    std::uint64_t s = mix_seed(master, study_tag);
    s = mix_seed(s, cell);
    return mix_seed(s, static_cast<std::uint64_t>(replication));
}

std::vector<StudyRecord> run_model_quality(const StudyConfig& config) {
    check_config(config);
    const auto jobs = enumerate_jobs(config);
    std::vector<StudyRecord> records(jobs.size());

    run_jobs(static_cast<int>(jobs.size()), config.workers, [&](int idx) {
        const Job& job = jobs[idx];
        const TestFunctionSpec spec = config.grid[job.spec_index];
        const KernelKind kernel = config.kernels[job.kernel_index];
        const SearchSpace space = make_benchmark_space(spec.c);

        StudyRecord rec;
        rec.study = StudyKind::ModelQuality;
        rec.kernel = kernel;
        rec.spec = spec;
        rec.situation = classify_situation(spec);
        rec.replication = job.replication;
        rec.seed = job_seed(config.master_seed, StudyKind::ModelQuality, spec, job.replication);

        const auto start = std::chrono::steady_clock::now();
        Rng rng(rec.seed);
        // Train and test sets come first off the stream, so every kernel of
        // this replication sees identical data.
        const auto train = space.sample_uniform(config.train_size, rng);
        const auto test = space.sample_uniform(config.test_size, rng);

        Eigen::VectorXd y(config.train_size);
        for (int i = 0; i < config.train_size; ++i) y[i] = test_function(spec, train[i]);

        try {
            FitConfig fc;
            fc.likelihood_budget = config.likelihood_budget;
            const KrigingModel model = fit(train, y, kernel, space, fc);
            std::vector<double> pred(test.size()), truth(test.size());
            for (std::size_t i = 0; i < test.size(); ++i) {
                pred[i] = model.predict_mean(test[i]);
                truth[i] = test_function(spec, test[i]);
            }
            rec.metric = rmse(pred, truth);
        } catch (const FitError&) {
            rec.metric = std::numeric_limits<double>::quiet_NaN();
            rec.failed = true;
        }
        if (config.record_time)
            rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records[idx] = rec;
    });
    return records;
}

std::vector<StudyRecord> run_smbo_study(const StudyConfig& config) {
    check_config(config);
    const auto jobs = enumerate_jobs(config);
    std::vector<StudyRecord> records(jobs.size());

    run_jobs(static_cast<int>(jobs.size()), config.workers, [&](int idx) {
        const Job& job = jobs[idx];
        const TestFunctionSpec spec = config.grid[job.spec_index];
        const KernelKind kernel = config.kernels[job.kernel_index];
        const SearchSpace space = make_benchmark_space(spec.c);

        StudyRecord rec;
        rec.study = StudyKind::Smbo;
        rec.kernel = kernel;
        rec.spec = spec;
        rec.situation = classify_situation(spec);
        rec.replication = job.replication;
        rec.seed = job_seed(config.master_seed, StudyKind::Smbo, spec, job.replication);

        SmboConfig sc;
        sc.init_size = config.smbo_init;
        sc.total_budget = config.smbo_budget;
        sc.kernel = kernel;
        sc.fit.likelihood_budget = config.likelihood_budget;
        sc.infill_budget = config.infill_budget;

        const auto start = std::chrono::steady_clock::now();
        Rng rng(rec.seed);
        const SmboHistory hist =
            smbo_run([&](const Point& x) { return test_function(spec, x); }, space, sc, rng);

        const double best = hist.best_value();
        double subopt = best - global_optimum(spec).value;
        if (subopt < 0.0) {
            if (subopt < -1e-9) throw std::logic_error("suboptimality below analytic optimum");
            subopt = 0.0;
        }
        rec.metric = subopt;
        if (config.record_time)
            rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records[idx] = rec;
    });
    return records;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_records_csv(std::ostream& os, const std::vector<StudyRecord>& records) {
    os << "study,kernel,b,c,d,situation,replication,metric,seed,wall_time_s,failed\n";
    for (const auto& r : records) {
        os << study_name(r.study) << ',' << kernel_name(r.kernel) << ',' << format_double(r.spec.b)
           << ',' << format_double(r.spec.c) << ',' << format_double(r.spec.d) << ','
           << situation_label(r.situation) << ',' << r.replication << ','
           << format_double(r.metric) << ',' << r.seed << ',' << format_double(r.wall_time_s)
           << ',' << (r.failed ? 1 : 0) << '\n';
    }
}

std::vector<StudyRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("results file is empty");
    if (line != "study,kernel,b,c,d,situation,replication,metric,seed,wall_time_s,failed")
        throw std::invalid_argument("results file has an unexpected header");

    auto parse_double = [](const std::string& s) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad number in results file: " + s);
        return v;
    };

    std::vector<StudyRecord> records;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 11)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 11 fields");

        StudyRecord r;
        if (f[0] == "model_quality") r.study = StudyKind::ModelQuality;
        else if (f[0] == "smbo") r.study = StudyKind::Smbo;
        else throw std::invalid_argument("unknown study: " + f[0]);
        r.kernel = kernel_from_name(f[1]);
        r.spec = {parse_double(f[2]), parse_double(f[3]), parse_double(f[4])};
        r.situation = classify_situation(r.spec);
        if (std::string(1, situation_label(r.situation)) != f[5])
            throw std::invalid_argument("situation label mismatch on line " +
                                        std::to_string(line_no));
        r.replication = std::stoi(f[6]);
        r.metric = parse_double(f[7]);
        r.seed = std::stoull(f[8]);
        r.wall_time_s = parse_double(f[9]);
        r.failed = f[10] == "1";
        records.push_back(r);
    }
    return records;
}

AnalysisResult analyze_records(const std::vector<StudyRecord>& records,
                               std::optional<Situation> scope) {
    std::vector<const StudyRecord*> rows;
    for (const auto& r : records)
        if (!scope || r.situation == *scope) rows.push_back(&r);
    if (rows.empty()) throw std::invalid_argument("no rows in the requested scope");

    std::vector<std::string> kernels;
    for (const auto* r : rows) {
        const std::string name = kernel_name(r->kernel);
        if (std::find(kernels.begin(), kernels.end(), name) == kernels.end())
            kernels.push_back(name);
    }
    std::sort(kernels.begin(), kernels.end());
    const int k = static_cast<int>(kernels.size());

    auto kernel_index = [&](KernelKind kind) {
        return static_cast<int>(std::find(kernels.begin(), kernels.end(), kernel_name(kind)) -
                                kernels.begin());
    };

    // Block key: (b, c, d, replication).
    using BlockKey = std::tuple<double, double, double, int>;
    std::map<BlockKey, std::vector<const StudyRecord*>> blocks;
    for (const auto* r : rows)
        blocks[{r->spec.b, r->spec.c, r->spec.d, r->replication}].push_back(r);

    AnalysisResult out;
    out.kernels = kernels;
    out.table.treatments = kernels;

    for (const auto& [key, members] : blocks) {
        std::vector<double> metrics(k, std::numeric_limits<double>::quiet_NaN());
        double worst = -std::numeric_limits<double>::infinity();
        int filled = 0;
        for (const auto* r : members) {
            const int j = kernel_index(r->kernel);
            if (!std::isnan(metrics[j]))
                throw std::invalid_argument("duplicate kernel row within a block");
            metrics[j] = r->metric;
            ++filled;
            if (r->failed) ++out.failed_rows;
            else worst = std::max(worst, r->metric);
        }
        if (filled != k) {
            ++out.dropped_blocks;
            continue;
        }
        // Pessimistic imputation keeps failed kernels rankable.
        if (!std::isfinite(worst)) worst = 0.0;
        for (double& m : metrics)
            if (std::isnan(m)) m = worst;
        out.table.ranks.push_back(average_ranks(metrics));
    }

    if (out.table.blocks() < 2)
        throw std::invalid_argument("need at least two complete blocks for the rank analysis");
    out.friedman = friedman_test(out.table);
    out.nemenyi = nemenyi_posthoc(out.table);
    return out;
}

}  // namespace hiker
