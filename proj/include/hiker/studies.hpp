#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hiker/kernels.hpp"
#include "hiker/rank_stats.hpp"
#include "hiker/test_function.hpp"

namespace hiker {

enum class StudyKind { ModelQuality, Smbo };

const char* study_name(StudyKind study);

// Outcome of one (kernel, spec, replication) cell.
struct StudyRecord {
    StudyKind study = StudyKind::ModelQuality;
    KernelKind kernel = KernelKind::Stan;
    TestFunctionSpec spec;
    Situation situation = Situation::A;
    int replication = 0;
    double metric = 0.0;  // RMSE or suboptimality; NaN when failed
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    bool failed = false;
};

struct StudyConfig {
    std::vector<TestFunctionSpec> grid;
    std::vector<KernelKind> kernels;
    int replications = 20;
    std::uint64_t master_seed = 1;
    int workers = 0;  // 0: hardware concurrency

    int likelihood_budget = 200;
    // model quality
    int train_size = 10;
    int test_size = 1000;
    // smbo
    int smbo_budget = 10;
    int smbo_init = 3;
    int infill_budget = 10000;

    bool record_time = false;  // measured wall times break byte-stable output
};

// Deterministic job seed shared by all kernels of one (study, spec,
// replication) cell, so the replication id is a valid blocking variable.
std::uint64_t job_seed(std::uint64_t master, StudyKind study, const TestFunctionSpec& spec,
                       int replication);

// 10-training-point / test-sample RMSE study over the grid.
std::vector<StudyRecord> run_model_quality(const StudyConfig& config);

// SMBO suboptimality study over the grid.
std::vector<StudyRecord> run_smbo_study(const StudyConfig& config);

void write_records_csv(std::ostream& os, const std::vector<StudyRecord>& records);
std::vector<StudyRecord> read_records_csv(std::istream& is);

struct AnalysisResult {
    std::vector<std::string> kernels;
    RankTable table;
    FriedmanResult friedman;
    NemenyiResult nemenyi;
    int dropped_blocks = 0;  // blocks missing at least one kernel
    int failed_rows = 0;
};

// Blocked rank analysis of a results file. Blocks are (spec, replication)
// pairs; failed rows are imputed with the worst metric of their block. An
// empty scope analyzes all rows, otherwise only the given situation.
AnalysisResult analyze_records(const std::vector<StudyRecord>& records,
                               std::optional<Situation> scope);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace hiker
