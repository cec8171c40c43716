#pragma once
#include "backend.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Benchmark harness: runs the accuracy/timing experiments at desk scale
// and emits CSV plus plot-ready series. Timing is best-of-reps on the
// monotonic clock; error columns are filled only when the exact oracle is
// affordable (n <= oracle_cap) and are bit-stable for a fixed seed.

namespace mpmat {

enum class BenchPrecision { dd, td, qd };
enum class BenchAlgo { simple, strassen, ozaki };
enum class BenchBackend { reference, external };

struct BenchConfig {
    BenchPrecision precision = BenchPrecision::dd;
    BenchAlgo algo = BenchAlgo::ozaki;
    std::vector<std::size_t> dims;
    std::vector<int> splits{6};       // ozaki
    std::size_t cutoff = 32;          // strassen
    bool lu = false;
    std::size_t panel_step = 32;
    std::uint64_t seed = 1;
    int reps = 3;
    int threads = 1;
    BenchBackend backend = BenchBackend::reference;
    bool sloppy_add = false;          // simple GEMM through the low-cost addition
    std::size_t oracle_cap = 256;
};

struct BenchRecord {
    std::string algo;
    std::string precision;
    std::size_t n = 0;
    std::optional<int> split_count;       // D, ozaki only
    std::optional<std::size_t> panel;     // K, LU only
    int threads = 1;
    std::uint64_t seed = 0;
    int reps = 1;
    double t_split = 0.0;
    double t_product = 0.0;
    double t_accum = 0.0;
    double t_total = 0.0;
    std::optional<double> max_rel_err;
};

extern const char* const kBenchCsvHeader;

std::vector<BenchRecord> run_gemm_bench(const BenchConfig& cfg);
std::vector<BenchRecord> run_lu_bench(const BenchConfig& cfg);

void emit_csv(const std::vector<BenchRecord>& records, const std::string& path);
void emit_plotdata(const std::vector<BenchRecord>& records, const std::string& path);

std::string csv_line(const BenchRecord& r);

// Parses one data line of the v1 CSV schema (round-trip of csv_line).
std::optional<BenchRecord> parse_csv_line(const std::string& line);

} // namespace mpmat
