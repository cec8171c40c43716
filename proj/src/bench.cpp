#include "mpmat/bench.hpp"

#include "mpmat/gemm.hpp"
#include "mpmat/gen.hpp"
#include "mpmat/lu.hpp"
#include "mpmat/oracle.hpp"
#include "mpmat/ozaki.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpmat {

const char* const kBenchCsvHeader =
    "algo,precision,n,D,K,threads,seed,reps,t_split,t_product,t_accum,t_total,max_rel_err";

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* precision_name(BenchPrecision p) {
    switch (p) {
    case BenchPrecision::dd: return "dd";
    case BenchPrecision::td: return "td";
    case BenchPrecision::qd: return "qd";
    }
    return "?";
}

const char* algo_name(BenchAlgo a) {
    switch (a) {
    case BenchAlgo::simple: return "simple";
    case BenchAlgo::strassen: return "strassen";
    case BenchAlgo::ozaki: return "ozaki";
    }
    return "?";
}

GemmBackend pick_backend(const BenchConfig& cfg) {
    if (cfg.backend == BenchBackend::external) {
#ifdef MPMAT_WITH_CBLAS
        return cblas_backend();
#else
        throw param_error("external backend requested but not built in");
#endif
    }
    return reference_backend();
}

void apply_threads(int threads) {
    if (threads < 1) throw param_error("threads must be >= 1");
#ifdef _OPENMP
    omp_set_num_threads(threads);
#else
    if (threads != 1) throw param_error("built without OpenMP; only --threads 1 available");
#endif
}

void validate(const BenchConfig& cfg) {
    if (cfg.dims.empty()) throw param_error("config: at least one dimension required");
    for (std::size_t n : cfg.dims)
        if (n < 1) throw param_error("config: dimensions must be >= 1");
    if (cfg.reps < 1) throw param_error("config: reps must be >= 1");
    if (cfg.algo == BenchAlgo::ozaki && !cfg.lu) {
        if (cfg.splits.empty()) throw param_error("config: ozaki needs at least one split count");
        for (int d : cfg.splits)
            if (d < 1) throw param_error("config: split counts must be >= 1");
    }
    if (cfg.cutoff < 1) throw param_error("config: cutoff must be >= 1");
    if (cfg.lu && (cfg.panel_step < 1)) throw param_error("config: panel step must be >= 1");
}

// Triple loop accumulating through the low-cost addition variant.
template <int K>
DenseMatrix<MultiFloat<K>> gemm_simple_sloppy(const DenseMatrix<MultiFloat<K>>& a,
                                              const DenseMatrix<MultiFloat<K>>& b) {
    const std::size_t m = a.rows(), l = a.cols(), n = b.cols();
    DenseMatrix<MultiFloat<K>> c(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < l; ++k) {
            const MultiFloat<K>& aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j)
                c(i, j) = MultiFloat<K>::add_sloppy(c(i, j), aik * b(k, j));
        }
    return c;
}

template <int K>
std::vector<BenchRecord> gemm_bench(const BenchConfig& cfg) {
    std::vector<BenchRecord> records;
    const GemmBackend backend = pick_backend(cfg);

    for (std::size_t n : cfg.dims) {
        auto a = gen_matrix_eq1<K>(n, n, cfg.seed);
        auto b = gen_matrix_eq1<K>(n, n, cfg.seed + 1);

        oracle::ExactMatrix ref;
        const bool with_oracle = n <= cfg.oracle_cap;
        if (with_oracle) ref = oracle::exact_gemm(a, b);

        const std::vector<int> dlist =
            cfg.algo == BenchAlgo::ozaki ? cfg.splits : std::vector<int>{0};

        for (int d : dlist) {
            BenchRecord rec;
            rec.algo = algo_name(cfg.algo);
            rec.precision = precision_name(cfg.precision);
            rec.n = n;
            rec.threads = cfg.threads;
            rec.seed = cfg.seed;
            rec.reps = cfg.reps;
            if (cfg.algo == BenchAlgo::ozaki) rec.split_count = d;

            DenseMatrix<MultiFloat<K>> c(n, n);
            double best = -1.0;
            for (int rep = 0; rep < cfg.reps; ++rep) {
                OzakiProfile prof;
                auto t0 = clock_type::now();
                switch (cfg.algo) {
                case BenchAlgo::simple:
                    c = cfg.sloppy_add ? gemm_simple_sloppy(a, b) : gemm_simple(a, b);
                    break;
                case BenchAlgo::strassen:
                    c = strassen(a, b, cfg.cutoff);
                    break;
                case BenchAlgo::ozaki: {
                    auto [prod, p] = ozaki_gemm(a, b, d, backend);
                    c = std::move(prod);
                    prof = p;
                    break;
                }
                }
                double total = seconds_since(t0);
                if (best < 0.0 || total < best) { // phase times follow the best rep
                    best = total;
                    rec.t_split = prof.split_seconds;
                    rec.t_product = prof.product_seconds;
                    rec.t_accum = prof.accumulate_seconds;
                }
            }
            rec.t_total = best;
            if (with_oracle) rec.max_rel_err = oracle::max_rel_error(c, ref);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

template <int K>
std::vector<BenchRecord> lu_bench(const BenchConfig& cfg) {
    std::vector<BenchRecord> records;
    GemmChoice choice;
    switch (cfg.algo) {
    case BenchAlgo::simple: choice.path = GemmPath::simple; break;
    case BenchAlgo::strassen: choice.path = GemmPath::strassen; break;
    case BenchAlgo::ozaki: choice.path = GemmPath::ozaki; break;
    }
    choice.cutoff = cfg.cutoff;
    choice.split_count = cfg.splits.empty() ? 6 : cfg.splits.front();
    choice.backend = pick_backend(cfg);

    for (std::size_t n : cfg.dims) {
        auto sys = gen_lu_system<K>(n, cfg.seed);

        std::vector<mpq_class> xref;
        const bool with_oracle = n <= cfg.oracle_cap;
        if (with_oracle) xref = oracle::exact_solve(sys.a, sys.b);

        std::vector<std::size_t> panels;
        for (std::size_t k = std::min(cfg.panel_step, n); k < n; k += cfg.panel_step)
            panels.push_back(k);
        panels.push_back(n);

        for (std::size_t panel : panels) {
            BenchRecord rec;
            rec.algo = algo_name(cfg.algo);
            rec.precision = precision_name(cfg.precision);
            rec.n = n;
            rec.panel = panel;
            if (cfg.algo == BenchAlgo::ozaki) rec.split_count = choice.split_count;
            rec.threads = cfg.threads;
            rec.seed = cfg.seed;
            rec.reps = cfg.reps;

            std::vector<MultiFloat<K>> x;
            double best = -1.0;
            for (int rep = 0; rep < cfg.reps; ++rep) {
                auto t0 = clock_type::now();
                x = lu_solve(sys.a, sys.b, panel, choice);
                double total = seconds_since(t0);
                if (best < 0.0 || total < best) best = total;
            }
            rec.t_total = best;
            if (with_oracle) {
                std::vector<oracle::BigFloat> xb(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) xb[i] = oracle::BigFloat(x[i]);
                rec.max_rel_err = oracle::max_rel_error_vec(xb, xref);
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

} // namespace

std::vector<BenchRecord> run_gemm_bench(const BenchConfig& cfg) {
    validate(cfg);
    apply_threads(cfg.threads);
    switch (cfg.precision) {
    case BenchPrecision::dd: return gemm_bench<2>(cfg);
    case BenchPrecision::td: return gemm_bench<3>(cfg);
    case BenchPrecision::qd: return gemm_bench<4>(cfg);
    }
    throw param_error("config: unknown precision");
}

std::vector<BenchRecord> run_lu_bench(const BenchConfig& cfg) {
    validate(cfg);
    apply_threads(cfg.threads);
    switch (cfg.precision) {
    case BenchPrecision::dd: return lu_bench<2>(cfg);
    case BenchPrecision::td: return lu_bench<3>(cfg);
    case BenchPrecision::qd: return lu_bench<4>(cfg);
    }
    throw param_error("config: unknown precision");
}

std::string csv_line(const BenchRecord& r) {
    std::ostringstream os;
    os << r.algo << ',' << r.precision << ',' << r.n << ',';
    if (r.split_count) os << *r.split_count;
    os << ',';
    if (r.panel) os << *r.panel;
    os << ',' << r.threads << ',' << r.seed << ',' << r.reps << ',' << fmt_double(r.t_split)
       << ',' << fmt_double(r.t_product) << ',' << fmt_double(r.t_accum) << ','
       << fmt_double(r.t_total) << ',';
    if (r.max_rel_err) os << fmt_double(*r.max_rel_err);
    return os.str();
}

std::optional<BenchRecord> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    if (fields.size() != 13) return std::nullopt;
    try {
        BenchRecord r;
        r.algo = fields[0];
        r.precision = fields[1];
        r.n = std::stoul(fields[2]);
        if (!fields[3].empty()) r.split_count = std::stoi(fields[3]);
        if (!fields[4].empty()) r.panel = std::stoul(fields[4]);
        r.threads = std::stoi(fields[5]);
        r.seed = std::stoull(fields[6]);
        r.reps = std::stoi(fields[7]);
        r.t_split = std::stod(fields[8]);
        r.t_product = std::stod(fields[9]);
        r.t_accum = std::stod(fields[10]);
        r.t_total = std::stod(fields[11]);
        if (!fields[12].empty()) r.max_rel_err = std::stod(fields[12]);
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void emit_csv(const std::vector<BenchRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("emit_csv: cannot open " + path);
    os << kBenchCsvHeader << '\n';
    for (const auto& r : records) os << csv_line(r) << '\n';
    if (!os) throw io_error("emit_csv: write failure on " + path);
}

void emit_plotdata(const std::vector<BenchRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("emit_plotdata: cannot open " + path);

    // group into per-figure series: time panel and error panel, one series
    // per (algo, precision, D, K), x axis n
    using Key = std::tuple<std::string, std::string, int, long>;
    std::map<Key, std::vector<const BenchRecord*>> series;
    for (const auto& r : records)
        series[{r.algo, r.precision, r.split_count.value_or(-1),
                r.panel ? static_cast<long>(*r.panel) : -1}]
            .push_back(&r);

    auto series_name = [](const Key& k) {
        std::ostringstream os2;
        os2 << std::get<0>(k) << '-' << std::get<1>(k);
        if (std::get<2>(k) >= 0) os2 << "-D" << std::get<2>(k);
        if (std::get<3>(k) >= 0) os2 << "-K" << std::get<3>(k);
        return os2.str();
    };

    os << "# panel: time  (x = n, y = seconds)\n";
    for (const auto& [key, recs] : series) {
        os << "# series " << series_name(key) << "\n";
        for (const auto* r : recs) os << r->n << ' ' << fmt_double(r->t_total) << '\n';
        os << '\n';
    }
    os << "# panel: error  (x = n, y = max relative error)\n";
    for (const auto& [key, recs] : series) {
        os << "# series " << series_name(key) << "\n";
        for (const auto* r : recs)
            if (r->max_rel_err) os << r->n << ' ' << fmt_double(*r->max_rel_err) << '\n';
        os << '\n';
    }
    if (!os) throw io_error("emit_plotdata: write failure on " + path);
}

} // namespace mpmat
