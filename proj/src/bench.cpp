#include "bregman/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "bregman/errors.hpp"
#include "bregman/random.hpp"
#include "bregman/serialize.hpp"
#include "bregman/trace_io.hpp"

namespace bregman {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool sentinel(double v) { return !std::isfinite(v) || v > kAggregateSentinel; }

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

template <class T>
std::string list(const std::vector<T>& values) {
    if (values.size() == 1) return std::to_string(values.front());
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
    return s + "]";
}

}  // namespace

std::vector<int> RunManifest::ns() const { return n_values.empty() ? std::vector<int>{instance.n} : n_values; }
std::vector<int> RunManifest::ms() const { return m_values.empty() ? std::vector<int>{instance.m} : m_values; }

void RunManifest::validate() const {
    if (reps < 1) throw SpecError("reps must be at least 1");
    if (algorithms.empty()) throw SpecError("no algorithms selected");
    if (out_dir.empty()) throw SpecError("output directory is required");
    for (int n : ns()) if (n < 1) throw SpecError("n must be positive");
    for (int m : ms()) if (m < 1) throw SpecError("m must be positive");
    for (Algorithm a : algorithms)
        if (a == Algorithm::BPG && instance.family != Family::NonnegKL)
            throw SpecError("BPG needs the NonnegKL family");
    InstanceSpec probe = instance;
    probe.n = ns().front();
    probe.m = ms().front();
    probe.validate();
    config.validate();
}

std::uint64_t derive_seed(std::uint64_t base, int rep) {
    return mix64(base + static_cast<std::uint64_t>(rep + 1) * 0x9E3779B97F4A7C15ULL);
}

int worker_count() {
    if (const char* env = std::getenv("BREGMAN_KIT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string trace_file_name(Family family, int m, int n, int rep, Algorithm algorithm) {
    return lower(to_string(family)) + "_m" + std::to_string(m) + "_n" + std::to_string(n) + "_r" +
           std::to_string(rep) + "_" + to_string(algorithm) + ".csv";
}

std::vector<AggregateRow> aggregate(const std::vector<RunResult>& runs,
                                    const std::vector<Algorithm>& order) {
    struct Acc {
        int runs = 0, with_acc = 0;
        double it = 0, obj = 0, acc = 0;
    };
    std::map<std::pair<int, int>, std::map<Algorithm, Acc>> groups;
    for (const auto& r : runs) {
        Acc& a = groups[{r.m, r.n}][r.algorithm];
        ++a.runs;
        a.it += r.iterations;
        a.obj += r.final_psi;
        if (r.final_accuracy) {
            ++a.with_acc;
            a.acc += *r.final_accuracy;
        }
    }

    std::vector<AggregateRow> rows;
    for (const auto& [key, by_algo] : groups) {
        std::vector<AggregateRow> group;
        for (Algorithm algo : order) {
            auto it = by_algo.find(algo);
            if (it == by_algo.end()) continue;
            const Acc& a = it->second;
            AggregateRow row;
            row.m = key.first;
            row.n = key.second;
            row.algorithm = algo;
            row.runs = a.runs;
            row.iteration = a.it / a.runs;
            row.obj = a.obj / a.runs;
            // Accuracy is only meaningful when every run carried ground truth.
            if (a.with_acc == a.runs) row.acc = a.acc / a.runs;
            group.push_back(row);
        }
        double best_it = INFINITY, best_obj = INFINITY, best_acc = INFINITY;
        for (const auto& row : group) {
            best_it = std::min(best_it, row.iteration);
            if (!sentinel(row.obj)) best_obj = std::min(best_obj, row.obj);
            if (row.acc && !sentinel(*row.acc)) best_acc = std::min(best_acc, *row.acc);
        }
        for (auto& row : group) {
            std::vector<std::string> marks;
            if (row.iteration == best_it) marks.emplace_back("iteration");
            if (!sentinel(row.obj) && row.obj == best_obj) marks.emplace_back("obj");
            if (row.acc && !sentinel(*row.acc) && *row.acc == best_acc) marks.emplace_back("acc");
            for (std::size_t i = 0; i < marks.size(); ++i) row.best += (i ? "|" : "") + marks[i];
            rows.push_back(row);
        }
    }
    return rows;
}

std::string runs_csv(const std::vector<RunResult>& runs) {
    std::ostringstream o;
    o << "m,n,rep,seed,algorithm,status,iterations,final_psi,final_accuracy,trace,ms\n";
    for (const auto& r : runs) {
        o << r.m << ',' << r.n << ',' << r.rep << ',' << r.seed << ',' << to_string(r.algorithm)
          << ',' << to_string(r.status) << ',' << r.iterations << ',' << format_double(r.final_psi)
          << ',' << (r.final_accuracy ? format_double(*r.final_accuracy) : "") << ','
          << r.trace_file << ',' << format_double(r.wall_ms) << '\n';
    }
    return o.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream o;
    o << "m,n,algorithm,runs,iteration,obj,acc,best\n";
    for (const auto& r : rows) {
        o << r.m << ',' << r.n << ',' << to_string(r.algorithm) << ',' << r.runs << ','
          << format_double(r.iteration) << ',' << (sentinel(r.obj) ? "---" : format_double(r.obj))
          << ',';
        if (r.acc) o << (sentinel(*r.acc) ? "---" : format_double(*r.acc));
        o << ',' << r.best << '\n';
    }
    return o.str();
}

std::string manifest_text(const RunManifest& mf) {
    const InstanceSpec& s = mf.instance;
    const SolverConfig& c = mf.config;
    std::ostringstream o;
    o << "# bregman_bench manifest; keys match the command-line flags\n";
    o << "family=" << to_string(s.family) << '\n';
    o << "algo=";
    if (mf.algorithms.size() > 1) o << '[';
    for (std::size_t i = 0; i < mf.algorithms.size(); ++i)
        o << (i ? "," : "") << '"' << to_string(mf.algorithms[i]) << '"';
    if (mf.algorithms.size() > 1) o << ']';
    o << '\n';
    o << "n=" << list(mf.ns()) << '\n' << "m=" << list(mf.ms()) << '\n';
    o << "p=" << format_double(s.p) << '\n';
    o << "theta-p=" << format_double(s.theta_p) << '\n';
    o << "theta1=" << format_double(s.theta1) << '\n';
    if (s.density) o << "density=" << format_double(*s.density) << '\n';
    if (c.lambda) o << "lambda=" << format_double(*c.lambda) << '\n';
    o << "alpha=" << format_double(c.alpha) << '\n';
    o << "eta=" << format_double(c.eta) << '\n';
    o << "kappa=" << format_double(c.kappa) << '\n';
    o << "seed=" << s.seed << '\n';
    o << "reps=" << mf.reps << '\n';
    o << "max-iter=" << c.max_iter << '\n';
    o << "tol=" << format_double(c.tol) << '\n';
    o << "rn-line-search=" << (c.rn_line_search ? "true" : "false") << '\n';
    o << "out=\"" << mf.out_dir << "\"\n";
    for (const auto& note : mf.notes) o << "# note: " << note << '\n';
    return o.str();
}

BenchReport run_benchmark(const RunManifest& manifest) {
    manifest.validate();
    const fs::path root(manifest.out_dir);
    std::error_code ec;
    fs::create_directories(root / "traces", ec);
    if (ec) throw IoError("cannot create '" + (root / "traces").string() + "': " + ec.message());

    struct Task {
        int m, n, rep;
    };
    std::vector<Task> tasks;
    for (int m : manifest.ms())
        for (int n : manifest.ns())
            for (int rep = 0; rep < manifest.reps; ++rep) tasks.push_back({m, n, rep});

    const std::size_t per_task = manifest.algorithms.size();
    std::vector<RunResult> results(tasks.size() * per_task);
    std::vector<char> done(tasks.size(), 0);
    std::vector<std::string> notes(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (error) return;
            }
            try {
                const Task& task = tasks[i];
                InstanceSpec spec = manifest.instance;
                spec.m = task.m;
                spec.n = task.n;
                spec.seed = derive_seed(manifest.instance.seed, task.rep);
                const Instance inst = gen_instance(spec);
                for (const auto& note : inst.notes) notes[i] += note + "; ";
                for (std::size_t a = 0; a < per_task; ++a) {
                    const Algorithm algo = manifest.algorithms[a];
                    const auto t0 = std::chrono::steady_clock::now();
                    const IterateTrace trace = solve(algo, inst.problem, manifest.config, inst.x0);
                    RunResult& r = results[i * per_task + a];
                    r.wall_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - t0).count();
                    r.m = task.m;
                    r.n = task.n;
                    r.rep = task.rep;
                    r.seed = spec.seed;
                    r.algorithm = algo;
                    r.status = trace.status;
                    r.iterations = trace.iterations();
                    r.final_psi = trace.final_psi();
                    r.final_accuracy = trace.final_accuracy();
                    r.trace_file = "traces/" + trace_file_name(spec.family, task.m, task.n, task.rep, algo);
                    write_trace_csv((root / r.trace_file).string(), trace);
                }
                done[i] = 1;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    const int threads = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    BenchReport report;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (done[i])
            for (std::size_t a = 0; a < per_task; ++a) report.runs.push_back(results[i * per_task + a]);

    RunManifest echoed = manifest;
    if (!notes.empty() && done[0]) echoed.notes.push_back("first replication: " + notes[0]);
    write_file(root / "manifest.txt", manifest_text(echoed));
    write_file(root / "runs.csv", runs_csv(report.runs));
    if (error) std::rethrow_exception(error);

    report.rows = aggregate(report.runs, manifest.algorithms);
    write_file(root / "aggregate.csv", aggregate_csv(report.rows));
    return report;
}

}  // namespace bregman
