#include "bregman/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "bregman/errors.hpp"

namespace bregman {

namespace {

constexpr const char* kMagic = "BREGMAN-KIT INSTANCE 1";

void write_array(std::ostream& out, const std::string& name, const Matrix& M) {
    out << "array " << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            auto bits = std::bit_cast<std::uint64_t>(M(i, j));
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
            char buf[8];
            std::memcpy(buf, &bits, 8);
            out.write(buf, 8);
        }
    }
}

Matrix read_array(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            char buf[8];
            if (!in.read(buf, 8)) throw IoError("instance file: truncated array data");
            std::uint64_t bits;
            std::memcpy(&bits, buf, 8);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
            M(i, j) = std::bit_cast<double>(bits);
        }
    }
    return M;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw IoError("instance file: bad value for '" + key + "': " + text);
    }
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_instance(std::ostream& out, const Instance& instance) {
    const InstanceSpec& s = instance.spec;
    out << kMagic << '\n';
    out << "family=" << to_string(s.family) << '\n';
    out << "n=" << s.n << '\n' << "m=" << s.m << '\n';
    out << "p=" << format_double(s.p) << '\n';
    out << "theta_p=" << format_double(s.theta_p) << '\n';
    out << "theta1=" << format_double(s.theta1) << '\n';
    if (s.density) out << "density=" << format_double(*s.density) << '\n';
    out << "seed=" << s.seed << '\n';
    for (const auto& note : instance.notes) out << "note=" << note << '\n';

    const CompositeProblem& pr = instance.problem;
    write_array(out, "A", pr.f->A());
    write_array(out, "b", pr.f->b());
    if (pr.ground_truth) write_array(out, "x_star", *pr.ground_truth);
    write_array(out, "x0", instance.x0);
    out << "end\n";
    if (!out) throw IoError("instance file: write failed");
}

void write_instance(const std::string& path, const Instance& instance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_instance(out, instance);
}

Instance read_instance(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMagic) throw IoError("instance file: bad header");

    InstanceSpec spec;
    std::vector<std::string> notes;
    std::map<std::string, Matrix> arrays;
    for (;;) {
        if (!std::getline(in, line)) throw IoError("instance file: missing 'end'");
        if (line == "end") break;
        if (line.rfind("array ", 0) == 0) {
            std::istringstream head(line.substr(6));
            std::string name;
            long long rows = -1, cols = -1;
            if (!(head >> name >> rows >> cols) || rows < 0 || cols < 0)
                throw IoError("instance file: bad array header '" + line + "'");
            arrays[name] = read_array(in, rows, cols);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("instance file: bad line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "family") spec.family = parse_family(val);
        else if (key == "n") spec.n = static_cast<int>(parse_double(key, val));
        else if (key == "m") spec.m = static_cast<int>(parse_double(key, val));
        else if (key == "p") spec.p = parse_double(key, val);
        else if (key == "theta_p") spec.theta_p = parse_double(key, val);
        else if (key == "theta1") spec.theta1 = parse_double(key, val);
        else if (key == "density") spec.density = parse_double(key, val);
        else if (key == "seed") spec.seed = std::stoull(val);
        else if (key == "note") notes.push_back(val);
        else throw IoError("instance file: unknown key '" + key + "'");
    }

    for (const char* name : {"A", "b", "x0"})
        if (!arrays.count(name)) throw IoError(std::string("instance file: missing array ") + name);
    Matrix A = std::move(arrays["A"]);
    if (A.rows() != spec.m || A.cols() != spec.n)
        throw IoError("instance file: A does not match n, m");
    auto as_vector = [&](const std::string& name, Eigen::Index size) -> Vector {
        const Matrix& M = arrays.at(name);
        if (M.cols() != 1 || M.rows() != size)
            throw IoError("instance file: array " + name + " has the wrong shape");
        return M.col(0);
    };
    Vector b = as_vector("b", spec.m);
    Vector x0 = as_vector("x0", spec.n);
    Vector x_star = arrays.count("x_star") ? as_vector("x_star", spec.n) : Vector();
    CompositeProblem problem = make_problem(spec, std::move(A), std::move(b), std::move(x_star));
    if (!arrays.count("x_star")) problem.ground_truth.reset();
    return Instance{spec, std::move(problem), std::move(x0), std::move(notes)};
}

Instance read_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_instance(in);
}

}  // namespace bregman
