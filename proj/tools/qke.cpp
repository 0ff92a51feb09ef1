// qke — command-line interface to the q-deformed random diagram library.
//
// Subcommands: verify | prob | enumerate | kernel | sample | density | shape
//              | clt | render.  All outputs carry "schema": 1 (JSON), a header
//              row with 17-significant-digit floats (CSV), or are
//              self-contained XML (SVG).  Runs are bit-reproducible for a
//              fixed seed and option set.

#include "qk/asymptotics.hpp"
#include "qk/ensemble.hpp"
#include "qk/measures.hpp"
#include "qk/partition.hpp"
#include "qk/qmath.hpp"
#include "qk/sampler.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using nlohmann::ordered_json;
using namespace qk;

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary matrix output assumes a little-endian host");

// ---------------------------------------------------------------------------
// shared option handling

struct Opts {
    int n = 2;
    int k = 2;
    std::string q_str;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    std::string spec_str = "pp";
    std::uint64_t seed = 12345;
    std::string out;
    std::string format = "json";
    unsigned threads = 0;  // 0 = auto

    // subcommand-specific
    std::string lambda_str;
    std::string matrix_out;
    std::string method = "dpp";
    std::string stat_name = "s";
    std::uint64_t count = 1;
    std::uint64_t samples = 0;
    int grid = 256;
    bool corrupt_weight = false;
    bool overlay = false;
    bool curve_only = false;

    bool has_gamma() const { return !std::isnan(gamma); }
    Spec spec() const { return spec_str == "pip" ? Spec::PIP : Spec::PP; }
    unsigned worker_count() const {
        if (threads > 0) return threads;
        unsigned hw = std::thread::hardware_concurrency();
        return std::min(hw == 0 ? 1u : hw, 8u);
    }
};

void add_common_flags(CLI::App* cmd, Opts& o) {
    cmd->configurable();  // selectable through a [section] in the config file
    cmd->add_option("--n", o.n, "number of rows of the box");
    cmd->add_option("--k", o.k, "number of columns of the box");
    cmd->add_option("--q", o.q_str, "base q as a decimal or fraction (e.g. 0.8 or 4/5)");
    cmd->add_option("--gamma", o.gamma, "scale parameter; sets q = exp(-gamma/n)");
    cmd->add_option("--spec", o.spec_str, "spectral type")
        ->check(CLI::IsMember({"pp", "pip"}));
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    cmd->add_option("--threads", o.threads, "worker threads for sampling (0 = auto)");
}

Rational parse_rational(const std::string& s) {
    using boost::multiprecision::cpp_int;
    const auto bad = [&] {
        return std::invalid_argument("cannot parse '" + s + "' as a decimal or fraction");
    };
    if (s.empty()) throw bad();
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const cpp_int num(s.substr(0, slash));
        const cpp_int den(s.substr(slash + 1));
        if (den == 0) throw bad();
        return Rational(num, den);
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    std::string digits;
    int frac = 0;
    bool dot = false, any = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.') {
            if (dot) throw bad();
            dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
        digits += c;
        any = true;
        if (dot) ++frac;
    }
    if (!any) throw bad();
    // strip leading zeros so cpp_int does not read the string as octal
    const auto nz = digits.find_first_not_of('0');
    digits = (nz == std::string::npos) ? "0" : digits.substr(nz);
    cpp_int den = 1;
    for (int j = 0; j < frac; ++j) den *= 10;
    Rational r{cpp_int(digits), den};
    return neg ? -r : r;
}

double numeric_q(const Opts& o) {
    if (!o.q_str.empty()) return to_double(parse_rational(o.q_str));
    if (o.has_gamma()) return std::exp(-o.gamma / o.n);
    throw std::runtime_error("either --q or --gamma is required");
}

Rational exact_q(const Opts& o) {
    if (o.q_str.empty()) throw std::runtime_error("this subcommand requires an exact --q");
    const Rational q = parse_rational(o.q_str);
    if (q <= 0 || q == 1) throw std::runtime_error("--q must be positive and different from 1");
    return q;
}

Partition parse_partition(const std::string& s, int n, int k) {
    std::vector<int> rows;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) rows.push_back(std::stoi(tok));
    if (static_cast<int>(rows.size()) > n)
        throw std::runtime_error("--lambda has more than n rows");
    rows.resize(n, 0);
    const Partition lam{rows};
    if (!lam.fits_box(n, k)) throw std::runtime_error("--lambda does not fit the n x k box");
    return lam;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string rational_str(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

ordered_json params_json(const Opts& o, bool include_seed = false) {
    ordered_json p;
    p["n"] = o.n;
    p["k"] = o.k;
    p["spec"] = o.spec_str;
    if (!o.q_str.empty()) p["q"] = o.q_str;
    if (o.has_gamma()) {
        p["gamma"] = o.gamma;
        p["q_effective"] = std::exp(-o.gamma / o.n);
    }
    if (include_seed) p["seed"] = o.seed;
    return p;
}

void emit_json(const Opts& o, const ordered_json& j) {
    std::ofstream file;
    std::ostream& os = open_out(file, o.out);
    os << j.dump(2) << "\n";
}

void require_format(const Opts& o, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (o.format == a) return;
    throw std::runtime_error("--format " + o.format + " is not supported by this subcommand");
}

LimitParams limit_params(const Opts& o) {
    if (!o.has_gamma()) throw std::runtime_error("this subcommand requires --gamma");
    return LimitParams{o.gamma, static_cast<double>(o.k) / o.n, o.spec()};
}

// ---------------------------------------------------------------------------
// deterministic parallel sampling keyed by sample index

std::vector<Partition> dpp_batch(const ModelParams<double>& mp, std::uint64_t count,
                                 std::uint64_t seed, unsigned workers) {
    const KernelMatrix K = spectral_kernel(mp);
    std::vector<Partition> out(count);
    auto body = [&](std::uint64_t i) {
        std::mt19937_64 g = substream(seed, i);
        std::vector<int> coords = sample_dpp_once(K.m, K.rank, g);
        std::reverse(coords.begin(), coords.end());
        out[i] = from_coords(coords, mp.n);
    };
    if (workers <= 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return out;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= count) break;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
    return out;
}

// ---------------------------------------------------------------------------
// verify

Rational determinantal_term(const Partition& lam, const ModelParams<Rational>& p, bool corrupt) {
    const std::vector<int> a = to_coords(lam, p.n);
    Rational t(1);
    for (int i = 0; i < p.n; ++i)
        for (int j = i + 1; j < p.n; ++j) {
            const Rational d = pow_int(p.q, -a[i]) - pow_int(p.q, -a[j]);
            t *= d * d;
        }
    for (int i = 0; i < p.n; ++i) {
        Rational w = weight(a[i], p);
        if (corrupt && a[i] == 0) w *= 2;  // test hook: damaged site-0 weight
        t *= w;
    }
    return t;
}

int run_verify(const Opts& o) {
    require_format(o, {"json"});
    if (o.n + o.k > 10)
        throw std::runtime_error("verify: the exact suite is limited to n + k <= 10");
    const Rational q = exact_q(o);
    const ModelParams<Rational> mq{o.n, o.k, q, o.spec()};
    const ModelParams<double> md{o.n, o.k, to_double(q), o.spec()};
    const int M = o.n + o.k;

    std::vector<Partition> sup;
    std::vector<Rational> probs;
    enumerate_in_box(o.n, o.k, [&](const Partition& lam) {
        sup.push_back(lam);
        probs.push_back(prob(lam, mq));
    });

    ordered_json checks;
    bool all = true;
    const auto record = [&](const std::string& name, bool pass, ordered_json detail) {
        detail["pass"] = pass;
        checks[name] = std::move(detail);
        all = all && pass;
    };

    // normalization: both the closed product form and the determinantal sum
    {
        Rational s1(0);
        for (const Rational& p : probs) s1 += p;
        const Rational z = determinantal_norm(mq);
        Rational s2(0);
        for (const Partition& lam : sup) s2 += determinantal_term(lam, mq, o.corrupt_weight);
        s2 /= z;
        record("normalization", s1 == 1 && s2 == 1,
               {{"sum_probability", rational_str(s1)}, {"sum_determinantal", rational_str(s2)}});
    }

    // exact agreement of the two probability formulas
    {
        const Rational z = determinantal_norm(mq);
        int mismatches = 0;
        for (std::size_t i = 0; i < sup.size(); ++i)
            if (probs[i] != determinantal_term(sup[i], mq, o.corrupt_weight) / z) ++mismatches;
        record("determinantal_match", mismatches == 0,
               {{"diagrams", sup.size()}, {"mismatches", mismatches}});
    }

    // kernel diagonal against exact one-site marginals
    {
        std::vector<double> marg(M, 0.0);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            const double p = to_double(probs[i]);
            for (int a : to_coords(sup[i], o.n)) marg[a] += p;
        }
        const KernelMatrix K = spectral_kernel(md);
        double dev = 0.0;
        for (int a = 0; a < M; ++a) dev = std::max(dev, std::abs(marg[a] - K.m(a, a)));
        record("kernel_diagonal", dev <= 1e-10, {{"max_deviation", dev}});
    }

    // orthonormality of the full polynomial family under the weight
    {
        const CDEvaluator ev(md);
        const Eigen::MatrixXd G = ev.gram_matrix(M);
        const double dev = (G - Eigen::MatrixXd::Identity(M, M)).cwiseAbs().maxCoeff();
        record("orthogonality", dev <= 1e-10, {{"max_deviation", dev}});
    }

    // operator spectrum against the analytic eigenvalues
    {
        const TridiagonalOperator T = build_operator(md);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(T.diag, T.offdiag, Eigen::EigenvaluesOnly);
        const double lnq = std::log(md.q);
        const double pe = static_cast<double>(p_exponent(md.n, md.k, md.spec));
        std::vector<double> analytic;
        for (int m = 0; m < M; ++m)
            analytic.push_back(std::exp(-m * lnq) + std::exp(pe * lnq) - 1.0 -
                               std::exp((pe + m) * lnq));
        std::sort(analytic.begin(), analytic.end());
        double dev = 0.0;
        for (int i = 0; i < M; ++i)
            dev = std::max(dev, std::abs(es.eigenvalues()[i] - analytic[i]) /
                                    std::max(1.0, std::abs(analytic[i])));
        record("eigenvalues", dev <= 1e-8, {{"max_relative_deviation", dev}});
    }

    ordered_json j;
    j["schema"] = 1;
    j["params"] = params_json(o);
    j["corrupt_weight"] = o.corrupt_weight;
    j["checks"] = checks;
    j["pass"] = all;
    emit_json(o, j);
    return all ? 0 : 1;
}

// ---------------------------------------------------------------------------
// prob / enumerate

ordered_json probability_entry(const Rational& p) {
    return {{"decimal", fmt17(to_double(p))}, {"rational", rational_str(p)}};
}

std::string partition_key(const Partition& lam) {
    ordered_json a = lam.rows;
    return a.dump();
}

void emit_probability_map(const Opts& o, const std::vector<Partition>& sup,
                          const std::vector<Rational>& probs) {
    if (o.format == "csv") {
        std::ofstream file;
        std::ostream& os = open_out(file, o.out);
        os << "partition,decimal,rational\n";
        for (std::size_t i = 0; i < sup.size(); ++i) {
            os << '"';
            for (std::size_t r = 0; r < sup[i].rows.size(); ++r)
                os << (r ? "," : "") << sup[i].rows[r];
            os << "\"," << fmt17(to_double(probs[i])) << "," << rational_str(probs[i]) << "\n";
        }
        return;
    }
    ordered_json map;
    for (std::size_t i = 0; i < sup.size(); ++i) map[partition_key(sup[i])] = probability_entry(probs[i]);
    ordered_json j;
    j["schema"] = 1;
    j["params"] = params_json(o);
    j["probabilities"] = map;
    emit_json(o, j);
}

int run_prob(const Opts& o) {
    require_format(o, {"json", "csv"});
    const Rational q = exact_q(o);
    const ModelParams<Rational> mq{o.n, o.k, q, o.spec()};
    const Partition lam = parse_partition(o.lambda_str, o.n, o.k);
    emit_probability_map(o, {lam}, {prob(lam, mq)});
    return 0;
}

int run_enumerate(const Opts& o) {
    require_format(o, {"json", "csv"});
    const Rational q = exact_q(o);
    if (partitions_in_box_count(o.n, o.k) > 1e5)
        throw std::runtime_error("enumerate: box holds more than 1e5 diagrams");
    const ModelParams<Rational> mq{o.n, o.k, q, o.spec()};
    std::vector<Partition> sup;
    std::vector<Rational> probs;
    enumerate_in_box(o.n, o.k, [&](const Partition& lam) {
        sup.push_back(lam);
        probs.push_back(prob(lam, mq));
    });
    emit_probability_map(o, sup, probs);
    return 0;
}

// ---------------------------------------------------------------------------
// kernel

void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open matrix output file: " + path);
    const std::uint64_t dim = static_cast<std::uint64_t>(m.rows());
    f.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            f.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
}

int run_kernel(const Opts& o) {
    require_format(o, {"json", "csv"});
    const ModelParams<double> md{o.n, o.k, numeric_q(o), o.spec()};
    const int M = o.n + o.k;
    const CDEvaluator ev(md);
    const Eigen::VectorXd diag = ev.kernel_diagonal();

    if (!o.matrix_out.empty()) {
        const KernelMatrix K = (M <= 1200) ? spectral_kernel(md) : cd_kernel(md, 8192);
        write_matrix_binary(o.matrix_out, K.m);
    }

    if (o.format == "csv") {
        std::ofstream file;
        std::ostream& os = open_out(file, o.out);
        os << "a,kernel_diagonal\n";
        for (int a = 0; a < M; ++a) os << a << "," << fmt17(diag[a]) << "\n";
        return 0;
    }
    ordered_json j;
    j["schema"] = 1;
    j["params"] = params_json(o);
    ordered_json d = ordered_json::array();
    for (int a = 0; a < M; ++a) d.push_back(diag[a]);
    j["diagonal"] = d;
    if (!o.matrix_out.empty()) j["matrix_file"] = o.matrix_out;
    emit_json(o, j);
    return 0;
}

// ---------------------------------------------------------------------------
// sample

int run_sample(const Opts& o) {
    require_format(o, {"json", "csv"});
    std::vector<Partition> samples;
    if (o.method == "exact") {
        const ModelParams<Rational> mq{o.n, o.k, exact_q(o), o.spec()};
        const ExactSampler ex(mq);
        samples = ex.sample_many(o.count, o.seed);
    } else {
        const ModelParams<double> md{o.n, o.k, numeric_q(o), o.spec()};
        samples = dpp_batch(md, o.count, o.seed, o.worker_count());
    }

    if (o.format == "csv") {
        std::ofstream file;
        std::ostream& os = open_out(file, o.out);
        os << "sample";
        for (int i = 1; i <= o.n; ++i) os << ",a" << i;
        os << "\n";
        for (std::size_t s = 0; s < samples.size(); ++s) {
            os << s;
            for (int a : to_coords(samples[s], o.n)) os << "," << a;
            os << "\n";
        }
        return 0;
    }
    ordered_json j;
    j["schema"] = 1;
    j["params"] = params_json(o);
    j["params"]["method"] = o.method;
    j["seed"] = o.seed;
    ordered_json arr = ordered_json::array();
    for (const Partition& lam : samples) arr.push_back(to_coords(lam, o.n));
    j["samples"] = arr;
    emit_json(o, j);
    return 0;
}

// ---------------------------------------------------------------------------
// density / shape / clt

int run_density(const Opts& o) {
    require_format(o, {"json", "csv"});
    const LimitParams lp = limit_params(o);
    const double span = lp.c + 1.0;

    if (o.samples == 0) {
        std::vector<double> ts(o.grid), rho(o.grid);
        for (int i = 0; i < o.grid; ++i) {
            ts[i] = span * (i + 0.5) / o.grid;
            rho[i] = limit_density(ts[i], lp);
        }
        if (o.format == "csv") {
            std::ofstream file;
            std::ostream& os = open_out(file, o.out);
            os << "t,rho\n";
            for (int i = 0; i < o.grid; ++i) os << fmt17(ts[i]) << "," << fmt17(rho[i]) << "\n";
            return 0;
        }
        ordered_json j;
        j["schema"] = 1;
        j["params"] = params_json(o);
        j["params"]["c"] = lp.c;
        j["mode"] = "analytic";
        j["t"] = ts;
        j["rho"] = rho;
        emit_json(o, j);
        return 0;
    }

    // Monte Carlo experiment: empirical histogram vs bin-averaged density
    const ModelParams<double> md{o.n, o.k, std::exp(-o.gamma / o.n), o.spec()};
    const std::vector<Partition> samples = dpp_batch(md, o.samples, o.seed, o.worker_count());
    const DensityHistogram h = empirical_density(samples, o.n, o.k, o.grid);
    std::vector<double> analytic(o.grid);
    double sup_dist = 0.0;
    double prev = 0.0;
    for (int b = 0; b < o.grid; ++b) {
        const double x2 = std::min((b + 1) * h.bin_width, span);
        const double cur = integrated_density(x2, lp);
        analytic[b] = (cur - prev) / h.bin_width;
        prev = cur;
        sup_dist = std::max(sup_dist, std::abs(analytic[b] - h.density[b]));
    }

    if (o.format == "csv") {
        std::ofstream file;
        std::ostream& os = open_out(file, o.out);
        os << "t,empirical,analytic\n";
        for (int b = 0; b < o.grid; ++b)
            os << fmt17(h.center[b]) << "," << fmt17(h.density[b]) << "," << fmt17(analytic[b])
               << "\n";
        os << "# sup_distance = " << fmt17(sup_dist) << "\n";
        return 0;
    }
    ordered_json j;
    j["schema"] = 1;
    j["params"] = params_json(o, true);
    j["params"]["c"] = lp.c;
    j["mode"] = "experiment";
    j["samples"] = o.samples;
    j["t"] = h.center;
    j["empirical"] = h.density;
    j["analytic"] = analytic;
    j["sup_distance"] = sup_dist;
    emit_json(o, j);
    return 0;
}

int run_shape(const Opts& o) {
    require_format(o, {"json", "csv"});
    const LimitParams lp = limit_params(o);
    const double span = lp.c + 1.0;
    const int G = std::max(2, o.grid);
    std::vector<double> xs(G), fs(G);
    for (int i = 0; i < G; ++i) {
        xs[i] = span * i / (G - 1);
        fs[i] = limit_shape(xs[i], lp);
    }
    if (o.format == "csv") {
        std::ofstream file;
        std::ostream& os = open_out(file, o.out);
        os << "x,f\n";
        for (int i = 0; i < G; ++i) os << fmt17(xs[i]) << "," << fmt17(fs[i]) << "\n";
        return 0;
    }
    ordered_json j;
    j["schema"] = 1;
    j["params"] = params_json(o);
    j["params"]["c"] = lp.c;
    j["x"] = xs;
    j["f"] = fs;
    emit_json(o, j);
    return 0;
}

std::function<double(double)> statistic_function(const std::string& name) {
    if (name == "one") return [](double) { return 1.0; };
    if (name == "s") return [](double s) { return s; };
    if (name == "s2") return [](double s) { return s * s; };
    if (name == "exp") return [](double s) { return std::exp(-s); };
    throw std::runtime_error("unknown statistic '" + name + "' (choose one|s|s2|exp)");
}

int run_clt(const Opts& o) {
    require_format(o, {"json", "csv"});
    const LimitParams lp = limit_params(o);
    const auto f = statistic_function(o.stat_name);
    const RecurrenceLimits rl = recurrence_limits_closed(lp);
    const double sigma2 = clt_variance(f, rl);

    ordered_json j;
    j["schema"] = 1;
    j["params"] = params_json(o, o.samples > 0);
    j["params"]["c"] = lp.c;
    j["statistic"] = o.stat_name;
    j["a"] = rl.a;
    j["b"] = rl.b;
    j["sigma2"] = sigma2;

    double emp_var = 0.0, mean = 0.0, skew = 0.0, exkurt = 0.0;
    if (o.samples > 0) {
        const ModelParams<double> md{o.n, o.k, std::exp(-o.gamma / o.n), o.spec()};
        const std::vector<Partition> samples = dpp_batch(md, o.samples, o.seed, o.worker_count());
        std::vector<double> xs;
        xs.reserve(samples.size());
        for (const Partition& lam : samples)
            xs.push_back(linear_statistic(f, lam, o.n, o.gamma));
        for (double x : xs) mean += x;
        mean /= xs.size();
        for (double x : xs) emp_var += (x - mean) * (x - mean);
        emp_var /= (xs.size() - 1);
        const double sd = std::sqrt(emp_var);
        if (sd > 0) {
            for (double x : xs) {
                const double z = (x - mean) / sd;
                skew += z * z * z;
                exkurt += z * z * z * z;
            }
            skew /= xs.size();
            exkurt = exkurt / xs.size() - 3.0;
        }
        j["count"] = o.samples;
        j["empirical_mean"] = mean;
        j["empirical_variance"] = emp_var;
        j["variance_ratio"] = sigma2 > 0 ? emp_var / sigma2 : 0.0;
        j["skewness"] = skew;
        j["excess_kurtosis"] = exkurt;
    }

    if (o.format == "csv") {
        std::ofstream file;
        std::ostream& os = open_out(file, o.out);
        if (o.samples > 0) {
            os << "statistic,a,b,sigma2,count,empirical_variance,variance_ratio,skewness,"
                  "excess_kurtosis\n";
            os << o.stat_name << "," << fmt17(rl.a) << "," << fmt17(rl.b) << "," << fmt17(sigma2)
               << "," << o.samples << "," << fmt17(emp_var) << ","
               << fmt17(sigma2 > 0 ? emp_var / sigma2 : 0.0) << "," << fmt17(skew) << ","
               << fmt17(exkurt) << "\n";
        } else {
            os << "statistic,a,b,sigma2\n";
            os << o.stat_name << "," << fmt17(rl.a) << "," << fmt17(rl.b) << "," << fmt17(sigma2)
               << "\n";
        }
        return 0;
    }
    emit_json(o, j);
    return 0;
}

// ---------------------------------------------------------------------------
// render

struct SvgCanvas {
    double xmin, xmax, ymin, ymax;
    double scale, pad = 36.0;
    double width() const { return (xmax - xmin) * scale + 2 * pad; }
    double height() const { return (ymax - ymin) * scale + 2 * pad; }
    double X(double x) const { return (x - xmin) * scale + pad; }
    double Y(double y) const { return (ymax - y) * scale + pad; }
};

std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string polyline(const SvgCanvas& cv, const std::vector<std::pair<double, double>>& pts,
                     const std::string& style) {
    std::string s = "<polyline fill=\"none\" " + style + " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) s += " ";
        s += svg_coord(cv.X(pts[i].first)) + "," + svg_coord(cv.Y(pts[i].second));
    }
    s += "\"/>\n";
    return s;
}

std::vector<std::pair<double, double>> profile_points(const Partition& lam, int n, int k) {
    const Profile pr = profile(lam, n, k);
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j <= n + k; ++j)
        pts.emplace_back(static_cast<double>(j) / n, static_cast<double>(pr.heights[j]) / n);
    return pts;
}

int run_render(const Opts& o) {
    if (o.format != "svg" && o.format != "json")
        throw std::runtime_error("render emits SVG; use --format svg");
    const int n = o.n, k = o.k;

    bool have_diagram = !o.curve_only;
    Partition lam;
    if (have_diagram) {
        if (!o.lambda_str.empty()) {
            lam = parse_partition(o.lambda_str, n, k);
        } else {
            const ModelParams<double> md{n, k, numeric_q(o), o.spec()};
            lam = dpp_batch(md, 1, o.seed, 1).front();
        }
    }
    const bool want_curve = o.overlay || o.curve_only;
    if (want_curve && !o.has_gamma())
        throw std::runtime_error("render: limit-shape overlay requires --gamma");

    // world geometry (units of n)
    const double xspan = static_cast<double>(n + k) / n;
    const Partition empty{std::vector<int>(n, 0)};
    const Partition full{std::vector<int>(n, k)};
    const auto lower = profile_points(empty, n, k);
    const auto upper = profile_points(full, n, k);
    double ymax = 0;
    for (const auto& p : upper) ymax = std::max(ymax, p.second);

    SvgCanvas cv{0.0, xspan, 0.0, ymax, 0.0};
    cv.scale = 640.0 / xspan;

    std::string body;
    const std::string dashed =
        "stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"6,4\"";
    body += polyline(cv, lower, dashed);
    body += polyline(cv, upper, dashed);

    if (have_diagram) {
        body += polyline(cv, profile_points(lam, n, k),
                         "stroke=\"#000000\" stroke-width=\"2\"");
        const Profile pr = profile(lam, n, k);
        const std::vector<int> coords = to_coords(lam, n);
        const std::set<int> occupied(coords.begin(), coords.end());
        const double r = 0.30 / n;
        for (int a = 0; a < n + k; ++a) {
            const double mx = (a + 0.5) / n;
            const double my = 0.5 * (pr.heights[a] + pr.heights[a + 1]) / n;
            const bool part = occupied.count(a) > 0;
            // particles: right-pointing; holes: left-pointing
            const double tip = part ? mx + r : mx - r;
            const double base = part ? mx - r : mx + r;
            body += "<polygon fill=\"" + std::string(part ? "#1f77b4" : "#ff7f0e") +
                    "\" points=\"" + svg_coord(cv.X(tip)) + "," + svg_coord(cv.Y(my)) + " " +
                    svg_coord(cv.X(base)) + "," + svg_coord(cv.Y(my + r)) + " " +
                    svg_coord(cv.X(base)) + "," + svg_coord(cv.Y(my - r)) + "\"/>\n";
        }
    }

    if (want_curve) {
        const LimitParams lp = limit_params(o);
        std::vector<std::pair<double, double>> pts;
        const int G = 200;
        for (int i = 0; i <= G; ++i) {
            const double x = (lp.c + 1.0) * i / G;
            pts.emplace_back(x, limit_shape(x, lp));
        }
        body += polyline(cv, pts, "stroke=\"#d62728\" stroke-width=\"2\"");
    }

    std::ofstream file;
    std::ostream& os = open_out(file, o.out);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_coord(cv.width())
       << "\" height=\"" << svg_coord(cv.height()) << "\" viewBox=\"0 0 "
       << svg_coord(cv.width()) << " " << svg_coord(cv.height()) << "\">\n"
       << "<title>rotated diagram boundary</title>\n"
       << body << "</svg>\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-deformed random diagram ensembles: exact measures, correlation kernels, "
                 "samplers, and scaling limits"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML file with a [subcommand] section mirroring its flags");

    Opts o;
    int code = 0;

    CLI::App* verify = app.add_subcommand("verify", "run the exact identity suite");
    add_common_flags(verify, o);
    verify->add_flag("--corrupt-weight", o.corrupt_weight,
                     "test hook: damage one weight to demonstrate failure detection");
    verify->callback([&] { code = run_verify(o); });

    CLI::App* probc = app.add_subcommand("prob", "exact probability of one diagram");
    add_common_flags(probc, o);
    probc->add_option("--lambda", o.lambda_str, "diagram rows, comma separated")->required();
    probc->callback([&] { code = run_prob(o); });

    CLI::App* enumc = app.add_subcommand("enumerate", "exact probabilities of every diagram");
    add_common_flags(enumc, o);
    enumc->callback([&] { code = run_enumerate(o); });

    CLI::App* kernelc = app.add_subcommand("kernel", "correlation kernel diagonal and matrix");
    add_common_flags(kernelc, o);
    kernelc->add_option("--matrix-out", o.matrix_out,
                        "write the full kernel matrix to this binary file");
    kernelc->callback([&] { code = run_kernel(o); });

    CLI::App* samplec = app.add_subcommand("sample", "draw random diagrams");
    add_common_flags(samplec, o);
    samplec->add_option("--count", o.count, "number of samples");
    samplec->add_option("--method", o.method, "sampling method")
        ->check(CLI::IsMember({"exact", "dpp"}));
    samplec->callback([&] { code = run_sample(o); });

    CLI::App* densityc = app.add_subcommand("density", "limiting particle density");
    add_common_flags(densityc, o);
    densityc->add_option("--grid", o.grid, "number of grid points / histogram bins");
    densityc->add_option("--samples", o.samples,
                         "Monte Carlo sample count (0 = analytic curve only)");
    densityc->callback([&] { code = run_density(o); });

    CLI::App* shapec = app.add_subcommand("shape", "limiting boundary profile");
    add_common_flags(shapec, o);
    shapec->add_option("--grid", o.grid, "number of grid points");
    shapec->callback([&] { code = run_shape(o); });

    CLI::App* cltc = app.add_subcommand("clt", "fluctuation variance of linear statistics");
    add_common_flags(cltc, o);
    cltc->add_option("--f", o.stat_name, "statistic from the catalog one|s|s2|exp");
    cltc->add_option("--samples", o.samples, "Monte Carlo sample count (0 = analytic only)");
    cltc->callback([&] { code = run_clt(o); });

    CLI::App* renderc = app.add_subcommand("render", "SVG picture of a diagram or limit curve");
    add_common_flags(renderc, o);
    renderc->add_option("--lambda", o.lambda_str, "diagram rows, comma separated");
    renderc->add_flag("--overlay", o.overlay, "draw the analytic limit shape as well");
    renderc->add_flag("--curve-only", o.curve_only, "draw only the limit curve and box");
    renderc->callback([&] { code = run_render(o); });

    try {
        o.format = "json";
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}
