#include "hida/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "hida/random.hpp"

namespace hida
{

void NormParams::validate() const
{
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("norm parameters: r must be >= 0, got " + format_double(r));
    }
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw std::invalid_argument("norm parameters: C must be > 0, got " + format_double(C));
    }
    if (!(C1 > 0.0) || !std::isfinite(C1)) {
        throw std::invalid_argument("norm parameters: C1 must be > 0, got " + format_double(C1));
    }
}

double hida_weight(const MultiIndex &index, const NormParams &p)
{
    double w = 1.0;
    for (const auto &e : index.entries()) {
        const double k = e.index.k;
        w *= std::pow(p.C1 * k * k + 1.0, 0.5 * p.r * e.mult);
    }
    return w;
}

template <typename T>
double hida_norm(const FockSeries<T> &f, const NormParams &p)
{
    double sum = 0.0;
    for (const auto &t : f.terms()) {
        const double m = ScalarTraits<T>::modulus(t.coeff);
        sum += m * m * hida_weight(t.index, p) * std::pow(p.C, t.index.degree());
    }
    return std::sqrt(sum);
}

template double hida_norm(const FockSeries<ExactComplex> &, const NormParams &);
template double hida_norm(const FockSeries<FloatComplex> &, const NormParams &);

Rational hida_weight_exact(const MultiIndex &index, unsigned r, const Rational &C1)
{
    if (r % 2 != 0) {
        throw std::invalid_argument("exact weight needs even r, got " + std::to_string(r));
    }
    Rational w(1);
    for (const auto &e : index.entries()) {
        const Rational base = C1 * e.index.k * e.index.k + 1;
        for (unsigned j = 0; j < r / 2 * e.mult; ++j) {
            w *= base;
        }
    }
    return w;
}

std::vector<double> complete_homogeneous(const std::vector<double> &x, int max_degree)
{
    std::vector<double> h(static_cast<std::size_t>(max_degree) + 1, 0.0);
    h[0] = 1.0;
    for (double xa : x) {
        for (int d = 1; d <= max_degree; ++d) {
            h[d] += xa * h[d - 1];
        }
    }
    return h;
}

std::vector<double> complete_homogeneous_newton(const std::vector<double> &x, int max_degree)
{
    std::vector<double> power_sums(static_cast<std::size_t>(max_degree) + 1, 0.0);
    for (double xa : x) {
        double pw = 1.0;
        for (int k = 1; k <= max_degree; ++k) {
            pw *= xa;
            power_sums[k] += pw;
        }
    }
    std::vector<double> h(static_cast<std::size_t>(max_degree) + 1, 0.0);
    h[0] = 1.0;
    for (int k = 1; k <= max_degree; ++k) {
        double s = 0.0;
        for (int i = 1; i <= k; ++i) {
            s += power_sums[i] * h[k - i];
        }
        h[k] = s / k;
    }
    return h;
}

double enumerate_mode_sum(const std::vector<double> &x, int max_degree)
{
    double total = 0.0;
    std::function<void(std::size_t, int, double)> rec = [&](std::size_t a, int remaining, double value) {
        if (a == x.size()) {
            total += value;
            return;
        }
        double v = value;
        for (int m = 0; m <= remaining; ++m) {
            rec(a + 1, remaining - m, v);
            v *= x[a];
        }
    };
    rec(0, max_degree, 1.0);
    return total;
}

namespace
{

double sum_of(const std::vector<double> &v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s;
}

// Shared evaluation: ratio(k) for retained |k| <= kmax (n directions each),
// and a tail estimate ratio(k) <= K0 k^{-s} for |k| > kmax.
ModeSumReport mode_sum(const std::function<double(int)> &ratio, double K0, double s, int kmax, int n,
                       int max_degree)
{
    if (kmax < 0 || n < 1 || max_degree < 0) {
        throw std::invalid_argument("mode sum needs kmax >= 0, n >= 1 and max_degree >= 0");
    }
    ModeSumReport rep;
    rep.kmax = kmax;
    rep.n = n;
    rep.max_degree = max_degree;
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> x;
    int worst_mode = 0;
    for (int k = -kmax; k <= kmax; ++k) {
        const double xk = ratio(k);
        if (xk > rep.x_max) {
            rep.x_max = xk;
            worst_mode = k;
        }
        for (int i = 0; i < n; ++i) {
            x.push_back(xk);
        }
    }
    rep.retained_modes = x.size();
    rep.direct = sum_of(complete_homogeneous(x, max_degree));
    rep.closed_form = sum_of(complete_homogeneous_newton(x, max_degree));

    if (rep.x_max >= 1.0) {
        rep.summable = false;
        rep.diagnostic = "x = " + format_double(rep.x_max) + " >= 1 at k = " + std::to_string(worst_mode)
                         + ": the geometric series over that mode diverges";
        rep.product = inf;
        rep.tail_bound = inf;
        rep.total_bound = inf;
        return rep;
    }
    double log_product = 0.0;
    for (double xa : x) {
        log_product -= std::log1p(-xa);
    }
    rep.product = std::exp(log_product);

    if (!(s > 1.0)) {
        rep.summable = false;
        rep.diagnostic = "tail decays like |k|^-" + format_double(s) + " (exponent <= 1): the sum over modes diverges";
        rep.tail_bound = inf;
        rep.total_bound = inf;
        rep.tail_formula = "none (exponent <= 1)";
        return rep;
    }
    const double per_direction =
        kmax >= 1 ? std::pow(static_cast<double>(kmax), 1.0 - s) / (s - 1.0) : 1.0 + 1.0 / (s - 1.0);
    rep.tail_bound = 2.0 * n * K0 * per_direction;
    rep.tail_formula = kmax >= 1 ? "2 n K0 kmax^(1-s) / (s-1), K0 = " + format_double(K0) + ", s = " + format_double(s)
                                 : "2 n K0 (1 + 1/(s-1)), K0 = " + format_double(K0) + ", s = " + format_double(s);
    const double x_tail = K0 * std::pow(static_cast<double>(kmax + 1), -s);
    if (x_tail >= 1.0) {
        rep.summable = true;
        rep.total_bound = inf;
        rep.diagnostic = "tail terms are not yet below 1 at kmax + 1; increase kmax for a finite total bound";
        return rep;
    }
    rep.summable = true;
    rep.total_bound = rep.product * std::exp(rep.tail_bound / (1.0 - x_tail));
    return rep;
}

} // namespace

ModeSumReport nuclearity_sum(const NormParams &p, int kmax, int n, int max_degree)
{
    p.validate();
    auto ratio = [&](int k) { return p.C * std::pow(p.C1 * k * k + 1.0, -0.5 * p.r); };
    return mode_sum(ratio, p.C * std::pow(p.C1, -0.5 * p.r), p.r, kmax, n, max_degree);
}

ModeSumReport hs_embedding_norm(const NormParams &from, const NormParams &to, int kmax, int n, int max_degree)
{
    from.validate();
    to.validate();
    auto ratio = [&](int k) {
        const double kk = static_cast<double>(k) * k;
        return (to.C / from.C) * std::pow(to.C1 * kk + 1.0, 0.5 * to.r) * std::pow(from.C1 * kk + 1.0, -0.5 * from.r);
    };
    const double K0 = (to.C / from.C) * std::pow(to.C1 + 1.0, 0.5 * to.r) * std::pow(from.C1, -0.5 * from.r);
    return mode_sum(ratio, K0, from.r - to.r, kmax, n, max_degree);
}

std::string_view to_string(ProbeOp op)
{
    switch (op) {
    case ProbeOp::bracket:
        return "bracket";
    case ProbeOp::p_l:
        return "p_l";
    case ProbeOp::e_a_form:
        return "e_a_form";
    }
    return "bracket";
}

ProbeOp parse_probe_op(std::string_view text)
{
    if (text == "bracket") {
        return ProbeOp::bracket;
    }
    if (text == "p_l") {
        return ProbeOp::p_l;
    }
    if (text == "e_a_form") {
        return ProbeOp::e_a_form;
    }
    throw std::invalid_argument("unknown probe operation '" + std::string(text) + "'");
}

namespace
{

// Coefficient j/4, j in {-4..4} \ {0}, times 1/w_2(I): larger modes are
// damped so that the sample stays inside every W.N_{r,C} of interest.
ExactSeries probe_series(Sampler &rng, const Space &space, const ProbeConfig &cfg, const Rational &C1)
{
    const long terms = rng.uniform(1, cfg.max_terms);
    std::vector<std::pair<MultiIndex, ExactComplex>> raw;
    for (long t = 0; t < terms; ++t) {
        const int degree = static_cast<int>(rng.uniform(0, cfg.max_degree));
        auto index = rng.multi_index(space, cfg.kmax, degree);
        long j = rng.uniform(1, 4);
        if (rng.uniform(0, 1) == 1) {
            j = -j;
        }
        Rational c(j, 4);
        c /= hida_weight_exact(index, 2, C1);
        raw.emplace_back(std::move(index), ExactComplex(c));
    }
    return canonicalize(space, std::move(raw));
}

} // namespace

ProbeReport continuity_probe(const ProbeConfig &config)
{
    config.target.validate();
    config.source.validate();
    if (config.samples == 0) {
        throw std::invalid_argument("continuity probe needs at least one sample");
    }
    ProbeReport rep;
    rep.config = config;
    rep.sampling = "per-sample substream of mt19937_64; " + std::to_string(config.max_terms)
                   + " terms max, degree <= " + std::to_string(config.max_degree) + ", |k| <= "
                   + std::to_string(config.kmax) + "; coefficients j/4 (j in -4..4, j != 0) times 1/w_2(I)";
    const Space space = config.op == ProbeOp::e_a_form ? Space::cotangent() : config.loop.space();
    const Rational C1(config.source.C1);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < config.samples; ++i) {
        Sampler rng = Sampler::substream(config.seed, i);
        const auto f = probe_series(rng, space, config, C1);
        const auto g = probe_series(rng, space, config, C1);
        const double denom = hida_norm(f, config.source) * hida_norm(g, config.source);
        if (denom == 0.0) {
            ++rep.skipped_zero_denominator;
            continue;
        }
        ExactSeries out;
        switch (config.op) {
        case ProbeOp::bracket:
            out = poisson_bracket(f, g, SymplecticModel{config.loop});
            break;
        case ProbeOp::p_l:
            out = p_l(f, g, config.l, config.loop, config.convention);
            break;
        case ProbeOp::e_a_form:
            out = e_a_form(f, g, config.A);
            break;
        }
        ratios.push_back(hida_norm(out, config.target) / denom);
    }
    rep.evaluated = ratios.size();
    if (ratios.empty()) {
        return rep;
    }
    double sum = 0.0;
    for (double v : ratios) {
        sum += v;
    }
    rep.mean = sum / static_cast<double>(ratios.size());
    std::sort(ratios.begin(), ratios.end());
    rep.K_hat = ratios.back();
    for (double q : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0}) {
        const auto N = static_cast<double>(ratios.size());
        auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(q * N)));
        rep.quantiles.emplace_back(q, ratios[std::min(rank, ratios.size()) - 1]);
    }
    return rep;
}

} // namespace hida
